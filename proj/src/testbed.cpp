#include "rbo/testbed.hpp"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "rbo/errors.hpp"

namespace rbo {

namespace {

void require_unit_cube(std::span<const double> u, const std::string& who) {
  for (double v : u)
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError(who + ": coordinate " + std::to_string(v) + " outside [0,1]");
    }
}

std::size_t grid_count(double width, double step) {
  if (width <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(width / step - 1e-9)) + 1;
}

}  // namespace

double ObjectiveSpec::operator()(std::span<const double> u) const {
  if (u.size() != dim) {
    throw DimensionMismatch(name + " expects " + std::to_string(dim) + " coordinates, got " +
                            std::to_string(u.size()));
  }
  require_unit_cube(u, name);
  return eval(u);
}

std::string ObjectiveSpec::label() const {
  std::string s = name;
  if (!variant.empty()) s += "[" + variant + "]";
  return s + " (d=" + std::to_string(dim) + ")";
}

double ryan1d(double x, double slope) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("ryan1d: x outside [0,1]");
  if (x < 0.4) return 3.5 * (x - 0.15) * (x - 0.15) + std::log(1.3);
  if (x < 0.7) return std::log(1.0 + std::abs(slope * (x - 0.55)));
  return std::sin(25.0 * x - 17.5) / 20.0 + std::log(1.3);
}

double bertsimas_raw(double x1, double x2) {
  const double f = -2.0 * std::pow(x1, 6) + 12.2 * std::pow(x1, 5) - 21.2 * std::pow(x1, 4) +
                   6.4 * std::pow(x1, 3) + 4.7 * x1 * x1 - 6.2 * x1 - std::pow(x2, 6) +
                   11.0 * std::pow(x2, 5) - 43.3 * std::pow(x2, 4) + 74.8 * std::pow(x2, 3) -
                   56.9 * x2 * x2 + 10.0 * x2 + 4.1 * x1 * x2 + 0.1 * x1 * x1 * x2 * x2 -
                   0.4 * x1 * x2 * x2 - 0.4 * x1 * x1 * x2;
  return f;
}

std::vector<double> AffineBox::decode(std::span<const double> u) const {
  std::vector<double> x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) x[j] = lo[j] + u[j] * (hi[j] - lo[j]);
  return x;
}

std::vector<double> AffineBox::encode(std::span<const double> x) const {
  std::vector<double> u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) u[j] = (x[j] - lo[j]) / (hi[j] - lo[j]);
  return u;
}

const AffineBox& bertsimas_box() {
  static const AffineBox box{{-0.95, -0.45}, {3.2, 4.4}};
  return box;
}

AffineBox rosenbrock_box(std::size_t d) {
  return {std::vector<double>(d, -2.48), std::vector<double>(d, 2.48)};
}

double bertsimas2d(std::span<const double> u) {
  if (u.size() != 2) throw DimensionMismatch("bertsimas2d is two-dimensional");
  require_unit_cube(u, "bertsimas2d");
  const auto x = bertsimas_box().decode(u);
  return -bertsimas_raw(x[0], x[1]);
}

double rosenbrock_raw(std::span<const double> x, RosenbrockVariant variant) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double lead = variant == RosenbrockVariant::classic ? x[i] * x[i] : x[i];
    const double a = x[i + 1] - lead;
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double rosenbrock(std::span<const double> u, RosenbrockVariant variant) {
  if (u.size() < 2) throw DimensionMismatch("rosenbrock needs d >= 2");
  require_unit_cube(u, "rosenbrock");
  return rosenbrock_raw(rosenbrock_box(u.size()).decode(u), variant);
}

ObjectiveSpec make_objective(const std::string& name, const std::string& variant, std::size_t d) {
  if (name == "ryan1d" || name == "ryan-sharp") {
    const bool sharp = name == "ryan-sharp" || variant == "sharp";
    if (!sharp && !variant.empty() && variant != "default") {
      throw ConfigError("ryan1d variants are default|sharp, got '" + variant + "'");
    }
    if (d != 0 && d != 1) throw ConfigError("ryan1d is one-dimensional");
    const double slope = sharp ? kRyanSharpSlope : 2.0;
    return {"ryan1d", sharp ? "sharp" : "default", 1,
            [slope](std::span<const double> u) { return ryan1d(u[0], slope); }, {0.55}};
  }
  if (name == "bertsimas2d") {
    if (!variant.empty() && variant != "default") throw ConfigError("bertsimas2d has no variants");
    if (d != 0 && d != 2) throw ConfigError("bertsimas2d is two-dimensional");
    const std::vector<double> raw_opt{2.8, 4.0};
    return {"bertsimas2d", "", 2, [](std::span<const double> u) { return bertsimas2d(u); },
            bertsimas_box().encode(raw_opt)};
  }
  if (name == "rosenbrock") {
    RosenbrockVariant v = RosenbrockVariant::paper;
    if (variant == "classic") {
      v = RosenbrockVariant::classic;
    } else if (!variant.empty() && variant != "paper") {
      throw ConfigError("rosenbrock variants are paper|classic, got '" + variant + "'");
    }
    const std::size_t dim = d == 0 ? 2 : d;
    if (dim < 2) throw ConfigError("rosenbrock needs d >= 2");
    const std::vector<double> ones(dim, 1.0);
    return {"rosenbrock", v == RosenbrockVariant::classic ? "classic" : "paper", dim,
            [v](std::span<const double> u) { return rosenbrock(u, v); }, rosenbrock_box(dim).encode(ones)};
  }
  throw ConfigError("unknown objective '" + name + "'");
}

std::vector<std::string> describe_objectives() {
  return {
      "ryan1d        d=1  variants: default (slope 2), sharp (slope 20; alias ryan-sharp)",
      "bertsimas2d   d=2  negated Bertsimas polynomial, coded from [-0.95,3.2]x[-0.45,4.4]",
      "rosenbrock    d>=2 variants: paper (100(x[i+1]-x[i])^2 + (x[i]-1)^2), classic; coded from "
      "[-2.48,2.48]^d",
      "external      any d  command=<shell command> (line protocol) or table=<csv> (nearest neighbour)",
  };
}

// --- external objectives -------------------------------------------------

namespace {

class ChildEvaluator {
 public:
  ChildEvaluator(const std::string& command, std::size_t d) : command_(command), dim_(d) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
      throw EvaluatorFailure("socketpair failed: " + std::string(std::strerror(errno)));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      ::close(sv[0]);
      ::close(sv[1]);
      throw EvaluatorFailure("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid_ == 0) {
      ::dup2(sv[1], STDIN_FILENO);
      ::dup2(sv[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(sv[1]);
    fd_ = sv[0];
  }

  ChildEvaluator(const ChildEvaluator&) = delete;
  ChildEvaluator& operator=(const ChildEvaluator&) = delete;

  ~ChildEvaluator() {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
    }
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  double evaluate(std::span<const double> u) {
    std::lock_guard lock(mu_);
    if (dead_) throw EvaluatorFailure("external evaluator '" + command_ + "' is no longer running");
    std::ostringstream req;
    req.precision(17);
    for (std::size_t j = 0; j < u.size(); ++j) req << (j ? " " : "") << u[j];
    req << '\n';
    const std::string msg = req.str();
    std::size_t sent = 0;
    while (sent < msg.size()) {
      const ssize_t k = ::send(fd_, msg.data() + sent, msg.size() - sent, MSG_NOSIGNAL);
      if (k < 0) {
        if (errno == EINTR) continue;
        fail("write failed: " + std::string(std::strerror(errno)));
      }
      sent += static_cast<std::size_t>(k);
    }
    std::string line = read_line();
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) fail("empty response");
    const char* first = line.data() + start;
    const char* last = line.data() + line.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail("malformed response '" + line + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    dead_ = true;
    std::string status;
    if (pid_ > 0) {
      int st = 0;
      if (::waitpid(pid_, &st, WNOHANG) == pid_) {
        pid_ = -1;
        if (WIFEXITED(st)) status = " (exit status " + std::to_string(WEXITSTATUS(st)) + ")";
        else if (WIFSIGNALED(st)) status = " (killed by signal " + std::to_string(WTERMSIG(st)) + ")";
      }
    }
    throw EvaluatorFailure("external evaluator '" + command_ + "': " + why + status);
  }

  std::string read_line() {
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[256];
      const ssize_t k = ::recv(fd_, chunk, sizeof chunk, 0);
      if (k < 0 && errno == EINTR) continue;
      if (k <= 0) {
        // Give the child a moment to be reaped so the exit status is known.
        if (pid_ > 0) {
          int st = 0;
          if (::waitpid(pid_, &st, 0) == pid_) {
            pid_ = -1;
            dead_ = true;
            std::string status = WIFEXITED(st) ? " (exit status " + std::to_string(WEXITSTATUS(st)) + ")" : "";
            throw EvaluatorFailure("external evaluator '" + command_ + "' closed its output" + status);
          }
        }
        fail("closed its output");
      }
      buffer_.append(chunk, static_cast<std::size_t>(k));
    }
  }

  std::string command_;
  std::size_t dim_;
  pid_t pid_ = -1;
  int fd_ = -1;
  bool dead_ = false;
  std::string buffer_;
  std::mutex mu_;
};

}  // namespace

ObjectiveSpec external_command(const std::string& command, std::size_t d) {
  if (d == 0) throw ConfigError("external objective needs a dimension");
  auto child = std::make_shared<ChildEvaluator>(command, d);
  return {"external", "command", d, [child](std::span<const double> u) { return child->evaluate(u); }, {}};
}

ObjectiveSpec table_objective(Matrix x, std::vector<double> y) {
  if (x.rows() == 0 || x.rows() != y.size()) throw ConfigError("lookup table needs matching non-empty rows");
  const std::size_t d = x.cols();
  auto xs = std::make_shared<const Matrix>(std::move(x));
  auto ys = std::make_shared<const std::vector<double>>(std::move(y));
  auto lookup = [xs, ys](std::span<const double> u) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs->rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) s += ((*xs)(i, j) - u[j]) * ((*xs)(i, j) - u[j]);
      if (s < best_d) {
        best_d = s;
        best = i;
      }
    }
    return (*ys)[best];
  };
  return {"external", "table", d, lookup, {}};
}

ObjectiveSpec table_objective(const std::filesystem::path& csv, std::size_t d) {
  std::ifstream in(csv);
  if (!in) throw EvaluatorFailure("cannot open lookup table " + csv.string());
  Matrix x;
  std::vector<double> y;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        numeric = false;
        break;
      }
      vals.push_back(v);
    }
    if (!numeric) {
      if (lineno == 1) continue;
      throw EvaluatorFailure(csv.string() + ":" + std::to_string(lineno) + ": non-numeric cell");
    }
    if (vals.size() != d + 1) {
      throw EvaluatorFailure(csv.string() + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(d + 1) + " columns");
    }
    y.push_back(vals.back());
    vals.pop_back();
    x.append_row(vals);
  }
  return table_objective(std::move(x), std::move(y));
}

// --- adversary oracles ---------------------------------------------------

double default_adversary_step(std::size_t d) { return d <= 2 ? 1e-3 : 5e-3; }

double default_oracle_step(std::size_t d) {
  switch (d) {
    case 1:
    case 2: return 1e-3;
    case 3: return 5e-3;
    case 4: return 0.02;
    case 5: return 0.05;
    default: return 0.1;
  }
}

double true_adversary(const ObjectiveSpec& f, std::span<const double> x, std::span<const double> alpha,
                      double step) {
  const std::size_t d = f.dim;
  if (x.size() != d || alpha.size() != d) throw DimensionMismatch("true_adversary: dimension mismatch");
  require_unit_cube(x, "true_adversary");
  if (step <= 0.0) step = default_adversary_step(d);
  std::vector<std::vector<double>> axes(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double lo = std::max(0.0, x[j] - alpha[j]);
    const double hi = std::min(1.0, x[j] + alpha[j]);
    const std::size_t count = grid_count(hi - lo, step);
    axes[j].resize(count);
    for (std::size_t k = 0; k < count; ++k)
      axes[j][k] = count == 1 ? x[j] : (k + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(k) /
                                                                       static_cast<double>(count - 1));
    // The centre itself is always scanned, so g(x, alpha) >= f(x) exactly.
    const auto at = std::lower_bound(axes[j].begin(), axes[j].end(), x[j]);
    if (at == axes[j].end() || *at != x[j]) axes[j].insert(at, x[j]);
  }
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> p(d);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t j = 0; j < d; ++j) p[j] = axes[j][idx[j]];
    best = std::max(best, f(p));
    std::size_t j = d;
    while (j-- > 0) {
      if (++idx[j] < axes[j].size()) break;
      idx[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return best;
}

namespace {

// In-place windowed max along one axis of a row-major grid with `m` points
// per axis: out[i] = max(in[i-k .. i+k]) truncated at the edges.
void sliding_max_axis(std::vector<double>& g, std::size_t m, std::size_t d, std::size_t axis, std::size_t k) {
  if (k == 0) return;
  std::size_t stride = 1;
  for (std::size_t j = axis + 1; j < d; ++j) stride *= m;
  const std::size_t outer = g.size() / (stride * m);
  std::vector<double> line(m), out(m);
  std::deque<std::size_t> dq;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < stride; ++s) {
      const std::size_t base = o * stride * m + s;
      for (std::size_t i = 0; i < m; ++i) line[i] = g[base + i * stride];
      dq.clear();
      for (std::size_t i = 0; i < m + k; ++i) {
        if (i < m) {
          while (!dq.empty() && line[dq.back()] <= line[i]) dq.pop_back();
          dq.push_back(i);
        }
        if (i >= k) {
          const std::size_t c = i - k;
          while (dq.front() + k < c) dq.pop_front();
          out[c] = line[dq.front()];
        }
      }
      for (std::size_t i = 0; i < m; ++i) g[base + i * stride] = out[i];
    }
}

}  // namespace

OracleResult robust_optimum(const ObjectiveSpec& f, std::span<const double> alpha, double step) {
  const std::size_t d = f.dim;
  if (alpha.size() != d) throw DimensionMismatch("robust_optimum: alpha dimension mismatch");
  if (step <= 0.0) step = default_oracle_step(d);
  const std::size_t m = grid_count(1.0, step);
  const double h = 1.0 / static_cast<double>(m - 1);
  double total = 1.0;
  for (std::size_t j = 0; j < d; ++j) total *= static_cast<double>(m);
  if (total > 5e7) throw ConfigError("robust_optimum grid too large; pass a coarser step");

  auto coord = [&](std::size_t k) { return k + 1 == m ? 1.0 : static_cast<double>(k) * h; };
  std::vector<double> g(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> p(d);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t j = d; j-- > 0;) {
      idx[j] = rem % m;
      rem /= m;
      p[j] = coord(idx[j]);
    }
    g[flat] = f.eval(p);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const auto k = static_cast<std::size_t>(std::floor(alpha[j] / h + 1e-9));
    sliding_max_axis(g, m, d, j, k);
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
  OracleResult out;
  out.xr.resize(d);
  std::size_t rem = best;
  for (std::size_t j = d; j-- > 0;) {
    out.xr[j] = coord(rem % m);
    rem /= m;
  }
  out.g_at_xr = g[best];
  out.grid_step = h;
  return out;
}

}  // namespace rbo
