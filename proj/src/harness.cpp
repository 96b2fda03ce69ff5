#include "rbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rbo/acquire.hpp"
#include "rbo/design.hpp"
#include "rbo/errors.hpp"
#include "rbo/stableopt.hpp"

namespace rbo {

namespace {

struct MethodName {
  Method method;
  const char* name;
};

constexpr MethodName kMethodNames[] = {
    {Method::rego_known, "rego-known"}, {Method::rego_rand, "rego-rand"}, {Method::rego_sum, "rego-sum"},
    {Method::ego, "ego"},               {Method::egoph, "egoph"},         {Method::ey, "ey"},
    {Method::unif, "unif"},             {Method::stable, "stable"},
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
  return x;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("'" + key + "' needs at least one value");
  return out;
}

bool parse_bool_timing(const std::string& v) {
  if (v == "wall" || v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("timing expects wall|off, got '" + v + "'");
}

// Regret/distance at a reported point, memoized per campaign: reports
// repeat across consecutive acquisitions.
class MetricCache {
 public:
  MetricCache(const ObjectiveSpec& f, std::span<const double> alpha, const OracleResult& oracle, double step)
      : f_(f), alpha_(alpha.begin(), alpha.end()), oracle_(oracle), step_(step) {}

  Metrics at(const std::vector<double>& x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    const Metrics m = metrics(x, f_, alpha_, oracle_, step_);
    cache_.emplace(x, m);
    return m;
  }

 private:
  const ObjectiveSpec& f_;
  std::vector<double> alpha_;
  const OracleResult& oracle_;
  double step_;
  std::map<std::vector<double>, Metrics> cache_;
};

Matrix drop_design_rows(const Matrix& cand, const Dataset& d) {
  Matrix out;
  for (std::size_t i = 0; i < cand.rows(); ++i)
    if (!d.contains(cand.row(i))) out.append_row(cand.row(i));
  if (out.rows() == 0) throw std::runtime_error("every candidate duplicates a design row");
  return out;
}

struct Report {
  std::vector<double> x;
  double f;
};

Report best_observed(const Dataset& d) {
  const std::size_t i = argmin(d.responses());
  const auto row = d.inputs().row(i);
  return {{row.begin(), row.end()}, d.responses()[i]};
}

Report current_report(const CampaignConfig& cfg, const Dataset& d, std::span<const double> alpha) {
  if (reports_bear(cfg.method)) {
    const BearSummary b = post_hoc(d, cfg.surrogate(), alpha);
    return {b.x_bear, b.f_bear};
  }
  return best_observed(d);
}

}  // namespace

const char* to_string(Method m) {
  for (const auto& e : kMethodNames)
    if (e.method == m) return e.name;
  return "?";
}

Method parse_method(std::string_view s) {
  for (const auto& e : kMethodNames)
    if (s == e.name) return e.method;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> v = [] {
    std::vector<Method> out;
    for (const auto& e : kMethodNames) out.push_back(e.method);
    return out;
  }();
  return v;
}

bool reports_bear(Method m) { return m != Method::ego && m != Method::ey; }

ObjectiveSpec ObjectiveRef::build() const {
  if (name == "external") {
    if (!command.empty()) return external_command(command, dim);
    if (!table.empty()) return table_objective(std::filesystem::path(table), dim);
    throw ConfigError("external objective needs command= or table=");
  }
  return make_objective(name, variant, dim);
}

void CampaignConfig::validate(std::size_t d) const {
  if (!(theta > 0.0)) throw ConfigError("theta must be positive");
  if (theta_adv && !(*theta_adv > 0.0)) throw ConfigError("theta_adv must be positive");
  if (n0 < 1) throw ConfigError("n0 must be at least 1");
  if (n0 >= budget) throw ConfigError("n0 must be smaller than the budget");
  if (n_cand < 1) throw ConfigError("n_cand must be positive");
  if (alpha.alpha.empty()) throw ConfigError("a benchmark alpha is required for tracking and metrics");
  alpha.validate(d);
}

SurrogateSettings CampaignConfig::surrogate() const { return {theta, theta_adv, eps, alpha.intermediate}; }

Metrics metrics(std::span<const double> x_report, const ObjectiveSpec& f, std::span<const double> alpha,
                const OracleResult& oracle, double adversary_step) {
  Metrics m;
  m.regret = true_adversary(f, x_report, alpha, adversary_step) - oracle.g_at_xr;
  double s = 0.0;
  for (std::size_t j = 0; j < x_report.size(); ++j) s += (x_report[j] - oracle.xr[j]) * (x_report[j] - oracle.xr[j]);
  m.distance = std::sqrt(s);
  return m;
}

Matrix initial_design(std::uint64_t seed, std::size_t rep, std::size_t n0, std::size_t d) {
  Rng rng = Rng(seed, rep).substream("init");
  return lhs(n0, d, rng);
}

namespace {

std::vector<double> acquire_next(const CampaignConfig& cfg, Method family, const Dataset& data,
                                 const Report& report, std::span<const double> alpha, Rng& rng) {
  const std::size_t d = data.dim();
  const SurrogateSettings sur = cfg.surrogate();
  if (family == Method::unif) {
    std::vector<double> x(d);
    do {
      for (double& v : x) v = rng.uniform();
    } while (data.contains(x));
    return x;
  }
  const std::vector<double> incumbent = reports_bear(family) ? report.x : best_observed(data).x;
  const Matrix cand = drop_design_rows(candidates(cfg.n_cand, d, std::span<const double>(incumbent), rng), data);
  const GpModel base = fit(data, sur.theta, sur.eps);
  std::size_t pick = 0;
  switch (family) {
    case Method::ego:
    case Method::egoph:
      pick = ei(predict(base, cand), *std::min_element(data.responses().begin(), data.responses().end())).argbest;
      break;
    case Method::ey:
      pick = ey_select(predict(base, cand));
      break;
    case Method::rego_known:
    case Method::rego_rand:
    case Method::rego_sum:
      pick = averaged_rei(cand, base, sur, cfg.alpha, rng).argbest;
      break;
    case Method::stable:
      return stable_acquire(base, sur, alpha, cand).x_eval;
    case Method::unif:
      break;
  }
  const auto row = cand.row(pick);
  return {row.begin(), row.end()};
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg, const ObjectiveSpec& f, const OracleResult& oracle,
                            std::size_t rep) {
  using Clock = std::chrono::steady_clock;
  const std::size_t d = f.dim;
  cfg.validate(d);
  const std::vector<double> alpha = broadcast(cfg.alpha.alpha, d);

  const Matrix x0 = initial_design(cfg.seed, rep, cfg.n0, d);
  std::vector<double> y0(x0.rows());
  for (std::size_t i = 0; i < x0.rows(); ++i) y0[i] = f(x0.row(i));
  Dataset data(x0, std::move(y0));

  // egoph shares ego's acquisitions; only its reporting rule differs.
  const Method family = cfg.method == Method::egoph ? Method::ego : cfg.method;
  Rng rng = Rng(cfg.seed, rep).substream(std::string("acq:") + to_string(family));
  MetricCache metric_cache(f, alpha, oracle, cfg.adversary_step);
  Report report = current_report(cfg, data, alpha);

  std::vector<CampaignRecord> records;
  double cum = 0.0;
  for (std::size_t n = cfg.n0 + 1; n <= cfg.budget; ++n) {
    const auto start = Clock::now();
    std::vector<double> x_new = acquire_next(cfg, family, data, report, alpha, rng);
    if (cfg.timing) {
      const std::chrono::duration<double> dt = Clock::now() - start;
      // Clock resolution floor keeps the series strictly increasing.
      cum += std::max(dt.count(), 1e-9);
    }
    const double y_new = f(x_new);
    data = data.with(x_new, y_new);
    report = current_report(cfg, data, alpha);
    const Metrics m = metric_cache.at(report.x);
    records.push_back({rep, n, std::move(x_new), y_new, report.x, report.f, m.regret, m.distance, cum});
  }
  return {std::move(records), std::move(data)};
}

// --- studies -------------------------------------------------------------

ProblemDefaults problem_defaults(const std::string& name, std::size_t d) {
  if (name == "ryan1d" || name == "ryan-sharp") return {0.25, 20, {0.075}};
  if (name == "bertsimas2d") return {1.1, 90, {0.15}};
  if (name == "rosenbrock") return {d == 2 ? 0.9 : 0.05, 200, {0.1}};
  return {0.25, 5 + 5 * std::max<std::size_t>(d, 1) + 20, {0.05}};
}

CampaignConfig StudyConfig::campaign(Method m, std::size_t d) const {
  const ProblemDefaults def = problem_defaults(objective.name, d);
  CampaignConfig c;
  c.objective = objective;
  c.method = m;
  c.alpha.alpha = alpha.empty() ? def.alpha : alpha;
  c.alpha.alpha_max = alpha_max.empty() ? std::vector<double>{0.2} : alpha_max;
  c.alpha.nodes = nodes;
  c.alpha.intermediate = intermediate.value_or(default_intermediate(d));
  c.alpha.mode = m == Method::rego_rand ? AlphaMode::rand : m == Method::rego_sum ? AlphaMode::sum : AlphaMode::known;
  c.theta = theta.value_or(def.theta);
  c.theta_adv = theta_adv;
  c.eps = eps;
  c.n0 = n0.value_or(init_size(d));
  c.budget = budget.value_or(def.budget);
  c.n_cand = n_cand.value_or(default_candidate_count(d));
  c.seed = seed;
  c.reps = reps;
  c.timing = timing;
  c.adversary_step = adversary_step;
  return c;
}

void apply_setting(StudyConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "objective") {
    cfg.objective.name = v;
  } else if (key == "variant") {
    cfg.objective.variant = v;
  } else if (key == "dim" || key == "d") {
    cfg.objective.dim = parse_count(key, v);
  } else if (key == "command") {
    cfg.objective.command = v;
  } else if (key == "table") {
    cfg.objective.table = v;
  } else if (key == "methods" || key == "method") {
    cfg.methods.clear();
    for (const auto& m : split_list(v)) cfg.methods.push_back(parse_method(m));
  } else if (key == "alpha") {
    cfg.alpha = parse_doubles(key, v);
  } else if (key == "alpha_max") {
    cfg.alpha_max = parse_doubles(key, v);
  } else if (key == "nodes") {
    cfg.nodes = parse_count(key, v);
  } else if (key == "intermediate") {
    cfg.intermediate = parse_count(key, v);
  } else if (key == "theta") {
    cfg.theta = parse_double(key, v);
  } else if (key == "theta_adv") {
    cfg.theta_adv = parse_double(key, v);
  } else if (key == "eps") {
    cfg.eps = parse_double(key, v);
  } else if (key == "n0") {
    cfg.n0 = parse_count(key, v);
  } else if (key == "budget" || key == "N") {
    cfg.budget = parse_count(key, v);
  } else if (key == "n_cand") {
    cfg.n_cand = parse_count(key, v);
  } else if (key == "seed") {
    cfg.seed = parse_count(key, v);
  } else if (key == "reps") {
    cfg.reps = parse_count(key, v);
  } else if (key == "timing") {
    cfg.timing = parse_bool_timing(v);
  } else if (key == "adversary_step") {
    cfg.adversary_step = parse_double(key, v);
  } else if (key == "oracle_step") {
    cfg.oracle_step = parse_double(key, v);
  } else if (key == "threads") {
    cfg.threads = parse_count(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

StudyConfig parse_study_config(std::istream& in) {
  StudyConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
    }
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (cfg.methods.empty()) cfg.methods = {Method::ego, Method::rego_known};
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_study_config(in);
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

StudyResult run_mc(const StudyConfig& cfg) {
  if (cfg.reps < 1) throw ConfigError("reps must be at least 1");
  if (cfg.methods.empty()) throw ConfigError("no methods configured");
  const ObjectiveSpec f = cfg.objective.build();
  const std::size_t d = f.dim;
  std::vector<CampaignConfig> per_method;
  for (Method m : cfg.methods) {
    per_method.push_back(cfg.campaign(m, d));
    per_method.back().validate(d);
  }

  StudyResult result;
  result.dim = d;
  result.oracle = robust_optimum(f, broadcast(per_method.front().alpha.alpha, d), cfg.oracle_step);

  std::size_t threads = std::max<unsigned>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("REGO_THREADS")) {
    const auto cap = std::strtoul(env, nullptr, 10);
    if (cap > 0) threads = cap;
  }
  if (cfg.threads && *cfg.threads > 0) threads = *cfg.threads;
  threads = std::min(threads, cfg.reps);

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t rep = next++; rep < cfg.reps; rep = next++) {
      for (std::size_t k = 0; k < per_method.size(); ++k) {
        ReplicateStatus st{per_method[k].method, rep, true, "", 0};
        std::optional<CampaignResult> res;
        try {
          res = run_campaign(per_method[k], f, result.oracle, rep);
          st.rows = res->records.size();
        } catch (const std::exception& e) {
          st.ok = false;
          st.error = e.what();
        }
        std::lock_guard lock(mu);
        if (res) result.campaigns.emplace(std::make_pair(st.method, rep), std::move(*res));
        result.status.push_back(std::move(st));
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(result.status.begin(), result.status.end(), [&](const auto& a, const auto& b) {
    return std::make_pair(a.rep, a.method) < std::make_pair(b.rep, b.method);
  });

  for (std::size_t k = 0; k < per_method.size(); ++k) {
    const CampaignConfig& c = per_method[k];
    for (std::size_t n = c.n0 + 1; n <= c.budget; ++n) {
      std::vector<double> r, dist;
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
        auto it = result.campaigns.find({c.method, rep});
        if (it == result.campaigns.end()) continue;
        const CampaignRecord& rec = it->second.records[n - c.n0 - 1];
        r.push_back(rec.r_metric);
        dist.push_back(rec.d_metric);
      }
      result.aggregate.push_back({c.method, n, "r", quantile(r, 0.25), quantile(r, 0.5), quantile(r, 0.75)});
      result.aggregate.push_back(
          {c.method, n, "d", quantile(dist, 0.25), quantile(dist, 0.5), quantile(dist, 0.75)});
    }
  }
  return result;
}

std::string records_header(std::size_t d) {
  std::string h = "method,rep,n";
  for (std::size_t j = 1; j <= d; ++j) h += ",x_" + std::to_string(j);
  h += ",y";
  for (std::size_t j = 1; j <= d; ++j) h += ",xrep_" + std::to_string(j);
  h += ",frep,r,d,cum_seconds";
  return h;
}

void write_records(std::ostream& out, Method m, const std::vector<CampaignRecord>& rows) {
  for (const auto& r : rows) {
    out << to_string(m) << ',' << r.rep << ',' << r.n;
    for (double v : r.x_new) out << ',' << fmt17(v);
    out << ',' << fmt17(r.y_new);
    for (double v : r.x_report) out << ',' << fmt17(v);
    out << ',' << fmt17(r.f_report) << ',' << fmt17(r.r_metric) << ',' << fmt17(r.d_metric) << ','
        << fmt17(r.cum_seconds) << '\n';
  }
}

void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "method,n,metric,q25,median,q75\n";
  for (const auto& a : rows)
    out << to_string(a.method) << ',' << a.n << ',' << a.metric << ',' << fmt17(a.q25) << ','
        << fmt17(a.median) << ',' << fmt17(a.q75) << '\n';
}

void write_study(const StudyResult& result, const StudyConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  std::ofstream all = open("records.csv");
  all << records_header(result.dim) << '\n';
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    std::ofstream out = open("records_rep" + std::to_string(rep) + ".csv");
    out << records_header(result.dim) << '\n';
    for (Method m : cfg.methods) {
      auto it = result.campaigns.find({m, rep});
      if (it == result.campaigns.end()) continue;
      write_records(out, m, it->second.records);
      write_records(all, m, it->second.records);
    }
  }
  std::ofstream agg = open("aggregate.csv");
  write_aggregate(agg, result.aggregate);

  std::ofstream man = open("manifest.txt");
  man << "objective=" << cfg.objective.name << "\nvariant=" << cfg.objective.variant << "\ndim=" << result.dim
      << "\nseed=" << cfg.seed << "\nreps=" << cfg.reps << "\nmethods=";
  for (std::size_t k = 0; k < cfg.methods.size(); ++k) man << (k ? "," : "") << to_string(cfg.methods[k]);
  man << "\noracle_xr=";
  for (std::size_t j = 0; j < result.oracle.xr.size(); ++j) man << (j ? "," : "") << fmt17(result.oracle.xr[j]);
  man << "\noracle_g=" << fmt17(result.oracle.g_at_xr) << "\noracle_step=" << fmt17(result.oracle.grid_step) << '\n';
  std::size_t failed = 0;
  for (const auto& s : result.status) {
    man << "rep=" << s.rep << " method=" << to_string(s.method) << " status=" << (s.ok ? "ok" : "failed");
    if (s.ok) man << " rows=" << s.rows;
    else man << " error=\"" << s.error << '"';
    man << '\n';
    failed += s.ok ? 0 : 1;
  }
  man << "failed=" << failed << '\n';
}

}  // namespace rbo
