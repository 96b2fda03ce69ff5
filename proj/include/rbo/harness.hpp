#pragma once

// Sequential-design campaigns, Monte-Carlo replication, regret/distance
// metrics and the on-disk formats of a benchmark study.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rbo/gp.hpp"
#include "rbo/robust.hpp"
#include "rbo/testbed.hpp"

namespace rbo {

enum class Method { rego_known, rego_rand, rego_sum, ego, egoph, ey, unif, stable };

const char* to_string(Method m);
Method parse_method(std::string_view s);
const std::vector<Method>& all_methods();

/// Methods that report the BEAR of a post hoc adversarial surrogate; the
/// others (ego, ey) report the best observed value.
bool reports_bear(Method m);

/// Which objective to benchmark. `command`/`table` are used by "external".
struct ObjectiveRef {
  std::string name = "ryan1d";
  std::string variant;
  std::size_t dim = 0;
  std::string command;
  std::string table;

  ObjectiveSpec build() const;
};

/// One method on one objective, fully resolved.
struct CampaignConfig {
  ObjectiveRef objective;
  Method method = Method::ego;
  /// alpha.alpha is the benchmark alpha: used by rego-known, egoph, unif and
  /// stable, and for BEAR tracking and metrics by every method.
  AlphaSpec alpha;
  double theta = 0.25;
  std::optional<double> theta_adv;
  double eps = kDefaultJitter;
  std::size_t n0 = 10;
  std::size_t budget = 20;
  std::size_t n_cand = 512;
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  /// When false, cum_seconds is not measured and recorded as 0.
  bool timing = true;
  double adversary_step = 0.0;

  void validate(std::size_t d) const;
  SurrogateSettings surrogate() const;
};

struct CampaignRecord {
  std::size_t rep = 0;
  std::size_t n = 0;
  std::vector<double> x_new;
  double y_new = 0.0;
  std::vector<double> x_report;
  double f_report = 0.0;
  double r_metric = 0.0;
  double d_metric = 0.0;
  double cum_seconds = 0.0;
};

struct CampaignResult {
  std::vector<CampaignRecord> records;
  Dataset data;
};

struct Metrics {
  double regret = 0.0;
  double distance = 0.0;
};

/// r = g(x, alpha) - g(x^r, alpha) using the dense adversary at x and the
/// oracle's value at x^r; d = |x - x^r|.
Metrics metrics(std::span<const double> x_report, const ObjectiveSpec& f, std::span<const double> alpha,
                const OracleResult& oracle, double adversary_step = 0.0);

/// n0-point LHS shared by every method of replicate `rep`.
Matrix initial_design(std::uint64_t seed, std::size_t rep, std::size_t n0, std::size_t d);

/// n0 LHS evaluations followed by budget - n0 acquisitions; one record per
/// acquisition.
CampaignResult run_campaign(const CampaignConfig& cfg, const ObjectiveSpec& f, const OracleResult& oracle,
                            std::size_t rep);

// --- studies -------------------------------------------------------------

/// A benchmark study: several methods sharing objective, alpha and seeds.
struct StudyConfig {
  ObjectiveRef objective;
  std::vector<Method> methods;
  std::vector<double> alpha;
  std::vector<double> alpha_max;
  std::size_t nodes = 5;
  std::optional<std::size_t> intermediate;
  std::optional<double> theta;
  std::optional<double> theta_adv;
  double eps = kDefaultJitter;
  std::optional<std::size_t> n0;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> n_cand;
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  bool timing = true;
  double adversary_step = 0.0;
  double oracle_step = 0.0;
  std::optional<std::size_t> threads;

  /// Per-method campaign with problem defaults filled in.
  CampaignConfig campaign(Method m, std::size_t d) const;
};

/// Parses key=value lines ('#' starts a comment). Unknown keys throw ConfigError.
StudyConfig parse_study_config(std::istream& in);
StudyConfig load_study_config(const std::filesystem::path& path);
/// Applies one key=value setting; shared by the parser and CLI overrides.
void apply_setting(StudyConfig& cfg, const std::string& key, const std::string& value);

struct ProblemDefaults {
  double theta;
  std::size_t budget;
  std::vector<double> alpha;
};
/// Lengthscale, budget and benchmark alpha for a named objective.
ProblemDefaults problem_defaults(const std::string& name, std::size_t d);

struct AggregateRow {
  Method method;
  std::size_t n;
  std::string metric;  // "r" or "d"
  double q25, median, q75;
};

struct ReplicateStatus {
  Method method;
  std::size_t rep;
  bool ok;
  std::string error;
  std::size_t rows = 0;
};

struct StudyResult {
  OracleResult oracle;
  std::size_t dim = 0;
  /// Successful campaigns, keyed by (method, rep).
  std::map<std::pair<Method, std::size_t>, CampaignResult> campaigns;
  std::vector<ReplicateStatus> status;
  std::vector<AggregateRow> aggregate;
};

/// Linear-interpolation quantile (numpy's default) of unsorted values.
double quantile(std::vector<double> v, double p);

/// Runs every (method, rep) campaign, replicates in parallel (capped by
/// `threads`, else REGO_THREADS, else hardware concurrency). A failing
/// campaign is recorded in `status` and the study continues.
StudyResult run_mc(const StudyConfig& cfg);

/// Writes records_rep<k>.csv per replicate, records.csv, aggregate.csv and
/// manifest.txt under `dir`.
void write_study(const StudyResult& result, const StudyConfig& cfg, const std::filesystem::path& dir);

/// CSV header: method,rep,n,x_1..x_d,y,xrep_1..xrep_d,frep,r,d,cum_seconds
std::string records_header(std::size_t d);
void write_records(std::ostream& out, Method m, const std::vector<CampaignRecord>& rows);
void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace rbo
