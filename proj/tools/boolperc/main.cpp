// boolperc: experiment driver for multiscale Boolean percolation studies.
//
// Exit codes: 0 ok, 2 bad configuration, 3 budget or bracket failure,
// 4 verification violations.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boolperc/estimators.hpp"
#include "boolperc/geometry.hpp"
#include "boolperc/io.hpp"
#include "boolperc/measure.hpp"
#include "boolperc/verification.hpp"

namespace bp = boolperc;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitViolation = 4;

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
  if (opt && opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("BOOLPERC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("BOOLPERC_SEED is not an integer");
    }
  }
  return 12345;
}

// Sink that targets a file when --out is given, stdout otherwise.
struct OutputSink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  std::string path;

  explicit OutputSink(const std::string& out_path) : path(out_path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary | std::ios::trunc);
      if (!file) throw std::invalid_argument("cannot open output file " + path);
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Config hash covers the canonical (sorted-key) dump; timestamps never enter
// the CSV body so reruns are byte-identical.
void write_manifest(const std::string& out_path, const std::string& command,
                    const json& config, std::uint64_t seed) {
  if (out_path.empty()) return;
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(bp::fnv1a(config.dump())));
  manifest["config_hash"] = hash;
  manifest["seed"] = seed;
  manifest["timestamp_utc"] = utc_now();
  std::ofstream mf(out_path + ".manifest.json", std::ios::trunc);
  if (!mf) throw std::invalid_argument("cannot open manifest for " + out_path);
  mf << manifest.dump(2) << '\n';
}

const char* kRowHeader =
    "experiment_id,alpha,rho,lambda_lo,lambda_hi,phi_hat,ci_lo,ci_hi,n,seed";

void write_row10(std::ostream& os, const std::string& id,
                 const std::string& alpha, const std::string& rho,
                 double lambda_lo, double lambda_hi, double phi_hat,
                 double ci_lo, double ci_hi, long long n, std::uint64_t seed,
                 const std::string& extra = "") {
  os << id << ',' << alpha << ',' << rho << ',' << bp::fmt_double(lambda_lo)
     << ',' << bp::fmt_double(lambda_hi) << ',' << bp::fmt_double(phi_hat)
     << ',' << bp::fmt_double(ci_lo) << ',' << bp::fmt_double(ci_hi) << ','
     << n << ',' << seed;
  if (!extra.empty()) os << ',' << extra;
  os << '\n';
}

// Flag defaults mirror the library policy so the CLI and API agree.
const bp::ThresholdPolicy kDefaultPolicy{};

struct PolicyFlags {
  double a0 = kDefaultPolicy.a0;
  std::string ladder_factors = "1,2,4,8";
  long long n = kDefaultPolicy.n;
  double p_low = kDefaultPolicy.p_low;
  double p_high = kDefaultPolicy.p_high;
  double circuit_ratio = kDefaultPolicy.circuit_ratio;
  double trend_sigmas = kDefaultPolicy.trend_sigmas;
  double rel_width = kDefaultPolicy.rel_width_stop;
  int max_rounds = kDefaultPolicy.max_rounds;
  int retries = kDefaultPolicy.inconclusive_retries;
  double lambda_hi_init = kDefaultPolicy.lambda_hi_init;
  int workers = kDefaultPolicy.workers;

  void attach(CLI::App* cmd) {
    cmd->add_option("--a0", a0, "smallest ladder window");
    cmd->add_option("--ladder-factors", ladder_factors,
                    "comma list of window multipliers");
    cmd->add_option("--n", n, "replicates per ladder point");
    cmd->add_option("--p-low", p_low, "subcritical firing threshold");
    cmd->add_option("--p-high", p_high, "supercritical firing threshold");
    cmd->add_option("--circuit-ratio", circuit_ratio,
                    "outer/inner radius of the planar circuit annulus");
    cmd->add_option("--trend-sigmas", trend_sigmas, "monotonicity slack");
    cmd->add_option("--rel-width", rel_width, "bracket relative width stop");
    cmd->add_option("--max-rounds", max_rounds, "bisection round cap");
    cmd->add_option("--inconclusive-retries", retries,
                    "retries (doubling n) on inconclusive ladders");
    cmd->add_option("--lambda-hi-init", lambda_hi_init,
                    "initial upper intensity (0 = auto)");
    cmd->add_option("--workers", workers, "worker threads");
  }

  bp::ThresholdPolicy build() const {
    bp::ThresholdPolicy p;
    p.a0 = a0;
    p.ladder_factors.clear();
    for (double f : bp::parse_grid(ladder_factors))
      p.ladder_factors.push_back(f);
    p.n = n;
    p.p_low = p_low;
    p.p_high = p_high;
    p.circuit_ratio = circuit_ratio;
    p.trend_sigmas = trend_sigmas;
    p.rel_width_stop = rel_width;
    p.max_rounds = max_rounds;
    p.inconclusive_retries = retries;
    p.lambda_hi_init = lambda_hi_init;
    p.workers = workers;
    return p;
  }

  json to_json() const {
    return json{{"a0", a0},
                {"ladder_factors", ladder_factors},
                {"n", n},
                {"p_low", p_low},
                {"p_high", p_high},
                {"circuit_ratio", circuit_ratio},
                {"trend_sigmas", trend_sigmas},
                {"rel_width", rel_width},
                {"max_rounds", max_rounds},
                {"inconclusive_retries", retries},
                {"lambda_hi_init", lambda_hi_init},
                {"workers", workers}};
  }
};

int bracket_exit(bp::BracketStatus st) {
  return st == bp::BracketStatus::Converged ? kExitOk : kExitBudget;
}

const char* status_name(bp::BracketStatus st) {
  switch (st) {
    case bp::BracketStatus::Converged: return "converged";
    case bp::BracketStatus::InconclusiveGap: return "inconclusive_gap";
    case bp::BracketStatus::BudgetExhausted: return "budget_exhausted";
    case bp::BracketStatus::NoSupercritical: return "no_supercritical";
  }
  return "unknown";
}

// ---- subcommand runners -----------------------------------------------------

int run_point_estimate(const std::string& id, const std::string& measure_spec,
                       double lambda, double a, int d, long long n,
                       std::uint64_t seed, int workers,
                       const std::string& out_path, const json& config) {
  bp::RadiusMeasure mu = bp::parse_measure(measure_spec);
  bp::RadiusMeasure driven = mu.scaled_by(lambda);
  bp::StreamKey stream = bp::master_stream(seed);
  bp::CrossingEstimate est =
      id == "one_arm"
          ? bp::estimate_one_arm(driven, a, d, n, stream, nullptr, workers)
          : bp::estimate_crossing(driven, a, d, n, stream, nullptr, workers);
  OutputSink sink(out_path);
  sink.stream() << kRowHeader << '\n';
  write_row10(sink.stream(), id, "", "", lambda, lambda, est.p_hat, est.ci_lo,
              est.ci_hi, est.n, seed);
  write_manifest(out_path, id, config, seed);
  return kExitOk;
}

int run_threshold(const std::string& measure_spec, int d,
                  const PolicyFlags& pf, std::uint64_t seed,
                  const std::string& out_path, const json& config) {
  bp::RadiusMeasure mu = bp::parse_measure(measure_spec);
  bp::ThresholdPolicy policy = pf.build();
  bp::ThresholdBracket br =
      bp::bracket_threshold_hat(mu, d, policy, bp::master_stream(seed));
  double md = mu.moment(static_cast<double>(d));
  OutputSink sink(out_path);
  sink.stream() << kRowHeader << '\n';
  write_row10(sink.stream(), "threshold", "", "", br.lambda_lo, br.lambda_hi,
              bp::covered_volume_fraction(mu.scaled_by(br.mid()), d),
              bp::covered_volume_fraction(mu.scaled_by(br.lambda_lo), d),
              bp::covered_volume_fraction(mu.scaled_by(br.lambda_hi), d),
              br.total_replicates, seed);
  write_manifest(out_path, "threshold", config, seed);
  std::cerr << "threshold: status=" << status_name(br.status) << " bracket=["
            << bp::fmt_double(br.lambda_lo) << ", "
            << bp::fmt_double(br.lambda_hi) << "] d-moment="
            << bp::fmt_double(md) << "\n";
  return bracket_exit(br.status);
}

int run_covered_volume(const std::string& measure_spec, double lambda, int d,
                       std::uint64_t seed, const std::string& out_path,
                       const json& config) {
  bp::RadiusMeasure mu = bp::parse_measure(measure_spec);
  double phi = bp::covered_volume_fraction(mu.scaled_by(lambda), d);
  OutputSink sink(out_path);
  sink.stream() << kRowHeader << '\n';
  write_row10(sink.stream(), "covered_volume", "", "", lambda, lambda, phi,
              phi, phi, 0, seed);
  write_manifest(out_path, "covered-volume", config, seed);
  return kExitOk;
}

int run_two_scale(const std::string& nu1_spec, const std::string& nu2_spec,
                  double rho, const std::string& alphas, int d,
                  const PolicyFlags& pf, std::uint64_t seed,
                  const std::string& out_path, const json& config) {
  bp::RadiusMeasure nu1 = bp::parse_measure(nu1_spec);
  bp::RadiusMeasure nu2 = bp::parse_measure(nu2_spec);
  std::vector<double> grid = bp::parse_grid(alphas);
  bp::TwoScaleConfig cfg;
  cfg.policy = pf.build();
  std::vector<bp::TwoScaleRow> rows = bp::two_scale_curve(
      nu1, nu2, grid, rho, d, cfg, bp::master_stream(seed));
  OutputSink sink(out_path);
  sink.stream() << kRowHeader << ",phi_limit\n";
  bool budget_hit = false;
  for (const bp::TwoScaleRow& row : rows) {
    write_row10(sink.stream(), "two_scale", bp::fmt_double(row.alpha),
                bp::fmt_double(row.rho), row.lambda_lo, row.lambda_hi,
                row.phi_hat, row.ci_lo, row.ci_hi, row.n, seed,
                bp::fmt_double(bp::two_scale_limit_phi(row.alpha)));
    if (row.status != bp::BracketStatus::Converged) budget_hit = true;
  }
  write_manifest(out_path, "two-scale", config, seed);
  return budget_hit ? kExitBudget : kExitOk;
}

int run_scan(const std::string& measure_spec, double lambda, double rho,
             int levels, const std::string& a_grid, int d, long long n,
             std::uint64_t seed, int workers, const std::string& out_path,
             const json& config) {
  bp::RadiusMeasure mu = bp::parse_measure(measure_spec);
  std::vector<double> grid = bp::parse_grid(a_grid);
  std::vector<bp::ScanRow> rows = bp::multiscale_crossing_scan(
      mu, lambda, rho, levels, grid, d, n, bp::master_stream(seed), workers);
  OutputSink sink(out_path);
  sink.stream() << "experiment_id,levels,a,p_hat,ci_lo,ci_hi,n,seed\n";
  for (const bp::ScanRow& row : rows)
    sink.stream() << "multiscale_scan," << row.levels << ','
                  << bp::fmt_double(row.a) << ',' << bp::fmt_double(row.p_hat)
                  << ',' << bp::fmt_double(row.ci_lo) << ','
                  << bp::fmt_double(row.ci_hi) << ',' << row.n << ',' << seed
                  << '\n';
  write_manifest(out_path, "multiscale-scan", config, seed);
  return kExitOk;
}

int run_diameter(const std::string& measure_spec, double lambda, double rho,
                 double s, int levels, const std::string& windows, int d,
                 long long n, std::uint64_t seed, int workers,
                 const std::string& out_path, const json& config) {
  bp::RadiusMeasure mu = bp::parse_measure(measure_spec);
  std::vector<double> grid = bp::parse_grid(windows);
  std::vector<bp::DiameterRow> rows = bp::diameter_moment_probe(
      mu.scaled_by(lambda), 1.0, rho, s, grid, d, n, bp::master_stream(seed),
      levels, workers);
  OutputSink sink(out_path);
  sink.stream() << "experiment_id,s,window,trunc_moment,censor_rate,ratio,n,seed\n";
  for (const bp::DiameterRow& row : rows)
    sink.stream() << "diameter_probe," << bp::fmt_double(s) << ','
                  << bp::fmt_double(row.window) << ','
                  << bp::fmt_double(row.truncated_moment) << ','
                  << bp::fmt_double(row.censor_rate) << ','
                  << bp::fmt_double(row.ratio_to_prev) << ',' << row.n << ','
                  << seed << '\n';
  write_manifest(out_path, "diameter-probe", config, seed);
  return kExitOk;
}

json verify_result_json(const bp::VerifyResult& r) {
  return json{{"check", r.check},
              {"samples", r.samples},
              {"violations", r.violations},
              {"params", json::parse(r.params_json)},
              {"seed", r.seed},
              {"wall_seconds", r.wall_seconds}};
}

int run_verify(const std::string& suite, long long n, int d,
               std::uint64_t seed, const std::string& out_path,
               const json& config) {
  bp::StreamKey root = bp::master_stream(seed);
  json reports = json::array();
  long long total_violations = 0;

  auto want = [&](const char* name) {
    return suite == "all" || suite == name;
  };
  auto add = [&](const bp::VerifyResult& r) {
    reports.push_back(verify_result_json(r));
    total_violations += r.violations;
  };

  bool matched = false;
  if (want("key-eta")) {
    matched = true;
    bp::RadiusMeasure nu = bp::RadiusMeasure::delta(1.0, 0.3);
    add(bp::verify_key_eta(nu, nu, 0.5, 8.0, d, n, root.child(1)));
  }
  if (want("key-carre")) {
    matched = true;
    add(bp::verify_key_carre(bp::RadiusMeasure::delta(1.0, 0.35), 1.5, d, n,
                             root.child(2)));
  }
  if (want("scaling")) {
    matched = true;
    add(bp::verify_scaling_coupling(bp::RadiusMeasure::delta(1.0, 0.35), 2.0,
                                    8.0, d, n, root.child(3)));
  }
  if (want("monotone")) {
    matched = true;
    add(bp::verify_monotone_in_levels(bp::RadiusMeasure::delta(1.0), 2.0,
                                      0.08, 8.0, d, 4, n, root.child(4)));
  }
  if (want("one-arm")) {
    matched = true;
    add(bp::verify_one_arm_inclusion(bp::RadiusMeasure::delta(1.0, 0.35), 8.0,
                                     d, n, root.child(5)));
  }
  if (want("measure-identities")) {
    matched = true;
    std::vector<bp::RadiusMeasure> battery = {
        bp::RadiusMeasure::delta(1.0),
        bp::RadiusMeasure::atomic({{1.0, 1.0, 0, 0}, {3.0, 0.5, 0, 0}}),
        bp::RadiusMeasure::uniform(0.5, 2.0, 1.0),
    };
    std::vector<double> a_grid = {0.5, 1.0, 2.0, 4.0, 8.0};
    long long combos = 0, violations = 0;
    double max_rel = 0.0;
    for (const bp::RadiusMeasure& mu : battery)
      for (double rho : {2.0, 5.0})
        for (double s : {0.5, 1.0}) {
          bp::MeasureIdentityReport rep =
              bp::verify_measure_identities(mu, rho, s, a_grid, d);
          ++combos;
          violations += rep.violations;
          max_rel = std::max(max_rel, rep.max_rel_error);
        }
    bp::VerifyResult r;
    r.check = "measure_identities";
    r.samples = combos;
    r.violations = violations;
    r.params_json =
        json{{"d", d}, {"max_rel_error", max_rel}, {"a_grid", a_grid}}.dump();
    r.seed = seed;
    r.wall_seconds = 0.0;
    add(r);
  }
  if (suite == "eta-probe") {
    matched = true;
    bp::ThresholdPolicy policy;
    policy.n = std::min<long long>(n, 500);
    bp::EtaProbeResult probe = bp::eta_subcritical_probe(
        bp::RadiusMeasure::delta(1.0), d, 0.36, 1.0, policy, root.child(6));
    bp::VerifyResult r;
    r.check = "eta_subcritical_probe";
    r.samples = static_cast<long long>(probe.rows.size());
    r.violations = probe.some_eta_decreasing ? 0 : 1;
    json rows = json::array();
    for (const bp::EtaProbeRow& row : probe.rows) {
      json pts = json::array();
      for (const bp::LadderPoint& p : row.points)
        pts.push_back({{"a", p.a}, {"p_hat", p.p_hat}});
      rows.push_back(
          {{"eta", row.eta}, {"decreasing", row.decreasing}, {"points", pts}});
    }
    r.params_json = json{{"lambda", probe.lambda}, {"rows", rows}}.dump();
    r.seed = seed;
    add(r);
  }
  if (!matched) throw std::invalid_argument("unknown verify suite: " + suite);

  json out;
  out["suite"] = suite;
  out["total_violations"] = total_violations;
  out["reports"] = reports;
  OutputSink sink(out_path);
  sink.stream() << out.dump(2) << '\n';
  write_manifest(out_path, "verify", config, seed);
  return total_violations == 0 ? kExitOk : kExitViolation;
}

int run_emit_plot(const std::vector<std::string>& inputs,
                  const std::string& out_path, const json& config,
                  std::uint64_t seed) {
  std::vector<std::array<std::string, 5>> rows;
  std::vector<double> alphas;
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input " + path);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        continue;
      }
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() < 10 || cells[0] != "two_scale") continue;
      rows.push_back({cells[1], cells[2], cells[5], cells[6], cells[7]});
      alphas.push_back(std::stod(cells[1]));
    }
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  OutputSink sink(out_path);
  sink.stream() << "alpha,rho_or_inf,phi,ci_lo,ci_hi\n";
  for (const auto& r : rows)
    sink.stream() << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ','
                  << r[4] << '\n';
  for (double a : alphas) {
    std::string phi = bp::fmt_double(bp::two_scale_limit_phi(a));
    sink.stream() << bp::fmt_double(a) << ",inf," << phi << ',' << phi << ','
                  << phi << '\n';
  }
  write_manifest(out_path, "emit-plot", config, seed);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale Boolean percolation laboratory"};
  app.require_subcommand(1);

  // shared option storage; every subcommand writes into these
  int d = 2;
  std::string measure = "delta:1";
  std::string measure2;
  double lambda = 0.3;
  double rho = 2.0;
  double a = 8.0;
  double s = 1.0;
  std::string alphas = "0.1:0.9:0.1";
  std::string a_grid = "8,16,32";
  long long n = 1000;
  int levels = -1;
  int workers = 1;
  std::uint64_t seed = 12345;
  std::string out_path;
  std::string suite = "all";
  std::vector<std::string> plot_inputs;
  PolicyFlags pf;

  auto add_common = [&](CLI::App* cmd, bool with_measure = true) {
    cmd->add_option("--d", d, "ambient dimension")->check(CLI::Range(2, 16));
    if (with_measure) cmd->add_option("--measure", measure, "radius measure spec");
    cmd->add_option("--seed", seed, "master seed (BOOLPERC_SEED fallback)");
    cmd->add_option("--out", out_path, "output path (stdout if omitted)");
    return cmd;
  };

  CLI::App* c_cross = add_common(app.add_subcommand(
      "crossing", "annulus crossing probability at one window"));
  c_cross->add_option("--lambda", lambda, "intensity multiplier");
  c_cross->add_option("--a", a, "window radius");
  c_cross->add_option("--n", n, "replicates");
  c_cross->add_option("--workers", workers, "worker threads");

  CLI::App* c_arm = add_common(app.add_subcommand(
      "one-arm", "origin-to-sphere connection probability"));
  c_arm->add_option("--lambda", lambda, "intensity multiplier");
  c_arm->add_option("--a,--r", a, "sphere radius");
  c_arm->add_option("--n", n, "replicates");
  c_arm->add_option("--workers", workers, "worker threads");

  CLI::App* c_thr = add_common(app.add_subcommand(
      "threshold", "bracket the critical intensity by bisection"));
  pf.attach(c_thr);

  CLI::App* c_cov = add_common(app.add_subcommand(
      "covered-volume", "closed-form covered volume fraction"));
  c_cov->add_option("--lambda", lambda, "intensity multiplier");

  CLI::App* c_two = add_common(app.add_subcommand(
      "two-scale", "critical covered volume across mixture weights"));
  c_two->add_option("--measure2", measure2, "second radius measure (defaults to --measure)");
  c_two->add_option("--rho", rho, "scale separation")->check(CLI::PositiveNumber);
  c_two->add_option("--alphas", alphas, "mixture weight grid lo:hi:step or list");
  pf.attach(c_two);

  CLI::App* c_scan = add_common(app.add_subcommand(
      "multiscale-scan", "crossing probability vs truncation level"));
  c_scan->add_option("--lambda", lambda, "intensity multiplier");
  c_scan->add_option("--rho", rho, "scale separation");
  c_scan->add_option("--levels", levels, "max truncation level (required)");
  c_scan->add_option("--a-grid", a_grid, "window grid");
  c_scan->add_option("--n", n, "replicates");
  c_scan->add_option("--workers", workers, "worker threads");

  CLI::App* c_diam = add_common(app.add_subcommand(
      "diameter-probe", "truncated moment of the origin component diameter"));
  c_diam->add_option("--lambda", lambda, "intensity multiplier");
  c_diam->add_option("--rho", rho, "scale separation");
  c_diam->add_option("--s", s, "moment order");
  c_diam->add_option("--levels", levels, "truncation level (-1 = auto)");
  c_diam->add_option("--a-grid,--windows", a_grid, "window grid");
  c_diam->add_option("--n", n, "replicates");
  c_diam->add_option("--workers", workers, "worker threads");

  CLI::App* c_ver = add_common(
      app.add_subcommand("verify", "run inclusion and coupling suites"), false);
  c_ver->add_option("--suite", suite,
                    "all|key-eta|key-carre|scaling|monotone|one-arm|"
                    "measure-identities|eta-probe");
  c_ver->add_option("--n", n, "coupled samples per suite");

  CLI::App* c_plot = app.add_subcommand(
      "emit-plot", "tidy plot data from two-scale results");
  c_plot->add_option("--in", plot_inputs, "two-scale CSV inputs");
  c_plot->add_option("--out", out_path, "output path (stdout if omitted)");
  c_plot->add_option("--seed", seed, "seed recorded in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    seed = resolve_seed(cmd->get_option_no_throw("--seed"), seed);

    json config;
    config["subcommand"] = name;
    config["d"] = d;
    config["seed"] = seed;

    if (name == "crossing" || name == "one-arm") {
      config["measure"] = measure;
      config["lambda"] = lambda;
      config["a"] = a;
      config["n"] = n;
      config["workers"] = workers;
      return run_point_estimate(name == "one-arm" ? "one_arm" : "crossing",
                                measure, lambda, a, d, n, seed, workers,
                                out_path, config);
    }
    if (name == "threshold") {
      config["measure"] = measure;
      config["policy"] = pf.to_json();
      return run_threshold(measure, d, pf, seed, out_path, config);
    }
    if (name == "covered-volume") {
      config["measure"] = measure;
      config["lambda"] = lambda;
      return run_covered_volume(measure, lambda, d, seed, out_path, config);
    }
    if (name == "two-scale") {
      if (measure2.empty()) measure2 = measure;
      config["measure"] = measure;
      config["measure2"] = measure2;
      config["rho"] = rho;
      config["alphas"] = alphas;
      config["policy"] = pf.to_json();
      return run_two_scale(measure, measure2, rho, alphas, d, pf, seed,
                           out_path, config);
    }
    if (name == "multiscale-scan") {
      if (levels < 0)
        throw std::invalid_argument("multiscale-scan requires --levels >= 0");
      config["measure"] = measure;
      config["lambda"] = lambda;
      config["rho"] = rho;
      config["levels"] = levels;
      config["a_grid"] = a_grid;
      config["n"] = n;
      config["workers"] = workers;
      return run_scan(measure, lambda, rho, levels, a_grid, d, n, seed,
                      workers, out_path, config);
    }
    if (name == "diameter-probe") {
      config["measure"] = measure;
      config["lambda"] = lambda;
      config["rho"] = rho;
      config["s"] = s;
      config["levels"] = levels;
      config["windows"] = a_grid;
      config["n"] = n;
      config["workers"] = workers;
      return run_diameter(measure, lambda, rho, s, levels, a_grid, d, n, seed,
                          workers, out_path, config);
    }
    if (name == "verify") {
      config["suite"] = suite;
      config["n"] = n;
      return run_verify(suite, n, d, seed, out_path, config);
    }
    if (name == "emit-plot") {
      config["inputs"] = plot_inputs;
      return run_emit_plot(plot_inputs, out_path, config, seed);
    }
    throw std::invalid_argument("unknown subcommand " + name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
