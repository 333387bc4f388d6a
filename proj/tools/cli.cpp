#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <openssl/evp.h>

#include "impulse/errors.hpp"
#include "impulse/estimator.hpp"
#include "impulse/gbm_analytics.hpp"
#include "impulse/report.hpp"
#include "impulse/scenario_io.hpp"

namespace impulse::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

struct EmittedFile {
  std::string name;
  std::string sha256;
  std::size_t bytes;
};

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_))
      throw IoError(fmt::format("cannot create output directory '{}'", root_.string()));
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path target = root_ / name;
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    std::ofstream os(target, std::ios::binary | std::ios::trunc);
    os << content;
    os.close();
    if (!os) throw IoError(fmt::format("cannot write '{}'", target.string()));
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  const std::vector<EmittedFile>& files() const { return files_; }
  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::vector<EmittedFile> files_;
};

std::optional<ScenarioFile> load_or_report(const std::string& path, std::ostream& err, int& code) {
  try {
    return load_scenario(path);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    code = kUsage;
  } catch (const HypothesisError& e) {
    err << "hypothesis (A) violated: " << e.what() << '\n';
    code = kDomainFailure;
  }
  return std::nullopt;
}

void print_validation(KeyValueWriter& kv, const ValidationReport& rep) {
  const auto one = [&](const char* name, const HypothesisCheck& c) {
    const std::string key = fmt::format("hypothesis.{}", name);
    kv.put(key, c.pass ? "pass" : "fail");
    kv.put(key + ".detail", c.diagnostic);
    if (c.first_violation) kv.put(key + ".first_violation", *c.first_violation);
  };
  one("A", rep.sector);
  one("B", rep.margin);
  one("C", rep.curves);
  kv.put("grid.state_pitch", rep.state_pitch);
  kv.put("grid.time_pitch", rep.time_pitch);
}

void name_failures(std::ostream& err, const ValidationReport& rep) {
  if (!rep.sector.pass) err << "hypothesis (A) violated: " << rep.sector.diagnostic << '\n';
  if (!rep.margin.pass) err << "hypothesis (B) violated: " << rep.margin.diagnostic << '\n';
  if (!rep.curves.pass) err << "hypothesis (C) violated: " << rep.curves.diagnostic << '\n';
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path, std::size_t grid_points, std::ostream& out, std::ostream& err) {
  int code = kSuccess;
  auto file = load_or_report(path, err, code);
  if (!file) return code;
  const ValidationReport rep = validate_hypotheses(file->scenario, grid_points);
  KeyValueWriter kv(out);
  print_validation(kv, rep);
  kv.put("valid", rep.all_pass());
  if (rep.all_pass()) return kSuccess;
  name_failures(err, rep);
  return kDomainFailure;
}

int cmd_bounds(const std::string& path, std::ostream& out, std::ostream& err) {
  int code = kSuccess;
  auto file = load_or_report(path, err, code);
  if (!file) return code;
  const Scenario& scn = file->scenario;
  const ValidationReport rep = validate_hypotheses(scn);
  if (!rep.all_pass()) {
    name_failures(err, rep);
    return kDomainFailure;
  }

  const SectorBounds& sec = scn.sector;
  const double x0 = scn.x0();
  const double s0 = scn.curves.upper(0.0);
  KeyValueWriter kv(out);
  kv.put("x0", x0);
  kv.put("s0", s0);
  kv.put("s_cap", sec.s_cap);
  kv.put("sector.alpha", sec.alpha);
  kv.put("sector.beta", sec.beta);
  kv.put("sector.nu", sec.nu);
  try {
    // Hitting times of the comparison processes at the sector cap.
    const TauBounds cap = tau_sandwich(x0, sec.s_cap, sec, scn.sigma);
    kv.put("tau_alpha.expected", cap.upper);
    kv.put("tau_beta.expected", cap.lower);

    const TauBounds first = timeout_bounds_at_k(x0, s0, sec, scn.sigma);
    const bool collapsed = std::abs(sec.beta - sec.alpha) <= 1e-6 * sec.alpha;
    kv.put("pulse1.lower", first.lower);
    kv.put("pulse1.upper", first.upper);
    kv.put("sector.collapsed", collapsed);
    if (collapsed) kv.put("pulse1.expected", first.upper);

    const AsymptoticInterval iv = asymptotic_interval(scn.curves, sec, scn.sigma);
    kv.put("interval.q_limit", iv.q_limit);
    kv.put("interval.s_limit", iv.s_limit);
    kv.put("interval.a_beta", iv.a_beta);
    kv.put("interval.a_alpha", iv.a_alpha);

    const auto* logistic = std::get_if<LogisticDrift>(&scn.drift);
    const auto* q_const = std::get_if<ConstantCurve>(&scn.curves.q);
    const auto* s_const = std::get_if<ConstantCurve>(&scn.curves.s);
    if (logistic && q_const && s_const && s_const->level == sec.s_cap) {
      // Fixed-quota fishery: the printed a_beta uses 2/(r - sigma^2) where the
      // general bound gives 2/(2r - sigma^2). Both are shown.
      kv.put("fishery.printed_a_beta",
             printed_fishery_a_beta(logistic->r, scn.sigma, s_const->level, q_const->level));
      kv.put("fishery.printed_a_alpha",
             printed_fishery_a_alpha(logistic->r, logistic->k, scn.sigma, s_const->level, q_const->level));
      kv.put("fishery.general_a_beta", iv.a_beta);
      kv.put("fishery.general_a_alpha", iv.a_alpha);
    }
  } catch (const MarginError& e) {
    err << "margin error: " << e.what() << '\n';
    return kDomainFailure;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainFailure;
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct SimulateFlags {
  std::string scenario;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<std::size_t> max_pulses;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::size_t dump_paths = 0;
  unsigned workers = 0;
  bool allow_margin_violation = false;
  std::size_t trend_paths = 1000;
};

struct BetaTrendPoint {
  double t;
  double mean;
  double median;
  double mean_log;
  std::size_t alive;  ///< paths with X_beta > 0 (log defined)
};

// X_beta from x0 with the common-noise coupling, no cap, sampled at 11 checkpoints.
std::vector<BetaTrendPoint> beta_trend(const Scenario& scn, const GridConfig& grid, std::size_t n) {
  constexpr std::size_t kCheckpoints = 11;
  std::vector<std::vector<double>> at(kCheckpoints);
  std::vector<std::size_t> nodes(kCheckpoints);
  for (std::size_t j = 0; j < kCheckpoints; ++j) nodes[j] = grid.last_node() * j / (kCheckpoints - 1);
  for (std::size_t i = 0; i < n; ++i) {
    NoiseStream noise(scn.seed, i);
    const CoupledTriple tri =
        run_coupled_triple(scn.x0(), scn.sector, scn.drift, scn.sigma, grid, noise, CapPolicy::run_to_horizon);
    for (std::size_t j = 0; j < kCheckpoints; ++j) at[j].push_back(tri.x_beta[nodes[j]]);
  }
  std::vector<BetaTrendPoint> out;
  for (std::size_t j = 0; j < kCheckpoints; ++j) {
    auto& v = at[j];
    BetaTrendPoint p{grid.time(nodes[j]), 0.0, 0.0, 0.0, 0};
    double log_sum = 0.0;
    for (double x : v) {
      p.mean += x;
      if (x > 0.0) {
        log_sum += std::log(x);
        ++p.alive;
      }
    }
    p.mean /= static_cast<double>(v.size());
    p.mean_log = p.alive > 0 ? log_sum / static_cast<double>(p.alive) : -std::numeric_limits<double>::infinity();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    p.median = m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    out.push_back(p);
  }
  return out;
}

std::string build_summary(const Scenario& scn, const GridConfig& grid, std::size_t n_paths, bool margin_violated,
                          const ValidationReport& rep, const PulseExpectations& est,
                          const std::vector<RecurrenceResidual>& residuals, const TimeoutSeriesReport& series,
                          const std::optional<SandwichReport>& sandwich,
                          const std::vector<BetaTrendPoint>& trend) {
  std::ostringstream os;
  KeyValueWriter kv(os);
  kv.put("format_version", std::size_t{1});
  kv.put("scenario.drift.kind", drift_kind(scn.drift));
  kv.put("scenario.curves.q.kind", curve_kind(scn.curves.q));
  kv.put("scenario.curves.s.kind", curve_kind(scn.curves.s));
  kv.put("scenario.sigma", scn.sigma);
  kv.put("scenario.s_cap", scn.sector.s_cap);
  kv.put("scenario.x0", scn.x0());
  kv.put("scenario.max_pulses", scn.max_pulses);
  kv.put("scenario.seed", fmt::format("{}", scn.seed));
  kv.put("grid.dt", grid.dt());
  kv.put("grid.t_max", grid.t_max());
  kv.put("n_paths", n_paths);
  kv.put("validation.A", rep.sector.pass ? "pass" : "fail");
  kv.put("validation.B", rep.margin.pass ? "pass" : "fail");
  kv.put("validation.C", rep.curves.pass ? "pass" : "fail");
  kv.put("validation.margin_override", margin_violated);
  kv.put("sector.alpha", scn.sector.alpha);
  kv.put("sector.beta", scn.sector.beta);
  kv.put("sector.nu", scn.sector.nu);
  kv.put("clamp_events", est.clamp_events);
  kv.put("paths_without_pulse", est.paths_without_pulse);
  kv.put("pulse.levels", est.levels.size());

  for (const auto& lv : est.levels) {
    const std::string p = fmt::format("pulse.{}", lv.k);
    kv.put(p + ".tau", lv.tau);
    kv.put(p + ".delta_tau", lv.delta_tau);
    kv.put(p + ".at_risk", lv.at_risk);
    kv.put(p + ".censored_before", lv.censored_before);
    kv.put(p + ".censor_fraction", lv.censor_fraction);
    kv.put(p + ".reliable", lv.reliable);
  }
  for (const auto& r : residuals) {
    const std::string p = fmt::format("recurrence.{}", r.k);
    kv.put(p + ".paths", r.paths);
    if (r.same_subset)
      kv.put(p + ".same_subset", *r.same_subset);
    else
      kv.put(p + ".same_subset", "undefined");
    if (r.mixed_subset)
      kv.put(p + ".mixed_subset", *r.mixed_subset);
    else
      kv.put(p + ".mixed_subset", "undefined");
  }

  kv.put("timeouts.shape", to_string(series.shape));
  kv.put("timeouts.tail_mean", series.tail_mean);
  kv.put("timeouts.tail_std_err", series.tail_std_err);
  kv.put("timeouts.tail_count", series.tail_count);
  if (series.interval) {
    kv.put("interval.q_limit", series.interval->q_limit);
    kv.put("interval.s_limit", series.interval->s_limit);
    kv.put("interval.a_beta", series.interval->a_beta);
    kv.put("interval.a_alpha", series.interval->a_alpha);
    kv.put("timeouts.tail_inside", *series.tail_inside);
  } else {
    kv.put("interval", "undefined");
    kv.put("timeouts.tail_inside", "undefined");
  }

  if (sandwich) {
    kv.put("sandwich.lower", sandwich->bounds.lower);
    kv.put("sandwich.upper", sandwich->bounds.upper);
    kv.put("sandwich.verdict", to_string(sandwich->verdict));
    kv.put("sandwich.margin_se", sandwich->margin_se);
    kv.put("sandwich.advisory", sandwich->advisory);
  } else {
    kv.put("sandwich.verdict", "undefined");
  }

  if (!trend.empty()) {
    kv.put("beta_trend.paths", trend.front().alive);
    for (std::size_t j = 0; j < trend.size(); ++j) {
      const std::string p = fmt::format("beta_trend.{}", j);
      kv.put(p + ".t", trend[j].t);
      kv.put(p + ".mean", trend[j].mean);
      kv.put(p + ".median", trend[j].median);
      kv.put(p + ".mean_log", trend[j].mean_log);
    }
  }
  return os.str();
}

int cmd_simulate(const SimulateFlags& flags, const std::vector<std::string>& argv_copy, std::ostream& out,
                 std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  int code = kSuccess;
  auto file = load_or_report(flags.scenario, err, code);
  if (!file) return code;

  Scenario scn = file->scenario;
  if (flags.t_max) scn.t_max = *flags.t_max;
  if (flags.max_pulses) scn.max_pulses = *flags.max_pulses;
  if (flags.seed) scn.seed = *flags.seed;
  const double dt = flags.dt.value_or(file->dt.value_or(1e-3));
  const std::size_t n_paths = flags.paths.value_or(file->paths.value_or(10000));
  if (n_paths < 2) {
    err << "usage error: at least 2 paths are required\n";
    return kUsage;
  }

  std::optional<GridConfig> grid;
  try {
    grid.emplace(dt, scn.t_max);
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  std::optional<ValidatedScenario> validated;
  try {
    validated.emplace(scn, flags.allow_margin_violation ? MarginPolicy::warn : MarginPolicy::enforce);
  } catch (const HypothesisError&) {
    name_failures(err, validate_hypotheses(scn));
    return kDomainFailure;
  }
  if (validated->margin_violated())
    err << "warning: hypothesis (B) violated (" << validated->report().margin.diagnostic
        << "); simulating on explicit override, hitting times may be censored\n";

  fs::path out_root;
  if (flags.out_dir)
    out_root = *flags.out_dir;
  else if (const char* env = std::getenv(kOutDirEnv); env && *env)
    out_root = env;
  else
    out_root = "impulse_out";

  try {
    OutputDir dir(out_root);

    const unsigned workers = flags.workers > 0 ? flags.workers : std::max(1u, std::thread::hardware_concurrency());
    const auto outcomes = run_ensemble(*validated, *grid, n_paths, workers);
    PulseExpectations est;
    try {
      est = summarize_pulses(outcomes);
    } catch (const HorizonError& e) {
      err << "no completed pulses: " << e.what() << "; increase t_max (currently " << scn.t_max << ")\n";
      return kDomainFailure;
    }
    const auto residuals = recurrence_check(outcomes);

    std::optional<AsymptoticInterval> interval;
    std::optional<SandwichReport> sandwich;
    if (!validated->margin_violated()) {
      interval = asymptotic_interval(scn.curves, scn.sector, scn.sigma);
      sandwich = sandwich_verdict(est.levels.front().tau, first_pulse_bounds(scn),
                                  curve_trend(scn.curves.s) != Trend::constant);
    }
    const auto series = classify_timeout_series(est.timeout_means(), interval, grid->dt());

    std::vector<BetaTrendPoint> trend;
    if (validated->margin_violated()) trend = beta_trend(scn, *grid, std::min(flags.trend_paths, n_paths));

    std::ostringstream ledger;
    write_pulse_ledger(ledger, outcomes);
    dir.write("pulses.csv", ledger.str());
    dir.write("summary.txt", build_summary(scn, *grid, n_paths, validated->margin_violated(), validated->report(),
                                           est, residuals, series, sandwich, trend));
    std::ostringstream plot;
    write_plot_data(plot, est, interval);
    dir.write("plot.csv", plot.str());
    if (!trend.empty()) {
      std::ostringstream tr;
      tr << "t,mean,median,mean_log\n";
      for (const auto& p : trend) tr << fmt::format("{},{},{},{}\n", p.t, p.mean, p.median, p.mean_log);
      dir.write("beta_trend.csv", tr.str());
    }
    for (std::size_t i = 0; i < std::min(flags.dump_paths, n_paths); ++i) {
      const PathOutcome traced = run_impulsive_path(*validated, *grid, i, {true, true});
      std::ostringstream dump;
      write_path_dump(dump, traced, grid->dt());
      dir.write(fmt::format("paths/path_{:05}.csv", i), dump.str());
    }

    // Manifest last: effective settings, checksums, timing.
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ostringstream man;
    KeyValueWriter kv(man);
    std::string cmdline;
    for (const auto& a : argv_copy) cmdline += (cmdline.empty() ? "" : " ") + a;
    kv.put("command", cmdline);
    kv.put("scenario", flags.scenario);
    kv.put("effective.dt", grid->dt());
    kv.put("effective.t_max", scn.t_max);
    kv.put("effective.paths", n_paths);
    kv.put("effective.max_pulses", scn.max_pulses);
    kv.put("effective.seed", fmt::format("{}", scn.seed));
    kv.put("effective.sigma", scn.sigma);
    kv.put("effective.dump_paths", flags.dump_paths);
    kv.put("effective.allow_margin_violation", flags.allow_margin_violation);
    kv.put("effective.trend_paths", trend.empty() ? std::size_t{0} : std::min(flags.trend_paths, n_paths));
    kv.put("workers", std::size_t{workers});
    kv.put("output_dir", dir.root().string());
    for (const auto& f : dir.files()) {
      kv.put("file." + f.name + ".sha256", f.sha256);
      kv.put("file." + f.name + ".bytes", f.bytes);
    }
    kv.put("wall_clock_seconds", wall);
    kv.put("version.impulse", kVersion);
    kv.put("version.compiler", __VERSION__);
    kv.put("version.fmt", fmt::format("{}", FMT_VERSION));
    std::ofstream mf(dir.root() / "manifest.txt", std::ios::binary | std::ios::trunc);
    mf << man.str();
    mf.close();
    if (!mf) throw IoError("cannot write manifest.txt");

    out << fmt::format("simulated {} paths, {} pulse levels, timeouts {}; outputs in {}\n", n_paths,
                       est.levels.size(), to_string(series.shape), dir.root().string());
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Impulsive diffusion simulator: hypothesis checks, analytic bounds, Monte Carlo pulse statistics"};
  app.name("impulse");
  app.require_subcommand(1);

  std::string validate_file;
  std::size_t grid_points = kDefaultGridPoints;
  auto* validate = app.add_subcommand("validate", "Check the sector, margin and curve hypotheses of a scenario");
  validate->add_option("scenario", validate_file, "Scenario file")->required();
  validate->add_option("--grid-points", grid_points, "Validation grid size")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));

  std::string bounds_file;
  auto* bounds = app.add_subcommand("bounds", "Print closed-form hitting-time bounds and the asymptotic interval");
  bounds->add_option("scenario", bounds_file, "Scenario file")->required();

  SimulateFlags flags;
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo ensemble and write ledger, summary, plot data");
  simulate->add_option("scenario", flags.scenario, "Scenario file")->required();
  simulate->add_option("--paths", flags.paths, "Number of paths (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  simulate->add_option("--dt", flags.dt, "Time step")->check(CLI::PositiveNumber);
  simulate->add_option("--t-max", flags.t_max, "Horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--max-pulses", flags.max_pulses, "Pulses per path")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  simulate->add_option("--seed", flags.seed, "Master seed");
  simulate->add_option("--out", flags.out_dir, fmt::format("Output directory (default ${} or ./impulse_out)", kOutDirEnv));
  simulate->add_option("--dump-paths", flags.dump_paths, "Write per-node trajectories of the first M paths");
  simulate->add_option("--workers", flags.workers, "Worker threads (0 = hardware concurrency)");
  simulate->add_flag("--allow-margin-violation", flags.allow_margin_violation,
                     "Simulate even if alpha <= sigma^2/2 (reports the X_beta trend)");
  simulate->add_option("--trend-paths", flags.trend_paths, "Coupled paths for the X_beta trend report")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kSuccess : kUsage;
  }

  if (*validate) return cmd_validate(validate_file, grid_points, out, err);
  if (*bounds) return cmd_bounds(bounds_file, out, err);
  std::vector<std::string> argv_copy(argv, argv + argc);
  return cmd_simulate(flags, argv_copy, out, err);
}

}  // namespace impulse::cli
