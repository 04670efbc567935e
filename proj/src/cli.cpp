#include "sil/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sil/agent.hpp"
#include "sil/manipulation.hpp"
#include "sil/policy.hpp"
#include "sil/population.hpp"

namespace sil::cli {

namespace {

struct Range {
  double lo;
  double hi;
  bool open_lo;
  bool open_hi;
};

constexpr Range kThetaRange{0.0, 1.0, true, true};
constexpr Range kRateRange{0.0, 1e12, true, false};
constexpr Range kProbRange{0.0, 1.0, false, false};
constexpr Range kX0Range{0.0, 1.0, true, true};
constexpr Range kEffortRange{0.0, 1.0, false, false};

void require_in_range(const char* flag, const std::vector<double>& values,
                      const Range& range) {
  for (double v : values) {
    const bool lo_ok = range.open_lo ? v > range.lo : v >= range.lo;
    const bool hi_ok = range.open_hi ? v < range.hi : v <= range.hi;
    if (!lo_ok || !hi_ok) {
      std::ostringstream os;
      os << flag << " value " << v << " outside " << (range.open_lo ? "(" : "[")
         << range.lo << ", " << range.hi << (range.open_hi ? ")" : "]");
      throw grid_error(os.str());
    }
  }
}

std::vector<double> require_grid(const char* flag, const std::vector<double>& g,
                                 const Range& range) {
  if (g.empty()) throw usage_error(std::string(flag) + " is required");
  require_in_range(flag, g, range);
  std::vector<double> sorted = g;
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

double resolve_m(const ExperimentConfig& config) {
  if (config.m) {
    if (!(*config.m > 0.0)) throw grid_error("--m must be > 0");
    return *config.m;
  }
  return incentive_constant().m;
}

struct DensitySource {
  Density density;
  std::string description;
};

std::vector<double> load_sample_file(const std::string& path,
                                     const std::string& format) {
  try {
    if (format == "scores") return read_scores_csv(path);
    if (format == "exam") return read_exam_csv(path);
    if (format == "exam-observed") return read_exam_csv(path, true);
  } catch (const std::exception& e) {
    throw input_error(e.what());
  }
  throw usage_error("unknown sample file format '" + format + "'");
}

// "beta:v,w" or "file:PATH:FORMAT" with FORMAT in
// {scores, exam, exam-observed, cdf[:LO:HI]}.
DensitySource resolve_density(const ExperimentConfig& config) {
  const std::string& spec = config.density;
  if (spec.empty()) throw usage_error("--density is required");
  try {
    if (spec.rfind("beta:", 0) == 0) {
      const auto params = parse_grid(spec.substr(5));
      if (params.size() != 2) throw grid_error("expected beta:v,w");
      return {Density::beta(params[0], params[1]), spec};
    }
    if (spec.rfind("file:", 0) == 0) {
      const std::string rest = spec.substr(5);
      const auto sep = rest.find(':');
      if (sep == std::string::npos)
        throw usage_error("expected file:PATH:FORMAT in --density");
      const std::string path = rest.substr(0, sep);
      std::string format = rest.substr(sep + 1);
      if (format.rfind("cdf", 0) == 0) {
        std::vector<std::pair<double, double>> points;
        try {
          points = read_cdf_csv(path);
        } catch (const std::exception& e) {
          throw input_error(e.what());
        }
        if (points.empty()) throw input_error(path + ": empty cdf table");
        double lo = points.front().first, hi = points.back().first;
        if (format.size() > 3) {
          const auto bounds = parse_grid(format.substr(4));
          if (bounds.size() != 2 || !(bounds[0] < bounds[1]))
            throw grid_error("expected cdf:LO,HI bounds in --density");
          lo = bounds[0];
          hi = bounds[1];
        }
        for (auto& [score, prob] : points)
          score = (score - lo) / (hi - lo);
        return {density_from_cdf_table(points), spec};
      }
      const auto samples = load_sample_file(path, format);
      return {fit_beta(samples), spec + " (beta fit)"};
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw grid_error(std::string("bad --density: ") + e.what());
  }
  throw usage_error("--density must be beta:v,w or file:PATH:FORMAT");
}

std::string fmt_bool(bool b) { return b ? "1" : "0"; }

CsvTable run_fit(const ExperimentConfig& config) {
  if (config.density.empty()) throw usage_error("--density is required");
  FitMethod method;
  if (config.method == "mle")
    method = FitMethod::MaximumLikelihood;
  else if (config.method == "moments")
    method = FitMethod::MethodOfMoments;
  else
    throw usage_error("--method must be mle or moments");

  std::vector<double> samples;
  std::string source = config.density;
  if (config.density.rfind("beta:", 0) == 0) {
    const auto params = parse_grid(config.density.substr(5));
    if (params.size() != 2) throw grid_error("expected beta:v,w");
    if (!config.has_seed)
      throw usage_error("sampling from beta:v,w requires --seed");
    if (config.samples < 30) throw grid_error("--n must be at least 30");
    samples = sample_beta({params[0], params[1]}, config.samples, config.seed);
    std::ostringstream os;
    os << config.density << ";seed=" << config.seed;
    source = os.str();
  } else if (config.density.rfind("file:", 0) == 0) {
    const std::string rest = config.density.substr(5);
    const auto sep = rest.find(':');
    if (sep == std::string::npos)
      throw usage_error("expected file:PATH:FORMAT in --density");
    samples = load_sample_file(rest.substr(0, sep), rest.substr(sep + 1));
  } else {
    throw usage_error("--density must be beta:v,w or file:PATH:FORMAT");
  }

  Density fitted = Density::beta(1, 1);
  try {
    fitted = fit_beta(samples, method);
  } catch (const std::exception& e) {
    throw input_error(e.what());
  }
  CsvTable table{"fit", {"source", "method", "n", "v", "w"}, {}};
  table.rows.push_back({source, config.method, std::to_string(samples.size()),
                        format_value(fitted.beta_params().v),
                        format_value(fitted.beta_params().w)});
  return table;
}

CsvTable run_improve_curve(const ExperimentConfig& config) {
  const auto thetas = require_grid("--theta", config.thetas, kThetaRange);
  const auto rs = require_grid("--r", config.rs, kRateRange);
  const auto x0s = require_grid("--x0", config.x0s, kX0Range);
  std::vector<double> ks = config.ks;
  if (ks.empty()) ks = parse_grid("0:1:0.001");
  require_in_range("--k", ks, kEffortRange);
  std::sort(ks.begin(), ks.end());

  CsvTable table{"improve-curve", {"theta", "r", "x0", "k", "utility"}, {}};
  for (double theta : thetas)
    for (double r : rs)
      for (double x0 : x0s)
        for (double k : ks)
          table.rows.push_back({format_value(theta), format_value(r),
                                format_value(x0), format_value(k),
                                format_value(utility(k, theta, r, x0))});
  return table;
}

CsvTable run_domain_table(const ExperimentConfig& config) {
  const auto rs = require_grid("--r", config.rs, kRateRange);
  const double m = resolve_m(config);
  if (!config.thetas.empty() && !config.x0s.empty())
    throw usage_error("domain-table takes --theta or --x0, not both");
  if (!config.thetas.empty()) {
    const auto thetas = require_grid("--theta", config.thetas, kThetaRange);
    CsvTable table{"domain-table", {"theta", "r", "min_x0_to_improve"}, {}};
    for (double theta : thetas)
      for (double r : rs)
        table.rows.push_back({format_value(theta), format_value(r),
                              format_value(min_x0_to_improve(theta, r, m))});
    return table;
  }
  if (config.x0s.empty())
    throw usage_error("domain-table needs --theta or --x0");
  const auto x0s = require_grid("--x0", config.x0s, kX0Range);
  CsvTable table{"domain-table", {"x0", "r", "max_theta_to_incentivize"}, {}};
  for (double x0 : x0s)
    for (double r : rs)
      table.rows.push_back({format_value(x0), format_value(r),
                            format_value(max_theta_to_incentivize(x0, r, m))});
  return table;
}

CsvTable run_policy_sweep(const ExperimentConfig& config) {
  const auto rs = require_grid("--r", config.rs, kRateRange);
  const double m = resolve_m(config);
  const auto source = resolve_density(config);
  const Density& density = source.density;

  if (!config.thetas.empty()) {
    // Profile mode: the welfare curve itself.
    const auto thetas = require_grid("--theta", config.thetas, kThetaRange);
    CsvTable table{"policy-sweep", {"theta", "r", "cutoff", "welfare"}, {}};
    const std::size_t cells = thetas.size() * rs.size();
    std::vector<std::vector<std::string>> rows(cells);
    parallel_for(cells, [&](std::size_t i) {
      const double theta = thetas[i / rs.size()];
      const double r = rs[i % rs.size()];
      const PolicyEvaluation eval = welfare(theta, density, r, m);
      rows[i] = {format_value(theta), format_value(r), format_value(eval.cutoff),
                 format_value(eval.welfare)};
    });
    table.rows = std::move(rows);
    return table;
  }

  std::vector<OptimalThreshold> stars(rs.size());
  parallel_for(rs.size(), [&](std::size_t i) {
    stars[i] = optimal_threshold(density, rs[i], m);
  });

  if (config.ps.empty()) {
    CsvTable table{
        "policy-sweep", {"r", "theta_star", "welfare", "single_peaked"}, {}};
    for (std::size_t i = 0; i < rs.size(); ++i)
      table.rows.push_back({format_value(rs[i]), format_value(stars[i].theta_star),
                            format_value(stars[i].welfare),
                            fmt_bool(stars[i].single_peaked)});
    return table;
  }

  auto ps = config.ps;
  require_in_range("--p", ps, kProbRange);
  std::sort(ps.begin(), ps.end());
  CsvTable table{"policy-sweep",
                 {"r", "p", "theta_star", "welfare", "single_peaked",
                  "manip_fraction"},
                 {}};
  const std::size_t cells = rs.size() * ps.size();
  std::vector<std::vector<std::string>> rows(cells);
  parallel_for(cells, [&](std::size_t i) {
    const std::size_t ri = i / ps.size();
    const double p = ps[i % ps.size()];
    const double fraction = manipulation_fraction(
        density, stars[ri].theta_star, rs[ri], ManipulationSetting{p}, m);
    rows[i] = {format_value(rs[ri]),          format_value(p),
               format_value(stars[ri].theta_star), format_value(stars[ri].welfare),
               fmt_bool(stars[ri].single_peaked),  format_value(fraction)};
  });
  table.rows = std::move(rows);
  return table;
}

CsvTable run_manip_sweep(const ExperimentConfig& config) {
  const auto thetas = require_grid("--theta", config.thetas, kThetaRange);
  const auto rs = require_grid("--r", config.rs, kRateRange);
  const auto ps = require_grid("--p", config.ps, kProbRange);
  const double m = resolve_m(config);

  CsvTable table{"manip-sweep",
                 {"theta", "r", "p", "x_lower", "x_upper", "empty"},
                 {}};
  const std::size_t cells = thetas.size() * rs.size() * ps.size();
  std::vector<std::vector<std::string>> rows(cells);
  parallel_for(cells, [&](std::size_t i) {
    const double theta = thetas[i / (rs.size() * ps.size())];
    const double r = rs[(i / ps.size()) % rs.size()];
    const double p = ps[i % ps.size()];
    const ManipulationRegion region =
        manipulation_region(theta, r, ManipulationSetting{p}, m);
    rows[i] = {format_value(theta),
               format_value(r),
               format_value(p),
               region.empty ? "" : format_value(*region.lower),
               region.empty ? "" : format_value(*region.upper),
               fmt_bool(region.empty)};
  });
  table.rows = std::move(rows);
  return table;
}

CsvTable run_forgetting_cap(const ExperimentConfig& config) {
  std::vector<double> x0s = config.x0s;
  if (x0s.empty()) {
    x0s.reserve(1000);
    for (int j = 1; j <= 1000; ++j) x0s.push_back(j / 1001.0);
  }
  require_in_range("--x0", x0s, kX0Range);
  std::sort(x0s.begin(), x0s.end());

  CsvTable table{"forgetting-cap", {"x0", "k_hat"}, {}};
  for (double x0 : x0s)
    table.rows.push_back(
        {format_value(x0), format_value(forgetting_effort_cap(x0))});
  return table;
}

CsvTable run_estimate_r(const ExperimentConfig& config) {
  const double m = resolve_m(config);
  if (config.thetas.empty() || config.x0s.empty())
    throw usage_error("estimate-r needs --theta and --x0 (observed cutoffs)");
  require_in_range("--theta", config.thetas, kThetaRange);
  require_in_range("--x0", config.x0s, kX0Range);
  if (config.thetas.size() != config.x0s.size())
    throw grid_error("--theta and --x0 must pair up one to one");

  std::vector<std::pair<double, double>> observations;
  for (std::size_t i = 0; i < config.thetas.size(); ++i) {
    if (!(config.x0s[i] < config.thetas[i]))
      throw grid_error("observed cutoff must lie below its theta");
    observations.emplace_back(config.thetas[i], config.x0s[i]);
  }
  std::sort(observations.begin(), observations.end());
  const REstimates estimates = estimate_r_multi(observations, m);

  CsvTable table{"estimate-r", {"kind", "theta", "observed_cutoff", "r_hat"}, {}};
  for (std::size_t i = 0; i < observations.size(); ++i)
    table.rows.push_back({"estimate", format_value(observations[i].first),
                          format_value(observations[i].second),
                          format_value(estimates.estimates[i])});
  table.rows.push_back({"mean", "", "", format_value(estimates.mean)});
  return table;
}

PlotKind plot_kind_for(Command command) {
  switch (command) {
    case Command::ImproveCurve: return PlotKind::UtilityCurve;
    case Command::PolicySweep: return PlotKind::WelfareCurve;
    case Command::ManipSweep: return PlotKind::RegionBand;
    case Command::ForgettingCap: return PlotKind::KhatCurve;
    default:
      throw usage_error(std::string("--plot is not supported for ") +
                        command_name(command));
  }
}

}  // namespace

const char* command_name(Command c) {
  switch (c) {
    case Command::Fit: return "fit";
    case Command::ImproveCurve: return "improve-curve";
    case Command::DomainTable: return "domain-table";
    case Command::PolicySweep: return "policy-sweep";
    case Command::ManipSweep: return "manip-sweep";
    case Command::ForgettingCap: return "forgetting-cap";
    case Command::EstimateR: return "estimate-r";
  }
  return "unknown";
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw grid_error("empty grid");
  const auto parse_one = [&](const std::string& token) {
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      throw grid_error("cannot parse grid value '" + token + "'");
    }
  };

  if (text.find(',') == std::string::npos &&
      std::count(text.begin(), text.end(), ':') == 2) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    const double lo = parse_one(text.substr(0, first));
    const double hi = parse_one(text.substr(first + 1, second - first - 1));
    const double step = parse_one(text.substr(second + 1));
    if (!(step > 0.0)) throw grid_error("grid step must be > 0");
    if (!(hi >= lo)) throw grid_error("grid stop must be >= start");
    const double span = (hi - lo) / step;
    if (span > 2e6) throw grid_error("grid has too many points");
    const long count = std::lround(std::floor(span + 1e-9)) + 1;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      double v = lo + static_cast<double>(i) * step;
      if (std::abs(v - hi) < step * 1e-6) v = hi;
      values.push_back(v);
    }
    return values;
  }

  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) throw grid_error("empty grid entry in '" + text + "'");
    values.push_back(parse_one(token));
  }
  if (values.empty()) throw grid_error("empty grid");
  return values;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::size_t thread_budget(std::size_t cells) {
  if (cells <= 1) return 1;
  std::size_t budget = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
  if (const char* env = std::getenv("SIL_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && parsed >= 1) budget = parsed;
  }
  return std::min({budget, cells, static_cast<std::size_t>(64)});
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = thread_budget(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

CsvTable run_command(const ExperimentConfig& config) {
  switch (config.command) {
    case Command::Fit: return run_fit(config);
    case Command::ImproveCurve: return run_improve_curve(config);
    case Command::DomainTable: return run_domain_table(config);
    case Command::PolicySweep: return run_policy_sweep(config);
    case Command::ManipSweep: return run_manip_sweep(config);
    case Command::ForgettingCap: return run_forgetting_cap(config);
    case Command::EstimateR: return run_estimate_r(config);
  }
  throw usage_error("unknown command");
}

void write_csv(const CsvTable& table, std::ostream& os) {
  os << "# schema sil.v1 command=" << table.command << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
  for (const auto& row : table.rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? "," : "\n");
}

int run(const ExperimentConfig& config) {
  std::cerr << command_name(config.command) << ": computing..." << std::endl;
  const CsvTable table = run_command(config);

  std::string out_path = config.out;
  if (out_path.empty())
    out_path = std::string(command_name(config.command)) + ".csv";
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw input_error("cannot write " + out_path);
  write_csv(table, out);
  out.flush();
  if (!out) throw input_error("failed while writing " + out_path);

  if (!config.plot.empty())
    emit_plot(table, plot_kind_for(config.command), config.plot);

  std::cout << command_name(config.command) << ": " << table.rows.size()
            << " rows -> " << out_path;
  if (config.command == Command::ForgettingCap)
    std::cout << " (x0 root " << format_value(forgetting_effort_root()) << ")";
  if (!config.plot.empty()) std::cout << " (plot " << config.plot << ")";
  std::cout << "\n";
  return 0;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "sil: a threshold decision-maker facing agents whose honest effort pays "
      "off gradually.\nSubcommands write deterministic CSV keyed by the grid "
      "flags; stderr carries progress,\nstdout a one-line summary. SIL_THREADS "
      "caps sweep parallelism."};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string theta_s, r_s, p_s, x0_s, k_s;
  double m_value = 0.0;

  const auto add_common = [&](CLI::App* cmd, bool wants_density) {
    cmd->add_option("--theta", theta_s, "acceptance threshold grid, in (0,1)");
    cmd->add_option("--r", r_s, "discount rate grid, > 0");
    cmd->add_option("--p", p_s, "detection probability grid, in [0,1]");
    cmd->add_option("--x0", x0_s, "initial similarity grid, in (0,1)");
    cmd->add_option("--k", k_s, "effort grid, in [0,1]");
    if (wants_density)
      cmd->add_option("--density", config.density,
                      "beta:v,w | file:PATH:FORMAT (scores|exam|exam-observed|"
                      "cdf[:LO,HI])");
    cmd->add_option("--m", m_value, "pin the incentive constant m")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", config.out, "output CSV path (default <cmd>.csv)");
    cmd->add_option("--plot", config.plot, "also render an SVG chart");
  };

  auto* fit = app.add_subcommand(
      "fit",
      "Fit a beta density to scores.\ncolumns: source,method,n,v,w");
  add_common(fit, true);
  fit->add_option("--seed", config.seed, "sampler seed (required for beta:v,w)");
  fit->add_option("--n", config.samples, "synthetic sample count");
  fit->add_option("--method", config.method, "mle | moments");

  auto* improve = app.add_subcommand(
      "improve-curve",
      "Agent utility as a function of effort.\ncolumns: theta,r,x0,k,utility");
  add_common(improve, false);

  auto* domain = app.add_subcommand(
      "domain-table",
      "Improvement domains: lowest incentivized x0 for (theta,r), or highest "
      "incentivizing theta for (x0,r).\ncolumns: theta,r,min_x0_to_improve or "
      "x0,r,max_theta_to_incentivize");
  add_common(domain, false);

  auto* policy = app.add_subcommand(
      "policy-sweep",
      "Optimal thresholds and welfare over r (plus manipulation fractions "
      "with --p), or the welfare profile when --theta is given.\ncolumns: "
      "r,theta_star,welfare,single_peaked | r,p,theta_star,welfare,"
      "single_peaked,manip_fraction | theta,r,cutoff,welfare");
  add_common(policy, true);

  auto* manip = app.add_subcommand(
      "manip-sweep",
      "Initial-similarity intervals where manipulating beats improving.\n"
      "columns: theta,r,p,x_lower,x_upper,empty (bounds blank when empty)");
  add_common(manip, false);

  auto* cap = app.add_subcommand(
      "forgetting-cap",
      "Upper bound on optimal effort under forgetting over an x0 grid "
      "(default 1000 points).\ncolumns: x0,k_hat");
  add_common(cap, false);

  auto* estimate = app.add_subcommand(
      "estimate-r",
      "Discount rate implied by observed improvement cutoffs; --theta and "
      "--x0 pair up, a mean row closes the table.\ncolumns: kind,theta,"
      "observed_cutoff,r_hat");
  add_common(estimate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) config.command = Command::Fit;
    if (improve->parsed()) config.command = Command::ImproveCurve;
    if (domain->parsed()) config.command = Command::DomainTable;
    if (policy->parsed()) config.command = Command::PolicySweep;
    if (manip->parsed()) config.command = Command::ManipSweep;
    if (cap->parsed()) config.command = Command::ForgettingCap;
    if (estimate->parsed()) config.command = Command::EstimateR;

    if (!theta_s.empty()) config.thetas = parse_grid(theta_s);
    if (!r_s.empty()) config.rs = parse_grid(r_s);
    if (!p_s.empty()) config.ps = parse_grid(p_s);
    if (!x0_s.empty()) config.x0s = parse_grid(x0_s);
    if (!k_s.empty()) config.ks = parse_grid(k_s);
    config.has_seed = fit->count("--seed") > 0;
    if (app.get_subcommands().front()->count("--m") > 0) config.m = m_value;

    return run(config);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sil::cli
