#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sil::cli {

// Exit codes: 2 bad flags, 3 unreadable input / output failure, 4 invalid grid.
struct CliError : std::runtime_error {
  int exit_code;
  CliError(int code, const std::string& msg)
      : std::runtime_error(msg), exit_code(code) {}
};

inline CliError usage_error(const std::string& msg) { return {2, msg}; }
inline CliError input_error(const std::string& msg) { return {3, msg}; }
inline CliError grid_error(const std::string& msg) { return {4, msg}; }

enum class Command {
  Fit,
  ImproveCurve,
  DomainTable,
  PolicySweep,
  ManipSweep,
  ForgettingCap,
  EstimateR,
};

const char* command_name(Command c);

struct ExperimentConfig {
  Command command = Command::Fit;
  std::vector<double> thetas;
  std::vector<double> rs;
  std::vector<double> ps;
  std::vector<double> x0s;
  std::vector<double> ks;
  std::string density;         // "beta:v,w" or "file:PATH:FORMAT[:LO:HI]"
  std::string method = "mle";  // fit: mle | moments
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::size_t samples = 10000;
  std::optional<double> m;     // pinned incentive constant
  std::string out;             // default "<command>.csv"
  std::string plot;            // optional SVG path
};

struct CsvTable {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// "lo:hi:step" or comma list; a plain number is a one-element list.
std::vector<double> parse_grid(const std::string& text);

std::string format_value(double v);

CsvTable run_command(const ExperimentConfig& config);
void write_csv(const CsvTable& table, std::ostream& os);

// Computes, writes CSV (and the optional plot), prints the one-line summary.
int run(const ExperimentConfig& config);

int cli_main(int argc, const char* const* argv);

// Parallelism cap from SIL_THREADS; never exceeds `cells`.
std::size_t thread_budget(std::size_t cells);
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

enum class PlotKind { UtilityCurve, WelfareCurve, RegionBand, KhatCurve };
PlotKind plot_kind_from_string(const std::string& name);

// Renders the table as a simple SVG line chart / band chart.
void emit_plot(const CsvTable& rows, PlotKind kind, const std::string& path);

}  // namespace sil::cli
