#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "efimov/fast.hpp"
#include "efimov/slow.hpp"

namespace efimov::cli {

enum class Command { fast_potential, spectrum, scan, oracle };
enum class Format { csv, json };

const char* to_string(Command c);

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_no_regime = 2;
inline constexpr int exit_usage = 64;

struct Tolerances {
  double root = 1e-12;
  double inner = default_inner_tol;
};

struct RunConfig {
  Command command = Command::spectrum;
  std::optional<double> mass_ratio;
  std::optional<double> mu;
  std::optional<double> nu;
  double r0 = 1.0;
  ProfileKind profile = ProfileKind::bump;
  std::optional<int> n_levels;  // defaults per command, see levels()
  Tolerances tol;
  Format format = Format::csv;
  std::optional<std::string> output_path;
  bool absolute_units = false;

  int grid = 100;        // fast-potential rows
  double extent = 2.0;   // fast-potential range, units of r0
  std::vector<double> ratios;          // scan
  std::optional<double> oracle_rmax;   // units of r0; default 25 / (lambda_k r0)
  long oracle_points = 200000;

  int levels() const;
  ModelParams model() const;
  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct ParseOutcome {
  std::optional<RunConfig> config;
  int exit_code = exit_ok;
  std::string message;  // usage or diagnostic text when no config is produced
};

/// Parses `efimov <subcommand> [flags]`; usage errors map to exit_usage.
ParseOutcome parse_args(int argc, const char* const* argv);

struct LevelRow {
  int n = 0;
  double lambda = 0.0;
  double energy = 0.0;
  double eta = 0.0;
  std::optional<double> ratio;  // E_n / E_{n+1}
  bool converged = false;
  std::string diagnostic;
};

struct SpectrumReport {
  RunConfig config;
  double beta = 0.0;
  double theta_beta = 0.0;
  double alpha = 0.0;
  double e_2pi_over_beta = 0.0;
  bool capped = false;
  std::vector<LevelRow> levels;
};

/// Solves the configured model; lengths in units of r0 and energies in 1/(mu r0^2) unless
/// absolute_units is set. Throws NoEfimovRegime for sub-critical configurations.
SpectrumReport make_spectrum_report(const RunConfig& config);

struct ScanRow {
  double mass_ratio = 0.0;
  bool subcritical = false;
  std::string diagnostic;
  double beta = 0.0;
  double e_2pi_over_beta = 0.0;
  std::vector<double> energies;  // first three converged, scaled units
  std::optional<int> deepest_level;
};

/// One row per ratio; rows are solved concurrently and never abort the scan.
std::vector<ScanRow> scan(const RunConfig& config, const std::vector<double>& ratios);

struct OracleRow {
  int n = 0;
  double matched = 0.0;
  double fd_coarse = 0.0;
  double fd_fine = 0.0;
  double fd_extrapolated = 0.0;
  double abs_delta = 0.0;
  double rel_delta = 0.0;
};

struct OracleReport {
  double r_max = 0.0;  // units of r0
  long points = 0;
  double spacing = 0.0;
  std::vector<OracleRow> rows;
};

OracleReport make_oracle_report(const RunConfig& config);

std::string format_spectrum(const SpectrumReport& report, Format format);
std::string format_scan(const std::vector<ScanRow>& rows, const RunConfig& config, Format format);
std::string format_oracle(const OracleReport& report, const RunConfig& config, Format format);
std::string format_fast_potential(const RunConfig& config, Format format);

/// Executes a validated configuration. Exit 0 on success, 2 for a sub-critical mass ratio,
/// 1 for I/O or convergence failures. The report goes to output_path or `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace efimov::cli
