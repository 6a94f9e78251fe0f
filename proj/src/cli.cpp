#include "efimov/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "efimov/errors.hpp"
#include "efimov/oracle.hpp"

namespace efimov::cli {

namespace {

using nlohmann::json;

constexpr int schema_version = 1;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  if (c.mass_ratio) j["mass_ratio"] = *c.mass_ratio;
  if (c.mu) j["mu"] = *c.mu;
  if (c.nu) j["nu"] = *c.nu;
  j["r0"] = c.r0;
  j["profile"] = to_string(c.profile);
  j["levels"] = c.levels();
  j["tol"] = {{"root", c.tol.root}, {"inner", c.tol.inner}};
  j["units"] = c.absolute_units ? "absolute" : "scaled";
  return j;
}

std::string config_comment(const RunConfig& c) {
  std::string s = "# schema=" + std::to_string(schema_version) + " command=" + to_string(c.command);
  if (c.mass_ratio) s += " mass_ratio=" + num(*c.mass_ratio);
  if (c.mu) s += " mu=" + num(*c.mu) + " nu=" + num(*c.nu);
  s += " r0=" + num(c.r0) + " profile=" + to_string(c.profile);
  s += c.absolute_units ? " units=absolute\n" : " units=scaled\n";
  return s;
}

// Scaled units: lengths in r0, energies in 1/(mu r0^2), hence E -> -(lambda r0)^2.
double scaled_lambda(const RunConfig& c, double lambda) { return c.absolute_units ? lambda : lambda * c.r0; }
double scaled_energy(const RunConfig& c, double lambda, double mu) {
  return c.absolute_units ? -lambda * lambda / mu : -(lambda * c.r0) * (lambda * c.r0);
}

SpectrumOptions options_for(const RunConfig& c) {
  SpectrumOptions opt;
  opt.root_tol = c.tol.root;
  opt.inner_tol = c.tol.inner;
  return opt;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::fast_potential: return "fast-potential";
    case Command::spectrum: return "spectrum";
    case Command::scan: return "scan";
    case Command::oracle: return "oracle";
  }
  return "unknown";
}

int RunConfig::levels() const {
  if (n_levels) return *n_levels;
  switch (command) {
    case Command::oracle: return 2;
    case Command::scan: return 6;
    default: return 5;
  }
}

ModelParams RunConfig::model() const {
  auto profile_obj = CutoffProfile::make(profile, r0);
  if (mass_ratio) return ModelParams::from_mass_ratio(*mass_ratio, profile_obj);
  return ModelParams::from_reduced(mu.value_or(1.0), nu.value_or(1.0), profile_obj);
}

void RunConfig::validate() const {
  const bool has_ratio = mass_ratio.has_value();
  const bool has_reduced = mu.has_value() || nu.has_value();
  if (command == Command::fast_potential && !has_ratio && !has_reduced) {
    // Tabulation without masses uses mu = nu = 1.
  } else if (command != Command::scan) {
    if (has_ratio == has_reduced) throw std::invalid_argument("give exactly one of --mass-ratio or --mu/--nu");
    if (has_reduced && !(mu && nu)) throw std::invalid_argument("--mu and --nu must be given together");
    if (has_ratio && !(*mass_ratio > 0.0)) throw std::invalid_argument("--mass-ratio must be > 0");
    if (has_reduced && !(*mu > 0.0 && *nu > 0.0)) throw std::invalid_argument("--mu and --nu must be > 0");
  } else {
    if (ratios.empty()) throw std::invalid_argument("scan needs --ratios");
    for (double r : ratios)
      if (!(r > 0.0)) throw std::invalid_argument("every scan ratio must be > 0");
  }
  if (!(r0 > 0.0)) throw std::invalid_argument("--r0 must be > 0");
  if (levels() < 1) throw std::invalid_argument("--levels must be >= 1");
  if (!(tol.root > 0.0 && tol.root < 1e-3)) throw std::invalid_argument("--tol must lie in (0, 1e-3)");
  if (!(tol.inner > 1e-14 && tol.inner < 1e-3)) throw std::invalid_argument("--inner-tol must lie in (1e-14, 1e-3)");
  if (grid < 1) throw std::invalid_argument("--grid must be >= 1");
  if (!(extent > 0.0)) throw std::invalid_argument("--extent must be > 0");
  if (oracle_points < 100) throw std::invalid_argument("--points must be >= 100");
  if (oracle_rmax && !(*oracle_rmax > 0.0)) throw std::invalid_argument("--rmax must be > 0");
}

ParseOutcome parse_args(int argc, const char* const* argv) {
  CLI::App app{"Born-Oppenheimer Efimov spectrum of two bosons and a light particle", "efimov"};
  app.set_config("--config", "", "TOML/INI file with flag defaults (flags override it)");
  app.require_subcommand(1);

  RunConfig cfg;
  double mass_ratio = 0.0, mu = 0.0, nu = 0.0, rmax = 0.0;
  int levels = 0;
  std::string profile = "bump", format = "csv", out_path;

  auto add_common = [&](CLI::App* sub, bool model_flags) {
    if (model_flags) {
      auto* mr = sub->add_option("--mass-ratio", mass_ratio, "Boson to light-particle mass ratio M/m");
      auto* mu_opt = sub->add_option("--mu", mu, "Heavy reduced mass mu (with --nu)");
      auto* nu_opt = sub->add_option("--nu", nu, "Light reduced mass nu (with --mu)");
      mr->excludes(mu_opt)->excludes(nu_opt);
      mu_opt->needs(nu_opt);
      nu_opt->needs(mu_opt);
    }
    sub->add_option("--r0", cfg.r0, "Cutoff radius");
    sub->add_option("--profile", profile, "Cutoff profile")->check(CLI::IsMember({"bump", "quintic"}));
    sub->add_option("--levels", levels, "Number of converged levels");
    sub->add_option("--tol", cfg.tol.root, "Relative root tolerance in lambda");
    sub->add_option("--inner-tol", cfg.tol.inner, "Inner ODE tolerance");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "Output file (default: standard output)");
    sub->add_flag("--absolute", cfg.absolute_units, "Report absolute instead of r0-scaled units");
  };

  auto* fast = app.add_subcommand("fast-potential", "Tabulate theta, E(r) and v(r)");
  add_common(fast, true);
  fast->add_option("--grid", cfg.grid, "Number of rows");
  fast->add_option("--extent", cfg.extent, "Largest r, in units of r0");

  auto* spectrum = app.add_subcommand("spectrum", "Solve the slow-dynamics bound states");
  add_common(spectrum, true);

  auto* scan_cmd = app.add_subcommand("scan", "Summaries over a list of mass ratios");
  add_common(scan_cmd, false);
  scan_cmd->add_option("--ratios", cfg.ratios, "Comma-separated mass ratios")->delimiter(',')->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Compare the matched solver with finite differences");
  add_common(oracle_cmd, true);
  oracle_cmd->add_option("--rmax", rmax, "Finite-difference box, units of r0");
  oracle_cmd->add_option("--points", cfg.oracle_points, "Interior points of the coarse grid");

  ParseOutcome outcome;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    outcome.message = subs.empty() ? app.help() : subs.front()->help();
    return outcome;
  } catch (const CLI::CallForAllHelp&) {
    outcome.message = app.help("", CLI::AppFormatMode::All);
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.exit_code = exit_usage;
    outcome.message = std::string("error: ") + e.what() + "\n\n" + app.help();
    return outcome;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == fast) cfg.command = Command::fast_potential;
  else if (chosen == spectrum) cfg.command = Command::spectrum;
  else if (chosen == scan_cmd) cfg.command = Command::scan;
  else cfg.command = Command::oracle;

  auto given = [chosen](const char* name) {
    try {
      return chosen->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--mass-ratio")) cfg.mass_ratio = mass_ratio;
  if (given("--mu")) cfg.mu = mu;
  if (given("--nu")) cfg.nu = nu;
  if (given("--levels")) cfg.n_levels = levels;
  if (given("--rmax")) cfg.oracle_rmax = rmax;
  if (!out_path.empty()) cfg.output_path = out_path;
  cfg.profile = parse_profile_kind(profile);
  cfg.format = format == "json" ? Format::json : Format::csv;

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    outcome.exit_code = exit_usage;
    outcome.message = std::string("error: ") + e.what() + "\n\n" + chosen->help();
    return outcome;
  }
  outcome.config = std::move(cfg);
  return outcome;
}

SpectrumReport make_spectrum_report(const RunConfig& config) {
  const auto params = config.model();
  const EffectivePotential pot(params);
  const auto sp = solve_spectrum(pot, config.levels(), options_for(config));

  SpectrumReport rep;
  rep.config = config;
  rep.beta = sp.beta.beta;
  rep.theta_beta = sp.phase.theta_beta;
  rep.alpha = sp.coeffs.alpha_phase;
  rep.e_2pi_over_beta = std::exp(2.0 * std::numbers::pi / rep.beta);
  rep.capped = sp.capped;
  for (const auto& l : sp.levels) {
    LevelRow row;
    row.n = l.n;
    row.converged = l.converged;
    row.diagnostic = l.diagnostic;
    if (l.converged) {
      row.lambda = scaled_lambda(config, l.lambda_n);
      row.energy = scaled_energy(config, l.lambda_n, params.mu);
      row.eta = l.eta_n;
    }
    rep.levels.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < rep.levels.size(); ++i) {
    const auto& a = rep.levels[i];
    const auto& b = rep.levels[i + 1];
    if (a.converged && b.converged) rep.levels[i].ratio = a.energy / b.energy;
  }
  return rep;
}

std::vector<ScanRow> scan(const RunConfig& config, const std::vector<double>& ratios) {
  auto solve_row = [config](double ratio) {
    ScanRow row;
    row.mass_ratio = ratio;
    try {
      auto params = ModelParams::from_mass_ratio(ratio, CutoffProfile::make(config.profile, config.r0));
      const auto beta = beta_param(params);
      row.beta = beta.beta;
      row.e_2pi_over_beta = std::exp(2.0 * std::numbers::pi / beta.beta);
      const auto sp = solve_spectrum(params, config.levels(), options_for(config));
      for (const auto& l : sp.converged()) {
        if (row.energies.size() < 3) row.energies.push_back(scaled_energy(config, l.lambda_n, params.mu));
        row.deepest_level = l.n;
      }
      if (sp.capped) row.diagnostic = "level count capped by seed underflow";
    } catch (const NoEfimovRegime& e) {
      row.subcritical = true;
      row.diagnostic = e.what();
    } catch (const std::exception& e) {
      row.diagnostic = e.what();
    }
    return row;
  };

  std::vector<std::future<ScanRow>> jobs;
  jobs.reserve(ratios.size());
  for (double r : ratios) jobs.push_back(std::async(std::launch::async, solve_row, r));
  std::vector<ScanRow> rows;
  rows.reserve(ratios.size());
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

OracleReport make_oracle_report(const RunConfig& config) {
  const auto params = config.model();
  const EffectivePotential pot(params);
  const int k = config.levels();
  const auto sp = solve_spectrum(pot, k, options_for(config));
  const auto levels = sp.converged();
  if (static_cast<int>(levels.size()) < k) throw NonConvergence("oracle: matched solver found too few levels");

  const double r0 = config.r0;
  const double lambda_k = levels[k - 1].lambda_n;
  const double r_max = config.oracle_rmax ? *config.oracle_rmax * r0 : 25.0 / lambda_k;
  if (r_max < 20.0 / lambda_k)
    throw InsufficientDomain("oracle: --rmax must be at least 20 / lambda_k = " + num(20.0 / (lambda_k * r0)) + " r0");

  const oracle::RadialGrid grid{r_max, config.oracle_points};
  const auto fd = oracle::fd_spectrum(pot, sp.beta, grid, k);
  if (static_cast<int>(fd.eigenvalues.size()) < k) throw NonConvergence("oracle: finite differences found too few levels");

  // fd eigenvalues are mu E = -lambda^2; scaled units multiply by r0^2.
  const double unit = config.absolute_units ? 1.0 / params.mu : r0 * r0;
  OracleReport rep;
  rep.r_max = config.absolute_units ? r_max : r_max / r0;
  rep.points = grid.n_points;
  rep.spacing = config.absolute_units ? grid.spacing() : grid.spacing() / r0;
  for (int i = 0; i < k; ++i) {
    OracleRow row;
    row.n = levels[i].n;
    row.matched = scaled_energy(config, levels[i].lambda_n, params.mu);
    row.fd_coarse = fd.coarse[i] * unit;
    row.fd_fine = fd.richardson_pair->eigenvalues[i] * unit;
    row.fd_extrapolated = fd.eigenvalues[i] * unit;
    row.abs_delta = std::abs(row.matched - row.fd_extrapolated);
    row.rel_delta = row.abs_delta / std::abs(row.matched);
    rep.rows.push_back(row);
  }
  return rep;
}

std::string format_spectrum(const SpectrumReport& rep, Format format) {
  if (format == Format::json) {
    json j;
    j["schema"] = schema_version;
    j["config"] = config_json(rep.config);
    j["beta"] = rep.beta;
    j["theta_beta"] = rep.theta_beta;
    j["alpha"] = rep.alpha;
    j["e_2pi_over_beta"] = rep.e_2pi_over_beta;
    j["capped"] = rep.capped;
    j["levels"] = json::array();
    for (const auto& l : rep.levels) {
      json row = {{"n", l.n}, {"converged", l.converged}};
      if (l.converged) {
        row["lambda"] = l.lambda;
        row["energy"] = l.energy;
        row["eta"] = l.eta;
      } else {
        row["diagnostic"] = l.diagnostic;
      }
      if (l.ratio) row["ratio"] = *l.ratio;
      j["levels"].push_back(row);
    }
    return j.dump(2) + "\n";
  }
  std::string s = config_comment(rep.config);
  s += "# beta=" + num(rep.beta) + " theta_beta=" + num(rep.theta_beta) + " alpha=" + num(rep.alpha) +
       " e_2pi_over_beta=" + num(rep.e_2pi_over_beta) + "\n";
  s += "n,lambda,energy,eta,ratio,converged\n";
  for (const auto& l : rep.levels) {
    s += std::to_string(l.n) + ",";
    if (l.converged) s += num(l.lambda) + "," + num(l.energy) + "," + num(l.eta);
    else s += ",,";
    s += "," + (l.ratio ? num(*l.ratio) : std::string()) + "," + (l.converged ? "1" : "0") + "\n";
  }
  return s;
}

std::string format_scan(const std::vector<ScanRow>& rows, const RunConfig& config, Format format) {
  if (format == Format::json) {
    json j;
    j["schema"] = schema_version;
    j["config"] = config_json(config);
    j["rows"] = json::array();
    for (const auto& r : rows) {
      json row = {{"mass_ratio", r.mass_ratio}, {"subcritical", r.subcritical}};
      if (!r.subcritical && r.beta > 0.0) {
        row["beta"] = r.beta;
        row["e_2pi_over_beta"] = r.e_2pi_over_beta;
        row["energies"] = r.energies;
        if (r.deepest_level) row["deepest_level"] = *r.deepest_level;
      }
      if (!r.diagnostic.empty()) row["diagnostic"] = r.diagnostic;
      j["rows"].push_back(row);
    }
    return j.dump(2) + "\n";
  }
  std::string s = "# schema=" + std::to_string(schema_version) + " command=scan r0=" + num(config.r0) +
                  " profile=" + to_string(config.profile) + "\n";
  s += "mass_ratio,status,beta,e_2pi_over_beta,energy_1,energy_2,energy_3,deepest_level\n";
  for (const auto& r : rows) {
    s += num(r.mass_ratio) + ",";
    if (r.subcritical) {
      s += "subcritical,,,,,,\n";
      continue;
    }
    s += r.diagnostic.empty() || r.deepest_level ? "ok," : "error,";
    s += (r.beta > 0.0 ? num(r.beta) : "") + "," + (r.beta > 0.0 ? num(r.e_2pi_over_beta) : "");
    for (std::size_t i = 0; i < 3; ++i) s += "," + (i < r.energies.size() ? num(r.energies[i]) : std::string());
    s += "," + (r.deepest_level ? std::to_string(*r.deepest_level) : std::string()) + "\n";
  }
  return s;
}

std::string format_oracle(const OracleReport& rep, const RunConfig& config, Format format) {
  if (format == Format::json) {
    json j;
    j["schema"] = schema_version;
    j["config"] = config_json(config);
    j["grid"] = {{"r_max", rep.r_max}, {"points", rep.points}, {"spacing", rep.spacing}};
    j["rows"] = json::array();
    for (const auto& r : rep.rows)
      j["rows"].push_back({{"n", r.n},
                           {"matched", r.matched},
                           {"fd_coarse", r.fd_coarse},
                           {"fd_fine", r.fd_fine},
                           {"fd_extrapolated", r.fd_extrapolated},
                           {"abs_delta", r.abs_delta},
                           {"rel_delta", r.rel_delta}});
    return j.dump(2) + "\n";
  }
  std::string s = config_comment(config);
  s += "# r_max=" + num(rep.r_max) + " points=" + std::to_string(rep.points) + " spacing=" + num(rep.spacing) + "\n";
  s += "n,matched,fd_coarse,fd_fine,fd_extrapolated,abs_delta,rel_delta\n";
  for (const auto& r : rep.rows)
    s += std::to_string(r.n) + "," + num(r.matched) + "," + num(r.fd_coarse) + "," + num(r.fd_fine) + "," +
         num(r.fd_extrapolated) + "," + num(r.abs_delta) + "," + num(r.rel_delta) + "\n";
  return s;
}

std::string format_fast_potential(const RunConfig& config, Format format) {
  const auto params = config.model();
  const EffectivePotential pot(params);
  const double r0 = config.r0;
  const double length = config.absolute_units ? 1.0 : r0;
  const double energy = config.absolute_units ? 1.0 : params.mu * r0 * r0;
  const double v_unit = config.absolute_units ? 1.0 : r0 * r0;

  json rows = json::array();
  std::string s = config_comment(config) + "r,theta,fast_eigenvalue,v\n";
  for (int i = 1; i <= config.grid; ++i) {
    const double r = config.extent * r0 * i / config.grid;
    const double th = params.profile(r);
    const double e = fast_eigenvalue(params, r) * energy;
    const double v = pot(r) * v_unit;
    if (format == Format::json)
      rows.push_back({{"r", r / length}, {"theta", th}, {"fast_eigenvalue", e}, {"v", v}});
    else
      s += num(r / length) + "," + num(th) + "," + num(e) + "," + num(v) + "\n";
  }
  if (format == Format::csv) return s;
  json j;
  j["schema"] = schema_version;
  j["config"] = config_json(config);
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  std::string text;
  int status = exit_ok;
  try {
    switch (config.command) {
      case Command::fast_potential: text = format_fast_potential(config, config.format); break;
      case Command::spectrum: {
        const auto rep = make_spectrum_report(config);
        text = format_spectrum(rep, config.format);
        bool any = false;
        for (const auto& l : rep.levels) any = any || l.converged;
        if (!any) {
          err << "error: no level converged\n";
          status = exit_failure;
        } else if (rep.capped) {
          err << "note: level count capped where the seeds underflow\n";
        }
        break;
      }
      case Command::scan: text = format_scan(scan(config, config.ratios), config, config.format); break;
      case Command::oracle: text = format_oracle(make_oracle_report(config), config, config.format); break;
    }
  } catch (const NoEfimovRegime& e) {
    err << "error: " << e.what() << "\n";
    return exit_no_regime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }

  if (config.output_path) {
    std::ofstream file(*config.output_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << *config.output_path << " for writing\n";
      return exit_failure;
    }
    file << text;
    if (!file.flush()) {
      err << "error: write to " << *config.output_path << " failed\n";
      return exit_failure;
    }
  } else {
    out << text;
  }
  return status;
}

}  // namespace efimov::cli
