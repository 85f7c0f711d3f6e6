#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ptforge/ptcore.hpp"

// Command-line and config-document parsing.  Every knob of every command
// lives in one flat RunConfig so a resolved run can be echoed into output
// metadata and parsed back verbatim.
namespace ptforge::shell {

struct RunConfig {
  std::string command;

  // Single-point physics inputs (ratios are in units of lambda).
  double gamma_ratio = 0.5;
  double theta = pt::kPi / 2;
  double omega_init_over_lambda = 0.05;
  double omega03_over_lambda = 0.0;

  // Integration window and sampling.
  double horizon_tau = 400 * pt::kPi;
  double dtau_sample = pt::kPi / 200;

  // Control-stage integrator and classification knobs.
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double omega_cap = 1e3;
  double drift_tol = 1e-4;

  // Verification-stage (four-level) integrator tolerances.
  double quad_abs_tol = 1e-14;
  double quad_rel_tol = 1e-13;

  // Threshold search and range measurement knobs.
  double bisect_tol = 1e-5;
  double omega03_search_max = 2.0;
  double transient_fraction = 0.25;

  // Feasibility query.
  double tau_required = 10 * pt::kPi;
  double r_min = 0.1;
  double omega03_max_over_lambda = 2.0;

  // Scan axes; resolved to the matching single-point value when not given.
  std::vector<double> gamma_ratio_grid;
  std::vector<double> omega_init_grid;
  std::vector<double> omega03_grid;

  std::size_t workers = 0;  // 0: PT_FORGE_THREADS or hardware width
  std::string out = "-";    // "-" writes to stdout
  std::string format = "csv";

  // Set when --help was requested; help_text carries the full synopsis.
  bool help = false;
  std::string help_text;

  bool operator==(const RunConfig&) const = default;
};

// The accepted command names, in documentation order.
const std::vector<std::string>& known_commands();

// Grid notation: a single number, a comma list ("0.3,0.5,0.8"), an inclusive
// linear range "lo:hi:n" with n >= 2, or a log-spaced range "log:lo:hi:n"
// with 0 < lo < hi.  Results must be strictly increasing.
// Throws UsageError on malformed input.
std::vector<double> parse_grid(const std::string& spec);

// Parses the arguments after the program name, reading an optional flat
// key = value config document named by --config.  Command-line flags override
// document keys; unknown keys and out-of-range values throw UsageError (the
// missing-command message carries the usage synopsis).  A config document
// that cannot be read throws IoError.
RunConfig parse_config(const std::vector<std::string>& args);
RunConfig parse_config(int argc, const char* const* argv);

}  // namespace ptforge::shell
