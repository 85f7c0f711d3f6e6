#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptforge/synth.hpp"

// Parameter-space mapping built on the synthesis stage: breakdown-time scans,
// the critical recycling strength that makes emulation perpetual, the phase
// boundary in the (starting coupling, recycling) plane, and the feasibility
// region when both a minimum emulation span and a minimum population fraction
// are demanded.  Grid points are independent runs and execute in parallel;
// results land in grid order regardless of the worker count.
namespace ptforge::sweep {

struct SweepOptions {
  double theta = pt::kPi / 2;
  double horizon = 400 * pt::kPi;
  double dtau_sample = pt::kPi / 200;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double omega_cap = 1e3;
  double drift_tol = 1e-4;
  // Absolute tolerance, in units of lambda, of the recycling-threshold
  // bisection, and the largest recycling strength it will search up to.
  double bisect_tol = 1e-5;
  double omega03_search_max = 2.0;
  // Fraction of the horizon discarded as transient when measuring steady
  // detuning ranges.
  double transient_fraction = 0.25;
  std::size_t workers = 0;  // 0: use parallel::worker_count()
};

// Assembles run parameters from ratios to lambda (the natural sweep axes).
synth::ControlParams make_params(double gamma_ratio, double omega_init_over_lambda,
                                 double omega03_over_lambda,
                                 const SweepOptions& opt);

// ---- Breakdown-time scan ----

struct BreakdownPoint {
  double gamma_ratio = 0.0;
  double omega_init_over_lambda = 0.0;
  double omega03_over_lambda = 0.0;
  synth::Verdict verdict = synth::Verdict::kReachedHorizon;
  std::optional<double> tau_star;
  std::string note;  // nonempty when this point failed; the scan continues
};

// Cartesian product of the two grids, gamma-major, run in parallel.
std::vector<BreakdownPoint> scan_breakdown(std::span<const double> gamma_ratios,
                                           std::span<const double> omega_init_over_lambda,
                                           double omega03_over_lambda,
                                           const SweepOptions& opt = {});

// ---- Perpetual-emulation threshold ----

// Smallest recycling strength (as omega03/lambda) whose run survives to the
// horizon, found by bisection to opt.bisect_tol.  Throws NoBracketError when
// the run already survives without recycling or when nothing up to
// omega03_search_max survives.
double critical_recycling(double gamma_ratio, double omega_init_over_lambda,
                          const SweepOptions& opt = {});

// The threshold as a function of the starting coupling: one bisection per
// grid point, in parallel.  A point whose bisection finds no bracket gets a
// NaN threshold and a note; the rest of the curve is still produced.
struct BoundaryCurve {
  double gamma_ratio = 0.0;
  std::vector<double> omega_init_over_lambda;
  std::vector<double> omega03_critical_over_lambda;
  std::vector<std::string> notes;  // "" for clean points
};
BoundaryCurve boundary_curve(double gamma_ratio,
                             std::span<const double> omega_init_over_lambda,
                             const SweepOptions& opt = {});

// ---- Feasibility under joint requirements ----

struct FeasibilityQuery {
  double tau_required = 10 * pt::kPi;  // emulation must last at least this
  double r_min = 0.1;                  // minimum inner-pair population fraction
  double omega03_max_over_lambda = 2.0;
};

struct FeasibilityResult {
  double gamma_ratio = 0.0;
  // Smallest starting coupling honouring r_min (the most favourable choice,
  // since breakdown comes later for weaker coupling).
  double omega_init_min_over_lambda = 0.0;
  bool feasible = false;
  // Breakdown time of the best-corner run, absent when it survives.
  std::optional<double> corner_tau_star;
};

// A single point: runs the most favourable corner (omega_init at the r_min
// bound, omega03 at its cap) for tau_required and reports survival.
FeasibilityResult assess_feasibility(double gamma_ratio,
                                     const FeasibilityQuery& query = {},
                                     const SweepOptions& opt = {});

std::vector<FeasibilityResult> feasibility_map(std::span<const double> gamma_ratios,
                                               const FeasibilityQuery& query = {},
                                               const SweepOptions& opt = {});

// Largest gain ratio feasible without recycling: the root of the
// weak-coupling breakdown estimate evaluated at the r_min-bound coupling.
// Closed-form in everything but the final scalar root find.
double no_recycling_max_gamma_ratio(double tau_required, double r_min);

// Largest feasible gain ratio with recycling allowed up to the query cap,
// bisected over assess_feasibility to 1e-4 in the ratio.
double max_gamma_ratio_with_recycling(const FeasibilityQuery& query = {},
                                      const SweepOptions& opt = {});

// ---- Detuning ranges under recycling ----

struct DetuningRange {
  double omega03_over_lambda = 0.0;
  synth::Verdict verdict = synth::Verdict::kReachedHorizon;
  // min/max/span of each detuning over the post-transient part of the run;
  // NaN when the run terminated (no steady regime exists).
  double delta0_min = 0.0, delta0_max = 0.0, delta0_span = 0.0;
  double delta3_min = 0.0, delta3_max = 0.0, delta3_span = 0.0;
};
std::vector<DetuningRange> detuning_ranges(double gamma_ratio,
                                           double omega_init_over_lambda,
                                           std::span<const double> omega03_over_lambda,
                                           const SweepOptions& opt = {});

// ---- Orbit geometry in the coupling plane ----

enum class OrbitVerdict {
  kUnbounded,          // the run terminated: the couplings left any orbit
  kSingleClosedOrbit,  // closed to tolerance from the very start
  kTransientThenOrbit, // open at first, closed by the end of the run
  kUnclassified,       // survived but never closed to tolerance
};
const char* to_string(OrbitVerdict v);

struct OrbitTrace {
  std::vector<double> tau;
  std::vector<double> omega01, omega23;
  OrbitVerdict verdict = OrbitVerdict::kUnclassified;
  // One-period return distances in the coupling plane at the start and over
  // the final period of the run (NaN when terminated early).
  double initial_return_distance = 0.0;
  double final_return_distance = 0.0;
  double closure_tolerance = 0.0;  // 1e-4 * max coupling seen
};
OrbitTrace orbit_trace(double gamma_ratio, double omega_init_over_lambda,
                       double omega03_over_lambda, const SweepOptions& opt = {});

}  // namespace ptforge::sweep
