#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "ptforge/ptcore.hpp"

// Synthesis of the time-dependent drives (two couplings, two detunings) that
// make the outer levels of a four-level chain act as gain and loss reservoirs
// for the inner pair, so the inner pair follows the balanced gain/loss
// dynamics of ptforge::pt exactly.  The couplings obey a closed ODE system in
// tau driven by the known two-level solution; the detunings follow
// algebraically.  Everything here works on that ODE and on the closed-form
// solution available when the reservoirs are not recycled.
namespace ptforge::synth {

// How a synthesis run ended.
enum class Verdict {
  kTerminated,      // a coupling diverged (source exhausted) before the horizon
  kReachedHorizon,  // survived to the horizon but still drifting secularly
  kPeriodic,        // survived with a cycle-averaged source population that
                    // no longer drifts: emulation can continue indefinitely
};
const char* to_string(Verdict v);

// Inputs of a synthesis run.  Couplings are in the same scale as
// pt::PtParams::lambda; time is tau throughout.
struct ControlParams {
  pt::PtParams pt;
  double theta = pt::kPi / 2;      // initial two-level state polar angle
  double omega_init = 0.1;         // shared starting value for both couplings
  double omega03 = 0.0;            // static reservoir-recycling coupling
  double horizon = 400 * pt::kPi;  // integrate tau in [0, horizon]
  double dtau_sample = pt::kPi / 200;  // uniform output grid spacing
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double omega_cap = 1e3;   // coupling magnitude that counts as divergence
  double drift_tol = 1e-4;  // cycle-averaged drift bound for kPeriodic
  // Optional distinct starting couplings; omega_init is used where absent.
  std::optional<double> omega01_init;
  std::optional<double> omega23_init;

  double omega01_start() const { return omega01_init.value_or(omega_init); }
  double omega23_start() const { return omega23_init.value_or(omega_init); }
};

// Instantaneous coefficients of the coupling ODEs at one tau, derived from the
// two-level amplitude ratio rho = psi2/psi1 (sigma = 1/rho):
//
//   d omega01/dtau = f1 w01 + f2 w01^3 + f3 omega03 w01^2 / w23
//   d omega23/dtau = g1 w23 + g2 w23^3 + g3 omega03 w23^2 / w01
//
// Throws UndefinedError at gamma == 0 and AmplitudeVanishesError when either
// two-level amplitude is too small for the ratio to be formed.
struct ControlCoefficients {
  double f1, f2, f3;
  double g1, g2, g3;
  double re_rho, im_rho;
  double re_sigma, im_sigma;
};
ControlCoefficients control_coefficients(const ControlParams& p, double tau);

// Full instantaneous control law at a given pair of coupling values: the
// coupling rates plus the two detunings that complete the embedding.
// Throws DivergencePendingError when a coupling is already past omega_cap.
struct ControlLaw {
  double omega01_rate, omega23_rate;
  double delta0, delta3;
};
ControlLaw control_law(const ControlParams& p, double tau, double omega01,
                       double omega23);

// Result of integrating the control ODEs from tau = 0.  Samples sit on the
// uniform grid k * dtau_sample; a kTerminated trace stops at the last grid
// point before the divergence.  Reservoir amplitudes are the exact embedding
// values phi0 = -i gamma psi1 / omega01 and phi3 = +i gamma psi2 / omega23;
// the populations are their squared magnitudes.
struct ControlTrace {
  ControlParams params;
  std::vector<double> tau;
  std::vector<double> omega01, omega23;
  std::vector<double> delta0, delta3;
  std::vector<std::complex<double>> phi0, phi3;
  std::vector<double> sink_population;    // |phi0|^2, grows as psi1 loses
  std::vector<double> source_population;  // |phi3|^2, drains into psi2's gain
  Verdict verdict = Verdict::kReachedHorizon;
  // Divergence time (kTerminated only), located on the dense interpolant.
  std::optional<double> tau_star;
  // Cycle-averaged source drift between the last two periods, relative to the
  // initial source population (set when the horizon was reached).
  std::optional<double> source_drift;
};
ControlTrace integrate_controls(const ControlParams& p);

// Divergence time of a run with these parameters, or nullopt when the run
// survives to the horizon.
std::optional<double> breakdown_time(const ControlParams& p);

// ---- Closed forms, valid for theta == pi/2 and omega03 == 0 ----

// Remaining fraction of the source reservoir population at tau.  Positive
// until the breakdown time, zero there, negative (unphysical) beyond.
double source_depletion(const ControlParams& p, double tau);

// Exact breakdown time: the root of source_depletion.
double analytic_breakdown_time(const ControlParams& p);

// Exact drives at tau.  Throws PastBreakdownError once a reservoir is empty.
struct DriveTuple {
  double omega01, omega23;
  double delta0, delta3;
};
DriveTuple analytic_controls(const ControlParams& p, double tau);

// Asymptotic estimates of the breakdown time, valid for weak respectively
// strong initial coupling.
enum class CouplingRegime { kWeak, kStrong };
double breakdown_approx(const ControlParams& p, CouplingRegime regime);

// ---- Embedding bookkeeping ----

// Reservoir amplitudes at tau = 0 implied by the embedding constraints.
struct ReservoirInit {
  std::complex<double> phi0, phi3;
};
ReservoirInit initial_reservoir(const ControlParams& p);

// Total four-level population at tau = 0 (conserved by the unitary model).
double total_initial_population(const ControlParams& p);

// Worst-case fraction of the total population carried by the inner pair,
// min_tau n(tau) / N0.  The figure of merit for how faithfully the embedding
// uses the available amplitude.
double pt_fraction(const ControlParams& p);

// Smallest shared starting coupling keeping pt_fraction >= r_min for the
// given gain rate.  Throws UndefinedError unless 0 < r_min < n_min where
// n_min is the two-level norm minimum (1 at theta == pi/2).
double min_coupling_for_fraction(const pt::PtParams& p, double r_min,
                                 double theta = pt::kPi / 2);

}  // namespace ptforge::synth
