#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

// Closed-form description of the balanced gain/loss two-level system in its
// unbroken phase.  Time is the dimensionless tau; the equation of motion is
//
//   i d/dtau (psi1, psi2) = 1/2 [[-i gamma, lambda], [lambda, i gamma]] (psi1, psi2)
//
// with lambda^2 - gamma^2 = 1 enforced by the parameterization.  All evolution
// here is exact (trigonometric), so these routines double as the reference
// against which the numerical layers are checked.
namespace ptforge::pt {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Scaled parameters of the effective two-level Hamiltonian.  `gamma_ratio`
// is the knob gamma/lambda in [0, 1); the unbroken-phase normalization fixes
// lambda = 1/sqrt(1 - gamma_ratio^2) and gamma = gamma_ratio * lambda.
struct PtParams {
  double gamma_ratio = 0.0;
  double lambda = 1.0;
  double gamma = 0.0;
};

// Builds PtParams from gamma/lambda.  Throws BrokenPhaseError unless
// 0 <= gamma_ratio < 1 (at 1 the spectrum coalesces and the scaled
// parameters diverge).
PtParams params_from_ratio(double gamma_ratio);

// Reduction of a dimensionful pair (gain rate, coupling) to scaled form.
// `alpha` is the oscillation rate 2 sqrt(coupling^2 - gain_rate^2) that maps
// laboratory time t to tau = alpha t.  Throws BrokenPhaseError when
// gain_rate >= coupling.
struct Nondimensional {
  double alpha = 0.0;
  PtParams params;
};
Nondimensional nondimensionalize(double gain_rate, double coupling);

// Row-major 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
  std::complex<double> a, b, c, d;
};

// Exact propagator U(tau) with psi(tau) = U(tau) psi(0).  Unimodular
// (det U = 1) and 4*pi-periodic.
Mat2 propagator(const PtParams& p, double tau);

// Two-level amplitudes.
struct PtState {
  std::complex<double> psi1, psi2;
};

// Real initial state (cos(theta/2), sin(theta/2)).
PtState initial_state(double theta);

// psi(tau) for the initial state selected by theta.
PtState evolve(const PtParams& p, double theta, double tau);

// d psi / d tau at the given state.
PtState state_rate(const PtParams& p, const PtState& s);

// Derived observables of a state.  `relative_phase` is arg(psi2/psi1) in
// (-pi, pi]; it is absent when either amplitude is too small for the phase
// to be meaningful.
struct PtObservables {
  double norm = 0.0;         // |psi1|^2 + |psi2|^2
  double imbalance = 0.0;    // |psi1|^2 - |psi2|^2
  std::optional<double> relative_phase;
};
PtObservables observables(const PtState& s);

// Duration of the sharp feature in the norm oscillation near its minimum,
// (lambda gamma / 2)^(-1/2).  Throws UndefinedError at gamma == 0 where the
// norm is constant and no feature exists.
double tau_sharp(const PtParams& p);

// Removes 2*pi jumps from a sequence of angles sampled along a continuous
// trace, pinning the first element.
std::vector<double> unwrap_angles(std::span<const double> wrapped);

}  // namespace ptforge::pt
