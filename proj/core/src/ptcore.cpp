#include "ptforge/ptcore.hpp"

#include <cmath>

#include "ptforge/errors.hpp"

namespace ptforge::pt {

namespace {
// Below this product of amplitude magnitudes the relative phase is noise.
constexpr double kPhaseFloor = 1e-14;
}  // namespace

PtParams params_from_ratio(double gamma_ratio) {
  if (!(gamma_ratio >= 0.0 && gamma_ratio < 1.0)) {
    throw BrokenPhaseError("gamma/lambda must lie in [0, 1), got " +
                           std::to_string(gamma_ratio));
  }
  PtParams p;
  p.gamma_ratio = gamma_ratio;
  p.lambda = 1.0 / std::sqrt((1.0 - gamma_ratio) * (1.0 + gamma_ratio));
  p.gamma = gamma_ratio * p.lambda;
  return p;
}

Nondimensional nondimensionalize(double gain_rate, double coupling) {
  if (!(gain_rate >= 0.0) || !(coupling > 0.0)) {
    throw BrokenPhaseError("need gain_rate >= 0 and coupling > 0");
  }
  if (gain_rate >= coupling) {
    throw BrokenPhaseError("gain rate " + std::to_string(gain_rate) +
                           " reaches the coupling " + std::to_string(coupling) +
                           "; the unbroken phase requires gain < coupling");
  }
  Nondimensional nd;
  nd.alpha = 2.0 * std::sqrt((coupling - gain_rate) * (coupling + gain_rate));
  nd.params = params_from_ratio(gain_rate / coupling);
  return nd;
}

Mat2 propagator(const PtParams& p, double tau) {
  const double c = std::cos(tau / 2);
  const double s = std::sin(tau / 2);
  const std::complex<double> off{0.0, -p.lambda * s};
  return {{c - p.gamma * s, 0.0}, off, off, {c + p.gamma * s, 0.0}};
}

PtState initial_state(double theta) {
  return {{std::cos(theta / 2), 0.0}, {std::sin(theta / 2), 0.0}};
}

PtState evolve(const PtParams& p, double theta, double tau) {
  const Mat2 u = propagator(p, tau);
  const PtState s0 = initial_state(theta);
  return {u.a * s0.psi1 + u.b * s0.psi2, u.c * s0.psi1 + u.d * s0.psi2};
}

PtState state_rate(const PtParams& p, const PtState& s) {
  const std::complex<double> i{0.0, 1.0};
  return {0.5 * (-p.gamma * s.psi1 - i * p.lambda * s.psi2),
          0.5 * (-i * p.lambda * s.psi1 + p.gamma * s.psi2)};
}

PtObservables observables(const PtState& s) {
  const double n1 = std::norm(s.psi1);
  const double n2 = std::norm(s.psi2);
  PtObservables obs;
  obs.norm = n1 + n2;
  obs.imbalance = n1 - n2;
  if (std::sqrt(n1 * n2) > kPhaseFloor) {
    obs.relative_phase = std::arg(s.psi2 / s.psi1);
  }
  return obs;
}

double tau_sharp(const PtParams& p) {
  if (p.gamma <= 0.0) {
    throw UndefinedError("the norm is constant at gamma == 0; no sharp feature");
  }
  return std::sqrt(2.0 / (p.lambda * p.gamma));
}

std::vector<double> unwrap_angles(std::span<const double> wrapped) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  double shift = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double jump = out[i] + shift - out[i - 1];
    shift -= 2 * kPi * std::round(jump / (2 * kPi));
    out[i] += shift;
  }
  return out;
}

}  // namespace ptforge::pt
