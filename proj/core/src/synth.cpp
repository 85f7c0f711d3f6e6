#include "ptforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptforge/errors.hpp"
#include "ptforge/ode.hpp"

namespace ptforge::synth {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kTerminated: return "Terminated";
    case Verdict::kReachedHorizon: return "ReachedHorizon";
    case Verdict::kPeriodic: return "Periodic";
  }
  return "Unknown";
}

namespace {

// Below this magnitude a two-level amplitude cannot anchor the ratio rho.
constexpr double kAmpFloor = 1e-10;

void validate(const ControlParams& p) {
  if (p.pt.gamma <= 0.0) {
    throw UndefinedError(
        "synthesis needs gamma > 0; without gain and loss the reservoirs "
        "decouple from the inner pair");
  }
  if (!(p.omega01_start() > 0.0) || !(p.omega23_start() > 0.0)) {
    throw UndefinedError("starting couplings must be positive");
  }
  if (!(p.horizon > 0.0) || !(p.dtau_sample > 0.0)) {
    throw UndefinedError("horizon and dtau_sample must be positive");
  }
  if (!(p.omega_cap > std::max(p.omega01_start(), p.omega23_start()))) {
    throw UndefinedError("omega_cap must exceed the starting couplings");
  }
  if (!(p.abs_tol > 0.0) || !(p.rel_tol > 0.0) || !(p.drift_tol > 0.0)) {
    throw UndefinedError("tolerances must be positive");
  }
}

// Gate for the no-recycling closed forms.
void require_analytic(const ControlParams& p, const char* what) {
  if (p.omega03 != 0.0 || p.theta != pt::kPi / 2) {
    throw UndefinedError(std::string(what) +
                         " has a closed form only for the equal superposition "
                         "without reservoir recycling (omega03 == 0)");
  }
  if (p.pt.gamma <= 0.0) throw UndefinedError("needs gamma > 0");
  if (!(p.omega01_start() > 0.0) || !(p.omega23_start() > 0.0)) {
    throw UndefinedError("starting couplings must be positive");
  }
}

// Remaining population fraction of a reservoir with starting coupling omega0.
// sign = +1 selects the source (draining) branch, -1 the sink branch whose
// "depletion" runs backwards in tau.
double branch_depletion(const pt::PtParams& q, double omega0, double tau, int sign) {
  const double s2 = std::sin(tau / 2);
  const double drained =
      2 * s2 * s2 + sign * (q.lambda * q.lambda * tau / q.gamma - q.gamma * std::sin(tau));
  return 1.0 - omega0 * omega0 * drained;
}

}  // namespace

ControlCoefficients control_coefficients(const ControlParams& p, double tau) {
  if (p.pt.gamma <= 0.0) {
    throw UndefinedError("control coefficients need gamma > 0");
  }
  const pt::PtState s = pt::evolve(p.pt, p.theta, tau);
  if (std::abs(s.psi1) < kAmpFloor || std::abs(s.psi2) < kAmpFloor) {
    throw AmplitudeVanishesError(
        "a two-level amplitude vanished at tau = " + std::to_string(tau) +
        "; the amplitude ratio driving the controls is undefined there");
  }
  const std::complex<double> rho = s.psi2 / s.psi1;
  const std::complex<double> sigma = s.psi1 / s.psi2;
  const double g = p.pt.gamma, l = p.pt.lambda;
  ControlCoefficients c;
  c.f1 = -g / 2 + (l / 2) * rho.imag();
  c.f2 = -1 / (2 * g);
  c.f3 = rho.imag() / 2;
  c.g1 = g / 2 + (l / 2) * sigma.imag();
  c.g2 = 1 / (2 * g);
  c.g3 = sigma.imag() / 2;
  c.re_rho = rho.real();
  c.im_rho = rho.imag();
  c.re_sigma = sigma.real();
  c.im_sigma = sigma.imag();
  return c;
}

ControlLaw control_law(const ControlParams& p, double tau, double omega01,
                       double omega23) {
  if (omega01 > p.omega_cap || omega23 > p.omega_cap) {
    throw DivergencePendingError(
        "coupling beyond omega_cap at tau = " + std::to_string(tau) +
        "; the control law is blowing up (reservoir exhausted)");
  }
  if (!(omega01 > 0.0) || !(omega23 > 0.0)) {
    throw UndefinedError("the control law needs positive couplings");
  }
  const ControlCoefficients c = control_coefficients(p, tau);
  ControlLaw law;
  law.omega01_rate = c.f1 * omega01 + c.f2 * omega01 * omega01 * omega01 +
                     c.f3 * p.omega03 * omega01 * omega01 / omega23;
  law.omega23_rate = c.g1 * omega23 + c.g2 * omega23 * omega23 * omega23 +
                     c.g3 * p.omega03 * omega23 * omega23 / omega01;
  law.delta0 = (p.pt.lambda + p.omega03 * omega01 / omega23) * c.re_rho;
  law.delta3 = (p.pt.lambda + p.omega03 * omega23 / omega01) * c.re_sigma;
  return law;
}

ControlTrace integrate_controls(const ControlParams& p) {
  validate(p);
  ControlTrace tr;
  tr.params = p;

  const ode::Rhs rhs = [&p](double tau, std::span<const double> y,
                            std::span<double> dydt) {
    const ControlCoefficients c = control_coefficients(p, tau);
    const double w01 = y[0], w23 = y[1];
    dydt[0] = c.f1 * w01 + c.f2 * w01 * w01 * w01 +
              c.f3 * p.omega03 * w01 * w01 / w23;
    dydt[1] = c.g1 * w23 + c.g2 * w23 * w23 * w23 +
              c.g3 * p.omega03 * w23 * w23 / w01;
  };

  const std::size_t n_samples =
      static_cast<std::size_t>(std::floor(p.horizon / p.dtau_sample + 1e-9)) + 1;
  tr.tau.reserve(n_samples);
  tr.omega01.reserve(n_samples);
  tr.omega23.reserve(n_samples);
  tr.delta0.reserve(n_samples);
  tr.delta3.reserve(n_samples);
  tr.phi0.reserve(n_samples);
  tr.phi3.reserve(n_samples);
  tr.sink_population.reserve(n_samples);
  tr.source_population.reserve(n_samples);

  const auto emit = [&](double tk, double w01, double w23) {
    const ControlCoefficients c = control_coefficients(p, tk);
    const pt::PtState s = pt::evolve(p.pt, p.theta, tk);
    const std::complex<double> i_gamma(0.0, p.pt.gamma);
    const std::complex<double> phi0 = -i_gamma * s.psi1 / w01;
    const std::complex<double> phi3 = i_gamma * s.psi2 / w23;
    tr.tau.push_back(tk);
    tr.omega01.push_back(w01);
    tr.omega23.push_back(w23);
    tr.delta0.push_back((p.pt.lambda + p.omega03 * w01 / w23) * c.re_rho);
    tr.delta3.push_back((p.pt.lambda + p.omega03 * w23 / w01) * c.re_sigma);
    tr.phi0.push_back(phi0);
    tr.phi3.push_back(phi3);
    tr.sink_population.push_back(std::norm(phi0));
    tr.source_population.push_back(std::norm(phi3));
  };

  ode::Options oopt;
  oopt.abs_tol = p.abs_tol;
  oopt.rel_tol = p.rel_tol;
  oopt.max_step = 1.0;
  ode::Dopri5 solver(rhs, 0.0, {p.omega01_start(), p.omega23_start()}, oopt);

  emit(0.0, p.omega01_start(), p.omega23_start());
  std::size_t next = 1;
  bool capped = false, stalled = false;
  double cap_time = 0.0;

  while (solver.tau() < p.horizon) {
    const ode::StepStatus st = solver.step(p.horizon);
    if (st != ode::StepStatus::kAdvanced) {
      stalled = true;
      break;
    }
    const auto y_end = solver.state();
    if (std::max(y_end[0], y_end[1]) >= p.omega_cap) {
      // Locate the crossing on the dense interpolant.
      double lo = solver.tau_prev(), hi = solver.tau();
      double y[2];
      while (hi - lo > 1e-13 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        solver.dense(mid, y);
        (std::max(y[0], y[1]) >= p.omega_cap ? hi : lo) = mid;
      }
      cap_time = hi;
      capped = true;
    }
    // Grid times k * dtau can sit one ulp past the solver's exact landing on
    // the horizon; the slack keeps such samples from being dropped.
    const double slack = 1e-9 * std::max(1.0, solver.tau());
    while (next < n_samples) {
      const double tk = static_cast<double>(next) * p.dtau_sample;
      if (tk > solver.tau() + slack || (capped && tk >= cap_time)) break;
      double y[2];
      solver.dense(tk, y);
      emit(tk, y[0], y[1]);
      ++next;
    }
    if (capped) break;
  }

  if (capped || stalled) {
    tr.verdict = Verdict::kTerminated;
    tr.tau_star = capped ? cap_time : solver.tau();
    return tr;
  }

  // Survived to the horizon: compare the cycle-averaged source population of
  // the last two periods to decide whether the drain has stopped.
  const auto win =
      static_cast<std::size_t>(std::llround(2 * pt::kPi / p.dtau_sample));
  const std::size_t n = tr.source_population.size();
  if (win > 0 && n >= 2 * win) {
    const auto mean = [&](std::size_t begin, std::size_t end) {
      double acc = 0.0;
      for (std::size_t i = begin; i < end; ++i) acc += tr.source_population[i];
      return acc / static_cast<double>(end - begin);
    };
    const double m_prev = mean(n - 2 * win, n - win);
    const double m_last = mean(n - win, n);
    const double p30 = tr.source_population.front();
    const double drift =
        p30 > 0.0 ? std::abs(m_last - m_prev) / p30 : std::abs(m_last - m_prev);
    tr.source_drift = drift;
    tr.verdict = drift < p.drift_tol ? Verdict::kPeriodic : Verdict::kReachedHorizon;
  } else {
    tr.verdict = Verdict::kReachedHorizon;
  }
  return tr;
}

std::optional<double> breakdown_time(const ControlParams& p) {
  const ControlTrace tr = integrate_controls(p);
  return tr.tau_star;
}

double source_depletion(const ControlParams& p, double tau) {
  require_analytic(p, "source_depletion");
  return branch_depletion(p.pt, p.omega23_start(), tau, +1);
}

double analytic_breakdown_time(const ControlParams& p) {
  require_analytic(p, "analytic_breakdown_time");
  const double omega0 = p.omega23_start();
  double hi = 1.0;
  while (branch_depletion(p.pt, omega0, hi, +1) > 0.0) hi *= 2;
  double lo = hi / 2 > 1.0 ? hi / 2 : 0.0;
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    (branch_depletion(p.pt, omega0, mid, +1) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

DriveTuple analytic_controls(const ControlParams& p, double tau) {
  require_analytic(p, "analytic_controls");
  const double g = p.pt.gamma, l = p.pt.lambda;
  const double d1 = l * l - g * g * std::cos(tau) - g * std::sin(tau);
  const double d2 = l * l - g * g * std::cos(tau) + g * std::sin(tau);
  const double drain = branch_depletion(p.pt, p.omega23_start(), tau, +1);
  const double refill = branch_depletion(p.pt, p.omega01_start(), tau, -1);
  if (drain <= 0.0 || refill <= 0.0) {
    throw PastBreakdownError("a reservoir is empty at tau = " + std::to_string(tau) +
                             "; no drives can continue the emulation");
  }
  DriveTuple d;
  d.omega01 = p.omega01_start() * std::sqrt(d1 / refill);
  d.omega23 = p.omega23_start() * std::sqrt(d2 / drain);
  d.delta0 = l / d1;
  d.delta3 = l / d2;
  return d;
}

double breakdown_approx(const ControlParams& p, CouplingRegime regime) {
  require_analytic(p, "breakdown_approx");
  const double omega0 = p.omega23_start();
  const double g = p.pt.gamma, l = p.pt.lambda;
  if (regime == CouplingRegime::kWeak) {
    return g * (1.0 - omega0 * omega0) / (omega0 * omega0 * l * l);
  }
  return g / (omega0 * omega0);
}

ReservoirInit initial_reservoir(const ControlParams& p) {
  if (p.pt.gamma <= 0.0) throw UndefinedError("needs gamma > 0");
  if (!(p.omega01_start() > 0.0) || !(p.omega23_start() > 0.0)) {
    throw UndefinedError("starting couplings must be positive");
  }
  const pt::PtState s0 = pt::initial_state(p.theta);
  return {{0.0, -p.pt.gamma * s0.psi1.real() / p.omega01_start()},
          {0.0, p.pt.gamma * s0.psi2.real() / p.omega23_start()}};
}

double total_initial_population(const ControlParams& p) {
  const ReservoirInit r = initial_reservoir(p);
  return 1.0 + std::norm(r.phi0) + std::norm(r.phi3);
}

double pt_fraction(const ControlParams& p) {
  const double g = p.pt.gamma, l = p.pt.lambda;
  const double c = std::cos(p.theta);
  const double n_min = l * l - g * std::sqrt(g * g + c * c);
  return n_min / total_initial_population(p);
}

double min_coupling_for_fraction(const pt::PtParams& p, double r_min, double theta) {
  const double c = std::cos(theta);
  const double n_min = p.lambda * p.lambda - p.gamma * std::sqrt(p.gamma * p.gamma + c * c);
  if (!(r_min > 0.0) || !(r_min < n_min)) {
    throw UndefinedError("r_min must lie in (0, " + std::to_string(n_min) +
                         ") for this gain ratio");
  }
  return p.gamma * std::sqrt(r_min / (n_min - r_min));
}

}  // namespace ptforge::synth
