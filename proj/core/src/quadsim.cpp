#include "ptforge/quadsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptforge/errors.hpp"
#include "ptforge/ode.hpp"

namespace ptforge::quad {

namespace {

// Fourth-order finite-difference slopes on a uniform grid; 5-point one-sided
// stencils at the ends, centered in the interior.
std::vector<double> fd_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> m(n);
  const double d = 12 * h;
  m[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / d;
  m[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / d;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    m[i] = (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / d;
  }
  m[n - 2] = (3 * y[n - 1] + 10 * y[n - 2] - 18 * y[n - 3] + 6 * y[n - 4] - y[n - 5]) / d;
  m[n - 1] = (25 * y[n - 1] - 48 * y[n - 2] + 36 * y[n - 3] - 16 * y[n - 4] + 3 * y[n - 5]) / d;
  return m;
}

}  // namespace

Schedule::Schedule(const synth::ControlTrace& trace)
    : params_(trace.params), tau_(trace.tau) {
  if (tau_.size() < 5) {
    throw UndefinedError("a schedule needs at least 5 trace samples, got " +
                         std::to_string(tau_.size()));
  }
  h_ = trace.params.dtau_sample;
  const std::vector<double>* src[4] = {&trace.omega01, &trace.omega23,
                                       &trace.delta0, &trace.delta3};
  for (int c = 0; c < 4; ++c) {
    ch_[c].value = *src[c];
    ch_[c].slope = fd_slopes(*src[c], h_);
  }
}

double Schedule::eval(const Channel& ch, std::size_t i, double t) const {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ch.value[i] + (t3 - 2 * t2 + t) * h_ * ch.slope[i] +
         (-2 * t3 + 3 * t2) * ch.value[i + 1] + (t3 - t2) * h_ * ch.slope[i + 1];
}

synth::DriveTuple Schedule::drives(double tau) const {
  const double slack = 1e-9 * std::max(1.0, std::abs(tau_.back()));
  if (tau < tau_.front() - slack || tau > tau_.back() + slack) {
    throw OutOfSpanError("tau = " + std::to_string(tau) +
                         " is outside the sampled schedule [" +
                         std::to_string(tau_.front()) + ", " +
                         std::to_string(tau_.back()) + "]");
  }
  const double clamped = std::clamp(tau, tau_.front(), tau_.back());
  auto i = static_cast<std::size_t>((clamped - tau_.front()) / h_);
  i = std::min(i, tau_.size() - 2);
  const double t = (clamped - tau_[i]) / h_;
  return {eval(ch_[0], i, t), eval(ch_[1], i, t), eval(ch_[2], i, t),
          eval(ch_[3], i, t)};
}

Mat4 hamiltonian_at(const Schedule& sched, double tau) {
  const synth::DriveTuple d = sched.drives(tau);
  const double l = sched.params().pt.lambda;
  const double w03 = sched.params().omega03;
  return {d.delta0, d.omega01, 0.0,       w03,      //
          d.omega01, 0.0,      l,         0.0,      //
          0.0,       l,        0.0,       d.omega23,  //
          w03,       0.0,      d.omega23, d.delta3};
}

QuadState initial_state(const synth::ControlParams& p) {
  const synth::ReservoirInit r = synth::initial_reservoir(p);
  const pt::PtState s0 = pt::initial_state(p.theta);
  return {r.phi0, s0.psi1, s0.psi2, r.phi3};
}

EmulationReport evolve_four_level(const Schedule& sched, double tau_end,
                                  const QuadOptions& opt) {
  if (!(tau_end > 0.0)) throw UndefinedError("tau_end must be positive");
  const double slack = 1e-9 * std::max(1.0, sched.tau_end());
  if (tau_end > sched.tau_end() + slack) {
    throw OutOfSpanError("tau_end = " + std::to_string(tau_end) +
                         " exceeds the sampled schedule (" +
                         std::to_string(sched.tau_end()) + ")");
  }
  tau_end = std::min(tau_end, sched.tau_end());
  const synth::ControlParams& p = sched.params();

  // State layout: real parts of (phi0, psi1, psi2, phi3), then imaginary.
  const ode::Rhs rhs = [&sched, &p](double tau, std::span<const double> y,
                                    std::span<double> dydt) {
    const synth::DriveTuple d = sched.drives(tau);
    const double l = p.pt.lambda, w03 = p.omega03;
    const auto apply_h = [&](std::span<const double> x, std::span<double> out) {
      out[0] = d.delta0 * x[0] + d.omega01 * x[1] + w03 * x[3];
      out[1] = d.omega01 * x[0] + l * x[2];
      out[2] = l * x[1] + d.omega23 * x[3];
      out[3] = w03 * x[0] + d.omega23 * x[2] + d.delta3 * x[3];
    };
    apply_h(y.subspan(4, 4), dydt.subspan(0, 4));  // du = +H v / 2
    for (int i = 0; i < 4; ++i) dydt[i] *= 0.5;
    apply_h(y.subspan(0, 4), dydt.subspan(4, 4));  // dv = -H u / 2
    for (int i = 4; i < 8; ++i) dydt[i] *= -0.5;
  };

  const QuadState s0 = initial_state(p);
  ode::Options oopt;
  oopt.abs_tol = opt.abs_tol;
  oopt.rel_tol = opt.rel_tol;
  ode::Dopri5 solver(rhs, 0.0,
                     {s0.phi0.real(), s0.psi1.real(), s0.psi2.real(), s0.phi3.real(),
                      s0.phi0.imag(), s0.psi1.imag(), s0.psi2.imag(), s0.phi3.imag()},
                     oopt);

  EmulationReport rep;
  const double n0 = std::norm(s0.phi0) + std::norm(s0.psi1) + std::norm(s0.psi2) +
                    std::norm(s0.phi3);
  rep.pt_fraction_min = 1e300;

  const auto record = [&](double tau, const double y[8]) {
    const std::complex<double> phi0{y[0], y[4]}, psi1{y[1], y[5]}, psi2{y[2], y[6]},
        phi3{y[3], y[7]};
    EmulationSample smp;
    smp.tau = tau;
    smp.p0 = std::norm(phi0);
    smp.p1 = std::norm(psi1);
    smp.p2 = std::norm(psi2);
    smp.p3 = std::norm(phi3);
    const pt::PtState exact = pt::evolve(p.pt, p.theta, tau);
    smp.emulation_error =
        std::max(std::abs(psi1 - exact.psi1), std::abs(psi2 - exact.psi2));
    const synth::DriveTuple d = sched.drives(tau);
    const std::complex<double> i_gamma{0.0, p.pt.gamma};
    smp.constraint_residual = std::max(std::abs(d.omega01 * phi0 + i_gamma * psi1),
                                       std::abs(d.omega23 * phi3 - i_gamma * psi2));
    const double total = smp.p0 + smp.p1 + smp.p2 + smp.p3;
    smp.norm_drift = total / n0 - 1.0;
    rep.max_emulation_error = std::max(rep.max_emulation_error, smp.emulation_error);
    rep.max_constraint_residual =
        std::max(rep.max_constraint_residual, smp.constraint_residual);
    rep.max_norm_drift = std::max(rep.max_norm_drift, std::abs(smp.norm_drift));
    rep.pt_fraction_min = std::min(rep.pt_fraction_min, (smp.p1 + smp.p2) / total);
    rep.samples.push_back(smp);
  };

  {
    double y0[8] = {s0.phi0.real(), s0.psi1.real(), s0.psi2.real(), s0.phi3.real(),
                    s0.phi0.imag(), s0.psi1.imag(), s0.psi2.imag(), s0.phi3.imag()};
    record(0.0, y0);
  }

  const double h = p.dtau_sample;
  std::size_t next = 1;
  while (solver.tau() < tau_end) {
    const ode::StepStatus st = solver.step(tau_end);
    if (st != ode::StepStatus::kAdvanced) {
      throw NonFiniteError("four-level integration stalled at tau = " +
                           std::to_string(solver.tau()));
    }
    // Allow one ulp of slack so grid times coinciding with the endpoint are
    // not dropped by rounding in k * h.
    const double slack = 1e-9 * std::max(1.0, solver.tau());
    while (true) {
      const double tk = static_cast<double>(next) * h;
      if (tk > solver.tau() + slack || tk > tau_end + slack) break;
      double y[8];
      solver.dense(tk, y);
      record(tk, y);
      ++next;
    }
  }

  const auto s = solver.state();
  rep.final_state = {{s[0], s[4]}, {s[1], s[5]}, {s[2], s[6]}, {s[3], s[7]}};
  return rep;
}

}  // namespace ptforge::quad
