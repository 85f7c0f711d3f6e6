// Acceptance harness: one line per release criterion, pass or fail, with the
// measured numbers next to the pinned gates.  Exits nonzero when anything
// fails.  Runs the real product paths (no shortcuts through test seams), so
// the whole battery doubles as an end-to-end exercise of the library.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "ptforge/ptcore.hpp"
#include "ptforge/quadsim.hpp"
#include "ptforge/sweep.hpp"
#include "ptforge/synth.hpp"

using namespace ptforge;

namespace {

constexpr double kPi = pt::kPi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void verdict(int index, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", index, name,
              detail.c_str());
  if (!pass) ++g_failures;
}

void note(const std::string& text) {
  std::printf("          %s\n", text.c_str());
}

// Measurements shared across criteria so later ones can gate on what the
// earlier product runs actually produced.
struct Shared {
  double critical = kNaN;      // recycling threshold at the reference point
  double min_coupling = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;   // worst embedding-constraint residual seen
  double band_excess = kNaN;   // detuning-band violation of the long clean run
};

void track_positivity(Shared& sh, const synth::ControlTrace& trace) {
  for (double w : trace.omega01) sh.min_coupling = std::min(sh.min_coupling, w);
  for (double w : trace.omega23) sh.min_coupling = std::min(sh.min_coupling, w);
}

synth::ControlParams reference_point(double omega03_over_lambda = 0.0) {
  synth::ControlParams p;
  p.pt = pt::params_from_ratio(0.5);
  p.omega_init = 0.05 * p.pt.lambda;
  p.omega03 = omega03_over_lambda * p.pt.lambda;
  return p;
}

// 1. The numerically synthesized drives must match their closed forms while
//    the closed forms exist: relative error <= 1e-6 up to 0.95 tau*.
void criterion_drive_match(Shared& sh) {
  constexpr double kGate = 1e-6;
  const double ratios[] = {0.2, 0.5, 0.8};
  const double omegas[] = {0.02, 0.05, 0.1};
  double worst = 0.0;
  for (double g : ratios) {
    for (double w : omegas) {
      synth::ControlParams p;
      p.pt = pt::params_from_ratio(g);
      p.omega_init = w * p.pt.lambda;
      p.horizon = 0.95 * synth::analytic_breakdown_time(p);
      const auto trace = synth::integrate_controls(p);
      track_positivity(sh, trace);
      for (std::size_t i = 0; i < trace.tau.size(); ++i) {
        const auto ref = synth::analytic_controls(p, trace.tau[i]);
        const double errs[] = {
            std::abs(trace.omega23[i] - ref.omega23) / std::abs(ref.omega23),
            std::abs(trace.delta0[i] - ref.delta0) / std::abs(ref.delta0),
            std::abs(trace.delta3[i] - ref.delta3) / std::abs(ref.delta3)};
        worst = std::max({worst, errs[0], errs[1], errs[2]});
      }
    }
  }
  verdict(1, "synthesized drives match their closed forms", worst <= kGate,
          fmt("max relative error %.2e across 9 gain/coupling combinations up "
              "to 0.95 tau* (gate %.0e)",
              worst, kGate));
}

// 2. Breakdown location at the reference point: the event-detected divergence
//    agrees with the closed-form root, and both sit at 41.09 pi to 0.5%.
void criterion_breakdown_location() {
  constexpr double kAgreeGate = 1e-4;
  constexpr double kQuoted = 41.09;  // in units of pi
  constexpr double kQuotedGate = 5e-3;
  const auto p = reference_point();
  const double exact = synth::analytic_breakdown_time(p);
  const double detected = synth::breakdown_time(p).value_or(kNaN);
  const double agree = std::abs(detected - exact) / exact;
  const double quoted_dev = std::abs(exact / kPi - kQuoted) / kQuoted;
  verdict(2, "breakdown sits at the documented location",
          agree <= kAgreeGate && quoted_dev <= kQuotedGate,
          fmt("closed-form root %.6f pi, event-detected %.6f pi (relative gap "
              "%.1e, gate %.0e); %.2f%% from the quoted 41.09 pi (gate 0.5%%)",
              exact / kPi, detected / kPi, agree, kAgreeGate,
              100 * quoted_dev));
}

// 3. The two asymptotic breakdown estimates bracket their regimes: the
//    weak-coupling form within 2% for omega/lambda <= 0.05, the
//    strong-coupling form within 10% once omega is comfortably past lambda.
void criterion_breakdown_estimates() {
  constexpr double kWeakGate = 0.02;
  constexpr double kStrongGate = 0.10;
  const auto pt_half = pt::params_from_ratio(0.5);

  double worst_weak = 0.0;
  for (double w : {0.01, 0.02, 0.05}) {
    synth::ControlParams p;
    p.pt = pt_half;
    p.omega_init = w * p.pt.lambda;
    const double exact = synth::analytic_breakdown_time(p);
    const double est = synth::breakdown_approx(p, synth::CouplingRegime::kWeak);
    worst_weak = std::max(worst_weak, std::abs(est - exact) / exact);
  }

  auto strong_error = [&](double omega_abs) {
    synth::ControlParams p;
    p.pt = pt_half;
    p.omega_init = omega_abs;
    const double exact = synth::analytic_breakdown_time(p);
    const double est =
        synth::breakdown_approx(p, synth::CouplingRegime::kStrong);
    return std::abs(est - exact) / exact;
  };
  double worst_strong = 0.0;
  for (double omega : {1.5, 2.0, 3.0, 5.0})
    worst_strong = std::max(worst_strong, strong_error(omega));

  verdict(3, "asymptotic breakdown estimates hold in their regimes",
          worst_weak <= kWeakGate && worst_strong <= kStrongGate,
          fmt("weak-coupling error %.2f%% for omega/lambda <= 0.05 (gate 2%%); "
              "strong-coupling error %.2f%% for omega in [1.5, 5] (gate 10%%)",
              100 * worst_weak, 100 * worst_strong));
  note(fmt("the strong estimate is asymptotic: %.1f%% off at omega = 1.0 and "
           "inside the 10%% band from omega ~ 1.3 upward",
           100 * strong_error(1.0)));
}

// 4. The perpetual-emulation threshold at the reference point lands within 5%
//    of the documented 0.01412 lambda.
void criterion_recycling_threshold(Shared& sh) {
  constexpr double kQuoted = 0.01412;
  constexpr double kGate = 0.05;
  sh.critical = sweep::critical_recycling(0.5, 0.05);
  const double dev = (sh.critical - kQuoted) / kQuoted;
  verdict(4, "perpetual-emulation threshold is reproduced",
          std::abs(dev) <= kGate,
          fmt("bisection gives %.6f lambda vs the quoted 0.01412 lambda "
              "(%+.1f%%, gate +-5%%)",
              sh.critical, 100 * dev));
  note(fmt("the tenfold value 0.1412 lambda that also circulates is a factor "
           "%.1f above the computed threshold",
           0.1412 / sh.critical));
}

// 5. Inner-pair population fraction: closed form 1/101 at gamma/omega = 10,
//    reproduced by the verified four-level run and invariant under recycling.
void criterion_population_fraction(Shared& sh) {
  constexpr double kGate = 1e-6;
  const double closed = 1.0 / 101.0;
  auto p = reference_point();
  p.omega_init = p.pt.gamma / 10.0;

  const double predicted = synth::pt_fraction(p);
  double worst = std::abs(predicted - closed);
  std::string measured;
  for (double w03 : {0.0, sh.critical, 2 * sh.critical}) {
    auto run = p;
    run.omega03 = w03 * run.pt.lambda;
    run.horizon = 8 * kPi;
    run.abs_tol = run.rel_tol = 1e-12;
    const auto trace = synth::integrate_controls(run);
    track_positivity(sh, trace);
    const quad::Schedule sched(trace);
    const auto rep = quad::evolve_four_level(sched, sched.tau_end());
    sh.max_residual = std::max(sh.max_residual, rep.max_constraint_residual);
    worst = std::max(worst, std::abs(rep.pt_fraction_min - closed));
    measured += fmt("%s%.9f", measured.empty() ? "" : ", ", rep.pt_fraction_min);
  }
  verdict(5, "inner-pair population fraction", worst <= kGate,
          fmt("closed form 1/101 = %.9f; four-level runs measure {%s} across "
              "recycling {0, critical, 2x critical} (max deviation %.1e, gate "
              "%.0e)",
              closed, measured.c_str(), worst, kGate));
}

// 6. End-to-end embedding: the four-level integration under the synthesized
//    schedule reproduces the two-level amplitudes to 1e-6, both on a clean
//    run to 0.9 tau* and across ten periods with recycling, with norm drift
//    below 1e-9 per 100 pi.
void criterion_embedding(Shared& sh) {
  constexpr double kAmpGate = 1e-6;
  constexpr double kDriftGate = 1e-9;  // per 100 pi of evolution

  struct Leg {
    const char* label;
    double omega03_over_lambda;
    double horizon;
  };
  auto p0 = reference_point();
  const Leg legs[] = {
      {"to 0.9 tau*", 0.0, 0.9 * synth::analytic_breakdown_time(p0)},
      {"10 periods recycled", 2 * sh.critical, 20 * kPi},
  };

  bool pass = true;
  std::string detail;
  for (const Leg& leg : legs) {
    auto p = reference_point(leg.omega03_over_lambda);
    p.horizon = leg.horizon;
    p.abs_tol = p.rel_tol = 1e-12;
    const auto trace = synth::integrate_controls(p);
    track_positivity(sh, trace);
    if (leg.omega03_over_lambda == 0.0) {
      const double lo = p.pt.lambda - p.pt.gamma;
      const double hi = p.pt.lambda + p.pt.gamma;
      double excess = 0.0;
      for (std::size_t i = 0; i < trace.tau.size(); ++i) {
        excess = std::max({excess, trace.delta0[i] - hi, lo - trace.delta0[i],
                           trace.delta3[i] - hi, lo - trace.delta3[i]});
      }
      sh.band_excess = excess;
    }
    const quad::Schedule sched(trace);
    const auto rep = quad::evolve_four_level(sched, sched.tau_end());
    sh.max_residual = std::max(sh.max_residual, rep.max_constraint_residual);
    const double drift_rate = rep.max_norm_drift / (leg.horizon / (100 * kPi));
    pass = pass && rep.max_emulation_error <= kAmpGate &&
           drift_rate <= kDriftGate;
    detail += fmt("%s%s: amplitude error %.1e, norm drift %.1e/100pi",
                  detail.empty() ? "" : "; ", leg.label,
                  rep.max_emulation_error, drift_rate);
  }
  verdict(6, "four-level run reproduces the two-level amplitudes", pass,
          detail + fmt(" (gates %.0e and %.0e)", kAmpGate, kDriftGate));
}

// 7. Detunings: both stay inside [lambda - gamma, lambda + gamma] without
//    recycling; the analytic sink-detuning span equals 2 gamma; the source
//    span stays within 10% of 2 gamma across the documented recycling grid.
void criterion_detuning_ranges(Shared& sh) {
  constexpr double kBandGate = 1e-9;
  constexpr double kLimitGate = 1e-6;
  constexpr double kSpanGate = 0.10;
  const auto p = reference_point();
  const double two_gamma = 2 * p.pt.gamma;

  // Closed-form span over one full period (the grid hits the extrema at
  // tau = pi/2 and 3 pi/2 exactly).
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = 0; k <= 4000; ++k) {
    const double tau = 2 * kPi * (k / 4000.0);
    const auto d = synth::analytic_controls(p, tau);
    lo = std::min(lo, d.delta0);
    hi = std::max(hi, d.delta0);
  }
  const double limit_dev = std::abs((hi - lo) - two_gamma);

  const double grid[] = {0.02, 0.03, 0.05, 0.08, 0.1, 0.2};
  sweep::SweepOptions opt;
  opt.horizon = 100 * kPi;
  const auto ranges = sweep::detuning_ranges(0.5, 0.05, grid, opt);
  double worst_span = 0.0;
  bool all_steady = true;
  for (const auto& r : ranges) {
    all_steady = all_steady && r.verdict != synth::Verdict::kTerminated;
    worst_span =
        std::max(worst_span, std::abs(r.delta3_span - two_gamma) / two_gamma);
  }

  verdict(7, "detuning ranges",
          sh.band_excess <= kBandGate && limit_dev <= kLimitGate &&
              all_steady && worst_span <= kSpanGate,
          fmt("band excursion %.1e beyond [lambda-gamma, lambda+gamma] on the "
              "clean run (gate %.0e); analytic sink span off 2 gamma by %.1e "
              "(gate %.0e); source span within %.2f%% of 2 gamma across the "
              "recycling grid (gate 10%%)",
              sh.band_excess, kBandGate, limit_dev, kLimitGate,
              100 * worst_span));
  note(fmt("steady sink spans grow with recycling: %.4f at omega03 = 0.02 "
           "lambda up to %.4f at 0.2 lambda (2 gamma = %.4f)",
           ranges.front().delta0_span, ranges.back().delta0_span, two_gamma));
}

// 8. Feasibility of a 10 pi emulation holding at least a tenth of the
//    population in the inner pair with recycling capped at 2 lambda.  The
//    quoted boundary 0.875 is itself the rounded edge of the region, so it is
//    gated as a boundary location (same +-0.005 style as the no-recycling
//    maximum) and the verdict exactly at that point is reported as measured.
void criterion_feasibility() {
  constexpr double kQuotedNoRecycle = 0.257;
  constexpr double kQuotedWithRecycle = 0.875;
  constexpr double kBoundaryGate = 0.005;
  const sweep::FeasibilityQuery query;  // 10 pi, 0.1, cap 2 lambda

  bool pass = true;
  std::string verdicts;
  for (double g : {0.5, 0.85}) {
    const auto r = sweep::assess_feasibility(g, query);
    pass = pass && r.feasible;
    verdicts += fmt("%s%.3f %s", verdicts.empty() ? "" : ", ", g,
                    r.feasible ? "feasible" : "INFEASIBLE");
  }
  const auto knife = sweep::assess_feasibility(kQuotedWithRecycle, query);
  verdicts += fmt(", 0.875 %s", knife.feasible ? "feasible" : "infeasible");
  const auto r9 = sweep::assess_feasibility(0.9, query);
  pass = pass && !r9.feasible;
  verdicts += fmt(", 0.900 %s", r9.feasible ? "FEASIBLE" : "infeasible");

  const double no_recycle =
      sweep::no_recycling_max_gamma_ratio(query.tau_required, query.r_min);
  pass = pass && std::abs(no_recycle - kQuotedNoRecycle) <= kBoundaryGate;

  const double with_recycle = sweep::max_gamma_ratio_with_recycling(query);
  pass = pass &&
         std::abs(with_recycle - kQuotedWithRecycle) <= kBoundaryGate;

  verdict(8, "feasibility region", pass,
          fmt("gain ratios {%s}; no-recycling maximum %.5f (quoted 0.257 "
              "+-0.005); with recycling the boundary sits at %.5f (quoted "
              "0.875 +-0.005)",
              verdicts.c_str(), no_recycle, with_recycle));

  sweep::SweepOptions wide;
  wide.omega03_search_max = 2.5;
  wide.horizon = query.tau_required;
  const double needed = sweep::critical_recycling(
      kQuotedWithRecycle, knife.omega_init_min_over_lambda, wide);
  note(fmt("the point 0.875 itself is a knife edge %.1e above the computed "
           "boundary: its corner needs recycling %.4f lambda, %.2f%% over the "
           "2 lambda budget, so it classifies %s here",
           kQuotedWithRecycle - with_recycle, needed,
           100 * (needed - 2.0) / 2.0,
           knife.feasible ? "feasible" : "infeasible"));
}

// 9. Structural properties: exact two-level identities, coupling positivity,
//    embedding residuals, the inverse-square breakdown law, and bitwise
//    determinism of parallel sweeps.
void criterion_properties(const Shared& sh) {
  constexpr double kIdentityGate = 1e-12;
  constexpr double kEllipseGate = 1e-11;  // relative to max(1, gamma^4)
  constexpr double kResidualGate = 1e-9;
  constexpr double kSlopeGate = 0.05;

  double worst_identity = 0.0;
  double worst_ellipse = 0.0;
  for (double g : {0.0, 0.3, 0.7, 0.95}) {
    const auto p = pt::params_from_ratio(g);
    worst_identity = std::max(
        worst_identity, std::abs(p.lambda * p.lambda - p.gamma * p.gamma - 1));
    for (double tau1 : {0.3, 1.7, 5.1}) {
      const auto u1 = pt::propagator(p, tau1);
      worst_identity = std::max(
          worst_identity, std::abs(u1.a * u1.d - u1.b * u1.c - 1.0));
      for (double tau2 : {0.4, 2.9}) {
        const auto u2 = pt::propagator(p, tau2);
        const auto u12 = pt::propagator(p, tau1 + tau2);
        const pt::Mat2 prod{u2.a * u1.a + u2.b * u1.c,
                            u2.a * u1.b + u2.b * u1.d,
                            u2.c * u1.a + u2.d * u1.c,
                            u2.c * u1.b + u2.d * u1.d};
        worst_identity = std::max(
            {worst_identity, std::abs(u12.a - prod.a), std::abs(u12.b - prod.b),
             std::abs(u12.c - prod.c), std::abs(u12.d - prod.d)});
      }
    }
    // The norm/imbalance trajectory traces the ellipse
    // (n - 1 - gamma^2)^2 + gamma^2 w^2 = gamma^4 at theta = pi/2.
    const double g4 = std::pow(p.gamma, 4);
    for (int k = 0; k < 64; ++k) {
      const double tau = 4 * kPi * k / 64.0;
      const auto obs = pt::observables(pt::evolve(p, kPi / 2, tau));
      const double lhs = std::pow(obs.norm - 1 - p.gamma * p.gamma, 2) +
                         p.gamma * p.gamma * obs.imbalance * obs.imbalance;
      worst_ellipse =
          std::max(worst_ellipse, std::abs(lhs - g4) / std::max(1.0, g4));
    }
  }

  // Breakdown time falls as the inverse square of the starting coupling.
  const double ws[] = {0.01, 0.014953487812212205, 0.022360679774997897,
                       0.03343701524884855, 0.05};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(std::size(ws));
  for (double w : ws) {
    auto p = reference_point();
    p.omega_init = w * p.pt.lambda;
    p.horizon = 1.35 * synth::breakdown_approx(p, synth::CouplingRegime::kWeak);
    const double x = std::log(w);
    const double y = std::log(synth::breakdown_time(p).value());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  // Grid sweeps must not depend on how work lands on threads.
  const double ratios[] = {0.3, 0.5};
  const double omegas[] = {0.05, 0.1};
  sweep::SweepOptions serial, wide;
  serial.workers = 1;
  wide.workers = 4;
  const auto a = sweep::scan_breakdown(ratios, omegas, 0.0, serial);
  const auto b = sweep::scan_breakdown(ratios, omegas, 0.0, wide);
  bool deterministic = a.size() == b.size();
  for (std::size_t i = 0; deterministic && i < a.size(); ++i) {
    const double ta = a[i].tau_star.value_or(kNaN);
    const double tb = b[i].tau_star.value_or(kNaN);
    deterministic = a[i].verdict == b[i].verdict &&
                    std::memcmp(&ta, &tb, sizeof ta) == 0;
  }

  verdict(9, "structural properties",
          worst_identity <= kIdentityGate && worst_ellipse <= kEllipseGate &&
              sh.min_coupling > 0 && sh.max_residual <= kResidualGate &&
              std::abs(slope + 2) <= kSlopeGate && deterministic,
          fmt("propagator/normalization/orbit identities hold to %.1e and "
              "%.1e (gates %.0e, %.0e); couplings stay positive (min %.2e); "
              "embedding residual %.1e (gate %.0e); breakdown slope %.4f vs "
              "-2 (gate +-0.05); sweeps bitwise-identical on 1 and 4 workers",
              worst_identity, worst_ellipse, kIdentityGate, kEllipseGate,
              sh.min_coupling, sh.max_residual, kResidualGate, slope));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  Shared sh;
  criterion_drive_match(sh);
  criterion_breakdown_location();
  criterion_breakdown_estimates();
  criterion_recycling_threshold(sh);
  criterion_population_fraction(sh);
  criterion_embedding(sh);
  criterion_detuning_ranges(sh);
  criterion_feasibility();
  criterion_properties(sh);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("%d/9 criteria passed in %.1f s\n", 9 - g_failures, seconds);
  return g_failures == 0 ? 0 : 1;
}
