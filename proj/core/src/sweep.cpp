#include "ptforge/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptforge/errors.hpp"
#include "ptforge/parallel.hpp"

namespace ptforge::sweep {

const char* to_string(OrbitVerdict v) {
  switch (v) {
    case OrbitVerdict::kUnbounded: return "Unbounded";
    case OrbitVerdict::kSingleClosedOrbit: return "SingleClosedOrbit";
    case OrbitVerdict::kTransientThenOrbit: return "TransientThenOrbit";
    case OrbitVerdict::kUnclassified: return "Unclassified";
  }
  return "Unknown";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t resolve_workers(const SweepOptions& opt) {
  return opt.workers != 0 ? opt.workers : parallel::worker_count();
}

// One full synthesis run; the heavy kernel every sweep repeats.
synth::ControlTrace run_point(double gamma_ratio, double omega_init_over_lambda,
                              double omega03_over_lambda, const SweepOptions& opt,
                              double horizon) {
  synth::ControlParams p = make_params(gamma_ratio, omega_init_over_lambda,
                                       omega03_over_lambda, opt);
  p.horizon = horizon;
  return synth::integrate_controls(p);
}

bool survives(double gamma_ratio, double omega_init_over_lambda,
              double omega03_over_lambda, const SweepOptions& opt) {
  const synth::ControlTrace trace =
      run_point(gamma_ratio, omega_init_over_lambda, omega03_over_lambda, opt,
                opt.horizon);
  return trace.verdict != synth::Verdict::kTerminated;
}

}  // namespace

synth::ControlParams make_params(double gamma_ratio, double omega_init_over_lambda,
                                 double omega03_over_lambda,
                                 const SweepOptions& opt) {
  synth::ControlParams p;
  p.pt = pt::params_from_ratio(gamma_ratio);
  p.theta = opt.theta;
  p.omega_init = omega_init_over_lambda * p.pt.lambda;
  p.omega03 = omega03_over_lambda * p.pt.lambda;
  p.horizon = opt.horizon;
  p.dtau_sample = opt.dtau_sample;
  p.abs_tol = opt.abs_tol;
  p.rel_tol = opt.rel_tol;
  p.omega_cap = opt.omega_cap;
  p.drift_tol = opt.drift_tol;
  return p;
}

std::vector<BreakdownPoint> scan_breakdown(std::span<const double> gamma_ratios,
                                           std::span<const double> omega_init_over_lambda,
                                           double omega03_over_lambda,
                                           const SweepOptions& opt) {
  const std::size_t n_gamma = gamma_ratios.size();
  const std::size_t n_omega = omega_init_over_lambda.size();
  std::vector<BreakdownPoint> points(n_gamma * n_omega);
  parallel::parallel_for(points.size(), resolve_workers(opt), [&](std::size_t i) {
    const double g = gamma_ratios[i / n_omega];
    const double w = omega_init_over_lambda[i % n_omega];
    points[i].gamma_ratio = g;
    points[i].omega_init_over_lambda = w;
    points[i].omega03_over_lambda = omega03_over_lambda;
    try {
      const synth::ControlTrace trace =
          run_point(g, w, omega03_over_lambda, opt, opt.horizon);
      points[i].verdict = trace.verdict;
      points[i].tau_star = trace.tau_star;
    } catch (const Error& e) {
      points[i].note = e.what();
    }
  });
  return points;
}

double critical_recycling(double gamma_ratio, double omega_init_over_lambda,
                          const SweepOptions& opt) {
  if (survives(gamma_ratio, omega_init_over_lambda, 0.0, opt)) {
    throw NoBracketError("emulation already survives the horizon without recycling");
  }
  // Grow an upper bracket from a small seed; the threshold is typically a few
  // percent of the inner coupling.  The last probe lands exactly on the search
  // cap so a threshold just inside it is still found.
  double lo = 0.0;
  double hi = 0.05;
  while (!survives(gamma_ratio, omega_init_over_lambda, hi, opt)) {
    lo = hi;
    if (hi >= opt.omega03_search_max) {
      throw NoBracketError("no recycling strength up to the search cap survives the horizon");
    }
    hi = std::min(hi * 2.0, opt.omega03_search_max);
  }
  while (hi - lo > opt.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    (survives(gamma_ratio, omega_init_over_lambda, mid, opt) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

BoundaryCurve boundary_curve(double gamma_ratio,
                             std::span<const double> omega_init_over_lambda,
                             const SweepOptions& opt) {
  BoundaryCurve curve;
  curve.gamma_ratio = gamma_ratio;
  curve.omega_init_over_lambda.assign(omega_init_over_lambda.begin(),
                                      omega_init_over_lambda.end());
  curve.omega03_critical_over_lambda.resize(omega_init_over_lambda.size());
  curve.notes.resize(omega_init_over_lambda.size());
  // Each bisection is itself serial; parallelism goes across grid points, so
  // the inner runs stay single-worker.
  SweepOptions inner = opt;
  inner.workers = 1;
  parallel::parallel_for(
      omega_init_over_lambda.size(), resolve_workers(opt), [&](std::size_t i) {
        try {
          curve.omega03_critical_over_lambda[i] =
              critical_recycling(gamma_ratio, omega_init_over_lambda[i], inner);
        } catch (const NoBracketError& e) {
          curve.omega03_critical_over_lambda[i] = kNaN;
          curve.notes[i] = e.what();
        }
      });
  return curve;
}

FeasibilityResult assess_feasibility(double gamma_ratio,
                                     const FeasibilityQuery& query,
                                     const SweepOptions& opt) {
  FeasibilityResult result;
  result.gamma_ratio = gamma_ratio;
  const pt::PtParams pt_params = pt::params_from_ratio(gamma_ratio);
  const double omega_min =
      synth::min_coupling_for_fraction(pt_params, query.r_min, opt.theta);
  result.omega_init_min_over_lambda = omega_min / pt_params.lambda;
  // The weakest admissible coupling postpones breakdown the longest and the
  // recycling cap fights it hardest, so this corner decides feasibility.
  const synth::ControlTrace trace =
      run_point(gamma_ratio, result.omega_init_min_over_lambda,
                query.omega03_max_over_lambda, opt, query.tau_required);
  result.feasible = trace.verdict != synth::Verdict::kTerminated;
  result.corner_tau_star = trace.tau_star;
  return result;
}

std::vector<FeasibilityResult> feasibility_map(std::span<const double> gamma_ratios,
                                               const FeasibilityQuery& query,
                                               const SweepOptions& opt) {
  std::vector<FeasibilityResult> results(gamma_ratios.size());
  SweepOptions inner = opt;
  inner.workers = 1;
  parallel::parallel_for(gamma_ratios.size(), resolve_workers(opt), [&](std::size_t i) {
    results[i] = assess_feasibility(gamma_ratios[i], query, inner);
  });
  return results;
}

double no_recycling_max_gamma_ratio(double tau_required, double r_min) {
  if (!(tau_required > 0.0) || !(r_min > 0.0) || !(r_min < 1.0)) {
    throw UndefinedError("no_recycling_max_gamma_ratio needs tau_required > 0 and r_min in (0, 1)");
  }
  // At theta = pi/2 the fraction bound pins the coupling to k*gamma with
  // k = sqrt(r/(1-r)), and the weak-coupling breakdown estimate becomes
  // tau* = (1 - k^2 gamma^2) / (k^2 gamma (1 + gamma^2)), strictly
  // decreasing on gamma in (0, 1/k).  Bisect for the crossing.
  const double k2 = r_min / (1.0 - r_min);
  auto tau_star = [k2](double gamma) {
    return (1.0 - k2 * gamma * gamma) / (k2 * gamma * (1.0 + gamma * gamma));
  };
  double lo = 0.0;                      // tau* -> infinity
  double hi = 1.0 / std::sqrt(k2);      // tau* = 0
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (tau_star(mid) > tau_required ? lo : hi) = mid;
  }
  const double gamma = 0.5 * (lo + hi);
  return gamma / std::sqrt(1.0 + gamma * gamma);  // back to gamma/lambda
}

double max_gamma_ratio_with_recycling(const FeasibilityQuery& query,
                                      const SweepOptions& opt) {
  double lo = 0.5;
  double hi = 0.99;
  if (!assess_feasibility(lo, query, opt).feasible) {
    throw NoBracketError("lower endpoint of the gain-ratio bracket is already infeasible");
  }
  if (assess_feasibility(hi, query, opt).feasible) {
    throw NoBracketError("upper endpoint of the gain-ratio bracket is still feasible");
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (assess_feasibility(mid, query, opt).feasible ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<DetuningRange> detuning_ranges(double gamma_ratio,
                                           double omega_init_over_lambda,
                                           std::span<const double> omega03_over_lambda,
                                           const SweepOptions& opt) {
  std::vector<DetuningRange> ranges(omega03_over_lambda.size());
  parallel::parallel_for(ranges.size(), resolve_workers(opt), [&](std::size_t i) {
    DetuningRange& r = ranges[i];
    r.omega03_over_lambda = omega03_over_lambda[i];
    const synth::ControlTrace trace = run_point(
        gamma_ratio, omega_init_over_lambda, r.omega03_over_lambda, opt, opt.horizon);
    r.verdict = trace.verdict;
    if (trace.verdict == synth::Verdict::kTerminated) {
      r.delta0_min = r.delta0_max = r.delta0_span = kNaN;
      r.delta3_min = r.delta3_max = r.delta3_span = kNaN;
      return;
    }
    const double tau_settle = opt.transient_fraction * opt.horizon;
    double d0_min = std::numeric_limits<double>::infinity(), d0_max = -d0_min;
    double d3_min = d0_min, d3_max = -d0_min;
    for (std::size_t k = 0; k < trace.tau.size(); ++k) {
      if (trace.tau[k] < tau_settle) continue;
      d0_min = std::min(d0_min, trace.delta0[k]);
      d0_max = std::max(d0_max, trace.delta0[k]);
      d3_min = std::min(d3_min, trace.delta3[k]);
      d3_max = std::max(d3_max, trace.delta3[k]);
    }
    r.delta0_min = d0_min;
    r.delta0_max = d0_max;
    r.delta0_span = d0_max - d0_min;
    r.delta3_min = d3_min;
    r.delta3_max = d3_max;
    r.delta3_span = d3_max - d3_min;
  });
  return ranges;
}

OrbitTrace orbit_trace(double gamma_ratio, double omega_init_over_lambda,
                       double omega03_over_lambda, const SweepOptions& opt) {
  const synth::ControlTrace trace = run_point(
      gamma_ratio, omega_init_over_lambda, omega03_over_lambda, opt, opt.horizon);
  OrbitTrace orbit;
  orbit.tau = trace.tau;
  orbit.omega01 = trace.omega01;
  orbit.omega23 = trace.omega23;
  if (trace.verdict == synth::Verdict::kTerminated) {
    orbit.verdict = OrbitVerdict::kUnbounded;
    orbit.initial_return_distance = kNaN;
    orbit.final_return_distance = kNaN;
    orbit.closure_tolerance = kNaN;
    return orbit;
  }
  // One-period return map in the coupling plane: distance between each sample
  // and the sample one base period (2 pi) later.
  const std::size_t win =
      static_cast<std::size_t>(std::llround(2 * pt::kPi / opt.dtau_sample));
  const std::size_t n = trace.tau.size();
  if (n < 2 * win + 1) {
    throw UndefinedError("orbit_trace needs a horizon of at least two base periods");
  }
  auto return_distance = [&](std::size_t k) {
    return std::hypot(trace.omega01[k + win] - trace.omega01[k],
                      trace.omega23[k + win] - trace.omega23[k]);
  };
  double omega_scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    omega_scale = std::max(omega_scale,
                           std::max(std::abs(trace.omega01[k]), std::abs(trace.omega23[k])));
  }
  orbit.closure_tolerance = 1e-4 * omega_scale;
  orbit.initial_return_distance = return_distance(0);
  double tail = 0.0;
  for (std::size_t k = n - 2 * win; k + win < n; ++k) {
    tail = std::max(tail, return_distance(k));
  }
  orbit.final_return_distance = tail;
  if (tail < orbit.closure_tolerance) {
    orbit.verdict = orbit.initial_return_distance < orbit.closure_tolerance
                        ? OrbitVerdict::kSingleClosedOrbit
                        : OrbitVerdict::kTransientThenOrbit;
  } else {
    orbit.verdict = OrbitVerdict::kUnclassified;
  }
  return orbit;
}

}  // namespace ptforge::sweep
