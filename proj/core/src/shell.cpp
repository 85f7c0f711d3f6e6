#include "ptforge/shell.hpp"

#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "ptforge/errors.hpp"
#include "ptforge/ptcore.hpp"
#include "ptforge/quadsim.hpp"
#include "ptforge/sweep.hpp"
#include "ptforge/synth.hpp"

namespace ptforge::shell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// The resolved configuration, echoed in a form parse_config reads back.
MetaBlock config_echo(const RunConfig& cfg) {
  return {
      {"gamma-ratio", meta(cfg.gamma_ratio)},
      {"theta", meta(cfg.theta)},
      {"omega-init-over-lambda", meta(cfg.omega_init_over_lambda)},
      {"omega03-over-lambda", meta(cfg.omega03_over_lambda)},
      {"horizon-tau", meta(cfg.horizon_tau)},
      {"dtau-sample", meta(cfg.dtau_sample)},
      {"abs-tol", meta(cfg.abs_tol)},
      {"rel-tol", meta(cfg.rel_tol)},
      {"omega-cap", meta(cfg.omega_cap)},
      {"drift-tol", meta(cfg.drift_tol)},
      {"quad-abs-tol", meta(cfg.quad_abs_tol)},
      {"quad-rel-tol", meta(cfg.quad_rel_tol)},
      {"bisect-tol", meta(cfg.bisect_tol)},
      {"omega03-search-max", meta(cfg.omega03_search_max)},
      {"transient-fraction", meta(cfg.transient_fraction)},
      {"tau-required", meta(cfg.tau_required)},
      {"r-min", meta(cfg.r_min)},
      {"omega03-max-over-lambda", meta(cfg.omega03_max_over_lambda)},
      {"gamma-ratio-grid", meta(cfg.gamma_ratio_grid)},
      {"omega-init-grid", meta(cfg.omega_init_grid)},
      {"omega03-grid", meta(cfg.omega03_grid)},
      {"workers", meta(static_cast<std::int64_t>(cfg.workers))},
      {"out", meta(cfg.out)},
      {"format", meta(cfg.format)},
  };
}

sweep::SweepOptions sweep_options(const RunConfig& cfg) {
  sweep::SweepOptions opt;
  opt.theta = cfg.theta;
  opt.horizon = cfg.horizon_tau;
  opt.dtau_sample = cfg.dtau_sample;
  opt.abs_tol = cfg.abs_tol;
  opt.rel_tol = cfg.rel_tol;
  opt.omega_cap = cfg.omega_cap;
  opt.drift_tol = cfg.drift_tol;
  opt.bisect_tol = cfg.bisect_tol;
  opt.omega03_search_max = cfg.omega03_search_max;
  opt.transient_fraction = cfg.transient_fraction;
  opt.workers = cfg.workers;
  return opt;
}

synth::ControlParams single_point_params(const RunConfig& cfg) {
  return sweep::make_params(cfg.gamma_ratio, cfg.omega_init_over_lambda,
                            cfg.omega03_over_lambda, sweep_options(cfg));
}

Table make_table(const RunConfig& cfg) {
  Table t;
  t.command = cfg.command;
  t.config = config_echo(cfg);
  return t;
}

// Replaces characters that would break one-line rendering of free text.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ';';
  }
  return s;
}

Table run_pt2(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const pt::PtParams q = pt::params_from_ratio(cfg.gamma_ratio);
  t.columns = {"tau", "n", "w", "Phi", "p1", "p2"};
  const auto n_samples = static_cast<std::size_t>(
      std::floor(cfg.horizon_tau / cfg.dtau_sample + 1e-9)) + 1;
  t.rows.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double tau = static_cast<double>(k) * cfg.dtau_sample;
    const pt::PtState s = pt::evolve(q, cfg.theta, tau);
    const pt::PtObservables obs = pt::observables(s);
    t.rows.push_back({tau, obs.norm, obs.imbalance,
                      obs.relative_phase.value_or(kNaN), std::norm(s.psi1),
                      std::norm(s.psi2)});
  }
  t.result = {{"lambda", meta(q.lambda)}, {"gamma", meta(q.gamma)}};
  if (q.gamma > 0.0) {
    t.result.emplace_back("tau_sharp", meta(pt::tau_sharp(q)));
  }
  return t;
}

void append_run_summary(Table& t, const synth::ControlTrace& tr) {
  t.result.emplace_back("verdict", meta(std::string(synth::to_string(tr.verdict))));
  if (tr.tau_star) t.result.emplace_back("tau_star", meta(*tr.tau_star));
  if (tr.source_drift) t.result.emplace_back("source_drift", meta(*tr.source_drift));
}

Table run_synth(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const synth::ControlParams p = single_point_params(cfg);
  const synth::ControlTrace tr = synth::integrate_controls(p);
  t.columns = {"tau",     "omega01", "omega23", "delta0",  "delta3",
               "re_phi0", "im_phi0", "re_phi3", "im_phi3",
               "omega01_over_lambda", "omega23_over_lambda",
               "delta0_over_lambda",  "delta3_over_lambda"};
  const double lam = p.pt.lambda;
  t.rows.reserve(tr.tau.size());
  for (std::size_t i = 0; i < tr.tau.size(); ++i) {
    t.rows.push_back({tr.tau[i], tr.omega01[i], tr.omega23[i], tr.delta0[i],
                      tr.delta3[i], tr.phi0[i].real(), tr.phi0[i].imag(),
                      tr.phi3[i].real(), tr.phi3[i].imag(),
                      tr.omega01[i] / lam, tr.omega23[i] / lam,
                      tr.delta0[i] / lam, tr.delta3[i] / lam});
  }
  append_run_summary(t, tr);
  t.result.emplace_back("lambda", meta(p.pt.lambda));
  t.result.emplace_back("gamma", meta(p.pt.gamma));
  t.result.emplace_back("omega_init", meta(p.omega_init));
  t.result.emplace_back("omega03", meta(p.omega03));
  t.result.emplace_back("samples", meta(static_cast<std::int64_t>(tr.tau.size())));
  return t;
}

Table run_emulate(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const synth::ControlParams p = single_point_params(cfg);
  const synth::ControlTrace tr = synth::integrate_controls(p);
  const quad::Schedule sched(tr);
  quad::QuadOptions qopt;
  qopt.abs_tol = cfg.quad_abs_tol;
  qopt.rel_tol = cfg.quad_rel_tol;
  const quad::EmulationReport report =
      quad::evolve_four_level(sched, sched.tau_end(), qopt);
  t.columns = {"tau", "p0", "p1", "p2", "p3", "embed_err", "norm_err"};
  t.rows.reserve(report.samples.size());
  for (const auto& s : report.samples) {
    t.rows.push_back({s.tau, s.p0, s.p1, s.p2, s.p3, s.emulation_error,
                      s.norm_drift});
  }
  append_run_summary(t, tr);
  t.result.emplace_back("max_embed_err", meta(report.max_emulation_error));
  t.result.emplace_back("max_norm_err", meta(report.max_norm_drift));
  t.result.emplace_back("max_constraint_residual",
                        meta(report.max_constraint_residual));
  t.result.emplace_back("pt_fraction_min", meta(report.pt_fraction_min));
  t.result.emplace_back("pt_fraction_predicted", meta(synth::pt_fraction(p)));
  t.result.emplace_back("lambda", meta(p.pt.lambda));
  t.result.emplace_back("gamma", meta(p.pt.gamma));
  return t;
}

Table run_breakdown_scan(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const sweep::SweepOptions opt = sweep_options(cfg);
  const auto points = sweep::scan_breakdown(
      cfg.gamma_ratio_grid, cfg.omega_init_grid, cfg.omega03_over_lambda, opt);
  t.columns = {"gamma_ratio", "omega_init", "omega_init_over_lambda",
               "omega03",     "omega03_over_lambda", "tau_star",
               "tau_star_weak_approx", "tau_star_strong_approx"};
  t.tag_column = "verdict";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt_i = points[i];
    // Both asymptotic estimates exist only for the un-recycled equal
    // superposition; away from it the overlay columns degrade to nan.
    synth::ControlParams base = sweep::make_params(
        pt_i.gamma_ratio, pt_i.omega_init_over_lambda, 0.0, opt);
    double weak = kNaN;
    double strong = kNaN;
    try {
      weak = synth::breakdown_approx(base, synth::CouplingRegime::kWeak);
      strong = synth::breakdown_approx(base, synth::CouplingRegime::kStrong);
    } catch (const UndefinedError&) {
    }
    t.rows.push_back({pt_i.gamma_ratio, base.omega_init,
                      pt_i.omega_init_over_lambda,
                      pt_i.omega03_over_lambda * base.pt.lambda,
                      pt_i.omega03_over_lambda, pt_i.tau_star.value_or(kNaN),
                      weak, strong});
    if (!pt_i.note.empty()) {
      t.tags.push_back("Error");
      t.result.emplace_back("point_note_" + std::to_string(i),
                            meta(sanitize(pt_i.note)));
    } else {
      t.tags.push_back(synth::to_string(pt_i.verdict));
    }
  }
  t.result.emplace_back("points", meta(static_cast<std::int64_t>(points.size())));
  return t;
}

// Verdict of a fresh run at the given recycling strength (used to attach an
// honest classification to bisected boundary values).
synth::Verdict verdict_at(double gamma_ratio, double omega_init_over_lambda,
                          double omega03_over_lambda,
                          const sweep::SweepOptions& opt) {
  const synth::ControlParams p = sweep::make_params(
      gamma_ratio, omega_init_over_lambda, omega03_over_lambda, opt);
  return synth::integrate_controls(p).verdict;
}

Table run_threshold(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const sweep::SweepOptions opt = sweep_options(cfg);
  const double crit = sweep::critical_recycling(
      cfg.gamma_ratio, cfg.omega_init_over_lambda, opt);
  const double lam = pt::params_from_ratio(cfg.gamma_ratio).lambda;
  const synth::Verdict v =
      verdict_at(cfg.gamma_ratio, cfg.omega_init_over_lambda, crit, opt);
  t.columns = {"gamma_ratio", "omega_init", "omega_init_over_lambda",
               "omega03_crit", "omega03_crit_over_lambda"};
  t.tag_column = "verdict";
  t.rows.push_back({cfg.gamma_ratio, cfg.omega_init_over_lambda * lam,
                    cfg.omega_init_over_lambda, crit * lam, crit});
  t.tags.emplace_back(synth::to_string(v));
  t.result.emplace_back("omega03_crit", meta(crit * lam));
  t.result.emplace_back("omega03_crit_over_lambda", meta(crit));
  t.result.emplace_back("verdict_at_critical",
                        meta(std::string(synth::to_string(v))));
  return t;
}

Table run_boundary(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const sweep::SweepOptions opt = sweep_options(cfg);
  const sweep::BoundaryCurve curve =
      sweep::boundary_curve(cfg.gamma_ratio, cfg.omega_init_grid, opt);
  const double lam = pt::params_from_ratio(cfg.gamma_ratio).lambda;
  t.columns = {"omega_init", "omega_init_over_lambda", "omega03_crit",
               "omega03_crit_over_lambda"};
  t.tag_column = "verdict";
  for (std::size_t i = 0; i < curve.omega_init_over_lambda.size(); ++i) {
    const double w = curve.omega_init_over_lambda[i];
    const double crit = curve.omega03_critical_over_lambda[i];
    t.rows.push_back({w * lam, w, crit * lam, crit});
    if (!curve.notes[i].empty()) {
      t.tags.emplace_back("NoBracket");
      t.result.emplace_back("point_note_" + std::to_string(i),
                            meta(sanitize(curve.notes[i])));
    } else {
      t.tags.emplace_back(
          synth::to_string(verdict_at(cfg.gamma_ratio, w, crit, opt)));
    }
  }
  t.result.emplace_back("points", meta(static_cast<std::int64_t>(t.rows.size())));
  return t;
}

Table run_feasibility(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const sweep::SweepOptions opt = sweep_options(cfg);
  sweep::FeasibilityQuery query;
  query.tau_required = cfg.tau_required;
  query.r_min = cfg.r_min;
  query.omega03_max_over_lambda = cfg.omega03_max_over_lambda;
  const auto results = sweep::feasibility_map(cfg.gamma_ratio_grid, query, opt);
  t.columns = {"gamma_ratio", "omega_init_min", "omega_init_min_over_lambda",
               "feasible", "corner_tau_star"};
  t.tag_column = "verdict";
  bool any_feasible = false;
  for (const auto& r : results) {
    const double lam = pt::params_from_ratio(r.gamma_ratio).lambda;
    t.rows.push_back({r.gamma_ratio, r.omega_init_min_over_lambda * lam,
                      r.omega_init_min_over_lambda, r.feasible ? 1.0 : 0.0,
                      r.corner_tau_star.value_or(kNaN)});
    t.tags.emplace_back(r.feasible ? "Feasible" : "Infeasible");
    any_feasible = any_feasible || r.feasible;
  }
  t.result.emplace_back("any_feasible", meta(std::int64_t{any_feasible ? 1 : 0}));
  if (cfg.theta == pt::kPi / 2) {
    t.result.emplace_back(
        "max_gamma_ratio_no_recycling",
        meta(sweep::no_recycling_max_gamma_ratio(cfg.tau_required, cfg.r_min)));
    try {
      t.result.emplace_back("max_gamma_ratio_with_recycling",
                            meta(sweep::max_gamma_ratio_with_recycling(query, opt)));
    } catch (const NoBracketError&) {
      // The standard bracket does not hold for this query; the per-point
      // verdicts above still stand on their own.
    }
  }
  t.exit_status = any_feasible ? 0 : 3;
  return t;
}

Table run_detuning_range(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const sweep::SweepOptions opt = sweep_options(cfg);
  const auto ranges = sweep::detuning_ranges(
      cfg.gamma_ratio, cfg.omega_init_over_lambda, cfg.omega03_grid, opt);
  const pt::PtParams q = pt::params_from_ratio(cfg.gamma_ratio);
  t.columns = {"omega03",     "omega03_over_lambda",
               "delta0_min",  "delta0_max", "delta0_range",
               "delta3_min",  "delta3_max", "delta3_range",
               "delta0_min_over_lambda", "delta0_max_over_lambda",
               "delta0_range_over_lambda", "delta3_min_over_lambda",
               "delta3_max_over_lambda", "delta3_range_over_lambda"};
  t.tag_column = "verdict";
  std::vector<double> skipped;
  for (const auto& r : ranges) {
    if (r.verdict == synth::Verdict::kTerminated) {
      // No steady regime to measure; record the point and move on.
      skipped.push_back(r.omega03_over_lambda);
      continue;
    }
    t.rows.push_back({r.omega03_over_lambda * q.lambda, r.omega03_over_lambda,
                      r.delta0_min, r.delta0_max, r.delta0_span, r.delta3_min,
                      r.delta3_max, r.delta3_span, r.delta0_min / q.lambda,
                      r.delta0_max / q.lambda, r.delta0_span / q.lambda,
                      r.delta3_min / q.lambda, r.delta3_max / q.lambda,
                      r.delta3_span / q.lambda});
    t.tags.emplace_back(synth::to_string(r.verdict));
  }
  t.result.emplace_back("skipped_terminated", meta(skipped));
  t.result.emplace_back("delta_band_lo", meta(q.lambda - q.gamma));
  t.result.emplace_back("delta_band_hi", meta(q.lambda + q.gamma));
  return t;
}

Table run_orbit(const RunConfig& cfg) {
  Table t = make_table(cfg);
  const sweep::OrbitTrace orbit =
      sweep::orbit_trace(cfg.gamma_ratio, cfg.omega_init_over_lambda,
                         cfg.omega03_over_lambda, sweep_options(cfg));
  const double lam = pt::params_from_ratio(cfg.gamma_ratio).lambda;
  t.columns = {"tau", "omega01", "omega01_over_lambda", "omega23",
               "omega23_over_lambda"};
  t.rows.reserve(orbit.tau.size());
  for (std::size_t i = 0; i < orbit.tau.size(); ++i) {
    t.rows.push_back({orbit.tau[i], orbit.omega01[i], orbit.omega01[i] / lam,
                      orbit.omega23[i], orbit.omega23[i] / lam});
  }
  t.result = {
      {"verdict", meta(std::string(sweep::to_string(orbit.verdict)))},
      {"initial_return_distance", meta(orbit.initial_return_distance)},
      {"final_return_distance", meta(orbit.final_return_distance)},
      {"closure_tolerance", meta(orbit.closure_tolerance)},
  };
  return t;
}

}  // namespace

Table run(const RunConfig& cfg) {
  if (cfg.command == "pt2") return run_pt2(cfg);
  if (cfg.command == "synth") return run_synth(cfg);
  if (cfg.command == "emulate") return run_emulate(cfg);
  if (cfg.command == "breakdown-scan") return run_breakdown_scan(cfg);
  if (cfg.command == "threshold") return run_threshold(cfg);
  if (cfg.command == "boundary") return run_boundary(cfg);
  if (cfg.command == "feasibility") return run_feasibility(cfg);
  if (cfg.command == "detuning-range") return run_detuning_range(cfg);
  if (cfg.command == "orbit") return run_orbit(cfg);
  throw UsageError("unknown command '" + cfg.command + "'");
}

int main_entry(int argc, const char* const* argv) {
  try {
    const RunConfig cfg = parse_config(argc, argv);
    if (cfg.help) {
      std::cout << cfg.help_text;
      return 0;
    }
    const Table t = run(cfg);
    write_table(t, cfg.format, cfg.out);
    return t.exit_status;
  } catch (const UsageError& e) {
    std::cerr << "pt-forge: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "pt-forge: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace ptforge::shell
