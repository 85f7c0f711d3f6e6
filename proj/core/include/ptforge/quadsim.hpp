#pragma once

#include <array>
#include <complex>
#include <vector>

#include "ptforge/synth.hpp"

// Independent verification layer: takes a sampled drive schedule produced by
// the synthesis stage, rebuilds continuous-time drives by interpolation, and
// integrates the full four-level unitary model forward.  Nothing here reuses
// the synthesis ODE path, so agreement between the embedded inner pair and
// the closed-form two-level solution is an end-to-end check of both stages.
namespace ptforge::quad {

// Continuous drives rebuilt from a control trace by cubic Hermite
// interpolation on the trace's uniform grid, with fourth-order
// finite-difference slope estimates (one-sided at the ends).  The
// interpolation error is O(h^4) in the grid spacing.
class Schedule {
 public:
  // Throws UndefinedError when the trace holds fewer than 5 samples (the
  // slope stencils need that many).
  explicit Schedule(const synth::ControlTrace& trace);

  const synth::ControlParams& params() const { return params_; }
  double tau_begin() const { return tau_.front(); }
  double tau_end() const { return tau_.back(); }

  // Drive values at any tau inside the sampled span.  Throws OutOfSpanError
  // beyond it: a schedule never extrapolates.
  synth::DriveTuple drives(double tau) const;

 private:
  struct Channel {
    std::vector<double> value, slope;
  };
  double eval(const Channel& ch, std::size_t i, double t) const;

  synth::ControlParams params_;
  std::vector<double> tau_;
  double h_ = 0.0;
  std::array<Channel, 4> ch_;  // omega01, omega23, delta0, delta3
};

// Row-major 4x4 instantaneous Hamiltonian (real symmetric) under a schedule,
// in the level order (sink, inner-1, inner-2, source).
using Mat4 = std::array<double, 16>;
Mat4 hamiltonian_at(const Schedule& sched, double tau);

// Four-level amplitudes in the order (sink, inner pair, source).
struct QuadState {
  std::complex<double> phi0, psi1, psi2, phi3;
};

// Embedding initial condition: the inner pair starts in the two-level state,
// the reservoirs at the amplitudes the constraints dictate.
QuadState initial_state(const synth::ControlParams& p);

// The four-level model conserves the norm, so tolerances can be much tighter
// than in the synthesis stage; the defaults keep the norm drift below
// ~5e-10 per 100 pi of evolution.
struct QuadOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-13;
};

// One sample of the verification run, on the schedule's grid.
struct EmulationSample {
  double tau = 0.0;
  double p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;  // level populations
  // max |psi - psi_exact| over the inner pair: the emulation quality.
  double emulation_error = 0.0;
  // max residual of the two reservoir constraints (omega * phi = -+ i gamma psi).
  double constraint_residual = 0.0;
  // total population relative to its initial value, minus one.
  double norm_drift = 0.0;
};

struct EmulationReport {
  std::vector<EmulationSample> samples;
  double max_emulation_error = 0.0;
  double max_constraint_residual = 0.0;
  double max_norm_drift = 0.0;     // max |norm_drift| over the run
  double pt_fraction_min = 0.0;    // min (p1 + p2) / total
  QuadState final_state;
};

// Integrates the four-level Schrodinger equation under the schedule from
// tau = 0 to tau_end, sampling on the schedule grid.  Throws OutOfSpanError
// when tau_end exceeds the schedule span and NonFiniteError if the
// integration fails (it never should for bounded drives).
EmulationReport evolve_four_level(const Schedule& sched, double tau_end,
                                  const QuadOptions& opt = {});

}  // namespace ptforge::quad
