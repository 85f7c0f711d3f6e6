#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "ptforge/errors.hpp"
#include "ptforge/quadsim.hpp"
#include "ptforge/synth.hpp"

using namespace ptforge;
using doctest::Approx;

namespace {

constexpr double kPi = pt::kPi;

synth::ControlParams reference_params() {
  synth::ControlParams p;
  p.pt = pt::params_from_ratio(0.5);
  p.omega_init = 0.05 * p.pt.lambda;
  return p;
}

}  // namespace

TEST_CASE("schedule reproduces the trace exactly at the nodes") {
  auto p = reference_params();
  p.horizon = 10 * kPi;
  const auto tr = synth::integrate_controls(p);
  const quad::Schedule sched(tr);
  CHECK(sched.tau_begin() == 0.0);
  CHECK(sched.tau_end() == tr.tau.back());
  for (std::size_t i = 0; i < tr.tau.size(); i += 113) {
    const auto d = sched.drives(tr.tau[i]);
    CHECK(d.omega01 == tr.omega01[i]);
    CHECK(d.omega23 == tr.omega23[i]);
    CHECK(d.delta0 == tr.delta0[i]);
    CHECK(d.delta3 == tr.delta3[i]);
  }
}

TEST_CASE("schedule interpolation converges at fourth order") {
  auto coarse = reference_params();
  coarse.horizon = 8 * kPi;
  coarse.dtau_sample = kPi / 25;
  auto fine = coarse;
  fine.dtau_sample = kPi / 50;
  const quad::Schedule sc(synth::integrate_controls(coarse));
  const quad::Schedule sf(synth::integrate_controls(fine));
  double err_c = 0.0, err_f = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const double tau = 8 * kPi * (i + 0.5) / 4000.0;
    const auto exact = synth::analytic_controls(coarse, tau);
    err_c = std::max(err_c, std::abs(sc.drives(tau).omega23 - exact.omega23));
    err_f = std::max(err_f, std::abs(sf.drives(tau).omega23 - exact.omega23));
  }
  CHECK(err_c / err_f > 8.0);  // O(h^4) would give 16
  CHECK(err_c < 1e-5);
}

TEST_CASE("hamiltonian entries and symmetry") {
  auto p = reference_params();
  p.horizon = 4 * kPi;
  const quad::Schedule sched(synth::integrate_controls(p));
  const auto h0 = quad::hamiltonian_at(sched, 0.0);
  // At tau = 0 both detunings equal lambda and both couplings omega_init.
  CHECK(h0[0] == Approx(p.pt.lambda).epsilon(1e-12));
  CHECK(h0[15] == Approx(p.pt.lambda).epsilon(1e-12));
  CHECK(h0[1] == Approx(p.omega_init).epsilon(1e-12));
  CHECK(h0[11] == Approx(p.omega_init).epsilon(1e-12));
  CHECK(h0[6] == p.pt.lambda);
  CHECK(h0[5] == 0.0);
  CHECK(h0[10] == 0.0);
  CHECK(h0[2] == 0.0);
  CHECK(h0[3] == 0.0);  // no recycling coupling here
  for (double tau : {1.0, 5.0, 11.0}) {
    const auto h = quad::hamiltonian_at(sched, tau);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) CHECK(h[4 * r + c] == h[4 * c + r]);
    }
  }
}

TEST_CASE("initial state carries the reservoir amplitudes") {
  const auto p = reference_params();
  const auto s = quad::initial_state(p);
  const auto r = synth::initial_reservoir(p);
  CHECK(s.phi0 == r.phi0);
  CHECK(s.phi3 == r.phi3);
  CHECK(s.psi1.real() == Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.psi2.real() == Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("four-level run reproduces the two-level target") {
  auto p = reference_params();
  p.horizon = 64.0;  // about half the breakdown time
  const quad::Schedule sched(synth::integrate_controls(p));
  const auto rep = quad::evolve_four_level(sched, sched.tau_end());
  CHECK(rep.max_emulation_error < 1e-7);
  CHECK(rep.max_constraint_residual < 1e-7);
  CHECK(rep.max_norm_drift < 1e-9);
  CHECK(rep.pt_fraction_min == Approx(1.0 / 101.0).epsilon(1e-6));
  // The source drains exactly as the closed-form depletion factor says.
  const double p30 = rep.samples.front().p3;
  for (std::size_t i = 0; i < rep.samples.size(); i += 500) {
    CHECK(rep.samples[i].p3 / p30 ==
          Approx(synth::source_depletion(p, rep.samples[i].tau)).epsilon(1e-6));
  }
}

TEST_CASE("recycling keeps the source alive over many periods") {
  auto p = reference_params();
  p.omega03 = 0.05 * p.pt.lambda;
  p.horizon = 24 * kPi;
  const quad::Schedule sched(synth::integrate_controls(p));
  const auto rep = quad::evolve_four_level(sched, 20 * kPi);
  CHECK(rep.max_emulation_error < 1e-6);
  CHECK(rep.max_norm_drift < 1e-9);
  const double p30 = rep.samples.front().p3;
  double p3_min = 1e300;
  for (const auto& s : rep.samples) p3_min = std::min(p3_min, s.p3);
  CHECK(p3_min > 0.5 * p30);
}

TEST_CASE("span violations are rejected") {
  auto p = reference_params();
  p.horizon = 4 * kPi;
  const quad::Schedule sched(synth::integrate_controls(p));
  CHECK_THROWS_AS(sched.drives(-0.1), OutOfSpanError);
  CHECK_THROWS_AS(sched.drives(4 * kPi + 0.1), OutOfSpanError);
  CHECK_THROWS_AS(quad::evolve_four_level(sched, 5 * kPi), OutOfSpanError);
  CHECK_THROWS_AS(quad::evolve_four_level(sched, -1.0), UndefinedError);
}

TEST_CASE("a schedule needs enough samples for its slope stencils") {
  auto p = reference_params();
  p.horizon = 2 * p.dtau_sample;  // only 3 samples
  const auto tr = synth::integrate_controls(p);
  CHECK_THROWS_AS(quad::Schedule{tr}, UndefinedError);
}

TEST_CASE("verification runs are deterministic") {
  auto p = reference_params();
  p.horizon = 6 * kPi;
  const quad::Schedule sched(synth::integrate_controls(p));
  const auto a = quad::evolve_four_level(sched, 6 * kPi);
  const auto b = quad::evolve_four_level(sched, 6 * kPi);
  CHECK(a.max_emulation_error == b.max_emulation_error);
  CHECK(a.final_state.psi1 == b.final_state.psi1);
  CHECK(a.samples.size() == b.samples.size());
}
