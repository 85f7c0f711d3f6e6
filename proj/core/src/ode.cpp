#include "ptforge/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "ptforge/errors.hpp"

namespace ptforge::ode {

namespace {

// Dormand & Prince (1980) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights (error estimator).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

Dopri5::Dopri5(Rhs rhs, double tau0, std::vector<double> y0, Options opt)
    : rhs_(std::move(rhs)), opt_(opt), tau_(tau0), tau_prev_(tau0), y_(std::move(y0)) {
  const std::size_t n = y_.size();
  for (auto& k : k_) k.assign(n, 0.0);
  for (auto& r : rcont_) r.assign(n, 0.0);
  y_trial_.assign(n, 0.0);
  y_prev_ = y_;
  if (!all_finite(y_)) throw NonFiniteError("initial state is not finite");

  // Starting step from the magnitude of the state and its derivative.
  rhs_(tau_, y_, k_[0]);
  have_k1_ = true;
  double dy = 0.0, df = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
    dy += (y_[i] / sc) * (y_[i] / sc);
    df += (k_[0][i] / sc) * (k_[0][i] / sc);
  }
  double h = (dy > 0 && df > 0) ? 0.01 * std::sqrt(dy / df) : 1e-6;
  if (opt_.max_step > 0) h = std::min(h, opt_.max_step);
  h_next_ = std::max(h, opt_.min_step);
}

double Dopri5::error_norm(double h) const {
  const std::size_t n = y_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double err = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                            e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
    const double sc =
        opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_trial_[i]));
    acc += (err / sc) * (err / sc);
  }
  return std::sqrt(acc / static_cast<double>(n));
}

StepStatus Dopri5::step(double tau_limit) {
  const std::size_t n = y_.size();
  if (!have_k1_) {
    rhs_(tau_, y_, k_[0]);
    have_k1_ = true;
  }

  if (tau_ >= tau_limit) return StepStatus::kAdvanced;

  double h = h_next_;
  bool last_failure_nonfinite = false;
  for (;;) {
    if (opt_.max_step > 0) h = std::min(h, opt_.max_step);
    const double remaining = tau_limit - tau_;
    const bool clamped = h >= remaining;
    if (clamped) {
      h = remaining;
    } else if (h < opt_.min_step) {
      return last_failure_nonfinite ? StepStatus::kNonFinite : StepStatus::kUnderflow;
    }

    auto stage = [&](std::vector<double>& k, double c, auto&&... terms) {
      auto pairs = {terms...};
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (auto [a, kk] : pairs) acc += a * (*kk)[i];
        y_trial_[i] = y_[i] + h * acc;
      }
      rhs_(tau_ + c * h, y_trial_, k);
    };
    using P = std::pair<double, const std::vector<double>*>;
    stage(k_[1], c2, P{a21, &k_[0]});
    stage(k_[2], c3, P{a31, &k_[0]}, P{a32, &k_[1]});
    stage(k_[3], c4, P{a41, &k_[0]}, P{a42, &k_[1]}, P{a43, &k_[2]});
    stage(k_[4], c5, P{a51, &k_[0]}, P{a52, &k_[1]}, P{a53, &k_[2]}, P{a54, &k_[3]});
    stage(k_[5], 1.0, P{a61, &k_[0]}, P{a62, &k_[1]}, P{a63, &k_[2]}, P{a64, &k_[3]},
          P{a65, &k_[4]});
    // 5th-order solution (also stage 7 via FSAL).
    for (std::size_t i = 0; i < n; ++i) {
      y_trial_[i] = y_[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                                 a75 * k_[4][i] + a76 * k_[5][i]);
    }
    rhs_(tau_ + h, y_trial_, k_[6]);

    double err;
    if (!all_finite(y_trial_) || !all_finite(k_[6])) {
      err = std::numeric_limits<double>::infinity();
      last_failure_nonfinite = true;
    } else {
      err = error_norm(h);
      if (!std::isfinite(err)) {
        err = std::numeric_limits<double>::infinity();
        last_failure_nonfinite = true;
      } else {
        last_failure_nonfinite = false;
      }
    }

    if (err <= 1.0) {
      // Accept: build the dense interpolant, then advance with FSAL reuse.
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = y_trial_[i] - y_[i];
        const double bspl = h * k_[0][i] - ydiff;
        rcont_[0][i] = y_[i];
        rcont_[1][i] = ydiff;
        rcont_[2][i] = bspl;
        rcont_[3][i] = ydiff - h * k_[6][i] - bspl;
        rcont_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] +
                            d5 * k_[4][i] + d6 * k_[5][i] + d7 * k_[6][i]);
      }
      y_prev_ = y_;
      tau_prev_ = tau_;
      y_ = y_trial_;
      tau_ = (tau_prev_ + h >= tau_limit) ? tau_limit : tau_prev_ + h;
      k_[0] = k_[6];
      ++n_accepted_;

      double fac = (err == 0.0) ? 5.0 : 0.9 * std::pow(err, -0.2);
      h_next_ = h * std::clamp(fac, 0.2, 5.0);
      return StepStatus::kAdvanced;
    }

    // Reject and shrink.
    const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
    h *= fac;
  }
}

void Dopri5::dense(double s, std::span<double> out) const {
  const double h = tau_ - tau_prev_;
  const double th = (h != 0.0) ? (s - tau_prev_) / h : 0.0;
  const double th1 = 1.0 - th;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = rcont_[0][i] +
             th * (rcont_[1][i] +
                   th1 * (rcont_[2][i] + th * (rcont_[3][i] + th1 * rcont_[4][i])));
  }
}

}  // namespace ptforge::ode
