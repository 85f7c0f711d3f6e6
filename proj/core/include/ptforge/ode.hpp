#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ptforge::ode {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = 0.0;    // 0 means unlimited
  double min_step = 1e-12;  // below this the step controller gives up
};

enum class StepStatus {
  kAdvanced,   // one step accepted
  kUnderflow,  // error control drove the step below min_step
  kNonFinite,  // derivatives or state stayed non-finite even at min_step
};

using Rhs = std::function<void(double tau, std::span<const double> y, std::span<double> dydt)>;

// Dormand-Prince 5(4) embedded pair with the classic quartic dense-output
// interpolant, stepping in the direction of increasing tau.  Each call to
// step() advances by exactly one accepted step (retrying internally on
// error-test failures) and never steps past the supplied limit.
class Dopri5 {
 public:
  Dopri5(Rhs rhs, double tau0, std::vector<double> y0, Options opt = {});

  StepStatus step(double tau_limit);

  double tau() const { return tau_; }
  double tau_prev() const { return tau_prev_; }
  std::span<const double> state() const { return y_; }

  // Evaluate the interpolant of the last accepted step at s in [tau_prev, tau].
  void dense(double s, std::span<double> out) const;

  std::size_t dim() const { return y_.size(); }
  std::size_t steps_taken() const { return n_accepted_; }

 private:
  double error_norm(double h) const;

  Rhs rhs_;
  Options opt_;
  double tau_ = 0.0;
  double tau_prev_ = 0.0;
  double h_next_ = 0.0;
  std::vector<double> y_;
  std::vector<double> k_[7];
  std::vector<double> y_trial_;
  std::vector<double> y_prev_;
  std::vector<double> rcont_[5];
  bool have_k1_ = false;
  std::size_t n_accepted_ = 0;
};

}  // namespace ptforge::ode
