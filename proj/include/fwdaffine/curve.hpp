#pragma once

#include "fwdaffine/basis.hpp"

namespace fwdaffine {

// Initial log-forward curve X_0(x) in Nelson-Siegel form, x = time to maturity.
class NelsonSiegelCurve {
 public:
  NelsonSiegelCurve(double beta0 = 0.05, double beta1 = -0.02, double beta2 = 0.01, double tau = 2.0);

  double beta0() const { return beta0_; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double tau() const { return tau_; }

  double log_forward(double x) const;
  double log_forward_derivative(double x) const;
  double forward_price(double T) const;
  CurveFunction as_function() const;

 private:
  double beta0_;
  double beta1_;
  double beta2_;
  double tau_;
};

}  // namespace fwdaffine
