#include "fwdaffine/curve.hpp"

#include <cmath>

#include "fwdaffine/errors.hpp"

namespace fwdaffine {

namespace {

// (1 - e^{-z}) / z, with a series near zero.
double loading(double z) {
  if (z < 1e-6) return 1.0 - z / 2.0 + z * z / 6.0;
  return -std::expm1(-z) / z;
}

// d/dz of loading(z)
double loading_derivative(double z) {
  if (z < 1e-6) return -0.5 + z / 3.0;
  return (std::exp(-z) * z + std::expm1(-z)) / (z * z);
}

}  // namespace

NelsonSiegelCurve::NelsonSiegelCurve(double beta0, double beta1, double beta2, double tau)
    : beta0_(beta0), beta1_(beta1), beta2_(beta2), tau_(tau) {
  require(tau > 0.0 && std::isfinite(tau), "curve: tau must be positive");
  require(std::isfinite(beta0) && std::isfinite(beta1) && std::isfinite(beta2), "curve: betas must be finite");
}

double NelsonSiegelCurve::log_forward(double x) const {
  require(x >= 0.0, "curve: time to maturity must be nonnegative");
  const double z = x / tau_;
  const double l1 = loading(z);
  return beta0_ + beta1_ * l1 + beta2_ * (l1 - std::exp(-z));
}

double NelsonSiegelCurve::log_forward_derivative(double x) const {
  const double z = x / tau_;
  const double dl1 = loading_derivative(z);
  return (beta1_ * dl1 + beta2_ * (dl1 + std::exp(-z))) / tau_;
}

double NelsonSiegelCurve::forward_price(double T) const { return std::exp(log_forward(T)); }

CurveFunction NelsonSiegelCurve::as_function() const {
  const NelsonSiegelCurve self = *this;
  return CurveFunction([self](double x) { return self.log_forward(x); },
                       [self](double x) { return self.log_forward_derivative(x); });
}

}  // namespace fwdaffine
