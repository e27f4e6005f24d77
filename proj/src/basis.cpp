#include "fwdaffine/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fwdaffine/errors.hpp"
#include "fwdaffine/quadrature.hpp"

namespace fwdaffine {

namespace {

constexpr int kMaxPanels = 1000;
constexpr double kTailTolerance = 1e-14;
constexpr int kStackBasis = 64;

}  // namespace

CurveFunction::CurveFunction(Fn value, Fn derivative, std::vector<double> kinks)
    : value_(std::move(value)), derivative_(std::move(derivative)), kinks_(std::move(kinks)) {
  std::sort(kinks_.begin(), kinks_.end());
}

CurveFunction CurveFunction::constant(double c) {
  CurveFunction fn([c](double) { return c; }, [](double) { return 0.0; });
  fn.constant_ = c;
  return fn;
}

double laguerre(int n, double x) {
  if (n < 0) throw std::out_of_range("laguerre: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

BasisSystem::BasisSystem(double alpha, int n_max, int quad_order, double panel_length)
    : alpha_(alpha), n_max_(n_max), quad_order_(quad_order), panel_length_(panel_length) {
  require(alpha > 0.0 && std::isfinite(alpha), "basis: alpha must be positive");
  require(n_max >= 1, "basis: n_max must be at least 1");
  require(n_max + 3 <= kStackBasis, "basis: n_max too large");
  require(quad_order >= 2, "basis: quad_order must be at least 2");
  require(panel_length > 0.0 && std::isfinite(panel_length), "basis: panel_length must be positive");
}

double BasisSystem::weight(double x) const { return std::exp(alpha_ * x); }

void BasisSystem::check_index(int n) const {
  if (n < 1 || n > max_index()) {
    throw std::out_of_range("basis index " + std::to_string(n) + " outside [1, " + std::to_string(max_index()) + "]");
  }
}

void BasisSystem::f_all(double x, std::span<double> out) const {
  const std::size_t count = out.size();
  if (count > static_cast<std::size_t>(max_index())) throw std::out_of_range("basis: too many functions requested");
  if (count == 0) return;
  out[0] = 1.0;
  if (count == 1) return;
  const double c = 0.5 * (alpha_ + 1.0);
  const double decay = std::exp(-c * x);
  out[1] = (1.0 - decay) / c;
  const double scale = 2.0 / (alpha_ + 1.0);
  double lag_prev = 0.0;
  double lag = 1.0;
  for (std::size_t k = 0; k + 2 < count; ++k) {
    const double kd = static_cast<double>(k);
    const double fk1 = out[k];
    const double fk2 = out[k + 1];
    out[k + 2] = (2.0 * kd + 1.0) / (kd + 1.0) * fk2 - kd / (kd + 1.0) * fk1 +
                 scale / (kd + 1.0) * (x * lag * decay - (kd + 1.0) * fk2 + kd * fk1);
    const double next = ((2.0 * kd + 1.0 - x) * lag - kd * lag_prev) / (kd + 1.0);
    lag_prev = lag;
    lag = next;
  }
}

double BasisSystem::f(int n, double x) const {
  check_index(n);
  if (n == 1) return 1.0;
  std::array<double, kStackBasis> buf{};
  f_all(x, std::span<double>(buf.data(), static_cast<std::size_t>(n)));
  return buf[n - 1];
}

double BasisSystem::f_derivative(int n, double x) const {
  check_index(n);
  if (n == 1) return 0.0;
  return laguerre(n - 2, x) * std::exp(-0.5 * (alpha_ + 1.0) * x);
}

CurveFunction BasisSystem::basis_function(int n) const {
  check_index(n);
  if (n == 1) return CurveFunction::constant(1.0);
  const BasisSystem self = *this;
  return CurveFunction([self, n](double x) { return self.f(n, x); },
                       [self, n](double x) { return self.f_derivative(n, x); });
}

double BasisSystem::inner_product(const CurveFunction& h, const CurveFunction& g) const {
  const double boundary = h(0.0) * g(0.0);
  if (h.constant_value() || g.constant_value()) return boundary;

  std::vector<double> kinks;
  for (double k : h.kinks()) if (k > 0.0) kinks.push_back(k);
  for (double k : g.kinks()) if (k > 0.0) kinks.push_back(k);
  std::sort(kinks.begin(), kinks.end());
  const double last_kink = kinks.empty() ? 0.0 : kinks.back();

  const GaussLegendre& gl = gauss_legendre(quad_order_);
  const auto integrand = [&](double x) { return weight(x) * h.derivative(x) * g.derivative(x); };

  double total = 0.0;
  double total_abs = 0.0;
  int quiet = 0;
  double a = 0.0;
  std::size_t next_kink = 0;
  for (int panel = 0; panel < kMaxPanels; ++panel) {
    double b = a + panel_length_;
    while (next_kink < kinks.size() && kinks[next_kink] <= a) ++next_kink;
    if (next_kink < kinks.size() && kinks[next_kink] < b) b = kinks[next_kink];

    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    double sum_abs = 0.0;
    for (int i = 0; i < gl.order(); ++i) {
      const double v = gl.weights()[i] * integrand(mid + half * gl.nodes()[i]);
      sum += v;
      sum_abs += std::abs(v);
    }
    total += half * sum;
    total_abs += half * sum_abs;
    if (!std::isfinite(total)) throw NumericalError("inner product: non-finite integrand");

    // Two consecutive negligible panels past every kink end the tail.
    quiet = (half * sum_abs <= kTailTolerance * total_abs) ? quiet + 1 : 0;
    if (quiet >= 2 && b >= last_kink) return boundary + total;
    a = b;
  }
  throw NumericalError("inner product: tail criterion not met within 1000 panels");
}

double BasisSystem::semigroup_adjoint_apply(const CurveFunction& h, double t, double x) const {
  require(t >= 0.0 && x >= 0.0, "semigroup: t and x must be nonnegative");
  const double h0 = h(0.0);
  double value = h0 + h0 * (1.0 - std::exp(-alpha_ * std::min(x, t))) / alpha_;
  if (x >= t) value += std::exp(-alpha_ * t) * (h(x - t) - h0);
  return value;
}

CurveFunction BasisSystem::semigroup_adjoint(const CurveFunction& h, double t) const {
  require(t >= 0.0, "semigroup: t must be nonnegative");
  if (t == 0.0) return h;
  const double alpha = alpha_;
  const double h0 = h(0.0);
  const BasisSystem self = *this;
  std::vector<double> kinks{t};
  for (double k : h.kinks()) kinks.push_back(k + t);
  return CurveFunction([self, h, t](double x) { return self.semigroup_adjoint_apply(h, t, x); },
                       [alpha, h, h0, t](double x) {
                         return x < t ? h0 * std::exp(-alpha * x) : std::exp(-alpha * t) * h.derivative(x - t);
                       },
                       std::move(kinks));
}

CurveFunction BasisSystem::representer(double x) const {
  require(x >= 0.0, "representer: x must be nonnegative");
  const double alpha = alpha_;
  std::vector<double> kinks;
  if (x > 0.0) kinks.push_back(x);
  return CurveFunction([alpha, x](double y) { return 1.0 + (1.0 - std::exp(-alpha * std::min(x, y))) / alpha; },
                       [alpha, x](double y) { return y < x ? std::exp(-alpha * y) : 0.0; }, std::move(kinks));
}

double BasisSystem::c_coefficient(int n, double theta, const CurveFunction& h0) const {
  check_index(n);
  require(theta >= 0.0, "c_coefficient: theta must be nonnegative");
  // S*(theta) c = c u_theta, and <f_n, u_theta> = f_n(theta).
  if (auto c = h0.constant_value()) return *c * f(n, theta);
  return inner_product(basis_function(n), semigroup_adjoint(h0, theta));
}

double BasisSystem::integrate_basis_product(int i, int j, double theta, double t0, double t1) const {
  check_index(i);
  if (j != 0) check_index(j);
  require(t0 <= t1, "integrate_basis_product: t0 must not exceed t1");
  const int count = std::max(i, j);
  const GaussLegendre& gl = gauss_legendre(quad_order_);
  std::array<double, kStackBasis> buf{};
  const std::span<double> vals(buf.data(), static_cast<std::size_t>(count));
  double total = 0.0;
  for (double a = t0; a < t1;) {
    const double b = std::min(t1, a + panel_length_);
    total += gl.integrate(
        [&](double s) {
          f_all(s + theta, vals);
          return j == 0 ? vals[i - 1] : vals[i - 1] * vals[j - 1];
        },
        a, b);
    a = b;
  }
  return total;
}

}  // namespace fwdaffine
