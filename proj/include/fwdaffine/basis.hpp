#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fwdaffine {

// A function on [0, inf) together with its (weak) derivative. `kinks` lists
// points where the derivative may jump; quadrature panels are split there.
class CurveFunction {
 public:
  using Fn = std::function<double(double)>;

  CurveFunction(Fn value, Fn derivative, std::vector<double> kinks = {});
  static CurveFunction constant(double c);

  double operator()(double x) const { return value_(x); }
  double derivative(double x) const { return derivative_(x); }
  const std::vector<double>& kinks() const { return kinks_; }
  std::optional<double> constant_value() const { return constant_; }

 private:
  Fn value_;
  Fn derivative_;
  std::vector<double> kinks_;
  std::optional<double> constant_;
};

// Laguerre polynomial L_n(x) by the three-term recurrence.
double laguerre(int n, double x);

// Orthonormal basis of the weighted Sobolev space with w(x) = exp(alpha x)
// and <f, g> = f(0) g(0) + int_0^inf w f' g'.
//   f_1 = 1,  f_{n+1}(x) = int_0^x L_{n-1}(s) exp(-(alpha+1) s / 2) ds.
class BasisSystem {
 public:
  explicit BasisSystem(double alpha = 0.1, int n_max = 10, int quad_order = 32, double panel_length = 1.0);

  double alpha() const { return alpha_; }
  int n_max() const { return n_max_; }
  int max_index() const { return n_max_ + 3; }
  int quad_order() const { return quad_order_; }
  double panel_length() const { return panel_length_; }

  double weight(double x) const;

  // f_n(x), 1-based.
  double f(int n, double x) const;
  // out[k] = f_{k+1}(x) for k < out.size(); one Laguerre sweep serves all indices.
  void f_all(double x, std::span<double> out) const;
  double f_derivative(int n, double x) const;
  CurveFunction basis_function(int n) const;

  double inner_product(const CurveFunction& h, const CurveFunction& g) const;

  // (S*(t) h)(x)
  double semigroup_adjoint_apply(const CurveFunction& h, double t, double x) const;
  CurveFunction semigroup_adjoint(const CurveFunction& h, double t) const;
  // u_x with <h, u_x> = h(x)
  CurveFunction representer(double x) const;

  // <f_n, S*(theta) h0>
  double c_coefficient(int n, double theta, const CurveFunction& h0) const;

  // int_{t0}^{t1} f_i(s+theta) f_j(s+theta) ds; j == 0 drops the second factor.
  double integrate_basis_product(int i, int j, double theta, double t0, double t1) const;

 private:
  void check_index(int n) const;

  double alpha_;
  int n_max_;
  int quad_order_;
  double panel_length_;
};

}  // namespace fwdaffine
