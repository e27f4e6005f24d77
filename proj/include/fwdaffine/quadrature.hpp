#pragma once

#include <span>
#include <vector>

namespace fwdaffine {

// Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  // Nodes and weights mapped to [a, b], appended to the output vectors.
  void append_mapped(double a, double b, std::vector<double>& x, std::vector<double>& w) const;

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return half * sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Shared, lazily built rule. The reference stays valid for the program lifetime.
const GaussLegendre& gauss_legendre(int order);

// Composite rule: `panels` equal panels on [a, b], `per_panel` nodes each.
struct CompositeRule {
  std::vector<double> x;
  std::vector<double> w;
  int panels = 0;
  int per_panel = 0;
};

CompositeRule composite_gauss_legendre(double a, double b, int panels, int per_panel);

}  // namespace fwdaffine
