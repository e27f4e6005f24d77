#include "fwdaffine/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>

#include "fwdaffine/errors.hpp"

namespace fwdaffine {

GaussLegendre::GaussLegendre(int order) {
  require(order >= 1, "Gauss-Legendre order must be positive");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(order));
  if (table == nullptr) throw NumericalError("cannot build Gauss-Legendre table");
  nodes_.resize(order);
  weights_.resize(order);
  for (int i = 0; i < order; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &nodes_[i], &weights_[i], table);
  }
  gsl_integration_glfixed_table_free(table);
}

void GaussLegendre::append_mapped(double a, double b, std::vector<double>& x, std::vector<double>& w) const {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    x.push_back(mid + half * nodes_[i]);
    w.push_back(half * weights_[i]);
  }
}

const GaussLegendre& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussLegendre>(order);
  return *slot;
}

CompositeRule composite_gauss_legendre(double a, double b, int panels, int per_panel) {
  require(panels >= 1 && per_panel >= 1, "composite rule needs at least one panel and one node");
  CompositeRule rule;
  rule.panels = panels;
  rule.per_panel = per_panel;
  rule.x.reserve(static_cast<std::size_t>(panels) * per_panel);
  rule.w.reserve(static_cast<std::size_t>(panels) * per_panel);
  const GaussLegendre& gl = gauss_legendre(per_panel);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = (p + 1 == panels) ? b : lo + h;
    gl.append_mapped(lo, hi, rule.x, rule.w);
  }
  return rule;
}

}  // namespace fwdaffine
