#include "fwdaffine/pricer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "fwdaffine/errors.hpp"
#include "fwdaffine/quadrature.hpp"

namespace fwdaffine {

namespace {

constexpr double kNegativeClip = 1e-8;
constexpr double kUnstableHorizon = 1e-2;
constexpr double kGrowingTail = 1e-3;
constexpr double kTruncationSlack = 10.0;

OptionKind other(OptionKind k) { return k == OptionKind::call ? OptionKind::put : OptionKind::call; }

struct FourierOutcome {
  double price;
  double tail;
  long evals;
};

FourierOutcome fourier_price(const TransformEvaluator& phi, const PricingRequest& req, Execution exec) {
  const double nu = req.damping();
  const int per_panel = req.lambda_nodes / req.lambda_panels;
  const CompositeRule rule = composite_gauss_legendre(0.0, req.lambda_max, req.lambda_panels, per_panel);
  const std::vector<double> values = exec == Execution::parallel ? fourier_integrand_parallel(phi, nu, req.K, rule.x)
                                                                 : fourier_integrand_serial(phi, nu, req.K, rule.x);

  std::vector<double> panel(req.lambda_panels, 0.0);
  for (int p = 0; p < req.lambda_panels; ++p) {
    for (int i = 0; i < per_panel; ++i) {
      const std::size_t k = static_cast<std::size_t>(p) * per_panel + i;
      panel[p] += rule.w[k] * values[k];
    }
  }
  double total = 0.0;
  double total_abs = 0.0;
  for (double v : panel) {
    if (!std::isfinite(v)) throw NumericalError("fourier integral diverged: non-finite integrand, nu likely outside the admissible strip");
    total += v;
    total_abs += std::abs(v);
  }
  const int P = req.lambda_panels;
  if (P >= 3) {
    const double a = std::abs(panel[P - 3]), b = std::abs(panel[P - 2]), c = std::abs(panel[P - 1]);
    if (a < b && b < c && c > kGrowingTail * total_abs) {
      throw NumericalError("fourier integral diverged: tail panels growing, nu likely outside the admissible strip");
    }
  }

  const double tail = std::abs(fourier_integrand_serial(phi, nu, req.K, std::span<const double>(&req.lambda_max, 1))[0]);
  // The integrand decays like lambda^-2, so lambda_max * tail estimates the truncation error.
  const double slack = std::max(kNegativeClip, kTruncationSlack * req.lambda_max * tail);
  if (total < 0.0) {
    if (total < -slack) throw NumericalError("fourier integral produced a negative price, nu likely outside the admissible strip");
    total = 0.0;
  }
  return {total, tail, static_cast<long>(rule.x.size()) + 1};
}

}  // namespace

int model_rank(const ModelParams& m) {
  if (const auto* j = std::get_if<JumpModelParams>(&m)) return j->rank();
  return std::get<WishartModelParams>(m).rank;
}

ModelParams truncate_model(const ModelParams& m, int N) {
  if (const auto* j = std::get_if<JumpModelParams>(&m)) return j->truncated(N);
  return std::get<WishartModelParams>(m).truncated(N);
}

double PricingRequest::damping() const { return nu.value_or(kind == OptionKind::call ? 2.0 : -1.0); }

void PricingRequest::validate() const {
  std::visit([](const auto& m) { m.validate(); }, model);
  require(K > 0.0 && std::isfinite(K), "pricing: K must be positive");
  require(T0 >= 0.0 && std::isfinite(T0), "pricing: T0 must be nonnegative");
  require(theta >= 0.0 && std::isfinite(theta), "pricing: theta must be nonnegative");
  require(lambda_max > 0.0 && std::isfinite(lambda_max), "pricing: lambda_max must be positive");
  require(lambda_panels >= 1 && lambda_nodes >= lambda_panels && lambda_nodes % lambda_panels == 0,
          "pricing: lambda_nodes must be a positive multiple of lambda_panels");
  require(wishart_steps >= 0, "pricing: wishart_steps must be nonnegative");
  const double v = damping();
  require(std::isfinite(v), "pricing: nu must be finite");
  require(v != 0.0 && v != 1.0, "pricing: nu must avoid the payoff-transform poles at 0 and 1");
  if (kind == OptionKind::call) require(v > 1.0, "pricing: call damping nu must exceed the pole at 1");
  if (kind == OptionKind::put) require(v < 0.0, "pricing: put damping nu must lie below the pole at 0");
}

cplx payoff_transform(double lambda, double nu, double K) {
  if (nu == 0.0 || nu == 1.0) throw ValidationError("payoff transform: nu at a pole (0 or 1)");
  require(K > 0.0, "payoff transform: K must be positive");
  const cplx u(nu, lambda);
  return std::exp(-(u - 1.0) * std::log(K)) / (u * (u - 1.0));
}

TransformEvaluator::TransformEvaluator(const ModelParams& model, const BasisSystem& basis,
                                       const NelsonSiegelCurve& curve, double theta, double t, int wishart_steps)
    : curve_(curve), log_forward_(curve.log_forward(t + theta)) {
  if (const auto* j = std::get_if<JumpModelParams>(&model)) {
    jump_.emplace(*j, basis, theta, t);
  } else {
    const auto& w = std::get<WishartModelParams>(model);
    rank_ = w.rank;
    wishart_.emplace(w, basis, theta, t, wishart_steps > 0 ? wishart_steps : default_wishart_steps(t));
  }
}

cplx TransformEvaluator::operator()(cplx u) const {
  if (jump_) return std::exp(-jump_->phi(u) + u * log_forward_ - jump_->y_pairing(u));
  return wishart_->laplace(u, WishartMatrix::Zero(rank_, rank_), curve_);
}

cplx mgf(const ModelParams& model, const StripPoint& p, const BasisSystem& basis, const NelsonSiegelCurve& curve) {
  std::visit([](const auto& m) { m.validate(); }, model);
  return TransformEvaluator(model, basis, curve, p.theta, p.t)(p.u());
}

std::vector<double> fourier_integrand_serial(const TransformEvaluator& phi, double nu, double K,
                                             std::span<const double> lambdas) {
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    out[i] = std::real(payoff_transform(lambdas[i], nu, K) * phi(cplx(nu, lambdas[i]))) / std::numbers::pi;
  }
  return out;
}

std::vector<double> fourier_integrand_parallel(const TransformEvaluator& phi, double nu, double K,
                                               std::span<const double> lambdas) {
  std::vector<double> out(lambdas.size());
  const long n = static_cast<long>(lambdas.size());
  // Exceptions must not cross the parallel region; record and rethrow after.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = std::real(payoff_transform(lambdas[i], nu, K) * phi(cplx(nu, lambdas[i]))) / std::numbers::pi;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

PriceResult price_option(const PricingRequest& req, const BasisSystem& basis, const NelsonSiegelCurve& curve,
                         Execution exec) {
  req.validate();
  require(model_rank(req.model) <= basis.max_index(), "pricing: truncation rank exceeds the basis size");
  const TransformEvaluator phi(req.model, basis, curve, req.theta, req.T0, req.wishart_steps);
  const FourierOutcome main = fourier_price(phi, req, exec);

  PriceResult result;
  result.price = main.price;
  result.integrand_tail = main.tail;
  result.n_evals = main.evals;
  result.instability_warning = req.T0 < kUnstableHorizon;
  result.parity_gap = std::numeric_limits<double>::quiet_NaN();
  if (req.compute_parity) {
    PricingRequest twin = req;
    twin.kind = other(req.kind);
    twin.nu.reset();
    const FourierOutcome counterpart = fourier_price(phi, twin, exec);
    result.n_evals += counterpart.evals;
    const double call = req.kind == OptionKind::call ? main.price : counterpart.price;
    const double put = req.kind == OptionKind::call ? counterpart.price : main.price;
    result.parity_gap = std::abs(call - put - (curve.forward_price(req.T0 + req.theta) - req.K));
  }
  return result;
}

bool ConvergenceTable::complete() const {
  for (const auto& row : rel_diff)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return true;
}

ConvergenceTable convergence_table(const PricingRequest& tmpl, const BasisSystem& basis,
                                   const NelsonSiegelCurve& curve, std::span<const int> n_values, SweepKind sweep,
                                   std::span<const double> sweep_values, Execution exec) {
  require(!n_values.empty(), "table: N list is empty");
  require(!sweep_values.empty(), "table: sweep values are empty");
  const int baseline = *std::max_element(n_values.begin(), n_values.end());
  require(*std::min_element(n_values.begin(), n_values.end()) >= 1, "table: N values must be positive");
  require(baseline <= model_rank(tmpl.model), "table: baseline N exceeds the model rank");
  if (sweep == SweepKind::beta) {
    require(std::holds_alternative<JumpModelParams>(tmpl.model), "table: beta sweep needs a jump model");
  }

  ConvergenceTable table;
  table.sweep = sweep;
  table.sweep_values.assign(sweep_values.begin(), sweep_values.end());
  table.n_values.assign(n_values.begin(), n_values.end());
  table.baseline_n = baseline;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  table.rel_diff.assign(n_values.size(), std::vector<double>(sweep_values.size(), nan));

  const auto price_at = [&](int N, double value) {
    PricingRequest req = tmpl;
    req.compute_parity = false;
    req.model = truncate_model(tmpl.model, N);
    if (sweep == SweepKind::theta) {
      req.theta = value;
    } else {
      std::get<JumpModelParams>(req.model).beta = value;
    }
    return price_option(req, basis, curve, exec).price;
  };

  for (std::size_t c = 0; c < sweep_values.size(); ++c) {
    double base = nan;
    try {
      base = price_at(baseline, sweep_values[c]);
    } catch (const std::exception& e) {
      table.errors.push_back(e.what());
      continue;
    }
    for (std::size_t r = 0; r < n_values.size(); ++r) {
      try {
        const double p = n_values[r] == baseline ? base : price_at(n_values[r], sweep_values[c]);
        table.rel_diff[r][c] = std::abs(p - base) / base;
      } catch (const std::exception& e) {
        table.errors.push_back(e.what());
      }
    }
  }
  return table;
}

std::string format_percent(double fraction) {
  if (!std::isfinite(fraction)) return "nan";
  // Half-up at the second decimal; the small nudge absorbs binary representation error.
  const double cents = std::floor(fraction * 1e4 + 0.5 + 1e-9);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", cents / 100.0);
  return buf;
}

void write_table_csv(std::ostream& os, const ConvergenceTable& table) {
  os << (table.sweep == SweepKind::theta ? "theta" : "beta") << ",N,rel_diff_percent\n";
  for (std::size_t r = 0; r < table.n_values.size(); ++r) {
    for (std::size_t c = 0; c < table.sweep_values.size(); ++c) {
      char value[64];
      std::snprintf(value, sizeof value, "%.10g", table.sweep_values[c]);
      os << value << ',' << table.n_values[r] << ',' << format_percent(table.rel_diff[r][c]) << '\n';
    }
  }
}

}  // namespace fwdaffine
