#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fwdaffine/basis.hpp"
#include "fwdaffine/curve.hpp"
#include "fwdaffine/parallel.hpp"
#include "fwdaffine/riccati_jump.hpp"
#include "fwdaffine/riccati_wishart.hpp"

namespace fwdaffine {

enum class OptionKind { call, put };

using ModelParams = std::variant<JumpModelParams, WishartModelParams>;

int model_rank(const ModelParams& m);
ModelParams truncate_model(const ModelParams& m, int N);

struct PricingRequest {
  ModelParams model = JumpModelParams::levy(10);
  double T0 = 1.0;
  double theta = 1.0;
  double K = 1.0;
  OptionKind kind = OptionKind::call;
  std::optional<double> nu;  // defaults: 2 for calls, -1 for puts
  double lambda_max = 200.0;
  int lambda_nodes = 2048;
  int lambda_panels = 32;
  int wishart_steps = 0;  // 0 selects default_wishart_steps(T0)
  bool compute_parity = true;

  double damping() const;
  void validate() const;
};

struct PriceResult {
  double price = 0.0;
  double integrand_tail = 0.0;  // |integrand| at lambda_max
  double parity_gap = 0.0;      // |C - P - (F(0,T1) - K)|; NaN when not computed
  long n_evals = 0;
  bool instability_warning = false;  // T0 < 1e-2
};

// g(lambda) = K^{-(nu - 1 + i lambda)} / ((nu + i lambda)(nu - 1 + i lambda))
cplx payoff_transform(double lambda, double nu, double K);

// E[exp(u X(T0, theta))] for fixed model, theta and horizon, as a function of u.
class TransformEvaluator {
 public:
  TransformEvaluator(const ModelParams& model, const BasisSystem& basis, const NelsonSiegelCurve& curve, double theta,
                     double t, int wishart_steps = 0);
  cplx operator()(cplx u) const;

 private:
  NelsonSiegelCurve curve_;
  double log_forward_;
  std::optional<JumpRiccatiKernel> jump_;
  std::optional<WishartRiccatiSolver> wishart_;
  int rank_ = 0;
};

cplx mgf(const ModelParams& model, const StripPoint& p, const BasisSystem& basis, const NelsonSiegelCurve& curve);

// Re[g(lambda) * MGF(nu + i lambda)] / pi at each lambda.
std::vector<double> fourier_integrand_serial(const TransformEvaluator& phi, double nu, double K,
                                             std::span<const double> lambdas);
std::vector<double> fourier_integrand_parallel(const TransformEvaluator& phi, double nu, double K,
                                               std::span<const double> lambdas);

PriceResult price_option(const PricingRequest& req, const BasisSystem& basis, const NelsonSiegelCurve& curve,
                         Execution exec = Execution::parallel);

enum class SweepKind { theta, beta };

struct ConvergenceTable {
  SweepKind sweep = SweepKind::theta;
  std::vector<double> sweep_values;
  std::vector<int> n_values;
  int baseline_n = 0;
  std::vector<std::vector<double>> rel_diff;  // [n index][sweep index], fraction; NaN on failure
  std::vector<std::string> errors;

  bool complete() const;
};

// |price(N) - price(N_max)| / price(N_max) for every N and sweep value.
ConvergenceTable convergence_table(const PricingRequest& tmpl, const BasisSystem& basis,
                                   const NelsonSiegelCurve& curve, std::span<const int> n_values, SweepKind sweep,
                                   std::span<const double> sweep_values, Execution exec = Execution::parallel);

// Percent with two decimals, rounded half up.
std::string format_percent(double fraction);
void write_table_csv(std::ostream& os, const ConvergenceTable& table);

}  // namespace fwdaffine
