#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fwdaffine/basis.hpp"
#include "fwdaffine/curve.hpp"
#include "fwdaffine/parallel.hpp"
#include "fwdaffine/pricer.hpp"

namespace fwdaffine {

struct McConfig {
  long n_paths = 100000;
  int n_steps = 64;
  std::uint64_t seed = 42;
  bool antithetic = true;
  bool clip_psd = true;  // Wishart: project Y back onto the PSD cone every step

  void validate() const;
  long samples() const { return antithetic ? n_paths / 2 : n_paths; }
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_effective = 0;
};

struct McComplexEstimate {
  cplx mean;
  double std_error_re = 0.0;
  double std_error_im = 0.0;
  long n_effective = 0;
};

struct McJumpResult {
  McEstimate price;
  McEstimate forward;         // E[F(T0, T1)]
  bool coarse_steps = false;  // beta * T0 / n_steps > 0.1
};

struct McMgfResult {
  std::vector<McComplexEstimate> values;  // one per lambda
  double clip_fraction = 0.0;             // steps clipped by more than 1e-8
  double negative_fraction = 0.0;         // steps with min eigenvalue below -1e-6 before projection
};

// Independent engine per sample index; results do not depend on how samples are split across threads.
std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index);

McEstimate summarize(std::span<const double> samples);
McComplexEstimate summarize(std::span<const cplx> samples);

// Log-forward Z(s) = log F(s, T0 + theta) with exact compound Poisson jumps in the volatility
// and exact conditional Gaussian increments between grid points.
McJumpResult mc_price_jump(const JumpModelParams& model, const PricingRequest& req, const BasisSystem& basis,
                           const NelsonSiegelCurve& curve, const McConfig& cfg, Execution exec = Execution::parallel);

// Empirical E[exp((nu + i lambda) Z(T0) - Tr(Y(T0) u2))] under Euler dynamics for the matrix Y.
McMgfResult mc_mgf_wishart(const WishartModelParams& model, double nu, std::span<const double> lambdas, double theta,
                           const Eigen::MatrixXd& u2, double T0, const BasisSystem& basis,
                           const NelsonSiegelCurve& curve, const McConfig& cfg, Execution exec = Execution::parallel);

}  // namespace fwdaffine
