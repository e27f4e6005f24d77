#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "fwdaffine/basis.hpp"
#include "fwdaffine/curve.hpp"
#include "fwdaffine/riccati_jump.hpp"

namespace fwdaffine {

constexpr int kMaxWishartRank = 16;

using WishartMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxWishartRank, kMaxWishartRank>;
using WishartVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxWishartRank, 1>;

struct WishartModelParams {
  int rank = 5;
  int dof = 5;
  std::vector<double> q;   // diagonal of Q
  std::vector<double> a;   // mean reversion, drift operator -diag(a)
  std::vector<double> d;   // diagonal of D
  std::vector<double> y0;  // eigenvalues of Y_0
  CurveFunction h0 = CurveFunction::constant(1.0);
  // Adds the linear -D^{1/2} h (x) D^{1/2} Upsilon forcing with Upsilon = -1/2 S*(.) h0,
  // which makes the log-forward drift -v/2.
  bool drift_correction = true;

  // q = a = 1/k^2, d = 1/(2k^2), y0 = q, dof = rank.
  static WishartModelParams defaults(int rank);

  WishartModelParams truncated(int r) const;
  void validate() const;
};

struct RiccatiMatrixState {
  WishartMatrix F;
  cplx P = 0.0;
  double t = 0.0;
};

int default_wishart_steps(double t);

// One explicit Euler step
//   F += d/2 (FN + NF) - d/4 u^2 B B^T - d/4 (FNF + FNF^T + F^T NF + F^T NF^T)
// with N = diag(q), B_k = sqrt(2 d_k) f_k(t + theta), and P += d * dof * 1/2 sum_k N_kk F_kk.
RiccatiMatrixState wishart_riccati_step(const RiccatiMatrixState& state, const StripPoint& p,
                                        const WishartModelParams& m, const BasisSystem& basis, double delta);

// Forcing vectors precomputed on the step grid; each solve() is then pure matrix work.
class WishartRiccatiSolver {
 public:
  WishartRiccatiSolver(const WishartModelParams& m, const BasisSystem& basis, double theta, double t, int steps);

  RiccatiMatrixState solve(cplx u, const WishartMatrix& u2) const;
  cplx laplace(cplx u, const WishartMatrix& u2, const NelsonSiegelCurve& X0) const;
  int steps() const { return steps_; }

 private:
  WishartModelParams m_;
  double theta_;
  double t_;
  int steps_;
  double delta_;
  std::vector<WishartVector> b_;
  std::vector<WishartVector> c_;
};

cplx wishart_laplace(const StripPoint& p, const WishartModelParams& m, const BasisSystem& basis,
                     const WishartMatrix& u2, const NelsonSiegelCurve& X0, int steps);

}  // namespace fwdaffine
