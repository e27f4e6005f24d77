#pragma once

#include <complex>
#include <vector>

#include "fwdaffine/basis.hpp"
#include "fwdaffine/curve.hpp"

namespace fwdaffine {

using cplx = std::complex<double>;

// How the linear term of the volatility Riccati equation pairs the basis with S*(.) h0.
//   martingale: Upsilon = -1/2 S*(theta + s) h0 along the Riccati time; with h0 = 1 the
//               log-forward drift is -v/2 and F(., T1) is a martingale.
//   published:  the "+2 c_k(theta) / u" grouping with c_k frozen at theta.
enum class DriftConvention { martingale, published };

struct JumpModelParams {
  double beta = 1.0;
  std::vector<double> d;   // eigenvalues of D
  std::vector<double> a;   // mean reversion; all zero is the pure-jump Levy model
  std::vector<double> y0;  // eigenvalues of Y_0
  CurveFunction h0 = CurveFunction::constant(1.0);
  DriftConvention drift = DriftConvention::martingale;

  // d_n = 1/(2n^2), y0 = d; a = 0 (Levy) or a_n = 1/(2n^2) (BNS).
  static JumpModelParams levy(int N, double beta = 1.0);
  static JumpModelParams bns(int N, double beta = 1.0);

  int rank() const { return static_cast<int>(d.size()); }
  bool is_levy() const;
  JumpModelParams truncated(int N) const;
  void validate() const;
};

// u = (nu + i lambda) u_theta evaluated over a horizon t.
struct StripPoint {
  double nu = 2.0;
  double lambda = 0.0;
  double theta = 0.0;
  double t = 0.0;
  cplx u() const { return {nu, lambda}; }
};

struct RiccatiEvaluation {
  cplx phi;
  cplx x_pairing;
  cplx y_pairing;
};

// Per-mode time integrals of the volatility Riccati solution at horizon s:
//   quad[n] = int_0^s K_n f_n(r+theta)^2 dr,  lin[n] = int_0^s K_n f_n(r+theta) c_n(.) dr
// with K_n = exp(-2 a_n (s - r)).
struct ModeIntegrals {
  std::vector<double> quad;
  std::vector<double> lin;
};

ModeIntegrals mode_integrals(const JumpModelParams& m, const BasisSystem& basis, double theta, double s,
                             int nodes = 64);

// <D, psi2(s, u)> = -(u^2 quad + u lin) with these real coefficients.
struct PairingCoefficients {
  double quad = 0.0;
  double lin = 0.0;
  cplx eval(cplx u) const { return -(u * u * quad + u * lin); }
};

PairingCoefficients pairing_coefficients(const JumpModelParams& m, const ModeIntegrals& mi,
                                         const std::vector<double>& y);

// lambda-independent precomputation for fixed (model, theta, t); read-only afterwards.
class JumpRiccatiKernel {
 public:
  JumpRiccatiKernel(const JumpModelParams& m, const BasisSystem& basis, double theta, double t, int nodes = 64);

  double horizon() const { return t_; }
  cplx d_pairing(cplx u) const { return d_end_.eval(u); }
  cplx y_pairing(cplx u) const { return y_end_.eval(u); }
  cplx phi(cplx u) const;

 private:
  double beta_;
  double t_;
  std::vector<double> weights_;
  std::vector<PairingCoefficients> d_nodes_;
  PairingCoefficients d_end_;
  PairingCoefficients y_end_;
};

cplx d_psi2_pairing_levy(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis, double s);
cplx d_psi2_pairing_bns(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis, double t);
cplx phi_levy(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis);
cplx phi_bns(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis);
cplx y_pairing_levy(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis);
cplx y_pairing(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis);
cplx x_pairing(const StripPoint& p, const NelsonSiegelCurve& X0);

RiccatiEvaluation evaluate_riccati(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis,
                                   const NelsonSiegelCurve& X0);

}  // namespace fwdaffine
