#include "fwdaffine/riccati_jump.hpp"

#include <array>
#include <cmath>

#include "fwdaffine/errors.hpp"
#include "fwdaffine/quadrature.hpp"

namespace fwdaffine {

namespace {

std::vector<double> inverse_square_half(int N) {
  std::vector<double> v(N);
  for (int n = 1; n <= N; ++n) v[n - 1] = 1.0 / (2.0 * n * n);
  return v;
}

double drift_weight(DriftConvention c) { return c == DriftConvention::published ? 1.0 : -0.5; }

}  // namespace

JumpModelParams JumpModelParams::levy(int N, double beta) {
  require(N >= 1, "jump model: N must be at least 1");
  JumpModelParams m;
  m.beta = beta;
  m.d = inverse_square_half(N);
  m.a.assign(N, 0.0);
  m.y0 = m.d;
  return m;
}

JumpModelParams JumpModelParams::bns(int N, double beta) {
  JumpModelParams m = levy(N, beta);
  m.a = inverse_square_half(N);
  return m;
}

bool JumpModelParams::is_levy() const {
  for (double v : a) if (v != 0.0) return false;
  return true;
}

JumpModelParams JumpModelParams::truncated(int N) const {
  require(N >= 1 && N <= rank(), "jump model: truncation rank out of range");
  JumpModelParams m = *this;
  m.d.resize(N);
  m.a.resize(N);
  m.y0.resize(N);
  return m;
}

void JumpModelParams::validate() const {
  require(beta > 0.0 && std::isfinite(beta), "jump model: beta must be positive");
  require(!d.empty(), "jump model: N must be at least 1");
  require(a.size() == d.size() && y0.size() == d.size(), "jump model: d, a and y0 must all have length N");
  for (double v : d) require(v > 0.0 && std::isfinite(v), "jump model: d coefficients must be positive");
  for (double v : a) require(v >= 0.0 && std::isfinite(v), "jump model: a coefficients must be nonnegative");
  for (double v : y0) require(v >= 0.0 && std::isfinite(v), "jump model: y0 coefficients must be nonnegative");
}

ModeIntegrals mode_integrals(const JumpModelParams& m, const BasisSystem& basis, double theta, double s, int nodes) {
  const int N = m.rank();
  require(N <= basis.max_index(), "jump model: N exceeds the basis size");
  require(s >= 0.0 && theta >= 0.0, "riccati: horizon and theta must be nonnegative");
  ModeIntegrals out{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
  if (s == 0.0) return out;

  const auto h0_const = m.h0.constant_value();
  std::vector<double> c_fixed;
  if (m.drift == DriftConvention::published) {
    c_fixed.resize(N);
    for (int n = 1; n <= N; ++n) c_fixed[n - 1] = basis.c_coefficient(n, theta, m.h0);
  }

  const GaussLegendre& gl = gauss_legendre(nodes);
  const double half = 0.5 * s;
  std::array<double, 64> f{};
  const std::span<double> fs(f.data(), static_cast<std::size_t>(N));
  for (int i = 0; i < gl.order(); ++i) {
    const double r = half * (1.0 + gl.nodes()[i]);
    const double w = half * gl.weights()[i];
    basis.f_all(r + theta, fs);
    for (int n = 0; n < N; ++n) {
      const double kw = m.a[n] == 0.0 ? w : w * std::exp(-2.0 * m.a[n] * (s - r));
      double c;
      if (m.drift == DriftConvention::published) {
        c = c_fixed[n];
      } else if (h0_const) {
        c = *h0_const * f[n];
      } else {
        c = basis.c_coefficient(n + 1, theta + r, m.h0);
      }
      out.quad[n] += kw * f[n] * f[n];
      out.lin[n] += kw * f[n] * c;
    }
  }
  return out;
}

PairingCoefficients pairing_coefficients(const JumpModelParams& m, const ModeIntegrals& mi,
                                         const std::vector<double>& y) {
  const double kappa = drift_weight(m.drift);
  PairingCoefficients pc;
  for (std::size_t n = 0; n < mi.quad.size(); ++n) {
    const double yd = y[n] * m.d[n];
    pc.quad += 0.5 * yd * mi.quad[n];
    pc.lin += kappa * yd * mi.lin[n];
  }
  return pc;
}

JumpRiccatiKernel::JumpRiccatiKernel(const JumpModelParams& m, const BasisSystem& basis, double theta, double t,
                                     int nodes)
    : beta_(m.beta), t_(t) {
  m.validate();
  require(t >= 0.0, "riccati: horizon must be nonnegative");
  const ModeIntegrals end = mode_integrals(m, basis, theta, t, nodes);
  d_end_ = pairing_coefficients(m, end, m.d);
  y_end_ = pairing_coefficients(m, end, m.y0);
  if (t == 0.0) return;
  const GaussLegendre& gl = gauss_legendre(nodes);
  const double half = 0.5 * t;
  for (int k = 0; k < gl.order(); ++k) {
    const double s = half * (1.0 + gl.nodes()[k]);
    weights_.push_back(half * gl.weights()[k]);
    d_nodes_.push_back(pairing_coefficients(m, mode_integrals(m, basis, theta, s, nodes), m.d));
  }
}

cplx JumpRiccatiKernel::phi(cplx u) const {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) acc += weights_[k] * (1.0 - std::exp(-d_nodes_[k].eval(u)));
  return beta_ * acc;
}

cplx d_psi2_pairing_levy(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis, double s) {
  require(m.is_levy(), "levy pairing requires all a coefficients to be zero");
  return d_psi2_pairing_bns(p, m, basis, s);
}

cplx d_psi2_pairing_bns(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis, double t) {
  m.validate();
  return pairing_coefficients(m, mode_integrals(m, basis, p.theta, t), m.d).eval(p.u());
}

cplx phi_levy(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis) {
  require(m.is_levy(), "levy phi requires all a coefficients to be zero");
  return phi_bns(p, m, basis);
}

cplx phi_bns(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis) {
  return JumpRiccatiKernel(m, basis, p.theta, p.t).phi(p.u());
}

cplx y_pairing_levy(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis) {
  require(m.is_levy(), "levy pairing requires all a coefficients to be zero");
  return y_pairing(p, m, basis);
}

cplx y_pairing(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis) {
  m.validate();
  return pairing_coefficients(m, mode_integrals(m, basis, p.theta, p.t), m.y0).eval(p.u());
}

cplx x_pairing(const StripPoint& p, const NelsonSiegelCurve& X0) { return p.u() * X0.log_forward(p.t + p.theta); }

RiccatiEvaluation evaluate_riccati(const StripPoint& p, const JumpModelParams& m, const BasisSystem& basis,
                                   const NelsonSiegelCurve& X0) {
  const JumpRiccatiKernel kernel(m, basis, p.theta, p.t);
  return {kernel.phi(p.u()), x_pairing(p, X0), kernel.y_pairing(p.u())};
}

}  // namespace fwdaffine
