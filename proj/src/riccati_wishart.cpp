#include "fwdaffine/riccati_wishart.hpp"

#include <cmath>

#include "fwdaffine/errors.hpp"

namespace fwdaffine {

namespace {

constexpr double kBlowUp = 1e12;
constexpr double kSymmetryTolerance = 1e-10;

WishartVector forcing_vector(const WishartModelParams& m, const BasisSystem& basis, double x) {
  std::vector<double> f(m.rank);
  basis.f_all(x, f);
  WishartVector b(m.rank);
  for (int k = 0; k < m.rank; ++k) b[k] = std::sqrt(2.0 * m.d[k]) * f[k];
  return b;
}

WishartVector drift_vector(const WishartModelParams& m, const BasisSystem& basis, double x) {
  if (m.h0.constant_value()) return *m.h0.constant_value() * forcing_vector(m, basis, x);
  WishartVector c(m.rank);
  for (int k = 0; k < m.rank; ++k) c[k] = std::sqrt(2.0 * m.d[k]) * basis.c_coefficient(k + 1, x, m.h0);
  return c;
}

RiccatiMatrixState euler_step(const RiccatiMatrixState& s, const WishartModelParams& m, cplx u,
                              const WishartVector& b, const WishartVector* c, double delta) {
  const int r = m.rank;
  WishartVector n(r);
  for (int k = 0; k < r; ++k) n[k] = m.q[k];
  const auto N = n.asDiagonal();

  const WishartMatrix& F = s.F;
  const WishartMatrix Ft = F.transpose();
  const WishartMatrix FN = F * N;
  const WishartMatrix FtN = Ft * N;
  const WishartMatrix quadratic = FN * F + FN * Ft + FtN * F + FtN * Ft;
  const WishartMatrix bb = (b * b.transpose()).cast<cplx>();

  RiccatiMatrixState out;
  out.F = F + (0.5 * delta) * (FN + N * F) - (0.25 * delta) * (u * u) * bb - (0.25 * delta) * quadratic;
  if (c != nullptr) {
    const WishartMatrix bc = (b * c->transpose() + *c * b.transpose()).cast<cplx>();
    out.F += (0.125 * delta) * u * bc;
  }
  cplx trace = 0.0;
  for (int k = 0; k < r; ++k) trace += n[k] * F(k, k);
  out.P = s.P + delta * m.dof * 0.5 * trace;
  out.t = s.t + delta;

  const double peak = out.F.cwiseAbs().maxCoeff();
  if (!std::isfinite(peak) || peak > kBlowUp) throw NumericalError("wishart riccati: blow-up, reduce the step size");
  return out;
}

void check_symmetry(const WishartMatrix& F) {
  const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
  if ((F - F.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw NumericalError("wishart riccati: Gram matrix lost symmetry");
  }
}

std::vector<double> inverse_square(int r, double scale) {
  std::vector<double> v(r);
  for (int k = 1; k <= r; ++k) v[k - 1] = scale / (static_cast<double>(k) * k);
  return v;
}

}  // namespace

WishartModelParams WishartModelParams::defaults(int rank) {
  require(rank >= 1 && rank <= kMaxWishartRank, "wishart: rank out of range");
  WishartModelParams m;
  m.rank = rank;
  m.dof = rank;
  m.q = inverse_square(rank, 1.0);
  m.a = inverse_square(rank, 1.0);
  m.d = inverse_square(rank, 0.5);
  m.y0 = m.q;
  return m;
}

WishartModelParams WishartModelParams::truncated(int r) const {
  require(r >= 1 && r <= rank, "wishart: truncation rank out of range");
  WishartModelParams m = *this;
  m.rank = r;
  m.q.resize(r);
  m.a.resize(r);
  m.d.resize(r);
  m.y0.resize(r);
  m.dof = dof == rank ? r : dof;
  return m;
}

void WishartModelParams::validate() const {
  require(rank >= 1 && rank <= kMaxWishartRank, "wishart: rank must be in [1, 16]");
  require(dof >= 1, "wishart: dof must be positive");
  const auto sized = [&](const std::vector<double>& v) { return static_cast<int>(v.size()) == rank; };
  require(sized(q) && sized(a) && sized(d) && sized(y0), "wishart: q, a, d and y0 must all have length rank");
  for (double v : q) require(v > 0.0 && std::isfinite(v), "wishart: q coefficients must be positive");
  for (double v : a) require(v >= 0.0 && std::isfinite(v), "wishart: a coefficients must be nonnegative");
  for (double v : d) require(v > 0.0 && std::isfinite(v), "wishart: d coefficients must be positive");
  for (double v : y0) require(v >= 0.0 && std::isfinite(v), "wishart: y0 eigenvalues must be nonnegative");
}

int default_wishart_steps(double t) { return t <= 1.0 ? 512 : static_cast<int>(std::ceil(512.0 * t)); }

RiccatiMatrixState wishart_riccati_step(const RiccatiMatrixState& state, const StripPoint& p,
                                        const WishartModelParams& m, const BasisSystem& basis, double delta) {
  m.validate();
  require(delta > 0.0, "wishart riccati: step must be positive");
  require(state.F.rows() == m.rank && state.F.cols() == m.rank, "wishart riccati: state size differs from rank");
  require(m.rank <= basis.max_index(), "wishart: rank exceeds the basis size");
  const double x = state.t + p.theta;
  const WishartVector b = forcing_vector(m, basis, x);
  if (!m.drift_correction) return euler_step(state, m, p.u(), b, nullptr, delta);
  const WishartVector c = drift_vector(m, basis, x);
  return euler_step(state, m, p.u(), b, &c, delta);
}

WishartRiccatiSolver::WishartRiccatiSolver(const WishartModelParams& m, const BasisSystem& basis, double theta,
                                           double t, int steps)
    : m_(m), theta_(theta), t_(t), steps_(steps), delta_(steps > 0 ? t / steps : 0.0) {
  m.validate();
  require(m.rank <= basis.max_index(), "wishart: rank exceeds the basis size");
  require(t >= 0.0 && theta >= 0.0, "wishart: horizon and theta must be nonnegative");
  require(steps >= 1, "wishart: steps must be at least 1");
  if (t == 0.0) return;
  b_.reserve(steps);
  for (int j = 0; j < steps; ++j) {
    const double x = j * delta_ + theta;
    b_.push_back(forcing_vector(m, basis, x));
    if (m.drift_correction) c_.push_back(drift_vector(m, basis, x));
  }
}

RiccatiMatrixState WishartRiccatiSolver::solve(cplx u, const WishartMatrix& u2) const {
  require(u2.rows() == m_.rank && u2.cols() == m_.rank, "wishart: u2 size differs from rank");
  require((u2 - u2.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance * std::max(1.0, u2.cwiseAbs().maxCoeff()),
          "wishart: u2 must be symmetric");
  RiccatiMatrixState s{u2, 0.0, 0.0};
  for (std::size_t j = 0; j < b_.size(); ++j) {
    s = euler_step(s, m_, u, b_[j], m_.drift_correction ? &c_[j] : nullptr, delta_);
    check_symmetry(s.F);
  }
  s.t = t_;
  return s;
}

cplx WishartRiccatiSolver::laplace(cplx u, const WishartMatrix& u2, const NelsonSiegelCurve& X0) const {
  const RiccatiMatrixState s = solve(u, u2);
  cplx trace = 0.0;
  for (int k = 0; k < m_.rank; ++k) trace += m_.y0[k] * s.F(k, k);
  return std::exp(-s.P + u * X0.log_forward(t_ + theta_) - trace);
}

cplx wishart_laplace(const StripPoint& p, const WishartModelParams& m, const BasisSystem& basis,
                     const WishartMatrix& u2, const NelsonSiegelCurve& X0, int steps) {
  return WishartRiccatiSolver(m, basis, p.theta, p.t, steps).laplace(p.u(), u2, X0);
}

}  // namespace fwdaffine
