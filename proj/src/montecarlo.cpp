#include "fwdaffine/montecarlo.hpp"

#include <omp.h>

#include <array>
#include <cmath>
#include <exception>

#include "fwdaffine/errors.hpp"
#include "fwdaffine/quadrature.hpp"

namespace fwdaffine {

namespace {

constexpr int kSubCells = 8;
constexpr int kCellNodes = 8;
constexpr double kClipThreshold = 1e-8;
constexpr double kNegativeThreshold = -1e-6;
constexpr double kMaxClipFraction = 0.05;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class Fn>
void for_each_sample(long n, Execution exec, Fn&& fn) {
  if (exec == Execution::serial) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Cumulative integrals along calendar time s in [0, T0], per mode:
//   var[n](s)   = int_0^s d_n e^{-2 a_n r} f_n(T1 - r)^2 dr
//   drift[n](s) = int_0^s kappa d_n e^{-2 a_n r} f_n(T1 - r) c_n dr
// tabulated on a fine grid; off-grid values add one Gauss-Legendre cell.
class JumpCumulants {
 public:
  JumpCumulants(const JumpModelParams& m, const BasisSystem& basis, double T0, double theta, int n_steps)
      : m_(m), basis_(basis), T1_(T0 + theta), N_(m.rank()), cells_(n_steps * kSubCells), h_(T0 / cells_),
        kappa_(m.drift == DriftConvention::published ? 1.0 : -0.5) {
    if (m.drift == DriftConvention::published) {
      for (int n = 1; n <= N_; ++n) c_fixed_.push_back(basis.c_coefficient(n, theta, m.h0));
    }
    var_.assign(static_cast<std::size_t>(cells_ + 1) * N_, 0.0);
    drift_.assign(var_.size(), 0.0);
    std::vector<double> v(N_), d(N_);
    for (int j = 0; j < cells_; ++j) {
      cell(j * h_, (j + 1) * h_, v, d);
      for (int n = 0; n < N_; ++n) {
        var_[(j + 1) * N_ + n] = var_[j * N_ + n] + v[n];
        drift_[(j + 1) * N_ + n] = drift_[j * N_ + n] + d[n];
      }
    }
  }

  int modes() const { return N_; }
  const double* var_at_grid(int j) const { return &var_[static_cast<std::size_t>(j) * N_]; }
  const double* drift_at_grid(int j) const { return &drift_[static_cast<std::size_t>(j) * N_]; }
  int grid_index_for_step(int k) const { return k * kSubCells; }

  void at(double s, std::span<double> var, std::span<double> drift) const {
    int j = static_cast<int>(s / h_);
    j = std::clamp(j, 0, cells_ - 1);
    std::array<double, 64> v{}, d{};
    cell(j * h_, s, std::span<double>(v.data(), N_), std::span<double>(d.data(), N_));
    for (int n = 0; n < N_; ++n) {
      var[n] = var_at_grid(j)[n] + v[n];
      drift[n] = drift_at_grid(j)[n] + d[n];
    }
  }

 private:
  void cell(double a, double b, std::span<double> v, std::span<double> d) const {
    std::fill(v.begin(), v.end(), 0.0);
    std::fill(d.begin(), d.end(), 0.0);
    if (b <= a) return;
    const GaussLegendre& gl = gauss_legendre(kCellNodes);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    std::array<double, 64> f{};
    const auto h0c = m_.h0.constant_value();
    for (int i = 0; i < gl.order(); ++i) {
      const double r = mid + half * gl.nodes()[i];
      const double w = half * gl.weights()[i];
      const double x = T1_ - r;
      basis_.f_all(x, std::span<double>(f.data(), N_));
      for (int n = 0; n < N_; ++n) {
        double c;
        if (!c_fixed_.empty()) {
          c = c_fixed_[n];
        } else if (h0c) {
          c = *h0c * f[n];
        } else {
          c = basis_.c_coefficient(n + 1, x, m_.h0);
        }
        const double kw = w * m_.d[n] * (m_.a[n] == 0.0 ? 1.0 : std::exp(-2.0 * m_.a[n] * r));
        v[n] += kw * f[n] * f[n];
        d[n] += kw * kappa_ * f[n] * c;
      }
    }
  }

  const JumpModelParams& m_;
  const BasisSystem& basis_;
  double T1_;
  int N_;
  int cells_;
  double h_;
  double kappa_;
  std::vector<double> c_fixed_;
  std::vector<double> var_;
  std::vector<double> drift_;
};

}  // namespace

void McConfig::validate() const {
  require(n_paths >= 100, "mc: n_paths must be at least 100");
  require(n_steps >= 1, "mc: n_steps must be at least 1");
}

std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

McEstimate summarize(std::span<const double> samples) {
  McEstimate e;
  e.n_effective = static_cast<long>(samples.size());
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double v : samples) sum += v;
  e.mean = sum / samples.size();
  double ss = 0.0;
  for (double v : samples) ss += (v - e.mean) * (v - e.mean);
  if (samples.size() > 1) e.std_error = std::sqrt(ss / (samples.size() - 1) / samples.size());
  return e;
}

McComplexEstimate summarize(std::span<const cplx> samples) {
  std::vector<double> re(samples.size()), im(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    re[i] = samples[i].real();
    im[i] = samples[i].imag();
  }
  const McEstimate r = summarize(re), i = summarize(im);
  return {cplx(r.mean, i.mean), r.std_error, i.std_error, r.n_effective};
}

McJumpResult mc_price_jump(const JumpModelParams& model, const PricingRequest& req, const BasisSystem& basis,
                           const NelsonSiegelCurve& curve, const McConfig& cfg, Execution exec) {
  model.validate();
  cfg.validate();
  require(req.T0 >= 0.0 && req.theta >= 0.0, "mc: T0 and theta must be nonnegative");
  require(req.K >= 0.0, "mc: K must be nonnegative");
  require(model.rank() <= basis.max_index(), "mc: N exceeds the basis size");

  const int N = model.rank();
  const int steps = cfg.n_steps;
  const double T0 = req.T0;
  const double z0 = curve.log_forward(T0 + req.theta);
  const JumpCumulants cum(model, basis, T0, req.theta, steps);
  const long n = cfg.samples();
  const bool call = req.kind == OptionKind::call;
  const double K = req.K;

  std::vector<double> payoff(n), forward(n);
  for_each_sample(n, exec, [&](long i) {
    std::mt19937_64 eng = sample_engine(cfg.seed, static_cast<std::uint64_t>(i));
    std::exponential_distribution<double> arrival(model.beta);
    std::normal_distribution<double> normal;
    std::array<double, 64> W{}, cv{}, cd{}, tv{}, td{};
    for (int k = 0; k < N; ++k) W[k] = model.y0[k];
    double zp = z0, zm = z0;
    double next = arrival(eng);
    for (int k = 0; k < steps; ++k) {
      const double b = T0 * (k + 1) / steps;
      const double* gv = cum.var_at_grid(cum.grid_index_for_step(k));
      const double* gd = cum.drift_at_grid(cum.grid_index_for_step(k));
      for (int m = 0; m < N; ++m) {
        cv[m] = gv[m];
        cd[m] = gd[m];
      }
      double var = 0.0, mu = 0.0;
      while (next < b) {
        cum.at(next, std::span<double>(tv.data(), N), std::span<double>(td.data(), N));
        for (int m = 0; m < N; ++m) {
          var += W[m] * (tv[m] - cv[m]);
          mu += W[m] * (td[m] - cd[m]);
          W[m] += model.d[m] * (model.a[m] == 0.0 ? 1.0 : std::exp(2.0 * model.a[m] * next));
          cv[m] = tv[m];
          cd[m] = td[m];
        }
        next += arrival(eng);
      }
      const double* ev = cum.var_at_grid(cum.grid_index_for_step(k + 1));
      const double* ed = cum.drift_at_grid(cum.grid_index_for_step(k + 1));
      for (int m = 0; m < N; ++m) {
        var += W[m] * (ev[m] - cv[m]);
        mu += W[m] * (ed[m] - cd[m]);
      }
      const double shock = std::sqrt(std::max(var, 0.0)) * normal(eng);
      zp += mu + shock;
      zm += mu - shock;
    }
    const auto pay = [&](double z) { return call ? std::max(std::exp(z) - K, 0.0) : std::max(K - std::exp(z), 0.0); };
    if (cfg.antithetic) {
      payoff[i] = 0.5 * (pay(zp) + pay(zm));
      forward[i] = 0.5 * (std::exp(zp) + std::exp(zm));
    } else {
      payoff[i] = pay(zp);
      forward[i] = std::exp(zp);
    }
  });

  McJumpResult out;
  out.price = summarize(payoff);
  out.forward = summarize(forward);
  out.coarse_steps = model.beta * T0 / steps > 0.1;
  return out;
}

McMgfResult mc_mgf_wishart(const WishartModelParams& model, double nu, std::span<const double> lambdas, double theta,
                           const Eigen::MatrixXd& u2, double T0, const BasisSystem& basis,
                           const NelsonSiegelCurve& curve, const McConfig& cfg, Execution exec) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxWishartRank, kMaxWishartRank>;
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxWishartRank, 1>;

  model.validate();
  cfg.validate();
  const int r = model.rank;
  require(r <= 8, "mc: wishart simulation supports rank up to 8");
  require(r <= basis.max_index(), "mc: rank exceeds the basis size");
  require(u2.rows() == r && u2.cols() == r, "mc: u2 size differs from rank");
  require(T0 >= 0.0 && theta >= 0.0, "mc: T0 and theta must be nonnegative");

  const int steps = cfg.n_steps;
  const double h = T0 / steps;
  const double sqh = std::sqrt(h);
  const double T1 = T0 + theta;
  const double z0 = curve.log_forward(T1);

  // Loadings b_k = sqrt(d_k) f_k(T1 - s) and drift weights sqrt(d_k) c_k(T1 - s) at each step start.
  std::vector<Vec> load(steps), weight(steps);
  for (int k = 0; k < steps; ++k) {
    const double x = T1 - k * h;
    std::vector<double> f(r);
    basis.f_all(x, f);
    load[k].resize(r);
    weight[k].resize(r);
    for (int j = 0; j < r; ++j) {
      load[k][j] = std::sqrt(model.d[j]) * f[j];
      const auto c = model.h0.constant_value();
      weight[k][j] = std::sqrt(model.d[j]) * (c ? *c * f[j] : basis.c_coefficient(j + 1, x, model.h0));
    }
  }
  Vec qs(r), av(r);
  for (int j = 0; j < r; ++j) {
    qs[j] = std::sqrt(model.q[j]);
    av[j] = model.a[j];
  }
  const Mat U2 = u2;

  const long n = cfg.samples();
  const std::size_t L = lambdas.size();
  std::vector<cplx> values(static_cast<std::size_t>(n) * L);
  std::vector<int> clipped(n, 0), negative(n, 0);

  for_each_sample(n, exec, [&](long i) {
    std::mt19937_64 eng = sample_engine(cfg.seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    Mat Y = Mat::Zero(r, r);
    for (int j = 0; j < r; ++j) Y(j, j) = model.y0[j];
    Eigen::SelfAdjointEigenSolver<Mat> eig(r);
    double zp = z0, zm = z0;
    Mat G(r, r);
    const auto project = [&](Mat& Ymat, bool count) {
      eig.compute(Ymat);
      const double lo = eig.eigenvalues().minCoeff();
      if (count && lo < kNegativeThreshold) ++negative[i];
      Vec ev = eig.eigenvalues().cwiseMax(0.0);
      if (lo < 0.0 && cfg.clip_psd) {
        if (count && lo < -kClipThreshold) ++clipped[i];
        Ymat = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
      }
      return Mat(eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose());
    };
    for (int k = 0; k < steps; ++k) {
      const Mat root = project(Y, true);
      const double v = std::max(load[k].dot(Y * load[k]), 0.0);
      const double mu = -0.5 * load[k].dot(Y * weight[k]);
      const double shock = std::sqrt(v * h) * normal(eng);
      zp += mu * h + shock;
      zm += mu * h - shock;
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) G(a, b) = sqh * normal(eng);
      const Mat noise = root * G * qs.asDiagonal() + qs.asDiagonal() * G.transpose() * root;
      Mat drift = -(av.asDiagonal() * Y + Y * av.asDiagonal());
      for (int j = 0; j < r; ++j) drift(j, j) += model.dof * model.q[j];
      Y += h * drift + noise;
      Y = 0.5 * (Y + Y.transpose()).eval();
    }
    project(Y, false);
    const double trace = (Y * U2).trace();
    for (std::size_t l = 0; l < L; ++l) {
      const cplx u(nu, lambdas[l]);
      const cplx vp = std::exp(u * zp - trace);
      values[static_cast<std::size_t>(i) * L + l] = cfg.antithetic ? 0.5 * (vp + std::exp(u * zm - trace)) : vp;
    }
  });

  McMgfResult out;
  std::vector<cplx> column(n);
  for (std::size_t l = 0; l < L; ++l) {
    for (long i = 0; i < n; ++i) column[i] = values[static_cast<std::size_t>(i) * L + l];
    out.values.push_back(summarize(column));
  }
  long total_clipped = 0, total_negative = 0;
  for (long i = 0; i < n; ++i) {
    total_clipped += clipped[i];
    total_negative += negative[i];
  }
  const double total_steps = static_cast<double>(n) * steps;
  out.clip_fraction = total_clipped / total_steps;
  out.negative_fraction = total_negative / total_steps;
  if (out.clip_fraction > kMaxClipFraction) throw NumericalError("mc: PSD projection needed on more than 5% of steps");
  return out;
}

}  // namespace fwdaffine
