#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fwdaffine/errors.hpp"
#include "fwdaffine/pricer.hpp"
#include "fwdaffine/quadrature.hpp"
#include "riccati_oracle.hpp"

using namespace fwdaffine;

namespace {

const BasisSystem kBasis(0.1, 10);
const NelsonSiegelCurve kCurve;

PricingRequest reference_point(double theta = 10.0) {
  PricingRequest r;
  r.model = JumpModelParams::levy(10, 1.0);
  r.T0 = 1.0;
  r.theta = theta;
  r.K = 1.0;
  return r;
}

PricingRequest with_model(ModelParams m) {
  PricingRequest r = reference_point(1.0);
  r.model = std::move(m);
  return r;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Levy call price assembled from the trapezoid Riccati oracle and a trapezoid Fourier integral.
double oracle_levy_price(const PricingRequest& r, int n_s, int n_lambda) {
  const auto& m = std::get<JumpModelParams>(r.model);
  const oracle::JumpSetup js{kBasis, m.rank(), r.theta, false, {}, {}};
  // With u = 2 the martingale pairing is -2 Q(s); the general case is -(u^2 - u) Q(s).
  const auto coarse = oracle::pairing_grid(js, 2.0, r.T0, n_s);
  const auto fine = oracle::pairing_grid(js, 2.0, r.T0, 2 * n_s);
  std::vector<double> Q(n_s + 1);
  for (int i = 0; i <= n_s; ++i) Q[i] = -0.5 * (fine[2 * i] + (fine[2 * i] - coarse[i]) / 3.0).real();
  const double h = r.T0 / n_s;
  const double X0 = kCurve.log_forward(r.T0 + r.theta);
  const auto mgf_at = [&](oracle::cplx u) {
    const oracle::cplx e = u * u - u;
    oracle::cplx integral = 0.0;
    for (int i = 0; i <= n_s; ++i) integral += (i == 0 || i == n_s ? 0.5 : 1.0) * std::exp(e * Q[i]);
    const oracle::cplx phi = m.beta * r.T0 - m.beta * h * integral;
    return std::exp(-phi + u * X0 + e * Q[n_s]);
  };
  const double nu = r.damping();
  const auto integrand = [&](double lam) {
    const oracle::cplx u(nu, lam);
    const oracle::cplx g = std::pow(oracle::cplx(r.K), -(u - 1.0)) / (u * (u - 1.0));
    return std::real(g * mgf_at(u)) / std::numbers::pi;
  };
  return oracle::trapezoid_refined(integrand, 0.0, r.lambda_max, n_lambda);
}

}  // namespace

TEST(PayoffTransform, UnitStrike) {
  for (double nu : {1.5, 2.0, -1.0}) {
    for (double lam : {0.0, 0.7, 25.0}) {
      const cplx u(nu, lam);
      const cplx expected = 1.0 / (u * (u - 1.0));
      const cplx g = payoff_transform(lam, nu, 1.0);
      EXPECT_NEAR(g.real(), expected.real(), 1e-15);
      EXPECT_NEAR(g.imag(), expected.imag(), 1e-15);
    }
  }
}

TEST(PayoffTransform, StrikeE) {
  const cplx g = payoff_transform(0.0, 2.0, std::numbers::e);
  EXPECT_NEAR(g.real(), std::exp(-1.0) / 2.0, 1e-15);
  EXPECT_EQ(g.imag(), 0.0);
}

TEST(PayoffTransform, ConjugateSymmetry) {
  const cplx a = payoff_transform(3.0, 2.0, 2.0);
  const cplx b = payoff_transform(-3.0, 2.0, 2.0);
  EXPECT_NEAR(a.real(), b.real(), 1e-16);
  EXPECT_NEAR(a.imag(), -b.imag(), 1e-16);
}

TEST(PayoffTransform, Poles) {
  EXPECT_THROW(payoff_transform(1.0, 0.0, 1.0), ValidationError);
  EXPECT_THROW(payoff_transform(1.0, 1.0, 1.0), ValidationError);
  EXPECT_THROW(payoff_transform(1.0, 2.0, 0.0), ValidationError);
}

TEST(PricingRequestTest, Validation) {
  PricingRequest r = reference_point();
  EXPECT_NO_THROW(r.validate());
  EXPECT_EQ(r.damping(), 2.0);
  r.kind = OptionKind::put;
  EXPECT_EQ(r.damping(), -1.0);

  r = reference_point();
  r.nu = 1.0;
  try {
    r.validate();
    FAIL() << "expected a pole error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("pole"), std::string::npos);
  }
  r.nu = 0.5;
  EXPECT_THROW(r.validate(), ValidationError);
  r = reference_point();
  r.kind = OptionKind::put;
  r.nu = 0.5;
  EXPECT_THROW(r.validate(), ValidationError);

  r = reference_point();
  r.K = 0.0;
  EXPECT_THROW(r.validate(), ValidationError);
  r = reference_point();
  r.T0 = -1.0;
  EXPECT_THROW(r.validate(), ValidationError);
  r = reference_point();
  r.theta = -0.1;
  EXPECT_THROW(r.validate(), ValidationError);
  r = reference_point();
  r.lambda_max = 0.0;
  EXPECT_THROW(r.validate(), ValidationError);
  r = reference_point();
  r.lambda_nodes = 2000;
  EXPECT_THROW(r.validate(), ValidationError);
}

TEST(Price, MatchesIndependentOracle) {
  const PricingRequest r = reference_point(10.0);
  const double price = price_option(r, kBasis, kCurve).price;
  const double expected = oracle_levy_price(r, 800, 8000);
  EXPECT_NEAR(price, expected, 1e-7 * expected);
}

TEST(Price, MatchesIndependentOracleShortDelivery) {
  PricingRequest r = reference_point(1.0);
  r.model = JumpModelParams::levy(5, 2.0);
  r.K = 1.1;
  const double price = price_option(r, kBasis, kCurve).price;
  const double expected = oracle_levy_price(r, 800, 8000);
  EXPECT_NEAR(price, expected, 1e-7 * expected);
}

TEST(Price, FrozenValues) {
  EXPECT_NEAR(price_option(reference_point(10.0), kBasis, kCurve).price, 0.2933373680178713, 1e-12);
  PricingRequest bns = reference_point(10.0);
  bns.model = JumpModelParams::bns(10, 1.0);
  EXPECT_NEAR(price_option(bns, kBasis, kCurve).price, 0.252416190114644, 1e-12);
}

TEST(Price, DeepInTheMoneyApproachesForward) {
  for (const ModelParams& m : {ModelParams(JumpModelParams::levy(10)), ModelParams(JumpModelParams::bns(10)),
                               ModelParams(WishartModelParams::defaults(5))}) {
    PricingRequest r = with_model(m);
    r.K = 1e-5;
    const double F = kCurve.forward_price(r.T0 + r.theta);
    EXPECT_LT(rel(price_option(r, kBasis, kCurve).price, F), 1e-4);
  }
}

TEST(Price, DampingInvariance) {
  // The Wishart moment of order 3 explodes before T0 = 1, so its strip is narrower.
  const std::vector<std::pair<ModelParams, double>> cases{{JumpModelParams::levy(10), 3.0},
                                                          {JumpModelParams::bns(10), 3.0},
                                                          {WishartModelParams::defaults(5), 2.5}};
  for (const auto& [m, upper] : cases) {
    PricingRequest r = with_model(m);
    r.compute_parity = false;
    std::vector<double> prices;
    for (double nu : {1.5, 2.0, upper}) {
      r.nu = nu;
      prices.push_back(price_option(r, kBasis, kCurve).price);
    }
    EXPECT_LT(rel(prices[0], prices[1]), 1e-6);
    EXPECT_LT(rel(prices[2], prices[1]), 1e-6);
    EXPECT_LT(rel(prices[0], prices[2]), 1e-6);
  }
}

TEST(Price, DampingInvarianceReferencePoint) {
  PricingRequest r = reference_point(10.0);
  std::vector<double> prices;
  for (double nu : {1.5, 2.0, 3.0}) {
    r.nu = nu;
    prices.push_back(price_option(r, kBasis, kCurve).price);
  }
  EXPECT_LT(rel(prices[0], prices[1]), 1e-6);
  EXPECT_LT(rel(prices[2], prices[1]), 1e-6);
}

TEST(Price, PutCallParity) {
  for (const ModelParams& m : {ModelParams(JumpModelParams::levy(10)), ModelParams(JumpModelParams::bns(10)),
                               ModelParams(WishartModelParams::defaults(5))}) {
    for (double K : {0.8, 1.0, 1.3}) {
      PricingRequest call = with_model(m);
      call.compute_parity = false;
      call.K = K;
      call.theta = 10.0;
      PricingRequest put = call;
      put.kind = OptionKind::put;
      const double C = price_option(call, kBasis, kCurve).price;
      const double P = price_option(put, kBasis, kCurve).price;
      const double F = kCurve.forward_price(call.T0 + call.theta);
      EXPECT_LT(std::abs(C - P - (F - K)), 1e-6 * F);
    }
  }
}

TEST(Price, ParityGapDiagnostic) {
  const PriceResult res = price_option(reference_point(10.0), kBasis, kCurve);
  EXPECT_LT(res.parity_gap, 1e-6);
  EXPECT_LT(res.integrand_tail, 1e-300);
  EXPECT_EQ(res.n_evals, 2 * 2049);

  PricingRequest r = reference_point(10.0);
  r.compute_parity = false;
  const PriceResult bare = price_option(r, kBasis, kCurve);
  EXPECT_TRUE(std::isnan(bare.parity_gap));
  EXPECT_EQ(bare.n_evals, 2049);
  EXPECT_EQ(bare.price, res.price);
}

TEST(Price, MonotoneAndConvexInStrike) {
  for (const ModelParams& m : {ModelParams(JumpModelParams::levy(10)), ModelParams(JumpModelParams::bns(10)),
                               ModelParams(WishartModelParams::defaults(5))}) {
    std::vector<double> prices;
    for (double K : {0.5, 1.0, 1.5, 2.0}) {
      PricingRequest r = with_model(m);
      r.K = K;
      r.compute_parity = false;
      prices.push_back(price_option(r, kBasis, kCurve).price);
    }
    for (std::size_t i = 1; i < prices.size(); ++i) EXPECT_LE(prices[i], prices[i - 1]);
    for (std::size_t i = 1; i + 1 < prices.size(); ++i) EXPECT_GE(prices[i - 1] - 2 * prices[i] + prices[i + 1], -1e-8);
  }
}

TEST(Price, HalfLineEqualsFullLine) {
  const PricingRequest r = reference_point(10.0);
  const TransformEvaluator phi(r.model, kBasis, kCurve, r.theta, r.T0);
  const double nu = r.damping();
  const CompositeRule rule = composite_gauss_legendre(0.0, r.lambda_max, r.lambda_panels, r.lambda_nodes / r.lambda_panels);
  cplx full = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    for (double lam : {rule.x[i], -rule.x[i]}) full += rule.w[i] * payoff_transform(lam, nu, r.K) * phi(cplx(nu, lam));
  }
  full /= 2.0 * std::numbers::pi;
  r.validate();
  PricingRequest bare = r;
  bare.compute_parity = false;
  const double half = price_option(bare, kBasis, kCurve).price;
  EXPECT_NEAR(full.real(), half, 1e-10);
  EXPECT_NEAR(full.imag(), 0.0, 1e-10);
}

TEST(Price, SerialAndParallelBitwise) {
  for (const ModelParams& m : {ModelParams(JumpModelParams::levy(10)), ModelParams(WishartModelParams::defaults(3))}) {
    const PricingRequest r = with_model(m);
    const PriceResult s = price_option(r, kBasis, kCurve, Execution::serial);
    const PriceResult p = price_option(r, kBasis, kCurve, Execution::parallel);
    EXPECT_EQ(s.price, p.price);
    EXPECT_EQ(s.parity_gap, p.parity_gap);
    EXPECT_EQ(s.integrand_tail, p.integrand_tail);
  }
  const TransformEvaluator phi(JumpModelParams::levy(10), kBasis, kCurve, 1.0, 1.0);
  const CompositeRule rule = composite_gauss_legendre(0.0, 200.0, 32, 64);
  EXPECT_EQ(fourier_integrand_serial(phi, 2.0, 1.0, rule.x), fourier_integrand_parallel(phi, 2.0, 1.0, rule.x));
}

TEST(Price, RepeatedRequestsIdentical) {
  const PricingRequest r = reference_point(3.0);
  const double a = price_option(r, kBasis, kCurve).price;
  for (int threads : {1, 2, 3}) {
    set_thread_count(threads);
    EXPECT_EQ(price_option(r, kBasis, kCurve).price, a);
  }
  set_thread_count(0);
}

TEST(Price, DivergenceOutsideStrip) {
  PricingRequest r = reference_point(10.0);
  r.nu = 40.0;
  EXPECT_THROW(price_option(r, kBasis, kCurve), NumericalError);
  r = with_model(WishartModelParams::defaults(5));
  r.nu = 3.0;
  EXPECT_THROW(price_option(r, kBasis, kCurve), NumericalError);
}

TEST(Price, InstabilityWarning) {
  PricingRequest r = reference_point(10.0);
  EXPECT_FALSE(price_option(r, kBasis, kCurve).instability_warning);
  for (double T0 : {1e-3, 1e-4}) {
    r.T0 = T0;
    const PriceResult res = price_option(r, kBasis, kCurve);
    EXPECT_TRUE(res.instability_warning);
    EXPECT_GT(res.integrand_tail, 0.0);
    EXPECT_GE(res.price, 0.0);
    const double F = kCurve.forward_price(r.T0 + r.theta);
    EXPECT_NEAR(res.price, F - r.K, 1e-3);
  }
}

TEST(Price, ZeroHorizonIsIntrinsic) {
  PricingRequest r = reference_point(10.0);
  r.T0 = 0.0;
  r.lambda_max = 2000.0;
  r.lambda_nodes = 8192;
  r.lambda_panels = 128;
  const double F = kCurve.forward_price(r.theta);
  EXPECT_NEAR(price_option(r, kBasis, kCurve).price, F - r.K, 1e-5);
}

TEST(Price, PricesAreNonnegative) {
  for (double K : {0.2, 1.0, 3.0, 6.0}) {
    for (OptionKind kind : {OptionKind::call, OptionKind::put}) {
      PricingRequest r = reference_point(1.0);
      r.K = K;
      r.kind = kind;
      EXPECT_GE(price_option(r, kBasis, kCurve).price, 0.0);
    }
  }
}

TEST(Price, RankExceedingBasisRejected) {
  const BasisSystem small(0.1, 2);
  PricingRequest r = reference_point();
  r.model = JumpModelParams::levy(10);
  EXPECT_THROW(price_option(r, small, kCurve), ValidationError);
}

TEST(Mgf, NormalizedAtZero) {
  for (const ModelParams& m : {ModelParams(JumpModelParams::levy(10)), ModelParams(JumpModelParams::bns(10)),
                               ModelParams(WishartModelParams::defaults(5))}) {
    for (double t : {0.0, 0.5, 2.0}) {
      const cplx v = mgf(m, StripPoint{0.0, 0.0, 1.0, t}, kBasis, kCurve);
      EXPECT_NEAR(v.real(), 1.0, 1e-12);
      EXPECT_NEAR(v.imag(), 0.0, 1e-12);
    }
  }
}

TEST(Mgf, MartingaleAtOne) {
  for (const ModelParams& m : {ModelParams(JumpModelParams::levy(10)), ModelParams(JumpModelParams::bns(10)),
                               ModelParams(WishartModelParams::defaults(5))}) {
    const cplx v = mgf(m, StripPoint{1.0, 0.0, 2.0, 1.0}, kBasis, kCurve);
    EXPECT_NEAR(v.real(), kCurve.forward_price(3.0), 1e-6);
    EXPECT_NEAR(v.imag(), 0.0, 1e-12);
  }
}

TEST(Mgf, ConjugateSymmetry) {
  for (const ModelParams& m : {ModelParams(JumpModelParams::levy(10)), ModelParams(WishartModelParams::defaults(5))}) {
    const cplx a = mgf(m, StripPoint{2.0, 3.5, 1.0, 1.0}, kBasis, kCurve);
    const cplx b = mgf(m, StripPoint{2.0, -3.5, 1.0, 1.0}, kBasis, kCurve);
    EXPECT_NEAR(a.real(), b.real(), 1e-12);
    EXPECT_NEAR(a.imag(), -b.imag(), 1e-12);
  }
}

TEST(Mgf, SharesPricingCodePathBitwise) {
  const ModelParams m = JumpModelParams::levy(10);
  const TransformEvaluator phi(m, kBasis, kCurve, 10.0, 1.0);
  for (double lam : {0.0, 1.25, 60.0}) {
    const cplx a = mgf(m, StripPoint{2.0, lam, 10.0, 1.0}, kBasis, kCurve);
    const cplx b = phi(cplx(2.0, lam));
    EXPECT_EQ(a, b);
    const double expected = std::real(payoff_transform(lam, 2.0, 1.0) * a) / std::numbers::pi;
    EXPECT_EQ(fourier_integrand_serial(phi, 2.0, 1.0, std::span<const double>(&lam, 1))[0], expected);
  }
}

TEST(FormatPercent, HalfUp) {
  EXPECT_EQ(format_percent(0.0), "0.00");
  EXPECT_EQ(format_percent(0.0063), "0.63");
  EXPECT_EQ(format_percent(0.00625), "0.63");
  EXPECT_EQ(format_percent(0.00005), "0.01");
  EXPECT_EQ(format_percent(0.000049), "0.00");
  EXPECT_EQ(format_percent(0.0146), "1.46");
  EXPECT_EQ(format_percent(0.12345), "12.35");
  EXPECT_EQ(format_percent(std::nan("")), "nan");
}

TEST(ConvergenceTableTest, BaselineRowIsZero) {
  const std::vector<int> ns{2, 3, 10};
  const std::vector<double> thetas{1.0, 10.0};
  const ConvergenceTable t = convergence_table(reference_point(), kBasis, kCurve, ns, SweepKind::theta, thetas);
  ASSERT_TRUE(t.complete());
  EXPECT_EQ(t.baseline_n, 10);
  for (double v : t.rel_diff[2]) EXPECT_EQ(v, 0.0);
  for (std::size_t r = 0; r < 2; ++r)
    for (double v : t.rel_diff[r]) EXPECT_GT(v, 0.0);
  EXPECT_LT(t.rel_diff[1][1], t.rel_diff[0][1]);
}

TEST(ConvergenceTableTest, MatchesDirectPricing) {
  const std::vector<int> ns{3, 8};
  const std::vector<double> betas{0.5, 2.0};
  PricingRequest tmpl = reference_point(1.0);
  tmpl.T0 = 2.0;
  tmpl.K = 2.0;
  const ConvergenceTable t = convergence_table(tmpl, kBasis, kCurve, ns, SweepKind::beta, betas);
  ASSERT_TRUE(t.complete());
  PricingRequest r = tmpl;
  r.compute_parity = false;
  r.model = JumpModelParams::levy(3, 2.0);
  const double p3 = price_option(r, kBasis, kCurve).price;
  r.model = JumpModelParams::levy(8, 2.0);
  const double p8 = price_option(r, kBasis, kCurve).price;
  EXPECT_DOUBLE_EQ(t.rel_diff[0][1], std::abs(p3 - p8) / p8);
}

TEST(ConvergenceTableTest, SingleBaselineColumnIsAllZero) {
  const std::vector<int> ns{10};
  const std::vector<double> thetas{1.0, 3.0, 5.0};
  const ConvergenceTable t = convergence_table(reference_point(), kBasis, kCurve, ns, SweepKind::theta, thetas);
  std::ostringstream os;
  write_table_csv(os, t);
  EXPECT_EQ(os.str(), "theta,N,rel_diff_percent\n1,10,0.00\n3,10,0.00\n5,10,0.00\n");
}

TEST(ConvergenceTableTest, CsvLayout) {
  ConvergenceTable t;
  t.sweep = SweepKind::beta;
  t.sweep_values = {0.5, 1.0};
  t.n_values = {2, 10};
  t.rel_diff = {{0.0146, std::nan("")}, {0.0, 0.0}};
  std::ostringstream os;
  write_table_csv(os, t);
  EXPECT_EQ(os.str(), "beta,N,rel_diff_percent\n0.5,2,1.46\n1,2,nan\n0.5,10,0.00\n1,10,0.00\n");
  EXPECT_FALSE(t.complete());
}

TEST(ConvergenceTableTest, FailedCellsAreNan) {
  PricingRequest tmpl = reference_point();
  tmpl.nu = 40.0;
  const std::vector<int> ns{2, 10};
  const std::vector<double> thetas{10.0};
  const ConvergenceTable t = convergence_table(tmpl, kBasis, kCurve, ns, SweepKind::theta, thetas);
  EXPECT_FALSE(t.complete());
  EXPECT_FALSE(t.errors.empty());
}

TEST(ConvergenceTableTest, RejectsBadInput) {
  const std::vector<int> ns{2, 12};
  const std::vector<double> thetas{1.0};
  EXPECT_THROW(convergence_table(reference_point(), kBasis, kCurve, ns, SweepKind::theta, thetas), ValidationError);
  const std::vector<int> ok{2, 5};
  EXPECT_THROW(convergence_table(with_model(WishartModelParams::defaults(5)), kBasis, kCurve, ok, SweepKind::beta, thetas),
               ValidationError);
  EXPECT_THROW(convergence_table(reference_point(), kBasis, kCurve, ok, SweepKind::theta, std::span<const double>()),
               ValidationError);
}
