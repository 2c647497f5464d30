#include <doctest.h>

#include <cmath>
#include <random>

#include "cokrig/errors.hpp"
#include "cokrig/predict.hpp"
#include "oracles.hpp"

using namespace cokrig;

namespace {

Eigen::VectorXd randn(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

// Dense kriging predictors written straight from the normal equations.
double dense_simple_value(const std::vector<double>& x, double theta, const Eigen::VectorXd& z, double x0) {
  const Eigen::MatrixXd p = oracle::exp_corr(x, theta);
  return oracle::exp_corr_vec(x, theta, x0).dot(p.fullPivLu().solve(z));
}

double dense_ordinary_value(const std::vector<double>& x, double theta, const Eigen::VectorXd& z, double x0) {
  const auto lu = oracle::exp_corr(x, theta).fullPivLu();
  const Eigen::VectorXd r = oracle::exp_corr_vec(x, theta, x0);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(r.size());
  const Eigen::VectorXd lambda = lu.solve(r + one * (1.0 - one.dot(lu.solve(r))) / one.dot(lu.solve(one)));
  return lambda.dot(z);
}

struct Primary {
  double sigma11;
  Correlogram c;
};

// The primary covariance of a reducing family, for comparing against kriging.
Primary primary_of(const BivariateCovarianceSpec& spec) {
  if (auto* s = std::get_if<GeneralizedMarkov>(&spec)) return {s->sigma11, s->c11};
  if (auto* s = std::get_if<Proportional>(&spec)) return {s->sigma11, s->base};
  if (auto* s = std::get_if<NS1>(&spec)) return {s->sigma11, Correlogram::exponential_base(s->lambda)};
  const auto& m = std::get<Matern>(spec);
  switch (m.order) {
    case MaternOrder::half: return {m.sigma11, Correlogram::exponential_base(m.lambda)};
    case MaternOrder::three_halves: return {m.sigma11, Correlogram::matern15(m.lambda)};
    default: return {m.sigma11, Correlogram::squared_exponential(m.lambda)};
  }
}

BivariateCovarianceSpec random_reducing_spec(std::mt19937_64& rng, int family) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s11 = 0.3 + 2.0 * u(rng), s22 = 0.3 + 2.0 * u(rng);
  const double lambda = 0.01 + 0.6 * u(rng), lambdac = -0.9 + 1.8 * u(rng);
  const double rho = std::min(0.95, 0.9 * std::sqrt(s22 / s11)) * (-1.0 + 2.0 * u(rng));
  switch (family % 6) {
    case 0: return GeneralizedMarkov{s11, s22, rho, Correlogram::exponential_base(lambda), Correlogram::nugget()};
    case 1:
      return Proportional{s11, std::sqrt(s11 * s22) * lambdac, std::sqrt(s11 * s22) * lambdac, s22,
                          Correlogram::matern15(lambda)};
    case 2: return NS1{s11, s22, lambda, lambdac};
    case 3: return Matern{MaternOrder::half, s11, s22, lambda, lambdac};
    case 4: return Matern{MaternOrder::three_halves, s11, s22, lambda, lambdac};
    default: return Matern{MaternOrder::infinite, s11, s22, 0.001 + 0.05 * u(rng), lambdac};
  }
}

}  // namespace

TEST_CASE("simple cokriging interpolates collocated data") {
  const Design d({0.3, 0.3, 0.4});
  const GeneralizedMarkov gm{1.0, 1.0, 0.5, Correlogram::exponential_rate(3.0), Correlogram::exponential_rate(1.0)};
  const ObservationVector obs{Eigen::Vector4d(0.3, -1.2, 0.8, 2.0), Eigen::Vector4d(1.0, 0.1, -0.4, 0.5)};
  for (int i = 0; i < 4; ++i) {
    const auto r = simple_cokrige(gm, d, obs, d.point(i));
    CHECK(r.value == doctest::Approx(obs.z1(i)).epsilon(1e-10));
    CHECK(r.mspe <= 1e-10);
    CHECK(r.weights.size() == 8);
  }
}

TEST_CASE("independent secondary variable leaves simple kriging unchanged") {
  const Design d({0.2, 0.5, 0.3});
  const GeneralizedMarkov gm{1.3, 0.7, 0.0, Correlogram::exponential_rate(2.0), Correlogram::nugget()};
  const ObservationVector obs{Eigen::Vector4d(0.1, 0.4, -0.3, 1.1), Eigen::Vector4d(5.0, -3.0, 2.0, 1.0)};
  const auto co = simple_cokrige(gm, d, obs, 0.33);
  const auto kr = simple_krige(1.3, Correlogram::exponential_rate(2.0), d, obs.z1, 0.33);
  CHECK(co.value == doctest::Approx(kr.value).epsilon(1e-12));
  CHECK(co.mspe == doctest::Approx(kr.mspe).epsilon(1e-12));
}

TEST_CASE("NS2 cokriging beats kriging") {
  const Design d({0.5, 0.5});
  const NS2 ns2{1.0, 1.0, std::exp(-1.0), 0.5, 0.75};
  const ObservationVector obs{Eigen::Vector3d(0.2, -0.4, 0.9), Eigen::Vector3d(0.5, 0.1, -0.2)};
  const auto co = simple_cokrige(ns2, d, obs, 0.4);
  const auto kr = simple_krige(1.0, Correlogram::exponential_base(std::exp(-1.0)), d, obs.z1, 0.4);
  // margin is small here: about 2.2e-5
  CHECK(co.mspe < kr.mspe - 1e-5);
  const auto oco = ordinary_cokrige(ns2, d, obs, 0.4);
  const auto okr = ordinary_krige(1.0, Correlogram::exponential_base(std::exp(-1.0)), d, obs.z1, 0.4);
  CHECK(oco.mspe < okr.mspe);
}

TEST_CASE("NS2 counterexample with a gap above 1e-3") {
  const Design d({0.5, 0.5});
  const NS2 ns2 = NS2::paired(1.0, 1.0, 0.05, 0.5);
  REQUIRE(ns2.alpha == 0.75);
  const ObservationVector obs{Eigen::Vector3d(0.2, -0.4, 0.9), Eigen::Vector3d(0.5, 0.1, -0.2)};
  const auto co = simple_cokrige(ns2, d, obs, 0.25);
  const auto kr = simple_krige(1.0, Correlogram::exponential_base(0.05), d, obs.z1, 0.25);
  CHECK(kr.mspe - co.mspe > 1e-3);
  CHECK(std::abs(co.value - kr.value) > 1e-6);
  CHECK_FALSE(reduction_applies(ns2).reduces);
}

TEST_CASE("ordinary cokriging") {
  const Design d({0.25, 0.35, 0.4});
  const Matern m05{MaternOrder::half, 1.0, 2.0, 0.2, 0.6};
  const ObservationVector flat{Eigen::Vector4d::Constant(3.5), Eigen::Vector4d(0.1, -0.2, 0.7, 0.0)};
  for (double x0 : {0.0, 0.1, 0.5, 0.77, 1.0}) CHECK(ordinary_cokrige(m05, d, flat, x0).value == doctest::Approx(3.5));

  std::mt19937_64 rng(3);
  const ObservationVector obs{randn(rng, 4), randn(rng, 4)};
  const auto co = ordinary_cokrige(m05, d, obs, 0.3);
  const auto kr = ordinary_krige(ExponentialKernel(-std::log(0.2), 1.0), d, obs.z1, 0.3);
  CHECK(std::abs(co.value - kr.value) <= 1e-10);
  CHECK(std::abs(co.mspe - kr.mspe) <= 1e-10);
  for (double x0 : {0.05, 0.3, 0.61, 0.9}) {
    CHECK(ordinary_cokrige(m05, d, obs, x0).mspe >= simple_cokrige(m05, d, obs, x0).mspe);
  }
  // Weights on z1 sum to one and on z2 to zero.
  CHECK(co.weights.head(4).sum() == doctest::Approx(1.0));
  CHECK(std::abs(co.weights.tail(4).sum()) <= 1e-12);
}

TEST_CASE("cokriging errors") {
  const Design d({0.5, 0.5});
  const GeneralizedMarkov bad{4.0, 1.0, 0.6, Correlogram::exponential_rate(1.0), Correlogram::nugget()};
  const ObservationVector obs{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  CHECK_THROWS_AS(simple_cokrige(bad, d, obs, 0.5), ValidationError);
  const GeneralizedMarkov ok{1.0, 1.0, 0.5, Correlogram::exponential_rate(1.0), Correlogram::nugget()};
  CHECK_THROWS_AS(simple_cokrige(ok, d, obs, 1.5), ExtrapolationError);
  const ObservationVector short_obs{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  CHECK_THROWS_AS(ordinary_cokrige(ok, d, short_obs, 0.5), DomainError);
  // A squared-exponential primary on nearly coincident sites is numerically singular.
  const Design close({1e-7, 1.0 - 1e-7});
  const Matern smooth{MaternOrder::infinite, 1.0, 1.0, 0.9, 0.5};
  CHECK_THROWS_AS(simple_cokrige(smooth, close, obs, 0.5), ConditioningError);
}

TEST_CASE("simple kriging with the exponential kernel") {
  const Design d({0.3, 0.2, 0.5});
  const Eigen::Vector4d z(1.0, -2.0, 0.5, 3.0);
  const ExponentialKernel k(4.0, 1.5);
  for (int i = 0; i < 4; ++i) {
    const auto r = simple_krige(k, d, z, d.point(i));
    CHECK(r.value == z(i));
    CHECK(r.mspe == 0.0);
  }
  const Design unit({1.0});
  const auto r = simple_krige(ExponentialKernel(1.0), unit, Eigen::Vector2d(1.0, 0.0), 0.5);
  CHECK(r.value == doctest::Approx((std::exp(-0.5) - std::exp(-1.5)) / (1.0 - std::exp(-2.0))).epsilon(1e-14));
  CHECK_THROWS_AS(simple_krige(k, d, z, 1.2), ExtrapolationError);
}

TEST_CASE("ordinary kriging with the exponential kernel") {
  const Design eq({0.5, 0.5});
  const ExponentialKernel k(2.0);
  CHECK(ordinary_krige(k, eq, Eigen::Vector3d::Constant(-0.7), 0.8).value == doctest::Approx(-0.7));
  std::mt19937_64 rng(4);
  const Eigen::VectorXd z = randn(rng, 3);
  CHECK(std::abs(ordinary_krige(k, eq, z, 0.25).value - dense_ordinary_value(eq.points(), 2.0, z, 0.25)) <= 1e-10);
  const auto extra = ordinary_krige(k, eq, z, 0.25).mspe - simple_krige(k, eq, z, 0.25).mspe;
  const auto q = quad_forms_at(eq, 2.0, 0.25);
  CHECK(extra == doctest::Approx((1.0 - q.ones_cross) * (1.0 - q.ones_cross) / ones_quadratic_form(eq, 2.0)));
  CHECK(extra >= 0.0);
}

TEST_CASE("mspe closed form") {
  const Design d({0.3, 0.2, 0.5});
  const ExponentialKernel k(17.12, 0.85);
  CHECK(mspe_closed_form(k, d, 0.3, Model::simple) == 0.0);
  CHECK(mspe_closed_form(k, d, 0.5, Model::simple) == 0.0);
  const double mid = mspe_closed_form(k, d, 0.4, Model::simple);
  const double x = std::exp(-17.12 * 0.2);
  CHECK(mid == doctest::Approx(0.85 * (1.0 - x) / (1.0 + x)).epsilon(1e-14));
  CHECK(mid == doctest::Approx(0.7964).epsilon(1e-4));
  CHECK(std::abs(mid - oracle::mspe_simple(d.points(), 17.12, 0.85, 0.4)) <= 1e-10);

  const double q0 = ones_quadratic_form(d, 17.12);
  const double w = (1.0 - x) / (1.0 + x);
  const double u = std::pow(1.0 - 2.0 * std::exp(-17.12 * 0.1) / (1.0 + x), 2);
  const double ord = mspe_closed_form(k, d, 0.4, Model::ordinary);
  CHECK(ord == doctest::Approx(0.85 * (w + u / q0)).epsilon(1e-12));
  CHECK(std::abs(ord - oracle::mspe_ordinary(d.points(), 17.12, 0.85, 0.4)) <= 1e-10);
}

TEST_CASE("property: reducing families collapse to kriging") {
  std::mt19937_64 rng(500);
  std::uniform_int_distribution<int> size(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto spec = random_reducing_spec(rng, trial);
    REQUIRE(validate(spec).ok());
    const auto n = static_cast<Eigen::Index>(size(rng));
    const Design d(oracle::random_gaps(rng, static_cast<std::size_t>(n - 1), 0.2));
    const ObservationVector obs{randn(rng, n), randn(rng, n)};
    const double x0 = u(rng);
    const Primary p = primary_of(spec);
    const auto sc = simple_cokrige(spec, d, obs, x0);
    const auto sk = simple_krige(p.sigma11, p.c, d, obs.z1, x0);
    CHECK(std::abs(sc.value - sk.value) <= 1e-9);
    CHECK(std::abs(sc.mspe - sk.mspe) <= 1e-9);
    const auto oc = ordinary_cokrige(spec, d, obs, x0);
    const auto ok = ordinary_krige(p.sigma11, p.c, d, obs.z1, x0);
    CHECK(std::abs(oc.value - ok.value) <= 1e-9);
    CHECK(std::abs(oc.mspe - ok.mspe) <= 1e-9);
  }
}

TEST_CASE("property: closed-form prediction against dense formulas") {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> size(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(size(rng));
    const Design d(oracle::random_gaps(rng, n - 1));
    const double theta = 0.5 + 49.5 * u(rng), sigma = 0.1 + 2.0 * u(rng), x0 = u(rng);
    const ExponentialKernel k(theta, sigma);
    CHECK(std::abs(mspe_closed_form(k, d, x0, Model::simple) - oracle::mspe_simple(d.points(), theta, sigma, x0)) <= 1e-9);
    CHECK(std::abs(mspe_closed_form(k, d, x0, Model::ordinary) - oracle::mspe_ordinary(d.points(), theta, sigma, x0)) <= 1e-9);
    const Eigen::VectorXd z = randn(rng, static_cast<Eigen::Index>(n));
    CHECK(std::abs(simple_krige(k, d, z, x0).value - dense_simple_value(d.points(), theta, z, x0)) <= 1e-9);
    CHECK(std::abs(ordinary_krige(k, d, z, x0).value - dense_ordinary_value(d.points(), theta, z, x0)) <= 1e-9);
    const auto dense = simple_krige(sigma, Correlogram::exponential_rate(theta), d, z, x0);
    CHECK(std::abs(simple_krige(k, d, z, x0).mspe - dense.mspe) <= 1e-9);
  }
}

TEST_CASE("property: mspe is nonnegative and symmetric within each interval") {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Design d(oracle::random_gaps(rng, 5));
    const ExponentialKernel k(0.5 + 40.0 * u(rng), 1.0);
    for (std::size_t i = 0; i < d.intervals(); ++i) {
      CHECK(mspe_closed_form(k, d, d.point(i), Model::simple) == 0.0);
      const double a = u(rng) * d.gap(i);
      const double left = mspe_closed_form(k, d, d.point(i) + a, Model::simple);
      const double right = mspe_closed_form(k, d, d.point(i + 1) - a, Model::simple);
      CHECK(left >= 0.0);
      CHECK(std::abs(left - right) <= 1e-12);
      CHECK(mspe_closed_form(k, d, d.point(i) + a, Model::ordinary) >= left);
    }
  }
}
