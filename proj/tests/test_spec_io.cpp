#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cokrig/errors.hpp"
#include "cokrig/spec_io.hpp"

using namespace cokrig;

namespace {

BivariateCovarianceSpec parse(const std::string& text) {
  std::istringstream in(text);
  return read_covariance_spec(in, "cov.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST_CASE("parse_config") {
  std::istringstream in("# header\n a = 1 \n\nb=two # trailing\n");
  const Config c = parse_config(in, "x");
  REQUIRE(c.size() == 2);
  CHECK(c.at("a").value == "1");
  CHECK(c.at("a").line == 2);
  CHECK(c.at("b").value == "two");
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_WITH_AS(parse_config(dup, "x"), doctest::Contains("x:2: duplicate key"), ParseError);
  std::istringstream noeq("a 1\n");
  CHECK_THROWS_WITH_AS(parse_config(noeq, "x"), doctest::Contains("x:1:"), ParseError);
  std::istringstream novalue("a =\n");
  CHECK_THROWS_AS(parse_config(novalue, "x"), ParseError);
}

TEST_CASE("generalized Markov config") {
  const auto spec = parse(
      "family = generalized_markov\nsigma11 = 0.85\nsigma22 = 0.94\nrho = 0.25\n"
      "c11 = exponential\nc11_theta = 17.12\ncr = nugget\n");
  const auto& gm = std::get<GeneralizedMarkov>(spec);
  CHECK(gm.sigma11 == 0.85);
  CHECK(gm.rho == 0.25);
  CHECK(gm.c11.rate() == doctest::Approx(17.12));
  CHECK(gm.cr.kind() == Correlogram::Kind::nugget);
  const auto k = exponential_primary(spec);
  REQUIRE(k.has_value());
  CHECK(k->theta() == doctest::Approx(17.12));
}

TEST_CASE("other families") {
  const auto prop = std::get<Proportional>(
      parse("family = proportional\nsigma11 = 1\nsigma22 = 2\nsigma12 = 0.5\nbase = matern15\nbase_lambda = 0.3\n"));
  CHECK(prop.sigma21 == 0.5);
  CHECK(prop.base.kind() == Correlogram::Kind::matern15);
  CHECK(std::holds_alternative<NS1>(parse("family = ns1\nsigma11 = 1\nsigma22 = 1\nlambda = 0.4\nlambdac = 0.2\n")));
  CHECK(std::get<Matern>(parse("family = matinf\nsigma11 = 1\nsigma22 = 1\nlambda = 0.4\nlambdac = 0.2\n")).order ==
        MaternOrder::infinite);
  CHECK(std::get<NS2>(parse("family = ns2\nsigma11 = 1\nsigma22 = 1\nlambda = 0.4\nlambdac = 0.8\n")).alpha == 0.9);
  CHECK(std::get<NS2>(parse("family = ns2\nsigma11 = 1\nsigma22 = 1\nlambda = 0.4\nlambdac = 0.3\nalpha = 0.6\n"))
            .alpha == 0.6);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_of("family = ns1\nsigma11 = 1\nsigma22 = 1\nlambda = 0.4\nlambdac = 0.2\ncolour = red\n")
            .find("cov.cfg:6: unknown key 'colour'") == 0);
  CHECK(error_of("family = ns4\n").find("cov.cfg:1: unknown family") == 0);
  CHECK(error_of("family = ns1\nsigma11 = abc\n").find("cov.cfg:2: invalid number") == 0);
  CHECK(error_of("family = ns1\nsigma11 = 1\n").find("missing key 'sigma22'") != std::string::npos);
  CHECK(error_of("family = ns2\nsigma11 = 1\nsigma22 = 1\nlambda = 0.4\nlambdac = 0.3\n").find("cov.cfg:5:") == 0);
  CHECK(error_of("family = generalized_markov\nsigma11 = 1\nsigma22 = 1\nrho = 0.1\nc11 = exponential\n"
                 "c11_theta = 2\nc11_lambda = 0.1\ncr = nugget\n")
            .find("cov.cfg:5: give exactly one") == 0);
  CHECK(error_of("family = generalized_markov\nsigma11 = 1\nsigma22 = 1\nrho = 0.1\nc11 = cubic\ncr = nugget\n")
            .find("cov.cfg:5: unknown correlogram") == 0);
  CHECK(error_of("family = generalized_markov\nsigma11 = 1\nsigma22 = 1\nrho = 0.1\nc11 = exponential\n"
                 "c11_theta = -2\ncr = nugget\n")
            .find("cov.cfg:5:") == 0);
}

TEST_CASE("format round-trips") {
  const BivariateCovarianceSpec specs[] = {
      GeneralizedMarkov{0.85, 0.94, 0.25, Correlogram::exponential_rate(17.12), Correlogram::squared_exponential(0.3)},
      Proportional{1.0, 0.3, 0.3, 2.0, Correlogram::matern15(0.2)},
      NS1{1.0, 2.0, 0.3, -0.4},
      Matern{MaternOrder::three_halves, 1.5, 0.5, 0.6, 0.1},
      NS2{1.0, 1.0, 0.2, 0.5, 0.75},
      NS3{2.0, 1.0, 0.4, 0.7},
  };
  for (const auto& s : specs) {
    const auto back = parse(format_covariance_spec(s));
    CHECK(family_name(back) == family_name(s));
    for (double h : {0.0, 0.3, 1.7}) {
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) CHECK(eval_pair(back, i, j, h) == doctest::Approx(eval_pair(s, i, j, h)).epsilon(1e-15));
    }
  }
}
