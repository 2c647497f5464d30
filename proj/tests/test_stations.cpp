#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cokrig/errors.hpp"
#include "cokrig/stations.hpp"

using namespace cokrig;

namespace {

const std::vector<double> kRiver{0.04, 0.02, 0.04, 0.09, 0.20, 0.06, 0.12, 0.13,
                                 0.04, 0.04, 0.02, 0.05, 0.04, 0.07, 0.02, 0.02};

// Spherical law of cosines, fine away from tiny separations.
double cosine_law_km(double lat1, double lon1, double lat2, double lon2) {
  const double r = M_PI / 180.0;
  const double c = std::sin(lat1 * r) * std::sin(lat2 * r) + std::cos(lat1 * r) * std::cos(lat2 * r) * std::cos((lon2 - lon1) * r);
  return kEarthRadiusKm * std::acos(std::clamp(c, -1.0, 1.0));
}

// Stations along the equator with the given longitude steps (degrees).
std::vector<StationRecord> equator_chain(const std::vector<double>& steps, double lon0 = 10.0) {
  std::vector<StationRecord> s{{"s0", 0.0, lon0, 0}};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    s.push_back({"s" + std::to_string(i + 1), 0.0, s.back().lon + steps[i], static_cast<int>(i + 1)});
  }
  return s;
}

}  // namespace

TEST_CASE("haversine") {
  CHECK(haversine_km(0.0, 0.0, 0.0, 1.0) == doctest::Approx(kEarthRadiusKm * M_PI / 180.0).epsilon(1e-14));
  CHECK(haversine_km(0.0, 0.0, 90.0, 0.0) == doctest::Approx(kEarthRadiusKm * M_PI / 2.0).epsilon(1e-14));
  CHECK(haversine_km(10.0, 76.0, 10.0, 76.0) == 0.0);
  CHECK(haversine_km(-45.0, 10.0, 45.0, -170.0) == doctest::Approx(kEarthRadiusKm * M_PI).epsilon(1e-12));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-180.0, 180.0);
  for (int i = 0; i < 200; ++i) {
    const double a = lat(rng), b = lon(rng), c = lat(rng), d = lon(rng);
    CHECK(haversine_km(a, b, c, d) == doctest::Approx(cosine_law_km(a, b, c, d)).epsilon(1e-9));
    CHECK(haversine_km(a, b, c, d) == haversine_km(c, d, a, b));
  }
}

TEST_CASE("ingest examples") {
  const auto two = ingest_stations({{"a", 8.5, 76.9, 1}, {"b", 8.6, 77.1, 2}});
  CHECK(two.design.intervals() == 1);
  CHECK(two.design.gap(0) == 1.0);

  const auto three = ingest_stations(equator_chain({2.0, 2.0}));
  CHECK(three.design.gap(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(three.design.gap(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(three.total_km == doctest::Approx(4.0 * kEarthRadiusKm * M_PI / 180.0));

  std::vector<double> steps;
  for (double g : kRiver) steps.push_back(0.5 * g);
  const auto river = ingest_stations(equator_chain(steps));
  REQUIRE(river.design.intervals() == 16);
  for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(river.design.gap(i) - kRiver[i]) <= 1e-6);
  CHECK(river.design.x_end() == 1.0);
}

TEST_CASE("ingest sorts by order") {
  const auto r = ingest_stations({{"c", 0.0, 3.0, 30}, {"a", 0.0, 0.0, 10}, {"b", 0.0, 1.0, 20}});
  CHECK(r.stations[0].id == "a");
  CHECK(r.stations[2].id == "c");
  CHECK(r.design.gap(0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ingest errors") {
  CHECK_THROWS_AS(ingest_stations({{"a", 0.0, 0.0, 1}}), DomainError);
  CHECK_THROWS_AS(ingest_stations({{"a", 0.0, 0.0, 1}, {"b", 0.0, 0.0, 2}}), DomainError);
  CHECK_THROWS_AS(ingest_stations({{"a", 0.0, 0.0, 1}, {"b", 0.0, 1.0, 1}}), ParseError);
  CHECK_THROWS_AS(ingest_stations({{"a", 0.0, 0.0, 1}, {"a", 0.0, 1.0, 2}}), ParseError);
  CHECK_THROWS_AS(ingest_stations({{"a", 91.0, 0.0, 1}, {"b", 0.0, 1.0, 2}}), ParseError);
  CHECK_THROWS_AS(ingest_stations({{"a", 0.0, 0.0, 1}, {"b", 0.0, 181.0, 2}}), ParseError);
}

TEST_CASE("property: ingestion is scale invariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<double> steps(2 + draw % 10);
    for (double& s : steps) s = u(rng);
    const auto base = ingest_stations(equator_chain(steps));
    for (double c : {0.1, 3.0, 7.5}) {
      std::vector<double> scaled(steps);
      for (double& s : scaled) s *= c;
      const auto r = ingest_stations(equator_chain(scaled, -20.0));
      for (std::size_t i = 0; i < steps.size(); ++i) CHECK(std::abs(r.design.gap(i) - base.design.gap(i)) <= 1e-12);
    }
  }
}

TEST_CASE("stations csv") {
  std::istringstream ok("id,lat,lon,order\n# upstream first\nA, 8.50, 76.90, 1\nB,8.52,76.95,2\n\nC,8.55,77.00,3\n");
  const auto s = read_stations_csv(ok, "st.csv");
  REQUIRE(s.size() == 3);
  CHECK(s[0].id == "A");
  CHECK(s[1].lon == 76.95);
  CHECK(s[2].order == 3);

  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_stations_csv(in, "st.csv");
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("lat,lon,id,order\nA,1,2,3\n").find("st.csv:1:") == 0);
  CHECK(message("id,lat,lon,order\nA,1,2\n").find("st.csv:2:") == 0);
  CHECK(message("id,lat,lon,order\nA,1,2,1\nB,95,2,2\n").find("st.csv:3:") == 0);
  CHECK(message("id,lat,lon,order\nA,1,x,1\n").find("st.csv:2: invalid longitude") == 0);
  CHECK(message("id,lat,lon,order\nA,1,2,1.5\n").find("st.csv:2: invalid order") == 0);
  CHECK(message("").find("missing header") != std::string::npos);
}

TEST_CASE("observations csv and alignment") {
  std::istringstream in("station_id,z1,z2\nB,7.1,0.3\nA,6.9,0.25\n");
  const auto obs = read_observations_csv(in, "obs.csv");
  REQUIRE(obs.size() == 2);
  const std::vector<StationRecord> st{{"A", 0, 0, 1}, {"B", 0, 1, 2}};
  const auto aligned = align_observations(st, obs);
  CHECK(aligned[0].station_id == "A");
  CHECK(aligned[0].z1 == 6.9);
  CHECK(aligned[1].z2 == 0.3);

  std::istringstream dup("station_id,z1,z2\nA,1,2\nA,3,4\n");
  CHECK_THROWS_AS(read_observations_csv(dup, "obs.csv"), ParseError);
  std::istringstream bad("station_id,z1,z2\nA,1,nan\n");
  CHECK_THROWS_AS(read_observations_csv(bad, "obs.csv"), ParseError);
  CHECK_THROWS_AS(align_observations(st, {obs[0]}), ParseError);
  CHECK_THROWS_AS(align_observations({st[0]}, obs), ParseError);
}

TEST_CASE("design files") {
  std::istringstream exact("# river design\n0.25\n0.25 # second\n\n0.5\n");
  const auto a = read_design_file(exact, "d.txt");
  CHECK(a.gaps.size() == 3);
  CHECK(a.warnings.empty());

  std::istringstream close("0.3333333\n0.3333333\n0.3333333\n");
  const auto b = read_design_file(close, "d.txt");
  CHECK(b.warnings.size() == 1);
  CHECK(b.gaps[0] + b.gaps[1] + b.gaps[2] == doctest::Approx(1.0).epsilon(1e-15));

  std::istringstream off("0.3\n0.3\n");
  CHECK_THROWS_AS(read_design_file(off, "d.txt"), ParseError);
  std::istringstream neg("0.5\n-0.1\n0.6\n");
  CHECK_THROWS_WITH_AS(read_design_file(neg, "d.txt"), doctest::Contains("d.txt:2:"), ParseError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_design_file(empty, "d.txt"), ParseError);

  const Design d = Design::on_interval(0.0, 1.0, kRiver);
  std::stringstream io;
  write_design_file(io, d);
  const auto back = read_design_file(io, "roundtrip");
  REQUIRE(back.gaps.size() == kRiver.size());
  for (std::size_t i = 0; i < kRiver.size(); ++i) CHECK(std::abs(back.gaps[i] - d.gap(i)) <= 1e-16);
}
