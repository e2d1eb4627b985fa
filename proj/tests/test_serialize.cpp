#include <random>
#include <sstream>

#include "delaymid/errors.hpp"
#include "delaymid/serialize.hpp"
#include "doctest.h"

using namespace delaymid;

TEST_CASE("design and quasipolynomial JSON round trip exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const auto d = assign_complex_pair(AssignmentTarget(u(rng), std::abs(u(rng)) + 0.1, std::abs(u(rng)) + 0.1));
    const auto text = to_json(d).dump();
    CHECK(design_from_json(Json::parse(text)) == d);
    const auto q = to_quasipolynomial(d);
    CHECK(quasipolynomial_from_json(Json::parse(to_json(q).dump())) == q);
  }
  const auto j = to_json(DelayDesign(-4, 6, -2, -6, 1));
  CHECK(j.dump() == R"({"a1":-4.0,"a0":6.0,"alpha1":-2.0,"alpha0":-6.0,"tau":1.0})");
  CHECK(to_json(normalized_complex(0.0)).dump() ==
        R"({"terms":[{"rate":0.0,"coeffs":[6.0,-4.0,1.0]},{"rate":-1.0,"coeffs":[-6.0,-2.0]}]})");
}

TEST_CASE("design reader accepts wrapped documents and rejects bad input") {
  const Json doc = {{"design", to_json(DelayDesign(1, 2, 3, 4, 0.5))}, {"multiplicity", 2}};
  CHECK(design_from_json(doc) == DelayDesign(1, 2, 3, 4, 0.5));
  CHECK_THROWS_AS(design_from_json(Json::parse(R"({"a1":1})")), InvalidArgument);
  CHECK_THROWS_AS(design_from_json(Json::parse(R"({"a1":"x","a0":1,"alpha1":1,"alpha0":1,"tau":1})")), InvalidArgument);
  CHECK_THROWS_AS(design_from_json(Json::parse(R"({"a1":1,"a0":1,"alpha1":1,"alpha0":1,"tau":0})")), InvalidArgument);
  CHECK_THROWS_AS(quasipolynomial_from_json(Json::parse(R"({"terms":[{"rate":1,"coeffs":[1]}]})")), InvalidArgument);
  CHECK_THROWS_AS(quasipolynomial_from_json(Json::parse(R"({"terms":[]})")), InvalidArgument);
}

TEST_CASE("parse_complex") {
  CHECK(parse_complex("0+2i") == Complex(0, 2));
  CHECK(parse_complex("-1.5") == Complex(-1.5, 0));
  CHECK(parse_complex("3i") == Complex(0, 3));
  CHECK(parse_complex("-i") == Complex(0, -1));
  CHECK(parse_complex("1e-3-2.5e+1j") == Complex(1e-3, -25));
  CHECK(parse_complex(" -0.5 + 2 i") == Complex(-0.5, 2));
  CHECK_THROWS_AS(parse_complex(""), InvalidArgument);
  CHECK_THROWS_AS(parse_complex("abc"), InvalidArgument);
  CHECK_THROWS_AS(parse_complex("1+2"), InvalidArgument);
}

TEST_CASE("reports and CSV tables") {
  const auto d = assign_complex_pair(AssignmentTarget(0.0, 2.0, 1.0));
  const auto q = to_quasipolynomial(d);
  const auto rep = verify_multiplicity(q, Complex(0, 2));
  const auto jr = to_json(rep);
  CHECK(jr.at("certified_multiplicity") == 2);
  CHECK(complex_from_json(jr.at("root")) == Complex(0, 2));

  const auto set = find_roots(q, ContourBox(-1, 1, -3, 3));
  std::ostringstream csv;
  write_roots_csv(csv, set);
  CHECK(csv.str().rfind("re,im,multiplicity,residual\n", 0) == 0);
  CHECK(to_json(set).at("total_count") == set.total_count);

  const auto cert = certify_dominance(d, Complex(0, 2));
  CHECK(to_json(cert).at("verdict") == "certified_strict");

  Trajectory t;
  t.dt = 0.5;
  t.samples = {{1.0, 0.0}, {0.1, 0.3}};
  std::ostringstream tc;
  write_trajectory_csv(tc, t);
  CHECK(tc.str() == "t,y,y_prime\n0,1,0\n0.5,0.10000000000000001,0.29999999999999999\n");

  std::ostringstream fc;
  write_frequency_csv(fc, {{0.0, 0.0, 0.0}});
  CHECK(fc.str() == "omega_prime,magnitude_db,phase_deg\n0,0,0\n");
}
