#include <array>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "delaymid/errors.hpp"
#include "delaymid/mid_design.hpp"
#include "doctest.h"

using namespace delaymid;
using std::numbers::pi;

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;

// Complex-pair coefficients evaluated literally in 50-digit arithmetic.
std::array<double, 4> complex_pair_mp(double sigma0_d, double theta0_d, double tau_d) {
  const mp s(sigma0_d), th(theta0_d), tau(tau_d);
  const mp u = tau * th;
  const mp sn = sin(u), cs = cos(u), e = exp(s * tau);
  const mp den = u * u - sn * sn;
  const mp a1 = -2 * s - 2 * th * (u - sn * cs) / den;
  const mp a0 = s * s + 2 * s * th * (u - sn * cs) / den + th * th * (u * u + sn * sn) / den;
  const mp al1 = 2 * th * e * (u * cs - sn) / den;
  const mp al0 = 2 * th * e * (s * (sn - u * cs) / den - tau * th * th * sn / den);
  return {static_cast<double>(a1), static_cast<double>(a0), static_cast<double>(al1),
          static_cast<double>(al0)};
}

std::array<double, 4> coeffs(const DelayDesign& d) { return {d.a1(), d.a0(), d.alpha1(), d.alpha0()}; }

double coeff_distance(const DelayDesign& a, const DelayDesign& b) {
  double m = 0.0;
  const auto x = coeffs(a), y = coeffs(b);
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace

TEST_CASE("assign_real_root") {
  const auto d = assign_real_root(AssignmentTarget(0, 0, 1));
  CHECK(d.a1() == -4.0);
  CHECK(d.a0() == 6.0);
  CHECK(d.alpha1() == -2.0);
  CHECK(d.alpha0() == -6.0);

  const auto d2 = assign_real_root(AssignmentTarget(0, 0, 2));
  CHECK(d2.a1() == -2.0);
  CHECK(d2.a0() == 1.5);
  CHECK(d2.alpha1() == -1.0);
  CHECK(d2.alpha0() == -1.5);
  CHECK(verify_multiplicity(to_quasipolynomial(d2), 0.0).certified_multiplicity == 4);

  const auto d3 = assign_real_root(AssignmentTarget(-1, 0, 1));
  CHECK(d3.alpha1() == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-15));
  const auto report = verify_multiplicity(to_quasipolynomial(d3), -1.0);
  CHECK(report.certified_multiplicity == 4);
  for (int j = 0; j < 4; ++j) CHECK(report.residuals[j] < 1e-12 * report.scales[j]);

  CHECK_THROWS_AS(assign_real_root(AssignmentTarget(0, 1, 1)), InvalidArgument);
  CHECK_THROWS_AS(AssignmentTarget(0, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(AssignmentTarget(0, 0, -1), InvalidArgument);
}

TEST_CASE("assign_complex_pair matches the closed form and the normalized expressions") {
  for (double th : {0.5, 1.0, 2.0, pi, 7.3}) {
    const auto d = assign_complex_pair(AssignmentTarget(0, th, 1));
    // Normalized expressions, written out independently.
    const double s = std::sin(th), c = std::cos(th), den = th * th - s * s;
    CHECK(d.a1() == doctest::Approx(-2 * th * (th - s * c) / den).epsilon(1e-13));
    CHECK(d.a0() == doctest::Approx(th * th * (th * th + s * s) / den).epsilon(1e-13));
    CHECK(d.alpha1() == doctest::Approx(2 * th * (th * c - s) / den).epsilon(1e-13));
    CHECK(d.alpha0() == doctest::Approx(-2 * th * th * th * s / den).epsilon(1e-13).scale(th * th));
  }
  for (double sigma : {-1.3, 0.0, 0.7})
    for (double th : {0.005, 0.05, 1.0, 9.0})
      for (double tau : {0.5, 1.7}) {
        const auto d = assign_complex_pair(AssignmentTarget(sigma, th, tau));
        const auto ref = complex_pair_mp(sigma, th, tau);
        const auto got = coeffs(d);
        double mag = 1.0;
        for (double r : ref) mag = std::max(mag, std::abs(r));
        for (int i = 0; i < 4; ++i) CHECK(std::abs(got[i] - ref[i]) <= 1e-12 * mag);
      }
  CHECK_THROWS_AS(assign_complex_pair(AssignmentTarget(0, 0, 1)), InvalidArgument);
}

TEST_CASE("small theta0 series path keeps full accuracy") {
  for (double u : {9.9e-3, 1e-3, 1e-5, 1e-7}) {
    const auto d = assign_complex_pair(AssignmentTarget(0.3, u / 1.5, 1.5));
    const auto ref = complex_pair_mp(0.3, u / 1.5, 1.5);
    const auto got = coeffs(d);
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-13));
  }
  // Continuity across the threshold between series and closed form.
  const auto below = assign_complex_pair(AssignmentTarget(0, 0.00999999, 1));
  const auto above = assign_complex_pair(AssignmentTarget(0, 0.01000001, 1));
  CHECK(coeff_distance(below, above) < 1e-6);
}

TEST_CASE("evenness and continuity splice") {
  for (double th : {0.003, 0.4, 3.0}) {
    CHECK(assign_complex_pair(AssignmentTarget(0.2, th, 1.3)) ==
          assign_complex_pair(AssignmentTarget(0.2, -th, 1.3)));
  }
  for (double sigma : {-1.0, 0.0, 0.5})
    for (double tau : {0.5, 1.0, 2.0}) {
      const auto real = assign_real_root(AssignmentTarget(sigma, 0, tau));
      double prev = INFINITY;
      for (double th : {1e-2, 1e-4, 1e-6}) {
        const double dist = coeff_distance(assign_complex_pair(AssignmentTarget(sigma, th, tau)), real);
        CHECK(dist < prev);
        prev = dist;
      }
      CHECK(prev < 1e-8);
    }
}

TEST_CASE("normalized_complex") {
  CHECK(normalized_complex(0.0) == to_quasipolynomial(DelayDesign(-4, 6, -2, -6, 1)));

  const auto q = normalized_complex(pi);
  const auto& t0 = q.terms()[0].coeffs;
  const auto& t1 = q.terms()[1].coeffs;
  CHECK(t0[1] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(t0[0] == doctest::Approx(pi * pi).epsilon(1e-14));
  CHECK(t1[1] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::abs(t1[0]) < 1e-13);
  for (Complex r : {Complex(0, pi), Complex(0, -pi)})
    CHECK(verify_multiplicity(q, r).certified_multiplicity == 2);

  const auto near = normalized_complex(1e-6);
  const std::array<double, 4> expect{-4, 6, -2, -6};
  const std::array<double, 4> got{near.terms()[0].coeffs[1], near.terms()[0].coeffs[0],
                                  near.terms()[1].coeffs[1], near.terms()[1].coeffs[0]};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-9);
}

TEST_CASE("verify_multiplicity") {
  const auto hat_r = normalized_complex(0.0);
  CHECK(verify_multiplicity(hat_r, 0.0, 1e-9).certified_multiplicity == 4);
  CHECK(verify_multiplicity(normalized_complex(2.0), Complex(0, 2), 1e-9).certified_multiplicity == 2);
  const auto off = verify_multiplicity(hat_r, 1.0, 1e-9);
  CHECK(off.certified_multiplicity == 0);
  CHECK(off.residuals.size() == 5);
  CHECK(off.scale == off.scales[0]);

  CHECK_THROWS_AS(verify_multiplicity(hat_r, 0.0, 0.0), InvalidArgument);
  // Residuals never exceed their scale, so tol > 1 leaves nothing certifiable.
  CHECK_THROWS_AS(verify_multiplicity(hat_r, 0.5, 10.0), Indeterminate);
}

TEST_CASE("property: assigned residuals on a design grid") {
  for (double sigma : {-1.0, -0.3, 0.0, 0.5})
    for (double th : {0.0, 0.3, 1.0, 5.0, 10.0})
      for (double tau : {0.5, 1.0, 2.0}) {
        const AssignmentTarget t(sigma, th, tau);
        const auto q = to_quasipolynomial(assign(t));
        const auto rep = verify_multiplicity(q, t.root());
        const unsigned expected = th == 0.0 ? 4 : 2;
        CAPTURE(sigma);
        CAPTURE(th);
        CAPTURE(tau);
        CHECK(rep.certified_multiplicity == expected);
        for (unsigned j = 0; j < expected; ++j) CHECK(rep.residuals[j] < 1e-9 * rep.scales[j]);
        CHECK(rep.residuals[expected] > 1e-3 * rep.scales[expected]);
        CHECK(rep.certified_multiplicity <= max_multiplicity_bound(q));
      }
}

TEST_CASE("property: shift_and_scale of a complex design gives the normalized quasipolynomial") {
  for (double sigma : {-0.8, 0.0, 0.4})
    for (double th : {0.2, 2.5, 6.0})
      for (double tau : {0.5, 1.0, 2.0}) {
        const auto hat =
            shift_and_scale(to_quasipolynomial(assign_complex_pair(AssignmentTarget(sigma, th, tau))), sigma, tau);
        const auto ref = normalized_complex(tau * th);
        REQUIRE(hat.size() == ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) {
          CHECK(hat.terms()[k].rate == ref.terms()[k].rate);
          const auto& a = hat.terms()[k].coeffs;
          const auto& b = ref.terms()[k].coeffs;
          REQUIRE(a.size() == b.size());
          double mag = 0.0;
          for (double v : b) mag = std::max(mag, std::abs(v));
          for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * mag);
        }
      }
}
