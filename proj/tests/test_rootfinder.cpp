#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "delaymid/errors.hpp"
#include "delaymid/mid_design.hpp"
#include "delaymid/rootfinder.hpp"
#include "doctest.h"
#include "support/newton_oracle.hpp"

using namespace delaymid;
using delaymid::testing::newton_grid_count;

namespace {

const ContourBox kLocusWindow(-4.75, 0.25, -25, 25);

bool has_root(const RootSet& rs, Complex z, double tol, unsigned mult = 1) {
  for (const auto& r : rs.roots)
    if (std::abs(r.location.real() - z.real()) <= tol && std::abs(r.location.imag() - z.imag()) <= tol &&
        r.multiplicity == mult)
      return true;
  return false;
}

}  // namespace

TEST_CASE("ContourBox") {
  CHECK_THROWS_AS(ContourBox(1, 1, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(ContourBox(0, 1, 2, 1), InvalidArgument);
  const ContourBox b(-1, 3, -2, 2);
  CHECK(b.center() == Complex(1, 0));
  CHECK(b.conjugate_symmetric());
  CHECK(b.contains(Complex(0, 0)));
  CHECK_FALSE(b.contains(Complex(-1, 0)));
  const auto e = b.expanded(2.0);
  CHECK(e == ContourBox(-3, 5, -4, 4));
}

TEST_CASE("count_roots") {
  CHECK(count_roots(normalized_complex(0.0), ContourBox(-1, 1, -1, 1)) == 4);
  CHECK(count_roots(normalized_complex(2.0), ContourBox(-0.5, 0.5, 1.5, 2.5)) == 2);
  CHECK(count_roots(to_quasipolynomial(DelayDesign(0, 0, 0, 0, 1)), ContourBox(1, 2, 1, 2)) == 0);
  CHECK(count_roots(to_quasipolynomial(DelayDesign(0, 0, 0, 0, 1)), ContourBox(-1, 2, -1, 2)) == 2);
  // The quadruple root sits on this edge.
  CHECK_THROWS_AS(count_roots(normalized_complex(0.0), ContourBox(0, 1, -1, 1)), BoundaryRoot);
}

TEST_CASE("find_roots on the normalized spectra") {
  const auto r0 = find_roots(normalized_complex(0.0), kLocusWindow);
  CHECK(has_root(r0, {0, 0}, 1e-6, 4));
  CHECK(has_root(r0, {-1.731, 10.16}, 0.005));
  CHECK(has_root(r0, {-1.731, -10.16}, 0.005));

  const auto r8 = find_roots(normalized_complex(8.0), kLocusWindow);
  CHECK(has_root(r8, {0, 8}, 1e-6, 2));
  CHECK(has_root(r8, {-2.466, 15.66}, 0.005));

  const auto r459 = find_roots(normalized_complex(4.59), kLocusWindow);
  CHECK(has_root(r459, {-2.735, 12.14}, 0.005));
  CHECK(has_root(r459, {-2.735, -12.14}, 0.005));

  for (const auto* rs : {&r0, &r8, &r459}) {
    unsigned sum = 0;
    for (const auto& r : rs->roots) {
      sum += r.multiplicity;
      CHECK(rs->box.contains(r.location));
      CHECK(r.refined);
    }
    CHECK(sum == rs->total_count);
    for (std::size_t i = 1; i < rs->roots.size(); ++i)
      CHECK(rs->roots[i - 1].location.real() >= rs->roots[i].location.real());
  }
}

TEST_CASE("newton_refine") {
  const auto quad = newton_refine(normalized_complex(0.0), {0.1, 0.1}, 4);
  CHECK(std::abs(quad.location) < 1e-6);
  CHECK(quad.refined);
  CHECK(quad.multiplicity == 4);

  const auto dbl = newton_refine(normalized_complex(2.0), {0.1, 1.9}, 2);
  CHECK(std::abs(dbl.location - Complex(0, 2)) < 1e-8);
  CHECK(dbl.refined);

  const auto simple = newton_refine(normalized_complex(0.0), {-1.7, 10.2}, 1);
  CHECK(std::abs(simple.location.real() + 1.731) < 0.005);
  CHECK(std::abs(simple.location.imag() - 10.16) < 0.005);
  CHECK(simple.residual < 1e-9);

  // q = s^2 + 1 has q' = 0 at the origin.
  const QuasiPolynomial p(std::vector<Term>{{0.0, {1.0, 0.0, 1.0}}});
  CHECK_THROWS_AS(newton_refine(p, {0.0, 0.0}, 1), DerivativeVanished);
  // Real start on a polynomial with only complex roots never converges.
  CHECK_THROWS_AS(newton_refine(p, {0.3, 0.0}, 1), MaxIterations);
}

TEST_CASE("tail_radius") {
  CHECK(tail_radius(DelayDesign(0, 0, 0, 0, 1), -3.0) == 0.0);
  CHECK(tail_radius(DelayDesign(0, 0, 0, 0, 1), 2.0) == 0.0);

  const DelayDesign hr(-4, 6, -2, -6, 1);
  const double r = tail_radius(hr, -0.1);
  REQUIRE(std::isfinite(r));
  REQUIRE(r > 0.0);
  const double e = std::exp(0.1);
  const auto q = to_quasipolynomial(hr);
  for (int k = 0; k < 2000; ++k) {
    const double phi = 2 * M_PI * k / 2000;
    const Complex s = std::polar(r, phi);
    CHECK(r * r > 4 * r + 6 + e * (2 * r + 6));
    if (s.real() >= -0.1) CHECK(std::abs(evaluate(q, s)) > 0.0);
  }
  double prev = INFINITY;
  for (double thr = -2.0; thr <= 2.0; thr += 0.25) {
    const double cur = tail_radius(hr, thr);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("certify_dominance") {
  const auto d2 = assign(AssignmentTarget(0, 2, 1));
  const auto c2 = certify_dominance(d2, {0, 2});
  CHECK(c2.verdict == Verdict::certified_strict);
  CHECK(c2.expected_multiplicity == 2);
  CHECK(c2.margin > 0.0);
  CHECK(c2.search_box.re_max() >= c2.tail_radius);

  const auto dr = assign(AssignmentTarget(-1, 0, 1));
  const auto cr = certify_dominance(dr, {-1, 0});
  CHECK(cr.verdict == Verdict::certified_strict);
  CHECK(cr.expected_multiplicity == 4);

  // Regression baseline for a tampered design.
  const DelayDesign bad(d2.a1(), d2.a0(), d2.alpha1(), d2.alpha0() + 0.5, 1);
  const auto cb = certify_dominance(bad, {0, 2});
  CHECK(cb.verdict == Verdict::refuted);
  CHECK(has_root(RootSet{cb.offending, cb.search_box, 0}, {0.491971, 1.781406}, 1e-5));
  CHECK(std::string(to_string(cb.verdict)) == "refuted");
}

TEST_CASE("property: count_roots matches a dense-grid Newton oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> sig(-1.0, 0.5), th(0.0, 6.0), tau(0.5, 2.0), coef(-3.0, 3.0);
  std::uniform_real_distribution<double> half(0.4, 1.5);
  int checked = 0, nonzero = 0;
  for (int trial = 0; trial < 60 && checked < 24; ++trial) {
    // Alternate between MID designs and unstructured coefficients.
    const DelayDesign d = trial % 2 == 0 ? assign(AssignmentTarget(sig(rng), th(rng), tau(rng)))
                                         : DelayDesign(coef(rng), coef(rng), coef(rng), coef(rng), tau(rng));
    const Complex c(coef(rng) / 1.5, 2.0 * coef(rng));
    const double hw = half(rng), hh = half(rng);
    const ContourBox box(c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh);
    unsigned count = 0;
    try {
      count = count_roots(to_quasipolynomial(d), box);
    } catch (const BoundaryRoot&) {
      continue;
    }
    CAPTURE(trial);
    CHECK(count == newton_grid_count(d, box));
    ++checked;
    if (count > 0) ++nonzero;
  }
  CHECK(checked >= 20);
  CHECK(nonzero >= 5);
}

TEST_CASE("property: MID boxes match the oracle at the assigned cluster") {
  for (double th : {0.0, 2.0, 4.59}) {
    const auto d = assign(AssignmentTarget(-0.3, th, 1.0));
    const ContourBox box(-0.8, 0.2, th - 0.6, th + 0.7);
    CHECK(count_roots(to_quasipolynomial(d), box) == newton_grid_count(d, box));
  }
}

TEST_CASE("property: conjugate closure, additivity and residual re-check") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.0, 9.0), sig(-1.0, 0.5), tau(0.5, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto d = assign(AssignmentTarget(sig(rng), th(rng), tau(rng)));
    const auto q = to_quasipolynomial(d);
    const ContourBox box(-4.1, 1.3, -15.3, 15.3);
    const auto rs = find_roots(q, box);
    CHECK(rs.box.conjugate_symmetric());
    for (const auto& r : rs.roots) {
      if (r.location.imag() == 0.0) continue;
      const bool paired = std::any_of(rs.roots.begin(), rs.roots.end(), [&](const RootRecord& o) {
        return o.location == std::conj(r.location) && o.multiplicity == r.multiplicity;
      });
      CHECK(paired);
    }
    for (const auto& r : rs.roots) {
      if (!r.refined) continue;
      auto dq = q;
      for (unsigned j = 0; j < r.multiplicity; ++j) {
        if (j > 0) dq = derivative(dq, 1);
        CHECK(std::abs(evaluate(dq, r.location)) < 1e-6 * residual_scale(dq, r.location));
      }
      const auto rep = verify_multiplicity(q, r.location, 1e-6);
      CHECK(rep.certified_multiplicity >= 1);
    }

    const Complex c = box.center() + Complex(0.0137, 0.0211);
    const std::array<ContourBox, 4> quads{
        ContourBox(box.re_min(), c.real(), box.im_min(), c.imag()),
        ContourBox(c.real(), box.re_max(), box.im_min(), c.imag()),
        ContourBox(box.re_min(), c.real(), c.imag(), box.im_max()),
        ContourBox(c.real(), box.re_max(), c.imag(), box.im_max())};
    try {
      unsigned sum = 0;
      for (const auto& b : quads) sum += count_roots(q, b);
      CHECK(sum == count_roots(q, box));
    } catch (const BoundaryRoot&) {
    }
  }
}

TEST_CASE("property: dominance on the design grid") {
  for (double sigma : {-1.0, 0.0, 0.5})
    for (double th : {0.0, 1.0, 5.0, 10.0})
      for (double tau : {0.5, 1.0, 2.0}) {
        const AssignmentTarget t(sigma, th, tau);
        const auto cert = certify_dominance(assign(t), t.root());
        CAPTURE(sigma);
        CAPTURE(th);
        CAPTURE(tau);
        CHECK(cert.verdict == Verdict::certified_strict);
        CHECK(cert.margin > 0.0);
      }
}
