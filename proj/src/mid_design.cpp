#include "delaymid/mid_design.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "delaymid/errors.hpp"

namespace delaymid {

namespace {

// Below this |tau theta0| the closed forms lose most of their digits to
// cancellation in tau^2 theta0^2 - sin^2(tau theta0).
constexpr double kSeriesThreshold = 1e-2;

double even_series(const std::array<double, 4>& c, double u2) {
  return c[0] + u2 * (c[1] + u2 * (c[2] + u2 * c[3]));
}

// Regular even functions of u = tau theta0 that build the coefficients:
//   f1 = u (u - sin u cos u) / (u^2 - sin^2 u) -> 2
//   f2 = u^2 (u^2 + sin^2 u) / (u^2 - sin^2 u) -> 6
//   f3 = u (u cos u - sin u) / (u^2 - sin^2 u) -> -1
//   f4 = u^3 sin u / (u^2 - sin^2 u)          -> 3
struct Ratios {
  double f1, f2, f3, f4;
};

Ratios small_u_ratios(double u) {
  const double u2 = u * u;
  const double d = even_series({1.0 / 3, -2.0 / 45, 1.0 / 315, -2.0 / 14175}, u2);
  const double n1 = even_series({2.0 / 3, -2.0 / 15, 4.0 / 315, -2.0 / 2835}, u2);
  const double n2 = even_series({2.0, -1.0 / 3, 2.0 / 45, -1.0 / 315}, u2);
  const double n3 = even_series({-1.0 / 3, 1.0 / 30, -1.0 / 840, 1.0 / 45360}, u2);
  const double n4 = even_series({1.0, -1.0 / 6, 1.0 / 120, -1.0 / 5040}, u2);
  return {n1 / d, n2 / d, n3 / d, n4 / d};
}

void require_finite(std::initializer_list<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) throw Error("non-finite value while synthesizing coefficients");
}

}  // namespace

AssignmentTarget::AssignmentTarget(double sigma0, double theta0, double tau)
    : sigma0_(sigma0), theta0_(std::abs(theta0)), tau_(tau) {
  if (!std::isfinite(sigma0) || !std::isfinite(theta0) || !std::isfinite(tau))
    throw InvalidArgument("assignment target must be finite");
  if (!(tau > 0.0)) throw InvalidArgument("delay tau must be positive");
}

DelayDesign assign_real_root(const AssignmentTarget& t) {
  if (t.theta0() != 0.0) throw InvalidArgument("assign_real_root requires theta0 = 0");
  const double s = t.sigma0();
  const double tau = t.tau();
  const double e = std::exp(s * tau);
  const double a1 = -4.0 / tau - 2.0 * s;
  const double a0 = 6.0 / (tau * tau) + 4.0 / tau * s + s * s;
  const double alpha1 = -2.0 / tau * e;
  const double alpha0 = 2.0 / tau * e * (s - 3.0 / tau);
  require_finite({a1, a0, alpha1, alpha0});
  return {a1, a0, alpha1, alpha0, tau};
}

DelayDesign assign_complex_pair(const AssignmentTarget& t) {
  if (!(t.theta0() > 0.0)) throw InvalidArgument("assign_complex_pair requires theta0 > 0");
  const double s = t.sigma0();
  const double th = t.theta0();
  const double tau = t.tau();
  const double u = tau * th;
  const double e = std::exp(s * tau);

  double a1, a0, alpha1, alpha0;
  if (u < kSeriesThreshold) {
    const Ratios r = small_u_ratios(u);
    a1 = -2.0 * s - 2.0 * r.f1 / tau;
    a0 = s * s + 2.0 * s * r.f1 / tau + r.f2 / (tau * tau);
    alpha1 = 2.0 * e * r.f3 / tau;
    alpha0 = -s * alpha1 - 2.0 * e * r.f4 / (tau * tau);
  } else {
    const double sn = std::sin(u);
    const double cs = std::cos(u);
    const double den = u * u - sn * sn;
    a1 = -2.0 * s - 2.0 * th * (u - sn * cs) / den;
    a0 = s * s + 2.0 * s * th * (u - sn * cs) / den + th * th * (u * u + sn * sn) / den;
    alpha1 = 2.0 * th * e * (u * cs - sn) / den;
    alpha0 = 2.0 * th * e * (s * (sn - u * cs) / den - tau * th * th * sn / den);
  }
  require_finite({a1, a0, alpha1, alpha0});
  return {a1, a0, alpha1, alpha0, tau};
}

DelayDesign assign(const AssignmentTarget& t) {
  return t.theta0() == 0.0 ? assign_real_root(t) : assign_complex_pair(t);
}

QuasiPolynomial normalized_complex(double theta0) {
  return to_quasipolynomial(assign(AssignmentTarget(0.0, theta0, 1.0)));
}

MultiplicityReport verify_multiplicity(const QuasiPolynomial& q, Complex s0, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("verify_multiplicity requires tol > 0");
  if (!std::isfinite(s0.real()) || !std::isfinite(s0.imag()))
    throw InvalidArgument("verify_multiplicity requires a finite point");

  const unsigned bound = degree(q);
  MultiplicityReport report;
  report.root = s0;
  report.tol = tol;
  report.residuals.reserve(bound + 1);
  report.scales.reserve(bound + 1);

  QuasiPolynomial dq = q;
  bool certified = false;
  for (unsigned j = 0; j <= bound; ++j) {
    if (j > 0) dq = derivative(dq, 1);
    double r = std::abs(evaluate(dq, s0));
    const double sc = residual_scale(dq, s0);
    const double threshold = tol * sc;
    if (r >= 0.1 * threshold && r <= 10.0 * threshold)
      r = static_cast<double>(std::abs(evaluate_extended(dq, ComplexExt(s0.real(), s0.imag()))));
    report.residuals.push_back(r);
    report.scales.push_back(sc);
    if (!certified && r >= threshold) {
      report.certified_multiplicity = j;
      certified = true;
    }
  }
  report.scale = report.scales.front();
  if (!certified) {
    std::ostringstream os;
    os << "all residuals at " << s0 << " below tolerance up to the Polya-Szego bound " << bound
       << "; multiplicity indeterminate";
    throw Indeterminate(os.str());
  }
  return report;
}

}  // namespace delaymid
