#include "delaymid/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "delaymid/errors.hpp"
#include "delaymid/mid_design.hpp"

namespace delaymid {

namespace {

using Poly = std::vector<double>;

Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

bool all_zero(const Poly& p) {
  return std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; });
}

Complex horner(const Poly& c, Complex s) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::optional<QuasiPolynomial> make(std::vector<Term> terms) {
  for (const auto& t : terms)
    if (!all_zero(t.coeffs)) return QuasiPolynomial(std::move(terms));
  return std::nullopt;
}

// Order of vanishing of q at s, 0 if q(s) != 0.
unsigned vanishing_order(const QuasiPolynomial& q, Complex s) {
  return verify_multiplicity(q, s, 1e-9).certified_multiplicity;
}

// Value of N/D at s, passing to the limit when both vanish there.
Complex ratio_limit(const std::optional<QuasiPolynomial>& n, const QuasiPolynomial& d, Complex s) {
  const unsigned od = vanishing_order(d, s);
  if (!n) return 0.0;
  if (od == 0) return evaluate(*n, s) / evaluate(d, s);
  const unsigned on = vanishing_order(*n, s);
  if (on < od) {
    std::ostringstream os;
    os << "closed loop has a pole of order " << od - on << " at " << s;
    throw PoleAtEvaluationPoint(os.str());
  }
  if (on > od) return 0.0;
  return evaluate(derivative(*n, od), s) / evaluate(derivative(d, od), s);
}

double sign_k(unsigned k) { return k % 2 == 0 ? 1.0 : -1.0; }

void require_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("omega must be positive and finite");
}

void require_k(unsigned k) {
  if (k == 0) throw InvalidArgument("k must be a positive integer");
}

}  // namespace

AbsorberParams::AbsorberParams(double m_a_, double zeta_, double Omega_) : m_a(m_a_), zeta(zeta_), Omega(Omega_) {
  if (!(m_a > 0.0) || !std::isfinite(m_a)) throw InvalidArgument("absorber mass must be positive");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw InvalidArgument("absorber damping ratio must be nonnegative");
  if (!(Omega > 0.0) || !std::isfinite(Omega)) throw InvalidArgument("absorber natural frequency must be positive");
}

RationalTransferFunction::RationalTransferFunction(std::vector<double> numerator, std::vector<double> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  for (double c : num_)
    if (!std::isfinite(c)) throw InvalidArgument("transfer function coefficients must be finite");
  for (double c : den_)
    if (!std::isfinite(c)) throw InvalidArgument("transfer function coefficients must be finite");
  if (all_zero(den_)) throw InvalidArgument("transfer function denominator is identically zero");
}

Complex RationalTransferFunction::operator()(Complex s) const {
  const Complex d = horner(den_, s);
  if (d == 0.0) throw PoleAtEvaluationPoint("transfer function denominator vanishes");
  return horner(num_, s) / d;
}

ResonatorDesign resonator_design(double omega, unsigned k) {
  require_omega(omega);
  require_k(k);
  const double kpi = k * std::numbers::pi;
  ResonatorDesign r;
  r.omega = omega;
  r.k = k;
  r.tau_k = kpi / omega;
  r.coeffs = DelayDesign(-2.0 * omega / kpi, omega * omega, sign_k(k) * 2.0 * omega / kpi, 0.0, r.tau_k);
  const auto q = to_quasipolynomial(r.coeffs);
  const auto dq = derivative(q, 1);
  const Complex s(0.0, omega);
  r.notch_residuals = {std::abs(evaluate(q, s)), std::abs(evaluate(dq, s))};
  r.notch_scales = {residual_scale(q, s), residual_scale(dq, s)};
  return r;
}

bool resonator_matches_theorem(double omega, unsigned k, double tau) {
  const ResonatorDesign r = resonator_design(omega, k);
  const double t = tau > 0.0 ? tau : r.tau_k;
  const DelayDesign ref = assign_complex_pair(AssignmentTarget(0.0, omega, t));
  const double a[] = {r.coeffs.a1(), r.coeffs.a0(), r.coeffs.alpha1(), r.coeffs.alpha0(), r.coeffs.tau()};
  const double b[] = {ref.a1(), ref.a0(), ref.alpha1(), ref.alpha0(), ref.tau()};
  double mag = 0.0;
  for (int i = 0; i < 4; ++i) mag = std::max({mag, std::abs(a[i]), std::abs(b[i])});
  for (int i = 0; i < 4; ++i)
    if (std::abs(a[i] - b[i]) > 1e-12 * mag) return false;
  return std::abs(a[4] - b[4]) <= 1e-12 * a[4];
}

FeedbackLaw absorber_feedback(const AbsorberParams& p, double omega, unsigned k) {
  require_omega(omega);
  require_k(k);
  const double tau = k * std::numbers::pi / omega;
  FeedbackLaw law;
  law.gain_pos = p.m_a * (p.Omega * p.Omega - omega * omega);
  law.gain_vel = 2.0 * p.m_a * (p.zeta * p.Omega + 1.0 / tau);
  law.gain_vel_delayed = -2.0 * p.m_a * sign_k(k) / tau;
  law.delay = tau;
  return law;
}

QuasiPolynomial closed_loop_char(const AbsorberParams& p, const FeedbackLaw& law) {
  if (!(law.delay > 0.0)) throw InvalidArgument("feedback delay must be positive");
  const double c0 = p.Omega * p.Omega - law.gain_pos / p.m_a;
  const double c1 = 2.0 * p.zeta * p.Omega - law.gain_vel / p.m_a;
  return QuasiPolynomial({{0.0, {c0, c1, 1.0}}, {-law.delay, {0.0, -law.gain_vel_delayed / p.m_a}}});
}

std::pair<Complex, Complex> fmc_response(const RationalTransferFunction& C, const RationalTransferFunction& G,
                                         const RationalTransferFunction& F, const ResonatorDesign& d, Complex s) {
  const DelayDesign& c = d.coeffs;
  const Poly p0{c.a0(), c.a1(), 1.0}, p1{c.alpha0(), c.alpha1()};
  const Poly cg_den = mul(C.denominator(), G.denominator());
  const Poly cg_num = mul(C.numerator(), G.numerator());
  const double rate = -c.tau();

  // Everything over the common denominator (Delta Cd Gd + Cn Gn) Fd.
  const auto den = make({{0.0, mul(add(mul(p0, cg_den), cg_num), F.denominator())},
                         {rate, mul(mul(p1, cg_den), F.denominator())}});
  if (!den) throw PoleAtEvaluationPoint("closed-loop denominator vanishes identically");
  const Poly fn_cg = mul(F.numerator(), cg_den);
  const auto n_sd = make({{0.0, mul(p0, fn_cg)}, {rate, mul(p1, fn_cg)}});
  const Poly fn_cn = mul(F.numerator(), cg_num);
  const auto n_sw = make({{0.0, mul(p0, fn_cn)}, {rate, mul(p1, fn_cn)}});
  return {ratio_limit(n_sw, *den, s), ratio_limit(n_sd, *den, s)};
}

double crane_omega(double length, double g) {
  if (!(length > 0.0) || !(g > 0.0)) throw InvalidArgument("crane length and gravity must be positive");
  return std::sqrt(g / length);
}

DelayDesign damped_mode_design(double omega, double zeta, double tau) {
  require_omega(omega);
  if (!(zeta >= 0.0 && zeta < 1.0)) throw InvalidArgument("damped mode requires 0 <= zeta < 1");
  return assign_complex_pair(AssignmentTarget(-zeta * omega, omega * std::sqrt(1.0 - zeta * zeta), tau));
}

DelayDesign free_delay_design(double omega, double tau) {
  require_omega(omega);
  return assign_complex_pair(AssignmentTarget(0.0, omega, tau));
}

std::vector<FrequencyPoint> notch_response(const ResonatorDesign& d, const std::vector<double>& omegas) {
  const auto q = to_quasipolynomial(d.coeffs);
  std::vector<FrequencyPoint> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    const Complex v = evaluate(q, Complex(0.0, w)) / (d.omega * d.omega);
    out.push_back({w, 20.0 * std::log10(std::abs(v)), std::arg(v) * 180.0 / std::numbers::pi});
  }
  return out;
}

}  // namespace delaymid
