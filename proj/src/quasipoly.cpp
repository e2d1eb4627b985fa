#include "delaymid/quasipoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "delaymid/errors.hpp"

namespace delaymid {

namespace {

const double kMaxExponent = std::log(std::numeric_limits<double>::max());

void strip_trailing_zeros(std::vector<double>& c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
}

template <typename T>
std::complex<T> horner(std::span<const double> c, std::complex<T> s) {
  std::complex<T> acc(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + static_cast<T>(*it);
  return acc;
}

void check_exponent(double rate, Complex s) {
  const double arg = rate * s.real();
  if (std::abs(arg) > kMaxExponent) {
    std::ostringstream os;
    os << "exponent " << arg << " out of range evaluating at " << s;
    throw OverflowError(os.str());
  }
}

}  // namespace

QuasiPolynomial::QuasiPolynomial(std::vector<Term> terms, bool strict_retarded) {
  for (auto& t : terms) {
    if (!std::isfinite(t.rate)) throw InvalidArgument("quasipolynomial rate must be finite");
    if (strict_retarded && t.rate > 0.0)
      throw InvalidArgument("positive exponent rate rejected (retarded type only)");
    for (double c : t.coeffs)
      if (!std::isfinite(c)) throw InvalidArgument("quasipolynomial coefficients must be finite");
    strip_trailing_zeros(t.coeffs);
  }
  std::erase_if(terms, [](const Term& t) { return t.coeffs.empty(); });
  if (terms.empty()) throw InvalidArgument("all-zero quasipolynomial");
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.rate > b.rate; });
  for (std::size_t i = 1; i < terms.size(); ++i)
    if (terms[i].rate == terms[i - 1].rate)
      throw InvalidArgument("quasipolynomial exponent rates must be pairwise distinct");
  terms_ = std::move(terms);
}

std::span<const double> QuasiPolynomial::coefficients_at(double rate) const noexcept {
  for (const auto& t : terms_)
    if (t.rate == rate) return t.coeffs;
  return {};
}

DelayDesign::DelayDesign(double a1, double a0, double alpha1, double alpha0, double tau)
    : a1_(a1), a0_(a0), alpha1_(alpha1), alpha0_(alpha0), tau_(tau) {
  for (double v : {a1, a0, alpha1, alpha0, tau})
    if (!std::isfinite(v)) throw InvalidArgument("design coefficients must be finite");
  if (!(tau > 0.0)) throw InvalidArgument("delay tau must be positive");
}

QuasiPolynomial to_quasipolynomial(const DelayDesign& d) {
  return QuasiPolynomial({{0.0, {d.a0(), d.a1(), 1.0}}, {-d.tau(), {d.alpha0(), d.alpha1()}}});
}

Complex evaluate(const QuasiPolynomial& q, Complex s) {
  Complex sum(0.0);
  for (const auto& t : q.terms()) {
    const Complex p = horner<double>(t.coeffs, s);
    if (t.rate == 0.0) {
      sum += p;
    } else {
      check_exponent(t.rate, s);
      sum += p * std::exp(t.rate * s);
    }
  }
  return sum;
}

ComplexExt evaluate_extended(const QuasiPolynomial& q, ComplexExt s) {
  ComplexExt sum(0.0L);
  for (const auto& t : q.terms()) {
    const ComplexExt p = horner<long double>(t.coeffs, s);
    if (t.rate == 0.0) {
      sum += p;
    } else {
      check_exponent(t.rate, Complex(static_cast<double>(s.real()), static_cast<double>(s.imag())));
      sum += p * std::exp(static_cast<long double>(t.rate) * s);
    }
  }
  return sum;
}

QuasiPolynomial derivative(const QuasiPolynomial& q, unsigned order) {
  if (order == 0) return q;
  std::vector<Term> terms = q.terms();
  for (unsigned k = 0; k < order; ++k) {
    for (auto& t : terms) {
      const auto& c = t.coeffs;
      std::vector<double> d(c.size(), 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        d[i] = t.rate * c[i];
        if (i + 1 < c.size()) d[i] += static_cast<double>(i + 1) * c[i + 1];
      }
      strip_trailing_zeros(d);
      t.coeffs = std::move(d);
    }
    std::erase_if(terms, [](const Term& t) { return t.coeffs.empty(); });
    if (terms.empty()) throw InvalidArgument("derivative vanishes identically");
  }
  return QuasiPolynomial(std::move(terms), /*strict_retarded=*/false);
}

unsigned degree(const QuasiPolynomial& q) {
  unsigned delta = 0;
  for (const auto& t : q.terms()) delta += static_cast<unsigned>(t.coeffs.size() - 1);
  return static_cast<unsigned>(q.size()) + delta - 1;
}

unsigned max_multiplicity_bound(const QuasiPolynomial& q) { return degree(q); }

QuasiPolynomial shift_and_scale(const QuasiPolynomial& q, double sigma0, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau) || !std::isfinite(sigma0))
    throw InvalidArgument("shift_and_scale requires finite sigma0 and tau > 0");
  std::vector<Term> out;
  out.reserve(q.size());
  for (const auto& t : q.terms()) {
    // p(sigma0 + z / tau) by repeated Horner composition with the linear map.
    std::vector<double> acc{0.0};
    for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it) {
      std::vector<double> next(acc.size() + 1, 0.0);
      for (std::size_t i = 0; i < acc.size(); ++i) {
        next[i] += sigma0 * acc[i];
        next[i + 1] += acc[i] / tau;
      }
      next[0] += *it;
      acc = std::move(next);
    }
    const double factor = std::exp(t.rate * sigma0);
    for (double& c : acc) c *= factor;
    strip_trailing_zeros(acc);
    acc.resize(t.coeffs.size());  // composition preserves the degree
    out.push_back({t.rate / tau, std::move(acc)});
  }
  // Terms stay sorted by rate; the first one carries the normalization.
  const double lead = out.front().coeffs.back();
  for (auto& t : out)
    for (double& c : t.coeffs) c /= lead;
  return QuasiPolynomial(std::move(out), /*strict_retarded=*/false);
}

double residual_scale(const QuasiPolynomial& q, Complex s) {
  const double rho = std::max(1.0, std::abs(s));
  double total = 0.0;
  for (const auto& t : q.terms()) {
    double poly = 0.0;
    for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it) poly = poly * rho + std::abs(*it);
    total += poly * std::exp(t.rate * s.real());
  }
  return total;
}

}  // namespace delaymid
