#pragma once

#include <complex>
#include <span>
#include <vector>

namespace delaymid {

using Complex = std::complex<double>;
using ComplexExt = std::complex<long double>;

// One summand p(s) * exp(rate * s). Coefficients are stored low-to-high.
struct Term {
  double rate = 0.0;
  std::vector<double> coeffs;

  friend bool operator==(const Term&, const Term&) = default;
};

// Finite sum of polynomial-times-exponential terms with real coefficients.
//
// Construction normalizes the input: trailing zero coefficients are stripped,
// identically zero terms are dropped and the remaining terms are sorted by
// decreasing rate. An all-zero input is rejected because its degree is
// undefined. With strict_retarded (the default) positive rates are rejected.
class QuasiPolynomial {
 public:
  explicit QuasiPolynomial(std::vector<Term> terms, bool strict_retarded = true);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  // Coefficients of the term with the given rate, empty if absent.
  std::span<const double> coefficients_at(double rate) const noexcept;

  friend bool operator==(const QuasiPolynomial&, const QuasiPolynomial&) = default;

 private:
  std::vector<Term> terms_;
};

// Characteristic data of y'' + a1 y' + a0 y + alpha1 y'(t - tau) + alpha0 y(t - tau) = 0.
class DelayDesign {
 public:
  DelayDesign(double a1, double a0, double alpha1, double alpha0, double tau);

  double a1() const noexcept { return a1_; }
  double a0() const noexcept { return a0_; }
  double alpha1() const noexcept { return alpha1_; }
  double alpha0() const noexcept { return alpha0_; }
  double tau() const noexcept { return tau_; }

  friend bool operator==(const DelayDesign&, const DelayDesign&) = default;

 private:
  double a1_, a0_, alpha1_, alpha0_, tau_;
};

// s^2 + a1 s + a0 + exp(-s tau) (alpha1 s + alpha0). A zero delayed part is dropped.
QuasiPolynomial to_quasipolynomial(const DelayDesign& d);

// Throws OverflowError when |Re(rate * s)| leaves the double exponent range.
Complex evaluate(const QuasiPolynomial& q, Complex s);

// Same sum accumulated in long double, for residual certification.
ComplexExt evaluate_extended(const QuasiPolynomial& q, ComplexExt s);

// Term-wise d/ds [p e^{rate s}] = (p' + rate p) e^{rate s}. Throws
// InvalidArgument if the result vanishes identically (order above the degree
// of a pure polynomial).
QuasiPolynomial derivative(const QuasiPolynomial& q, unsigned order = 1);

// D = (number of terms) + (sum of polynomial degrees) - 1.
unsigned degree(const QuasiPolynomial& q);

// Polya-Szego: no root of q has multiplicity above degree(q).
unsigned max_multiplicity_bound(const QuasiPolynomial& q);

// Quasipolynomial proportional to z -> q(sigma0 + z / tau), normalized so the
// leading coefficient of the undelayed term (or of the term with the largest
// rate when there is no undelayed one) equals 1. Roots map by z = tau (s - sigma0).
QuasiPolynomial shift_and_scale(const QuasiPolynomial& q, double sigma0, double tau);

// Magnitude used to normalize residuals at s:
//   sum_k |e^{rate_k s}| sum_i |c_{k,i}| max(1, |s|)^i.
// Strictly positive for any valid quasipolynomial.
double residual_scale(const QuasiPolynomial& q, Complex s);

}  // namespace delaymid
