#pragma once

#include <vector>

#include "delaymid/quasipoly.hpp"

namespace delaymid {

// Desired rightmost root sigma0 + i theta0 (theta0 = 0 for a real root) and delay.
// Negative theta0 is folded to |theta0|; the coefficient formulas are even in it.
class AssignmentTarget {
 public:
  AssignmentTarget(double sigma0, double theta0, double tau);

  double sigma0() const noexcept { return sigma0_; }
  double theta0() const noexcept { return theta0_; }
  double tau() const noexcept { return tau_; }
  Complex root() const noexcept { return {sigma0_, theta0_}; }

 private:
  double sigma0_, theta0_, tau_;
};

inline constexpr double kDefaultMultiplicityTol = 1e-9;

struct MultiplicityReport {
  Complex root;
  std::vector<double> residuals;  // |q^{(j)}(root)|, j = 0..degree(q)
  std::vector<double> scales;     // residual_scale(q^{(j)}, root)
  unsigned certified_multiplicity = 0;
  double scale = 0.0;  // scales[0]
  double tol = kDefaultMultiplicityTol;
};

// Root of multiplicity 4 at sigma0 (theta0 must be 0).
DelayDesign assign_real_root(const AssignmentTarget& t);

// Pair sigma0 +- i theta0 of multiplicity 2 each (theta0 must be > 0).
DelayDesign assign_complex_pair(const AssignmentTarget& t);

// Dispatches on theta0: real quadruple root for 0, complex double pair otherwise.
DelayDesign assign(const AssignmentTarget& t);

// Normalized quasipolynomial for sigma0 = 0, tau = 1 and root pair +-i theta0;
// theta0 = 0 yields z^2 - 4z + 6 - e^{-z}(2z + 6).
QuasiPolynomial normalized_complex(double theta0);

// certified_multiplicity is the smallest j with residuals[j] >= tol * scales[j].
// Residuals within a decade of the threshold are recomputed in long double.
// Throws Indeterminate when every residual up to degree(q) is below tolerance.
MultiplicityReport verify_multiplicity(const QuasiPolynomial& q, Complex s0,
                                       double tol = kDefaultMultiplicityTol);

}  // namespace delaymid
