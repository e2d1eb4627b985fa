#pragma once

#include <string>
#include <vector>

#include "delaymid/mid_design.hpp"
#include "delaymid/quasipoly.hpp"

namespace delaymid {

// Axis-aligned rectangle in the complex plane.
class ContourBox {
 public:
  ContourBox(double re_min, double re_max, double im_min, double im_max);

  double re_min() const noexcept { return re_min_; }
  double re_max() const noexcept { return re_max_; }
  double im_min() const noexcept { return im_min_; }
  double im_max() const noexcept { return im_max_; }

  Complex center() const noexcept;
  double width() const noexcept { return re_max_ - re_min_; }
  double height() const noexcept { return im_max_ - im_min_; }
  bool contains(Complex s) const noexcept;  // strict interior
  bool conjugate_symmetric() const noexcept;
  // Same center, half-widths multiplied by factor.
  ContourBox expanded(double factor) const;

  friend bool operator==(const ContourBox&, const ContourBox&) = default;

 private:
  double re_min_, re_max_, im_min_, im_max_;
};

struct RootRecord {
  Complex location;
  unsigned multiplicity = 1;
  double residual = 0.0;  // max_{j<multiplicity} |q^{(j)}| / residual_scale(q^{(j)})
  bool refined = false;
};

struct RootSet {
  std::vector<RootRecord> roots;  // sorted by decreasing real part, then imaginary part
  ContourBox box{0.0, 1.0, 0.0, 1.0};  // box actually searched (after any jitter)
  unsigned total_count = 0;       // argument-principle count, multiplicity weighted
};

enum class Verdict { certified_strict, certified_nonstrict, refuted, inconclusive };

const char* to_string(Verdict v) noexcept;

// What a numerical dominance check covered: a compact search box over
// Re s >= Re s0 - band plus an analytic tail bound |s| < tail_radius there.
// certified_strict means no other root was found in that region.
struct DominanceCertificate {
  Complex assigned_root;
  unsigned expected_multiplicity = 0;
  double margin = 0.0;  // Re s0 minus the real part of the next-rightmost root found
  bool margin_is_lower_bound = false;  // nothing else found; margin equals the band
  ContourBox search_box{0.0, 1.0, 0.0, 1.0};
  double tail_radius = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<RootRecord> offending;
  std::string note;
};

inline constexpr double kDefaultRootTol = 1e-9;
inline constexpr double kDefaultMarginBand = 0.05;

// Multiplicity-weighted number of roots inside box via the argument principle.
// Throws BoundaryRoot or QuadratureNotConverged.
unsigned count_roots(const QuasiPolynomial& q, const ContourBox& box);

// Multiplicity-corrected Newton iteration s <- s - m q/q', followed by Newton
// polishing on q^{(m-1)} when m > 1. Throws MaxIterations, DerivativeVanished
// or NonConvergence.
RootRecord newton_refine(const QuasiPolynomial& q, Complex guess, unsigned expected_mult,
                         double tol = kDefaultRootTol);

// All roots inside box. Boundary hits are retried on deterministically
// expanded boxes (at most 5 times). Throws NonConvergence on failure.
RootSet find_roots(const QuasiPolynomial& q, const ContourBox& box, double tol = kDefaultRootTol);

// Radius beyond which Delta has no roots with Re s >= re_threshold.
double tail_radius(const DelayDesign& d, double re_threshold);

// margin_band is in normalized units z = tau (s - sigma0).
DominanceCertificate certify_dominance(const DelayDesign& d, Complex s0,
                                       double margin_band = kDefaultMarginBand,
                                       double tol = kDefaultRootTol);

}  // namespace delaymid
