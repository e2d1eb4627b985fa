#include "delaymid/rootfinder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <limits>
#include <optional>
#include <sstream>

#include "delaymid/errors.hpp"

namespace delaymid {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 2.220446049250313e-16;

// ---------------------------------------------------------------------------
// Quadrature

struct GaussLegendre {
  static constexpr int kOrder = 16;
  std::array<double, kOrder> x{};  // nodes on [0, 1]
  std::array<double, kOrder> w{};
};

GaussLegendre build_gauss_legendre() {
  GaussLegendre g;
  const int n = GaussLegendre::kOrder;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    g.x[i] = 0.5 * (1.0 - z);
    g.x[n - 1 - i] = 0.5 * (1.0 + z);
    g.w[i] = g.w[n - 1 - i] = 0.5 * weight;
  }
  return g;
}

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre g = build_gauss_legendre();
  return g;
}

// q and q' evaluated together, sharing the exponentials.
class PairEvaluator {
 public:
  explicit PairEvaluator(const QuasiPolynomial& q) {
    for (const auto& t : q.terms()) {
      Row r{t.rate, t.coeffs, std::vector<double>(t.coeffs.size(), 0.0)};
      for (std::size_t i = 0; i < t.coeffs.size(); ++i) {
        r.dc[i] = t.rate * t.coeffs[i];
        if (i + 1 < t.coeffs.size()) r.dc[i] += static_cast<double>(i + 1) * t.coeffs[i + 1];
      }
      rows_.push_back(std::move(r));
    }
  }

  struct Value {
    Complex f, df;
    double scale;
  };

  Value operator()(Complex s) const {
    Value v{0.0, 0.0, 0.0};
    const double rho = std::max(1.0, std::abs(s));
    for (const auto& r : rows_) {
      Complex p(0.0), dp(0.0);
      double mag = 0.0;
      for (std::size_t i = r.c.size(); i-- > 0;) {
        p = p * s + r.c[i];
        dp = dp * s + r.dc[i];
        mag = mag * rho + std::abs(r.c[i]);
      }
      if (r.rate == 0.0) {
        v.f += p;
        v.df += dp;
        v.scale += mag;
      } else {
        const Complex arg = r.rate * s;
        if (std::abs(arg.real()) > 709.0) throw OverflowError("exponent out of range on contour");
        const Complex e = std::exp(arg);
        v.f += p * e;
        v.df += dp * e;
        v.scale += mag * std::abs(e);
      }
    }
    return v;
  }

 private:
  struct Row {
    double rate;
    std::vector<double> c, dc;
  };
  std::vector<Row> rows_;
};

using MomentVec = std::array<Complex, 3>;

MomentVec operator+(const MomentVec& a, const MomentVec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

constexpr double kBoundaryTol = 1e-12;
constexpr double kWindingTol = 1e-6;
constexpr int kMaxPanelDepth = 45;

// Integrates (1/2 pi i) q'/q ((s - c)/r)^k ds, k = 0, 1, 2, around a box by
// adaptive composite Gauss-Legendre: each panel is compared against its two
// halves and bisected until they agree within its share of the error budget.
class ContourIntegrator {
 public:
  ContourIntegrator(const PairEvaluator& ev, const ContourBox& box)
      : ev_(ev),
        center_(box.center()),
        radius_(0.5 * std::hypot(box.width(), box.height())),
        perimeter_(2.0 * (box.width() + box.height())) {}

  Complex center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

  MomentVec integrate(const ContourBox& b) {
    const std::array<Complex, 5> corners{Complex(b.re_min(), b.im_min()), Complex(b.re_max(), b.im_min()),
                                         Complex(b.re_max(), b.im_max()), Complex(b.re_min(), b.im_max()),
                                         Complex(b.re_min(), b.im_min())};
    const double h0 = std::min(0.25, perimeter_ / 16.0);
    MomentVec total{};
    for (int e = 0; e < 4; ++e) {
      const Complex a = corners[e], z = corners[e + 1];
      const double len = std::abs(z - a);
      const int panels = std::max(1, static_cast<int>(std::ceil(len / h0)));
      for (int p = 0; p < panels; ++p) {
        const Complex pa = a + (z - a) * (static_cast<double>(p) / panels);
        const Complex pb = a + (z - a) * (static_cast<double>(p + 1) / panels);
        total = total + adaptive(pa, pb, panel(pa, pb), 0);
      }
    }
    const Complex norm(0.0, 2.0 * kPi);
    for (auto& m : total) m /= norm;
    return total;
  }

 private:
  MomentVec panel(Complex a, Complex b) {
    const auto& gl = gauss_legendre();
    const Complex ds = b - a;
    MomentVec acc{};
    for (int i = 0; i < GaussLegendre::kOrder; ++i) {
      const Complex s = a + ds * gl.x[i];
      const auto v = ev_(s);
      if (!(std::abs(v.f) > kBoundaryTol * v.scale)) {
        std::ostringstream os;
        os << "root on or near the contour at " << s;
        throw BoundaryRoot(os.str());
      }
      const Complex g = v.df / v.f * ds * gl.w[i];
      const Complex w = (s - center_) / radius_;
      acc[0] += g;
      acc[1] += g * w;
      acc[2] += g * w * w;
    }
    return acc;
  }

  MomentVec adaptive(Complex a, Complex b, const MomentVec& coarse, int depth) {
    const Complex mid = 0.5 * (a + b);
    const MomentVec left = panel(a, mid);
    const MomentVec right = panel(mid, b);
    const MomentVec fine = left + right;
    double err = 0.0;
    for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(fine[k] - coarse[k]));
    err /= 2.0 * kPi;
    const double budget = kWindingTol * std::abs(b - a) / perimeter_;
    if (err <= budget || err <= 1e-15) return fine;
    if (depth >= kMaxPanelDepth) {
      std::ostringstream os;
      os << "contour quadrature did not converge near " << mid;
      throw QuadratureNotConverged(os.str());
    }
    return adaptive(a, mid, left, depth + 1) + adaptive(mid, b, right, depth + 1);
  }

  const PairEvaluator& ev_;
  Complex center_;
  double radius_;
  double perimeter_;
};

struct BoxIntegral {
  unsigned count = 0;
  Complex center;
  double radius = 0.0;
  MomentVec mu{};
};

BoxIntegral integrate_box(const PairEvaluator& ev, const ContourBox& box) {
  ContourIntegrator integrator(ev, box);
  BoxIntegral out;
  out.center = integrator.center();
  out.radius = integrator.radius();
  out.mu = integrator.integrate(box);
  const double w = out.mu[0].real();
  const double nearest = std::round(w);
  if (std::abs(w - nearest) > 0.25 || std::abs(out.mu[0].imag()) > 0.25 || nearest < 0.0) {
    std::ostringstream os;
    os << "winding number " << out.mu[0] << " is not near an integer";
    throw QuadratureNotConverged(os.str());
  }
  out.count = static_cast<unsigned>(nearest);
  return out;
}

std::string describe(const ContourBox& b) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << b.re_min() << ", " << b.re_max() << "] x [" << b.im_min() << ", " << b.im_max() << "]";
  return os.str();
}

double relative_residual(const QuasiPolynomial& q, Complex s) {
  return std::abs(evaluate(q, s)) / residual_scale(q, s);
}

// ---------------------------------------------------------------------------
// Recursive search

constexpr int kMaxDepth = 60;

// Off-center split fractions so that subdivision lines avoid symmetric
// points such as the real axis or an assigned root at the box center.
constexpr std::array<std::array<double, 2>, 6> kSplits{{{0.5173, 0.4769},
                                                        {0.4609, 0.5297},
                                                        {0.5601, 0.4467},
                                                        {0.4313, 0.5711},
                                                        {0.5897, 0.4189},
                                                        {0.3967, 0.6043}}};

class Finder {
 public:
  Finder(const QuasiPolynomial& q, double tol) : q_(q), ev_(q), tol_(tol) {}

  BoxIntegral integrate(const ContourBox& b) const { return integrate_box(ev_, b); }

  void solve(const ContourBox& b, const BoxIntegral& bi, int depth) {
    if (bi.count == 0) return;
    if (try_leaf(b, bi)) return;
    const double size = std::max(b.width(), b.height());
    if (depth >= kMaxDepth || size < 1e-12 * (1.0 + std::abs(bi.center)))
      throw NonConvergence("root search did not converge in sub-box " + describe(b));

    std::string last_failure;
    for (const auto& split : kSplits) {
      const double xs = b.re_min() + split[0] * b.width();
      const double ys = b.im_min() + split[1] * b.height();
      const std::array<ContourBox, 4> kids{ContourBox(b.re_min(), xs, b.im_min(), ys),
                                           ContourBox(xs, b.re_max(), b.im_min(), ys),
                                           ContourBox(b.re_min(), xs, ys, b.im_max()),
                                           ContourBox(xs, b.re_max(), ys, b.im_max())};
      std::array<BoxIntegral, 4> parts;
      try {
        unsigned sum = 0;
        for (int i = 0; i < 4; ++i) {
          parts[i] = integrate(kids[i]);
          sum += parts[i].count;
        }
        if (sum != bi.count) {
          last_failure = "sub-box counts do not add up in " + describe(b);
          continue;
        }
      } catch (const BoundaryRoot& e) {
        last_failure = e.what();
        continue;
      } catch (const QuadratureNotConverged& e) {
        last_failure = e.what();
        continue;
      }
      std::vector<RootRecord> saved = roots;
      try {
        for (int i = 0; i < 4; ++i) solve(kids[i], parts[i], depth + 1);
        return;
      } catch (const NonConvergence& e) {
        roots = std::move(saved);
        last_failure = e.what();
      }
    }
    throw NonConvergence("root search failed in sub-box " + describe(b) + ": " + last_failure);
  }

  std::vector<RootRecord> roots;

 private:
  std::optional<RootRecord> try_newton(Complex seed, unsigned mult, const ContourBox& b) const {
    try {
      RootRecord r = newton_refine(q_, seed, mult, tol_);
      if (!r.refined || !b.contains(r.location)) return std::nullopt;
      return r;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  bool try_cluster(Complex seed, unsigned mult, const ContourBox& b) {
    auto r = try_newton(seed, mult, b);
    if (!r) return false;
    try {
      if (verify_multiplicity(q_, r->location, tol_).certified_multiplicity != mult) return false;
    } catch (const Error&) {
      return false;
    }
    roots.push_back(*r);
    return true;
  }

  bool try_leaf(const ContourBox& b, const BoxIntegral& bi) {
    const Complex c = bi.center;
    const double r = bi.radius;
    const auto& mu = bi.mu;
    const unsigned n = bi.count;
    if (n == 1) {
      auto rec = try_newton(c + r * mu[1], 1, b);
      if (!rec) return false;
      roots.push_back(*rec);
      return true;
    }
    if (n == 2) {
      const Complex sum = mu[1];
      const Complex prod = 0.5 * (sum * sum - mu[2]);
      const Complex disc = std::sqrt(0.25 * sum * sum - prod);
      if (std::abs(disc) > 1e-4) {
        auto r1 = try_newton(c + r * (0.5 * sum + disc), 1, b);
        auto r2 = try_newton(c + r * (0.5 * sum - disc), 1, b);
        if (r1 && r2 &&
            std::abs(r1->location - r2->location) >
                1e-7 * std::max(1.0, std::abs(r1->location))) {
          roots.push_back(*r1);
          roots.push_back(*r2);
          return true;
        }
      }
      return try_cluster(c + r * 0.5 * sum, 2, b);
    }
    // n > 2: only a tight cluster is resolved without subdividing.
    const Complex mean = mu[1] / static_cast<double>(n);
    const Complex spread = mu[2] / static_cast<double>(n) - mean * mean;
    if (std::abs(spread) > 1e-3) return false;
    return try_cluster(c + r * mean, n, b);
  }

  const QuasiPolynomial& q_;
  PairEvaluator ev_;
  double tol_;
};

void symmetrize(std::vector<RootRecord>& roots) {
  constexpr double kSnap = 1e-9;
  for (auto& r : roots)
    if (std::abs(r.location.imag()) <= kSnap * std::max(1.0, std::abs(r.location)))
      r.location.imag(0.0);
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i] || roots[i].location.imag() <= 0.0) continue;
    const Complex target = std::conj(roots[i].location);
    std::size_t best = roots.size();
    double best_dist = 1e-6 * std::max(1.0, std::abs(target));
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j == i || used[j] || roots[j].location.imag() >= 0.0) continue;
      const double d = std::abs(roots[j].location - target);
      if (d < best_dist && roots[j].multiplicity == roots[i].multiplicity) {
        best = j;
        best_dist = d;
      }
    }
    if (best == roots.size()) continue;
    const Complex avg = 0.5 * (roots[i].location + std::conj(roots[best].location));
    roots[i].location = avg;
    roots[best].location = std::conj(avg);
    const double res = std::max(roots[i].residual, roots[best].residual);
    roots[i].residual = roots[best].residual = res;
    used[i] = used[best] = true;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ContourBox::ContourBox(double re_min, double re_max, double im_min, double im_max)
    : re_min_(re_min), re_max_(re_max), im_min_(im_min), im_max_(im_max) {
  for (double v : {re_min, re_max, im_min, im_max})
    if (!std::isfinite(v)) throw InvalidArgument("contour box bounds must be finite");
  if (!(re_min < re_max) || !(im_min < im_max))
    throw InvalidArgument("contour box requires re_min < re_max and im_min < im_max");
}

Complex ContourBox::center() const noexcept {
  return {0.5 * (re_min_ + re_max_), 0.5 * (im_min_ + im_max_)};
}

bool ContourBox::contains(Complex s) const noexcept {
  return s.real() > re_min_ && s.real() < re_max_ && s.imag() > im_min_ && s.imag() < im_max_;
}

bool ContourBox::conjugate_symmetric() const noexcept {
  return std::abs(im_min_ + im_max_) <= 1e-12 * std::max(1.0, im_max_);
}

ContourBox ContourBox::expanded(double factor) const {
  const Complex c = center();
  const double hw = 0.5 * width() * factor;
  const double hh = 0.5 * height() * factor;
  return {c.real() - hw, c.real() + hw, c.imag() - hh, c.imag() + hh};
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::certified_strict: return "certified_strict";
    case Verdict::certified_nonstrict: return "certified_nonstrict";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

unsigned count_roots(const QuasiPolynomial& q, const ContourBox& box) {
  PairEvaluator ev(q);
  return integrate_box(ev, box).count;
}

RootRecord newton_refine(const QuasiPolynomial& q, Complex guess, unsigned expected_mult,
                         double tol) {
  if (expected_mult == 0) throw InvalidArgument("newton_refine requires expected_mult >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("newton_refine requires tol > 0");
  const unsigned m = expected_mult;
  const QuasiPolynomial dq = derivative(q, 1);
  const double m_d = static_cast<double>(m);

  // Multiple roots only resolve to about eps^(1/m) through q itself; the
  // polishing stage below recovers full accuracy.
  const double stop = m == 1 ? 4.0 * kEps : 1e-6;
  constexpr int kMaxIter = 50;
  Complex s = guess;
  bool converged = false;
  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    const Complex f = evaluate(q, s);
    if (f == 0.0) {
      converged = true;
      break;
    }
    const Complex fp = evaluate(dq, s);
    if (!(std::abs(fp) > 1e-300)) {
      if (m == 1) {
        std::ostringstream os;
        os << "derivative vanished at " << s;
        throw DerivativeVanished(os.str());
      }
      break;
    }
    const Complex step = m_d * f / fp;
    s -= step;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw NonConvergence("Newton iteration diverged");
    if (std::abs(step) <= stop * std::max(1.0, std::abs(s))) {
      converged = true;
      break;
    }
  }

  const QuasiPolynomial g = m == 1 ? q : derivative(q, m - 1);
  if (m > 1) {
    const QuasiPolynomial dg = derivative(q, m);
    for (int k = 0; k < 20; ++k) {
      const Complex gv = evaluate(g, s);
      const Complex gp = evaluate(dg, s);
      if (gv == 0.0 || !(std::abs(gp) > 1e-300)) break;
      const Complex step = gv / gp;
      s -= step;
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw NonConvergence("Newton polishing diverged");
      if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(s))) {
        converged = true;
        break;
      }
    }
  }

  RootRecord rec;
  rec.location = s;
  rec.multiplicity = m;
  double residual = 0.0;
  QuasiPolynomial dj = q;
  for (unsigned j = 0; j < m; ++j) {
    if (j > 0) dj = derivative(dj, 1);
    residual = std::max(residual, relative_residual(dj, s));
  }
  rec.residual = residual;
  rec.refined = relative_residual(g, s) < tol;
  if (!converged && !rec.refined) {
    std::ostringstream os;
    os << "Newton iteration from " << guess << " exceeded " << kMaxIter << " iterations";
    throw MaxIterations(os.str());
  }
  return rec;
}

RootSet find_roots(const QuasiPolynomial& q, const ContourBox& box, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("find_roots requires tol > 0");
  static constexpr std::array<double, 6> kJitter{1.0, 1.01, 1.013, 1.017, 1.022, 1.029};
  std::string last_failure;
  for (double factor : kJitter) {
    const ContourBox b = factor == 1.0 ? box : box.expanded(factor);
    Finder finder(q, tol);
    try {
      const BoxIntegral top = finder.integrate(b);
      finder.solve(b, top, 0);
      RootSet out{std::move(finder.roots), b, top.count};
      symmetrize(out.roots);
      std::sort(out.roots.begin(), out.roots.end(), [](const RootRecord& x, const RootRecord& y) {
        if (x.location.real() != y.location.real()) return x.location.real() > y.location.real();
        return x.location.imag() > y.location.imag();
      });
      return out;
    } catch (const BoundaryRoot& e) {
      last_failure = e.what();
    } catch (const QuadratureNotConverged& e) {
      last_failure = e.what();
    } catch (const NonConvergence& e) {
      last_failure = e.what();
    }
  }
  throw NonConvergence("find_roots failed on " + describe(box) + " after jitter retries: " +
                       last_failure);
}

double tail_radius(const DelayDesign& d, double re_threshold) {
  const double e = std::exp(-d.tau() * re_threshold);
  const double b = std::abs(d.a1()) + e * std::abs(d.alpha1());
  const double c = std::abs(d.a0()) + e * std::abs(d.alpha0());
  const double r = 0.5 * (b + std::sqrt(b * b + 4.0 * c));
  return 1.1 * r;
}

DominanceCertificate certify_dominance(const DelayDesign& d, Complex s0, double margin_band,
                                       double tol) {
  if (!(margin_band > 0.0)) throw InvalidArgument("certify_dominance requires margin_band > 0");
  const QuasiPolynomial q = to_quasipolynomial(d);
  DominanceCertificate cert;
  cert.assigned_root = s0;

  const MultiplicityReport mult = verify_multiplicity(q, s0, tol);
  cert.expected_multiplicity = mult.certified_multiplicity;
  const double band = margin_band / d.tau();
  const double threshold = s0.real() - band;
  const double radius = tail_radius(d, threshold);
  cert.tail_radius = radius;
  const double half_height = std::max(radius, std::abs(s0.imag()) + band);
  cert.search_box = ContourBox(threshold, std::max(s0.real() + band, radius), -half_height, half_height);
  RootSet found;
  try {
    found = find_roots(q, cert.search_box, tol);
  } catch (const Error& e) {
    cert.verdict = Verdict::inconclusive;
    cert.note = e.what();
    return cert;
  }
  cert.search_box = found.box;

  if (mult.certified_multiplicity == 0) {
    for (const auto& r : found.roots)
      if (r.location.real() >= s0.real()) cert.offending.push_back(r);
    cert.verdict = Verdict::refuted;
    cert.note = "assigned point is not a root";
    return cert;
  }

  const double eps = 1e-7 * std::max(1.0, std::abs(s0));
  const bool is_pair = s0.imag() != 0.0;
  unsigned at_root = 0, at_conj = 0;
  double next_re = -std::numeric_limits<double>::infinity();
  bool nonstrict = false;
  for (const auto& r : found.roots) {
    if (std::abs(r.location - s0) <= eps) {
      at_root += r.multiplicity;
      continue;
    }
    if (is_pair && std::abs(r.location - std::conj(s0)) <= eps) {
      at_conj += r.multiplicity;
      continue;
    }
    next_re = std::max(next_re, r.location.real());
    if (r.location.real() > s0.real() + eps) {
      cert.offending.push_back(r);
    } else if (r.location.real() >= s0.real() - eps) {
      nonstrict = true;
      cert.offending.push_back(r);
    }
  }

  if (std::isfinite(next_re)) {
    cert.margin = s0.real() - next_re;
  } else {
    cert.margin = band;
    cert.margin_is_lower_bound = true;
  }

  const unsigned expected = cert.expected_multiplicity;
  const bool multiplicity_ok = at_root == expected && (!is_pair || at_conj == expected);
  std::ostringstream note;
  if (!multiplicity_ok) {
    note << "found multiplicity " << at_root << " at the assigned root (expected " << expected << ")";
    cert.verdict = cert.offending.empty() ? Verdict::inconclusive : Verdict::refuted;
  } else if (std::any_of(cert.offending.begin(), cert.offending.end(),
                         [&](const RootRecord& r) { return r.location.real() > s0.real() + eps; })) {
    note << "root to the right of the assigned root";
    cert.verdict = Verdict::refuted;
  } else if (nonstrict) {
    note << "another root shares the assigned real part";
    cert.verdict = Verdict::certified_nonstrict;
  } else {
    cert.verdict = Verdict::certified_strict;
  }
  cert.note = note.str();
  return cert;
}

}  // namespace delaymid
