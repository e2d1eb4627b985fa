#include "delaymid/root_locus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "delaymid/errors.hpp"
#include "delaymid/mid_design.hpp"

namespace delaymid {

namespace {

// Signed distance to the window boundary, positive inside.
double inside_depth(const ContourBox& w, Complex z) {
  return std::min({z.real() - w.re_min(), w.re_max() - z.real(), z.imag() - w.im_min(), w.im_max() - z.imag()});
}

bool near(Complex a, Complex b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(a)); }

class Family {
 public:
  explicit Family(double tol) : tol_(tol) {}

  const QuasiPolynomial& at(double theta) {
    auto it = cache_.find(theta);
    if (it == cache_.end()) {
      if (cache_.size() > 4096) cache_.clear();
      it = cache_.emplace(theta, normalized_complex(theta)).first;
    }
    return it->second;
  }

  // dz/dtheta along a simple root, by implicit differentiation.
  Complex tangent(double theta, Complex z) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta));
    const Complex qt = (evaluate(at(theta + h), z) - evaluate(at(theta - h), z)) / (2.0 * h);
    const Complex qz = evaluate(derivative(at(theta), 1), z);
    if (!(std::abs(qz) > 0.0)) return 0.0;
    return -qt / qz;
  }

  // Simple root near guess at theta; empty if Newton fails.
  bool refine(double theta, Complex guess, Complex& out) {
    try {
      const RootRecord r = newton_refine(at(theta), guess, 1, tol_);
      if (!r.refined) return false;
      out = r.location;
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  double tol() const { return tol_; }

 private:
  double tol_;
  std::map<double, QuasiPolynomial> cache_;
};

// One continuation step from (theta, z) to theta + h with a tangent
// predictor; halves h recursively on failure.
class Stepper {
 public:
  Stepper(Family& fam, unsigned max_halvings) : fam_(fam), max_halvings_(max_halvings) {}

  Complex advance(double theta, Complex z, double h, unsigned depth = 0) {
    const Complex v = fam_.tangent(theta, z);
    const Complex pred = z + v * h;
    Complex r;
    if (fam_.refine(theta + h, pred, r)) {
      const double err = std::abs(r - pred);
      const double move = std::abs(v * h);
      const bool real_kept = z.imag() != 0.0 || r.imag() == 0.0;
      if (real_kept && err <= std::max(0.2 * move, 1e-4 * std::abs(h) + 1e-10)) return r;
    }
    if (depth >= max_halvings_) {
      std::ostringstream os;
      os << "continuation lost the root near " << z << " at theta0 = " << theta;
      throw PathLost(os.str());
    }
    const Complex mid = advance(theta, z, 0.5 * h, depth + 1);
    return advance(theta + 0.5 * h, mid, 0.5 * h, depth + 1);
  }

 private:
  Family& fam_;
  unsigned max_halvings_;
};

// Point where the continuous root path crosses the window boundary, between
// an outside sample (t_out, z_out) and an inside one (t_in, z_in).
LocusPoint locate_crossing(Family& fam, const ContourBox& w, double t_out, Complex z_out, double t_in,
                           Complex z_in) {
  for (int it = 0; it < 50 && std::abs(t_in - t_out) > 1e-12; ++it) {
    const double t = 0.5 * (t_in + t_out);
    Complex z;
    if (!fam.refine(t, 0.5 * (z_in + z_out), z)) break;
    if (inside_depth(w, z) > 0.0) {
      t_in = t;
      z_in = z;
    } else {
      t_out = t;
      z_out = z;
    }
  }
  // Final linear interpolation in the boundary coordinate.
  const double d_in = inside_depth(w, z_in), d_out = inside_depth(w, z_out);
  const double f = d_in - d_out != 0.0 ? d_in / (d_in - d_out) : 0.0;
  return {t_in + f * (t_out - t_in), z_in + f * (z_out - z_in)};
}

// Double real root near (x, theta): q = q' = 0 solved by Newton in (x, theta).
bool locate_double_real(Family& fam, double& x, double& theta) {
  for (int it = 0; it < 60; ++it) {
    const QuasiPolynomial& q = fam.at(theta);
    const QuasiPolynomial d1 = derivative(q, 1);
    const QuasiPolynomial d2 = derivative(q, 2);
    const double f = evaluate(q, x).real();
    const double g = evaluate(d1, x).real();
    const double h = 1e-6 * std::max(1.0, std::abs(theta));
    const QuasiPolynomial& qp = fam.at(theta + h);
    const QuasiPolynomial& qm = fam.at(theta - h);
    const double ft = (evaluate(qp, x).real() - evaluate(qm, x).real()) / (2 * h);
    const double gt = (evaluate(derivative(qp, 1), x).real() - evaluate(derivative(qm, 1), x).real()) / (2 * h);
    const double fx = g, gx = evaluate(d2, x).real();
    const double det = fx * gt - ft * gx;
    if (!(std::abs(det) > 0.0)) return false;
    const double dx = (f * gt - ft * g) / det;
    const double dt = (fx * g - gx * f) / det;
    x -= dx;
    theta -= dt;
    if (!std::isfinite(x) || !std::isfinite(theta)) return false;
    if (std::abs(dx) < 1e-13 * std::max(1.0, std::abs(x)) && std::abs(dt) < 1e-13 * std::max(1.0, theta))
      return true;
  }
  return false;
}

struct Active {
  std::size_t index;  // into paths
  Complex z;
};

class Tracer {
 public:
  Tracer(const std::vector<double>& thetas, const ContourBox& window, const LocusOptions& opts)
      : thetas_(thetas), window_(window), opts_(opts), fam_(opts.tol), stepper_(fam_, opts.max_halvings) {}

  LocusTrace run() {
    LocusTrace trace;
    trace.theta_samples = thetas_;
    trace.window = window_;

    LocusPath up, down;
    up.id = 0;
    down.id = 1;
    up.origin = down.origin = PathOrigin::assigned;
    down.conjugate_of = 0;
    for (double t : thetas_) {
      up.points.push_back({t, Complex(0.0, t)});
      down.points.push_back({t, Complex(0.0, -t)});
    }
    paths_.push_back(std::move(up));
    paths_.push_back(std::move(down));

    for (Complex z : scan(0)) open_path(PathOrigin::seed, 0, z);

    for (std::size_t i = 0; i + 1 < thetas_.size(); ++i) {
      step_all(i);
      if ((i + 1) % opts_.rescan_period == 0 || i + 2 == thetas_.size()) rescan(i + 1);
    }

    // Mirror the tracked upper paths.
    std::vector<LocusPath> mirrored;
    for (const auto& p : paths_) {
      if (p.origin == PathOrigin::assigned || !upper_[p.id]) continue;
      LocusPath m = p;
      m.id = mirror_id_.at(p.id);
      m.conjugate_of = static_cast<int>(p.id);
      for (auto& pt : m.points) pt.root = std::conj(pt.root);
      m.entry_root = std::conj(m.entry_root);
      mirrored.push_back(std::move(m));
    }
    for (auto& m : mirrored) paths_.push_back(std::move(m));
    std::sort(paths_.begin(), paths_.end(), [](const LocusPath& a, const LocusPath& b) { return a.id < b.id; });
    for (auto& c : collisions_)
      for (unsigned id : std::vector<unsigned>(c.formed)) c.formed.push_back(mirror_id_.at(id));
    trace.paths = std::move(paths_);
    trace.collisions = std::move(collisions_);
    return trace;
  }

 private:
  // Non-assigned roots with Im >= 0 inside the window at sample i.
  std::vector<Complex> scan(std::size_t i) {
    const double t = thetas_[i];
    const RootSet rs = find_roots(fam_.at(t), window_, opts_.tol);
    std::vector<Complex> out;
    for (const auto& r : rs.roots) {
      const Complex z = r.location;
      if (z.imag() < 0.0 || !window_.contains(z)) continue;
      if (near(z, Complex(0.0, t), 1e-6)) continue;
      out.push_back(z);
    }
    return out;
  }

  unsigned open_path(PathOrigin origin, std::size_t i, Complex z) {
    LocusPath p;
    p.id = next_id_++;
    p.origin = origin;
    p.points.push_back({thetas_[i], z});
    const bool upper = z.imag() != 0.0;
    upper_[p.id] = upper;
    if (upper) mirror_id_[p.id] = next_id_++;
    paths_.push_back(std::move(p));
    active_.push_back({paths_.size() - 1, z});
    return paths_.back().id;
  }

  void close(std::size_t path_index, PathEnd end) {
    paths_[path_index].end = end;
    active_.erase(std::remove_if(active_.begin(), active_.end(),
                                 [&](const Active& a) { return a.index == path_index; }),
                  active_.end());
  }

  void step_all(std::size_t i) {
    const double t0 = thetas_[i], t1 = thetas_[i + 1];
    std::vector<std::pair<std::size_t, Complex>> moved;
    std::vector<std::size_t> lost, left;
    for (const auto& a : active_) {
      try {
        const Complex z = stepper_.advance(t0, a.z, t1 - t0);
        if (inside_depth(window_, z) <= 0.0)
          left.push_back(a.index);
        else
          moved.push_back({a.index, z});
      } catch (const PathLost&) {
        lost.push_back(a.index);
      }
    }
    // Two paths landing on the same root: both are unreliable.
    for (std::size_t a = 0; a < moved.size(); ++a)
      for (std::size_t b = a + 1; b < moved.size(); ++b)
        if (near(moved[a].second, moved[b].second, 1e-7)) {
          lost.push_back(moved[a].first);
          lost.push_back(moved[b].first);
        }
    std::sort(lost.begin(), lost.end());
    lost.erase(std::unique(lost.begin(), lost.end()), lost.end());

    for (auto& a : active_) {
      if (std::find(lost.begin(), lost.end(), a.index) != lost.end()) continue;
      auto it = std::find_if(moved.begin(), moved.end(), [&](const auto& m) { return m.first == a.index; });
      if (it == moved.end()) continue;
      a.z = it->second;
      paths_[a.index].points.push_back({t1, a.z});
    }
    for (std::size_t idx : left) close(idx, PathEnd::left_window);

    std::vector<std::size_t> real_lost;
    for (std::size_t idx : lost) {
      if (paths_[idx].points.back().root.imag() == 0.0)
        real_lost.push_back(idx);
      else
        close(idx, PathEnd::broken);
    }
    while (!real_lost.empty()) {
      const std::size_t idx = real_lost.front();
      real_lost.erase(real_lost.begin());
      resolve_real_break(i, idx, real_lost);
    }
  }

  Complex current(std::size_t path_index) const {
    for (const auto& a : active_)
      if (a.index == path_index) return a.z;
    return paths_[path_index].points.back().root;
  }

  // A real root that could not be continued from sample i to i + 1: look for
  // a double real root in between and open the resulting conjugate pair.
  void resolve_real_break(std::size_t i, std::size_t idx, std::vector<std::size_t>& pending) {
    const double t0 = thetas_[i], t1 = thetas_[i + 1];
    const double x0 = current(idx).real();
    double x = x0, theta = t0;
    if (!locate_double_real(fam_, x, theta) || theta < t0 - 0.5 * (t1 - t0) || theta > t1) {
      close(idx, PathEnd::broken);
      return;
    }
    Collision col;
    col.theta0 = theta;
    col.root = Complex(x, 0.0);
    col.merged.push_back(paths_[idx].id);
    close(idx, PathEnd::collision);

    // The partner sits on the other side of the double root at t0.
    std::size_t partner = paths_.size();
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const Complex zp = current(pending[k]);
      if ((zp.real() - x) * (x0 - x) < 0.0 && std::abs(zp.real() - x) < 1.0) {
        partner = pending[k];
        pending.erase(pending.begin() + static_cast<long>(k));
        break;
      }
    }
    if (partner == paths_.size()) {
      for (const auto& a : active_) {
        if (a.z.imag() != 0.0) continue;
        if ((a.z.real() - x) * (x0 - x) < 0.0 && std::abs(a.z.real() - x) < 1.0) {
          partner = a.index;
          break;
        }
      }
    }
    if (partner == paths_.size()) {
      // Not traced yet: it entered after the last rescan.
      Complex zp;
      if (fam_.refine(t0, Complex(2.0 * x - x0, 0.0), zp) && zp.imag() == 0.0 && !near(zp, Complex(x0, 0), 1e-6) &&
          window_.contains(zp)) {
        open_path(PathOrigin::entered_window, i, zp);
        partner = paths_.size() - 1;
        backtrace(partner, i);
      }
    }
    if (partner != paths_.size()) {
      col.merged.push_back(paths_[partner].id);
      close(partner, PathEnd::collision);
    }

    // New conjugate pair just after the collision, at distance about
    // sqrt(-2 q_theta dtheta / q'') from the double root.
    const double h = 1e-6 * std::max(1.0, theta);
    const double qt = (evaluate(fam_.at(theta + h), x).real() - evaluate(fam_.at(theta - h), x).real()) / (2 * h);
    const double q2 = evaluate(derivative(fam_.at(theta), 2), x).real();
    const double spread = q2 != 0.0 ? std::sqrt(std::abs(2.0 * qt * (t1 - theta) / q2)) : 0.0;
    const double span = std::max(0.05, 3.0 * spread);
    try {
      const ContourBox local(x - span, x + span, -span, span);
      const RootSet rs = find_roots(fam_.at(t1), local, opts_.tol);
      for (const auto& r : rs.roots)
        if (r.location.imag() > 0.0 && window_.contains(r.location))
          col.formed.push_back(open_path(PathOrigin::pair_formation, i + 1, r.location));
    } catch (const Error&) {
    }
    // A nearly-merged real pair that has not yet merged: close(...) above
    // stands, and the next rescan will pick up whatever remains.
    collisions_.push_back(std::move(col));
  }

  // Trace path idx backwards from sample i until it leaves the window.
  void backtrace(std::size_t idx, std::size_t i) {
    auto& p = paths_[idx];
    std::vector<LocusPoint> before;
    Complex z = p.points.front().root;
    for (std::size_t j = i; j-- > 0;) {
      Complex zn;
      try {
        zn = stepper_.advance(thetas_[j + 1], z, thetas_[j] - thetas_[j + 1]);
      } catch (const PathLost&) {
        break;
      }
      if (inside_depth(window_, zn) <= 0.0) {
        const LocusPoint c = locate_crossing(fam_, window_, thetas_[j], zn, thetas_[j + 1], z);
        p.entry_theta = c.theta0;
        p.entry_root = c.root;
        p.has_entry = true;
        break;
      }
      before.push_back({thetas_[j], zn});
      z = zn;
    }
    std::reverse(before.begin(), before.end());
    p.points.insert(p.points.begin(), before.begin(), before.end());
    if (!p.has_entry && p.points.front().theta0 == thetas_.front()) p.origin = PathOrigin::seed;
  }

  void rescan(std::size_t i) {
    std::vector<Complex> found;
    try {
      found = scan(i);
    } catch (const Error&) {
      return;
    }
    for (Complex z : found) {
      const bool tracked = std::any_of(active_.begin(), active_.end(),
                                       [&](const Active& a) { return near(a.z, z, 1e-6); });
      if (tracked) continue;
      open_path(PathOrigin::entered_window, i, z);
      backtrace(paths_.size() - 1, i);
    }
  }

  const std::vector<double>& thetas_;
  ContourBox window_;
  LocusOptions opts_;
  Family fam_;
  Stepper stepper_;
  std::vector<LocusPath> paths_;
  std::vector<Active> active_;
  std::vector<Collision> collisions_;
  std::map<unsigned, bool> upper_;
  std::map<unsigned, unsigned> mirror_id_;
  unsigned next_id_ = 2;
};

std::vector<double> sample_grid(double from, double to, double step) {
  if (!std::isfinite(from) || !std::isfinite(to) || !std::isfinite(step))
    throw InvalidArgument("locus range and step must be finite");
  if (!(step > 0.0)) throw InvalidArgument("locus step must be positive");
  if (to < from) throw InvalidArgument("locus range must be increasing");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(from + static_cast<double>(k) * step);
  if (to - out.back() > 1e-9 * step) out.push_back(to);
  return out;
}

// Vertex of the parabola through three points.
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (a == 0.0) return {x1, y1};
  const double b = d01 - a * (x0 + x1);
  const double xv = -b / (2.0 * a);
  const double yv = y0 + (xv - x0) * (d01 + a * (xv - x1));
  return {xv, yv};
}

Complex quadratic_interp(const std::array<LocusPoint, 3>& p, double t) {
  Complex out = 0.0;
  for (int a = 0; a < 3; ++a) {
    double w = 1.0;
    for (int b = 0; b < 3; ++b)
      if (a != b) w *= (t - p[b].theta0) / (p[a].theta0 - p[b].theta0);
    out += w * p[a].root;
  }
  return out;
}

struct Rgb {
  int r, g, b;
};

// Piecewise-linear approximation of a perceptually ordered palette.
Rgb palette(double f) {
  static constexpr std::array<std::array<double, 3>, 6> kStops{{{68, 1, 84},
                                                                {65, 68, 135},
                                                                {42, 120, 142},
                                                                {34, 168, 132},
                                                                {122, 209, 81},
                                                                {253, 231, 37}}};
  f = std::clamp(f, 0.0, 1.0) * (kStops.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(f), kStops.size() - 2);
  const double w = f - static_cast<double>(k);
  auto mix = [&](int c) { return static_cast<int>(std::lround(kStops[k][c] * (1 - w) + kStops[k + 1][c] * w)); };
  return {mix(0), mix(1), mix(2)};
}

}  // namespace

const char* to_string(PathOrigin o) noexcept {
  switch (o) {
    case PathOrigin::assigned: return "assigned";
    case PathOrigin::seed: return "seed";
    case PathOrigin::entered_window: return "entered_window";
    case PathOrigin::pair_formation: return "pair_formation";
  }
  return "?";
}

const char* to_string(PathEnd e) noexcept {
  switch (e) {
    case PathEnd::range_end: return "range_end";
    case PathEnd::left_window: return "left_window";
    case PathEnd::collision: return "collision";
    case PathEnd::broken: return "broken";
  }
  return "?";
}

const char* to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::real_part_local_max: return "real_part_local_max";
    case EventKind::real_part_local_min: return "real_part_local_min";
    case EventKind::real_root_enters_window: return "real_root_enters_window";
    case EventKind::real_root_collision: return "real_root_collision";
    case EventKind::pair_formation: return "pair_formation";
  }
  return "?";
}

LocusTrace trace_locus(double theta_from, double theta_to, double step, const ContourBox& window,
                       const LocusOptions& opts) {
  if (opts.rescan_period == 0) throw InvalidArgument("rescan period must be positive");
  const std::vector<double> thetas = sample_grid(theta_from, theta_to, step);
  Tracer tracer(thetas, window, opts);
  return tracer.run();
}

std::vector<LocusEvent> detect_events(const LocusTrace& trace) {
  if (trace.theta_samples.size() < 3) throw InvalidArgument("detect_events needs at least 3 samples");
  std::vector<LocusEvent> events;
  for (const auto& p : trace.paths) {
    const auto& pts = p.points;
    if (p.origin == PathOrigin::entered_window && p.has_entry && p.entry_root.imag() == 0.0)
      events.push_back({EventKind::real_root_enters_window, p.entry_theta, p.entry_root, {p.id},
                        pts.front().theta0, pts.front().root});
    if (pts.size() < 3) continue;
    int prev_sign = 0;
    std::size_t prev_k = 0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const double dr = pts[k + 1].root.real() - pts[k].root.real();
      const int sign = std::abs(dr) <= 1e-12 ? 0 : (dr > 0 ? 1 : -1);
      if (sign == 0) continue;
      if (prev_sign != 0 && sign != prev_sign && k == prev_k + 1) {
        const std::array<LocusPoint, 3> tri{pts[k - 1], pts[k], pts[k + 1]};
        const auto [tv, rv] = parabola_vertex(tri[0].theta0, tri[0].root.real(), tri[1].theta0,
                                              tri[1].root.real(), tri[2].theta0, tri[2].root.real());
        Complex root = Complex(rv, quadratic_interp(tri, tv).imag());
        // Sharpen the interpolated root on the exact quasipolynomial.
        if (p.origin != PathOrigin::assigned) {
          try {
            const RootRecord r = newton_refine(normalized_complex(tv), root, 1);
            if (r.refined && std::abs(r.location - root) < 1e-2) root = r.location;
          } catch (const Error&) {
          }
        }
        const auto& closest = *std::min_element(tri.begin(), tri.end(), [&](const LocusPoint& a, const LocusPoint& b) {
          return std::abs(a.theta0 - tv) < std::abs(b.theta0 - tv);
        });
        events.push_back({prev_sign > 0 ? EventKind::real_part_local_max : EventKind::real_part_local_min, tv, root,
                          {p.id}, closest.theta0, closest.root});
      }
      prev_sign = sign;
      prev_k = k;
    }
  }
  for (const auto& c : trace.collisions) {
    const auto it = std::min_element(trace.theta_samples.begin(), trace.theta_samples.end(),
                                     [&](double a, double b) { return std::abs(a - c.theta0) < std::abs(b - c.theta0); });
    events.push_back({EventKind::real_root_collision, c.theta0, c.root, c.merged, *it, c.root});
    if (!c.formed.empty()) events.push_back({EventKind::pair_formation, c.theta0, c.root, c.formed, *it, c.root});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const LocusEvent& a, const LocusEvent& b) { return a.theta0 < b.theta0; });
  return events;
}

void write_locus_csv(std::ostream& os, const LocusTrace& trace) {
  std::vector<std::tuple<double, unsigned, Complex>> rows;
  for (const auto& p : trace.paths)
    for (const auto& pt : p.points) rows.emplace_back(pt.theta0, p.id, pt.root);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  os << "theta0,path_id,re,im\n";
  os << std::setprecision(17);
  for (const auto& [t, id, z] : rows) os << t << ',' << id << ',' << z.real() << ',' << z.imag() << '\n';
}

void write_events_csv(std::ostream& os, const std::vector<LocusEvent>& events) {
  os << "kind,theta0,re,im,path_ids,theta0_refined,re_refined,im_refined\n";
  os << std::setprecision(6);
  for (const auto& e : events) {
    os << to_string(e.kind) << ',' << e.sample_theta0 << ',' << e.sample_root.real() << ',' << e.sample_root.imag()
       << ',';
    for (std::size_t k = 0; k < e.path_ids.size(); ++k) os << (k ? ";" : "") << e.path_ids[k];
    os << ',' << e.theta0 << ',' << e.root.real() << ',' << e.root.imag() << '\n';
  }
}

void write_paths_csv(std::ostream& os, const LocusTrace& trace) {
  os << "path_id,origin,end,conjugate_of,theta0_first,re_first,im_first,theta0_last,re_last,im_last\n";
  os << std::setprecision(6);
  for (const auto& p : trace.paths) {
    if (p.points.empty()) continue;
    const auto& a = p.points.front();
    const auto& b = p.points.back();
    os << p.id << ',' << to_string(p.origin) << ',' << to_string(p.end) << ',' << p.conjugate_of << ',' << a.theta0
       << ',' << a.root.real() << ',' << a.root.imag() << ',' << b.theta0 << ',' << b.root.real() << ','
       << b.root.imag() << '\n';
  }
}

void render_locus_svg(std::ostream& os, const LocusTrace& trace, const SvgOptions& opts) {
  const ContourBox v = opts.use_view ? opts.view : trace.window;
  const double w = opts.width, h = opts.height, m = 48.0;
  const double t_lo = trace.theta_samples.front(), t_hi = trace.theta_samples.back();
  auto px = [&](double re) { return m + (re - v.re_min()) / v.width() * (w - 2 * m); };
  auto py = [&](double im) { return h - m - (im - v.im_min()) / v.height() * (h - 2 * m); };
  const double dot = opts.use_view ? 2.0 : 1.2;

  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<!-- delaymid root locus -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << w - 2 * m << "\" height=\"" << h - 2 * m
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (v.re_min() < 0.0 && v.re_max() > 0.0)
    os << "<line x1=\"" << px(0) << "\" y1=\"" << m << "\" x2=\"" << px(0) << "\" y2=\"" << h - m
       << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  if (v.im_min() < 0.0 && v.im_max() > 0.0)
    os << "<line x1=\"" << m << "\" y1=\"" << py(0) << "\" x2=\"" << w - m << "\" y2=\"" << py(0)
       << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  os << std::setprecision(4);
  os << "<text x=\"" << m << "\" y=\"" << h - m + 16 << "\">" << v.re_min() << "</text>\n";
  os << "<text x=\"" << w - m << "\" y=\"" << h - m + 16 << "\" text-anchor=\"end\">" << v.re_max() << "</text>\n";
  os << "<text x=\"" << m - 4 << "\" y=\"" << h - m << "\" text-anchor=\"end\">" << v.im_min() << "</text>\n";
  os << "<text x=\"" << m - 4 << "\" y=\"" << m + 10 << "\" text-anchor=\"end\">" << v.im_max() << "</text>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">Re</text>\n";
  os << "<text x=\"14\" y=\"" << h / 2 << "\" text-anchor=\"middle\">Im</text>\n";
  os << "</g>\n<g stroke=\"none\">\n";
  os << std::setprecision(2);
  for (const auto& p : trace.paths)
    for (const auto& pt : p.points) {
      const Complex z = pt.root;
      if (z.real() < v.re_min() || z.real() > v.re_max() || z.imag() < v.im_min() || z.imag() > v.im_max())
        continue;
      const Rgb c = palette(t_hi > t_lo ? (pt.theta0 - t_lo) / (t_hi - t_lo) : 0.0);
      os << "<circle cx=\"" << px(z.real()) << "\" cy=\"" << py(z.imag()) << "\" r=\"" << dot << "\" fill=\"rgb("
         << c.r << ',' << c.g << ',' << c.b << ")\"/>\n";
    }
  os << "</g>\n</svg>\n";
}

}  // namespace delaymid
