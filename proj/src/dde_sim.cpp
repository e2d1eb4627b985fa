#include "delaymid/dde_sim.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "delaymid/errors.hpp"

namespace delaymid {

namespace {

constexpr double kBlowUp = 1e12;

// Cubic Hermite on [x0, x0 + h] at fraction s: value and derivative in x.
struct Hermite {
  double p0, m0, p1, m1, h;

  double value(double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * h * m1;
  }
  double slope(double s) const {
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * h * m0 + (-6 * s2 + 6 * s) * p1 + (3 * s2 - 2 * s) * h * m1) / h;
  }
};

struct LinearFit {
  double slope;
  double rms;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    ss += r * r;
  }
  return {slope, std::sqrt(ss / n)};
}

std::size_t first_index_at(const Trajectory& traj, double t_min) {
  if (!(traj.dt > 0.0)) throw InvalidArgument("trajectory time step must be positive");
  const double k = std::ceil((t_min - traj.t0) / traj.dt - 1e-9);
  return k <= 0.0 ? 0 : static_cast<std::size_t>(k);
}

double multiplicity_shift(unsigned m, double t) {
  if (m <= 1) return 0.0;
  if (!(t > 0.0)) throw InvalidArgument("multiplicity correction needs t_min > 0");
  return (m - 1.0) * std::log(t);
}

struct Extremum {
  double t, value;
};

// Zeros of the slope of the piecewise Hermite interpolant, from index n0 on.
std::vector<Extremum> find_extrema(const Trajectory& traj, std::size_t n0) {
  std::vector<Extremum> out;
  for (std::size_t n = n0; n + 1 < traj.samples.size(); ++n) {
    const auto& a = traj.samples[n];
    const auto& b = traj.samples[n + 1];
    if (!((a.y_prime > 0.0 && b.y_prime <= 0.0) || (a.y_prime < 0.0 && b.y_prime >= 0.0))) continue;
    const Hermite hy{a.y, a.y_prime, b.y, b.y_prime, traj.dt};
    const bool rising = a.y_prime > 0.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((hy.slope(mid) > 0.0) == rising ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    const double value = hy.value(s);
    if (value != 0.0) out.push_back({traj.time(n) + s * traj.dt, value});
  }
  return out;
}

double mean_theta(const std::vector<Extremum>& ext) {
  const double spacing = (ext.back().t - ext.front().t) / static_cast<double>(ext.size() - 1);
  return std::numbers::pi / spacing;
}

}  // namespace

HistorySpec HistorySpec::constant(double value, double slope) {
  if (!std::isfinite(value) || !std::isfinite(slope)) throw InvalidArgument("history values must be finite");
  return HistorySpec(Kind::constant, {value}, {slope});
}

HistorySpec HistorySpec::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw InvalidArgument("polynomial history needs at least one coefficient");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw InvalidArgument("history values must be finite");
  std::vector<double> d;
  for (std::size_t i = 1; i < coeffs.size(); ++i) d.push_back(static_cast<double>(i) * coeffs[i]);
  return HistorySpec(Kind::polynomial, std::move(coeffs), std::move(d));
}

HistorySpec HistorySpec::samples(std::vector<double> y, std::vector<double> y_prime) {
  if (y.size() < 2) throw InvalidArgument("sampled history needs at least two points");
  if (y.size() != y_prime.size()) throw InvalidArgument("sampled history needs equally many y and y' values");
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i]) || !std::isfinite(y_prime[i])) throw InvalidArgument("history values must be finite");
  return HistorySpec(Kind::samples, std::move(y), std::move(y_prime));
}

void HistorySpec::eval(double t, double tau, double& y, double& yp, double& ypp) const {
  switch (kind_) {
    case Kind::constant:
      y = y_[0];
      yp = yp_[0];
      ypp = 0.0;
      return;
    case Kind::polynomial: {
      y = yp = ypp = 0.0;
      for (auto it = y_.rbegin(); it != y_.rend(); ++it) {
        ypp = ypp * t + 2.0 * yp;
        yp = yp * t + y;
        y = y * t + *it;
      }
      return;
    }
    case Kind::samples: {
      const std::size_t n = y_.size();
      const double h = tau / static_cast<double>(n - 1);
      auto curvature = [&](std::size_t i) {
        if (i == 0) return (yp_[1] - yp_[0]) / h;
        if (i == n - 1) return (yp_[n - 1] - yp_[n - 2]) / h;
        return (yp_[i + 1] - yp_[i - 1]) / (2.0 * h);
      };
      double x = (t + tau) / h;
      std::size_t j = x <= 0.0 ? 0 : static_cast<std::size_t>(x);
      if (j > n - 2) j = n - 2;
      const double s = x - static_cast<double>(j);
      const Hermite hy{y_[j], yp_[j], y_[j + 1], yp_[j + 1], h};
      const Hermite hv{yp_[j], curvature(j), yp_[j + 1], curvature(j + 1), h};
      y = hy.value(s);
      yp = hv.value(s);
      ypp = hv.slope(s);
      return;
    }
  }
}

Trajectory simulate(const DelayDesign& d, const HistorySpec& h, double t_end, unsigned steps_per_delay) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive and finite");
  if (steps_per_delay < 20) throw InvalidArgument("steps_per_delay must be at least 20");
  const double tau = d.tau();
  const long N = steps_per_delay;
  const double dt = tau / static_cast<double>(N);
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));

  std::vector<double> y{}, v{}, acc{};
  y.reserve(steps + 1);
  v.reserve(steps + 1);
  acc.reserve(steps + 1);

  // Delayed (y, y') for the stage at t_n (+ dt/2 when half).
  auto delayed = [&](long n, bool half, double& yd, double& vd) {
    const long j = n - N;
    if (j < 0 || (j == 0 && !half)) {
      double a;
      h.eval((static_cast<double>(j) + (half ? 0.5 : 0.0)) * dt, tau, yd, vd, a);
      return;
    }
    const auto k = static_cast<std::size_t>(j);
    if (!half) {
      yd = y[k];
      vd = v[k];
      return;
    }
    yd = 0.5 * (y[k] + y[k + 1]) + dt / 8.0 * (v[k] - v[k + 1]);
    vd = 0.5 * (v[k] + v[k + 1]) + dt / 8.0 * (acc[k] - acc[k + 1]);
  };
  auto rhs = [&](double yy, double vv, double yd, double vd) {
    return -d.a1() * vv - d.a0() * yy - d.alpha1() * vd - d.alpha0() * yd;
  };

  {
    double y0, v0, a0;
    h.eval(0.0, tau, y0, v0, a0);
    y.push_back(y0);
    v.push_back(v0);
    double yd, vd;
    delayed(0, false, yd, vd);
    acc.push_back(rhs(y0, v0, yd, vd));
  }

  for (std::size_t n = 0; n < steps; ++n) {
    const long ln = static_cast<long>(n);
    double yd, vd;
    const double y0 = y[n], v0 = v[n];
    const double k1y = v0, k1v = acc[n];
    delayed(ln, true, yd, vd);
    const double k2y = v0 + 0.5 * dt * k1v;
    const double k2v = rhs(y0 + 0.5 * dt * k1y, k2y, yd, vd);
    const double k3y = v0 + 0.5 * dt * k2v;
    const double k3v = rhs(y0 + 0.5 * dt * k2y, k3y, yd, vd);
    delayed(ln + 1, false, yd, vd);
    const double k4y = v0 + dt * k3v;
    const double k4v = rhs(y0 + dt * k3y, k4y, yd, vd);

    const double y1 = y0 + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    const double v1 = v0 + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    const double t1 = static_cast<double>(n + 1) * dt;
    if (!(std::abs(y1) <= kBlowUp)) {
      std::ostringstream os;
      os << "solution exceeded 1e12 at t = " << t1;
      throw BlowUp(os.str(), t1);
    }
    y.push_back(y1);
    v.push_back(v1);
    acc.push_back(rhs(y1, v1, yd, vd));
  }

  Trajectory out;
  out.dt = dt;
  out.samples.reserve(y.size());
  for (std::size_t n = 0; n < y.size(); ++n) out.samples.push_back({y[n], v[n]});
  return out;
}

ModalEstimate estimate_modal(const Trajectory& traj, double t_min, unsigned multiplicity) {
  const auto ext = find_extrema(traj, first_index_at(traj, t_min));
  if (ext.size() < 5) {
    std::ostringstream os;
    os << "found " << ext.size() << " extrema after t = " << t_min << ", need at least 5";
    throw InsufficientOscillation(os.str());
  }
  std::vector<double> times, logs;
  for (const auto& e : ext) {
    times.push_back(e.t);
    logs.push_back(std::log(std::abs(e.value)) - multiplicity_shift(multiplicity, e.t));
  }
  const auto fit = fit_line(times, logs);
  return {fit.slope, mean_theta(ext), fit.rms, ext.size()};
}

ModalEstimate estimate_envelope(const Trajectory& traj, double t_min, double theta_guess, unsigned multiplicity) {
  if (!(theta_guess >= 0.0)) throw InvalidArgument("theta_guess must be nonnegative");
  const std::size_t n0 = first_index_at(traj, t_min);
  std::vector<double> times, logs;
  for (std::size_t n = n0; n < traj.samples.size(); ++n) {
    const auto& p = traj.samples[n];
    const double env = std::abs(p.y) + (theta_guess > 0.0 ? std::abs(p.y_prime) / theta_guess : 0.0);
    if (!(env > 0.0)) continue;
    const double t = traj.time(n);
    times.push_back(t);
    logs.push_back(std::log(env) - multiplicity_shift(multiplicity, t));
  }
  if (times.size() < 2) throw InsufficientOscillation("envelope fit needs at least two nonzero samples");
  const auto fit = fit_line(times, logs);
  const auto ext = find_extrema(traj, n0);
  return {fit.slope, ext.size() >= 2 ? mean_theta(ext) : theta_guess, fit.rms, ext.size()};
}

}  // namespace delaymid
