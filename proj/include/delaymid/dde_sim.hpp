#pragma once

#include <vector>

#include "delaymid/quasipoly.hpp"

namespace delaymid {

// Initial data for y and y' on [-tau, 0].
class HistorySpec {
 public:
  enum class Kind { constant, polynomial, samples };

  // y = value, y' = slope on the whole interval.
  static HistorySpec constant(double value, double slope = 0.0);
  // y(t) = sum c_i t^i (low-to-high), y' its derivative.
  static HistorySpec polynomial(std::vector<double> coeffs);
  // (y, y') on a uniform grid from -tau to 0, at least two points.
  static HistorySpec samples(std::vector<double> y, std::vector<double> y_prime);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& y_data() const noexcept { return y_; }
  const std::vector<double>& y_prime_data() const noexcept { return yp_; }

  // y, y' and y'' at t in [-tau, 0]. Sample histories interpolate piecewise
  // cubically with y'' from centered differences of y'.
  void eval(double t, double tau, double& y, double& yp, double& ypp) const;

 private:
  HistorySpec(Kind k, std::vector<double> y, std::vector<double> yp) : kind_(k), y_(std::move(y)), yp_(std::move(yp)) {}
  Kind kind_;
  std::vector<double> y_, yp_;
};

struct TrajectorySample {
  double y;
  double y_prime;
};

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<TrajectorySample> samples;  // samples[n] at t0 + n dt

  double time(std::size_t n) const noexcept { return t0 + static_cast<double>(n) * dt; }
};

struct ModalEstimate {
  double sigma_est;
  double theta_est;
  double fit_residual;  // RMS error of the log-amplitude fit
  std::size_t extrema = 0;
};

// y'' = -a1 y' - a0 y - alpha1 y'(t - tau) - alpha0 y(t - tau) by classical RK4
// with dt = tau / steps_per_delay. Delayed stage values at half steps use cubic
// Hermite interpolation of the stored grid. Throws BlowUp once |y| > 1e12.
Trajectory simulate(const DelayDesign& d, const HistorySpec& h, double t_end, unsigned steps_per_delay);

// Extrema of y for t >= t_min (zeros of the Hermite interpolant's slope),
// theta = pi / mean spacing and sigma = slope of log|extremum| against t.
// A dominant root of multiplicity m contributes t^{m-1}; the fit removes
// (m - 1) log t before regressing. Throws InsufficientOscillation below 5 extrema.
ModalEstimate estimate_modal(const Trajectory& traj, double t_min, unsigned multiplicity = 1);

// Fallback for non-oscillating or short tails: sigma from a linear fit of
// log(|y| + |y'| / theta_guess) (|y| alone when theta_guess is 0); theta_est
// is pi / mean extremum spacing when at least two extrema exist, else theta_guess.
ModalEstimate estimate_envelope(const Trajectory& traj, double t_min, double theta_guess, unsigned multiplicity = 1);

}  // namespace delaymid
