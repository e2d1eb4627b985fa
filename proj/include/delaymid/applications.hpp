#pragma once

#include <utility>
#include <vector>

#include "delaymid/quasipoly.hpp"

namespace delaymid {

// Delayed resonator with tau_k = k pi / omega and double roots at +-i omega.
struct ResonatorDesign {
  double omega = 0.0;
  unsigned k = 0;
  double tau_k = 0.0;
  DelayDesign coeffs{0, 0, 0, 0, 1};
  std::pair<double, double> notch_residuals;  // |Delta(i omega)|, |Delta'(i omega)|
  std::pair<double, double> notch_scales;     // residual_scale of Delta and Delta' at i omega
};

struct AbsorberParams {
  AbsorberParams(double m_a, double zeta, double Omega);
  double m_a, zeta, Omega;
};

// u = gain_pos x_a + gain_vel x_a' + gain_vel_delayed x_a'(t - delay)
struct FeedbackLaw {
  double gain_pos = 0.0;
  double gain_vel = 0.0;
  double gain_vel_delayed = 0.0;
  double delay = 1.0;
};

class RationalTransferFunction {
 public:
  RationalTransferFunction(std::vector<double> numerator, std::vector<double> denominator);

  const std::vector<double>& numerator() const noexcept { return num_; }
  const std::vector<double>& denominator() const noexcept { return den_; }
  Complex operator()(Complex s) const;

 private:
  std::vector<double> num_, den_;  // low-to-high
};

ResonatorDesign resonator_design(double omega, unsigned k);

// Coefficients of resonator_design against assign_complex_pair(0, omega, tau),
// relative to the largest coefficient magnitude. tau defaults to k pi / omega.
bool resonator_matches_theorem(double omega, unsigned k, double tau = 0.0);

FeedbackLaw absorber_feedback(const AbsorberParams& p, double omega, unsigned k);

// s^2 + 2 zeta Omega s + Omega^2 - (gain_pos + gain_vel s + gain_vel_delayed s e^{-s delay}) / m_a
QuasiPolynomial closed_loop_char(const AbsorberParams& p, const FeedbackLaw& law);

// (T_ysw(s), T_ysd(s)) for the loop with damper 1/Delta_omega:
//   T_ysw = C G Delta / (Delta + C G) F,  T_ysd = Delta / (Delta + C G) F.
// Removable singularities (zeros of Delta cancelling poles of F) are
// resolved by their limits. Throws PoleAtEvaluationPoint at a genuine pole.
std::pair<Complex, Complex> fmc_response(const RationalTransferFunction& C, const RationalTransferFunction& G,
                                         const RationalTransferFunction& F, const ResonatorDesign& d, Complex s);

// omega = sqrt(g / L) for a suspended payload of length L.
double crane_omega(double length, double g = 9.81);

// Experimental: Delta with double roots at the damped mode
// -zeta omega +- i omega sqrt(1 - zeta^2), for 0 <= zeta < 1.
DelayDesign damped_mode_design(double omega, double zeta, double tau);

// Double roots at +-i omega for an arbitrary delay (e.g. 0 < tau < pi / omega).
DelayDesign free_delay_design(double omega, double tau);

struct FrequencyPoint {
  double omega_prime;
  double magnitude_db;
  double phase_deg;
};

// Delta(i w) / omega^2 over the given frequencies: 0 dB at w = 0 and a double
// notch at w = omega.
std::vector<FrequencyPoint> notch_response(const ResonatorDesign& d, const std::vector<double>& omegas);

}  // namespace delaymid
