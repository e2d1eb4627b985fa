#include "delaymid/serialize.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>

#include "delaymid/errors.hpp"

namespace delaymid {

namespace {

double number_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number()) throw InvalidArgument(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

Json records(const std::vector<RootRecord>& roots) {
  Json out = Json::array();
  for (const auto& r : roots)
    out.push_back({{"root", to_json(r.location)},
                   {"multiplicity", r.multiplicity},
                   {"residual", r.residual},
                   {"refined", r.refined}});
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

Json to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const QuasiPolynomial& q) {
  Json terms = Json::array();
  for (const auto& t : q.terms()) terms.push_back({{"rate", t.rate}, {"coeffs", t.coeffs}});
  return {{"terms", terms}};
}

Json to_json(const DelayDesign& d) {
  return {{"a1", d.a1()}, {"a0", d.a0()}, {"alpha1", d.alpha1()}, {"alpha0", d.alpha0()}, {"tau", d.tau()}};
}

Json to_json(const MultiplicityReport& r) {
  return {{"root", to_json(r.root)},
          {"certified_multiplicity", r.certified_multiplicity},
          {"residuals", r.residuals},
          {"scales", r.scales},
          {"scale", r.scale},
          {"tol", r.tol}};
}

Json to_json(const ContourBox& b) {
  return {{"re_min", b.re_min()}, {"re_max", b.re_max()}, {"im_min", b.im_min()}, {"im_max", b.im_max()}};
}

Json to_json(const RootSet& s) {
  return {{"box", to_json(s.box)}, {"total_count", s.total_count}, {"roots", records(s.roots)}};
}

Json to_json(const DominanceCertificate& c) {
  return {{"verdict", to_string(c.verdict)},
          {"assigned_root", to_json(c.assigned_root)},
          {"expected_multiplicity", c.expected_multiplicity},
          {"margin", c.margin},
          {"margin_is_lower_bound", c.margin_is_lower_bound},
          {"search_box", to_json(c.search_box)},
          {"tail_radius", c.tail_radius},
          {"offending", records(c.offending)},
          {"note", c.note}};
}

Json to_json(const ModalEstimate& m) {
  return {{"sigma_est", m.sigma_est}, {"theta_est", m.theta_est}, {"fit_residual", m.fit_residual}, {"extrema", m.extrema}};
}

Json to_json(const ResonatorDesign& r) {
  return {{"omega", r.omega},
          {"k", r.k},
          {"tau_k", r.tau_k},
          {"design", to_json(r.coeffs)},
          {"notch_residuals", {r.notch_residuals.first, r.notch_residuals.second}},
          {"notch_scales", {r.notch_scales.first, r.notch_scales.second}}};
}

Json to_json(const FeedbackLaw& f) {
  return {{"gain_pos", f.gain_pos}, {"gain_vel", f.gain_vel}, {"gain_vel_delayed", f.gain_vel_delayed}, {"delay", f.delay}};
}

Complex complex_from_json(const Json& j) { return {number_field(j, "re"), number_field(j, "im")}; }

QuasiPolynomial quasipolynomial_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    throw InvalidArgument("quasipolynomial needs a \"terms\" array");
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) {
    Term term;
    term.rate = number_field(t, "rate");
    if (!t.contains("coeffs") || !t.at("coeffs").is_array()) throw InvalidArgument("term needs a \"coeffs\" array");
    for (const auto& c : t.at("coeffs")) {
      if (!c.is_number()) throw InvalidArgument("coefficients must be numbers");
      term.coeffs.push_back(c.get<double>());
    }
    terms.push_back(std::move(term));
  }
  return QuasiPolynomial(std::move(terms));
}

DelayDesign design_from_json(const Json& j) {
  const Json& d = (j.is_object() && j.contains("design")) ? j.at("design") : j;
  return DelayDesign(number_field(d, "a1"), number_field(d, "a0"), number_field(d, "alpha1"), number_field(d, "alpha0"),
                     number_field(d, "tau"));
}

Complex parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s += c;
  const auto bad = [&] { return InvalidArgument("cannot parse complex number \"" + raw + "\""); };
  if (s.empty()) throw bad();
  const char last = s.back();
  if (last != 'i' && last != 'j') {
    double re;
    if (!parse_double(s, re)) throw bad();
    return {re, 0.0};
  }
  s.pop_back();
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  std::string re_part = split == std::string::npos ? "" : s.substr(0, split);
  std::string im_part = split == std::string::npos ? s : s.substr(split);
  if (im_part.empty() || im_part == "+") im_part = "1";
  if (im_part == "-") im_part = "-1";
  double re = 0.0, im;
  if (!re_part.empty() && !parse_double(re_part, re)) throw bad();
  if (!parse_double(im_part, im)) throw bad();
  return {re, im};
}

void write_roots_csv(std::ostream& os, const RootSet& s) {
  os << "re,im,multiplicity,residual\n" << std::setprecision(17);
  for (const auto& r : s.roots)
    os << r.location.real() << ',' << r.location.imag() << ',' << r.multiplicity << ',' << r.residual << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "t,y,y_prime\n" << std::setprecision(17);
  for (std::size_t n = 0; n < t.samples.size(); ++n)
    os << t.time(n) << ',' << t.samples[n].y << ',' << t.samples[n].y_prime << '\n';
}

void write_frequency_csv(std::ostream& os, const std::vector<FrequencyPoint>& pts) {
  os << "omega_prime,magnitude_db,phase_deg\n" << std::setprecision(17);
  for (const auto& p : pts) os << p.omega_prime << ',' << p.magnitude_db << ',' << p.phase_deg << '\n';
}

}  // namespace delaymid
