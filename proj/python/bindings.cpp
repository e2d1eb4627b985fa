#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "delaymid/applications.hpp"
#include "delaymid/dde_sim.hpp"
#include "delaymid/errors.hpp"
#include "delaymid/mid_design.hpp"
#include "delaymid/rootfinder.hpp"
#include "delaymid/root_locus.hpp"
#include "delaymid/serialize.hpp"

namespace py = pybind11;
using namespace delaymid;

namespace {

template <class F>
std::string to_text(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_delaymid, m) {
  m.doc() = "Root assignment of maximal multiplicity for single-delay second-order systems";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<OverflowError>(m, "OverflowError", base.ptr());
  py::register_exception<Indeterminate>(m, "Indeterminate", base.ptr());
  py::register_exception<BoundaryRoot>(m, "BoundaryRoot", base.ptr());
  py::register_exception<QuadratureNotConverged>(m, "QuadratureNotConverged", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<MaxIterations>(m, "MaxIterations", base.ptr());
  py::register_exception<DerivativeVanished>(m, "DerivativeVanished", base.ptr());
  py::register_exception<PathLost>(m, "PathLost", base.ptr());
  py::register_exception<BlowUp>(m, "BlowUp", base.ptr());
  py::register_exception<InsufficientOscillation>(m, "InsufficientOscillation", base.ptr());
  py::register_exception<PoleAtEvaluationPoint>(m, "PoleAtEvaluationPoint", base.ptr());

  py::class_<Term>(m, "Term")
      .def(py::init([](double rate, std::vector<double> coeffs) { return Term{rate, std::move(coeffs)}; }),
           py::arg("rate"), py::arg("coeffs"))
      .def_readonly("rate", &Term::rate)
      .def_readonly("coeffs", &Term::coeffs);

  py::class_<QuasiPolynomial>(m, "QuasiPolynomial")
      .def(py::init<std::vector<Term>, bool>(), py::arg("terms"), py::arg("strict_retarded") = true)
      .def_property_readonly("terms", &QuasiPolynomial::terms)
      .def("__call__", [](const QuasiPolynomial& q, Complex s) { return evaluate(q, s); })
      .def("to_json", [](const QuasiPolynomial& q) { return to_json(q).dump(); })
      .def_static("from_json", [](const std::string& s) { return quasipolynomial_from_json(Json::parse(s)); })
      .def(py::self == py::self);

  py::class_<DelayDesign>(m, "DelayDesign")
      .def(py::init<double, double, double, double, double>(), py::arg("a1"), py::arg("a0"), py::arg("alpha1"),
           py::arg("alpha0"), py::arg("tau"))
      .def_property_readonly("a1", &DelayDesign::a1)
      .def_property_readonly("a0", &DelayDesign::a0)
      .def_property_readonly("alpha1", &DelayDesign::alpha1)
      .def_property_readonly("alpha0", &DelayDesign::alpha0)
      .def_property_readonly("tau", &DelayDesign::tau)
      .def("to_json", [](const DelayDesign& d) { return to_json(d).dump(); })
      .def_static("from_json", [](const std::string& s) { return design_from_json(Json::parse(s)); })
      .def(py::self == py::self)
      .def("__repr__", [](const DelayDesign& d) { return "DelayDesign(" + to_json(d).dump() + ")"; });

  m.def("to_quasipolynomial", &to_quasipolynomial, py::arg("design"));
  m.def("evaluate", &evaluate, py::arg("q"), py::arg("s"));
  m.def("derivative", &derivative, py::arg("q"), py::arg("order") = 1);
  m.def("degree", &degree, py::arg("q"));
  m.def("shift_and_scale", &shift_and_scale, py::arg("q"), py::arg("sigma0"), py::arg("tau"));
  m.def("residual_scale", &residual_scale, py::arg("q"), py::arg("s"));

  py::class_<MultiplicityReport>(m, "MultiplicityReport")
      .def_readonly("root", &MultiplicityReport::root)
      .def_readonly("residuals", &MultiplicityReport::residuals)
      .def_readonly("scales", &MultiplicityReport::scales)
      .def_readonly("certified_multiplicity", &MultiplicityReport::certified_multiplicity)
      .def_readonly("scale", &MultiplicityReport::scale)
      .def_readonly("tol", &MultiplicityReport::tol);

  m.def("assign_real_root", [](double sigma0, double tau) { return assign_real_root(AssignmentTarget(sigma0, 0.0, tau)); },
        py::arg("sigma0"), py::arg("tau"));
  m.def("assign_complex_pair",
        [](double sigma0, double theta0, double tau) { return assign_complex_pair(AssignmentTarget(sigma0, theta0, tau)); },
        py::arg("sigma0"), py::arg("theta0"), py::arg("tau"));
  m.def("assign", [](double sigma0, double theta0, double tau) { return assign(AssignmentTarget(sigma0, theta0, tau)); },
        py::arg("sigma0"), py::arg("theta0"), py::arg("tau"));
  m.def("normalized_complex", &normalized_complex, py::arg("theta0"));
  m.def("verify_multiplicity", &verify_multiplicity, py::arg("q"), py::arg("s0"), py::arg("tol") = kDefaultMultiplicityTol);

  py::class_<ContourBox>(m, "ContourBox")
      .def(py::init<double, double, double, double>(), py::arg("re_min"), py::arg("re_max"), py::arg("im_min"),
           py::arg("im_max"))
      .def_property_readonly("re_min", &ContourBox::re_min)
      .def_property_readonly("re_max", &ContourBox::re_max)
      .def_property_readonly("im_min", &ContourBox::im_min)
      .def_property_readonly("im_max", &ContourBox::im_max);

  py::class_<RootRecord>(m, "RootRecord")
      .def_readonly("location", &RootRecord::location)
      .def_readonly("multiplicity", &RootRecord::multiplicity)
      .def_readonly("residual", &RootRecord::residual)
      .def_readonly("refined", &RootRecord::refined);

  py::class_<RootSet>(m, "RootSet")
      .def_readonly("roots", &RootSet::roots)
      .def_readonly("box", &RootSet::box)
      .def_readonly("total_count", &RootSet::total_count)
      .def("to_json", [](const RootSet& s) { return to_json(s).dump(); })
      .def("to_csv", [](const RootSet& s) { return to_text([&](std::ostream& os) { write_roots_csv(os, s); }); });

  py::class_<DominanceCertificate>(m, "DominanceCertificate")
      .def_readonly("assigned_root", &DominanceCertificate::assigned_root)
      .def_readonly("expected_multiplicity", &DominanceCertificate::expected_multiplicity)
      .def_readonly("margin", &DominanceCertificate::margin)
      .def_readonly("margin_is_lower_bound", &DominanceCertificate::margin_is_lower_bound)
      .def_readonly("search_box", &DominanceCertificate::search_box)
      .def_readonly("tail_radius", &DominanceCertificate::tail_radius)
      .def_readonly("offending", &DominanceCertificate::offending)
      .def_readonly("note", &DominanceCertificate::note)
      .def_property_readonly("verdict", [](const DominanceCertificate& c) { return std::string(to_string(c.verdict)); })
      .def("to_json", [](const DominanceCertificate& c) { return to_json(c).dump(); });

  m.def("count_roots", &count_roots, py::arg("q"), py::arg("box"));
  m.def("find_roots", &find_roots, py::arg("q"), py::arg("box"), py::arg("tol") = kDefaultRootTol);
  m.def("newton_refine", &newton_refine, py::arg("q"), py::arg("guess"), py::arg("expected_mult"),
        py::arg("tol") = kDefaultRootTol);
  m.def("tail_radius", &tail_radius, py::arg("design"), py::arg("re_threshold"));
  m.def("certify_dominance", &certify_dominance, py::arg("design"), py::arg("s0"),
        py::arg("margin_band") = kDefaultMarginBand, py::arg("tol") = kDefaultRootTol);

  py::class_<LocusPoint>(m, "LocusPoint").def_readonly("theta0", &LocusPoint::theta0).def_readonly("root", &LocusPoint::root);
  py::class_<LocusPath>(m, "LocusPath")
      .def_readonly("id", &LocusPath::id)
      .def_readonly("points", &LocusPath::points)
      .def_readonly("conjugate_of", &LocusPath::conjugate_of)
      .def_property_readonly("origin", [](const LocusPath& p) { return std::string(to_string(p.origin)); })
      .def_property_readonly("end", [](const LocusPath& p) { return std::string(to_string(p.end)); });
  py::class_<LocusTrace>(m, "LocusTrace")
      .def_readonly("theta_samples", &LocusTrace::theta_samples)
      .def_readonly("paths", &LocusTrace::paths)
      .def_readonly("window", &LocusTrace::window)
      .def("to_csv", [](const LocusTrace& t) { return to_text([&](std::ostream& os) { write_locus_csv(os, t); }); })
      .def("to_svg", [](const LocusTrace& t) { return to_text([&](std::ostream& os) { render_locus_svg(os, t); }); });
  py::class_<LocusEvent>(m, "LocusEvent")
      .def_property_readonly("kind", [](const LocusEvent& e) { return std::string(to_string(e.kind)); })
      .def_readonly("theta0", &LocusEvent::theta0)
      .def_readonly("root", &LocusEvent::root)
      .def_readonly("path_ids", &LocusEvent::path_ids)
      .def_readonly("sample_theta0", &LocusEvent::sample_theta0)
      .def_readonly("sample_root", &LocusEvent::sample_root);

  m.def("trace_locus",
        [](double from, double to, double step, const ContourBox& window) { return trace_locus(from, to, step, window); },
        py::arg("theta_from"), py::arg("theta_to"), py::arg("step"), py::arg("window"));
  m.def("detect_events", &detect_events, py::arg("trace"));

  py::class_<ResonatorDesign>(m, "ResonatorDesign")
      .def_readonly("omega", &ResonatorDesign::omega)
      .def_readonly("k", &ResonatorDesign::k)
      .def_readonly("tau_k", &ResonatorDesign::tau_k)
      .def_readonly("coeffs", &ResonatorDesign::coeffs)
      .def_readonly("notch_residuals", &ResonatorDesign::notch_residuals)
      .def_readonly("notch_scales", &ResonatorDesign::notch_scales);
  m.def("resonator_design", &resonator_design, py::arg("omega"), py::arg("k"));
  m.def("resonator_matches_theorem", &resonator_matches_theorem, py::arg("omega"), py::arg("k"), py::arg("tau") = 0.0);

  py::class_<HistorySpec>(m, "HistorySpec")
      .def_static("constant", &HistorySpec::constant, py::arg("value"), py::arg("slope") = 0.0)
      .def_static("polynomial", &HistorySpec::polynomial, py::arg("coeffs"))
      .def_static("samples", &HistorySpec::samples, py::arg("y"), py::arg("y_prime"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("t0", &Trajectory::t0)
      .def_readonly("dt", &Trajectory::dt)
      .def_property_readonly("y", [](const Trajectory& t) {
        std::vector<double> v;
        for (const auto& s : t.samples) v.push_back(s.y);
        return v;
      })
      .def_property_readonly("y_prime", [](const Trajectory& t) {
        std::vector<double> v;
        for (const auto& s : t.samples) v.push_back(s.y_prime);
        return v;
      })
      .def("to_csv", [](const Trajectory& t) { return to_text([&](std::ostream& os) { write_trajectory_csv(os, t); }); });

  py::class_<ModalEstimate>(m, "ModalEstimate")
      .def_readonly("sigma_est", &ModalEstimate::sigma_est)
      .def_readonly("theta_est", &ModalEstimate::theta_est)
      .def_readonly("fit_residual", &ModalEstimate::fit_residual)
      .def_readonly("extrema", &ModalEstimate::extrema);

  m.def("simulate", &simulate, py::arg("design"), py::arg("history"), py::arg("t_end"), py::arg("steps_per_delay"));
  m.def("estimate_modal", &estimate_modal, py::arg("trajectory"), py::arg("t_min"), py::arg("multiplicity") = 1);
  m.def("estimate_envelope", &estimate_envelope, py::arg("trajectory"), py::arg("t_min"), py::arg("theta_guess"),
        py::arg("multiplicity") = 1);
}
