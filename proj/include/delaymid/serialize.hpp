#pragma once

#include <iosfwd>
#include <vector>

#include "delaymid/applications.hpp"
#include "delaymid/dde_sim.hpp"
#include "delaymid/mid_design.hpp"
#include "delaymid/rootfinder.hpp"
#include "json.hpp"

namespace delaymid {

using Json = nlohmann::ordered_json;

// JSON writers. nlohmann prints doubles in shortest round-trip form, so a
// parse of the output reproduces every value bit for bit.
Json to_json(Complex z);
Json to_json(const QuasiPolynomial& q);
Json to_json(const DelayDesign& d);
Json to_json(const MultiplicityReport& r);
Json to_json(const ContourBox& b);
Json to_json(const RootSet& s);
Json to_json(const DominanceCertificate& c);
Json to_json(const ModalEstimate& m);
Json to_json(const ResonatorDesign& r);
Json to_json(const FeedbackLaw& f);

// Readers throw InvalidArgument on missing or mistyped fields.
Complex complex_from_json(const Json& j);
QuasiPolynomial quasipolynomial_from_json(const Json& j);
// Accepts a bare {"a1", "a0", "alpha1", "alpha0", "tau"} object or any
// document carrying one under "design" (the output of the design command).
DelayDesign design_from_json(const Json& j);

// "re+imi" / "re-imi" / "re" / "imi" forms, e.g. "0+2i", "-1.5", "3i".
Complex parse_complex(const std::string& text);

// Data tables at 17 significant digits.
void write_roots_csv(std::ostream& os, const RootSet& s);
void write_trajectory_csv(std::ostream& os, const Trajectory& t);
void write_frequency_csv(std::ostream& os, const std::vector<FrequencyPoint>& pts);

}  // namespace delaymid
