#include "delaymid/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "delaymid/applications.hpp"
#include "delaymid/dde_sim.hpp"
#include "delaymid/errors.hpp"
#include "delaymid/mid_design.hpp"
#include "delaymid/rootfinder.hpp"
#include "delaymid/root_locus.hpp"
#include "delaymid/serialize.hpp"

namespace delaymid::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError {
  std::string flag;
  std::string message;
};

[[noreturn]] void usage(const std::string& flag, const std::string& message) { throw UsageError{flag, message}; }

class Params {
 public:
  explicit Params(const std::map<std::string, std::string>& p) : p_(p) {}

  bool has(const std::string& k) const { return p_.count(k) != 0; }

  const std::string& text(const std::string& k) const {
    const auto it = p_.find(k);
    if (it == p_.end()) usage(k, "is required");
    return it->second;
  }

  double number(const std::string& k) const {
    const std::string& s = text(k);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) usage(k, "expects a finite number, got \"" + s + "\"");
    return v;
  }
  double number(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }

  unsigned count(const std::string& k) const {
    const double v = number(k);
    if (v < 0 || v != std::floor(v) || v > 1e9) usage(k, "expects a nonnegative integer, got \"" + text(k) + "\"");
    return static_cast<unsigned>(v);
  }
  unsigned count(const std::string& k, unsigned fallback) const { return has(k) ? count(k) : fallback; }

  Complex complex(const std::string& k) const {
    try {
      return parse_complex(text(k));
    } catch (const InvalidArgument& e) {
      usage(k, e.what());
    }
  }

  bool flag(const std::string& k) const { return has(k) && text(k) != "false"; }

 private:
  const std::map<std::string, std::string>& p_;
};

std::string flag_name(const std::string& k) { return "--" + k; }

const char* error_name(const Error& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const OverflowError*>(&e)) return "OverflowError";
  if (dynamic_cast<const Indeterminate*>(&e)) return "Indeterminate";
  if (dynamic_cast<const BoundaryRoot*>(&e)) return "BoundaryRoot";
  if (dynamic_cast<const QuadratureNotConverged*>(&e)) return "QuadratureNotConverged";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const MaxIterations*>(&e)) return "MaxIterations";
  if (dynamic_cast<const DerivativeVanished*>(&e)) return "DerivativeVanished";
  if (dynamic_cast<const PathLost*>(&e)) return "PathLost";
  if (dynamic_cast<const BlowUp*>(&e)) return "BlowUp";
  if (dynamic_cast<const InsufficientOscillation*>(&e)) return "InsufficientOscillation";
  if (dynamic_cast<const PoleAtEvaluationPoint*>(&e)) return "PoleAtEvaluationPoint";
  return "Error";
}

const char* extension(OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return ".json";
    case OutputFormat::csv: return ".csv";
    case OutputFormat::svg: return ".svg";
  }
  return "";
}

// Routes artifacts to files (or the primary one to the output stream).
class Sink {
 public:
  Sink(const RunConfig& c, std::ostream& out, RunResult& result) : out_(out), result_(result) {
    if (c.output_path == "-") {
      to_stream_ = true;
      return;
    }
    if (!c.output_path.empty()) {
      primary_ = c.output_path;
      return;
    }
    const char* dir = std::getenv(kOutputDirEnv);
    primary_ = fs::path(dir && *dir ? dir : ".") / (std::string(to_string(c.command)) + extension(c.output_format));
  }

  bool to_stream() const noexcept { return to_stream_; }

  void primary(const std::function<void(std::ostream&)>& write) {
    if (to_stream_) {
      write(out_);
      return;
    }
    emit(primary_, write);
  }

  // Sibling artifact <primary stem><suffix>; skipped when streaming.
  void sibling(const std::string& suffix, const std::function<void(std::ostream&)>& write) {
    if (to_stream_) return;
    emit(primary_.parent_path() / (primary_.stem().string() + suffix), write);
  }

  // Human-facing summary, suppressed when the primary artifact is streamed.
  std::ostream* summary() { return to_stream_ ? nullptr : &out_; }

 private:
  void emit(const fs::path& p, const std::function<void(std::ostream&)>& write) {
    if (p.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(p, std::ios::binary);
    if (!f) usage("output", "cannot write " + p.string());
    write(f);
    if (!f) usage("output", "failed writing " + p.string());
    result_.artifacts.push_back(p);
    out_ << "wrote " << p.string() << '\n';
  }

  std::ostream& out_;
  RunResult& result_;
  fs::path primary_;
  bool to_stream_ = false;
};

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

void require_format(const RunConfig& c, std::initializer_list<OutputFormat> allowed) {
  for (auto f : allowed)
    if (c.output_format == f) return;
  usage("format", std::string("\"") + to_string(c.output_format) + "\" is not supported by " + to_string(c.command));
}

// Design document from --design, or inline coefficients.
Json load_design_document(const Params& p) {
  if (p.has("design")) {
    const std::string& path = p.text("design");
    std::ifstream f(path);
    if (!f) usage("design", "cannot read " + path);
    try {
      return Json::parse(f);
    } catch (const Json::parse_error& e) {
      usage("design", std::string("is not valid JSON: ") + e.what());
    }
  }
  if (p.has("a1") || p.has("a0") || p.has("alpha1") || p.has("alpha0") || p.has("tau")) {
    return Json{{"a1", p.number("a1")},
                {"a0", p.number("a0")},
                {"alpha1", p.number("alpha1")},
                {"alpha0", p.number("alpha0")},
                {"tau", p.number("tau")}};
  }
  usage("design", "is required (or give --a1 --a0 --alpha1 --alpha0 --tau)");
}

DelayDesign design_of(const Json& doc) {
  try {
    return design_from_json(doc);
  } catch (const InvalidArgument& e) {
    usage("design", e.what());
  }
}

const Json* target_of(const Json& doc) {
  if (doc.is_object() && doc.contains("target") && doc.at("target").is_object()) return &doc.at("target");
  return nullptr;
}

HistorySpec parse_history(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto numbers = [&](const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      char* end = nullptr;
      const double x = std::strtod(item.c_str(), &end);
      if (item.empty() || end != item.c_str() + item.size()) usage("history", "bad number \"" + item + "\"");
      v.push_back(x);
    }
    return v;
  };
  try {
    if (kind == "constant") {
      const auto v = numbers(rest);
      if (v.empty() || v.size() > 2) usage("history", "constant:Y or constant:Y,YP");
      return HistorySpec::constant(v[0], v.size() > 1 ? v[1] : 0.0);
    }
    if (kind == "polynomial") return HistorySpec::polynomial(numbers(rest));
    if (kind == "samples") {
      std::ifstream f(rest);
      if (!f) usage("history", "cannot read " + rest);
      std::vector<double> y, yp;
      std::string line;
      while (std::getline(f, line)) {
        if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-' || line[0] == '+' ||
                              line[0] == '.'))
          continue;  // header or blank
        const auto v = numbers(line);
        if (v.size() != 2) usage("history", "sample rows must be y,y_prime");
        y.push_back(v[0]);
        yp.push_back(v[1]);
      }
      return HistorySpec::samples(std::move(y), std::move(yp));
    }
  } catch (const InvalidArgument& e) {
    usage("history", e.what());
  }
  usage("history", "expected constant:..., polynomial:... or samples:FILE, got \"" + spec + "\"");
}

int cmd_design(const RunConfig& c, const Params& p, Sink& sink) {
  require_format(c, {OutputFormat::json});
  const AssignmentTarget t(p.number("sigma0"), p.number("theta0"), p.number("tau"));
  const DelayDesign d = assign(t);
  const auto q = to_quasipolynomial(d);
  const auto rep = verify_multiplicity(q, t.root());
  const Json j = {{"target", {{"sigma0", t.sigma0()}, {"theta0", t.theta0()}, {"tau", t.tau()}}},
                  {"design", to_json(d)},
                  {"quasipolynomial", to_json(q)},
                  {"degree", degree(q)},
                  {"multiplicity", to_json(rep)}};
  sink.primary([&](std::ostream& os) { write_json(os, j); });
  if (auto* s = sink.summary())
    *s << "multiplicity " << rep.certified_multiplicity << " at " << t.sigma0() << (t.theta0() > 0 ? " +- " : " + ")
       << t.theta0() << "i\n";
  return kExitOk;
}

int cmd_roots(const RunConfig& c, const Params& p, Sink& sink) {
  require_format(c, {OutputFormat::csv, OutputFormat::json});
  const Json doc = load_design_document(p);
  const auto q = to_quasipolynomial(design_of(doc));
  const ContourBox box(p.number("re-min"), p.number("re-max"), p.number("im-min"), p.number("im-max"));
  const auto set = find_roots(q, box, p.number("tol", kDefaultRootTol));
  if (c.output_format == OutputFormat::json)
    sink.primary([&](std::ostream& os) { write_json(os, to_json(set)); });
  else
    sink.primary([&](std::ostream& os) { write_roots_csv(os, set); });
  if (auto* s = sink.summary()) *s << set.total_count << " roots (with multiplicity), " << set.roots.size() << " distinct\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& c, const Params& p, Sink& sink) {
  require_format(c, {OutputFormat::json});
  const Json doc = load_design_document(p);
  const DelayDesign d = design_of(doc);
  Complex s0;
  if (p.has("root")) {
    s0 = p.complex("root");
  } else if (const Json* t = target_of(doc); t && t->contains("sigma0") && t->contains("theta0")) {
    s0 = {t->at("sigma0").get<double>(), t->at("theta0").get<double>()};
  } else {
    usage("root", "is required when the design document carries no target");
  }
  const auto cert = certify_dominance(d, s0, p.number("margin-band", kDefaultMarginBand), p.number("tol", kDefaultRootTol));
  Json j = {{"certificate", to_json(cert)}};
  try {
    j["multiplicity"] = to_json(verify_multiplicity(to_quasipolynomial(d), s0));
  } catch (const Indeterminate& e) {
    j["multiplicity"] = {{"error", "Indeterminate"}, {"message", e.what()}};
  }
  sink.primary([&](std::ostream& os) { write_json(os, j); });
  if (auto* s = sink.summary()) *s << to_string(cert.verdict) << '\n';
  const bool ok = cert.verdict == Verdict::certified_strict || cert.verdict == Verdict::certified_nonstrict;
  return ok ? kExitOk : kExitDomain;
}

int cmd_locus(const RunConfig& c, const Params& p, Sink& sink) {
  require_format(c, {OutputFormat::csv, OutputFormat::svg});
  const double from = p.number("from", 0.0), to = p.number("to", 8.0), step = p.number("step", 0.01);
  const double im_max = p.number("im-max", 25.0);
  const ContourBox window(p.number("re-min", -4.75), p.number("re-max", 0.25), p.number("im-min", -im_max), im_max);
  LocusOptions opts;
  opts.rescan_period = p.count("rescan", opts.rescan_period);
  const auto trace = trace_locus(from, to, step, window, opts);
  std::vector<LocusEvent> events;
  if (trace.theta_samples.size() >= 3) events = detect_events(trace);

  if (c.output_format == OutputFormat::svg) {
    SvgOptions so;
    if (p.flag("detail")) {
      so.use_view = true;
      so.view = detail_view();
    }
    sink.primary([&](std::ostream& os) { render_locus_svg(os, trace, so); });
    sink.sibling(".csv", [&](std::ostream& os) { write_locus_csv(os, trace); });
  } else {
    sink.primary([&](std::ostream& os) { write_locus_csv(os, trace); });
  }
  sink.sibling("_events.csv", [&](std::ostream& os) { write_events_csv(os, events); });
  sink.sibling("_paths.csv", [&](std::ostream& os) { write_paths_csv(os, trace); });
  if (auto* s = sink.summary()) write_events_csv(*s, events);
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, const Params& p, Sink& sink) {
  require_format(c, {OutputFormat::csv});
  const Json doc = load_design_document(p);
  const DelayDesign d = design_of(doc);
  const HistorySpec h = parse_history(p.has("history") ? p.text("history") : "constant:1");
  const double t_end = p.number("t-end", 40.0 * d.tau());
  const unsigned steps = p.count("steps-per-delay", 100);
  const double t_min = p.number("t-min", 10.0 * d.tau());

  unsigned mult = 1;
  if (doc.is_object() && doc.contains("multiplicity") && doc.at("multiplicity").is_object() &&
      doc.at("multiplicity").contains("certified_multiplicity"))
    mult = doc.at("multiplicity").at("certified_multiplicity").get<unsigned>();
  mult = p.count("multiplicity", mult);
  double theta_guess = 0.0;
  if (const Json* t = target_of(doc); t && t->contains("theta0")) theta_guess = t->at("theta0").get<double>();
  theta_guess = p.number("theta-guess", theta_guess);

  const auto traj = simulate(d, h, t_end, steps);
  sink.primary([&](std::ostream& os) { write_trajectory_csv(os, traj); });

  Json modal;
  try {
    modal = to_json(estimate_modal(traj, t_min, mult));
    modal["method"] = "extrema";
  } catch (const InsufficientOscillation& e) {
    try {
      modal = to_json(estimate_envelope(traj, t_min, theta_guess, mult));
      modal["method"] = "envelope";
    } catch (const Error& e2) {
      modal = {{"method", nullptr}, {"message", e2.what()}};
    }
    modal["note"] = e.what();
  }
  modal["t_min"] = t_min;
  modal["multiplicity"] = mult;
  sink.sibling("_modal.json", [&](std::ostream& os) { write_json(os, modal); });
  if (auto* s = sink.summary()) *s << modal.dump() << '\n';
  return kExitOk;
}

int cmd_resonator(const RunConfig& c, const Params& p, Sink& sink) {
  require_format(c, {OutputFormat::json, OutputFormat::csv});
  const double omega = p.number("omega");
  const unsigned k = p.count("k", 1);
  const auto r = resonator_design(omega, k);
  Json j = {{"resonator", to_json(r)},
            {"quasipolynomial", to_json(to_quasipolynomial(r.coeffs))},
            {"matches_theorem", resonator_matches_theorem(omega, k)},
            {"multiplicity", to_json(verify_multiplicity(to_quasipolynomial(r.coeffs), Complex(0, omega)))}};
  const bool absorber = p.has("ma") || p.has("zeta") || p.has("Omega");
  if (absorber) {
    const AbsorberParams ap(p.number("ma"), p.number("zeta"), p.number("Omega"));
    const auto law = absorber_feedback(ap, omega, k);
    const auto cl = closed_loop_char(ap, law);
    j["absorber"] = {{"m_a", ap.m_a},
                     {"zeta", ap.zeta},
                     {"Omega", ap.Omega},
                     {"feedback", to_json(law)},
                     {"closed_loop", to_json(cl)},
                     {"closed_loop_multiplicity", to_json(verify_multiplicity(cl, Complex(0, omega)))}};
  }

  const bool sweep = p.flag("sweep") || c.output_format == OutputFormat::csv;
  std::vector<FrequencyPoint> pts;
  if (sweep) {
    const double lo = p.number("w-min", 0.0), hi = p.number("w-max", 2.0 * omega);
    const unsigned n = p.count("points", 401);
    if (n < 2) usage("points", "needs at least 2 points");
    if (!(hi > lo) || lo < 0.0) usage("w-max", "needs 0 <= w-min < w-max");
    std::vector<double> ws;
    for (unsigned i = 0; i < n; ++i) ws.push_back(lo + (hi - lo) * i / (n - 1));
    pts = notch_response(r, ws);
  }
  if (c.output_format == OutputFormat::csv) {
    sink.primary([&](std::ostream& os) { write_frequency_csv(os, pts); });
  } else {
    sink.primary([&](std::ostream& os) { write_json(os, j); });
    if (sweep) sink.sibling("_sweep.csv", [&](std::ostream& os) { write_frequency_csv(os, pts); });
  }
  if (auto* s = sink.summary())
    *s << "tau_k " << r.tau_k << ", matches theorem: " << (j["matches_theorem"].get<bool>() ? "yes" : "no") << '\n';
  return kExitOk;
}

}  // namespace

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::design: return "design";
    case Command::roots: return "roots";
    case Command::locus: return "locus";
    case Command::verify: return "verify";
    case Command::simulate: return "simulate";
    case Command::resonator: return "resonator";
  }
  return "?";
}

const char* to_string(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    case OutputFormat::svg: return "svg";
  }
  return "?";
}

RunResult run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunResult result;
  const Params p(config.parameters);
  try {
    Sink sink(config, out, result);
    switch (config.command) {
      case Command::design: result.status = cmd_design(config, p, sink); break;
      case Command::roots: result.status = cmd_roots(config, p, sink); break;
      case Command::locus: result.status = cmd_locus(config, p, sink); break;
      case Command::verify: result.status = cmd_verify(config, p, sink); break;
      case Command::simulate: result.status = cmd_simulate(config, p, sink); break;
      case Command::resonator: result.status = cmd_resonator(config, p, sink); break;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << flag_name(e.flag) << ' ' << e.message << '\n';
    result.status = kExitUsage;
  } catch (const Error& e) {
    Json j = {{"error", error_name(e)}, {"message", e.what()}};
    if (const auto* b = dynamic_cast<const BlowUp*>(&e)) j["time"] = b->time();
    err << j.dump() << '\n';
    result.status = kExitDomain;
  }
  return result;
}

namespace {

struct Flag {
  const char* name;
  const char* help;
  bool numeric = true;
};

void add_flags(CLI::App* sub, std::map<std::string, std::string>& values, std::initializer_list<Flag> flags) {
  for (const auto& f : flags) {
    auto* opt = sub->add_option(std::string("--") + f.name, values[f.name], f.help);
    if (f.numeric) opt->check(CLI::Number);
  }
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Multiplicity-induced-dominance design for single-delay second-order systems", "delaymid");
  app.require_subcommand(1, 1);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> output, format;
  std::map<std::string, bool> bool_flags;

  auto sub = [&](Command c, const char* help) {
    const std::string name = to_string(c);
    auto* s = app.add_subcommand(name, help);
    s->add_option("-o,--output", output[name], "Output file; '-' for stdout");
    s->add_option("--format", format[name], "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
    return s;
  };

  const Flag design_src[] = {{"design", "Design JSON file", false}, {"a1", "a1"}, {"a0", "a0"},
                             {"alpha1", "alpha1"},                  {"alpha0", "alpha0"}, {"tau", "Delay"}};
  auto add_design_src = [&](CLI::App* s, std::map<std::string, std::string>& v) {
    for (const auto& f : design_src) {
      auto* opt = s->add_option(std::string("--") + f.name, v[f.name], f.help);
      if (f.numeric) opt->check(CLI::Number);
    }
  };

  auto* design = sub(Command::design, "Assign a root of maximal multiplicity");
  add_flags(design, values["design"], {{"sigma0", "Real part of the assigned root"},
                                       {"theta0", "Imaginary part (0: real quadruple root)"},
                                       {"tau", "Delay"}});

  auto* roots = sub(Command::roots, "Find all roots in a box");
  add_design_src(roots, values["roots"]);
  add_flags(roots, values["roots"], {{"re-min", "Box"}, {"re-max", "Box"}, {"im-min", "Box"}, {"im-max", "Box"}, {"tol", "Root tolerance"}});

  auto* verify = sub(Command::verify, "Certify dominance of a root");
  add_design_src(verify, values["verify"]);
  add_flags(verify, values["verify"], {{"root", "Root, e.g. 0+2i", false}, {"margin-band", "Band in normalized units"}, {"tol", "Root tolerance"}});

  auto* locus = sub(Command::locus, "Trace the root locus over theta0");
  add_flags(locus, values["locus"], {{"from", "First theta0"}, {"to", "Last theta0"}, {"step", "theta0 step"},
                                     {"re-min", "Window"}, {"re-max", "Window"}, {"im-min", "Window"}, {"im-max", "Window"},
                                     {"rescan", "Steps between window rescans"}});
  locus->add_flag("--detail", bool_flags["detail"], "SVG of the detail region only");

  auto* simulate = sub(Command::simulate, "Integrate the delay equation");
  add_design_src(simulate, values["simulate"]);
  add_flags(simulate, values["simulate"], {{"t-end", "Final time"}, {"steps-per-delay", "Steps per delay"},
                                           {"history", "constant:Y[,YP] | polynomial:C0,C1,... | samples:FILE", false},
                                           {"t-min", "Start of the modal fit"}, {"multiplicity", "Dominant multiplicity"},
                                           {"theta-guess", "Frequency for the envelope fallback"}});

  auto* resonator = sub(Command::resonator, "Delayed resonator and absorber design");
  add_flags(resonator, values["resonator"], {{"omega", "Notch frequency"}, {"k", "Delay branch"}, {"ma", "Absorber mass"},
                                             {"zeta", "Absorber damping ratio"}, {"Omega", "Absorber natural frequency"},
                                             {"w-min", "Sweep start"}, {"w-max", "Sweep end"}, {"points", "Sweep points"}});
  resonator->add_flag("--sweep", bool_flags["sweep"], "Also write the frequency response CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  for (Command c : {Command::design, Command::roots, Command::locus, Command::verify, Command::simulate, Command::resonator}) {
    const std::string name = to_string(c);
    auto* s = app.get_subcommand(name);
    if (!s->parsed()) continue;
    config.command = c;
    for (const auto& [k, v] : values[name])
      if (s->count("--" + k) > 0) config.parameters[k] = v;
    if (c == Command::locus && bool_flags["detail"]) config.parameters["detail"] = "true";
    if (c == Command::resonator && bool_flags["sweep"]) config.parameters["sweep"] = "true";
    config.output_path = output[name];
    const std::string& f = format[name];
    if (f.empty()) {
      config.output_format = (c == Command::design || c == Command::verify || c == Command::resonator)
                                 ? OutputFormat::json
                                 : OutputFormat::csv;
    } else {
      config.output_format = f == "json" ? OutputFormat::json : f == "csv" ? OutputFormat::csv : OutputFormat::svg;
    }
  }
  return run(config, out, err).status;
}

}  // namespace delaymid::cli
