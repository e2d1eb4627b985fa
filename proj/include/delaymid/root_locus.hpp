#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "delaymid/rootfinder.hpp"

namespace delaymid {

struct LocusPoint {
  double theta0;
  Complex root;
};

enum class PathOrigin { assigned, seed, entered_window, pair_formation };
enum class PathEnd { range_end, left_window, collision, broken };

const char* to_string(PathOrigin o) noexcept;
const char* to_string(PathEnd e) noexcept;

struct LocusPath {
  unsigned id = 0;
  std::vector<LocusPoint> points;  // on the sample grid, increasing theta0
  PathOrigin origin = PathOrigin::seed;
  PathEnd end = PathEnd::range_end;
  int conjugate_of = -1;  // id of the upper path this one mirrors, or -1
  // For entered_window paths: where the root crossed the window boundary.
  double entry_theta = 0.0;
  Complex entry_root;
  bool has_entry = false;
};

struct Collision {
  double theta0;
  Complex root;                  // the double real root
  std::vector<unsigned> merged;  // real paths closed here
  std::vector<unsigned> formed;  // conjugate paths opened after it
};

struct LocusTrace {
  std::vector<double> theta_samples;
  std::vector<LocusPath> paths;
  ContourBox window{0.0, 1.0, 0.0, 1.0};
  std::vector<Collision> collisions;
};

enum class EventKind {
  real_part_local_max,
  real_part_local_min,
  real_root_enters_window,
  real_root_collision,
  pair_formation
};

const char* to_string(EventKind k) noexcept;

struct LocusEvent {
  EventKind kind;
  double theta0;  // refined location
  Complex root;
  std::vector<unsigned> path_ids;
  // Sample-grid row that reports the event: the sample nearest theta0 for
  // extrema, the first sample inside the window for entries.
  double sample_theta0 = 0.0;
  Complex sample_root;
};

struct LocusOptions {
  unsigned rescan_period = 10;
  unsigned max_halvings = 6;
  double tol = kDefaultRootTol;
};

// Roots of the normalized quasipolynomial with assigned double roots at
// +-i theta0, followed over theta0 in [theta_from, theta_to].
LocusTrace trace_locus(double theta_from, double theta_to, double step, const ContourBox& window,
                       const LocusOptions& opts = {});

// Real-part extrema of every path, window entries of real roots, and
// real-root collisions recorded by the tracer.
std::vector<LocusEvent> detect_events(const LocusTrace& trace);

void write_locus_csv(std::ostream& os, const LocusTrace& trace);
void write_events_csv(std::ostream& os, const std::vector<LocusEvent>& events);
// One row per path: origin, end and its first and last points, 6 digits.
void write_paths_csv(std::ostream& os, const LocusTrace& trace);

struct SvgOptions {
  // Plotted region; defaults to the trace window.
  bool use_view = false;
  ContourBox view{0.0, 1.0, 0.0, 1.0};
  int width = 640;
  int height = 640;
};

// Detail view of the region around the first non-dominant root.
inline ContourBox detail_view() { return {-1.80, -1.55, 10.0, 11.0}; }

void render_locus_svg(std::ostream& os, const LocusTrace& trace, const SvgOptions& opts = {});

}  // namespace delaymid
