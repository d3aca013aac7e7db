#pragma once

// Sweeps of the canonical phase over a rectangular (alpha_1, alpha_2) grid,
// transition-order annotation of every label change, boundary polylines and
// the analytic stability curves.

#include <array>
#include <vector>

#include "selforg/equilibrium.hpp"

namespace selforg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

struct GridSpec {
  Interval alpha_1_range{0.0, 2.5};
  Interval alpha_2_range{0.0, 2.5};
  int n_1 = 101;
  int n_2 = 101;
  Thermo thermo;

  void validate() const;
  double alpha_1(int i) const;
  double alpha_2(int j) const;
  double step_1() const { return (alpha_1_range.hi - alpha_1_range.lo) / (n_1 - 1); }
  double step_2() const { return (alpha_2_range.hi - alpha_2_range.lo) / (n_2 - 1); }
};

enum class Axis { alpha_1, alpha_2 };
enum class TransitionOrder { first, second };

const char* to_string(Axis a);
const char* to_string(TransitionOrder o);

/// Analytic stability curves sampled on the grid's alpha_2 values.
struct OverlayCurves {
  std::vector<double> alpha_2;
  std::vector<double> theta_2;            ///< positive nematic root
  std::vector<double> alpha_1c;           ///< 1/(1 + theta_2)
  std::vector<double> alpha_1c_negative;  ///< 1/(1 - theta_2), the theta_2 < 0 branch
  double paramagnetic_alpha_1 = 1.0;      ///< dashed lines alpha_1 = 1 and alpha_2 = 1
  double paramagnetic_alpha_2 = 1.0;
};

/// One label change between neighbouring grid points along a grid line.
struct TransitionAnnotation {
  Axis direction = Axis::alpha_1;
  int line = 0;    ///< index of the coordinate held fixed
  int index = 0;   ///< crossing lies between index and index + 1 along the line
  double alpha_1 = 0.0;  ///< refined crossing location
  double alpha_2 = 0.0;
  Phase from = Phase::paramagnetic;
  Phase to = Phase::paramagnetic;
  double jump = 0.0;       ///< |one-sided dF/dalpha right - left|
  double noise = 0.0;      ///< median |second difference| / step beside the crossing
  double threshold = 0.0;  ///< jump_factor * noise
  bool hysteresis = false; ///< a continued branch stays a distinct local minimum past the crossing
  bool insufficient_resolution = false;
  TransitionOrder order = TransitionOrder::second;
};

struct BoundaryPolyline {
  Phase a = Phase::paramagnetic;  ///< a < b in enum order
  Phase b = Phase::nematic;
  TransitionOrder order = TransitionOrder::second;
  std::vector<std::array<double, 2>> points;  ///< (alpha_1, alpha_2)
};

struct PhaseDiagram {
  GridSpec spec;
  std::vector<PhasePoint> grid;  ///< row-major, index i * n_2 + j (i along alpha_1)
  OverlayCurves overlays;
  std::vector<TransitionAnnotation> transitions;
  std::vector<BoundaryPolyline> boundaries;
  /// Cells whose four corners carry all three phases, as cell centres.
  std::vector<std::array<double, 2>> triple_cells;
  int dropped_seeds = 0;

  const PhasePoint& at(int i, int j) const { return grid[static_cast<std::size_t>(i) * spec.n_2 + j]; }
};

struct DiagramOptions {
  SolverOptions solver;
  int refine_depth = 6;          ///< label bisections per boundary edge
  double jump_factor = 5.0;
  int noise_window = 5;          ///< second differences per side entering the median
  bool annotate = true;          ///< compute transitions and boundaries after the sweep
};

/// Classifies every grid point; deterministic for any worker count.
PhaseDiagram sweep_grid(const GridSpec& spec, int workers = 1, const DiagramOptions& opts = {});

/// Annotates every label change along grid lines running in `direction`.
std::vector<TransitionAnnotation> transition_order(const PhaseDiagram& diagram, Axis direction, int workers = 1,
                                                   const DiagramOptions& opts = {});

/// Marching-squares polylines through the refined crossings, tagged by order.
/// Centres of cells touching all three phases are appended to `triple_cells`.
std::vector<BoundaryPolyline> extract_boundaries(const PhaseDiagram& diagram,
                                                std::vector<std::array<double, 2>>* triple_cells = nullptr);

OverlayCurves analytic_overlays(const std::vector<double>& alpha_2_samples);

/// Continues a minimum from `seed` to `alpha`. Returns true and fills `out` if
/// the refined point is a local minimum.
bool continue_minimum(Point2 seed, Couplings alpha, const SolverOptions& opts, FixedPoint& out);

}  // namespace selforg
