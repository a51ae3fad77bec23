#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "bimodal/classify.hpp"
#include "bimodal/core.hpp"

namespace bimodal {

struct GridAxis {
  double lo = -2.0;
  double hi = 2.0;
  int points = 81;

  double value(int i) const {
    if (points <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
};

/// Axes for (x1, x2, x5) of the CF10' deformation.
struct SweepGrid {
  GridAxis x1, x2, x5;
  std::size_t size() const {
    auto count = [](const GridAxis& a) { return static_cast<std::size_t>(std::max(a.points, 0)); };
    return count(x1) * count(x2) * count(x5);
  }
};

struct DiagramPoint {
  double x1, x2, x5;
  CanonicalLabel label;
  bool controllable;
  /// Near one of the analytic surfaces, or a guard fell in the tolerance band.
  bool boundary;
};

struct BifurcationDiagram {
  double a4;
  double b1;
  SweepGrid grid;
  /// x1 outermost, x5 fastest.
  std::vector<DiagramPoint> points;
};

/// (x2 + (a4/b1^2) x1 x5) (1 + (a4/b1^2) x5^2); controllable where positive.
double controllability_region(double a4, double b1, double x1, double x2, double x5);

/// Labels and controllability of every grid point of the CF10' deformation
/// with base (a4, b1). Threads share the work; output order is fixed.
BifurcationDiagram sweep_cf10p(double a4, double b1, const SweepGrid& grid,
                               double eps = kDefaultEps, unsigned threads = 0);

enum class DiagramFormat { Csv, Svg };

void write_csv(const BifurcationDiagram& diagram, std::ostream& out);

/// Slice of the diagram at the grid value of x5 nearest to `slice_x5`.
void write_svg(const BifurcationDiagram& diagram, double slice_x5, std::ostream& out);

/// Writes the diagram to `path`; IoFailure when the file cannot be written.
void emit_diagram(const BifurcationDiagram& diagram, DiagramFormat format,
                  const std::filesystem::path& path, double slice_x5 = 0.0);

}  // namespace bimodal
