#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kinplume/planar.hpp"

namespace kinplume::contour {

using Point = std::pair<double, double>;

struct Polyline {
  double level = 0.0;
  std::vector<Point> points;
  /// First point repeated at the end when closed.
  bool closed = false;
};

struct ContourSet {
  std::vector<Polyline> lines;
  /// Levels that produced no segment.
  std::vector<double> empty_levels;
  std::vector<std::string> warnings;

  std::vector<Polyline> at_level(double level) const;
};

/// Marching squares on node values v[iy * nx + ix] with node coordinates xs, ys. Saddle
/// cells are resolved by the cell-centre average; segments are stitched into polylines.
ContourSet marching_squares(std::span<const double> xs, std::span<const double> ys,
                            std::span<const double> values, std::span<const double> levels);

/// Contours of a density field in scaled coordinates (x_hat, y_hat), or in physical ones
/// when `scaled` is false or the field carries no scaled mirrors.
ContourSet contour_export(const planar::DensityField2D& field, std::span<const double> levels,
                          bool scaled = true);

/// Closed polygon approximating the ellipse ((x - cx)/ax)^2 + ((y - cy)/ay)^2 = 1.
Polyline ellipse(double cx, double cy, double ax, double ay, std::size_t n = 720);

/// Symmetric Hausdorff distance between two polyline sets (vertices to segments).
double hausdorff_distance(std::span<const Polyline> a, std::span<const Polyline> b);

/// Largest distance from a vertex of a closed polyline to its convex hull, over the
/// bounding-box diagonal. Infinite for open or degenerate lines.
double convexity_defect(const Polyline& line);

/// convexity_defect(line) <= tolerance.
bool is_convex(const Polyline& line, double tolerance = 1e-9);

/// Ratio of the vertical extent at x_c + d to that at x_c - d, with x_c the middle of the
/// horizontal range and d a quarter of that range. 1 for an axis-aligned ellipse.
double width_asymmetry(const Polyline& line);

/// CSV columns: level, line, point, x, y.
void write_contours_csv(std::ostream& os, const ContourSet& set);

}  // namespace kinplume::contour
