#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "kinplume/core.hpp"
#include "kinplume/quadrature.hpp"

namespace kinplume::planar {

/// Cell-centred rectangular grid; x and y hold the node (cell centre) coordinates.
struct Grid2D {
  std::vector<double> x;
  std::vector<double> y;
  double dx = 0.0;
  double dy = 0.0;
};

Grid2D make_grid(double x_min, double x_max, std::size_t nx, double y_min, double y_max,
                 std::size_t ny);

/// x in (0, v t), y within 6 transverse spreads.
Grid2D default_transverse_grid(double t, double v, double d_t, std::size_t nx, std::size_t ny);

/// x from the lowest point reached by the free particles (min over tau of v tau - 6 sqrt(2 D_L
/// tau)) to v t + 6 sqrt(2 D_L t); y within 6 transverse spreads.
Grid2D default_full_grid(double t, const TransportParams& tp, std::size_t nx, std::size_t ny);

struct DensityField2D {
  std::vector<double> x;
  std::vector<double> y;
  double dx = 0.0;
  double dy = 0.0;
  /// Scaled mirrors (x - v* t) / sqrt(2 D* t) and y / sqrt(2 D_T t); x_hat is empty when
  /// D* = 0.
  std::vector<double> x_hat;
  std::vector<double> y_hat;
  /// values[iy * nx + ix]
  std::vector<double> values;
  Initial initial = Initial::Equilibrium;
  /// nullopt: free + adsorbed.
  std::optional<Phase> phase;
  double t = 0.0;
  /// Never-released adsorbed mass, a point mass at the origin (not in `values`).
  double origin_atom = 0.0;
  /// Transverse-only fields: never-captured mass on the line x = v t with y variance
  /// 2 D_T t (not in `values`). Full fields fold this term into `values`.
  double line_atom = 0.0;
  double line_atom_y_variance = 0.0;

  std::size_t nx() const { return x.size(); }
  std::size_t ny() const { return y.size(); }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * x.size() + ix]; }
  /// Midpoint-rule integral of `values`.
  double grid_mass() const;
};

/// h(x/v, t) / v times the normal density of y with variance 2 D_T x / v, for 0 < x < v t.
double transverse_only_value(Initial initial, std::optional<Phase> phase, double x, double y,
                             double t, const KineticsParams& kin, double v, double d_t);

DensityField2D transverse_only(Initial initial, std::optional<Phase> phase, double t,
                               const KineticsParams& kin, double v, double d_t, const Grid2D& grid,
                               unsigned threads = 0);

/// Sorted break points in [0, t] around the residence time x / v that carries a free
/// particle to x, spaced by multiples of its longitudinal spread.
std::vector<double> residence_breakpoints(double x, double t, const TransportParams& tp);

/// Residence-time convolution of the conservative 2D Gaussian kernel, including the
/// never-captured Gaussian term. The origin atom is excluded.
double full_2d_value(Initial initial, std::optional<Phase> phase, double x, double y, double t,
                     const KineticsParams& kin, const TransportParams& tp,
                     const quad::Options& opt = {1e-8, 1e-8, 4000, 4});

DensityField2D full_2d(Initial initial, std::optional<Phase> phase, double t,
                       const KineticsParams& kin, const TransportParams& tp, const Grid2D& grid,
                       const quad::Options& opt = {1e-8, 1e-8, 4000, 4}, unsigned threads = 0);

/// Mass-weighted product Gaussian on a grid.
DensityField2D gaussian_field(const Grid2D& grid, double mean_x, double var_x, double var_y,
                              double mass);

/// Sum of blocks of fx by fy cells (cell averages on the coarse grid).
DensityField2D coarsen(const DensityField2D& field, std::size_t fx, std::size_t fy);

/// sum |a - b| dx dy over a shared grid.
double l1_distance(const DensityField2D& a, const DensityField2D& b);

/// sum_y y^2 N / sum_y N for every x column (NaN where the column is empty).
std::vector<double> conditional_y_variance(const DensityField2D& field);

/// Fills the scaled mirrors from the kinetics and transverse coefficient.
void attach_scaled_coordinates(DensityField2D& field, const KineticsParams& kin,
                               const TransportParams& tp);

/// CSV columns: x, y, x_hat, y_hat, value.
void write_field_csv(std::ostream& os, const DensityField2D& field);

/// Little-endian binary: magic "KPGRID1\0", uint32 nx, uint32 ny, float64 x_min, x_max,
/// y_min, y_max, t, then nx * ny float64 values row-major (y rows, x fastest).
void write_field_binary(std::ostream& os, const DensityField2D& field);
DensityField2D read_field_binary(std::istream& is);

}  // namespace kinplume::planar
