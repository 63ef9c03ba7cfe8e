#include "kinplume/planar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "kinplume/giddings.hpp"
#include "kinplume/parallel.hpp"
#include "kinplume/stats.hpp"

namespace kinplume::planar {

namespace {

constexpr char kMagic[8] = {'K', 'P', 'G', 'R', 'I', 'D', '1', '\0'};

double normal_pdf(double z, double var) {
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("2D fields need t > 0");
}

DensityField2D empty_field(const Grid2D& grid, Initial initial, std::optional<Phase> phase,
                           double t) {
  DensityField2D f;
  f.x = grid.x;
  f.y = grid.y;
  f.dx = grid.dx;
  f.dy = grid.dy;
  f.values.assign(grid.x.size() * grid.y.size(), 0.0);
  f.initial = initial;
  f.phase = phase;
  f.t = t;
  return f;
}

template <class T>
void put(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "binary grid export assumes little-endian");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw InvalidParameter("truncated binary grid");
  return value;
}

}  // namespace

Grid2D make_grid(double x_min, double x_max, std::size_t nx, double y_min, double y_max,
                 std::size_t ny) {
  Grid2D g;
  g.x = giddings::uniform_grid(x_min, x_max, nx);
  g.y = giddings::uniform_grid(y_min, y_max, ny);
  g.dx = (x_max - x_min) / static_cast<double>(nx);
  g.dy = (y_max - y_min) / static_cast<double>(ny);
  return g;
}

Grid2D default_transverse_grid(double t, double v, double d_t, std::size_t nx, std::size_t ny) {
  check_time(t);
  if (!(v > 0.0 && d_t > 0.0)) throw InvalidParameter("transverse grid needs v > 0 and d_t > 0");
  const double ymax = 6.0 * std::sqrt(2.0 * d_t * t);
  return make_grid(0.0, v * t, nx, -ymax, ymax, ny);
}

Grid2D default_full_grid(double t, const TransportParams& tp, std::size_t nx, std::size_t ny) {
  check_time(t);
  tp.validate();
  if (!(tp.d_l > 0.0 && tp.d_t > 0.0)) throw InvalidParameter("full grid needs d_l > 0, d_t > 0");
  double x_min;
  if (tp.v > 0.0) {
    const double tau = std::min(t, 18.0 * tp.d_l / (tp.v * tp.v));
    x_min = tp.v * tau - 6.0 * std::sqrt(2.0 * tp.d_l * tau);
  } else {
    x_min = -6.0 * std::sqrt(2.0 * tp.d_l * t);
  }
  const double x_max = tp.v * t + 6.0 * std::sqrt(2.0 * tp.d_l * t);
  const double ymax = 6.0 * std::sqrt(2.0 * tp.d_t * t);
  return make_grid(x_min, x_max, nx, -ymax, ymax, ny);
}

double DensityField2D::grid_mass() const {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value() * dx * dy;
}

double transverse_only_value(Initial initial, std::optional<Phase> phase, double x, double y,
                             double t, const KineticsParams& kin, double v, double d_t) {
  if (!(x > 0.0 && x < v * t)) return 0.0;
  const double tau = x / v;
  return giddings::density(initial, phase, tau, t, kin) / v * normal_pdf(y, 2.0 * d_t * tau);
}

DensityField2D transverse_only(Initial initial, std::optional<Phase> phase, double t,
                               const KineticsParams& kin, double v, double d_t, const Grid2D& grid,
                               unsigned threads) {
  kin.validate();
  check_time(t);
  if (!(v > 0.0 && d_t > 0.0)) throw InvalidParameter("transverse-only field needs v > 0, d_t > 0");
  DensityField2D f = empty_field(grid, initial, phase, t);
  const std::size_t nx = grid.x.size();
  parallel_for(grid.y.size(), threads, [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      f.values[iy * nx + ix] =
          transverse_only_value(initial, phase, grid.x[ix], grid.y[iy], t, kin, v, d_t);
    }
  });
  const giddings::Atoms at = giddings::atoms(initial, phase, t, kin);
  f.origin_atom = at.at_0;
  f.line_atom = at.at_t;
  f.line_atom_y_variance = 2.0 * d_t * t;
  attach_scaled_coordinates(f, kin, TransportParams{v, 0.0, d_t});
  return f;
}

std::vector<double> residence_breakpoints(double x, double t, const TransportParams& tp) {
  std::vector<double> cuts = {0.0, t};
  if (tp.v > 0.0) {
    const double centre = x / tp.v;
    if (centre > 0.0 && centre < t) {
      const double width = std::sqrt(2.0 * tp.d_l * centre) / tp.v;
      for (double m : {-8.0, -2.0, 0.0, 2.0, 8.0}) {
        const double c = centre + m * width;
        if (c > 0.0 && c < t) cuts.push_back(c);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double full_2d_value(Initial initial, std::optional<Phase> phase, double x, double y, double t,
                     const KineticsParams& kin, const TransportParams& tp, const quad::Options& opt) {
  const double dl = tp.d_l, dt = tp.d_t, v = tp.v;
  const double norm = 4.0 * std::numbers::pi * std::sqrt(dl * dt);
  const auto kernel = [&](double tau) {
    if (!(tau > 0.0)) return 0.0;
    const double ex = x - v * tau;
    return std::exp(-ex * ex / (4.0 * dl * tau) - y * y / (4.0 * dt * tau)) / (norm * tau);
  };
  const auto integrand = [&](double tau) {
    const double k = kernel(tau);
    return k == 0.0 ? 0.0 : k * giddings::density(initial, phase, tau, t, kin);
  };
  const std::vector<double> cuts = residence_breakpoints(x, t, tp);
  quad::Options piece = opt;
  piece.abs_tol = opt.abs_tol / static_cast<double>(cuts.size() - 1);
  double value = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    value += quad::integrate(integrand, cuts[k], cuts[k + 1], piece).value;
  }
  const double never_captured = giddings::atoms(initial, phase, t, kin).at_t;
  if (never_captured > 0.0) value += never_captured * kernel(t);
  return value;
}

DensityField2D full_2d(Initial initial, std::optional<Phase> phase, double t,
                       const KineticsParams& kin, const TransportParams& tp, const Grid2D& grid,
                       const quad::Options& opt, unsigned threads) {
  kin.validate();
  tp.validate();
  check_time(t);
  if (!(tp.d_l > 0.0 && tp.d_t > 0.0)) throw InvalidParameter("full_2d needs d_l > 0 and d_t > 0");
  DensityField2D f = empty_field(grid, initial, phase, t);
  const std::size_t nx = grid.x.size(), ny = grid.y.size();
  // rows y and -y coincide; fill the upper half when the grid is symmetric
  bool mirrored = true;
  for (std::size_t iy = 0; iy < ny && mirrored; ++iy) {
    mirrored = std::abs(grid.y[iy] + grid.y[ny - 1 - iy]) <= 1e-12 * (1.0 + std::abs(grid.y[iy]));
  }
  const std::size_t rows = mirrored ? (ny + 1) / 2 : ny;
  parallel_for(rows * nx, threads, [&](std::size_t k) {
    const std::size_t iy = k / nx, ix = k % nx;
    f.values[iy * nx + ix] = full_2d_value(initial, phase, grid.x[ix], grid.y[iy], t, kin, tp, opt);
  });
  if (mirrored) {
    for (std::size_t iy = rows; iy < ny; ++iy) {
      std::copy_n(f.values.begin() + static_cast<std::ptrdiff_t>((ny - 1 - iy) * nx), nx,
                  f.values.begin() + static_cast<std::ptrdiff_t>(iy * nx));
    }
  }
  f.origin_atom = giddings::atoms(initial, phase, t, kin).at_0;
  attach_scaled_coordinates(f, kin, tp);
  return f;
}

DensityField2D gaussian_field(const Grid2D& grid, double mean_x, double var_x, double var_y,
                              double mass) {
  if (!(var_x > 0.0 && var_y > 0.0)) throw InvalidParameter("Gaussian field needs variances > 0");
  DensityField2D f = empty_field(grid, Initial::Equilibrium, std::nullopt, 0.0);
  const std::size_t nx = grid.x.size();
  for (std::size_t iy = 0; iy < grid.y.size(); ++iy) {
    const double gy = normal_pdf(grid.y[iy], var_y);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      f.values[iy * nx + ix] = mass * gy * normal_pdf(grid.x[ix] - mean_x, var_x);
    }
  }
  return f;
}

DensityField2D coarsen(const DensityField2D& field, std::size_t fx, std::size_t fy) {
  if (fx == 0 || fy == 0 || field.nx() % fx != 0 || field.ny() % fy != 0) {
    throw InvalidParameter("coarsening factors must divide the grid dimensions");
  }
  DensityField2D c = field;
  const std::size_t nx = field.nx() / fx, ny = field.ny() / fy;
  c.x.assign(nx, 0.0);
  c.y.assign(ny, 0.0);
  c.dx = field.dx * static_cast<double>(fx);
  c.dy = field.dy * static_cast<double>(fy);
  c.values.assign(nx * ny, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    c.x[i] = 0.5 * (field.x[i * fx] + field.x[i * fx + fx - 1]);
  }
  for (std::size_t j = 0; j < ny; ++j) {
    c.y[j] = 0.5 * (field.y[j * fy] + field.y[j * fy + fy - 1]);
  }
  const double inv = 1.0 / static_cast<double>(fx * fy);
  for (std::size_t iy = 0; iy < field.ny(); ++iy) {
    for (std::size_t ix = 0; ix < field.nx(); ++ix) {
      c.values[(iy / fy) * nx + ix / fx] += field.at(ix, iy) * inv;
    }
  }
  c.x_hat.clear();
  c.y_hat.clear();
  return c;
}

double l1_distance(const DensityField2D& a, const DensityField2D& b) {
  if (a.values.size() != b.values.size() || a.nx() != b.nx()) {
    throw InvalidParameter("L1 distance needs fields on the same grid");
  }
  CompensatedSum s;
  for (std::size_t k = 0; k < a.values.size(); ++k) s.add(std::abs(a.values[k] - b.values[k]));
  return s.value() * a.dx * a.dy;
}

std::vector<double> conditional_y_variance(const DensityField2D& field) {
  std::vector<double> out(field.nx(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t ix = 0; ix < field.nx(); ++ix) {
    CompensatedSum m0, m2;
    for (std::size_t iy = 0; iy < field.ny(); ++iy) {
      const double w = field.at(ix, iy);
      m0.add(w);
      m2.add(w * field.y[iy] * field.y[iy]);
    }
    if (m0.value() > 0.0) out[ix] = m2.value() / m0.value();
  }
  return out;
}

void attach_scaled_coordinates(DensityField2D& field, const KineticsParams& kin,
                               const TransportParams& tp) {
  const DerivedQuantities dq = derive(kin, tp);
  field.x_hat.clear();
  field.y_hat.clear();
  if (dq.d_star > 0.0) {
    for (double x : field.x) field.x_hat.push_back(scaled_x(x, field.t, dq));
  }
  if (tp.d_t > 0.0) {
    for (double y : field.y) field.y_hat.push_back(scaled_y(y, field.t, tp.d_t));
  }
}

void write_field_csv(std::ostream& os, const DensityField2D& field) {
  const auto old = os.precision(17);
  os << "# origin_atom=" << field.origin_atom << '\n';
  if (field.line_atom > 0.0) {
    os << "# line_atom x=" << (field.x.empty() ? 0.0 : field.x.back() + 0.5 * field.dx)
       << " weight=" << field.line_atom << " y_variance=" << field.line_atom_y_variance << '\n';
  }
  os << "x,y,x_hat,y_hat,value\n";
  for (std::size_t iy = 0; iy < field.ny(); ++iy) {
    for (std::size_t ix = 0; ix < field.nx(); ++ix) {
      os << field.x[ix] << ',' << field.y[iy] << ',';
      if (!field.x_hat.empty()) os << field.x_hat[ix];
      os << ',';
      if (!field.y_hat.empty()) os << field.y_hat[iy];
      os << ',' << field.at(ix, iy) << '\n';
    }
  }
  os.precision(old);
}

void write_field_binary(std::ostream& os, const DensityField2D& field) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(field.nx()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(field.ny()));
  put<double>(os, field.x.front() - 0.5 * field.dx);
  put<double>(os, field.x.back() + 0.5 * field.dx);
  put<double>(os, field.y.front() - 0.5 * field.dy);
  put<double>(os, field.y.back() + 0.5 * field.dy);
  put<double>(os, field.t);
  for (double v : field.values) put<double>(os, v);
}

DensityField2D read_field_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw InvalidParameter("not a binary grid (bad magic)");
  }
  const auto nx = get<std::uint32_t>(is);
  const auto ny = get<std::uint32_t>(is);
  const double x0 = get<double>(is), x1 = get<double>(is);
  const double y0 = get<double>(is), y1 = get<double>(is);
  const double t = get<double>(is);
  const Grid2D grid = make_grid(x0, x1, nx, y0, y1, ny);
  DensityField2D f = empty_field(grid, Initial::Equilibrium, std::nullopt, t);
  for (double& v : f.values) v = get<double>(is);
  return f;
}

}  // namespace kinplume::planar
