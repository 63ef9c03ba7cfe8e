#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "kinplume/contour.hpp"
#include "kinplume/giddings.hpp"
#include "kinplume/planar.hpp"

using namespace kinplume;
using namespace kinplume::planar;

namespace {

const quad::Options kTight{1e-10, 1e-10, 4000, 4};

}  // namespace

TEST_CASE("transverse-only field: conditional variance is 2 D_T x / v") {
  const KineticsParams kin{1.0, 1.0};
  const double v = 2.0, d_t = 0.1, t = 3.0;
  const auto grid = default_transverse_grid(t, v, d_t, 60, 400);
  const auto f = transverse_only(Initial::Equilibrium, Phase::Free, t, kin, v, d_t, grid);
  const auto cv = conditional_y_variance(f);
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    const double expected = 2.0 * d_t * grid.x[ix] / v;
    if (std::sqrt(expected) < 3.0 * grid.dy) continue;
    CHECK(cv[ix] == doctest::Approx(expected).epsilon(1e-6));
  }
  CHECK(transverse_only_value(Initial::Equilibrium, Phase::Free, 0.7, 0.2, t, kin, v, d_t) > 0.0);
}

TEST_CASE("transverse-only field: zero beyond the advection front and symmetric in y") {
  const KineticsParams kin{1.0, 2.0};
  const double v = 1.0, d_t = 0.2, t = 2.0;
  const auto grid = make_grid(-0.5, 3.0, 70, -2.0, 2.0, 41);
  const auto f = transverse_only(Initial::Free, std::nullopt, t, kin, v, d_t, grid);
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    for (std::size_t iy = 0; iy < f.ny(); ++iy) {
      if (f.x[ix] > v * t || f.x[ix] < 0.0) CHECK(f.at(ix, iy) == 0.0);
      CHECK(f.at(ix, iy) == doctest::Approx(f.at(ix, f.ny() - 1 - iy)).epsilon(1e-12));
      CHECK(f.at(ix, iy) >= 0.0);
    }
  }
  CHECK(f.line_atom == doctest::Approx(std::exp(-kin.lambda * t)));
  CHECK(f.line_atom_y_variance == doctest::Approx(2 * d_t * t));
}

TEST_CASE("transverse-only field: y marginal recovers the 1D profile") {
  const KineticsParams kin{1.0, 1.0};
  const double v = 1.0, d_t = 0.05, t = 2.0;
  const auto grid = default_transverse_grid(t, v, d_t, 50, 300);
  const auto f = transverse_only(Initial::Equilibrium, Phase::Adsorbed, t, kin, v, d_t, grid);
  const auto p = giddings::profile_1d(t, kin, v, grid.x);
  for (std::size_t ix = 5; ix < grid.x.size(); ++ix) {
    double col = 0.0;
    for (std::size_t iy = 0; iy < grid.y.size(); ++iy) col += f.at(ix, iy);
    CHECK(col * f.dy == doctest::Approx(p.n_a[ix]).epsilon(1e-6));
  }
  CHECK(f.origin_atom == doctest::Approx(kin.pi_adsorbed() * std::exp(-kin.mu * t)));
}

TEST_CASE("full field without kinetics is the advected Gaussian") {
  const KineticsParams kin{0.0, 1.0};
  const TransportParams tp{1.0, 0.2, 0.05};
  const double t = 2.0;
  const auto grid = default_full_grid(t, tp, 80, 40);
  const auto f = full_2d(Initial::Free, Phase::Free, t, kin, tp, grid, kTight);
  const auto g = gaussian_field(grid, tp.v * t, 2 * tp.d_l * t, 2 * tp.d_t * t, 1.0);
  CHECK(l1_distance(f, g) <= 1e-10);
}

TEST_CASE("full field tends to the transverse-only field as D_L vanishes") {
  const KineticsParams kin{1.0, 1.0};
  const double v = 1.0, d_t = 0.01, t = 5.0;
  const TransportParams tp{v, 1e-4 * d_t, d_t};
  const auto grid = default_transverse_grid(t, v, d_t, 200, 100);
  const auto a = transverse_only(Initial::Free, Phase::Adsorbed, t, kin, v, d_t, grid);
  const auto b = full_2d(Initial::Free, Phase::Adsorbed, t, kin, tp, grid, kTight);
  CHECK(l1_distance(a, b) <= 1e-4);
}

TEST_CASE("full field mass matches the occupancy") {
  const KineticsParams kin{1.0, 2.0};
  const TransportParams tp{1.0, 0.1, 0.1};
  const double t = 2.0;
  // Paths with a short free time pile up near the origin (log singularity), where the
  // midpoint rule converges as h^2; the grid integral is Richardson-extrapolated from two grids.
  const auto coarse = default_full_grid(t, tp, 240, 120);
  const auto fine = default_full_grid(t, tp, 480, 240);
  for (Initial i : {Initial::Free, Initial::Adsorbed}) {
    for (Phase j : {Phase::Free, Phase::Adsorbed}) {
      const auto a = full_2d(i, j, t, kin, tp, coarse, kTight);
      const auto b = full_2d(i, j, t, kin, tp, fine, kTight);
      const double extrapolated = (4.0 * b.grid_mass() - a.grid_mass()) / 3.0;
      CHECK(std::abs(extrapolated + b.origin_atom - occupancy(i, j, t, kin)) <= 1e-6);
      if (i == Initial::Free && j == Phase::Free) {
        CHECK(std::abs(a.grid_mass() - occupancy(i, j, t, kin)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("cigar shape: conditional y-variance increases along the plume body") {
  const KineticsParams kin{0.2, 0.2};
  const TransportParams tp{1.0, 0.5, 0.1};
  const double t = 20.0;
  const auto grid = default_full_grid(t, tp, 200, 100);
  const auto f = full_2d(Initial::Equilibrium, std::nullopt, t, kin, tp, grid, kTight);
  const auto cv = conditional_y_variance(f);
  std::vector<double> col(f.nx(), 0.0);
  double total = 0.0;
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    for (std::size_t iy = 0; iy < f.ny(); ++iy) col[ix] += f.at(ix, iy);
    total += col[ix];
  }
  // body: between the 5% and 95% quantiles of the x marginal
  std::size_t lo = 0, hi = 0;
  double run = 0.0;
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    run += col[ix];
    if (run < 0.05 * total) lo = ix + 1;
    if (run <= 0.95 * total) hi = ix;
  }
  REQUIRE(hi > lo + 50);
  for (std::size_t ix = lo + 1; ix <= hi; ++ix) CHECK(cv[ix] > cv[ix - 1]);
}

TEST_CASE("free phase matches the kinetics-free Gaussian at early times") {
  const KineticsParams kin{1.0, 1.0};
  const TransportParams tp{1.0, 0.1, 0.05};
  const double t = 0.005;
  const auto grid = default_full_grid(t, tp, 160, 80);
  const auto f = full_2d(Initial::Equilibrium, Phase::Free, t, kin, tp, grid, kTight);
  const auto g = gaussian_field(grid, tp.v * t, 2 * tp.d_l * t, 2 * tp.d_t * t, kin.pi_free());
  CHECK(l1_distance(f, g) <= 0.02);
}

TEST_CASE("late times: Gaussian again, with elliptic contours") {
  const KineticsParams kin{0.2, 0.2};
  const TransportParams tp{1.0, 0.5, 0.1};
  const double t = 150.0;
  const auto dq = derive(kin, tp);
  const double r = dq.require_retardation();
  const double dx_eff = tp.d_l / r + dq.d_star, dy_eff = tp.d_t / r;
  const auto grid = default_full_grid(t, tp, 240, 120);

  auto free = full_2d(Initial::Equilibrium, Phase::Free, t, kin, tp, grid, kTight);
  const auto g = gaussian_field(grid, dq.v_star * t, 2 * dx_eff * t, 2 * dy_eff * t, kin.pi_free());
  CHECK(l1_distance(free, g) <= 0.05);

  // two-sigma contour of the asymptotic law, in scaled coordinates
  const double level = std::exp(-2.0);
  const double ax = 2.0 * std::sqrt(dx_eff / dq.d_star), ay = 2.0 * std::sqrt(dy_eff / tp.d_t);
  const std::vector<contour::Polyline> ellipse{contour::ellipse(0.0, 0.0, ax, ay)};
  auto total = full_2d(Initial::Equilibrium, std::nullopt, t, kin, tp, grid, kTight);
  for (auto* field : {&free, &total}) {
    attach_scaled_coordinates(*field, kin, tp);
    const double mass = field == &free ? kin.pi_free() : 1.0;
    const double peak = mass / (2 * std::numbers::pi * std::sqrt(4 * dx_eff * dy_eff * t * t));
    const std::vector<double> levels{level * peak};
    const auto cs = contour::contour_export(*field, levels);
    REQUIRE(cs.lines.size() == 1);
    CHECK(contour::is_convex(cs.lines[0], 1e-3));
    CHECK(contour::hausdorff_distance(cs.lines, ellipse) <= 0.05 * ax);
  }
}

TEST_CASE("breakpoints bracket the advective residence time") {
  const auto b = residence_breakpoints(3.0, 10.0, {1.0, 0.1, 0.1});
  CHECK(std::is_sorted(b.begin(), b.end()));
  CHECK(b.front() >= 0.0);
  CHECK(b.back() <= 10.0);
  CHECK(std::find(b.begin(), b.end(), 3.0) != b.end());
}

TEST_CASE("coarsening preserves mass") {
  const auto grid = make_grid(-3, 3, 60, -2, 2, 40);
  const auto g = gaussian_field(grid, 0.0, 0.5, 0.3, 1.0);
  const auto c = coarsen(g, 4, 5);
  CHECK(c.nx() == 15);
  CHECK(c.ny() == 8);
  CHECK(c.grid_mass() == doctest::Approx(g.grid_mass()).epsilon(1e-14));
  CHECK_THROWS_AS(coarsen(g, 7, 1), InvalidParameter);
}

TEST_CASE("binary field round trip") {
  const auto grid = make_grid(-1, 2, 7, -1, 1, 5);
  auto g = gaussian_field(grid, 0.5, 0.4, 0.2, 0.8);
  g.t = 3.5;
  std::stringstream ss;
  write_field_binary(ss, g);
  CHECK(ss.str().substr(0, 7) == "KPGRID1");
  const auto back = read_field_binary(ss);
  CHECK(back.nx() == 7);
  CHECK(back.ny() == 5);
  CHECK(back.t == 3.5);
  CHECK(back.values == g.values);
  CHECK(back.x.front() == doctest::Approx(g.x.front()).epsilon(1e-14));
  CHECK(back.y.back() == doctest::Approx(g.y.back()).epsilon(1e-14));
  std::stringstream bad("NOTAGRID");
  CHECK_THROWS(read_field_binary(bad));
}

TEST_CASE("field csv") {
  const auto grid = make_grid(0, 1, 2, 0, 1, 2);
  const auto g = gaussian_field(grid, 0.5, 0.4, 0.2, 1.0);
  std::ostringstream os;
  write_field_csv(os, g);
  CHECK(os.str().rfind("# origin_atom=", 0) == 0);
  CHECK(os.str().find("\nx,y,x_hat,y_hat,value\n") != std::string::npos);
}
