#include <algorithm>
#include <cmath>
#include <ostream>

#include "kinplume/app/run.hpp"
#include "kinplume/condmom.hpp"
#include "kinplume/giddings.hpp"
#include "kinplume/lattice.hpp"
#include "kinplume/moments.hpp"
#include "kinplume/particle.hpp"
#include "kinplume/planar.hpp"
#include "kinplume/quadrature.hpp"
#include "kinplume/stehfest.hpp"
#include "output.hpp"

namespace kinplume::app {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

class Report {
 public:
  explicit Report(std::ostream* progress) : progress_(progress) {}

  void add(std::string name, std::string routes, double measured, double tolerance,
           std::string detail = {}) {
    Check c{std::move(name), std::move(routes), measured, tolerance,
            std::isfinite(measured) && measured <= tolerance, std::move(detail)};
    if (progress_) {
      *progress_ << (c.passed ? "  pass " : "  FAIL ") << c.name << ": " << fmt(measured)
                 << " (tolerance " << fmt(tolerance) << ")\n";
    }
    checks_.push_back(std::move(c));
  }

  // Runs `body`; a thrown library error becomes a failed check instead of aborting.
  template <class F>
  void guard(const std::string& name, const std::string& routes, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      checks_.push_back({name, routes, NAN, 0.0, false, e.what()});
      if (progress_) *progress_ << "  FAIL " << name << ": " << e.what() << '\n';
    }
  }

  std::vector<Check> take() { return std::move(checks_); }

 private:
  std::ostream* progress_;
  std::vector<Check> checks_;
};

// Integral over the whole y axis of an even function, by adaptive quadrature on [0, y_max].
template <class F>
double integrate_even(F&& f, double y_max) {
  return 2.0 * quad::integrate(f, 0.0, y_max, {1e-10, 1e-10, 2000, 8}).value;
}

}  // namespace

std::vector<Check> run_validation(const Config& cfg, std::ostream* progress) {
  const auto& kin = cfg.kinetics;
  const auto& tp = cfg.transport;
  const auto& vs = cfg.validate;
  const double t = vs.t;
  const auto dq = derive(kin, tp);
  Report rep(progress);

  rep.add("stationary_law_sums_to_one", "core", std::abs(dq.pi_f + dq.pi_a - 1.0), 1e-15);

  // particle <-> analytic-moments
  particle::EnsembleOptions eo;
  eo.t = t;
  eo.count = vs.count;
  eo.seed = cfg.seed;
  eo.threads = cfg.threads;
  eo.dims = 2;
  if (progress) *progress << "ensemble of " << vs.count << " particles to t=" << fmt(t) << '\n';
  const auto ens = particle::run_ensemble(kin, tp, eo);
  const auto& st = ens.stats;
  const double n = static_cast<double>(st.count);
  const auto unc = moments::moments_s(kin, tp, t, moments::Conditioning::None, Initial::Equilibrium);
  rep.add("centroid_vs_mean", "particle/analytic",
          std::abs(st.centroid.value - unc.mean) / st.centroid.standard_error, 3.0,
          "standard errors; centroid=" + fmt(st.centroid.value) + " mean=" + fmt(unc.mean));
  rep.add("variance_vs_formula", "particle/analytic", rel(st.variance.value, unc.variance), 0.05,
          "relative; ensemble=" + fmt(st.variance.value) + " formula=" + fmt(unc.variance));
  {
    const double p = occupancy(Initial::Equilibrium, Phase::Free, t, kin);
    const double frac = static_cast<double>(st.phase(Phase::Free).count) / n;
    rep.add("free_fraction", "particle/core", std::abs(frac - p) / std::sqrt(p * (1 - p) / n), 3.0,
            "standard errors");
  }
  for (auto [phase, cond] : {std::pair{Phase::Free, moments::Conditioning::FreeAtT},
                             std::pair{Phase::Adsorbed, moments::Conditioning::AdsorbedAtT}}) {
    const auto xs = particle::select_x(ens.records, std::nullopt, phase);
    const auto est = estimate_mean(xs);
    const auto m = moments::moments_s(kin, tp, t, cond, Initial::Equilibrium);
    rep.add(std::string("conditional_mean_") + std::string(to_string(phase)), "particle/analytic",
            std::abs(est.value - m.mean) / est.standard_error, 3.0, "standard errors");
  }
  {
    // transverse spread of free particles: E[y^2; free] = 2 D_T E[tau; free]
    std::vector<double> y2;
    for (const auto& r : ens.records) {
      y2.push_back(r.final.phase == Phase::Free ? r.final.y * r.final.y : 0.0);
    }
    const auto est = estimate_mean(y2);
    const auto rm = moments::residence_moments(kin, t, Initial::Equilibrium, Phase::Free);
    rep.add("free_transverse_spread", "particle/analytic",
            std::abs(est.value - 2.0 * tp.d_t * rm.first) / est.standard_error, 3.0,
            "standard errors");
  }

  // particle <-> giddings
  rep.guard("residence_ks", "particle/giddings", [&] {
    const giddings::ContinuousCdf cdf(Initial::Equilibrium, std::nullopt, t, kin);
    std::vector<double> taus;
    for (const auto& r : ens.records) {
      if (r.final.tau_free > 0.0 && r.final.tau_free < t) taus.push_back(r.final.tau_free);
    }
    const auto f = [&](double x) { return x <= 0.0 ? 0.0 : x >= t ? 1.0 : cdf.normalized(x); };
    const double d = particle::ks_distance(taus, f, f);
    const double tol = std::max(vs.max_ks, 1.95 / std::sqrt(static_cast<double>(taus.size())));
    rep.add("residence_ks", "particle/giddings", d, tol, "KS distance of the continuous part");
    const auto atoms = giddings::atoms(Initial::Equilibrium, std::nullopt, t, kin);
    double at_t = 0.0;
    for (const auto& r : ens.records) at_t += r.final.tau_free >= t ? 1.0 : 0.0;
    rep.add("never_captured_atom", "particle/giddings",
            std::abs(at_t / n - atoms.at_t) / std::sqrt(atoms.at_t * (1 - atoms.at_t) / n + 1e-300),
            3.0, "standard errors");
  });

  // free -> free conditional variance (corrected formula)
  rep.guard("sigma_ff_vs_ensemble", "particle/analytic", [&] {
    particle::EnsembleOptions fo = eo;
    fo.t = vs.conditional_t;
    fo.initial = Initial::Free;
    fo.dims = 1;
    fo.seed = cfg.seed + 1;
    const auto fe = particle::run_ensemble(kin, tp, fo);
    const auto xs = particle::select_x(fe.records, Phase::Free, Phase::Free);
    const auto est = estimate_variance(xs);
    const double s2 = moments::sigma_ff_sq(kin, tp, vs.conditional_t);
    rep.add("sigma_ff_vs_ensemble", "particle/analytic",
            std::abs(est.value - s2) / est.standard_error, 3.0, "standard errors");
  });
  rep.guard("sigma_ff_slope", "analytic/core", [&] {
    const double big = 60.0 / kin.total_rate();
    const double slope = moments::sigma_ff_sq(kin, tp, big + 1.0) - moments::sigma_ff_sq(kin, tp, big);
    rep.add("sigma_ff_slope", "analytic/core", rel(slope, 2.0 * dq.d_e), 1e-3, "relative");
  });

  // lattice <-> analytic
  rep.guard("lattice_discrete_exact", "lattice/analytic", [&] {
    const long steps = vs.lattice_steps;
    const double dt = t / static_cast<double>(steps);
    const auto lc = lattice::make_config(tp, kin, dt, t);
    auto state = lattice::init_lattice(lc, Initial::Equilibrium, steps);
    lattice::advance(state, lc, steps);
    const auto lm = lattice::lattice_moments(state, lc);
    const auto dm = moments::discrete_moments_s(DiscreteKinetics::from_rates(kin, t, steps), tp);
    rep.add("lattice_discrete_exact", "lattice/analytic",
            std::max(rel(lm.total.mean, dm.mean), rel(lm.total.variance, dm.variance)), 1e-10,
            "relative");
    rep.add("lattice_mass", "lattice", std::abs(state.mass() - 1.0), 1e-12);
    rep.add("lattice_continuous_variance", "lattice/analytic", rel(lm.total.variance, unc.variance),
            0.02, "relative, dt=" + fmt(dt));
  });

  // giddings <-> core <-> analytic
  rep.guard("residence_conservation", "giddings/core", [&] {
    double cons = 0.0, occ = 0.0;
    for (Initial i : {Initial::Free, Initial::Adsorbed}) {
      cons = std::max(cons, std::abs(giddings::numeric_moments(i, std::nullopt, t, kin).probability - 1.0));
      for (Phase j : {Phase::Free, Phase::Adsorbed}) {
        occ = std::max(occ, std::abs(giddings::numeric_moments(i, j, t, kin).probability -
                                     occupancy(i, j, t, kin)));
      }
    }
    rep.add("residence_conservation", "giddings", cons, 1e-8);
    rep.add("residence_occupancy", "giddings/core", occ, 1e-8);
    const auto num = giddings::numeric_moments(Initial::Equilibrium, std::nullopt, t, kin);
    const auto ana = moments::residence_moments(kin, t, Initial::Equilibrium);
    rep.add("residence_moments", "giddings/analytic",
            std::max(rel(num.first, ana.first), rel(num.second, ana.second)), 1e-8, "relative");
  });

  // planar <-> giddings
  rep.guard("transverse_marginal", "planar/giddings", [&] {
    const auto grid = planar::default_transverse_grid(t, tp.v, tp.d_t, 120, 240);
    const auto field =
        planar::transverse_only(Initial::Equilibrium, Phase::Free, t, kin, tp.v, tp.d_t, grid, cfg.threads);
    const auto prof = giddings::profile_1d(t, kin, tp.v, grid.x, Initial::Equilibrium);
    const double peak = *std::max_element(prof.n_f.begin(), prof.n_f.end());
    double worst = 0.0;
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
      if (prof.n_f[ix] < 1e-8 * peak) continue;
      double col = 0.0;
      for (std::size_t iy = 0; iy < grid.y.size(); ++iy) col += field.at(ix, iy);
      worst = std::max(worst, rel(col * field.dy, prof.n_f[ix]));
    }
    rep.add("transverse_marginal", "planar/giddings", worst, 1e-6, "relative");
  });
  rep.guard("full_2d_mass", "planar/core", [&] {
    const auto grid = planar::default_full_grid(t, tp, 240, 120);
    const auto field = planar::full_2d(Initial::Free, Phase::Free, t, kin, tp, grid,
                                       {1e-10, 1e-10, 4000, 4}, cfg.threads);
    rep.add("full_2d_mass", "planar/core",
            std::abs(field.grid_mass() - occupancy(Initial::Free, Phase::Free, t, kin)), 1e-6);
  });

  // condmom <-> core <-> analytic, and Laplace route <-> direct quadrature
  rep.guard("x_moment_mass", "condmom/core", [&] {
    const double y_max = 12.0 * std::sqrt(2.0 * tp.d_t * t);
    const double m0 = integrate_even(
        [&](double y) { return condmom::x_moment_given_y(0, Phase::Free, y, t, kin, tp); }, y_max);
    const double m1 = integrate_even(
        [&](double y) { return condmom::x_moment_given_y(1, Phase::Free, y, t, kin, tp); }, y_max);
    rep.add("x_moment_mass", "condmom/core",
            std::abs(m0 - occupancy(Initial::Equilibrium, Phase::Free, t, kin)), 1e-6);
    const auto rm = moments::residence_moments(kin, t, Initial::Equilibrium, Phase::Free);
    rep.add("x_first_moment_identity", "condmom/analytic", rel(m1, tp.v * rm.first), 1e-4,
            "relative");
  });
  rep.guard("stehfest_vs_direct", "condmom/planar", [&] {
    std::vector<double> xs;
    for (int k = 0; k <= 24; ++k) xs.push_back(-1.0 + (tp.v * t + 3.0) * k / 24.0);
    std::vector<condmom::DirectMoments> direct(xs.size());
    double peak = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      direct[k] = condmom::direct_y_moments_given_x(Phase::Free, xs[k], t, kin, tp);
      peak = std::max(peak, direct[k].m0);
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (direct[k].m0 < 1e-6 * peak) continue;
      const double m0 = condmom::invert_m0_free(xs[k], t, kin, tp);
      const double m2 = condmom::invert_m2_free(xs[k], t, kin, tp);
      worst = std::max({worst, rel(m0, direct[k].m0), rel(m2 / m0, direct[k].m2 / direct[k].m0)});
    }
    rep.add("stehfest_vs_direct", "condmom/planar", worst, 0.01, "relative, M0 and M2/M0");
  });
  rep.guard("stehfest_pairs", "laplace", [&] {
    const double tt = 1.0;
    const double a = laplace::stehfest_invert([](double s) { return 1.0 / s; }, tt, 16);
    const double b = laplace::stehfest_invert([](double s) { return 1.0 / (s * s); }, tt, 16);
    const double c = laplace::stehfest_invert([](double s) { return 1.0 / (s + 1.0); }, tt, 16);
    rep.add("stehfest_pairs", "laplace",
            std::max({rel(a, 1.0), rel(b, tt), rel(c, std::exp(-tt))}), 1e-6, "N=16, relative");
  });
  return rep.take();
}

}  // namespace kinplume::app
