#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "kinplume/app/run.hpp"
#include "kinplume/condmom.hpp"
#include "kinplume/contour.hpp"
#include "kinplume/giddings.hpp"
#include "kinplume/lattice.hpp"
#include "kinplume/parallel.hpp"
#include "kinplume/moments.hpp"
#include "kinplume/particle.hpp"
#include "kinplume/planar.hpp"
#include "output.hpp"

namespace kinplume::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string time_tag(double t) { return "t" + fmt(t); }

std::string phase_tag(std::optional<Phase> p) {
  return p ? std::string(to_string(*p)) : std::string("total");
}

// ---- simulate ------------------------------------------------------------------------------

void run_simulate(const Config& cfg, Output& out, std::ostream& log) {
  const auto& s = cfg.simulate;
  particle::EnsembleOptions opts;
  opts.t = s.t;
  opts.count = s.count;
  opts.initial = s.initial;
  opts.seed = cfg.seed;
  opts.dims = s.dims;
  opts.threads = cfg.threads;
  opts.scheme = s.scheme;
  opts.steps = s.steps;
  opts.batches = s.batches;
  const auto res = particle::run_ensemble(cfg.kinetics, cfg.transport, opts);
  const auto& st = res.stats;
  log << "simulate: " << st.count << " particles to t=" << fmt(s.t) << '\n';

  const auto ref = moments::moments_s(cfg.kinetics, cfg.transport, s.t,
                                      moments::Conditioning::None, s.initial);
  const double p_free = occupancy(s.initial, Phase::Free, s.t, cfg.kinetics);
  const double n = static_cast<double>(st.count);
  const std::vector<std::string> meta = {
      "t=" + fmt(s.t) + " count=" + std::to_string(s.count) + " initial=" +
      std::string(to_string(s.initial)) + " dims=" + std::to_string(s.dims) + " scheme=" +
      (s.scheme == particle::Scheme::Continuous ? "continuous" : "discrete") +
      " batches=" + std::to_string(s.batches)};

  auto os = out.open("simulate_stats.csv", meta);
  os << "quantity,value,standard_error,reference\n";
  const auto row = [&](const std::string& name, double v, double se, double r) {
    os << name << ',' << fmt(v) << ',' << fmt(se) << ',' << fmt(r) << '\n';
  };
  row("centroid", st.centroid.value, st.centroid.standard_error, ref.mean);
  row("variance", st.variance.value, st.variance.standard_error, ref.variance);
  row("skewness", st.skewness.value, st.skewness.standard_error, kNaN);
  row("kurtosis", st.kurtosis.value, st.kurtosis.standard_error, kNaN);
  const double frac = static_cast<double>(st.phase(Phase::Free).count) / n;
  row("free_fraction", frac, std::sqrt(frac * (1.0 - frac) / n), p_free);
  row("tau_free_mean", st.tau_free.mean, std::sqrt(st.tau_free.variance / n), kNaN);
  for (Phase p : {Phase::Free, Phase::Adsorbed}) {
    const auto& ps = st.phase(p);
    const std::string tag(to_string(p));
    row(tag + "_count", static_cast<double>(ps.count), kNaN, kNaN);
    row(tag + "_mean", ps.x.mean, kNaN, kNaN);
    row(tag + "_variance", ps.x.variance, kNaN, kNaN);
  }
  if (s.dims == 2) {
    row("y_variance", st.y.variance, kNaN, 2.0 * cfg.transport.d_t * st.tau_free.mean);
    row("cross_moment", st.cross_moment, kNaN, 0.0);
  }

  const auto hist = particle::free_residence_histogram(res.records, s.histogram_bins, s.t);
  std::optional<giddings::ContinuousCdf> cdf;
  try {
    cdf.emplace(s.initial, std::nullopt, s.t, cfg.kinetics);
  } catch (const Error&) {
  }
  const auto atoms = giddings::atoms(s.initial, std::nullopt, s.t, cfg.kinetics);
  auto hs = out.open("simulate_residence.csv",
                     {"atom tau=0 count=" + fmt(hist.atom_at_0) + " expected=" + fmt(n * atoms.at_0),
                      "atom tau=t count=" + fmt(hist.atom_at_t) + " expected=" + fmt(n * atoms.at_t)});
  hs << "tau_lo,tau_hi,count,expected\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    const double lo = hist.edges[k], hi = hist.edges[k + 1];
    const double expected = cdf ? n * (cdf->integral(hi) - cdf->integral(lo)) : kNaN;
    hs << fmt(lo) << ',' << fmt(hi) << ',' << fmt(hist.counts[k]) << ',' << fmt(expected) << '\n';
  }

  if (s.write_records) {
    auto rs = out.open("simulate_records.csv", meta);
    particle::write_records_csv(rs, res.records);
  }
}

// ---- lattice -------------------------------------------------------------------------------

void run_lattice(const Config& cfg, Output& out, std::ostream& log) {
  const auto& s = cfg.lattice;
  const long steps = std::lround(s.t / s.dt);
  if (steps < 1) throw ConfigError("lattice.t", "shorter than one step");
  const auto lc = lattice::make_config(cfg.transport, cfg.kinetics, s.dt, s.t, s.half_width, s.c);
  auto state = lattice::init_lattice(lc, s.initial, steps);
  log << "lattice: " << steps << " steps on " << 2 * lc.half_width + 1 << " cells\n";
  const std::vector<std::string> meta = {
      "dt=" + fmt(lc.dt) + " c=" + fmt(lc.c) + " dx=" + fmt(lc.dx) + " beta=" + fmt(lc.beta) +
      " delta=" + fmt(lc.delta) + " alpha=" + fmt(lc.alpha) +
      " half_width=" + std::to_string(lc.half_width) + " initial=" +
      std::string(to_string(s.initial))};

  const bool conditioned = cfg.kinetics.lambda > 0.0 && cfg.kinetics.mu > 0.0;
  auto ms = out.open("lattice_moments.csv", meta);
  ms << "t,step,phase,mass,mean,variance,skewness,kurtosis,continuous_mean,continuous_variance\n";
  for (double ts : s.snapshots) {
    const long target = std::lround(ts / s.dt);
    lattice::advance(state, lc, target - state.n);
    const double t_now = static_cast<double>(state.n) * s.dt;
    const auto lm = lattice::lattice_moments(state, lc);
    const auto emit = [&](const char* tag, const lattice::PhaseMoments& m,
                          std::optional<moments::Conditioning> cond) {
      double mean = kNaN, var = kNaN;
      if (cond && m.mass > 0.0) {
        const auto r = moments::moments_s(cfg.kinetics, cfg.transport, t_now, *cond, s.initial);
        mean = r.mean;
        var = r.variance;
      }
      ms << fmt(t_now) << ',' << state.n << ',' << tag << ',' << fmt(m.mass) << ','
         << fmt(m.mean) << ',' << fmt(m.variance) << ',' << fmt(m.skewness) << ','
         << fmt(m.kurtosis) << ',' << fmt(mean) << ',' << fmt(var) << '\n';
    };
    using C = moments::Conditioning;
    emit("free", lm.free, conditioned ? std::optional(C::FreeAtT) : std::nullopt);
    emit("adsorbed", lm.adsorbed, conditioned ? std::optional(C::AdsorbedAtT) : std::nullopt);
    emit("total", lm.total, C::None);
    auto ss = out.open("lattice_snapshot_" + time_tag(ts) + ".csv", meta);
    lattice::write_snapshot_csv(ss, state, lc);
  }
}

// ---- moments -------------------------------------------------------------------------------

void run_moments(const Config& cfg, Output& out, std::ostream& log) {
  const auto& s = cfg.moments;
  std::vector<moments::MomentSet> curve;
  for (auto cond : s.conditionings) {
    for (auto init : s.initials) {
      for (double t : s.times) {
        curve.push_back(moments::moments_s(cfg.kinetics, cfg.transport, t, cond, init));
      }
    }
  }
  log << "moments: " << curve.size() << " rows\n";
  auto os = out.open("moments.csv");
  moments::write_moment_curve_csv(os, curve);

  if (cfg.kinetics.lambda > 0.0 && cfg.kinetics.mu > 0.0) {
    auto fs = out.open("moments_sigma_ff.csv", {"free at 0 and free at t; slope -> 2 d_e"});
    fs << "t,sigma_ff_sq,conditional_variance\n";
    for (double t : s.times) {
      const double cv = t > 0.0 ? moments::moments_s(cfg.kinetics, cfg.transport, t,
                                                     moments::Conditioning::FreeAtT, Initial::Free)
                                      .variance
                                : 0.0;
      fs << fmt(t) << ',' << fmt(moments::sigma_ff_sq(cfg.kinetics, cfg.transport, t)) << ','
         << fmt(cv) << '\n';
    }
  }
}

// ---- plume1d -------------------------------------------------------------------------------

void run_plume1d(const Config& cfg, Output& out, std::ostream& log) {
  const auto& s = cfg.plume1d;
  const double v = cfg.transport.v;
  auto sum = out.open("plume1d_summary.csv", {"initial=" + std::string(to_string(s.initial))});
  sum << "t,regime,free_survival,adsorbed_survival,free_pulse,adsorbed_pulse,gaussian_l1\n";
  const bool has_gaussian = derive(cfg.kinetics, cfg.transport).d_star > 0.0;
  for (double t : s.times) {
    const auto grid = giddings::uniform_grid(0.0, v * t, s.points);
    const auto prof = giddings::profile_1d(t, cfg.kinetics, v, grid, s.initial);
    const auto reg = giddings::regime_check(t, cfg.kinetics);
    const double l1 =
        has_gaussian ? giddings::gaussian_l1_distance(t, cfg.kinetics, v, s.initial) : kNaN;
    auto os = out.open("plume1d_" + time_tag(t) + ".csv",
                       {"t=" + fmt(t) + " initial=" + std::string(to_string(s.initial)) +
                        " regime=" + std::string(giddings::to_string(reg.regime))});
    giddings::write_profile_csv(os, prof);
    sum << fmt(t) << ',' << giddings::to_string(reg.regime) << ',' << fmt(reg.free_survival) << ','
        << fmt(reg.adsorbed_survival) << ',' << fmt(reg.free_pulse) << ','
        << fmt(reg.adsorbed_pulse) << ',' << fmt(l1) << '\n';
    log << "plume1d: t=" << fmt(t) << " regime " << giddings::to_string(reg.regime) << '\n';
  }
}

// ---- plume2d -------------------------------------------------------------------------------

planar::Grid2D plume2d_grid(const Config& cfg, double t) {
  const auto& s = cfg.plume2d;
  const auto& tp = cfg.transport;
  planar::Grid2D g = s.mode == Plume2dSettings::Mode::TransverseOnly
                         ? planar::default_transverse_grid(t, tp.v, tp.d_t, s.nx, s.ny)
                         : planar::default_full_grid(t, tp, s.nx, s.ny);
  if (s.x_range || s.y_range) {
    const double x0 = s.x_range ? s.x_range->first : g.x.front() - 0.5 * g.dx;
    const double x1 = s.x_range ? s.x_range->second : g.x.back() + 0.5 * g.dx;
    const double y0 = s.y_range ? s.y_range->first : g.y.front() - 0.5 * g.dy;
    const double y1 = s.y_range ? s.y_range->second : g.y.back() + 0.5 * g.dy;
    g = planar::make_grid(x0, x1, s.nx, y0, y1, s.ny);
  }
  return g;
}

void run_plume2d(const Config& cfg, Output& out, std::ostream& log, std::ostream& err) {
  const auto& s = cfg.plume2d;
  const auto& tp = cfg.transport;
  const bool full = s.mode == Plume2dSettings::Mode::Full;
  const std::string mode = full ? "full" : "transverse_only";
  auto sum = out.open("plume2d_summary.csv", {"mode=" + mode});
  sum << "t,initial,phase,grid_mass,origin_atom,line_atom,occupancy,max_value\n";
  for (double t : s.times) {
    const auto grid = plume2d_grid(cfg, t);
    for (auto init : s.initials) {
      for (auto phase : s.phases) {
        quad::Options opt{s.abs_tol, s.abs_tol, 4000, 4};
        auto field = full ? planar::full_2d(init, phase, t, cfg.kinetics, tp, grid, opt, cfg.threads)
                          : planar::transverse_only(init, phase, t, cfg.kinetics, tp.v, tp.d_t,
                                                    grid, cfg.threads);
        const std::string tag = mode + "_" + std::string(to_string(init)) + "_" +
                                phase_tag(phase) + "_" + time_tag(t);
        const std::vector<std::string> meta = {
            "mode=" + mode + " t=" + fmt(t) + " initial=" + std::string(to_string(init)) +
            " phase=" + phase_tag(phase) + " nx=" + std::to_string(grid.x.size()) +
            " ny=" + std::to_string(grid.y.size())};
        {
          auto os = out.open("plume2d_" + tag + ".csv", meta);
          planar::write_field_csv(os, field);
        }
        if (s.binary) {
          auto bs = out.open_raw("plume2d_" + tag + ".kpg", true);
          planar::write_field_binary(bs, field);
        }
        const double peak = *std::max_element(field.values.begin(), field.values.end());
        std::vector<double> levels = s.levels;
        if (levels.empty()) {
          for (double f : s.level_fractions) levels.push_back(f * peak);
        }
        const auto contours = contour::contour_export(field, levels, s.scaled_contours);
        for (const auto& w : contours.warnings) err << "warning: " << tag << ": " << w << '\n';
        {
          auto cs = out.open("contours_" + tag + ".csv",
                             {meta[0], std::string("coordinates=") +
                                           (s.scaled_contours && !field.x_hat.empty() ? "scaled" : "physical")});
          contour::write_contours_csv(cs, contours);
        }
        const double occ =
            phase ? occupancy(init, *phase, t, cfg.kinetics) : 1.0;
        sum << fmt(t) << ',' << to_string(init) << ',' << phase_tag(phase) << ','
            << fmt(field.grid_mass()) << ',' << fmt(field.origin_atom) << ','
            << fmt(field.line_atom) << ',' << fmt(occ) << ',' << fmt(peak) << '\n';
        log << "plume2d: " << tag << " done\n";
      }
    }
  }
}

// ---- condmom -------------------------------------------------------------------------------

void run_condmom(const Config& cfg, Output& out, std::ostream& log) {
  const auto& s = cfg.condmom;
  const auto& tp = cfg.transport;
  for (double t : s.times) {
    for (Phase phase : s.phases) {
      for (int order : s.orders) {
        const auto curve = condmom::x_moments_given_y(order, phase, s.y, t, cfg.kinetics, tp,
                                                      s.normalized && order > 0, cfg.threads);
        auto os = out.open("condmom_xmoment_" + std::string(to_string(phase)) + "_n" +
                               std::to_string(order) + "_" + time_tag(t) + ".csv",
                           {"x-moment given y: order=" + std::to_string(order) +
                            " phase=" + std::string(to_string(phase)) + " t=" + fmt(t) +
                            " normalized=" + (curve.normalized ? "true" : "false")});
        condmom::write_curve_csv(os, curve);
      }
    }
    log << "condmom: x-moments at t=" << fmt(t) << " done\n";
    if (s.x.empty()) continue;

    const auto ratio = condmom::transverse_variance_ratio(s.x, t, cfg.kinetics, tp, s.n_terms,
                                                          false, cfg.threads);
    std::vector<std::string> meta = {"y-moments given x: t=" + fmt(t) +
                                     " n_terms=" + std::to_string(s.n_terms) +
                                     " implied_peclet=" + fmt(condmom::implied_peclet(tp))};
    {
      auto os = out.open("condmom_ratio_" + time_tag(t) + ".csv", meta);
      condmom::write_curve_csv(os, ratio);
    }
    const std::size_t n = s.x.size();
    std::vector<double> m0f(n), m0a(n), m2f(n), m2a(n), d0(n, kNaN), d2(n, kNaN);
    parallel_for(n, cfg.threads, [&](std::size_t k) {
      m0f[k] = condmom::invert_y_moment(0, Phase::Free, s.x[k], t, cfg.kinetics, tp, s.n_terms);
      m0a[k] = condmom::invert_y_moment(0, Phase::Adsorbed, s.x[k], t, cfg.kinetics, tp, s.n_terms);
      m2f[k] = condmom::invert_y_moment(2, Phase::Free, s.x[k], t, cfg.kinetics, tp, s.n_terms);
      m2a[k] = condmom::invert_y_moment(2, Phase::Adsorbed, s.x[k], t, cfg.kinetics, tp, s.n_terms);
      if (s.direct_check) {
        const auto d = condmom::direct_y_moments_given_x(Phase::Free, s.x[k], t, cfg.kinetics, tp);
        d0[k] = d.m0;
        d2[k] = d.m2;
      }
    });
    const auto atom = giddings::atoms(Initial::Equilibrium, Phase::Adsorbed, t, cfg.kinetics);
    meta.push_back("adsorbed delta(x) weight=" + fmt(atom.at_0));
    auto os = out.open("condmom_ymoment_" + time_tag(t) + ".csv", meta);
    os << "x,m0_free,m0_adsorbed,m0_total,m2_free,m2_adsorbed,ratio_free,direct_m0_free,"
          "direct_m2_free\n";
    for (std::size_t k = 0; k < n; ++k) {
      os << fmt(s.x[k]) << ',' << fmt(m0f[k]) << ',' << fmt(m0a[k]) << ',' << fmt(m0f[k] + m0a[k])
         << ',' << fmt(m2f[k]) << ',' << fmt(m2a[k]) << ',' << fmt(ratio.values[k]) << ','
         << fmt(d0[k]) << ',' << fmt(d2[k]) << '\n';
    }
    log << "condmom: y-moments at t=" << fmt(t) << " done\n";
  }
}

// ---- validate ------------------------------------------------------------------------------

std::string json_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o;
}

std::string json_number(double v) { return std::isfinite(v) ? fmt(v) : "null"; }

int run_validate(const Config& cfg, Output& out, std::ostream& log) {
  const auto checks = run_validation(cfg, &log);
  std::size_t failed = 0;
  {
    auto os = out.open("validate_report.txt");
    for (const auto& c : checks) {
      os << (c.passed ? "PASS " : "FAIL ") << c.name << " [" << c.routes << "] measured="
         << fmt(c.measured) << " tolerance=" << fmt(c.tolerance);
      if (!c.detail.empty()) os << " (" << c.detail << ")";
      os << '\n';
      if (!c.passed) ++failed;
    }
    os << (failed == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failed)) << '\n';
  }
  auto js = out.open_raw("validate_report.json");
  js << "{\n  \"version\": \"" << kVersion << "\",\n  \"seed\": " << cfg.seed
     << ",\n  \"passed\": " << (failed == 0 ? "true" : "false") << ",\n  \"checks\": [\n";
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const auto& c = checks[k];
    js << "    {\"name\": \"" << json_escape(c.name) << "\", \"routes\": \"" << json_escape(c.routes)
       << "\", \"measured\": " << json_number(c.measured)
       << ", \"tolerance\": " << json_number(c.tolerance)
       << ", \"passed\": " << (c.passed ? "true" : "false") << ", \"detail\": \""
       << json_escape(c.detail) << "\"}" << (k + 1 < checks.size() ? "," : "") << '\n';
  }
  js << "  ]\n}\n";
  log << "validate: " << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitValidationFailed;
}

}  // namespace

int run_experiment(Experiment experiment, const Config& cfg, const RunOptions& options,
                   std::ostream& out, std::ostream& err) {
  Output output(experiment, cfg, options);
  int status = kExitOk;
  switch (experiment) {
    case Experiment::Simulate: run_simulate(cfg, output, out); break;
    case Experiment::Lattice: run_lattice(cfg, output, out); break;
    case Experiment::Moments: run_moments(cfg, output, out); break;
    case Experiment::Plume1d: run_plume1d(cfg, output, out); break;
    case Experiment::Plume2d: run_plume2d(cfg, output, out, err); break;
    case Experiment::Condmom: run_condmom(cfg, output, out); break;
    case Experiment::Validate: status = run_validate(cfg, output, out); break;
  }
  for (const auto& p : output.written()) out << "wrote " << p.string() << '\n';
  return status;
}

}  // namespace kinplume::app
