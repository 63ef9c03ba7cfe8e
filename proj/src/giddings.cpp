#include "kinplume/giddings.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "kinplume/special.hpp"
#include "kinplume/stats.hpp"

namespace kinplume::giddings {

namespace {

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("residence densities need t > 0");
}

// Continuous parts of h_ij. With E = -lambda tau - mu (t - tau) and theta = 2 sqrt(lambda mu
// tau (t - tau)), every density is e^{E + theta} times a scaled Bessel value.
double h_pair(Phase i, Phase j, double tau, double t, const KineticsParams& kin) {
  if (tau < 0.0 || tau > t) return 0.0;
  const double l = kin.lambda, m = kin.mu;
  const double rest = t - tau;
  const double theta = 2.0 * std::sqrt(l * m * tau * rest);
  const double growth = std::exp(-l * tau - m * rest + theta);
  if (i == j) {
    const double weight = i == Phase::Free ? tau : rest;
    return growth * l * m * weight * special::bessel_i1_over_half_z_scaled(theta);
  }
  const double rate = i == Phase::Free ? l : m;
  return growth * rate * special::bessel_i0_scaled(theta);
}

Atoms pair_atoms(Phase i, Phase j, double t, const KineticsParams& kin) {
  Atoms a;
  if (i == Phase::Free && j == Phase::Free) a.at_t = std::exp(-kin.lambda * t);
  if (i == Phase::Adsorbed && j == Phase::Adsorbed) a.at_0 = std::exp(-kin.mu * t);
  return a;
}

double initial_weight(Initial initial, Phase i, const KineticsParams& kin) {
  switch (initial) {
    case Initial::Free:
      return i == Phase::Free ? 1.0 : 0.0;
    case Initial::Adsorbed:
      return i == Phase::Adsorbed ? 1.0 : 0.0;
    case Initial::Equilibrium:
      return i == Phase::Free ? kin.pi_free() : kin.pi_adsorbed();
  }
  return 0.0;
}

template <class F>
void for_each_pair(Initial initial, std::optional<Phase> final_phase, const KineticsParams& kin,
                   F&& f) {
  for (Phase i : {Phase::Free, Phase::Adsorbed}) {
    const double w = initial_weight(initial, i, kin);
    if (w == 0.0) continue;
    for (Phase j : {Phase::Free, Phase::Adsorbed}) {
      if (final_phase && *final_phase != j) continue;
      f(i, j, w);
    }
  }
}

double normal_pdf(double x, double mean, double var) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double normal_cdf(double x, double mean, double var) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * var));
}

}  // namespace

double density(Initial initial, std::optional<Phase> final_phase, double tau, double t,
               const KineticsParams& kin) {
  double s = 0.0;
  for_each_pair(initial, final_phase, kin,
                [&](Phase i, Phase j, double w) { s += w * h_pair(i, j, tau, t, kin); });
  return s;
}

Atoms atoms(Initial initial, std::optional<Phase> final_phase, double t, const KineticsParams& kin) {
  Atoms out;
  for_each_pair(initial, final_phase, kin, [&](Phase i, Phase j, double w) {
    const Atoms a = pair_atoms(i, j, t, kin);
    out.at_0 += w * a.at_0;
    out.at_t += w * a.at_t;
  });
  return out;
}

namespace {

ResidenceDensity tabulate(Initial initial, std::optional<Phase> final_phase, double t,
                          const KineticsParams& kin, std::span<const double> tau_grid) {
  kin.validate();
  check_time(t);
  ResidenceDensity r;
  r.initial = initial;
  r.final_phase = final_phase;
  r.t = t;
  r.tau.assign(tau_grid.begin(), tau_grid.end());
  r.values.reserve(r.tau.size());
  for (double tau : r.tau) r.values.push_back(density(initial, final_phase, tau, t, kin));
  const Atoms a = atoms(initial, final_phase, t, kin);
  r.atom_at_0 = a.at_0;
  r.atom_at_t = a.at_t;
  return r;
}

}  // namespace

ResidenceDensity residence_density(Phase i, Phase j, double t, const KineticsParams& kin,
                                   std::span<const double> tau_grid) {
  const Initial initial = i == Phase::Free ? Initial::Free : Initial::Adsorbed;
  return tabulate(initial, j, t, kin, tau_grid);
}

ResidenceDensity equilibrium_density(std::optional<Phase> final_phase, double t,
                                     const KineticsParams& kin, std::span<const double> tau_grid) {
  return tabulate(Initial::Equilibrium, final_phase, t, kin, tau_grid);
}

std::vector<double> interior_grid(double t, std::size_t n) { return uniform_grid(0.0, t, n); }

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw InvalidParameter("grid needs at least one cell");
  if (!(hi > lo)) throw InvalidParameter("grid needs hi > lo");
  std::vector<double> g(n);
  const double h = (hi - lo) / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = lo + (static_cast<double>(k) + 0.5) * h;
  return g;
}

moments::ResidenceMoments numeric_moments(Initial initial, std::optional<Phase> final_phase,
                                          double t, const KineticsParams& kin,
                                          const quad::Options& opt) {
  kin.validate();
  check_time(t);
  moments::ResidenceMoments r;
  for (int order = 0; order < 3; ++order) {
    const double value =
        quad::integrate_residence(
            [&](double tau) {
              return std::pow(tau, order) * density(initial, final_phase, tau, t, kin);
            },
            t, opt)
            .value;
    (order == 0 ? r.probability : order == 1 ? r.first : r.second) = value;
  }
  const Atoms a = atoms(initial, final_phase, t, kin);
  r.probability += a.at_0 + a.at_t;
  r.first += a.at_t * t;
  r.second += a.at_t * t * t;
  return r;
}

ContinuousCdf::ContinuousCdf(Initial initial, std::optional<Phase> final_phase, double t,
                             const KineticsParams& kin, std::size_t cells)
    : initial_(initial), final_(final_phase), t_(t), kin_(kin) {
  kin.validate();
  check_time(t);
  if (cells == 0) throw InvalidParameter("CDF table needs at least one cell");
  h_ = t / static_cast<double>(cells);
  const quad::GaussLegendre rule(8);
  cumulative_.assign(cells + 1, 0.0);
  slope_.assign(cells + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t k = 0; k <= cells; ++k) {
    const double a = h_ * static_cast<double>(k);
    slope_[k] = density(initial_, final_, std::min(a, t_), t_, kin_);
    if (k == cells) break;
    acc.add(rule.integrate([&](double tau) { return density(initial_, final_, tau, t_, kin_); }, a,
                           std::min(a + h_, t_)));
    cumulative_[k + 1] = acc.value();
  }
}

double ContinuousCdf::integral(double tau) const {
  if (tau <= 0.0) return 0.0;
  if (tau >= t_) return cumulative_.back();
  const double pos = tau / h_;
  std::size_t k = static_cast<std::size_t>(pos);
  if (k >= cumulative_.size() - 1) k = cumulative_.size() - 2;
  const double s = pos - static_cast<double>(k);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * cumulative_[k] + h10 * h_ * slope_[k] + h01 * cumulative_[k + 1] +
         h11 * h_ * slope_[k + 1];
}

Profile1D profile_1d(double t, const KineticsParams& kin, double v, std::span<const double> x_grid,
                     Initial initial) {
  kin.validate();
  check_time(t);
  if (!(v > 0.0)) throw InvalidParameter("1D profiles need v > 0");
  const DerivedQuantities dq = derive(kin, TransportParams{v, 0.0, 0.0});
  Profile1D p;
  p.t = t;
  p.v = v;
  p.initial = initial;
  p.x.assign(x_grid.begin(), x_grid.end());
  const bool spread = dq.d_star > 0.0;
  const double mean = dq.v_star * t, var = 2.0 * dq.d_star * t;
  for (double x : p.x) {
    const double tau = x / v;
    const double f = density(initial, Phase::Free, tau, t, kin) / v;
    const double a = density(initial, Phase::Adsorbed, tau, t, kin) / v;
    p.n_f.push_back(f);
    p.n_a.push_back(a);
    p.n_tot.push_back(f + a);
    if (spread) {
      p.x_hat.push_back((x - mean) / std::sqrt(var));
      p.gaussian_ref.push_back(normal_pdf(x, mean, var));
    }
  }
  const Atoms at = atoms(initial, std::nullopt, t, kin);
  p.atom_x0 = at.at_0;
  p.atom_vt = at.at_t;
  return p;
}

double gaussian_l1_distance(double t, const KineticsParams& kin, double v, Initial initial) {
  kin.validate();
  check_time(t);
  if (!(v > 0.0)) throw InvalidParameter("1D profiles need v > 0");
  const DerivedQuantities dq = derive(kin, TransportParams{v, 0.0, 0.0});
  if (!(dq.d_star > 0.0)) throw DegenerateKinetics("Gaussian reference needs D* > 0");
  const double mean = dq.v_star * t, var = 2.0 * dq.d_star * t;
  const double vt = v * t;
  const auto gap = [&](double x) {
    return std::abs(density(initial, std::nullopt, x / v, t, kin) / v - normal_pdf(x, mean, var));
  };
  const double inside = quad::integrate(gap, 0.0, vt, {1e-10, 1e-10, 20000, 64}).value;
  const double outside = normal_cdf(0.0, mean, var) + (1.0 - normal_cdf(vt, mean, var));
  const Atoms at = atoms(initial, std::nullopt, t, kin);
  return inside + outside + at.at_0 + at.at_t;
}

void write_profile_csv(std::ostream& os, const Profile1D& p) {
  const auto old = os.precision(17);
  os << "# atom x=0 weight=" << p.atom_x0 << '\n';
  os << "# atom x=" << p.v * p.t << " weight=" << p.atom_vt << '\n';
  os << "x,x_hat,n_f,n_a,n_tot,gaussian_ref\n";
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    os << p.x[k] << ',';
    if (!p.x_hat.empty()) os << p.x_hat[k];
    os << ',' << p.n_f[k] << ',' << p.n_a[k] << ',' << p.n_tot[k] << ',';
    if (!p.gaussian_ref.empty()) os << p.gaussian_ref[k];
    os << '\n';
  }
  os.precision(old);
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Wave:
      return "wave";
    case Regime::Telegraph:
      return "telegraph";
    case Regime::Diffusion:
      return "diffusion";
  }
  return "?";
}

RegimeReport regime_check(double t, const KineticsParams& kin) {
  kin.validate();
  check_time(t);
  RegimeReport r;
  r.free_survival = std::exp(-kin.lambda * t);
  r.adsorbed_survival = std::exp(-kin.mu * t);
  r.free_pulse = kin.pi_free() * r.free_survival;
  r.adsorbed_pulse = kin.pi_adsorbed() * r.adsorbed_survival;
  const bool past_free = kin.lambda > 0.0 && t > 3.0 / kin.lambda;
  const bool past_adsorbed = kin.mu > 0.0 && t > 3.0 / kin.mu;
  if (past_free && past_adsorbed) {
    r.regime = Regime::Diffusion;
  } else if (r.free_survival > 0.5 && r.adsorbed_survival > 0.5) {
    r.regime = Regime::Wave;
  } else {
    r.regime = Regime::Telegraph;
  }
  return r;
}

}  // namespace kinplume::giddings
