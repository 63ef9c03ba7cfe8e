#include "kinplume/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "kinplume/stats.hpp"

namespace kinplume::lattice {

namespace {

constexpr double kEdgeMassLimit = 1e-12;

double spread_bound(const TransportParams& tp, const KineticsParams& kin, double t) {
  const double g = kin.total_rate();
  const double lm = kin.lambda * kin.mu;
  const double tau_var = std::min(0.25 * t * t, 2.0 * lm * t / (g * g * g) + 4.0 / (g * g));
  return std::sqrt(2.0 * tp.d_l * t + tp.v * tp.v * tau_var);
}

long cells_needed(const LatticeConfig& cfg, long steps, double spreads) {
  const double t = cfg.dt * static_cast<double>(steps);
  const double reach = cfg.transport.v * t + spreads * spread_bound(cfg.transport, cfg.kinetics, t);
  return static_cast<long>(std::ceil(reach / cfg.dx));
}

}  // namespace

void LatticeConfig::validate() const {
  transport.validate();
  kinetics.validate();
  if (!(dt > 0.0)) throw InvalidParameter("lattice dt must be > 0");
  if (!(c > 0.0) || !(dx > 0.0)) throw InvalidParameter("lattice c must be > 0");
  for (double p : {beta, delta, alpha}) {
    if (!(p >= -1e-15 && p <= 1.0 + 1e-15)) {
      std::ostringstream os;
      os << "lattice move probabilities outside [0, 1] (beta=" << beta << ", delta=" << delta
         << ", alpha=" << alpha << "); choose c in the admissible range";
      throw InvalidParameter(os.str());
    }
  }
  if (!(kinetics.lambda * dt < 1.0 && kinetics.mu * dt < 1.0)) {
    throw InvalidParameter("lattice needs lambda dt < 1 and mu dt < 1");
  }
  if (half_width < 1) throw InvalidParameter("lattice half_width must be >= 1");
}

std::pair<double, double> admissible_c(const TransportParams& tp, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("lattice dt must be > 0");
  const double spread = 2.0 * tp.d_l + tp.v * tp.v * dt;
  if (!(spread > 0.0)) throw InvalidParameter("lattice needs v > 0 or D > 0");
  const double lo = std::sqrt(spread);
  const double hi = tp.v > 0.0 ? spread / (tp.v * std::sqrt(dt)) : INFINITY;
  return {lo, hi};
}

double default_c(const TransportParams& tp, double dt) {
  const auto [lo, hi] = admissible_c(tp, dt);
  return std::min(2.0 * lo, hi);
}

long auto_half_width(const TransportParams& tp, const KineticsParams& kin, double dt, double c,
                     double t) {
  const double dx = c * std::sqrt(dt);
  const long steps = static_cast<long>(std::ceil(t / dt - 1e-9));
  const double reach = tp.v * t + 12.0 * spread_bound(tp, kin, t);
  const long cells = static_cast<long>(std::ceil(reach / dx)) + 2;
  return std::max(1L, std::min(cells, steps + 1));
}

LatticeConfig make_config(const TransportParams& tp, const KineticsParams& kin, double dt, double t,
                          long half_width, std::optional<double> c) {
  tp.validate();
  kin.validate();
  LatticeConfig cfg;
  cfg.transport = tp;
  cfg.kinetics = kin;
  cfg.dt = dt;
  cfg.c = c ? *c : default_c(tp, dt);
  cfg.dx = cfg.c * std::sqrt(dt);
  const double c2 = cfg.c * cfg.c;
  const double base = tp.d_l / c2 + tp.v * tp.v * dt / (2.0 * c2);
  const double drift = tp.v * std::sqrt(dt) / (2.0 * cfg.c);
  cfg.beta = base + drift;
  cfg.delta = base - drift;
  cfg.alpha = 1.0 - cfg.beta - cfg.delta;
  // round-off at the admissible end points
  if (std::abs(cfg.delta) < 1e-15) cfg.delta = 0.0;
  if (std::abs(cfg.alpha) < 1e-15) cfg.alpha = 0.0;
  cfg.half_width = half_width > 0 ? half_width : auto_half_width(tp, kin, dt, cfg.c, t);
  cfg.validate();
  return cfg;
}

double LatticeState::mass() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < p_f.size(); ++k) {
    s.add(p_f[k]);
    s.add(p_a[k]);
  }
  return s.value();
}

LatticeState init_lattice(const LatticeConfig& cfg, double free_mass, double adsorbed_mass,
                          long horizon_steps) {
  cfg.validate();
  if (!(free_mass >= 0.0 && adsorbed_mass >= 0.0) ||
      std::abs(free_mass + adsorbed_mass - 1.0) > 1e-12) {
    throw InvalidParameter("initial phase masses must be >= 0 and sum to 1");
  }
  if (horizon_steps < 0) throw InvalidParameter("horizon_steps must be >= 0");
  const long needed = cells_needed(cfg, horizon_steps, 6.0);
  if (cfg.half_width < needed && cfg.half_width < horizon_steps) {
    std::ostringstream os;
    os << "lattice half_width " << cfg.half_width << " is below drift + 6 spreads (" << needed
       << " cells) at step " << horizon_steps;
    throw DomainError(os.str());
  }
  LatticeState s;
  s.half_width = cfg.half_width;
  s.p_f.assign(static_cast<std::size_t>(2 * cfg.half_width + 1), 0.0);
  s.p_a.assign(s.p_f.size(), 0.0);
  s.free_at(0) = free_mass;
  s.adsorbed_at(0) = adsorbed_mass;
  return s;
}

LatticeState init_lattice(const LatticeConfig& cfg, Initial initial, long horizon_steps) {
  switch (initial) {
    case Initial::Free:
      return init_lattice(cfg, 1.0, 0.0, horizon_steps);
    case Initial::Adsorbed:
      return init_lattice(cfg, 0.0, 1.0, horizon_steps);
    case Initial::Equilibrium:
      return init_lattice(cfg, cfg.kinetics.pi_free(), cfg.kinetics.pi_adsorbed(), horizon_steps);
  }
  throw InvalidParameter("unknown initial law");
}

void step_lattice(LatticeState& state, const LatticeConfig& cfg) {
  const std::size_t size = state.p_f.size();
  const double capture = cfg.kinetics.lambda * cfg.dt;
  const double release = cfg.kinetics.mu * cfg.dt;
  std::vector<double> moved(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    const double p = state.p_f[k];
    if (p == 0.0) continue;
    const std::size_t right = std::min(k + 1, size - 1);
    const std::size_t left = k == 0 ? 0 : k - 1;
    moved[right] += cfg.beta * p;
    moved[left] += cfg.delta * p;
    moved[k] += cfg.alpha * p;
  }
  for (std::size_t k = 0; k < size; ++k) {
    const double f = moved[k];
    const double a = state.p_a[k];
    state.p_f[k] = (1.0 - capture) * f + release * a;
    state.p_a[k] = capture * f + (1.0 - release) * a;
  }
  ++state.n;
  const double edge = state.p_f.front() + state.p_a.front() + state.p_f.back() + state.p_a.back();
  // a single cell lattice is all edge
  if (size > 1 && edge > kEdgeMassLimit) {
    std::ostringstream os;
    os << "lattice edge mass " << edge << " exceeds " << kEdgeMassLimit << " at step " << state.n
       << "; increase half_width";
    throw DomainError(os.str());
  }
}

void advance(LatticeState& state, const LatticeConfig& cfg, long steps) {
  for (long k = 0; k < steps; ++k) step_lattice(state, cfg);
}

namespace {

PhaseMoments weighted_moments(const LatticeConfig& cfg, long half_width,
                              const std::vector<double>& w) {
  PhaseMoments m;
  CompensatedSum mass, first;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double x = cfg.x(static_cast<long>(k) - half_width);
    mass.add(w[k]);
    first.add(w[k] * x);
  }
  m.mass = mass.value();
  if (!(m.mass > 0.0)) return m;
  m.mean = first.value() / m.mass;
  CompensatedSum c2, c3, c4;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double d = cfg.x(static_cast<long>(k) - half_width) - m.mean;
    const double d2 = d * d;
    c2.add(w[k] * d2);
    c3.add(w[k] * d2 * d);
    c4.add(w[k] * d2 * d2);
  }
  m.variance = c2.value() / m.mass;
  if (m.variance > 0.0) {
    m.skewness = c3.value() / m.mass / std::pow(m.variance, 1.5);
    m.kurtosis = c4.value() / m.mass / (m.variance * m.variance);
  }
  return m;
}

}  // namespace

LatticeMoments lattice_moments(const LatticeState& state, const LatticeConfig& cfg) {
  LatticeMoments out;
  out.free = weighted_moments(cfg, state.half_width, state.p_f);
  out.adsorbed = weighted_moments(cfg, state.half_width, state.p_a);
  std::vector<double> total(state.p_f.size());
  for (std::size_t k = 0; k < total.size(); ++k) total[k] = state.p_f[k] + state.p_a[k];
  out.total = weighted_moments(cfg, state.half_width, total);
  return out;
}

void write_snapshot_csv(std::ostream& os, const LatticeState& state, const LatticeConfig& cfg) {
  const auto old = os.precision(17);
  os << "cell,x,p_f,p_a\n";
  for (long i = -state.half_width; i <= state.half_width; ++i) {
    os << i << ',' << cfg.x(i) << ',' << state.free_at(i) << ',' << state.adsorbed_at(i) << '\n';
  }
  os.precision(old);
}

}  // namespace kinplume::lattice
