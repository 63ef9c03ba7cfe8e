#include "kinplume/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "kinplume/parallel.hpp"

namespace kinplume::particle {

double RandomStream::exponential(double rate) {
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log1p(-uniform()) / rate;
}

namespace {

void move_free(ParticleState& s, double duration, const TransportParams& tp, RandomStream& rng,
               int dims) {
  s.x += tp.v * duration;
  if (tp.d_l > 0.0) s.x += std::sqrt(2.0 * tp.d_l * duration) * rng.gaussian();
  if (dims == 2 && tp.d_t > 0.0) s.y += std::sqrt(2.0 * tp.d_t * duration) * rng.gaussian();
  s.tau_free += duration;
}

void check_dims(int dims) {
  if (dims != 1 && dims != 2) throw InvalidParameter("dims must be 1 or 2");
}

Phase draw_initial(Initial initial, const KineticsParams& kin, RandomStream& rng) {
  switch (initial) {
    case Initial::Free:
      return Phase::Free;
    case Initial::Adsorbed:
      return Phase::Adsorbed;
    case Initial::Equilibrium:
      return rng.uniform() < kin.pi_free() ? Phase::Free : Phase::Adsorbed;
  }
  return Phase::Free;
}

}  // namespace

ParticleState step_discrete(ParticleState state, const DiscreteKinetics& dk,
                            const TransportParams& tp, RandomStream& rng, int dims) {
  if (state.phase == Phase::Free) {
    move_free(state, dk.dt, tp, rng, dims);
    if (dk.b > 0.0 && rng.uniform() < dk.b) state.phase = Phase::Adsorbed;
  } else {
    if (dk.a > 0.0 && rng.uniform() < dk.a) state.phase = Phase::Free;
  }
  return state;
}

ParticleRecord simulate_particle_ct(const KineticsParams& kin, const TransportParams& tp, double t,
                                    Phase initial_phase, RandomStream& rng, int dims) {
  check_dims(dims);
  if (!(t >= 0.0)) throw InvalidParameter("horizon t must be >= 0");
  ParticleRecord rec;
  rec.initial_phase = initial_phase;
  ParticleState& s = rec.final;
  s.phase = initial_phase;
  double elapsed = 0.0;
  while (elapsed < t) {
    const double rate = s.phase == Phase::Free ? kin.lambda : kin.mu;
    const double hold = rng.exponential(rate);
    const double remaining = t - elapsed;
    if (hold >= remaining) {
      if (s.phase == Phase::Free) move_free(s, remaining, tp, rng, dims);
      break;
    }
    if (s.phase == Phase::Free) move_free(s, hold, tp, rng, dims);
    elapsed += hold;
    s.phase = other(s.phase);
  }
  return rec;
}

std::vector<double> select_x(std::span<const ParticleRecord> records, std::optional<Phase> initial,
                             std::optional<Phase> final) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (initial && r.initial_phase != *initial) continue;
    if (final && r.final.phase != *final) continue;
    out.push_back(r.final.x);
  }
  return out;
}

EnsembleStats compute_stats(std::span<const ParticleRecord> records, std::size_t batches) {
  EnsembleStats st;
  st.count = records.size();
  std::vector<double> xs, ys, taus;
  xs.reserve(records.size());
  ys.reserve(records.size());
  taus.reserve(records.size());
  std::array<std::vector<double>, 2> px, py;
  for (const auto& r : records) {
    xs.push_back(r.final.x);
    ys.push_back(r.final.y);
    taus.push_back(r.final.tau_free);
    const int k = r.final.phase == Phase::Free ? 0 : 1;
    px[k].push_back(r.final.x);
    py[k].push_back(r.final.y);
  }
  st.x = sample_moments(xs);
  st.y = sample_moments(ys);
  st.tau_free = sample_moments(taus);
  st.cross_moment = sample_covariance(xs, ys);
  for (int k = 0; k < 2; ++k) {
    st.by_phase[k].count = px[k].size();
    st.by_phase[k].x = sample_moments(px[k]);
    st.by_phase[k].y = sample_moments(py[k]);
  }
  st.centroid = estimate_mean(xs, batches);
  st.variance = estimate_variance(xs, batches);
  st.skewness = estimate_skewness(xs, batches);
  st.kurtosis = estimate_kurtosis(xs, batches);
  return st;
}

EnsembleResult run_ensemble(const KineticsParams& kin, const TransportParams& tp,
                            const EnsembleOptions& opts) {
  kin.validate();
  tp.validate();
  check_dims(opts.dims);
  if (opts.count < 1) throw InvalidParameter("ensemble size N must be >= 1");
  EnsembleResult result;
  result.records.resize(opts.count);
  std::optional<DiscreteKinetics> dk;
  if (opts.scheme == Scheme::Discrete) dk = DiscreteKinetics::from_rates(kin, opts.t, opts.steps);

  parallel_for(opts.count, opts.threads, [&](std::size_t i) {
    RandomStream rng(opts.seed, i);
    const Phase start = draw_initial(opts.initial, kin, rng);
    ParticleRecord rec;
    if (dk) {
      rec.initial_phase = start;
      rec.final.phase = start;
      for (long k = 0; k < dk->n; ++k) rec.final = step_discrete(rec.final, *dk, tp, rng, opts.dims);
    } else {
      rec = simulate_particle_ct(kin, tp, opts.t, start, rng, opts.dims);
    }
    rec.id = i;
    result.records[i] = rec;
  });
  result.stats = compute_stats(result.records, opts.batches);
  return result;
}

ResidenceHistogram free_residence_histogram(std::span<const ParticleRecord> records,
                                            std::size_t bins, double t) {
  if (bins < 1) throw InvalidParameter("histogram needs at least one bin");
  if (!(t > 0.0)) throw InvalidParameter("histogram horizon must be > 0");
  ResidenceHistogram h;
  h.t = t;
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = t * static_cast<double>(k) / bins;
  h.counts.assign(bins, 0.0);
  for (const auto& r : records) {
    const double tau = r.final.tau_free;
    h.total += 1.0;
    if (tau <= 0.0) {
      h.atom_at_0 += 1.0;
    } else if (tau >= t) {
      h.atom_at_t += 1.0;
    } else {
      auto k = static_cast<std::size_t>(tau / t * static_cast<double>(bins));
      h.counts[std::min(k, bins - 1)] += 1.0;
    }
  }
  return h;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double upto = static_cast<double>(j) / n;
    d = std::max(d, std::abs(cdf_left(sample[i]) - below));
    d = std::max(d, std::abs(cdf(sample[i]) - upto));
    i = j;
  }
  return d;
}

void write_records_csv(std::ostream& os, std::span<const ParticleRecord> records) {
  os << "id,initial_phase,final_phase,x,y,tau_free\n";
  const auto old_precision = os.precision(17);
  for (const auto& r : records) {
    os << r.id << ',' << to_string(r.initial_phase) << ',' << to_string(r.final.phase) << ','
       << r.final.x << ',' << r.final.y << ',' << r.final.tau_free << '\n';
  }
  os.precision(old_precision);
}

}  // namespace kinplume::particle
