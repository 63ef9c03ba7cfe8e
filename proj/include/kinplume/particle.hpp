#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "kinplume/core.hpp"
#include "kinplume/rng.hpp"
#include "kinplume/stats.hpp"

namespace kinplume::particle {

/// Per-particle random stream: engine keyed by (seed, particle index).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  double uniform() { return engine_.uniform(); }
  double gaussian() { return normal_(engine_); }
  /// Exponential holding time; +inf for a zero rate.
  double exponential(double rate);

 private:
  Xoshiro256pp engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct ParticleState {
  double x = 0.0;
  double y = 0.0;
  Phase phase = Phase::Free;
  /// Accumulated time in the free phase.
  double tau_free = 0.0;
};

struct ParticleRecord {
  std::uint64_t id = 0;
  Phase initial_phase = Phase::Free;
  ParticleState final;
};

/// One interval of the discrete scheme. A free particle moves by v dt plus a Gaussian
/// increment of variance 2 d_l dt (and 2 d_t dt in y when dims == 2); the phase switch is
/// applied at the end of the interval.
ParticleState step_discrete(ParticleState state, const DiscreteKinetics& dk,
                            const TransportParams& tp, RandomStream& rng, int dims = 1);

/// Exact continuous-time trajectory up to horizon t: alternating exponential holding times
/// (rate lambda while free, mu while adsorbed), last interval truncated at t.
ParticleRecord simulate_particle_ct(const KineticsParams& kin, const TransportParams& tp, double t,
                                    Phase initial_phase, RandomStream& rng, int dims = 1);

enum class Scheme { Continuous, Discrete };

struct EnsembleOptions {
  double t = 1.0;
  std::size_t count = 1000;
  Initial initial = Initial::Equilibrium;
  std::uint64_t seed = 42;
  int dims = 1;
  unsigned threads = 0;
  Scheme scheme = Scheme::Continuous;
  /// Steps of the discrete scheme (dt = t / steps).
  long steps = 1000;
  std::size_t batches = 20;
};

struct PhaseStats {
  std::size_t count = 0;
  SampleMoments x;
  SampleMoments y;
};

struct EnsembleStats {
  std::size_t count = 0;
  SampleMoments x;
  SampleMoments y;
  double cross_moment = 0.0;
  /// Indexed by final phase (0 = free, 1 = adsorbed).
  std::array<PhaseStats, 2> by_phase{};
  Estimate centroid;
  Estimate variance;
  Estimate skewness;
  Estimate kurtosis;
  SampleMoments tau_free;

  const PhaseStats& phase(Phase p) const { return by_phase[p == Phase::Free ? 0 : 1]; }
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<ParticleRecord> records;
};

EnsembleResult run_ensemble(const KineticsParams& kin, const TransportParams& tp,
                            const EnsembleOptions& opts);

EnsembleStats compute_stats(std::span<const ParticleRecord> records, std::size_t batches = 20);

/// Records whose initial and final phases match the filters.
std::vector<double> select_x(std::span<const ParticleRecord> records, std::optional<Phase> initial,
                             std::optional<Phase> final);

struct ResidenceHistogram {
  double t = 0.0;
  std::vector<double> edges;
  /// Counts of records with 0 < tau < t.
  std::vector<double> counts;
  double atom_at_0 = 0.0;
  double atom_at_t = 0.0;
  double total = 0.0;
};

/// Histogram of free residence times with the tau = 0 and tau = t atoms counted apart.
ResidenceHistogram free_residence_histogram(std::span<const ParticleRecord> records,
                                            std::size_t bins, double t);

/// Kolmogorov-Smirnov distance between a sample and a distribution given by its
/// right-continuous CDF and left limit (atoms are jumps between the two).
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left);

/// CSV columns: id, initial_phase, final_phase, x, y, tau_free.
void write_records_csv(std::ostream& os, std::span<const ParticleRecord> records);

}  // namespace kinplume::particle
