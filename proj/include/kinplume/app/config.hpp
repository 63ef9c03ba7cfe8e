#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinplume/core.hpp"
#include "kinplume/errors.hpp"
#include "kinplume/moments.hpp"
#include "kinplume/particle.hpp"

namespace kinplume::app {

/// Unreadable, malformed or invalid configuration. `key` is the dotted path of the
/// offending entry ("plume1d.times", "kinetics.mu").
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : "config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Experiment { Simulate, Lattice, Moments, Plume1d, Plume2d, Condmom, Validate };

std::string to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& s);

struct SimulateSettings {
  double t = 1.0;
  std::size_t count = 10000;
  Initial initial = Initial::Equilibrium;
  int dims = 1;
  particle::Scheme scheme = particle::Scheme::Continuous;
  long steps = 1000;
  std::size_t batches = 20;
  std::size_t histogram_bins = 50;
  bool write_records = true;
};

struct LatticeSettings {
  double dt = 0.01;
  double t = 1.0;
  Initial initial = Initial::Equilibrium;
  std::optional<double> c;
  long half_width = 0;
  /// Times at which moments and a snapshot are written; always includes t.
  std::vector<double> snapshots;
};

struct MomentsSettings {
  std::vector<double> times;
  std::vector<moments::Conditioning> conditionings{moments::Conditioning::None};
  std::vector<Initial> initials{Initial::Equilibrium};
};

struct Plume1dSettings {
  std::vector<double> times;
  std::size_t points = 400;
  Initial initial = Initial::Equilibrium;
};

struct Plume2dSettings {
  enum class Mode { TransverseOnly, Full };
  Mode mode = Mode::TransverseOnly;
  std::vector<double> times;
  std::size_t nx = 200;
  std::size_t ny = 100;
  std::vector<Initial> initials{Initial::Equilibrium};
  /// nullopt entries stand for the total (free + adsorbed).
  std::vector<std::optional<Phase>> phases{Phase::Free};
  /// Absolute contour levels; when empty, level_fractions of the field maximum.
  std::vector<double> levels;
  std::vector<double> level_fractions{0.05, 0.1, 0.2, 0.4, 0.6, 0.8};
  bool scaled_contours = true;
  bool binary = false;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
  double abs_tol = 1e-8;
};

struct CondmomSettings {
  std::vector<double> times;
  /// x-moments conditioned on y.
  std::vector<double> y;
  std::vector<int> orders{0, 1, 2};
  std::vector<Phase> phases{Phase::Free, Phase::Adsorbed};
  bool normalized = false;
  /// y-moments conditioned on x (Laplace route); skipped when empty.
  std::vector<double> x;
  int n_terms = 64;
  /// Adds the direct-quadrature y-moments next to the inverted ones.
  bool direct_check = true;
};

struct ValidateSettings {
  double t = 5.0;
  std::size_t count = 100000;
  long lattice_steps = 500;
  /// Horizon of the Free -> Free conditional-variance check.
  double conditional_t = 2.0;
  double max_ks = 0.005;
};

struct Config {
  std::filesystem::path source;
  std::optional<Experiment> experiment;
  TransportParams transport;
  KineticsParams kinetics;
  std::uint64_t seed = 42;
  unsigned threads = 0;

  SimulateSettings simulate;
  LatticeSettings lattice;
  MomentsSettings moments;
  Plume1dSettings plume1d;
  Plume2dSettings plume2d;
  CondmomSettings condmom;
  ValidateSettings validate;
};

/// Parses JSON text. Only the section of `experiment` is required and checked; the other
/// sections keep their defaults.
Config parse_config(const std::string& text, Experiment experiment,
                    const std::filesystem::path& source = {});
Config load_config(const std::filesystem::path& path, Experiment experiment);

}  // namespace kinplume::app
