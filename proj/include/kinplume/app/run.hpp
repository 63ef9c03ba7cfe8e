#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kinplume/app/config.hpp"

namespace kinplume::app {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitConfigError = 2;
/// A numerical routine refused its input or did not converge.
inline constexpr int kExitRuntimeError = 3;

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool timestamp = true;
};

/// One row of the cross-route validation report.
struct Check {
  std::string name;
  std::string routes;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

/// Runs the cross-route matrix on the configured parameters.
std::vector<Check> run_validation(const Config& cfg, std::ostream* progress = nullptr);

/// Runs one experiment and writes its artifacts under options.out_dir. Returns the exit
/// status; library errors propagate as exceptions.
int run_experiment(Experiment experiment, const Config& cfg, const RunOptions& options,
                   std::ostream& out, std::ostream& err);

/// Command-line entry point: `kinplume <subcommand> --config PATH [--out DIR] [--seed N]
/// [--threads N] [--no-timestamp]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kinplume::app
