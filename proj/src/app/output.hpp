#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "kinplume/app/config.hpp"
#include "kinplume/app/run.hpp"

namespace kinplume::app {

/// Shortest round-trip decimal form of v.
std::string fmt(double v);

/// Opens artifact files under the output directory, each starting with the `#` metadata
/// header (version, experiment, parameters, seed, optional timestamp).
class Output {
 public:
  Output(Experiment experiment, const Config& cfg, const RunOptions& options);

  std::ofstream open(const std::string& name, const std::vector<std::string>& extra = {});
  /// Opens without a header (binary artifacts and JSON).
  std::ofstream open_raw(const std::string& name, bool binary = false);

  const std::vector<std::filesystem::path>& written() const { return written_; }
  void write_header(std::ostream& os, const std::vector<std::string>& extra) const;

 private:
  std::filesystem::path path_for(const std::string& name);

  Experiment experiment_;
  const Config& cfg_;
  RunOptions options_;
  std::string timestamp_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace kinplume::app
