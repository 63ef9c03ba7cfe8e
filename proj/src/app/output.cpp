#include "output.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <ostream>

namespace kinplume::app {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Output::Output(Experiment experiment, const Config& cfg, const RunOptions& options)
    : experiment_(experiment), cfg_(cfg), options_(options) {
  if (options_.timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    timestamp_ = buf;
  }
  std::filesystem::create_directories(options_.out_dir);
}

void Output::write_header(std::ostream& os, const std::vector<std::string>& extra) const {
  const auto dq = derive(cfg_.kinetics, cfg_.transport);
  os << "# kinplume " << kVersion << '\n';
  os << "# experiment: " << to_string(experiment_) << '\n';
  if (!cfg_.source.empty()) os << "# config: " << cfg_.source.filename().string() << '\n';
  os << "# seed: " << cfg_.seed << '\n';
  os << "# transport: v=" << fmt(cfg_.transport.v) << " d_l=" << fmt(cfg_.transport.d_l)
     << " d_t=" << fmt(cfg_.transport.d_t) << '\n';
  os << "# kinetics: lambda=" << fmt(cfg_.kinetics.lambda) << " mu=" << fmt(cfg_.kinetics.mu)
     << '\n';
  os << "# derived: pi_f=" << fmt(dq.pi_f) << " pi_a=" << fmt(dq.pi_a)
     << " v_star=" << fmt(dq.v_star) << " d_star=" << fmt(dq.d_star) << " d_e=" << fmt(dq.d_e);
  if (dq.retardation) os << " R=" << fmt(*dq.retardation);
  os << '\n';
  for (const auto& line : extra) os << "# " << line << '\n';
  if (!timestamp_.empty()) os << "# generated: " << timestamp_ << '\n';
}

std::filesystem::path Output::path_for(const std::string& name) {
  auto p = options_.out_dir / name;
  written_.push_back(p);
  return p;
}

std::ofstream Output::open(const std::string& name, const std::vector<std::string>& extra) {
  const auto p = path_for(name);
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  write_header(os, extra);
  return os;
}

std::ofstream Output::open_raw(const std::string& name, bool binary) {
  const auto p = path_for(name);
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

}  // namespace kinplume::app
