#include <ostream>

#include <CLI11.hpp>

#include "kinplume/app/run.hpp"

namespace kinplume::app {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinetic sorption transport: particles, lattice, moments and analytic plumes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool no_timestamp = false;

  const std::pair<Experiment, const char*> commands[] = {
      {Experiment::Simulate, "Monte Carlo particle ensemble"},
      {Experiment::Lattice, "exact master-equation iteration on a 1D lattice"},
      {Experiment::Moments, "closed-form position moments versus time"},
      {Experiment::Plume1d, "residence-time densities mapped to 1D profiles"},
      {Experiment::Plume2d, "2D plume fields and contour lines"},
      {Experiment::Condmom, "conditional moments of the 2D plume"},
      {Experiment::Validate, "cross-route validation matrix"},
  };
  for (const auto& [e, help] : commands) {
    auto* sub = app.add_subcommand(to_string(e), help);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed (overrides the config; default 42)");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the generated-at header line");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  Experiment experiment = Experiment::Validate;
  for (const auto& [e, _] : commands) {
    if (app.got_subcommand(to_string(e))) experiment = e;
  }

  Config cfg;
  try {
    cfg = load_config(config_path, experiment);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;

  RunOptions options;
  options.out_dir = out_dir;
  options.timestamp = !no_timestamp;
  try {
    return run_experiment(experiment, cfg, options, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace kinplume::app
