#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "kinplume/app/config.hpp"
#include "kinplume/app/run.hpp"

namespace fs = std::filesystem;
using namespace kinplume;
using namespace kinplume::app;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "kinplume");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("kinplume_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

const fs::path kConfigs = KINPLUME_CONFIG_DIR;

}  // namespace

TEST_CASE("missing required key exits 2 and names the key") {
  const auto dir = scratch("missing");
  const auto cfg = write_file(dir, "c.json", R"({
    "experiment": "plume1d",
    "transport": {"v": 1.0},
    "kinetics": {"lambda": 1.0, "mu": 1.0},
    "plume1d": {"points": 50}
  })");
  const auto r = cli({"plume1d", "--config", cfg.string(), "--out", (dir / "o").string()});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("plume1d.times") != std::string::npos);
}

TEST_CASE("config errors name the offending key") {
  const auto check = [](const std::string& text, const std::string& key) {
    CAPTURE(key);
    try {
      parse_config(text, Experiment::Moments, "inline.json");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
      CHECK(std::string(e.what()).find(key) != std::string::npos);
    }
  };
  const std::string kin = R"("kinetics": {"lambda": 1, "mu": 1})";
  check(R"({"experiment": "moments", "transport": {}, )" + kin + R"(, "moments": {"times": [1]}})",
        "transport.v");
  check(R"({"experiment": "moments", "transport": {"v": -1}, )" + kin + R"(, "moments": {"times": [1]}})",
        "transport.v");
  check(R"({"experiment": "moments", "transport": {"v": 1}, "kinetics": {"lambda": 1}, "moments": {"times": [1]}})",
        "kinetics.mu");
  check(R"({"experiment": "moments", "transport": {"v": 1}, )" + kin + R"(, "moments": {"times": [1], "bogus": 2}})",
        "moments.bogus");
  check(R"({"experiment": "lattice", "transport": {"v": 1}, )" + kin + R"(, "moments": {"times": [1]}})",
        "experiment");
  check(R"({"experiment": "moments", "transport": {"v": 1}, )" + kin + R"(})", "moments");
}

TEST_CASE("malformed json and missing files exit 2") {
  const auto dir = scratch("malformed");
  const auto cfg = write_file(dir, "c.json", "{ not json");
  CHECK(cli({"moments", "--config", cfg.string()}).code == kExitConfigError);
  CHECK(cli({"moments", "--config", (dir / "absent.json").string()}).code == kExitConfigError);
  CHECK(cli({"frobnicate"}).code == kExitConfigError);
  CHECK(cli({"moments"}).code == kExitConfigError);
}

TEST_CASE("version and help exit 0") {
  CHECK(cli({"--version"}).out == std::string(kVersion) + "\n");
  const auto h = cli({"--help"});
  CHECK(h.code == kExitOk);
  CHECK(h.out.find("plume2d") != std::string::npos);
}

TEST_CASE("plume1d preset emits one snapshot per time") {
  const auto dir = scratch("fig1");
  const auto r = cli({"plume1d", "--config", (kConfigs / "fig1.json").string(), "--out", dir.string(),
                      "--no-timestamp"});
  REQUIRE(r.code == kExitOk);
  for (const char* name : {"plume1d_t0.25.csv", "plume1d_t1.csv", "plume1d_t4.csv", "plume1d_t16.csv"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  const auto text = slurp(dir / "plume1d_t1.csv");
  CHECK(text.rfind("# kinplume ", 0) == 0);
  CHECK(text.find("# seed: 42\n") != std::string::npos);
  CHECK(text.find("# generated:") == std::string::npos);
}

TEST_CASE("reruns are byte identical without the timestamp") {
  const auto dir = scratch("rerun");
  const auto cfg = write_file(dir, "c.json", R"({
    "experiment": "simulate",
    "transport": {"v": 1.0, "d_l": 0.1, "d_t": 0.1},
    "kinetics": {"lambda": 1.0, "mu": 1.0},
    "simulate": {"t": 2, "count": 2000, "dims": 2, "write_records": true}
  })");
  const auto a = dir / "a", b = dir / "b";
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", a.string(), "--no-timestamp", "--threads", "1"}).code == 0);
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", b.string(), "--no-timestamp", "--threads", "3"}).code == 0);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    ++files;
  }
  CHECK(files >= 3);

  const auto c = dir / "c";
  REQUIRE(cli({"simulate", "--config", cfg.string(), "--out", c.string(), "--seed", "7"}).code == 0);
  const auto stats = slurp(c / "simulate_stats.csv");
  CHECK(stats.find("# seed: 7\n") != std::string::npos);
  CHECK(stats.find("# generated: ") != std::string::npos);
  CHECK(stats != slurp(a / "simulate_stats.csv"));
}

TEST_CASE("validate preset passes and writes both reports") {
  const auto dir = scratch("validate");
  const auto r = cli({"validate", "--config", (kConfigs / "validate.json").string(), "--out", dir.string(),
                      "--no-timestamp"});
  CHECK(r.code == kExitOk);
  CHECK(slurp(dir / "validate_report.txt").find("ALL PASS") != std::string::npos);
  CHECK(fs::exists(dir / "validate_report.json"));
}

TEST_CASE("validation failure exits 1") {
  const auto dir = scratch("validate_fail");
  const auto cfg = write_file(dir, "c.json", R"({
    "experiment": "validate",
    "transport": {"v": 1.0, "d_l": 0.1, "d_t": 0.1},
    "kinetics": {"lambda": 1.0, "mu": 1.0},
    "validate": {"count": 100}
  })");
  const auto r = cli({"validate", "--config", cfg.string(), "--out", (dir / "o").string()});
  CHECK(r.code == kExitValidationFailed);
  CHECK(slurp(dir / "o" / "validate_report.txt").find("FAIL") != std::string::npos);
}

TEST_CASE("every figure preset parses") {
  const std::pair<const char*, Experiment> presets[] = {
      {"fig1.json", Experiment::Plume1d}, {"fig2.json", Experiment::Plume1d},
      {"fig3.json", Experiment::Plume2d}, {"fig4.json", Experiment::Plume2d},
      {"fig5.json", Experiment::Plume2d}, {"fig6.json", Experiment::Condmom},
      {"fig7.json", Experiment::Condmom}, {"ymoments.json", Experiment::Condmom},
      {"simulate.json", Experiment::Simulate}, {"lattice.json", Experiment::Lattice},
      {"moments.json", Experiment::Moments}, {"validate.json", Experiment::Validate}};
  for (const auto& [name, exp] : presets) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(kConfigs / name, exp));
  }
}
