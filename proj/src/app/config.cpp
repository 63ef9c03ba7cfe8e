#include "kinplume/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace kinplume::app {

using nlohmann::json;

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Simulate: return "simulate";
    case Experiment::Lattice: return "lattice";
    case Experiment::Moments: return "moments";
    case Experiment::Plume1d: return "plume1d";
    case Experiment::Plume2d: return "plume2d";
    case Experiment::Condmom: return "condmom";
    case Experiment::Validate: return "validate";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(const std::string& s) {
  for (auto e : {Experiment::Simulate, Experiment::Lattice, Experiment::Moments,
                 Experiment::Plume1d, Experiment::Plume2d, Experiment::Condmom,
                 Experiment::Validate}) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

namespace {

// A JSON object together with its dotted path, so every error names the key.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {}

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  bool present() const { return node_ != nullptr; }
  bool has(const std::string& key) const { return node_ && node_->contains(key); }

  void allow_only(std::initializer_list<const char*> keys) const {
    if (!node_) return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : node_->items()) {
      if (!ok.count(k)) throw ConfigError(key_path(k), "unknown key");
    }
  }

  Section child(const std::string& key, bool required) const {
    if (!has(key)) {
      if (required) throw ConfigError(key_path(key), "missing required section");
      return {nullptr, key_path(key)};
    }
    const json& c = node_->at(key);
    if (!c.is_object()) throw ConfigError(key_path(key), "expected an object");
    return {&c, key_path(key)};
  }

  double number(const std::string& key) const { return as_number(require(key), key); }
  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long integer(const std::string& key) const {
    const json& v = require(key);
    if (v.is_number_integer()) return v.get<long>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long>(d);
    }
    throw ConfigError(key_path(key), "expected an integer");
  }
  long integer_or(const std::string& key, long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  std::size_t count(const std::string& key, long minimum = 1) const {
    require(key);
    return count_or(key, 0, minimum);
  }
  std::size_t count_or(const std::string& key, std::size_t fallback, long minimum = 1) const {
    if (!has(key)) return fallback;
    const long v = integer(key);
    if (v < minimum) {
      throw ConfigError(key_path(key), "must be at least " + std::to_string(minimum));
    }
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string text_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  bool flag_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_->at(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    return v.get<bool>();
  }

  // A list of numbers or a grid {"min": a, "max": b, "points": n} (cell centred when
  // "centred" is true, end points included otherwise).
  std::vector<double> numbers(const std::string& key) const {
    const json& v = require(key);
    std::vector<double> out;
    if (v.is_array()) {
      if (v.empty()) throw ConfigError(key_path(key), "list must not be empty");
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_number(v[i], key + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
    if (v.is_number()) return {as_number(v, key)};
    if (v.is_object()) {
      Section g(&v, key_path(key));
      g.allow_only({"min", "max", "points", "centred"});
      const double lo = g.number("min"), hi = g.number("max");
      const long n = g.integer("points");
      if (n < 1) throw ConfigError(g.key_path("points"), "must be at least 1");
      if (!(hi > lo)) throw ConfigError(g.key_path("max"), "must exceed min");
      const bool centred = g.flag_or("centred", false);
      for (long k = 0; k < n; ++k) {
        if (centred) {
          out.push_back(lo + (hi - lo) * (k + 0.5) / n);
        } else {
          out.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
        }
      }
      return out;
    }
    throw ConfigError(key_path(key), "expected a number, a list of numbers or a grid object");
  }
  std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
  }

  std::vector<std::string> texts_or(const std::string& key,
                                    std::vector<std::string> fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_->at(key);
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array() || v.empty()) {
      throw ConfigError(key_path(key), "expected a string or a non-empty list of strings");
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) {
        throw ConfigError(key_path(key) + "[" + std::to_string(i) + "]", "expected a string");
      }
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  std::optional<std::pair<double, double>> range_or_none(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const json& v = node_->at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(key_path(key), "expected [min, max]");
    const double lo = as_number(v[0], key + "[0]"), hi = as_number(v[1], key + "[1]");
    if (!(hi > lo)) throw ConfigError(key_path(key), "max must exceed min");
    return std::make_pair(lo, hi);
  }

 private:
  const json& require(const std::string& key) const {
    if (!has(key)) throw ConfigError(key_path(key), "missing required key");
    return node_->at(key);
  }
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key_path(key), "must be finite");
    return d;
  }

  const json* node_;
  std::string path_;
};

template <class T, class Parse>
T parse_enum(const Section& s, const std::string& key, const std::string& value, Parse&& parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    throw ConfigError(s.key_path(key), e.what());
  }
}

void require_positive(const Section& s, const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(s.key_path(key), "must be > 0");
}

void require_positive(const Section& s, const std::string& key, const std::vector<double>& vs) {
  for (double v : vs) require_positive(s, key, v);
}

std::optional<Phase> parse_phase_or_total(const std::string& v) {
  if (v == "total") return std::nullopt;
  return parse_phase(v);
}

void read_simulate(Config& cfg, const Section& root) {
  const Section s = root.child("simulate", true);
  s.allow_only({"t", "count", "initial", "dims", "scheme", "steps", "batches", "histogram_bins",
                "write_records"});
  auto& o = cfg.simulate;
  o.t = s.number("t");
  require_positive(s, "t", o.t);
  o.count = s.count("count");
  o.initial = parse_enum<Initial>(s, "initial", s.text_or("initial", "equilibrium"), parse_initial);
  o.dims = static_cast<int>(s.integer_or("dims", 1));
  if (o.dims != 1 && o.dims != 2) throw ConfigError(s.key_path("dims"), "must be 1 or 2");
  const std::string scheme = s.text_or("scheme", "continuous");
  if (scheme == "continuous") {
    o.scheme = particle::Scheme::Continuous;
  } else if (scheme == "discrete") {
    o.scheme = particle::Scheme::Discrete;
  } else {
    throw ConfigError(s.key_path("scheme"), "expected 'continuous' or 'discrete'");
  }
  o.steps = static_cast<long>(s.count_or("steps", 1000));
  o.batches = s.count_or("batches", 20, 2);
  o.histogram_bins = s.count_or("histogram_bins", 50);
  o.write_records = s.flag_or("write_records", true);
  if (o.scheme == particle::Scheme::Discrete) {
    const double dt = o.t / static_cast<double>(o.steps);
    if (cfg.kinetics.lambda * dt > 1.0 || cfg.kinetics.mu * dt > 1.0) {
      throw ConfigError(s.key_path("steps"), "step too long: lambda dt and mu dt must be <= 1");
    }
  }
}

void read_lattice(Config& cfg, const Section& root) {
  const Section s = root.child("lattice", true);
  s.allow_only({"dt", "t", "initial", "c", "half_width", "snapshots"});
  auto& o = cfg.lattice;
  o.dt = s.number("dt");
  o.t = s.number("t");
  require_positive(s, "dt", o.dt);
  require_positive(s, "t", o.t);
  if (cfg.kinetics.lambda * o.dt >= 1.0 || cfg.kinetics.mu * o.dt >= 1.0) {
    throw ConfigError(s.key_path("dt"), "lambda dt and mu dt must be < 1");
  }
  o.initial = parse_enum<Initial>(s, "initial", s.text_or("initial", "equilibrium"), parse_initial);
  if (s.has("c")) o.c = s.number("c");
  o.half_width = s.integer_or("half_width", 0);
  o.snapshots = s.numbers_or("snapshots", {});
  for (double t : o.snapshots) {
    if (!(t > 0.0) || t > o.t) throw ConfigError(s.key_path("snapshots"), "times must lie in (0, t]");
  }
  o.snapshots.push_back(o.t);
  std::sort(o.snapshots.begin(), o.snapshots.end());
  o.snapshots.erase(std::unique(o.snapshots.begin(), o.snapshots.end()), o.snapshots.end());
}

void read_moments(Config& cfg, const Section& root) {
  const Section s = root.child("moments", true);
  s.allow_only({"times", "conditionings", "initials"});
  auto& o = cfg.moments;
  o.times = s.numbers("times");
  for (double t : o.times) {
    if (!(t >= 0.0)) throw ConfigError(s.key_path("times"), "times must be >= 0");
  }
  o.conditionings.clear();
  for (const auto& c : s.texts_or("conditionings", {"none"})) {
    o.conditionings.push_back(
        parse_enum<moments::Conditioning>(s, "conditionings", c, moments::parse_conditioning));
  }
  o.initials.clear();
  for (const auto& i : s.texts_or("initials", {"equilibrium"})) {
    o.initials.push_back(parse_enum<Initial>(s, "initials", i, parse_initial));
  }
  const bool conditioned = std::any_of(o.conditionings.begin(), o.conditionings.end(),
                                       [](auto c) { return c != moments::Conditioning::None; });
  if (conditioned && !(cfg.kinetics.lambda > 0.0 && cfg.kinetics.mu > 0.0)) {
    throw ConfigError(s.key_path("conditionings"),
                      "phase-conditioned moments need lambda > 0 and mu > 0");
  }
}

void read_plume1d(Config& cfg, const Section& root) {
  const Section s = root.child("plume1d", true);
  s.allow_only({"times", "points", "initial"});
  auto& o = cfg.plume1d;
  o.times = s.numbers("times");
  require_positive(s, "times", o.times);
  o.points = s.count_or("points", 400, 2);
  o.initial = parse_enum<Initial>(s, "initial", s.text_or("initial", "equilibrium"), parse_initial);
  if (!(cfg.transport.v > 0.0)) throw ConfigError("transport.v", "plume1d needs v > 0");
}

void read_plume2d(Config& cfg, const Section& root) {
  const Section s = root.child("plume2d", true);
  s.allow_only({"mode", "times", "nx", "ny", "initials", "phases", "levels", "level_fractions",
                "scaled_contours", "binary", "x_range", "y_range", "abs_tol"});
  auto& o = cfg.plume2d;
  const std::string mode = s.text("mode");
  if (mode == "transverse_only") {
    o.mode = Plume2dSettings::Mode::TransverseOnly;
  } else if (mode == "full") {
    o.mode = Plume2dSettings::Mode::Full;
  } else {
    throw ConfigError(s.key_path("mode"), "expected 'transverse_only' or 'full'");
  }
  o.times = s.numbers("times");
  require_positive(s, "times", o.times);
  o.nx = s.count_or("nx", 200, 2);
  o.ny = s.count_or("ny", 100, 2);
  o.initials.clear();
  for (const auto& i : s.texts_or("initials", {"equilibrium"})) {
    o.initials.push_back(parse_enum<Initial>(s, "initials", i, parse_initial));
  }
  o.phases.clear();
  for (const auto& p : s.texts_or("phases", {"free"})) {
    o.phases.push_back(parse_enum<std::optional<Phase>>(s, "phases", p, parse_phase_or_total));
  }
  o.levels = s.numbers_or("levels", {});
  o.level_fractions = s.numbers_or("level_fractions", o.level_fractions);
  for (double f : o.level_fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ConfigError(s.key_path("level_fractions"), "fractions must lie in (0, 1)");
    }
  }
  o.scaled_contours = s.flag_or("scaled_contours", true);
  o.binary = s.flag_or("binary", false);
  o.x_range = s.range_or_none("x_range");
  o.y_range = s.range_or_none("y_range");
  o.abs_tol = s.number_or("abs_tol", 1e-8);
  require_positive(s, "abs_tol", o.abs_tol);
  if (!(cfg.transport.v > 0.0)) throw ConfigError("transport.v", "plume2d needs v > 0");
  if (!(cfg.transport.d_t > 0.0)) throw ConfigError("transport.d_t", "plume2d needs d_t > 0");
  if (o.mode == Plume2dSettings::Mode::Full && !(cfg.transport.d_l > 0.0)) {
    throw ConfigError("transport.d_l", "full plume2d needs d_l > 0");
  }
}

void read_condmom(Config& cfg, const Section& root) {
  const Section s = root.child("condmom", true);
  s.allow_only({"times", "y", "orders", "phases", "normalized", "x", "n_terms", "direct_check"});
  auto& o = cfg.condmom;
  o.times = s.numbers("times");
  require_positive(s, "times", o.times);
  o.y = s.numbers("y");
  o.orders.clear();
  for (double v : s.numbers_or("orders", {0, 1, 2})) {
    if (v != 0 && v != 1 && v != 2) throw ConfigError(s.key_path("orders"), "orders are 0, 1 or 2");
    o.orders.push_back(static_cast<int>(v));
  }
  o.phases.clear();
  for (const auto& p : s.texts_or("phases", {"free", "adsorbed"})) {
    o.phases.push_back(parse_enum<Phase>(s, "phases", p, parse_phase));
  }
  o.normalized = s.flag_or("normalized", false);
  o.x = s.numbers_or("x", {});
  o.n_terms = static_cast<int>(s.integer_or("n_terms", 64));
  if (o.n_terms < 8 || o.n_terms % 2 != 0 || o.n_terms > 200) {
    throw ConfigError(s.key_path("n_terms"), "must be even and within [8, 200]");
  }
  o.direct_check = s.flag_or("direct_check", true);
  if (!(cfg.transport.d_t > 0.0)) throw ConfigError("transport.d_t", "condmom needs d_t > 0");
  if (!o.x.empty() && !(cfg.transport.d_l > 0.0)) {
    throw ConfigError("transport.d_l", "y-moments given x need d_l > 0");
  }
}

void read_validate(Config& cfg, const Section& root) {
  const Section s = root.child("validate", false);
  s.allow_only({"t", "count", "lattice_steps", "conditional_t", "max_ks"});
  auto& o = cfg.validate;
  o.t = s.number_or("t", o.t);
  require_positive(s, "t", o.t);
  o.count = s.count_or("count", o.count, 100);
  o.lattice_steps = static_cast<long>(s.count_or("lattice_steps", 500, 10));
  o.conditional_t = s.number_or("conditional_t", o.conditional_t);
  require_positive(s, "conditional_t", o.conditional_t);
  o.max_ks = s.number_or("max_ks", o.max_ks);
  require_positive(s, "max_ks", o.max_ks);
  const double dt = o.t / static_cast<double>(o.lattice_steps);
  if (cfg.kinetics.lambda * dt >= 1.0 || cfg.kinetics.mu * dt >= 1.0) {
    throw ConfigError(s.key_path("lattice_steps"), "lambda dt and mu dt must be < 1");
  }
  if (!(cfg.kinetics.lambda > 0.0 && cfg.kinetics.mu > 0.0)) {
    throw ConfigError("kinetics", "validate needs lambda > 0 and mu > 0");
  }
  if (!(cfg.transport.v > 0.0 && cfg.transport.d_l > 0.0 && cfg.transport.d_t > 0.0)) {
    throw ConfigError("transport", "validate needs v, d_l and d_t > 0");
  }
}

}  // namespace

Config parse_config(const std::string& text, Experiment experiment,
                    const std::filesystem::path& source) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "top level must be an object");
  Config cfg;
  cfg.source = source;
  const Section root(&doc, "");
  root.allow_only({"experiment", "description", "seed", "threads", "transport", "kinetics",
                   "simulate", "lattice", "moments", "plume1d", "plume2d", "condmom", "validate"});
  if (root.has("experiment")) {
    const auto e = parse_experiment(root.text("experiment"));
    if (!e) throw ConfigError("experiment", "unknown experiment '" + root.text("experiment") + "'");
    if (*e != experiment) {
      throw ConfigError("experiment", "config is for '" + to_string(*e) + "', not '" +
                                          to_string(experiment) + "'");
    }
    cfg.experiment = e;
  }
  if (root.has("seed")) {
    const long seed = root.integer("seed");
    if (seed < 0) throw ConfigError("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  cfg.threads = static_cast<unsigned>(root.count_or("threads", 0, 0));

  const Section tp = root.child("transport", true);
  tp.allow_only({"v", "d_l", "d_t", "d"});
  cfg.transport.v = tp.number("v");
  if (tp.has("d") && tp.has("d_l")) throw ConfigError(tp.key_path("d"), "give either d or d_l");
  cfg.transport.d_l = tp.has("d") ? tp.number("d") : tp.number_or("d_l", 0.0);
  cfg.transport.d_t = tp.number_or("d_t", 0.0);
  const auto nonnegative = [](const Section& s, const std::string& key, double v) {
    if (v < 0.0) throw ConfigError(s.key_path(key), "must be >= 0");
  };
  nonnegative(tp, "v", cfg.transport.v);
  nonnegative(tp, tp.has("d") ? "d" : "d_l", cfg.transport.d_l);
  nonnegative(tp, "d_t", cfg.transport.d_t);
  const Section kin = root.child("kinetics", true);
  kin.allow_only({"lambda", "mu"});
  cfg.kinetics.lambda = kin.number("lambda");
  cfg.kinetics.mu = kin.number("mu");
  nonnegative(kin, "lambda", cfg.kinetics.lambda);
  nonnegative(kin, "mu", cfg.kinetics.mu);
  try {
    cfg.kinetics.validate();
  } catch (const Error& e) {
    throw ConfigError("kinetics", e.what());
  }

  switch (experiment) {
    case Experiment::Simulate: read_simulate(cfg, root); break;
    case Experiment::Lattice: read_lattice(cfg, root); break;
    case Experiment::Moments: read_moments(cfg, root); break;
    case Experiment::Plume1d: read_plume1d(cfg, root); break;
    case Experiment::Plume2d: read_plume2d(cfg, root); break;
    case Experiment::Condmom: read_condmom(cfg, root); break;
    case Experiment::Validate: read_validate(cfg, root); break;
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path, Experiment experiment) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), experiment, path);
}

}  // namespace kinplume::app
