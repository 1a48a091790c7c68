#include "levelgauss/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json_detail.hpp"
#include "levelgauss/error.hpp"

namespace levelgauss {

using nlohmann::json;

namespace detail {

json measure_spec_json(const MeasureSpec& spec) {
  json j;
  if (!spec.builtin.empty()) {
    j["builtin"] = spec.builtin;
    j["params"] = json::object();
    for (const auto& [k, v] : spec.params) j["params"][k] = v;
  } else {
    j["dim"] = spec.atoms.empty() ? 0 : spec.atoms.front().size();
    j["atoms"] = spec.atoms;
    j["weights"] = spec.weights;
  }
  return j;
}

MeasureSpec measure_spec_from(const json& j) {
  if (!j.is_object()) throw ConfigError("measure: expected an object");
  MeasureSpec spec;
  if (j.contains("builtin")) {
    for (const auto& [k, v] : j.items())
      if (k != "builtin" && k != "params") throw ConfigError("measure: unknown key '" + k + "'");
    spec.builtin = j.at("builtin").get<std::string>();
    spec.params.clear();
    if (j.contains("params")) {
      if (!j.at("params").is_object()) throw ConfigError("measure.params: expected an object");
      for (const auto& [k, v] : j.at("params").items()) spec.params[k] = v.get<double>();
    }
    return spec;
  }
  for (const auto& [k, v] : j.items())
    if (k != "dim" && k != "atoms" && k != "weights")
      throw ConfigError("measure: unknown key '" + k + "'");
  spec.builtin.clear();
  spec.params.clear();
  spec.atoms = j.at("atoms").get<std::vector<std::vector<double>>>();
  spec.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("dim")) {
    const auto dim = j.at("dim").get<std::size_t>();
    for (const auto& a : spec.atoms)
      if (a.size() != dim) throw ConfigError("measure: atom length differs from dim");
  }
  return spec;
}

json measure_json(const SpectralMeasure& m) {
  json atoms = json::array();
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Eigen::VectorXd a = m.atom(k);
    atoms.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  }
  std::vector<double> w(m.weights().data(), m.weights().data() + m.weights().size());
  return json{{"dim", m.dim()}, {"atoms", atoms}, {"weights", w}};
}

}  // namespace detail

SpectralMeasure MeasureSpec::build() const {
  if (!builtin.empty()) return builtin_measure(builtin, params);
  if (atoms.size() != weights.size()) throw InvalidInput("measure: atoms and weights differ in length");
  std::vector<std::pair<std::vector<double>, double>> aw;
  for (std::size_t k = 0; k < atoms.size(); ++k) aw.emplace_back(atoms[k], weights[k]);
  return atomic_measure(aw);
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"kacrice",  "identity",     "condcurv",
                                              "scaling",  "productgauss", "continuity",
                                              "moments"};
  return names;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    fail("unknown experiment '" + experiment + "'");
  if (!(R > 0.0) || !std::isfinite(R)) fail("R must be positive");
  if (grid_n < 16 || compare_grid_n < 16) fail("grid sizes must be at least 16");
  if (!(band_a < band_b)) fail("band must satisfy a < b");
  if (!(bandwidth > 0.0)) fail("bandwidth must be positive");
  if (seed_count == 0) fail("seed range is empty");
  if (mc_draws < 2) fail("mc draws must be at least 2");
  if (lattice_n < 2) fail("lattice size must be at least 2");
  if (bootstrap_resamples == 0) fail("bootstrap resamples must be positive");
  if (perturbation != "dilation" && perturbation != "angular_jitter")
    fail("unknown perturbation '" + perturbation + "'");
  for (double e : epsilons)
    if (!(e >= 0.0) || !std::isfinite(e)) fail("epsilons must be non-negative");
  for (double r : rhos)
    if (!(std::abs(r) <= 1.0)) fail("rho must lie in [-1, 1]");
  for (double a : levels)
    if (!std::isfinite(a)) fail("levels must be finite");
  if (continuity_n_min < 0 || continuity_n_max <= continuity_n_min)
    fail("continuity range must satisfy 0 <= n_min < n_max");
  if (!(moment_power > 0.0)) fail("moment power must be positive");
  if (moment_sizes.empty()) fail("moment sizes are empty");
  for (auto n : moment_sizes)
    if (n == 0) fail("moment sizes must be positive");
  if (moment_points_per_seed == 0) fail("moment points per seed must be positive");
  if (threads == 0) fail("threads must be positive");
  try {
    (void)measure.build();
  } catch (const InvalidInput& e) {
    fail(std::string("measure: ") + e.what());
  }
}

namespace {

json to_json_impl(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["measure"] = detail::measure_spec_json(c.measure);
  j["domain"] = {{"R", c.R}, {"grid_n", c.grid_n}, {"compare_grid_n", c.compare_grid_n}};
  j["levels"] = c.levels;
  j["band"] = {c.band_a, c.band_b};
  j["bandwidth"] = c.bandwidth;
  j["seeds"] = {{"first", c.seed_first}, {"count", c.seed_count}};
  j["monte_carlo"] = {{"draws", c.mc_draws},
                      {"lattice_n", c.lattice_n},
                      {"bootstrap", c.bootstrap_resamples}};
  j["scaling"] = {{"perturbation", c.perturbation}, {"epsilons", c.epsilons}};
  j["rhos"] = c.rhos;
  j["continuity"] = {{"n_min", c.continuity_n_min}, {"n_max", c.continuity_n_max}};
  j["moments"] = {{"power", c.moment_power},
                  {"sizes", c.moment_sizes},
                  {"points_per_seed", c.moment_points_per_seed}};
  j["output"] = c.output;
  j["threads"] = c.threads;
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig from_json_impl(const json& j) {
  reject_unknown(j,
                 {"experiment", "measure", "domain", "levels", "band", "bandwidth", "seeds",
                  "monte_carlo", "scaling", "rhos", "continuity", "moments", "output", "threads"},
                 "config");
  ExperimentConfig c;
  read(j, "experiment", c.experiment);
  if (j.contains("measure")) c.measure = detail::measure_spec_from(j.at("measure"));
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    reject_unknown(d, {"R", "grid_n", "compare_grid_n"}, "domain");
    read(d, "R", c.R);
    read(d, "grid_n", c.grid_n);
    read(d, "compare_grid_n", c.compare_grid_n);
  }
  read(j, "levels", c.levels);
  if (j.contains("band")) {
    const auto band = j.at("band").get<std::vector<double>>();
    if (band.size() != 2) throw ConfigError("band: expected [a, b]");
    c.band_a = band[0];
    c.band_b = band[1];
  }
  read(j, "bandwidth", c.bandwidth);
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    reject_unknown(s, {"first", "count"}, "seeds");
    read(s, "first", c.seed_first);
    read(s, "count", c.seed_count);
  }
  if (j.contains("monte_carlo")) {
    const auto& m = j.at("monte_carlo");
    reject_unknown(m, {"draws", "lattice_n", "bootstrap"}, "monte_carlo");
    read(m, "draws", c.mc_draws);
    read(m, "lattice_n", c.lattice_n);
    read(m, "bootstrap", c.bootstrap_resamples);
  }
  if (j.contains("scaling")) {
    const auto& s = j.at("scaling");
    reject_unknown(s, {"perturbation", "epsilons"}, "scaling");
    read(s, "perturbation", c.perturbation);
    read(s, "epsilons", c.epsilons);
  }
  read(j, "rhos", c.rhos);
  if (j.contains("continuity")) {
    const auto& s = j.at("continuity");
    reject_unknown(s, {"n_min", "n_max"}, "continuity");
    read(s, "n_min", c.continuity_n_min);
    read(s, "n_max", c.continuity_n_max);
  }
  if (j.contains("moments")) {
    const auto& s = j.at("moments");
    reject_unknown(s, {"power", "sizes", "points_per_seed"}, "moments");
    read(s, "power", c.moment_power);
    read(s, "sizes", c.moment_sizes);
    read(s, "points_per_seed", c.moment_points_per_seed);
  }
  read(j, "output", c.output);
  read(j, "threads", c.threads);
  return c;
}

}  // namespace

ExperimentConfig config_from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    c = from_json_impl(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) { return to_json_impl(cfg).dump(2); }

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json_impl(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SeedRange parse_seed_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) throw ConfigError("seed range: expected 'a..b'");
  auto parse = [](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw ConfigError("seed range: bad number '" + std::string(s) + "'");
    return v;
  };
  const std::uint64_t a = parse(text.substr(0, dots));
  const std::uint64_t b = parse(text.substr(dots + 2));
  if (b < a) throw ConfigError("seed range: empty");
  return SeedRange{a, static_cast<std::size_t>(b - a + 1)};
}

}  // namespace levelgauss
