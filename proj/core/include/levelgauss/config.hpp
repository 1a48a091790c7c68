#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "levelgauss/domain.hpp"
#include "levelgauss/gaussian_identities.hpp"
#include "levelgauss/spectral_measure.hpp"

namespace levelgauss {

/// Either a builtin family with numeric parameters or an explicit atom list.
struct MeasureSpec {
  std::string builtin = "rpw_circle";
  std::map<std::string, double> params{{"M", 64.0}};
  std::vector<std::vector<double>> atoms;  // used when builtin is empty
  std::vector<double> weights;

  SpectralMeasure build() const;
  bool operator==(const MeasureSpec&) const = default;
};

struct ExperimentConfig {
  std::string experiment = "kacrice";
  MeasureSpec measure;

  double R = 5.0;
  int grid_n = 512;
  int compare_grid_n = 128;  // second resolution for the identity suite

  std::vector<double> levels{0.0};
  double band_a = 0.0, band_b = 0.5;
  double bandwidth = 0.05;

  std::uint64_t seed_first = 0;
  std::size_t seed_count = 1;

  std::size_t mc_draws = 1000000;
  int lattice_n = 512;
  std::size_t bootstrap_resamples = 400;

  std::string perturbation = "dilation";  // or "angular_jitter"
  std::vector<double> epsilons{0.1, 0.05, 0.02, 0.01, 0.005};

  std::vector<double> rhos{-0.9, 0.0, 0.5, 0.9};

  int continuity_n_min = 3, continuity_n_max = 10;

  double moment_power = 1.5;
  std::vector<std::size_t> moment_sizes{10000, 100000, 1000000};
  std::size_t moment_points_per_seed = 1000;

  std::string output = "results";
  unsigned threads = 1;

  Domain domain() const { return Domain{R, 2, grid_n}; }
  SeedRange seeds() const { return SeedRange{seed_first, seed_count}; }

  /// Throws ConfigError on a non-positive size, an empty seed range, an
  /// empty band, an unknown experiment or perturbation, or a bad measure.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Known experiment names.
const std::vector<std::string>& experiment_names();

/// Strict JSON parse: unknown keys and wrong types throw ConfigError;
/// missing keys keep their defaults. The result is validated.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON (sorted keys, shortest round-trip doubles), so that
/// config_from_json(config_to_json(c)) == c bit for bit.
std::string config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Parses "a..b" (inclusive) into a seed range.
SeedRange parse_seed_range(std::string_view text);

}  // namespace levelgauss
