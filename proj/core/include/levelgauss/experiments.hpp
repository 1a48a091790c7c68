#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "levelgauss/config.hpp"
#include "levelgauss/io.hpp"
#include "levelgauss/levelset.hpp"
#include "levelgauss/stats.hpp"

namespace levelgauss {

/// Named CSV tables plus a JSON summary, written as <out>/<name>.csv and
/// <out>/<experiment>_summary.json.
struct ExperimentOutput {
  std::string experiment;
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::string summary_json;
  /// Seeds whose results carry a numerical flag (boundary critical point).
  std::vector<std::uint64_t> flagged_seeds;
};

void write_output(const ExperimentOutput& out, const std::filesystem::path& dir);

struct KacRiceSummary {
  double level = 0.0;
  double mean = 0.0, se = 0.0;
  double oracle = 0.0;
  double z = 0.0;
  std::size_t n_seeds = 0;
  std::vector<double> lengths;  // per seed, in seed order
  ExperimentOutput output;
};

/// Level-set length at every cfg.levels entry over the seed range, against
/// the Kac-Rice oracle. One summary per level. Throws InvalidInput for a
/// degenerate measure.
std::vector<KacRiceSummary> run_kac_rice(const ExperimentConfig& cfg);

struct IdentityRow {
  std::uint64_t seed = 0;
  IdentityReport report;
};

struct IdentitySuiteSummary {
  std::vector<IdentityRow> fine;    // cfg.grid_n
  std::vector<IdentityRow> coarse;  // cfg.compare_grid_n
  double median_fine = 0.0, median_coarse = 0.0;  // of normalized residual
  double q90_fine = 0.0, q90_coarse = 0.0;
  ExperimentOutput output;
};

/// identity_report on [cfg.band_a, cfg.band_b] for every seed at two grid
/// resolutions. Boundary flags are collected per seed in output.flagged_seeds.
IdentitySuiteSummary run_identity_suite(const ExperimentConfig& cfg);

struct ConditionalCurvatureRow {
  ConditionalCurvatureEstimate estimate;
  ConditionalCurvatureEstimate half_bandwidth;  // sensitivity at h / 2
  double oracle = 0.0;  // -a E|grad f|
  double z = 0.0;
};

struct ConditionalCurvatureSummary {
  double exp_grad_norm = 0.0;
  std::vector<ConditionalCurvatureRow> rows;  // in cfg.levels order
  ExperimentOutput output;
};

ConditionalCurvatureSummary run_conditional_curvature(const ExperimentConfig& cfg);

struct ScalingRung {
  double epsilon = 0.0;
  double sigma_D = 0.0;
  double transport_cost = 0.0;
  double transport_proxy = 0.0;
  double mean_abs_dH = 0.0;
  double se = 0.0;
  std::size_t n_seeds = 0;
  bool used_in_fit = false;  // mean_abs_dH > 3 se and sigma_D > 0
};

struct ScalingStudyResult {
  std::vector<ScalingRung> ladder;  // sorted by sigma_D
  LinearFit fit;                    // log mean|dH| against log sigma_D
  double spearman = 0.0;            // (sigma_D, mean|dH|) over all rungs
  std::vector<double> dropped_epsilons;
  ExperimentOutput output;
};

/// Perturbed measures m2(eps) (radial dilation by 1 + eps or angular
/// jitter), optimal couplings, and |H(f1^{-1}(0)) - H(f2^{-1}(0))| per seed.
ScalingStudyResult run_scaling_study(const ExperimentConfig& cfg);

struct ProductGaussianRow {
  double rho = 0.0;
  double mc = 0.0, se = 0.0;
  double formula = 0.0;
  double quadrature = 0.0;  // int_0^inf psi, NaN at |rho| = 1
  double z = 0.0;
};

struct ProductGaussianSummary {
  std::vector<ProductGaussianRow> rows;
  ExperimentOutput output;
};

/// P(XY > 0) from cfg.mc_draws counter-RNG pairs per rho, keyed by
/// cfg.seed_first.
ProductGaussianSummary run_product_gaussian(const ExperimentConfig& cfg);

struct ContinuityRow {
  std::uint64_t seed = 0;
  std::vector<double> gaps;  // |H(a + 2^-n) - H(a)|, n = n_min..n_max
  bool nonincreasing = false;
};

struct LevelContinuitySummary {
  std::vector<int> exponents;
  std::vector<ContinuityRow> rows;
  std::size_t nonincreasing_count = 0;
  ExperimentOutput output;
};

/// Gaps at level cfg.levels.front() for every seed.
LevelContinuitySummary run_level_continuity(const ExperimentConfig& cfg);

struct CurvatureMomentSummary {
  std::vector<CurvatureMoment> moments;  // one per cfg.moment_sizes entry
  std::vector<double> ratios;            // successive mean ratios
  ExperimentOutput output;
};

/// Mean |kappa|^p at each sample size; sizes share a common prefix.
CurvatureMomentSummary run_curvature_moments(const ExperimentConfig& cfg);

/// Dispatch on cfg.experiment.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

}  // namespace levelgauss
