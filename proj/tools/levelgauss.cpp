#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "levelgauss/coupling.hpp"
#include "levelgauss/error.hpp"
#include "levelgauss/experiments.hpp"
#include "levelgauss/io.hpp"
#include "levelgauss/levelset.hpp"
#include "levelgauss/rng.hpp"
#include "levelgauss/transport.hpp"

namespace lg = levelgauss;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalFlag = 3 };

struct CommonOptions {
  std::string config;
  std::string seed_range;
  std::string out;
  std::optional<int> grid_n;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed-range", o.seed_range, "Inclusive seed range a..b");
  cmd->add_option("--out", o.out, "Output directory (default: config 'output')");
  cmd->add_option("--grid-n", o.grid_n, "Grid points per axis");
  cmd->add_option("--threads", o.threads, "Worker threads");
}

lg::ExperimentConfig resolve(const CommonOptions& o, const std::string& experiment) {
  lg::ExperimentConfig c = o.config.empty() ? lg::ExperimentConfig{} : lg::load_config(o.config);
  c.experiment = experiment;
  if (!o.seed_range.empty()) {
    const lg::SeedRange r = lg::parse_seed_range(o.seed_range);
    c.seed_first = r.first;
    c.seed_count = r.count;
  }
  if (o.grid_n) c.grid_n = *o.grid_n;
  if (o.threads) c.threads = *o.threads;
  if (!o.out.empty()) c.output = o.out;
  c.validate();
  return c;
}

int finish(const lg::ExperimentOutput& out, const lg::ExperimentConfig& c) {
  lg::write_output(out, c.output);
  lg::write_text(fs::path(c.output) / (out.experiment + "_config.json"), lg::config_to_json(c) + "\n");
  std::cout << out.summary_json;
  if (!out.flagged_seeds.empty()) {
    std::cerr << "numerical flag: boundary critical point on " << out.flagged_seeds.size()
              << " seed(s); results written to " << c.output << "\n";
    return kNumericalFlag;
  }
  return kOk;
}

int cmd_experiment(const CommonOptions& o, const std::string& name) {
  const lg::ExperimentConfig c = resolve(o, name);
  return finish(lg::run_experiment(c), c);
}

int cmd_sample(const CommonOptions& o, const std::string& format) {
  const lg::ExperimentConfig c = resolve(o, "kacrice");
  const lg::SpectralMeasure m = c.measure.build();
  const lg::Domain dom = c.domain();
  const fs::path dir = c.output;
  const auto fmt = format == "raw" ? lg::DumpFormat::kRaw : lg::DumpFormat::kCsv;
  const std::string hash = lg::config_hash(c);
  lg::CsvTable lengths(
      {lg::kProvenanceColumns[0], lg::kProvenanceColumns[1], lg::kProvenanceColumns[2], "level",
       "length", "segments"});
  for (std::size_t s = 0; s < c.seed_count; ++s) {
    const std::uint64_t seed = c.seed_first + s;
    const auto field = lg::SampledField::sample(m, seed);
    const std::string stem = "field_" + std::to_string(seed);
    lg::write_field_dump(dir / stem, field, dom, fmt);
    const lg::Rect rect = lg::Rect::of(dom);
    for (double a : c.levels) {
      const auto segs = lg::level_segments(field, rect, dom.grid_n, dom.grid_n, a);
      double total = 0.0;
      for (const auto& sg : segs) total += sg.length();
      lg::polyline_table(segs).write(dir / ("levelset_" + std::to_string(seed) + "_" +
                                            lg::format_double(a) + ".csv"));
      lengths.add_row({hash, std::to_string(seed), std::to_string(dom.grid_n), lg::format_double(a),
                       lg::format_double(total), std::to_string(segs.size())});
    }
  }
  lengths.write(dir / "level_lengths.csv");
  std::cout << "wrote " << c.seed_count << " field(s) to " << dir.string() << "\n";
  return kOk;
}

int cmd_measure(const CommonOptions& o) {
  const lg::ExperimentConfig c = resolve(o, "kacrice");
  const lg::SpectralMeasure m = c.measure.build();
  const auto mom = lg::second_moments(m);
  const auto nd = lg::validate_nondegenerate(m);
  json lambda = json::array();
  for (Eigen::Index i = 0; i < mom.second_moment.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < mom.second_moment.cols(); ++j) row.push_back(mom.second_moment(i, j));
    lambda.push_back(row);
  }
  json report{{"atoms", m.size()},
              {"dim", m.dim()},
              {"second_moment", lambda},
              {"min_eigenvalue", nd.min_eigenvalue},
              {"symmetric_atom_count", nd.symmetric_atom_count},
              {"nondegenerate", nd.passed},
              {"failures", nd.failures}};
  if (m.dim() == 2) {
    // Empirical Morse check over the seed range.
    std::size_t points = 0, degenerate = 0;
    double min_det = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < c.seed_count; ++s) {
      const auto mc = lg::morse_check(lg::SampledField::sample(m, c.seed_first + s), c.domain());
      points += mc.critical_points;
      degenerate += mc.degenerate;
      min_det = std::min(min_det, mc.min_abs_det);
    }
    report["morse_check"] = {{"seeds", c.seed_count},
                             {"critical_points", points},
                             {"degenerate", degenerate},
                             {"min_relative_det", std::isfinite(min_det) ? json(min_det) : json(nullptr)}};
  }
  const fs::path dir = c.output;
  lg::write_text(dir / "measure.json", lg::measure_to_json(m) + "\n");
  lg::write_text(dir / "measure_report.json", report.dump(2) + "\n");
  if (m.dim() == 2) {
    lg::CsvTable kernel({"r", "kernel_x", "kernel_y"});
    for (int i = 0; i <= 200; ++i) {
      const double r = 0.05 * i;
      const double tx[2] = {r, 0.0}, ty[2] = {0.0, r};
      kernel.add_row({lg::format_double(r), lg::format_double(lg::kernel_eval(m, tx)),
                      lg::format_double(lg::kernel_eval(m, ty))});
    }
    kernel.write(dir / "kernel.csv");
  }
  std::cout << report.dump(2) << "\n";
  return nd.passed ? kOk : kConfigError;
}

int cmd_couple(const CommonOptions& o, const std::string& measure2_path) {
  const lg::ExperimentConfig c = resolve(o, "scaling");
  const lg::SpectralMeasure m1 = c.measure.build();
  lg::SpectralMeasure m2 = m1;
  if (!measure2_path.empty()) {
    m2 = lg::load_measure(measure2_path);
  } else {
    const double eps = c.epsilons.empty() ? 0.0 : c.epsilons.front();
    m2 = c.perturbation == "dilation" ? lg::dilate(m1, 1.0 + eps)
                                      : lg::angular_jitter(m1, eps, lg::derive_key(0x5ca1e, 0));
  }
  const lg::CouplingPlan plan = lg::optimal_coupling(m1, m2);
  const lg::Domain dom = c.domain();
  const fs::path dir = c.output;
  lg::plan_table(plan).write(dir / "plan.csv");
  lg::write_text(dir / "measure2.json", lg::measure_to_json(m2) + "\n");

  const std::string hash = lg::config_hash(c);
  lg::CsvTable decomposition = lg::decomposition_table();
  for (std::size_t s = 0; s < c.seed_count; ++s) {
    const std::uint64_t seed = c.seed_first + s;
    const lg::CoupledPair cp = lg::couple(m1, m2, plan, seed);
    lg::add_decomposition_row(decomposition, lg::bulk_difference_decomposition(cp, dom), hash, seed,
                              dom.grid_n);
  }
  decomposition.write(dir / "decomposition.csv");
  json summary = json::parse(lg::plan_summary_json(plan));
  summary["sigma_D"] = lg::sigma_D(plan.pairs, dom);
  summary["transport_proxy"] = lg::sigma_bound_proxy(plan, dom.R, 2);
  summary["config_hash"] = hash;
  lg::write_text(dir / "coupling_summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level sets of stationary Gaussian fields: sampling, identities and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "levelgauss 0.1.0");

  CommonOptions opts;
  std::string format = "csv";
  std::string measure2;

  auto* sample = app.add_subcommand("sample", "Dump sampled fields and their level sets");
  add_common(sample, opts);
  sample->add_option("--format", format, "Field dump format")->check(CLI::IsMember({"csv", "raw"}));

  auto* measure = app.add_subcommand("measure", "Report moments and nondegeneracy of a measure");
  add_common(measure, opts);

  auto* couple = app.add_subcommand("couple", "Optimal coupling and bulk decomposition");
  add_common(couple, opts);
  couple->add_option("--measure2", measure2, "Second measure (JSON); default perturbs the first")
      ->check(CLI::ExistingFile);

  const std::pair<const char*, const char*> experiments[] = {
      {"identity", "Divergence identity suite"},
      {"kacrice", "Nodal length against the Kac-Rice oracle"},
      {"condcurv", "Conditional mean curvature on a level band"},
      {"scaling", "Level-set length sensitivity under measure perturbation"},
      {"productgauss", "Sign probability of a correlated Gaussian product"},
      {"continuity", "Level-set length continuity in the level"},
      {"moments", "Curvature moment stability"},
  };
  std::vector<CLI::App*> experiment_cmds;
  for (const auto& [name, help] : experiments) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, opts);
    experiment_cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (sample->parsed()) return cmd_sample(opts, format);
    if (measure->parsed()) return cmd_measure(opts);
    if (couple->parsed()) return cmd_couple(opts, measure2);
    for (auto* cmd : experiment_cmds)
      if (cmd->parsed()) return cmd_experiment(opts, cmd->get_name());
  } catch (const lg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const lg::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const lg::NumericalFlag& e) {
    std::cerr << "numerical flag: " << e.what() << "\n";
    return kNumericalFlag;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
