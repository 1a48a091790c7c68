#include "levelgauss/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json_detail.hpp"
#include "levelgauss/error.hpp"

namespace levelgauss {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvalidInput("format_double: conversion failed");
  return std::string(buf, ptr);
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw InvalidInput("CsvTable: wrong number of cells");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, to_string()); }

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string measure_to_json(const SpectralMeasure& m) { return detail::measure_json(m).dump(); }

SpectralMeasure measure_from_json(std::string_view text) {
  try {
    return detail::measure_spec_from(json::parse(text)).build();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("measure json: ") + e.what());
  } catch (const ConfigError& e) {
    throw InvalidInput(e.what());
  }
}

SpectralMeasure load_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open measure file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return measure_from_json(ss.str());
}

void write_field_dump(const std::filesystem::path& base, const SampledField& field,
                      const Domain& dom, DumpFormat format) {
  dom.validate();
  const auto nodes = dom.nodes();
  const GridJet g = field.sample_grid(nodes, nodes, JetOrder::kHessian);
  const Eigen::MatrixXd* comps[] = {&g.f, &g.fx, &g.fy, &g.fxx, &g.fxy, &g.fyy};
  const int n = dom.grid_n;

  auto path_with = [&base](const char* ext) {
    std::filesystem::path p = base;
    p += ext;
    return p;
  };
  if (format == DumpFormat::kCsv) {
    CsvTable t({"i", "j", "x", "y", "f", "fx", "fy", "fxx", "fxy", "fyy"});
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        std::vector<std::string> cells{std::to_string(i), std::to_string(j), format_double(nodes[i]),
                                       format_double(nodes[j])};
        for (const auto* c : comps) cells.push_back(format_double((*c)(i, j)));
        t.add_row(std::move(cells));
      }
    t.write(path_with(".csv"));
  } else {
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(n) * n * 6 * 8);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto* c : comps) {
          std::uint64_t u = std::bit_cast<std::uint64_t>((*c)(i, j));
          if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
          char b[8];
          std::memcpy(b, &u, 8);
          bytes.append(b, 8);
        }
    write_text(path_with(".f64"), bytes);
  }
  json side{{"R", dom.R},
            {"n", n},
            {"seed", field.seed()},
            {"components", {"f", "fx", "fy", "fxx", "fxy", "fyy"}},
            {"layout", "row-major, x fastest"},
            {"format", format == DumpFormat::kCsv ? "csv" : "f64le"},
            {"measure", detail::measure_json(field.measure())}};
  write_text(path_with(".json"), side.dump(2) + "\n");
}

CsvTable polyline_table(const std::vector<Segment>& segments) {
  CsvTable t({"segment", "x0", "y0", "x1", "y1"});
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    t.add_row({std::to_string(k), format_double(s.p.x()), format_double(s.p.y()),
               format_double(s.q.x()), format_double(s.q.y())});
  }
  return t;
}

CsvTable plan_table(const CouplingPlan& plan) {
  CsvTable t({"s_x", "s_y", "t_x", "t_y", "w"});
  for (const auto& p : plan.pairs) {
    if (p.s.size() != 2 || p.t.size() != 2) throw InvalidInput("plan_table: planar plans only");
    t.add_row({format_double(p.s(0)), format_double(p.s(1)), format_double(p.t(0)),
               format_double(p.t(1)), format_double(p.w)});
  }
  return t;
}

std::string plan_summary_json(const CouplingPlan& plan) {
  double mass = 0.0;
  for (const auto& p : plan.pairs) mass += p.w;
  return json{{"cost", plan.cost}, {"pairs", plan.pairs.size()}, {"total_mass", mass}}.dump(2) + "\n";
}

CsvTable identity_report_table() {
  std::vector<std::string> cols = kProvenanceColumns;
  for (const char* c : {"level_a", "level_b", "measure_a", "measure_b", "bulk_integral",
                        "boundary_flux", "residual", "normalized_residual", "near_critical_volume",
                        "boundary_flags"})
    cols.emplace_back(c);
  return CsvTable(std::move(cols));
}

void add_identity_row(CsvTable& t, const IdentityReport& r, std::string_view config_hash,
                      std::uint64_t seed) {
  t.add_row({std::string(config_hash), std::to_string(seed), std::to_string(r.grid_n),
             format_double(r.level_a), format_double(r.level_b), format_double(r.measure_a),
             format_double(r.measure_b), format_double(r.bulk_integral),
             format_double(r.boundary_flux), format_double(r.residual),
             format_double(r.normalized_residual()), format_double(r.near_critical_volume),
             std::to_string(r.boundary_flags)});
}

CsvTable decomposition_table() {
  std::vector<std::string> cols = kProvenanceColumns;
  for (const char* c : {"bulk_both_negative", "bulk_kappa1_disagree", "bulk_kappa2_disagree",
                        "boundary_both_negative", "boundary1_only", "boundary2_only",
                        "disagreement_area", "bulk_total", "boundary_total", "length1", "length2",
                        "near_critical_volume"})
    cols.emplace_back(c);
  return CsvTable(std::move(cols));
}

void add_decomposition_row(CsvTable& t, const DecompositionReport& r, std::string_view config_hash,
                           std::uint64_t seed, int grid_n) {
  t.add_row({std::string(config_hash), std::to_string(seed), std::to_string(grid_n),
             format_double(r.bulk_both_negative), format_double(r.bulk_kappa1_disagree),
             format_double(r.bulk_kappa2_disagree), format_double(r.boundary_both_negative),
             format_double(r.boundary1_only), format_double(r.boundary2_only),
             format_double(r.disagreement_area), format_double(r.bulk_total),
             format_double(r.boundary_total), format_double(r.length1), format_double(r.length2),
             format_double(r.near_critical_volume)});
}

}  // namespace levelgauss
