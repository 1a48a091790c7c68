#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "levelgauss/domain.hpp"
#include "levelgauss/field.hpp"
#include "levelgauss/levelset.hpp"
#include "levelgauss/spectral_measure.hpp"
#include "levelgauss/transport.hpp"

namespace levelgauss {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Column-ordered CSV table. Cells are stored as text so that writing is
/// byte-reproducible.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }

  /// Throws InvalidInput if the cell count differs from the column count.
  void add_row(std::vector<std::string> cells);

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// {"dim", "atoms", "weights"} with round-trip decimal doubles.
std::string measure_to_json(const SpectralMeasure& m);
/// Accepts the atom-list form or {"builtin": name, "params": {...}}.
SpectralMeasure measure_from_json(std::string_view text);
SpectralMeasure load_measure(const std::filesystem::path& path);

enum class DumpFormat { kCsv, kRaw };

/// Row-major grid dump of (f, fx, fy, fxx, fxy, fyy) on the domain nodes,
/// x varying fastest, plus `<base>.json` with {R, n, seed, measure}. The
/// data file is `<base>.csv` or `<base>.f64` (little-endian doubles).
void write_field_dump(const std::filesystem::path& base, const SampledField& field,
                      const Domain& dom, DumpFormat format);

/// One row per segment: segment, x0, y0, x1, y1.
CsvTable polyline_table(const std::vector<Segment>& segments);

/// Rows (s_x, s_y, t_x, t_y, w) for planar plans.
CsvTable plan_table(const CouplingPlan& plan);
/// {"cost", "pairs", "total_mass"}.
std::string plan_summary_json(const CouplingPlan& plan);

/// Provenance columns shared by every result row.
inline const std::vector<std::string> kProvenanceColumns{"config_hash", "seed", "grid_n"};

CsvTable identity_report_table();
void add_identity_row(CsvTable& t, const IdentityReport& r, std::string_view config_hash,
                      std::uint64_t seed);

CsvTable decomposition_table();
void add_decomposition_row(CsvTable& t, const DecompositionReport& r, std::string_view config_hash,
                           std::uint64_t seed, int grid_n);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace levelgauss
