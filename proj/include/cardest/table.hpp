#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cardest {

using Code = std::int32_t;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AttrKind { Categorical, BinnedContinuous };

/// Metadata for one encoded attribute. Categorical attributes keep their raw
/// values sorted (numerically when every value parses as a number); binned
/// continuous attributes keep strictly increasing bin edges. `has_absent`
/// appends one reserved code used for outer-join null sides; it is never
/// reachable from user predicates.
struct AttributeMeta {
  std::string name;
  AttrKind kind = AttrKind::Categorical;
  std::vector<std::string> values;  // categorical raw domain, sorted
  std::vector<double> edges;        // bin edges, strictly increasing
  bool has_absent = false;

  int base_domain_size() const {
    return kind == AttrKind::Categorical ? static_cast<int>(values.size())
                                         : static_cast<int>(edges.size()) - 1;
  }
  int domain_size() const { return base_domain_size() + (has_absent ? 1 : 0); }
  Code absent_code() const { return base_domain_size(); }

  bool numeric_domain() const;
  std::optional<Code> code_of(const std::string& raw) const;
  Code bin_of(double v) const;
  /// Raw value for a code (categorical only).
  const std::string& value_of(Code c) const;

  void check() const;
};

/// Column-encoded table. Storage is column-major; every code c for column i
/// satisfies 0 <= c < attrs[i].domain_size().
struct EncodedTable {
  std::string name;
  std::vector<AttributeMeta> attrs;
  std::vector<std::vector<Code>> columns;
  std::size_t row_count = 0;
  std::vector<std::pair<std::string, std::string>> metadata;

  int attr_index(std::string_view attr) const;
  int require_attr(std::string_view attr) const;
  void check() const;
};

struct AttrDecl {
  std::string name;
  AttrKind kind = AttrKind::Categorical;
  int bins = 64;
};

/// Parse an RFC-4180 CSV file (header row required). Returns rows of cells.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

/// Encode a CSV file into an EncodedTable. Rows with a missing (empty) value
/// in any declared column are dropped; the drop count lands in *dropped_rows
/// when provided.
EncodedTable load_table(const std::string& csv_path,
                        const std::string& table_name,
                        const std::vector<AttrDecl>& decls,
                        std::size_t* dropped_rows = nullptr);

/// Build equal-frequency bin edges for sorted-or-not numeric data.
std::vector<double> equal_frequency_edges(std::vector<double> data, int bins);

bool parse_number(const std::string& s, double& out);

}  // namespace cardest
