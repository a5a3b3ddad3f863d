#include "cardest/table.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cardest {

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return false;
  out = v;
  return true;
}

bool AttributeMeta::numeric_domain() const {
  if (kind == AttrKind::BinnedContinuous) return true;
  double tmp;
  for (const auto& v : values)
    if (!parse_number(v, tmp)) return false;
  return !values.empty();
}

std::optional<Code> AttributeMeta::code_of(const std::string& raw) const {
  if (kind != AttrKind::Categorical)
    throw Error("code_of only applies to categorical attributes");
  auto it = std::find(values.begin(), values.end(), raw);
  if (it == values.end()) return std::nullopt;
  return static_cast<Code>(it - values.begin());
}

Code AttributeMeta::bin_of(double v) const {
  if (kind != AttrKind::BinnedContinuous)
    throw Error("bin_of only applies to binned attributes");
  // Bin k covers [edges[k], edges[k+1]); the last bin is closed on the right.
  // Out-of-range values clamp to the nearest bin.
  if (v <= edges.front()) return 0;
  if (v >= edges.back()) return static_cast<Code>(edges.size()) - 2;
  auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<Code>(it - edges.begin()) - 1;
}

const std::string& AttributeMeta::value_of(Code c) const {
  if (kind != AttrKind::Categorical || c < 0 ||
      c >= static_cast<Code>(values.size()))
    throw Error("value_of: code out of domain for attribute " + name);
  return values[static_cast<std::size_t>(c)];
}

void AttributeMeta::check() const {
  if (kind == AttrKind::Categorical) {
    if (values.empty()) throw Error("attribute " + name + " has empty domain");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] == values[i - 1])
        throw Error("attribute " + name + " has duplicate domain values");
  } else {
    if (edges.size() < 2)
      throw Error("attribute " + name + " needs at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (!(edges[i] > edges[i - 1]))
        throw Error("attribute " + name + " has non-increasing bin edges");
  }
}

int EncodedTable::attr_index(std::string_view attr) const {
  for (std::size_t i = 0; i < attrs.size(); ++i)
    if (attrs[i].name == attr) return static_cast<int>(i);
  return -1;
}

int EncodedTable::require_attr(std::string_view attr) const {
  int idx = attr_index(attr);
  if (idx < 0)
    throw Error("attribute " + std::string(attr) + " not found in table " + name);
  return idx;
}

void EncodedTable::check() const {
  if (columns.size() != attrs.size())
    throw Error("table " + name + ": column/attr count mismatch");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    attrs[i].check();
    if (columns[i].size() != row_count)
      throw Error("table " + name + ": ragged column " + attrs[i].name);
    const Code d = attrs[i].domain_size();
    for (Code c : columns[i])
      if (c < 0 || c >= d)
        throw Error("table " + name + ": code out of range in " + attrs[i].name);
  }
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  std::size_t i = 0;
  const std::size_t n = content.size();
  auto end_cell = [&] { row.push_back(std::move(cell)); cell.clear(); };
  auto end_row = [&] {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < n) {
    char ch = content[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < n && content[i + 1] == '"') { cell += '"'; i += 2; continue; }
        quoted = false;
        ++i;
      } else {
        cell += ch;
        ++i;
      }
    } else if (ch == '"' && cell.empty()) {
      quoted = true;
      ++i;
    } else if (ch == ',') {
      end_cell();
      ++i;
    } else if (ch == '\r') {
      ++i;
    } else if (ch == '\n') {
      end_row();
      ++i;
    } else {
      cell += ch;
      ++i;
    }
  }
  if (quoted) throw Error("unterminated quote in " + path);
  if (!cell.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<double> equal_frequency_edges(std::vector<double> data, int bins) {
  if (data.empty()) throw Error("cannot bin an empty column");
  if (bins < 1) throw Error("bin count must be positive");
  std::sort(data.begin(), data.end());
  std::vector<double> edges;
  edges.push_back(data.front());
  const std::size_t n = data.size();
  for (int k = 1; k < bins; ++k) {
    std::size_t idx = (n * static_cast<std::size_t>(k)) / static_cast<std::size_t>(bins);
    double e = data[idx];
    if (e > edges.back()) edges.push_back(e);
  }
  if (data.back() > edges.back())
    edges.push_back(data.back());
  else
    edges.push_back(edges.back() + 1.0);  // constant column: one degenerate bin
  return edges;
}

namespace {

bool numeric_less(const std::string& a, const std::string& b) {
  double x, y;
  if (parse_number(a, x) && parse_number(b, y)) {
    if (x != y) return x < y;
    return a < b;
  }
  return a < b;
}

}  // namespace

EncodedTable load_table(const std::string& csv_path,
                        const std::string& table_name,
                        const std::vector<AttrDecl>& decls,
                        std::size_t* dropped_rows) {
  auto rows = read_csv(csv_path);
  if (rows.empty()) throw Error("missing header row in " + csv_path);
  const auto& header = rows.front();

  std::vector<int> col_of;
  for (const auto& d : decls) {
    auto it = std::find(header.begin(), header.end(), d.name);
    if (it == header.end())
      throw Error("attribute " + d.name + " not found in header of " + csv_path);
    col_of.push_back(static_cast<int>(it - header.begin()));
  }

  // First pass: keep rows with all declared cells present.
  std::vector<std::size_t> kept;
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    bool ok = true;
    for (int c : col_of) {
      if (c >= static_cast<int>(rows[r].size()) || rows[r][c].empty()) {
        ok = false;
        break;
      }
    }
    if (ok)
      kept.push_back(r);
    else
      ++dropped;
  }
  if (dropped_rows) *dropped_rows = dropped;
  if (kept.empty()) throw Error("zero usable rows in " + csv_path);

  EncodedTable t;
  t.name = table_name;
  t.row_count = kept.size();
  for (std::size_t a = 0; a < decls.size(); ++a) {
    const auto& d = decls[a];
    const int col = col_of[a];
    AttributeMeta meta;
    meta.name = d.name;
    meta.kind = d.kind;
    std::vector<Code> codes(kept.size());
    if (d.kind == AttrKind::Categorical) {
      std::vector<std::string> distinct;
      for (std::size_t r : kept) distinct.push_back(rows[r][col]);
      std::sort(distinct.begin(), distinct.end(), numeric_less);
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      meta.values = distinct;
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& raw = rows[kept[i]][col];
        auto it = std::lower_bound(distinct.begin(), distinct.end(), raw, numeric_less);
        codes[i] = static_cast<Code>(it - distinct.begin());
      }
    } else {
      std::vector<double> vals(kept.size());
      for (std::size_t i = 0; i < kept.size(); ++i) {
        if (!parse_number(rows[kept[i]][col], vals[i]))
          throw Error("non-numeric value in continuous attribute " + d.name);
      }
      meta.edges = equal_frequency_edges(vals, d.bins);
      for (std::size_t i = 0; i < kept.size(); ++i) codes[i] = meta.bin_of(vals[i]);
    }
    t.attrs.push_back(std::move(meta));
    t.columns.push_back(std::move(codes));
  }
  t.check();
  return t;
}

}  // namespace cardest
