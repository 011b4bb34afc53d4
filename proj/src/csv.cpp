#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hcmap/serialization.hpp"

namespace hcmap {

namespace {

constexpr double kAsymmetryTolerance = 1e-9;
constexpr double kDiagonalTolerance = 1e-12;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

struct Row {
  std::size_t line;
  std::vector<std::string_view> cells;
};

std::vector<Row> split_rows(std::string_view text) {
  std::vector<Row> rows;
  std::size_t line = 0;
  while (!text.empty()) {
    ++line;
    const auto eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (trim(raw).empty()) continue;
    Row row{line, {}};
    while (true) {
      const auto comma = raw.find(',');
      row.cells.push_back(trim(raw.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      raw = raw.substr(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

bool parse_number(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size() && std::isfinite(out);
}

double number_at(const Row& row, std::size_t column) {
  double value = 0.0;
  if (!parse_number(row.cells[column], value))
    throw Error(Errc::NonNumericValue, "line " + std::to_string(row.line) + ", column " +
                                           std::to_string(column + 1) + ": '" + std::string(row.cells[column]) +
                                           "' is not a finite number");
  return value;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

TimeSeriesSet parse_series_csv(std::string_view text) {
  auto rows = split_rows(text);
  if (rows.empty()) throw Error(Errc::RaggedRows, "series csv is empty");
  double probe = 0.0;
  if (rows.front().cells.size() >= 2 && !parse_number(rows.front().cells[1], probe)) rows.erase(rows.begin());
  if (rows.empty()) throw Error(Errc::RaggedRows, "series csv has a header but no rows");

  const std::size_t columns = rows.front().cells.size();
  if (columns < 2) throw Error(Errc::RaggedRows, "line " + std::to_string(rows.front().line) + ": no observations");
  TimeSeriesSet series;
  series.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(columns - 1));
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != columns)
      throw Error(Errc::RaggedRows, "line " + std::to_string(row.line) + ": expected " + std::to_string(columns) +
                                        " cells, found " + std::to_string(row.cells.size()));
    std::string id(row.cells[0]);
    if (!seen.insert(id).second)
      throw Error(Errc::DuplicateIds, "line " + std::to_string(row.line) + ": duplicate id '" + id + "'");
    series.ids.push_back(std::move(id));
    for (std::size_t c = 1; c < columns; ++c)
      series.values(static_cast<Index>(r), static_cast<Index>(c - 1)) = number_at(row, c);
  }
  return series;
}

TimeSeriesSet load_series_csv(const std::filesystem::path& path) { return parse_series_csv(slurp(path)); }

std::string format_series_csv(const TimeSeriesSet& series) {
  std::string out;
  for (Index i = 0; i < series.size(); ++i) {
    out += series.ids.at(static_cast<std::size_t>(i));
    for (Index t = 0; t < series.length(); ++t) out += "," + format_double(series.values(i, t));
    out += '\n';
  }
  return out;
}

DistanceMatrix parse_distance_csv(std::string_view text) {
  const auto rows = split_rows(text);
  if (rows.empty()) throw Error(Errc::NotSquare, "distance csv is empty");
  const auto& header = rows.front();
  const std::size_t n = header.cells.size() - 1;
  if (n == 0 || rows.size() - 1 != n)
    throw Error(Errc::NotSquare, "distance csv has " + std::to_string(n) + " columns and " +
                                     std::to_string(rows.size() - 1) + " rows");

  DistanceMatrix dmat;
  dmat.d.resize(static_cast<Index>(n), static_cast<Index>(n));
  std::unordered_set<std::string> seen;
  for (std::size_t j = 0; j < n; ++j) {
    dmat.ids.emplace_back(header.cells[j + 1]);
    if (!seen.insert(dmat.ids.back()).second)
      throw Error(Errc::DuplicateIds, "distance csv: duplicate id '" + dmat.ids.back() + "'");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.cells.size() != n + 1)
      throw Error(Errc::NotSquare, "line " + std::to_string(row.line) + ": expected " + std::to_string(n + 1) +
                                       " cells, found " + std::to_string(row.cells.size()));
    if (row.cells[0] != dmat.ids[i])
      throw Error(Errc::NotSquare, "line " + std::to_string(row.line) + ": row id '" + std::string(row.cells[0]) +
                                       "' does not match column id '" + dmat.ids[i] + "'");
    for (std::size_t j = 0; j < n; ++j) dmat.d(static_cast<Index>(i), static_cast<Index>(j)) = number_at(row, j + 1);
  }

  for (Index i = 0; i < dmat.d.rows(); ++i) {
    if (std::abs(dmat.d(i, i)) > kDiagonalTolerance)
      throw Error(Errc::NonzeroDiagonal, "distance csv: diagonal entry for '" + dmat.ids[i] + "' is " +
                                             format_double(dmat.d(i, i)));
    dmat.d(i, i) = 0.0;
    for (Index j = i + 1; j < dmat.d.cols(); ++j) {
      const double a = dmat.d(i, j), b = dmat.d(j, i);
      if (std::abs(a - b) > kAsymmetryTolerance)
        throw Error(Errc::AsymmetryBeyondTolerance, "distance csv: entries (" + dmat.ids[i] + ", " + dmat.ids[j] +
                                                        ") differ by " + format_double(std::abs(a - b)));
      if (a < 0.0 || b < 0.0)
        throw Error(Errc::NegativeDistance, "distance csv: negative entry (" + dmat.ids[i] + ", " + dmat.ids[j] + ")");
      const double mean = (a + b) / 2.0;
      dmat.d(i, j) = mean;
      dmat.d(j, i) = mean;
    }
  }
  return dmat;
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path) { return parse_distance_csv(slurp(path)); }

std::string format_distance_csv(const DistanceMatrix& dmat) {
  std::string out = "id";
  for (const auto& id : dmat.ids) out += "," + id;
  out += '\n';
  for (Index i = 0; i < dmat.size(); ++i) {
    out += dmat.ids.at(static_cast<std::size_t>(i));
    for (Index j = 0; j < dmat.size(); ++j) out += "," + format_double(dmat.d(i, j));
    out += '\n';
  }
  return out;
}

}  // namespace hcmap
