#include "stablemix/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "stablemix/error.hpp"

namespace stablemix {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_row(std::size_t line_no, const std::string& why) {
  fail(ErrorCode::data, "line " + std::to_string(line_no) + ": " + why);
}

double parse_value(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v))
    bad_row(line_no, "'" + text + "' is not a finite number");
  return v;
}

long long parse_index(const std::string& text, std::size_t line_no) {
  long long v = 0;
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (ec != std::errc{} || ptr != last) bad_row(line_no, "'" + text + "' is not an integer index");
  return v;
}

// Reads the header and returns the data rows as trimmed cells.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(
    std::istream& in, const std::vector<std::string>& header) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    for (auto& c : cells) c = trim(c);
    if (!have_header) {
      if (cells != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        bad_row(line_no, "expected header '" + want + "'");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != header.size())
      bad_row(line_no, "expected " + std::to_string(header.size()) + " columns");
    rows.emplace_back(line_no, std::move(cells));
  }
  if (!have_header) fail(ErrorCode::data, "empty input: missing header");
  if (rows.empty()) fail(ErrorCode::data, "input has a header but no data rows");
  return rows;
}

template <class T>
std::vector<double> concat(const std::vector<T>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) out.insert(out.end(), p.values.begin(), p.values.end());
  return out;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::data, "cannot open '" + path + "'");
  return in;
}

}  // namespace

std::size_t GroupedSample::total_size() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.values.size();
  return n;
}

std::vector<double> GroupedSample::pooled() const { return concat(groups); }

std::size_t SeriesSample::total_size() const {
  std::size_t n = 0;
  for (const auto& s : series) n += s.values.size();
  return n;
}

std::vector<double> SeriesSample::pooled() const { return concat(series); }

GroupedSample read_grouped_csv(std::istream& in) {
  GroupedSample out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& [line_no, cells] : read_rows(in, {"group", "value"})) {
    if (cells[0].empty()) bad_row(line_no, "empty group key");
    const double v = parse_value(cells[1], line_no);
    auto [it, inserted] = index.try_emplace(cells[0], out.groups.size());
    if (inserted) out.groups.push_back({cells[0], {}});
    out.groups[it->second].values.push_back(v);
  }
  return out;
}

SeriesSample read_series_csv(std::istream& in) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::map<long long, double>> by_key;
  for (const auto& [line_no, cells] : read_rows(in, {"series", "index", "value"})) {
    if (cells[0].empty()) bad_row(line_no, "empty series key");
    const long long idx = parse_index(cells[1], line_no);
    const double v = parse_value(cells[2], line_no);
    auto [it, inserted] = by_key.try_emplace(cells[0]);
    if (inserted) order.push_back(cells[0]);
    if (!it->second.emplace(idx, v).second)
      bad_row(line_no, "duplicate index " + std::to_string(idx) + " in series '" + cells[0] + "'");
  }
  SeriesSample out;
  for (const auto& key : order) {
    const auto& rows = by_key.at(key);
    Series s{key, {}};
    long long expected = rows.begin()->first;
    for (const auto& [idx, v] : rows) {
      if (idx != expected)
        fail(ErrorCode::data, "series '" + key + "' has a gap before index " + std::to_string(idx));
      s.values.push_back(v);
      ++expected;
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

GroupedSample read_grouped_csv(const std::string& path) {
  auto in = open(path);
  return read_grouped_csv(in);
}

SeriesSample read_series_csv(const std::string& path) {
  auto in = open(path);
  return read_series_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_grouped_csv(std::ostream& out, const GroupedSample& data) {
  out << "group,value\n";
  for (const auto& g : data.groups)
    for (double v : g.values) out << g.key << ',' << format_double(v) << '\n';
}

void write_series_csv(std::ostream& out, const SeriesSample& data) {
  out << "series,index,value\n";
  for (const auto& s : data.series)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out << s.key << ',' << i << ',' << format_double(s.values[i]) << '\n';
}

}  // namespace stablemix
