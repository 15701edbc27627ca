#pragma once

// Observed maxima organized by group (random effects) or by series (MA/AR),
// plus the CSV formats used to exchange them.

#include <iosfwd>
#include <string>
#include <vector>

namespace stablemix {

struct Group {
  std::string key;
  std::vector<double> values;
};

/// Groups in order of first appearance.
struct GroupedSample {
  std::vector<Group> groups;

  std::size_t total_size() const;
  std::vector<double> pooled() const;
};

struct Series {
  std::string key;
  std::vector<double> values;  // in index order
};

struct SeriesSample {
  std::vector<Series> series;

  std::size_t total_size() const;
  std::vector<double> pooled() const;
};

// CSV with header. Grouped: `group,value`. Series: `series,index,value` with
// integer indices contiguous within each series (rows may be in any order).
GroupedSample read_grouped_csv(std::istream& in);
SeriesSample read_series_csv(std::istream& in);
GroupedSample read_grouped_csv(const std::string& path);
SeriesSample read_series_csv(const std::string& path);

void write_grouped_csv(std::ostream& out, const GroupedSample& data);
void write_series_csv(std::ostream& out, const SeriesSample& data);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace stablemix
