// Copyright 2026 The dpgrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPGRID_IO_HPP_
#define DPGRID_IO_HPP_

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dpgrid/histogram.hpp"

namespace dpgrid {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace internal {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

inline bool is_points_header(std::string_view a, std::string_view b) {
  const std::string x = lower(trim(a));
  const std::string y = lower(trim(b));
  return (x == "x" && y == "y") || (x == "lon" && y == "lat") ||
         (x == "lng" && y == "lat") || (x == "longitude" && y == "latitude");
}

// Shortest decimal that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace internal

struct LoadedPoints {
  PointSet points;
  std::size_t rejected = 0;  // rows outside an explicit domain
};

// Reads "x,y" rows with an optional "x,y" header. The domain is the bounding
// box of the rows unless `domain` is given, in which case rows outside it are
// dropped and counted.
inline LoadedPoints read_points_csv(std::istream& in,
                                    std::optional<Rect> domain = std::nullopt) {
  std::vector<Point> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = internal::trim(line);
    if (lineno == 1 && sv.size() >= 3 &&
        sv.substr(0, 3) == "\xEF\xBB\xBF") {  // UTF-8 BOM
      sv = internal::trim(sv.substr(3));
    }
    if (sv.empty()) continue;
    const auto fields = internal::split(sv, ',');
    if (fields.size() != 2) {
      throw ParseError(lineno, "expected 2 fields, got " +
                                   std::to_string(fields.size()));
    }
    if (!seen_content && internal::is_points_header(fields[0], fields[1])) {
      seen_content = true;
      continue;
    }
    seen_content = true;
    const auto x = internal::parse_double(fields[0]);
    const auto y = internal::parse_double(fields[1]);
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
      throw ParseError(lineno, "cannot parse '" + std::string(sv) + "'");
    }
    rows.push_back(Point{*x, *y});
  }
  if (rows.empty()) throw std::runtime_error("empty dataset");

  LoadedPoints out;
  Rect d;
  if (domain) {
    if (!domain->valid()) throw std::invalid_argument("invalid domain");
    d = *domain;
  } else {
    d = Rect{rows[0].x, rows[0].y, rows[0].x, rows[0].y};
    for (const Point& p : rows) {
      d.x_min = std::min(d.x_min, p.x);
      d.y_min = std::min(d.y_min, p.y);
      d.x_max = std::max(d.x_max, p.x);
      d.y_max = std::max(d.y_max, p.y);
    }
    // Degenerate extents get a unit-width domain around the data.
    if (!(d.x_max > d.x_min)) {
      d.x_min -= 0.5;
      d.x_max += 0.5;
    }
    if (!(d.y_max > d.y_min)) {
      d.y_min -= 0.5;
      d.y_max += 0.5;
    }
  }
  out.points = PointSet(d);
  for (const Point& p : rows) {
    if (d.contains(p)) {
      out.points.add(p);
    } else {
      ++out.rejected;
    }
  }
  if (out.points.empty()) throw std::runtime_error("empty dataset");
  return out;
}

inline LoadedPoints load_points_csv(const std::string& path,
                                    std::optional<Rect> domain = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_points_csv(in, domain);
}

inline void write_points_csv(std::ostream& out, const PointSet& ps) {
  out << "x,y\n";
  for (const Point& p : ps.points()) {
    out << internal::format_double(p.x) << ',' << internal::format_double(p.y)
        << '\n';
  }
}

template <typename Count>
void write_histogram_csv(std::ostream& out, const BasicHistogram<Count>& h) {
  out << "cell_index,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << i << ',' << internal::format_double(static_cast<double>(h.counts[i]))
        << '\n';
  }
}

// Reads a `cell_index,count` file. The row count must be a perfect square.
inline NoisyHistogram read_histogram_csv(std::istream& in, const Rect& domain) {
  std::vector<double> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = internal::trim(line);
    if (sv.empty()) continue;
    const auto fields = internal::split(sv, ',');
    if (fields.size() != 2) throw ParseError(lineno, "expected 2 fields");
    if (lineno == 1 && internal::trim(fields[0]) == "cell_index") continue;
    const auto idx = internal::parse_double(fields[0]);
    const auto val = internal::parse_double(fields[1]);
    if (!idx || !val || *idx != static_cast<double>(counts.size())) {
      throw ParseError(lineno, "bad or out-of-order row '" + std::string(sv) +
                                   "'");
    }
    counts.push_back(*val);
  }
  const auto g = static_cast<int>(std::lround(std::sqrt(counts.size())));
  if (counts.empty() || static_cast<std::size_t>(g) * g != counts.size()) {
    throw std::runtime_error("histogram row count is not a perfect square");
  }
  return NoisyHistogram(GridSpec(domain, g), std::move(counts));
}

// "x_min,y_min,x_max,y_max"
inline Rect parse_rect(std::string_view s) {
  const auto f = internal::split(s, ',');
  if (f.size() != 4) {
    throw std::invalid_argument("rectangle needs 4 comma-separated numbers");
  }
  double v[4];
  for (int i = 0; i < 4; ++i) {
    const auto d = internal::parse_double(f[i]);
    if (!d) throw std::invalid_argument("bad rectangle '" + std::string(s) + "'");
    v[i] = *d;
  }
  return make_rect(v[0], v[1], v[2], v[3]);
}

}  // namespace dpgrid

#endif  // DPGRID_IO_HPP_
