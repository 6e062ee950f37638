#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stlrob/error.hpp"
#include "stlrob/formula.hpp"

namespace stlrob {

/// Uniformly sampled multi-channel signal. Values are stored row-major,
/// one row per time step.
class Trace {
 public:
  Trace() = default;

  Trace(std::vector<std::string> channels, std::vector<double> values)
      : channels_(std::move(channels)), values_(std::move(values)) {
    if (channels_.empty()) throw DomainError("trace needs at least one channel");
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (channels_[i] == channels_[j]) {
          throw DomainError("duplicate channel '" + channels_[i] + "'");
        }
      }
    }
    if (values_.size() % channels_.size() != 0) {
      throw DomainError("value count is not a multiple of the channel count");
    }
  }

  /// Builds a trace from one vector of samples per channel.
  static Trace from_columns(const std::vector<std::string>& names,
                            const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size()) throw DomainError("channel/column count mismatch");
    const std::size_t len = columns.empty() ? 0 : columns.front().size();
    std::vector<double> v;
    v.reserve(len * names.size());
    for (const auto& c : columns) {
      if (c.size() != len) throw DomainError("channels have different lengths");
    }
    for (std::size_t t = 0; t < len; ++t) {
      for (const auto& c : columns) v.push_back(c[t]);
    }
    return Trace(names, std::move(v));
  }

  std::size_t length() const noexcept {
    return channels_.empty() ? 0 : values_.size() / channels_.size();
  }
  std::size_t width() const noexcept { return channels_.size(); }
  const std::vector<std::string>& channels() const noexcept { return channels_; }

  std::size_t channel_index(std::string_view name) const {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      if (channels_[i] == name) return i;
    }
    throw DomainError("trace has no channel '" + std::string(name) + "'");
  }

  double at(std::size_t t, std::size_t channel) const { return values_[t * width() + channel]; }
  double at(std::size_t t, std::string_view channel) const { return at(t, channel_index(channel)); }

  std::vector<double> column(std::size_t channel) const {
    std::vector<double> c(length());
    for (std::size_t t = 0; t < c.size(); ++t) c[t] = at(t, channel);
    return c;
  }

  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const Trace&) const = default;

 private:
  std::vector<std::string> channels_;
  std::vector<double> values_;
};

/// Physical range of one channel; maps min to -1 and max to +1.
struct Range {
  double min = -1.0;
  double max = 1.0;

  double half_width() const { return 0.5 * (max - min); }
  double center() const { return 0.5 * (max + min); }
  double to_normalized(double v) const { return 2.0 * (v - min) / (max - min) - 1.0; }
  double to_physical(double v) const { return min + (v + 1.0) * (max - min) / 2.0; }
};

using NormalizationMap = std::map<std::string, Range, std::less<>>;

namespace detail {

inline const Range& range_for(const NormalizationMap& map, const std::string& channel) {
  auto it = map.find(channel);
  if (it == map.end()) throw DomainError("no normalization range for channel '" + channel + "'");
  if (!(it->second.max > it->second.min)) {
    throw DomainError("degenerate range for channel '" + channel + "' (max <= min)");
  }
  return it->second;
}

}  // namespace detail

/// Affine map of every channel onto [-1,1]. Out-of-range values are an error,
/// never clamped.
inline Trace normalize(const Trace& raw, const NormalizationMap& map) {
  std::vector<const Range*> ranges;
  for (const auto& c : raw.channels()) ranges.push_back(&detail::range_for(map, c));
  std::vector<double> out(raw.values().size());
  for (std::size_t t = 0; t < raw.length(); ++t) {
    for (std::size_t c = 0; c < raw.width(); ++c) {
      const double v = raw.at(t, c);
      const Range& r = *ranges[c];
      if (!(v >= r.min && v <= r.max)) {
        throw DomainError("channel '" + raw.channels()[c] + "' at step " + std::to_string(t) +
                          " has value " + Formula::format_number(v) + " outside [" +
                          Formula::format_number(r.min) + "," + Formula::format_number(r.max) +
                          "]");
      }
      out[t * raw.width() + c] = r.to_normalized(v);
    }
  }
  return Trace(raw.channels(), std::move(out));
}

inline Trace denormalize(const Trace& normalized, const NormalizationMap& map) {
  std::vector<double> out(normalized.values().size());
  for (std::size_t c = 0; c < normalized.width(); ++c) {
    const Range& r = detail::range_for(map, normalized.channels()[c]);
    for (std::size_t t = 0; t < normalized.length(); ++t) {
      out[t * normalized.width() + c] = r.to_physical(normalized.at(t, c));
    }
  }
  return Trace(normalized.channels(), std::move(out));
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <class T>
T parse_cell(std::string_view cell, std::size_t line_no) {
  T v{};
  const char* first = cell.data();
  if (!cell.empty() && cell.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw FormatError("line " + std::to_string(line_no) + ": non-numeric cell '" +
                      std::string(cell) + "'");
  }
  return v;
}

}  // namespace detail

/// Reads the CSV trace schema: header `t,<ch1>,...`, then one row per step
/// with consecutive step indices starting at 0.
inline Trace read_trace(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = detail::split_csv(line);
    if (cells.size() < 2 || cells.front() != "t") {
      throw FormatError("line " + std::to_string(line_no) + ": header must be t,<channel>,...");
    }
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i].empty()) throw FormatError("empty channel name in header");
      names.emplace_back(cells[i]);
    }
    break;
  }
  if (names.empty()) throw FormatError("missing header");

  std::vector<double> values;
  long expected_step = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != names.size() + 1) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(names.size() + 1) + " cells, got " +
                        std::to_string(cells.size()));
    }
    const long step = detail::parse_cell<long>(cells[0], line_no);
    if (step != expected_step) {
      throw FormatError("line " + std::to_string(line_no) + ": step index " +
                        std::to_string(step) + " out of sequence (expected " +
                        std::to_string(expected_step) + ")");
    }
    ++expected_step;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      values.push_back(detail::parse_cell<double>(cells[i], line_no));
    }
  }
  if (values.empty()) throw FormatError("trace has no data rows");
  return Trace(std::move(names), std::move(values));
}

inline void write_trace(std::ostream& out, const Trace& trace) {
  out << "t";
  for (const auto& c : trace.channels()) out << ',' << c;
  out << '\n';
  for (std::size_t t = 0; t < trace.length(); ++t) {
    out << t;
    for (std::size_t c = 0; c < trace.width(); ++c) {
      out << ',' << Formula::format_number(trace.at(t, c));
    }
    out << '\n';
  }
}

inline Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_trace(in);
}

inline void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  write_trace(out, trace);
}

}  // namespace stlrob
