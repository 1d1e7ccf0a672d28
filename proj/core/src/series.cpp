#include "mchain/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mchain/error.hpp"

namespace mchain {
namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r' && c != '\n';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string row_error(const std::string& source, std::size_t row,
                      const std::string& what) {
  return source + ": row " + std::to_string(row) + ": " + what;
}

}  // namespace

SeriesFile::SeriesFile(std::vector<std::string> channels)
    : channels_(std::move(channels)), columns_(channels_.size()) {}

void SeriesFile::append(double t, std::span<const double> values,
                        std::size_t row) {
  const auto where = [&] {
    return row ? "row " + std::to_string(row) + ": " : std::string();
  };
  if (values.size() != channels_.size()) {
    throw IngestionError(where() + "expected " +
                         std::to_string(channels_.size()) + " values");
  }
  if (!std::isfinite(t)) throw IngestionError(where() + "time is not finite");
  if (!times_.empty() && !(t > times_.back())) {
    throw IngestionError(where() + "time " + format_double(t) +
                         " is not strictly increasing");
  }
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (!std::isfinite(values[c])) {
      throw IngestionError(where() + "channel '" + channels_[c] +
                           "' is not finite");
    }
  }
  times_.push_back(t);
  for (std::size_t c = 0; c < values.size(); ++c) {
    columns_[c].push_back(values[c]);
  }
}

std::size_t SeriesFile::channel_index(std::string_view name) const {
  const auto it = std::find(channels_.begin(), channels_.end(), name);
  if (it == channels_.end()) {
    throw IngestionError("series has no channel '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - channels_.begin());
}

bool SeriesFile::has_channel(std::string_view name) const {
  return std::find(channels_.begin(), channels_.end(), name) != channels_.end();
}

const std::vector<double>& SeriesFile::column(std::string_view name) const {
  return columns_[channel_index(name)];
}

double SeriesFile::value_at(std::size_t channel, double t,
                            Interpolation mode) const {
  const auto& col = columns_.at(channel);
  if (!covers(t)) {
    throw Error("series does not cover t=" + format_double(t));
  }
  const auto hi = std::lower_bound(times_.begin(), times_.end(), t);
  const auto j = static_cast<std::size_t>(hi - times_.begin());
  if (times_[j] == t) return col[j];
  const std::size_t i = j - 1;
  const double t0 = times_[i];
  const double t1 = times_[j];
  if (mode == Interpolation::Nearest) {
    return (t - t0) <= (t1 - t) ? col[i] : col[j];
  }
  const double w = (t - t0) / (t1 - t0);
  return col[i] + w * (col[j] - col[i]);
}

double SeriesFile::preceding(std::size_t channel, double t) const {
  const auto& col = columns_.at(channel);
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return col.front();
  return col[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw IngestionError("cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

SeriesFile parse_series(std::istream& in, std::span<const std::string> expected,
                        const std::string& source) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    for (auto f : split_csv(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw IngestionError(source + ": no rows");
  if (header.front() != "t") {
    throw IngestionError(source + ": first column must be 't'");
  }
  std::vector<std::string> channels(header.begin() + 1, header.end());
  for (const auto& name : expected) {
    if (std::find(channels.begin(), channels.end(), name) == channels.end()) {
      throw IngestionError(source + ": missing channel '" + name + "'");
    }
  }

  SeriesFile series(channels);
  std::vector<double> values(channels.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw IngestionError(row_error(source, row,
                                     "expected " + std::to_string(header.size()) +
                                         " fields, got " +
                                         std::to_string(fields.size())));
    }
    try {
      const double t = parse_double(fields[0]);
      for (std::size_t c = 0; c < channels.size(); ++c) {
        values[c] = parse_double(fields[c + 1]);
      }
      series.append(t, values);
    } catch (const IngestionError& e) {
      throw IngestionError(row_error(source, row, e.what()));
    }
  }
  if (series.empty()) throw IngestionError(source + ": no rows");
  return series;
}

SeriesFile load_series(const std::filesystem::path& path,
                       std::span<const std::string> expected) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string() + ": cannot open file");
  return parse_series(in, expected, path.string());
}

void write_series(std::ostream& os, const SeriesFile& series) {
  os << 't';
  for (const auto& c : series.channels()) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < series.rows(); ++r) {
    os << format_double(series.times()[r]);
    for (std::size_t c = 0; c < series.channels().size(); ++c) {
      os << ',' << format_double(series.column(c)[r]);
    }
    os << '\n';
  }
}

}  // namespace mchain
