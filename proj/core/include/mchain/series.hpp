#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mchain {

enum class Interpolation { Linear, Nearest };

/// Time series with named channels and strictly increasing timestamps.
class SeriesFile {
 public:
  SeriesFile() = default;
  explicit SeriesFile(std::vector<std::string> channels);

  /// Appends a row; throws IngestionError if t does not increase or any value
  /// is non-finite. `row` is the 1-based data row used in error messages.
  void append(double t, std::span<const double> values, std::size_t row = 0);

  const std::vector<std::string>& channels() const noexcept { return channels_; }
  std::size_t rows() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& column(std::size_t c) const { return columns_.at(c); }
  const std::vector<double>& column(std::string_view name) const;
  std::size_t channel_index(std::string_view name) const;
  bool has_channel(std::string_view name) const;

  double start() const { return times_.front(); }
  double end() const { return times_.back(); }
  double span() const { return empty() ? 0.0 : end() - start(); }
  bool covers(double t) const { return !empty() && t >= start() && t <= end(); }

  /// Channel value at t (inside [start, end]); linear or nearest-sample.
  double value_at(std::size_t channel, double t, Interpolation mode) const;
  /// Value of the last row with time <= t (first row when t < start).
  double preceding(std::size_t channel, double t) const;

 private:
  std::vector<std::string> channels_;
  std::vector<double> times_;
  std::vector<std::vector<double>> columns_;
};

/// Parses CSV with a header line whose first column is `t`. Every name in
/// `expected` must be present; other columns are kept too. Errors name the
/// 1-based data row.
SeriesFile parse_series(std::istream& in, std::span<const std::string> expected,
                        const std::string& source = "<stream>");
SeriesFile load_series(const std::filesystem::path& path,
                       std::span<const std::string> expected);

void write_series(std::ostream& os, const SeriesFile& series);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);
/// Strict decimal parse; throws IngestionError on trailing garbage.
double parse_double(std::string_view text);

}  // namespace mchain
