#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mchain/pipeline.hpp"

namespace mchain {

/// Streaming mean / standard deviation (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Population standard deviation; 0 for fewer than two values.
  double std() const noexcept {
    return n_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(n_));
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// SCADA CSV: k,t,status,v4,p4,q4,latency,buffer,total_delay; debug adds the
/// per-stage values and CN errors.
void write_scada_csv(std::ostream& os, std::span<const ScadaRecord> records,
                     bool debug = false);

/// PMU CSV: report_time,v_mag,v_angle_deg,i_mag,i_angle_deg,gps_locked,
/// injected_angle_error_deg; debug adds the reference phasors.
void write_pmu_csv(std::ostream& os, std::span<const PmuFrame> frames,
                   bool debug = false);
/// One JSON object per frame with the same fields as the CSV.
void write_pmu_jsonl(std::ostream& os, std::span<const PmuFrame> frames,
                     bool debug = false);

/// key=value summary lines, in a fixed order.
using Summary = std::vector<std::pair<std::string, std::string>>;

/// Per-stage error mean/std against truth and the discard count.
Summary summarize_scada(std::span<const ScadaRecord> records);
/// Frame count, magnitude/angle error statistics, GPS-loss annotations.
Summary summarize_pmu(std::span<const PmuFrame> frames);
/// Latency / delay statistics and discard count of a schedule.
Summary summarize_cn(const CnRun& run);

void write_summary(std::ostream& os, const Summary& summary);

}  // namespace mchain
