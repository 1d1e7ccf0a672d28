#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mchain/distributions.hpp"
#include "mchain/rng.hpp"
#include "mchain/series.hpp"

namespace mchain {

enum class SampleStatus { Retained, Discarded };

const char* to_string(SampleStatus s);

/// Timing of one SCADA sample through the communication network.
struct DelayEntry {
  std::size_t k = 0;
  double send_time = 0.0;
  double latency = 0.0;
  /// S + latency[k+1] - latency[k]; empty for the last sample.
  std::optional<double> buffer_limit;
  double buffer_draw = 0.0;
  double total_delay = 0.0;
  SampleStatus status = SampleStatus::Retained;

  double arrival() const noexcept { return send_time + latency; }
};

struct DelaySchedule {
  double sampling_period = 0.0;
  std::vector<DelayEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::size_t discarded_count() const;
};

enum class BufferMode {
  Uniform,  // buffer ~ U(0, b_k)
  Zero,     // buffer = 0 (delay equals latency)
};

struct ScheduleOptions {
  double start_time = 0.0;
  BufferMode buffer = BufferMode::Uniform;
  /// Draw one send-time offset in [0, S) for the whole channel.
  bool time_skew = false;
};

/// Schedule from explicit latencies (seconds). Sample k is sent at
/// start_time + k * S (+ skew); it is discarded when b_k < 0.
DelaySchedule schedule_from_latencies(std::span<const double> latencies,
                                      double sampling_period, Rng& rng,
                                      const ScheduleOptions& options = {});

/// Latencies drawn from the lognormal mixture, then schedule_from_latencies.
DelaySchedule build_delay_schedule(const LmmParams& latency,
                                   double sampling_period,
                                   std::size_t n_samples, Rng& rng,
                                   const ScheduleOptions& options = {});

/// Audit CSV: k,send_time,latency,b_k,buffer,total_delay,status.
void write_schedule_csv(std::ostream& os, const DelaySchedule& schedule);

struct CnErrors {
  double v = 0.0;
  double p = 0.0;
  double q = 0.0;
};

/// Scheme 2 mixtures for the V, P and Q channels.
struct Scheme2Config {
  GmmParams v;
  GmmParams p;
  GmmParams q;

  void validate() const;
};

/// e = z(t_k + delay_k) - z(t_k) per channel, with z evaluated from a
/// historical series holding channels "v", "p" and "q". Throws
/// SimulationError naming the first instant the history does not cover.
std::vector<CnErrors> scheme1_errors(const SeriesFile& history,
                                     const DelaySchedule& schedule,
                                     Interpolation mode = Interpolation::Linear);

/// Three independent mixture draws (V, P, Q) per sample.
std::vector<CnErrors> scheme2_errors(const Scheme2Config& config,
                                     std::size_t n, Rng& rng);

struct CnOutput {
  double v4 = 0.0;
  double p4 = 0.0;
  double q4 = 0.0;
};

inline CnOutput apply_cn(double v3, double p3, double q3, const CnErrors& e) {
  return {v3 + e.v, p3 + e.p, q3 + e.q};
}

}  // namespace mchain
