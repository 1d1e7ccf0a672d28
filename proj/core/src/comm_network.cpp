#include "mchain/comm_network.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "mchain/error.hpp"

namespace mchain {

const char* to_string(SampleStatus s) {
  return s == SampleStatus::Retained ? "retained" : "discarded";
}

std::size_t DelaySchedule::discarded_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.status == SampleStatus::Discarded;
  return n;
}

DelaySchedule schedule_from_latencies(std::span<const double> latencies,
                                      double sampling_period, Rng& rng,
                                      const ScheduleOptions& options) {
  if (!(sampling_period > 0.0) || !std::isfinite(sampling_period)) {
    throw InvalidArgument("delay schedule: sampling period must be > 0");
  }
  if (latencies.size() < 2) {
    throw InvalidArgument("delay schedule: at least two samples are required");
  }
  for (double l : latencies) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw InvalidArgument("delay schedule: latencies must be finite and >= 0");
    }
  }

  const double skew =
      options.time_skew ? rng.uniform(0.0, sampling_period) : 0.0;

  DelaySchedule schedule;
  schedule.sampling_period = sampling_period;
  schedule.entries.resize(latencies.size());
  for (std::size_t k = 0; k < latencies.size(); ++k) {
    DelayEntry& e = schedule.entries[k];
    e.k = k;
    e.send_time = options.start_time + static_cast<double>(k) * sampling_period + skew;
    e.latency = latencies[k];
    if (k + 1 < latencies.size()) {
      e.buffer_limit = sampling_period + (latencies[k + 1] - latencies[k]);
    }
    if (e.buffer_limit && *e.buffer_limit < 0.0) {
      e.status = SampleStatus::Discarded;
      e.buffer_draw = 0.0;
    } else if (e.buffer_limit && options.buffer == BufferMode::Uniform) {
      e.buffer_draw = rng.uniform(0.0, *e.buffer_limit);
    } else {
      e.buffer_draw = 0.0;
    }
    e.total_delay = e.latency + e.buffer_draw;
  }
  return schedule;
}

DelaySchedule build_delay_schedule(const LmmParams& latency,
                                   double sampling_period,
                                   std::size_t n_samples, Rng& rng,
                                   const ScheduleOptions& options) {
  latency.validate();
  if (!(sampling_period > 0.0) || !std::isfinite(sampling_period)) {
    throw InvalidArgument("delay schedule: sampling period must be > 0");
  }
  if (n_samples < 2) {
    throw InvalidArgument("delay schedule: at least two samples are required");
  }
  const auto latencies = sample_lmm(latency, n_samples, rng);
  return schedule_from_latencies(latencies, sampling_period, rng, options);
}

void write_schedule_csv(std::ostream& os, const DelaySchedule& schedule) {
  os << "k,send_time,latency,b_k,buffer,total_delay,status\n";
  for (const auto& e : schedule.entries) {
    os << e.k << ',' << format_double(e.send_time) << ','
       << format_double(e.latency) << ','
       << (e.buffer_limit ? format_double(*e.buffer_limit) : std::string())
       << ',' << format_double(e.buffer_draw) << ','
       << format_double(e.total_delay) << ',' << to_string(e.status) << '\n';
  }
}

void Scheme2Config::validate() const {
  v.validate();
  p.validate();
  q.validate();
}

std::vector<CnErrors> scheme1_errors(const SeriesFile& history,
                                     const DelaySchedule& schedule,
                                     Interpolation mode) {
  const std::size_t cv = history.channel_index("v");
  const std::size_t cp = history.channel_index("p");
  const std::size_t cq = history.channel_index("q");

  std::vector<CnErrors> out(schedule.size());
  for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
    const DelayEntry& e = schedule.entries[idx];
    const double t0 = e.send_time;
    const double t1 = e.send_time + e.total_delay;
    for (double t : {t0, t1}) {
      if (!history.covers(t)) {
        throw SimulationError(
            "cn_scheme1", e.k,
            "history [" + format_double(history.empty() ? 0.0 : history.start()) +
                ", " + format_double(history.empty() ? 0.0 : history.end()) +
                "] does not cover t=" + format_double(t));
      }
    }
    auto& err = out[idx];
    err.v = history.value_at(cv, t1, mode) - history.value_at(cv, t0, mode);
    err.p = history.value_at(cp, t1, mode) - history.value_at(cp, t0, mode);
    err.q = history.value_at(cq, t1, mode) - history.value_at(cq, t0, mode);
  }
  return out;
}

std::vector<CnErrors> scheme2_errors(const Scheme2Config& config,
                                     std::size_t n, Rng& rng) {
  config.validate();
  std::vector<CnErrors> out(n);
  for (auto& e : out) {
    e.v = draw_gmm(config.v, rng);
    e.p = draw_gmm(config.p, rng);
    e.q = draw_gmm(config.q, rng);
  }
  return out;
}

}  // namespace mchain
