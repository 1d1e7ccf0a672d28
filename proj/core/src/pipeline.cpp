#include "mchain/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mchain/error.hpp"

namespace mchain {
namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

template <class F>
auto attributed(std::string_view stage, std::optional<std::size_t> sample, F&& f) {
  try {
    return f();
  } catch (const SimulationError&) {
    throw;
  } catch (const IngestionError&) {
    throw;
  } catch (const Error& e) {
    throw SimulationError(std::string(stage), sample, e.what());
  }
}

}  // namespace

Rng stage_rng(const RunConfig& config, std::string_view stage) {
  const auto it = config.seed_overrides.find(std::string(stage));
  if (it != config.seed_overrides.end()) return Rng(it->second);
  return stream(config.seed, stage);
}

std::vector<TruthRecord> truth_from_series(const SeriesFile& series) {
  const auto& t = series.times();
  const auto& v = series.column("v_mag");
  const auto& va = series.column("v_angle");
  const auto& i = series.column("i_mag");
  const auto& ia = series.column("i_angle");
  std::vector<TruthRecord> out(series.rows());
  for (std::size_t r = 0; r < series.rows(); ++r) {
    out[r] = {t[r], v[r], va[r] * kRadPerDeg, i[r], ia[r] * kRadPerDeg};
    try {
      out[r].validate();
    } catch (const InvalidArgument& e) {
      throw IngestionError("truth row " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TruthRecord> load_truth(const std::filesystem::path& path) {
  static const std::array<std::string, 4> kChannels{"v_mag", "v_angle", "i_mag", "i_angle"};
  return truth_from_series(load_series(path, kChannels));
}

SeriesFile load_history(const std::filesystem::path& path) {
  static const std::array<std::string, 3> kChannels{"v", "p", "q"};
  return load_series(path, kChannels);
}

std::pair<SystematicError, SystematicError> draw_systematic(const RunConfig& config) {
  if (!config.systematic) return {};
  Rng vt = stage_rng(config, streams::kVtSystematic);
  Rng ct = stage_rng(config, streams::kCtSystematic);
  return {sample_systematic_error(config.vt_region, vt),
          sample_systematic_error(config.ct_region, ct)};
}

std::size_t scada_sample_count(const RunConfig& config,
                               std::span<const TruthRecord> truth) {
  if (config.scada.n_samples) return *config.scada.n_samples;
  if (truth.empty()) return 0;
  const double span = truth.back().t - truth.front().t;
  return static_cast<std::size_t>(std::floor(span / config.scada.scan_period + 1e-9)) + 1;
}

CnRun run_cn(const RunConfig& config, std::size_t n, double start_time,
             const SeriesFile* history) {
  const ScadaSettings& s = config.scada;
  Rng latency_rng = stage_rng(config, streams::kCnLatency);
  ScheduleOptions opts;
  opts.start_time = start_time;
  opts.buffer = s.buffer;
  opts.time_skew = s.time_skew;

  CnRun run;
  run.schedule = attributed("cn_latency", std::nullopt, [&] {
    if (const auto* c = std::get_if<double>(&s.latency)) {
      const std::vector<double> lat(n, *c);
      return schedule_from_latencies(lat, s.scan_period, latency_rng, opts);
    }
    return build_delay_schedule(std::get<LmmParams>(s.latency), s.scan_period, n,
                                latency_rng, opts);
  });

  switch (s.scheme) {
    case CnScheme::None:
      run.errors.assign(n, CnErrors{});
      break;
    case CnScheme::Scheme1:
      if (!history) {
        throw SimulationError("cn_scheme1", std::nullopt, "no history series supplied");
      }
      run.errors = attributed("cn_scheme1", std::nullopt, [&] {
        return scheme1_errors(*history, run.schedule, s.interpolation);
      });
      break;
    case CnScheme::Scheme2: {
      Rng err_rng = stage_rng(config, streams::kCnError);
      run.errors = attributed("cn_scheme2", std::nullopt, [&] {
        return scheme2_errors(*s.scheme2, n, err_rng);
      });
      break;
    }
  }
  return run;
}

ScadaRun run_scada(const RunConfig& config, std::span<const TruthRecord> truth,
                   const SeriesFile* history) {
  config.validate();
  if (truth.empty()) throw SimulationError("scada_truth", std::nullopt, "truth series is empty");
  for (std::size_t s = 0; s < truth.size(); ++s) {
    attributed("scada_truth", s, [&] { truth[s].validate(); return 0; });
  }

  const std::size_t n = scada_sample_count(config, truth);
  if (n < 2) {
    throw SimulationError("cn_latency", std::nullopt,
                          "truth span too short for two scans at the configured period");
  }

  ScadaRun run;
  std::tie(run.vt_sys, run.ct_sys) = draw_systematic(config);

  Rng transformer_rng = stage_rng(config, streams::kTransformer);
  Rng cable_rng = stage_rng(config, streams::kCable);
  Rng ied_rng = stage_rng(config, streams::kIed);

  const double t0 = truth.front().t;
  CnRun cn = run_cn(config, n, t0, history);
  run.schedule = std::move(cn.schedule);

  run.records.resize(n);
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < n; ++k) {
    ScadaRecord& r = run.records[k];
    r.k = k;
    r.delay = run.schedule.entries[k];
    r.t = r.delay.send_time;
    // Nearest preceding truth sample.
    const double scan = t0 + static_cast<double>(k) * config.scada.scan_period;
    while (cursor + 1 < truth.size() && truth[cursor + 1].t <= scan) ++cursor;
    r.truth = truth[cursor];

    const PhasorPair s1 = attributed("transformer", k, [&] {
      return transformer_output(
          r.truth, draw_transformer_errors(run.vt_sys, run.ct_sys, config.noise, transformer_rng));
    });
    const PhasorPair s2 = attributed("cable", k, [&] {
      return apply_cable_burden(s1, config.noise, cable_rng);
    });
    const IedOutput s3 = attributed("ied", k, [&] {
      return ied_compute(s2, config.noise, ied_rng);
    });
    r.v1 = s1.v;
    r.delta_v1 = s1.delta_v;
    r.i1 = s1.i;
    r.delta_i1 = s1.delta_i;
    r.v2 = s2.v;
    r.delta_v2 = s2.delta_v;
    r.i2 = s2.i;
    r.delta_i2 = s2.delta_i;
    r.v3 = s3.v3;
    r.p2 = s3.p2;
    r.q2 = s3.q2;
    r.p3 = s3.p3;
    r.q3 = s3.q3;
    r.cn = cn.errors[k];
    const CnOutput s4 = apply_cn(r.v3, r.p3, r.q3, r.cn);
    r.v4 = s4.v4;
    r.p4 = s4.p4;
    r.q4 = s4.q4;
  }
  return run;
}

ScadaRun run_scada(const RunConfig& config) {
  config.validate_paths();
  const auto truth = load_truth(config.truth_path);
  std::optional<SeriesFile> history;
  if (config.scada.scheme == CnScheme::Scheme1) history = load_history(*config.history_path);
  return run_scada(config, truth, history ? &*history : nullptr);
}

FilterSpec pmu_filter(const RunConfig& config) {
  return make_filter(config.pmu.reporting_rate, config.pmu.nominal_freq, config.pmu.filter);
}

TimingErrorModel pmu_timing(const RunConfig& config, double start, double duration) {
  TimingErrorModel timing = config.pmu.timing;
  if (config.pmu.random_loss) {
    Rng rng = stage_rng(config, streams::kGpsEvents);
    auto events = generate_gps_events(config.pmu.random_loss->rate_per_day,
                                      config.pmu.random_loss->recovery_rate, duration,
                                      rng, start);
    timing.loss_events.insert(timing.loss_events.end(), events.begin(), events.end());
    std::sort(timing.loss_events.begin(), timing.loss_events.end(),
              [](const GpsLossEvent& a, const GpsLossEvent& b) { return a.start < b.start; });
  }
  return timing;
}

std::vector<PmuFrame> run_pmu(const RunConfig& config, std::span<const TruthRecord> truth) {
  config.validate();
  if (truth.empty()) throw SimulationError("pmu_truth", std::nullopt, "truth series is empty");
  // Unsupported filter configurations are configuration errors, not stage failures.
  const FilterSpec filter = pmu_filter(config);

  PmuChainInputs in{truth, {}, {}, config.noise, filter, {}, FrequencyProfile(config.pmu.nominal_freq)};
  std::tie(in.vt_sys, in.ct_sys) = draw_systematic(config);
  in.timing = attributed("pmu_timing", std::nullopt, [&] {
    return pmu_timing(config, truth.front().t, truth.back().t - truth.front().t);
  });
  if (!config.pmu.signal_freq.empty()) {
    in.signal_freq = attributed("pmu_signal", std::nullopt,
                                [&] { return FrequencyProfile(config.pmu.signal_freq); });
  }
  Rng transformer_rng = stage_rng(config, streams::kPmuTransformer);
  Rng cable_rng = stage_rng(config, streams::kPmuCable);
  return run_pmu_chain(in, transformer_rng, cable_rng);
}

std::vector<PmuFrame> run_pmu(const RunConfig& config) {
  config.validate_paths();
  return run_pmu(config, load_truth(config.truth_path));
}

}  // namespace mchain
