#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mchain/comm_network.hpp"
#include "mchain/config.hpp"
#include "mchain/pmu_chain.hpp"
#include "mchain/scada_chain.hpp"
#include "mchain/series.hpp"

namespace mchain {

/// Stream names used to derive per-stage RNGs from the master seed. Any of
/// them can be pinned through RunConfig::seed_overrides.
namespace streams {
inline constexpr std::string_view kVtSystematic = "vt_systematic";
inline constexpr std::string_view kCtSystematic = "ct_systematic";
inline constexpr std::string_view kTransformer = "transformer";
inline constexpr std::string_view kCable = "cable";
inline constexpr std::string_view kIed = "ied";
inline constexpr std::string_view kCnLatency = "cn_latency";
inline constexpr std::string_view kCnError = "cn_error";
inline constexpr std::string_view kPmuTransformer = "pmu_transformer";
inline constexpr std::string_view kPmuCable = "pmu_cable";
inline constexpr std::string_view kGpsEvents = "gps_events";
}  // namespace streams

/// RNG for a named stage: the override seed if configured, else derived.
Rng stage_rng(const RunConfig& config, std::string_view stage);

/// One SCADA scan through all four stages.
struct ScadaRecord {
  std::size_t k = 0;
  double t = 0.0;
  TruthRecord truth;
  double v1 = 0.0, v2 = 0.0, v3 = 0.0, v4 = 0.0;
  double delta_v1 = 0.0, delta_v2 = 0.0;
  double i1 = 0.0, i2 = 0.0;
  double delta_i1 = 0.0, delta_i2 = 0.0;
  double p2 = 0.0, p3 = 0.0, p4 = 0.0;
  double q2 = 0.0, q3 = 0.0, q4 = 0.0;
  CnErrors cn;
  DelayEntry delay;
};

struct ScadaRun {
  std::vector<ScadaRecord> records;
  DelaySchedule schedule;
  SystematicError vt_sys;
  SystematicError ct_sys;
};

struct CnRun {
  DelaySchedule schedule;
  std::vector<CnErrors> errors;
};

/// Truth CSV (t,v_mag,v_angle,i_mag,i_angle; angles in degrees).
std::vector<TruthRecord> truth_from_series(const SeriesFile& series);
std::vector<TruthRecord> load_truth(const std::filesystem::path& path);
/// Scheme 1 history CSV (t,v,p,q).
SeriesFile load_history(const std::filesystem::path& path);

/// Systematic errors for the run's VT and CT (zero when disabled).
std::pair<SystematicError, SystematicError> draw_systematic(const RunConfig& config);

/// Scan times t0 + k * S for the configured sample count.
std::size_t scada_sample_count(const RunConfig& config,
                               std::span<const TruthRecord> truth);

/// Delay schedule and CN errors for n samples starting at start_time.
CnRun run_cn(const RunConfig& config, std::size_t n, double start_time,
             const SeriesFile* history);

/// Full SCADA chain. `history` is required for Scheme 1.
ScadaRun run_scada(const RunConfig& config, std::span<const TruthRecord> truth,
                   const SeriesFile* history);
/// Loads the files named in the config, then runs.
ScadaRun run_scada(const RunConfig& config);

/// Full PMU chain (shared transformer/cable models, then the PMU stage).
std::vector<PmuFrame> run_pmu(const RunConfig& config,
                              std::span<const TruthRecord> truth);
std::vector<PmuFrame> run_pmu(const RunConfig& config);

/// Filter for the config's PMU settings.
FilterSpec pmu_filter(const RunConfig& config);
/// Timing model with random GPS loss events merged in, if configured.
TimingErrorModel pmu_timing(const RunConfig& config, double start, double duration);

}  // namespace mchain
