#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mchain/comm_network.hpp"
#include "mchain/distributions.hpp"
#include "mchain/pmu_chain.hpp"
#include "mchain/scada_chain.hpp"
#include "mchain/series.hpp"

namespace mchain {

enum class ChainSelection { Scada, Pmu, Both };
enum class CnScheme { None, Scheme1, Scheme2 };
enum class PmuFormat { Csv, Jsonl };

/// Latency model: a constant (seconds) or a lognormal mixture.
using LatencyModel = std::variant<double, LmmParams>;

struct ScadaSettings {
  double scan_period = 2.0;
  std::optional<std::size_t> n_samples;  // default: whole truth span
  LatencyModel latency = 0.0;
  BufferMode buffer = BufferMode::Uniform;
  bool time_skew = false;
  CnScheme scheme = CnScheme::None;
  Interpolation interpolation = Interpolation::Linear;
  std::optional<Scheme2Config> scheme2;
};

struct RandomGpsLoss {
  double rate_per_day = 5.0;
  double recovery_rate = 0.13;
};

struct PmuSettings {
  double reporting_rate = 60.0;
  double nominal_freq = 60.0;
  FilterOverrides filter;
  /// (t, Hz) breakpoints; a single point means a constant frequency.
  std::vector<std::pair<double, double>> signal_freq;
  TimingErrorModel timing;
  std::optional<RandomGpsLoss> random_loss;
};

struct OutputSettings {
  std::filesystem::path scada_csv = "scada.csv";
  std::filesystem::path schedule_csv;  // empty: not written
  std::filesystem::path pmu_path = "pmu.csv";
  PmuFormat pmu_format = PmuFormat::Csv;
  bool debug_columns = false;
};

/// Everything a simulation run needs. Angles are radians here; the config
/// file carries degrees and minutes.
struct RunConfig {
  std::uint64_t seed = 0;
  ChainSelection chain = ChainSelection::Both;
  std::filesystem::path truth_path;
  std::optional<std::filesystem::path> history_path;
  AccuracyRegion vt_region = AccuracyRegion::standard(TransformerKind::VT, 0.3);
  AccuracyRegion ct_region = AccuracyRegion::standard(TransformerKind::CT, 0.3);
  bool systematic = true;
  StageNoiseConfig noise;
  ScadaSettings scada;
  PmuSettings pmu;
  OutputSettings output;
  /// Per-stage seed overrides keyed by stream name (see stream names in
  /// pipeline.hpp).
  std::map<std::string, std::uint64_t> seed_overrides;

  /// Cross-field checks. Throws InvalidArgument naming the offending field.
  void validate() const;
  /// Like validate(), plus: referenced input files exist.
  void validate_paths() const;
};

/// Parses a JSON (comments allowed) configuration. Relative paths resolve
/// against base_dir. Throws InvalidArgument with the offending key.
RunConfig parse_config(std::string_view text,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace mchain
