#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mchain/rng.hpp"
#include "mchain/scada_chain.hpp"

namespace mchain {

using Phasor = std::complex<double>;

// ---------------------------------------------------------------------------
// M-class low-pass filter

/// One shipped (nominal frequency, reporting rate) configuration.
struct FilterTableEntry {
  double nominal_freq;
  double reporting_rate;
  double ref_freq;
  int default_order;
};

/// Shipped M-class configurations.
std::span<const FilterTableEntry> m_class_table();

struct FilterOverrides {
  std::optional<double> ref_freq;
  std::optional<int> order;
  std::optional<double> sampling_freq;
};

/// Hamming-windowed sinc low-pass used by the DFT phasor estimator.
struct FilterSpec {
  double reporting_rate = 0.0;
  double filter_ref_freq = 0.0;
  int order = 0;  // even; the window spans k in [-order/2, order/2]
  double sampling_freq = 0.0;
  double nominal_freq = 0.0;
  std::vector<double> coefficients;  // index k + order/2
  double gain = 0.0;

  int half() const noexcept { return order / 2; }
  double coefficient(int k) const { return coefficients.at(static_cast<std::size_t>(k + half())); }
  /// Waveform samples per reporting interval.
  std::int64_t decimation() const;
  /// Waveform samples per second.
  std::int64_t samples_per_second() const;
};

/// Builds the filter for (reporting_rate, nominal_freq). Throws
/// InvalidArgument listing the supported pairs when the pair is not shipped
/// and the overrides do not supply at least ref_freq and order.
FilterSpec make_filter(double reporting_rate, double nominal_freq,
                       const FilterOverrides& overrides = {});

/// Default sampling frequency for a nominal frequency (960 Hz at 60 Hz,
/// 800 Hz at 50 Hz).
std::optional<double> default_sampling_freq(double nominal_freq);

/// Coefficient table (`k,W`) with a commented parameter header.
void write_filter_table(std::ostream& os, const FilterSpec& spec);

/// (sqrt(2)/G) * sum_k x[i+k] W(k) exp(-j (i+k) dt w0). `samples[0]` holds
/// absolute sample index `first_index`; `center` is absolute too.
Phasor estimate_phasor(std::span<const double> samples, std::int64_t center,
                       const FilterSpec& spec, std::int64_t first_index = 0);

// ---------------------------------------------------------------------------
// Timing errors

/// Angle error of a sampling-time error, in degrees.
inline double sampling_time_phase_error(double t_error, double nominal_freq) {
  return 360.0 * t_error * nominal_freq;
}

/// Frequency (Hz) of the estimation-error oscillation for an off-nominal input.
double off_nominal_error_frequency(double nominal_freq, double signal_freq);

/// Angle drift (radians) after `elapsed_loss` seconds without GPS, for an
/// oscillator timing drift of `drift_us_per_s` microseconds per second.
double gps_loss_phase_error(double drift_us_per_s, double elapsed_loss,
                            double nominal_freq);

struct GpsLossEvent {
  double start = 0.0;
  double duration = 0.0;
  double end() const noexcept { return start + duration; }
};

/// Poisson loss events at `loss_rate_per_day` over [start, start + duration)
/// with exponential recovery times; overlapping events are merged.
std::vector<GpsLossEvent> generate_gps_events(double loss_rate_per_day,
                                              double recovery_rate,
                                              double duration, Rng& rng,
                                              double start = 0.0);

struct TimingErrorModel {
  double constant_offset = 0.0;       // seconds, added to every sample
  double per_sample_increment = 0.0;  // seconds accumulated per sample
  bool pps_locked = true;             // PPS clears the accumulation each second
  double gps_drift_rate = 0.0;        // microseconds per second of GPS loss
  std::vector<GpsLossEvent> loss_events;

  void validate() const;
  /// Seconds since the start of the loss event containing t, if any.
  std::optional<double> loss_elapsed(double t) const;
};

/// Sampling-time offsets tau(i) for absolute indices first_index..first_index+n-1.
std::vector<double> sampling_time_offsets(const TimingErrorModel& timing,
                                          std::int64_t samples_per_second,
                                          std::int64_t first_index,
                                          std::size_t n);

// ---------------------------------------------------------------------------
// Signal model

/// Input-signal frequency over time: piecewise linear through breakpoints,
/// held constant outside them.
class FrequencyProfile {
 public:
  explicit FrequencyProfile(double constant_hz);
  explicit FrequencyProfile(std::vector<std::pair<double, double>> breakpoints);

  double at(double t) const;
  /// Integral of f from 0 to t, in cycles.
  double cycles(double t) const;
  bool is_constant() const noexcept { return points_.size() == 1; }

 private:
  std::vector<std::pair<double, double>> points_;
  std::vector<double> cumulative_;
};

/// Stage-2 phasors over time, linearly interpolated and clamped at the ends.
struct PhasorTrack {
  std::vector<double> times;
  std::vector<PhasorPair> phasors;

  PhasorPair at(double t) const;
};

/// Waveform samples sqrt(2) * V * cos(2 pi cycles(t) + delta) at
/// t = i / F_sampling + tau(i), i = first_index .. first_index + n - 1.
/// Magnitudes are RMS phasor magnitudes; `current` picks the I channel.
std::vector<double> synth_waveform(const PhasorTrack& track,
                                   const FrequencyProfile& freq,
                                   double sampling_freq,
                                   std::int64_t first_index,
                                   std::span<const double> offsets,
                                   bool current = false);

struct PmuFrame {
  double report_time = 0.0;
  Phasor v_phasor;
  Phasor i_phasor;
  /// Stage-2 phasor at report_time expressed in the nominal rotating frame.
  Phasor v_reference;
  Phasor i_reference;
  double injected_angle_error = 0.0;  // radians
  bool gps_locked = true;
};

/// Estimates frames at every reporting instant whose full window lies inside
/// the track's time span.
std::vector<PmuFrame> estimate_frames(const PhasorTrack& track,
                                      const FilterSpec& spec,
                                      const TimingErrorModel& timing,
                                      const FrequencyProfile& freq);

struct PmuChainInputs {
  std::span<const TruthRecord> truth;
  SystematicError vt_sys;
  SystematicError ct_sys;
  StageNoiseConfig noise;
  FilterSpec filter;
  TimingErrorModel timing;
  FrequencyProfile signal_freq{60.0};
};

/// Transformer and cable stages per truth record, then waveform synthesis
/// and phasor estimation.
std::vector<PmuFrame> run_pmu_chain(const PmuChainInputs& inputs,
                                    Rng& transformer_rng, Rng& cable_rng);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double radians);

}  // namespace mchain
