#include "mchain/pmu_chain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "mchain/error.hpp"
#include "mchain/series.hpp"

namespace mchain {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSecondsPerDay = 86400.0;

// Reference frequencies per reporting rate. Orders other than 60 Hz / 60 fps
// were chosen so the steady-state TVE of a nominal sinusoid stays below 0.02%.
constexpr std::array<FilterTableEntry, 11> kMClassTable{{
    {50.0, 10.0, 1.779, 448},
    {50.0, 25.0, 4.355, 182},
    {50.0, 50.0, 7.75, 102},
    {50.0, 100.0, 14.1, 80},
    {60.0, 10.0, 1.78, 538},
    {60.0, 12.0, 2.125, 450},
    {60.0, 15.0, 2.64, 362},
    {60.0, 20.0, 3.50, 274},
    {60.0, 30.0, 5.02, 190},
    {60.0, 60.0, 8.19, 70},
    {60.0, 120.0, 16.25, 94},
}};

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::int64_t integral_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, n)) {
    throw InvalidArgument(std::string("filter: ") + what + " must be an integer");
  }
  return static_cast<std::int64_t>(n);
}

std::string supported_pairs() {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : kMClassTable) {
    os << (first ? "" : ", ") << e.nominal_freq << " Hz/" << e.reporting_rate
       << " fps";
    first = false;
  }
  return os.str();
}

double lerp(double a, double b, double w) { return a + w * (b - a); }

}  // namespace

std::span<const FilterTableEntry> m_class_table() { return kMClassTable; }

std::int64_t FilterSpec::decimation() const {
  return integral_ratio(sampling_freq, reporting_rate,
                        "sampling_freq / reporting_rate");
}

std::int64_t FilterSpec::samples_per_second() const {
  return integral_ratio(sampling_freq, 1.0, "sampling_freq");
}

std::optional<double> default_sampling_freq(double nominal_freq) {
  if (close(nominal_freq, 60.0)) return 960.0;
  if (close(nominal_freq, 50.0)) return 800.0;
  return std::nullopt;
}

FilterSpec make_filter(double reporting_rate, double nominal_freq,
                       const FilterOverrides& overrides) {
  if (!(reporting_rate > 0.0) || !(nominal_freq > 0.0)) {
    throw InvalidArgument("filter: reporting rate and nominal frequency must be > 0");
  }
  const FilterTableEntry* entry = nullptr;
  for (const auto& e : kMClassTable) {
    if (close(e.nominal_freq, nominal_freq) && close(e.reporting_rate, reporting_rate)) {
      entry = &e;
    }
  }
  if (!entry && !(overrides.ref_freq && overrides.order)) {
    std::ostringstream os;
    os << "filter: no M-class parameters for " << nominal_freq << " Hz at "
       << reporting_rate << " fps; supported pairs: " << supported_pairs()
       << " (or supply ref_freq and order overrides)";
    throw InvalidArgument(os.str());
  }

  FilterSpec spec;
  spec.reporting_rate = reporting_rate;
  spec.nominal_freq = nominal_freq;
  spec.filter_ref_freq = overrides.ref_freq.value_or(entry ? entry->ref_freq : 0.0);
  spec.order = overrides.order.value_or(entry ? entry->default_order : 0);
  const auto fs = overrides.sampling_freq ? overrides.sampling_freq
                                          : default_sampling_freq(nominal_freq);
  if (!fs) {
    throw InvalidArgument("filter: sampling_freq override required for nominal " +
                          format_double(nominal_freq) + " Hz");
  }
  spec.sampling_freq = *fs;

  if (!(spec.filter_ref_freq > 0.0)) {
    throw InvalidArgument("filter: reference frequency must be > 0");
  }
  if (spec.order < 2 || spec.order % 2 != 0) {
    throw InvalidArgument("filter: order must be an even integer >= 2");
  }
  if (!(spec.sampling_freq > 2.0 * nominal_freq)) {
    throw InvalidArgument("filter: sampling frequency must exceed twice the nominal");
  }
  spec.decimation();
  spec.samples_per_second();

  const int half = spec.half();
  const double scale = kTwoPi * 2.0 * spec.filter_ref_freq / spec.sampling_freq;
  spec.coefficients.resize(static_cast<std::size_t>(spec.order) + 1);
  spec.gain = 0.0;
  for (int k = -half; k <= half; ++k) {
    double w = 1.0;
    if (k != 0) {
      const double x = scale * k;
      const double hamming = 0.54 + 0.46 * std::cos(kTwoPi * k / spec.order);
      w = std::sin(x) / x * hamming;
    }
    spec.coefficients[static_cast<std::size_t>(k + half)] = w;
  }
  // Symmetric pairs summed outward-in so G does not depend on loop order.
  spec.gain = spec.coefficients[static_cast<std::size_t>(half)];
  for (int k = 1; k <= half; ++k) spec.gain += 2.0 * spec.coefficient(k);
  return spec;
}

void write_filter_table(std::ostream& os, const FilterSpec& spec) {
  os << "# reporting_rate=" << format_double(spec.reporting_rate)
     << " nominal_freq=" << format_double(spec.nominal_freq)
     << " ref_freq=" << format_double(spec.filter_ref_freq)
     << " order=" << spec.order
     << " sampling_freq=" << format_double(spec.sampling_freq)
     << " gain=" << format_double(spec.gain) << '\n';
  os << "k,W\n";
  for (int k = -spec.half(); k <= spec.half(); ++k) {
    os << k << ',' << format_double(spec.coefficient(k)) << '\n';
  }
}

Phasor estimate_phasor(std::span<const double> samples, std::int64_t center,
                       const FilterSpec& spec, std::int64_t first_index) {
  const std::int64_t half = spec.half();
  const std::int64_t lo = center - half - first_index;
  const std::int64_t hi = center + half - first_index;
  if (lo < 0 || hi >= static_cast<std::int64_t>(samples.size())) {
    throw InvalidArgument("estimate_phasor: window [" +
                          std::to_string(center - half) + ", " +
                          std::to_string(center + half) +
                          "] exceeds the available samples");
  }
  // Phase advance per sample in cycles; reduced modulo 1 to keep precision
  // for large absolute indices.
  const double step = spec.nominal_freq / spec.sampling_freq;
  double re = 0.0;
  double im = 0.0;
  for (std::int64_t k = -half; k <= half; ++k) {
    const std::int64_t n = center + k;
    const double cyc = std::fmod(static_cast<double>(n) * step, 1.0);
    const double a = static_cast<double>(samples[static_cast<std::size_t>(n - first_index)]) *
                     spec.coefficient(static_cast<int>(k));
    re += a * std::cos(kTwoPi * cyc);
    im -= a * std::sin(kTwoPi * cyc);
  }
  const double g = std::numbers::sqrt2 / spec.gain;
  return {g * re, g * im};
}

double off_nominal_error_frequency(double nominal_freq, double signal_freq) {
  if (!(signal_freq > 0.0)) {
    throw InvalidArgument("off_nominal_error_frequency: f must be > 0");
  }
  return 2.0 * std::abs(nominal_freq - signal_freq);
}

double gps_loss_phase_error(double drift_us_per_s, double elapsed_loss,
                            double nominal_freq) {
  if (!(elapsed_loss >= 0.0)) {
    throw InvalidArgument("gps_loss_phase_error: elapsed loss must be >= 0");
  }
  return kTwoPi * (drift_us_per_s * elapsed_loss) * 1e-6 * nominal_freq;
}

std::vector<GpsLossEvent> generate_gps_events(double loss_rate_per_day,
                                              double recovery_rate,
                                              double duration, Rng& rng,
                                              double start) {
  if (!(loss_rate_per_day >= 0.0) || !(recovery_rate > 0.0) ||
      !(duration >= 0.0)) {
    throw InvalidArgument(
        "generate_gps_events: need loss rate >= 0, recovery rate > 0, duration >= 0");
  }
  std::vector<GpsLossEvent> raw;
  if (loss_rate_per_day == 0.0) return raw;

  std::exponential_distribution<double> gap(loss_rate_per_day / kSecondsPerDay);
  double t = start + gap(rng.engine());
  while (t < start + duration) {
    raw.push_back({t, sample_exponential(recovery_rate, 1, rng).front()});
    t += gap(rng.engine());
  }

  std::vector<GpsLossEvent> merged;
  for (const auto& e : raw) {
    if (!merged.empty() && e.start <= merged.back().end()) {
      merged.back().duration = std::max(merged.back().end(), e.end()) - merged.back().start;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

void TimingErrorModel::validate() const {
  if (!std::isfinite(constant_offset) || !std::isfinite(per_sample_increment) ||
      !std::isfinite(gps_drift_rate)) {
    throw InvalidArgument("TimingErrorModel: parameters must be finite");
  }
  for (const auto& e : loss_events) {
    if (!std::isfinite(e.start) || !(e.duration >= 0.0) || !std::isfinite(e.duration)) {
      throw InvalidArgument("TimingErrorModel: loss events need finite start and duration >= 0");
    }
  }
}

std::optional<double> TimingErrorModel::loss_elapsed(double t) const {
  for (const auto& e : loss_events) {
    if (t >= e.start && t <= e.end()) return t - e.start;
  }
  return std::nullopt;
}

std::vector<double> sampling_time_offsets(const TimingErrorModel& timing,
                                          std::int64_t samples_per_second,
                                          std::int64_t first_index,
                                          std::size_t n) {
  if (samples_per_second < 1) {
    throw InvalidArgument("sampling_time_offsets: samples per second must be >= 1");
  }
  const auto mod = [samples_per_second](std::int64_t i) {
    const std::int64_t r = i % samples_per_second;
    return r < 0 ? r + samples_per_second : r;
  };
  const double dt = 1.0 / static_cast<double>(samples_per_second);

  std::vector<double> out(n);
  std::int64_t counter = timing.pps_locked ? mod(first_index) : 0;
  for (std::size_t s = 0; s < n; ++s) {
    const std::int64_t i = first_index + static_cast<std::int64_t>(s);
    if (timing.pps_locked && mod(i) == 0 &&
        !timing.loss_elapsed(static_cast<double>(i) * dt)) {
      counter = 0;
    }
    out[s] = timing.constant_offset +
             timing.per_sample_increment * static_cast<double>(counter);
    ++counter;
  }
  return out;
}

FrequencyProfile::FrequencyProfile(double constant_hz)
    : FrequencyProfile(std::vector<std::pair<double, double>>{{0.0, constant_hz}}) {}

FrequencyProfile::FrequencyProfile(std::vector<std::pair<double, double>> breakpoints)
    : points_(std::move(breakpoints)) {
  if (points_.empty()) throw InvalidArgument("FrequencyProfile: no breakpoints");
  for (std::size_t j = 0; j < points_.size(); ++j) {
    if (!(points_[j].second > 0.0) || !std::isfinite(points_[j].first)) {
      throw InvalidArgument("FrequencyProfile: frequencies must be > 0");
    }
    if (j > 0 && !(points_[j].first > points_[j - 1].first)) {
      throw InvalidArgument("FrequencyProfile: breakpoint times must increase");
    }
  }
  cumulative_.resize(points_.size());
  cumulative_[0] = points_[0].second * points_[0].first;
  for (std::size_t j = 1; j < points_.size(); ++j) {
    const auto [t0, f0] = points_[j - 1];
    const auto [t1, f1] = points_[j];
    cumulative_[j] = cumulative_[j - 1] + 0.5 * (f0 + f1) * (t1 - t0);
  }
}

double FrequencyProfile::at(double t) const {
  if (t <= points_.front().first) return points_.front().second;
  if (t >= points_.back().first) return points_.back().second;
  const auto it = std::upper_bound(
      points_.begin(), points_.end(), t,
      [](double v, const std::pair<double, double>& p) { return v < p.first; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return lerp(a.second, b.second, (t - a.first) / (b.first - a.first));
}

double FrequencyProfile::cycles(double t) const {
  if (is_constant()) return points_.front().second * t;
  if (t <= points_.front().first) return points_.front().second * t;
  if (t >= points_.back().first) {
    return cumulative_.back() + points_.back().second * (t - points_.back().first);
  }
  const auto it = std::upper_bound(
      points_.begin(), points_.end(), t,
      [](double v, const std::pair<double, double>& p) { return v < p.first; });
  const std::size_t j = static_cast<std::size_t>(it - points_.begin()) - 1;
  const double fa = points_[j].second;
  const double ft = at(t);
  return cumulative_[j] + 0.5 * (fa + ft) * (t - points_[j].first);
}

PhasorPair PhasorTrack::at(double t) const {
  if (times.empty()) throw InvalidArgument("PhasorTrack: empty track");
  if (t <= times.front()) return phasors.front();
  if (t >= times.back()) return phasors.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
  const auto& a = phasors[j - 1];
  const auto& b = phasors[j];
  return {lerp(a.v, b.v, w), lerp(a.delta_v, b.delta_v, w), lerp(a.i, b.i, w),
          lerp(a.delta_i, b.delta_i, w)};
}

std::vector<double> synth_waveform(const PhasorTrack& track,
                                   const FrequencyProfile& freq,
                                   double sampling_freq,
                                   std::int64_t first_index,
                                   std::span<const double> offsets,
                                   bool current) {
  if (!(sampling_freq > 0.0)) {
    throw InvalidArgument("synth_waveform: sampling frequency must be > 0");
  }
  std::vector<double> out(offsets.size());
  for (std::size_t s = 0; s < offsets.size(); ++s) {
    const double t =
        static_cast<double>(first_index + static_cast<std::int64_t>(s)) / sampling_freq +
        offsets[s];
    const PhasorPair p = track.at(t);
    const double mag = current ? p.i : p.v;
    const double ang = current ? p.delta_i : p.delta_v;
    const double cyc = std::fmod(freq.cycles(t), 1.0);
    out[s] = std::numbers::sqrt2 * mag * std::cos(kTwoPi * cyc + ang);
  }
  return out;
}

double wrap_angle(double radians) {
  double a = std::remainder(radians, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

std::vector<PmuFrame> estimate_frames(const PhasorTrack& track,
                                      const FilterSpec& spec,
                                      const TimingErrorModel& timing,
                                      const FrequencyProfile& freq) {
  timing.validate();
  if (track.times.empty()) throw InvalidArgument("estimate_frames: empty track");
  const double fs = spec.sampling_freq;
  const std::int64_t sps = spec.samples_per_second();
  const std::int64_t decim = spec.decimation();
  const std::int64_t half = spec.half();

  const auto first = static_cast<std::int64_t>(std::ceil(track.times.front() * fs - 1e-9));
  const auto last = static_cast<std::int64_t>(std::floor(track.times.back() * fs + 1e-9));
  if (last - first < 2 * half) return {};
  const auto n = static_cast<std::size_t>(last - first + 1);

  const auto offsets = sampling_time_offsets(timing, sps, first, n);
  const auto v_wave = synth_waveform(track, freq, fs, first, offsets, false);
  const auto i_wave = synth_waveform(track, freq, fs, first, offsets, true);

  // Smallest multiple of the decimation whose window starts inside the grid.
  const std::int64_t lo_center = first + half;
  std::int64_t m = (lo_center + decim - 1) / decim;
  if (lo_center < 0) m = lo_center / decim;

  std::vector<PmuFrame> frames;
  for (; m * decim + half <= last; ++m) {
    const std::int64_t center = m * decim;
    PmuFrame f;
    f.report_time = static_cast<double>(m) / spec.reporting_rate;
    f.v_phasor = estimate_phasor(v_wave, center, spec, first);
    f.i_phasor = estimate_phasor(i_wave, center, spec, first);

    const PhasorPair ref = track.at(f.report_time);
    const double rot =
        kTwoPi * (freq.cycles(f.report_time) - spec.nominal_freq * f.report_time);
    f.v_reference = std::polar(ref.v, ref.delta_v + rot);
    f.i_reference = std::polar(ref.i, ref.delta_i + rot);

    const double tau = offsets[static_cast<std::size_t>(center - first)];
    double injected = kTwoPi * tau * spec.nominal_freq;
    if (const auto elapsed = timing.loss_elapsed(f.report_time)) {
      const double drift =
          gps_loss_phase_error(timing.gps_drift_rate, *elapsed, spec.nominal_freq);
      const Phasor turn = std::polar(1.0, drift);
      f.v_phasor *= turn;
      f.i_phasor *= turn;
      injected += drift;
      f.gps_locked = false;
    }
    f.injected_angle_error = injected;
    frames.push_back(f);
  }
  return frames;
}

std::vector<PmuFrame> run_pmu_chain(const PmuChainInputs& in,
                                    Rng& transformer_rng, Rng& cable_rng) {
  in.noise.validate();
  PhasorTrack track;
  track.times.reserve(in.truth.size());
  track.phasors.reserve(in.truth.size());
  for (std::size_t s = 0; s < in.truth.size(); ++s) {
    const TruthRecord& truth = in.truth[s];
    try {
      truth.validate();
      if (s > 0 && !(truth.t > in.truth[s - 1].t)) {
        throw InvalidArgument("truth times must be strictly increasing");
      }
    } catch (const InvalidArgument& e) {
      throw SimulationError("pmu_truth", s, e.what());
    }
    const PhasorPair s1 = transformer_output(
        truth, draw_transformer_errors(in.vt_sys, in.ct_sys, in.noise, transformer_rng));
    const PhasorPair s2 = cable_output(s1, draw_cable_errors(in.noise, cable_rng));
    track.times.push_back(truth.t);
    track.phasors.push_back(s2);
  }
  try {
    return estimate_frames(track, in.filter, in.timing, in.signal_freq);
  } catch (const InvalidArgument& e) {
    throw SimulationError("pmu_estimator", std::nullopt, e.what());
  }
}

}  // namespace mchain
