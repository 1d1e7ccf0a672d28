#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mchain/pmu_chain.hpp"
#include "oracles.hpp"

using namespace mchain;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

PhasorTrack flat_track(double t0, double t1, double v, double dv, double i = 0.5,
                       double di = -0.3) {
  PhasorTrack tr;
  tr.times = {t0, t1};
  tr.phasors = {{v, dv, i, di}, {v, dv, i, di}};
  return tr;
}

std::vector<double> angle_errors_deg(const std::vector<PmuFrame>& frames) {
  std::vector<double> out;
  for (const auto& f : frames) {
    out.push_back(wrap_angle(std::arg(f.v_phasor) - std::arg(f.v_reference)) * kDeg);
  }
  return out;
}

}  // namespace

TEST(Filter, SymmetricWithUnitCenter) {
  for (const auto& e : m_class_table()) {
    const FilterSpec s = make_filter(e.reporting_rate, e.nominal_freq);
    EXPECT_EQ(s.coefficient(0), 1.0);
    for (int k = 1; k <= s.half(); ++k) EXPECT_EQ(s.coefficient(k), s.coefficient(-k));
    double g = 0.0;
    for (double w : s.coefficients) g += w;
    EXPECT_NEAR(s.gain, g, 1e-12 * std::abs(g));
  }
}

TEST(Filter, CoefficientMatchesExtendedPrecision) {
  const FilterSpec s = make_filter(60, 60);
  ASSERT_EQ(s.filter_ref_freq, 8.19);
  ASSERT_EQ(s.sampling_freq, 960.0);
  for (int k : {1, 10, 23, s.half()}) {
    EXPECT_NEAR(s.coefficient(k),
                static_cast<double>(oracle::filter_coefficient(k, s.order, 8.19, 960.0)), 1e-15);
  }
}

TEST(Filter, UnsupportedPairListsTable) {
  try {
    make_filter(7.0, 60.0);
    FAIL();
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("60 Hz/60 fps"), std::string::npos) << msg;
    EXPECT_NE(msg.find("50 Hz/100 fps"), std::string::npos) << msg;
  }
  FilterOverrides o;
  o.ref_freq = 1.0;
  o.order = 200;
  EXPECT_NO_THROW(make_filter(8.0, 60.0, o));
  o.order = 201;
  EXPECT_THROW(make_filter(8.0, 60.0, o), InvalidArgument);
}

TEST(Filter, TableFormat) {
  std::ostringstream os;
  write_filter_table(os, make_filter(60, 60));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "k,W");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 71);
}

TEST(Waveform, CosineAtOrigin) {
  const PhasorTrack tr = flat_track(0, 1, 1.0, 0.0);
  const std::vector<double> tau(1, 0.0);
  const auto x = synth_waveform(tr, FrequencyProfile(60.0), 960.0, 0, tau);
  EXPECT_DOUBLE_EQ(x[0], std::numbers::sqrt2);
}

TEST(Waveform, ZeroTimingMatchesDirectEvaluation) {
  const PhasorTrack tr = flat_track(0, 2, 0.9, 0.4);
  const std::vector<double> tau(960, 0.0);
  const auto x = synth_waveform(tr, FrequencyProfile(60.0), 960.0, 0, tau);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / 960.0;
    EXPECT_NEAR(x[i], std::sqrt(2.0) * 0.9 * std::cos(2 * std::numbers::pi * 60 * t + 0.4), 1e-12);
  }
}

TEST(Waveform, TimingErrorShiftsSamples) {
  const PhasorTrack tr = flat_track(0, 2, 1.0, 0.1);
  const std::vector<double> tau(500, 5e-6);
  const auto x = synth_waveform(tr, FrequencyProfile(60.0), 960.0, 3, tau);
  for (std::size_t s = 0; s < x.size(); ++s) {
    const double t = static_cast<double>(s + 3) / 960.0 + 5e-6;
    EXPECT_NEAR(x[s], std::sqrt(2.0) * std::cos(2 * std::numbers::pi * 60 * t + 0.1), 1e-12);
  }
}

TEST(Estimator, ZeroInputAndLinearity) {
  const FilterSpec s = make_filter(60, 60);
  const std::vector<double> zeros(200, 0.0);
  EXPECT_EQ(estimate_phasor(zeros, 100, s), Phasor(0.0, 0.0));

  const PhasorTrack tr = flat_track(0, 1, 1.0, 0.2);
  const std::vector<double> tau(300, 0.0);
  auto x = synth_waveform(tr, FrequencyProfile(60.0), 960.0, 0, tau);
  const Phasor p1 = estimate_phasor(x, 150, s);
  for (double& v : x) v *= 2.0;
  const Phasor p2 = estimate_phasor(x, 150, s);
  EXPECT_EQ(p2, 2.0 * p1);
  EXPECT_THROW(estimate_phasor(x, 10, s), InvalidArgument);
}

TEST(Estimator, NominalSinusoidForEveryShippedConfiguration) {
  for (const auto& e : m_class_table()) {
    const FilterSpec s = make_filter(e.reporting_rate, e.nominal_freq);
    const auto fs = static_cast<std::int64_t>(s.sampling_freq);
    const std::int64_t center = fs;  // t = 1 s
    const std::size_t n = static_cast<std::size_t>(2 * fs + 1);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::sqrt(2.0) * std::cos(2 * std::numbers::pi * e.nominal_freq * i / s.sampling_freq);
    }
    const Phasor p = estimate_phasor(x, center, s);
    const auto ref = oracle::estimate(1.0, 0.0, e.nominal_freq, e.nominal_freq, s.sampling_freq,
                                      s.order, s.filter_ref_freq, center);
    EXPECT_NEAR(std::abs(p), 1.0, 1e-3) << e.nominal_freq << '/' << e.reporting_rate;
    EXPECT_NEAR(std::arg(p) * kDeg, 0.0, 0.02) << e.nominal_freq << '/' << e.reporting_rate;
    EXPECT_NEAR(p.real(), static_cast<double>(ref.real()), 1e-10);
    EXPECT_NEAR(p.imag(), static_cast<double>(ref.imag()), 1e-10);
  }
}

TEST(TimingFormulas, SamplingTimeError) {
  EXPECT_EQ(sampling_time_phase_error(0.0, 60), 0.0);
  EXPECT_NEAR(sampling_time_phase_error(1e-6, 60), 0.0216, 1e-12);
  EXPECT_NEAR(sampling_time_phase_error(-1e-6, 60), -0.0216, 1e-12);
}

TEST(TimingFormulas, OffNominalFrequency) {
  EXPECT_EQ(off_nominal_error_frequency(60, 60), 0.0);
  EXPECT_DOUBLE_EQ(off_nominal_error_frequency(60, 59.5), 1.0);
  EXPECT_DOUBLE_EQ(off_nominal_error_frequency(60, 60.5), 1.0);
}

TEST(TimingFormulas, GpsLossDrift) {
  EXPECT_EQ(gps_loss_phase_error(0.15, 0.0, 60), 0.0);
  const double e = gps_loss_phase_error(0.15, 600, 60);
  EXPECT_NEAR(e, 0.0339, 5e-5);
  EXPECT_NEAR(e * kDeg, 1.94, 0.005 * 1.94);
  EXPECT_NEAR(gps_loss_phase_error(0.15, 1200, 60), 2.0 * e, 1e-15);
}

TEST(GpsEvents, ZeroRateGivesNoEvents) {
  Rng rng(1);
  EXPECT_TRUE(generate_gps_events(0.0, 0.13, 86400 * 10.0, rng).empty());
}

TEST(GpsEvents, MeanDurationIsInverseRecoveryRate) {
  Rng rng(2);
  // Sparse events over a long horizon so merging is negligible.
  const auto ev = generate_gps_events(86400.0 / 1000.0, 0.13, 1000.0 * 1'000'000, rng);
  ASSERT_GT(ev.size(), 990000u);
  long double sum = 0.0L;
  for (const auto& e : ev) sum += e.duration;
  EXPECT_NEAR(static_cast<double>(sum / ev.size()), 1.0 / 0.13, 0.01 / 0.13);
}

TEST(GpsEvents, PoissonCountPerDay) {
  Rng rng(3);
  const int trials = 1000;
  double total = 0.0;
  for (int j = 0; j < trials; ++j) {
    total += static_cast<double>(generate_gps_events(5.0, 0.13, 86400.0, rng).size());
  }
  EXPECT_NEAR(total / trials, 5.0, 3.0 * std::sqrt(5.0 / trials));
}

TEST(GpsEvents, OverlapsAreMerged) {
  Rng rng(4);
  const auto ev = generate_gps_events(86400.0, 0.01, 5000.0, rng);
  for (std::size_t j = 1; j < ev.size(); ++j) EXPECT_GT(ev[j].start, ev[j - 1].end());
}

TEST(Timing, SawtoothResetsEverySecond) {
  TimingErrorModel m;
  m.per_sample_increment = 1e-7;
  const auto tau = sampling_time_offsets(m, 960, 0, 960 * 5);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (i % 960 == 0) {
      EXPECT_EQ(tau[i], 0.0);
    } else {
      EXPECT_GT(tau[i], tau[i - 1]);
    }
  }
}

TEST(Timing, UnlockedAccumulatesAndLossSuspendsReset) {
  TimingErrorModel m;
  m.per_sample_increment = 1e-7;
  m.pps_locked = false;
  auto tau = sampling_time_offsets(m, 960, 0, 2000);
  EXPECT_NEAR(tau[1999], 1999e-7, 1e-15);

  m.pps_locked = true;
  m.loss_events = {{0.5, 1.0}};
  tau = sampling_time_offsets(m, 960, 0, 2000);
  EXPECT_NEAR(tau[960], 960e-7, 1e-15);  // no reset at t = 1 s inside the loss
  EXPECT_EQ(tau[1920], 0.0);             // reset again at t = 2 s
}

TEST(Timing, OffsetsDependOnlyOnAbsoluteIndex) {
  TimingErrorModel m;
  m.per_sample_increment = 2e-7;
  m.constant_offset = 1e-6;
  const auto full = sampling_time_offsets(m, 960, -500, 3000);
  const auto part = sampling_time_offsets(m, 960, 700, 100);
  for (std::size_t s = 0; s < part.size(); ++s) EXPECT_EQ(part[s], full[s + 1200]);
}

TEST(FrequencyProfile, PiecewiseLinearCycles) {
  const FrequencyProfile f({{0.0, 60.0}, {10.0, 59.0}});
  EXPECT_DOUBLE_EQ(f.at(5.0), 59.5);
  EXPECT_DOUBLE_EQ(f.at(20.0), 59.0);
  EXPECT_NEAR(f.cycles(10.0), 595.0, 1e-9);
  EXPECT_NEAR(f.cycles(12.0), 595.0 + 118.0, 1e-9);
  EXPECT_NEAR(f.cycles(4.0), 4.0 * (60.0 + 59.6) / 2.0, 1e-9);
  EXPECT_THROW(FrequencyProfile({{1.0, 60.0}, {1.0, 59.0}}), InvalidArgument);
}

TEST(Frames, NullChainMatchesReference) {
  const FilterSpec s = make_filter(60, 60);
  const auto frames = estimate_frames(flat_track(0, 3, 1.02, 0.3, 0.7, -0.5), s, {},
                                      FrequencyProfile(60.0));
  ASSERT_GT(frames.size(), 150u);
  for (const auto& f : frames) {
    EXPECT_NEAR(std::abs(f.v_phasor), 1.02, 1.02e-3);
    EXPECT_NEAR(std::arg(f.v_phasor) * kDeg, 0.3 * kDeg, 0.02);
    EXPECT_NEAR(std::abs(f.i_phasor), 0.7, 0.7e-3);
    EXPECT_NEAR(std::arg(f.i_phasor) * kDeg, -0.5 * kDeg, 0.02);
    EXPECT_TRUE(f.gps_locked);
    EXPECT_EQ(f.injected_angle_error, 0.0);
  }
  // Frames sit on the reporting grid and only full windows are used.
  EXPECT_DOUBLE_EQ(frames.front().report_time, 3.0 / 60.0);
  for (std::size_t j = 1; j < frames.size(); ++j) {
    EXPECT_NEAR(frames[j].report_time - frames[j - 1].report_time, 1.0 / 60.0, 1e-12);
  }
}

TEST(Frames, OffNominalErrorOscillatesAtTwiceTheOffset) {
  const FilterSpec s = make_filter(60, 60);
  for (double df : {0.1, 0.5, 1.0}) {
    const auto frames = estimate_frames(flat_track(0, 20, 1.0, 0.0), s, {},
                                        FrequencyProfile(60.0 - df));
    const double peak = oracle::dominant_frequency(angle_errors_deg(frames), 60.0);
    EXPECT_NEAR(peak, 2.0 * df, 0.05) << df;
  }
  const auto frames = estimate_frames(flat_track(0, 20, 1.0, 0.0), s, {}, FrequencyProfile(59.0));
  EXPECT_NEAR(oracle::dominant_frequency(angle_errors_deg(frames), 60.0), 2.0, 0.05);
}

TEST(Frames, GpsLossRampsAngleError) {
  const FilterSpec s = make_filter(60, 60);
  TimingErrorModel m;
  m.gps_drift_rate = 0.15;
  m.loss_events = {{0.0, 100.0}};
  const auto frames = estimate_frames(flat_track(0, 30, 1.0, 0.0), s, m, FrequencyProfile(60.0));
  const auto err = angle_errors_deg(frames);
  for (std::size_t j = 0; j < frames.size(); ++j) {
    EXPECT_FALSE(frames[j].gps_locked);
    EXPECT_NEAR(err[j], 0.00324 * frames[j].report_time, 0.02);
    EXPECT_NEAR(frames[j].injected_angle_error * kDeg, 0.00324 * frames[j].report_time, 1e-9);
  }
  const double slope = (err.back() - err.front()) /
                       (frames.back().report_time - frames.front().report_time);
  EXPECT_NEAR(slope, 0.00324, 1e-5);
}

TEST(Frames, SamplingTimeErrorInjectsAngle) {
  const FilterSpec s = make_filter(60, 60);
  TimingErrorModel m;
  m.constant_offset = 1e-6;
  const auto frames = estimate_frames(flat_track(0, 2, 1.0, 0.0), s, m, FrequencyProfile(60.0));
  for (const auto& f : frames) {
    EXPECT_NEAR(f.injected_angle_error * kDeg, 0.0216, 1e-9);
    EXPECT_NEAR(wrap_angle(std::arg(f.v_phasor) - std::arg(f.v_reference)) * kDeg, 0.0216, 0.02);
  }
}

TEST(WrapAngle, HalfOpenRange) {
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-15);
}
