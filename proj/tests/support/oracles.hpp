#pragma once

// Reference implementations used only by tests. Each one is written without
// calling the library routine it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

struct Mixture {
  std::vector<double> w, mu, sd;
};

inline long double normal_pdf(long double x, long double mu, long double sd) {
  const long double z = (x - mu) / sd;
  return std::exp(-0.5L * z * z) / (sd * std::sqrt(2.0L * kPi));
}

inline long double mixture_pdf(const Mixture& m, long double x) {
  long double p = 0.0L;
  for (std::size_t c = 0; c < m.w.size(); ++c) p += m.w[c] * normal_pdf(x, m.mu[c], m.sd[c]);
  return p;
}

/// KL(mixture || N(mu, sd)) by the midpoint rule on [lo, hi] with n cells.
inline double quadrature_kld(const Mixture& m, double mu, double sd, double lo, double hi,
                             std::size_t n = 1000000) {
  const long double h = (static_cast<long double>(hi) - lo) / static_cast<long double>(n);
  long double acc = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const long double x = lo + (static_cast<long double>(j) + 0.5L) * h;
    const long double p = mixture_pdf(m, x);
    if (p <= 0.0L) continue;
    acc += p * std::log(p / normal_pdf(x, mu, sd)) * h;
  }
  return static_cast<double>(acc);
}

/// Integration bounds wide enough to hold essentially all mass of the
/// mixture and the reference.
inline std::pair<double, double> kld_bounds(const Mixture& m, double mu, double sd) {
  double lo = mu - 12.0 * sd;
  double hi = mu + 12.0 * sd;
  for (std::size_t c = 0; c < m.w.size(); ++c) {
    lo = std::min(lo, m.mu[c] - 12.0 * m.sd[c]);
    hi = std::max(hi, m.mu[c] + 12.0 * m.sd[c]);
  }
  return {lo, hi};
}

/// Point-in-polygon by edge cross products. The polygon may be given in
/// either orientation; boundary points count as inside.
inline bool inside_convex(const std::array<std::pair<double, double>, 4>& poly, double x,
                          double y, double tol = 1e-12) {
  int pos = 0;
  int neg = 0;
  for (std::size_t j = 0; j < 4; ++j) {
    const auto [ax, ay] = poly[j];
    const auto [bx, by] = poly[(j + 1) % 4];
    const double scale = std::max({1.0, std::abs(bx - ax), std::abs(by - ay)});
    const double c = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
    if (c > tol * scale) ++pos;
    if (c < -tol * scale) ++neg;
  }
  return pos == 0 || neg == 0;
}

/// Samples whose successor reaches the receiver first. Arrival times are
/// sorted with a stable order on ties, then each adjacent pair is checked
/// for an inversion.
inline std::vector<std::size_t> arrival_inversions(const std::vector<double>& send_times,
                                                   const std::vector<double>& latencies) {
  const std::size_t n = send_times.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<long double> arrival(n);
  for (std::size_t k = 0; k < n; ++k) {
    arrival[k] = static_cast<long double>(send_times[k]) + latencies[k];
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return arrival[a] < arrival[b]; });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (rank[k + 1] < rank[k]) out.push_back(k);
  }
  return out;
}

/// Frequency (Hz) of the largest DFT magnitude in (0, fs/2] of a series
/// sampled at fs, after removing its mean.
inline double dominant_frequency(const std::vector<double>& x, double fs) {
  const std::size_t n = x.size();
  const long double mean = std::accumulate(x.begin(), x.end(), 0.0L) / n;
  double best_f = 0.0;
  long double best = -1.0L;
  for (std::size_t b = 1; b <= n / 2; ++b) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double a = 2.0L * kPi * static_cast<long double>((b * j) % n) / n;
      re += (x[j] - mean) * std::cos(a);
      im -= (x[j] - mean) * std::sin(a);
    }
    const long double mag = re * re + im * im;
    if (mag > best) {
      best = mag;
      best_f = static_cast<double>(b) * fs / static_cast<double>(n);
    }
  }
  return best_f;
}

/// Windowed-sinc coefficient in extended precision.
inline long double filter_coefficient(int k, int order, double ref_freq, double fs) {
  if (k == 0) return 1.0L;
  const long double x = 2.0L * kPi * (2.0L * ref_freq / fs) * k;
  const long double h = 0.54L + 0.46L * std::cos(2.0L * kPi * k / order);
  return std::sin(x) / x * h;
}

/// Direct synchrophasor estimate of sqrt(2) V cos(2 pi f t + phi) sampled at
/// t = n / fs, centered at sample `center`.
inline std::complex<long double> estimate(double v, double phi, double f, double f0, double fs,
                                          int order, double ref_freq, long long center) {
  std::complex<long double> acc = 0.0L;
  long double g = 0.0L;
  for (int k = -order / 2; k <= order / 2; ++k) {
    const long double w = filter_coefficient(k, order, ref_freq, fs);
    const long double t = static_cast<long double>(center + k) / fs;
    const long double x = std::sqrt(2.0L) * v * std::cos(2.0L * kPi * f * t + phi);
    acc += x * w * std::polar(1.0L, -2.0L * kPi * f0 * t);
    g += w;
  }
  return acc * std::sqrt(2.0L) / g;
}

}  // namespace oracle
