#include "mchain/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace mchain {
namespace {

constexpr double kWeightSumTolerance = 1e-12;

void validate_mixture(const char* name, const std::vector<double>& weights,
                      const std::vector<double>& locations,
                      const std::vector<double>& scales) {
  const auto fail = [name](const std::string& why) {
    throw InvalidArgument(std::string(name) + ": " + why);
  };
  if (weights.empty()) fail("at least one component is required");
  if (locations.size() != weights.size() || scales.size() != weights.size()) {
    fail("weights, locations and scales must have the same length");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail("weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "weights must sum to 1 (got " << sum << ")";
    fail(os.str());
  }
  for (double m : locations) {
    if (!std::isfinite(m)) fail("component locations must be finite");
  }
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) fail("component scales must be > 0");
  }
}

std::size_t pick_component(const std::vector<double>& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

double normal_log_pdf(double x, double mean, double std) {
  const double z = (x - mean) / std;
  return -0.5 * z * z - std::log(std) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double kld_estimate(const GmmParams& gmm, double ref_mean, double ref_std,
                    std::size_t n_mc, Rng& rng) {
  double acc = 0.0;
  for (std::size_t s = 0; s < n_mc; ++s) {
    const double x = draw_gmm(gmm, rng);
    acc += gmm_log_pdf(gmm, x) - normal_log_pdf(x, ref_mean, ref_std);
  }
  return std::max(0.0, acc / static_cast<double>(n_mc));
}

}  // namespace

void GmmParams::validate() const {
  validate_mixture("GmmParams", weights, means, stds);
}

GmmParams GmmParams::gaussian(double mean, double std) {
  return GmmParams{{1.0}, {mean}, {std}};
}

void LmmParams::validate() const {
  validate_mixture("LmmParams", weights, log_means, log_stds);
}

Moments gmm_total_moments(const GmmParams& params) {
  params.validate();
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    mean += params.weights[i] * params.means[i];
    second += params.weights[i] *
              (params.stds[i] * params.stds[i] + params.means[i] * params.means[i]);
  }
  return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

double gmm_log_pdf(const GmmParams& params, double x) {
  const auto term = [&](std::size_t i) {
    return params.weights[i] > 0.0
               ? std::log(params.weights[i]) +
                     normal_log_pdf(x, params.means[i], params.stds[i])
               : -std::numeric_limits<double>::infinity();
  };
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params.size(); ++i) peak = std::max(peak, term(i));
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) sum += std::exp(term(i) - peak);
  return peak + std::log(sum);
}

double gmm_pdf(const GmmParams& params, double x) {
  return std::exp(gmm_log_pdf(params, x));
}

double lmm_cdf(const LmmParams& params, double x) {
  if (x <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double z = (std::log(x) - params.log_means[i]) / params.log_stds[i];
    acc += params.weights[i] * 0.5 * std::erfc(-z / std::numbers::sqrt2);
  }
  return acc;
}

double draw_gmm(const GmmParams& params, Rng& rng) {
  const std::size_t c = pick_component(params.weights, rng);
  return rng.gaussian(params.means[c], params.stds[c]);
}

std::vector<double> sample_gmm(const GmmParams& params, std::size_t n,
                               Rng& rng) {
  params.validate();
  std::vector<double> out(n);
  for (auto& x : out) x = draw_gmm(params, rng);
  return out;
}

std::vector<double> sample_lmm(const LmmParams& params, std::size_t n,
                               Rng& rng) {
  params.validate();
  std::vector<double> out(n);
  for (auto& x : out) {
    const std::size_t c = pick_component(params.weights, rng);
    x = std::exp(rng.gaussian(params.log_means[c], params.log_stds[c]));
  }
  return out;
}

double kld_gmm_vs_gaussian(const GmmParams& gmm, double ref_mean,
                           double ref_std, std::size_t n_mc, Rng& rng) {
  gmm.validate();
  if (!(ref_std > 0.0)) {
    throw InvalidArgument("kld_gmm_vs_gaussian: reference std must be > 0");
  }
  if (n_mc < 10000) {
    throw InvalidArgument("kld_gmm_vs_gaussian: n_mc must be >= 10000");
  }
  return kld_estimate(gmm, ref_mean, ref_std, n_mc, rng);
}

void FitTarget::validate() const {
  if (k_components < 1) throw InvalidArgument("FitTarget: k must be >= 1");
  if (!(total_std > 0.0)) throw InvalidArgument("FitTarget: std must be > 0");
  if (!std::isfinite(total_mean)) {
    throw InvalidArgument("FitTarget: mean must be finite");
  }
  if (!(similarity_threshold > 0.0)) {
    throw InvalidArgument("FitTarget: eta must be > 0");
  }
  if (sample_count < 1000) {
    throw InvalidArgument("FitTarget: sample count must be >= 1000");
  }
  if (max_iterations < 1) {
    throw InvalidArgument("FitTarget: max iterations must be >= 1");
  }
}

FitResult fit_gmm_random_search(const FitTarget& target, Rng& rng) {
  target.validate();
  const std::size_t k = target.k_components;
  const double mu = target.total_mean;
  const double sigma = target.total_std;

  if (k == 1) {
    // The single component is fully determined by the target moments.
    FitResult r;
    r.params = GmmParams::gaussian(mu, sigma);
    r.moments = {mu, sigma};
    r.kld = kld_estimate(r.params, mu, sigma, target.sample_count, rng);
    r.iterations = 1;
    return r;
  }

  const double mean_lo = mu - 3.0 * sigma;
  const double mean_hi = mu + 3.0 * sigma;
  const double log_std_lo = std::log(sigma / 10.0);
  const double log_std_hi = std::log(3.0 * sigma);

  std::optional<GmmParams> best;
  bool best_reached_kld = false;
  double best_std_err = std::numeric_limits<double>::infinity();
  double best_kld = std::numeric_limits<double>::quiet_NaN();

  GmmParams cand;
  cand.weights.resize(k);
  cand.means.resize(k);
  cand.stds.resize(k);

  for (std::size_t it = 1; it <= target.max_iterations; ++it) {
    // Uniform on the simplex: normalised unit exponentials.
    double total = 0.0;
    for (auto& w : cand.weights) {
      w = -std::log1p(-rng.uniform());
      total += w;
    }
    double head = 0.0;
    double head_moment = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      cand.weights[i] /= total;
      cand.means[i] = rng.uniform(mean_lo, mean_hi);
      head += cand.weights[i];
      head_moment += cand.weights[i] * cand.means[i];
    }
    for (auto& s : cand.stds) s = std::exp(rng.uniform(log_std_lo, log_std_hi));

    const double last_w = 1.0 - head;
    if (last_w < 1e-9) continue;
    const double last_mean = (mu - head_moment) / last_w;
    if (last_mean < mean_lo || last_mean > mean_hi) continue;
    cand.weights[k - 1] = last_w;
    cand.means[k - 1] = last_mean;

    const Moments m = gmm_total_moments(cand);
    const double std_err = std::abs(m.std - sigma) / sigma;
    const bool std_ok = std_err <= kFitStdRelTolerance;
    const bool mean_ok = std::abs(m.mean - mu) <= kFitMeanTolerance * sigma;

    if (!(std_ok && mean_ok)) {
      if (!best_reached_kld && std_err < best_std_err) {
        best = cand;
        best_std_err = std_err;
      }
      continue;
    }

    const double kld = kld_estimate(cand, mu, sigma, target.sample_count, rng);
    if (kld <= target.similarity_threshold) {
      return FitResult{cand, m, kld, it};
    }
    if (!best_reached_kld || kld < best_kld) {
      best = cand;
      best_reached_kld = true;
      best_std_err = std_err;
      best_kld = kld;
    }
  }

  std::ostringstream os;
  os << "random search exhausted " << target.max_iterations
     << " iterations without a feasible mixture";
  throw FitFailure(os.str(), best, best_std_err, best_kld,
                   target.max_iterations);
}

std::vector<double> sample_exponential(double rate, std::size_t n, Rng& rng) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidArgument("sample_exponential: rate must be > 0");
  }
  std::exponential_distribution<double> dist(rate);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng.engine());
  return out;
}

}  // namespace mchain
