#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mchain/error.hpp"
#include "mchain/rng.hpp"

namespace mchain {

/// Gaussian mixture: component weights, means and standard deviations.
struct GmmParams {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stds;

  std::size_t size() const noexcept { return weights.size(); }

  /// Throws InvalidArgument unless weights are non-negative and sum to 1
  /// (1e-12), every std is positive and all vectors share a length K >= 1.
  void validate() const;

  /// Single-component mixture N(mean, std).
  static GmmParams gaussian(double mean, double std);
};

/// Lognormal mixture over latency in seconds. log_means / log_stds are the
/// parameters of ln(x) for each component.
struct LmmParams {
  std::vector<double> weights;
  std::vector<double> log_means;
  std::vector<double> log_stds;

  std::size_t size() const noexcept { return weights.size(); }
  void validate() const;
};

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

/// Closed-form mean and standard deviation of the whole mixture.
Moments gmm_total_moments(const GmmParams& params);

/// Mixture density and log-density at x.
double gmm_pdf(const GmmParams& params, double x);
double gmm_log_pdf(const GmmParams& params, double x);

/// Mixture CDF of an LMM at x (seconds).
double lmm_cdf(const LmmParams& params, double x);

/// Draws one value: component by weight, then a Gaussian draw from it.
double draw_gmm(const GmmParams& params, Rng& rng);

std::vector<double> sample_gmm(const GmmParams& params, std::size_t n,
                               Rng& rng);

/// Positive latency samples (seconds).
std::vector<double> sample_lmm(const LmmParams& params, std::size_t n,
                               Rng& rng);

/// Monte Carlo estimate of KL(gmm || N(ref_mean, ref_std)) in nats, using
/// n_mc samples drawn from the mixture. Clamped at 0.
double kld_gmm_vs_gaussian(const GmmParams& gmm, double ref_mean,
                           double ref_std, std::size_t n_mc, Rng& rng);

/// Inputs of the random-search mixture design procedure.
struct FitTarget {
  std::size_t k_components = 1;
  double total_std = 0.0;
  double total_mean = 0.0;
  double similarity_threshold = 0.0;  // eta, nats
  std::size_t sample_count = 100000;
  std::size_t max_iterations = 1000000;

  void validate() const;
};

/// Acceptance tolerances applied to a candidate's total moments.
inline constexpr double kFitStdRelTolerance = 0.01;
inline constexpr double kFitMeanTolerance = 0.01;  // fraction of total_std

struct FitResult {
  GmmParams params;
  Moments moments;
  double kld = 0.0;
  std::size_t iterations = 0;
};

/// Raised when fit_gmm_random_search exhausts its budget. Carries the best
/// candidate seen and its diagnostics.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, std::optional<GmmParams> best,
             double std_rel_error, double kld, std::size_t iterations)
      : Error(what),
        best_(std::move(best)),
        std_rel_error_(std_rel_error),
        kld_(kld),
        iterations_(iterations) {}

  const std::optional<GmmParams>& best() const noexcept { return best_; }
  double std_rel_error() const noexcept { return std_rel_error_; }
  /// NaN when no candidate reached the KLD evaluation.
  double kld() const noexcept { return kld_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::optional<GmmParams> best_;
  double std_rel_error_;
  double kld_;
  std::size_t iterations_;
};

/// Random search for a K-component mixture whose total moments match the
/// target Gaussian and whose KLD to it is at most the threshold.
///
/// Per candidate: weights uniform on the simplex; the first K-1 means uniform
/// in [mean - 3 std, mean + 3 std]; the K-th mean closes the total mean
/// exactly; all K stds log-uniform in [std / 10, 3 std]. The first candidate
/// meeting all three conditions is returned.
FitResult fit_gmm_random_search(const FitTarget& target, Rng& rng);

/// Exponential draws with the given rate (per second).
std::vector<double> sample_exponential(double rate, std::size_t n, Rng& rng);

}  // namespace mchain
