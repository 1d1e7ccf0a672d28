#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mchain/distributions.hpp"
#include "mchain/rng.hpp"

namespace mchain {

/// Ground-truth phasor sample. Magnitudes per-unit, angles radians.
struct TruthRecord {
  double t = 0.0;
  double v_true = 0.0;
  double delta_v_true = 0.0;
  double i_true = 0.0;
  double delta_i_true = 0.0;

  void validate() const;
};

enum class TransformerKind { VT, CT };

/// A point of the accuracy chart: ratio correction factor and phase angle in
/// minutes.
struct ChartPoint {
  double rcf = 1.0;
  double angle_minutes = 0.0;
};

/// Parallelogram of admissible (RCF, phase angle) pairs for one accuracy
/// class. Vertices are stored counter-clockwise.
class AccuracyRegion {
 public:
  /// Validates and normalises orientation. Throws InvalidArgument if the
  /// polygon is not a non-degenerate parallelogram containing (1, 0).
  AccuracyRegion(TransformerKind kind, double class_value,
                 std::array<ChartPoint, 4> vertices);

  /// Default chart: RCF in [1 - c/100, 1 + c/100] and the correction factor
  /// TCF = RCF +/- angle/2600 (VT: +, CT: -) bounded in the same interval.
  static AccuracyRegion standard(TransformerKind kind, double class_value);

  TransformerKind kind() const noexcept { return kind_; }
  double class_value() const noexcept { return class_value_; }
  const std::array<ChartPoint, 4>& vertices() const noexcept { return vertices_; }

  /// Closed containment test against the four edge half-planes.
  bool contains(const ChartPoint& p) const;

 private:
  TransformerKind kind_;
  double class_value_;
  std::array<ChartPoint, 4> vertices_;
};

/// Accuracy classes shipped for both VTs and CTs.
inline constexpr std::array<double, 3> kStandardAccuracyClasses{0.3, 0.6, 1.2};

/// Persistent transformer miscalibration: ratio_dev = RCF - 1, angle_dev in
/// radians.
struct SystematicError {
  double ratio_dev = 0.0;
  double angle_dev = 0.0;

  ChartPoint to_chart() const;
  static SystematicError from_chart(const ChartPoint& p);
};

/// Uniform draw inside the region's parallelogram.
SystematicError sample_systematic_error(const AccuracyRegion& region, Rng& rng);

/// Gaussian with possibly non-zero mean; std == 0 means a constant offset.
struct GaussianSpec {
  double mean = 0.0;
  double std = 0.0;
};

/// Random-error configuration for transformers, cables/burdens and IEDs.
/// Transformer random errors are mixtures; an empty optional disables them.
/// Angle quantities are in radians.
struct StageNoiseConfig {
  std::optional<GmmParams> vt_random;
  std::optional<GmmParams> vt_angle_random;
  std::optional<GmmParams> ct_random;
  std::optional<GmmParams> ct_angle_random;
  GaussianSpec cable_v;
  GaussianSpec cable_angle_v;
  GaussianSpec cable_i;
  GaussianSpec cable_angle_i;
  double ied_v = 0.0;
  double ied_p = 0.0;
  double ied_q = 0.0;

  void validate() const;
};

struct PhasorPair {
  double v = 0.0;
  double delta_v = 0.0;
  double i = 0.0;
  double delta_i = 0.0;
};

/// Transformer errors for one sample: systematic plus random terms combined.
struct TransformerErrors {
  double v_ratio = 0.0;
  double v_angle = 0.0;
  double i_ratio = 0.0;
  double i_angle = 0.0;
};

struct CableErrors {
  double v = 0.0;
  double v_angle = 0.0;
  double i = 0.0;
  double i_angle = 0.0;
};

struct IedErrors {
  double v = 0.0;
  double p = 0.0;
  double q = 0.0;
};

struct IedOutput {
  double v3 = 0.0;
  double p2 = 0.0;
  double q2 = 0.0;
  double p3 = 0.0;
  double q3 = 0.0;
};

TransformerErrors draw_transformer_errors(const SystematicError& vt_sys,
                                          const SystematicError& ct_sys,
                                          const StageNoiseConfig& noise,
                                          Rng& rng);
CableErrors draw_cable_errors(const StageNoiseConfig& noise, Rng& rng);
IedErrors draw_ied_errors(const StageNoiseConfig& noise, Rng& rng);

/// V1 = V(1 + e), delta1 = delta + e; current analogues.
PhasorPair transformer_output(const TruthRecord& truth,
                              const TransformerErrors& e);
/// Additive cable/burden errors.
PhasorPair cable_output(const PhasorPair& stage1, const CableErrors& e);
/// Power computation inside the IED plus additive IED noise.
IedOutput ied_output(const PhasorPair& stage2, const IedErrors& e);

PhasorPair apply_transformer(const TruthRecord& truth,
                             const SystematicError& vt_sys,
                             const SystematicError& ct_sys,
                             const StageNoiseConfig& noise, Rng& rng);
PhasorPair apply_cable_burden(const PhasorPair& stage1,
                              const StageNoiseConfig& noise, Rng& rng);
IedOutput ied_compute(const PhasorPair& stage2, const StageNoiseConfig& noise,
                      Rng& rng);

}  // namespace mchain
