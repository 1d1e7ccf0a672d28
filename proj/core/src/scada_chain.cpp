#include "mchain/scada_chain.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mchain {
namespace {

constexpr double kMinutesPerRadian = 180.0 * 60.0 / std::numbers::pi;
constexpr double kEdgeTolerance = 1e-9;

double cross(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

double signed_area(const std::array<ChartPoint, 4>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % 4];
    a += cross(p.rcf, p.angle_minutes, q.rcf, q.angle_minutes);
  }
  return 0.5 * a;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw InvalidArgument(std::string("stage input '") + what + "' is not finite");
  }
}

}  // namespace

void TruthRecord::validate() const {
  if (!std::isfinite(t)) throw InvalidArgument("TruthRecord: t must be finite");
  if (!(v_true >= 0.0) || !std::isfinite(v_true)) {
    throw InvalidArgument("TruthRecord: v_true must be finite and >= 0");
  }
  if (!(i_true >= 0.0) || !std::isfinite(i_true)) {
    throw InvalidArgument("TruthRecord: i_true must be finite and >= 0");
  }
  if (!std::isfinite(delta_v_true) || !std::isfinite(delta_i_true)) {
    throw InvalidArgument("TruthRecord: angles must be finite");
  }
}

AccuracyRegion::AccuracyRegion(TransformerKind kind, double class_value,
                               std::array<ChartPoint, 4> vertices)
    : kind_(kind), class_value_(class_value), vertices_(vertices) {
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.rcf) || !std::isfinite(p.angle_minutes)) {
      throw InvalidArgument("AccuracyRegion: vertices must be finite");
    }
  }
  const double area = signed_area(vertices_);
  if (!(std::abs(area) > 0.0)) {
    throw InvalidArgument("AccuracyRegion: degenerate polygon");
  }
  if (area < 0.0) std::swap(vertices_[1], vertices_[3]);

  const auto edge = [this](std::size_t i) {
    const auto& p = vertices_[i];
    const auto& q = vertices_[(i + 1) % 4];
    return ChartPoint{q.rcf - p.rcf, q.angle_minutes - p.angle_minutes};
  };
  for (std::size_t i = 0; i < 2; ++i) {
    const ChartPoint a = edge(i);
    const ChartPoint b = edge(i + 2);
    if (std::abs(a.rcf + b.rcf) > kEdgeTolerance ||
        std::abs(a.angle_minutes + b.angle_minutes) > kEdgeTolerance) {
      throw InvalidArgument("AccuracyRegion: polygon is not a parallelogram");
    }
  }
  const ChartPoint center{1.0, 0.0};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = vertices_[i];
    const ChartPoint e = edge(i);
    if (cross(e.rcf, e.angle_minutes, center.rcf - p.rcf,
              center.angle_minutes - p.angle_minutes) <= 0.0) {
      throw InvalidArgument(
          "AccuracyRegion: (RCF=1, angle=0) must lie inside the polygon");
    }
  }
}

AccuracyRegion AccuracyRegion::standard(TransformerKind kind,
                                        double class_value) {
  if (!(class_value > 0.0) || !std::isfinite(class_value)) {
    throw InvalidArgument("AccuracyRegion: accuracy class must be > 0");
  }
  const double a = class_value / 100.0;
  const double span = 5200.0 * a;  // 2600 * (2a): angle swing across the RCF band
  if (kind == TransformerKind::VT) {
    return AccuracyRegion(kind, class_value,
                          {ChartPoint{1.0 - a, 0.0}, ChartPoint{1.0 + a, -span},
                           ChartPoint{1.0 + a, 0.0}, ChartPoint{1.0 - a, span}});
  }
  return AccuracyRegion(kind, class_value,
                        {ChartPoint{1.0 - a, -span}, ChartPoint{1.0 + a, 0.0},
                         ChartPoint{1.0 + a, span}, ChartPoint{1.0 - a, 0.0}});
}

bool AccuracyRegion::contains(const ChartPoint& p) const {
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % 4];
    if (cross(b.rcf - a.rcf, b.angle_minutes - a.angle_minutes, p.rcf - a.rcf,
              p.angle_minutes - a.angle_minutes) < 0.0) {
      return false;
    }
  }
  return true;
}

ChartPoint SystematicError::to_chart() const {
  return {1.0 + ratio_dev, angle_dev * kMinutesPerRadian};
}

SystematicError SystematicError::from_chart(const ChartPoint& p) {
  return {p.rcf - 1.0, p.angle_minutes / kMinutesPerRadian};
}

SystematicError sample_systematic_error(const AccuracyRegion& region,
                                        Rng& rng) {
  const auto& v = region.vertices();
  const double u = rng.uniform();
  const double w = rng.uniform();
  const ChartPoint p{
      v[0].rcf + u * (v[1].rcf - v[0].rcf) + w * (v[3].rcf - v[0].rcf),
      v[0].angle_minutes + u * (v[1].angle_minutes - v[0].angle_minutes) +
          w * (v[3].angle_minutes - v[0].angle_minutes)};
  return SystematicError::from_chart(p);
}

void StageNoiseConfig::validate() const {
  for (const auto* g : {&vt_random, &vt_angle_random, &ct_random,
                        &ct_angle_random}) {
    if (*g) (*g)->validate();
  }
  for (const auto* c : {&cable_v, &cable_angle_v, &cable_i, &cable_angle_i}) {
    if (!std::isfinite(c->mean) || !(c->std >= 0.0) || !std::isfinite(c->std)) {
      throw InvalidArgument("StageNoiseConfig: cable errors need finite mean, std >= 0");
    }
  }
  for (double s : {ied_v, ied_p, ied_q}) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("StageNoiseConfig: IED stds must be >= 0");
    }
  }
}

TransformerErrors draw_transformer_errors(const SystematicError& vt_sys,
                                          const SystematicError& ct_sys,
                                          const StageNoiseConfig& noise,
                                          Rng& rng) {
  const auto random = [&rng](const std::optional<GmmParams>& g) {
    return g ? draw_gmm(*g, rng) : 0.0;
  };
  TransformerErrors e;
  e.v_ratio = vt_sys.ratio_dev + random(noise.vt_random);
  e.v_angle = vt_sys.angle_dev + random(noise.vt_angle_random);
  e.i_ratio = ct_sys.ratio_dev + random(noise.ct_random);
  e.i_angle = ct_sys.angle_dev + random(noise.ct_angle_random);
  return e;
}

CableErrors draw_cable_errors(const StageNoiseConfig& noise, Rng& rng) {
  CableErrors e;
  e.v = rng.gaussian(noise.cable_v.mean, noise.cable_v.std);
  e.v_angle = rng.gaussian(noise.cable_angle_v.mean, noise.cable_angle_v.std);
  e.i = rng.gaussian(noise.cable_i.mean, noise.cable_i.std);
  e.i_angle = rng.gaussian(noise.cable_angle_i.mean, noise.cable_angle_i.std);
  return e;
}

IedErrors draw_ied_errors(const StageNoiseConfig& noise, Rng& rng) {
  IedErrors e;
  e.v = rng.gaussian(0.0, noise.ied_v);
  e.p = rng.gaussian(0.0, noise.ied_p);
  e.q = rng.gaussian(0.0, noise.ied_q);
  return e;
}

PhasorPair transformer_output(const TruthRecord& truth,
                              const TransformerErrors& e) {
  return {truth.v_true * (1.0 + e.v_ratio), truth.delta_v_true + e.v_angle,
          truth.i_true * (1.0 + e.i_ratio), truth.delta_i_true + e.i_angle};
}

PhasorPair cable_output(const PhasorPair& s1, const CableErrors& e) {
  return {s1.v + e.v, s1.delta_v + e.v_angle, s1.i + e.i,
          s1.delta_i + e.i_angle};
}

IedOutput ied_output(const PhasorPair& s2, const IedErrors& e) {
  const double s = s2.v * s2.i;
  const double phi = s2.delta_v - s2.delta_i;
  IedOutput out;
  out.v3 = s2.v + e.v;
  out.p2 = s * std::cos(phi);
  out.q2 = s * std::sin(phi);
  out.p3 = out.p2 + e.p;
  out.q3 = out.q2 + e.q;
  return out;
}

PhasorPair apply_transformer(const TruthRecord& truth,
                             const SystematicError& vt_sys,
                             const SystematicError& ct_sys,
                             const StageNoiseConfig& noise, Rng& rng) {
  truth.validate();
  return transformer_output(truth,
                            draw_transformer_errors(vt_sys, ct_sys, noise, rng));
}

PhasorPair apply_cable_burden(const PhasorPair& stage1,
                              const StageNoiseConfig& noise, Rng& rng) {
  require_finite(stage1.v, "V1");
  require_finite(stage1.delta_v, "delta1_V");
  require_finite(stage1.i, "I1");
  require_finite(stage1.delta_i, "delta1_I");
  return cable_output(stage1, draw_cable_errors(noise, rng));
}

IedOutput ied_compute(const PhasorPair& stage2, const StageNoiseConfig& noise,
                      Rng& rng) {
  require_finite(stage2.v, "V2");
  require_finite(stage2.delta_v, "delta2_V");
  require_finite(stage2.i, "I2");
  require_finite(stage2.delta_i, "delta2_I");
  return ied_output(stage2, draw_ied_errors(noise, rng));
}

}  // namespace mchain
