#include "mchain/output.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "json.hpp"

namespace mchain {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

std::string fmt(double x) { return format_double(x); }

void add_stats(Summary& out, const std::string& name, const RunningStats& s) {
  out.emplace_back(name + "_mean", fmt(s.mean()));
  out.emplace_back(name + "_std", fmt(s.std()));
}

}  // namespace

void write_scada_csv(std::ostream& os, std::span<const ScadaRecord> records,
                     bool debug) {
  os << "k,t,status,v4,p4,q4,latency,buffer,total_delay";
  if (debug) {
    os << ",v_true,v1,v2,v3,delta_v1_deg,delta_v2_deg,i1,i2,delta_i1_deg,"
          "delta_i2_deg,p2,p3,q2,q3,b_k,e_cn_v,e_cn_p,e_cn_q";
  }
  os << '\n';
  for (const auto& r : records) {
    os << r.k << ',' << fmt(r.t) << ',' << to_string(r.delay.status) << ','
       << fmt(r.v4) << ',' << fmt(r.p4) << ',' << fmt(r.q4) << ','
       << fmt(r.delay.latency) << ',' << fmt(r.delay.buffer_draw) << ','
       << fmt(r.delay.total_delay);
    if (debug) {
      os << ',' << fmt(r.truth.v_true) << ',' << fmt(r.v1) << ',' << fmt(r.v2)
         << ',' << fmt(r.v3) << ',' << fmt(r.delta_v1 * kDegPerRad) << ','
         << fmt(r.delta_v2 * kDegPerRad) << ',' << fmt(r.i1) << ',' << fmt(r.i2)
         << ',' << fmt(r.delta_i1 * kDegPerRad) << ','
         << fmt(r.delta_i2 * kDegPerRad) << ',' << fmt(r.p2) << ',' << fmt(r.p3)
         << ',' << fmt(r.q2) << ',' << fmt(r.q3) << ','
         << (r.delay.buffer_limit ? fmt(*r.delay.buffer_limit) : std::string())
         << ',' << fmt(r.cn.v) << ',' << fmt(r.cn.p) << ',' << fmt(r.cn.q);
    }
    os << '\n';
  }
}

void write_pmu_csv(std::ostream& os, std::span<const PmuFrame> frames, bool debug) {
  os << "report_time,v_mag,v_angle_deg,i_mag,i_angle_deg,gps_locked,"
        "injected_angle_error_deg";
  if (debug) os << ",v_ref_mag,v_ref_angle_deg,i_ref_mag,i_ref_angle_deg";
  os << '\n';
  for (const auto& f : frames) {
    os << fmt(f.report_time) << ',' << fmt(std::abs(f.v_phasor)) << ','
       << fmt(std::arg(f.v_phasor) * kDegPerRad) << ','
       << fmt(std::abs(f.i_phasor)) << ','
       << fmt(std::arg(f.i_phasor) * kDegPerRad) << ','
       << (f.gps_locked ? 1 : 0) << ','
       << fmt(f.injected_angle_error * kDegPerRad);
    if (debug) {
      os << ',' << fmt(std::abs(f.v_reference)) << ','
         << fmt(std::arg(f.v_reference) * kDegPerRad) << ','
         << fmt(std::abs(f.i_reference)) << ','
         << fmt(std::arg(f.i_reference) * kDegPerRad);
    }
    os << '\n';
  }
}

void write_pmu_jsonl(std::ostream& os, std::span<const PmuFrame> frames, bool debug) {
  for (const auto& f : frames) {
    nlohmann::ordered_json j;
    j["report_time"] = f.report_time;
    j["v_mag"] = std::abs(f.v_phasor);
    j["v_angle_deg"] = std::arg(f.v_phasor) * kDegPerRad;
    j["i_mag"] = std::abs(f.i_phasor);
    j["i_angle_deg"] = std::arg(f.i_phasor) * kDegPerRad;
    j["gps_locked"] = f.gps_locked;
    j["injected_angle_error_deg"] = f.injected_angle_error * kDegPerRad;
    if (debug) {
      j["v_ref_mag"] = std::abs(f.v_reference);
      j["v_ref_angle_deg"] = std::arg(f.v_reference) * kDegPerRad;
      j["i_ref_mag"] = std::abs(f.i_reference);
      j["i_ref_angle_deg"] = std::arg(f.i_reference) * kDegPerRad;
    }
    os << j.dump() << '\n';
  }
}

Summary summarize_scada(std::span<const ScadaRecord> records) {
  RunningStats v1, v2, v3, v4, p3, p4, q3, q4, delay;
  std::size_t discarded = 0;
  for (const auto& r : records) {
    const double phi = r.truth.delta_v_true - r.truth.delta_i_true;
    const double s = r.truth.v_true * r.truth.i_true;
    const double p_true = s * std::cos(phi);
    const double q_true = s * std::sin(phi);
    v1.add(r.v1 - r.truth.v_true);
    v2.add(r.v2 - r.truth.v_true);
    v3.add(r.v3 - r.truth.v_true);
    v4.add(r.v4 - r.truth.v_true);
    p3.add(r.p3 - p_true);
    p4.add(r.p4 - p_true);
    q3.add(r.q3 - q_true);
    q4.add(r.q4 - q_true);
    delay.add(r.delay.total_delay);
    discarded += r.delay.status == SampleStatus::Discarded;
  }
  Summary out;
  out.emplace_back("samples", std::to_string(records.size()));
  out.emplace_back("discarded", std::to_string(discarded));
  add_stats(out, "err_v1", v1);
  add_stats(out, "err_v2", v2);
  add_stats(out, "err_v3", v3);
  add_stats(out, "err_v4", v4);
  add_stats(out, "err_p3", p3);
  add_stats(out, "err_p4", p4);
  add_stats(out, "err_q3", q3);
  add_stats(out, "err_q4", q4);
  add_stats(out, "total_delay", delay);
  return out;
}

Summary summarize_pmu(std::span<const PmuFrame> frames) {
  RunningStats vmag, vang, imag, iang;
  std::size_t unlocked = 0;
  for (const auto& f : frames) {
    vmag.add(std::abs(f.v_phasor) - std::abs(f.v_reference));
    vang.add(wrap_angle(std::arg(f.v_phasor) - std::arg(f.v_reference)) * kDegPerRad);
    imag.add(std::abs(f.i_phasor) - std::abs(f.i_reference));
    iang.add(wrap_angle(std::arg(f.i_phasor) - std::arg(f.i_reference)) * kDegPerRad);
    unlocked += !f.gps_locked;
  }
  Summary out;
  out.emplace_back("frames", std::to_string(frames.size()));
  out.emplace_back("gps_unlocked_frames", std::to_string(unlocked));
  add_stats(out, "err_v_mag", vmag);
  add_stats(out, "err_v_angle_deg", vang);
  add_stats(out, "err_i_mag", imag);
  add_stats(out, "err_i_angle_deg", iang);
  if (!frames.empty()) {
    const PmuFrame& last = frames.back();
    out.emplace_back("final_angle_error_deg",
                     fmt(wrap_angle(std::arg(last.v_phasor) - std::arg(last.v_reference)) *
                         kDegPerRad));
    out.emplace_back("final_injected_angle_error_deg",
                     fmt(last.injected_angle_error * kDegPerRad));
  }
  return out;
}

Summary summarize_cn(const CnRun& run) {
  RunningStats latency, delay, ev, ep, eq;
  for (const auto& e : run.schedule.entries) {
    latency.add(e.latency);
    delay.add(e.total_delay);
  }
  for (const auto& e : run.errors) {
    ev.add(e.v);
    ep.add(e.p);
    eq.add(e.q);
  }
  Summary out;
  out.emplace_back("samples", std::to_string(run.schedule.size()));
  out.emplace_back("discarded", std::to_string(run.schedule.discarded_count()));
  add_stats(out, "latency", latency);
  add_stats(out, "total_delay", delay);
  add_stats(out, "err_cn_v", ev);
  add_stats(out, "err_cn_p", ep);
  add_stats(out, "err_cn_q", eq);
  return out;
}

void write_summary(std::ostream& os, const Summary& summary) {
  for (const auto& [k, v] : summary) os << k << '=' << v << '\n';
}

}  // namespace mchain
