#include "mchain/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "mchain/error.hpp"
#include "mchain/pipeline.hpp"

namespace mchain {
namespace {

using nlohmann::json;

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw InvalidArgument("config: '" + key + "': " + why);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(join(where, key), "unknown key");
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(key, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

bool boolean(const json& j, const std::string& key) {
  if (!j.is_boolean()) fail(key, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) fail(key, "expected a string");
  return j.get<std::string>();
}

std::uint64_t unsigned_int(const json& j, const std::string& key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail(key, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<double> numbers(const json& j, const std::string& key) {
  if (!j.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    if (std::string_view(e.what()).starts_with("config:")) throw;
    fail(key, e.what());
  }
}

GmmParams gmm(const json& j, const std::string& key, double scale = 1.0) {
  check_keys(j, key, {"weights", "means", "stds"});
  for (const char* f : {"weights", "means", "stds"}) {
    if (!j.contains(f)) fail(join(key, f), "required");
  }
  GmmParams g{numbers(j["weights"], join(key, "weights")),
              numbers(j["means"], join(key, "means")),
              numbers(j["stds"], join(key, "stds"))};
  for (auto& m : g.means) m *= scale;
  for (auto& s : g.stds) s *= scale;
  wrap(key, [&] { g.validate(); return 0; });
  return g;
}

GaussianSpec gaussian(const json& j, const std::string& key, double scale = 1.0) {
  check_keys(j, key, {"mean", "std"});
  GaussianSpec g;
  if (j.contains("mean")) g.mean = number(j["mean"], join(key, "mean")) * scale;
  if (j.contains("std")) g.std = number(j["std"], join(key, "std")) * scale;
  if (g.std < 0.0) fail(join(key, "std"), "must be >= 0");
  return g;
}

AccuracyRegion region(const json& j, const std::string& key, TransformerKind kind) {
  check_keys(j, key, {"class", "vertices"});
  if (!j.contains("class")) fail(join(key, "class"), "required");
  const double cls = number(j["class"], join(key, "class"));
  if (!j.contains("vertices")) {
    return wrap(key, [&] { return AccuracyRegion::standard(kind, cls); });
  }
  const json& v = j["vertices"];
  if (!v.is_array() || v.size() != 4) fail(join(key, "vertices"), "expected four [rcf, minutes] pairs");
  std::array<ChartPoint, 4> pts;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto xy = numbers(v[i], join(key, "vertices") + "[" + std::to_string(i) + "]");
    if (xy.size() != 2) fail(join(key, "vertices"), "each vertex is [rcf, minutes]");
    pts[i] = {xy[0], xy[1]};
  }
  return wrap(key, [&] { return AccuracyRegion(kind, cls, pts); });
}

void parse_transformers(const json& j, RunConfig& cfg) {
  const std::string key = "transformers";
  check_keys(j, key, {"systematic", "vt", "ct"});
  if (j.contains("systematic")) cfg.systematic = boolean(j["systematic"], key + ".systematic");
  if (j.contains("vt")) cfg.vt_region = region(j["vt"], key + ".vt", TransformerKind::VT);
  if (j.contains("ct")) cfg.ct_region = region(j["ct"], key + ".ct", TransformerKind::CT);
}

void parse_noise(const json& j, StageNoiseConfig& n) {
  const std::string key = "noise";
  check_keys(j, key,
             {"vt_ratio", "vt_angle_deg", "ct_ratio", "ct_angle_deg", "cable_v",
              "cable_angle_v_deg", "cable_i", "cable_angle_i_deg", "ied_v_std",
              "ied_p_std", "ied_q_std"});
  const auto opt_gmm = [&](const char* name, double scale) -> std::optional<GmmParams> {
    if (!j.contains(name) || j[name].is_null()) return std::nullopt;
    return gmm(j[name], join(key, name), scale);
  };
  n.vt_random = opt_gmm("vt_ratio", 1.0);
  n.vt_angle_random = opt_gmm("vt_angle_deg", kRadPerDeg);
  n.ct_random = opt_gmm("ct_ratio", 1.0);
  n.ct_angle_random = opt_gmm("ct_angle_deg", kRadPerDeg);
  if (j.contains("cable_v")) n.cable_v = gaussian(j["cable_v"], key + ".cable_v");
  if (j.contains("cable_angle_v_deg")) {
    n.cable_angle_v = gaussian(j["cable_angle_v_deg"], key + ".cable_angle_v_deg", kRadPerDeg);
  }
  if (j.contains("cable_i")) n.cable_i = gaussian(j["cable_i"], key + ".cable_i");
  if (j.contains("cable_angle_i_deg")) {
    n.cable_angle_i = gaussian(j["cable_angle_i_deg"], key + ".cable_angle_i_deg", kRadPerDeg);
  }
  const auto std_field = [&](const char* name, double& out) {
    if (!j.contains(name)) return;
    out = number(j[name], join(key, name));
    if (out < 0.0) fail(join(key, name), "must be >= 0");
  };
  std_field("ied_v_std", n.ied_v);
  std_field("ied_p_std", n.ied_p);
  std_field("ied_q_std", n.ied_q);
}

void parse_scada(const json& j, ScadaSettings& s) {
  const std::string key = "scada";
  check_keys(j, key, {"scan_period", "n_samples", "latency", "buffer", "time_skew", "cn"});
  if (j.contains("scan_period")) s.scan_period = number(j["scan_period"], key + ".scan_period");
  if (j.contains("n_samples")) s.n_samples = unsigned_int(j["n_samples"], key + ".n_samples");
  if (j.contains("latency")) {
    const json& l = j["latency"];
    const std::string lk = key + ".latency";
    if (l.is_object() && l.contains("constant")) {
      check_keys(l, lk, {"constant"});
      s.latency = number(l["constant"], lk + ".constant");
    } else {
      check_keys(l, lk, {"weights", "log_means", "log_stds"});
      for (const char* f : {"weights", "log_means", "log_stds"}) {
        if (!l.contains(f)) fail(join(lk, f), "required");
      }
      LmmParams p{numbers(l["weights"], lk + ".weights"),
                  numbers(l["log_means"], lk + ".log_means"),
                  numbers(l["log_stds"], lk + ".log_stds")};
      wrap(lk, [&] { p.validate(); return 0; });
      s.latency = p;
    }
  }
  if (j.contains("buffer")) {
    const auto b = text(j["buffer"], key + ".buffer");
    if (b == "uniform") s.buffer = BufferMode::Uniform;
    else if (b == "zero") s.buffer = BufferMode::Zero;
    else fail(key + ".buffer", "expected \"uniform\" or \"zero\"");
  }
  if (j.contains("time_skew")) s.time_skew = boolean(j["time_skew"], key + ".time_skew");
  if (j.contains("cn")) {
    const json& c = j["cn"];
    const std::string ck = key + ".cn";
    check_keys(c, ck, {"scheme", "interpolation", "v", "p", "q"});
    if (c.contains("scheme")) {
      const auto sc = text(c["scheme"], ck + ".scheme");
      if (sc == "none") s.scheme = CnScheme::None;
      else if (sc == "scheme1") s.scheme = CnScheme::Scheme1;
      else if (sc == "scheme2") s.scheme = CnScheme::Scheme2;
      else fail(ck + ".scheme", "expected \"none\", \"scheme1\" or \"scheme2\"");
    }
    if (c.contains("interpolation")) {
      const auto m = text(c["interpolation"], ck + ".interpolation");
      if (m == "linear") s.interpolation = Interpolation::Linear;
      else if (m == "nearest") s.interpolation = Interpolation::Nearest;
      else fail(ck + ".interpolation", "expected \"linear\" or \"nearest\"");
    }
    const bool any = c.contains("v") || c.contains("p") || c.contains("q");
    if (any) {
      for (const char* f : {"v", "p", "q"}) {
        if (!c.contains(f)) fail(join(ck, f), "required when any Scheme 2 mixture is given");
      }
      s.scheme2 = Scheme2Config{gmm(c["v"], ck + ".v"), gmm(c["p"], ck + ".p"),
                                gmm(c["q"], ck + ".q")};
    }
  }
}

void parse_pmu(const json& j, PmuSettings& p) {
  const std::string key = "pmu";
  check_keys(j, key, {"reporting_rate", "nominal_freq", "filter", "signal_freq", "timing"});
  if (j.contains("reporting_rate")) p.reporting_rate = number(j["reporting_rate"], key + ".reporting_rate");
  if (j.contains("nominal_freq")) p.nominal_freq = number(j["nominal_freq"], key + ".nominal_freq");
  if (j.contains("filter")) {
    const json& f = j["filter"];
    const std::string fk = key + ".filter";
    check_keys(f, fk, {"ref_freq", "order", "sampling_freq"});
    if (f.contains("ref_freq")) p.filter.ref_freq = number(f["ref_freq"], fk + ".ref_freq");
    if (f.contains("order")) p.filter.order = static_cast<int>(unsigned_int(f["order"], fk + ".order"));
    if (f.contains("sampling_freq")) p.filter.sampling_freq = number(f["sampling_freq"], fk + ".sampling_freq");
  }
  if (j.contains("signal_freq")) {
    const json& f = j["signal_freq"];
    const std::string fk = key + ".signal_freq";
    if (f.is_number()) {
      p.signal_freq = {{0.0, number(f, fk)}};
    } else if (f.is_array()) {
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto tf = numbers(f[i], fk + "[" + std::to_string(i) + "]");
        if (tf.size() != 2) fail(fk, "breakpoints are [t, hz] pairs");
        p.signal_freq.emplace_back(tf[0], tf[1]);
      }
    } else {
      fail(fk, "expected a number or an array of [t, hz] pairs");
    }
  }
  if (j.contains("timing")) {
    const json& t = j["timing"];
    const std::string tk = key + ".timing";
    check_keys(t, tk, {"constant_offset_us", "increment_us", "pps_locked",
                       "gps_drift_us_per_s", "loss_events", "random_loss"});
    if (t.contains("constant_offset_us")) {
      p.timing.constant_offset = number(t["constant_offset_us"], tk + ".constant_offset_us") * 1e-6;
    }
    if (t.contains("increment_us")) {
      p.timing.per_sample_increment = number(t["increment_us"], tk + ".increment_us") * 1e-6;
    }
    if (t.contains("pps_locked")) p.timing.pps_locked = boolean(t["pps_locked"], tk + ".pps_locked");
    if (t.contains("gps_drift_us_per_s")) {
      p.timing.gps_drift_rate = number(t["gps_drift_us_per_s"], tk + ".gps_drift_us_per_s");
    }
    if (t.contains("loss_events")) {
      const json& ev = t["loss_events"];
      if (!ev.is_array()) fail(tk + ".loss_events", "expected an array");
      for (std::size_t i = 0; i < ev.size(); ++i) {
        const std::string ek = tk + ".loss_events[" + std::to_string(i) + "]";
        check_keys(ev[i], ek, {"start", "duration"});
        if (!ev[i].contains("start") || !ev[i].contains("duration")) {
          fail(ek, "start and duration are required");
        }
        GpsLossEvent e{number(ev[i]["start"], ek + ".start"),
                       number(ev[i]["duration"], ek + ".duration")};
        if (e.duration < 0.0) fail(ek + ".duration", "must be >= 0");
        p.timing.loss_events.push_back(e);
      }
    }
    if (t.contains("random_loss")) {
      const json& r = t["random_loss"];
      const std::string rk = tk + ".random_loss";
      check_keys(r, rk, {"rate_per_day", "recovery_rate"});
      RandomGpsLoss rl;
      if (r.contains("rate_per_day")) rl.rate_per_day = number(r["rate_per_day"], rk + ".rate_per_day");
      if (r.contains("recovery_rate")) rl.recovery_rate = number(r["recovery_rate"], rk + ".recovery_rate");
      p.random_loss = rl;
    }
  }
}

void parse_output(const json& j, OutputSettings& o, const std::filesystem::path& base) {
  const std::string key = "output";
  check_keys(j, key, {"scada_csv", "schedule_csv", "pmu", "pmu_format", "debug_columns"});
  const auto path = [&](const char* name) { return base / text(j[name], join(key, name)); };
  if (j.contains("scada_csv")) o.scada_csv = path("scada_csv");
  if (j.contains("schedule_csv")) o.schedule_csv = path("schedule_csv");
  if (j.contains("pmu")) o.pmu_path = path("pmu");
  if (j.contains("pmu_format")) {
    const auto f = text(j["pmu_format"], key + ".pmu_format");
    if (f == "csv") o.pmu_format = PmuFormat::Csv;
    else if (f == "jsonl") o.pmu_format = PmuFormat::Jsonl;
    else fail(key + ".pmu_format", "expected \"csv\" or \"jsonl\"");
  }
  if (j.contains("debug_columns")) o.debug_columns = boolean(j["debug_columns"], key + ".debug_columns");
}

}  // namespace

void RunConfig::validate() const {
  noise.validate();
  if (!(scada.scan_period > 0.0)) {
    throw InvalidArgument("config: 'scada.scan_period': must be > 0");
  }
  if (const auto* c = std::get_if<double>(&scada.latency); c && !(*c >= 0.0)) {
    throw InvalidArgument("config: 'scada.latency.constant': must be >= 0");
  }
  const bool wants_scada = chain != ChainSelection::Pmu;
  if (wants_scada && scada.scheme == CnScheme::Scheme1 && !history_path) {
    throw InvalidArgument("config: 'history_path': required when scada.cn.scheme is scheme1");
  }
  if (scada.scheme == CnScheme::Scheme2 && !scada.scheme2) {
    throw InvalidArgument("config: 'scada.cn.v': Scheme 2 needs v, p and q mixtures");
  }
  if (scada.n_samples && *scada.n_samples < 2) {
    throw InvalidArgument("config: 'scada.n_samples': must be >= 2");
  }
  pmu.timing.validate();
  if (pmu.random_loss &&
      (!(pmu.random_loss->rate_per_day >= 0.0) || !(pmu.random_loss->recovery_rate > 0.0))) {
    throw InvalidArgument("config: 'pmu.timing.random_loss': need rate_per_day >= 0 and recovery_rate > 0");
  }
}

void RunConfig::validate_paths() const {
  validate();
  if (truth_path.empty()) {
    throw InvalidArgument("config: 'truth_path': required");
  }
  if (!std::filesystem::exists(truth_path)) {
    throw IngestionError("truth file not found: " + truth_path.string());
  }
  if (history_path && chain != ChainSelection::Pmu &&
      scada.scheme == CnScheme::Scheme1 && !std::filesystem::exists(*history_path)) {
    throw IngestionError("history file not found: " + history_path->string());
  }
}

RunConfig parse_config(std::string_view text_in, const std::filesystem::path& base) {
  json root;
  try {
    root = json::parse(text_in.begin(), text_in.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  check_keys(root, "", {"seed", "chain", "truth_path", "history_path", "seeds",
                        "transformers", "noise", "scada", "pmu", "output"});
  RunConfig cfg;
  cfg.output.scada_csv = base / cfg.output.scada_csv;
  cfg.output.pmu_path = base / cfg.output.pmu_path;

  if (root.contains("seed")) cfg.seed = unsigned_int(root["seed"], "seed");
  if (root.contains("chain")) {
    const auto c = text(root["chain"], "chain");
    if (c == "scada") cfg.chain = ChainSelection::Scada;
    else if (c == "pmu") cfg.chain = ChainSelection::Pmu;
    else if (c == "both") cfg.chain = ChainSelection::Both;
    else fail("chain", "expected \"scada\", \"pmu\" or \"both\"");
  }
  if (root.contains("truth_path")) cfg.truth_path = base / text(root["truth_path"], "truth_path");
  if (root.contains("history_path") && !root["history_path"].is_null()) {
    cfg.history_path = base / text(root["history_path"], "history_path");
  }
  if (root.contains("seeds")) {
    const json& s = root["seeds"];
    if (!s.is_object()) fail("seeds", "expected an object");
    static constexpr std::string_view kKnown[] = {
        streams::kVtSystematic, streams::kCtSystematic, streams::kTransformer,
        streams::kCable,        streams::kIed,          streams::kCnLatency,
        streams::kCnError,      streams::kPmuTransformer, streams::kPmuCable,
        streams::kGpsEvents};
    for (const auto& [name, value] : s.items()) {
      if (std::find(std::begin(kKnown), std::end(kKnown), name) == std::end(kKnown)) {
        fail("seeds." + name, "unknown stream name");
      }
      cfg.seed_overrides[name] = unsigned_int(value, "seeds." + name);
    }
  }
  if (root.contains("transformers")) parse_transformers(root["transformers"], cfg);
  if (root.contains("noise")) parse_noise(root["noise"], cfg.noise);
  if (root.contains("scada")) parse_scada(root["scada"], cfg.scada);
  if (root.contains("pmu")) parse_pmu(root["pmu"], cfg.pmu);
  if (root.contains("output")) parse_output(root["output"], cfg.output, base);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace mchain
