#include "cli.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mchain/config.hpp"
#include "mchain/distributions.hpp"
#include "mchain/error.hpp"
#include "mchain/output.hpp"
#include "mchain/pipeline.hpp"

namespace mchain::cli {
namespace {

constexpr const char* kVersion = "mchain 0.1.0";

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string schedule;
  std::string format;
  std::optional<std::size_t> samples;
  bool debug = false;
};

struct FitArgs {
  std::size_t k = 1;
  double std = 0.0;
  double mean = 0.0;
  double eta = 0.0;
  std::size_t samples = 100000;
  std::size_t max_iters = 1000000;
  std::uint64_t seed = 0;
  std::string output = "gmm.json";
};

struct FilterArgs {
  double rate = 60.0;
  double nominal = 60.0;
  std::optional<double> ref_freq;
  std::optional<int> order;
  std::optional<double> sampling_freq;
  std::string output;
};

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SimulationError("output", std::nullopt, "cannot write " + path.string());
  return os;
}

RunConfig resolve_config(const SimulateArgs& a) {
  RunConfig cfg;
  try {
    cfg = load_config(a.config);
  } catch (const IngestionError& e) {
    throw InvalidArgument(e.what());
  }
  if (a.seed) cfg.seed = *a.seed;
  return cfg;
}

int cmd_fit_gmm(const FitArgs& a, std::ostream& out, std::ostream& err) {
  FitTarget target;
  target.k_components = a.k;
  target.total_std = a.std;
  target.total_mean = a.mean;
  target.similarity_threshold = a.eta;
  target.sample_count = a.samples;
  target.max_iterations = a.max_iters;
  try {
    target.validate();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  }
  Rng rng(a.seed);
  try {
    const FitResult r = fit_gmm_random_search(target, rng);
    nlohmann::ordered_json j;
    j["weights"] = r.params.weights;
    j["means"] = r.params.means;
    j["stds"] = r.params.stds;
    auto os = open_output(a.output);
    os << j.dump(2) << '\n';
    write_summary(out, {{"status", "ok"},
                        {"total_mean", format_double(r.moments.mean)},
                        {"total_std", format_double(r.moments.std)},
                        {"kld", format_double(r.kld)},
                        {"iterations", std::to_string(r.iterations)},
                        {"output", a.output}});
    return kOk;
  } catch (const FitFailure& f) {
    err << "error: " << f.what() << '\n';
    write_summary(out, {{"status", "failed"},
                        {"iterations", std::to_string(f.iterations())},
                        {"best_std_rel_error", format_double(f.std_rel_error())},
                        {"best_kld", format_double(f.kld())}});
    return kSearchFailed;
  }
}

int cmd_simulate_scada(const SimulateArgs& a, std::ostream& out, std::ostream& err,
                       bool verbose) {
  RunConfig cfg = resolve_config(a);
  if (!a.output.empty()) cfg.output.scada_csv = a.output;
  if (!a.schedule.empty()) cfg.output.schedule_csv = a.schedule;
  if (a.debug) cfg.output.debug_columns = true;
  const ScadaRun run = run_scada(cfg);
  {
    auto os = open_output(cfg.output.scada_csv);
    write_scada_csv(os, run.records, cfg.output.debug_columns);
  }
  if (!cfg.output.schedule_csv.empty()) {
    auto os = open_output(cfg.output.schedule_csv);
    write_schedule_csv(os, run.schedule);
  }
  if (verbose) err << "wrote " << cfg.output.scada_csv.string() << '\n';
  write_summary(out, summarize_scada(run.records));
  return kOk;
}

int cmd_simulate_pmu(const SimulateArgs& a, std::ostream& out, std::ostream& err,
                     bool verbose) {
  RunConfig cfg = resolve_config(a);
  if (!a.output.empty()) cfg.output.pmu_path = a.output;
  if (a.format == "csv") cfg.output.pmu_format = PmuFormat::Csv;
  if (a.format == "jsonl") cfg.output.pmu_format = PmuFormat::Jsonl;
  if (a.debug) cfg.output.debug_columns = true;
  const auto frames = run_pmu(cfg);
  {
    auto os = open_output(cfg.output.pmu_path);
    if (cfg.output.pmu_format == PmuFormat::Csv) {
      write_pmu_csv(os, frames, cfg.output.debug_columns);
    } else {
      write_pmu_jsonl(os, frames, cfg.output.debug_columns);
    }
  }
  if (verbose) err << "wrote " << cfg.output.pmu_path.string() << '\n';
  write_summary(out, summarize_pmu(frames));
  return kOk;
}

int cmd_simulate_cn(const SimulateArgs& a, std::ostream& out, std::ostream& err,
                    bool verbose) {
  RunConfig cfg = resolve_config(a);
  std::filesystem::path dest = cfg.output.schedule_csv;
  if (!a.output.empty()) dest = a.output;
  if (dest.empty()) dest = "schedule.csv";

  std::optional<SeriesFile> history;
  if (cfg.scada.scheme == CnScheme::Scheme1) {
    if (!cfg.history_path) {
      throw InvalidArgument("config: 'history_path': required when scada.cn.scheme is scheme1");
    }
    history = load_history(*cfg.history_path);
  }
  std::optional<std::vector<TruthRecord>> truth;
  if (!cfg.truth_path.empty() && std::filesystem::exists(cfg.truth_path)) {
    truth = load_truth(cfg.truth_path);
  }
  double start = truth ? truth->front().t : history ? history->start() : 0.0;
  std::size_t n = 0;
  if (a.samples) {
    n = *a.samples;
  } else if (cfg.scada.n_samples) {
    n = *cfg.scada.n_samples;
  } else if (truth) {
    n = scada_sample_count(cfg, *truth);
  } else {
    throw InvalidArgument("simulate-cn: give --samples, scada.n_samples or an existing truth_path");
  }
  if (n < 2) throw InvalidArgument("simulate-cn: at least two samples are required");
  const CnRun run = run_cn(cfg, n, start, history ? &*history : nullptr);
  {
    auto os = open_output(dest);
    write_schedule_csv(os, run.schedule);
  }
  if (verbose) err << "wrote " << dest.string() << '\n';
  write_summary(out, summarize_cn(run));
  return kOk;
}

int cmd_make_filter(const FilterArgs& a, std::ostream& out) {
  const FilterSpec spec =
      make_filter(a.rate, a.nominal, FilterOverrides{a.ref_freq, a.order, a.sampling_freq});
  if (a.output.empty()) {
    write_filter_table(out, spec);
  } else {
    auto os = open_output(a.output);
    write_filter_table(os, spec);
    write_summary(out, {{"order", std::to_string(spec.order)},
                        {"gain", format_double(spec.gain)},
                        {"output", a.output}});
  }
  return kOk;
}

void add_simulate_options(CLI::App* sub, SimulateArgs& a) {
  sub->add_option("-c,--config", a.config, "Run configuration file (JSON)")->required();
  sub->add_option("--seed", a.seed, "Master seed (overrides the config)");
  sub->add_option("-o,--output", a.output, "Output path (overrides the config)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize SCADA and PMU measurement streams with realistic error models",
               "mchain"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-gmm", "Random-search a Gaussian mixture matching a target Gaussian");
  fit_cmd->add_option("--k", fit.k, "Number of mixture components")->required();
  fit_cmd->add_option("--std", fit.std, "Target total standard deviation")->required();
  fit_cmd->add_option("--mean", fit.mean, "Target total mean");
  fit_cmd->add_option("--eta", fit.eta, "KLD similarity threshold (nats)")->required();
  fit_cmd->add_option("--samples", fit.samples, "Monte Carlo samples per KLD evaluation");
  fit_cmd->add_option("--max-iters", fit.max_iters, "Search budget (candidates)");
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("-o,--output", fit.output, "Output JSON for the fitted mixture");

  SimulateArgs scada;
  auto* scada_cmd = app.add_subcommand("simulate-scada", "Run the SCADA measurement chain");
  add_simulate_options(scada_cmd, scada);
  scada_cmd->add_option("--schedule", scada.schedule, "Also write the delay schedule CSV");
  scada_cmd->add_flag("--debug", scada.debug, "Emit per-stage debug columns");

  SimulateArgs pmu;
  auto* pmu_cmd = app.add_subcommand("simulate-pmu", "Run the PMU measurement chain");
  add_simulate_options(pmu_cmd, pmu);
  pmu_cmd->add_option("--format", pmu.format, "Output format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  pmu_cmd->add_flag("--debug", pmu.debug, "Emit reference phasor columns");

  SimulateArgs cn;
  auto* cn_cmd = app.add_subcommand("simulate-cn", "Build a communication-network delay schedule");
  add_simulate_options(cn_cmd, cn);
  cn_cmd->add_option("--samples", cn.samples, "Number of samples (overrides the config)");

  FilterArgs filt;
  auto* filt_cmd = app.add_subcommand("make-filter", "Print M-class filter coefficients");
  filt_cmd->add_option("--rate", filt.rate, "Reporting rate (frames/s)")->required();
  filt_cmd->add_option("--nominal", filt.nominal, "Nominal frequency (Hz)");
  filt_cmd->add_option("--ref-freq", filt.ref_freq, "Filter reference frequency override (Hz)");
  filt_cmd->add_option("--order", filt.order, "Filter order override (even)");
  filt_cmd->add_option("--sampling-freq", filt.sampling_freq, "Sampling frequency override (Hz)");
  filt_cmd->add_option("-o,--output", filt.output, "Write the table to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidArguments;
  }

  try {
    if (*fit_cmd) return cmd_fit_gmm(fit, out, err);
    if (*scada_cmd) return cmd_simulate_scada(scada, out, err, verbose);
    if (*pmu_cmd) return cmd_simulate_pmu(pmu, out, err, verbose);
    if (*cn_cmd) return cmd_simulate_cn(cn, out, err, verbose);
    if (*filt_cmd) return cmd_make_filter(filt, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const IngestionError& e) {
    err << "error: " << e.what() << '\n';
    return kIngestionFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSimulationFailed;
  }
  return kInvalidArguments;
}

}  // namespace mchain::cli
