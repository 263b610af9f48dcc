// minuet_sim: run scenarios, synthesize traces, recompute reports, validate
// scenario files.
//
// Exit codes: 0 success, 1 internal error, 2 invalid configuration or input
// (including command-line errors and malformed logs), 3 runtime data error.
// Diagnostics go to stderr. On success stdout carries a single path: the
// manifest for `run`, the trace for `synth`, the report for `report`.
// Set MINUET_VERBOSE=1 for progress messages on stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "minuet/all.hpp"

namespace fs = std::filesystem;
using namespace minuet;

namespace {

enum Exit : int { kOk = 0, kInternal = 1, kInvalid = 2, kData = 3 };

bool verbose() {
  const char* v = std::getenv("MINUET_VERBOSE");
  return v && *v && std::string_view(v) != "0";
}

void note(const std::string& msg) {
  if (verbose()) std::cerr << "minuet_sim: " << msg << '\n';
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SimTime window_length(double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("--dt", "must be > 0");
  auto t = SimTime::seconds(dt);
  if (t <= SimTime{}) throw ConfigError("--dt", "must be at least 1 us");
  return t;
}

struct RunArtifacts {
  fs::path log, report, series, manifest;
};

// Writes the log, report and series for one finished run into `dir`.
RunArtifacts write_run(const fs::path& dir, const EventLog& log, SimTime dt) {
  RunArtifacts a{dir / "eventlog.ndjson", dir / "report.json", dir / "series.csv", dir / "manifest.json"};
  auto rep = compute_metrics(log, dt);
  write_file(a.log, serialize(log));
  write_file(a.report, report_text(rep, log.info()));
  write_file(a.series, series_csv(rep));
  return a;
}

nlohmann::ordered_json artifact_json(const RunArtifacts& a) {
  return {{"eventlog", a.log.string()}, {"report", a.report.string()}, {"series", a.series.string()}};
}

int cmd_run(const std::string& scenario_path, const std::vector<std::uint64_t>& seeds_flag,
            std::optional<std::uint64_t> seed_flag, const std::string& out_dir, const std::string& technique, double dt_s,
            unsigned jobs) {
  auto started = std::chrono::steady_clock::now();
  auto dt = window_length(dt_s);
  Scenario base = load_scenario(scenario_path);
  if (!technique.empty()) base.clustering = technique;
  if (seed_flag) base.seed = *seed_flag;
  validate_scenario(base);
  fs::path out(out_dir);

  nlohmann::ordered_json manifest;
  manifest["tool"] = "minuet_sim";
  manifest["version"] = kVersion;
  manifest["scenario"] = fs::absolute(scenario_path).lexically_normal().string();
  manifest["technique"] = base.clustering;
  manifest["out"] = out.string();

  auto finish = [&](const fs::path& path) {
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest["wall_clock_s"] = secs;
    write_file(path, manifest.dump(2) + "\n");
    std::cout << path.string() << '\n';
  };

  if (seeds_flag.empty()) {
    note("running " + scenario_path + " seed " + std::to_string(base.seed));
    auto log = run(base);
    auto a = write_run(out, log, dt);
    manifest["seed"] = base.seed;
    manifest["artifacts"] = artifact_json(a);
    finish(a.manifest);
    return kOk;
  }

  std::vector<Scenario> batch;
  for (auto s : seeds_flag) {
    batch.push_back(base);
    batch.back().seed = s;
  }
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  note("running " + std::to_string(batch.size()) + " seeds on " + std::to_string(jobs) + " threads");
  auto results = run_batch(batch, jobs);

  int status = kOk;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  std::vector<MetricsReport> reports;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto seed = batch[i].seed;
    nlohmann::ordered_json entry;
    entry["seed"] = seed;
    if (!results[i].ok()) {
      std::cerr << "minuet_sim: seed " << seed << ": " << results[i].error << '\n';
      entry["error"] = results[i].error;
      int code = results[i].error_kind == RunErrorKind::data     ? kData
                 : results[i].error_kind == RunErrorKind::config ? kInvalid
                                                                 : kInternal;
      status = std::max(status, code);
      runs.push_back(entry);
      continue;
    }
    auto dir = out / ("seed-" + std::to_string(seed));
    auto a = write_run(dir, *results[i].log, dt);
    nlohmann::ordered_json sub = manifest;
    sub["seed"] = seed;
    sub["artifacts"] = artifact_json(a);
    write_file(a.manifest, sub.dump(2) + "\n");
    entry["manifest"] = a.manifest.string();
    entry["artifacts"] = artifact_json(a);
    runs.push_back(entry);
    reports.push_back(compute_metrics(*results[i].log, dt));
  }

  nlohmann::ordered_json summary;
  summary["technique"] = base.clustering;
  summary["runs"] = reports.size();
  auto stat = [&](const char* name, auto get) {
    if (reports.empty()) return;
    double sum = 0, lo = get(reports[0]), hi = lo;
    for (const auto& r : reports) {
      double v = get(r);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    summary[name] = {{"mean", sum / static_cast<double>(reports.size())}, {"min", lo}, {"max", hi}};
  };
  stat("mp_gen", [](const MetricsReport& r) { return static_cast<double>(r.mp_gen); });
  stat("mp_deliv", [](const MetricsReport& r) { return static_cast<double>(r.mp_deliv); });
  stat("txd", [](const MetricsReport& r) { return r.txd; });
  stat("txr", [](const MetricsReport& r) { return r.txr; });
  stat("nc", [](const MetricsReport& r) { return static_cast<double>(r.nc); });
  stat("txcv", [](const MetricsReport& r) { return r.txcv; });
  stat("co", [](const MetricsReport& r) { return r.co; });
  stat("nmo", [](const MetricsReport& r) { return static_cast<double>(r.nmo()); });
  stat("add_overall", [](const MetricsReport& r) { return r.add_all.mean_seconds(); });
  auto summary_path = out / "batch_summary.json";
  write_file(summary_path, summary.dump(2) + "\n");

  manifest["seeds"] = seeds_flag;
  manifest["runs"] = runs;
  manifest["artifacts"] = {{"batch_summary", summary_path.string()}};
  finish(out / "manifest.json");
  return status;
}

int cmd_synth(SynthParams p, const std::string& lanes, double duration, double step, std::uint64_t seed,
              const std::string& out) {
  if (lanes == "one-way") {
    p.lanes = LaneKind::one_way;
  } else if (lanes == "two-way") {
    p.lanes = LaneKind::two_way;
  } else {
    throw ConfigError("--lanes", "expected one-way or two-way");
  }
  if (!std::isfinite(duration) || duration <= 0) throw ConfigError("--duration", "must be > 0");
  if (!std::isfinite(step) || step <= 0) throw ConfigError("--step", "must be > 0");
  p.duration = SimTime::seconds(duration);
  p.step = SimTime::seconds(step);
  validate(p);
  auto trace = synth_trace(p, seed);
  std::ostringstream ss;
  write_csv_trace(ss, trace);
  if (out == "-") {
    std::cout << ss.str();
    return kOk;
  }
  write_file(out, ss.str());
  note("wrote " + std::to_string(trace.sample_count()) + " samples for " + std::to_string(trace.vehicles().size()) +
       " vehicles");
  std::cout << out << '\n';
  return kOk;
}

int cmd_report(const std::string& log_path, double dt_s, const std::string& out_dir) {
  auto dt = window_length(dt_s);
  auto text = read_file(log_path);
  auto log = parse_event_log(text);
  auto rep = compute_metrics(log, dt);
  fs::path dir = out_dir.empty() ? fs::path(log_path).parent_path() : fs::path(out_dir);
  auto report = dir / "report.json";
  write_file(report, report_text(rep, log.info()));
  write_file(dir / "series.csv", series_csv(rep));
  std::cout << report.string() << '\n';
  return kOk;
}

int cmd_validate(const std::string& scenario_path, bool check_trace) {
  auto s = load_scenario(scenario_path);
  validate_scenario(s);
  if (check_trace) {
    auto trace = load_trace(s);
    note("trace has " + std::to_string(trace.vehicles().size()) + " vehicles");
  }
  std::cerr << scenario_path << ": ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MINUET vehicular monitoring simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string scenario, out = "out", technique;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  double dt = 1.0;
  unsigned jobs = 0;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write log, report, series and manifest");
  run_cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--seeds", seeds, "Run several seeds (comma separated) into seed-N subdirectories")
      ->delimiter(',');
  run_cmd->add_option("--out", out, "Output directory")->capture_default_str();
  run_cmd->add_option("--technique", technique, "Override the clustering technique");
  run_cmd->add_option("--dt", dt, "Metrics window length in seconds")->capture_default_str();
  run_cmd->add_option("--jobs", jobs, "Worker threads for --seeds (0 = hardware concurrency)");

  SynthParams sp;
  std::string lanes = "one-way", synth_out = "-";
  double duration = 120.0, step = 1.0;
  std::uint64_t synth_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic ring-road CSV trace");
  synth_cmd->add_option("--n", sp.n_vehicles, "Number of vehicles")->capture_default_str();
  synth_cmd->add_option("--lanes", lanes, "one-way or two-way")->capture_default_str();
  synth_cmd->add_option("--length", sp.length_m, "Road length in meters")->capture_default_str();
  synth_cmd->add_option("--speed-min", sp.speed_min, "Minimum speed m/s")->capture_default_str();
  synth_cmd->add_option("--speed-max", sp.speed_max, "Maximum speed m/s")->capture_default_str();
  synth_cmd->add_option("--duration", duration, "Trace duration in seconds")->capture_default_str();
  synth_cmd->add_option("--step", step, "Sample period in seconds")->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Output CSV path, - for stdout")->capture_default_str();

  std::string log_path, report_out;
  double report_dt = 1.0;
  auto* report_cmd = app.add_subcommand("report", "Recompute the metrics report from an event log");
  report_cmd->add_option("log", log_path, "eventlog.ndjson")->required();
  report_cmd->add_option("--dt", report_dt, "Metrics window length in seconds")->capture_default_str();
  report_cmd->add_option("--out", report_out, "Output directory (default: the log's directory)");

  std::string validate_path;
  bool check_trace = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  validate_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();
  validate_cmd->add_flag("--trace", check_trace, "Also load and parse the trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run_cmd) return cmd_run(scenario, seeds, seed, out, technique, dt, jobs);
    if (*synth_cmd) return cmd_synth(sp, lanes, duration, step, synth_seed, synth_out);
    if (*report_cmd) return cmd_report(log_path, report_dt, report_out);
    if (*validate_cmd) return cmd_validate(validate_path, check_trace);
  } catch (const ConfigError& e) {
    std::cerr << "minuet_sim: invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "minuet_sim: invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const DataError& e) {
    std::cerr << "minuet_sim: data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "minuet_sim: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
