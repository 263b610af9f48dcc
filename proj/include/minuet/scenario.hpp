#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "minuet/errors.hpp"
#include "minuet/mobility.hpp"
#include "minuet/model.hpp"
#include "minuet/radio.hpp"

namespace minuet {

struct TraceFile {
  enum class Format { csv, fcd };
  std::filesystem::path path;
  Format format = Format::csv;
};

struct SyntheticTrace {
  SynthParams params;  // params.duration is forced to the scenario duration
  std::optional<std::uint64_t> seed;  // defaults to the scenario seed
};

struct Scenario {
  std::variant<TraceFile, SyntheticTrace> trace_source;
  std::vector<CriticalEvent> events;
  std::vector<BaseStation> base_stations;
  RadioParams radio;
  std::string clustering = "dca_onehop";
  double monitor_rate_hz = 10.0;
  SimTime beacon_interval = SimTime::seconds(1.0);
  SimTime tick = SimTime::seconds(0.1);
  SimTime duration = SimTime::seconds(60.0);
  std::uint64_t seed = 1;
};

// Structural checks. The clustering name is checked by the engine, which owns
// the technique registry.
inline void validate(const Scenario& s) {
  if (s.duration <= SimTime{}) throw ConfigError("duration", "must be > 0");
  if (s.tick <= SimTime{}) throw ConfigError("tick", "must be > 0");
  if (!(s.monitor_rate_hz > 0) || !std::isfinite(s.monitor_rate_hz)) throw ConfigError("monitor_rate_hz", "must be > 0");
  if (SimTime::seconds(1.0 / s.monitor_rate_hz) <= SimTime{}) throw ConfigError("monitor_rate_hz", "period below 1 us");
  if (s.beacon_interval <= SimTime{}) throw ConfigError("beacon_interval", "must be > 0");
  validate(s.radio);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    std::string f = "events[" + std::to_string(i) + "]";
    if (e.event_id.empty()) throw ConfigError(f + ".id", "must be non-empty");
    if (!ids.insert(e.event_id).second) throw ConfigError(f + ".id", "duplicate event id '" + e.event_id + "'");
    if (!is_finite(e.pos)) throw ConfigError(f + ".pos", "must be finite");
    if (e.lifetime <= SimTime{}) throw ConfigError(f + ".lifetime", "must be > 0");
    if (!(e.detection_radius > 0)) throw ConfigError(f + ".detection_radius", "must be > 0");
    if (e.mdt <= SimTime{}) throw ConfigError(f + ".mdt", "must be > 0");
    if (e.t_spawn < SimTime{} || e.t_end() > s.duration) {
      throw ConfigError(f + ".t_spawn", "active window must lie within [0, duration)");
    }
  }
  ids.clear();
  for (std::size_t i = 0; i < s.base_stations.size(); ++i) {
    const auto& b = s.base_stations[i];
    std::string f = "base_stations[" + std::to_string(i) + "]";
    if (b.bs_id.empty()) throw ConfigError(f + ".id", "must be non-empty");
    if (!ids.insert(b.bs_id).second) throw ConfigError(f + ".id", "duplicate base station id '" + b.bs_id + "'");
    if (!is_finite(b.pos)) throw ConfigError(f + ".pos", "must be finite");
    if (!(b.range > 0)) throw ConfigError(f + ".range", "must be > 0");
  }
  if (const auto* syn = std::get_if<SyntheticTrace>(&s.trace_source)) {
    try {
      validate(syn->params);
    } catch (const ConfigError& e) {
      throw ConfigError("trace.synthetic." + e.field(), e.message());
    }
  }
}

namespace detail {

using json = nlohmann::json;

class JsonReader {
 public:
  JsonReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double dflt) const { return has(key) ? number(key) : dflt; }

  std::uint64_t unsigned_int(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& dflt) const { return has(key) ? string(key) : dflt; }

  SimTime seconds(const std::string& key) const {
    double v = number(key);
    if (!std::isfinite(v)) throw ConfigError(field(key), "must be finite");
    return SimTime::seconds(v);
  }
  SimTime seconds(const std::string& key, SimTime dflt) const { return has(key) ? seconds(key) : dflt; }

  Vec2 point(const std::string& xkey, const std::string& ykey) const { return {number(xkey), number(ykey)}; }

  void only(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, _] : j_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw ConfigError(field(k), "unknown field");
    }
  }

 private:
  const json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError(field(key), "missing required field");
    return j_.at(key);
  }

  const json& j_;
  std::string path_;
};

}  // namespace detail

// Parses a scenario document. Relative trace paths resolve against base_dir.
inline Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  using detail::JsonReader;
  JsonReader r(doc, "");
  r.only({"trace", "events", "base_stations", "radio", "clustering", "monitor_rate_hz", "beacon_interval", "tick",
          "duration", "seed"});
  Scenario s;
  s.duration = r.seconds("duration");
  s.seed = r.has("seed") ? r.unsigned_int("seed") : 1;
  s.clustering = r.string("clustering", s.clustering);
  s.monitor_rate_hz = r.number("monitor_rate_hz", s.monitor_rate_hz);
  s.beacon_interval = r.seconds("beacon_interval", s.beacon_interval);
  s.tick = r.seconds("tick", s.tick);

  JsonReader tr(r.raw("trace"), "trace");
  if (tr.has("file")) {
    tr.only({"file", "format"});
    TraceFile f;
    f.path = tr.string("file");
    if (f.path.is_relative()) f.path = base_dir / f.path;
    auto fmt = tr.string("format", f.path.extension() == ".xml" ? "fcd" : "csv");
    if (fmt == "csv") {
      f.format = TraceFile::Format::csv;
    } else if (fmt == "fcd") {
      f.format = TraceFile::Format::fcd;
    } else {
      throw ConfigError("trace.format", "expected \"csv\" or \"fcd\"");
    }
    s.trace_source = f;
  } else if (tr.has("synthetic")) {
    tr.only({"synthetic"});
    JsonReader sy(tr.raw("synthetic"), "trace.synthetic");
    sy.only({"n_vehicles", "lanes", "length_m", "speed_min", "speed_max", "step", "seed"});
    SyntheticTrace syn;
    auto n = sy.number("n_vehicles");
    if (n != std::floor(n) || n < 0 || n > 1e6) throw ConfigError("trace.synthetic.n_vehicles", "expected a non-negative integer");
    syn.params.n_vehicles = static_cast<int>(n);
    auto lanes = sy.string("lanes", "one-way");
    if (lanes == "one-way") {
      syn.params.lanes = LaneKind::one_way;
    } else if (lanes == "two-way") {
      syn.params.lanes = LaneKind::two_way;
    } else {
      throw ConfigError("trace.synthetic.lanes", "expected \"one-way\" or \"two-way\"");
    }
    syn.params.length_m = sy.number("length_m", syn.params.length_m);
    syn.params.speed_min = sy.number("speed_min", syn.params.speed_min);
    syn.params.speed_max = sy.number("speed_max", syn.params.speed_max);
    syn.params.step = sy.seconds("step", syn.params.step);
    if (sy.has("seed")) syn.seed = sy.unsigned_int("seed");
    syn.params.duration = s.duration;
    s.trace_source = syn;
  } else {
    throw ConfigError("trace", "expected either \"file\" or \"synthetic\"");
  }

  if (r.has("events")) {
    const auto& evs = r.raw("events");
    if (!evs.is_array()) throw ConfigError("events", "expected an array");
    for (std::size_t i = 0; i < evs.size(); ++i) {
      JsonReader er(evs[i], "events[" + std::to_string(i) + "]");
      er.only({"id", "x", "y", "t_spawn", "lifetime", "detection_radius", "mdt"});
      CriticalEvent e;
      e.event_id = er.string("id");
      e.pos = er.point("x", "y");
      e.t_spawn = er.seconds("t_spawn");
      e.lifetime = er.seconds("lifetime");
      e.detection_radius = er.number("detection_radius", 100.0);
      e.mdt = er.seconds("mdt");
      s.events.push_back(std::move(e));
    }
  }
  if (r.has("base_stations")) {
    const auto& bss = r.raw("base_stations");
    if (!bss.is_array()) throw ConfigError("base_stations", "expected an array");
    for (std::size_t i = 0; i < bss.size(); ++i) {
      JsonReader br(bss[i], "base_stations[" + std::to_string(i) + "]");
      br.only({"id", "x", "y", "range"});
      s.base_stations.push_back(BaseStation{br.string("id"), br.point("x", "y"), br.number("range", 100.0)});
    }
  }
  if (r.has("radio")) {
    JsonReader rr(r.raw("radio"), "radio");
    rr.only({"range", "hop_delay_min", "hop_delay_max", "loss_prob"});
    s.radio.range = rr.number("range", s.radio.range);
    s.radio.hop_delay_min = rr.seconds("hop_delay_min", s.radio.hop_delay_min);
    s.radio.hop_delay_max = rr.seconds("hop_delay_max", s.radio.hop_delay_max);
    s.radio.loss_prob = rr.number("loss_prob", s.radio.loss_prob);
  }
  validate(s);
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read scenario file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", "scenario is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario(doc, path.parent_path());
}

// Loads or synthesizes the scenario's mobility.
inline Trace load_trace(const Scenario& s) {
  if (const auto* syn = std::get_if<SyntheticTrace>(&s.trace_source)) {
    auto p = syn->params;
    p.duration = s.duration;
    return synth_trace(p, syn->seed.value_or(s.seed));
  }
  const auto& f = std::get<TraceFile>(s.trace_source);
  std::ifstream in(f.path, std::ios::binary);
  if (!in) throw ConfigError("trace.file", "cannot read trace '" + f.path.string() + "'");
  return f.format == TraceFile::Format::fcd ? parse_fcd_trace(in) : parse_csv_trace(in);
}

}  // namespace minuet
