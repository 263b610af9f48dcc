#pragma once

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "minuet/errors.hpp"
#include "minuet/model.hpp"
#include "minuet/rng.hpp"
#include "minuet/time.hpp"

namespace minuet {

// A maximal run of samples of one vehicle with no gap wider than the trace's
// native step.
struct PresenceInterval {
  std::vector<VehicleState> samples;

  SimTime begin() const { return samples.front().t; }
  SimTime end() const { return samples.back().t; }

  friend bool operator==(const PresenceInterval&, const PresenceInterval&) = default;
};

// Immutable replayable mobility. Vehicles are kept in ascending id order.
class Trace {
 public:
  Trace() = default;

  // Builds a trace from unordered samples. The native step is the smallest
  // positive spacing between distinct sample times; a same-vehicle gap wider
  // than it starts a new presence interval. Throws ParseError on a duplicate
  // (t, vehicle_id) pair.
  static Trace from_samples(std::vector<VehicleState> samples) {
    std::sort(samples.begin(), samples.end(), [](const VehicleState& a, const VehicleState& b) {
      if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
      return a.t < b.t;
    });
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].vehicle_id == samples[i - 1].vehicle_id && samples[i].t == samples[i - 1].t) {
        throw ParseError(0, "duplicate sample for vehicle '" + samples[i].vehicle_id + "' at t=" +
                                format_seconds(samples[i].t));
      }
    }

    Trace trace;
    if (samples.empty()) return trace;

    std::vector<SimTime> times;
    times.reserve(samples.size());
    for (const auto& s : samples) times.push_back(s.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    trace.t_min_ = times.front();
    trace.t_max_ = times.back();
    trace.step_ = SimTime::max();
    for (std::size_t i = 1; i < times.size(); ++i) trace.step_ = std::min(trace.step_, times[i] - times[i - 1]);
    if (times.size() < 2) trace.step_ = SimTime{};

    for (auto& s : samples) {
      auto& entry = trace.tracks_[s.vehicle_id];
      if (entry.empty() || s.t - entry.back().end() > trace.step_) entry.emplace_back();
      entry.back().samples.push_back(std::move(s));
    }
    trace.ids_.reserve(trace.tracks_.size());
    for (const auto& [id, _] : trace.tracks_) trace.ids_.push_back(id);
    return trace;
  }

  bool empty() const { return tracks_.empty(); }
  const std::vector<VehicleId>& vehicles() const { return ids_; }
  SimTime t_min() const { return t_min_; }
  SimTime t_max() const { return t_max_; }
  SimTime native_step() const { return step_; }

  std::span<const PresenceInterval> intervals(const VehicleId& id) const {
    auto it = tracks_.find(id);
    if (it == tracks_.end()) return {};
    return it->second;
  }

  std::size_t sample_count() const {
    std::size_t n = 0;
    for (const auto& [_, ivs] : tracks_)
      for (const auto& iv : ivs) n += iv.samples.size();
    return n;
  }

  // All samples ordered by (t, vehicle_id).
  std::vector<VehicleState> samples() const {
    std::vector<VehicleState> out;
    out.reserve(sample_count());
    for (const auto& [_, ivs] : tracks_)
      for (const auto& iv : ivs) out.insert(out.end(), iv.samples.begin(), iv.samples.end());
    std::stable_sort(out.begin(), out.end(), [](const VehicleState& a, const VehicleState& b) { return a.t < b.t; });
    return out;
  }

  // Linear interpolation inside a presence interval; nothing outside of one.
  std::optional<VehicleState> position_at(const VehicleId& id, SimTime t) const {
    for (const auto& iv : intervals(id)) {
      if (t < iv.begin() || t > iv.end()) continue;
      const auto& s = iv.samples;
      auto hi = std::lower_bound(s.begin(), s.end(), t, [](const VehicleState& v, SimTime q) { return v.t < q; });
      if (hi->t == t) return *hi;
      auto lo = std::prev(hi);
      double f = static_cast<double>((t - lo->t).us()) / static_cast<double>((hi->t - lo->t).us());
      VehicleState out = *lo;
      out.t = t;
      out.pos = lerp(lo->pos, hi->pos, f);
      out.speed = lo->speed + (hi->speed - lo->speed) * f;
      return out;
    }
    return std::nullopt;
  }

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.tracks_ == b.tracks_ && a.t_min_ == b.t_min_ && a.t_max_ == b.t_max_ && a.step_ == b.step_;
  }

 private:
  std::map<VehicleId, std::vector<PresenceInterval>> tracks_;
  std::vector<VehicleId> ids_;
  SimTime t_min_;
  SimTime t_max_;
  SimTime step_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

}  // namespace detail

// CSV trace: header `t,vehicle_id,x,y,speed,heading`, one sample per row, rows
// in any order.
inline Trace parse_csv_trace(std::istream& in) {
  static constexpr std::string_view kHeader = "t,vehicle_id,x,y,speed,heading";
  static constexpr const char* kCols[] = {"t", "vehicle_id", "x", "y", "speed", "heading"};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!detail::trim(line).empty()) break;
  }
  if (detail::trim(line) != kHeader) {
    throw ParseError(lineno, "expected header '" + std::string(kHeader) + "'");
  }

  std::vector<VehicleState> samples;
  std::map<std::pair<SimTime, VehicleId>, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= row.size(); ++i) {
      if (i == row.size() || row[i] == ',') {
        f.push_back(detail::trim(row.substr(start, i - start)));
        start = i + 1;
      }
    }
    if (f.size() != 6) throw ParseError(lineno, "expected 6 fields, got " + std::to_string(f.size()));
    VehicleState s;
    s.vehicle_id = std::string(f[1]);
    if (s.vehicle_id.empty()) throw ParseError(lineno, "empty vehicle_id");
    double num[6] = {};
    for (int c : {0, 2, 3, 4, 5}) {
      auto v = detail::to_double(f[c]);
      if (!v) throw ParseError(lineno, std::string("field '") + kCols[c] + "' is not numeric: '" + std::string(f[c]) + "'");
      num[c] = *v;
    }
    if (num[0] < 0) throw ParseError(lineno, "negative time");
    if (num[4] < 0) throw ParseError(lineno, "negative speed");
    s.t = SimTime::seconds(num[0]);
    s.pos = {num[2], num[3]};
    s.speed = num[4];
    s.heading = num[5];
    auto [it, fresh] = seen.emplace(std::pair{s.t, s.vehicle_id}, lineno);
    if (!fresh) {
      throw ParseError(lineno, "duplicate sample for vehicle '" + s.vehicle_id + "' at t=" + format_seconds(s.t) +
                                   " (first on line " + std::to_string(it->second) + ")");
    }
    samples.push_back(std::move(s));
  }
  return Trace::from_samples(std::move(samples));
}

inline Trace parse_csv_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_csv_trace(in);
}

inline void write_csv_trace(std::ostream& out, const Trace& trace) {
  std::string buf = "t,vehicle_id,x,y,speed,heading\n";
  for (const auto& s : trace.samples()) {
    append_seconds(buf, s.t);
    buf += ',';
    buf += s.vehicle_id;
    for (double v : {s.pos.x, s.pos.y, s.speed, s.heading}) {
      buf += ',';
      detail::append_double(buf, v);
    }
    buf += '\n';
  }
  out << buf;
}

namespace detail {

struct FcdState {
  XML_Parser parser = nullptr;
  std::vector<VehicleState> samples;
  std::optional<SimTime> current;  // inside a <timestep>
  std::size_t timesteps = 0;
  std::optional<SchemaError> error;

  std::size_t line() const { return static_cast<std::size_t>(XML_GetCurrentLineNumber(parser)); }

  void fail(const std::string& what) {
    if (!error) error.emplace(line(), what);
    XML_StopParser(parser, XML_FALSE);
  }
};

inline const char* find_attr(const XML_Char** attrs, std::string_view name) {
  for (int i = 0; attrs[i]; i += 2)
    if (name == attrs[i]) return attrs[i + 1];
  return nullptr;
}

inline void XMLCALL fcd_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto& st = *static_cast<FcdState*>(data);
  if (st.error) return;
  std::string_view tag = name;
  if (tag == "timestep") {
    const char* time = find_attr(attrs, "time");
    if (!time) return st.fail("<timestep> missing required attribute 'time'");
    auto t = to_double(time);
    if (!t || *t < 0) return st.fail("<timestep> attribute 'time' is not a non-negative number");
    st.current = SimTime::seconds(*t);
    ++st.timesteps;
  } else if (tag == "vehicle") {
    if (!st.current) return st.fail("<vehicle> outside of a <timestep>");
    VehicleState s;
    s.t = *st.current;
    const char* id = find_attr(attrs, "id");
    if (!id) return st.fail("<vehicle> missing required attribute 'id'");
    s.vehicle_id = id;
    double v[4] = {};
    const char* names[] = {"x", "y", "speed", "angle"};
    for (int i = 0; i < 4; ++i) {
      const char* raw = find_attr(attrs, names[i]);
      if (!raw) return st.fail(std::string("<vehicle> missing required attribute '") + names[i] + "'");
      auto d = to_double(raw);
      if (!d) return st.fail(std::string("<vehicle> attribute '") + names[i] + "' is not numeric");
      v[i] = *d;
    }
    if (v[2] < 0) return st.fail("<vehicle> attribute 'speed' is negative");
    s.pos = {v[0], v[1]};
    s.speed = v[2];
    s.heading = v[3];
    st.samples.push_back(std::move(s));
  }
}

inline void XMLCALL fcd_end(void* data, const XML_Char* name) {
  auto& st = *static_cast<FcdState*>(data);
  if (std::string_view(name) == "timestep") st.current.reset();
}

}  // namespace detail

// SUMO floating-car-data export: <timestep time=".."> elements holding
// <vehicle id x y speed angle .../> elements. Other elements and attributes are
// ignored. The SUMO angle is kept as the heading unchanged.
inline Trace parse_fcd_trace(std::istream& in) {
  XML_Parser parser = XML_ParserCreate(nullptr);
  detail::FcdState st;
  st.parser = parser;
  XML_SetUserData(parser, &st);
  XML_SetElementHandler(parser, detail::fcd_start, detail::fcd_end);

  std::string chunk(1 << 16, '\0');
  bool ok = true;
  std::size_t err_line = 0;
  std::string err_msg;
  for (;;) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    auto got = static_cast<int>(in.gcount());
    bool last = got == 0 || !in;
    if (XML_Parse(parser, chunk.data(), got, last ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
      ok = false;
      err_line = static_cast<std::size_t>(XML_GetCurrentLineNumber(parser));
      err_msg = XML_ErrorString(XML_GetErrorCode(parser));
      break;
    }
    if (last) break;
  }
  XML_ParserFree(parser);

  if (st.error) throw *st.error;
  if (!ok) throw ParseError(err_line, "malformed XML: " + err_msg);
  if (st.timesteps == 0) throw ParseError(0, "empty trace");
  return Trace::from_samples(std::move(st.samples));
}

inline Trace parse_fcd_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_fcd_trace(in);
}

enum class LaneKind { one_way, two_way };

struct SynthParams {
  int n_vehicles = 16;
  LaneKind lanes = LaneKind::one_way;
  double length_m = 1000.0;
  double speed_min = 8.0;
  double speed_max = 14.0;
  SimTime duration = SimTime::seconds(120);
  SimTime step = SimTime::seconds(1);
  double lane_offset = 4.0;  // lateral distance between the two lanes
};

inline void validate(const SynthParams& p) {
  if (p.n_vehicles < 0) throw ConfigError("n_vehicles", "must be >= 0");
  if (!(p.length_m > 0) || !std::isfinite(p.length_m)) throw ConfigError("length_m", "must be > 0");
  if (!(p.speed_min >= 0) || !std::isfinite(p.speed_max)) throw ConfigError("speed_range", "speeds must be finite and >= 0");
  if (p.speed_min > p.speed_max) throw ConfigError("speed_range", "empty speed range (min > max)");
  if (p.duration <= SimTime{}) throw ConfigError("duration", "must be > 0");
  if (p.step <= SimTime{}) throw ConfigError("step", "must be > 0");
}

// Straight two-lane road along +x on [0, length_m). Each vehicle draws a start
// offset and then a speed (in that order, vehicle by vehicle) and keeps both
// for the whole run. A vehicle that reaches the end of the road leaves the
// region, skips one sample and re-enters at the other end, so density stays
// at n_vehicles / length. One-way: everyone heads +x (heading 90), alternating
// lanes. Two-way: even indices head +x on y = 0, odd indices head -x
// (heading 270) on y = lane_offset.
inline Trace synth_trace(const SynthParams& p, std::uint64_t seed) {
  validate(p);
  Rng rng(seed);
  auto width = std::max<std::size_t>(3, std::to_string(std::max(p.n_vehicles - 1, 0)).size());
  std::vector<VehicleState> samples;
  for (int i = 0; i < p.n_vehicles; ++i) {
    double x0 = rng.uniform(0.0, p.length_m);
    double v = rng.uniform(p.speed_min, p.speed_max);
    std::string num = std::to_string(i);
    VehicleId id = "v" + std::string(width - num.size(), '0') + num;
    bool forward = p.lanes == LaneKind::one_way || i % 2 == 0;
    double y = p.lanes == LaneKind::one_way ? (i % 2 == 0 ? 0.0 : p.lane_offset) : (forward ? 0.0 : p.lane_offset);

    long long prev_lap = 0;
    for (SimTime t{}; t <= p.duration; t += p.step) {
      double travelled = x0 + v * t.sec();
      auto lap = static_cast<long long>(std::floor(travelled / p.length_m));
      bool reentering = lap != prev_lap;
      prev_lap = lap;
      if (reentering) continue;
      double along = travelled - static_cast<double>(lap) * p.length_m;
      samples.push_back(VehicleState{id, t, {forward ? along : p.length_m - along, y}, v, forward ? 90.0 : 270.0});
    }
  }
  return Trace::from_samples(std::move(samples));
}

}  // namespace minuet
