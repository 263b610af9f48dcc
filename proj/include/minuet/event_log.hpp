#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "minuet/errors.hpp"
#include "minuet/model.hpp"
#include "minuet/radio.hpp"
#include "minuet/time.hpp"

namespace minuet {

enum class RecordType : std::uint8_t {
  vehicle_seen,
  detection_start,
  detection_end,
  packet_generated,
  packet_forwarded,
  packet_discarded,
  packet_delivered_bs,
  cluster_msg,
  cluster_created,
  cluster_destroyed,
  membership_change,
  cluster_merge,
  role_snapshot,
};

enum class PacketKind : std::uint8_t { announcement, monitoring };
enum class ClusterMsgKind : std::uint8_t { hello, join, leave, leader_claim, merge };
enum class DiscardReason : std::uint8_t { az_expired, duplicate, not_member, unknown_event, receiver_absent, run_end };
enum class MembershipAction : std::uint8_t { join, leave, leader };

inline constexpr std::array<std::string_view, 13> kRecordTypeNames = {
    "vehicle_seen",     "detection_start",     "detection_end", "packet_generated", "packet_forwarded",
    "packet_discarded", "packet_delivered_bs", "cluster_msg",   "cluster_created",  "cluster_destroyed",
    "membership_change", "cluster_merge",      "role_snapshot"};
inline constexpr std::array<std::string_view, 2> kPacketKindNames = {"announcement", "monitoring"};
inline constexpr std::array<std::string_view, 5> kClusterMsgNames = {"hello", "join", "leave", "leader_claim", "merge"};
inline constexpr std::array<std::string_view, 6> kDiscardReasonNames = {"az_expired",    "duplicate",        "not_member",
                                                                        "unknown_event", "receiver_absent", "run_end"};
inline constexpr std::array<std::string_view, 3> kMembershipActionNames = {"join", "leave", "leader"};

template <typename E, std::size_t N>
constexpr std::string_view name_of(E e, const std::array<std::string_view, N>& names) {
  return names[static_cast<std::size_t>(e)];
}

// One log entry. Which fields are meaningful depends on `type`; unused index
// fields hold -1. Vehicle, event and station fields index the tables carried
// by the EventLog.
struct Record {
  SimTime t;
  RecordType type = RecordType::vehicle_seen;
  std::int32_t vehicle = -1;  // actor: generator, forwarder, receiver, member, gateway
  std::int32_t peer = -1;     // sender of the received copy
  std::int32_t bs = -1;
  std::int32_t event = -1;
  std::int64_t cluster = -1;   // cluster, or the survivor of a merge
  std::int64_t cluster2 = -1;  // absorbed cluster of a merge
  MessageId msg;
  std::uint8_t kind = 0;  // PacketKind or ClusterMsgKind
  std::uint8_t code = 0;  // DiscardReason, MembershipAction, or role bits (1 monitor, 2 transmitter, 4 gateway)
  std::int32_t hop = 0;
  std::int32_t rx = 0;
  std::int32_t bs_rx = 0;
  SimTime td;
  SimTime t_sent;
  SimTime t_gen;
  SimTime tick;

  PacketKind packet_kind() const { return static_cast<PacketKind>(kind); }
  ClusterMsgKind cluster_msg_kind() const { return static_cast<ClusterMsgKind>(kind); }
  DiscardReason reason() const { return static_cast<DiscardReason>(code); }
  MembershipAction action() const { return static_cast<MembershipAction>(code); }

  friend bool operator==(const Record&, const Record&) = default;
};

inline constexpr std::uint8_t kRoleMonitor = 1;
inline constexpr std::uint8_t kRoleTransmitter = 2;
inline constexpr std::uint8_t kRoleGateway = 4;

struct RunInfo {
  std::uint64_t seed = 0;
  std::string technique;
  SimTime duration;
  SimTime tick;
  SimTime beacon_interval;
  double monitor_rate_hz = 0.0;
  RadioParams radio;
  std::vector<CriticalEvent> events;
  std::vector<BaseStation> stations;
  std::vector<VehicleId> vehicles;

  friend bool operator==(const RunInfo& a, const RunInfo& b) {
    auto same_events = a.events.size() == b.events.size();
    for (std::size_t i = 0; same_events && i < a.events.size(); ++i) {
      const auto &x = a.events[i], &y = b.events[i];
      same_events = x.event_id == y.event_id && x.pos == y.pos && x.t_spawn == y.t_spawn && x.lifetime == y.lifetime &&
                    x.detection_radius == y.detection_radius && x.mdt == y.mdt;
    }
    auto same_bs = a.stations.size() == b.stations.size();
    for (std::size_t i = 0; same_bs && i < a.stations.size(); ++i) {
      same_bs = a.stations[i].bs_id == b.stations[i].bs_id && a.stations[i].pos == b.stations[i].pos &&
                a.stations[i].range == b.stations[i].range;
    }
    return same_events && same_bs && a.seed == b.seed && a.technique == b.technique && a.duration == b.duration &&
           a.tick == b.tick && a.beacon_interval == b.beacon_interval && a.monitor_rate_hz == b.monitor_rate_hz &&
           a.radio.range == b.radio.range && a.radio.hop_delay_min == b.radio.hop_delay_min &&
           a.radio.hop_delay_max == b.radio.hop_delay_max && a.radio.loss_prob == b.radio.loss_prob &&
           a.vehicles == b.vehicles;
  }
};

// Append-only run record; the only input of the metrics engine.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(RunInfo info) : info_(std::move(info)) {}

  const RunInfo& info() const { return info_; }
  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  void append(const Record& r) {
    if (!records_.empty() && r.t < records_.back().t) {
      throw std::logic_error("EventLog timestamps must be non-decreasing (" + format_seconds(r.t) + " after " +
                             format_seconds(records_.back().t) + ")");
    }
    records_.push_back(r);
  }

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  RunInfo info_;
  std::vector<Record> records_;
};

namespace detail {

inline void append_json_string(std::string& out, std::string_view s) {
  bool plain = true;
  for (unsigned char c : s) plain = plain && c >= 0x20 && c < 0x7f && c != '"' && c != '\\';
  if (!plain) {
    out += nlohmann::json(std::string(s)).dump();
    return;
  }
  out += '"';
  out += s;
  out += '"';
}

inline void append_int(std::string& out, long long v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

inline void append_number(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

class LineWriter {
 public:
  explicit LineWriter(std::string& out, bool newline = true) : out_(out), newline_(newline) { out_ += '{'; }
  ~LineWriter() { out_ += newline_ ? "}\n" : "}"; }

  LineWriter& key(std::string_view k) {
    if (!first_) out_ += ',';
    first_ = false;
    out_ += '"';
    out_ += k;
    out_ += "\":";
    return *this;
  }
  LineWriter& raw(std::string_view k, std::string_view v) {
    key(k);
    out_ += v;
    return *this;
  }
  LineWriter& str(std::string_view k, std::string_view v) {
    key(k);
    append_json_string(out_, v);
    return *this;
  }
  LineWriter& time(std::string_view k, SimTime t) {
    key(k);
    append_seconds(out_, t);
    return *this;
  }
  LineWriter& integer(std::string_view k, long long v) {
    key(k);
    append_int(out_, v);
    return *this;
  }
  LineWriter& number(std::string_view k, double v) {
    key(k);
    append_number(out_, v);
    return *this;
  }
  LineWriter& boolean(std::string_view k, bool v) { return raw(k, v ? "true" : "false"); }

 private:
  std::string& out_;
  bool newline_;
  bool first_ = true;
};

}  // namespace detail

inline constexpr std::string_view kEventLogFormat = "minuet-eventlog/1";

// Newline-delimited JSON. Line 1 is the run header, the last line an "end"
// trailer carrying the record count; every line in between is one Record with
// `t` and `type` first and a fixed field order per type (see docs/formats.md).
inline std::string serialize(const EventLog& log) {
  const auto& info = log.info();
  std::vector<std::string> vname;
  vname.reserve(info.vehicles.size());
  for (const auto& v : info.vehicles) vname.push_back(nlohmann::json(v).dump());
  std::vector<std::string> ename, bname;
  for (const auto& e : info.events) ename.push_back(nlohmann::json(e.event_id).dump());
  for (const auto& b : info.stations) bname.push_back(nlohmann::json(b.bs_id).dump());

  std::string out;
  out.reserve(128 * (log.size() + 2));
  {
    detail::LineWriter w(out);
    w.str("type", "run").str("format", kEventLogFormat).raw("seed", std::to_string(info.seed));
    w.str("technique", info.technique).time("duration", info.duration).time("tick", info.tick);
    w.time("beacon_interval", info.beacon_interval).number("monitor_rate_hz", info.monitor_rate_hz);
    std::string radio;
    {
      detail::LineWriter r(radio, false);
      r.number("range", info.radio.range).time("hop_delay_min", info.radio.hop_delay_min);
      r.time("hop_delay_max", info.radio.hop_delay_max).number("loss_prob", info.radio.loss_prob);
    }
    w.raw("radio", radio);
    std::string evs = "[";
    for (std::size_t i = 0; i < info.events.size(); ++i) {
      const auto& e = info.events[i];
      if (i) evs += ',';
      detail::LineWriter r(evs, false);
      r.raw("id", ename[i]).number("x", e.pos.x).number("y", e.pos.y).time("t_spawn", e.t_spawn);
      r.time("lifetime", e.lifetime).number("detection_radius", e.detection_radius).time("mdt", e.mdt);
    }
    w.raw("events", evs + "]");
    std::string bss = "[";
    for (std::size_t i = 0; i < info.stations.size(); ++i) {
      const auto& b = info.stations[i];
      if (i) bss += ',';
      detail::LineWriter r(bss, false);
      r.raw("id", bname[i]).number("x", b.pos.x).number("y", b.pos.y).number("range", b.range);
    }
    w.raw("base_stations", bss + "]");
    std::string vs = "[";
    for (std::size_t i = 0; i < vname.size(); ++i) {
      if (i) vs += ',';
      vs += vname[i];
    }
    w.raw("vehicles", vs + "]");
  }

  auto msg = [&](const MessageId& m) {
    std::string s = info.vehicles.at(m.origin);
    s += '#';
    detail::append_int(s, m.seq);
    return s;
  };
  auto opt_event = [&](std::int32_t e) -> std::string_view { return e < 0 ? std::string_view("null") : ename.at(e); };

  for (const auto& r : log.records()) {
    detail::LineWriter w(out);
    w.time("t", r.t).str("type", name_of(r.type, kRecordTypeNames));
    switch (r.type) {
      case RecordType::vehicle_seen:
        w.raw("vehicle", vname.at(r.vehicle));
        break;
      case RecordType::detection_start:
      case RecordType::detection_end:
        w.raw("vehicle", vname.at(r.vehicle)).raw("event", ename.at(r.event));
        break;
      case RecordType::packet_generated:
        w.raw("vehicle", vname.at(r.vehicle)).str("msg", msg(r.msg)).str("kind", name_of(r.packet_kind(), kPacketKindNames));
        w.raw("event", ename.at(r.event)).time("td", r.td).integer("rx", r.rx).integer("bs_rx", r.bs_rx);
        break;
      case RecordType::packet_forwarded:
        w.raw("vehicle", vname.at(r.vehicle)).raw("from", vname.at(r.peer)).str("msg", msg(r.msg));
        w.str("kind", name_of(r.packet_kind(), kPacketKindNames)).raw("event", ename.at(r.event)).time("td", r.td);
        w.integer("hop", r.hop).time("t_sent", r.t_sent).integer("rx", r.rx).integer("bs_rx", r.bs_rx);
        break;
      case RecordType::packet_discarded:
        if (r.bs >= 0) {
          w.raw("bs", bname.at(r.bs));
        } else {
          w.raw("vehicle", vname.at(r.vehicle));
        }
        w.raw("from", vname.at(r.peer)).str("msg", msg(r.msg)).str("kind", name_of(r.packet_kind(), kPacketKindNames));
        w.raw("event", opt_event(r.event)).time("td", r.td).integer("hop", r.hop).time("t_sent", r.t_sent);
        w.str("reason", name_of(r.reason(), kDiscardReasonNames));
        break;
      case RecordType::packet_delivered_bs:
        w.raw("bs", bname.at(r.bs)).raw("gateway", vname.at(r.vehicle)).str("msg", msg(r.msg));
        w.raw("event", ename.at(r.event)).time("td", r.td).integer("hop", r.hop).time("t_sent", r.t_sent);
        w.time("t_gen", r.t_gen);
        break;
      case RecordType::cluster_msg:
        w.raw("vehicle", vname.at(r.vehicle)).str("cmsg", name_of(r.cluster_msg_kind(), kClusterMsgNames));
        if (r.cluster < 0) {
          w.raw("cluster", "null");
        } else {
          w.integer("cluster", r.cluster);
        }
        w.raw("event", opt_event(r.event)).integer("rx", r.rx);
        break;
      case RecordType::cluster_created:
        w.integer("cluster", r.cluster).raw("event", ename.at(r.event)).raw("leader", vname.at(r.vehicle));
        break;
      case RecordType::cluster_destroyed:
        w.integer("cluster", r.cluster).raw("event", ename.at(r.event));
        break;
      case RecordType::membership_change:
        w.integer("cluster", r.cluster).raw("event", ename.at(r.event)).raw("vehicle", vname.at(r.vehicle));
        w.str("action", name_of(r.action(), kMembershipActionNames));
        break;
      case RecordType::cluster_merge:
        w.integer("survivor", r.cluster).integer("absorbed", r.cluster2).raw("event", ename.at(r.event));
        break;
      case RecordType::role_snapshot:
        w.raw("vehicle", vname.at(r.vehicle)).raw("event", ename.at(r.event)).time("tick", r.tick);
        w.boolean("monitor", r.code & kRoleMonitor).boolean("transmitter", r.code & kRoleTransmitter);
        w.boolean("gateway", r.code & kRoleGateway);
        break;
    }
  }
  {
    detail::LineWriter w(out);
    SimTime last = log.records().empty() ? info.duration : std::max(info.duration, log.records().back().t);
    w.time("t", last).str("type", "end").integer("records", static_cast<long long>(log.size()));
  }
  return out;
}

namespace detail {

class RecordParser {
 public:
  using json = nlohmann::json;

  RecordParser(const json& j, std::size_t line) : j_(j), line_(line) {}

  const json& at(const char* key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw SchemaError(line_, std::string("missing field '") + key + "'");
    return *it;
  }
  bool is_null(const char* key) const { return at(key).is_null(); }

  std::string str(const char* key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw SchemaError(line_, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }
  double number(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw SchemaError(line_, std::string("field '") + key + "' must be a number");
    return v.get<double>();
  }
  long long integer(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(line_, std::string("field '") + key + "' must be an integer");
    return v.get<long long>();
  }
  bool boolean(const char* key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) throw SchemaError(line_, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
  }
  SimTime time(const char* key) const { return SimTime::seconds(number(key)); }

  template <std::size_t N>
  std::uint8_t choice(const char* key, const std::array<std::string_view, N>& names) const {
    auto s = str(key);
    for (std::size_t i = 0; i < N; ++i)
      if (names[i] == s) return static_cast<std::uint8_t>(i);
    throw SchemaError(line_, std::string("field '") + key + "' has unknown value '" + s + "'");
  }

  std::size_t line() const { return line_; }

 private:
  const json& j_;
  std::size_t line_;
};

}  // namespace detail

// Reads a serialized log back. Throws ParseError/SchemaError naming the line on
// malformed JSON, unknown names, missing fields, decreasing timestamps, or a
// missing/mismatched trailer (truncation).
inline EventLog parse_event_log(std::istream& in) {
  using json = nlohmann::json;
  std::string line;
  std::size_t lineno = 0;
  auto next_json = [&]() -> std::optional<json> {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        return json::parse(line);
      } catch (const json::parse_error& e) {
        throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
      }
    }
    return std::nullopt;
  };

  auto head = next_json();
  if (!head) throw SchemaError(0, "empty log");
  RunInfo info;
  std::unordered_map<std::string, std::int32_t> vidx, eidx, bidx;
  try {
    detail::RecordParser h(*head, lineno);
    if (h.str("type") != "run") throw SchemaError(lineno, "first record must be the run header");
    if (h.str("format") != kEventLogFormat) throw SchemaError(lineno, "unsupported log format");
    info.seed = static_cast<std::uint64_t>(h.at("seed").get<std::uint64_t>());
    info.technique = h.str("technique");
    info.duration = h.time("duration");
    info.tick = h.time("tick");
    info.beacon_interval = h.time("beacon_interval");
    info.monitor_rate_hz = h.number("monitor_rate_hz");
    detail::RecordParser radio(h.at("radio"), lineno);
    info.radio.range = radio.number("range");
    info.radio.hop_delay_min = radio.time("hop_delay_min");
    info.radio.hop_delay_max = radio.time("hop_delay_max");
    info.radio.loss_prob = radio.number("loss_prob");
    for (const auto& ej : h.at("events")) {
      detail::RecordParser e(ej, lineno);
      CriticalEvent ev;
      ev.event_id = e.str("id");
      ev.pos = {e.number("x"), e.number("y")};
      ev.t_spawn = e.time("t_spawn");
      ev.lifetime = e.time("lifetime");
      ev.detection_radius = e.number("detection_radius");
      ev.mdt = e.time("mdt");
      eidx.emplace(ev.event_id, static_cast<std::int32_t>(info.events.size()));
      info.events.push_back(std::move(ev));
    }
    for (const auto& bj : h.at("base_stations")) {
      detail::RecordParser b(bj, lineno);
      bidx.emplace(b.str("id"), static_cast<std::int32_t>(info.stations.size()));
      info.stations.push_back(BaseStation{b.str("id"), {b.number("x"), b.number("y")}, b.number("range")});
    }
    for (const auto& vj : h.at("vehicles")) {
      if (!vj.is_string()) throw SchemaError(lineno, "vehicle names must be strings");
      vidx.emplace(vj.get<std::string>(), static_cast<std::int32_t>(info.vehicles.size()));
      info.vehicles.push_back(vj.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw SchemaError(lineno, std::string("bad run header: ") + e.what());
  }

  EventLog log(std::move(info));
  bool ended = false;
  while (auto j = next_json()) {
    if (ended) throw SchemaError(lineno, "records after the end trailer");
    detail::RecordParser p(*j, lineno);
    auto lookup = [&](const std::unordered_map<std::string, std::int32_t>& table, const char* key,
                      const char* what) -> std::int32_t {
      auto name = p.str(key);
      auto it = table.find(name);
      if (it == table.end()) throw SchemaError(lineno, std::string("unknown ") + what + " '" + name + "'");
      return it->second;
    };
    auto vehicle = [&](const char* key) { return lookup(vidx, key, "vehicle"); };
    auto event = [&](const char* key) { return lookup(eidx, key, "event"); };
    auto station = [&](const char* key) { return lookup(bidx, key, "base station"); };
    auto msg = [&]() {
      auto s = p.str("msg");
      auto hash = s.rfind('#');
      if (hash == std::string::npos) throw SchemaError(lineno, "malformed msg id '" + s + "'");
      auto it = vidx.find(s.substr(0, hash));
      std::uint32_t seq = 0;
      auto [ptr, ec] = std::from_chars(s.data() + hash + 1, s.data() + s.size(), seq);
      if (it == vidx.end() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw SchemaError(lineno, "malformed msg id '" + s + "'");
      }
      return MessageId{static_cast<std::uint32_t>(it->second), seq};
    };

    auto type = p.str("type");
    if (type == "end") {
      auto n = p.integer("records");
      if (n != static_cast<long long>(log.size())) {
        throw SchemaError(lineno, "end trailer counts " + std::to_string(n) + " records, found " +
                                      std::to_string(log.size()));
      }
      ended = true;
      continue;
    }
    Record r;
    r.type = static_cast<RecordType>(p.choice("type", kRecordTypeNames));
    r.t = p.time("t");
    switch (r.type) {
      case RecordType::vehicle_seen:
        r.vehicle = vehicle("vehicle");
        break;
      case RecordType::detection_start:
      case RecordType::detection_end:
        r.vehicle = vehicle("vehicle");
        r.event = event("event");
        break;
      case RecordType::packet_generated:
        r.vehicle = vehicle("vehicle");
        r.msg = msg();
        r.kind = p.choice("kind", kPacketKindNames);
        r.event = event("event");
        r.td = p.time("td");
        r.rx = static_cast<std::int32_t>(p.integer("rx"));
        r.bs_rx = static_cast<std::int32_t>(p.integer("bs_rx"));
        break;
      case RecordType::packet_forwarded:
        r.vehicle = vehicle("vehicle");
        r.peer = vehicle("from");
        r.msg = msg();
        r.kind = p.choice("kind", kPacketKindNames);
        r.event = event("event");
        r.td = p.time("td");
        r.hop = static_cast<std::int32_t>(p.integer("hop"));
        r.t_sent = p.time("t_sent");
        r.rx = static_cast<std::int32_t>(p.integer("rx"));
        r.bs_rx = static_cast<std::int32_t>(p.integer("bs_rx"));
        break;
      case RecordType::packet_discarded:
        if (j->contains("bs")) {
          r.bs = station("bs");
        } else {
          r.vehicle = vehicle("vehicle");
        }
        r.peer = vehicle("from");
        r.msg = msg();
        r.kind = p.choice("kind", kPacketKindNames);
        r.event = p.is_null("event") ? -1 : event("event");
        r.td = p.time("td");
        r.hop = static_cast<std::int32_t>(p.integer("hop"));
        r.t_sent = p.time("t_sent");
        r.code = p.choice("reason", kDiscardReasonNames);
        break;
      case RecordType::packet_delivered_bs:
        r.bs = station("bs");
        r.vehicle = vehicle("gateway");
        r.msg = msg();
        r.event = event("event");
        r.td = p.time("td");
        r.hop = static_cast<std::int32_t>(p.integer("hop"));
        r.t_sent = p.time("t_sent");
        r.t_gen = p.time("t_gen");
        break;
      case RecordType::cluster_msg:
        r.vehicle = vehicle("vehicle");
        r.kind = p.choice("cmsg", kClusterMsgNames);
        r.cluster = p.is_null("cluster") ? -1 : p.integer("cluster");
        r.event = p.is_null("event") ? -1 : event("event");
        r.rx = static_cast<std::int32_t>(p.integer("rx"));
        break;
      case RecordType::cluster_created:
        r.cluster = p.integer("cluster");
        r.event = event("event");
        r.vehicle = vehicle("leader");
        break;
      case RecordType::cluster_destroyed:
        r.cluster = p.integer("cluster");
        r.event = event("event");
        break;
      case RecordType::membership_change:
        r.cluster = p.integer("cluster");
        r.event = event("event");
        r.vehicle = vehicle("vehicle");
        r.code = p.choice("action", kMembershipActionNames);
        break;
      case RecordType::cluster_merge:
        r.cluster = p.integer("survivor");
        r.cluster2 = p.integer("absorbed");
        r.event = event("event");
        break;
      case RecordType::role_snapshot:
        r.vehicle = vehicle("vehicle");
        r.event = event("event");
        r.tick = p.time("tick");
        r.code = static_cast<std::uint8_t>((p.boolean("monitor") ? kRoleMonitor : 0) |
                                           (p.boolean("transmitter") ? kRoleTransmitter : 0) |
                                           (p.boolean("gateway") ? kRoleGateway : 0));
        break;
    }
    if (!log.records().empty() && r.t < log.records().back().t) {
      throw SchemaError(lineno, "timestamp decreases");
    }
    log.append(r);
  }
  if (!ended) throw SchemaError(lineno, "truncated log: missing end trailer");
  return log;
}

inline EventLog parse_event_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_event_log(in);
}

}  // namespace minuet
