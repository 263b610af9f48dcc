#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <variant>
#include <vector>

#include "minuet/clustering.hpp"
#include "minuet/errors.hpp"
#include "minuet/event_log.hpp"
#include "minuet/minuet.hpp"
#include "minuet/mobility.hpp"
#include "minuet/radio.hpp"
#include "minuet/rng.hpp"
#include "minuet/scenario.hpp"
#include "minuet/techniques.hpp"

namespace minuet {

// Full validation, including the technique name against the registry.
inline void validate_scenario(const Scenario& s) {
  validate(s);
  (void)make_technique(s.clustering);
}

// One deterministic run. Time advances on the fixed tick grid; deliveries and
// timers fire at their exact microsecond between ticks. At equal times the
// tick goes first, then packet deliveries, cluster deliveries and timers, each
// ordered by (message id, receiver, sender).
//
// Randomness: every transmission draws from its own stream keyed by
// (seed, stream tag, origin, sequence, sender). Identical transmissions under
// two techniques therefore see identical delays and losses.
class Simulation {
 public:
  Simulation(Scenario scenario, Trace trace, std::unique_ptr<ClusteringTechnique> technique = nullptr)
      : sc_(std::move(scenario)), trace_(std::move(trace)), tech_(std::move(technique)) {
    validate(sc_);
    if (!tech_) tech_ = make_technique(sc_.clustering);
  }

  EventLog run() {
    setup();
    std::int64_t k = 0;
    SimTime next_beacon{};
    for (SimTime t{}; t < sc_.duration; t = sc_.tick * ++k) {
      drain_before(t);
      now_ = t;
      if (k > 0) roles_.flush(log_, t - sc_.tick, t);
      update_positions(t);
      detect(t);
      TechniqueView view{t, present_, adjacency_};
      if (t >= next_beacon) {
        tech_->on_beacon(view);
        while (next_beacon <= t) next_beacon += sc_.beacon_interval;
      }
      tech_->maintain(view);
      send_cluster_outbox(t);
      last_tick_ = t;
    }
    drain_before(sc_.duration);
    roles_.flush(log_, last_tick_, sc_.duration);
    drain_rest();
    return std::move(log_);
  }

 private:
  static constexpr std::uint64_t kPacketStream = 1;
  static constexpr std::uint64_t kClusterStream = 2;

  struct PacketRx {
    Message msg;
    VehicleIdx sender;
    Endpoint receiver;  // vehicle index or station index
  };
  struct ClusterRx {
    ClusterMsg msg;
    VehicleIdx receiver;
  };
  struct Timer {
    PacketKind kind;
    VehicleIdx vehicle;
    std::int32_t event;
    std::uint32_t episode;
  };

  struct Pending {
    SimTime t;
    std::uint8_t rank;
    std::uint64_t k1, k2, k3;
    std::variant<PacketRx, ClusterRx, Timer> what;

    bool operator>(const Pending& o) const {
      if (t != o.t) return t > o.t;
      if (rank != o.rank) return rank > o.rank;
      if (k1 != o.k1) return k1 > o.k1;
      if (k2 != o.k2) return k2 > o.k2;
      return k3 > o.k3;
    }
  };

  static std::uint64_t pack(MessageId m) { return (std::uint64_t{m.origin} << 32) | m.seq; }

  void setup() {
    const auto& ids = trace_.vehicles();
    n_ = ids.size();
    ne_ = sc_.events.size();
    RunInfo info;
    info.seed = sc_.seed;
    info.technique = std::string(tech_->name());
    info.duration = sc_.duration;
    info.tick = sc_.tick;
    info.beacon_interval = sc_.beacon_interval;
    info.monitor_rate_hz = sc_.monitor_rate_hz;
    info.radio = sc_.radio;
    info.events = sc_.events;
    info.stations = sc_.base_stations;
    info.vehicles = ids;
    log_ = EventLog(std::move(info));
    tech_->bind(n_, sc_.events, sc_.beacon_interval, &log_);
    roles_ = RoleTracker(n_, ne_);
    state_.assign(n_, VehicleState{});
    present_.assign(n_, 0);
    ever_present_.assign(n_, 0);
    slot_.assign(n_, -1);
    adjacency_.assign(n_, {});
    seen_.assign(n_, {});
    next_seq_.assign(n_, 0);
    next_cseq_.assign(n_, 0);
    detecting_.assign(ne_, std::vector<std::uint8_t>(n_, 0));
    episode_.assign(ne_, std::vector<std::uint32_t>(n_, 0));
    mon_period_ = SimTime::seconds(1.0 / sc_.monitor_rate_hz);
  }

  void update_positions(SimTime t) {
    const auto& ids = trace_.vehicles();
    active_.clear();
    active_idx_.clear();
    for (VehicleIdx v = 0; v < n_; ++v) {
      auto s = trace_.position_at(ids[v], t);
      slot_[v] = -1;
      present_[v] = s ? 1 : 0;
      if (!s) continue;
      if (!is_finite(s->pos)) {
        throw DataError("vehicle '" + ids[v] + "' has a non-finite position at t=" + format_seconds(t));
      }
      state_[v] = *s;
      slot_[v] = static_cast<std::int64_t>(active_.size());
      active_.push_back(*s);
      active_idx_.push_back(v);
      if (!ever_present_[v]) {
        ever_present_[v] = 1;
        Record r;
        r.t = t;
        r.type = RecordType::vehicle_seen;
        r.vehicle = static_cast<std::int32_t>(v);
        log_.append(r);
      }
    }
    auto adj = neighbors(active_, sc_.radio.range);
    for (auto& l : adjacency_) l.clear();
    for (std::size_t i = 0; i < adj.size(); ++i) {
      auto& out = adjacency_[active_idx_[i]];
      for (auto j : adj[i]) out.push_back(active_idx_[j]);
    }
  }

  void detect(SimTime t) {
    for (std::int32_t e = 0; e < static_cast<std::int32_t>(ne_); ++e) {
      const auto& ev = sc_.events[static_cast<std::size_t>(e)];
      for (VehicleIdx v = 0; v < n_; ++v) {
        bool now = present_[v] && event_in_range(state_[v], ev);
        auto& det = detecting_[static_cast<std::size_t>(e)][v];
        if (now && !det) {
          det = 1;
          auto ep = ++episode_[static_cast<std::size_t>(e)][v];
          detection_record(RecordType::detection_start, t, v, e);
          tech_->on_detect(v, e, t);
          roles_.mark(v, e, kRoleMonitor);
          originate(PacketKind::announcement, v, e, t);
          originate(PacketKind::monitoring, v, e, t);
          schedule_timer(PacketKind::monitoring, v, e, ep, t + mon_period_);
          schedule_timer(PacketKind::announcement, v, e, ep, t + sc_.beacon_interval);
        } else if (now) {
          tech_->on_detect(v, e, t);
          roles_.mark(v, e, kRoleMonitor);
        } else if (det) {
          det = 0;
          detection_record(RecordType::detection_end, t, v, e);
        }
      }
    }
  }

  void detection_record(RecordType type, SimTime t, VehicleIdx v, std::int32_t e) {
    Record r;
    r.t = t;
    r.type = type;
    r.vehicle = static_cast<std::int32_t>(v);
    r.event = e;
    log_.append(r);
  }

  void schedule_timer(PacketKind kind, VehicleIdx v, std::int32_t e, std::uint32_t episode, SimTime at) {
    if (at >= sc_.duration) return;
    queue_.push(Pending{at, 3, v, static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(kind),
                        Timer{kind, v, e, episode}});
  }

  void fire(const Timer& tm, SimTime t) {
    const auto e = static_cast<std::size_t>(tm.event);
    if (!detecting_[e][tm.vehicle] || episode_[e][tm.vehicle] != tm.episode) return;
    originate(tm.kind, tm.vehicle, tm.event, t);
    schedule_timer(tm.kind, tm.vehicle, tm.event, tm.episode,
                   t + (tm.kind == PacketKind::monitoring ? mon_period_ : sc_.beacon_interval));
  }

  void originate(PacketKind kind, VehicleIdx v, std::int32_t e, SimTime t) {
    Message m;
    m.msg_id = MessageId{v, next_seq_[v]++};
    m.kind = kind;
    m.event = e;
    m.td = t;
    m.origin = v;
    m.t_sent = t;
    seen_[v].insert(pack(m.msg_id));
    auto [rx, bs_rx] = transmit(m, v, t);
    if (bs_rx > 0) roles_.mark(v, e, kRoleGateway);
    Record r;
    r.t = t;
    r.type = RecordType::packet_generated;
    r.vehicle = static_cast<std::int32_t>(v);
    r.msg = m.msg_id;
    r.kind = static_cast<std::uint8_t>(kind);
    r.event = e;
    r.td = m.td;
    r.rx = rx;
    r.bs_rx = bs_rx;
    log_.append(r);
  }

  // Broadcasts one copy; monitoring packets also reach in-range stations.
  std::pair<std::int32_t, std::int32_t> transmit(const Message& m, VehicleIdx sender, SimTime t) {
    auto rng = Rng::derive({sc_.seed, kPacketStream, m.msg_id.origin, m.msg_id.seq, sender});
    std::span<const BaseStation> stations;
    if (m.kind == PacketKind::monitoring) stations = sc_.base_stations;
    auto out = broadcast(m.msg_id, static_cast<std::size_t>(slot_[sender]), t, active_, stations, sc_.radio, rng);
    std::int32_t rx = 0, bs_rx = 0;
    Message copy = m;
    copy.t_sent = t;
    for (const auto& d : out) {
      Endpoint who = d.receiver;
      std::uint64_t key;
      if (who.kind == Endpoint::Kind::vehicle) {
        who.index = active_idx_[who.index];
        key = who.index;
        ++rx;
      } else {
        key = n_ + who.index;
        ++bs_rx;
      }
      queue_.push(Pending{d.t_recv, 1, pack(m.msg_id), key, sender, PacketRx{copy, sender, who}});
    }
    return {rx, bs_rx};
  }

  void send_cluster_outbox(SimTime t) {
    for (const auto& cm : tech_->take_outbox()) {
      if (!present_[cm.sender]) continue;
      MessageId id{cm.sender, next_cseq_[cm.sender]++};
      auto rng = Rng::derive({sc_.seed, kClusterStream, id.origin, id.seq, cm.sender});
      auto out = broadcast(id, static_cast<std::size_t>(slot_[cm.sender]), t, active_, {}, sc_.radio, rng);
      for (const auto& d : out) {
        auto r = active_idx_[d.receiver.index];
        queue_.push(Pending{d.t_recv, 2, pack(id), r, cm.sender, ClusterRx{cm, r}});
      }
      Record r;
      r.t = t;
      r.type = RecordType::cluster_msg;
      r.vehicle = static_cast<std::int32_t>(cm.sender);
      r.kind = static_cast<std::uint8_t>(cm.kind);
      r.cluster = cm.cluster_id;
      r.event = cm.event;
      r.rx = static_cast<std::int32_t>(out.size());
      log_.append(r);
    }
  }

  void drain_before(SimTime limit) {
    while (!queue_.empty() && queue_.top().t < limit) {
      auto p = queue_.top();
      queue_.pop();
      now_ = p.t;
      if (auto* rx = std::get_if<PacketRx>(&p.what)) {
        receive(*rx, p.t);
      } else if (auto* crx = std::get_if<ClusterRx>(&p.what)) {
        if (present_[crx->receiver]) tech_->on_cluster_msg(crx->receiver, crx->msg, p.t);
      } else {
        fire(std::get<Timer>(p.what), p.t);
      }
      send_cluster_outbox(p.t);
    }
  }

  // Copies still in flight at the end of the run are logged as discarded.
  void drain_rest() {
    while (!queue_.empty()) {
      auto p = queue_.top();
      queue_.pop();
      if (auto* rx = std::get_if<PacketRx>(&p.what)) discard(*rx, p.t, DiscardReason::run_end);
    }
  }

  void discard(const PacketRx& rx, SimTime t, DiscardReason why) {
    Record r;
    r.t = t;
    r.type = RecordType::packet_discarded;
    if (rx.receiver.kind == Endpoint::Kind::station) {
      r.bs = static_cast<std::int32_t>(rx.receiver.index);
    } else {
      r.vehicle = static_cast<std::int32_t>(rx.receiver.index);
    }
    r.peer = static_cast<std::int32_t>(rx.sender);
    r.msg = rx.msg.msg_id;
    r.kind = static_cast<std::uint8_t>(rx.msg.kind);
    r.event = why == DiscardReason::unknown_event ? -1 : rx.msg.event;
    r.td = rx.msg.td;
    r.hop = rx.msg.hop_count;
    r.t_sent = rx.msg.t_sent;
    r.code = static_cast<std::uint8_t>(why);
    log_.append(r);
  }

  void receive(const PacketRx& rx, SimTime t) {
    const auto& m = rx.msg;
    if (rx.receiver.kind == Endpoint::Kind::station) {
      Record r;
      r.t = t;
      r.type = RecordType::packet_delivered_bs;
      r.bs = static_cast<std::int32_t>(rx.receiver.index);
      r.vehicle = static_cast<std::int32_t>(rx.sender);
      r.msg = m.msg_id;
      r.event = m.event;
      r.td = m.td;
      r.hop = m.hop_count;
      r.t_sent = m.t_sent;
      r.t_gen = m.td;
      log_.append(r);
      return;
    }
    auto v = static_cast<VehicleIdx>(rx.receiver.index);
    if (!present_[v]) return discard(rx, t, DiscardReason::receiver_absent);
    bool known = m.event >= 0 && static_cast<std::size_t>(m.event) < ne_;
    auto mdt = known ? sc_.events[static_cast<std::size_t>(m.event)].mdt : SimTime{};
    auto d = decide_on_receive(m.kind, known, t, m.td, mdt, seen_[v].contains(pack(m.msg_id)),
                               known && tech_->is_member(v, m.event));
    if (d.discard) return discard(rx, t, *d.discard);

    seen_[v].insert(pack(m.msg_id));
    auto fwd = m.forwarded(t);
    auto [n_rx, n_bs] = transmit(fwd, v, t);
    if (m.kind == PacketKind::monitoring) {
      roles_.mark(v, m.event, kRoleTransmitter);
      if (n_bs > 0) roles_.mark(v, m.event, kRoleGateway);
    }
    Record r;
    r.t = t;
    r.type = RecordType::packet_forwarded;
    r.vehicle = static_cast<std::int32_t>(v);
    r.peer = static_cast<std::int32_t>(rx.sender);
    r.msg = m.msg_id;
    r.kind = static_cast<std::uint8_t>(m.kind);
    r.event = m.event;
    r.td = m.td;
    r.hop = fwd.hop_count;
    r.t_sent = m.t_sent;
    r.rx = n_rx;
    r.bs_rx = n_bs;
    log_.append(r);
    if (d.join_request) tech_->on_announcement(v, m.event, t);
  }

  Scenario sc_;
  Trace trace_;
  std::unique_ptr<ClusteringTechnique> tech_;
  EventLog log_;
  RoleTracker roles_;
  std::size_t n_ = 0, ne_ = 0;
  SimTime now_, last_tick_, mon_period_;

  std::vector<VehicleState> state_;
  std::vector<std::uint8_t> present_, ever_present_;
  std::vector<std::int64_t> slot_;  // index into active_, -1 when absent
  std::vector<VehicleState> active_;
  std::vector<VehicleIdx> active_idx_;
  std::vector<std::vector<VehicleIdx>> adjacency_;
  std::vector<std::unordered_set<std::uint64_t>> seen_;
  std::vector<std::uint32_t> next_seq_, next_cseq_;
  std::vector<std::vector<std::uint8_t>> detecting_;    // [event][vehicle]
  std::vector<std::vector<std::uint32_t>> episode_;     // [event][vehicle]
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
};

inline EventLog run(const Scenario& scenario, const Trace& trace) { return Simulation(scenario, trace).run(); }

inline EventLog run(const Scenario& scenario) {
  validate_scenario(scenario);
  return Simulation(scenario, load_trace(scenario)).run();
}

enum class RunErrorKind { none, config, data, other };

struct BatchResult {
  std::optional<EventLog> log;
  RunErrorKind error_kind = RunErrorKind::none;
  std::string error;

  bool ok() const { return log.has_value(); }
};

// Runs every scenario in isolation on up to `parallelism` threads. A failing
// scenario yields an error entry and does not stop the others.
inline std::vector<BatchResult> run_batch(std::span<const Scenario> scenarios, unsigned parallelism = 1) {
  if (scenarios.empty()) throw std::invalid_argument("run_batch needs at least one scenario");
  std::vector<BatchResult> results(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < scenarios.size();) {
      auto& out = results[i];
      try {
        out.log = run(scenarios[i]);
      } catch (const ConfigError& e) {
        out.error_kind = RunErrorKind::config;
        out.error = e.what();
      } catch (const ParseError& e) {
        out.error_kind = RunErrorKind::config;
        out.error = e.what();
      } catch (const DataError& e) {
        out.error_kind = RunErrorKind::data;
        out.error = e.what();
      } catch (const std::exception& e) {
        out.error_kind = RunErrorKind::other;
        out.error = e.what();
      }
    }
  };
  auto n = std::clamp<std::size_t>(parallelism, 1, scenarios.size());
  if (n == 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  pool.clear();
  return results;
}

}  // namespace minuet
