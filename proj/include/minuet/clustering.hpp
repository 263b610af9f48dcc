#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "minuet/event_log.hpp"
#include "minuet/model.hpp"
#include "minuet/time.hpp"

namespace minuet {

using VehicleIdx = std::uint32_t;
using ClusterId = std::int64_t;

// One monitoring group Gm(ev).
struct Cluster {
  ClusterId cluster_id = -1;
  std::int32_t event = -1;
  VehicleIdx leader = 0;
  std::vector<VehicleIdx> members;  // ascending, contains the leader while alive
  SimTime t_created;
  std::optional<SimTime> t_destroyed;

  bool alive() const { return !t_destroyed; }
  bool contains(VehicleIdx v) const { return std::binary_search(members.begin(), members.end(), v); }
};

struct ClusterMsg {
  ClusterMsgKind kind = ClusterMsgKind::hello;
  VehicleIdx sender = 0;
  ClusterId cluster_id = -1;
  std::int32_t event = -1;
  SimTime t_sent;
};

// Ground-truth bookkeeping of every cluster in a run. Each mutation is logged
// as it happens; the techniques decide when to mutate and which ClusterMsg to
// transmit for it.
class ClusterRegistry {
 public:
  ClusterRegistry() = default;
  ClusterRegistry(std::size_t n_vehicles, std::size_t n_events, EventLog* log)
      : member_of_(n_events, std::vector<ClusterId>(n_vehicles, -1)), log_(log) {}

  std::optional<ClusterId> cluster_of(VehicleIdx v, std::int32_t event) const {
    auto c = member_of_.at(static_cast<std::size_t>(event)).at(v);
    if (c < 0) return std::nullopt;
    return c;
  }
  bool is_member(VehicleIdx v, std::int32_t event) const { return cluster_of(v, event).has_value(); }

  const Cluster& get(ClusterId id) const { return clusters_.at(id); }
  const std::map<ClusterId, Cluster>& all() const { return clusters_; }

  std::vector<ClusterId> live(std::int32_t event) const {
    std::vector<ClusterId> out;
    for (const auto& [id, c] : clusters_)
      if (c.alive() && c.event == event) out.push_back(id);
    return out;
  }

  ClusterId create(std::int32_t event, VehicleIdx leader, SimTime t) {
    require_free(leader, event);
    ClusterId id = next_id_++;
    Cluster c;
    c.cluster_id = id;
    c.event = event;
    c.leader = leader;
    c.members = {leader};
    c.t_created = t;
    clusters_.emplace(id, std::move(c));
    member_of_[static_cast<std::size_t>(event)][leader] = id;
    emit(make_record(t, RecordType::cluster_created, event, id, static_cast<std::int32_t>(leader)));
    membership(t, id, event, leader, MembershipAction::join);
    return id;
  }

  void join(ClusterId id, VehicleIdx v, SimTime t) {
    auto& c = live_cluster(id);
    require_free(v, c.event);
    c.members.insert(std::lower_bound(c.members.begin(), c.members.end(), v), v);
    member_of_[static_cast<std::size_t>(c.event)][v] = id;
    membership(t, id, c.event, v, MembershipAction::join);
  }

  // Removes a member. The leader may only leave last; an emptied cluster is
  // destroyed.
  void leave(ClusterId id, VehicleIdx v, SimTime t) {
    auto& c = live_cluster(id);
    if (!c.contains(v)) throw std::logic_error("vehicle is not a member of the cluster");
    if (v == c.leader && c.members.size() > 1) throw std::logic_error("leader must hand over before leaving");
    c.members.erase(std::lower_bound(c.members.begin(), c.members.end(), v));
    member_of_[static_cast<std::size_t>(c.event)][v] = -1;
    membership(t, id, c.event, v, MembershipAction::leave);
    if (c.members.empty()) destroy(id, t);
  }

  void set_leader(ClusterId id, VehicleIdx v, SimTime t) {
    auto& c = live_cluster(id);
    if (!c.contains(v)) throw std::logic_error("new leader must be a member");
    if (c.leader == v) return;
    c.leader = v;
    membership(t, id, c.event, v, MembershipAction::leader);
  }

  // Every member leaves (non-leaders first, ascending), then the cluster is
  // destroyed.
  void dissolve(ClusterId id, SimTime t) {
    auto members = live_cluster(id).members;
    auto leader = live_cluster(id).leader;
    for (auto m : members)
      if (m != leader) leave(id, m, t);
    leave(id, leader, t);
  }

  // Survivor: more members, then older, then lower id. Each member of the
  // absorbed cluster accepted by `keep` moves over (a leave and a join record);
  // the rest just leave. Then the absorbed cluster is destroyed and a merge
  // record is written. Returns the survivor.
  ClusterId merge(ClusterId a, ClusterId b, SimTime t,
                  const std::function<bool(VehicleIdx, const Cluster& survivor)>& keep = {}) {
    if (a == b) throw std::logic_error("cannot merge a cluster with itself");
    const auto& ca = live_cluster(a);
    const auto& cb = live_cluster(b);
    if (ca.event != cb.event) throw std::invalid_argument("merge requires clusters of the same event");
    bool a_wins = ca.members.size() != cb.members.size() ? ca.members.size() > cb.members.size()
                  : ca.t_created != cb.t_created        ? ca.t_created < cb.t_created
                                                        : a < b;
    ClusterId win = a_wins ? a : b;
    ClusterId lose = a_wins ? b : a;
    auto& loser = live_cluster(lose);
    auto event = loser.event;
    auto moving = loser.members;
    // the absorbed leader goes last so leave() never sees a leader with members
    std::stable_partition(moving.begin(), moving.end(), [&](VehicleIdx v) { return v != loser.leader; });
    for (auto v : moving) {
      auto& l = live_cluster(lose);
      l.members.erase(std::lower_bound(l.members.begin(), l.members.end(), v));
      member_of_[static_cast<std::size_t>(event)][v] = -1;
      membership(t, lose, event, v, MembershipAction::leave);
      if (!keep || keep(v, live_cluster(win))) join(win, v, t);
    }
    destroy(lose, t);
    auto r = make_record(t, RecordType::cluster_merge, event, win);
    r.cluster2 = lose;
    emit(r);
    return win;
  }

 private:
  Cluster& live_cluster(ClusterId id) {
    auto it = clusters_.find(id);
    if (it == clusters_.end() || !it->second.alive()) throw std::logic_error("no live cluster " + std::to_string(id));
    return it->second;
  }

  void require_free(VehicleIdx v, std::int32_t event) const {
    if (member_of_.at(static_cast<std::size_t>(event)).at(v) >= 0) {
      throw std::logic_error("vehicle already belongs to a cluster for this event");
    }
  }

  void destroy(ClusterId id, SimTime t) {
    auto& c = clusters_.at(id);
    for (auto m : c.members) member_of_[static_cast<std::size_t>(c.event)][m] = -1;
    c.members.clear();
    c.t_destroyed = t;
    emit(make_record(t, RecordType::cluster_destroyed, c.event, id));
  }

  void membership(SimTime t, ClusterId id, std::int32_t event, VehicleIdx v, MembershipAction a) {
    auto r = make_record(t, RecordType::membership_change, event, id, static_cast<std::int32_t>(v));
    r.code = static_cast<std::uint8_t>(a);
    emit(r);
  }

  static Record make_record(SimTime t, RecordType type, std::int32_t event, ClusterId id, std::int32_t vehicle = -1) {
    Record r;
    r.t = t;
    r.type = type;
    r.event = event;
    r.cluster = id;
    r.vehicle = vehicle;
    return r;
  }

  void emit(const Record& r) {
    if (log_) log_->append(r);
  }

  std::map<ClusterId, Cluster> clusters_;
  std::vector<std::vector<ClusterId>> member_of_;  // [event][vehicle]
  ClusterId next_id_ = 0;
  EventLog* log_ = nullptr;
};

// World state a technique may consult during a callback: who is on the map and
// the current unit-disk adjacency (ascending lists, indexed by vehicle).
struct TechniqueView {
  SimTime now;
  std::span<const std::uint8_t> present;
  std::span<const std::vector<VehicleIdx>> adjacency;

  bool adjacent(VehicleIdx a, VehicleIdx b) const {
    const auto& l = adjacency[a];
    return std::binary_search(l.begin(), l.end(), b);
  }
};

// Cluster Coordination contract. The engine feeds detections, admitted
// announcements, received cluster messages and periodic beacon/maintenance
// ticks; the technique answers membership queries and leaves the ClusterMsgs
// it wants transmitted in its outbox. Membership changes are logged through
// the registry.
//
// Shared state kept here:
//  - refresh times: a vehicle refreshes an event by detecting it or by
//    accepting an announcement for it inside the AZ; it stays eligible for
//    the event's clusters for max(MDT, 2 * beacon_interval) after that.
//  - neighbor tables: built from received hellos; an entry expires after two
//    missed beacon intervals. Two vehicles are linked when they are adjacent
//    now and at least one has heard the other recently.
class ClusteringTechnique {
 public:
  virtual ~ClusteringTechnique() = default;

  virtual std::string_view name() const = 0;

  void bind(std::size_t n_vehicles, std::span<const CriticalEvent> events, SimTime beacon_interval, EventLog* log) {
    events_.assign(events.begin(), events.end());
    beacon_interval_ = beacon_interval;
    registry_ = ClusterRegistry(n_vehicles, events_.size(), log);
    candidacy_.assign(events_.size(), std::vector<Candidacy>(n_vehicles));
    heard_.assign(n_vehicles, {});
    outbox_.clear();
  }

  virtual void on_detect(VehicleIdx v, std::int32_t event, SimTime t) {
    auto& c = candidacy_.at(static_cast<std::size_t>(event)).at(v);
    if (!c.ever_detected) {
      c.ever_detected = true;
      c.first_detect = t;
    }
    c.refreshed = true;
    c.last_refresh = t;
  }

  // Called for every announcement the vehicle accepts inside the AZ; this is
  // the "can it join Gm(ev)" request. Joining itself happens in maintain().
  virtual void on_announcement(VehicleIdx v, std::int32_t event, SimTime t) {
    auto& c = candidacy_.at(static_cast<std::size_t>(event)).at(v);
    c.refreshed = true;
    c.last_refresh = std::max(c.last_refresh, t);
  }

  virtual void on_cluster_msg(VehicleIdx receiver, const ClusterMsg& msg, SimTime t) {
    if (msg.kind == ClusterMsgKind::hello) heard_.at(receiver)[msg.sender] = t;
  }

  virtual void on_beacon(const TechniqueView& view) = 0;
  virtual void maintain(const TechniqueView& view) = 0;

  bool is_member(VehicleIdx v, std::int32_t event) const { return registry_.is_member(v, event); }
  std::optional<ClusterId> cluster_of(VehicleIdx v, std::int32_t event) const { return registry_.cluster_of(v, event); }
  const ClusterRegistry& registry() const { return registry_; }

  std::vector<ClusterMsg> take_outbox() { return std::exchange(outbox_, {}); }

  bool eligible(VehicleIdx v, std::int32_t event, const TechniqueView& view) const {
    if (!view.present[v]) return false;
    const auto& c = candidacy_.at(static_cast<std::size_t>(event)).at(v);
    return c.refreshed && view.now - c.last_refresh <= eligibility_window(event);
  }

  bool ever_detected(VehicleIdx v, std::int32_t event) const {
    return candidacy_.at(static_cast<std::size_t>(event)).at(v).ever_detected;
  }

  SimTime first_detection(VehicleIdx v, std::int32_t event) const {
    return candidacy_.at(static_cast<std::size_t>(event)).at(v).first_detect;
  }

  bool heard_recently(VehicleIdx listener, VehicleIdx speaker, SimTime now) const {
    const auto& table = heard_.at(listener);
    auto it = table.find(speaker);
    return it != table.end() && now - it->second <= beacon_interval_ * 2;
  }

  bool linked(VehicleIdx a, VehicleIdx b, const TechniqueView& view) const {
    return a != b && view.adjacent(a, b) && (heard_recently(a, b, view.now) || heard_recently(b, a, view.now));
  }

  std::size_t degree(VehicleIdx v, const TechniqueView& view) const {
    std::size_t d = 0;
    for (auto u : view.adjacency[v]) d += linked(v, u, view) ? 1 : 0;
    return d;
  }

  SimTime eligibility_window(std::int32_t event) const {
    return std::max(events_.at(static_cast<std::size_t>(event)).mdt, beacon_interval_ * 2);
  }

  std::size_t event_count() const { return events_.size(); }

 protected:
  void send(ClusterMsgKind kind, VehicleIdx sender, ClusterId cluster, std::int32_t event, SimTime t,
            const TechniqueView& view) {
    if (view.present[sender]) outbox_.push_back(ClusterMsg{kind, sender, cluster, event, t});
  }

  void create_cluster(std::int32_t event, VehicleIdx leader, const TechniqueView& view) {
    auto id = registry_.create(event, leader, view.now);
    send(ClusterMsgKind::leader_claim, leader, id, event, view.now, view);
  }

  void join_cluster(ClusterId id, VehicleIdx v, const TechniqueView& view) {
    registry_.join(id, v, view.now);
    send(ClusterMsgKind::join, v, id, registry_.get(id).event, view.now, view);
  }

  void leave_cluster(ClusterId id, VehicleIdx v, const TechniqueView& view) {
    auto event = registry_.get(id).event;
    registry_.leave(id, v, view.now);
    send(ClusterMsgKind::leave, v, id, event, view.now, view);
  }

  ClusterRegistry registry_;
  std::vector<CriticalEvent> events_;
  SimTime beacon_interval_ = SimTime::seconds(1.0);

 private:
  struct Candidacy {
    bool refreshed = false;
    SimTime last_refresh;
    bool ever_detected = false;
    SimTime first_detect;
  };

  std::vector<std::vector<Candidacy>> candidacy_;          // [event][vehicle]
  std::vector<std::unordered_map<VehicleIdx, SimTime>> heard_;  // listener -> speaker -> last hello
  std::vector<ClusterMsg> outbox_;
};

}  // namespace minuet
