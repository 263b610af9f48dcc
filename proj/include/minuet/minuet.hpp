#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "minuet/event_log.hpp"
#include "minuet/model.hpp"
#include "minuet/time.hpp"

namespace minuet {

// A packet of the Control Management Module. Forwarded copies share msg_id,
// event, td and origin with the original and carry hop_count + 1.
struct Message {
  MessageId msg_id;
  PacketKind kind = PacketKind::monitoring;
  std::int32_t event = -1;
  SimTime td;
  std::uint32_t origin = 0;
  SimTime t_sent;
  std::int32_t hop_count = 0;
  std::uint32_t payload_size = 0;

  Message forwarded(SimTime t) const {
    Message m = *this;
    m.t_sent = t;
    m.hop_count = hop_count + 1;
    return m;
  }

  friend bool operator==(const Message&, const Message&) = default;
};

struct RoleSet {
  bool monitor = false;
  bool transmitter = false;
  bool gateway = false;

  std::uint8_t bits() const {
    return static_cast<std::uint8_t>((monitor ? kRoleMonitor : 0) | (transmitter ? kRoleTransmitter : 0) |
                                     (gateway ? kRoleGateway : 0));
  }
  static RoleSet from_bits(std::uint8_t b) {
    return {(b & kRoleMonitor) != 0, (b & kRoleTransmitter) != 0, (b & kRoleGateway) != 0};
  }
  bool any() const { return monitor || transmitter || gateway; }

  friend bool operator==(const RoleSet&, const RoleSet&) = default;
};

// What a vehicle does with a received packet.
struct ReceiveDecision {
  std::optional<DiscardReason> discard;  // set when the copy is dropped
  bool forward = false;                  // rebroadcast to neighbors, and to in-range BSs for monitoring
  bool join_request = false;             // announcement accepted: ask clustering about Gm(ev)

  friend bool operator==(const ReceiveDecision&, const ReceiveDecision&) = default;
};

// Receive rule for one copy at time tr. Checks run in a fixed order: the
// event must be known, the copy must be inside the AZ, and it must not have
// been forwarded already by this vehicle. Accepted announcements are always
// rebroadcast; monitoring packets are relayed by members of the event's
// cluster only.
inline ReceiveDecision decide_on_receive(PacketKind kind, bool event_known, SimTime tr, SimTime td, SimTime mdt,
                                         bool already_seen, bool member) {
  if (!event_known) return {DiscardReason::unknown_event};
  if (!az_admits(tr, td, mdt)) return {DiscardReason::az_expired};
  if (already_seen) return {DiscardReason::duplicate};
  if (kind == PacketKind::announcement) return {std::nullopt, true, true};
  if (!member) return {DiscardReason::not_member};
  return {std::nullopt, true, false};
}

// Per-tick role accumulator for one run. Monitor comes from detection state;
// transmitter and gateway are raised by the engine when the vehicle relays a
// monitoring packet or hands one to a station.
class RoleTracker {
 public:
  RoleTracker() = default;
  RoleTracker(std::size_t n_vehicles, std::size_t n_events) : n_events_(n_events), bits_(n_vehicles * n_events, 0) {}

  void mark(std::uint32_t vehicle, std::int32_t event, std::uint8_t role) {
    bits_.at(vehicle * n_events_ + static_cast<std::size_t>(event)) |= role;
  }
  RoleSet get(std::uint32_t vehicle, std::int32_t event) const {
    return RoleSet::from_bits(bits_.at(vehicle * n_events_ + static_cast<std::size_t>(event)));
  }

  // Appends one role_snapshot per (vehicle, event) with any role during the
  // tick that started at `tick`, stamped `t`, then clears.
  void flush(EventLog& log, SimTime tick, SimTime t) {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (!bits_[i]) continue;
      Record r;
      r.t = t;
      r.type = RecordType::role_snapshot;
      r.vehicle = static_cast<std::int32_t>(i / n_events_);
      r.event = static_cast<std::int32_t>(i % n_events_);
      r.code = bits_[i];
      r.tick = tick;
      log.append(r);
      bits_[i] = 0;
    }
  }

 private:
  std::size_t n_events_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Roles of a vehicle for an event during the tick starting at `tick`, read
// back from a log. Vehicles without a snapshot held no role.
inline RoleSet roles_of(const EventLog& log, std::int32_t vehicle, std::int32_t event, SimTime tick) {
  for (const auto& r : log.records()) {
    if (r.type == RecordType::role_snapshot && r.vehicle == vehicle && r.event == event && r.tick == tick) {
      return RoleSet::from_bits(r.code);
    }
  }
  return {};
}

}  // namespace minuet
