#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "minuet/time.hpp"

namespace minuet {

// Planar position in meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline bool is_finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline Vec2 lerp(Vec2 a, Vec2 b, double f) { return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f}; }

using VehicleId = std::string;
using EventId = std::string;
using StationId = std::string;

// One time-stamped kinematic sample.
struct VehicleState {
  VehicleId vehicle_id;
  SimTime t;
  Vec2 pos;
  double speed = 0.0;    // m/s
  double heading = 0.0;  // degrees, passed through from the trace

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

// A static critical event, active on [t_spawn, t_spawn + lifetime).
struct CriticalEvent {
  EventId event_id;
  Vec2 pos;
  SimTime t_spawn;
  SimTime lifetime;
  double detection_radius = 100.0;
  SimTime mdt;  // maximum delivery time of its monitoring data

  SimTime t_end() const { return t_spawn + lifetime; }
  bool active_at(SimTime t) const { return t >= t_spawn && t < t_end(); }
};

struct BaseStation {
  StationId bs_id;
  Vec2 pos;
  double range = 100.0;
};

// Identity of a transmitted message: the originating vehicle (as an index into
// the run's vehicle table) and that vehicle's own sequence number. Forwarded
// copies keep the identity of the original.
struct MessageId {
  std::uint32_t origin = 0;
  std::uint32_t seq = 0;

  friend auto operator<=>(const MessageId&, const MessageId&) = default;
};

// "Within range" is inclusive everywhere: detection radius, radio range and
// base station range all use <=.
inline bool event_in_range(const VehicleState& v, const CriticalEvent& ev) {
  return ev.active_at(v.t) && distance(v.pos, ev.pos) <= ev.detection_radius;
}

inline bool in_bs_range(const VehicleState& v, const BaseStation& bs) {
  return distance(v.pos, bs.pos) <= bs.range;
}

// Announcement Zone membership. The zone is defined by latency alone: a
// receiver at time `tr` is inside iff tr - td <= mdt.
inline bool az_admits(SimTime tr, SimTime td, SimTime mdt) {
  if (tr < td) {
    throw std::logic_error("message received at " + format_seconds(tr) + " before its detection time " +
                           format_seconds(td));
  }
  return tr - td <= mdt;
}

}  // namespace minuet
