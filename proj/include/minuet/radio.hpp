#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "minuet/errors.hpp"
#include "minuet/model.hpp"
#include "minuet/rng.hpp"

namespace minuet {

// Unit-disk V2V/V2I link model with an independent uniform delay and a
// Bernoulli loss per receiver. No airtime, no interference.
struct RadioParams {
  double range = 100.0;
  SimTime hop_delay_min = SimTime::seconds(0.010);
  SimTime hop_delay_max = SimTime::seconds(0.030);
  double loss_prob = 0.0;
};

inline void validate(const RadioParams& r) {
  if (!(r.range > 0)) throw ConfigError("radio.range", "must be > 0");
  if (r.hop_delay_min <= SimTime{}) throw ConfigError("radio.hop_delay_min", "must be > 0");
  if (r.hop_delay_max < r.hop_delay_min) throw ConfigError("radio.hop_delay_max", "must be >= hop_delay_min");
  if (!(r.loss_prob >= 0.0 && r.loss_prob <= 1.0)) throw ConfigError("radio.loss_prob", "must be in [0, 1]");
}

// Adjacency lists indexed like the input span, each list ascending.
using Adjacency = std::vector<std::vector<std::size_t>>;

inline Adjacency neighbors(std::span<const VehicleState> tick_state, double range) {
  Adjacency adj(tick_state.size());
  for (std::size_t i = 0; i < tick_state.size(); ++i) {
    for (std::size_t j = i + 1; j < tick_state.size(); ++j) {
      if (distance(tick_state[i].pos, tick_state[j].pos) <= range) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  return adj;
}

struct Endpoint {
  enum class Kind { vehicle, station } kind = Kind::vehicle;
  std::size_t index = 0;  // into the tick state or the station list

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Delivery {
  MessageId msg_id;
  std::size_t sender = 0;  // index into the tick state
  Endpoint receiver;
  SimTime t_sent;
  SimTime t_recv;

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

// One transmission by tick_state[sender]. Candidate receivers are every other
// vehicle within radio range (ascending index), then every station in
// `stations` whose range covers the sender (list order). For each candidate the
// rng is drawn twice, loss first and delay second, whether or not the copy is
// lost, so the draw sequence depends only on the candidate list.
inline std::vector<Delivery> broadcast(MessageId msg, std::size_t sender, SimTime t_sent,
                                       std::span<const VehicleState> tick_state, std::span<const BaseStation> stations,
                                       const RadioParams& params, Rng& rng) {
  std::vector<Delivery> out;
  const auto& tx = tick_state[sender];
  auto consider = [&](Endpoint who) {
    bool lost = rng.uniform01() < params.loss_prob;
    SimTime delay = rng.uniform_time(params.hop_delay_min, params.hop_delay_max);
    if (!lost) out.push_back(Delivery{msg, sender, who, t_sent, t_sent + delay});
  };
  for (std::size_t j = 0; j < tick_state.size(); ++j) {
    if (j != sender && distance(tx.pos, tick_state[j].pos) <= params.range) consider({Endpoint::Kind::vehicle, j});
  }
  for (std::size_t b = 0; b < stations.size(); ++b) {
    if (in_bs_range(tx, stations[b])) consider({Endpoint::Kind::station, b});
  }
  return out;
}

}  // namespace minuet
