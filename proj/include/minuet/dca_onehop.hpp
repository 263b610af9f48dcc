#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "minuet/clustering.hpp"

namespace minuet {

// One-hop, open-membership clustering in the spirit of DCA. Any vehicle
// eligible for the event (detecting it, or recently inside its AZ) takes
// part. Clusters are stars: every member is linked to its leader. Leader
// choice is the highest linked degree, ties to the lowest vehicle index.
// Every vehicle on the map beacons, event or not.
class DcaOneHop final : public ClusteringTechnique {
 public:
  std::string_view name() const override { return "dca_onehop"; }

  void on_beacon(const TechniqueView& view) override {
    for (VehicleIdx v = 0; v < view.present.size(); ++v) {
      if (view.present[v]) send(ClusterMsgKind::hello, v, -1, -1, view.now, view);
    }
  }

  void maintain(const TechniqueView& view) override {
    for (std::int32_t e = 0; e < static_cast<std::int32_t>(event_count()); ++e) maintain_event(e, view);
  }

 private:
  // (degree desc, index asc)
  bool better(VehicleIdx a, VehicleIdx b, const TechniqueView& view) const {
    auto da = degree(a, view), db = degree(b, view);
    return da != db ? da > db : a < b;
  }

  void maintain_event(std::int32_t e, const TechniqueView& view) {
    // A leader that is gone or no longer eligible takes its cluster with it.
    for (auto id : registry_.live(e)) {
      auto leader = registry_.get(id).leader;
      if (!eligible(leader, e, view)) {
        send(ClusterMsgKind::leave, leader, id, e, view.now, view);
        registry_.dissolve(id, view.now);
      }
    }

    // Members that lost eligibility or their leader link.
    for (auto id : registry_.live(e)) {
      const auto& c = registry_.get(id);
      auto leader = c.leader;
      std::vector<VehicleIdx> dropped;
      for (auto m : c.members)
        if (m != leader && (!eligible(m, e, view) || !linked(m, leader, view))) dropped.push_back(m);
      for (auto m : dropped) leave_cluster(id, m, view);
    }

    // Clusters whose leaders became linked merge; members out of reach of the
    // surviving leader drop out and re-run formation below.
    for (bool merged = true; merged;) {
      merged = false;
      auto ids = registry_.live(e);
      for (std::size_t i = 0; i < ids.size() && !merged; ++i) {
        for (std::size_t j = i + 1; j < ids.size() && !merged; ++j) {
          auto la = registry_.get(ids[i]).leader, lb = registry_.get(ids[j]).leader;
          if (!linked(la, lb, view)) continue;
          auto win = registry_.merge(ids[i], ids[j], view.now, [&](VehicleIdx v, const Cluster& survivor) {
            return v == survivor.leader || linked(v, survivor.leader, view);
          });
          send(ClusterMsgKind::merge, registry_.get(win).leader, win, e, view.now, view);
          merged = true;
        }
      }
    }

    // Formation, repeated until stable: join the best linked leader if there
    // is one, otherwise claim leadership when no unclustered eligible
    // neighbor is a better candidate. The globally best unclustered vehicle
    // always acts, so every eligible vehicle ends up clustered.
    for (bool changed = true; changed;) {
      changed = false;
      for (VehicleIdx v = 0; v < view.present.size(); ++v) {
        if (!eligible(v, e, view) || registry_.is_member(v, e)) continue;
        std::optional<VehicleIdx> best_leader;
        bool outranked = false;
        for (auto u : view.adjacency[v]) {
          if (!linked(v, u, view)) continue;
          auto cu = registry_.cluster_of(u, e);
          if (cu && registry_.get(*cu).leader == u) {
            if (!best_leader || better(u, *best_leader, view)) best_leader = u;
          } else if (!cu && eligible(u, e, view) && better(u, v, view)) {
            outranked = true;
          }
        }
        if (best_leader) {
          join_cluster(*registry_.cluster_of(*best_leader, e), v, view);
          changed = true;
        } else if (!outranked) {
          create_cluster(e, v, view);
          changed = true;
        }
      }
    }
  }
};

}  // namespace minuet
