#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "minuet/clustering.hpp"

namespace minuet {

// Detecting-vehicles-only clustering in the spirit of PCTT. Candidates are
// present, eligible vehicles with at least one detection of the event. A
// candidate joins a cluster through a linked candidate neighbor, so clusters
// grow over multi-hop paths of candidates; a vehicle that never detected the
// event can neither join nor relay membership. Clusters reaching the same
// linked component merge. A member keeps its membership while it stays a
// candidate, even once its links break. The leader is the earliest detector
// among the members, ties to the lowest index.
//
// Only candidates beacon. A vehicle that just became a candidate sends a hello
// at once and waits one tick before founding a cluster of its own, so that it
// can be linked to nearby clusters first.
class PcttMultiHop final : public ClusteringTechnique {
 public:
  std::string_view name() const override { return "pctt_multihop"; }

  void on_beacon(const TechniqueView& view) override {
    for (VehicleIdx v = 0; v < view.present.size(); ++v) {
      if (any_candidacy(v, view)) send(ClusterMsgKind::hello, v, -1, -1, view.now, view);
    }
    beaconed_at_ = view.now;
  }

  void maintain(const TechniqueView& view) override {
    const auto n = view.present.size();
    if (was_candidate_.size() != event_count()) was_candidate_.assign(event_count(), std::vector<std::uint8_t>(n, 0));
    std::vector<std::uint8_t> announce(n, 0);
    for (std::int32_t e = 0; e < static_cast<std::int32_t>(event_count()); ++e) maintain_event(e, view, announce);
    if (beaconed_at_ != view.now) {
      for (VehicleIdx v = 0; v < n; ++v)
        if (announce[v]) send(ClusterMsgKind::hello, v, -1, -1, view.now, view);
    }
  }

  bool candidate(VehicleIdx v, std::int32_t e, const TechniqueView& view) const {
    return ever_detected(v, e) && eligible(v, e, view);
  }

 private:
  bool any_candidacy(VehicleIdx v, const TechniqueView& view) const {
    for (std::int32_t e = 0; e < static_cast<std::int32_t>(event_count()); ++e)
      if (candidate(v, e, view)) return true;
    return false;
  }

  bool earlier(VehicleIdx a, VehicleIdx b, std::int32_t e) const {
    auto ta = first_detection(a, e), tb = first_detection(b, e);
    return ta != tb ? ta < tb : a < b;
  }

  void claim(ClusterId id, VehicleIdx v, std::int32_t e, const TechniqueView& view) {
    registry_.set_leader(id, v, view.now);
    send(ClusterMsgKind::leader_claim, v, id, e, view.now, view);
  }

  void maintain_event(std::int32_t e, const TechniqueView& view, std::vector<std::uint8_t>& announce) {
    const auto n = static_cast<VehicleIdx>(view.present.size());
    auto& was = was_candidate_[static_cast<std::size_t>(e)];
    auto by_detection = [&](VehicleIdx a, VehicleIdx b) { return earlier(a, b, e); };

    std::vector<std::uint8_t> cand(n, 0), fresh(n, 0);
    for (VehicleIdx v = 0; v < n; ++v) {
      cand[v] = candidate(v, e, view) ? 1 : 0;
      fresh[v] = cand[v] && !was[v];
      if (fresh[v]) announce[v] = 1;
      was[v] = cand[v];
    }

    // Non-candidates leave; a departing leader hands over first.
    for (auto id : registry_.live(e)) {
      auto members = registry_.get(id).members;
      std::vector<VehicleIdx> stay, gone;
      for (auto m : members) (cand[m] ? stay : gone).push_back(m);
      if (gone.empty()) continue;
      if (!stay.empty() && !cand[registry_.get(id).leader]) {
        claim(id, *std::min_element(stay.begin(), stay.end(), by_detection), e, view);
      }
      std::stable_partition(gone.begin(), gone.end(), [&](VehicleIdx m) { return m != registry_.get(id).leader; });
      for (auto m : gone) leave_cluster(id, m, view);
    }

    // Linked components of the candidate graph, labelled by smallest index.
    std::vector<std::int64_t> comp(n, -1);
    for (VehicleIdx s = 0; s < n; ++s) {
      if (comp[s] >= 0 || !cand[s]) continue;
      std::vector<VehicleIdx> stack{s};
      comp[s] = s;
      while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto u : view.adjacency[v]) {
          if (comp[u] < 0 && cand[u] && linked(v, u, view)) {
            comp[u] = s;
            stack.push_back(u);
          }
        }
      }
    }
    std::map<std::int64_t, std::vector<VehicleIdx>> components;
    for (VehicleIdx v = 0; v < n; ++v)
      if (comp[v] >= 0) components[comp[v]].push_back(v);

    for (const auto& [label, verts] : components) {
      std::vector<ClusterId> here;
      for (auto v : verts)
        if (auto c = registry_.cluster_of(v, e)) here.push_back(*c);
      std::sort(here.begin(), here.end());
      here.erase(std::unique(here.begin(), here.end()), here.end());

      ClusterId target = -1;
      if (here.empty()) {
        bool settled = std::any_of(verts.begin(), verts.end(), [&](VehicleIdx v) { return !fresh[v]; });
        if (!settled) continue;
        auto first = *std::min_element(verts.begin(), verts.end(), by_detection);
        target = registry_.create(e, first, view.now);
        send(ClusterMsgKind::leader_claim, first, target, e, view.now, view);
      } else {
        target = here.front();
        for (std::size_t i = 1; i < here.size(); ++i) {
          target = registry_.merge(target, here[i], view.now);
          send(ClusterMsgKind::merge, registry_.get(target).leader, target, e, view.now, view);
        }
      }
      for (auto v : verts)
        if (!registry_.is_member(v, e)) join_cluster(target, v, view);
      const auto& c = registry_.get(target);
      auto best = *std::min_element(c.members.begin(), c.members.end(), by_detection);
      if (best != c.leader) claim(target, best, e, view);
    }
  }

  std::vector<std::vector<std::uint8_t>> was_candidate_;  // [event][vehicle], as of the previous maintain
  SimTime beaconed_at_ = SimTime::micros(-1);
};

}  // namespace minuet
