#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "minuet/errors.hpp"
#include "minuet/event_log.hpp"
#include "minuet/time.hpp"

namespace minuet {

struct WindowMetrics {
  SimTime t_start;
  std::int64_t dv = 0;
  std::int64_t mp_gen = 0;
  std::int64_t mp_deliv = 0;
  std::int64_t mp_ddeliv = 0;
  std::int64_t mp_transm = 0;
  std::int64_t ap_transm = 0;
  std::int64_t cp_transm = 0;

  std::int64_t nmo() const { return mp_transm + ap_transm + cp_transm; }

  friend bool operator==(const WindowMetrics&, const WindowMetrics&) = default;
};

struct HopDelay {
  std::int64_t count = 0;
  std::int64_t sum_us = 0;

  double mean_seconds() const { return count ? static_cast<double>(sum_us) / static_cast<double>(count) * 1e-6 : 0.0; }

  friend bool operator==(const HopDelay&, const HopDelay&) = default;
};

// Everything the evaluation reports, recomputable from an EventLog alone.
// Counting conventions:
//  - mp_deliv counts distinct monitoring msg_ids that reached any station,
//    in the window of their first delivery.
//  - mp_ddeliv counts distinct msg_ids delivered two or more times, in the
//    window of the second delivery; mp_copies counts every delivery record.
//  - *_transm count transmissions: originations plus forwards of that kind,
//    and every cluster_msg for CP.
//  - ADD groups every delivered copy by the hop count it arrived with.
struct MetricsReport {
  SimTime dt;
  SimTime duration;
  std::vector<WindowMetrics> windows;

  std::int64_t dv_total = 0;  // distinct vehicles that ever detected
  std::int64_t mp_gen = 0;
  std::int64_t mp_deliv = 0;
  std::int64_t mp_ddeliv = 0;
  std::int64_t mp_copies = 0;
  std::int64_t mp_transm = 0;
  std::int64_t ap_transm = 0;
  std::int64_t cp_transm = 0;
  std::int64_t nc = 0;
  std::int64_t nv_total = 0;
  std::int64_t cv_total = 0;

  double txd = 0.0;
  double txr = 0.0;
  double txcv = 0.0;
  double co = 0.0;
  std::map<std::int32_t, HopDelay> add;
  HopDelay add_all;

  std::int64_t nmo() const { return mp_transm + ap_transm + cp_transm; }

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline double percent(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den) * 100.0;
}

inline std::size_t window_count(SimTime duration, SimTime dt) {
  if (dt <= SimTime{}) throw ConfigError("dt", "window length must be > 0");
  if (duration <= SimTime{}) return 0;
  return static_cast<std::size_t>((duration.us() + dt.us() - 1) / dt.us());
}

inline MetricsReport compute_metrics(const EventLog& log, SimTime dt = SimTime::seconds(1.0)) {
  MetricsReport rep;
  rep.dt = dt;
  rep.duration = log.info().duration;
  const auto nwin = window_count(rep.duration, dt);
  rep.windows.resize(nwin);
  for (std::size_t w = 0; w < nwin; ++w) rep.windows[w].t_start = dt * static_cast<std::int64_t>(w);

  auto window_of = [&](SimTime t) -> WindowMetrics* {
    if (t < SimTime{} || t >= rep.duration) return nullptr;
    auto w = static_cast<std::size_t>(t.us() / dt.us());
    return w < nwin ? &rep.windows[w] : nullptr;
  };

  // Detection intervals per vehicle, closed at the run's end when still open.
  std::map<std::pair<std::int32_t, std::int32_t>, SimTime> open;  // (vehicle, event) -> start
  std::map<std::int32_t, std::vector<std::pair<SimTime, SimTime>>> intervals;
  std::unordered_map<std::uint64_t, int> deliveries;
  std::set<std::int32_t> seen, members;

  for (const auto& r : log.records()) {
    auto* win = window_of(r.t);
    switch (r.type) {
      case RecordType::vehicle_seen:
        seen.insert(r.vehicle);
        break;
      case RecordType::detection_start:
        open[{r.vehicle, r.event}] = r.t;
        break;
      case RecordType::detection_end: {
        auto it = open.find({r.vehicle, r.event});
        if (it != open.end()) {
          intervals[r.vehicle].emplace_back(it->second, r.t);
          open.erase(it);
        }
        break;
      }
      case RecordType::packet_generated:
      case RecordType::packet_forwarded: {
        bool mon = r.packet_kind() == PacketKind::monitoring;
        if (r.type == RecordType::packet_generated && mon) {
          ++rep.mp_gen;
          if (win) ++win->mp_gen;
        }
        (mon ? rep.mp_transm : rep.ap_transm) += 1;
        if (win) (mon ? win->mp_transm : win->ap_transm) += 1;
        break;
      }
      case RecordType::packet_delivered_bs: {
        ++rep.mp_copies;
        auto n = ++deliveries[(std::uint64_t{r.msg.origin} << 32) | r.msg.seq];
        if (n == 1) {
          ++rep.mp_deliv;
          if (win) ++win->mp_deliv;
        } else if (n == 2) {
          ++rep.mp_ddeliv;
          if (win) ++win->mp_ddeliv;
        }
        auto delay = (r.t - r.t_gen).us();
        auto& h = rep.add[r.hop];
        ++h.count;
        h.sum_us += delay;
        ++rep.add_all.count;
        rep.add_all.sum_us += delay;
        break;
      }
      case RecordType::cluster_msg:
        ++rep.cp_transm;
        if (win) ++win->cp_transm;
        break;
      case RecordType::cluster_created:
        ++rep.nc;
        break;
      case RecordType::membership_change:
        if (r.action() == MembershipAction::join) members.insert(r.vehicle);
        break;
      default:
        break;
    }
  }
  for (const auto& [key, start] : open) intervals[key.first].emplace_back(start, rep.duration);

  for (const auto& [v, ivs] : intervals) {
    std::vector<char> hit(nwin, 0);
    for (const auto& [s, e] : ivs) {
      if (nwin == 0 || e <= s) continue;
      auto first = static_cast<std::size_t>(std::max<std::int64_t>(s.us(), 0) / dt.us());
      auto last_us = std::min(e.us(), rep.duration.us()) - 1;  // half-open end
      if (last_us < s.us()) continue;
      auto last = std::min(static_cast<std::size_t>(last_us / dt.us()), nwin - 1);
      for (auto w = first; w <= last; ++w) hit[w] = 1;
    }
    for (std::size_t w = 0; w < nwin; ++w) rep.windows[w].dv += hit[w];
  }

  rep.dv_total = static_cast<std::int64_t>(intervals.size());
  rep.nv_total = static_cast<std::int64_t>(seen.size());
  rep.cv_total = static_cast<std::int64_t>(members.size());
  rep.txd = percent(rep.mp_deliv, rep.mp_gen);
  rep.txr = percent(rep.mp_ddeliv, rep.mp_deliv);
  rep.txcv = percent(rep.cv_total, rep.nv_total);
  rep.co = percent(rep.cp_transm, rep.nmo());
  return rep;
}

// Single-metric accessors over the same computation.
inline std::vector<std::int64_t> dv(const EventLog& log, SimTime dt) {
  std::vector<std::int64_t> out;
  for (const auto& w : compute_metrics(log, dt).windows) out.push_back(w.dv);
  return out;
}
inline std::vector<std::int64_t> mp_gen(const EventLog& log, SimTime dt) {
  std::vector<std::int64_t> out;
  for (const auto& w : compute_metrics(log, dt).windows) out.push_back(w.mp_gen);
  return out;
}
inline std::vector<std::int64_t> mp_deliv(const EventLog& log, SimTime dt) {
  std::vector<std::int64_t> out;
  for (const auto& w : compute_metrics(log, dt).windows) out.push_back(w.mp_deliv);
  return out;
}
inline std::vector<std::int64_t> nmo(const EventLog& log, SimTime dt) {
  std::vector<std::int64_t> out;
  for (const auto& w : compute_metrics(log, dt).windows) out.push_back(w.nmo());
  return out;
}
inline double txd(const EventLog& log) { return compute_metrics(log).txd; }
inline double txr(const EventLog& log) { return compute_metrics(log).txr; }
inline double txcv(const EventLog& log) { return compute_metrics(log).txcv; }
inline double co(const EventLog& log) { return compute_metrics(log).co; }
inline std::int64_t nc(const EventLog& log) { return compute_metrics(log).nc; }
inline std::map<std::int32_t, double> add(const EventLog& log) {
  std::map<std::int32_t, double> out;
  for (const auto& [hop, h] : compute_metrics(log).add) out[hop] = h.mean_seconds();
  return out;
}

inline constexpr std::string_view kReportFormat = "minuet-report/1";

// Summary document. Contains nothing run-environment specific, so a report
// recomputed offline from the log is byte-identical to the in-run one.
inline nlohmann::ordered_json report_json(const MetricsReport& rep, const RunInfo& info) {
  nlohmann::ordered_json j;
  j["format"] = kReportFormat;
  j["technique"] = info.technique;
  j["seed"] = info.seed;
  j["duration"] = rep.duration.sec();
  j["dt"] = rep.dt.sec();
  j["windows"] = rep.windows.size();
  nlohmann::ordered_json totals;
  totals["dv_total"] = rep.dv_total;
  totals["mp_gen"] = rep.mp_gen;
  totals["mp_deliv"] = rep.mp_deliv;
  totals["mp_ddeliv"] = rep.mp_ddeliv;
  totals["mp_copies"] = rep.mp_copies;
  totals["mp_transm"] = rep.mp_transm;
  totals["ap_transm"] = rep.ap_transm;
  totals["cp_transm"] = rep.cp_transm;
  totals["nmo"] = rep.nmo();
  totals["nc"] = rep.nc;
  totals["nv_total"] = rep.nv_total;
  totals["cv_total"] = rep.cv_total;
  j["totals"] = totals;
  j["txd"] = rep.txd;
  j["txr"] = rep.txr;
  j["txcv"] = rep.txcv;
  j["co"] = rep.co;
  nlohmann::ordered_json add = nlohmann::ordered_json::array();
  for (const auto& [hop, h] : rep.add) {
    nlohmann::ordered_json e;
    e["hop"] = hop;
    e["count"] = h.count;
    e["mean_delay"] = h.mean_seconds();
    add.push_back(e);
  }
  j["add"] = add;
  j["add_overall"] = rep.add_all.mean_seconds();
  return j;
}

inline std::string report_text(const MetricsReport& rep, const RunInfo& info) {
  return report_json(rep, info).dump(2) + "\n";
}

inline constexpr std::string_view kSeriesHeader =
    "window,t_start,dv,mp_gen,mp_deliv,mp_ddeliv,mp_transm,ap_transm,cp_transm,nmo";

inline std::string series_csv(const MetricsReport& rep) {
  std::string out(kSeriesHeader);
  out += '\n';
  for (std::size_t w = 0; w < rep.windows.size(); ++w) {
    const auto& x = rep.windows[w];
    out += std::to_string(w);
    out += ',';
    append_seconds(out, x.t_start);
    for (auto v : {x.dv, x.mp_gen, x.mp_deliv, x.mp_ddeliv, x.mp_transm, x.ap_transm, x.cp_transm, x.nmo()}) {
      out += ',';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace minuet
