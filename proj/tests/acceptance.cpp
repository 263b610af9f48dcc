// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every check reads the serialized event log through the independent
// oracle, never through library accessors alone.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "oracle/log_oracle.hpp"
#include "test_support.hpp"

using namespace minuet;
using testing_support::scenario_path;
using testing_support::sec;

namespace {

const char* kTechniques[] = {"dca_onehop", "pctt_multihop"};
const char* kDesk[] = {"desk_1w_ld.json", "desk_1w_hd.json", "desk_2w_ld.json", "desk_2w_hd.json"};
constexpr std::uint64_t kSeeds = 5;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// What the suite keeps of each run. Logs are scanned once and dropped; the
// largest random scenarios produce millions of records.
struct Run {
  std::string label;
  std::uint64_t hash = 0;
  MetricsReport lib;
  oracle::Metrics ref;
  oracle::Flooding flood;
  std::vector<std::string> az_bad;
  std::size_t az_checked = 0;
  long long quiet_after_us = -1;  // -1 when the run has no events
  std::size_t n_vehicles = 0;
};

std::vector<const Run*> g_all_runs;

Run summarize(const std::string& label, const Scenario& s) {
  Run out;
  out.label = label;
  std::string text;
  {
    auto log = run(s);
    out.lib = compute_metrics(log);
    text = serialize(log);
  }
  out.hash = fnv1a(text);
  auto log = oracle::load(std::move(text));
  out.ref = oracle::metrics(log);
  out.flood = oracle::flooding(log);
  out.az_bad = oracle::az_violations(log);
  log.lines([&](std::string_view, std::string_view type, long long) {
    out.az_checked += type == "packet_forwarded" || type == "packet_delivered_bs";
  });
  out.n_vehicles = log.n_vehicles;
  for (const auto& e : log.header["events"]) {
    out.quiet_after_us = std::max(out.quiet_after_us, oracle::us(e["t_spawn"]) + oracle::us(e["lifetime"]) + oracle::us(e["mdt"]));
  }
  if (out.quiet_after_us >= 0) {
    out.quiet_after_us += oracle::us(log.header["radio"]["hop_delay_max"]) * static_cast<long long>(log.n_vehicles);
  }
  return out;
}

class Cache {
 public:
  const Run& get(const std::string& file, std::uint64_t seed, const std::string& tech) {
    auto key = file + "|" + std::to_string(seed) + "|" + tech;
    auto it = runs_.find(key);
    if (it != runs_.end()) return it->second;
    auto s = load_scenario(scenario_path(file));
    s.seed = seed;
    s.clustering = tech;
    return add(key, s);
  }
  const Run& add(const std::string& label, const Scenario& s) {
    auto [it, _] = runs_.emplace(label, summarize(label, s));
    g_all_runs.push_back(&it->second);
    return it->second;
  }

 private:
  std::map<std::string, Run> runs_;
};

Cache g_cache;

Scenario bundled(const std::string& file, const std::string& tech) {
  auto s = load_scenario(scenario_path(file));
  s.clustering = tech;
  return s;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail.str("");
    pass = false;
    detail << why << "; ";
  }
};

// Twenty random synthetic road scenarios.
Scenario random_scenario(std::uint64_t seed) {
  Rng r = Rng::derive({0xACCE, seed});
  Scenario s;
  s.seed = seed;
  s.duration = sec(60);
  s.clustering = kTechniques[seed % 2];
  SyntheticTrace syn;
  syn.params.n_vehicles = static_cast<int>(r.uniform_int(5, 40));
  syn.params.lanes = r.uniform01() < 0.5 ? LaneKind::one_way : LaneKind::two_way;
  syn.params.length_m = r.uniform(500, 1500);
  syn.params.speed_min = r.uniform(5, 12);
  syn.params.speed_max = syn.params.speed_min + r.uniform(0, 10);
  syn.params.duration = s.duration;
  s.trace_source = syn;
  s.radio.loss_prob = r.uniform(0, 0.2);
  auto n_events = r.uniform_int(1, 3);
  for (std::int64_t e = 0; e < n_events; ++e) {
    CriticalEvent ev;
    ev.event_id = "ev" + std::to_string(e);
    ev.pos = {r.uniform(0, syn.params.length_m), r.uniform(-5, 10)};
    ev.t_spawn = sec(r.uniform(0, 20));
    ev.lifetime = sec(r.uniform(5, 35));
    ev.detection_radius = r.uniform(30, 150);
    ev.mdt = sec(r.uniform(0.03, 0.5));
    s.events.push_back(ev);
  }
  auto n_bs = r.uniform_int(1, 3);
  for (std::int64_t b = 0; b < n_bs; ++b) {
    s.base_stations.push_back({"bs" + std::to_string(b), {r.uniform(0, syn.params.length_m), 10}, r.uniform(50, 150)});
  }
  return s;
}

Outcome az_soundness() {
  Outcome o;
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto& run = g_cache.add("random-" + std::to_string(seed), random_scenario(seed));
    checked += run.az_checked;
    if (!run.az_bad.empty()) {
      o.fail("seed " + std::to_string(seed) + ": " + std::to_string(run.az_bad.size()) + " violations, e.g. " + run.az_bad[0]);
    }
  }
  o.detail << checked << " forward/delivery records checked over 20 scenarios";
  return o;
}

void compare_metrics(const Run& run, Outcome& o) {
  const auto& lib = run.lib;
  const auto& ref = run.ref;
  auto tag = run.label + ": ";
  if (lib.windows.size() != ref.windows.size()) return o.fail(tag + "window count");
  for (std::size_t w = 0; w < ref.windows.size(); ++w) {
    const auto& a = lib.windows[w];
    const auto& b = ref.windows[w];
    if (a.dv != b.dv) o.fail(tag + "DV window " + std::to_string(w));
    if (a.mp_gen != b.mp_gen) o.fail(tag + "MP_gen window " + std::to_string(w));
    if (a.mp_deliv != b.mp_deliv) o.fail(tag + "MP_deliv window " + std::to_string(w));
    if (a.mp_ddeliv != b.mp_ddeliv) o.fail(tag + "MP_Ddeliv window " + std::to_string(w));
    if (a.nmo() != b.mp_transm + b.ap_transm + b.cp_transm) o.fail(tag + "NMO window " + std::to_string(w));
  }
  if (lib.mp_gen != ref.mp_gen || lib.mp_deliv != ref.mp_deliv || lib.mp_ddeliv != ref.mp_ddeliv) o.fail(tag + "totals");
  if (lib.txd != ref.txd) o.fail(tag + "TxD");
  if (lib.txr != ref.txr) o.fail(tag + "TxR");
  if (lib.txcv != ref.txcv) o.fail(tag + "TxCV");
  if (lib.nc != ref.nc) o.fail(tag + "NC");
  if (lib.co != ref.co) o.fail(tag + "CO");
  if (lib.add.size() != ref.add.size()) o.fail(tag + "ADD hop set");
  for (const auto& [hop, mean] : ref.add) {
    auto it = lib.add.find(hop);
    if (it == lib.add.end() || std::abs(it->second.mean_seconds() - mean) > 1e-9 * std::abs(mean)) {
      o.fail(tag + "ADD hop " + std::to_string(hop));
    }
  }
}

Outcome oracle_equivalence() {
  Outcome o;
  std::size_t n = 0;
  for (const char* f : {"fixture.json", "no_detector.json", "figure4.json", "chain.json"}) {
    for (const char* tech : kTechniques) {
      compare_metrics(g_cache.get(f, load_scenario(scenario_path(f)).seed, tech), o);
      ++n;
    }
  }
  // ten full desk-scale runs
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const char* tech : kTechniques) {
      compare_metrics(g_cache.get(kDesk[seed % 4], seed, tech), o);
      ++n;
    }
  }
  if (o.pass) o.detail << n << " logs, 10 metrics each, identical";
  return o;
}

Outcome determinism() {
  Outcome o;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (const char* tech : kTechniques) {
      auto s = load_scenario(scenario_path("desk_2w_hd.json"));
      s.seed = seed;
      s.clustering = tech;
      auto a = g_cache.get("desk_2w_hd.json", seed, tech).hash;
      auto b = fnv1a(serialize(run(s)));
      if (a != b) o.fail(std::string(tech) + " seed " + std::to_string(seed) + " hashes differ");
      else if (seed == 1) o.detail << tech << " seed 1 hash " << std::hex << a << std::dec << "; ";
    }
  }
  if (o.pass) o.detail << "6 scenario/technique/seed cases, each run twice";
  return o;
}

Outcome mp_gen_invariance() {
  Outcome o;
  for (const char* f : kDesk) {
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      auto a = g_cache.get(f, seed, "dca_onehop").ref.mp_gen;
      auto b = g_cache.get(f, seed, "pctt_multihop").ref.mp_gen;
      if (a != b) o.fail(std::string(f) + " seed " + std::to_string(seed) + ": " + std::to_string(a) + " vs " + std::to_string(b));
      if (seed == 1) o.detail << f << " " << a << "; ";
    }
  }
  return o;
}

double mean_txd(const char* file) {
  double sum = 0;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) sum += g_cache.get(file, seed, "dca_onehop").ref.txd;
  return sum / kSeeds;
}

Outcome density_trend() {
  Outcome o;
  for (auto [ld, hd] : {std::pair{"desk_2w_ld.json", "desk_2w_hd.json"}, std::pair{"desk_1w_ld.json", "desk_1w_hd.json"}}) {
    double l = mean_txd(ld), h = mean_txd(hd);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.2f%% vs %s %.2f%%", hd, h, ld, l);
    if (!(h > l)) o.fail(buf);
    else o.detail << buf << "; ";
  }
  return o;
}

Outcome technique_trend() {
  Outcome o;
  std::size_t cases = 0;
  for (const char* f : kDesk) {
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      const auto& d = g_cache.get(f, seed, "dca_onehop").ref;
      const auto& p = g_cache.get(f, seed, "pctt_multihop").ref;
      auto tag = std::string(f) + " seed " + std::to_string(seed) + ": ";
      if (p.mp_deliv > d.mp_deliv) o.fail(tag + "deliveries " + std::to_string(p.mp_deliv) + " > " + std::to_string(d.mp_deliv));
      if (p.nc > d.nc) o.fail(tag + "NC " + std::to_string(p.nc) + " > " + std::to_string(d.nc));
      if (p.txcv > d.txcv) o.fail(tag + "TxCV " + std::to_string(p.txcv) + " > " + std::to_string(d.txcv));
      ++cases;
    }
  }
  if (o.pass) {
    const auto& d = g_cache.get("desk_2w_hd.json", 1, "dca_onehop").ref;
    const auto& p = g_cache.get("desk_2w_hd.json", 1, "pctt_multihop").ref;
    o.detail << cases << " matched cases; 2w_hd seed 1 NC " << p.nc << " vs " << d.nc;
  }
  return o;
}

Outcome delay_regime() {
  Outcome o;
  auto log = oracle::load(serialize(run(bundled("chain.json", "dca_onehop"))));
  std::map<int, std::pair<long long, long long>> by_hop;  // sum_us, count
  std::size_t chains = 0;
  for (const auto& c : oracle::delivery_chains(log)) {
    ++chains;
    long long sum = 0;
    for (auto h : c.hops_us) sum += h;
    if (!c.complete) o.fail("incomplete chain at hop " + std::to_string(c.hop));
    else if (sum != c.total_us) o.fail("delay " + std::to_string(c.total_us) + " us != per-hop sum " + std::to_string(sum));
    by_hop[c.hop].first += c.total_us;
    ++by_hop[c.hop].second;
  }
  for (int hop = 2; hop <= 5; ++hop) {
    auto it = by_hop.find(hop);
    if (it == by_hop.end()) {
      o.fail("no deliveries with " + std::to_string(hop) + " hops");
      continue;
    }
    double mean = static_cast<double>(it->second.first) / static_cast<double>(it->second.second) * 1e-6;
    char buf[96];
    std::snprintf(buf, sizeof buf, "hop %d mean %.4f s (n=%lld)", hop, mean, it->second.second);
    if (mean < 0.02 || mean > 0.15) o.fail(buf);
    else if (o.pass) o.detail << buf << "; ";
  }
  if (o.pass) o.detail << chains << " chains replayed exactly";
  return o;
}

Outcome figure4_roles() {
  Outcome o;
  auto roles = oracle::roles(oracle::load(serialize(run(bundled("figure4.json", "dca_onehop")))));
  auto expect = [&](const std::string& v, bool ok, const std::string& what) {
    if (!ok) o.fail(v + " " + what);
  };
  expect("D", roles["D"].monitor, "does not monitor");
  expect("E", roles["E"].monitor, "does not monitor");
  expect("D", roles["D"].delivered_direct, "never delivers directly");
  expect("A", !roles["A"].forwarded_any, "forwards");
  expect("H", !roles["H"].forwarded_any, "forwards");
  for (const char* v : {"B", "C", "F"}) expect(v, roles[v].transmitter, "never transmits");
  expect("G", roles["G"].gateway, "never acts as gateway");
  for (const char* v : {"A", "B", "C", "F", "G", "H"}) expect(v, !roles[v].monitor, "monitors");
  if (o.pass) o.detail << "D,E monitor; D direct; A,H silent; B,C,F transmit; G gateway";
  return o;
}

Outcome flooding_termination() {
  Outcome o;
  std::size_t worst = 0;
  for (const auto* run : g_all_runs) {
    const auto& f = run->flood;
    worst = std::max(worst, f.max_forwards_per_msg);
    if (f.max_forwards_per_msg > run->n_vehicles) {
      o.fail(run->label + ": " + std::to_string(f.max_forwards_per_msg) + " forwards of one msg with " +
             std::to_string(run->n_vehicles) + " vehicles");
    }
    if (run->quiet_after_us >= 0 && f.last_packet_us > run->quiet_after_us) {
      o.fail(run->label + ": packet activity at " + std::to_string(f.last_packet_us) + " us after bound " +
             std::to_string(run->quiet_after_us));
    }
  }
  if (o.pass) o.detail << g_all_runs.size() << " runs; max forwards of one msg " << worst;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  std::vector<Criterion> criteria{
      {1, "AZ soundness", az_soundness},
      {2, "metric/oracle equivalence", oracle_equivalence},
      {3, "determinism", determinism},
      {4, "MP_gen technique invariance", mp_gen_invariance},
      {5, "density trend (TxD, dca_onehop)", density_trend},
      {6, "technique trend (deliveries, NC, TxCV)", technique_trend},
      {7, "delay regime and per-hop sums", delay_regime},
      {8, "four-hop walkthrough roles", figure4_roles},
      {9, "flooding termination", flooding_termination},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !out.pass;
    std::printf("%s [%d] %s (%.1fs): %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
