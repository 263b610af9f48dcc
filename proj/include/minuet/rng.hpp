#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "minuet/time.hpp"

namespace minuet {

// mt19937_64 with distribution mappings written out by hand. The standard
// distributions are implementation-defined, which would make seeded runs
// differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Independent stream keyed by a tuple of integers. std::seed_seq's mixing is
  // fully specified, so the derived stream is portable.
  static Rng derive(std::initializer_list<std::uint64_t> key) {
    std::vector<std::uint32_t> words;
    words.reserve(key.size() * 2);
    for (auto k : key) {
      words.push_back(static_cast<std::uint32_t>(k));
      words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
  }

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    auto span = static_cast<double>(hi - lo + 1);
    auto k = static_cast<std::int64_t>(uniform01() * span);
    return lo + (k > hi - lo ? hi - lo : k);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform on the microsecond grid of [lo, hi].
  SimTime uniform_time(SimTime lo, SimTime hi) {
    return SimTime::micros(uniform_int(lo.us(), hi.us()));
  }

 private:
  explicit Rng(std::seed_seq& seq) : gen_(seq) {}

  std::mt19937_64 gen_;
};

}  // namespace minuet
