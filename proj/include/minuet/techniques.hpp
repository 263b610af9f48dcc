#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "minuet/clustering.hpp"
#include "minuet/dca_onehop.hpp"
#include "minuet/errors.hpp"
#include "minuet/pctt_multihop.hpp"

namespace minuet {

using TechniqueFactory = std::function<std::unique_ptr<ClusteringTechnique>()>;

namespace detail {

struct TechniqueRegistry {
  std::mutex mu;
  std::map<std::string, TechniqueFactory, std::less<>> factories{
      {"dca_onehop", [] { return std::make_unique<DcaOneHop>(); }},
      {"pctt_multihop", [] { return std::make_unique<PcttMultiHop>(); }},
  };
};

inline TechniqueRegistry& technique_registry() {
  static TechniqueRegistry reg;
  return reg;
}

}  // namespace detail

// Adds or replaces a technique under `name`; scenarios select it by that name.
inline void register_technique(const std::string& name, TechniqueFactory factory) {
  auto& reg = detail::technique_registry();
  std::lock_guard lock(reg.mu);
  reg.factories[name] = std::move(factory);
}

inline std::vector<std::string> technique_names() {
  auto& reg = detail::technique_registry();
  std::lock_guard lock(reg.mu);
  std::vector<std::string> out;
  for (const auto& [name, _] : reg.factories) out.push_back(name);
  return out;
}

inline std::unique_ptr<ClusteringTechnique> make_technique(std::string_view name) {
  TechniqueFactory f;
  {
    auto& reg = detail::technique_registry();
    std::lock_guard lock(reg.mu);
    auto it = reg.factories.find(name);
    if (it != reg.factories.end()) f = it->second;
  }
  if (!f) {
    std::string known;
    for (const auto& n : technique_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("clustering", "unknown technique '" + std::string(name) + "' (known: " + known + ")");
  }
  return f();
}

}  // namespace minuet
