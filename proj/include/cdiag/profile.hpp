// Per-concept misunderstanding severities over recall / extension / modification.
#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string_view>

#include "cdiag/concept.hpp"

namespace cdiag {

enum class Component { Recall, Extension, Modification };

inline constexpr int kComponentCount = 3;

inline std::string_view component_name(Component c) {
  switch (c) {
    case Component::Recall: return "r";
    case Component::Extension: return "e";
    case Component::Modification: return "m";
  }
  return "?";
}

inline std::optional<Component> component_from_name(std::string_view s) {
  if (s == "r") return Component::Recall;
  if (s == "e") return Component::Extension;
  if (s == "m") return Component::Modification;
  return std::nullopt;
}

using Severity = std::array<double, kComponentCount>;

/// Absent concepts have severity (0, 0, 0); stored values stay in [0, 1].
struct MisunderstandingProfile {
  std::map<ConceptId, Severity> entries;

  double get(ConceptId c, Component k) const {
    auto it = entries.find(c);
    return it == entries.end() ? 0.0 : it->second[static_cast<int>(k)];
  }
  void set(ConceptId c, Component k, double v) {
    entries[c][static_cast<int>(k)] = std::clamp(v, 0.0, 1.0);
  }
  void add(ConceptId c, Component k, double dv) { set(c, k, get(c, k) + dv); }
  bool all_below(double t) const {
    for (const auto& [c, s] : entries)
      for (double v : s)
        if (v >= t) return false;
    return true;
  }

  friend bool operator==(const MisunderstandingProfile&, const MisunderstandingProfile&) = default;
};

}  // namespace cdiag
