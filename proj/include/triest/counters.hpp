#pragma once

#include <unordered_map>

#include "triest/types.hpp"

namespace triest {

/// Global counter plus sparse per-vertex counters. Local counters are created
/// on first touch and erased as soon as they return to zero, so the map only
/// ever holds non-zero entries.
template <class T>
class CounterBank {
 public:
  using value_type = T;

  T global() const { return global_; }

  T local(VertexId u) const {
    auto it = locals_.find(u);
    return it == locals_.end() ? T{} : it->second;
  }

  const std::unordered_map<VertexId, T>& locals() const { return locals_; }

  void add_global(T delta) { global_ += delta; }

  void add_local(VertexId u, T delta) {
    auto [it, fresh] = locals_.try_emplace(u, delta);
    if (!fresh) it->second += delta;
    if (it->second == T{}) locals_.erase(it);
  }

  void clear() {
    global_ = T{};
    locals_.clear();
  }

 private:
  T global_{};
  std::unordered_map<VertexId, T> locals_;
};

}  // namespace triest
