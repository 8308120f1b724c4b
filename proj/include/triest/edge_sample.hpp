#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "triest/random.hpp"
#include "triest/types.hpp"

namespace triest {

/// Raised when a caller breaks a structural precondition of a sampler.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A vertex adjacent to both endpoints of a queried pair, with the number of
/// parallel edges towards each endpoint.
struct SharedNeighbor {
  VertexId vertex;
  std::uint32_t mult_u;
  std::uint32_t mult_v;

  friend bool operator==(const SharedNeighbor&, const SharedNeighbor&) = default;
};

/// The bounded edge sample kept by the estimators, viewed as a dynamic
/// (multi)graph. Neighbor maps are hashed so that shared-neighborhood queries
/// cost O(min(deg u, deg v)); a dense edge array gives O(1) uniform draws.
///
/// In graph mode each vertex pair appears at most once and labels are
/// ignored. In multigraph mode every stored copy is identified by its label.
class EdgeSample {
 public:
  using NeighborMap = std::unordered_map<VertexId, std::uint32_t>;
  static constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();

  explicit EdgeSample(GraphMode mode, std::size_t capacity = unbounded)
      : mode_(mode), capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("sample capacity must be positive");
    if (capacity != unbounded) {
      edges_.reserve(capacity);
      index_.reserve(capacity);
    }
  }

  GraphMode mode() const { return mode_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  bool full() const { return edges_.size() >= capacity_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::unordered_map<VertexId, NeighborMap>& adjacency() const { return adj_; }

  bool contains(const Edge& e) const { return index_.contains(key(e)); }

  std::uint32_t multiplicity(VertexId a, VertexId b) const {
    auto it = adj_.find(a);
    if (it == adj_.end()) return 0;
    auto jt = it->second.find(b);
    return jt == it->second.end() ? 0 : jt->second;
  }

  std::size_t degree(VertexId a) const {
    auto it = adj_.find(a);
    return it == adj_.end() ? 0 : it->second.size();
  }

  void insert(const Edge& edge) {
    if (full()) throw InvariantViolation("edge sample capacity exceeded");
    const Edge e = key(edge);
    auto [it, fresh] = index_.try_emplace(e, edges_.size());
    if (!fresh) {
      throw InvariantViolation("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                               ") already in sample");
    }
    edges_.push_back(e);
    ++adj_[e.u][e.v];
    ++adj_[e.v][e.u];
  }

  void remove(const Edge& edge) {
    const Edge e = key(edge);
    auto it = index_.find(e);
    if (it == index_.end()) {
      throw InvariantViolation("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                               ") not in sample");
    }
    const std::size_t slot = it->second;
    index_.erase(it);
    if (slot + 1 != edges_.size()) {
      edges_[slot] = edges_.back();
      index_[edges_[slot]] = slot;
    }
    edges_.pop_back();
    unlink(e.u, e.v);
    unlink(e.v, e.u);
  }

  /// Calls fn(SharedNeighbor) for every vertex adjacent to both a and b,
  /// iterating the smaller of the two neighbor maps.
  template <class Fn>
  void for_each_shared_neighbor(VertexId a, VertexId b, Fn&& fn) const {
    auto ia = adj_.find(a);
    if (ia == adj_.end()) return;
    auto ib = adj_.find(b);
    if (ib == adj_.end()) return;
    const bool swap = ia->second.size() > ib->second.size();
    const NeighborMap& small = swap ? ib->second : ia->second;
    const NeighborMap& large = swap ? ia->second : ib->second;
    for (const auto& [c, m_small] : small) {
      auto jt = large.find(c);
      if (jt == large.end()) continue;
      fn(swap ? SharedNeighbor{c, jt->second, m_small} : SharedNeighbor{c, m_small, jt->second});
    }
  }

  std::vector<SharedNeighbor> shared_neighborhood(VertexId a, VertexId b) const {
    std::vector<SharedNeighbor> out;
    for_each_shared_neighbor(a, b, [&](const SharedNeighbor& s) { out.push_back(s); });
    return out;
  }

  /// One stored edge (a specific copy in multigraph mode), uniformly at random.
  const Edge& uniform_edge(Rng& rng) const {
    if (edges_.empty()) throw InvariantViolation("uniform_edge on empty sample");
    return edges_[uniform_index(rng, edges_.size())];
  }

  void clear() {
    edges_.clear();
    index_.clear();
    adj_.clear();
  }

 private:
  Edge key(const Edge& e) const { return mode_ == GraphMode::Graph ? Edge{e.u, e.v, 0} : e; }

  void unlink(VertexId a, VertexId b) {
    auto it = adj_.find(a);
    auto jt = it->second.find(b);
    if (--jt->second == 0) {
      it->second.erase(jt);
      if (it->second.empty()) adj_.erase(it);
    }
  }

  GraphMode mode_;
  std::size_t capacity_;
  std::vector<Edge> edges_;
  std::unordered_map<Edge, std::size_t, EdgeHash> index_;
  std::unordered_map<VertexId, NeighborMap> adj_;
};

}  // namespace triest
