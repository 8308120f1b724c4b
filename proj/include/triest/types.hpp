#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace triest {

using VertexId = std::uint64_t;
using Label = std::int64_t;
using Timestamp = std::int64_t;

enum class Op : std::uint8_t { Insert, Delete };

/// Graph streams carry each vertex pair at most once; multigraph streams
/// distinguish parallel edges by a label that is unique per vertex pair.
enum class GraphMode : std::uint8_t { Graph, Multigraph };

inline int sign(Op op) { return op == Op::Insert ? +1 : -1; }

/// An undirected (possibly labeled) edge, stored with u < v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  Label label = 0;

  static Edge make(VertexId a, VertexId b, Label label = 0) {
    if (a == b) throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
    return a < b ? Edge{a, b, label} : Edge{b, a, label};
  }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept {
    // splitmix-style mixing of the three fields
    std::uint64_t h = e.u * 0x9E3779B97F4A7C15ULL;
    h ^= (e.v + 0x632BE59BD9B4E019ULL) * 0xBF58476D1CE4E5B9ULL;
    h ^= static_cast<std::uint64_t>(e.label) * 0x94D049BB133111EBULL;
    h ^= h >> 31;
    return static_cast<std::size_t>(h);
  }
};

/// One element of an edge stream.
struct EdgeEvent {
  Op op = Op::Insert;
  Edge edge;
  bool has_label = false;
  std::optional<Timestamp> ts;

  static EdgeEvent insert(VertexId a, VertexId b) { return {Op::Insert, Edge::make(a, b), false, {}}; }
  static EdgeEvent remove(VertexId a, VertexId b) { return {Op::Delete, Edge::make(a, b), false, {}}; }
  static EdgeEvent insert(VertexId a, VertexId b, Label l) { return {Op::Insert, Edge::make(a, b, l), true, {}}; }
  static EdgeEvent remove(VertexId a, VertexId b, Label l) { return {Op::Delete, Edge::make(a, b, l), true, {}}; }

  EdgeEvent with_ts(Timestamp t) const {
    EdgeEvent e = *this;
    e.ts = t;
    return e;
  }

  friend bool operator==(const EdgeEvent&, const EdgeEvent&) = default;
};

}  // namespace triest
