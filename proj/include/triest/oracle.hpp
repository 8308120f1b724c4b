#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>

#include "triest/counters.hpp"
#include "triest/edge_sample.hpp"
#include "triest/types.hpp"

namespace triest {

/// Exact incremental global and local triangle counts. Stores the whole
/// (multi)graph; an insertion or deletion of (u, v) changes the counts by the
/// number of triangles it closes or breaks, sum_c mult(c,u) * mult(c,v).
class ExactCounter {
 public:
  explicit ExactCounter(GraphMode mode = GraphMode::Graph) : graph_(mode) {}

  /// Throws InvariantViolation on an operation without effect.
  void process(const EdgeEvent& ev) {
    const Edge& e = ev.edge;
    if (ev.op == Op::Delete) {
      graph_.remove(e);
    } else if (graph_.contains(e)) {
      throw InvariantViolation("insertion of an edge already present");
    }
    std::int64_t closed = 0;
    graph_.for_each_shared_neighbor(e.u, e.v, [&](const SharedNeighbor& c) {
      const auto y = static_cast<std::int64_t>(c.mult_u) * c.mult_v;
      counts_.add_local(c.vertex, sign(ev.op) * y);
      closed += y;
    });
    if (closed != 0) {
      counts_.add_global(sign(ev.op) * closed);
      counts_.add_local(e.u, sign(ev.op) * closed);
      counts_.add_local(e.v, sign(ev.op) * closed);
    }
    if (ev.op == Op::Insert) graph_.insert(e);
  }

  std::int64_t total() const { return counts_.global(); }
  std::int64_t local(VertexId u) const { return counts_.local(u); }
  const EdgeSample& graph() const { return graph_; }
  const CounterBank<std::int64_t>& counters() const { return counts_; }

  double global_estimate() const { return static_cast<double>(total()); }
  double local_estimate(VertexId u) const { return static_cast<double>(local(u)); }
  std::map<VertexId, double> locals() const {
    std::map<VertexId, double> out;
    for (const auto& [u, c] : counts_.locals()) out.emplace(u, static_cast<double>(c));
    return out;
  }

 private:
  EdgeSample graph_;
  CounterBank<std::int64_t> counts_;
};

/// Ground-truth combinatorics of the triangles of a graph.
struct TriangleStats {
  std::int64_t total = 0;
  /// Unordered triangle pairs sharing exactly one edge / no edge (simple graphs).
  std::int64_t r = 0;
  std::int64_t w = 0;
  /// Maximum number of triangles containing one edge.
  std::int64_t h = 0;
  /// Multigraph pair classes: sharing one edge, two edges, none.
  std::int64_t r1 = 0;
  std::int64_t r2 = 0;
  std::int64_t q = 0;
  std::optional<std::int64_t> z;
  std::map<VertexId, std::int64_t> locals;
};

inline std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

/// Enumerates all triangles of `graph` and classifies unordered pairs of
/// distinct triangles by the number of edges they share. Parallel edges are
/// distinct edges, so on multigraphs two triangles over the same three
/// vertices may share two edges.
inline TriangleStats pair_stats(const EdgeSample& graph) {
  TriangleStats st;
  std::int64_t sum_pairs_on_edges = 0;  // = r1 + 2 * r2
  for (const auto& [a, nbrs] : graph.adjacency()) {
    for (const auto& [b, m_ab] : nbrs) {
      if (b <= a) continue;
      std::int64_t on_edge = 0;  // triangles through one copy of (a, b)
      graph.for_each_shared_neighbor(a, b, [&](const SharedNeighbor& c) {
        const std::int64_t m_ac = c.mult_u;
        const std::int64_t m_bc = c.mult_v;
        on_edge += m_ac * m_bc;
        if (c.vertex > b) {
          const std::int64_t n = m_ab * m_ac * m_bc;
          st.total += n;
          st.locals[a] += n;
          st.locals[b] += n;
          st.locals[c.vertex] += n;
          st.r2 += m_ab * m_bc * choose2(m_ac) + m_ab * m_ac * choose2(m_bc) +
                   m_ac * m_bc * choose2(m_ab);
        }
      });
      st.h = std::max(st.h, on_edge);
      sum_pairs_on_edges += m_ab * choose2(on_edge);
    }
  }
  st.r1 = sum_pairs_on_edges - 2 * st.r2;
  st.q = choose2(st.total) - st.r1 - st.r2;
  st.r = st.r1;
  st.w = st.q;
  return st;
}

/// Number of unordered triangle pairs sharing an edge g such that g is the
/// last-arriving edge of neither triangle and both triangles complete after
/// time M + 1. Evaluated on the first `prefix` events (all by default) of an
/// insertion-only simple-graph stream.
inline std::int64_t z_stat(std::span<const EdgeEvent> stream, std::uint64_t M,
                           std::optional<std::size_t> prefix = std::nullopt) {
  const std::size_t n = std::min(prefix.value_or(stream.size()), stream.size());
  EdgeSample graph(GraphMode::Graph);
  std::unordered_map<Edge, std::uint64_t, EdgeHash> arrival;
  for (std::size_t i = 0; i < n; ++i) {
    if (stream[i].op != Op::Insert) throw std::invalid_argument("z_stat needs an insertion-only stream");
    const Edge e{stream[i].edge.u, stream[i].edge.v, 0};
    graph.insert(e);
    arrival.emplace(e, i + 1);
  }
  auto time_of = [&](VertexId a, VertexId b) { return arrival.at(Edge::make(a, b)); };
  std::int64_t z = 0;
  for (const Edge& g : graph.edges()) {
    const std::uint64_t t_g = arrival.at(g);
    std::int64_t k = 0;
    graph.for_each_shared_neighbor(g.u, g.v, [&](const SharedNeighbor& c) {
      const std::uint64_t t_tri = std::max({t_g, time_of(g.u, c.vertex), time_of(g.v, c.vertex)});
      if (t_tri != t_g && t_tri > M + 1) ++k;
    });
    z += choose2(k);
  }
  return z;
}

}  // namespace triest
