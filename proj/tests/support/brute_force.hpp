#pragma once

// Slow reference implementations used to compute expected values. They work
// on plain edge lists and share no code with the library's counting paths.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "triest/types.hpp"

namespace triest::brute {

struct BruteTriangle {
  std::array<VertexId, 3> vertices;   // sorted
  std::array<std::size_t, 3> edges;   // indices into the edge list
};

/// All triangles of a (multi)graph given as a list of edge copies. Each
/// combination of one copy per side is a distinct triangle.
inline std::vector<BruteTriangle> enumerate_triangles(const std::vector<Edge>& edges) {
  std::map<std::pair<VertexId, VertexId>, std::vector<std::size_t>> copies;
  std::set<VertexId> vertex_set;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    VertexId a = std::min(edges[i].u, edges[i].v), b = std::max(edges[i].u, edges[i].v);
    copies[{a, b}].push_back(i);
    vertex_set.insert(a);
    vertex_set.insert(b);
  }
  const std::vector<VertexId> vs(vertex_set.begin(), vertex_set.end());
  std::vector<BruteTriangle> out;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      auto ab = copies.find({vs[i], vs[j]});
      if (ab == copies.end()) continue;
      for (std::size_t k = j + 1; k < vs.size(); ++k) {
        auto ac = copies.find({vs[i], vs[k]});
        auto bc = copies.find({vs[j], vs[k]});
        if (ac == copies.end() || bc == copies.end()) continue;
        for (std::size_t x : ab->second)
          for (std::size_t y : ac->second)
            for (std::size_t z : bc->second) out.push_back({{vs[i], vs[j], vs[k]}, {x, y, z}});
      }
    }
  return out;
}

struct BruteStats {
  std::int64_t total = 0;
  std::map<VertexId, std::int64_t> locals;
  std::int64_t share1 = 0, share2 = 0, share0 = 0;
  std::int64_t h = 0;
};

/// Classifies every unordered pair of triangles by counting shared edge copies.
inline BruteStats brute_stats(const std::vector<Edge>& edges) {
  const auto tris = enumerate_triangles(edges);
  BruteStats st;
  st.total = static_cast<std::int64_t>(tris.size());
  std::map<std::size_t, std::int64_t> per_edge;
  for (const auto& t : tris) {
    for (VertexId v : t.vertices) ++st.locals[v];
    for (std::size_t e : t.edges) ++per_edge[e];
  }
  for (const auto& [e, c] : per_edge) st.h = std::max(st.h, c);
  for (std::size_t i = 0; i < tris.size(); ++i)
    for (std::size_t j = i + 1; j < tris.size(); ++j) {
      int shared = 0;
      for (std::size_t a : tris[i].edges)
        for (std::size_t b : tris[j].edges) shared += a == b;
      (shared == 0 ? st.share0 : shared == 1 ? st.share1 : st.share2)++;
    }
  return st;
}

/// Pair count entering the improved estimator's variance bound, by direct
/// scan over all triangle pairs. `edges` is in arrival order (time = index+1).
inline std::int64_t brute_z(const std::vector<Edge>& edges, std::uint64_t M) {
  const auto tris = enumerate_triangles(edges);
  auto last = [](const BruteTriangle& t) { return *std::max_element(t.edges.begin(), t.edges.end()); };
  std::int64_t z = 0;
  for (std::size_t i = 0; i < tris.size(); ++i)
    for (std::size_t j = i + 1; j < tris.size(); ++j) {
      for (std::size_t a : tris[i].edges)
        for (std::size_t b : tris[j].edges) {
          if (a != b) continue;
          const std::size_t li = last(tris[i]), lj = last(tris[j]);
          if (a != li && a != lj && std::min(li, lj) + 1 > M + 1) ++z;
        }
    }
  return z;
}

/// Live edges after replaying a fully-dynamic stream (graph or multigraph keys).
inline std::vector<Edge> replay(const std::vector<EdgeEvent>& events, std::size_t prefix) {
  std::vector<Edge> live;
  for (std::size_t i = 0; i < prefix; ++i) {
    if (events[i].op == Op::Insert) {
      live.push_back(events[i].edge);
    } else {
      live.erase(std::find(live.begin(), live.end(), events[i].edge));
    }
  }
  return live;
}

struct Moments {
  long double mean = 0;
  long double variance = 0;
};

/// Moments of xi * (triangles inside a uniform size-M subset of the edge
/// copies), by listing every subset. Only for tiny inputs.
inline Moments subset_moments(const std::vector<Edge>& edges, std::size_t M, long double scale) {
  const auto tris = enumerate_triangles(edges);
  const std::size_t t = edges.size();
  std::vector<bool> pick(t, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(M), true);
  long double s1 = 0, s2 = 0, n = 0;
  do {
    long double c = 0;
    for (const auto& tr : tris) c += pick[tr.edges[0]] && pick[tr.edges[1]] && pick[tr.edges[2]];
    c *= scale;
    s1 += c;
    s2 += c * c;
    n += 1;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  const long double mean = s1 / n;
  return {mean, s2 / n - mean * mean};
}

/// Moments of p^-3 * (triangles among independently kept edges), summing over
/// all 2^t keep patterns.
inline Moments bernoulli_moments(const std::vector<Edge>& edges, long double p) {
  const auto tris = enumerate_triangles(edges);
  const std::size_t t = edges.size();
  long double s1 = 0, s2 = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << t); ++mask) {
    long double w = 1;
    for (std::size_t i = 0; i < t; ++i) w *= (mask >> i & 1) ? p : 1 - p;
    long double c = 0;
    for (const auto& tr : tris)
      c += (mask >> tr.edges[0] & 1) && (mask >> tr.edges[1] & 1) && (mask >> tr.edges[2] & 1);
    c /= p * p * p;
    s1 += w * c;
    s2 += w * c * c;
  }
  return {s1, s2 - s1 * s1};
}

}  // namespace triest::brute
