#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "triest/random.hpp"
#include "triest/types.hpp"

namespace triest {

/// A malformed stream line. line() is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A stream that breaks the "every operation has an effect" contract.
class StreamViolation : public std::runtime_error {
 public:
  StreamViolation(std::size_t index, const std::string& what)
      : std::runtime_error("event " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

enum class ValidityPolicy : std::uint8_t { Strict, SkipInvalid };

struct StreamSpec {
  GraphMode mode = GraphMode::Graph;
  std::vector<EdgeEvent> events;

  bool insertion_only() const {
    return std::ranges::all_of(events, [](const EdgeEvent& e) { return e.op == Op::Insert; });
  }
  friend bool operator==(const StreamSpec&, const StreamSpec&) = default;
};

/// Maps arbitrary vertex names to dense ids in order of first appearance.
class VertexDictionary {
 public:
  VertexId id(std::string_view name) {
    auto [it, fresh] = ids_.try_emplace(std::string(name), names_.size());
    if (fresh) names_.emplace_back(name);
    return it->second;
  }
  const std::string& name(VertexId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, VertexId> ids_;
  std::vector<std::string> names_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class Int>
Int parse_int(std::string_view tok, std::size_t line, const char* what) {
  Int value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses "SIGN U V [LABEL] [TS]"; LABEL is present iff mode is Multigraph.
/// With a dictionary, U and V may be arbitrary names.
inline EdgeEvent parse_event(std::string_view line, GraphMode mode, std::size_t line_no = 0,
                             VertexDictionary* names = nullptr) {
  const auto tok = detail::split_ws(line);
  const std::size_t required = mode == GraphMode::Multigraph ? 4 : 3;
  if (tok.size() < required || tok.size() > required + 1) {
    throw ParseError(line_no, "expected " + std::to_string(required) + " or " +
                                  std::to_string(required + 1) + " fields, got " +
                                  std::to_string(tok.size()));
  }
  EdgeEvent ev;
  if (tok[0] == "+") {
    ev.op = Op::Insert;
  } else if (tok[0] == "-") {
    ev.op = Op::Delete;
  } else {
    throw ParseError(line_no, "bad sign '" + std::string(tok[0]) + "'");
  }
  auto vertex = [&](std::string_view t) {
    return names ? names->id(t) : detail::parse_int<VertexId>(t, line_no, "vertex id");
  };
  const VertexId a = vertex(tok[1]);
  const VertexId b = vertex(tok[2]);
  if (a == b) throw ParseError(line_no, "self-loop on vertex " + std::string(tok[1]));
  Label label = 0;
  if (mode == GraphMode::Multigraph) {
    label = detail::parse_int<Label>(tok[3], line_no, "label");
    ev.has_label = true;
  }
  ev.edge = Edge::make(a, b, label);
  if (tok.size() == required + 1) ev.ts = detail::parse_int<Timestamp>(tok[required], line_no, "timestamp");
  return ev;
}

inline std::string format_event(const EdgeEvent& ev) {
  std::string out = ev.op == Op::Insert ? "+ " : "- ";
  out += std::to_string(ev.edge.u);
  out += ' ';
  out += std::to_string(ev.edge.v);
  if (ev.has_label) {
    out += ' ';
    out += std::to_string(ev.edge.label);
  }
  if (ev.ts) {
    out += ' ';
    out += std::to_string(*ev.ts);
  }
  return out;
}

/// Reads one event per line; blank lines and '#' comments are skipped.
inline StreamSpec read_stream(std::istream& in, GraphMode mode, VertexDictionary* names = nullptr) {
  StreamSpec spec{mode, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    spec.events.push_back(parse_event(line, mode, line_no, names));
  }
  return spec;
}

struct ValidationReport {
  std::optional<std::size_t> first_violation;
  std::string reason;
  std::size_t dropped = 0;
  /// Input minus dropped events (SkipInvalid), or the input itself when valid.
  StreamSpec filtered;

  bool ok() const { return !first_violation.has_value(); }
};

/// Replays the stream against the set of live edges (keyed by pair, plus label
/// on multigraphs). Strict: stops at the first ineffective operation.
/// SkipInvalid: drops every ineffective operation and keeps going.
inline ValidationReport validate_stream(const StreamSpec& spec,
                                        ValidityPolicy policy = ValidityPolicy::Strict) {
  ValidationReport report;
  report.filtered.mode = spec.mode;
  std::unordered_set<Edge, EdgeHash> live;
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    const EdgeEvent& ev = spec.events[i];
    const Edge key = spec.mode == GraphMode::Graph ? Edge{ev.edge.u, ev.edge.v, 0} : ev.edge;
    const bool effective = ev.op == Op::Insert ? live.insert(key).second : live.erase(key) == 1;
    if (effective) {
      report.filtered.events.push_back(ev);
      continue;
    }
    if (!report.first_violation) {
      report.first_violation = i;
      report.reason = ev.op == Op::Insert ? "insertion of an edge already present"
                                          : "deletion of an absent edge";
    }
    if (policy == ValidityPolicy::Strict) {
      report.filtered.events.clear();
      return report;
    }
    ++report.dropped;
  }
  if (policy == ValidityPolicy::SkipInvalid) {
    report.first_violation.reset();
    report.reason.clear();
  }
  return report;
}

/// Throws StreamViolation unless the stream is valid under the strict policy.
inline void require_valid(const StreamSpec& spec) {
  auto report = validate_stream(spec);
  if (!report.ok()) throw StreamViolation(*report.first_violation, report.reason);
}

// --- generators ---------------------------------------------------------------

inline StreamSpec clique_stream(std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("clique needs n >= 2");
  StreamSpec spec;
  spec.events.reserve(n * (n - 1) / 2);
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a + 1; b < n; ++b) spec.events.push_back(EdgeEvent::insert(a, b));
  return spec;
}

/// Calls fn(a, b) with a > b for each edge of G(n, p), in lexicographic order of
/// (a, b). Uses geometric skips, so the cost is O(n + edges).
template <class Fn>
void for_each_erdos_renyi_edge(std::uint64_t n, double p, std::uint64_t seed, Fn&& fn) {
  if (n < 2) throw std::invalid_argument("erdos_renyi needs n >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("erdos_renyi needs 0 <= p <= 1");
  if (p == 0.0) return;
  Rng rng(seed);
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    std::int64_t skip = 0;
    if (p < 1.0) skip = static_cast<std::int64_t>(std::floor(std::log1p(-uniform01(rng)) / log_q));
    w += 1 + skip;
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) fn(static_cast<VertexId>(v), static_cast<VertexId>(w));
  }
}

inline StreamSpec erdos_renyi_stream(std::uint64_t n, double p, std::uint64_t seed) {
  StreamSpec spec;
  for_each_erdos_renyi_edge(n, p, seed, [&](VertexId a, VertexId b) {
    spec.events.push_back(EdgeEvent::insert(a, b));
  });
  return spec;
}

// --- orderings ----------------------------------------------------------------

enum class Order : std::uint8_t { Natural, Uar, Bfs };

namespace detail {

inline void require_insertion_only(const StreamSpec& spec, const char* what) {
  if (!spec.insertion_only()) throw std::invalid_argument(std::string(what) + " needs an insertion-only stream");
}

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[uniform_index(rng, i)]);
}

inline std::vector<std::size_t> bfs_order(const StreamSpec& spec, Rng& rng) {
  std::unordered_map<VertexId, std::size_t> dense;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj;  // (neighbor, event)
  auto index_of = [&](VertexId v) {
    auto [it, fresh] = dense.try_emplace(v, adj.size());
    if (fresh) adj.emplace_back();
    return it->second;
  };
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    const std::size_t a = index_of(spec.events[i].edge.u);
    const std::size_t b = index_of(spec.events[i].edge.v);
    adj[a].emplace_back(b, i);
    adj[b].emplace_back(a, i);
  }
  std::vector<bool> visited(adj.size(), false);
  std::vector<bool> emitted(spec.events.size(), false);
  std::vector<std::size_t> unvisited(adj.size());
  for (std::size_t i = 0; i < unvisited.size(); ++i) unvisited[i] = i;
  std::vector<std::size_t> order;
  order.reserve(spec.events.size());
  std::deque<std::size_t> queue;
  while (!unvisited.empty()) {
    const std::size_t pick = uniform_index(rng, unvisited.size());
    const std::size_t start = unvisited[pick];
    unvisited[pick] = unvisited.back();
    unvisited.pop_back();
    if (visited[start]) continue;
    visited[start] = true;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      auto nbrs = adj[x];
      shuffle(nbrs, rng);
      for (const auto& [y, ev] : nbrs) {
        if (!emitted[ev]) {
          emitted[ev] = true;
          order.push_back(ev);
        }
        if (!visited[y]) {
          visited[y] = true;
          queue.push_back(y);
        }
      }
    }
  }
  return order;
}

}  // namespace detail

/// Natural keeps the input order; Uar is a seeded uniform shuffle; Bfs emits
/// edges in the visit order of repeated BFS runs from uniformly random
/// unvisited vertices, exploring neighbors in random order.
inline StreamSpec reorder(const StreamSpec& spec, Order order, std::uint64_t seed = 0) {
  detail::require_insertion_only(spec, "reorder");
  if (order == Order::Natural) return spec;
  Rng rng(seed);
  StreamSpec out{spec.mode, {}};
  out.events.reserve(spec.events.size());
  if (order == Order::Uar) {
    out.events = spec.events;
    detail::shuffle(out.events, rng);
    return out;
  }
  for (std::size_t i : detail::bfs_order(spec, rng)) out.events.push_back(spec.events[i]);
  return out;
}

// --- deletion models ----------------------------------------------------------

struct Window {
  enum class Kind : std::uint8_t { ByCount, ByTime };
  Kind kind = Kind::ByCount;
  std::int64_t width = 0;

  static Window by_count(std::int64_t w) { return {Kind::ByCount, w}; }
  static Window by_time(std::int64_t w) { return {Kind::ByTime, w}; }
};

/// Turns an insertion-only stream into a fully-dynamic one where the live
/// edges are exactly those of the window. Expired edges are deleted right
/// before the insertion that pushes them out, in insertion order.
inline StreamSpec apply_sliding_window(const StreamSpec& spec, Window window) {
  detail::require_insertion_only(spec, "sliding window");
  if (window.width <= 0) throw std::invalid_argument("window width must be positive");
  const bool by_time = window.kind == Window::Kind::ByTime;
  if (by_time && !std::ranges::all_of(spec.events, [](const EdgeEvent& e) { return e.ts.has_value(); })) {
    throw std::invalid_argument("time window needs a timestamp on every event");
  }
  StreamSpec out{spec.mode, {}};
  out.events.reserve(spec.events.size() * 2);
  // (key, insertion position): key is the position or the timestamp
  using Entry = std::pair<std::int64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> live;
  std::vector<std::size_t> expired;
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    const EdgeEvent& ev = spec.events[i];
    const std::int64_t now = by_time ? *ev.ts : static_cast<std::int64_t>(i + 1);
    expired.clear();
    while (!live.empty() && live.top().first <= now - window.width) {
      expired.push_back(live.top().second);
      live.pop();
    }
    std::ranges::sort(expired);
    for (std::size_t j : expired) {
      EdgeEvent del = spec.events[j];
      del.op = Op::Delete;
      del.ts = ev.ts;
      out.events.push_back(del);
    }
    out.events.push_back(ev);
    live.emplace(now, i);
  }
  return out;
}

/// After each insertion, with probability q, every live edge is deleted
/// independently with probability d (deletions in insertion order).
inline StreamSpec apply_mass_deletion(const StreamSpec& spec, double q, double d, std::uint64_t seed) {
  detail::require_insertion_only(spec, "mass deletion");
  if (!(q >= 0.0 && q <= 1.0 && d >= 0.0 && d <= 1.0)) {
    throw std::invalid_argument("mass deletion needs q, d in [0, 1]");
  }
  Rng rng(seed);
  StreamSpec out{spec.mode, {}};
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    out.events.push_back(spec.events[i]);
    live.push_back(i);
    if (!flip_coin(rng, q)) continue;
    std::size_t kept = 0;
    for (std::size_t j : live) {
      if (flip_coin(rng, d)) {
        EdgeEvent del = spec.events[j];
        del.op = Op::Delete;
        del.ts = spec.events[i].ts;
        out.events.push_back(del);
      } else {
        live[kept++] = j;
      }
    }
    live.resize(kept);
  }
  return out;
}

}  // namespace triest
