#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "triest/closed_forms.hpp"
#include "triest/counters.hpp"
#include "triest/edge_sample.hpp"
#include "triest/random.hpp"
#include "triest/sampling.hpp"
#include "triest/types.hpp"

namespace triest {

/// Raised when an estimator receives an event kind it cannot handle, e.g. a
/// deletion fed to an insertion-only algorithm.
class UnsupportedEvent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Smallest memory budget accepted by the fixed-memory estimators.
inline constexpr std::size_t kMinMemory = 6;

/// Adds sign * weight * y_c to the global counter and to the local counters of
/// u, v and c, for every c in the shared neighborhood of (u, v) in the sample,
/// with y_c = mult(c,u) * mult(c,v) (always 1 on simple graphs). Must be called
/// while `e` itself is not in the sample.
template <class T>
void update_counters(const EdgeSample& sample, CounterBank<T>& counters, int sign, const Edge& e,
                     T weight) {
  T endpoint_delta{};
  sample.for_each_shared_neighbor(e.u, e.v, [&](const SharedNeighbor& c) {
    const T y = static_cast<T>(sign) * weight * static_cast<T>(c.mult_u * c.mult_v);
    counters.add_local(c.vertex, y);
    endpoint_delta += y;
  });
  if (endpoint_delta == T{}) return;
  counters.add_global(endpoint_delta);
  counters.add_local(e.u, endpoint_delta);
  counters.add_local(e.v, endpoint_delta);
}

namespace detail {

inline std::size_t checked_memory(std::size_t memory) {
  if (memory < kMinMemory) {
    throw std::invalid_argument("memory budget must be at least " + std::to_string(kMinMemory) +
                                ", got " + std::to_string(memory));
  }
  return memory;
}

inline void require_insertion(const EdgeEvent& ev, const char* algo) {
  if (ev.op != Op::Insert) {
    throw UnsupportedEvent(std::string(algo) + " handles insertion-only streams");
  }
}

template <class T>
std::map<VertexId, double> scaled_locals(const CounterBank<T>& counters, double scale) {
  std::map<VertexId, double> out;
  for (const auto& [u, c] : counters.locals()) out.emplace(u, scale * static_cast<double>(c));
  return out;
}

}  // namespace detail

/// Reservoir-sampling triangle estimator for insertion-only streams. The
/// counters always equal the (local) triangle counts of the sampled graph.
class TriestBase {
 public:
  using counter_type = std::int64_t;

  TriestBase(std::size_t memory, std::uint64_t seed, GraphMode mode = GraphMode::Graph)
      : reservoir_(mode, detail::checked_memory(memory)), rng_(seed) {}

  void process(const EdgeEvent& ev) {
    detail::require_insertion(ev, "triest-base");
    reservoir_.offer(
        ev.edge, rng_,
        [this](const Edge& victim) { update_counters<counter_type>(sample(), counters_, -1, victim, 1); },
        [this](const Edge& e) { update_counters<counter_type>(sample(), counters_, +1, e, 1); });
  }

  /// xi(3, t) * tau; exact while t <= M.
  double global_estimate() const { return scale() * static_cast<double>(counters_.global()); }
  double local_estimate(VertexId u) const { return scale() * static_cast<double>(counters_.local(u)); }
  std::map<VertexId, double> locals() const { return detail::scaled_locals(counters_, scale()); }

  std::uint64_t time() const { return reservoir_.time(); }
  std::size_t memory() const { return reservoir_.capacity(); }
  const EdgeSample& sample() const { return reservoir_.sample(); }
  const CounterBank<counter_type>& counters() const { return counters_; }

 private:
  double scale() const { return time() <= memory() ? 1.0 : xi(3, time(), memory()); }

  ReservoirSample reservoir_;
  CounterBank<counter_type> counters_;
  Rng rng_;
};

/// Reservoir-sampling estimator that counts every closed triangle, weighted by
/// eta(t), before deciding whether to keep the edge, and never decrements.
class TriestImpr {
 public:
  using counter_type = double;

  TriestImpr(std::size_t memory, std::uint64_t seed, GraphMode mode = GraphMode::Graph)
      : reservoir_(mode, detail::checked_memory(memory)), rng_(seed) {}

  void process(const EdgeEvent& ev) {
    detail::require_insertion(ev, "triest-impr");
    const double weight = eta(time() + 1, memory());
    update_counters<counter_type>(sample(), counters_, +1, ev.edge, weight);
    reservoir_.offer(ev.edge, rng_);
  }

  double global_estimate() const { return counters_.global(); }
  double local_estimate(VertexId u) const { return counters_.local(u); }
  std::map<VertexId, double> locals() const { return detail::scaled_locals(counters_, 1.0); }

  std::uint64_t time() const { return reservoir_.time(); }
  std::size_t memory() const { return reservoir_.capacity(); }
  const EdgeSample& sample() const { return reservoir_.sample(); }
  const CounterBank<counter_type>& counters() const { return counters_; }

 private:
  ReservoirSample reservoir_;
  CounterBank<counter_type> counters_;
  Rng rng_;
};

/// Memoized kappa(s, d_in, d_out, M). Recomputes only when (s, d_in + d_out)
/// changes; kappa is exactly 0 or 1 while there are no pending deletions.
class KappaTracker {
 public:
  double operator()(std::uint64_t s, std::uint64_t d_in, std::uint64_t d_out, std::uint64_t M) const {
    const std::uint64_t d = d_in + d_out;
    if (d == 0) return std::min<std::uint64_t>(s, M) >= 3 ? 1.0 : 0.0;
    if (!valid_ || s != s_ || d != d_ || M != m_) {
      value_ = kappa(s, d_in, d_out, M);
      s_ = s;
      d_ = d;
      m_ = M;
      valid_ = true;
    }
    return value_;
  }

 private:
  mutable bool valid_ = false;
  mutable std::uint64_t s_ = 0, d_ = 0, m_ = 0;
  mutable double value_ = 0.0;
};

/// Random-pairing triangle estimator for fully-dynamic streams.
class TriestFd {
 public:
  using counter_type = std::int64_t;

  TriestFd(std::size_t memory, std::uint64_t seed, GraphMode mode = GraphMode::Graph)
      : pairing_(mode, detail::checked_memory(memory)), rng_(seed) {}

  void process(const EdgeEvent& ev) {
    if (ev.op == Op::Insert) {
      pairing_.offer(
          ev.edge, rng_,
          [this](const Edge& victim) { update_counters<counter_type>(sample(), counters_, -1, victim, 1); },
          [this](const Edge& e) { update_counters<counter_type>(sample(), counters_, +1, e, 1); });
    } else {
      pairing_.withdraw(ev.edge, [this](const Edge& e) {
        update_counters<counter_type>(sample(), counters_, -1, e, 1);
      });
    }
  }

  /// 0 when fewer than three edges are sampled, else tau / kappa * psi(3, |S|, s).
  double global_estimate() const { return scale() * static_cast<double>(counters_.global()); }
  double local_estimate(VertexId u) const { return scale() * static_cast<double>(counters_.local(u)); }
  std::map<VertexId, double> locals() const {
    const double k = scale();
    return k == 0.0 ? std::map<VertexId, double>{} : detail::scaled_locals(counters_, k);
  }

  double kappa_value() const {
    return kappa_(pairing_.live(), pairing_.d_in(), pairing_.d_out(), memory());
  }

  std::uint64_t time() const { return pairing_.time(); }
  std::uint64_t live_edges() const { return pairing_.live(); }
  std::uint64_t d_in() const { return pairing_.d_in(); }
  std::uint64_t d_out() const { return pairing_.d_out(); }
  std::size_t memory() const { return pairing_.capacity(); }
  const EdgeSample& sample() const { return pairing_.sample(); }
  const CounterBank<counter_type>& counters() const { return counters_; }

 private:
  double scale() const {
    const std::size_t m = sample().size();
    if (m < 3) return 0.0;
    const double k = kappa_value();
    if (k == 0.0) return 0.0;
    return psi(3, static_cast<double>(m), static_cast<double>(pairing_.live())) / k;
  }

  RandomPairingSample pairing_;
  CounterBank<counter_type> counters_;
  KappaTracker kappa_;
  Rng rng_;
};

}  // namespace triest
