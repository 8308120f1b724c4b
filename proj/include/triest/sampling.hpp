#pragma once

#include <cstdint>
#include <stdexcept>

#include "triest/edge_sample.hpp"
#include "triest/random.hpp"

namespace triest {

/// Reservoir sampling (Vitter's Algorithm R) over an edge stream.
///
/// offer() takes two callbacks: on_evict(victim) runs after a victim has left
/// the sample, on_admit(edge) runs right before the offered edge joins it, so
/// the admitted edge never sees itself in the sample.
class ReservoirSample {
 public:
  ReservoirSample(GraphMode mode, std::size_t capacity) : sample_(mode, capacity) {}

  const EdgeSample& sample() const { return sample_; }
  std::size_t capacity() const { return sample_.capacity(); }
  std::uint64_t time() const { return t_; }

  template <class OnEvict, class OnAdmit>
  bool offer(const Edge& e, Rng& rng, OnEvict&& on_evict, OnAdmit&& on_admit) {
    ++t_;
    if (t_ <= capacity()) {
      on_admit(e);
      sample_.insert(e);
      return true;
    }
    if (!flip_coin(rng, static_cast<double>(capacity()) / static_cast<double>(t_))) return false;
    const Edge victim = sample_.uniform_edge(rng);
    sample_.remove(victim);
    on_evict(victim);
    on_admit(e);
    sample_.insert(e);
    return true;
  }

  bool offer(const Edge& e, Rng& rng) {
    return offer(e, rng, [](const Edge&) {}, [](const Edge&) {});
  }

 private:
  EdgeSample sample_;
  std::uint64_t t_ = 0;
};

/// Random pairing: reservoir sampling extended to deletions. A deletion that
/// hits the sample (d_in) or misses it (d_out) stays uncompensated until a
/// later insertion pairs with it.
class RandomPairingSample {
 public:
  RandomPairingSample(GraphMode mode, std::size_t capacity) : sample_(mode, capacity) {}

  const EdgeSample& sample() const { return sample_; }
  std::size_t capacity() const { return sample_.capacity(); }
  std::uint64_t time() const { return t_; }
  /// Number of live edges in the stream.
  std::uint64_t live() const { return s_; }
  std::uint64_t d_in() const { return d_in_; }
  std::uint64_t d_out() const { return d_out_; }

  /// Handles an insertion. Callbacks as in ReservoirSample::offer.
  template <class OnEvict, class OnAdmit>
  bool offer(const Edge& e, Rng& rng, OnEvict&& on_evict, OnAdmit&& on_admit) {
    ++t_;
    ++s_;
    if (d_in_ + d_out_ == 0) {
      if (!sample_.full()) {
        on_admit(e);
        sample_.insert(e);
        return true;
      }
      // Uniformity of the reservoir step needs the number of live edges, which
      // equals t only on insertion-only streams.
      if (!flip_coin(rng, static_cast<double>(capacity()) / static_cast<double>(s_))) return false;
      const Edge victim = sample_.uniform_edge(rng);
      sample_.remove(victim);
      on_evict(victim);
      on_admit(e);
      sample_.insert(e);
      return true;
    }
    const double heads = static_cast<double>(d_in_) / static_cast<double>(d_in_ + d_out_);
    if (flip_coin(rng, heads)) {
      if (sample_.full()) throw InvariantViolation("random pairing: sample full with d_in > 0");
      on_admit(e);
      sample_.insert(e);
      --d_in_;
      return true;
    }
    --d_out_;
    return false;
  }

  bool offer(const Edge& e, Rng& rng) {
    return offer(e, rng, [](const Edge&) {}, [](const Edge&) {});
  }

  /// Handles a deletion of a live edge. on_remove(edge) runs after the edge has
  /// left the sample. Returns whether the edge was sampled.
  template <class OnRemove>
  bool withdraw(const Edge& e, OnRemove&& on_remove) {
    if (s_ == 0) throw InvariantViolation("random pairing: deletion with no live edges");
    ++t_;
    --s_;
    if (sample_.contains(e)) {
      sample_.remove(e);
      on_remove(e);
      ++d_in_;
      return true;
    }
    ++d_out_;
    return false;
  }

  bool withdraw(const Edge& e) {
    return withdraw(e, [](const Edge&) {});
  }

 private:
  EdgeSample sample_;
  std::uint64_t t_ = 0;
  std::uint64_t s_ = 0;
  std::uint64_t d_in_ = 0;
  std::uint64_t d_out_ = 0;
};

}  // namespace triest
