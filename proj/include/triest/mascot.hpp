#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

#include "triest/counters.hpp"
#include "triest/edge_sample.hpp"
#include "triest/estimators.hpp"
#include "triest/random.hpp"

namespace triest {

enum class MascotVariant : std::uint8_t {
  /// Counts triangles of the sample; estimate p^-3 * tau.
  Conditional,
  /// Counts every closed triangle with weight p^-2 before the coin flip.
  Improved,
};

/// Fixed-probability independent edge sampling. Memory is unbounded: the
/// sample grows to about p times the stream length.
class Mascot {
 public:
  Mascot(MascotVariant variant, double p, std::uint64_t seed, GraphMode mode = GraphMode::Graph)
      : variant_(variant), p_(p), sample_(mode), rng_(seed) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("mascot: need 0 < p <= 1");
  }

  void process(const EdgeEvent& ev) {
    detail::require_insertion(ev, "mascot");
    ++t_;
    if (variant_ == MascotVariant::Improved) {
      update_counters(sample_, counters_, +1, ev.edge, 1.0 / (p_ * p_));
      if (flip_coin(rng_, p_)) sample_.insert(ev.edge);
    } else if (flip_coin(rng_, p_)) {
      update_counters(sample_, counters_, +1, ev.edge, 1.0);
      sample_.insert(ev.edge);
    }
  }

  double global_estimate() const { return scale() * counters_.global(); }
  double local_estimate(VertexId u) const { return scale() * counters_.local(u); }
  std::map<VertexId, double> locals() const { return detail::scaled_locals(counters_, scale()); }

  MascotVariant variant() const { return variant_; }
  double probability() const { return p_; }
  std::uint64_t time() const { return t_; }
  const EdgeSample& sample() const { return sample_; }
  const CounterBank<double>& counters() const { return counters_; }

 private:
  double scale() const {
    return variant_ == MascotVariant::Conditional ? 1.0 / (p_ * p_ * p_) : 1.0;
  }

  MascotVariant variant_;
  double p_;
  EdgeSample sample_;
  CounterBank<double> counters_;
  Rng rng_;
  std::uint64_t t_ = 0;
};

}  // namespace triest
