#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "triest/types.hpp"

namespace triest {

/// Estimates and ground truth at a series of query times.
struct EstimateTrace {
  std::vector<std::uint64_t> times;
  std::vector<double> estimates;
  std::vector<double> truths;

  void push(std::uint64_t t, double estimate, double truth) {
    if (!times.empty() && t <= times.back()) throw std::invalid_argument("trace times must increase");
    times.push_back(t);
    estimates.push_back(estimate);
    truths.push_back(truth);
  }
  std::size_t size() const { return times.size(); }
};

/// Mean absolute percentage error over the points with positive truth.
/// nullopt when no such point exists.
inline std::optional<double> mape(std::span<const double> truths, std::span<const double> estimates) {
  if (truths.size() != estimates.size()) throw std::invalid_argument("mape: length mismatch");
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] <= 0.0) continue;
    sum += std::abs(truths[i] - estimates[i]) / truths[i];
    ++counted;
  }
  if (counted == 0) return std::nullopt;
  return sum / static_cast<double>(counted);
}

inline std::optional<double> mape(const EstimateTrace& trace) { return mape(trace.truths, trace.estimates); }

/// Sample Pearson correlation. nullopt for empty input or a constant vector.
inline std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = xs.size();
  if (n == 0) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace detail {

inline std::set<VertexId> support(const std::map<VertexId, double>& a, const std::map<VertexId, double>& b) {
  std::set<VertexId> out;
  for (const auto& [u, x] : a)
    if (x != 0.0) out.insert(u);
  for (const auto& [u, x] : b)
    if (x != 0.0) out.insert(u);
  return out;
}

inline double value_or_zero(const std::map<VertexId, double>& m, VertexId u) {
  auto it = m.find(u);
  return it == m.end() ? 0.0 : it->second;
}

}  // namespace detail

/// Pearson correlation of local counts over the vertices where either map is
/// non-zero (missing entries count as 0).
inline std::optional<double> local_pearson(const std::map<VertexId, double>& truth,
                                           const std::map<VertexId, double>& estimate) {
  std::vector<double> xs, ys;
  for (VertexId u : detail::support(truth, estimate)) {
    xs.push_back(detail::value_or_zero(truth, u));
    ys.push_back(detail::value_or_zero(estimate, u));
  }
  return pearson(xs, ys);
}

/// Mean of |truth_u - est_u| / (truth_u + 1) over the union support.
inline std::optional<double> eps_error(const std::map<VertexId, double>& truth,
                                       const std::map<VertexId, double>& estimate) {
  const auto verts = detail::support(truth, estimate);
  if (verts.empty()) return std::nullopt;
  double sum = 0.0;
  for (VertexId u : verts) {
    const double t = detail::value_or_zero(truth, u);
    sum += std::abs(t - detail::value_or_zero(estimate, u)) / (t + 1.0);
  }
  return sum / static_cast<double>(verts.size());
}

}  // namespace triest
