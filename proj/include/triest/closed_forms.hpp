#pragma once

// Inclusion-probability factors, estimator weights, variance formulas and
// memory thresholds for the reservoir / random-pairing triangle estimators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace triest {

/// Reciprocal of the a-th order inclusion probability of a size-M reservoir
/// after b elements: 1 if b <= M, else prod_{i<a} (b-i)/(M-i).
inline double xi(std::uint64_t a, std::uint64_t b, std::uint64_t M) {
  if (a == 0 || a > std::min(M, b)) {
    throw std::domain_error("xi: need 1 <= a <= min(M, b), got a=" + std::to_string(a) +
                            " b=" + std::to_string(b) + " M=" + std::to_string(M));
  }
  if (b <= M) return 1.0;
  double out = 1.0;
  for (std::uint64_t i = 0; i < a; ++i) {
    out *= static_cast<double>(b - i) / static_cast<double>(M - i);
  }
  return out;
}

/// Weight of a triangle closed at time t by the improved insertion estimator.
inline double eta(std::uint64_t t, std::uint64_t M) {
  if (t == 0 || M < 2) throw std::domain_error("eta: need t >= 1 and M >= 2");
  const double td = static_cast<double>(t);
  const double md = static_cast<double>(M);
  return std::max(1.0, (td - 1.0) * (td - 2.0) / (md * (md - 1.0)));
}

/// prod_{i<a} (c-i)/(b-i): the random-pairing analogue of xi for a sample of
/// b edges out of c live ones. b may be fractional where a bound needs it.
inline double psi(std::uint64_t a, double b, double c) {
  if (!(static_cast<double>(a) <= b && b <= c)) {
    throw std::domain_error("psi: need a <= b <= c, got a=" + std::to_string(a) +
                            " b=" + std::to_string(b) + " c=" + std::to_string(c));
  }
  double out = 1.0;
  for (std::uint64_t i = 0; i < a; ++i) {
    const double id = static_cast<double>(i);
    out *= (c - id) / (b - id);
  }
  return out;
}

namespace detail {

inline long double exact_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0L;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return static_cast<long double>(c);
}

}  // namespace detail

/// C(n, k) as a real number; C(n, k) = 0 for k > n and C(0, 0) = 1.
inline long double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0L;
  if (n <= 62) return detail::exact_binomial(n, k);
  const long double nn = static_cast<long double>(n);
  const long double kk = static_cast<long double>(k);
  return std::exp(std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1));
}

/// Hypergeometric pmf: probability of j "good" items when drawing `draws` items
/// without replacement from `good + bad`. Evaluated as a product of ratios in
/// log space, O(draws).
inline double hypergeometric_pmf(std::uint64_t j, std::uint64_t good, std::uint64_t bad,
                                 std::uint64_t draws) {
  const std::uint64_t n = good + bad;
  if (j > good || j > draws || draws - j > bad || draws > n) return 0.0;
  if (n <= 62) {
    return static_cast<double>(detail::exact_binomial(good, j) *
                               detail::exact_binomial(bad, draws - j) /
                               detail::exact_binomial(n, draws));
  }
  // C(bad, draws-j) / C(n, draws) = [draws!/(draws-j)!] * prod_{i<draws-j} (bad-i)/(n-i)
  //                                 / prod_{draws-j<=i<draws} (n-i)
  long double log_p = std::log(binomial(good, j));
  for (std::uint64_t i = 0; i < j; ++i) {
    log_p += std::log(static_cast<long double>(draws - i)) -
             std::log(static_cast<long double>(n - (draws - j) - i));
  }
  const long double goodl = static_cast<long double>(good);
  for (std::uint64_t i = 0; i < draws - j; ++i) {
    log_p += std::log1p(-goodl / static_cast<long double>(n - i));
  }
  return static_cast<double>(std::exp(log_p));
}

/// Probability that the random-pairing sample holds at least three edges,
/// given s live edges, d_in + d_out uncompensated deletions and capacity M.
inline double kappa(std::uint64_t s, std::uint64_t d_in, std::uint64_t d_out, std::uint64_t M) {
  const std::uint64_t d = d_in + d_out;
  const std::uint64_t omega = std::min<std::uint64_t>(M, s + d);
  double below = 0.0;
  for (std::uint64_t j = 0; j <= 2; ++j) below += hypergeometric_pmf(j, s, d, omega);
  return std::clamp(1.0 - below, 0.0, 1.0);
}

struct VarianceBreakdown {
  double delta_term = 0.0;
  double r_term = 0.0;   // pairs sharing one edge (r, or r1 for multigraphs)
  double r2_term = 0.0;  // pairs sharing two edges (multigraphs only)
  double w_term = 0.0;   // pairs sharing no edge (w, or q for multigraphs)
  double total = 0.0;
};

namespace detail {

struct BaseFactors {
  double f, g, h, j;
};

inline BaseFactors base_factors(std::uint64_t t, std::uint64_t M) {
  if (M < 6) throw std::domain_error("variance formulas need M >= 6");
  const double x = xi(3, t, M);
  const double td = static_cast<double>(t);
  const double md = static_cast<double>(M);
  return {
      x - 1.0,
      x * (md - 3) * (md - 4) / ((td - 3) * (td - 4)) - 1.0,
      x * (md - 3) * (md - 4) * (md - 5) / ((td - 3) * (td - 4) * (td - 5)) - 1.0,
      x * (md - 3) / (td - 3) - 1.0,
  };
}

}  // namespace detail

/// Exact variance of the reservoir estimator at time t. r and w count unordered
/// pairs of triangles, so each pair contributes its covariance twice.
inline VarianceBreakdown base_variance(double total, double r, double w, std::uint64_t t,
                                       std::uint64_t M) {
  if (t <= M) return {};
  const auto k = detail::base_factors(t, M);
  VarianceBreakdown out;
  out.delta_term = total * k.f;
  out.r_term = 2.0 * r * k.g;
  out.w_term = 2.0 * w * k.h;
  out.total = out.delta_term + out.r_term + out.w_term;
  return out;
}

/// Exact variance of the reservoir estimator on a multigraph stream, where two
/// triangles may also share two edges.
inline VarianceBreakdown multi_variance(double total, double r1, double r2, double q,
                                        std::uint64_t t, std::uint64_t M) {
  if (t <= M) return {};
  const auto k = detail::base_factors(t, M);
  VarianceBreakdown out;
  out.delta_term = total * k.f;
  out.r_term = 2.0 * r1 * k.g;
  out.r2_term = 2.0 * r2 * k.j;
  out.w_term = 2.0 * q * k.h;
  out.total = out.delta_term + out.r_term + out.r2_term + out.w_term;
  return out;
}

/// Upper bound on the variance of the improved insertion estimator.
inline double impr_variance_bound(double total, double z, std::uint64_t t, std::uint64_t M) {
  if (t <= M) throw std::domain_error("impr_variance_bound: need t > M");
  const double td = static_cast<double>(t);
  const double md = static_cast<double>(M);
  return total * (eta(t, M) - 1.0) + 2.0 * z * (td - 1.0 - md) / md;
}

/// Smallest M accepted by fd_variance_bound for the given s and slack.
inline double fd_min_memory(std::uint64_t s, double alpha, double alpha_prime) {
  return 7.0 * std::log(static_cast<double>(s)) / (2.0 * std::sqrt(alpha_prime - alpha));
}

/// Upper bound on the variance of the fully-dynamic estimator.
inline double fd_variance_bound(double total, double r, std::uint64_t s, std::uint64_t M,
                                double alpha, double alpha_prime, double kappa_val) {
  if (!(0.0 <= alpha && alpha < alpha_prime && alpha_prime < 1.0)) {
    throw std::domain_error("fd_variance_bound: need 0 <= alpha < alpha' < 1");
  }
  const double min_m = fd_min_memory(s, alpha, alpha_prime);
  if (static_cast<double>(M) < min_m) {
    throw std::domain_error("fd_variance_bound: M=" + std::to_string(M) +
                            " below the minimum " + std::to_string(min_m));
  }
  if (s < M) throw std::domain_error("fd_variance_bound: need s >= M");
  if (!(kappa_val > 0.0)) throw std::domain_error("fd_variance_bound: kappa must be positive");
  const double b = static_cast<double>(M) * (1.0 - alpha_prime);
  const double c = static_cast<double>(s);
  const double p3 = psi(3, b, c);
  const double p5 = psi(5, b, c);
  const double inv_k2 = 1.0 / (kappa_val * kappa_val);
  return inv_k2 * (total * (p3 - 1.0) + 2.0 + 2.0 * r * (p3 * p3 / p5 - 1.0));
}

/// Variance of the fixed-probability estimator p^-3 * (triangles in sample).
inline double mascot_c_variance(double total, double r, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("mascot_c_variance: need 0 < p <= 1");
  return total * (1.0 / (p * p * p) - 1.0) + 2.0 * r * (1.0 / p - 1.0);
}

namespace detail {

inline void check_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error(std::string(name) + " must lie in (0,1)");
}

inline std::uint64_t ceil_to_int(double x) { return static_cast<std::uint64_t>(std::ceil(x)); }

inline std::uint64_t strictly_above(double x) {
  return x < 0.0 ? 0 : static_cast<std::uint64_t>(std::floor(x)) + 1;
}

}  // namespace detail

/// Smallest M for which the reservoir estimator is within eps relative error
/// with probability > 1 - delta at time t.
inline std::uint64_t min_M_base(double eps, double delta, double h, double total, double t) {
  detail::check_unit(eps, "eps");
  detail::check_unit(delta, "delta");
  if (!(total > 0.0)) throw std::domain_error("min_M_base: need total > 0");
  const double e = std::numbers::e;
  const double spread = 3.0 * h + 1.0;
  const double phi = std::cbrt(8.0 / (eps * eps) * spread / total * std::log(spread * e / delta));
  const double x = t * phi;
  const double l = std::cbrt(std::log(x));
  const double first = x * (1.0 + 0.5 * l * l);
  return detail::ceil_to_int(std::max({first, 12.0 / eps + e * e, 25.0}));
}

/// Smallest M (strict inequality) for the improved insertion estimator.
inline std::uint64_t min_M_impr(double eps, double delta, double z, double total, double t) {
  detail::check_unit(eps, "eps");
  detail::check_unit(delta, "delta");
  if (!(total > 0.0)) throw std::domain_error("min_M_impr: need total > 0");
  const double de2 = delta * eps * eps;
  const double first = std::sqrt(2.0 * (t - 1.0) * (t - 2.0) / (de2 * total + 2.0) + 0.25) + 0.5;
  const double second = z > 0.0 ? 2.0 * z * (t - 1.0) / (de2 * total * total + 2.0 * z) : 0.0;
  return detail::strictly_above(std::max(first, second));
}

/// Smallest M (strict inequality) for the fully-dynamic estimator.
inline std::uint64_t min_M_fd(double eps, double delta, double r, double total, double s,
                              double kappa_val, double alpha, double alpha_prime) {
  detail::check_unit(eps, "eps");
  detail::check_unit(delta, "delta");
  if (!(0.0 <= alpha && alpha < alpha_prime && alpha_prime < 1.0)) {
    throw std::domain_error("min_M_fd: need 0 <= alpha < alpha' < 1");
  }
  if (!(total > 0.0)) throw std::domain_error("min_M_fd: need total > 0");
  const double de2 = delta * eps * eps;
  const double slack = 1.0 / (1.0 - alpha_prime);
  const double first = 7.0 * std::log(s) / std::sqrt(alpha_prime - alpha);
  const double second =
      slack * (std::cbrt(2.0 * s * (s - 1.0) * (s - 2.0) /
                         (de2 * total * kappa_val * kappa_val + 2.0 * (total - 2.0) / total)) +
               2.0);
  // kappa enters this term with exponent -2 (unlike the cube-root term).
  const double third =
      r > 0.0 ? slack / 3.0 *
                    (r * s / (de2 * total * total / (kappa_val * kappa_val) + 2.0 * r))
              : 0.0;
  return detail::strictly_above(std::max({first, second, third}));
}

}  // namespace triest
