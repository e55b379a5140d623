#pragma once

// Scalar kernels of fractional dynamics: the two-parameter Mittag-Leffler
// function E_{a,b}(x) on the closed negative real axis, and the
// Wright/Mainardi probability density w_q on (0,inf) whose Laplace
// transform is E_{q,1}(-s).
//
// ml() is the production path used by the solution operators; wright_pdf()
// exists to cross-validate that representation and is not performance
// critical.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <quadmath.h>

namespace fracctl {

/// Gamma function restricted to the positive half line.
inline double gamma_fn(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw std::domain_error("gamma_fn: x must be finite and > 0");
  return std::tgamma(x);
}

namespace detail {

// sin(pi*z) with exact integer reduction; |error| stays ~eps even for |z| >> 1.
inline long double sin_pi(long double z) {
  long double m = floorl(z);
  long double r = z - m;
  long double s = sinl((long double)M_PIl * r);
  return (fmodl(m, 2.0L) != 0.0L) ? -s : s;
}

// Compensated (Neumaier) accumulator.
struct KahanLD {
  long double s = 0.0L, c = 0.0L;
  void add(long double t) {
    long double u = s + t;
    if (fabsl(s) >= fabsl(t))
      c += (s - u) + t;
    else
      c += (t - u) + s;
    s = u;
  }
  long double value() const { return s + c; }
};

// Power series sum_{k>=0} x^k / Gamma(alpha k + beta) in long double.
// Valid while the peak-term amplification stays below ~1e6 or so.
inline long double ml_series_ld(double alpha, double beta, double x) {
  KahanLD acc;
  long double xl = x;
  long double p = 1.0L;
  long double past_peak = powl(-xl, 1.0L / (long double)alpha) / (long double)alpha;
  for (int k = 0; k <= 700; ++k) {
    long double z = (long double)alpha * k + (long double)beta;
    long double term = p / tgammal(z);
    acc.add(term);
    if ((long double)k > past_peak &&
        fabsl(term) < 1e-21L * fabsl(acc.value()) + 1e-320L)
      break;
    p *= xl;
  }
  return acc.value();
}

// Same series in quad precision; covers the cancellation window between the
// long-double series and the asymptotic branch.
inline __float128 ml_series_f128(double alpha, double beta, double x) {
  __float128 sum = 0.0Q, comp = 0.0Q;
  __float128 xl = x;
  __float128 p = 1.0Q;
  double past_peak = std::pow(-x, 1.0 / alpha) / alpha;
  for (int k = 0; k <= 700; ++k) {
    __float128 z = (__float128)alpha * k + (__float128)beta;
    __float128 term = p / tgammaq(z);
    __float128 u = sum + term;
    if (fabsq(sum) >= fabsq(term))
      comp += (sum - u) + term;
    else
      comp += (term - u) + sum;
    sum = u;
    if (k > past_peak && fabsq(term) < 1e-35Q * fabsq(sum + comp) + 1e-400Q)
      break;
    p *= xl;
  }
  return sum + comp;
}

// Asymptotic expansion for x -> -inf:
//   E_{a,b}(x) ~ -sum_{k>=1} x^{-k} / Gamma(b - a k),
// truncated at the smallest term. Terms are assembled in log space since
// 1/Gamma(b - a k) grows factorially before the x^{-k} decay wins.
// The truncation envelope deliberately excludes the sin factor of the
// reflection formula: where b - a k sits near a nonpositive integer the term
// all but vanishes, and letting that dip into the divergence test would cut
// the sum far too early.
inline long double ml_asymptotic_ld(double alpha, double beta, double x) {
  long double t = -(long double)x;
  long double lt = logl(t);
  const long double lpi = logl((long double)M_PIl);
  KahanLD acc;
  long double prev_env = std::numeric_limits<long double>::max();
  for (int k = 1; k <= 220; ++k) {
    long double z = (long double)beta - (long double)alpha * k;
    long double env, mag, rg_sign;
    if (z > 0.5L) {
      env = expl(-k * lt - lgammal(z));
      mag = env;
      rg_sign = 1.0L;
    } else {
      long double s = sin_pi(z);
      env = expl(-k * lt + lgammal(1.0L - z) - lpi);
      mag = env * fabsl(s);
      rg_sign = (s >= 0.0L) ? 1.0L : -1.0L;
    }
    if (env > prev_env) break;  // divergence onset: optimal truncation
    long double term = ((k & 1) ? 1.0L : -1.0L) * rg_sign * mag;
    acc.add(term);
    if (env < 1e-21L * fabsl(acc.value())) break;
    prev_env = env;
  }
  return acc.value();
}

// Branch switch on r = |x|^{1/alpha}: the series amplification and the
// asymptotic truncation error are both governed by exp(+-r).
inline constexpr double kMlSeriesLdMaxR = 14.0;
inline constexpr double kMlSeriesF128MaxR = 28.0;

}  // namespace detail

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(x) for x <= 0,
/// alpha in (0,1], beta > 0. Relative accuracy ~1e-10 or better.
inline double ml(double alpha, double beta, double x) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0)
    throw std::domain_error("ml: alpha must lie in (0, 1]");
  if (!std::isfinite(beta) || beta <= 0.0)
    throw std::domain_error("ml: beta must be > 0");
  if (!std::isfinite(x) || x > 0.0)
    throw std::domain_error("ml: x must be finite and <= 0");
  if (x == 0.0) return 1.0 / std::tgamma(beta);
  if (alpha == 1.0) {
    // classical limits, exact instead of series
    if (beta == 1.0) return std::exp(x);
    if (beta == 2.0) return std::expm1(x) / x;
  }
  double r = std::pow(-x, 1.0 / alpha);
  if (r <= detail::kMlSeriesLdMaxR)
    return (double)detail::ml_series_ld(alpha, beta, x);
  if (r <= detail::kMlSeriesF128MaxR)
    return (double)detail::ml_series_f128(alpha, beta, x);
  return (double)detail::ml_asymptotic_ld(alpha, beta, x);
}

namespace detail {

// Cached per-q coefficient tables for the Wright density series:
// log Gamma(n q + 1), log Gamma(n + 1), sin(pi n q).
struct WrightTable {
  std::vector<__float128> lg_num;
  std::vector<__float128> lg_den;
  std::vector<__float128> sinpi;
  void extend(double q, std::size_t n_max) {
    std::size_t start = lg_num.size();
    if (start == 0) start = 1;  // index 0 unused
    if (lg_num.empty()) {
      lg_num.resize(1);
      lg_den.resize(1);
      sinpi.resize(1);
    }
    lg_num.resize(std::max(lg_num.size(), n_max + 1));
    lg_den.resize(lg_den.size() < n_max + 1 ? n_max + 1 : lg_den.size());
    sinpi.resize(sinpi.size() < n_max + 1 ? n_max + 1 : sinpi.size());
    __float128 qq = q;
    for (std::size_t n = start; n <= n_max; ++n) {
      __float128 nq = (__float128)n * qq;
      lg_num[n] = lgammaq(nq + 1.0Q);
      lg_den[n] = lgammaq((__float128)n + 1.0Q);
      __float128 red = fmodq(nq, 2.0Q);  // exact: nq needs < 70 mantissa bits
      sinpi[n] = sinq(M_PIq * red);
    }
  }
};

inline WrightTable& wright_table(double q) {
  thread_local std::unordered_map<std::uint64_t, WrightTable> cache;
  std::uint64_t key;
  std::memcpy(&key, &q, sizeof key);
  return cache[key];
}

// log of a safe overestimate of the density tail
//   w_q(th) <~ exp(-(1-q) q^{q/(1-q)} th^{1/(1-q)}) * poly(th).
inline double wright_tail_log(double q, double theta) {
  double bq = (1.0 - q) * std::pow(q, q / (1.0 - q));
  return -bq * std::pow(theta, 1.0 / (1.0 - q)) + 2.0 * std::log1p(theta) + 3.0;
}

}  // namespace detail

/// Wright/Mainardi probability density w_q(theta), q in (1/2,1), theta > 0,
/// evaluated through the series
///   varpi_q(y) = (1/pi) sum_{n>=1} (-1)^{n-1} y^{-n q - 1}
///                Gamma(n q + 1)/n! sin(pi n q),
/// composed with w_q(theta) = (1/q) theta^{-1-1/q} varpi_q(theta^{-1/q}).
/// Absolute accuracy ~1e-8; far in the tail (density below 1e-9) the value
/// is reported as 0.
inline double wright_pdf(double q, double theta) {
  if (!std::isfinite(q) || q <= 0.5 || q >= 1.0)
    throw std::domain_error("wright_pdf: q must lie in (1/2, 1)");
  if (!std::isfinite(theta) || theta <= 0.0)
    throw std::domain_error("wright_pdf: theta must be finite and > 0");

  if (detail::wright_tail_log(q, theta) < std::log(1e-10)) return 0.0;

  // index of the largest series term; sizes the truncation and the table
  double n_star =
      std::exp((std::log(theta) + q * std::log(q)) / (1.0 - q));
  if (n_star > 20000.0)
    throw std::runtime_error(
        "wright_pdf: series truncation cap exceeded (q too close to 1)");
  std::size_t cap =
      std::min<std::size_t>(50000, std::max(200, (int)(8.0 * n_star) + 50));

  detail::WrightTable& tab = detail::wright_table(q);
  tab.extend(q, cap);

  const __float128 qq = q;
  const __float128 L = logq((__float128)theta) / qq;  // = -log y
  __float128 sum = 0.0Q, comp = 0.0Q, amax = 0.0Q;
  int small_run = 0;
  for (std::size_t n = 1; n <= cap; ++n) {
    __float128 lt = ((__float128)n * qq + 1.0Q) * L + tab.lg_num[n] - tab.lg_den[n];
    __float128 term = expq(lt) * tab.sinpi[n] / M_PIq;
    if (!(n & 1)) term = -term;
    __float128 u = sum + term;
    if (fabsq(sum) >= fabsq(term))
      comp += (sum - u) + term;
    else
      comp += (term - u) + sum;
    sum = u;
    __float128 at = fabsq(term);
    if (at > amax) amax = at;
    if ((double)n > n_star && at < 1e-22Q * (amax + fabsq(sum)))
      ++small_run;
    else
      small_run = 0;
    if (small_run >= 3) break;
  }
  __float128 varpi = sum + comp;
  __float128 w = varpi / qq * expq((-1.0Q - 1.0Q / qq) * logq((__float128)theta));
  double out = (double)w;
  if (out < -1e-8)
    throw std::runtime_error("wright_pdf: catastrophic cancellation");
  return out > 0.0 ? out : 0.0;
}

}  // namespace fracctl
