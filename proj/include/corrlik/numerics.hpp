#pragma once

// Special functions, adaptive quadrature, 1-d maximization, chi-square utilities.

#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "corrlik/errors.hpp"

namespace corrlik {

struct Tolerance {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_iterations = 10000;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iterations < 1)
      throw ValidationError("Tolerance: require abs_tol > 0, rel_tol > 0, max_iterations >= 1");
  }
};

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw ValidationError("log_gamma: require x > 0");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

namespace detail {

// Regularized lower incomplete gamma by series, for x < s + 1.
inline double gamma_p_series(double s, double x) {
  double ap = s;
  double term = 1.0 / s;
  double sum = term;
  for (int k = 0; k < 10000; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17)
      return sum * std::exp(-x + s * std::log(x) - log_gamma(s));
  }
  throw ConvergenceError("incomplete gamma: series did not converge");
}

// Regularized upper incomplete gamma by Lentz continued fraction, for x >= s + 1.
inline double gamma_q_contfrac(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-17)
      return std::exp(-x + s * std::log(x) - log_gamma(s)) * h;
  }
  throw ConvergenceError("incomplete gamma: continued fraction did not converge");
}

}  // namespace detail

// Regularized lower incomplete gamma P(s, x).
inline double gamma_p(double s, double x) {
  if (!(s > 0.0)) throw ValidationError("gamma_p: require s > 0");
  if (x < 0.0) throw ValidationError("gamma_p: require x >= 0");
  if (x == 0.0) return 0.0;
  return x < s + 1.0 ? detail::gamma_p_series(s, x) : 1.0 - detail::gamma_q_contfrac(s, x);
}

// P(X >= q) for chi-square with df degrees of freedom.
inline double chi_square_sf(double q, int df) {
  if (q < 0.0) throw ValidationError("chi_square_sf: require q >= 0");
  if (df < 1) throw ValidationError("chi_square_sf: require df >= 1");
  if (q == 0.0) return 1.0;
  double s = 0.5 * df;
  double x = 0.5 * q;
  return x < s + 1.0 ? 1.0 - detail::gamma_p_series(s, x) : detail::gamma_q_contfrac(s, x);
}

// q with CDF(q) = p, by bisection on the regularized incomplete gamma.
inline double chi_square_quantile(double p, int df) {
  if (!(p >= 0.0 && p < 1.0)) throw ValidationError("chi_square_quantile: require 0 <= p < 1");
  if (df < 1) throw ValidationError("chi_square_quantile: require df >= 1");
  if (p == 0.0) return 0.0;
  double lo = 0.0;
  double hi = df + 10.0;
  while (gamma_p(0.5 * df, 0.5 * hi) < p) {
    hi *= 2.0;
    if (hi > 1e12) throw ConvergenceError("chi_square_quantile: bracket search failed");
  }
  for (int i = 0; i < 300 && hi - lo > 1e-9; ++i) {
    double mid = 0.5 * (lo + hi);
    (gamma_p(0.5 * df, 0.5 * mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct IntegrationResult {
  double value = 0.0;
  double error_bound = 0.0;
  bool converged = false;
  int subdivisions = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
std::pair<double, double> gk15(const F& f, double a, double b) {
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double fc = f(mid);
  double kronrod = kGK15Weights[7] * fc;
  double gauss = kG7Weights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double x = half * kGK15Nodes[i];
    double fs = f(mid - x) + f(mid + x);
    kronrod += kGK15Weights[i] * fs;
    if (i % 2 == 1) gauss += kG7Weights[i / 2] * fs;
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::fabs(kronrod - gauss)};
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

// Adaptive quadrature: Gauss-Kronrod 7-15 local rule with interval bisection.
template <class F>
IntegrationResult integrate(const F& f, double a, double b, const Tolerance& tol = {}) {
  tol.validate();
  if (!(a < b)) throw ValidationError("integrate: require a < b");
  std::priority_queue<detail::Segment> queue;
  auto [v0, e0] = detail::gk15(f, a, b);
  queue.push({a, b, v0, e0});
  double total_value = v0;
  double total_error = e0;
  int subdivisions = 0;
  const double min_width = (b - a) * 1e-14;
  while (total_error > std::max(tol.abs_tol, tol.rel_tol * std::fabs(total_value))) {
    if (subdivisions >= tol.max_iterations || queue.top().b - queue.top().a < min_width)
      return {total_value, total_error, false, subdivisions};
    detail::Segment worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.a + worst.b);
    auto [lv, le] = detail::gk15(f, worst.a, mid);
    auto [rv, re] = detail::gk15(f, mid, worst.b);
    total_value += lv + rv - worst.value;
    total_error += le + re - worst.error;
    queue.push({worst.a, mid, lv, le});
    queue.push({mid, worst.b, rv, re});
    ++subdivisions;
  }
  return {total_value, total_error, true, subdivisions};
}

struct MaximizeResult {
  double x = 0.0;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Brent's method (golden section with parabolic refinement) for a unimodal maximum.
template <class F>
MaximizeResult maximize_1d(const F& f, double lo, double hi, const Tolerance& tol = {}) {
  tol.validate();
  if (!(lo < hi)) throw ValidationError("maximize_1d: require lo < hi");
  const double golden = 0.3819660112501051;
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < tol.max_iterations; ++iter) {
    double mid = 0.5 * (a + b);
    double tol1 = eps * std::fabs(x) + tol.abs_tol;
    double tol2 = 2.0 * tol1;
    if (std::fabs(x - mid) <= tol2 - 0.5 * (b - a))
      return {x, fx, true, iter};
    bool golden_step = true;
    if (std::fabs(e) > tol1) {
      // parabola through x, w, v
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      double e_prev = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < mid) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x < mid) ? b - x : a - x;
      d = golden * e;
    }
    double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    double fu = f(u);
    if (fu >= fx) {
      (u < x ? b : a) = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu >= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu >= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx, false, tol.max_iterations};
}

namespace detail {

// Coarse grid scan followed by Brent refinement on the bracketing cell pair.
template <class F>
MaximizeResult scan_then_maximize(const F& f, double lo, double hi, int scan_points,
                                  const Tolerance& tol = {}) {
  int n = scan_points < 3 ? 3 : scan_points;
  double best_x = lo, best_v = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    double x = (i == n - 1) ? hi : lo + i * step;
    double v = f(x);
    if (v > best_v) { best_v = v; best_x = x; best_i = i; }
  }
  double blo = (best_i == 0) ? lo : lo + (best_i - 1) * step;
  double bhi = (best_i == n - 1) ? hi : lo + (best_i + 1) * step;
  MaximizeResult r = maximize_1d(f, blo, bhi, tol);
  if (r.value < best_v) { r.x = best_x; r.value = best_v; }
  return r;
}

}  // namespace detail

}  // namespace corrlik
