#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rifield {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace numeric {

inline std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> lin_spaced(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("lin_spaced: n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section maximization of a unimodal-near-the-bracket objective.
/// Falls back to the best probed point for non-unimodal inputs.
inline Extremum golden_max(const std::function<double(double)>& f, double a,
                           double b, double xtol = 1e-11, int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  Extremum best{f1 >= f2 ? x1 : x2, std::max(f1, f2)};
  for (int it = 0; it < max_iter && (b - a) > xtol * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
    if (f1 > best.value) best = {x1, f1};
    if (f2 > best.value) best = {x2, f2};
  }
  return best;
}

inline Extremum golden_min(const std::function<double(double)>& f, double a,
                           double b, double xtol = 1e-11, int max_iter = 200) {
  auto neg = [&f](double x) { return -f(x); };
  Extremum e = golden_max(neg, a, b, xtol, max_iter);
  return {e.x, -e.value};
}

/// Adaptive composite Simpson on [a, b] to a relative tolerance.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double rel_tol = 1e-10, int max_doublings = 16) {
  int n = 16;
  auto composite = [&](int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
      s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
  };
  double prev = composite(n);
  for (int k = 0; k < max_doublings; ++k) {
    n *= 2;
    const double cur = composite(n);
    if (std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) return cur;
    prev = cur;
  }
  return prev;
}

/// Monotone bisection solve f(x) = target on [lo, hi]; f nondecreasing.
inline double invert_increasing(const std::function<double(double)>& f,
                                double target, double lo, double hi,
                                double rel_tol = 1e-10, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (target <= flo) return lo;
  if (target >= fhi) return hi;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((hi - lo) <= rel_tol * (std::abs(mid) + 1e-300)) return mid;
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace numeric
}  // namespace rifield
