#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rifield/grid_function.hpp"
#include "rifield/numeric.hpp"
#include "rifield/psi.hpp"

namespace rifield {

namespace detail {

struct ConjugatePoint {
  double value = -kInf;
  double arg = 0.0;
};

inline ConjugatePoint conjugate_on_grid(const ScalarFunctionGrid& f,
                                        double u) {
  const auto ys = f.nodes();
  const auto vs = f.values();
  ConjugatePoint best;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double cand = u * ys[i] - vs[i];
    if (cand > best.value) best = {cand, ys[i]};
  }
  if (f.has_evaluator()) {
    auto it = std::lower_bound(ys.begin(), ys.end(), best.arg);
    const std::size_t k = static_cast<std::size_t>(it - ys.begin());
    const double lo = ys[k > 0 ? k - 1 : 0];
    const double hi = ys[std::min(k + 1, ys.size() - 1)];
    if (hi > lo) {
      auto obj = [&](double y) { return u * y - f.evaluate_raw(y); };
      const auto refined = numeric::golden_max(obj, lo, hi);
      if (refined.value > best.value) best = {refined.value, refined.x};
    }
  }
  return best;
}

}  // namespace detail

/// Young-Fenchel (Legendre) transform f*(u) = sup_y (u y - f(y)).
/// With Extrapolation::Linear the grid is read as a window into a function
/// extended linearly beyond it, so slopes outside the achievable secant range
/// give the +inf sentinel. With Forbid the supremum is over the grid domain.
inline double young_fenchel(const ScalarFunctionGrid& f, double u) {
  if (f.extrapolation() == Extrapolation::Linear) {
    if (u > f.right_slope() || u < f.left_slope()) return kInf;
  }
  return detail::conjugate_on_grid(f, u).value;
}

/// Co-transform f_*(x) = inf_{y >= 0} (x y + f(y)); nondecreasing and concave
/// in x. The grid must live on y >= 0.
inline double co_transform(const ScalarFunctionGrid& f, double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("co_transform: x >= 0");
  if (f.front() < 0.0)
    throw std::invalid_argument("co_transform: grid must be on y >= 0");
  const auto ys = f.nodes();
  const auto vs = f.values();
  double best = kInf;
  std::size_t k = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double cand = x * ys[i] + vs[i];
    if (cand < best) {
      best = cand;
      k = i;
    }
  }
  if (f.has_evaluator()) {
    const double lo = ys[k > 0 ? k - 1 : 0];
    const double hi = ys[std::min(k + 1, ys.size() - 1)];
    if (hi > lo) {
      auto obj = [&](double y) { return x * y + f.evaluate_raw(y); };
      best = std::min(best, numeric::golden_min(obj, lo, hi).value);
    }
  }
  return best;
}

namespace detail {

/// Grid of g(p) = p ln psi(p) over the evaluable support, capped at p_cap.
inline ScalarFunctionGrid log_moment_grid(const PsiFunction& psi,
                                          double p_cap, int nodes = 512) {
  const double lo = psi.support_lo() * (1.0 + 1e-9) + 1e-12;
  const double hi =
      psi.unbounded() ? p_cap : psi.support_hi() * (1.0 - 1e-9);
  auto g = [psi](double p) { return p * std::log(psi(p)); };
  return ScalarFunctionGrid::from_function_on_nodes(
      std::move(g), numeric::log_spaced(lo, std::max(hi, lo * 1.0001), nodes),
      Extrapolation::Forbid);
}

}  // namespace detail

/// Upper bound for T_xi(x) = max(P(xi > x), P(xi < -x)) of a variable with
/// finite G(psi) norm: exp(-[p ln psi(p)]*(ln(x / norm))), valid for
/// x >= 2 norm. The exponent cap grows until the conjugate argmax is
/// interior, so the bound does not depend on the default grid ceiling.
inline double tail_bound(const PsiFunction& psi, double norm_value, double x) {
  if (!(norm_value > 0.0))
    throw std::invalid_argument("tail_bound: norm must be positive");
  if (x < 2.0 * norm_value)
    throw std::domain_error("tail_bound: x below validity threshold 2*norm = " +
                            std::to_string(2.0 * norm_value));
  const double u = std::log(x / norm_value);
  double cap = 400.0;
  detail::ConjugatePoint cp;
  for (;;) {
    auto grid = detail::log_moment_grid(psi, cap);
    cp = detail::conjugate_on_grid(grid, u);
    const bool at_edge =
        psi.unbounded() && cp.arg > grid.nodes()[grid.size() - 3];
    if (!at_edge || cap >= 1e7) break;
    cap *= 8.0;
  }
  return std::min(1.0, std::exp(-cp.value));
}

/// Tail-bound curve for a fixed norm; nonincreasing in x, values in (0, 1].
struct TailBoundCurve {
  double norm_value = 1.0;
  std::function<double(double)> eval;

  double operator()(double x) const { return eval(x); }
};

inline TailBoundCurve tail_bound_curve(const PsiFunction& psi,
                                       double norm_value) {
  return TailBoundCurve{norm_value, [psi, norm_value](double x) {
                          return tail_bound(psi, norm_value, x);
                        }};
}

struct OrliczResult {
  ScalarFunctionGrid young_function;  // N on a u >= 0 grid, N(0) = 0
  bool convex = false;
  bool nondecreasing = false;
  std::string note;
};

/// Orlicz-Young function N(u) = exp(phi*(u)) - 1 where phi is the functional
/// inverse of chi, chi(p) = p / psi(p) for p >= 2 patched quadratically on
/// [0, 2] so that chi is continuous and strictly increasing. The reciprocal
/// reading of the inverse fails convexity and is rejected; the note records
/// the choice.
inline OrliczResult orlicz_from_psi(const PsiFunction& psi, double u_max = 16.0,
                                    int u_nodes = 257, double p_cap = 400.0) {
  if (!(psi.support_lo() <= 2.0) || !(psi.support_hi() > 2.0))
    throw std::invalid_argument("orlicz_from_psi: support must include [2,b)");
  const double p_hi =
      psi.unbounded() ? p_cap : psi.support_hi() * (1.0 - 1e-9);
  const double chi2 = 2.0 / psi(2.0);
  const double c_patch = chi2 / 4.0;  // continuity at p = 2
  auto chi = [psi, c_patch](double p) {
    if (p <= 2.0) return c_patch * p * p;
    return p / psi(p);
  };

  {  // strict monotonicity scan
    const auto probe = numeric::lin_spaced(0.0, p_hi, 1024);
    for (std::size_t i = 1; i < probe.size(); ++i) {
      if (!(chi(probe[i]) > chi(probe[i - 1]) * (1.0 + 1e-14) - 1e-14)) {
        throw std::runtime_error(
            "orlicz_from_psi: chi is not strictly increasing on [" +
            std::to_string(probe[i - 1]) + ", " + std::to_string(probe[i]) +
            "]");
      }
    }
  }

  const double y_max = chi(p_hi);
  auto phi = [chi, p_hi, y_max](double y) {
    if (y <= 0.0) return 0.0;
    if (y >= y_max) return p_hi;
    return numeric::invert_increasing(chi, y, 0.0, p_hi, 1e-10);
  };

  std::vector<double> ys;
  ys.reserve(514);
  ys.push_back(0.0);
  for (double y : numeric::log_spaced(std::max(y_max * 1e-9, 1e-12), y_max, 513))
    ys.push_back(y);
  auto phi_grid = ScalarFunctionGrid::from_function_on_nodes(
      phi, std::move(ys), Extrapolation::Forbid);

  std::vector<double> us = numeric::lin_spaced(0.0, u_max, u_nodes);
  std::vector<double> ns(us.size());
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double star = detail::conjugate_on_grid(phi_grid, us[i]).value;
    ns[i] = std::expm1(std::max(0.0, star));
  }
  ns[0] = 0.0;

  OrliczResult out{ScalarFunctionGrid::from_samples(std::move(us),
                                                    std::move(ns),
                                                    Extrapolation::Forbid),
                   false, false,
                   "young function built by functional inversion of chi; the "
                   "reciprocal reading fails convexity and was rejected"};
  out.convex = out.young_function.is_convex(1e-7);
  out.nondecreasing = out.young_function.is_nondecreasing();
  return out;
}

/// Generating function from a tail exponent: psi(p) = exp(h*(p) / p) for
/// tails T(x) <= exp(-h(ln x)). h must be positive, convex within tolerance,
/// and strictly increasing on a grid of at least three nodes.
inline PsiFunction psi_from_tail(const ScalarFunctionGrid& h,
                                 double p_cap = 400.0, int nodes = 256) {
  if (h.size() < 3)
    throw std::invalid_argument("psi_from_tail: degenerate grid (< 3 nodes)");
  for (double v : h.values())
    if (!(v > 0.0))
      throw std::invalid_argument("psi_from_tail: h must be positive");
  if (!h.is_convex(1e-9))
    throw std::invalid_argument("psi_from_tail: h must be convex");
  if (!h.is_increasing())
    throw std::invalid_argument("psi_from_tail: h must be strictly increasing");

  const auto ps = numeric::log_spaced(1.0 + 1e-9, p_cap, nodes);
  std::vector<double> kept_p, kept_v;
  kept_p.reserve(ps.size());
  kept_v.reserve(ps.size());
  for (double p : ps) {
    const double star = young_fenchel(h, p);
    if (!std::isfinite(star)) break;  // beyond the achievable slope range
    kept_p.push_back(p);
    kept_v.push_back(std::exp(star / p));
  }
  if (kept_p.size() < 8)
    throw std::invalid_argument(
        "psi_from_tail: h grid too narrow to tabulate psi");
  return PsiFunction::tabulated(std::move(kept_p), std::move(kept_v),
                                Normalize::Enforce);
}

}  // namespace rifield
