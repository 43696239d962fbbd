#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rifield/convex.hpp"
#include "rifield/metric_space.hpp"
#include "rifield/psi.hpp"

namespace rifield {

/// Declaration of the target rearrangement invariant space over the
/// discretized (T, mu): Lp (p in [1, inf]), Grand Lebesgue G(psi), or Orlicz
/// with a Young function N. An optional finite dual family (functions on T
/// with unit associate norm) supports the functional-based certificates.
class RISpaceSpec {
 public:
  enum class Kind { Lp, GrandLebesgue, Orlicz };

  static RISpaceSpec lp(double p,
                        std::shared_ptr<const MetricMeasureSpace> space) {
    if (!(p >= 1.0)) throw std::invalid_argument("Lp space: p >= 1");
    RISpaceSpec out(Kind::Lp, std::move(space));
    out.p_ = p;
    return out;
  }

  static RISpaceSpec sup_norm(std::shared_ptr<const MetricMeasureSpace> space) {
    return lp(kInf, std::move(space));
  }

  static RISpaceSpec grand_lebesgue(
      PsiFunction psi, std::shared_ptr<const MetricMeasureSpace> space) {
    RISpaceSpec out(Kind::GrandLebesgue, std::move(space));
    out.psi_ = std::move(psi);
    return out;
  }

  static RISpaceSpec orlicz(ScalarFunctionGrid young,
                            std::shared_ptr<const MetricMeasureSpace> space) {
    if (young.front() != 0.0 || young.values()[0] != 0.0)
      throw std::invalid_argument("orlicz space: need N(0) = 0");
    if (!young.is_convex(1e-7) || !young.is_nondecreasing())
      throw std::invalid_argument("orlicz space: N must be a Young function");
    bool positive = false;
    for (double v : young.values()) positive = positive || v > 0.0;
    if (!positive)
      throw std::invalid_argument("orlicz space: N identically zero");
    RISpaceSpec out(Kind::Orlicz, std::move(space));
    out.young_ = std::move(young);
    return out;
  }

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const PsiFunction& psi() const { return *psi_; }
  const ScalarFunctionGrid& young_function() const { return *young_; }
  const MetricMeasureSpace& space() const { return *space_; }
  std::shared_ptr<const MetricMeasureSpace> space_ptr() const { return space_; }

  void set_dual_family(std::vector<std::vector<double>> family) {
    for (const auto& g : family)
      if (g.size() != space_->size())
        throw std::invalid_argument("dual family: wrong grid size");
    dual_family_ = std::move(family);
  }
  const std::vector<std::vector<double>>& dual_family() const {
    return dual_family_;
  }

 private:
  RISpaceSpec(Kind kind, std::shared_ptr<const MetricMeasureSpace> space)
      : kind_(kind), space_(std::move(space)) {
    if (!space_) throw std::invalid_argument("ri space: null space");
  }

  Kind kind_;
  std::shared_ptr<const MetricMeasureSpace> space_;
  double p_ = 2.0;
  std::optional<PsiFunction> psi_;
  std::optional<ScalarFunctionGrid> young_;
  std::vector<std::vector<double>> dual_family_;
};

namespace detail {

inline double weighted_p_norm(std::span<const double> f,
                              const MetricMeasureSpace& space, double p) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (space.weight(i) > 0.0) m = std::max(m, std::abs(f[i]));
  if (p == kInf || m == 0.0) return m;
  // factor out the max so large exponents cannot overflow
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += space.weight(i) * std::pow(std::abs(f[i]) / m, p);
  return m * std::pow(acc, 1.0 / p);
}

inline double young_eval(const ScalarFunctionGrid& n_fn, double u) {
  if (u <= n_fn.back()) return std::max(0.0, n_fn.value(u));
  if (n_fn.has_evaluator()) return n_fn.evaluate_raw(u);
  return kInf;  // beyond the tabulated range: saturate upward
}

/// Luxemburg gauge inf{ lambda > 0 : sum mu_i N(|f_i| / lambda) <= 1 }.
inline double luxemburg_gauge(std::span<const double> f,
                              const MetricMeasureSpace& space,
                              const ScalarFunctionGrid& n_fn) {
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0.0) return 0.0;

  auto total = [&](double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (space.weight(i) == 0.0 || f[i] == 0.0) continue;
      const double term = young_eval(n_fn, std::abs(f[i]) / lambda);
      acc += space.weight(i) * term;
      if (!std::isfinite(acc)) return kInf;
    }
    return acc;
  };

  double hi = fmax;
  int guard = 0;
  while (total(hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 200)
      throw std::runtime_error("orlicz gauge: unbounded (N too flat)");
  }
  double lo = hi;
  guard = 0;
  while (total(lo * 0.5) <= 1.0) {
    lo *= 0.5;
    if (++guard > 200) return 0.0;
  }
  lo *= 0.5;
  for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) <= 1.0 ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

/// Norm of a function given by its values on the points of T.
inline double ri_norm(std::span<const double> f, const RISpaceSpec& spec) {
  const auto& space = spec.space();
  if (f.size() != space.size())
    throw std::invalid_argument("ri_norm: value/grid size mismatch");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("ri_norm: non-finite");
  switch (spec.kind()) {
    case RISpaceSpec::Kind::Lp:
      return detail::weighted_p_norm(f, space, spec.p());
    case RISpaceSpec::Kind::GrandLebesgue: {
      bool all_zero = true;
      for (double v : f) all_zero = all_zero && v == 0.0;
      if (all_zero) return 0.0;
      MomentCurve curve(
          [f = std::vector<double>(f.begin(), f.end()), &space](double p) {
            return detail::weighted_p_norm(f, space, p);
          },
          1.0, kInf);
      return gls_norm(curve, spec.psi());
    }
    case RISpaceSpec::Kind::Orlicz:
      return detail::luxemburg_gauge(f, space, spec.young_function());
  }
  throw std::logic_error("ri_norm: unknown kind");
}

struct FundamentalValue {
  double value = 0.0;
  bool atoms_assembled = false;  // false means the closed form was used
};

/// phi(L, delta) = ||I(A)||_L for mu(A) = delta. Lp and Grand Lebesgue use
/// their closed forms; the Orlicz gauge is evaluated on an indicator greedily
/// assembled from atoms, falling back to 1 / N^{-1}(1/delta) when the atoms
/// cannot hit delta.
inline FundamentalValue fundamental_function(const RISpaceSpec& spec,
                                             double delta) {
  const auto& space = spec.space();
  if (!(delta > 0.0) || delta > space.total_weight() * (1.0 + 1e-12))
    throw std::invalid_argument("fundamental_function: need 0 < delta <= mu(T)");
  switch (spec.kind()) {
    case RISpaceSpec::Kind::Lp:
      return {spec.p() == kInf ? 1.0 : std::pow(delta, 1.0 / spec.p()), false};
    case RISpaceSpec::Kind::GrandLebesgue: {
      MomentCurve indicator([delta](double p) {
        return std::pow(delta, 1.0 / p);
      }, 1.0, kInf);
      return {gls_norm(indicator, spec.psi()), false};
    }
    case RISpaceSpec::Kind::Orlicz: {
      std::vector<std::size_t> order(space.size());
      std::iota(order.begin(), order.end(), 0u);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return space.weight(a) > space.weight(b);
                       });
      std::vector<double> f(space.size(), 0.0);
      double acc = 0.0;
      for (std::size_t id : order)
        if (acc + space.weight(id) <= delta * (1.0 + 1e-12)) {
          acc += space.weight(id);
          f[id] = 1.0;
        }
      if (std::abs(acc - delta) <= 1e-12 * std::max(1.0, delta))
        return {ri_norm(f, spec), true};
      const auto& n_fn = spec.young_function();
      auto n_eval = [&](double u) { return detail::young_eval(n_fn, u); };
      double hi = n_fn.back();
      while (std::isfinite(n_eval(hi)) && n_eval(hi) < 1.0 / delta &&
             hi < 1e12)
        hi *= 2.0;
      const double u_inv =
          numeric::invert_increasing(n_eval, 1.0 / delta, 0.0, hi, 1e-12);
      return {1.0 / u_inv, false};
    }
  }
  throw std::logic_error("fundamental_function: unknown kind");
}

/// Pairwise L1 distances and diameter of the declared dual family.
struct DualFamilyGeometry {
  std::vector<std::vector<double>> rho;
  double diameter = 0.0;
  std::vector<std::string> warnings;
};

inline DualFamilyGeometry dual_geometry(const RISpaceSpec& spec) {
  const auto& family = spec.dual_family();
  if (family.empty())
    throw std::invalid_argument("dual_geometry: dual family is empty");
  const auto& space = spec.space();
  DualFamilyGeometry out;
  const std::size_t m = family.size();
  out.rho.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < space.size(); ++i)
        s += space.weight(i) * std::abs(family[a][i] - family[b][i]);
      out.rho[a][b] = out.rho[b][a] = s;
      out.diameter = std::max(out.diameter, s);
    }
  if (spec.kind() == RISpaceSpec::Kind::Lp && spec.p() > 1.0 &&
      spec.p() != kInf) {
    const double pdual = spec.p() / (spec.p() - 1.0);
    for (std::size_t a = 0; a < m; ++a) {
      const double nrm = detail::weighted_p_norm(family[a], space, pdual);
      if (std::abs(nrm - 1.0) > 1e-6)
        out.warnings.push_back("dual member " + std::to_string(a) +
                               " has associate norm " + std::to_string(nrm) +
                               " (expected 1)");
    }
  }
  return out;
}

}  // namespace rifield
