#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rifield/numeric.hpp"

namespace rifield {

enum class PsiKind { AnalyticFormula, TabulatedLogGrid };
enum class Normalize { Enforce, Keep };

/// Moment-generating function psi on an open exponent interval (a, b).
/// Positive and continuous on the support; evaluation outside throws.
/// By convention inf psi = 1; constructors rescale when the infimum over the
/// evaluation grid falls below 1 and record the factor. Natural functions are
/// built with Normalize::Keep so their values stay exactly the family suprema.
class PsiFunction {
 public:
  static PsiFunction power(double m, double lo = 1.0, double hi = kInf) {
    if (!(m > 0.0)) throw std::invalid_argument("psi power: m > 0 required");
    auto f = [m](double p) { return std::pow(p, 1.0 / m); };
    return PsiFunction(PsiKind::AnalyticFormula, "power", m, std::move(f), lo,
                       hi, Normalize::Enforce);
  }

  static PsiFunction constant(double value, double lo = 1.0, double hi = kInf) {
    if (!(value > 0.0)) throw std::invalid_argument("psi constant: value > 0");
    auto f = [value](double) { return value; };
    return PsiFunction(PsiKind::AnalyticFormula, "constant", value,
                       std::move(f), lo, hi, Normalize::Enforce);
  }

  static PsiFunction analytic(std::string family,
                              std::function<double(double)> eval, double lo,
                              double hi,
                              Normalize normalize = Normalize::Enforce) {
    return PsiFunction(PsiKind::AnalyticFormula, std::move(family), 0.0,
                       std::move(eval), lo, hi, normalize);
  }

  /// Tabulated on a strictly increasing p-grid; interpolates linearly in
  /// (log p, log psi) and the support is the open hull of the grid.
  static PsiFunction tabulated(std::vector<double> p, std::vector<double> v,
                               Normalize normalize = Normalize::Enforce) {
    if (p.size() != v.size() || p.size() < 2)
      throw std::invalid_argument("psi tabulated: need >= 2 matching nodes");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p[i]) || !std::isfinite(v[i]) || !(v[i] > 0.0))
        throw std::invalid_argument("psi tabulated: finite positive values");
      if (i && !(p[i] > p[i - 1]))
        throw std::invalid_argument("psi tabulated: grid strictly increasing");
    }
    PsiFunction out(PsiKind::TabulatedLogGrid, "table", 0.0, nullptr,
                    p.front(), p.back(), Normalize::Keep);
    out.grid_p_ = std::move(p);
    out.grid_v_ = std::move(v);
    for (auto& x : out.grid_p_) x = std::log(x);
    for (auto& x : out.grid_v_) x = std::log(x);
    out.finish_normalization(normalize);
    return out;
  }

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  bool unbounded() const { return hi_ == kInf; }
  PsiKind kind() const { return kind_; }
  const std::string& family() const { return family_; }
  double family_parameter() const { return param_; }
  /// Factor the raw values were divided by to enforce inf psi = 1.
  double normalization_scale() const { return scale_; }
  bool normalized() const { return normalized_; }

  double operator()(double p) const {
    if (!(p > lo_) || !(p < hi_))
      throw std::domain_error("psi evaluated outside its open support");
    double v;
    if (kind_ == PsiKind::AnalyticFormula) {
      v = eval_(p) / scale_;
    } else {
      const double lp = std::log(p);
      auto it = std::upper_bound(grid_p_.begin(), grid_p_.end(), lp);
      std::size_t j = static_cast<std::size_t>(
          std::clamp<std::ptrdiff_t>(it - grid_p_.begin(), 1,
                                     static_cast<std::ptrdiff_t>(grid_p_.size()) - 1));
      const double t = (lp - grid_p_[j - 1]) / (grid_p_[j] - grid_p_[j - 1]);
      v = std::exp(grid_v_[j - 1] + t * (grid_v_[j] - grid_v_[j - 1])) / scale_;
    }
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::runtime_error("psi produced a non-positive value");
    return v;
  }

 private:
  PsiFunction(PsiKind kind, std::string family, double param,
              std::function<double(double)> eval, double lo, double hi,
              Normalize normalize)
      : kind_(kind),
        family_(std::move(family)),
        param_(param),
        eval_(std::move(eval)),
        lo_(lo),
        hi_(hi) {
    if (!(lo_ >= 1.0) || !(hi_ > lo_))
      throw std::invalid_argument("psi support: need 1 <= a < b");
    if (kind_ == PsiKind::AnalyticFormula) finish_normalization(normalize);
  }

  void finish_normalization(Normalize normalize) {
    constexpr double tol = 1e-3;
    const double cap = unbounded() ? 400.0 : hi_;
    double inf_v = kInf;
    for (double p : numeric::log_spaced(lo_ * (1.0 + 1e-9) + 1e-12,
                                        cap * (hi_ == kInf ? 1.0 : 1.0 - 1e-9),
                                        512)) {
      const double v = raw_value(p);
      if (!std::isfinite(v) || !(v > 0.0))
        throw std::invalid_argument("psi must be finite positive on support");
      inf_v = std::min(inf_v, v);
    }
    if (normalize == Normalize::Enforce && inf_v < 1.0 - tol) {
      scale_ = inf_v;
      normalized_ = true;
    } else {
      scale_ = 1.0;
      normalized_ = inf_v >= 1.0 - tol;
    }
  }

  double raw_value(double p) const {
    if (kind_ == PsiKind::AnalyticFormula) return eval_(p);
    const double lp = std::log(p);
    auto it = std::upper_bound(grid_p_.begin(), grid_p_.end(), lp);
    std::size_t j = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(it - grid_p_.begin(), 1,
                                   static_cast<std::ptrdiff_t>(grid_p_.size()) - 1));
    const double t = (lp - grid_p_[j - 1]) / (grid_p_[j] - grid_p_[j - 1]);
    return std::exp(grid_v_[j - 1] + t * (grid_v_[j] - grid_v_[j - 1]));
  }

  PsiKind kind_;
  std::string family_;
  double param_ = 0.0;
  std::function<double(double)> eval_;
  std::vector<double> grid_p_, grid_v_;  // stored as logs
  double lo_, hi_;
  double scale_ = 1.0;
  bool normalized_ = true;
};

/// p-th absolute moment root p -> |f|_{p,mu} of a fixed function or variable.
class MomentCurve {
 public:
  MomentCurve(std::function<double(double)> eval, double lo, double hi)
      : eval_(std::move(eval)), lo_(lo), hi_(hi) {
    if (!(lo_ >= 1.0) || !(hi_ > lo_))
      throw std::invalid_argument("moment curve: need 1 <= lo < hi");
  }

  static MomentCurve constant(double c, double lo = 1.0, double hi = kInf) {
    return MomentCurve([c](double) { return c; }, lo, hi);
  }

  /// |sigma Z|_p for Z standard normal, from the closed-form Gamma expression.
  static MomentCurve gaussian(double sigma = 1.0, double lo = 1.0,
                              double hi = kInf);

  /// Empirical curve from equally weighted absolute sample values.
  static MomentCurve from_samples(std::vector<double> abs_values, double lo,
                                  double hi) {
    if (abs_values.empty())
      throw std::invalid_argument("moment curve: empty sample");
    for (auto& v : abs_values) v = std::abs(v);
    auto eval = [vals = std::move(abs_values)](double p) {
      double m = 0.0;
      for (double v : vals) m = std::max(m, v);
      if (m == 0.0) return 0.0;
      double acc = 0.0;
      for (double v : vals) acc += std::pow(v / m, p);
      return m * std::pow(acc / static_cast<double>(vals.size()), 1.0 / p);
    };
    return MomentCurve(std::move(eval), lo, hi);
  }

  double operator()(double p) const {
    if (!(p > lo_) || !(p < hi_))
      throw std::domain_error("moment curve evaluated outside validity range");
    return eval_(p);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::function<double(double)> eval_;
  double lo_, hi_;
};

/// (E|Z|^p)^{1/p} for standard normal Z.
inline double gaussian_abs_moment(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("gaussian moment: p > 0");
  const double log_moment = 0.5 * p * std::numbers::ln2 +
                            std::lgamma(0.5 * (p + 1.0)) -
                            0.5 * std::log(std::numbers::pi);
  return std::exp(log_moment / p);
}

inline MomentCurve MomentCurve::gaussian(double sigma, double lo, double hi) {
  return MomentCurve(
      [sigma](double p) { return sigma * gaussian_abs_moment(p); }, lo, hi);
}

struct ExponentGrid {
  int nodes = 128;      // >= 32 required by gls_norm
  double p_cap = 400.0; // stands in for b when the support is unbounded
};

/// sup_p |f|_p / psi(p) over the common support, by log-grid scan plus one
/// golden-section refinement around the grid argmax. Returns +inf when the
/// ratio still climbs across the final quarter of an unbounded-support grid
/// and tops ten times its median.
inline double gls_norm(const MomentCurve& curve, const PsiFunction& psi,
                       ExponentGrid grid = {}) {
  if (grid.nodes < 32)
    throw std::invalid_argument("gls_norm: grid needs >= 32 nodes");
  const double lo = std::max(curve.lo(), psi.support_lo());
  double hi = std::min(curve.hi(), psi.support_hi());
  const bool capped = hi == kInf;
  if (capped) hi = grid.p_cap;
  if (!(lo < hi))
    throw std::invalid_argument("gls_norm: empty domain intersection");

  const double a = lo * (1.0 + 1e-9) + 1e-12;
  const double b = capped ? hi : hi * (1.0 - 1e-9);
  const auto ps = numeric::log_spaced(a, b, grid.nodes);
  std::vector<double> ratio(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double m = curve(ps[i]);
    if (!std::isfinite(m))
      throw std::runtime_error("gls_norm: non-finite moment value");
    ratio[i] = m / psi(ps[i]);
  }

  if (capped) {
    const std::size_t tail_start = ps.size() - ps.size() / 4;
    bool climbing = true;
    for (std::size_t i = tail_start; i + 1 < ps.size() && climbing; ++i)
      climbing = ratio[i + 1] > ratio[i] * (1.0 + 1e-12);
    std::vector<double> sorted = ratio;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (climbing && ratio.back() > 10.0 * median) return kInf;
  }

  std::size_t k = static_cast<std::size_t>(
      std::max_element(ratio.begin(), ratio.end()) - ratio.begin());
  double best = ratio[k];
  const double bl = ps[k > 0 ? k - 1 : k];
  const double br = ps[std::min(k + 1, ps.size() - 1)];
  if (br > bl) {
    auto obj = [&](double p) { return curve(p) / psi(p); };
    best = std::max(best, numeric::golden_max(obj, bl, br).value);
  }
  return best;
}

/// Pointwise supremum of the family's moment curves, tabulated on a log grid.
/// Values are kept verbatim (no renormalization) so that every family member
/// has unit norm relative to the returned function.
inline PsiFunction natural_function(const std::vector<MomentCurve>& family,
                                    int nodes = 256, double p_cap = 400.0) {
  if (family.empty())
    throw std::invalid_argument("natural_function: empty family");
  double lo = 1.0, hi = kInf;
  for (const auto& c : family) {
    lo = std::max(lo, c.lo());
    hi = std::min(hi, c.hi());
  }
  if (hi == kInf) hi = p_cap;
  if (!(lo < hi))
    throw std::invalid_argument("natural_function: empty common interval");
  const auto ps = numeric::log_spaced(lo * (1.0 + 1e-9) + 1e-12, hi, nodes);
  std::vector<double> vs(ps.size(), 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (const auto& c : family) vs[i] = std::max(vs[i], c(ps[i]));
    if (!std::isfinite(vs[i]) || !(vs[i] > 0.0))
      throw std::runtime_error("natural_function: unbounded or degenerate sup");
  }
  return PsiFunction::tabulated(ps, vs, Normalize::Keep);
}

inline constexpr double kRosenthalConstant = 1.77638;
inline constexpr double kRosenthalConstantSymmetric = 1.53573;

/// psi_R(p) = C p / ln(p) * psi(p) on (2, b). The constant drops to the
/// symmetric-case value when the summands are symmetrically distributed.
inline PsiFunction rosenthal_transform(const PsiFunction& psi,
                                       bool symmetric = false) {
  if (!(psi.support_hi() > 2.0))
    throw std::invalid_argument("rosenthal_transform: support_hi <= 2");
  const double c =
      symmetric ? kRosenthalConstantSymmetric : kRosenthalConstant;
  const double lo = std::max(2.0, psi.support_lo());
  auto f = [psi, c](double p) { return c * p / std::log(p) * psi(p); };
  return PsiFunction::analytic("rosenthal(" + psi.family() + ")", std::move(f),
                               lo, psi.support_hi(), Normalize::Keep);
}

}  // namespace rifield
