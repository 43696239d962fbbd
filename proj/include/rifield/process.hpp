#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rifield/metric_space.hpp"
#include "rifield/parallel.hpp"
#include "rifield/psi.hpp"
#include "rifield/ri_space.hpp"
#include "rifield/rng.hpp"
#include "rifield/stats.hpp"

namespace rifield {

/// Random field over the points of a finite space. Sampling is a pure
/// function of the seed, so replicas derived by counter are reproducible on
/// any thread layout. Gaussian fields factor the covariance by symmetric
/// eigendecomposition with negative eigenvalues clipped at zero
/// (tolerance 1e-8 * trace).
class ProcessModel {
 public:
  enum class Kind { GaussianField, BoundedTrig, LacunarySeries, Custom };

  static ProcessModel gaussian(std::shared_ptr<const MetricMeasureSpace> space,
                               Eigen::MatrixXd covariance) {
    ProcessModel m(Kind::GaussianField, std::move(space));
    const auto n = static_cast<Eigen::Index>(m.space_->size());
    if (covariance.rows() != n || covariance.cols() != n)
      throw std::invalid_argument("gaussian field: covariance size mismatch");
    if (!covariance.isApprox(covariance.transpose(), 1e-12))
      throw std::invalid_argument("gaussian field: covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
    const double floor = -1e-8 * covariance.trace();
    for (Eigen::Index i = 0; i < n; ++i)
      if (es.eigenvalues()[i] < floor)
        throw std::invalid_argument(
            "gaussian field: covariance not positive semidefinite");
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    m.factor_ = es.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
    m.covariance_ = std::move(covariance);
    m.mean_zero_ = true;
    return m;
  }

  /// Smooth bounded centered field sum_j c_j (U_j cos(j pi t) + V_j sin(j pi t))
  /// with U, V independent uniform on [-sqrt3, sqrt3] (unit variance), over
  /// the 1-d coordinates of the space.
  static ProcessModel bounded_trig(
      std::shared_ptr<const MetricMeasureSpace> space,
      std::vector<double> coeffs) {
    ProcessModel m(Kind::BoundedTrig, std::move(space));
    if (!m.space_->has_coords())
      throw std::invalid_argument("bounded field: space needs coordinates");
    if (coeffs.empty())
      throw std::invalid_argument("bounded field: empty coefficients");
    m.coeffs_ = std::move(coeffs);
    m.init_trig_tables(std::numbers::pi, 1.0);
    m.mean_zero_ = true;
    m.build_trig_covariance();
    return m;
  }

  /// Lacunary trigonometric series sum_k a_k (e_k cos(n_k t) + e'_k sin(n_k t))
  /// with Rademacher signs and geometric frequencies n_k = ratio^k (ratio > 1).
  static ProcessModel lacunary(std::shared_ptr<const MetricMeasureSpace> space,
                               std::vector<double> coeffs,
                               double ratio = 2.0) {
    if (!(ratio > 1.0))
      throw std::invalid_argument("lacunary field: frequency ratio > 1");
    ProcessModel m(Kind::LacunarySeries, std::move(space));
    if (!m.space_->has_coords())
      throw std::invalid_argument("lacunary field: space needs coordinates");
    if (coeffs.empty())
      throw std::invalid_argument("lacunary field: empty coefficients");
    m.coeffs_ = std::move(coeffs);
    m.init_trig_tables(1.0, ratio);
    m.mean_zero_ = true;
    m.build_trig_covariance();
    return m;
  }

  static ProcessModel custom(std::shared_ptr<const MetricMeasureSpace> space,
                             std::function<void(std::uint64_t,
                                                std::span<double>)> sampler,
                             bool mean_zero,
                             std::optional<Eigen::MatrixXd> covariance = {},
                             std::function<double(std::size_t, std::size_t,
                                                  double)> increment_moments =
                                 nullptr) {
    ProcessModel m(Kind::Custom, std::move(space));
    m.sampler_ = std::move(sampler);
    m.mean_zero_ = mean_zero;
    m.increment_moments_ = std::move(increment_moments);
    if (covariance) {
      const auto n = static_cast<Eigen::Index>(m.space_->size());
      if (covariance->rows() != n || covariance->cols() != n)
        throw std::invalid_argument("custom field: covariance size mismatch");
      m.covariance_ = std::move(*covariance);
    }
    return m;
  }

  Kind kind() const { return kind_; }
  bool mean_zero() const { return mean_zero_; }
  const MetricMeasureSpace& space() const { return *space_; }
  std::shared_ptr<const MetricMeasureSpace> space_ptr() const { return space_; }

  bool has_covariance() const { return covariance_.size() > 0; }
  const Eigen::MatrixXd& covariance() const {
    if (!has_covariance()) throw std::runtime_error("field: no covariance");
    return covariance_;
  }

  /// Closed-form moment curves exist for the Gaussian kind and for custom
  /// models that declared an increment oracle.
  bool has_moment_oracle() const {
    return kind_ == Kind::GaussianField ||
           static_cast<bool>(increment_moments_);
  }

  double moment(std::size_t i, double p) const {
    if (kind_ == Kind::GaussianField)
      return std::sqrt(std::max(0.0, covariance_(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(i)))) *
             gaussian_abs_moment(p);
    throw std::runtime_error("field: no marginal moment oracle");
  }

  double increment_moment(std::size_t i, std::size_t j, double p) const {
    if (kind_ == Kind::GaussianField) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      const double var =
          covariance_(a, a) - 2.0 * covariance_(a, b) + covariance_(b, b);
      return std::sqrt(std::max(0.0, var)) * gaussian_abs_moment(p);
    }
    if (increment_moments_) return increment_moments_(i, j, p);
    throw std::runtime_error("field: no increment moment oracle");
  }

  std::vector<double> sample(std::uint64_t seed) const {
    const std::size_t n = space_->size();
    std::vector<double> path(n, 0.0);
    rng::Stream s{seed};
    switch (kind_) {
      case Kind::GaussianField: {
        Eigen::VectorXd z(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = s.normal();
        Eigen::VectorXd x = factor_ * z;
        for (std::size_t i = 0; i < n; ++i)
          path[i] = x[static_cast<Eigen::Index>(i)];
        break;
      }
      case Kind::BoundedTrig: {
        const double amp = std::sqrt(3.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
          const double u = s.uniform(-amp, amp);
          const double v = s.uniform(-amp, amp);
          for (std::size_t i = 0; i < n; ++i)
            path[i] += coeffs_[k] * (u * cos_table_[k][i] + v * sin_table_[k][i]);
        }
        break;
      }
      case Kind::LacunarySeries: {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
          const double e1 = s.sign();
          const double e2 = s.sign();
          for (std::size_t i = 0; i < n; ++i)
            path[i] += coeffs_[k] * (e1 * cos_table_[k][i] + e2 * sin_table_[k][i]);
        }
        break;
      }
      case Kind::Custom:
        sampler_(seed, path);
        break;
    }
    return path;
  }

 private:
  ProcessModel(Kind kind, std::shared_ptr<const MetricMeasureSpace> space)
      : kind_(kind), space_(std::move(space)) {
    if (!space_) throw std::invalid_argument("field: null space");
  }

  void init_trig_tables(double base_freq, double ratio) {
    const std::size_t n = space_->size();
    cos_table_.assign(coeffs_.size(), std::vector<double>(n));
    sin_table_.assign(coeffs_.size(), std::vector<double>(n));
    freqs_.resize(coeffs_.size());
    double f = base_freq;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      freqs_[k] = kind_ == Kind::BoundedTrig ? base_freq * (k + 1.0) : f;
      for (std::size_t i = 0; i < n; ++i) {
        cos_table_[k][i] = std::cos(freqs_[k] * space_->coord(i));
        sin_table_[k][i] = std::sin(freqs_[k] * space_->coord(i));
      }
      f *= ratio;
    }
  }

  void build_trig_covariance() {
    const auto n = static_cast<Eigen::Index>(space_->size());
    covariance_.setZero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (std::size_t k = 0; k < coeffs_.size(); ++k)
          covariance_(i, j) += coeffs_[k] * coeffs_[k] *
                               std::cos(freqs_[k] * (space_->coord(static_cast<std::size_t>(i)) -
                                                     space_->coord(static_cast<std::size_t>(j))));
  }

  Kind kind_;
  std::shared_ptr<const MetricMeasureSpace> space_;
  bool mean_zero_ = false;
  std::vector<double> coeffs_, freqs_;
  std::vector<std::vector<double>> cos_table_, sin_table_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd factor_;
  std::function<void(std::uint64_t, std::span<double>)> sampler_;
  std::function<double(std::size_t, std::size_t, double)> increment_moments_;
};

/// S_n(t) = n^{-1/2} sum_i xi_i(t) with replica seeds derived by counter.
struct NormalizedSum {
  int n = 1;
  std::vector<double> values;
};

inline NormalizedSum sample_sn(const ProcessModel& model, int n,
                               std::uint64_t seed) {
  if (!model.mean_zero())
    throw std::invalid_argument("normalized sum: field must be mean zero");
  if (n < 1) throw std::invalid_argument("normalized sum: n >= 1");
  NormalizedSum out;
  out.n = n;
  out.values.assign(model.space().size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto path = model.sample(rng::derive(seed, static_cast<std::uint64_t>(i)));
    for (std::size_t t = 0; t < out.values.size(); ++t)
      out.values[t] += path[t];
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out.values) v *= scale;
  return out;
}

struct MomentEstimationBudget {
  int replicas = 2000;
  std::uint64_t seed = 1;
};

namespace detail {

/// Empirical moment curve of |xi(t_i) - xi(t_j)| from shared replicas,
/// valid up to p = ln(replicas) where empirical moments stay stable.
inline MomentCurve empirical_increment_curve(const ProcessModel& model,
                                             std::size_t i, std::size_t j,
                                             const MomentEstimationBudget& b) {
  std::vector<double> incr(static_cast<std::size_t>(b.replicas));
  for (int r = 0; r < b.replicas; ++r) {
    const auto path = model.sample(rng::derive(b.seed, static_cast<std::uint64_t>(r)));
    incr[static_cast<std::size_t>(r)] = std::abs(path[i] - path[j]);
  }
  const double hi = std::max(2.5, std::log(static_cast<double>(b.replicas)));
  return MomentCurve::from_samples(std::move(incr), 1.0, hi);
}

}  // namespace detail

/// Natural distance d_psi(t, s) = || xi(t) - xi(s) ||_{G(psi)} from the
/// increment moment oracle when available, otherwise from a Monte Carlo
/// moment estimate with exponents capped at ln(replicas).
inline double natural_distance(const ProcessModel& model,
                               const PsiFunction& psi, std::size_t i,
                               std::size_t j,
                               std::optional<MomentEstimationBudget> budget =
                                   {}) {
  if (i == j) return 0.0;
  if (model.has_moment_oracle()) {
    MomentCurve curve(
        [&model, i, j](double p) { return model.increment_moment(i, j, p); },
        1.0, kInf);
    return gls_norm(curve, psi);
  }
  if (!budget)
    throw std::invalid_argument(
        "natural_distance: no moment oracle and no sampling budget");
  return gls_norm(detail::empirical_increment_curve(model, i, j, *budget), psi);
}

namespace detail {

inline std::shared_ptr<MetricMeasureSpace> distance_space(
    const ProcessModel& model, std::vector<std::vector<double>> d,
    bool estimated) {
  double dmax = 0.0;
  for (const auto& row : d)
    for (double v : row) dmax = std::max(dmax, v);
  const double tol = estimated ? 0.05 * dmax + 1e-9 : 1e-9 * (1.0 + dmax);
  std::vector<double> w(model.space().size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = model.space().weight(i);
  return std::make_shared<MetricMeasureSpace>(
      MetricMeasureSpace::from_distance_matrix(std::move(d), std::move(w),
                                               tol));
}

}  // namespace detail

/// Space carrying the pairwise natural distances (weights preserved).
inline std::shared_ptr<MetricMeasureSpace> natural_distance_space(
    const ProcessModel& model, const PsiFunction& psi,
    std::optional<MomentEstimationBudget> budget = {}) {
  const std::size_t n = model.space().size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d[i][j] = d[j][i] = natural_distance(model, psi, i, j, budget);
  return detail::distance_space(model, std::move(d),
                                !model.has_moment_oracle());
}

struct RhoEstimate {
  double value = 0.0;
  /// True when the value is the moment-inequality upper bound for the whole
  /// family of normalized sums; false when it is a sampled lower estimate.
  bool upper_bound = false;
};

/// rho_psi(t, s) = sup_n || S_n(t) - S_n(s) ||_{G(psi_R)}. With a moment
/// oracle the sum-moment inequality collapses the supremum to the G(psi)
/// norm of the single-replica increment; with samplers only, the supremum is
/// estimated over the provided n values and flagged a lower estimate.
inline RhoEstimate rho_distance(const ProcessModel& model,
                                const PsiFunction& psi, std::size_t i,
                                std::size_t j,
                                const std::vector<int>& n_set = {1, 4, 16},
                                std::optional<MomentEstimationBudget> budget =
                                    {}) {
  if (!model.mean_zero())
    throw std::invalid_argument("rho_distance: field must be mean zero");
  if (i == j) return {0.0, true};
  if (model.has_moment_oracle()) {
    MomentCurve curve(
        [&model, i, j](double p) { return model.increment_moment(i, j, p); },
        1.0, kInf);
    return {gls_norm(curve, psi), true};
  }
  if (!budget)
    throw std::invalid_argument("rho_distance: no moment source");
  const PsiFunction psi_r =
      psi.unbounded() ? rosenthal_transform(psi) : psi;
  double best = 0.0;
  std::uint64_t stream = 0;
  for (int n : n_set) {
    std::vector<double> incr(static_cast<std::size_t>(budget->replicas));
    for (int r = 0; r < budget->replicas; ++r) {
      const auto sn = sample_sn(model, n,
                                rng::derive(budget->seed, stream + static_cast<std::uint64_t>(r)));
      incr[static_cast<std::size_t>(r)] = std::abs(sn.values[i] - sn.values[j]);
    }
    stream += static_cast<std::uint64_t>(budget->replicas);
    const double hi =
        std::max(psi_r.support_lo() + 0.5,
                 std::log(static_cast<double>(budget->replicas)));
    MomentCurve curve = MomentCurve::from_samples(std::move(incr),
                                                  1.0, hi);
    best = std::max(best, gls_norm(curve, psi_r));
  }
  return {best, false};
}

/// Space carrying the pairwise sum-stable distances rho_psi.
inline std::shared_ptr<MetricMeasureSpace> rho_distance_space(
    const ProcessModel& model, const PsiFunction& psi,
    const std::vector<int>& n_set = {1, 4, 16},
    std::optional<MomentEstimationBudget> budget = {}) {
  const std::size_t n = model.space().size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d[i][j] = d[j][i] = rho_distance(model, psi, i, j, n_set, budget).value;
  return detail::distance_space(model, std::move(d),
                                !model.has_moment_oracle());
}

struct MixedNormEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int replicas = 0;
};

/// Mixed (Bochner) norm || ||xi(.)||_L ||_{G(psi)} estimated from replica
/// path norms; exponents are capped at ln(replicas). The standard error
/// comes from ten-batch means.
inline MixedNormEstimate empirical_mixed_norm(const ProcessModel& model,
                                              const RISpaceSpec& spec,
                                              const PsiFunction& psi,
                                              int replicas,
                                              std::uint64_t seed) {
  if (replicas < 100)
    throw std::invalid_argument("empirical_mixed_norm: replicas >= 100");
  std::vector<double> norms(static_cast<std::size_t>(replicas));
  parallel::for_each_index(norms.size(), [&](std::size_t r) {
    const auto path = model.sample(rng::derive(seed, r));
    norms[r] = ri_norm(path, spec);
  });
  for (std::size_t r = 0; r < norms.size(); ++r)
    if (!std::isfinite(norms[r]))
      throw std::runtime_error(
          "empirical_mixed_norm: non-finite path norm at replica " +
          std::to_string(r) + " (seed " + std::to_string(seed) + ")");
  const double p_hi = std::max(psi.support_lo() + 0.5,
                               std::log(static_cast<double>(replicas)));
  auto estimate_from = [&](const std::vector<double>& xs) {
    return gls_norm(MomentCurve::from_samples(std::vector<double>(xs), 1.0, p_hi),
                    psi);
  };
  MixedNormEstimate out;
  out.replicas = replicas;
  out.estimate = estimate_from(norms);
  constexpr int kBatches = 10;
  std::vector<double> batch_estimates;
  const std::size_t per = norms.size() / kBatches;
  if (per >= 10) {
    for (int b = 0; b < kBatches; ++b) {
      std::vector<double> chunk(norms.begin() + b * static_cast<long>(per),
                                norms.begin() + (b + 1) * static_cast<long>(per));
      batch_estimates.push_back(estimate_from(chunk));
    }
    out.std_error = stats::sample_std(batch_estimates) /
                    std::sqrt(static_cast<double>(kBatches));
  }
  return out;
}

struct CltCheckRow {
  int n = 0;
  double ks_distance = 0.0;
  int replicas = 0;
};

/// Kolmogorov-Smirnov distances between the laws of ||S_n||_L and the
/// Gaussian limit ||S_inf||_L simulated from the field covariance.
inline std::vector<CltCheckRow> clt_empirical_check(
    const ProcessModel& model, const RISpaceSpec& spec,
    const std::vector<int>& n_list, int replicas, std::uint64_t seed) {
  if (!model.has_covariance())
    throw std::invalid_argument("clt check: covariance required");
  const ProcessModel limit =
      ProcessModel::gaussian(model.space_ptr(), model.covariance());
  std::vector<double> limit_norms(static_cast<std::size_t>(replicas));
  parallel::for_each_index(limit_norms.size(), [&](std::size_t r) {
    limit_norms[r] = ri_norm(limit.sample(rng::derive(seed, r)), spec);
  });
  std::vector<CltCheckRow> rows;
  std::uint64_t stream = 1u << 20;
  for (int n : n_list) {
    std::vector<double> norms(static_cast<std::size_t>(replicas));
    parallel::for_each_index(norms.size(), [&](std::size_t r) {
      norms[r] =
          ri_norm(sample_sn(model, n, rng::derive(seed, stream + r)).values,
                  spec);
    });
    stream += static_cast<std::uint64_t>(replicas);
    rows.push_back({n, stats::ks_distance(norms, limit_norms), replicas});
  }
  return rows;
}

/// l_xi(g) = int_T xi(t) g(t) mu(dt) on the discretized carrier.
inline double functional_apply(std::span<const double> path,
                               std::span<const double> g,
                               const MetricMeasureSpace& space) {
  if (path.size() != space.size() || g.size() != space.size())
    throw std::invalid_argument("functional_apply: grid mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i)
    acc += space.weight(i) * path[i] * g[i];
  return acc;
}

}  // namespace rifield
