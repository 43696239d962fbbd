#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rifield/certify.hpp"
#include "rifield/metric_space.hpp"
#include "rifield/parallel.hpp"
#include "rifield/ri_space.hpp"
#include "rifield/rng.hpp"
#include "rifield/stats.hpp"

namespace rifield {

/// Parametric integral I(t) = int_X g(t, x) nu(dx) with a normalized base
/// measure. The parameter grid is the 1-d coordinate set of the space; the
/// sampler draws x ~ nu from a deterministic stream.
struct ParametricIntegralProblem {
  std::shared_ptr<const MetricMeasureSpace> space;
  std::function<double(double, double)> integrand;      // g(t, x)
  std::function<double(rng::Stream&)> draw;             // x ~ nu
  std::function<double(double)> truth;                  // optional exact I(t)

  const MetricMeasureSpace& grid() const { return *space; }
  bool has_truth() const { return static_cast<bool>(truth); }
};

/// Depending-trials estimate I_n(t) = n^{-1} sum_i g(t, eta_i): one shared
/// draw stream across every parameter value.
inline std::vector<double> estimate_integral(
    const ParametricIntegralProblem& problem, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("estimate_integral: n >= 1");
  if (!problem.space || !problem.space->has_coords())
    throw std::invalid_argument("estimate_integral: need coordinate grid");
  const std::size_t m = problem.space->size();
  std::vector<double> acc(m, 0.0);
  rng::Stream stream{seed};
  for (long i = 0; i < n; ++i) {
    const double x = problem.draw(stream);
    for (std::size_t j = 0; j < m; ++j) {
      const double g = problem.integrand(problem.space->coord(j), x);
      if (!std::isfinite(g))
        throw std::runtime_error("estimate_integral: non-finite integrand at draw " +
                                 std::to_string(i) + " (seed " +
                                 std::to_string(seed) + ")");
      acc[j] += g;
    }
  }
  for (auto& v : acc) v /= static_cast<double>(n);
  return acc;
}

struct ConfidenceRegion {
  std::vector<double> estimate;
  long n = 0;
  double u0 = 0.0;       // (1 - delta)-quantile of the simulated limit norm
  double radius = 0.0;   // u0 / sqrt(n)
  double reliability = 0.0;
  std::vector<std::string> warnings;
};

/// Asymptotic confidence region in the L-norm: the centered covariance of
/// g(t, eta) is estimated from the same draws (plug-in), the Gaussian limit
/// field is simulated from it, and u0 is the empirical (1-delta)-quantile of
/// its norm. Fewer than 1000 limit replicas are refused.
inline ConfidenceRegion confidence_region(
    const ParametricIntegralProblem& problem, long n, const RISpaceSpec& spec,
    double delta, std::uint64_t seed, int limit_replicas = 10000,
    const CertificateReport* certificate = nullptr) {
  if (!(delta > 0.0) || !(delta <= 0.5))
    throw std::invalid_argument("confidence_region: delta in (0, 0.5]");
  if (limit_replicas < 1000)
    throw std::invalid_argument(
        "confidence_region: refused, limit_replicas < 1000 gives a noisy "
        "quantile");
  const std::size_t m = problem.space->size();
  if (spec.space().size() != m)
    throw std::invalid_argument("confidence_region: space mismatch");

  Eigen::MatrixXd g_rows(static_cast<Eigen::Index>(m), n);
  rng::Stream stream{seed};
  for (long i = 0; i < n; ++i) {
    const double x = problem.draw(stream);
    for (std::size_t j = 0; j < m; ++j) {
      const double g = problem.integrand(problem.space->coord(j), x);
      if (!std::isfinite(g))
        throw std::runtime_error("confidence_region: non-finite integrand");
      g_rows(static_cast<Eigen::Index>(j), i) = g;
    }
  }
  ConfidenceRegion out;
  out.n = n;
  out.reliability = 1.0 - delta;
  out.estimate.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    out.estimate[j] = g_rows.row(static_cast<Eigen::Index>(j)).mean();
  Eigen::MatrixXd centered = g_rows.colwise() -
                             g_rows.rowwise().mean();
  Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double floor = -1e-8 * std::max(cov.trace(), 1e-300);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] < floor)
      throw std::runtime_error(
          "confidence_region: estimated covariance not clippable to PSD");
  Eigen::MatrixXd factor = es.eigenvectors() *
                           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::vector<double> norms(static_cast<std::size_t>(limit_replicas));
  parallel::for_each_index(norms.size(), [&](std::size_t r) {
    rng::Stream zs{rng::derive(seed, 0x10000u + r)};
    Eigen::VectorXd z(static_cast<Eigen::Index>(m));
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = zs.normal();
    Eigen::VectorXd zeta = factor * z;
    std::vector<double> path(m);
    for (std::size_t j = 0; j < m; ++j)
      path[j] = zeta[static_cast<Eigen::Index>(j)];
    norms[r] = ri_norm(path, spec);
  });
  out.u0 = stats::empirical_quantile(std::move(norms), 1.0 - delta);
  out.radius = out.u0 / std::sqrt(static_cast<double>(n));
  if (n < 100)
    out.warnings.push_back(
        "n may be below the asymptotic regime; coverage is not guaranteed");
  if (certificate && certificate->certified() &&
      (certificate->theorem == Theorem::CltSeries ||
       certificate->theorem == Theorem::CltIntegral)) {
    out.warnings.push_back(std::string("limit law backed by a ") +
                           to_string(certificate->theorem) + " certificate");
  } else {
    out.warnings.push_back(
        "field is not CLT-certified; the region is asymptotic-heuristic");
  }
  return out;
}

struct CoverageResult {
  double coverage = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  int hits = 0;
  int repetitions = 0;
  std::vector<std::string> warnings;
};

/// Fraction of independent repetitions whose confidence region contains the
/// exact integral, with a 95% Wilson interval.
inline CoverageResult coverage_experiment(
    const ParametricIntegralProblem& problem, long n, const RISpaceSpec& spec,
    double delta, int repetitions, std::uint64_t seed,
    int limit_replicas = 10000) {
  if (!problem.has_truth())
    throw std::invalid_argument("coverage_experiment: truth required");
  if (repetitions < 1)
    throw std::invalid_argument("coverage_experiment: repetitions >= 1");
  const std::size_t m = problem.space->size();
  std::vector<double> truth(m);
  for (std::size_t j = 0; j < m; ++j)
    truth[j] = problem.truth(problem.space->coord(j));

  CoverageResult out;
  out.repetitions = repetitions;
  std::vector<double> err(m);
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto region = confidence_region(
        problem, n, spec, delta, rng::derive(seed, static_cast<std::uint64_t>(rep)),
        limit_replicas);
    if (rep == 0) out.warnings = region.warnings;
    for (std::size_t j = 0; j < m; ++j)
      err[j] = region.estimate[j] - truth[j];
    if (ri_norm(err, spec) <= region.radius) ++out.hits;
  }
  out.coverage = static_cast<double>(out.hits) / repetitions;
  const auto ci = stats::wilson_interval(out.hits, repetitions);
  out.ci_lo = ci.lo;
  out.ci_hi = ci.hi;
  return out;
}

}  // namespace rifield
