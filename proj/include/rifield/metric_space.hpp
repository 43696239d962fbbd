#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rifield/numeric.hpp"
#include "rifield/rng.hpp"

namespace rifield {

/// Finite discretization of a metric measure space: point ids 0..n-1 with
/// nonnegative weights and a symmetric distance matrix. Construction
/// validates zero diagonal, exact symmetry and (sampled above 200 points)
/// the triangle inequality.
class MetricMeasureSpace {
 public:
  /// triangle_tol loosens the triangle-inequality validation for distance
  /// matrices that come from statistical estimation.
  static MetricMeasureSpace from_distance_matrix(
      std::vector<std::vector<double>> dist, std::vector<double> weights,
      double triangle_tol = 1e-12) {
    return MetricMeasureSpace(std::move(dist), std::move(weights), {},
                              triangle_tol);
  }

  static MetricMeasureSpace from_points(
      std::vector<std::vector<double>> coords, std::vector<double> weights) {
    const std::size_t n = coords.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      if (coords[i].size() != coords[0].size())
        throw std::invalid_argument("space: ragged coordinates");
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t d = 0; d < coords[i].size(); ++d) {
          const double diff = coords[i][d] - coords[j][d];
          s += diff * diff;
        }
        dist[i][j] = dist[j][i] = std::sqrt(s);
      }
    }
    return MetricMeasureSpace(std::move(dist), std::move(weights),
                              std::move(coords));
  }

  /// n equally weighted points on [lo, hi] (weights 1/n).
  static MetricMeasureSpace uniform_grid(int n, double lo, double hi) {
    if (n < 1) throw std::invalid_argument("space: n >= 1");
    std::vector<std::vector<double>> coords;
    coords.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      coords.push_back({n == 1 ? lo : lo + (hi - lo) * i / (n - 1)});
    return from_points(std::move(coords),
                       std::vector<double>(static_cast<std::size_t>(n),
                                           1.0 / n));
  }

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  double total_weight() const { return total_weight_; }
  double distance(std::size_t i, std::size_t j) const { return dist_[i][j]; }
  double diameter() const { return diameter_; }
  /// Smallest nonzero pairwise distance; 0 for a single point.
  double resolution() const { return resolution_; }
  bool has_coords() const { return !coords_.empty(); }
  const std::vector<std::vector<double>>& coords() const { return coords_; }
  double coord(std::size_t i) const { return coords_[i][0]; }

 private:
  MetricMeasureSpace(std::vector<std::vector<double>> dist,
                     std::vector<double> weights,
                     std::vector<std::vector<double>> coords,
                     double triangle_tol = 1e-12)
      : dist_(std::move(dist)),
        weights_(std::move(weights)),
        coords_(std::move(coords)),
        triangle_tol_(triangle_tol) {
    const std::size_t n = weights_.size();
    if (n == 0) throw std::invalid_argument("space: empty");
    if (dist_.size() != n)
      throw std::invalid_argument("space: matrix/weight size mismatch");
    for (const auto& row : dist_)
      if (row.size() != n)
        throw std::invalid_argument("space: distance matrix not square");
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("space: weights must be >= 0");
      total_weight_ += w;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (dist_[i][i] != 0.0)
        throw std::invalid_argument("space: nonzero self-distance");
      for (std::size_t j = i + 1; j < n; ++j) {
        if (dist_[i][j] != dist_[j][i])
          throw std::invalid_argument("space: distance matrix not symmetric");
        if (!(dist_[i][j] >= 0.0) || !std::isfinite(dist_[i][j]))
          throw std::invalid_argument("space: invalid distance");
        diameter_ = std::max(diameter_, dist_[i][j]);
        if (dist_[i][j] > 0.0)
          resolution_ = std::min(resolution_, dist_[i][j]);
      }
    }
    if (resolution_ == kInf) resolution_ = 0.0;
    validate_triangle();
  }

  void validate_triangle() const {
    const double tol = triangle_tol_;
    const std::size_t n = size();
    auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
      if (dist_[i][j] > dist_[i][k] + dist_[k][j] + tol)
        throw std::invalid_argument("space: triangle inequality violated");
    };
    if (n <= 200) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) check(i, j, k);
    } else {
      rng::Stream s{0x7261746Dull};
      for (int t = 0; t < 10000; ++t) {
        const auto i = static_cast<std::size_t>(s.next_bits() % n);
        const auto j = static_cast<std::size_t>(s.next_bits() % n);
        const auto k = static_cast<std::size_t>(s.next_bits() % n);
        check(i, j, k);
      }
    }
  }

  std::vector<std::vector<double>> dist_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> coords_;
  double triangle_tol_ = 1e-12;
  double total_weight_ = 0.0;
  double diameter_ = 0.0;
  double resolution_ = kInf;
};

/// r(T, delta) = sup_t mu[B(t, delta)] over closed balls.
inline double ball_function(const MetricMeasureSpace& space, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("ball_function: delta > 0");
  double best = 0.0;
  for (std::size_t t = 0; t < space.size(); ++t) {
    double mass = 0.0;
    for (std::size_t s = 0; s < space.size(); ++s)
      if (space.distance(t, s) <= delta) mass += space.weight(s);
    best = std::max(best, mass);
  }
  return best;
}

struct CoveringBracket {
  int upper = 0;  // greedy farthest-point-first cover size (valid cover)
  int lower = 0;  // maximal > 2eps packing size (certified lower bound)
};

namespace detail {

inline std::size_t greedy_seed(const MetricMeasureSpace& space) {
  std::size_t seed = 0;
  for (std::size_t i = 1; i < space.size(); ++i)
    if (space.weight(i) > space.weight(seed)) seed = i;
  return seed;
}

inline std::vector<std::size_t> greedy_cover_centers(
    const MetricMeasureSpace& space, double eps) {
  const std::size_t n = space.size();
  std::vector<std::size_t> centers;
  std::vector<double> dist_to_centers(n, kInf);
  std::size_t next = greedy_seed(space);
  while (true) {
    centers.push_back(next);
    for (std::size_t i = 0; i < n; ++i)
      dist_to_centers[i] = std::min(dist_to_centers[i],
                                    space.distance(next, i));
    double far = -1.0;
    std::size_t far_id = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (dist_to_centers[i] <= eps) continue;
      if (dist_to_centers[i] > far) {
        far = dist_to_centers[i];
        far_id = i;
      }
    }
    if (far_id == n) break;
    next = far_id;
  }
  return centers;
}

}  // namespace detail

/// Bracket for the covering number N(T, d, eps): the greedy cover gives the
/// upper bound, a maximal 2eps-separated set the lower one; the exact value
/// always lies in between.
inline CoveringBracket covering_number(const MetricMeasureSpace& space,
                                       double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("covering_number: eps > 0");
  CoveringBracket out;
  out.upper =
      static_cast<int>(detail::greedy_cover_centers(space, eps).size());
  std::vector<std::size_t> packing;
  for (std::size_t i = 0; i < space.size(); ++i) {
    bool separated = true;
    for (std::size_t c : packing)
      if (space.distance(i, c) <= 2.0 * eps) {
        separated = false;
        break;
      }
    if (separated) packing.push_back(i);
  }
  out.lower = static_cast<int>(packing.size());
  return out;
}

/// H(T, d, eps) = ln N, evaluated on the covering upper bound.
inline double entropy(const MetricMeasureSpace& space, double eps) {
  return std::log(static_cast<double>(covering_number(space, eps).upper));
}

struct NetLevel {
  double radius = 0.0;
  std::vector<std::size_t> centers;
  std::vector<std::size_t> projection;  // point id -> net point id
};

struct NetHierarchy {
  double scale_base = 0.5;
  std::vector<NetLevel> levels;
  bool resolution_limited = false;
};

/// Nested q^n-nets with deterministic nearest-point projections (ties broken
/// by lowest id). Level 0 is the single fixed point t0 (the greedy seed).
/// Construction stops once q^n falls below the space resolution.
inline NetHierarchy build_net_hierarchy(const MetricMeasureSpace& space,
                                        double q, int max_levels = 32) {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("net hierarchy: q in (0,1)");
  NetHierarchy out;
  out.scale_base = q;
  const std::size_t n = space.size();

  NetLevel level0;
  level0.radius = 1.0;
  level0.centers = {detail::greedy_seed(space)};
  level0.projection.assign(n, level0.centers[0]);
  out.levels.push_back(std::move(level0));

  double radius = 1.0;
  for (int lvl = 1; lvl < max_levels; ++lvl) {
    radius *= q;
    if (space.resolution() > 0.0 && radius < space.resolution()) {
      out.resolution_limited = true;
      break;
    }
    NetLevel level;
    level.radius = radius;
    level.centers = detail::greedy_cover_centers(space, radius);
    level.projection.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = level.centers[0];
      for (std::size_t c : level.centers)
        if (space.distance(i, c) < space.distance(i, best) ||
            (space.distance(i, c) == space.distance(i, best) && c < best))
          best = c;
      level.projection[i] = best;
    }
    out.levels.push_back(std::move(level));
  }
  return out;
}

}  // namespace rifield
