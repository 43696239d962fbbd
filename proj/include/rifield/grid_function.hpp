#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rifield/numeric.hpp"

namespace rifield {

enum class Extrapolation { Forbid, Linear };

/// A scalar function tabulated on strictly increasing abscissae, linearly
/// interpolated between nodes. Grids built from a formula keep the evaluator
/// so extremum searches can refine between nodes.
class ScalarFunctionGrid {
 public:
  static ScalarFunctionGrid from_samples(std::vector<double> nodes,
                                         std::vector<double> values,
                                         Extrapolation extrap =
                                             Extrapolation::Forbid) {
    return ScalarFunctionGrid(std::move(nodes), std::move(values), nullptr,
                              extrap);
  }

  static ScalarFunctionGrid from_function(std::function<double(double)> f,
                                          double lo, double hi, int n,
                                          Extrapolation extrap =
                                              Extrapolation::Forbid) {
    if (n < 2) throw std::invalid_argument("grid: need >= 2 nodes");
    return from_function_on_nodes(std::move(f), numeric::lin_spaced(lo, hi, n),
                                  extrap);
  }

  static ScalarFunctionGrid from_function_on_nodes(
      std::function<double(double)> f, std::vector<double> xs,
      Extrapolation extrap = Extrapolation::Forbid) {
    std::vector<double> vs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = f(xs[i]);
    return ScalarFunctionGrid(std::move(xs), std::move(vs), std::move(f),
                              extrap);
  }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return nodes_.size(); }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  Extrapolation extrapolation() const { return extrap_; }
  bool has_evaluator() const { return static_cast<bool>(eval_); }
  double evaluate_raw(double y) const { return eval_(y); }

  double value(double y) const {
    if (y < nodes_.front() || y > nodes_.back()) {
      if (extrap_ == Extrapolation::Forbid)
        throw std::domain_error("grid: evaluation outside nodes forbidden");
      if (y < nodes_.front())
        return values_.front() + left_slope() * (y - nodes_.front());
      return values_.back() + right_slope() * (y - nodes_.back());
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
    std::size_t j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        it - nodes_.begin(), 1, static_cast<std::ptrdiff_t>(nodes_.size()) - 1));
    const double t = (y - nodes_[j - 1]) / (nodes_[j] - nodes_[j - 1]);
    return values_[j - 1] + t * (values_[j] - values_[j - 1]);
  }

  double left_slope() const {
    return (values_[1] - values_[0]) / (nodes_[1] - nodes_[0]);
  }
  double right_slope() const {
    const std::size_t n = nodes_.size();
    return (values_[n - 1] - values_[n - 2]) / (nodes_[n - 1] - nodes_[n - 2]);
  }

  /// Discrete convexity: successive secant slopes nondecreasing within tol.
  bool is_convex(double tol = 1e-9) const {
    for (std::size_t i = 2; i < nodes_.size(); ++i) {
      const double s0 =
          (values_[i - 1] - values_[i - 2]) / (nodes_[i - 1] - nodes_[i - 2]);
      const double s1 =
          (values_[i] - values_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
      if (s1 < s0 - tol) return false;
    }
    return true;
  }

  bool is_nondecreasing(double tol = 1e-12) const {
    for (std::size_t i = 1; i < values_.size(); ++i)
      if (values_[i] < values_[i - 1] - tol) return false;
    return true;
  }

  bool is_increasing(double tol = 0.0) const {
    for (std::size_t i = 1; i < values_.size(); ++i)
      if (!(values_[i] > values_[i - 1] + tol)) return false;
    return true;
  }

  /// Two-column numeric text with a one-line "# tag" header.
  void write_table(std::ostream& os, std::string_view tag) const {
    os << "# " << tag << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      os << nodes_[i] << " " << values_[i] << "\n";
  }

  static ScalarFunctionGrid read_table(std::istream& is,
                                       Extrapolation extrap =
                                           Extrapolation::Forbid) {
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      double x, v;
      if (ls >> x >> v) {
        xs.push_back(x);
        vs.push_back(v);
      }
    }
    return from_samples(std::move(xs), std::move(vs), extrap);
  }

 private:
  ScalarFunctionGrid(std::vector<double> nodes, std::vector<double> values,
                     std::function<double(double)> eval, Extrapolation extrap)
      : nodes_(std::move(nodes)),
        values_(std::move(values)),
        eval_(std::move(eval)),
        extrap_(extrap) {
    if (nodes_.size() != values_.size() || nodes_.size() < 2)
      throw std::invalid_argument("grid: need >= 2 matching nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!std::isfinite(nodes_[i]) || !std::isfinite(values_[i]))
        throw std::invalid_argument("grid: non-finite entry");
      if (i && !(nodes_[i] > nodes_[i - 1]))
        throw std::invalid_argument("grid: nodes must strictly increase");
    }
  }

  std::vector<double> nodes_, values_;
  std::function<double(double)> eval_;
  Extrapolation extrap_;
};

}  // namespace rifield
