#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "rifield/metric_space.hpp"
#include "rifield/numeric.hpp"

namespace rifield {

/// Entropy/ball model feeding the certificate series and integrals. Analytic
/// kinds carry closed forms N(eps) and r(delta) on a unit-mass carrier;
/// the empirical kind queries a finite space (optionally a second space for
/// the ball function when it uses the base distance instead of the
/// psi-distance).
class EntropyModel {
 public:
  enum class Kind { PowerLaw, LogCorrected, Empirical };

  /// N(eps) <= eps^-kappa, r(delta) <= delta^s; requires 0 < kappa < 1 + s.
  static EntropyModel power_law(double kappa, double s) {
    if (!(kappa > 0.0) || !(s > 0.0) || !(kappa < 1.0 + s))
      throw std::invalid_argument(
          "power-law model: need kappa > 0, s > 0, kappa < 1 + s");
    EntropyModel m(Kind::PowerLaw);
    m.kappa_ = kappa;
    m.s_ = s;
    return m;
  }

  /// N(eps) <= eps^-(1+s) |ln eps|^-beta on (0, 1/e), kappa = 1 + s, beta > 1.
  /// For eps >= 1/e the bound is held at its 1/e limit e^{1+s}.
  static EntropyModel log_corrected(double s, double beta) {
    if (!(s > 0.0) || !(beta > 1.0))
      throw std::invalid_argument("log-corrected model: need s > 0, beta > 1");
    EntropyModel m(Kind::LogCorrected);
    m.s_ = s;
    m.kappa_ = 1.0 + s;
    m.beta_ = beta;
    return m;
  }

  static EntropyModel empirical(
      std::shared_ptr<const MetricMeasureSpace> cover_space,
      std::shared_ptr<const MetricMeasureSpace> ball_space = nullptr) {
    if (!cover_space) throw std::invalid_argument("empirical model: null space");
    if (ball_space && ball_space->size() != cover_space->size())
      throw std::invalid_argument("empirical model: space size mismatch");
    EntropyModel m(Kind::Empirical);
    m.cover_space_ = std::move(cover_space);
    m.ball_space_ = ball_space ? std::move(ball_space) : m.cover_space_;
    return m;
  }

  Kind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  double s() const { return s_; }
  double beta() const { return beta_; }
  double delta_exponent() const { return 1.0 + s_ - kappa_; }
  double lambda() const { return kappa_ / delta_exponent(); }
  const MetricMeasureSpace& cover_space() const { return *cover_space_; }
  const MetricMeasureSpace& ball_space() const { return *ball_space_; }

  double covering_upper(double eps) const {
    switch (kind_) {
      case Kind::PowerLaw:
        return std::max(1.0, std::pow(eps, -kappa_));
      case Kind::LogCorrected: {
        constexpr double inv_e = 0.36787944117144233;
        if (eps >= inv_e) return std::exp(kappa_);
        return std::max(1.0, std::pow(eps, -kappa_) *
                                 std::pow(-std::log(eps), -beta_));
      }
      case Kind::Empirical:
        return static_cast<double>(covering_number(*cover_space_, eps).upper);
    }
    return 1.0;
  }

  double ball(double delta) const {
    if (kind_ == Kind::Empirical) return ball_function(*ball_space_, delta);
    return std::min(1.0, std::pow(delta, s_));
  }

  /// Discretization floor below which empirical N and r are constant.
  double resolution() const {
    return kind_ == Kind::Empirical ? cover_space_->resolution() : 0.0;
  }

 private:
  explicit EntropyModel(Kind k) : kind_(k) {}

  Kind kind_;
  double kappa_ = 1.0;
  double s_ = 1.0;
  double beta_ = 2.0;
  std::shared_ptr<const MetricMeasureSpace> cover_space_;
  std::shared_ptr<const MetricMeasureSpace> ball_space_;
};

}  // namespace rifield
