#pragma once

// Closed-form blind-search baselines and least-squares scaling fits.
//
// M independent agents each hit the target with probability p per step, so
// the halting time is geometric with per-step success q = 1 - (1-p)^M.
// q is evaluated as -expm1(M log1p(-p)) to keep precision when Mp is tiny.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace nkarena {

struct BlindSearchModel {
  double p = 1.0;
  unsigned m = 1;

  BlindSearchModel(double success_probability, unsigned population) : p(success_probability), m(population) {
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("success probability must lie in (0, 1]");
    if (m < 1) throw ParameterError("population size must be >= 1");
  }

  /// p = 2^-N for a unique maximum; p = 2^-(N-1) for the two degenerate
  /// ferromagnetic maxima.
  static BlindSearchModel for_length(unsigned n, unsigned m, bool degenerate = false) {
    if (n < 1 || n > 1000) throw ParameterError("string length out of range");
    if (degenerate && n < 2) throw ParameterError("degenerate model needs N >= 2");
    return {std::ldexp(1.0, -static_cast<int>(degenerate ? n - 1 : n)), m};
  }

  /// log(1-p)^M, exact for p = 1.
  double log_miss() const noexcept {
    return p == 1.0 ? -std::numeric_limits<double>::infinity() : m * std::log1p(-p);
  }

  /// 1 - (1-p)^M
  double step_success() const noexcept { return -std::expm1(log_miss()); }
};

/// P(t* = t) = [1-(1-p)^M] (1-p)^{M(t-1)}, t >= 1.
inline double halting_pmf(const BlindSearchModel& model, std::uint64_t t) {
  if (t < 1) throw ParameterError("halting time must be >= 1");
  if (t == 1) return model.step_success();
  return model.step_success() * std::exp(model.log_miss() * static_cast<double>(t - 1));
}

/// <t*> = 1 / [1-(1-p)^M]
inline double mean_halting_time(const BlindSearchModel& model) { return 1.0 / model.step_success(); }

/// pi_M(t) = 1 - (1-p)^{Mt}. Infinite t gives 1.
inline double success_cdf(const BlindSearchModel& model, double t) {
  if (!(t >= 1.0)) throw ParameterError("time must be >= 1");
  if (std::isinf(t)) return 1.0;
  return -std::expm1(model.log_miss() * t);
}

/// <C> = M <t*> / 2^N
inline double mean_cost(const BlindSearchModel& model, unsigned n) {
  return model.m * mean_halting_time(model) / std::ldexp(1.0, static_cast<int>(n));
}

enum class ScalingModel {
  n_log_n,      // y = a N + b N ln N
  linear,       // y = a N + b
  quadratic,    // y = c N^2
  exponential,  // y = c e^{gamma N}, fitted as ln y = ln c + gamma N
  power,        // y = c N^gamma, fitted as ln y = ln c + gamma ln N
};

inline std::string_view to_string(ScalingModel model) {
  switch (model) {
    case ScalingModel::n_log_n: return "aN+bNlnN";
    case ScalingModel::linear: return "aN+b";
    case ScalingModel::quadratic: return "cN^2";
    case ScalingModel::exponential: return "c*exp(gN)";
    case ScalingModel::power: return "c*N^g";
  }
  return "?";
}

struct ScalingFit {
  ScalingModel model = ScalingModel::linear;
  /// n_log_n: {a, b}; linear: {a, b}; quadratic: {c}; exponential: {c, gamma};
  /// power: {c, gamma}.
  std::vector<double> coefficients;
  /// Coefficient of determination, in log space for exponential/power fits.
  double r_squared = 0.0;

  double predict(double n) const {
    switch (model) {
      case ScalingModel::n_log_n: return coefficients[0] * n + coefficients[1] * n * std::log(n);
      case ScalingModel::linear: return coefficients[0] * n + coefficients[1];
      case ScalingModel::quadratic: return coefficients[0] * n * n;
      case ScalingModel::exponential: return coefficients[0] * std::exp(coefficients[1] * n);
      case ScalingModel::power: return coefficients[0] * std::pow(n, coefficients[1]);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

struct ScalingPoint {
  double n = 0.0;
  double y = 0.0;
};

inline ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingModel model) {
  if (points.size() < 3) throw FitError("scaling fit needs at least 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i].n == points[j].n) throw FitError("scaling fit needs distinct N values");
    }
  }
  const bool log_space = model == ScalingModel::exponential || model == ScalingModel::power;
  const Eigen::Index rows = static_cast<Eigen::Index>(points.size());
  const Eigen::Index cols = model == ScalingModel::quadratic ? 1 : 2;
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double n = points[static_cast<std::size_t>(r)].n;
    const double y = points[static_cast<std::size_t>(r)].y;
    if (!(n > 0.0)) throw FitError("scaling fit needs positive N");
    if (log_space && !(y > 0.0)) throw FitError("log-space fit needs positive y");
    switch (model) {
      case ScalingModel::n_log_n: design.row(r) << n, n * std::log(n); break;
      case ScalingModel::linear: design.row(r) << n, 1.0; break;
      case ScalingModel::quadratic: design(r, 0) = n * n; break;
      case ScalingModel::exponential: design.row(r) << 1.0, n; break;
      case ScalingModel::power: design.row(r) << 1.0, std::log(n); break;
    }
    target(r) = log_space ? std::log(y) : y;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < cols) throw FitError("degenerate design matrix in scaling fit");
  const Eigen::VectorXd beta = qr.solve(target);

  ScalingFit fit;
  fit.model = model;
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  if (log_space) fit.coefficients[0] = std::exp(fit.coefficients[0]);

  const Eigen::VectorXd residual = target - design * beta;
  const double ss_res = residual.squaredNorm();
  const double ss_tot = (target.array() - target.mean()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace nkarena
