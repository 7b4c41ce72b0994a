#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ccran/optimizer.hpp"

namespace ccran {

const char* to_string(SmoothKind kind) {
  switch (kind) {
    case SmoothKind::kLog: return "log";
    case SmoothKind::kExp: return "exp";
    case SmoothKind::kAtan: return "atan";
  }
  return "unknown";
}

const char* to_string(ThetaRule rule) {
  return rule == ThetaRule::kGradientMax ? "gradient_max" : "fixed";
}

void DcConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (!(eta >= 0.0)) fail("eta", "must be >= 0");
  if (!(epsilon > 0.0)) fail("epsilon", "must be > 0");
  if (!(rho > 0.0)) fail("rho", "must be > 0");
  if (!(cluster_threshold > 0.0)) fail("cluster_threshold", "must be > 0");
  if (max_iters < 1) fail("max_iters", "must be >= 1");
  if (theta_rule == ThetaRule::kFixed && !(fixed_theta > 0.0)) fail("theta", "must be > 0");
  if (!(rank_tol > 0.0)) fail("rank_tol", "must be > 0");
  if (n_randomizations < 1) fail("n_randomizations", "must be >= 1");
  if (!(solver_tol > 0.0)) fail("solver_tol", "must be > 0");
}

double smooth_value(SmoothKind kind, double x, double theta) {
  switch (kind) {
    case SmoothKind::kLog: return std::log1p(x / theta);
    case SmoothKind::kExp: return -std::expm1(-x / theta);
    case SmoothKind::kAtan: return 2.0 / std::numbers::pi * std::atan(x / theta);
  }
  return 0.0;
}

double smooth_derivative(SmoothKind kind, double x, double theta) {
  switch (kind) {
    case SmoothKind::kLog: return 1.0 / (x + theta);
    case SmoothKind::kExp: return std::exp(-x / theta) / theta;
    case SmoothKind::kAtan: {
      const double r = x / theta;
      return 2.0 / std::numbers::pi / (theta * r * r + theta);
    }
  }
  return 0.0;
}

double theta_star(SmoothKind kind, double x, double epsilon) {
  if (kind == SmoothKind::kLog) return epsilon;
  return std::max(x, epsilon);
}

Eigen::MatrixXcd gradient_matrix(SmoothKind kind, const Eigen::MatrixXcd& W,
                                 const Eigen::MatrixXcd& J, double theta) {
  const double x = (W * J).trace().real();
  return smooth_derivative(kind, x, theta) * J;
}

double normalization_factor(SmoothKind kind) {
  switch (kind) {
    case SmoothKind::kLog: return 1.0;
    case SmoothKind::kExp: return std::numbers::e;
    case SmoothKind::kAtan: return std::numbers::pi;
  }
  return 1.0;
}

namespace {

double scale(const DcConfig& cfg) {
  return cfg.normalize ? normalization_factor(cfg.smooth) : 1.0;
}

}  // namespace

double surrogate_weight(const DcConfig& cfg, double x) {
  const double theta = cfg.theta_rule == ThetaRule::kFixed
                           ? cfg.fixed_theta
                           : theta_star(cfg.smooth, x, cfg.epsilon);
  return scale(cfg) * smooth_derivative(cfg.smooth, x, theta);
}

double surrogate_potential(const DcConfig& cfg, double x) {
  if (cfg.theta_rule == ThetaRule::kFixed || cfg.smooth == SmoothKind::kLog) {
    const double theta =
        cfg.theta_rule == ThetaRule::kFixed ? cfg.fixed_theta : cfg.epsilon;
    return scale(cfg) * smooth_value(cfg.smooth, x, theta);
  }
  // theta = max(x, eps): below eps the surrogate is f(x; eps); above it the
  // weight is f'(x; x) = 1/(c x), which integrates to a logarithm.
  const double eps = cfg.epsilon;
  const double c = normalization_factor(cfg.smooth);
  if (x <= eps) return scale(cfg) * smooth_value(cfg.smooth, x, eps);
  return scale(cfg) * (smooth_value(cfg.smooth, eps, eps) + std::log(x / eps) / c);
}

}  // namespace ccran
