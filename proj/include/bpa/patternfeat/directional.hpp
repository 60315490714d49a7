#pragma once

// Circular statistics for planar angles and the scatter (orientation) matrix
// of 3-D incident directions.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>

#include <Eigen/Dense>

namespace bpa::patternfeat {

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Mean resultant length of angles given in degrees.
inline std::optional<double> mean_resultant_length(std::span<const double> degrees) {
  if (degrees.empty()) return std::nullopt;
  double c = 0.0;
  double s = 0.0;
  for (double a : degrees) {
    c += std::cos(deg_to_rad(a));
    s += std::sin(deg_to_rad(a));
  }
  const double n = static_cast<double>(degrees.size());
  return std::hypot(c / n, s / n);
}

/// 1 - |mean unit vector|; 0 for identical angles, 1 for full cancellation.
inline std::optional<double> angular_variance(std::span<const double> degrees) {
  const auto r = mean_resultant_length(degrees);
  if (!r) return std::nullopt;
  return std::clamp(1.0 - *r, 0.0, 1.0);
}

/// Direction of the mean unit vector in degrees, (-180, 180]. nullopt when the
/// mean vector vanishes.
inline std::optional<double> circular_mean(std::span<const double> degrees) {
  if (degrees.empty()) return std::nullopt;
  double c = 0.0;
  double s = 0.0;
  for (double a : degrees) {
    c += std::cos(deg_to_rad(a));
    s += std::sin(deg_to_rad(a));
  }
  if (std::hypot(c, s) < 1e-12 * static_cast<double>(degrees.size())) return std::nullopt;
  return rad_to_deg(std::atan2(s, c));
}

/// Unit incident direction for impact angle alpha and orientation beta (radians).
inline Eigen::Vector3d incident_vector(double alpha, double beta) {
  return {-std::cos(alpha) * std::cos(beta), -std::cos(alpha) * std::sin(beta), std::sin(alpha)};
}

struct ScatterSummary {
  /// Eigenvalues of T, descending; values below 1e-12 * trace are snapped to 0.
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  /// t2 / t3; nullopt when t3 == 0.
  std::optional<double> spheri_ratio;
  /// t1 / t2; nullopt when t2 == 0.
  std::optional<double> principal_ratio;
  /// det(T) = t1 * t2 * t3.
  double spheri_det = 0.0;
};

inline Eigen::Matrix3d scatter_matrix(std::span<const Eigen::Vector3d> vectors) {
  Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
  for (const auto& m : vectors) t += m * m.transpose();
  return t;
}

inline std::optional<ScatterSummary> scatter_summary(std::span<const Eigen::Vector3d> vectors) {
  if (vectors.empty()) return std::nullopt;
  const Eigen::Matrix3d t = scatter_matrix(vectors);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t, Eigen::EigenvaluesOnly);
  // Eigen returns ascending order.
  Eigen::Vector3d ev = solver.eigenvalues().reverse();
  const double snap = 1e-12 * std::max(1.0, t.trace());
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ev[i]) <= snap) ev[i] = 0.0;
  }
  ScatterSummary s;
  s.eigenvalues = ev;
  s.count = vectors.size();
  if (ev[2] > 0.0) s.spheri_ratio = ev[1] / ev[2];
  if (ev[1] > 0.0) s.principal_ratio = ev[0] / ev[1];
  s.spheri_det = ev[0] * ev[1] * ev[2];
  return s;
}

}  // namespace bpa::patternfeat
