#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace tdri {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnitTolerance = 1e-6;

// A zero vector is returned unchanged; callers that need a unit result check
// for it and raise their own error.
inline Vector normalized(const Vector& v) {
  const double n = v.norm();
  if (n < 1e-300) return v;
  return v / n;
}

inline bool is_unit(const Vector& v, double tol = kUnitTolerance) {
  return std::abs(v.norm() - 1.0) <= tol;
}

// Exact element-wise equality; differently sized vectors compare unequal.
inline bool same(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.size() == 0 || a == b);
}

inline bool same(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

inline bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

// Throws DimensionMismatch on size disagreement.
double cosine(const Vector& a, const Vector& b);

}  // namespace tdri
