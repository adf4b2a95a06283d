#pragma once

// Two-mode Gaussian state algebra in the vacuum-variance-1/2 convention.
// Quadrature ordering is (X_A, Y_A, X_B, Y_B) throughout.

#include <Eigen/Dense>

namespace cvrelay {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kPhysicalityTolerance = 1e-10;

/// The 2x2 blocks of [[A, D], [D^T, B]].
struct BlockDecomposition {
  Mat2 a;
  Mat2 b;
  Mat2 d;

  Mat4 assemble() const;
};

/// Symmetric 4x4 matrix of quadrature second moments.
///
/// Construction symmetrizes inputs whose asymmetry is at round-off level and
/// rejects anything larger. Physicality is not enforced here because
/// check_physicality must be able to inspect unphysical candidates; every
/// operation that requires a physical state checks it on entry.
class CovarianceMatrix4 {
 public:
  explicit CovarianceMatrix4(const Mat4& entries);

  static CovarianceMatrix4 vacuum();
  /// Two-mode squeezed vacuum with squeezing parameter r.
  static CovarianceMatrix4 tmsv(double r);
  static CovarianceMatrix4 from_blocks(const Mat2& a, const Mat2& b, const Mat2& d);

  const Mat4& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  BlockDecomposition blocks() const;

  friend bool operator==(const CovarianceMatrix4& x, const CovarianceMatrix4& y) { return x.m_ == y.m_; }

 private:
  Mat4 m_;
};

/// Covariance plus mean quadratures.
struct TwoModeGaussianState {
  CovarianceMatrix4 cov;
  Vec4 drift;

  explicit TwoModeGaussianState(CovarianceMatrix4 c, const Vec4& d = Vec4::Zero());
};

struct PhysicalityReport {
  bool physical;
  /// Smallest symplectic eigenvalue of V (not partially transposed).
  double min_symplectic_eigenvalue;
};

PhysicalityReport check_physicality(const CovarianceMatrix4& v);

/// Smallest symplectic eigenvalue of the partially transposed covariance matrix.
/// Throws DomainError for unphysical input.
double min_symplectic_eigenvalue_pt(const CovarianceMatrix4& v);

/// E_N = max(0, -ln 2 eta_-).
double log_negativity(const CovarianceMatrix4& v);

Mat2 rotation(double theta);

/// Applies R(theta_a) (+) R(theta_b) to covariance and drift.
TwoModeGaussianState local_rotation(const TwoModeGaussianState& state, double theta_a, double theta_b);
CovarianceMatrix4 local_rotation(const CovarianceMatrix4& v, double theta_a, double theta_b);

}  // namespace cvrelay
