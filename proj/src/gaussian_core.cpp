#include "cvrelay/gaussian_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvrelay/errors.hpp"

namespace cvrelay {
namespace {

constexpr double kSymmetryTolerance = 1e-8;
constexpr double kDiscriminantClamp = 1e-12;

struct SymplecticInvariants {
  double sigma;
  double det;
};

// Smallest root of x^2 - sigma x + det = 0, i.e. nu_-^2, written without the
// cancellation of (sigma - sqrt(sigma^2 - 4 det)) / 2.
double smaller_root(const SymplecticInvariants& inv, bool clamp_only_round_off) {
  double disc = inv.sigma * inv.sigma - 4.0 * inv.det;
  if (disc < 0.0) {
    if (clamp_only_round_off && disc < -kDiscriminantClamp * std::max(1.0, inv.sigma * inv.sigma)) {
      std::ostringstream os;
      os << "symplectic discriminant negative beyond tolerance (" << disc << ")";
      throw NumericalError(os.str(), -disc);
    }
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  const double denom = inv.sigma + root;
  if (denom > 0.0) return 2.0 * inv.det / denom;
  return 0.5 * (inv.sigma - root);
}

}  // namespace

Mat4 BlockDecomposition::assemble() const {
  Mat4 m;
  m << a, d, d.transpose(), b;
  return m;
}

CovarianceMatrix4::CovarianceMatrix4(const Mat4& entries) {
  if (!entries.allFinite()) throw DomainError("covariance matrix has non-finite entries");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    std::ostringstream os;
    os << "covariance matrix is not symmetric (max |V_ij - V_ji| = " << asym << ")";
    throw DomainError(os.str());
  }
  m_ = 0.5 * (entries + entries.transpose());
}

CovarianceMatrix4 CovarianceMatrix4::vacuum() { return CovarianceMatrix4(kVacuumVariance * Mat4::Identity()); }

CovarianceMatrix4 CovarianceMatrix4::tmsv(double r) {
  const Mat2 z = Vec2(1.0, -1.0).asDiagonal();
  const Mat2 diag = 0.5 * std::cosh(2.0 * r) * Mat2::Identity();
  return from_blocks(diag, diag, 0.5 * std::sinh(2.0 * r) * z);
}

CovarianceMatrix4 CovarianceMatrix4::from_blocks(const Mat2& a, const Mat2& b, const Mat2& d) {
  return CovarianceMatrix4(BlockDecomposition{a, b, d}.assemble());
}

BlockDecomposition CovarianceMatrix4::blocks() const {
  return {m_.topLeftCorner<2, 2>(), m_.bottomRightCorner<2, 2>(), m_.topRightCorner<2, 2>()};
}

TwoModeGaussianState::TwoModeGaussianState(CovarianceMatrix4 c, const Vec4& d) : cov(std::move(c)), drift(d) {
  if (!drift.allFinite()) throw DomainError("drift vector has non-finite entries");
}

PhysicalityReport check_physicality(const CovarianceMatrix4& v) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(v.matrix());
  if (es.eigenvalues().minCoeff() <= 0.0) return {false, 0.0};

  // nu_k^2 are the eigenvalues of -K Omega V Omega K with K = V^(1/2). This is a
  // symmetric eigenproblem, so pure states (a double root) keep full precision.
  Mat4 omega = Mat4::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  const Mat4 k = es.operatorSqrt();
  const Mat4 s = -(k * omega * v.matrix() * omega * k);
  Eigen::SelfAdjointEigenSolver<Mat4> ss(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  const double nu = std::sqrt(std::max(0.0, ss.eigenvalues().minCoeff()));
  return {nu >= kVacuumVariance - kPhysicalityTolerance, nu};
}

double min_symplectic_eigenvalue_pt(const CovarianceMatrix4& v) {
  const auto report = check_physicality(v);
  if (!report.physical) {
    std::ostringstream os;
    os << "covariance matrix is not physical (min symplectic eigenvalue " << report.min_symplectic_eigenvalue << ")";
    throw DomainError(os.str());
  }
  const auto blk = v.blocks();
  const SymplecticInvariants inv{blk.a.determinant() + blk.b.determinant() - 2.0 * blk.d.determinant(),
                                 v.matrix().fullPivLu().determinant()};
  return std::sqrt(std::max(0.0, smaller_root(inv, true)));
}

double log_negativity(const CovarianceMatrix4& v) {
  const double eta = min_symplectic_eigenvalue_pt(v);
  return std::max(0.0, -std::log(2.0 * eta));
}

Mat2 rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

namespace {
Mat4 rotation4(double theta_a, double theta_b) {
  Mat4 r = Mat4::Zero();
  r.topLeftCorner<2, 2>() = rotation(theta_a);
  r.bottomRightCorner<2, 2>() = rotation(theta_b);
  return r;
}
}  // namespace

CovarianceMatrix4 local_rotation(const CovarianceMatrix4& v, double theta_a, double theta_b) {
  const Mat4 r = rotation4(theta_a, theta_b);
  return CovarianceMatrix4(r * v.matrix() * r.transpose());
}

TwoModeGaussianState local_rotation(const TwoModeGaussianState& state, double theta_a, double theta_b) {
  const Mat4 r = rotation4(theta_a, theta_b);
  return TwoModeGaussianState(CovarianceMatrix4(r * state.cov.matrix() * r.transpose()), r * state.drift);
}

}  // namespace cvrelay
