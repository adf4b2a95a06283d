#include "cvrelay/teleport.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "cvrelay/constants.hpp"
#include "cvrelay/errors.hpp"

namespace cvrelay {

namespace {

using cd = std::complex<double>;

const Mat2 kZ = (Mat2() << 1.0, 0.0, 0.0, -1.0).finished();

// Symplectic vector xi with D(mu) = exp(i xi^T r).
Vec2 symplectic_vector(cd mu) { return std::sqrt(2.0) * Vec2(mu.imag(), -mu.real()); }

// Wigner characteristic function Tr[rho D(mu)] of a single-mode Gaussian state.
cd characteristic_1(const Mat2& v, const Vec2& d, cd mu) {
  const Vec2 xi = symplectic_vector(mu);
  return std::exp(cd(-0.5 * xi.dot(v * xi), xi.dot(d)));
}

cd characteristic_2(const TwoModeGaussianState& s, cd mu1, cd mu2) {
  Vec4 xi;
  xi << symplectic_vector(mu1), symplectic_vector(mu2);
  return std::exp(cd(-0.5 * xi.dot(s.cov.matrix() * xi), xi.dot(s.drift)));
}

struct Objective {
  const TwoModeGaussianState& channel;
  double operator()(double ta, double tb) const {
    return fidelity_closed_form(local_rotation(channel.cov, ta, tb));
  }
};

}  // namespace

Mat2 teleportation_gamma(const CovarianceMatrix4& channel) {
  const BlockDecomposition b = channel.blocks();
  const Mat2 v_in = kVacuumVariance * Mat2::Identity();
  return 2.0 * v_in + kZ * b.a * kZ + b.b - (kZ * b.d + b.d.transpose() * kZ);
}

double fidelity_closed_form(const CovarianceMatrix4& channel) {
  const double det = teleportation_gamma(channel).determinant();
  if (!(det > 0.0)) throw NumericalError(fmt::format("teleportation Gamma has non-positive determinant {:.6g}", det));
  double f = 1.0 / std::sqrt(det);
  if (f > 1.0) {
    if (f > 1.0 + 1e-9) throw NumericalError(fmt::format("fidelity {:.12g} exceeds 1", f), f - 1.0);
    f = 1.0;
  }
  return f;
}

double fidelity_closed_form(const TwoModeGaussianState& channel) { return fidelity_closed_form(channel.cov); }

std::complex<double> balancing_displacement(const TwoModeGaussianState& channel) {
  const Vec2 d = (kZ * channel.drift.head<2>() - channel.drift.tail<2>()) / std::sqrt(2.0);
  return {d(0), d(1)};
}

OracleResult fidelity_characteristic_oracle(const TwoModeGaussianState& channel, std::complex<double> delta) {
  const auto phys = check_physicality(channel.cov);
  if (!phys.physical) throw DomainError("teleportation channel is unphysical");

  // |Phi_in|^2 = exp(-|mu|^2) for a coherent input, envelope std 1/sqrt(2).
  const double sigma = 1.0 / std::sqrt(2.0);
  const double half_width = 8.0 * sigma;
  const Mat2 v_in = kVacuumVariance * Mat2::Identity();
  const Vec2 d_in(0.3, -0.2);  // arbitrary: only |Phi_in|^2 enters

  // Grid resolution from the full Gaussian and its oscillation frequency.
  const double lambda_max = Eigen::SelfAdjointEigenSolver<Mat2>(teleportation_gamma(channel.cov)).eigenvalues().maxCoeff();
  const double sigma_min = 1.0 / std::sqrt(2.0 * lambda_max);
  const Vec2 w = std::sqrt(2.0) * (channel.drift.tail<2>() - kZ * channel.drift.head<2>()) +
                 2.0 * Vec2(delta.real(), delta.imag());
  const double spacing = std::min(sigma_min / 2.0, constants::pi / (w.norm() + 1.0));
  const int base = std::max(161, static_cast<int>(std::ceil(2.0 * half_width / spacing)) + 1);
  if (base > 8001) throw NumericalError("characteristic-function grid would exceed 8001 nodes per axis");

  auto integrate = [&](int n) {
    const double h = 2.0 * half_width / (n - 1);
    double sum = 0.0, comp = 0.0;
    for (int i = 0; i < n; ++i) {
      const double mr = -half_width + i * h;
      const double wr = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      for (int j = 0; j < n; ++j) {
        const double mi = -half_width + j * h;
        const double wi = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        const cd mu(mr, mi);
        const double in2 = std::norm(characteristic_1(v_in, d_in, mu));
        const cd ch = std::conj(characteristic_2(channel, std::conj(mu), mu));
        const cd shift = std::exp(delta * std::conj(mu) - std::conj(delta) * mu);
        const double term = wr * wi * (in2 * ch * shift).real();
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
      }
    }
    return (sum + comp) * h * h / constants::pi;
  };

  const double coarse = integrate(base);
  const double fine = integrate(2 * base - 1);
  const double residual = std::abs(fine - coarse);
  if (residual > 1e-9) {
    throw NumericalError(fmt::format("characteristic-function quadrature residual {:.3g}", residual), residual);
  }
  return {fine, residual, 2 * base - 1};
}

OracleResult fidelity_characteristic_oracle(const TwoModeGaussianState& channel) {
  return fidelity_characteristic_oracle(channel, balancing_displacement(channel));
}

double fidelity_bound(double log_neg) {
  if (!(log_neg >= 0.0)) throw DomainError("log-negativity must be non-negative");
  return 1.0 / (1.0 + std::exp(-log_neg));
}

FidelityReport optimize_over_rotations(const TwoModeGaussianState& channel) {
  const Objective f{channel};
  constexpr int kGrid = 64;
  const double step = 2.0 * constants::pi / kGrid;

  double best = f(0.0, 0.0);
  double ba = 0.0, bb = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double v = f(i * step, j * step);
      if (v > best) {
        best = v;
        ba = i * step;
        bb = j * step;
      }
    }
  }

  // Local refinement: quadratic model from a 3x3 stencil, Newton step clipped
  // to the stencil, otherwise move to the best stencil point or shrink.
  double h = step / 2.0;
  for (int iter = 0; iter < 10000 && h >= 1e-8; ++iter) {
    std::array<std::array<double, 3>, 3> s{};
    double sb = best;
    int si = 1, sj = 1;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        s[i][j] = (i == 1 && j == 1) ? best : f(ba + (i - 1) * h, bb + (j - 1) * h);
        if (s[i][j] > sb) {
          sb = s[i][j];
          si = i;
          sj = j;
        }
      }
    }
    const double ga = (s[2][1] - s[0][1]) / (2 * h);
    const double gb = (s[1][2] - s[1][0]) / (2 * h);
    const double haa = (s[2][1] - 2 * best + s[0][1]) / (h * h);
    const double hbb = (s[1][2] - 2 * best + s[1][0]) / (h * h);
    const double hab = (s[2][2] - s[2][0] - s[0][2] + s[0][0]) / (4 * h * h);
    const double det = haa * hbb - hab * hab;
    bool moved = false;
    if (haa < 0 && det > 0) {
      double da = -(hbb * ga - hab * gb) / det;
      double db = -(haa * gb - hab * ga) / det;
      const double len = std::hypot(da, db);
      if (len > h) {
        da *= h / len;
        db *= h / len;
      }
      const double v = f(ba + da, bb + db);
      if (v > best && v >= sb) {
        best = v;
        ba += da;
        bb += db;
        moved = true;
      }
    }
    if (!moved && (si != 1 || sj != 1)) {
      best = sb;
      ba += (si - 1) * h;
      bb += (sj - 1) * h;
      moved = true;
    }
    if (!moved) h /= 2.0;
  }

  const double two_pi = 2.0 * constants::pi;
  ba = std::fmod(std::fmod(ba, two_pi) + two_pi, two_pi);
  bb = std::fmod(std::fmod(bb, two_pi) + two_pi, two_pi);
  const double en = log_negativity(channel.cov);
  return {f(0.0, 0.0), best, ba, bb, en, fidelity_bound(en)};
}

}  // namespace cvrelay
