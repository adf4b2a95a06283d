#include "cvrelay/relay.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "cvrelay/errors.hpp"

namespace cvrelay {

namespace {

const Mat2 kZ = (Mat2() << 1.0, 0.0, 0.0, -1.0).finished();

Mat2 invert_measurement(const Mat2& m) {
  const double det = m.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-30) {
    throw DomainError(fmt::format("Bell measurement matrix is singular (det {:.3g})", det));
  }
  Mat2 inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  inv /= det;
  const double cond = m.cwiseAbs().rowwise().sum().maxCoeff() * inv.cwiseAbs().rowwise().sum().maxCoeff();
  if (cond > 1e12) {
    throw DomainError(fmt::format("Bell measurement matrix is ill-conditioned (condition number {:.3g})", cond));
  }
  return inv;
}

void require_physical(const CovarianceMatrix4& v, const char* what) {
  const auto r = check_physicality(v);
  if (!r.physical) {
    throw DomainError(fmt::format("{} is unphysical (symplectic eigenvalue {:.12g})", what, r.min_symplectic_eigenvalue));
  }
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double LossParams::efficiency() const {
  const double attenuation = law == LossLaw::decibel ? std::pow(10.0, -alpha * length_km / 10.0)
                                                     : std::exp(-alpha * length_km);
  return eta0 * attenuation;
}

void LossParams::validate() const {
  if (!(eta0 > 0.0 && eta0 <= 1.0)) throw DomainError("chain.eta0: must lie in (0, 1]");
  if (!(alpha >= 0.0 && std::isfinite(alpha))) throw DomainError("chain.alpha: must be non-negative");
  if (!(length_km >= 0.0 && std::isfinite(length_km))) throw DomainError("chain.length: must be non-negative");
  if (!(efficiency() > 0.0)) throw DomainError("chain.length: total efficiency underflows to zero");
}

SwapChainConfig SwapChainConfig::uniform(const TwoModeGaussianState& source, int n_links, const LossParams& loss) {
  if (n_links < 1) throw DomainError("chain.links: must be at least 1");
  SwapChainConfig c;
  c.links.assign(static_cast<std::size_t>(n_links), source);
  c.loss = loss;
  return c;
}

Mat2 measurement_matrix(const TwoModeGaussianState& state_ac, const TwoModeGaussianState& state_bc) {
  return kZ * state_ac.cov.blocks().b * kZ + state_bc.cov.blocks().b;
}

TwoModeGaussianState swap(const TwoModeGaussianState& state_ac, const TwoModeGaussianState& state_bc,
                          const BellOutcome& outcome) {
  require_physical(state_ac.cov, "first swap input");
  require_physical(state_bc.cov, "second swap input");
  const BlockDecomposition s1 = state_ac.cov.blocks();
  const BlockDecomposition s2 = state_bc.cov.blocks();
  const Mat2 m_inv = invert_measurement(kZ * s1.b * kZ + s2.b);

  const Mat2 d1z = s1.d * kZ;
  const Mat2 a = s1.a - d1z * m_inv * d1z.transpose();
  const Mat2 b = s2.a - s2.d * m_inv * s2.d.transpose();
  const Mat2 cross = d1z * m_inv * s2.d.transpose();

  const Vec2 k = outcome.vector();
  Vec4 drift;
  drift.head<2>() = state_ac.drift.head<2>() - 2.0 * d1z * m_inv * k;
  drift.tail<2>() = state_bc.drift.head<2>() + 2.0 * s2.d * m_inv * k;
  return TwoModeGaussianState(CovarianceMatrix4::from_blocks(a, b, cross), drift);
}

std::pair<Mat2, Mat2> explicit_swap_blocks(const CovarianceMatrix4& v) {
  const double v33 = v(2, 2);
  const double v44 = v(3, 3);
  if (v33 == 0.0 || v44 == 0.0) throw DomainError("explicit swap blocks need nonzero V33 and V44");
  const double v13 = v(0, 2), v14 = v(0, 3), v23 = v(1, 2), v24 = v(1, 3);

  const double p11 = v13 * v13 / v33, q11 = v14 * v14 / v44;
  const double p12 = v13 * v23 / v33, q12 = v14 * v24 / v44;
  const double p22 = v23 * v23 / v33, q22 = v24 * v24 / v44;

  Mat2 v11;
  v11 << v(0, 0) - 0.5 * (p11 + q11), v(0, 1) - 0.5 * (p12 + q12),
         v(0, 1) - 0.5 * (p12 + q12), v(1, 1) - 0.5 * (p22 + q22);
  Mat2 v12;
  v12 << 0.5 * (p11 - q11), 0.5 * (p12 - q12),
         0.5 * (p12 - q12), 0.5 * (p22 - q22);
  return {v11, v12};
}

TwoModeGaussianState apply_loss(const TwoModeGaussianState& state, double eta_a, double eta_b) {
  if (!(eta_a > 0.0 && eta_a <= 1.0) || !(eta_b > 0.0 && eta_b <= 1.0)) {
    throw DomainError(fmt::format("loss efficiencies must lie in (0, 1], got {} and {}", eta_a, eta_b));
  }
  const Vec4 s(std::sqrt(eta_a), std::sqrt(eta_a), std::sqrt(eta_b), std::sqrt(eta_b));
  const Mat4& v = state.cov.matrix();
  Mat4 out = s.asDiagonal() * v * s.asDiagonal();
  out.diagonal() += kVacuumVariance * (Vec4::Ones() - s.cwiseAbs2());
  return TwoModeGaussianState(CovarianceMatrix4(out), s.cwiseProduct(state.drift));
}

TwoModeGaussianState apply_loss(const TwoModeGaussianState& state, const LossParams& loss_a,
                                const LossParams& loss_b) {
  loss_a.validate();
  loss_b.validate();
  return apply_loss(state, loss_a.efficiency(), loss_b.efficiency());
}

BellOutcome sample_bell_outcome(const TwoModeGaussianState& state_ac, const TwoModeGaussianState& state_bc,
                                std::uint64_t seed) {
  const Mat2 m = measurement_matrix(state_ac, state_bc);
  invert_measurement(m);
  Eigen::LLT<Mat2> llt(0.5 * m);
  if (llt.info() != Eigen::Success) throw DomainError("Bell measurement matrix is not positive definite");
  std::mt19937_64 rng(seed);
  // Box-Muller on raw 53-bit uniforms; std::normal_distribution is not
  // specified bit-for-bit across standard libraries.
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double phi = 2.0 * 3.14159265358979323846 * uniform();
  const Vec2 k = llt.matrixL() * Vec2(r * std::cos(phi), r * std::sin(phi));
  return {k(0), k(1)};
}

ChainResult concatenate_chain(const SwapChainConfig& config) {
  const auto n = static_cast<int>(config.links.size());
  if (n < 1) throw DomainError("chain.links: must be at least 1");
  config.loss.validate();
  const double eta = config.loss.efficiency();
  const double eta_end = config.end_arms_lossy ? eta : 1.0;

  auto lossy_link = [&](int l) {
    try {
      // Mode 1 of the first and last link stays with Alice or Bob.
      const bool end = (l == 0 || l == n - 1);
      return apply_loss(config.links[static_cast<std::size_t>(l)], end ? eta_end : eta, eta);
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("chain stage {}: {}", l, e.what()));
    }
  };

  ChainResult result{config.links.front(), {}};
  if (n == 1) {
    result.trace.push_back({0, result.state, log_negativity(result.state.cov), {}});
    return result;
  }

  std::uint64_t seed_state = config.outcomes.seed;
  TwoModeGaussianState state = lossy_link(0);
  result.trace.push_back({0, state, log_negativity(state.cov), {}});
  for (int l = 1; l < n; ++l) {
    try {
      const TwoModeGaussianState next = lossy_link(l);
      BellOutcome k;
      if (config.outcomes.kind == OutcomePolicy::Kind::sampled) {
        k = sample_bell_outcome(state, next, splitmix64(seed_state));
      }
      state = swap(state, next, k);
      require_physical(state.cov, "swap output");
      result.trace.push_back({l, state, log_negativity(state.cov), k});
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("chain stage {}: {}", l, e.what()));
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("chain stage {}: {}", l, e.what()), e.residual());
    }
  }
  result.state = state;
  return result;
}

}  // namespace cvrelay
