#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "cvrelay/entangler.hpp"
#include "cvrelay/errors.hpp"
#include "cvrelay/relay.hpp"
#include "oracles.hpp"

using namespace cvrelay;

namespace {

const double kWm = 2.0 * M_PI * 1e7;

double max_diff(const Mat4& a, const Mat4& b) { return (a - b).cwiseAbs().maxCoeff(); }

Mat4 equal_source_swap(const std::pair<Mat2, Mat2>& blocks) {
  Mat4 m;
  m << blocks.first, blocks.second, blocks.second, blocks.first;
  return m;
}

TwoModeGaussianState baseline_source(double center_a = -kWm, double q = 1e7) {
  auto c = EntanglerConfig::baseline(q);
  c.filter_a.center = center_a;
  return TwoModeGaussianState(output_covariance(c));
}

}  // namespace

TEST_SUITE("relay") {

TEST_CASE("uncorrelated inputs give an uncorrelated output") {
  Mat4 m1 = Mat4::Identity(), m2 = Mat4::Identity();
  m1.topLeftCorner<2, 2>() << 0.8, 0.1, 0.1, 0.7;
  m2.topLeftCorner<2, 2>() << 1.5, -0.2, -0.2, 0.9;
  const TwoModeGaussianState a{CovarianceMatrix4(m1)}, b{CovarianceMatrix4(m2)};
  const auto out = swap(a, b, {0.4, -1.1});
  CHECK(out.cov.blocks().d.isZero());
  CHECK(out.cov.blocks().a == m1.topLeftCorner<2, 2>());
  CHECK(out.cov.blocks().b == m2.topLeftCorner<2, 2>());
  CHECK(log_negativity(out.cov) == 0.0);
  CHECK(out.drift.isZero());
}

TEST_CASE("zero outcome leaves zero drift") {
  const auto s = TwoModeGaussianState(CovarianceMatrix4::tmsv(0.7));
  CHECK(swap(s, s, {}).drift.isZero());
  const auto moved = swap(s, s, {0.3, 0.2});
  CHECK_FALSE(moved.drift.isZero());
  // Linear in the outcome.
  const auto doubled = swap(s, s, {0.6, 0.4});
  CHECK((doubled.drift - 2.0 * moved.drift).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("swapping two squeezed vacua") {
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    const TwoModeGaussianState s(CovarianceMatrix4::tmsv(r));
    const auto out = swap(s, s);
    CAPTURE(r);
    CHECK(log_negativity(out.cov) < 2.0 * r);
    CHECK(log_negativity(out.cov) > 0.0);
    const Mat4 ref = equal_source_swap(oracle::swap_blocks_mp(s.cov.matrix()));
    CHECK(max_diff(out.cov.matrix(), ref) <= 1e-12 * ref.cwiseAbs().maxCoeff());
    const Mat4 explicit_form = equal_source_swap(explicit_swap_blocks(s.cov));
    CHECK(max_diff(explicit_form, ref) <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("explicit blocks of a diagonal covariance have no cross term") {
  const auto blocks = explicit_swap_blocks(CovarianceMatrix4(Eigen::Vector4d(0.7, 0.9, 1.3, 0.6).asDiagonal().toDenseMatrix()));
  CHECK(blocks.second.isZero());
  CHECK_THROWS_AS(explicit_swap_blocks(CovarianceMatrix4(Eigen::Vector4d(0.7, 0.9, 0.0, 0.6).asDiagonal().toDenseMatrix())),
                  DomainError);
}

TEST_CASE("explicit blocks match the generic swap on entangler outputs") {
  for (double center : {-1.2 * kWm, -kWm, -0.995 * kWm, -0.5 * kWm}) {
    const auto s = baseline_source(center);
    const Mat4 generic = swap(s, s).cov.matrix();
    const Mat4 explicit_form = equal_source_swap(explicit_swap_blocks(s.cov));
    CHECK(max_diff(generic, explicit_form) <= 1e-12 * std::max(1.0, generic.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("singular measurement matrix") {
  Mat4 m = Mat4::Identity();
  m(2, 2) = m(3, 3) = 0.0;
  const TwoModeGaussianState bad{CovarianceMatrix4(m)};
  CHECK_THROWS_AS(swap(bad, bad), DomainError);
  CHECK_THROWS_AS(sample_bell_outcome(bad, bad, 1), DomainError);
  CHECK_THROWS_AS(swap(TwoModeGaussianState(CovarianceMatrix4(0.2 * Mat4::Identity())),
                       TwoModeGaussianState(CovarianceMatrix4::vacuum())),
                  DomainError);
}

TEST_CASE("loss") {
  const TwoModeGaussianState s(CovarianceMatrix4::tmsv(0.8), Vec4(1, 2, 3, 4));
  const auto same = apply_loss(s, 1.0, 1.0);
  CHECK(same.cov == s.cov);
  CHECK(same.drift == s.drift);

  const auto gone = apply_loss(s, 1e-14, 1e-14);
  CHECK(max_diff(gone.cov.matrix(), 0.5 * Mat4::Identity()) <= 1e-12);

  const double eta = 0.83;
  const auto uniform = apply_loss(s, eta, eta);
  CHECK(max_diff(uniform.cov.matrix(), eta * s.cov.matrix() + 0.5 * (1 - eta) * Mat4::Identity()) <= 1e-15);
  CHECK_THROWS_AS(apply_loss(s, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(apply_loss(s, 1.0, 1.1), DomainError);

  const auto asym = apply_loss(s, 0.5, 0.9);
  CHECK(asym.cov(0, 0) == doctest::Approx(0.5 * s.cov(0, 0) + 0.25));
  CHECK(asym.cov(2, 2) == doctest::Approx(0.9 * s.cov(2, 2) + 0.05));
  CHECK(asym.cov(0, 2) == doctest::Approx(std::sqrt(0.45) * s.cov(0, 2)));
}

TEST_CASE("loss efficiency laws") {
  LossParams p{0.95, 0.005, 40.0, LossLaw::decibel};
  CHECK(p.efficiency() == doctest::Approx(0.90724295672036415224).epsilon(1e-14));
  CHECK(std::abs(p.efficiency() - 0.9073) < 1e-4);
  p.law = LossLaw::exponential;
  CHECK(p.efficiency() == doctest::Approx(0.77779421542408276574).epsilon(1e-14));
  CHECK(LossParams{}.efficiency() == 1.0);
  CHECK_THROWS_AS((LossParams{0.0, 0, 0}).validate(), DomainError);
  CHECK_THROWS_AS((LossParams{1.2, 0, 0}).validate(), DomainError);
  CHECK_THROWS_AS((LossParams{0.9, -1, 0}).validate(), DomainError);
}

TEST_CASE("loss never increases entanglement") {
  for (double r : {0.2, 1.0, 2.5}) {
    const TwoModeGaussianState s(CovarianceMatrix4::tmsv(r));
    double previous = log_negativity(s.cov);
    for (int k = 9; k >= 1; --k) {
      const double eta = 0.1 * k;
      const double en = log_negativity(apply_loss(s, eta, eta).cov);
      CHECK(en <= previous + 1e-12);
      previous = en;
    }
  }
}

TEST_CASE("chain of one link returns its input") {
  const TwoModeGaussianState s(CovarianceMatrix4::tmsv(0.4), Vec4(0.1, 0, 0, 0.2));
  auto cfg = SwapChainConfig::uniform(s, 1, LossParams{0.5, 1.0, 3.0});
  const auto r = concatenate_chain(cfg);
  CHECK(r.state.cov == s.cov);
  CHECK(r.state.drift == s.drift);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("chain of two links is a single swap") {
  const auto s = baseline_source();
  const auto r = concatenate_chain(SwapChainConfig::uniform(s, 2));
  const auto direct = swap(s, s);
  CHECK(r.state.cov == direct.cov);
  CHECK(r.trace.size() == 2);
  CHECK(r.trace[1].log_neg == log_negativity(direct.cov));
  const Mat4 explicit_form = equal_source_swap(explicit_swap_blocks(s.cov));
  CHECK(max_diff(r.state.cov.matrix(), explicit_form) <= 1e-12 * std::max(1.0, explicit_form.cwiseAbs().maxCoeff()));
}

TEST_CASE("four-link chain degrades entanglement stage by stage") {
  const auto s = baseline_source();
  const auto r = concatenate_chain(SwapChainConfig::uniform(s, 4));
  REQUIRE(r.trace.size() == 4);
  const double source = log_negativity(s.cov);
  CHECK(r.trace[1].log_neg < source);
  CHECK(r.trace[3].log_neg < r.trace[1].log_neg);
  CHECK(r.trace[3].log_neg > 0.0);
  for (const auto& stage : r.trace) CHECK(check_physicality(stage.state.cov).physical);
}

TEST_CASE("loss placement in the chain") {
  const TwoModeGaussianState s(CovarianceMatrix4::tmsv(0.6));
  const LossParams loss{0.8, 0.0, 0.0};
  auto cfg = SwapChainConfig::uniform(s, 3, loss);
  const auto r = concatenate_chain(cfg);
  const double eta = 0.8;
  const auto l0 = apply_loss(s, 1.0, eta);
  const auto l1 = apply_loss(s, eta, eta);
  const auto l2 = apply_loss(s, 1.0, eta);
  const auto expected = swap(swap(l0, l1), l2);
  CHECK(max_diff(r.state.cov.matrix(), expected.cov.matrix()) <= 1e-15);

  cfg.end_arms_lossy = true;
  const auto lossy = concatenate_chain(cfg);
  const auto all = apply_loss(s, eta, eta);
  CHECK(max_diff(lossy.state.cov.matrix(), swap(swap(all, all), all).cov.matrix()) <= 1e-15);
  CHECK(log_negativity(lossy.state.cov) < log_negativity(r.state.cov));
}

TEST_CASE("chain covariance does not depend on Bell outcomes") {
  const auto s = baseline_source();
  auto cfg = SwapChainConfig::uniform(s, 4, LossParams{0.95, 0.005, 40.0});
  const auto zero = concatenate_chain(cfg);
  cfg.outcomes = {OutcomePolicy::Kind::sampled, 99};
  const auto sampled = concatenate_chain(cfg);
  CHECK(max_diff(zero.state.cov.matrix(), sampled.state.cov.matrix()) <= 1e-12);
  CHECK(zero.state.drift.isZero());
  CHECK_FALSE(sampled.state.drift.isZero());
  const auto again = concatenate_chain(cfg);
  CHECK(again.state.drift == sampled.state.drift);
}

TEST_CASE("chain errors name the stage") {
  SwapChainConfig cfg;
  cfg.links = {TwoModeGaussianState(CovarianceMatrix4::tmsv(0.3)), TwoModeGaussianState(CovarianceMatrix4::tmsv(0.3)),
               TwoModeGaussianState(CovarianceMatrix4(0.2 * Mat4::Identity()))};
  try {
    concatenate_chain(cfg);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("stage 2") != std::string::npos);
  }
  CHECK_THROWS_AS(concatenate_chain(SwapChainConfig{}), DomainError);
}

TEST_CASE("Bell outcome sampling") {
  const auto s = baseline_source();
  const Mat2 m = measurement_matrix(s, s);
  const auto a = sample_bell_outcome(s, s, 42);
  const auto b = sample_bell_outcome(s, s, 42);
  CHECK(a.x_minus == b.x_minus);
  CHECK(a.y_plus == b.y_plus);

  const int n = 100000;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Mat2 second = Mat2::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec2 k = sample_bell_outcome(s, s, 1000 + static_cast<std::uint64_t>(i)).vector();
    mean += k;
    second += k * k.transpose();
  }
  mean /= n;
  const Mat2 cov = second / n - mean * mean.transpose();
  const Mat2 target = 0.5 * m;
  CHECK(std::abs(mean(0)) <= 5.0 * std::sqrt(target(0, 0) / n));
  CHECK(std::abs(mean(1)) <= 5.0 * std::sqrt(target(1, 1) / n));
  CHECK(std::abs(cov(0, 0) - target(0, 0)) <= 0.03 * target(0, 0));
  CHECK(std::abs(cov(1, 1) - target(1, 1)) <= 0.03 * target(1, 1));
  CHECK(std::abs(cov(0, 1) - target(0, 1)) <= 0.03 * std::sqrt(target(0, 0) * target(1, 1)));
}

TEST_CASE("property: swap preserves physicality") {
  std::mt19937_64 rng(5150);
  const int trials = 1000000;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const TwoModeGaussianState a{CovarianceMatrix4(oracle::random_physical(rng, t % 4 == 0, 0.8))};
    const TwoModeGaussianState b{CovarianceMatrix4(oracle::random_physical(rng, t % 5 == 0, 0.8))};
    try {
      if (!check_physicality(swap(a, b).cov).physical) ++failures;
    } catch (const DomainError&) {
      ++failures;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("property: swapping equal sources does not add entanglement") {
  for (int i = 0; i <= 40; ++i) {
    const double center = (-2.0 + 0.05 * i) * kWm;
    const auto s = baseline_source(center);
    CHECK(log_negativity(swap(s, s).cov) <= log_negativity(s.cov) + 1e-12);
  }
}

}
