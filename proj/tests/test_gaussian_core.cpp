#include <cmath>
#include <random>

#include "doctest.h"
#include "cvrelay/errors.hpp"
#include "cvrelay/gaussian_core.hpp"
#include "oracles.hpp"

using namespace cvrelay;

TEST_SUITE("gaussian_core") {

TEST_CASE("vacuum and unit thermal symplectic eigenvalues") {
  CHECK(min_symplectic_eigenvalue_pt(CovarianceMatrix4::vacuum()) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(min_symplectic_eigenvalue_pt(CovarianceMatrix4(Mat4::Identity())) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("squeezed vacuum eigenvalue matches 50-digit evaluation") {
  for (double r : {0.1, 0.5, 1.0}) {
    const double expected = static_cast<double>(oracle::tmsv_eta_mp(r));
    CAPTURE(r);
    CHECK(std::abs(min_symplectic_eigenvalue_pt(CovarianceMatrix4::tmsv(r)) - expected) <= 1e-13 * expected);
    CHECK(std::abs(expected - 0.5 * std::exp(-2.0 * r)) <= 1e-15);
  }
}

TEST_CASE("log-negativity closed cases") {
  CHECK(log_negativity(CovarianceMatrix4::vacuum()) == 0.0);
  CHECK(log_negativity(CovarianceMatrix4(Mat4::Identity())) == 0.0);
  CHECK(log_negativity(CovarianceMatrix4::tmsv(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("log-negativity of squeezed vacuum is 2r on [0, 3]") {
  for (int i = 0; i <= 300; ++i) {
    const double r = 0.01 * i;
    CAPTURE(r);
    CHECK(std::abs(log_negativity(CovarianceMatrix4::tmsv(r)) - 2.0 * r) <= 1e-9);
  }
}

TEST_CASE("physicality check") {
  const auto vac = check_physicality(CovarianceMatrix4::vacuum());
  CHECK(vac.physical);
  CHECK(vac.min_symplectic_eigenvalue == doctest::Approx(0.5));

  const auto quarter = check_physicality(CovarianceMatrix4(0.25 * Mat4::Identity()));
  CHECK_FALSE(quarter.physical);
  CHECK(quarter.min_symplectic_eigenvalue == doctest::Approx(0.25).epsilon(1e-14));

  CHECK(check_physicality(CovarianceMatrix4::tmsv(0.5)).physical);
  CHECK(check_physicality(CovarianceMatrix4::tmsv(0.5)).min_symplectic_eigenvalue == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("squeezed vacuum is physical for all r, scaled copies are not") {
  for (int i = 0; i <= 60; ++i) {
    const double r = 0.05 * i;
    CAPTURE(r);
    const auto v = CovarianceMatrix4::tmsv(r);
    CHECK(check_physicality(v).physical);
    for (double s : {0.999, 0.9, 0.5}) CHECK_FALSE(check_physicality(CovarianceMatrix4(s * v.matrix())).physical);
  }
}

TEST_CASE("unphysical input is a domain error") {
  CHECK_THROWS_AS(min_symplectic_eigenvalue_pt(CovarianceMatrix4(0.25 * Mat4::Identity())), DomainError);
  CHECK_THROWS_AS(log_negativity(CovarianceMatrix4(0.25 * Mat4::Identity())), DomainError);
}

TEST_CASE("construction symmetrizes round-off and rejects real asymmetry") {
  Mat4 m = CovarianceMatrix4::tmsv(0.3).matrix();
  m(0, 2) += 1e-12;
  const CovarianceMatrix4 v(m);
  CHECK(v(0, 2) == v(2, 0));
  CHECK((v.matrix() - v.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);

  m(0, 2) += 1e-6;
  CHECK_THROWS_AS(CovarianceMatrix4{m}, DomainError);
  Mat4 bad = Mat4::Identity();
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(CovarianceMatrix4{bad}, DomainError);
  CHECK_THROWS_AS(TwoModeGaussianState(CovarianceMatrix4::vacuum(), Vec4(0, 0, INFINITY, 0)), DomainError);
}

TEST_CASE("block decomposition reassembles exactly") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const CovarianceMatrix4 v(oracle::random_physical(rng));
    CHECK(v.blocks().assemble() == v.matrix());
    const auto b = v.blocks();
    CHECK(CovarianceMatrix4::from_blocks(b.a, b.b, b.d) == v);
  }
}

TEST_CASE("local rotation") {
  const TwoModeGaussianState s(CovarianceMatrix4::tmsv(0.5), Vec4(0.1, -0.2, 0.3, 0.4));
  const auto same = local_rotation(s, 0.0, 0.0);
  CHECK(same.cov == s.cov);
  CHECK(same.drift == s.drift);

  const auto vac = local_rotation(CovarianceMatrix4::vacuum(), 0.7, -2.1);
  CHECK((vac.matrix() - CovarianceMatrix4::vacuum().matrix()).cwiseAbs().maxCoeff() <= 1e-16);

  const double en = log_negativity(s.cov);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const auto r = local_rotation(s, i * M_PI / 4.0, j * M_PI / 4.0);
      CHECK(std::abs(log_negativity(r.cov) - en) <= 1e-12);
      CHECK(check_physicality(r.cov).physical);
      CHECK(r.drift.norm() == doctest::Approx(s.drift.norm()).epsilon(1e-14));
    }
  }
}

TEST_CASE("property: formula agrees with the generic partial-transpose spectrum") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const Mat4 m = oracle::random_physical(rng, t % 3 == 0);
    const CovarianceMatrix4 v(m);
    CAPTURE(t);
    CHECK(std::abs(min_symplectic_eigenvalue_pt(v) - oracle::min_symplectic_pt_generic(m)) <= 1e-10);
    CHECK(std::abs(check_physicality(v).min_symplectic_eigenvalue - oracle::symplectic_spectrum(m)(0)) <= 1e-10);
  }
}

TEST_CASE("property: log-negativity is invariant under local rotations") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int t = 0; t < 200; ++t) {
    const CovarianceMatrix4 v(oracle::random_physical(rng));
    const double en = log_negativity(v);
    for (int k = 0; k < 5; ++k) {
      CHECK(std::abs(log_negativity(local_rotation(v, angle(rng), angle(rng))) - en) <= 1e-10);
    }
  }
}

}
