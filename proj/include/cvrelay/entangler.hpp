#pragma once

// Optomechanical two-mode entangler: a mechanical resonator coupled to two
// driven cavity modes, read out through one-pole filters. Produces the
// stationary covariance matrix of the two filtered output modes.

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "cvrelay/gaussian_core.hpp"
#include "cvrelay/quadrature.hpp"

namespace cvrelay {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using CMat4 = Eigen::Matrix<std::complex<double>, 4, 4>;
using CMat46 = Eigen::Matrix<std::complex<double>, 4, 6>;

struct MechanicalParams {
  double omega_m = 0.0;      // rad/s
  double q_factor = 0.0;
  double mass = 0.0;         // kg
  double temperature = 0.0;  // K

  double damping() const { return omega_m / q_factor; }
  double thermal_phonons() const;
};

struct OpticalModeParams {
  double wavelength = 0.0;  // m
  double kappa = 0.0;       // rad/s
  double detuning = 0.0;    // rad/s
  double power = 0.0;       // W
  /// Replaces the derived effective coupling G when set (rad/s).
  std::optional<double> coupling_override;
};

struct FilterSpec {
  double center = 0.0;    // rad/s
  double duration = 0.0;  // s
};

struct EntanglerConfig {
  MechanicalParams mech;
  OpticalModeParams mode_a;
  OpticalModeParams mode_b;
  double cavity_length = 0.0;  // m
  FilterSpec filter_a;
  FilterSpec filter_b;
  /// q' = +omega_m p. false reproduces the printed drift matrix row signs.
  bool standard_signs = true;

  /// Throws DomainError naming the first invalid field.
  void validate() const;

  /// omega_m = 2 pi 10 MHz, kappa = 0.2 omega_m, T = 4.2 K, m = 10 ng, L = 1 mm,
  /// 1550/810 nm, 17/6 mW, Delta_a = -Delta_b = omega_m, filters at -/+ omega_m
  /// with tau = 300/omega_m.
  static EntanglerConfig baseline(double q_factor = 1e7);
};

double thermal_occupation(double temperature, double omega_m);
/// |E| = sqrt(2 P kappa / (hbar omega_L)).
double drive_amplitude(double power, double kappa, double wavelength);
/// g = sqrt(hbar / (m omega_m)) omega_L / L.
double bare_coupling(double mass, double omega_m, double cavity_length, double wavelength);
/// G = g |E| / sqrt(kappa^2 + Delta^2).
double effective_coupling(double g, double drive, double kappa, double detuning);

struct EffectiveCouplings {
  double g_a;
  double g_b;
};
EffectiveCouplings effective_couplings(const EntanglerConfig& config);

/// Ordering (q, p, X_a, Y_a, X_b, Y_b).
Mat6 build_drift_matrix(const EntanglerConfig& config);
Mat6 build_diffusion_matrix(const EntanglerConfig& config);

struct StabilityReport {
  bool stable;
  double max_real_part;  // rad/s
};
/// Stable iff every eigenvalue has real part below -1e-12 omega_m.
StabilityReport check_stability(const Mat6& drift, double omega_m);
StabilityReport check_stability(const EntanglerConfig& config);

std::complex<double> filter_transfer(double omega, const FilterSpec& spec);
CMat46 build_filter_matrix(double omega, const EntanglerConfig& config);

struct SpectralIntegral {
  CMat4 raw;
  QuadratureResult<CMat4> quadrature;
};

/// Raw complex spectral integral without any checks beyond stability.
SpectralIntegral integrate_output_covariance(const EntanglerConfig& config, const QuadratureOptions& options = {});

/// Stationary filtered-output covariance. Throws DomainError when unstable and
/// NumericalError on quadrature failure, a non-negligible imaginary part, or an
/// unphysical result.
CovarianceMatrix4 output_covariance(const EntanglerConfig& config, const QuadratureOptions& options = {});

}  // namespace cvrelay
