#pragma once

// Coherent-state teleportation through a two-mode Gaussian channel with unit
// gain. Mode 1 of the channel is Alice's, mode 2 is Bob's.

#include <complex>

#include "cvrelay/gaussian_core.hpp"

namespace cvrelay {

struct FidelityReport {
  double fidelity;
  double fidelity_optimized;
  double theta_a;
  double theta_b;
  double log_neg;
  double bound;
};

/// Gamma = 2 V_in + Z A Z + B - (Z C + C^T Z), V_in = I/2.
Mat2 teleportation_gamma(const CovarianceMatrix4& channel);

/// F = 1 / sqrt(det Gamma). Throws NumericalError when det Gamma <= 0 or F > 1 + 1e-9.
double fidelity_closed_form(const TwoModeGaussianState& channel);
double fidelity_closed_form(const CovarianceMatrix4& channel);

/// Bob's displacement that cancels the channel drift in the output.
std::complex<double> balancing_displacement(const TwoModeGaussianState& channel);

struct OracleResult {
  double fidelity;
  double residual;  // difference between two grid resolutions
  int nodes;        // per axis at the finer resolution
};

/// Fidelity averaged over Alice's outcomes, from the characteristic functions
/// of the input and the channel, integrated on a tensor-product trapezoid grid.
OracleResult fidelity_characteristic_oracle(const TwoModeGaussianState& channel, std::complex<double> delta);
OracleResult fidelity_characteristic_oracle(const TwoModeGaussianState& channel);

/// 1 / (1 + exp(-E_N)).
double fidelity_bound(double log_neg);

/// Maximizes the closed-form fidelity over local rotations of both channel modes.
FidelityReport optimize_over_rotations(const TwoModeGaussianState& channel);

}  // namespace cvrelay
