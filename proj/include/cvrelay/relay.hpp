#pragma once

// Homodyne Bell-measurement entanglement swapping, loss channels and N-link
// chains. Mode 2 of every input state is the arm sent to the measurement.

#include <cstdint>
#include <utility>
#include <vector>

#include "cvrelay/gaussian_core.hpp"

namespace cvrelay {

/// Measured x_- and y_+ outcomes, as the vector k.
struct BellOutcome {
  double x_minus = 0.0;
  double y_plus = 0.0;

  Vec2 vector() const { return {x_minus, y_plus}; }
};

enum class LossLaw {
  decibel,      // eta = eta0 10^(-alpha l / 10), alpha in dB/km
  exponential,  // eta = eta0 exp(-alpha l), alpha in 1/km
};

struct LossParams {
  double eta0 = 1.0;
  double alpha = 0.0;      // dB/km or 1/km depending on law
  double length_km = 0.0;
  LossLaw law = LossLaw::decibel;

  double efficiency() const;
  /// Throws DomainError naming the offending field.
  void validate() const;
};

struct OutcomePolicy {
  enum class Kind { fixed_zero, sampled };
  Kind kind = Kind::fixed_zero;
  std::uint64_t seed = 0;
};

struct SwapChainConfig {
  /// Link l holds modes (l1, l2); link 0 mode 1 is Alice, the last link's mode 1 is Bob.
  std::vector<TwoModeGaussianState> links;
  LossParams loss;
  bool end_arms_lossy = false;
  OutcomePolicy outcomes;

  static SwapChainConfig uniform(const TwoModeGaussianState& source, int n_links, const LossParams& loss = {});
};

struct ChainStage {
  int index;  // 0 is the (lossy) first link, k is the state after k swaps
  TwoModeGaussianState state;
  double log_neg;
  BellOutcome outcome;
};

struct ChainResult {
  TwoModeGaussianState state;
  std::vector<ChainStage> trace;
};

/// M = Z C1 Z + C2 for the measured arms of the two inputs.
Mat2 measurement_matrix(const TwoModeGaussianState& state_ac, const TwoModeGaussianState& state_bc);

/// Conditional two-mode state of the kept arms (A from the first input, B
/// from the second) after the Bell measurement with outcome k.
TwoModeGaussianState swap(const TwoModeGaussianState& state_ac, const TwoModeGaussianState& state_bc,
                          const BellOutcome& outcome = {});

/// Element-wise swap blocks for two copies of the same source. Throws
/// DomainError when V33 or V44 vanishes.
std::pair<Mat2, Mat2> explicit_swap_blocks(const CovarianceMatrix4& v_out);

TwoModeGaussianState apply_loss(const TwoModeGaussianState& state, double eta_a, double eta_b);
TwoModeGaussianState apply_loss(const TwoModeGaussianState& state, const LossParams& loss_a,
                                const LossParams& loss_b);

/// Draws k ~ N(0, M/2). Deterministic in the seed.
BellOutcome sample_bell_outcome(const TwoModeGaussianState& state_ac, const TwoModeGaussianState& state_bc,
                                std::uint64_t seed);

ChainResult concatenate_chain(const SwapChainConfig& config);

}  // namespace cvrelay
