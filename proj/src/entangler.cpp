#include "cvrelay/entangler.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cvrelay/constants.hpp"
#include "cvrelay/errors.hpp"

namespace cvrelay {

namespace {

using cd = std::complex<double>;
using CMat6 = Eigen::Matrix<cd, 6, 6>;

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw DomainError(fmt::format("{}: {}", field, what));
}

void validate_mode(const OpticalModeParams& m, const char* wavelength, const char* kappa, const char* detuning,
                   const char* power, const char* coupling) {
  require(std::isfinite(m.wavelength) && m.wavelength > 0, wavelength, "must be positive");
  require(std::isfinite(m.kappa) && m.kappa > 0, kappa, "must be positive");
  require(std::isfinite(m.detuning), detuning, "must be finite");
  require(std::isfinite(m.power) && m.power > 0, power, "must be positive");
  if (m.coupling_override) {
    require(std::isfinite(*m.coupling_override) && *m.coupling_override >= 0, coupling, "must be non-negative");
  }
}

double optical_frequency(double wavelength) { return 2.0 * constants::pi * constants::speed_of_light / wavelength; }

double mode_coupling(const EntanglerConfig& c, const OpticalModeParams& m) {
  if (m.coupling_override) return *m.coupling_override;
  const double g = bare_coupling(c.mech.mass, c.mech.omega_m, c.cavity_length, m.wavelength);
  return effective_coupling(g, drive_amplitude(m.power, m.kappa, m.wavelength), m.kappa, m.detuning);
}

void place_filter_block(CMat46& t, int mode, double omega, const FilterSpec& spec, double kappa) {
  const cd f_pos = filter_transfer(omega, spec);
  const cd f_neg = std::conj(filter_transfer(-omega, spec));
  const cd hp = f_pos + f_neg;
  const cd hm = f_pos - f_neg;
  const double s = std::sqrt(kappa / 2.0);
  const cd i(0.0, 1.0);
  const int r = 2 * mode;
  const int c = 2 + 2 * mode;
  t(r, c) = s * hp;
  t(r, c + 1) = -s * i * hm;
  t(r + 1, c) = s * i * hm;
  t(r + 1, c + 1) = s * hp;
}

std::vector<double> spectral_breakpoints(const EntanglerConfig& c) {
  std::vector<double> pts{0.0, c.mech.omega_m, -c.mech.omega_m, std::abs(c.mode_a.detuning),
                          -std::abs(c.mode_a.detuning), std::abs(c.mode_b.detuning), -std::abs(c.mode_b.detuning)};
  for (const FilterSpec* f : {&c.filter_a, &c.filter_b}) {
    for (double sign : {1.0, -1.0}) {
      const double center = sign * f->center;
      pts.push_back(center);
      for (double k : {1.0, 4.0, 16.0, 64.0}) {
        pts.push_back(center + k / f->duration);
        pts.push_back(center - k / f->duration);
      }
    }
  }
  return pts;
}


}  // namespace

double MechanicalParams::thermal_phonons() const { return thermal_occupation(temperature, omega_m); }

void EntanglerConfig::validate() const {
  require(std::isfinite(mech.omega_m) && mech.omega_m > 0, "entangler.mech.omega_m", "must be positive");
  require(std::isfinite(mech.q_factor) && mech.q_factor > 0, "entangler.mech.Q_m", "must be positive");
  require(std::isfinite(mech.mass) && mech.mass > 0, "entangler.mech.mass", "must be positive");
  require(std::isfinite(mech.temperature) && mech.temperature >= 0, "entangler.mech.temperature",
          "must be non-negative");
  validate_mode(mode_a, "entangler.mode_a.wavelength", "entangler.mode_a.kappa", "entangler.mode_a.detuning",
                "entangler.mode_a.power", "entangler.mode_a.coupling");
  validate_mode(mode_b, "entangler.mode_b.wavelength", "entangler.mode_b.kappa", "entangler.mode_b.detuning",
                "entangler.mode_b.power", "entangler.mode_b.coupling");
  require(std::isfinite(cavity_length) && cavity_length > 0, "entangler.cavity_length", "must be positive");
  require(std::isfinite(filter_a.center), "entangler.filter_a.center", "must be finite");
  require(std::isfinite(filter_a.duration) && filter_a.duration > 0, "entangler.filter_a.duration",
          "must be positive");
  require(std::isfinite(filter_b.center), "entangler.filter_b.center", "must be finite");
  require(std::isfinite(filter_b.duration) && filter_b.duration > 0, "entangler.filter_b.duration",
          "must be positive");
}

EntanglerConfig EntanglerConfig::baseline(double q_factor) {
  const double wm = 2.0 * constants::pi * 1e7;
  EntanglerConfig c;
  c.mech = {wm, q_factor, 10e-12, 4.2};
  c.mode_a = {1550e-9, 0.2 * wm, wm, 17e-3, std::nullopt};
  c.mode_b = {810e-9, 0.2 * wm, -wm, 6e-3, std::nullopt};
  c.cavity_length = 1e-3;
  c.filter_a = {-wm, 300.0 / wm};
  c.filter_b = {wm, 300.0 / wm};
  return c;
}

double thermal_occupation(double temperature, double omega_m) {
  if (temperature <= 0.0) return 0.0;
  return 1.0 / std::expm1(constants::hbar * omega_m / (constants::boltzmann * temperature));
}

double drive_amplitude(double power, double kappa, double wavelength) {
  return std::sqrt(2.0 * power * kappa / (constants::hbar * optical_frequency(wavelength)));
}

double bare_coupling(double mass, double omega_m, double cavity_length, double wavelength) {
  return std::sqrt(constants::hbar / (mass * omega_m)) * optical_frequency(wavelength) / cavity_length;
}

double effective_coupling(double g, double drive, double kappa, double detuning) {
  return g * std::abs(drive) / std::hypot(kappa, detuning);
}

EffectiveCouplings effective_couplings(const EntanglerConfig& config) {
  return {mode_coupling(config, config.mode_a), mode_coupling(config, config.mode_b)};
}

Mat6 build_drift_matrix(const EntanglerConfig& c) {
  const auto [ga, gb] = effective_couplings(c);
  const double wm = c.mech.omega_m;
  Mat6 a = Mat6::Zero();
  a(0, 1) = c.standard_signs ? wm : -wm;
  a(1, 0) = -wm;
  a(1, 1) = -c.mech.damping();
  a(1, 2) = ga;
  a(1, 4) = gb;
  a(2, 2) = -c.mode_a.kappa;
  a(2, 3) = c.mode_a.detuning;
  a(3, 0) = ga;
  a(3, 2) = -c.mode_a.detuning;
  a(3, 3) = -c.mode_a.kappa;
  a(4, 4) = -c.mode_b.kappa;
  a(4, 5) = c.mode_b.detuning;
  a(5, 0) = gb;
  a(5, 4) = -c.mode_b.detuning;
  a(5, 5) = -c.mode_b.kappa;
  return a;
}

Mat6 build_diffusion_matrix(const EntanglerConfig& c) {
  Mat6 d = Mat6::Zero();
  d(1, 1) = c.mech.damping() * (2.0 * c.mech.thermal_phonons() + 1.0);
  d(2, 2) = d(3, 3) = c.mode_a.kappa;
  d(4, 4) = d(5, 5) = c.mode_b.kappa;
  return d;
}

StabilityReport check_stability(const Mat6& drift, double omega_m) {
  if (!drift.allFinite()) throw NumericalError("drift matrix has non-finite entries");
  Eigen::EigenSolver<Mat6> solver(drift, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed on drift matrix");
  const double max_re = solver.eigenvalues().real().maxCoeff();
  return {max_re < -1e-12 * omega_m, max_re};
}

StabilityReport check_stability(const EntanglerConfig& config) {
  return check_stability(build_drift_matrix(config), config.mech.omega_m);
}

std::complex<double> filter_transfer(double omega, const FilterSpec& spec) {
  const double tau = spec.duration;
  return std::sqrt(tau / constants::pi) / cd(1.0, tau * (spec.center - omega));
}

CMat46 build_filter_matrix(double omega, const EntanglerConfig& c) {
  CMat46 t = CMat46::Zero();
  place_filter_block(t, 0, omega, c.filter_a, c.mode_a.kappa);
  place_filter_block(t, 1, omega, c.filter_b, c.mode_b.kappa);
  return t;
}

SpectralIntegral integrate_output_covariance(const EntanglerConfig& c, const QuadratureOptions& options) {
  c.validate();
  const Mat6 a = build_drift_matrix(c);
  const auto stability = check_stability(a, c.mech.omega_m);
  if (!stability.stable) {
    throw DomainError(fmt::format("entangler is unstable: largest drift eigenvalue real part {:.6g} rad/s",
                                  stability.max_real_part));
  }
  const Mat6 d = build_diffusion_matrix(c);
  Mat6 p = Mat6::Zero();
  p(2, 2) = p(3, 3) = 1.0 / (2.0 * c.mode_a.kappa);
  p(4, 4) = p(5, 5) = 1.0 / (2.0 * c.mode_b.kappa);
  const CMat6 a_c = a.cast<cd>();
  const CMat6 p_c = p.cast<cd>();
  const Eigen::Matrix<double, 6, 1> d_diag = d.diagonal();

  auto integrand = [&](double omega) -> CMat4 {
    CMat6 shifted = a_c;
    shifted.diagonal().array() += cd(0.0, omega);
    const CMat6 m = shifted.partialPivLu().inverse() + p_c;
    const CMat46 k = build_filter_matrix(omega, c) * m;
    return k * d_diag.cast<cd>().asDiagonal() * k.adjoint();
  };

  const double detuning = std::max(std::abs(c.mode_a.detuning), std::abs(c.mode_b.detuning));
  const double width = 10.0 * std::max(c.mech.omega_m + detuning, std::max(c.mode_a.kappa, c.mode_b.kappa));
  auto q = integrate_real_line<CMat4>(integrand, width, spectral_breakpoints(c), options);
  return {q.value, q};
}

CovarianceMatrix4 output_covariance(const EntanglerConfig& c, const QuadratureOptions& options) {
  const SpectralIntegral s = integrate_output_covariance(c, options);
  const Mat4 re = s.raw.real();
  const double re_max = re.cwiseAbs().maxCoeff();
  const double im_max = s.raw.imag().cwiseAbs().maxCoeff();
  if (im_max >= 1e-8 * re_max) {
    throw NumericalError(fmt::format("spectral integral has imaginary part {:.3g} against real part {:.3g}", im_max,
                                     re_max),
                         im_max);
  }
  const CovarianceMatrix4 v(Mat4(0.5 * (re + re.transpose())));
  const auto phys = check_physicality(v);
  if (!phys.physical) {
    throw NumericalError(
        fmt::format("output covariance is unphysical: symplectic eigenvalue {:.12g}", phys.min_symplectic_eigenvalue),
        0.5 - phys.min_symplectic_eigenvalue);
  }
  return v;
}

}  // namespace cvrelay
