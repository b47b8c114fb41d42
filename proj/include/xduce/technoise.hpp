#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "xduce/cooling.hpp"
#include "xduce/params.hpp"
#include "xduce/response.hpp"
#include "xduce/transduction.hpp"

// Amplitude/phase technical noise: effective occupancies, white floors,
// correlated sideband spectra, and the full added-noise assembly.
//
// All C densities are two-sided and normalized to the shot noise of the beam
// incident on the cavity (the factor 1/2 relative to one-sided measured
// densities is applied at the dBc/Hz conversion boundary).
namespace xduce {

struct TechDensities {
  double c_xx = 0.0;
  double c_yy = 0.0;
  double c_xy = 0.0;

  void validate() const {
    if (c_xy * c_xy > c_xx * c_yy * (1 + 1e-12) + 1e-300)
      throw std::invalid_argument("technical densities violate c_xy^2 <= c_xx*c_yy");
  }
};

enum class CorrelationMode { phase_only, amplitude_only, max_positive_correlation, explicit_densities };

// Amplitude/phase susceptibilities of the pumped cavity at detuning Delta.
struct NoiseSusceptibilities {
  double kappa = 0.0;
  double kappa_ext = 0.0;
  double Delta = 0.0;
  double phi = 0.0;                 // optomechanical phase shift
  std::complex<double> rho{0, 0};   // reflected-pump attenuation

  NoiseSusceptibilities(double kappa_, double kappa_ext_, double Delta_)
      : kappa(kappa_), kappa_ext(kappa_ext_), Delta(Delta_) {
    phi = std::atan(2.0 * Delta / kappa);
    rho = 1.0 - kappa_ext / std::complex<double>(kappa / 2.0, -Delta);
  }

  std::complex<double> chi(double omega) const { return chi_cavity(kappa, Delta, omega); }

  std::complex<double> B_x(double omega) const {
    return std::exp(std::complex<double>(0, -phi)) * chi(omega) +
           std::exp(std::complex<double>(0, phi)) * std::conj(chi(-omega));
  }
  std::complex<double> B_y(double omega) const {
    return std::exp(std::complex<double>(0, -phi)) * chi(omega) -
           std::exp(std::complex<double>(0, phi)) * std::conj(chi(-omega));
  }

  // Correlation kernel entering the sideband peak modification; sign = +1 for
  // the upper (anti-Stokes) sideband, -1 for the lower.
  std::complex<double> B_tilde(int sign, double omega_m, const TechDensities& C) const {
    double s = sign >= 0 ? 1.0 : -1.0;
    std::complex<double> xw = chi(s * omega_m);
    std::complex<double> Bxm = B_x(-s * omega_m);
    std::complex<double> Bym = B_y(-s * omega_m);
    std::complex<double> i(0, 1);
    std::complex<double> term1 =
        kappa_ext * std::norm(xw) *
        (Bxm * (C.c_xx + i * C.c_xy) + Bym * (i * C.c_xy - C.c_yy));
    std::complex<double> term2 =
        std::conj(xw) * ((Bxm * C.c_xx + i * Bym * C.c_xy) * (1.0 + rho) +
                         (i * Bxm * C.c_xy - Bym * C.c_yy) * (1.0 - rho));
    return std::exp(std::complex<double>(0, -phi)) / 4.0 * (term1 - term2);
  }
};

inline NoiseSusceptibilities optical_susceptibilities(const TransducerParams& p,
                                                      double Delta_o) {
  return NoiseSusceptibilities(p.kappa_o(), p.kappa_o_ext, Delta_o);
}

// n_eff,o from amplitude/phase noise at detuning omega_m from the pump.
inline double n_eff_optical(const TransducerParams& p, const TechDensities& C,
                            double Delta_o) {
  C.validate();
  NoiseSusceptibilities s = optical_susceptibilities(p, Delta_o);
  double ko = p.kappa_o();
  double A_o = 1.0 + n_min(ko, Delta_o, p.omega_m);
  std::complex<double> Bx = s.B_x(p.omega_m), By = s.B_y(p.omega_m);
  double pref = 0.25 * p.eps_pc * (p.kappa_o_ext / ko) * A_o * (ko * ko / 4.0);
  return pref * (std::norm(Bx) * C.c_xx + std::norm(By) * C.c_yy +
                 2.0 * std::imag(Bx * std::conj(By)) * C.c_xy);
}

inline double n_eff_microwave(const TransducerParams& p, double Gamma_e) {
  if (Gamma_e < 0) throw std::invalid_argument("n_eff_microwave: Gamma_e >= 0");
  return p.tech_noise.a_e * Gamma_e + p.tech_noise.b_e;
}

// Frequency-independent excess noise around the upper (+1) / lower (-1)
// sideband, at transducer-output normalization.
inline double white_floor(const TransducerParams& p, const TechDensities& C,
                          int sign, double Delta_o) {
  C.validate();
  NoiseSusceptibilities s = optical_susceptibilities(p, Delta_o);
  double sgn = sign >= 0 ? 1.0 : -1.0;
  std::complex<double> refl = p.kappa_o_ext * s.chi(sgn * p.omega_m) - 1.0;
  std::complex<double> i(0, 1);
  double sym = (std::norm(s.rho) + std::norm(refl)) * (C.c_xx + C.c_yy);
  double cross = 2.0 * std::real(std::conj(s.rho) * refl *
                                 std::complex<double>(C.c_xx - C.c_yy, 2.0 * C.c_xy));
  return 0.25 * p.eps_cl * p.eps_pc * (sym - cross);
}

enum class Side { upper, lower };
enum class Normalization { transducer_output, detector_input };

// A frequency-sampled sideband noise spectrum. `delta` is the offset from the
// peak center (+omega_m or -omega_m); the analytic shape is
//   S(delta) = floor + [N_out (G/2)^2 + antisym * delta * G/2] / ((G/2)^2 + delta^2)
struct SidebandSpectrum {
  Side side = Side::upper;
  Normalization norm = Normalization::transducer_output;
  std::vector<double> delta;  // rad/s
  std::vector<double> psd;    // photons/s/Hz
  double floor = 1.0;         // 1 + S_tilde at transducer output
  double N_out = 0.0;         // Lorentzian peak amplitude
  double Gamma_T = 0.0;
  double antisym = 0.0;

  double model(double d) const {
    double h = Gamma_T / 2.0;
    return floor + (N_out * h * h + antisym * d * h) / (h * h + d * d);
  }
};

// Full sideband spectrum with technical-noise corrections; reduces exactly to
// the ideal spectrum when C = 0.
inline SidebandSpectrum sideband_spectrum(const TransducerParams& p,
                                          const OperatingPoint& op,
                                          const TechDensities& C, Side side,
                                          const std::vector<double>& delta_grid,
                                          double Delta_o = 0.0) {
  if (op.Gamma_T <= 0) throw std::invalid_argument("sideband_spectrum: Gamma_T > 0");
  C.validate();
  if (Delta_o == 0.0) Delta_o = -p.omega_m;
  double n_m = membrane_occupancy(p, op);
  double ko = p.kappa_o();
  double K = p.eps_cl * (p.kappa_o_ext / ko) * op.A_o;
  double q = p.eps_pc * ko * ko / 4.0;
  NoiseSusceptibilities s = optical_susceptibilities(p, Delta_o);

  SidebandSpectrum out;
  out.side = side;
  out.Gamma_T = op.Gamma_T;
  int sign = side == Side::upper ? +1 : -1;
  std::complex<double> Bt = s.B_tilde(sign, p.omega_m, C);
  out.floor = 1.0 + white_floor(p, C, sign, Delta_o);
  double thermal = side == Side::upper
                       ? n_m - q * std::real(Bt)
                       : (op.n_min_o / op.A_o) * (n_m + 1.0) + q * std::real(Bt);
  out.N_out = 4.0 * K * (op.Gamma_o / op.Gamma_T) * thermal;
  out.antisym = -4.0 * K * op.Gamma_o * q * std::imag(Bt) / op.Gamma_T;
  out.delta = delta_grid;
  out.psd.resize(delta_grid.size());
  for (size_t i = 0; i < delta_grid.size(); ++i) out.psd[i] = out.model(delta_grid[i]);
  return out;
}

// Exact partition of the Eq.-3 numerator plus the white-noise term; entries
// sum to `total` to rounding.
struct NoiseBudget {
  double n_th = 0.0;
  double n_eff_e = 0.0;
  double n_min_e = 0.0;
  double n_min_o = 0.0;
  double n_eff_o = 0.0;
  double lock = 0.0;
  double white = 0.0;
  double total = 0.0;
};

// Technical densities for the white-noise term, derived from the bundled a_o
// slope assuming phase noise only (C_yy grows linearly with Gamma_o).
inline TechDensities densities_from_a_o(const TransducerParams& p, double Gamma_o,
                                        double Delta_o = 0.0) {
  if (Delta_o == 0.0) Delta_o = -p.omega_m;
  TechDensities C;
  double n_eff = p.tech_noise.a_o * Gamma_o;
  if (n_eff <= 0) return C;
  NoiseSusceptibilities s = optical_susceptibilities(p, Delta_o);
  double ko = p.kappa_o();
  double A_o = 1.0 + n_min(ko, Delta_o, p.omega_m);
  double pref = 0.25 * p.eps_pc * (p.kappa_o_ext / ko) * A_o * (ko * ko / 4.0);
  C.c_yy = n_eff / (pref * std::norm(s.B_y(p.omega_m)));
  return C;
}

inline NoiseBudget added_noise_budget(const TransducerParams& p,
                                      const OperatingPoint& op,
                                      const TechDensities& C) {
  if (op.Gamma_e <= 0)
    throw std::invalid_argument("added_noise_full: Gamma_e must be > 0");
  double D = op.A_e * (p.kappa_e_ext / op.kappa_e) * op.Gamma_e;
  NoiseBudget b;
  b.n_th = p.gamma_m * p.n_th / D;
  b.n_eff_e = op.Gamma_e * (p.tech_noise.a_e * op.Gamma_e + p.tech_noise.b_e) / D;
  b.n_min_e = op.Gamma_e * op.n_min_e / D;
  b.n_min_o = op.Gamma_o * op.n_min_o / D;
  b.n_eff_o = op.Gamma_o * (p.tech_noise.a_o * op.Gamma_o) / D;
  b.lock = op.lock_backaction / D;
  EfficiencyReport eff = efficiency(p, op);
  if (eff.eta_up <= 0)
    throw std::invalid_argument("added_noise_full: zero up-conversion efficiency");
  b.white = white_floor(p, C, +1, -p.omega_m) / (op.A_e * op.A_o * eff.eta_up);
  b.total = b.n_th + b.n_eff_e + b.n_min_e + b.n_min_o + b.n_eff_o + b.lock + b.white;
  return b;
}

// Input-referred upconversion added noise with technical-noise corrections.
inline double added_noise_full(const TransducerParams& p, const OperatingPoint& op,
                               const TechDensities& C) {
  return added_noise_budget(p, op, C).total;
}

// dBc/Hz (one-sided, rad^2/Hz) <-> shot-noise-normalized two-sided density.
inline double density_from_dbc(double dbc_per_hz, double photon_flux) {
  return 4.0 * photon_flux * std::pow(10.0, dbc_per_hz / 10.0) / 2.0;
}
inline double dbc_from_density(double c, double photon_flux) {
  return 10.0 * std::log10(c / (2.0 * photon_flux));
}

inline TechDensities make_densities(double s_aa_dbc, double s_pp_dbc,
                                    double photon_flux, CorrelationMode mode) {
  TechDensities C;
  switch (mode) {
    case CorrelationMode::phase_only:
      C.c_yy = density_from_dbc(s_pp_dbc, photon_flux);
      break;
    case CorrelationMode::amplitude_only:
      C.c_xx = density_from_dbc(s_aa_dbc, photon_flux);
      break;
    case CorrelationMode::max_positive_correlation:
      C.c_xx = density_from_dbc(s_aa_dbc, photon_flux);
      C.c_yy = density_from_dbc(s_pp_dbc, photon_flux);
      C.c_xy = std::sqrt(C.c_xx * C.c_yy);
      break;
    case CorrelationMode::explicit_densities:
      throw std::invalid_argument("explicit_densities requires direct TechDensities");
  }
  return C;
}

}  // namespace xduce
