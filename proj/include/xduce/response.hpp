#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "xduce/constants.hpp"
#include "xduce/params.hpp"

// Steady-state linear response of the microwave circuit and optical cavity.
// Pure functions, reentrant.
namespace xduce {

// Incident pump powers and detunings. Absolute pump frequencies follow
// omega_pump = omega_res - Delta.
struct PumpConfig {
  double P_e = 0.0;      // W
  double P_o = 0.0;      // W
  double Delta_e = 0.0;  // rad/s
  double Delta_o = 0.0;  // rad/s

  double omega_pump_e(const TransducerParams& p) const { return p.omega_e - Delta_e; }
  double omega_pump_o(const TransducerParams& p) const { return p.omega_o - Delta_o; }
};

struct ComplexResponse {
  std::vector<double> omega;                 // rad/s, strictly increasing
  std::vector<std::complex<double>> value;
};

// chi(omega) = 1 / (kappa/2 - i (omega + Delta))
inline std::complex<double> chi_cavity(double kappa, double Delta, double omega) {
  if (kappa <= 0) throw std::invalid_argument("chi_cavity: kappa must be > 0");
  return 1.0 / std::complex<double>(kappa / 2.0, -(omega + Delta));
}

// S_ee(omega) = kappa_ext / (kappa/2 - i (omega - omega_res)) - 1
inline std::complex<double> reflection_amplitude(double kappa_ext, double kappa,
                                                 double omega_res, double omega) {
  if (kappa_ext < 0 || kappa <= 0)
    throw std::invalid_argument("reflection_amplitude: need kappa > 0, kappa_ext >= 0");
  return kappa_ext / std::complex<double>(kappa / 2.0, -(omega - omega_res)) - 1.0;
}

inline std::complex<double> s_ee_reflection(const TransducerParams& p,
                                            double kappa_e, double omega) {
  return reflection_amplitude(p.kappa_e_ext, kappa_e, p.omega_e, omega);
}

inline std::complex<double> s_oo_reflection(const TransducerParams& p, double omega) {
  return reflection_amplitude(p.kappa_o_ext, p.kappa_o(), p.omega_o, omega);
}

// Detector-facing power reflection: the mode-matched fraction eps sees the
// cavity dip, the rest reflects promptly.
inline double power_reflection(std::complex<double> s, double eps) {
  return eps * std::norm(s) + (1.0 - eps);
}

enum class Mode { microwave, optical };

// |a|^2 or |b|^2. The optical pump couples through modematching eps_pc;
// the microwave drive has no spatial mode mismatch.
inline double mean_photon_number(const PumpConfig& pump, const TransducerParams& p,
                                 Mode which, double kappa_e_override = -1.0) {
  using constants::hbar;
  if (which == Mode::microwave) {
    if (pump.P_e < 0) throw std::invalid_argument("P_e must be >= 0");
    double kappa = kappa_e_override > 0 ? kappa_e_override : p.kappa_e_min();
    double wp = pump.omega_pump_e(p);
    return (pump.P_e / (hbar * wp)) * p.kappa_e_ext /
           (kappa * kappa / 4.0 + pump.Delta_e * pump.Delta_e);
  }
  if (pump.P_o < 0) throw std::invalid_argument("P_o must be >= 0");
  double kappa = p.kappa_o();
  double wp = pump.omega_pump_o(p);
  return (pump.P_o / (hbar * wp)) * p.eps_pc * p.kappa_o_ext /
         (kappa * kappa / 4.0 + pump.Delta_o * pump.Delta_o);
}

// Intracavity circulating power from pump and lock beams.
inline double circulating_power(const TransducerParams& p, const PumpConfig& pump) {
  if (p.cavity_length <= 0)
    throw std::invalid_argument("circulating_power: cavity length must be > 0");
  double fsr = constants::c0 / (2.0 * p.cavity_length);  // Hz
  double ko = p.kappa_o();
  double denom_pump = ko * ko / 4.0 + pump.Delta_o * pump.Delta_o;
  double denom_lock = ko * ko / 4.0 + p.lock.detuning * p.lock.detuning;
  return fsr * p.kappa_o_ext *
         (p.eps_pc * pump.P_o / denom_pump + p.eps_lock * p.lock.power / denom_lock);
}

}  // namespace xduce
