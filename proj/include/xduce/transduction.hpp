#pragma once

#include <complex>
#include <stdexcept>

#include "xduce/cooling.hpp"
#include "xduce/params.hpp"

// Scattering parameters, transduction efficiency and bandwidth, and the
// ideal (technical-noise-free) added noise.
namespace xduce {

struct EfficiencyReport {
  double eta_up = 0.0;
  double eta_down = 0.0;
  double eta_bidirectional = 0.0;  // sqrt(eta_up * eta_down)
  double eta_matched = 0.0;        // eta_M
  double zeta_t = 0.0;             // eta_t / (kappa_e_ext/kappa_e)
  double bandwidth = 0.0;          // Gamma_T (rad/s)
  double A_e = 1.0;
  double A_o = 1.0;
};

// Microwave-to-optical scattering parameter at sideband frequency omega,
// LO modematching folded in as sqrt(eps_cl).
inline std::complex<double> s_oe(const TransducerParams& p, const OperatingPoint& op,
                                 double omega) {
  if (op.Gamma_T <= 0) throw std::invalid_argument("s_oe: Gamma_T must be > 0");
  double ext_e = p.kappa_e_ext / op.kappa_e;
  double ext_o = p.kappa_o_ext / p.kappa_o();
  double amp = std::sqrt(p.eps_cl * op.A_e * op.A_o * ext_e * ext_o) *
               std::sqrt(op.Gamma_e * op.Gamma_o);
  return amp / std::complex<double>(op.Gamma_T / 2.0, -(omega - p.omega_m));
}

inline EfficiencyReport efficiency(const TransducerParams& p, const OperatingPoint& op) {
  if (op.Gamma_T <= 0) throw std::invalid_argument("efficiency: Gamma_T must be > 0");
  EfficiencyReport r;
  double eps = std::sqrt(p.eps_pc * p.eps_cl);
  double ext_e = p.kappa_e_ext / op.kappa_e;
  double ext_o = p.kappa_o_ext / p.kappa_o();
  r.eta_matched = eps * ext_o * ext_e;
  double lorentz = 4.0 * op.Gamma_e * op.Gamma_o / (op.Gamma_T * op.Gamma_T);
  double eta_t = r.eta_matched * lorentz;
  // eta_up carries the full LO modematching, eta_down the pump-side one;
  // the bidirectional efficiency is their geometric mean.
  r.eta_up = p.eps_cl * ext_o * ext_e * lorentz;
  r.eta_down = p.eps_pc * ext_o * ext_e * lorentz;
  r.eta_bidirectional = eta_t;
  r.zeta_t = ext_e > 0 ? eta_t / ext_e : 0.0;
  r.bandwidth = op.Gamma_T;
  r.A_e = op.A_e;
  r.A_o = op.A_o;
  return r;
}

enum class Direction { up, down };

// Added noise referred to the transducer input, without technical noise.
inline double added_noise_ideal(const TransducerParams& p, const OperatingPoint& op,
                                Direction dir) {
  double n_m = membrane_occupancy(p, op);
  if (dir == Direction::up) {
    if (op.Gamma_e <= 0)
      throw std::invalid_argument("added_noise_ideal: Gamma_e must be > 0 for up");
    return n_m * op.Gamma_T / (op.A_e * (p.kappa_e_ext / op.kappa_e) * op.Gamma_e);
  }
  if (op.Gamma_o <= 0)
    throw std::invalid_argument("added_noise_ideal: Gamma_o must be > 0 for down");
  return n_m * op.Gamma_T /
         (p.eps_pc * op.A_o * (p.kappa_o_ext / p.kappa_o()) * op.Gamma_o);
}

}  // namespace xduce
