#pragma once

#include <cmath>
#include <stdexcept>

#include "xduce/params.hpp"
#include "xduce/response.hpp"

// Dynamical backaction: damping rates, backaction limits, gains, and the
// weighted-bath membrane occupancy.
namespace xduce {

// Detuning-dependent damping kernel: Gamma = g^2 |a|^2 * F(kappa, Delta).
// Second (Stokes) term anti-damps; F < 0 for blue detuning.
inline double damping_kernel(double kappa, double Delta, double omega_m) {
  double h2 = kappa / 2.0;
  return kappa / (h2 * h2 + (omega_m + Delta) * (omega_m + Delta)) -
         kappa / (h2 * h2 + (omega_m - Delta) * (omega_m - Delta));
}

struct DampingResult {
  double gamma = 0.0;          // rad/s; negative = anti-damping
  bool weak_coupling = true;   // g|a| << kappa sanity flag
  bool anti_damping = false;
};

inline DampingResult gamma_opt(const TransducerParams& p, const PumpConfig& pump) {
  double n = mean_photon_number(pump, p, Mode::optical);
  DampingResult r;
  r.gamma = p.g_o * p.g_o * n * damping_kernel(p.kappa_o(), pump.Delta_o, p.omega_m);
  r.weak_coupling = p.g_o * std::sqrt(n) < 0.1 * p.kappa_o();
  r.anti_damping = r.gamma < 0;
  return r;
}

// Electromechanical damping with the power-dependent circuit loss applied:
// kappa_e and the photon number are solved self-consistently.
inline DampingResult gamma_em(const TransducerParams& p, const PumpConfig& pump) {
  double kappa = p.kappa_e_min();
  double n = 0.0;
  for (int i = 0; i < 200; ++i) {
    n = mean_photon_number(pump, p, Mode::microwave, kappa);
    double next = p.kappa_e_at_power(n);
    if (std::abs(next - kappa) < 1e-9 * kappa) { kappa = next; break; }
    kappa = next;
  }
  DampingResult r;
  r.gamma = p.g_e * p.g_e * n * damping_kernel(kappa, pump.Delta_e, p.omega_m);
  r.weak_coupling = p.g_e * std::sqrt(n) < 0.1 * kappa;
  r.anti_damping = r.gamma < 0;
  return r;
}

// Backaction-limited occupancy n_min = ((kappa/2)^2 + (Delta+omega_m)^2) / (-4 Delta omega_m)
inline double n_min(double kappa, double Delta, double omega_m) {
  if (Delta >= 0)
    throw std::invalid_argument("n_min: requires red detuning (Delta < 0)");
  double h2 = kappa / 2.0;
  return (h2 * h2 + (Delta + omega_m) * (Delta + omega_m)) / (-4.0 * Delta * omega_m);
}

// One transducer operating point: damping rates with the gains and bath
// occupancies they induce. Built by make_operating_point.
struct OperatingPoint {
  double Gamma_e = 0.0;
  double Gamma_o = 0.0;
  double Gamma_T = 0.0;
  double n_min_e = 0.0;
  double n_min_o = 0.0;
  double A_e = 1.0;
  double A_o = 1.0;
  double n_e = 0.0;          // n_min_e + a_e*Gamma_e + b_e
  double n_o = 0.0;          // n_min_o + a_o*Gamma_o
  double kappa_e = 0.0;      // power-dependent linewidth at this point
  double lock_backaction = 0.0;  // gamma_lock * n_min_lock (rad/s)
  bool unstable = false;     // Gamma_T <= 0
};

// Intracavity photon number required for a given electromechanical damping,
// including the power-dependent kappa_e (fixed point, monotone).
inline double photon_number_for_gamma_e(const TransducerParams& p, double Gamma_e,
                                        double Delta_e, double* kappa_out = nullptr) {
  double kappa = p.kappa_e_min();
  double n = 0.0;
  for (int i = 0; i < 300; ++i) {
    double F = damping_kernel(kappa, Delta_e, p.omega_m);
    n = Gamma_e / (p.g_e * p.g_e * F);
    double next = p.kappa_e_at_power(n);
    if (std::abs(next - kappa) < 1e-12 * kappa) { kappa = next; break; }
    kappa = next;
  }
  if (kappa_out) *kappa_out = kappa;
  return n;
}

inline double photon_number_for_gamma_o(const TransducerParams& p, double Gamma_o,
                                        double Delta_o) {
  double F = damping_kernel(p.kappa_o(), Delta_o, p.omega_m);
  return Gamma_o / (p.g_o * p.g_o * F);
}

// Incident pump power producing a given damping rate at Delta = -omega_m.
inline double power_for_gamma_o(const TransducerParams& p, double Gamma_o) {
  using constants::hbar;
  double n = photon_number_for_gamma_o(p, Gamma_o, -p.omega_m);
  double ko = p.kappa_o();
  double wp = p.omega_o + p.omega_m;
  return n * hbar * wp * (ko * ko / 4.0 + p.omega_m * p.omega_m) /
         (p.eps_pc * p.kappa_o_ext);
}

inline double power_for_gamma_e(const TransducerParams& p, double Gamma_e) {
  using constants::hbar;
  double kappa = 0.0;
  double n = photon_number_for_gamma_e(p, Gamma_e, -p.omega_m, &kappa);
  double wp = p.omega_e + p.omega_m;
  return n * hbar * wp * (kappa * kappa / 4.0 + p.omega_m * p.omega_m) / p.kappa_e_ext;
}

// Assemble the operating point induced by damping rates (Gamma_e, Gamma_o)
// at optimal detuning Delta = -omega_m on both resonators.
inline OperatingPoint make_operating_point(const TransducerParams& p, double Gamma_e,
                                           double Gamma_o) {
  OperatingPoint op;
  op.Gamma_e = Gamma_e;
  op.Gamma_o = Gamma_o;
  op.lock_backaction = p.lock.backaction_product();
  double gamma_lock = p.lock.gamma_lock;
  op.Gamma_T = Gamma_e + Gamma_o + p.gamma_m + gamma_lock;
  op.unstable = op.Gamma_T <= 0;

  op.kappa_e = p.kappa_e_min();
  if (Gamma_e > 0) photon_number_for_gamma_e(p, Gamma_e, -p.omega_m, &op.kappa_e);

  op.n_min_o = n_min(p.kappa_o(), -p.omega_m, p.omega_m);
  op.n_min_e = n_min(op.kappa_e, -p.omega_m, p.omega_m);
  op.A_o = 1.0 + op.n_min_o;
  op.A_e = 1.0 + op.n_min_e;

  op.n_o = op.n_min_o + p.tech_noise.a_o * Gamma_o;
  op.n_e = op.n_min_e + p.tech_noise.a_e * Gamma_e + p.tech_noise.b_e;
  return op;
}

// Weighted-bath occupancy:
// n_m = (gamma_m n_th + Gamma_e n_e + Gamma_o n_o + gamma_lock n_min_lock) / Gamma_T
inline double membrane_occupancy(const TransducerParams& p, const OperatingPoint& op) {
  if (op.Gamma_T <= 0)
    throw std::invalid_argument("membrane_occupancy: Gamma_T must be > 0");
  return (p.gamma_m * p.n_th + op.Gamma_e * op.n_e + op.Gamma_o * op.n_o +
          op.lock_backaction) /
         op.Gamma_T;
}

}  // namespace xduce
