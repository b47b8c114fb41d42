#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace xduce {

// Pump-power-dependent technical noise coefficients.
//
// a_o, a_e multiply *angular* damping rates: n_eff,o = a_o * Gamma_o,
// n_eff,e = a_e * Gamma_e + b_e with Gamma in rad/s. c_xx/c_yy/c_xy are
// two-sided spectral densities normalized to the shot noise of the beam
// incident on the cavity (dimensionless once multiplied by 4*Ndot).
struct TechNoiseCoeffs {
  double a_o = 0.0;   // (rad/s)^-1
  double a_e = 0.0;   // (rad/s)^-1
  double b_e = 0.0;
  double c_xx = 0.0;
  double c_yy = 0.0;
  double c_xy = 0.0;
};

// Weak near-resonant beam used to lock the optical cavity. The backaction
// product gamma_lock*n_min_lock is what actually enters the occupancy and
// noise formulas; when `gamma_lock_nmin` is set (>= 0) it overrides the pair.
struct LockBeamSpec {
  double power = 0.0;            // W
  double detuning = 0.0;         // rad/s
  double gamma_lock = 0.0;       // rad/s
  double n_min_lock = 0.0;
  double gamma_lock_nmin = -1.0; // rad/s; < 0 means "derive from the pair"

  double backaction_product() const {
    return gamma_lock_nmin >= 0.0 ? gamma_lock_nmin : gamma_lock * n_min_lock;
  }
};

// Measurement chain between transducer output and detector.
struct DetectionChain {
  double xi_o = 1.0;
  double xi_e = 1.0;
  double n_hemt = 0.0;      // photons/s/Hz, HEMT-referred added noise
  double alpha = 1.0;       // microwave drive path loss
  double beta = 1.0;        // microwave readout path gain
  double gamma_path = 1.0;  // RF/optical drive path loss
  double delta = 1.0;       // optical readout path efficiency
  double sigma_q = 1.0;     // photodetector quantum efficiency
  double xi_path = 1.0;
  double xi_dark = 1.0;
};

// Full static parameter set: resonator frequencies and linewidths, couplings,
// modematchings, geometry, bath occupancy, technical noise, lock beam.
// All rates and frequencies are angular (rad/s); lengths in m.
struct TransducerParams {
  double omega_o = 0.0;
  double omega_e = 0.0;
  double omega_m = 0.0;

  double kappa_o_ext = 0.0;
  double kappa_o_back = 0.0;
  double kappa_o_int = 0.0;
  double kappa_e_ext = 0.0;
  double gamma_m = 0.0;

  // kappa_e_int vs intracavity microwave photon number, piecewise linear,
  // clamped outside the table.
  std::vector<std::pair<double, double>> kappa_e_int_table;

  double g_o = 0.0;
  double g_e = 0.0;

  double eps_pc = 1.0;
  double eps_cl = 1.0;
  double eps_lock = 1.0;
  double eps_pl = 1.0;

  double x_zp_e = 0.0;
  double x_zp_o = 0.0;

  double cavity_length = 0.0;  // L
  double membrane_gap = 0.0;   // t, membrane to flat mirror
  double pad_gap = 0.0;        // d, capacitor pad separation
  double lambda = 0.0;         // operating wavelength

  double n_th = 0.0;

  double delta_birefringence = 0.0;  // metadata only

  TechNoiseCoeffs tech_noise;
  LockBeamSpec lock;
  DetectionChain chain;

  double kappa_o() const { return kappa_o_ext + kappa_o_back + kappa_o_int; }

  // kappa_e at a given intracavity photon number (external + interpolated
  // internal loss). Monotone non-decreasing for a monotone table.
  double kappa_e_at_power(double n_photon) const;

  // Lowest-power microwave linewidth, used where power dependence is not
  // being tracked.
  double kappa_e_min() const {
    if (kappa_e_int_table.empty())
      throw std::invalid_argument("kappa_e_int_table is empty");
    return kappa_e_ext + kappa_e_int_table.front().second;
  }

  void validate() const;  // throws std::invalid_argument naming the invariant
};

enum class DatasetTag { fig2, fig3 };

// Bundled Table I preset. Dual-valued entries (modematchings, lock beam
// linewidth, noise slopes) are resolved by the dataset tag, never silently.
TransducerParams table1_preset(DatasetTag tag);

// Structured-text (JSON) config I/O. Frequency-like keys carry an `_hz`
// suffix in files and are multiplied by 2*pi on ingest; unknown keys are
// rejected with the offending key named.
TransducerParams load_params(const std::string& json_text);
TransducerParams load_params_file(const std::string& path);
std::string serialize_params(const TransducerParams& p);

}  // namespace xduce
