#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xduce/cooling.hpp"
#include "xduce/params.hpp"
#include "xduce/technoise.hpp"

// The analysis pipeline: spectral fits, squashing correction, sideband
// asymmetry thermometry, curve fits, temperature-sweep calibration, ringdown,
// and four-point efficiency calibration.
namespace xduce {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd estimate;
  Eigen::VectorXd sigma;  // sqrt(diag of covariance)
  Eigen::MatrixXd covariance;
  double residual_sum = 0.0;
  int dof = 0;
  bool converged = false;  // false => estimates non-authoritative
  int iterations = 0;

  double get(const std::string& name) const;
  double get_sigma(const std::string& name) const;
};

struct SpectrumPoint {
  double delta = 0.0;  // rad/s from the peak center
  double psd = 0.0;
  double sigma = 1.0;
};

enum class LorentzModel { single, coherent_double };

// Floor + Lorentzian peak(s) fit. Parameters (single): floor, amplitude,
// center, width [, antisym]; coherent_double adds amplitude2, center2,
// width2, phase and models the squared sum of two complex Lorentzians.
FitResult fit_lorentzian(const std::vector<SpectrumPoint>& pts, LorentzModel model,
                         bool antisym = false);

// Undo phase-noise squashing of the measured peak amplitudes using the
// measured excess white floors; exact algebraic inverse of the forward
// C_yy-linear squashing.
struct SidebandPair {
  double upper = 0.0;
  double lower = 0.0;
};
SidebandPair unsquash(const SidebandPair& N_det, const SidebandPair& S_tilde_det,
                      const TransducerParams& p, const OperatingPoint& op);

double asymmetry_ratio(double n_m, double n_min);         // forward Stokes/anti-Stokes
double occupancy_from_asymmetry(double r, double n_min);  // inverse

struct CoolingCurvePoint {
  double Gamma_e = 0.0;
  double Gamma_o = 0.0;
  double n_m = 0.0;
  double sigma = 1.0;
};

enum class CoolingMode { optical_only, electro_optical };

// Weighted fit of the weighted-bath occupancy (+ lock term):
// optical_only frees {n_th, a_o}; electro_optical frees {n_eff_e} with
// {n_th, a_o} frozen at the values in `p`.
FitResult fit_cooling_curve(const std::vector<CoolingCurvePoint>& pts,
                            CoolingMode mode, const TransducerParams& p);

struct EfficiencyPoint {
  double Gamma_e = 0.0;
  double Gamma_o = 0.0;
  double eta = 0.0;
  double sigma = 1.0;
};

enum class EfficiencyFitMode { eta_m, zeta_m };

// Fit of eta = m * 4 G_e G_o / G_T^2. In zeta mode the data are divided by
// the power-dependent overcoupling ratio kappa_e_ext/kappa_e before fitting,
// per the power-dependent-loss strategy.
FitResult fit_efficiency_curve(const std::vector<EfficiencyPoint>& pts,
                               EfficiencyFitMode mode, const TransducerParams& p);

struct AddedNoisePoint {
  double Gamma_e = 0.0;
  double N_out_plus = 0.0;  // upper sideband amplitude, transducer output
  double sigma = 1.0;
};

// Fit of the upper-sideband amplitude vs electromechanical damping over
// {a_e, b_e, n_th} at fixed Gamma_o and lock contribution.
FitResult fit_added_noise_curve(const std::vector<AddedNoisePoint>& pts,
                                double Gamma_o, const TransducerParams& p);

// Input-referred added noise implied by an added-noise curve fit.
double added_noise_from_fit(const FitResult& fit, double Gamma_e, double Gamma_o,
                            const TransducerParams& p);

struct TemperaturePoint {
  double T = 0.0;     // K
  double area = 0.0;  // N_det * Gamma_T (rad/s)
  double sigma = 1.0;
};

struct TempSweepResult {
  FitResult fit;       // a_xi, b_xi
  double xi_from_a = 0.0;
  double xi_from_b = 0.0;
  double T_eq = 0.0;   // where the fit equals the measured base-T area
};

// Area vs base-plate temperature: N*Gamma_T = a_xi (a_g T^2 + b_g T) + b_xi.
// `excluded` lists point indices left out of the fit (never automatic).
TempSweepResult fit_temperature_sweep(const std::vector<TemperaturePoint>& pts,
                                      double a_gamma, double b_gamma,
                                      const std::vector<int>& excluded,
                                      const TransducerParams& p,
                                      const OperatingPoint& op);

struct RingdownTrace {
  double P_e = 0.0;                 // W
  std::vector<double> t;            // s
  std::vector<double> amplitude;    // envelope ~ exp(-Gamma_T t / 2)
};

struct RingdownResult {
  std::vector<double> Gamma_T;  // per trace (rad/s)
  double gamma_m = 0.0;         // zero-power intercept
  double gamma_m_sigma = 0.0;
  double slope = 0.0;           // dGamma_T/dP_e (rad/s per W)
  double g_e = 0.0;             // implied vacuum coupling (rad/s)
};

RingdownResult fit_ringdown(const std::vector<RingdownTrace>& traces,
                            const TransducerParams& p);

struct GammaTempPoint {
  double T = 0.0;
  double gamma = 0.0;  // rad/s
  double sigma = 1.0;
};

// Linear fit gamma_m = a_gamma * T + b_gamma.
FitResult fit_gamma_vs_temperature(const std::vector<GammaTempPoint>& pts);

// Four-point network calibration; unknown path gains cancel by construction.
struct FourPointMeasurement {
  double s_oe = 0.0;      // alpha |S_oe|^2 delta
  double s_eo = 0.0;      // gamma |S_eo|^2 beta
  double s_ee_off = 0.0;  // alpha |S_ee,off|^2 beta
  double s_oo_off = 0.0;  // eps_pl gamma |S_oo,off|^2 delta (prompt reflection)
};
double efficiency_four_point(const FourPointMeasurement& m, double eps_pl,
                             double gain_product);  // A_e * A_o

}  // namespace xduce
