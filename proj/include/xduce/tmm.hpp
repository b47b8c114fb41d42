#pragma once

#include <complex>
#include <string>
#include <vector>

#include "xduce/params.hpp"

// One-dimensional transfer-matrix model of the mirror-membrane-mirror stack.
namespace xduce {

struct Layer {
  double thickness = 0.0;               // m
  std::complex<double> index{1.0, 0.0};
};

// Interior layers run from the input (curved, higher-transmission) mirror to
// the back (flat) mirror. Terminal mirrors are lumped power transmissions by
// default; full Bragg stacks may be supplied instead.
struct LayerStack {
  double T_input = 190e-6;
  double T_back = 7e-6;
  std::vector<Layer> input_mirror;  // non-empty overrides the lumped T_input
  std::vector<Layer> back_mirror;
  std::vector<Layer> layers;
  int movable = -1;  // index of the membrane in `layers`

  void validate() const;
};

// The paper's geometry: long vacuum gap (L - t), membrane slab, short vacuum
// gap t. The silicon chip carrying the membrane has a through-hole, so both
// gaps are vacuum. Membrane index defaults to stoichiometric silicon nitride.
LayerStack default_stack(double cavity_length, double membrane_gap,
                         double mem_thickness = 100e-9, double mem_index = 2.0);
LayerStack empty_stack(double cavity_length);

LayerStack load_stack_file(const std::string& path);
std::string serialize_stack(const LayerStack& s);

struct PlaneWaveResponse {
  std::complex<double> r;  // amplitude reflection, input side
  std::complex<double> t;  // amplitude transmission
};

// Membrane displaced by dx toward the input mirror; lock_offset stretches the
// first interior gap (cavity length control).
PlaneWaveResponse plane_wave(const LayerStack& s, double lambda, double dx = 0.0,
                             double lock_offset = 0.0);

// Resonant wavelengths of the fixed stack inside [lambda_min, lambda_max],
// refined to relative tolerance ~1e-13.
std::vector<double> resonances(const LayerStack& s, double lambda_min,
                               double lambda_max, int n_scan = 0);

struct ResonanceAnalysis {
  double lambda = 0.0;           // m
  double G_o = 0.0;              // rad/s per m (signed)
  double kappa_total = 0.0;      // rad/s, from transmission FWHM
  double kappa_ext = 0.0;        // input-mirror part
  double kappa_back = 0.0;       // back-mirror part
  double kappa_total_decay = 0.0;  // cross-check from photon-decay bookkeeping
};

// Gap stretch putting a stack resonance exactly at `lambda` (cavity lock).
double lock_offset_for(const LayerStack& s, double lambda);

// Analyze the resonance locked at `lambda` (the stack, with lock_offset
// applied, must be resonant there).
ResonanceAnalysis analyze_resonance(const LayerStack& s, double lambda,
                                    double lock_offset = 0.0);

struct TmmSweepResult {
  std::vector<double> wavelength;       // sweep grid (m)
  std::vector<ResonanceAnalysis> at;    // per grid point, cavity re-locked
  std::vector<double> resonant_wavelengths;  // fixed-stack roots in window
};

// Fig.-5(b)-style sweep: at each wavelength the cavity length is re-locked
// onto resonance, then G_o and the decay rates are evaluated there.
TmmSweepResult sweep(const LayerStack& s, double lambda_min, double lambda_max,
                     int n_points);

struct GeometryResult {
  double G_e = 0.0;  // rad/s per m
  double d = 0.0;    // pad gap (m)
  double p = 0.0;    // participation at d
};

// Default participation model: parallel-plate motional capacitance ~1/d plus
// a fixed parasitic, calibrated so p(830 nm) = 0.67.
double participation_default(double d);

// Solve G_e = p(d) * omega_e / (2 d) against the measured g_e = G_e * x_zp_e.
// Root bracketed in d ∈ [50 nm, 5 um]. A fixed (d-independent) participation
// may be supplied via p_fixed >= 0.
GeometryResult g_e_from_geometry(const TransducerParams& params,
                                 double p_fixed = -1.0);

}  // namespace xduce
