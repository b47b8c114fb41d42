#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "xduce/params.hpp"
#include "xduce/rng.hpp"
#include "xduce/technoise.hpp"

// Forward generation of detector-referenced heterodyne spectra with finite
// averaging noise, for pipeline round-trip tests.
namespace xduce {

// S_det = (1 - xi) + xi * S
inline SidebandSpectrum to_detector(const SidebandSpectrum& spec, double xi) {
  if (spec.norm == Normalization::detector_input)
    throw std::invalid_argument("spectrum already detector-normalized");
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("xi must be in (0,1]");
  SidebandSpectrum out = spec;
  out.norm = Normalization::detector_input;
  out.floor = (1.0 - xi) + xi * spec.floor;
  out.N_out = xi * spec.N_out;
  out.antisym = xi * spec.antisym;
  for (double& v : out.psd) v = (1.0 - xi) + xi * v;
  return out;
}

inline SidebandSpectrum from_detector(const SidebandSpectrum& spec, double xi) {
  if (spec.norm == Normalization::transducer_output)
    throw std::invalid_argument("spectrum already transducer-normalized");
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("xi must be in (0,1]");
  SidebandSpectrum out = spec;
  out.norm = Normalization::transducer_output;
  out.floor = (spec.floor - (1.0 - xi)) / xi;
  out.N_out = spec.N_out / xi;
  out.antisym = spec.antisym / xi;
  for (double& v : out.psd) v = (v - (1.0 - xi)) / xi;
  return out;
}

// Nearby mechanical mode of the chip substrate, interfering coherently with
// the membrane peak.
struct SubstrateMode {
  double delta_s = 0.0;    // center offset from the membrane peak (rad/s)
  double amplitude = 0.0;  // peak amplitude contribution (same scale as N_out)
  double phase = 0.0;      // relative phase (rad)
  double linewidth = 0.0;  // rad/s
};

// Replace the Lorentzian part by the squared coherent sum of two complex
// Lorentzian amplitudes (antisymmetric part must be negligible).
inline SidebandSpectrum add_substrate_mode(const SidebandSpectrum& spec,
                                           const SubstrateMode& mode) {
  if (mode.amplitude == 0.0) return spec;
  if (mode.linewidth <= 0) throw std::invalid_argument("substrate linewidth must be > 0");
  SidebandSpectrum out = spec;
  double h1 = spec.Gamma_T / 2.0;
  double h2 = mode.linewidth / 2.0;
  std::complex<double> c2 =
      std::sqrt(mode.amplitude) * std::exp(std::complex<double>(0, mode.phase));
  for (size_t i = 0; i < out.delta.size(); ++i) {
    double d = out.delta[i];
    std::complex<double> a1 = std::sqrt(std::max(spec.N_out, 0.0)) * h1 /
                              std::complex<double>(h1, -d);
    std::complex<double> a2 = c2 * h2 / std::complex<double>(h2, -(d - mode.delta_s));
    out.psd[i] = out.floor + std::norm(a1 + a2);
  }
  return out;
}

struct SynthConfig {
  SidebandSpectrum base;   // typically detector-normalized
  int M = 1;               // averaging count
  uint64_t seed = 0;
  uint64_t stream = 0;     // distinguishes concurrently generated spectra
};

// Per-bin averaged-periodogram draw: mean S(omega), relative std 1/sqrt(M).
// Deterministic under fixed (seed, stream); bins are independent streams.
inline std::vector<double> realize(const SynthConfig& cfg) {
  if (cfg.M < 1) throw std::invalid_argument("averaging count M must be >= 1");
  if (cfg.base.psd.empty()) throw std::invalid_argument("realize: grid not set");
  std::vector<double> out(cfg.base.psd.size());
  for (size_t i = 0; i < out.size(); ++i) {
    CounterRng rng(cfg.seed, (cfg.stream << 32) ^ (uint64_t)i);
    out[i] = cfg.base.psd[i] * rng.periodogram(cfg.M);
  }
  return out;
}

}  // namespace xduce
