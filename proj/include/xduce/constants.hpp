#pragma once

// Physical constants (CODATA 2018). Single point of truth for the whole
// library; everything internal is SI with angular frequencies in rad/s.
namespace xduce::constants {

inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double c0 = 299792458.0;        // m/s, exact
inline constexpr double kB = 1.380649e-23;       // J/K, exact
inline constexpr double two_pi = 6.283185307179586476925;

}  // namespace xduce::constants
