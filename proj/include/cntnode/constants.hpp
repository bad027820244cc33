#pragma once

#include <numbers>

namespace cntnode::constants {

// CODATA 2018 (exact SI values where defined).
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double planck = 6.62607015e-34;     // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double debye = 3.33564e-30;  // C m

/// Single-electron flux quantum h/e in webers.
inline constexpr double flux_quantum = planck / elementary_charge;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace cntnode::constants

namespace cntnode::units {

// Internal rates are angular frequencies (rad/s). User-facing "GHz" values are
// ordinary frequencies nu = omega / 2pi.
constexpr double ghz_to_rad_per_s(double ghz) { return constants::two_pi * ghz * 1e9; }
constexpr double rad_per_s_to_ghz(double omega) { return omega / (constants::two_pi * 1e9); }
constexpr double hz_to_rad_per_s(double hz) { return constants::two_pi * hz; }
constexpr double rad_per_s_to_hz(double omega) { return omega / constants::two_pi; }

}  // namespace cntnode::units
