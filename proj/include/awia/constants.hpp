#pragma once

// Physical constants (SI, CODATA 2018) and a few derived atomic-unit
// conversion factors used throughout.

namespace awia::constants {

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double h_planck = 6.62607015e-34;   // J s
inline constexpr double m_electron = 9.1093837015e-31;  // kg
inline constexpr double e_charge = 1.602176634e-19;  // C
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double hartree = 4.3597447222071e-18;    // J
inline constexpr double rydberg_energy = hartree / 2.0;   // J
inline constexpr double ev = e_charge;               // J

// 87Rb
inline constexpr double m_rb87 = 1.44316060e-25;     // kg
inline constexpr double a_bg_rb87 = 109.0 * bohr_radius;  // condensate s-wave length

// zero-energy e--Rb(5S) triplet s-wave scattering length
inline constexpr double a_s_zero = -16.05 * bohr_radius;

// Coulomb coupling e^2/(4 pi eps0), J m
inline constexpr double coulomb_k = e_charge * e_charge / (4.0 * 3.14159265358979323846 * eps0);

inline constexpr double pi = 3.14159265358979323846;

// atomic-unit conversions
inline constexpr double au_time = hbar / hartree;            // s
inline constexpr double au_velocity = bohr_radius / au_time; // m/s
inline constexpr double hartree_to_hz = hartree / h_planck;  // Hz per Hartree

}  // namespace awia::constants
