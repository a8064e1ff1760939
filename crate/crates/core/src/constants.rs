//! Physical constants and unit conversions.
//!
//! All frequencies are handled in eV internally. The eV ↔ rad/s conversion
//! factor is pinned here so every module agrees bit-for-bit.

/// Elementary charge, C (CODATA, exact).
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// Vacuum permittivity ε₀, F/m (CODATA 2018).
pub const VACUUM_PERMITTIVITY_F_M: f64 = 8.854_187_812_8e-12;

/// Electron rest mass, kg (CODATA 2018).
pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;

/// Avogadro constant, 1/mol (exact).
pub const AVOGADRO_PER_MOL: f64 = 6.022_140_76e23;

/// Reduced Planck constant ħ, J·s (CODATA 2018).
pub const HBAR_J_S: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;

/// Angular-frequency equivalent of 1 eV, rad/s.
///
/// This is the conventional rounded factor used with the optical tables this
/// crate is designed for. It differs from the CODATA ratio e/ħ
/// (1.5192674…×10¹⁵) in the fourth digit, which shifts all force results by
/// well under 0.1%.
pub const RAD_PER_S_PER_EV: f64 = 1.519e15;

/// Converts a photon energy in eV to an angular frequency in rad/s.
#[inline]
pub fn ev_to_rad_s(ev: f64) -> f64 {
    ev * RAD_PER_S_PER_EV
}

/// Converts an angular frequency in rad/s to a photon energy in eV.
#[inline]
pub fn rad_s_to_ev(rad_s: f64) -> f64 {
    rad_s / RAD_PER_S_PER_EV
}

/// Vacuum wavenumber ζ/c in 1/m for a frequency given in eV.
#[inline]
pub fn ev_to_inv_m(ev: f64) -> f64 {
    ev * RAD_PER_S_PER_EV / SPEED_OF_LIGHT_M_S
}
