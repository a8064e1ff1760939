//! Closed-form Drude-model evaluations on the real and imaginary frequency
//! axes, the plasma frequency from the conduction-electron density, and the
//! analytic low-frequency contribution to ε(iζ).
//!
//! All frequencies in eV.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants;

#[derive(Debug, Error)]
pub enum DrudeError {
    #[error("invalid Drude parameters: {0}")]
    InvalidParams(String),
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("cutoff frequency must be positive, got {0}")]
    NonPositiveCutoff(f64),
    #[error("invalid electron gas: {0}")]
    InvalidGas(String),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

fn default_pol() -> f64 {
    1.0
}

/// Low-frequency metal parameters: plasma frequency ω_p, relaxation
/// frequency ω_τ, and the polarization constant P collecting atomic
/// polarizability and interband contributions to ε′.
///
/// P defaults to 1 (bare Drude). Optional statistical errors accompany
/// fitted parameter sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrudeParams {
    /// Plasma frequency, eV.
    #[serde(rename = "omega_p_eV")]
    pub omega_p: f64,
    /// Relaxation frequency, eV.
    #[serde(rename = "omega_tau_eV")]
    pub omega_tau: f64,
    /// Polarization constant P (dimensionless).
    #[serde(default = "default_pol")]
    pub pol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_pol: Option<f64>,
}

impl DrudeParams {
    pub fn new(omega_p: f64, omega_tau: f64) -> Result<Self, DrudeError> {
        Self::with_pol(omega_p, omega_tau, 1.0)
    }

    pub fn with_pol(omega_p: f64, omega_tau: f64, pol: f64) -> Result<Self, DrudeError> {
        let p = DrudeParams {
            omega_p,
            omega_tau,
            pol,
            err_p: None,
            err_tau: None,
            err_pol: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DrudeError> {
        if !self.omega_p.is_finite() || self.omega_p <= 0.0 {
            return Err(DrudeError::InvalidParams(format!(
                "omega_p must be positive, got {}",
                self.omega_p
            )));
        }
        if !self.omega_tau.is_finite() || self.omega_tau <= 0.0 {
            return Err(DrudeError::InvalidParams(format!(
                "omega_tau must be positive, got {}",
                self.omega_tau
            )));
        }
        if self.omega_tau >= self.omega_p {
            return Err(DrudeError::InvalidParams(format!(
                "omega_tau ({}) must be below omega_p ({})",
                self.omega_tau, self.omega_p
            )));
        }
        if !self.pol.is_finite() {
            return Err(DrudeError::InvalidParams(format!(
                "pol must be finite, got {}",
                self.pol
            )));
        }
        Ok(())
    }

    /// Parses the JSON document form (`omega_p_eV`, `omega_tau_eV`, optional
    /// `pol` and `err_*`) and validates the result.
    pub fn from_json(text: &str) -> Result<Self, DrudeError> {
        let p: DrudeParams = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("DrudeParams serialization cannot fail")
    }

    /// Returns a copy with a scaled plasma frequency.
    pub fn scale_omega_p(&self, factor: f64) -> Self {
        DrudeParams {
            omega_p: self.omega_p * factor,
            ..self.clone()
        }
    }

    /// Returns a copy with a scaled relaxation frequency.
    pub fn scale_omega_tau(&self, factor: f64) -> Self {
        DrudeParams {
            omega_tau: self.omega_tau * factor,
            ..self.clone()
        }
    }
}

/// Drude ε″(ω) without validation; callers guarantee ω > 0.
#[inline]
pub(crate) fn eps_im_raw(omega_p: f64, omega_tau: f64, omega: f64) -> f64 {
    omega_p * omega_p * omega_tau / (omega * (omega * omega + omega_tau * omega_tau))
}

/// Drude dielectric function on the real axis with the polarization term:
/// ε′ = P − ω_p²/(ω² + ω_τ²), ε″ = ω_p² ω_τ / (ω(ω² + ω_τ²)).
pub fn eps_real_axis(p: &DrudeParams, omega: f64) -> Result<(f64, f64), DrudeError> {
    p.validate()?;
    if omega <= 0.0 || !omega.is_finite() {
        return Err(DrudeError::NonPositiveFrequency(omega));
    }
    let d = omega * omega + p.omega_tau * p.omega_tau;
    Ok((
        p.pol - p.omega_p * p.omega_p / d,
        eps_im_raw(p.omega_p, p.omega_tau, omega),
    ))
}

/// Drude dielectric function at imaginary frequency:
/// ε(iζ) = 1 + ω_p² / (ζ(ζ + ω_τ)). Real and greater than 1.
pub fn eps_imag_axis_closed(p: &DrudeParams, zeta: f64) -> Result<f64, DrudeError> {
    p.validate()?;
    if zeta <= 0.0 || !zeta.is_finite() {
        return Err(DrudeError::NonPositiveFrequency(zeta));
    }
    Ok(1.0 + p.omega_p * p.omega_p / (zeta * (zeta + p.omega_tau)))
}

/// Contribution of the Drude extrapolation region (0, ω_c) to ε(iζ):
///
/// ε₁(iζ) = (2/π) ω_p²/(ζ² − ω_τ²) [arctan(ω_c/ω_τ) − (ω_τ/ζ) arctan(ω_c/ζ)].
///
/// The apparent pole at ζ = ω_τ is removable; within |ζ − ω_τ| < 10⁻⁶ ω_τ
/// the analytic limit is used instead.
pub fn eps1_low_contribution(p: &DrudeParams, omega_c: f64, zeta: f64) -> Result<f64, DrudeError> {
    p.validate()?;
    if omega_c <= 0.0 || !omega_c.is_finite() {
        return Err(DrudeError::NonPositiveCutoff(omega_c));
    }
    if zeta <= 0.0 || !zeta.is_finite() {
        return Err(DrudeError::NonPositiveFrequency(zeta));
    }
    Ok(imag_kernel_range(p.omega_p, p.omega_tau, zeta, 0.0, omega_c) * std::f64::consts::FRAC_2_PI)
}

/// ∫ₐᵇ x ε″_Drude(x)/(x² + ζ²) dx in closed form (without the 2/π factor).
///
/// Partial fractions give
/// ω_p² ω_τ/(ζ² − ω_τ²) · [(arctan(b/ω_τ) − arctan(a/ω_τ))/ω_τ − (arctan(b/ζ) − arctan(a/ζ))/ζ],
/// with the removable ζ = ω_τ point handled by its limit.
pub(crate) fn imag_kernel_range(omega_p: f64, omega_tau: f64, zeta: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let wp2 = omega_p * omega_p;
    let wt = omega_tau;
    let at_wt = ((b / wt).atan() - (a / wt).atan()) / wt;
    if (zeta - wt).abs() < 1e-6 * wt {
        // limit ζ → ω_τ of the partial-fraction form
        let db = b / (wt * wt + b * b);
        let da = a / (wt * wt + a * a);
        return wp2 * (at_wt + db - da) / (2.0 * wt);
    }
    let at_z = ((b / zeta).atan() - (a / zeta).atan()) / zeta;
    wp2 * wt / (zeta * zeta - wt * wt) * (at_wt - at_z)
}

/// PV ∫ₐᵇ x ε″_Drude(x)/(x² − ω²) dx in closed form (without 2/π).
///
/// Valid whether or not the pole at x = ω lies inside (a, b); the log term
/// carries the principal value. Bounds must not coincide with ω.
pub(crate) fn real_kernel_range_pv(
    omega_p: f64,
    omega_tau: f64,
    omega: f64,
    a: f64,
    b: f64,
) -> f64 {
    if b <= a {
        return 0.0;
    }
    let wp2 = omega_p * omega_p;
    let wt = omega_tau;
    let log_b = ((b - omega).abs() / (b + omega)).ln();
    let log_a = if a == 0.0 {
        0.0
    } else {
        ((a - omega).abs() / (a + omega)).ln()
    };
    let pv = (log_b - log_a) / (2.0 * omega);
    let at = ((b / wt).atan() - (a / wt).atan()) / wt;
    wp2 * wt / (omega * omega + wt * wt) * (pv - at)
}

/// Conduction-electron gas: number density and effective-mass ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronGas {
    /// Conduction electrons per m³.
    pub n_density: f64,
    /// Effective mass over the free-electron mass.
    pub m_eff_ratio: f64,
}

impl ElectronGas {
    pub fn new(n_density: f64, m_eff_ratio: f64) -> Result<Self, DrudeError> {
        if n_density <= 0.0 || !n_density.is_finite() {
            return Err(DrudeError::InvalidGas(format!(
                "n_density must be positive, got {n_density}"
            )));
        }
        if m_eff_ratio <= 0.0 || !m_eff_ratio.is_finite() {
            return Err(DrudeError::InvalidGas(format!(
                "m_eff_ratio must be positive, got {m_eff_ratio}"
            )));
        }
        Ok(ElectronGas {
            n_density,
            m_eff_ratio,
        })
    }

    /// Electron gas of a bulk metal: `density` in g/cm³, `atomic_mass` in
    /// g/mol, `electrons_per_atom` conduction electrons contributed per atom.
    pub fn from_bulk_density(
        density_g_cm3: f64,
        atomic_mass_g_mol: f64,
        electrons_per_atom: f64,
    ) -> Result<Self, DrudeError> {
        if !(density_g_cm3 > 0.0 && atomic_mass_g_mol > 0.0 && electrons_per_atom > 0.0) {
            return Err(DrudeError::InvalidGas(
                "density, atomic mass and electrons per atom must be positive".into(),
            ));
        }
        let n = density_g_cm3 / atomic_mass_g_mol * constants::AVOGADRO_PER_MOL * 1e6;
        ElectronGas::new(n * electrons_per_atom, 1.0)
    }
}

/// Plasma frequency ω_p = √(N e²/(ε₀ m*)) in eV.
pub fn plasma_from_density(gas: &ElectronGas) -> f64 {
    let omega_sq = gas.n_density * constants::ELEMENTARY_CHARGE_C * constants::ELEMENTARY_CHARGE_C
        / (constants::VACUUM_PERMITTIVITY_F_M * constants::ELECTRON_MASS_KG * gas.m_eff_ratio);
    constants::rad_s_to_ev(omega_sq.sqrt())
}
