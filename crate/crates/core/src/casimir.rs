//! Reflection amplitudes at imaginary frequency, the zero-temperature
//! force between identical parallel mirrors, the ideal-metal force, and the
//! reduction factor η_F.
//!
//! The force integral is evaluated in the dimensionless variables
//! K = 2κL and u = ζ/(cκ), which map the (ζ, k) quarter-plane onto
//! (0, ∞) × (0, 1):
//!
//!   η_F = 15/(2π⁴) ∫ dK K³ ∫ du Σ_μ r_μ² e^{−K} / (1 − r_μ² e^{−K}),
//!
//! normalized so perfectly reflecting mirrors give η_F = 1 exactly. The
//! mirror's ε(iζ) is sampled once per force evaluation on a log grid and
//! interpolated log-log in between; the grid is doubled until η stabilizes.

use thiserror::Error;

use crate::constants::{self, HBAR_J_S, SPEED_OF_LIGHT_M_S};
use crate::drude::DrudeParams;
use crate::kk::{kk_imag_axis_with, DielectricModel, KkError};
use crate::quad::{integrate_segmented, log_edges, QuadError, QuadTol};

#[derive(Debug, Error)]
pub enum CasimirError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("dielectric model evaluation failed: {0}")]
    Provider(#[from] KkError),
    #[error("separation must be positive, got {0} m")]
    NonPositiveSeparation(f64),
    #[error(
        "epsilon(i zeta) must exceed 1 for a physical mirror, got {eps} at zeta = {zeta_ev} eV"
    )]
    InvalidEpsilon { zeta_ev: f64, eps: f64 },
    #[error("invalid reflection input: {0}")]
    BadInput(String),
}

/// Dielectric function at imaginary frequency, ζ in eV.
pub trait EpsProvider: Send + Sync {
    fn eps_iz(&self, zeta_ev: f64) -> Result<f64, KkError>;
}

impl EpsProvider for DrudeParams {
    fn eps_iz(&self, zeta_ev: f64) -> Result<f64, KkError> {
        Ok(1.0 + self.omega_p * self.omega_p / (zeta_ev * (zeta_ev + self.omega_tau)))
    }
}

impl EpsProvider for DielectricModel {
    fn eps_iz(&self, zeta_ev: f64) -> Result<f64, KkError> {
        kk_imag_axis_with(self, zeta_ev, QuadTol::rel(1e-9))
    }
}

/// Frequency-independent ε, mainly for conductor-limit checks.
#[derive(Debug, Clone, Copy)]
pub struct ConstantEps(pub f64);

impl EpsProvider for ConstantEps {
    fn eps_iz(&self, _zeta_ev: f64) -> Result<f64, KkError> {
        Ok(self.0)
    }
}

/// A mirror: an ε(iζ) provider plus a provenance label.
pub struct MirrorSpec {
    provider: Box<dyn EpsProvider>,
    pub label: String,
}

impl MirrorSpec {
    pub fn drude(params: DrudeParams) -> Self {
        let label = format!("drude wp={} wt={}", params.omega_p, params.omega_tau);
        MirrorSpec {
            provider: Box::new(params),
            label,
        }
    }

    pub fn model(model: DielectricModel, label: impl Into<String>) -> Self {
        MirrorSpec {
            provider: Box::new(model),
            label: label.into(),
        }
    }

    pub fn constant(eps: f64) -> Self {
        MirrorSpec {
            provider: Box::new(ConstantEps(eps)),
            label: format!("constant eps={eps}"),
        }
    }

    pub fn from_provider(provider: Box<dyn EpsProvider>, label: impl Into<String>) -> Self {
        MirrorSpec {
            provider,
            label: label.into(),
        }
    }

    pub fn eps_iz(&self, zeta_ev: f64) -> Result<f64, KkError> {
        self.provider.eps_iz(zeta_ev)
    }
}

/// Options of a force evaluation.
#[derive(Debug, Clone)]
pub struct EtaOptions {
    /// Imaginary-frequency integration span, eV.
    pub zeta_span: (f64, f64),
    /// Relative quadrature tolerance of the outer integral.
    pub rel_tol: f64,
    /// Initial ε(iζ) cache size; doubled until η changes by < 1e-6 relative.
    pub cache_points: usize,
    pub max_doublings: u32,
}

impl Default for EtaOptions {
    fn default() -> Self {
        EtaOptions {
            zeta_span: (1e-4, 1e3),
            rel_tol: 1e-8,
            cache_points: 200,
            max_doublings: 4,
        }
    }
}

/// Reduction factor, force and quadrature error at one separation.
#[derive(Debug, Clone, Copy)]
pub struct EtaResult {
    /// Plate separation, m.
    pub separation_m: f64,
    /// η_F ∈ (0, 1) for any finite-ε mirror.
    pub eta: f64,
    /// Force per unit area, Pa; negative (attractive).
    pub force_pa: f64,
    /// Estimated relative quadrature error.
    pub quad_err: f64,
}

/// Squared Fresnel amplitudes at imaginary frequency from the dimensionless
/// parameter u = ζ/(cκ) ∈ (0, 1]:
/// s = κ_m/κ = √(1 + (ε−1)u²), r_s = (s−1)/(s+1), r_p = (ε−s)/(ε+s).
#[inline]
fn reflection_sq_u(eps: f64, u: f64) -> (f64, f64) {
    let q = (eps - 1.0) * u * u;
    let s = (1.0 + q).sqrt();
    // s − 1 via q/(s+1) avoids cancellation for small q
    let rs = q / ((s + 1.0) * (s + 1.0));
    let rp = (eps - s) / (eps + s);
    (rs * rs, rp * rp)
}

/// Squared reflection amplitudes for s and p polarization at imaginary
/// frequency ζ (eV) and transverse wavenumber k (1/m). Both lie in [0, 1).
pub fn reflection_sq(eps: f64, zeta_ev: f64, k_inv_m: f64) -> Result<(f64, f64), CasimirError> {
    if eps < 1.0 || !eps.is_finite() {
        return Err(CasimirError::BadInput(format!(
            "eps must be >= 1, got {eps}"
        )));
    }
    if !(zeta_ev > 0.0 && k_inv_m >= 0.0) {
        return Err(CasimirError::BadInput(format!(
            "need zeta > 0 and k >= 0, got zeta = {zeta_ev}, k = {k_inv_m}"
        )));
    }
    let zm = constants::ev_to_inv_m(zeta_ev);
    let kappa = (k_inv_m * k_inv_m + zm * zm).sqrt();
    Ok(reflection_sq_u(eps, zm / kappa))
}

/// Ideal-metal force per unit area: −π²ħc/(240 L⁴), Pa.
pub fn force_ideal(separation_m: f64) -> f64 {
    let l4 = separation_m.powi(4);
    -std::f64::consts::PI.powi(2) * HBAR_J_S * SPEED_OF_LIGHT_M_S / (240.0 * l4)
}

/// Characteristic imaginary frequency ζ_ch = c/2L of the field fluctuations
/// dominating the force at separation L, in eV.
pub fn characteristic_frequency(separation_m: f64) -> f64 {
    constants::rad_s_to_ev(SPEED_OF_LIGHT_M_S / (2.0 * separation_m))
}

/// Log-log linear interpolation table of ε(iζ) − 1.
struct EpsCache {
    ln_zeta: Vec<f64>,
    ln_eps1: Vec<f64>,
}

impl EpsCache {
    fn build(mirror: &MirrorSpec, span: (f64, f64), n: usize) -> Result<Self, CasimirError> {
        let mut ln_zeta = Vec::with_capacity(n);
        let mut ln_eps1 = Vec::with_capacity(n);
        let (a, b) = span;
        for i in 0..n {
            let z = a * (b / a).powf(i as f64 / (n - 1) as f64);
            let eps = mirror.eps_iz(z)?;
            if eps <= 1.0 || !eps.is_finite() {
                return Err(CasimirError::InvalidEpsilon { zeta_ev: z, eps });
            }
            ln_zeta.push(z.ln());
            ln_eps1.push((eps - 1.0).ln());
        }
        Ok(EpsCache { ln_zeta, ln_eps1 })
    }

    #[inline]
    fn eps(&self, zeta_ev: f64) -> f64 {
        let lz = zeta_ev.ln();
        let n = self.ln_zeta.len();
        let hi = self.ln_zeta.partition_point(|&v| v < lz).clamp(1, n - 1);
        let lo = hi - 1;
        let t = (lz - self.ln_zeta[lo]) / (self.ln_zeta[hi] - self.ln_zeta[lo]);
        let t = t.clamp(0.0, 1.0);
        1.0 + (self.ln_eps1[lo] * (1.0 - t) + self.ln_eps1[hi] * t).exp()
    }
}

/// Dimensionless force integral (the bracket whose perfect-mirror value is
/// 2π⁴/15) over the (K, u) domain restricted by the ζ span.
fn eta_pass(cache: &EpsCache, zeta_ch: f64, opts: &EtaOptions) -> Result<(f64, f64), CasimirError> {
    let (z_lo, z_hi) = opts.zeta_span;
    let inner_tol = QuadTol {
        abs: 1e-300,
        rel: (opts.rel_tol * 0.1).max(1e-12),
    };
    let outer = |k_var: f64| -> f64 {
        let u_lo = (z_lo / (zeta_ch * k_var)).min(1.0);
        let u_hi = (z_hi / (zeta_ch * k_var)).min(1.0);
        if u_lo >= u_hi {
            return 0.0;
        }
        let ek = (-k_var).exp();
        let inner = |u: f64| {
            let eps = cache.eps(zeta_ch * k_var * u);
            let (rs2, rp2) = reflection_sq_u(eps, u);
            rs2 * ek / (1.0 - rs2 * ek) + rp2 * ek / (1.0 - rp2 * ek)
        };
        let edges = log_edges(u_lo, u_hi, 4);
        match integrate_segmented(inner, &edges, inner_tol) {
            Ok(q) => k_var.powi(3) * q.value,
            Err(_) => f64::NAN,
        }
    };

    let mut edges = log_edges(1e-4, 10.0, 2);
    edges.extend([16.0, 25.0, 36.0, 50.0]);
    let q = integrate_segmented(
        outer,
        &edges,
        QuadTol {
            abs: 1e-300,
            rel: opts.rel_tol,
        },
    )?;
    if !q.value.is_finite() {
        return Err(CasimirError::Quad(QuadError::NonConvergence {
            estimate: q.value,
            error_bound: q.abs_err,
        }));
    }
    Ok((q.value, q.abs_err / q.value.abs().max(f64::MIN_POSITIVE)))
}

fn eta_dimensionless(
    mirror: &MirrorSpec,
    separation_m: f64,
    opts: &EtaOptions,
) -> Result<(f64, f64), CasimirError> {
    if separation_m <= 0.0 || !separation_m.is_finite() {
        return Err(CasimirError::NonPositiveSeparation(separation_m));
    }
    let zeta_ch = characteristic_frequency(separation_m);
    let norm = 15.0 / (2.0 * std::f64::consts::PI.powi(4));

    let mut n = opts.cache_points.max(16);
    let cache = EpsCache::build(mirror, opts.zeta_span, n)?;
    let (mut val, mut qerr) = eta_pass(&cache, zeta_ch, opts)?;
    let mut cache_err = f64::INFINITY;
    for _ in 0..opts.max_doublings {
        n *= 2;
        let cache = EpsCache::build(mirror, opts.zeta_span, n)?;
        let (v2, e2) = eta_pass(&cache, zeta_ch, opts)?;
        cache_err = ((v2 - val) / v2.abs().max(f64::MIN_POSITIVE)).abs();
        val = v2;
        qerr = e2;
        if cache_err < 1e-6 {
            break;
        }
    }
    let eta = norm * val;
    let rel_err = qerr
        + if cache_err.is_finite() {
            cache_err
        } else {
            0.0
        };
    Ok((eta, rel_err))
}

/// Zero-temperature force per unit area between identical mirrors, Pa
/// (negative, attractive).
pub fn force_lifshitz(mirror: &MirrorSpec, separation_m: f64) -> Result<f64, CasimirError> {
    force_lifshitz_with(mirror, separation_m, &EtaOptions::default())
}

pub fn force_lifshitz_with(
    mirror: &MirrorSpec,
    separation_m: f64,
    opts: &EtaOptions,
) -> Result<f64, CasimirError> {
    let (eta, _) = eta_dimensionless(mirror, separation_m, opts)?;
    Ok(eta * force_ideal(separation_m))
}

/// Reduction factor η_F = F/F_ideal at one separation, with the force and
/// the quadrature error estimate, all from one quadrature pass.
pub fn reduction_factor(mirror: &MirrorSpec, separation_m: f64) -> Result<EtaResult, CasimirError> {
    reduction_factor_with(mirror, separation_m, &EtaOptions::default())
}

pub fn reduction_factor_with(
    mirror: &MirrorSpec,
    separation_m: f64,
    opts: &EtaOptions,
) -> Result<EtaResult, CasimirError> {
    let (eta, quad_err) = eta_dimensionless(mirror, separation_m, opts)?;
    Ok(EtaResult {
        separation_m,
        eta,
        force_pa: eta * force_ideal(separation_m),
        quad_err,
    })
}
