//! Kramers-Kronig machinery: the dispersion integral to imaginary
//! frequencies, the real-axis principal-value transform, frequency-range
//! contributions, and the Drude-parameter estimation that matches predicted
//! against observed ε′.
//!
//! A [`DielectricModel`] assembles ε″(ω) from three pieces:
//! a Drude extrapolation below the cutoff ω_c, the smoothed tabulated data
//! on [ω_c, ω_max], and a C/ω³ tail above the data ceiling. The head and
//! tail integrate against both kernels in closed form; the data region is
//! integrated numerically on log-spaced adaptive panels.

use std::f64::consts::FRAC_2_PI;

use thiserror::Error;

use crate::drude::{self, DrudeParams};
use crate::quad::{self, integrate_segmented, QuadError, QuadTol};
use crate::spectra::{
    smooth_segments, SmoothField, SmoothedCurve, SpectraError, SpectralPoint, SpectralTable,
    TableMeta,
};

/// Interband absorption edge used when region-by-region reporting splits
/// the data range; it moves weight between the two upper regions but never
/// changes their sum.
pub const INTERBAND_EDGE_EV: f64 = 2.45;

/// Relative half-width of the window around a principal-value pole inside
/// which the singularity is subtracted before numeric integration.
const PV_WINDOW: f64 = 0.35;

#[derive(Debug, Error)]
pub enum KkError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Drude(#[from] drude::DrudeError),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("estimation did not converge after {iterations} iterations; best (omega_p, omega_tau) = ({omega_p}, {omega_tau}), objective {objective:e}")]
    NonConvergence {
        iterations: usize,
        omega_p: f64,
        omega_tau: f64,
        objective: f64,
    },
    #[error("estimation requires {0}")]
    BadInput(String),
}

/// Extrapolation policy: Drude ε″ below `omega_c`, cubic `high_coeff`/ω³
/// above `omega_max`. The cubic coefficient continues the data value at the
/// ceiling: C = ε″(ω_max)·ω_max³.
#[derive(Debug, Clone)]
pub struct ExtrapolationScheme {
    pub low: DrudeParams,
    pub omega_c: f64,
    pub high_coeff: f64,
    pub omega_max: f64,
}

/// ε″(ω) model over the whole real axis: Drude head, smoothed data, cubic tail.
#[derive(Debug, Clone)]
pub struct DielectricModel {
    scheme: ExtrapolationScheme,
    mid: SmoothedCurve,
}

impl DielectricModel {
    /// Builds a model from a table carrying ε″ up to its maximum frequency.
    /// Points below `omega_c` are ignored by the smoothing; the Drude `low`
    /// parameters take over there.
    pub fn from_table(
        table: &SpectralTable,
        omega_c: f64,
        low: DrudeParams,
    ) -> Result<Self, KkError> {
        low.validate()?;
        if omega_c <= 0.0 || !omega_c.is_finite() {
            return Err(KkError::NonPositiveFrequency(omega_c));
        }
        let pts: Vec<SpectralPoint> = table
            .points()
            .iter()
            .filter(|p| p.omega >= omega_c * (1.0 - 1e-12) && p.eps_im.is_some())
            .copied()
            .collect();
        let sub = SpectralTable::new(pts, table.meta.clone())
            .map_err(|e| KkError::InvalidModel(format!("data above omega_c unusable: {e}")))?;
        let mid = smooth_segments(&sub, SmoothField::EpsIm)?;
        Self::from_parts(low, omega_c, mid)
    }

    /// Builds a model whose data region is itself Drude: the closed form is
    /// sampled on a log grid and smoothed like measured data. Useful as an
    /// analytically known reference model.
    pub fn pure_drude(
        params: &DrudeParams,
        omega_c: f64,
        omega_max: f64,
        points_per_decade: usize,
    ) -> Result<Self, KkError> {
        params.validate()?;
        if !(omega_c > 0.0 && omega_max > omega_c) {
            return Err(KkError::InvalidModel(format!(
                "need 0 < omega_c < omega_max, got ({omega_c}, {omega_max})"
            )));
        }
        let decades = (omega_max / omega_c).log10();
        let n = ((decades * points_per_decade as f64).ceil() as usize + 1).max(12);
        let pts: Vec<SpectralPoint> = (0..n)
            .map(|i| {
                let w = omega_c * (omega_max / omega_c).powf(i as f64 / (n - 1) as f64);
                SpectralPoint {
                    omega: w,
                    eps_re: None,
                    eps_im: Some(drude::eps_im_raw(params.omega_p, params.omega_tau, w)),
                }
            })
            .collect();
        let table = SpectralTable::new(
            pts,
            TableMeta {
                source: "drude closed form".into(),
                ..Default::default()
            },
        )
        .map_err(KkError::Spectra)?;
        Self::from_table(&table, omega_c, params.clone())
    }

    fn from_parts(low: DrudeParams, omega_c: f64, mid: SmoothedCurve) -> Result<Self, KkError> {
        let omega_max = mid.omega_max();
        if omega_c > omega_max || omega_max.is_nan() {
            return Err(KkError::InvalidModel(format!(
                "omega_c ({omega_c}) must not exceed the data ceiling ({omega_max})"
            )));
        }
        let high_coeff = mid.eval(omega_max).max(0.0) * omega_max.powi(3);
        let model = DielectricModel {
            scheme: ExtrapolationScheme {
                low,
                omega_c,
                high_coeff,
                omega_max,
            },
            mid,
        };
        // continuity checks at the piece boundaries are data-quality
        // diagnostics, not hard failures
        let head = drude::eps_im_raw(
            model.scheme.low.omega_p,
            model.scheme.low.omega_tau,
            omega_c,
        );
        let data = model.mid.eval(model.mid.omega_min()).max(0.0);
        if head > 0.0 && ((head - data) / head).abs() > 0.05 {
            log::warn!(
                "eps'' mismatch at omega_c = {omega_c} eV: Drude head {head:.4e} vs data {data:.4e} ({:+.1}%)",
                (data / head - 1.0) * 100.0
            );
        }
        Ok(model)
    }

    /// Same data region and tail, different Drude head.
    pub fn with_low(&self, low: DrudeParams) -> Result<Self, KkError> {
        low.validate()?;
        let mut m = self.clone();
        m.scheme.low = low;
        Ok(m)
    }

    pub fn scheme(&self) -> &ExtrapolationScheme {
        &self.scheme
    }

    pub fn mid(&self) -> &SmoothedCurve {
        &self.mid
    }

    /// ε″(ω) of the assembled model; non-negative by construction.
    pub fn eps_im(&self, omega: f64) -> f64 {
        let s = &self.scheme;
        if omega < s.omega_c {
            drude::eps_im_raw(s.low.omega_p, s.low.omega_tau, omega)
        } else if omega <= s.omega_max {
            self.mid.eval(omega).max(0.0)
        } else {
            s.high_coeff / omega.powi(3)
        }
    }
}

/// ∫ₐᵇ C/x³ · x/(x² + ζ²) dx = C/ζ² [(1/a − 1/b) − (arctan(b/ζ) − arctan(a/ζ))/ζ],
/// with a series form for ζ ≪ a. `b = ∞` is allowed.
fn cubic_tail_imag(c: f64, zeta: f64, a: f64, b: f64) -> f64 {
    if c == 0.0 || b <= a {
        return 0.0;
    }
    let inv = |x: f64, p: i32| if x.is_infinite() { 0.0 } else { x.powi(-p) };
    if zeta < 1e-3 * a {
        let t2 = zeta * zeta;
        return c
            * ((inv(a, 3) - inv(b, 3)) / 3.0 - t2 * (inv(a, 5) - inv(b, 5)) / 5.0
                + t2 * t2 * (inv(a, 7) - inv(b, 7)) / 7.0);
    }
    let at_b = if b.is_infinite() {
        std::f64::consts::FRAC_PI_2
    } else {
        (b / zeta).atan()
    };
    c / (zeta * zeta) * ((inv(a, 1) - inv(b, 1)) - (at_b - (a / zeta).atan()) / zeta)
}

/// PV ∫ₐ^∞ C/x³ · x/(x² − ω²) dx = C/ω² [(1/(2ω)) ln((a+ω)/|a−ω|) − 1/a],
/// series for ω ≪ a. The pole must lie below `a`.
fn cubic_tail_real_pv(c: f64, omega: f64, a: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let t = omega / a;
    if t < 1e-3 {
        return c / a.powi(3) * (1.0 / 3.0 + t * t / 5.0 + t.powi(4) / 7.0);
    }
    c / (omega * omega) * (((a + omega) / (a - omega).abs()).ln() / (2.0 * omega) - 1.0 / a)
}

fn mid_edges(a: f64, b: f64) -> Vec<f64> {
    quad::log_edges(a, b, 8)
}

/// Numeric ∫ₐᵇ x f(x)/(x² + ζ²) dx over the smoothed data region.
fn mid_imag_integral(
    model: &DielectricModel,
    zeta: f64,
    a: f64,
    b: f64,
    tol: QuadTol,
) -> Result<f64, KkError> {
    if b <= a * (1.0 + 1e-15) {
        return Ok(0.0);
    }
    let q = integrate_segmented(
        |x| x * model.mid.eval(x).max(0.0) / (x * x + zeta * zeta),
        &mid_edges(a, b),
        tol,
    )?;
    Ok(q.value)
}

/// ε(iζ) = 1 + (2/π) ∫₀^∞ x ε″(x)/(x² + ζ²) dx for the assembled model.
pub fn kk_imag_axis(model: &DielectricModel, zeta: f64) -> Result<f64, KkError> {
    kk_imag_axis_with(model, zeta, QuadTol::default())
}

pub fn kk_imag_axis_with(model: &DielectricModel, zeta: f64, tol: QuadTol) -> Result<f64, KkError> {
    if zeta <= 0.0 || !zeta.is_finite() {
        return Err(KkError::NonPositiveFrequency(zeta));
    }
    let s = &model.scheme;
    let head = drude::imag_kernel_range(s.low.omega_p, s.low.omega_tau, zeta, 0.0, s.omega_c);
    let mid = mid_imag_integral(model, zeta, s.omega_c, s.omega_max, tol)?;
    let tail = cubic_tail_imag(s.high_coeff, zeta, s.omega_max, f64::INFINITY);
    Ok(1.0 + FRAC_2_PI * (head + mid + tail))
}

/// Contribution of the frequency range [omega_lo, omega_hi] to ε(iζ) − 1.
pub fn eps_contribution(
    model: &DielectricModel,
    zeta: f64,
    omega_lo: f64,
    omega_hi: f64,
) -> Result<f64, KkError> {
    eps_contribution_with(model, zeta, omega_lo, omega_hi, QuadTol::default())
}

pub fn eps_contribution_with(
    model: &DielectricModel,
    zeta: f64,
    omega_lo: f64,
    omega_hi: f64,
    tol: QuadTol,
) -> Result<f64, KkError> {
    if zeta <= 0.0 || !zeta.is_finite() {
        return Err(KkError::NonPositiveFrequency(zeta));
    }
    if omega_lo < 0.0 || omega_lo.is_nan() || omega_hi < omega_lo {
        return Err(KkError::BadInput(format!(
            "need 0 <= omega_lo <= omega_hi, got ({omega_lo}, {omega_hi})"
        )));
    }
    if omega_hi <= omega_lo {
        return Ok(0.0);
    }
    let s = &model.scheme;
    let mut total = 0.0;
    // head piece
    let a = omega_lo.min(s.omega_c);
    let b = omega_hi.min(s.omega_c);
    total += drude::imag_kernel_range(s.low.omega_p, s.low.omega_tau, zeta, a, b);
    // data piece
    let a = omega_lo.max(s.omega_c);
    let b = omega_hi.min(s.omega_max);
    if b > a {
        total += mid_imag_integral(model, zeta, a, b, tol)?;
    }
    // tail piece
    let a = omega_lo.max(s.omega_max);
    if omega_hi > a {
        total += cubic_tail_imag(s.high_coeff, zeta, a, omega_hi);
    }
    Ok(FRAC_2_PI * total)
}

/// Contributions of the three canonical frequency regions (0, ω_c),
/// (ω_c, ω₀), (ω₀, ∞) to ε(iζ) − 1.
pub fn region_contributions(
    model: &DielectricModel,
    zeta: f64,
    omega0: f64,
) -> Result<(f64, f64, f64), KkError> {
    let wc = model.scheme.omega_c;
    let e1 = eps_contribution(model, zeta, 0.0, wc)?;
    let e2 = eps_contribution(model, zeta, wc, omega0)?;
    let e3 = eps_contribution(model, zeta, omega0, f64::INFINITY)?;
    Ok((e1, e2, e3))
}

/// PV integral of x ε″_model(x)/(x² − ω²) over a window [lo, hi] containing
/// the pole strictly inside. The singularity is subtracted analytically:
/// the regularized part (f(x) − f(ω))/(x² − ω²) is integrated numerically
/// and the remainder f(ω)·PV∫ dx/(x² − ω²) is added in closed form.
fn window_pv(
    model: &DielectricModel,
    omega: f64,
    lo: f64,
    hi: f64,
    tol: QuadTol,
) -> Result<f64, KkError> {
    debug_assert!(lo < omega && omega < hi);
    let f = |x: f64| x * model.eps_im(x);
    let f_pole = f(omega);

    let regular = move |x: f64| {
        if (x - omega).abs() < 1e-9 * omega {
            // limit f'(ω)/(2ω) by central difference
            let h = 1e-6 * omega;
            return (f(omega + h) - f(omega - h)) / (2.0 * h) / (2.0 * omega);
        }
        (f(x) - f_pole) / (x * x - omega * omega)
    };

    let s = &model.scheme;
    let mut edges = vec![lo, omega, hi];
    for b in [s.omega_c, s.omega_max] {
        if b > lo && b < hi {
            edges.push(b);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();

    let num = integrate_segmented(regular, &edges, tol)?;
    let remainder = f_pole / (2.0 * omega)
        * (((hi - omega) * (lo + omega)) / ((hi + omega) * (omega - lo))).ln();
    Ok(num.value + remainder)
}

/// ε′(ω) = 1 + (2/π) PV ∫₀^∞ x ε″(x)/(x² − ω²) dx for the assembled model.
pub fn kk_real_from_imag(model: &DielectricModel, omega: f64) -> Result<f64, KkError> {
    kk_real_from_imag_with(model, omega, QuadTol::default())
}

pub fn kk_real_from_imag_with(
    model: &DielectricModel,
    omega: f64,
    tol: QuadTol,
) -> Result<f64, KkError> {
    if omega <= 0.0 || !omega.is_finite() {
        return Err(KkError::NonPositiveFrequency(omega));
    }
    let s = &model.scheme;
    let w_lo = (1.0 - PV_WINDOW) * omega;
    let w_hi = (1.0 + PV_WINDOW) * omega;
    let mut total = 0.0;

    // Drude head outside the window, in closed form
    total += drude::real_kernel_range_pv(
        s.low.omega_p,
        s.low.omega_tau,
        omega,
        0.0,
        s.omega_c.min(w_lo),
    );
    if w_hi < s.omega_c {
        total +=
            drude::real_kernel_range_pv(s.low.omega_p, s.low.omega_tau, omega, w_hi, s.omega_c);
    }

    // data region outside the window, numerically (pole excluded)
    let mid_f = |x: f64| x * model.mid.eval(x).max(0.0) / (x * x - omega * omega);
    let a = s.omega_c.max(w_hi.min(s.omega_max));
    if w_hi < s.omega_max && a < s.omega_max {
        total += integrate_segmented(mid_f, &mid_edges(a, s.omega_max), tol)?.value;
    }
    let b = s.omega_max.min(w_lo);
    if b > s.omega_c {
        total += integrate_segmented(mid_f, &mid_edges(s.omega_c, b), tol)?.value;
    }

    // tail beyond the data outside the window
    if w_lo > s.omega_max {
        // pole sits above the data ceiling: integrate the smooth tail piece up to the window
        total += integrate_segmented(
            |x| s.high_coeff / (x * x * (x * x - omega * omega)) * x,
            &mid_edges(s.omega_max, w_lo),
            tol,
        )?
        .value;
    }
    total += cubic_tail_real_pv(s.high_coeff, omega, s.omega_max.max(w_hi));

    // singular window
    total += window_pv(model, omega, w_lo, w_hi, tol)?;

    Ok(1.0 + FRAC_2_PI * total)
}

/// Configuration of the direct-search estimation.
#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub max_iter: usize,
    /// Relative simplex size at which the search stops.
    pub tol: f64,
    pub quad_tol: QuadTol,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            max_iter: 400,
            tol: 1e-6,
            quad_tol: QuadTol::default(),
        }
    }
}

/// Estimates the Drude parameters of a sample from both ε columns: ε″ is
/// extrapolated below `omega_c` with candidate (ω_p, ω_τ), ε′ is predicted
/// by the dispersion relation, and the squared misfit between observed and
/// predicted ε′ is minimized by a Nelder-Mead search with log-scaled ω_τ.
///
/// The polarization constant is absorbed by the prediction; the returned
/// parameters carry `pol = 1`.
pub fn estimate_drude_kk(table: &SpectralTable, omega_c: f64) -> Result<DrudeParams, KkError> {
    estimate_drude_kk_with(table, omega_c, &EstimateConfig::default())
}

pub fn estimate_drude_kk_with(
    table: &SpectralTable,
    omega_c: f64,
    cfg: &EstimateConfig,
) -> Result<DrudeParams, KkError> {
    let obs: Vec<(f64, f64)> = table
        .points()
        .iter()
        .filter_map(|p| p.eps_re.map(|re| (p.omega, re)))
        .collect();
    if obs.len() < 2 {
        return Err(KkError::BadInput("at least two eps_re observations".into()));
    }
    if !table.points().iter().any(|p| p.eps_im.is_some()) {
        return Err(KkError::BadInput(
            "an eps_im column for the dispersion integral".into(),
        ));
    }

    // initial guess from a closed-form inversion at the lowest observed point
    let (w1, re1) = obs[0];
    let im1 = table
        .points()
        .iter()
        .find_map(|p| p.eps_im.map(|im| (p.omega, im)))
        .map(|(_, im)| im)
        .unwrap_or(1.0);
    let wt0 = (w1 * im1 / (1.0 - re1).max(1e-6)).clamp(1e-4, 2.0 * omega_c);
    let wp0 = ((1.0 - re1).max(1e-6) * (w1 * w1 + wt0 * wt0))
        .sqrt()
        .clamp(0.1, 100.0);

    // The smoothed data region and the cubic tail do not depend on the
    // candidate head, so their kernel integrals are fixed per data point.
    // Points whose PV window reaches below omega_c see the head inside the
    // window and are re-evaluated per candidate.
    let probe = DielectricModel::from_table(
        table,
        omega_c,
        DrudeParams::new(wp0.max(1.0), wt0.min(wp0 * 0.5).max(1e-4))?,
    )?;
    let s = probe.scheme().clone();
    let mut fixed: Vec<Option<f64>> = Vec::with_capacity(obs.len());
    for &(w, _) in &obs {
        if (1.0 - PV_WINDOW) * w > omega_c {
            let full = kk_real_from_imag_with(&probe, w, cfg.quad_tol)?;
            let head = drude::real_kernel_range_pv(s.low.omega_p, s.low.omega_tau, w, 0.0, omega_c);
            fixed.push(Some(full - 1.0 - FRAC_2_PI * head));
        } else {
            fixed.push(None);
        }
    }

    let objective = |wp: f64, wt: f64| -> Result<f64, KkError> {
        let params = match DrudeParams::new(wp, wt) {
            Ok(p) => p,
            Err(_) => return Ok(f64::INFINITY),
        };
        let model = probe.with_low(params)?;
        let mut sum = 0.0;
        for (i, &(w, re_obs)) in obs.iter().enumerate() {
            let pred = match fixed[i] {
                Some(rest) => {
                    let head = drude::real_kernel_range_pv(wp, wt, w, 0.0, omega_c);
                    1.0 + FRAC_2_PI * head + rest
                }
                None => kk_real_from_imag_with(&model, w, cfg.quad_tol)?,
            };
            let d = pred - re_obs;
            sum += d * d;
        }
        Ok(sum)
    };

    // Nelder-Mead over (ω_p, ln ω_τ)
    let eval = |x: &[f64; 2]| objective(x[0], x[1].exp());
    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    for x in [
        [wp0, wt0.ln()],
        [wp0 * 1.05, wt0.ln()],
        [wp0, wt0.ln() + 0.2],
    ] {
        let f = eval(&x)?;
        simplex.push((x, f));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0];
        let worst = simplex[2];

        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                let d0 = (x[0] - best.0[0]).abs() / best.0[0].abs().max(1e-12);
                let d1 = (x[1] - best.0[1]).abs();
                d0.max(d1)
            })
            .fold(0.0f64, f64::max);
        if size < cfg.tol {
            let p = DrudeParams::new(best.0[0], best.0[1].exp())?;
            return Ok(p);
        }
        if iterations >= cfg.max_iter {
            return Err(KkError::NonConvergence {
                iterations,
                omega_p: best.0[0],
                omega_tau: best.0[1].exp(),
                objective: best.1,
            });
        }
        iterations += 1;

        let centroid = [
            0.5 * (simplex[0].0[0] + simplex[1].0[0]),
            0.5 * (simplex[0].0[1] + simplex[1].0[1]),
        ];
        let reflect = [
            2.0 * centroid[0] - worst.0[0],
            2.0 * centroid[1] - worst.0[1],
        ];
        let fr = eval(&reflect)?;
        if fr < best.1 {
            let expand = [
                centroid[0] + 2.0 * (reflect[0] - centroid[0]),
                centroid[1] + 2.0 * (reflect[1] - centroid[1]),
            ];
            let fe = eval(&expand)?;
            simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflect, fr);
        } else {
            let contract = [
                centroid[0] + 0.5 * (worst.0[0] - centroid[0]),
                centroid[1] + 0.5 * (worst.0[1] - centroid[1]),
            ];
            let fc = eval(&contract)?;
            if fc < worst.1 {
                simplex[2] = (contract, fc);
            } else {
                // shrink toward the best vertex
                for entry in simplex.iter_mut().skip(1) {
                    let x = [
                        best.0[0] + 0.5 * (entry.0[0] - best.0[0]),
                        best.0[1] + 0.5 * (entry.0[1] - best.0[1]),
                    ];
                    let f = eval(&x)?;
                    *entry = (x, f);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gold() -> DrudeParams {
        DrudeParams::new(9.0, 0.035).unwrap()
    }

    fn gold_model() -> DielectricModel {
        DielectricModel::pure_drude(&gold(), 0.125, 1e3, 60).unwrap()
    }

    #[test]
    fn imag_axis_matches_closed_form() {
        let model = gold_model();
        let p = gold();
        for i in 0..20 {
            let z = 0.01 * 10f64.powf(3.0 * i as f64 / 19.0);
            let kk = kk_imag_axis(&model, z).unwrap();
            let closed = drude::eps_imag_axis_closed(&p, z).unwrap();
            assert!(
                ((kk - closed) / closed).abs() < 1e-4,
                "zeta {z}: kk {kk} vs closed {closed}"
            );
        }
    }

    #[test]
    fn imag_axis_monotone_and_above_one() {
        let model = gold_model();
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let z = 1e-2 * 10f64.powf(4.0 * i as f64 / 59.0);
            let v = kk_imag_axis(&model, z).unwrap();
            assert!(v > 1.0);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn head_contribution_reference() {
        // ε₁(i·0.988) alone = 68.42 for the (9.0, 0.035) head below 0.125 eV
        let model = gold_model();
        let e1 = eps_contribution(&model, 0.988, 0.0, 0.125).unwrap();
        assert!((e1 - 68.42).abs() < 0.02, "e1 = {e1}");
    }

    #[test]
    fn contributions_are_additive() {
        let model = gold_model();
        let tol = QuadTol::rel(1e-12);
        let z = 0.988;
        let wc = model.scheme().omega_c;
        let e1 = eps_contribution_with(&model, z, 0.0, wc, tol).unwrap();
        let e2 = eps_contribution_with(&model, z, wc, INTERBAND_EDGE_EV, tol).unwrap();
        let e3 = eps_contribution_with(&model, z, INTERBAND_EDGE_EV, f64::INFINITY, tol).unwrap();
        let total = kk_imag_axis_with(&model, z, tol).unwrap() - 1.0;
        assert!(
            ((e1 + e2 + e3 - total) / total).abs() < 1e-10,
            "sum {} vs total {total}",
            e1 + e2 + e3
        );
    }

    #[test]
    fn zero_width_contribution() {
        let model = gold_model();
        assert_eq!(eps_contribution(&model, 1.0, 0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn head_range_matches_quadrature() {
        // closed-form head integral vs direct adaptive quadrature of the kernel
        let p = gold();
        let z = 0.7;
        let wc = 0.125;
        let closed = drude::imag_kernel_range(p.omega_p, p.omega_tau, z, 0.0, wc);
        let edges = {
            let mut e = vec![1e-10, 1e-7, 1e-5];
            e.extend(quad::log_edges(1e-4, wc, 8));
            e
        };
        let num = integrate_segmented(
            |x| x * drude::eps_im_raw(p.omega_p, p.omega_tau, x) / (x * x + z * z),
            &edges,
            QuadTol::rel(1e-12),
        )
        .unwrap();
        assert_relative_eq!(closed, num.value, max_relative = 1e-8);
    }

    #[test]
    fn real_axis_matches_drude_closed_form() {
        let model = gold_model();
        let p = gold();
        for i in 0..11 {
            let w = 0.1 * 10f64.powf(i as f64 / 10.0);
            let kk = kk_real_from_imag(&model, w).unwrap();
            let closed = 1.0 - p.omega_p * p.omega_p / (w * w + p.omega_tau * p.omega_tau);
            assert!(
                ((kk - closed) / closed).abs() < 5e-3,
                "omega {w}: kk {kk} vs closed {closed}"
            );
        }
    }

    #[test]
    fn real_axis_far_above_spectral_weight() {
        let model = gold_model();
        let v = kk_real_from_imag(&model, 5e3).unwrap();
        assert!(v < 1.0, "eps' must approach 1 from below, got {v}");
        assert!(v > 1.0 - 1e-4);
    }

    #[test]
    fn real_axis_grid_alignment_robust() {
        // evaluation at a sample frequency vs a hair off it
        let model = gold_model();
        let grid_point = model.mid().segments()[2].omega_lo;
        let a = kk_real_from_imag(&model, grid_point).unwrap();
        let b = kk_real_from_imag(&model, grid_point * (1.0 + 1e-9)).unwrap();
        assert!(((a - b) / a).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn lorentz_real_axis_closed_form() {
        // single Lorentz oscillator: ε″ = A ω₀² γ ω / ((ω₀²−ω²)² + γ²ω²)
        let (a_l, w0, g) = (6.0, 3.0, 1.0);
        let lor_im =
            move |w: f64| a_l * w0 * w0 * g * w / ((w0 * w0 - w * w).powi(2) + g * g * w * w);
        let lor_re = move |w: f64| {
            a_l * w0 * w0 * (w0 * w0 - w * w) / ((w0 * w0 - w * w).powi(2) + g * g * w * w)
        };

        let n = 60 * 5;
        let pts: Vec<SpectralPoint> = (0..=n)
            .map(|i| {
                let w = 1e-3 * 10f64.powf(5.0 * i as f64 / n as f64);
                SpectralPoint {
                    omega: w,
                    eps_re: None,
                    eps_im: Some(lor_im(w)),
                }
            })
            .collect();
        let table = SpectralTable::new(pts, TableMeta::default()).unwrap();
        // negligible Drude head so the model is effectively pure Lorentz
        let model =
            DielectricModel::from_table(&table, 1e-3, DrudeParams::new(1e-4, 1e-5).unwrap())
                .unwrap();

        // compare the oscillator contribution ε′ − 1 against the closed
        // form; around ω ≈ 8 the full ε′ crosses zero and a relative
        // comparison of ε′ itself would be ill-posed
        for &w in &[0.5, 1.0, 1.8, 4.5, 8.0] {
            let kk = kk_real_from_imag(&model, w).unwrap() - 1.0;
            let truth = lor_re(w);
            assert!(
                ((kk - truth) / truth).abs() < 5e-3,
                "omega {w}: kk {kk} vs closed {truth}"
            );
        }
    }

    #[test]
    fn split_invariance_in_omega_c() {
        // moving omega_c by one grid point barely changes eps(i zeta) when
        // the data is Drude-consistent across the move
        let p = gold();
        let m1 = DielectricModel::pure_drude(&p, 0.125, 1e3, 60).unwrap();
        let grid_step = 10f64.powf(1.0 / 60.0);
        let m2 = DielectricModel::pure_drude(&p, 0.125 * grid_step, 1e3, 60).unwrap();
        for &z in &[0.1, 0.988, 5.0] {
            let a = kk_imag_axis(&m1, z).unwrap();
            let b = kk_imag_axis(&m2, z).unwrap();
            assert!(((a - b) / a).abs() < 2e-3, "zeta {z}: {a} vs {b}");
        }
    }

    #[test]
    fn split_invariance_in_omega_max() {
        let p = gold();
        let m1 = DielectricModel::pure_drude(&p, 0.125, 1e3, 60).unwrap();
        let m2 = DielectricModel::pure_drude(&p, 0.125, 1e3 / 10f64.powf(1.0 / 60.0), 60).unwrap();
        for &z in &[0.1, 0.988, 5.0] {
            let a = kk_imag_axis(&m1, z).unwrap();
            let b = kk_imag_axis(&m2, z).unwrap();
            assert!(((a - b) / a).abs() < 1e-3, "zeta {z}: {a} vs {b}");
        }
    }

    #[test]
    fn estimate_self_consistent_drude() {
        // exactly KK-consistent pure-Drude columns recover the parameters
        let p = DrudeParams::new(8.4, 0.02).unwrap();
        let n = 90;
        let pts: Vec<SpectralPoint> = (0..=n)
            .map(|i| {
                let w = 0.1 * 10f64.powf(2.0 * i as f64 / n as f64);
                let re = 1.0 - p.omega_p * p.omega_p / (w * w + p.omega_tau * p.omega_tau);
                SpectralPoint {
                    omega: w,
                    eps_re: Some(re),
                    eps_im: Some(drude::eps_im_raw(p.omega_p, p.omega_tau, w)),
                }
            })
            .collect();
        let table = SpectralTable::new(pts, TableMeta::default()).unwrap();
        let est = estimate_drude_kk(&table, 0.1).unwrap();
        assert!(
            (est.omega_p - 8.4).abs() / 8.4 < 5e-3,
            "omega_p {}",
            est.omega_p
        );
        assert!(
            (est.omega_tau - 0.02).abs() / 0.02 < 5e-2,
            "omega_tau {}",
            est.omega_tau
        );
    }

    #[test]
    fn estimate_requires_both_columns() {
        let pts: Vec<SpectralPoint> = (0..20)
            .map(|i| SpectralPoint {
                omega: 0.1 + i as f64 * 0.1,
                eps_re: None,
                eps_im: Some(1.0),
            })
            .collect();
        let table = SpectralTable::new(pts, TableMeta::default()).unwrap();
        assert!(matches!(
            estimate_drude_kk(&table, 0.1),
            Err(KkError::BadInput(_))
        ));
    }
}
