//! Joint least-squares extraction of Drude parameters from mid-infrared
//! ε′ and ε″ data, confidence intervals from the χ² profile, and the
//! reduction-factor sensitivity table.
//!
//! Residuals are unweighted and both ε columns enter with equal weight;
//! stated experimental accuracies are metadata, not weights.

use serde::Serialize;
use thiserror::Error;

use crate::casimir::{reduction_factor, CasimirError, MirrorSpec};
use crate::drude::{DrudeError, DrudeParams};
use crate::spectra::SpectralTable;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("fit window [{omega_min}, {omega_max}] holds {found} usable points, need at least 4 with both eps columns")]
    TooFewPoints {
        omega_min: f64,
        omega_max: f64,
        found: usize,
    },
    #[error("fit did not converge after {iterations} iterations; best chi2 = {chi2:e}")]
    NonConvergence {
        iterations: usize,
        chi2: f64,
        best: Box<FitReport>,
    },
    #[error("chi2 never reaches the crossing level within 10x the scale of {param}; direction unbounded")]
    Unbounded { param: &'static str },
    #[error(transparent)]
    Drude(#[from] DrudeError),
    #[error("invalid fit config: {0}")]
    BadConfig(String),
}

/// Fit window and iteration controls.
#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Lower window edge, eV; 0 means the table minimum.
    pub omega_min: f64,
    /// Upper window edge, eV. The low-frequency model holds below ~1 eV.
    pub omega_max: f64,
    /// Initial guess; `None` derives one from the last window point.
    pub init: Option<DrudeParams>,
    pub max_iter: usize,
    /// Relative χ² change that counts as converged.
    pub tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            omega_min: 0.0,
            omega_max: 1.0,
            init: None,
            max_iter: 200,
            tol: 1e-12,
        }
    }
}

/// Per-point residuals of a completed fit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResidual {
    pub omega_ev: f64,
    pub d_eps_re: f64,
    pub d_eps_im: f64,
}

/// Fitted parameters with errors, the final χ², and the residual trace.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub params: DrudeParams,
    pub chi2: f64,
    pub n_points: usize,
    pub residuals: Vec<FitResidual>,
    /// Set when |P| > 50: the window carries almost no information on the
    /// polarization constant and its value should not be trusted.
    pub pol_flagged: bool,
}

struct FitData {
    omegas: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl FitData {
    fn residuals(&self, theta: &[f64; 3], out: &mut Vec<f64>) {
        out.clear();
        let (wp, wt, pol) = (theta[0], theta[1], theta[2]);
        for ((&w, &re), &im) in self.omegas.iter().zip(&self.re).zip(&self.im) {
            let d = w * w + wt * wt;
            out.push(pol - wp * wp / d - re);
            out.push(wp * wp * wt / (w * d) - im);
        }
    }

    fn chi2(&self, theta: &[f64; 3]) -> f64 {
        let mut r = Vec::with_capacity(2 * self.omegas.len());
        self.residuals(theta, &mut r);
        r.iter().map(|v| v * v).sum()
    }
}

fn collect_window(table: &SpectralTable, cfg: &FitConfig) -> Result<FitData, FitError> {
    if cfg.omega_min >= cfg.omega_max || cfg.omega_min.is_nan() || cfg.omega_max.is_nan() {
        return Err(FitError::BadConfig(format!(
            "omega_min ({}) must be below omega_max ({})",
            cfg.omega_min, cfg.omega_max
        )));
    }
    let mut data = FitData {
        omegas: Vec::new(),
        re: Vec::new(),
        im: Vec::new(),
    };
    for p in table.points() {
        if p.omega < cfg.omega_min || p.omega > cfg.omega_max {
            continue;
        }
        if let (Some(re), Some(im)) = (p.eps_re, p.eps_im) {
            data.omegas.push(p.omega);
            data.re.push(re);
            data.im.push(im);
        }
    }
    if data.omegas.len() < 4 {
        return Err(FitError::TooFewPoints {
            omega_min: cfg.omega_min,
            omega_max: cfg.omega_max,
            found: data.omegas.len(),
        });
    }
    Ok(data)
}

fn default_init(data: &FitData) -> [f64; 3] {
    // closed-form Drude inversion at the last (highest-frequency) point
    let n = data.omegas.len() - 1;
    let (w, re, im) = (data.omegas[n], data.re[n], data.im[n]);
    let wp = (w * w * (1.0 - re).max(1e-9)).sqrt().max(0.1);
    let wt = (im * w.powi(3) / (wp * wp)).clamp(1e-5, w);
    [wp, wt, 1.0]
}

#[allow(clippy::needless_range_loop)] // row elimination reads one row while writing another
fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut v = *b;
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = v[row];
        for c in row + 1..3 {
            s -= m[row][c] * x[c];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

fn make_report(data: &FitData, theta: &[f64; 3], chi2: f64) -> FitReport {
    let mut r = Vec::new();
    data.residuals(theta, &mut r);
    let residuals = data
        .omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| FitResidual {
            omega_ev: w,
            d_eps_re: r[2 * i],
            d_eps_im: r[2 * i + 1],
        })
        .collect();
    let params = DrudeParams {
        omega_p: theta[0],
        omega_tau: theta[1],
        pol: theta[2],
        err_p: None,
        err_tau: None,
        err_pol: None,
    };
    FitReport {
        pol_flagged: theta[2].abs() > 50.0,
        chi2,
        n_points: data.omegas.len(),
        residuals,
        params,
    }
}

/// Fits (ω_p, ω_τ, P) to all window points carrying both ε columns by
/// Levenberg-Marquardt with a numerically differenced Jacobian. The result
/// is deterministic given the configuration.
pub fn fit_drude(table: &SpectralTable, cfg: &FitConfig) -> Result<FitReport, FitError> {
    let cfg_eff = FitConfig {
        omega_min: if cfg.omega_min > 0.0 {
            cfg.omega_min
        } else {
            0.0
        },
        ..cfg.clone()
    };
    let data = collect_window(table, &cfg_eff)?;
    let mut theta = match &cfg.init {
        Some(p) => {
            p.validate()?;
            [p.omega_p, p.omega_tau, p.pol]
        }
        None => default_init(&data),
    };
    let n_res = 2 * data.omegas.len();
    let mut chi2 = data.chi2(&theta);
    let mut lambda = 1e-3;
    let mut r = Vec::with_capacity(n_res);
    let mut r_pert = Vec::with_capacity(n_res);

    for iter in 0..cfg.max_iter {
        data.residuals(&theta, &mut r);

        // central-difference Jacobian
        let mut jac = vec![[0.0f64; 3]; n_res];
        for j in 0..3 {
            let h = 1e-6 * theta[j].abs().max(1e-6);
            let mut tp = theta;
            tp[j] += h;
            data.residuals(&tp, &mut r_pert);
            let mut tm = theta;
            tm[j] -= h;
            let mut r_minus = Vec::with_capacity(n_res);
            data.residuals(&tm, &mut r_minus);
            for (i, row) in jac.iter_mut().enumerate() {
                row[j] = (r_pert[i] - r_minus[i]) / (2.0 * h);
            }
        }

        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for (i, row) in jac.iter().enumerate() {
            for a in 0..3 {
                jtr[a] += row[a] * r[i];
                for b in 0..3 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }

        let mut improved = false;
        for _ in 0..40 {
            let mut damped = jtj;
            for d in 0..3 {
                damped[d][d] += lambda * jtj[d][d].max(1e-300);
            }
            let rhs = [-jtr[0], -jtr[1], -jtr[2]];
            let Some(step) = solve3(&damped, &rhs) else {
                lambda *= 10.0;
                continue;
            };
            let cand = [theta[0] + step[0], theta[1] + step[1], theta[2] + step[2]];
            if cand[0] <= 0.0 || cand[1] <= 0.0 {
                lambda *= 10.0;
                continue;
            }
            let c2 = data.chi2(&cand);
            if c2 < chi2 {
                let rel_drop = (chi2 - c2) / chi2.max(1e-300);
                theta = cand;
                chi2 = c2;
                lambda = (lambda * 0.1).max(1e-14);
                improved = true;
                if rel_drop < cfg.tol {
                    return Ok(make_report(&data, &theta, chi2));
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e14 {
                break;
            }
        }
        if !improved {
            // no downhill step exists at any damping: local minimum
            return Ok(make_report(&data, &theta, chi2));
        }
        let _ = iter;
    }
    Err(FitError::NonConvergence {
        iterations: cfg.max_iter,
        chi2,
        best: Box::new(make_report(&data, &theta, chi2)),
    })
}

const PARAM_NAMES: [&str; 3] = ["omega_p", "omega_tau", "pol"];

/// Confidence half-widths of the three parameters from the χ² profile with
/// the other two frozen at the minimum.
///
/// The crossing level is Δχ² = 1 in units of the residual variance
/// s² = χ²_min/(n − 3), the standard scaling when the data carry no
/// explicit error bars; for noiseless data the intervals collapse to zero.
pub fn param_errors(
    table: &SpectralTable,
    cfg: &FitConfig,
    best: &DrudeParams,
) -> Result<(f64, f64, f64), FitError> {
    let data = collect_window(table, cfg)?;
    let theta = [best.omega_p, best.omega_tau, best.pol];
    let chi2_min = data.chi2(&theta);
    let dof = (2 * data.omegas.len()).saturating_sub(3).max(1);
    let delta = chi2_min / dof as f64;
    if delta == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let target = chi2_min + delta;

    let mut errs = [0.0f64; 3];
    for k in 0..3 {
        let scale = theta[k].abs().max(1e-3);
        let mut half_widths = [0.0f64; 2];
        for (side, sign) in [(0usize, 1.0f64), (1usize, -1.0f64)] {
            let f = |d: f64| {
                let mut t = theta;
                t[k] += sign * d;
                data.chi2(&t) - target
            };
            // bracket the crossing
            let mut hi = scale * 1e-9;
            while f(hi) < 0.0 {
                hi *= 2.0;
                if hi > 10.0 * scale {
                    return Err(FitError::Unbounded {
                        param: PARAM_NAMES[k],
                    });
                }
            }
            let mut lo = if hi > scale * 1e-9 { hi / 2.0 } else { 0.0 };
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo) <= 1e-12 * hi.max(scale * 1e-15) {
                    break;
                }
            }
            half_widths[side] = 0.5 * (lo + hi);
        }
        errs[k] = 0.5 * (half_widths[0] + half_widths[1]);
    }
    Ok((errs[0], errs[1], errs[2]))
}

/// One parameter variation of a sensitivity study.
#[derive(Debug, Clone, Serialize)]
pub struct SensitivityRow {
    pub label: String,
    pub params: DrudeParams,
    pub etas: Vec<f64>,
}

/// Reduction factors under plasma- and relaxation-frequency variations.
#[derive(Debug, Clone, Serialize)]
pub struct SensitivityTable {
    pub distances_m: Vec<f64>,
    pub rows: Vec<SensitivityRow>,
}

/// Computes η_F for the base parameters and for ω_p(1 ± δ_p), ω_τ(1 ± δ_τ)
/// at each separation.
pub fn sensitivity_table(
    base: &DrudeParams,
    delta_p: f64,
    delta_tau: f64,
    distances_m: &[f64],
) -> Result<SensitivityTable, CasimirError> {
    let variants: [(String, DrudeParams); 5] = [
        ("base".into(), base.clone()),
        (
            format!("omega_p +{:.0}%", delta_p * 100.0),
            base.scale_omega_p(1.0 + delta_p),
        ),
        (
            format!("omega_p -{:.0}%", delta_p * 100.0),
            base.scale_omega_p(1.0 - delta_p),
        ),
        (
            format!("omega_tau +{:.0}%", delta_tau * 100.0),
            base.scale_omega_tau(1.0 + delta_tau),
        ),
        (
            format!("omega_tau -{:.0}%", delta_tau * 100.0),
            base.scale_omega_tau(1.0 - delta_tau),
        ),
    ];
    let mut rows = Vec::with_capacity(variants.len());
    for (label, params) in variants {
        let mirror = MirrorSpec::drude(params.clone());
        let mut etas = Vec::with_capacity(distances_m.len());
        for &l in distances_m {
            etas.push(reduction_factor(&mirror, l)?.eta);
        }
        rows.push(SensitivityRow {
            label,
            params,
            etas,
        });
    }
    Ok(SensitivityTable {
        distances_m: distances_m.to_vec(),
        rows,
    })
}
