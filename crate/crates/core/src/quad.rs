//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7-15 point Gauss-Kronrod rule with globally adaptive bisection. The
//! integrands in this crate are smooth within panels once principal-value
//! poles have been subtracted, so panel splitting converges quickly; the
//! panel budget guards against pathological inputs.

use thiserror::Error;

/// Abscissae of the 15-point Kronrod rule on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Weights of the 15-point Kronrod rule.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Weights of the embedded 7-point Gauss rule (nodes XGK[1], XGK[3], XGK[5], center).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Absolute/relative tolerance pair for an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 1e-8,
            rel: 1e-8,
        }
    }
}

impl QuadTol {
    pub fn rel(rel: f64) -> Self {
        QuadTol {
            abs: rel.min(1e-8),
            rel,
        }
    }
}

/// Result of an adaptive integration: the estimate and an error bound.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_err: f64,
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    NonConvergence { estimate: f64, error_bound: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

/// One Gauss-Kronrod application over [a, b].
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [0.0f64; 14];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[13 - j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[13 - j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: QuadTol,
) -> Result<Quadrature, QuadError> {
    integrate_segmented(f, &[a, b], tol)
}

/// Adaptive integration over the union of consecutive breakpoint intervals.
///
/// Breakpoints let the caller pre-split at piece boundaries (kinks, panel
/// edges of log-spaced decompositions) before adaptivity takes over.
pub fn integrate_segmented<F: Fn(f64) -> f64>(
    f: F,
    edges: &[f64],
    tol: QuadTol,
) -> Result<Quadrature, QuadError> {
    if edges.len() < 2 {
        return Err(QuadError::BadInterval {
            a: f64::NAN,
            b: f64::NAN,
        });
    }
    for w in edges.windows(2) {
        if w[0] >= w[1] || !w[0].is_finite() || !w[1].is_finite() {
            return Err(QuadError::BadInterval { a: w[0], b: w[1] });
        }
    }

    const MAX_PANELS: usize = 4000;
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in edges.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            err: e,
        });
    }

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let target = tol.abs.max(tol.rel * total.abs());
        if err <= target {
            return Ok(Quadrature {
                value: total,
                abs_err: err,
            });
        }
        if panels.len() >= MAX_PANELS {
            return Err(QuadError::NonConvergence {
                estimate: total,
                error_bound: err,
            });
        }
        // split the panel with the largest error estimate
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval exhausted at machine precision
            return Ok(Quadrature {
                value: panels.iter().map(|p| p.value).sum(),
                abs_err: err,
            });
        }
        let (v1, e1) = gk15(&f, p.a, mid);
        let (v2, e2) = gk15(&f, mid, p.b);
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: v1,
            err: e1,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            err: e2,
        });
    }
}

/// Log-spaced breakpoints covering [a, b] with roughly `per_decade` panels
/// per decade. Both endpoints are included exactly.
pub fn log_edges(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a, "log_edges requires 0 < a < b");
    let decades = (b / a).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let mut edges = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        edges.push(a * (b / a).powf(t));
    }
    edges[0] = a;
    *edges.last_mut().unwrap() = b;
    edges
}
