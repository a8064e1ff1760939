//! Tabulated optical data: ingestion, validation, conversion, merging and
//! segmented smoothing.
//!
//! Tables hold the real-frequency dielectric function of a metal sample,
//! with photon energies in eV. Either column of ε may be absent per row;
//! `(n, k)` tables are converted on load via ε′ = n² − k², ε″ = 2nk.

use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Validation { line: usize, msg: String },
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("merge error: {0}")]
    Merge(String),
    #[error("negative refractive index or extinction coefficient: n={n}, k={k}")]
    NegativeNk { n: f64, k: f64 },
    #[error("smoothing requires at least {needed} points with the requested field, found {found}")]
    InsufficientPoints { needed: usize, found: usize },
    #[error("segment of {seg_len} points cannot determine a quartic (need at least 5 distinct frequencies)")]
    RankDeficient { seg_len: usize },
}

/// One tabulated sample of the dielectric function at a real frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    /// Photon energy, eV.
    pub omega: f64,
    /// ε′(ω), if tabulated.
    pub eps_re: Option<f64>,
    /// ε″(ω), if tabulated. Non-negative (passivity).
    pub eps_im: Option<f64>,
}

impl SpectralPoint {
    fn validate(&self, line: usize) -> Result<(), SpectraError> {
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(SpectraError::Validation {
                line,
                msg: format!("omega must be positive and finite, got {}", self.omega),
            });
        }
        if self.eps_re.is_none() && self.eps_im.is_none() {
            return Err(SpectraError::Validation {
                line,
                msg: "row carries neither eps_re nor eps_im".into(),
            });
        }
        if let Some(v) = self.eps_re {
            if !v.is_finite() {
                return Err(SpectraError::Validation {
                    line,
                    msg: format!("eps_re not finite: {v}"),
                });
            }
        }
        if let Some(v) = self.eps_im {
            if !v.is_finite() {
                return Err(SpectraError::Validation {
                    line,
                    msg: format!("eps_im not finite: {v}"),
                });
            }
            if v < 0.0 {
                return Err(SpectraError::Validation {
                    line,
                    msg: format!("eps_im must be non-negative (passivity), got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Provenance of a table: source label, sample description, stated accuracy.
///
/// Stated experimental accuracies travel as metadata only; they are not used
/// as fit weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableMeta {
    pub source: String,
    pub sample: String,
    pub accuracy: String,
}

/// A validated table: frequencies strictly ascending, at least four points.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable {
    points: Vec<SpectralPoint>,
    pub meta: TableMeta,
}

/// Minimum number of points a table must carry (segmented smoothing needs them).
pub const MIN_POINTS: usize = 4;

impl SpectralTable {
    pub fn new(points: Vec<SpectralPoint>, meta: TableMeta) -> Result<Self, SpectraError> {
        if points.len() < MIN_POINTS {
            return Err(SpectraError::InvalidTable(format!(
                "need at least {MIN_POINTS} points, got {}",
                points.len()
            )));
        }
        for (i, p) in points.iter().enumerate() {
            p.validate(i + 1)?;
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].omega >= w[1].omega {
                return Err(SpectraError::InvalidTable(format!(
                    "frequencies must be strictly ascending: omega[{}]={} >= omega[{}]={}",
                    i,
                    w[0].omega,
                    i + 1,
                    w[1].omega
                )));
            }
        }
        Ok(SpectralTable { points, meta })
    }

    pub fn points(&self) -> &[SpectralPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn omega_min(&self) -> f64 {
        self.points.first().map(|p| p.omega).unwrap_or(f64::NAN)
    }

    pub fn omega_max(&self) -> f64 {
        self.points.last().map(|p| p.omega).unwrap_or(f64::NAN)
    }
}

/// On-disk column layout of a CSV table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    /// Columns `omega_eV,eps_re,eps_im`; either ε cell may be empty.
    Eps,
    /// Columns `omega_eV,n,k`; both must be present.
    Nk,
}

impl fmt::Display for TableFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableFormat::Eps => write!(f, "eps"),
            TableFormat::Nk => write!(f, "nk"),
        }
    }
}

/// Converts optical constants (n, k) to the dielectric function.
///
/// ε′ = n² − k², ε″ = 2nk, from n + ik = √ε.
pub fn eps_from_nk(n: f64, k: f64) -> Result<(f64, f64), SpectraError> {
    if n < 0.0 || k < 0.0 || !n.is_finite() || !k.is_finite() {
        return Err(SpectraError::NegativeNk { n, k });
    }
    Ok((n * n - k * k, 2.0 * n * k))
}

/// Inverts `eps_from_nk` on the principal branch (non-negative real part).
pub fn nk_from_eps(eps_re: f64, eps_im: f64) -> (f64, f64) {
    let r = eps_re.hypot(eps_im);
    let n = (0.5 * (r + eps_re)).max(0.0).sqrt();
    let k = (0.5 * (r - eps_re)).max(0.0).sqrt();
    (n, k)
}

fn parse_field(tok: &str, line: usize, what: &str) -> Result<Option<f64>, SpectraError> {
    let t = tok.trim();
    if t.is_empty() {
        return Ok(None);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(SpectraError::Parse {
            line,
            msg: format!("cannot parse {what} from {t:?}"),
        }),
    }
}

/// Parses CSV text into a table. Lines beginning with `#` are comments; the
/// first data line must be the header matching `format`.
pub fn parse_table(text: &str, format: TableFormat) -> Result<SpectralTable, SpectraError> {
    let expected_header = match format {
        TableFormat::Eps => "omega_ev,eps_re,eps_im",
        TableFormat::Nk => "omega_ev,n,k",
    };
    let mut meta = TableMeta::default();
    let mut points: Vec<SpectralPoint> = Vec::new();
    let mut header_seen = false;
    let mut last_omega = f64::NEG_INFINITY;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let c = comment.trim();
            for (key, slot) in [
                ("source:", &mut meta.source),
                ("sample:", &mut meta.sample),
                ("accuracy:", &mut meta.accuracy),
            ] {
                if let Some(v) = c.strip_prefix(key) {
                    *slot = v.trim().to_string();
                }
            }
            continue;
        }
        if !header_seen {
            let norm: String = trimmed
                .split(',')
                .map(|s| s.trim().to_ascii_lowercase())
                .collect::<Vec<_>>()
                .join(",");
            if norm != expected_header {
                return Err(SpectraError::Parse {
                    line,
                    msg: format!(
                        "expected header {expected_header:?} for format {format}, got {trimmed:?}"
                    ),
                });
            }
            header_seen = true;
            continue;
        }

        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(SpectraError::Parse {
                line,
                msg: format!("expected 3 comma-separated fields, got {}", fields.len()),
            });
        }
        let omega = parse_field(fields[0], line, "omega_eV")?.ok_or(SpectraError::Parse {
            line,
            msg: "omega_eV field is empty".into(),
        })?;

        let point = match format {
            TableFormat::Eps => SpectralPoint {
                omega,
                eps_re: parse_field(fields[1], line, "eps_re")?,
                eps_im: parse_field(fields[2], line, "eps_im")?,
            },
            TableFormat::Nk => {
                let n = parse_field(fields[1], line, "n")?.ok_or(SpectraError::Parse {
                    line,
                    msg: "n field is empty".into(),
                })?;
                let k = parse_field(fields[2], line, "k")?.ok_or(SpectraError::Parse {
                    line,
                    msg: "k field is empty".into(),
                })?;
                let (re, im) = eps_from_nk(n, k).map_err(|_| SpectraError::Validation {
                    line,
                    msg: format!("n and k must be non-negative, got n={n}, k={k}"),
                })?;
                SpectralPoint {
                    omega,
                    eps_re: Some(re),
                    eps_im: Some(im),
                }
            }
        };
        point.validate(line)?;
        if point.omega <= last_omega {
            return Err(SpectraError::Validation {
                line,
                msg: format!(
                    "frequencies must be strictly ascending: omega={} follows {}",
                    point.omega, last_omega
                ),
            });
        }
        last_omega = point.omega;
        points.push(point);
    }

    if !header_seen {
        return Err(SpectraError::Parse {
            line: 1,
            msg: "no header row found".into(),
        });
    }
    SpectralTable::new(points, meta)
}

/// Loads a CSV table from disk.
pub fn load_table<P: AsRef<Path>>(
    path: P,
    format: TableFormat,
) -> Result<SpectralTable, SpectraError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SpectraError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_table(&text, format)
}

fn fmt_field(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.14e}"),
        None => String::new(),
    }
}

/// Serializes a table in the `eps` CSV layout with 15 significant digits.
pub fn table_to_csv(table: &SpectralTable) -> String {
    let mut out = String::new();
    if !table.meta.source.is_empty() {
        out.push_str(&format!("# source: {}\n", table.meta.source));
    }
    if !table.meta.sample.is_empty() {
        out.push_str(&format!("# sample: {}\n", table.meta.sample));
    }
    if !table.meta.accuracy.is_empty() {
        out.push_str(&format!("# accuracy: {}\n", table.meta.accuracy));
    }
    out.push_str("omega_eV,eps_re,eps_im\n");
    for p in table.points() {
        out.push_str(&format!(
            "{:.14e},{},{}\n",
            p.omega,
            fmt_field(p.eps_re),
            fmt_field(p.eps_im)
        ));
    }
    out
}

/// Writes a table to disk in the `eps` CSV layout.
pub fn save_table<P: AsRef<Path>>(table: &SpectralTable, path: P) -> Result<(), SpectraError> {
    let path = path.as_ref();
    std::fs::write(path, table_to_csv(table)).map_err(|source| SpectraError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Concatenates a low-frequency and a high-frequency table at `omega_joint`:
/// points of `low` with ω ≤ joint followed by points of `high` with ω > joint.
///
/// Fails when the two sides leave a gap wider than one decade at the joint.
pub fn merge_tables(
    low: &SpectralTable,
    high: &SpectralTable,
    omega_joint: f64,
) -> Result<SpectralTable, SpectraError> {
    if omega_joint <= 0.0 || !omega_joint.is_finite() {
        return Err(SpectraError::Merge(format!(
            "omega_joint must be positive, got {omega_joint}"
        )));
    }
    let mut points: Vec<SpectralPoint> = low
        .points()
        .iter()
        .filter(|p| p.omega <= omega_joint)
        .copied()
        .collect();
    let upper: Vec<SpectralPoint> = high
        .points()
        .iter()
        .filter(|p| p.omega > omega_joint)
        .copied()
        .collect();

    if let (Some(a), Some(b)) = (points.last(), upper.first()) {
        if b.omega / a.omega > 10.0 {
            return Err(SpectraError::Merge(format!(
                "gap at the joint exceeds one decade: low side ends at {} eV, high side starts at {} eV",
                a.omega, b.omega
            )));
        }
    }
    points.extend(upper);

    let meta = TableMeta {
        source: format!(
            "{} + {} (joined at {} eV)",
            low.meta.source, high.meta.source, omega_joint
        ),
        sample: low.meta.sample.clone(),
        accuracy: low.meta.accuracy.clone(),
    };
    SpectralTable::new(points, meta)
}

/// Which tabulated field a smoothing run fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothField {
    EpsRe,
    EpsIm,
}

/// Basis of a fitted segment polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Powers of ω.
    Omega,
    /// Powers of 1/ω (used where the data rises steeply toward low ω).
    InvOmega,
}

/// One fitted segment: a quartic in the normalized basis variable.
#[derive(Debug, Clone)]
pub struct SmoothSegment {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub basis: Basis,
    center: f64,
    halfwidth: f64,
    coeffs: [f64; 5],
}

impl SmoothSegment {
    fn eval(&self, omega: f64) -> f64 {
        let t = match self.basis {
            Basis::Omega => omega,
            Basis::InvOmega => 1.0 / omega,
        };
        let x = (t - self.center) / self.halfwidth;
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Piecewise-quartic smoothed curve with C¹ joins.
///
/// Consecutive segments overlap; in each overlap the two fits are blended
/// with the smoothstep weight w(t) = 3t² − 2t³, which matches value and
/// first derivative at both overlap ends. Evaluation folds the blends left
/// to right, so arbitrary overlap patterns stay C¹.
#[derive(Debug, Clone)]
pub struct SmoothedCurve {
    segments: Vec<SmoothSegment>,
}

/// Default points per segment.
pub const SEG_LEN_DEFAULT: usize = 12;
/// Default points shared by consecutive segments.
pub const OVERLAP_DEFAULT: usize = 4;

impl SmoothedCurve {
    pub fn segments(&self) -> &[SmoothSegment] {
        &self.segments
    }

    pub fn omega_min(&self) -> f64 {
        self.segments
            .first()
            .map(|s| s.omega_lo)
            .unwrap_or(f64::NAN)
    }

    pub fn omega_max(&self) -> f64 {
        self.segments.last().map(|s| s.omega_hi).unwrap_or(f64::NAN)
    }

    /// Evaluates the curve. Outside the fitted range the edge segment
    /// polynomial is extrapolated.
    pub fn eval(&self, omega: f64) -> f64 {
        let segs = &self.segments;
        let mut acc = segs[0].eval(omega);
        for k in 1..segs.len() {
            if omega < segs[k].omega_lo {
                break;
            }
            let lo = segs[k].omega_lo;
            let hi = segs[k - 1].omega_hi.min(segs[k].omega_hi);
            let t = if hi > lo {
                ((omega - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let w = t * t * (3.0 - 2.0 * t);
            acc = (1.0 - w) * acc + w * segs[k].eval(omega);
        }
        acc
    }
}

/// Least-squares quartic in the normalized variable; returns coefficients
/// and the sum of squared residuals.
#[allow(clippy::needless_range_loop)] // row elimination reads one row while writing another
fn fit_quartic(ts: &[f64], ys: &[f64]) -> ([f64; 5], f64) {
    let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let halfwidth = 0.5 * (hi - lo);

    // normal equations on the normalized Vandermonde basis
    let mut ata = [[0.0f64; 5]; 5];
    let mut atb = [0.0f64; 5];
    for (&t, &y) in ts.iter().zip(ys) {
        let x = (t - center) / halfwidth;
        let mut pows = [1.0f64; 5];
        for p in 1..5 {
            pows[p] = pows[p - 1] * x;
        }
        for i in 0..5 {
            atb[i] += pows[i] * y;
            for j in 0..5 {
                ata[i][j] += pows[i] * pows[j];
            }
        }
    }

    // Gaussian elimination with partial pivoting
    let mut a = ata;
    let mut b = atb;
    for col in 0..5 {
        let mut piv = col;
        for r in col + 1..5 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for r in col + 1..5 {
            let m = a[r][col] / d;
            for c in col..5 {
                a[r][c] -= m * a[col][c];
            }
            b[r] -= m * b[col];
        }
    }
    let mut coeffs = [0.0f64; 5];
    for row in (0..5).rev() {
        let mut s = b[row];
        for c in row + 1..5 {
            s -= a[row][c] * coeffs[c];
        }
        coeffs[row] = s / a[row][row];
    }

    let mut ssr = 0.0;
    for (&t, &y) in ts.iter().zip(ys) {
        let x = (t - center) / halfwidth;
        let mut acc = 0.0;
        for &c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        ssr += (acc - y) * (acc - y);
    }
    (coeffs, ssr)
}

fn fit_segment(omegas: &[f64], ys: &[f64], first: bool) -> SmoothSegment {
    let make = |basis: Basis| -> (SmoothSegment, f64) {
        let ts: Vec<f64> = match basis {
            Basis::Omega => omegas.to_vec(),
            Basis::InvOmega => omegas.iter().map(|&w| 1.0 / w).collect(),
        };
        let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (coeffs, ssr) = fit_quartic(&ts, ys);
        (
            SmoothSegment {
                omega_lo: omegas[0],
                omega_hi: *omegas.last().unwrap(),
                basis,
                center: 0.5 * (lo + hi),
                halfwidth: 0.5 * (hi - lo),
                coeffs,
            },
            ssr,
        )
    };
    if !first {
        return make(Basis::Omega).0;
    }
    // The first segment typically sits where the data rises steeply toward
    // low frequency; a quartic in 1/ω follows that shape. Keep whichever
    // basis actually fits the points better.
    let (seg_w, ssr_w) = make(Basis::Omega);
    let (seg_i, ssr_i) = make(Basis::InvOmega);
    if ssr_i < ssr_w {
        seg_i
    } else {
        seg_w
    }
}

/// Smooths one field of a table with the default segmentation (12-point
/// segments, 4-point overlaps).
pub fn smooth_segments(
    table: &SpectralTable,
    field: SmoothField,
) -> Result<SmoothedCurve, SpectraError> {
    smooth_segments_with(table, field, SEG_LEN_DEFAULT, OVERLAP_DEFAULT)
}

/// Smooths one field of a table: overlapping segments of `seg_len` points,
/// consecutive segments sharing `overlap` points, a least-squares quartic
/// per segment, smoothstep-blended in the overlaps.
pub fn smooth_segments_with(
    table: &SpectralTable,
    field: SmoothField,
    seg_len: usize,
    overlap: usize,
) -> Result<SmoothedCurve, SpectraError> {
    if seg_len < 5 {
        return Err(SpectraError::RankDeficient { seg_len });
    }
    if overlap >= seg_len {
        return Err(SpectraError::InvalidTable(format!(
            "overlap ({overlap}) must be smaller than the segment length ({seg_len})"
        )));
    }
    let mut omegas = Vec::new();
    let mut ys = Vec::new();
    for p in table.points() {
        let v = match field {
            SmoothField::EpsRe => p.eps_re,
            SmoothField::EpsIm => p.eps_im,
        };
        if let Some(y) = v {
            omegas.push(p.omega);
            ys.push(y);
        }
    }
    let n = omegas.len();
    if n < seg_len {
        return Err(SpectraError::InsufficientPoints {
            needed: seg_len,
            found: n,
        });
    }

    let stride = seg_len - overlap;
    let mut starts: Vec<usize> = Vec::new();
    let mut s = 0usize;
    loop {
        if s + seg_len >= n {
            starts.push(n - seg_len);
            break;
        }
        starts.push(s);
        s += stride;
    }
    starts.dedup();

    let segments: Vec<SmoothSegment> = starts
        .iter()
        .enumerate()
        .map(|(i, &st)| fit_segment(&omegas[st..st + seg_len], &ys[st..st + seg_len], i == 0))
        .collect();

    Ok(SmoothedCurve { segments })
}
