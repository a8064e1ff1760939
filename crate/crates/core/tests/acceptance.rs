//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured values. Run with
//! `cargo test -p casimir-core --test acceptance -- --nocapture`.

use casimir_core::casimir::{self, EtaOptions, MirrorSpec};
use casimir_core::constants;
use casimir_core::drude::{self, DrudeParams, ElectronGas};
use casimir_core::fitting::{self, FitConfig};
use casimir_core::kk::{self, DielectricModel};
use casimir_core::spectra::{SpectralPoint, SpectralTable, TableMeta};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {id:02} {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02} ({name}) failed: {detail}");
}

fn gold() -> DrudeParams {
    DrudeParams::new(9.0, 0.035).unwrap()
}

#[test]
fn acceptance_01_eps1_closed_form() {
    let v = drude::eps1_low_contribution(&gold(), 0.125, 0.988).unwrap();
    let pass = (v - 68.42).abs() <= 0.02;
    report(
        1,
        "eps1 closed form at zeta=0.988",
        pass,
        &format!("eps1 = {v:.4}, expected 68.42 ± 0.02"),
    );
}

#[test]
fn acceptance_02_characteristic_frequency() {
    let z = casimir::characteristic_frequency(100e-9);
    let pass = (z - 0.988).abs() <= 0.001;
    report(
        2,
        "characteristic frequency at 100 nm",
        pass,
        &format!("zeta_ch = {z:.5} eV, expected 0.988 ± 0.001 (c/2L with the pinned eV conversion gives {z:.5})"),
    );
}

#[test]
fn acceptance_03_plasma_frequency_from_density() {
    let gas = ElectronGas::from_bulk_density(19.3, 196.97, 1.0).unwrap();
    let wp = drude::plasma_from_density(&gas);
    let pass = (wp - 9.0).abs() <= 0.1;
    report(
        3,
        "plasma frequency from Au bulk density",
        pass,
        &format!("omega_p = {wp:.4} eV, expected 9.0 ± 0.1"),
    );
}

#[test]
fn acceptance_04_perfect_mirror_limit() {
    let mirror = MirrorSpec::constant(1e8);
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for &l_um in &[0.1, 0.3, 0.5, 1.0, 3.0] {
        let r = casimir::reduction_factor(&mirror, l_um * 1e-6).unwrap();
        let dev = (r.eta - 1.0).abs();
        worst = worst.max(dev);
        detail.push_str(&format!("eta({l_um}um)={:.6} ", r.eta));
    }
    let pass = worst <= 1e-3;
    report(
        4,
        "perfect-mirror limit eps=1e8",
        pass,
        &format!("{detail}; worst |eta-1| = {worst:.2e}, required <= 1e-3"),
    );
}

#[test]
fn acceptance_05_table_reproduction_pure_drude() {
    let rows: [(f64, f64, [f64; 5]); 5] = [
        (7.50, 0.061, [0.43, 0.66, 0.75, 0.85, 0.93]),
        (8.41, 0.020, [0.45, 0.69, 0.79, 0.88, 0.95]),
        (8.84, 0.0422, [0.46, 0.69, 0.78, 0.87, 0.94]),
        (6.85, 0.0357, [0.42, 0.65, 0.75, 0.84, 0.93]),
        (9.00, 0.035, [0.47, 0.71, 0.79, 0.88, 0.95]),
    ];
    let distances_um = [0.1, 0.3, 0.5, 1.0, 3.0];
    let mut all_pass = true;
    let mut failures = String::new();
    for (wp, wt, printed) in rows {
        let mirror = MirrorSpec::drude(DrudeParams::new(wp, wt).unwrap());
        for (j, &l_um) in distances_um.iter().enumerate() {
            let eta = casimir::reduction_factor(&mirror, l_um * 1e-6).unwrap().eta;
            let tol = if j == 0 { 0.03 } else { 0.02 };
            let dev = (eta - printed[j]).abs();
            if dev > tol {
                all_pass = false;
                failures.push_str(&format!(
                    "[wp={wp} L={l_um}um: eta={eta:.4} vs {:.2}, |d|={dev:.3}>{tol}] ",
                    printed[j]
                ));
            }
        }
    }
    let detail = if all_pass {
        "all 25 cells within ±0.03 (0.1 um) / ±0.02 (>=0.3 um)".to_string()
    } else {
        format!("cells out of tolerance: {failures}")
    };
    report(
        5,
        "reference table with pure-Drude mirrors",
        all_pass,
        &detail,
    );
}

#[test]
fn acceptance_06_sensitivity_study() {
    // The sensitivity study follows the measurement procedure: the Drude
    // extrapolation below the cutoff is varied while the tabulated data
    // above it stays fixed. The stand-in for the measured table is
    // Drude(9.0, 0.035) plus an interband Lorentz term whose strength is
    // anchored to the published above-cutoff contribution eps2 + eps3 =
    // 21.10 at zeta = 0.988 eV.
    let (al, w0l, gl) = (11.3517f64, 4.0f64, 2.5f64);
    let wc = 0.125f64;
    let n = 235;
    let pts: Vec<SpectralPoint> = (0..n)
        .map(|i| {
            let w = wc * (1e3 / wc).powf(i as f64 / (n - 1) as f64);
            let drude_im = 81.0 * 0.035 / (w * (w * w + 0.035 * 0.035));
            let lor_im = al * w0l * w0l * gl * w / ((w0l * w0l - w * w).powi(2) + gl * gl * w * w);
            SpectralPoint {
                omega: w,
                eps_re: None,
                eps_im: Some(drude_im + lor_im),
            }
        })
        .collect();
    let table = SpectralTable::new(
        pts,
        TableMeta {
            source: "synthetic handbook".into(),
            ..Default::default()
        },
    )
    .unwrap();
    let model = DielectricModel::from_table(&table, wc, gold()).unwrap();

    // anchor check: above-cutoff contribution at the characteristic frequency
    let r_above = kk::eps_contribution(&model, 0.988, wc, f64::INFINITY).unwrap();
    assert!(
        (r_above - 21.10).abs() < 0.5,
        "fixture anchor drifted: eps2+eps3 = {r_above}, expected ~21.10"
    );

    let l = 0.1e-6;
    let eta_of = |wp: f64, wt: f64| {
        let m = model.with_low(DrudeParams::new(wp, wt).unwrap()).unwrap();
        casimir::reduction_factor(&MirrorSpec::model(m, "sensitivity"), l)
            .unwrap()
            .eta
    };
    let base = eta_of(7.50, 0.061);
    let p_up = eta_of(7.50 * 1.15, 0.061);
    let p_dn = eta_of(7.50 * 0.85, 0.061);
    let t_up = eta_of(7.50, 0.061 * 1.30);
    let t_dn = eta_of(7.50, 0.061 * 0.70);

    let spread_p = (p_up - p_dn) / (2.0 * base) * 100.0;
    let spread_t = (t_dn - t_up) / (2.0 * base) * 100.0;
    let pass_p = (spread_p - 4.2).abs() <= 1.0;
    let pass_t = (spread_t - 1.6).abs() <= 0.5;
    report(
        6,
        "sensitivity to Drude parameters at 0.1 um",
        pass_p && pass_t,
        &format!(
            "omega_p ±15% -> {spread_p:.2}% (expected 4.2 ± 1.0); omega_tau ±30% -> {spread_t:.2}% (expected 1.6 ± 0.5); base eta = {base:.4}"
        ),
    );
}

#[test]
fn acceptance_07_kk_identity_suite() {
    let p = gold();
    let model = DielectricModel::pure_drude(&p, 0.125, 1e3, 60).unwrap();

    let mut worst_imag: f64 = 0.0;
    for i in 0..50 {
        let z = 0.01 * 10f64.powf(3.0 * i as f64 / 49.0);
        let kkv = kk::kk_imag_axis(&model, z).unwrap();
        let closed = drude::eps_imag_axis_closed(&p, z).unwrap();
        worst_imag = worst_imag.max(((kkv - closed) / closed).abs());
    }

    let mut worst_real: f64 = 0.0;
    for i in 0..20 {
        let w = 0.1 * 10f64.powf(i as f64 / 19.0);
        let kkv = kk::kk_real_from_imag(&model, w).unwrap();
        let closed = 1.0 - p.omega_p * p.omega_p / (w * w + p.omega_tau * p.omega_tau);
        worst_real = worst_real.max(((kkv - closed) / closed).abs());
    }

    let pass = worst_imag < 1e-4 && worst_real < 5e-3;
    report(
        7,
        "Kramers-Kronig identities on a pure-Drude model",
        pass,
        &format!("imag-axis worst rel dev {worst_imag:.2e} (< 1e-4); real-axis worst rel dev {worst_real:.2e} (< 5e-3)"),
    );
}

#[test]
fn acceptance_08_fit_round_trip() {
    // noiseless: exact recovery
    let exact = synth_fit_table(0, 0.0);
    let r = fitting::fit_drude(&exact, &FitConfig::default()).unwrap();
    let rel_p = (r.params.omega_p - 8.41).abs() / 8.41;
    let rel_t = (r.params.omega_tau - 0.020).abs() / 0.020;
    let rel_pol = (r.params.pol - 7.15).abs() / 7.15;
    let exact_ok = rel_p < 1e-6 && rel_t < 1e-6 && rel_pol < 1e-6;

    // noisy, fixed seed: omega_p within 1%, error bar within 2x of the
    // Monte-Carlo spread over 100 seeds
    let noisy = synth_fit_table(1, 0.01);
    let rn = fitting::fit_drude(&noisy, &FitConfig::default()).unwrap();
    let noisy_ok = (rn.params.omega_p - 8.41).abs() / 8.41 < 0.01;
    let (err_p, _, _) = fitting::param_errors(&noisy, &FitConfig::default(), &rn.params).unwrap();

    let mut fits = Vec::with_capacity(100);
    for seed in 1..=100u64 {
        let t = synth_fit_table(seed, 0.01);
        fits.push(
            fitting::fit_drude(&t, &FitConfig::default())
                .unwrap()
                .params
                .omega_p,
        );
    }
    let mean = fits.iter().sum::<f64>() / fits.len() as f64;
    let sd =
        (fits.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (fits.len() - 1) as f64).sqrt();
    let ratio = sd / err_p;
    let bar_ok = (0.5..=2.0).contains(&ratio);

    report(
        8,
        "fit round-trip and error-bar calibration",
        exact_ok && noisy_ok && bar_ok,
        &format!(
            "exact recovery rel dev ({rel_p:.1e}, {rel_t:.1e}, {rel_pol:.1e}) < 1e-6; noisy omega_p dev {:.3}%; MC sd {sd:.2e} vs error bar {err_p:.2e} (ratio {ratio:.2} in [0.5, 2])",
            (rn.params.omega_p - 8.41).abs() / 8.41 * 100.0
        ),
    );
}

#[test]
fn acceptance_09_kk_estimation_round_trip() {
    // synthetic sample: Drude(8.40, 0.020) plus one interband oscillator,
    // both columns from the closed forms
    let (wp, wt) = (8.40f64, 0.020f64);
    let (al, w0l, gl) = (6.0f64, 3.0f64, 1.0f64);
    let wc = 0.1f64;
    let wmax = 20.0;
    let n = 116;
    let pts: Vec<SpectralPoint> = (0..n)
        .map(|i| {
            let w = wc * (wmax / wc).powf(i as f64 / (n - 1) as f64);
            let den = (w0l * w0l - w * w).powi(2) + gl * gl * w * w;
            let re = 1.0 - wp * wp / (w * w + wt * wt) + al * w0l * w0l * (w0l * w0l - w * w) / den;
            let im = wp * wp * wt / (w * (w * w + wt * wt)) + al * w0l * w0l * gl * w / den;
            SpectralPoint {
                omega: w,
                eps_re: Some(re),
                eps_im: Some(im),
            }
        })
        .collect();
    let table = SpectralTable::new(pts, TableMeta::default()).unwrap();
    let est = kk::estimate_drude_kk(&table, wc).unwrap();
    let dev_p = (est.omega_p - wp).abs() / wp;
    let dev_t = (est.omega_tau - wt).abs() / wt;
    let pass = dev_p < 0.02 && dev_t < 0.10;
    report(
        9,
        "KK estimation round-trip",
        pass,
        &format!(
            "recovered (omega_p, omega_tau) = ({:.4}, {:.5}); deviations {:.2}% (< 2%) and {:.2}% (< 10%)",
            est.omega_p,
            est.omega_tau,
            dev_p * 100.0,
            dev_t * 100.0
        ),
    );
}

#[test]
fn acceptance_10_oracle_equivalence() {
    // fixed-grid trapezoid oracle in the original (zeta, k) variables
    let p = gold();
    let mirror = MirrorSpec::drude(p.clone());
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for &l_um in &[0.1, 0.5, 3.0] {
        let l = l_um * 1e-6;
        let adaptive = casimir::force_lifshitz(&mirror, l).unwrap();
        let oracle = trapezoid_force_oracle(&p, l);
        let rel = ((adaptive - oracle) / oracle).abs();
        worst = worst.max(rel);
        detail.push_str(&format!("L={l_um}um rel={rel:.2e} "));
    }
    let pass = worst < 1e-3;
    report(
        10,
        "independent trapezoid oracle",
        pass,
        &format!("{detail}; worst {worst:.2e} < 1e-3"),
    );
}

#[test]
fn acceptance_11_integration_span_robustness() {
    let mirror = MirrorSpec::drude(gold());
    let l = 0.1e-6;
    let half = 10f64.sqrt();
    let base = casimir::reduction_factor(&mirror, l).unwrap().eta;
    let wide = casimir::reduction_factor_with(
        &mirror,
        l,
        &EtaOptions {
            zeta_span: (1e-4 / half, 1e3 * half),
            ..Default::default()
        },
    )
    .unwrap()
    .eta;
    let narrow = casimir::reduction_factor_with(
        &mirror,
        l,
        &EtaOptions {
            zeta_span: (1e-4 * half, 1e3 / half),
            ..Default::default()
        },
    )
    .unwrap()
    .eta;
    let d_wide = ((wide - base) / base).abs() * 100.0;
    let d_narrow = ((narrow - base) / base).abs() * 100.0;
    let pass = d_wide < 0.1 && d_narrow < 0.1;
    report(
        11,
        "half-decade span robustness",
        pass,
        &format!("widening changes eta by {d_wide:.4}%, narrowing by {d_narrow:.4}% (< 0.1%)"),
    );
}

// ---------------------------------------------------------------------
// fixtures and oracles

/// SplitMix64 + Box-Muller Gaussian source; keeps fixtures independent of
/// any RNG crate and bit-stable across releases.
struct GaussSource {
    state: u64,
    spare: Option<f64>,
}

impl GaussSource {
    fn new(seed: u64) -> Self {
        GaussSource {
            state: seed,
            spare: None,
        }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn gauss(&mut self) -> f64 {
        if let Some(s) = self.spare.take() {
            return s;
        }
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// 20 log-spaced points of the (8.41, 0.020, 7.15) model on [0.1, 1] eV,
/// with additive Gaussian noise of width `sigma` on both ε columns.
fn synth_fit_table(seed: u64, sigma: f64) -> SpectralTable {
    let (wp, wt, pol) = (8.41, 0.020, 7.15);
    let mut g = GaussSource::new(seed);
    let pts: Vec<SpectralPoint> = (0..20)
        .map(|i| {
            let w = 0.1 * 10f64.powf(i as f64 / 19.0);
            let d = w * w + wt * wt;
            let (n1, n2) = (g.gauss(), g.gauss());
            SpectralPoint {
                omega: w,
                eps_re: Some(pol - wp * wp / d + sigma * n1),
                eps_im: Some((wp * wp * wt / (w * d) + sigma * n2).max(0.0)),
            }
        })
        .collect();
    SpectralTable::new(pts, TableMeta::default()).unwrap()
}

/// Brute-force Lifshitz force on a fixed 200×200 log grid in the original
/// (ζ, k) variables, trapezoid in (ln ζ, ln k). Fully independent of the
/// adaptive (K, u) evaluation it checks.
fn trapezoid_force_oracle(p: &DrudeParams, l: f64) -> f64 {
    const N: usize = 200;
    let (z_lo, z_hi) = (1e-4f64, 1e3f64);
    let k_lo = 1e-3 / (2.0 * l);
    let k_hi = 40.0 / (2.0 * l);

    let zs: Vec<f64> = (0..N)
        .map(|i| z_lo * (z_hi / z_lo).powf(i as f64 / (N - 1) as f64))
        .collect();
    let ks: Vec<f64> = (0..N)
        .map(|i| k_lo * (k_hi / k_lo).powf(i as f64 / (N - 1) as f64))
        .collect();
    let dlz = (z_hi / z_lo).ln() / (N - 1) as f64;
    let dlk = (k_hi / k_lo).ln() / (N - 1) as f64;

    // integrand of (hbar / 2π²) ∫ dζ_rad ∫ k dk κ Σ_μ r²e^{-2κL}/(1 - r²e^{-2κL}),
    // written against d(ln ζ) d(ln k)
    let cell = |zeta_ev: f64, k: f64| -> f64 {
        let zr = constants::ev_to_inv_m(zeta_ev);
        let kappa = (k * k + zr * zr).sqrt();
        let eps = 1.0 + p.omega_p * p.omega_p / (zeta_ev * (zeta_ev + p.omega_tau));
        let km = (k * k + eps * zr * zr).sqrt();
        let rs = (km - kappa) / (km + kappa);
        let rp = (km - eps * kappa) / (km + eps * kappa);
        let (rs2, rp2) = (rs * rs, rp * rp);
        let ex = (-2.0 * kappa * l).exp();
        let g = rs2 * ex / (1.0 - rs2 * ex) + rp2 * ex / (1.0 - rp2 * ex);
        kappa * g * (zeta_ev * constants::RAD_PER_S_PER_EV) * k * k
    };

    let mut total = 0.0;
    for (i, &z) in zs.iter().enumerate() {
        let wz = if i == 0 || i == N - 1 { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for (j, &k) in ks.iter().enumerate() {
            let wk = if j == 0 || j == N - 1 { 0.5 } else { 1.0 };
            row += wk * cell(z, k);
        }
        total += wz * row;
    }
    total *= dlz * dlk;
    -constants::HBAR_J_S / (2.0 * std::f64::consts::PI.powi(2)) * total
}

/// Cross-check of the oracle itself: perfect reflectivity must reproduce
/// the ideal-metal force on the same grid scheme within its own accuracy.
#[test]
fn oracle_self_check_perfect_mirror() {
    let l = 0.5e-6;
    const N: usize = 400;
    let k_lo: f64 = 1e-4 / (2.0 * l);
    let k_hi: f64 = 60.0 / (2.0 * l);
    let dlk = (k_hi / k_lo).ln() / (N - 1) as f64;
    // r² = 1: F = (hbar c / π²) ∫ κ³ Σ_n e^{-2nκL}; integrate by log-κ trapezoid
    let mut total = 0.0;
    for i in 0..N {
        let w = if i == 0 || i == N - 1 { 0.5 } else { 1.0 };
        let kappa = k_lo * (k_hi / k_lo).powf(i as f64 / (N - 1) as f64);
        let ex = (-2.0 * kappa * l).exp();
        total += w * kappa.powi(4) * ex / (1.0 - ex);
    }
    total *= dlk;
    let force =
        constants::HBAR_J_S * constants::SPEED_OF_LIGHT_M_S / std::f64::consts::PI.powi(2) * total;
    let ideal = casimir::force_ideal(l).abs();
    assert!(
        ((force - ideal) / ideal).abs() < 1e-4,
        "oracle scheme self-check: {force} vs {ideal}"
    );
}
