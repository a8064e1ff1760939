//! Casimir force between metallic mirrors from tabulated optical data.
//!
//! The crate covers the full pipeline from measured optical constants to
//! the force between parallel plates:
//!
//! - [`spectra`]: ingestion, validation, conversion and merging of
//!   tabulated ε(ω) or (n, k) data, and segmented quartic smoothing;
//! - [`drude`]: closed-form Drude evaluations on both frequency axes and
//!   the plasma frequency from the electron density;
//! - [`fitting`]: joint χ² extraction of (ω_p, ω_τ, P) from mid-infrared
//!   data with profile-likelihood error bars;
//! - [`kk`]: Kramers-Kronig transforms — ε(iζ) from ε″ with a three-piece
//!   model (Drude head, smoothed data, cubic tail), the real-axis
//!   principal-value transform, and Drude estimation by matching predicted
//!   against observed ε′;
//! - [`casimir`]: reflection amplitudes, the zero-temperature force between
//!   identical mirrors, and the reduction factor η_F relative to ideal
//!   metals.
//!
//! Frequencies are photon energies in eV throughout; separations are in
//! meters; forces in Pa.

pub mod casimir;
pub mod constants;
pub mod drude;
pub mod fitting;
pub mod kk;
pub mod quad;
pub mod spectra;

pub use casimir::{
    characteristic_frequency, force_ideal, force_lifshitz, reduction_factor, CasimirError,
    EpsProvider, EtaOptions, EtaResult, MirrorSpec,
};
pub use drude::{
    eps1_low_contribution, eps_imag_axis_closed, eps_real_axis, plasma_from_density, DrudeError,
    DrudeParams, ElectronGas,
};
pub use fitting::{fit_drude, param_errors, sensitivity_table, FitConfig, FitError, FitReport};
pub use kk::{
    eps_contribution, estimate_drude_kk, kk_imag_axis, kk_real_from_imag, DielectricModel,
    ExtrapolationScheme, KkError,
};
pub use spectra::{
    eps_from_nk, load_table, merge_tables, parse_table, save_table, smooth_segments, SmoothField,
    SmoothedCurve, SpectraError, SpectralPoint, SpectralTable, TableFormat, TableMeta,
};
