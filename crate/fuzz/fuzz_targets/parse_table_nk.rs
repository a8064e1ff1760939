#![no_main]

use libfuzzer_sys::fuzz_target;

use casimir_core::spectra::{parse_table, TableFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(table) = parse_table(text, TableFormat::Nk) {
        // n, k >= 0 conversion must yield valid points: eps_im >= 0 and
        // strictly ascending frequencies
        for w in table.points().windows(2) {
            assert!(w[0].omega < w[1].omega);
        }
        for p in table.points() {
            assert!(p.eps_im.unwrap_or(0.0) >= 0.0);
        }
    }
});
