#![no_main]

use libfuzzer_sys::fuzz_target;

use casimir_core::drude::DrudeParams;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(params) = DrudeParams::from_json(text) {
        // anything that parses must satisfy the type invariants and
        // round-trip through the writer
        assert!(params.omega_p > 0.0 && params.omega_tau > 0.0);
        assert!(params.omega_tau < params.omega_p);
        let back = DrudeParams::from_json(&params.to_json()).expect("writer output must re-parse");
        assert_eq!(back, params);
    }
});
