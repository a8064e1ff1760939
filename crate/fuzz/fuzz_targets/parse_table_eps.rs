#![no_main]

use libfuzzer_sys::fuzz_target;

use casimir_core::spectra::{parse_table, table_to_csv, TableFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // must never panic; valid tables must survive a serialize/parse cycle
    if let Ok(table) = parse_table(text, TableFormat::Eps) {
        let csv = table_to_csv(&table);
        let back = parse_table(&csv, TableFormat::Eps).expect("writer output must re-parse");
        assert_eq!(back.len(), table.len());
    }
});
