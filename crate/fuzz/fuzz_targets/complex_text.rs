#![no_main]

use garland::complex::parse_complex_text;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(ingested) = parse_complex_text(data) else {
        return;
    };
    let c = &ingested.complex;
    assert!(c.check_weight_identity());
    let again = parse_complex_text(&c.to_text()).expect("canonical text parses");
    assert_eq!(again.complex.counts(), c.counts());
    assert_eq!(again.complex.to_text(), c.to_text());
});
