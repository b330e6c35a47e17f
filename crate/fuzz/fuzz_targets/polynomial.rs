#![no_main]

use garland::spectra::RatPoly;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(p) = data.parse::<RatPoly>() {
        let back: RatPoly = p.to_string().parse().expect("display form parses");
        assert_eq!(back, p);
        let _ = p.pretty();
    }
});
