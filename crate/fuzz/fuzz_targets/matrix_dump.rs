#![no_main]

use garland::laplace::SparseMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(m) = SparseMatrix::parse_dump(data) {
        let back = SparseMatrix::parse_dump(&m.to_dump()).expect("dump parses");
        assert_eq!(back, m);
    }
});
