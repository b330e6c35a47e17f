#![no_main]

use garland::harness::report::{render_text, Report};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(report) = Report::from_json(data) {
        let _ = render_text(&report);
        let json = report.to_json();
        let back = Report::from_json(&json).expect("report round-trips");
        assert_eq!(back.to_json(), json);
    }
});
