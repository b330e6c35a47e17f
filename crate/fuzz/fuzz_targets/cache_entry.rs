#![no_main]

use garland::harness::cache::CacheEntry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(entry) = CacheEntry::from_json(data) {
        let _ = entry.poly();
        let back = CacheEntry::from_json(&entry.to_json()).expect("entry round-trips");
        assert_eq!(back.to_json(), entry.to_json());
    }
});
