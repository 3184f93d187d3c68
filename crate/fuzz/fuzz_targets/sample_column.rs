#![no_main]

use std::path::Path;

use bearing_fis::datasets::parse_sample_column;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(samples) = parse_sample_column(text, Path::new("w.csv")) {
        assert!(!samples.is_empty());
        assert!(samples.iter().all(|v| v.is_finite()));
    }
});
