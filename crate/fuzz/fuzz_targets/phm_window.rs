#![no_main]

use std::path::Path;

use bearing_fis::datasets::{parse_phm_window, PHM_WINDOW_LEN};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(samples) = parse_phm_window(text, Path::new("acc_00001.csv")) {
        assert_eq!(samples.len(), PHM_WINDOW_LEN);
        assert!(samples.iter().all(|v| v.is_finite()));
    }
});
