#![no_main]

use bearing_fis::datasets::parse_ims_timestamp;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|name: &str| {
    if let Some(t) = parse_ims_timestamp(name) {
        assert!(t.is_finite());
    }
});
