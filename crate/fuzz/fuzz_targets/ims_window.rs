#![no_main]

use std::path::Path;

use bearing_fis::datasets::{parse_ims_window, IMS_WINDOW_LEN};
use libfuzzer_sys::fuzz_target;

// First byte picks the channel, the rest is the file body.
fuzz_target!(|data: &[u8]| {
    let Some((&channel, body)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(body) else { return };
    if let Ok(samples) = parse_ims_window(text, usize::from(channel % 16), Path::new("2003.10.22.12.06.24")) {
        assert_eq!(samples.len(), IMS_WINDOW_LEN);
        assert!(samples.iter().all(|v| v.is_finite()));
    }
});
