#![no_main]

use std::path::Path;

use bearing_fis::features::FeatureTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(table) = FeatureTable::read_csv(data, Path::new("fuzz.csv")) else { return };
    let mut out = Vec::new();
    table.write_csv(&mut out).expect("writing to memory");
    let again = FeatureTable::read_csv(out.as_slice(), Path::new("again.csv")).expect("own output parses");
    assert_eq!(table, again);
});
