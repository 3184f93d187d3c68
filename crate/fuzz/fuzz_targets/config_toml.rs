#![no_main]

use bearing_fis::config::Config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(cfg) = Config::from_toml_str(text) else { return };
    let again = Config::from_toml_str(&cfg.to_toml()).expect("own output parses");
    assert_eq!(cfg, again);
    assert_eq!(cfg.hash(), again.hash());
});
