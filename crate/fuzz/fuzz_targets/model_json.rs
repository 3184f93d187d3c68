#![no_main]

use bearing_fis::fis::TsFisModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(model) = TsFisModel::from_json(text) else { return };
    let again = TsFisModel::from_json(&model.to_json()).expect("own output parses");
    assert_eq!(model, again);
    let v = vec![0.5; model.feature_set().len()];
    let _ = model.infer(&v, Some(1.0));
});
