#![no_main]

use eigenscape::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_kv(text) {
        let again = ExperimentConfig::from_kv(&cfg.to_kv()).expect("serialized config parses");
        assert_eq!(again.to_kv(), cfg.to_kv());
    }
});
