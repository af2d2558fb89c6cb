#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = fluxsnn::config::RunConfig::from_json(text) {
        // Accepted configs are valid and survive a serialization loop.
        cfg.validate().expect("accepted config validates");
        let again = fluxsnn::config::RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }
});
