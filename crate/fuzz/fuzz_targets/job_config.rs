#![no_main]

use erd_cli::config::JobConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = JobConfig::from_json(src) else { return };
    let _ = cfg.build_options();
    let _ = cfg.portrait.check();
    if let Ok(f) = cfg.field() {
        assert!(!f.p.is_zero());
    }
});
