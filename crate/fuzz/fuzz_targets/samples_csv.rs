#![no_main]

use aswd_cli::input::{parse_samples, samples_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(samples) = parse_samples(text, "fuzz") {
        assert!(samples.points().data().iter().all(|v| v.is_finite()));
        assert_eq!(parse_samples(&samples_csv(&samples), "fuzz").unwrap(), samples);
    }
});
