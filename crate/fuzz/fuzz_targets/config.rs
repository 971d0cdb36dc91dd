#![no_main]

use aswd_cli::parse_config_str;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config_str(text) {
        let again = parse_config_str(&config.emit()).expect("emitted config parses");
        assert_eq!(again, config);
    }
});
