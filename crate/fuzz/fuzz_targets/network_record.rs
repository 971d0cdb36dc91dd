#![no_main]

use aswd::augmentation::AugmentationNetwork;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = AugmentationNetwork::from_record(text) {
        let again = AugmentationNetwork::from_record(&net.to_record()).expect("written record parses");
        assert_eq!(again.to_record(), net.to_record());
    }
});
