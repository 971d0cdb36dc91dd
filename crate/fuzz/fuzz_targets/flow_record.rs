#![no_main]

use aswd::flow::FlowRunRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(record) = FlowRunRecord::from_csv(text) {
        let csv = record.to_csv();
        let again = FlowRunRecord::from_csv(&csv).expect("written record parses");
        assert_eq!(again.to_csv(), csv);
    }
});
