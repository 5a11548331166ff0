//! Feeds arbitrary text to the dense CSV parser, with the label column and
//! header flag steered by the first input byte. Accepted input must survive
//! a write/parse round trip (the writer always moves the label to the last
//! column, which the content comparison is insensitive to).

#![no_main]

use libfuzzer_sys::fuzz_target;
use scinol::data::{parse_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    let Some((&knob, rest)) = data.split_first() else {
        return;
    };
    let label_column = if knob & 0x40 != 0 {
        Some((knob & 0x0f) as usize)
    } else {
        None
    };
    let has_header = knob & 0x80 != 0;
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(parsed) = parse_csv(text, label_column, has_header) {
        let rewritten = write_csv(&parsed);
        let reparsed = parse_csv(&rewritten, None, true).expect("writer output must parse");
        assert!(reparsed.same_content(&parsed), "round trip changed the data");
    }
});
