//! Feeds arbitrary text to the sparse index:value dataset parser. The parser
//! must reject malformed input with a typed error, never panic, and anything
//! it accepts must survive a write/parse round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use scinol::data::{parse_libsvm, write_libsvm};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(parsed) = parse_libsvm(text) {
        let rewritten = write_libsvm(&parsed);
        let reparsed = parse_libsvm(&rewritten).expect("writer output must parse");
        assert!(reparsed.same_content(&parsed), "round trip changed the data");
    }
});
