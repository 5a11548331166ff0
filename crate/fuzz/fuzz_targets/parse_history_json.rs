//! Feeds arbitrary text to the recorded-run JSON decoder. Decoding must
//! never panic, and whatever decodes cleanly must also survive the
//! consistency validator (which refolds terminal statistics from the
//! trials), again without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use scinol::history::RunHistory;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(hist) = RunHistory::from_json(text) {
        let _ = hist.validate();
    }
});
