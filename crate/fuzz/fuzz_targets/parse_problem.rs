#![no_main]

use libfuzzer_sys::fuzz_target;

// Problem parsing must reject arbitrary bytes without panicking; whatever it
// accepts must serialize back to a document that parses to the same problem.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(parsed) = peakswap::io::parse_problem(text) else {
        return;
    };
    let normalized = peakswap::io::serialize_problem(&parsed.problem, parsed.names.as_deref());
    let again = peakswap::io::parse_problem(&normalized).expect("normalized document parses");
    assert_eq!(again.problem, parsed.problem);
    assert_eq!(again.names, parsed.names);
});
