#![no_main]

use libfuzzer_sys::fuzz_target;

// Order parsing must never panic, and an accepted order must round-trip
// through its 1-based display form.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for n in 0..=8usize {
        let Ok(order) = peakswap::io::parse_order(text, n) else {
            continue;
        };
        assert_eq!(order.n(), n);
        let shown = (0..n)
            .map(|rank| (order.agent_at_rank(rank) + 1).to_string())
            .collect::<Vec<_>>()
            .join(",");
        let again = peakswap::io::parse_order(&shown, n).expect("rendered order parses");
        assert_eq!(again, order);
    }
});
