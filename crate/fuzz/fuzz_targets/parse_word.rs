#![no_main]

use erd_core::words::{parse_word, ph_index, reduce};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(w) = parse_word(src) else { return };
    if w.letters.len() > 64 {
        return;
    }
    let r = reduce(&w);
    assert_eq!(reduce(&r), r);
    assert_eq!(ph_index(&r), ph_index(&w));
    let back = parse_word(&w.to_string()).expect("printed words parse");
    assert!(back.cyclic_eq(&w));
});
