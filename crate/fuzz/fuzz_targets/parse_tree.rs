#![no_main]

use erd_core::tree::{parse_tree, validate, write_tree};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(t) = parse_tree(src) else { return };
    let _ = validate(&t);
    let text = write_tree(&t);
    let again = parse_tree(&text).expect("written trees parse");
    assert_eq!(write_tree(&again), text);
});
