// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::ingest::{clean_mention, parse_mention_list};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    match parse_mention_list(s) {
        Ok(items) => {
            for item in &items {
                assert!(!item.is_empty());
                assert_eq!(clean_mention(item), item);
            }
        }
        Err(e) => assert!(e.offset <= s.len()),
    }
});
