// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::ingest::{csm_default_headers, HeaderMap};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let defaults = csm_default_headers();
    if let Ok(map) = HeaderMap::parse_over(text, &defaults) {
        // Overlays never add or drop fields.
        let fields: Vec<&str> = map.iter().map(|(f, _)| f).collect();
        let known: Vec<&str> = defaults.iter().map(|(f, _)| f).collect();
        assert_eq!(fields, known);
    }
});
