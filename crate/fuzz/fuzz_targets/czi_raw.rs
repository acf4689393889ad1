// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::ingest::{czi_default_headers, ingest_czi_raw, Collected, Collection};

fuzz_target!(|data: &[u8]| {
    // Split on the first NUL into two collections so cross-file ids are hit.
    let (a, b) = match data.iter().position(|&c| c == 0) {
        Some(i) => (&data[..i], &data[i + 1..]),
        None => (data, &[][..]),
    };
    let inputs = vec![
        (Collection::Commercial, "comm".to_string(), a),
        (Collection::Publishers, "publishers".to_string(), b),
    ];
    let mut out = Collected::default();
    if let Ok(report) = ingest_czi_raw(inputs, &czi_default_headers(), &mut out) {
        assert!(report.is_conserved());
        assert_eq!(report.mentions_emitted, out.mentions.len() as u64);
    }
});
