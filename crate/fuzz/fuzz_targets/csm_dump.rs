// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::ingest::{csm_default_headers, explode_csm, read_publication_rows, Collected};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_publication_rows(data, "fuzz", &csm_default_headers()) else { return };
    let mut out = Collected::default();
    if let Ok(report) = explode_csm(rows, "fuzz", &mut out) {
        assert!(report.is_conserved());
        assert_eq!(report.mentions_emitted, out.mentions.len() as u64);
        assert_eq!(report.rows_rejected, out.rejected.len() as u64);
    }
});
