// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::ingest::{linked_default_headers, merge_linked, read_linked};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_linked(data, "fuzz", &linked_default_headers()) else { return };
    let links: Vec<_> = rows.filter_map(|r| r.ok()?.ok()).collect();
    let n = links.len() as u64;
    let (_, report) = merge_linked(Vec::new(), links);
    assert_eq!(report.links_read, n);
    assert_eq!(report.links_unmatched, n);
});
