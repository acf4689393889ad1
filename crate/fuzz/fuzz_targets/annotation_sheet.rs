// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::annotation::{read_annotated, read_sheet};
use mention_lens_core::model::TagsetRegistry;

fuzz_target!(|data: &[u8]| {
    if let Ok(sheet) = read_sheet(data, None) {
        for row in &sheet.rows {
            assert!(row.line >= 1);
        }
    }
    let _ = read_annotated(data, &TagsetRegistry::builtin());
});
