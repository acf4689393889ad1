// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::model::{validate_annotation, TagsetRegistry};
use mention_lens_server::{AnnotationInput, NoteInput};

fuzz_target!(|data: &[u8]| {
    if let Ok(input) = serde_json::from_slice::<AnnotationInput>(data) {
        let rec = input.into_record("m0", "A1");
        let _ = validate_annotation(&rec, &TagsetRegistry::builtin());
    }
    let _ = serde_json::from_slice::<NoteInput>(data);
});
