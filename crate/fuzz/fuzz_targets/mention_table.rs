// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;
use mention_lens_core::ingest::{read_joined_table, read_mention_table, MentionTableWriter};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_mention_table(data) {
        // Whatever reads back must survive a write and re-read unchanged.
        let mut w = MentionTableWriter::new(Vec::new()).unwrap();
        for r in &rows {
            w.write(r).unwrap();
        }
        let bytes = w.finish().unwrap();
        assert_eq!(read_mention_table(bytes.as_slice()).unwrap(), rows);
    }
    let _ = read_joined_table(data);
});
