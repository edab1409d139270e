//! Cleans OCR text from a printed directory and splits it into entries.
//!
//! ```bash
//! cargo run -p atlas --example ingest_print_guide
//! ```

use atlas::ingest::{ingest_print_guide, ocr_cleanup, IngestContext};
use atlas::model::Vocabularies;

const GUIDE: &str = include_str!("../fixtures/guide.txt");

fn main() {
    let cleanup = ocr_cleanup(GUIDE);
    for c in &cleanup.corrections {
        println!("offset {:>4}: {:?} -> {:?}", c.offset, c.before, c.after);
    }

    let vocab = Vocabularies::builtin();
    let import = ingest_print_guide(GUIDE, &IngestContext::new(&vocab, "guide.txt"));
    for sub in &import.submissions {
        println!("\n{}", sub.proposed.fields.title);
        for (label, value) in &sub.raw_fields {
            println!("  {label}: {value}");
        }
    }
    for issue in &import.issues {
        println!("{}: {}", issue.location, issue.message);
    }
}
