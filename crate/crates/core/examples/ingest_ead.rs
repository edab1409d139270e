//! Pulls the collection-level description out of an EAD finding aid.
//!
//! ```bash
//! cargo run -p atlas --example ingest_ead
//! ```

use atlas::ingest::{ingest_ead, parse_ead_collection, IngestContext};
use atlas::model::Vocabularies;

const EAD: &[u8] = include_bytes!("../fixtures/wxyz-ead.xml");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("raw fields:");
    for (field, value) in parse_ead_collection(EAD)? {
        println!("  {field:<24} {value}");
    }

    let vocab = Vocabularies::builtin();
    let sub = ingest_ead(EAD, &IngestContext::new(&vocab, "wxyz-ead.xml"))?;
    println!("\nproposed draft:");
    println!("{}", serde_json::to_string_pretty(&sub.proposed.fields)?);
    Ok(())
}
