//! Exports a deterministic public snapshot, verifies it, and shows that a
//! flipped byte is caught.
//!
//! ```bash
//! cargo run -p atlas --example snapshot_export
//! ```

use atlas::ingest::{IncomingSubmission, IngestContext};
use atlas::model::Vocabularies;
use atlas::store::{export_snapshot, import_snapshot, Catalog, CatalogOptions, Principal};
use atlas::synth::Synth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::in_memory(CatalogOptions::default());
    let mut synth = Synth::new(3);
    let curator = Principal::curator("mara");
    let vocab = Vocabularies::builtin();
    let ctx = IngestContext::new(&vocab, "synthetic");
    for _ in 0..25 {
        let sub = catalog.submit(IncomingSubmission::from_draft(synth.draft(), &ctx), None)?;
        catalog.approve(&sub.submission_id, &curator, None, None)?;
    }

    let bytes = export_snapshot(&catalog.view());
    assert_eq!(bytes, export_snapshot(&catalog.view()));
    let snapshot = import_snapshot(&bytes)?;
    println!("{} bytes, {} public records", bytes.len(), snapshot.manifest.record_count);
    println!("content_hash {}", snapshot.manifest.content_hash);
    println!("generated_at {:?}", snapshot.manifest.generated_at);

    let mut damaged = bytes.clone();
    damaged[40] ^= 1;
    match import_snapshot(&damaged) {
        Ok(_) => println!("damaged copy accepted?!"),
        Err(e) => println!("damaged copy rejected: {e}"),
    }
    Ok(())
}
