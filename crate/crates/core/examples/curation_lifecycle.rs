//! Submission, approval, amendment and tombstoning against an in-memory
//! catalog, with the revision history at the end.
//!
//! ```bash
//! cargo run -p atlas --example curation_lifecycle
//! ```

use atlas::ingest::{ingest_form_submission, IngestContext};
use atlas::model::Vocabularies;
use atlas::search::{IndexHandle, SearchQuery};
use atlas::store::{Catalog, CatalogOptions, Principal};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::in_memory(CatalogOptions::default());
    let vocab = Vocabularies::builtin();
    let ctx = IngestContext::new(&vocab, "web form");
    let curator = Principal::curator("mara");

    let form = json!({
        "title": "WXYZ Transcription Discs",
        "repository_name": "Lakeside University Library",
        "description": "Local news and drama programs.",
        "physical_formats": ["transcription disc"],
        "date_span": "1938-1952",
        "requested_tier": "public",
        "submitter": {"name": "Ada Byrne", "email": "ada@lakeside.example"}
    });
    let sub = catalog.submit(ingest_form_submission(&form, &ctx)?, Some("ada"))?;
    println!("queued {} ({})", sub.submission_id, sub.state.as_str());

    let record = catalog.approve(&sub.submission_id, &curator, None, None)?;
    println!("published {} at revision {}", record.id, record.revision);

    let index = IndexHandle::from_view(&catalog.view())?;
    let hits = index.current().search(&SearchQuery::text("drama"))?;
    println!("search \"drama\": {} hit(s)", hits.total_hits);

    catalog.amend(&record.id, &curator, &json!({"notes": "Includes a 1947 polka marathon."}))?;
    index.rebuild_and_swap(&catalog.view())?;
    let hits = index.current().search(&SearchQuery::text("polka"))?;
    println!("search \"polka\" after amend: {} hit(s)", hits.total_hits);

    catalog.tombstone(&record.id, &curator)?;
    index.rebuild_and_swap(&catalog.view())?;
    let hits = index.current().search(&SearchQuery::text("drama"))?;
    println!("search \"drama\" after tombstone: {} hit(s)", hits.total_hits);

    for entry in catalog.view().history(&record.id).unwrap_or_default() {
        println!("  r{} {:?} by {} at {}", entry.revision, entry.change, entry.author.name, entry.at);
    }
    Ok(())
}
