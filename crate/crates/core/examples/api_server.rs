//! Serves the HTTP API over an in-memory catalog seeded with synthetic
//! records. Stop with Ctrl-C.
//!
//! ```bash
//! cargo run -p atlas --example api_server
//! curl 'http://127.0.0.1:8080/api/v1/search?q=radio&facet.region=IA'
//! curl -H 'Authorization: Bearer curator-token' http://127.0.0.1:8080/api/v1/submissions
//! ```

use atlas::api::{serve, AppState, TokenTable};
use atlas::ingest::{IncomingSubmission, IngestContext};
use atlas::model::Vocabularies;
use atlas::store::{Catalog, CatalogOptions, Principal};
use atlas::synth::Synth;
use tokio::net::TcpListener;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::in_memory(CatalogOptions::default());
    let mut synth = Synth::new(1);
    let curator = Principal::curator("mara");
    let vocab = Vocabularies::builtin();
    let ctx = IngestContext::new(&vocab, "synthetic");
    for n in 0..200 {
        let sub = catalog.submit(IncomingSubmission::from_draft(synth.draft(), &ctx), None)?;
        // Leave a few in the queue for curators to look at.
        if n % 10 != 0 {
            catalog.approve(&sub.submission_id, &curator, None, None)?;
        }
    }

    let tokens = TokenTable::from_json(r#"{"curator-token": {"role": "curator", "name": "mara"}}"#)?;
    let state = AppState::new(catalog, tokens)?;
    let bind = std::env::var("ATLAS_BIND").unwrap_or_else(|_| "127.0.0.1:8080".into());
    let listener = TcpListener::bind(&bind).await?;
    serve(listener, state, |addr| println!("listening on http://{addr}")).await?;
    Ok(())
}
