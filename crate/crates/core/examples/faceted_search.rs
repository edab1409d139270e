//! Builds a BM25 index over synthetic records and runs text and faceted
//! queries.
//!
//! ```bash
//! cargo run -p atlas --example faceted_search
//! ```

use atlas::model::public_view;
use atlas::search::{build_index, SearchQuery};
use atlas::synth::Synth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let views: Vec<_> = Synth::new(11).records(500).iter().filter_map(public_view).collect();
    let index = build_index(views)?;

    let all = index.search(&SearchQuery::default())?;
    println!("{} public records", all.total_hits);
    for (facet, counts) in &all.facet_counts {
        let top: Vec<_> = counts.iter().take(4).map(|c| format!("{} ({})", c.value, c.count)).collect();
        println!("  {facet:<16} {}", top.join(", "));
    }

    let genre = all.facet_counts["genre"][0].value.clone();
    let query = SearchQuery::text("radio").filter("genre", &genre).page(1, 5);
    let result = index.search(&query)?;
    println!("\n\"radio\" in genre {genre:?}: {} hit(s)", result.total_hits);
    for hit in &result.hits {
        println!("  {:.4} {} {:?}", hit.score, hit.id, hit.title);
    }
    Ok(())
}
