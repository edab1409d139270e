//! Reads a survey CSV export with a column mapping and prints what each row
//! would put in the curation queue.
//!
//! ```bash
//! cargo run -p atlas --example ingest_survey
//! ```

use atlas::ingest::{ingest_survey_csv, ColumnMapping, IngestContext};
use atlas::model::Vocabularies;

const CSV: &str = include_str!("../fixtures/survey.csv");
const MAPPING: &str = include_str!("../fixtures/mapping.json");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = Vocabularies::builtin();
    let ctx = IngestContext::new(&vocab, "survey.csv");
    let mapping = ColumnMapping::from_json(MAPPING)?;
    let import = ingest_survey_csv(CSV.as_bytes(), &mapping, &ctx)?;

    for sub in &import.submissions {
        let f = &sub.proposed.fields;
        println!("{} ({:?}), requested tier {}", f.title, f.repository_name, sub.requested_tier.as_str());
        println!("  formats: {:?}", f.physical_formats);
        println!("  dates:   {:?}", f.date_span);
        for issue in &sub.proposed.normalization_issues {
            println!("  normalized {} {:?}: {:?}", issue.field, issue.raw_value, issue.action);
        }
        for finding in sub.report.errors.iter().chain(&sub.report.warnings) {
            println!("  {}: {} ({})", finding.field, finding.message, finding.code);
        }
    }
    for issue in &import.issues {
        println!("{}: {} ({})", issue.location, issue.message, issue.code);
    }
    Ok(())
}
