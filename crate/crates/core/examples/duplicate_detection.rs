//! Scores near-duplicate titles and flags likely duplicates in a corpus
//! with planted copies.
//!
//! ```bash
//! cargo run -p atlas --example duplicate_detection
//! ```

use atlas::ingest::{detect_duplicates, pair_score, DedupConfig};
use atlas::synth::Synth;

fn main() {
    let config = DedupConfig::default();
    let pairs = [
        ("WXYZ Transcription Discs", "WXYZ transcription discs, 1938-1952"),
        ("WXYZ Transcription Discs", "Transcription Discs of WXYZ"),
        ("WXYZ Transcription Discs", "KDKA Election Night Reels"),
    ];
    for (a, b) in pairs {
        let c = pair_score(&config, a, Some("Lakeside Library"), b, Some("Lakeside Library"));
        println!("{:.3} {:?} / {:?}", c.score, a, b);
    }

    let corpus = Synth::new(5).dedup_corpus(300, 10);
    println!("\n{} records, {} planted copies", corpus.records.len(), corpus.planted.len());
    for (i, record) in corpus.records.iter().enumerate() {
        for candidate in detect_duplicates(&record.fields, &corpus.records[..i], &config) {
            let planted = corpus.planted.contains(&(record.id.clone(), candidate.existing_id.clone()));
            println!(
                "  {} ~ {} score {:.3} {}",
                record.id,
                candidate.existing_id,
                candidate.score,
                if planted { "planted" } else { "not planted" }
            );
        }
    }
}
