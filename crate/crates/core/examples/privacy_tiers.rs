//! What each audience sees of one record under the three sharing tiers and
//! with a per-field override.
//!
//! ```bash
//! cargo run -p atlas --example privacy_tiers
//! ```

use atlas::model::{public_field_names, redact, FieldOverride, Tier, View, Viewer, VisibilityPolicy};
use atlas::synth::Synth;

fn main() {
    let mut record = Synth::new(7).record();
    let policies = [
        VisibilityPolicy::tier(Tier::Public),
        VisibilityPolicy::tier(Tier::Limited),
        VisibilityPolicy::tier(Tier::Restricted),
        {
            let mut p = VisibilityPolicy::tier(Tier::Public);
            p.field_overrides.insert("notes".into(), FieldOverride::Hide);
            p
        },
        {
            let mut p = VisibilityPolicy::tier(Tier::Limited);
            p.field_overrides.insert("genres".into(), FieldOverride::Expose);
            p
        },
    ];

    for policy in policies {
        record.fields.visibility = policy.clone();
        println!("{} {:?}", policy.tier.as_str(), policy.field_overrides);
        println!("  public fields: {:?}", public_field_names(&policy));
        match redact(&record, Viewer::Public) {
            View::Public(view) => println!("  public view:   {}", view.to_canonical_json()),
            View::NotVisible => println!("  public view:   (not visible)"),
            View::Full(_) => unreachable!(),
        }
        let curator_sees = matches!(redact(&record, Viewer::Curator), View::Full(_));
        println!("  curator sees everything: {curator_sees}\n");
    }
}
