use chrono::{TimeZone, Utc};

use super::*;

/// A fully populated, valid record at the given tier.
pub(crate) fn sample_record(tier: Tier) -> CollectionRecord {
    let at = Utc.with_ymd_and_hms(2024, 5, 1, 12, 0, 0).unwrap();
    CollectionRecord {
        id: "00c0ffee00c0ffee".into(),
        fields: RecordFields {
            title: "WXYZ Transcription Discs".into(),
            description: Some("Transcription discs of local news and drama programs.".into()),
            repository_name: Some("Lakeside University Library".into()),
            repository_type: RepositoryType::University,
            location: Location {
                city: Some("Dubuque".into()),
                region: Some("IA".into()),
            },
            owner_contact: Some("curator@lakeside.example".into()),
            accessibility: Accessibility::ByAppointment,
            access_statement: Some("Open to researchers by appointment.".into()),
            usage_statement: Some("Permission required for broadcast.".into()),
            creators: vec!["WXYZ (Radio station : Dubuque, Iowa)".into()],
            date_span: Some(DateSpan {
                begin_year: 1938,
                end_year: 1952,
                approximate: false,
            }),
            content_types: vec!["broadcast recordings".into()],
            physical_formats: vec!["transcription disc".into(), "reel-to-reel tape".into()],
            languages: vec!["eng".into()],
            genres: vec!["news".into(), "drama".into()],
            extent: Some(Extent {
                count: 1200,
                unit: ExtentUnit::Recordings,
            }),
            condition: Condition {
                grade: ConditionGrade::Fair,
                note: Some("Some discs delaminating.".into()),
            },
            finding_aid: FindingAid {
                exists: true,
                url: Some("https://lakeside.example/findingaids/wxyz".into()),
            },
            inventory_description: Some("Box-level inventory.".into()),
            supporting_documentation: Some("Program logs 1940-1950.".into()),
            historical_relevance: Some("Early regional news coverage.".into()),
            notes: Some("Digitization underway.".into()),
            visibility: VisibilityPolicy::tier(tier),
        },
        normalization_issues: Vec::new(),
        provenance: Provenance {
            source: SourceKind::Form,
            source_detail: "test".into(),
        },
        status: RecordStatus::Published,
        revision: 1,
        created_at: at,
        updated_at: at,
        contributor: Some("wxyz-contrib".into()),
    }
}
