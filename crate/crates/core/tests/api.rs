mod common;

use atlas::model::{
    DateSpan, Extent, ExtentUnit, Location, RecordDraft, RecordFields, RepositoryType, Tier, VisibilityPolicy,
};
use atlas::store::{export_snapshot, Catalog, CatalogOptions};
use axum::http::{Method, StatusCode};
use common::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

fn draft(title: &str, tier: Tier) -> RecordDraft {
    RecordDraft::new(RecordFields {
        title: title.into(),
        description: Some(format!("{title} description")),
        repository_name: Some("Lakeside University Library".into()),
        repository_type: RepositoryType::University,
        location: Location {
            city: Some("Dubuque".into()),
            region: Some("IA".into()),
        },
        owner_contact: Some("keeper@lakeside.example".into()),
        genres: vec!["jazz".into()],
        notes: Some("notes mention saxophone".into()),
        date_span: Some(DateSpan {
            begin_year: 1938,
            end_year: 1941,
            approximate: false,
        }),
        visibility: VisibilityPolicy::tier(tier),
        ..Default::default()
    })
}

fn form(title: &str) -> Value {
    json!({
        "title": title,
        "repository_name": "Harbor Historical Society",
        "description": "Home recordings of a local dance band.",
        "genres": ["Jazz"],
        "date_span": "1940-1945",
        "owner_contact": "owner@harbor.example",
        "requested_tier": "public",
        "submitter": {"name": "Ada Byrne", "email": "ada@harbor.example"}
    })
}

/// public, limited, restricted and a tombstoned public record.
fn fixture() -> (axum::Router, Vec<String>) {
    let (catalog, ids) = catalog_with(vec![
        draft("Open Jazz Discs", Tier::Public),
        draft("Limited Jazz Reels", Tier::Limited),
        draft("Secret Jazz Tapes", Tier::Restricted),
        draft("Withdrawn Jazz Acetates", Tier::Public),
    ]);
    catalog.tombstone(&ids[3], &atlas::store::Principal::curator("mara")).unwrap();
    (app(catalog), ids)
}

#[tokio::test]
async fn hidden_and_unknown_ids_are_indistinguishable() {
    let (app, ids) = fixture();
    let unknown = get(&app, "/api/v1/collections/ffffffffffffffff", None).await;
    let restricted = get(&app, &format!("/api/v1/collections/{}", ids[2]), None).await;
    let tombstoned = get(&app, &format!("/api/v1/collections/{}", ids[3]), None).await;
    assert_eq!(unknown.status, StatusCode::NOT_FOUND);
    assert_eq!(restricted.status, StatusCode::NOT_FOUND);
    assert_eq!(tombstoned.status, StatusCode::NOT_FOUND);
    assert_eq!(restricted.body, unknown.body);
    assert_eq!(tombstoned.body, unknown.body);
    assert_eq!(unknown.json(), json!({"code": "not_found", "message": "no such collection"}));
}

#[tokio::test]
async fn limited_record_shows_four_fields_and_tier() {
    let (app, ids) = fixture();
    let reply = get(&app, &format!("/api/v1/collections/{}", ids[1]), None).await;
    assert_eq!(reply.status, StatusCode::OK);
    let body = reply.json();
    let mut keys: Vec<&str> = body.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, vec!["description", "id", "repository_name", "tier", "title"]);
    assert!(!reply.text().contains("keeper@lakeside.example"));
}

#[tokio::test]
async fn curator_sees_restricted_in_full() {
    let (app, ids) = fixture();
    let reply = get(&app, &format!("/api/v1/collections/{}", ids[2]), Some(CURATOR_TOKEN)).await;
    assert_eq!(reply.status, StatusCode::OK);
    let body = reply.json();
    assert_eq!(body["fields"]["owner_contact"], "keeper@lakeside.example");
    assert_eq!(body["history_url"], format!("/api/v1/collections/{}/history", ids[2]));
    let history = get(&app, body["history_url"].as_str().unwrap(), Some(CURATOR_TOKEN)).await;
    assert_eq!(history.json()["entries"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn every_public_document_is_visible_to_curators() {
    let (app, ids) = fixture();
    for id in &ids {
        let public = get(&app, &format!("/api/v1/collections/{id}"), None).await;
        let curator = get(&app, &format!("/api/v1/collections/{id}"), Some(CURATOR_TOKEN)).await;
        if public.status == StatusCode::OK {
            assert_eq!(curator.status, StatusCode::OK);
            let full = curator.json();
            for (field, value) in public.json().as_object().unwrap() {
                let expected = match field.as_str() {
                    "id" => &full["id"],
                    "tier" => &full["fields"]["visibility"]["tier"],
                    other => &full["fields"][other],
                };
                assert_eq!(expected, value, "{field}");
            }
        }
    }
}

#[tokio::test]
async fn auth_errors() {
    let (app, _) = fixture();
    let bad = get(&app, "/api/v1/whoami", Some("nope")).await;
    assert_eq!(bad.status, StatusCode::UNAUTHORIZED);
    assert_eq!(bad.json()["code"], "unauthorized");

    let anon = get(&app, "/api/v1/submissions", None).await;
    assert_eq!(anon.status, StatusCode::UNAUTHORIZED);
    let contributor = get(&app, "/api/v1/submissions", Some(CONTRIBUTOR_TOKEN)).await;
    assert_eq!(contributor.status, StatusCode::FORBIDDEN);

    let me = get(&app, "/api/v1/whoami", Some(CONTRIBUTOR_TOKEN)).await;
    assert_eq!(me.json(), json!({"role": "contributor", "name": "ada"}));
    let me = get(&app, "/api/v1/whoami", None).await;
    assert_eq!(me.json(), json!({"role": "public", "name": null}));
}

#[tokio::test]
async fn submission_lifecycle_over_http() {
    let app = app(Catalog::in_memory(CatalogOptions::default()));

    let created = call(&app, Method::POST, "/api/v1/submissions", Some(CONTRIBUTOR_TOKEN), Some(&form("Harbor Dance Band Discs"))).await;
    assert_eq!(created.status, StatusCode::CREATED, "{}", created.text());
    assert_eq!(created.json()["state"], "pending");
    let sub = created.json()["submission_id"].as_str().unwrap().to_string();

    let approve_uri = format!("/api/v1/submissions/{sub}/approve");
    let denied = call(&app, Method::POST, &approve_uri, Some(CONTRIBUTOR_TOKEN), Some(&json!({}))).await;
    assert_eq!(denied.status, StatusCode::FORBIDDEN);
    let anonymous = call(&app, Method::POST, &approve_uri, None, Some(&json!({}))).await;
    assert_eq!(anonymous.status, StatusCode::UNAUTHORIZED);

    let pending = get(&app, "/api/v1/submissions?state=pending", Some(CURATOR_TOKEN)).await;
    assert_eq!(pending.json()["submissions"].as_array().unwrap().len(), 1);

    let approved = call(&app, Method::POST, &approve_uri, Some(CURATOR_TOKEN), Some(&json!({"tier": "public"}))).await;
    assert_eq!(approved.status, StatusCode::OK, "{}", approved.text());
    let id = approved.json()["id"].as_str().unwrap().to_string();

    let again = call(&app, Method::POST, &approve_uri, Some(CURATOR_TOKEN), Some(&json!({}))).await;
    assert_eq!(again.status, StatusCode::CONFLICT);

    let found = get(&app, "/api/v1/search?q=harbor+dance", None).await.json();
    assert_eq!(found["total_hits"], 1);
    assert_eq!(found["hits"][0]["id"], id);

    let patch = json!({"notes": "includes a clarinet solo"});
    let amended = call(&app, Method::PATCH, &format!("/api/v1/collections/{id}"), Some(CURATOR_TOKEN), Some(&patch)).await;
    assert_eq!(amended.status, StatusCode::OK, "{}", amended.text());
    assert_eq!(amended.json()["revision"], 2);
    assert_eq!(get(&app, "/api/v1/search?q=clarinet", None).await.json()["total_hits"], 1);

    let deleted = call(&app, Method::DELETE, &format!("/api/v1/collections/{id}"), Some(CURATOR_TOKEN), None).await;
    assert_eq!(deleted.status, StatusCode::OK);
    assert_eq!(get(&app, &format!("/api/v1/collections/{id}"), None).await.status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, "/api/v1/search?q=clarinet", None).await.json()["total_hits"], 0);

    let history = get(&app, &format!("/api/v1/collections/{id}/history"), Some(CURATOR_TOKEN)).await.json();
    let revisions: Vec<u64> = history["entries"].as_array().unwrap().iter().map(|e| e["revision"].as_u64().unwrap()).collect();
    assert_eq!(revisions, vec![1, 2, 3]);
}

#[tokio::test]
async fn invalid_submissions_get_field_reasons() {
    let app = app(Catalog::in_memory(CatalogOptions::default()));
    let mut doc = form("x");
    doc.as_object_mut().unwrap().remove("title");
    let reply = call(&app, Method::POST, "/api/v1/submissions", None, Some(&doc)).await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(reply.json()["fields"]["title"], "required");

    let mut doc = form("Empty repository");
    doc["repository_name"] = json!("");
    let reply = call(&app, Method::POST, "/api/v1/submissions", None, Some(&doc)).await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(reply.json()["fields"]["repository_name"], "required_for_tier");

    let reply = call(&app, Method::POST, "/api/v1/submissions", None, None).await;
    assert_eq!(reply.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn duplicates_reach_curators_only() {
    let (catalog, _) = catalog_with(vec![{
        let mut d = draft("Harbor Dance Band Discs", Tier::Public);
        d.fields.repository_name = Some("Harbor Historical Society".into());
        d
    }]);
    let app = app(catalog);
    let created = call(&app, Method::POST, "/api/v1/submissions", Some(CONTRIBUTOR_TOKEN), Some(&form("Harbor Dance Band Discs, 1940-1945"))).await;
    assert_eq!(created.status, StatusCode::CREATED);
    let sub = created.json()["submission_id"].as_str().unwrap().to_string();
    let curator = get(&app, &format!("/api/v1/submissions/{sub}"), Some(CURATOR_TOKEN)).await.json();
    assert_eq!(curator["duplicates"].as_array().unwrap().len(), 1);
    let own = get(&app, &format!("/api/v1/submissions/{sub}"), Some(CONTRIBUTOR_TOKEN)).await.json();
    assert!(own.get("duplicates").is_none());
    assert_eq!(own["submission_id"], sub);
}

#[tokio::test]
async fn restricted_approval_stays_out_of_public_figures() {
    let app = app(Catalog::in_memory(CatalogOptions::default()));
    let created = call(&app, Method::POST, "/api/v1/submissions", None, Some(&form("Quiet Harbor Reels"))).await;
    let sub = created.json()["submission_id"].as_str().unwrap().to_string();
    let approved = call(
        &app,
        Method::POST,
        &format!("/api/v1/submissions/{sub}/approve"),
        Some(CURATOR_TOKEN),
        Some(&json!({"tier": "restricted"})),
    )
    .await;
    assert_eq!(approved.status, StatusCode::OK);
    assert_eq!(get(&app, "/api/v1/search?q=quiet", None).await.json()["total_hits"], 0);
    assert_eq!(get(&app, "/api/v1/stats", None).await.json()["total_collections"], 0);
}

#[tokio::test]
async fn reject_needs_a_reason() {
    let app = app(Catalog::in_memory(CatalogOptions::default()));
    let created = call(&app, Method::POST, "/api/v1/submissions", None, Some(&form("Rejected Reels"))).await;
    let sub = created.json()["submission_id"].as_str().unwrap().to_string();
    let uri = format!("/api/v1/submissions/{sub}/reject");
    let empty = call(&app, Method::POST, &uri, Some(CURATOR_TOKEN), Some(&json!({"reason": " "}))).await;
    assert_eq!(empty.status, StatusCode::UNPROCESSABLE_ENTITY);
    let ok = call(&app, Method::POST, &uri, Some(CURATOR_TOKEN), Some(&json!({"reason": "out of scope"}))).await;
    assert_eq!(ok.json()["state"], "rejected");
    let twice = call(&app, Method::POST, &uri, Some(CURATOR_TOKEN), Some(&json!({"reason": "again"}))).await;
    assert_eq!(twice.status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn search_parameters() {
    let (app, ids) = fixture();
    let all = get(&app, "/api/v1/search", None).await;
    assert_eq!(all.status, StatusCode::OK);
    let body = all.json();
    assert_eq!(body["total_hits"], 2);
    assert_eq!(body["page"], 1);
    assert_eq!(body["facet_counts"].as_object().unwrap().len(), 8);

    let bogus = get(&app, "/api/v1/search?facet.bogus=x", None).await;
    assert_eq!(bogus.status, StatusCode::BAD_REQUEST);
    assert_eq!(bogus.json()["code"], "unknown_facet");
    assert_eq!(get(&app, "/api/v1/search?page_size=101", None).await.status, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, "/api/v1/search?page=0", None).await.status, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, "/api/v1/search?colour=red", None).await.status, StatusCode::BAD_REQUEST);

    // the hidden genre of the limited record is not searchable or counted
    let jazz = get(&app, "/api/v1/search?facet.genre=jazz", None).await.json();
    assert_eq!(jazz["total_hits"], 1);
    assert_eq!(jazz["hits"][0]["id"], ids[0]);
    let saxophone = get(&app, "/api/v1/search?q=saxophone", None).await.json();
    assert_eq!(saxophone["total_hits"], 1);

    let both = get(&app, &format!("/api/v1/search?q=jazz&facet.decade={}&facet.decade=1990s", enc("1930s")), None).await.json();
    assert_eq!(both["total_hits"], 1);
}

#[tokio::test]
async fn stats_examples() {
    let empty = app(Catalog::in_memory(CatalogOptions::default()));
    assert_eq!(
        get(&empty, "/api/v1/stats", None).await.json(),
        json!({"total_collections": 0, "by_repository_type": {}, "by_region": {}, "estimated_total_recordings": 0})
    );

    let mut drafts: Vec<RecordDraft> = (0..3).map(|i| draft(&format!("Public {i}"), Tier::Public)).collect();
    drafts.push(draft("Hidden", Tier::Restricted));
    drafts[0].fields.extent = Some(Extent { count: 1000, unit: ExtentUnit::Recordings });
    drafts[1].fields.extent = Some(Extent { count: 500, unit: ExtentUnit::Recordings });
    drafts[2].fields.extent = Some(Extent { count: 40, unit: ExtentUnit::Hours });
    drafts[3].fields.extent = Some(Extent { count: 9000, unit: ExtentUnit::Recordings });
    let (catalog, _) = catalog_with(drafts);
    let stats = get(&app(catalog), "/api/v1/stats", None).await.json();
    assert_eq!(stats["total_collections"], 3);
    assert_eq!(stats["estimated_total_recordings"], 1500);
    assert_eq!(stats["by_repository_type"]["university"], 3);
    assert_eq!(stats["by_region"]["IA"], 3);
}

#[tokio::test]
async fn snapshot_is_content_addressed() {
    let (catalog, ids) = catalog_with(vec![draft("Snapshot Discs", Tier::Public), draft("Snapshot Reels", Tier::Limited)]);
    let expected = export_snapshot(&catalog.view());
    let app = app(catalog);

    let first = get(&app, "/api/v1/snapshot/latest", None).await;
    assert_eq!(first.status, StatusCode::OK);
    assert_eq!(first.body, expected);
    let digest = hex::encode(Sha256::digest(&first.body));
    assert_eq!(first.header("x-content-sha256"), Some(digest.as_str()));
    assert_eq!(first.header("etag"), Some(format!("\"{digest}\"").as_str()));

    let second = get(&app, "/api/v1/snapshot/latest", None).await;
    assert_eq!(second.body, first.body);

    let request = axum::http::Request::builder()
        .uri("/api/v1/snapshot/latest")
        .header("if-none-match", format!("\"{digest}\""))
        .body(axum::body::Body::empty())
        .unwrap();
    let not_modified = tower::ServiceExt::oneshot(app.clone(), request).await.unwrap();
    assert_eq!(not_modified.status(), StatusCode::NOT_MODIFIED);

    let patch = json!({"notes": "changed"});
    call(&app, Method::PATCH, &format!("/api/v1/collections/{}", ids[0]), Some(CURATOR_TOKEN), Some(&patch)).await;
    let third = get(&app, "/api/v1/snapshot/latest", None).await;
    assert_ne!(third.header("x-content-sha256"), Some(digest.as_str()));
}

#[tokio::test]
async fn unknown_route_is_json() {
    let app = app(Catalog::in_memory(CatalogOptions::default()));
    let reply = get(&app, "/api/v2/anything", None).await;
    assert_eq!(reply.status, StatusCode::NOT_FOUND);
    assert_eq!(reply.json()["code"], "not_found");
}
