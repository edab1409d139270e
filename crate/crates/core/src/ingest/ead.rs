//! Collection-level extraction from EAD finding aids.
//!
//! Only `<archdesc>` and its `<did>` are read. Component lists (`<dsc>`,
//! `<c>`, `<c01>`...) are never visited, so a finding aid with or without
//! its container list yields the same fields.

use std::collections::BTreeMap;

use roxmltree::{Document, Node};

use crate::model::{Provenance, SourceKind};

use super::{IncomingSubmission, IngestContext};

#[derive(Debug, thiserror::Error)]
pub enum EadError {
    #[error("input is not UTF-8 text")]
    NotText,
    #[error("not well-formed XML: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("no collection-level description")]
    NoCollectionLevel,
}

fn is(node: &Node<'_, '_>, name: &str) -> bool {
    node.is_element() && node.tag_name().name() == name
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|n| is(n, name))
}

fn children<'a, 'i: 'a>(node: Node<'a, 'i>, name: &'a str) -> impl Iterator<Item = Node<'a, 'i>> + 'a {
    node.children().filter(move |n| is(n, name))
}

/// Descendant text with whitespace collapsed, skipping `<head>` captions.
fn text_of(node: Node<'_, '_>) -> String {
    fn walk(node: Node<'_, '_>, out: &mut String) {
        for n in node.children() {
            if n.is_text() {
                out.push_str(n.text().unwrap_or_default());
                out.push(' ');
            } else if n.is_element() && n.tag_name().name() != "head" {
                walk(n, out);
            }
        }
    }
    let mut raw = String::new();
    walk(node, &mut raw);
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn put(out: &mut BTreeMap<String, String>, key: &str, value: String) {
    if !value.is_empty() {
        out.insert(key.to_string(), value);
    }
}

/// Extracts raw collection-level fields, keyed by raw field name.
pub fn parse_ead_collection(xml: &[u8]) -> Result<BTreeMap<String, String>, EadError> {
    let text = std::str::from_utf8(xml).map_err(|_| EadError::NotText)?;
    let doc = Document::parse(text)?;
    let archdesc = doc
        .descendants()
        .find(|n| is(n, "archdesc"))
        .ok_or(EadError::NoCollectionLevel)?;
    let did = child(archdesc, "did").ok_or(EadError::NoCollectionLevel)?;

    let mut out = BTreeMap::new();
    put(&mut out, "title", child(did, "unittitle").map(text_of).unwrap_or_default());
    put(&mut out, "date_span", child(did, "unitdate").map(text_of).unwrap_or_default());
    let extent = children(did, "physdesc")
        .flat_map(|p| children(p, "extent"))
        .map(text_of)
        .collect::<Vec<_>>()
        .join("; ");
    put(&mut out, "extent", extent);
    if let Some(repo) = child(did, "repository") {
        let name = child(repo, "corpname").map(text_of).unwrap_or_else(|| text_of(repo));
        put(&mut out, "repository_name", name);
    }
    let creators = children(did, "origination")
        .flat_map(|o| o.children().filter(|n| n.is_element()))
        .map(text_of)
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("; ");
    put(&mut out, "creators", creators);
    let languages = children(did, "langmaterial")
        .flat_map(|l| children(l, "language"))
        .map(|l| l.attribute("langcode").map(str::to_string).unwrap_or_else(|| text_of(l)))
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("; ");
    put(&mut out, "languages", languages);

    let section = |name: &str| {
        children(archdesc, name)
            .map(text_of)
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("\n")
    };
    put(&mut out, "description", section("scopecontent"));
    put(&mut out, "access_statement", section("accessrestrict"));
    put(&mut out, "usage_statement", section("userestrict"));
    put(&mut out, "historical_relevance", section("bioghist"));
    let genres = children(archdesc, "controlaccess")
        .flat_map(|c| c.descendants().filter(|n| is(n, "genreform")))
        .map(text_of)
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("; ");
    put(&mut out, "genres", genres);

    let finding_aid_url = doc
        .descendants()
        .find(|n| is(n, "eadid"))
        .and_then(|n| n.attribute("url"))
        .map(str::to_string)
        .unwrap_or_default();
    put(&mut out, "finding_aid_url", finding_aid_url);
    Ok(out)
}

/// Parses an EAD document into a pending submission.
pub fn ingest_ead(xml: &[u8], ctx: &IngestContext<'_>) -> Result<IncomingSubmission, EadError> {
    let raw_fields = parse_ead_collection(xml)?;
    let built = ctx.builder(";").build(&raw_fields);
    let report = ctx.validate(&built.draft);
    Ok(IncomingSubmission {
        raw_fields,
        requested_tier: built.draft.fields.visibility.tier,
        proposed: built.draft,
        report,
        submitter: None,
        source: Provenance {
            source: SourceKind::Ead,
            source_detail: ctx.source_detail.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<ead xmlns="urn:isbn:1-931666-22-9">
  <eadheader><eadid url="https://archives.example/wxyz">wxyz</eadid></eadheader>
  <archdesc level="collection">
    <did>
      <unittitle>WXYZ Transcription Discs</unittitle>
      <unitdate normal="1938/1952">1938-1952</unitdate>
      <physdesc><extent>1,200 recordings</extent></physdesc>
      <repository><corpname>Lakeside University Library</corpname></repository>
      <origination><corpname>WXYZ (Radio station)</corpname></origination>
      <langmaterial><language langcode="eng">English</language></langmaterial>
    </did>
    <scopecontent><head>Scope</head><p>News and   drama
      programs.</p></scopecontent>
    <accessrestrict><p>By appointment.</p></accessrestrict>
    <userestrict><p>Permission required.</p></userestrict>
    <controlaccess><genreform>Radio dramas</genreform></controlaccess>
    COMPONENTS
  </archdesc>
</ead>"#;

    const COMPONENTS: &str = r#"<dsc><c01 level="series"><did><unittitle>Series 1: Dramas</unittitle>
      <unitdate>1940</unitdate></did><scopecontent><p>Inner scope</p></scopecontent>
      <c02><did><unittitle>Disc 1</unittitle></did></c02></c01></dsc>"#;

    #[test]
    fn minimal_collection() {
        let raw = parse_ead_collection(MINIMAL.replace("COMPONENTS", "").as_bytes()).unwrap();
        assert_eq!(raw["title"], "WXYZ Transcription Discs");
        assert_eq!(raw["date_span"], "1938-1952");
        assert_eq!(raw["extent"], "1,200 recordings");
        assert_eq!(raw["repository_name"], "Lakeside University Library");
        assert_eq!(raw["creators"], "WXYZ (Radio station)");
        assert_eq!(raw["languages"], "eng");
        assert_eq!(raw["description"], "News and drama programs.");
        assert_eq!(raw["access_statement"], "By appointment.");
        assert_eq!(raw["usage_statement"], "Permission required.");
        assert_eq!(raw["genres"], "Radio dramas");
        assert_eq!(raw["finding_aid_url"], "https://archives.example/wxyz");
    }

    #[test]
    fn components_are_ignored() {
        let without = parse_ead_collection(MINIMAL.replace("COMPONENTS", "").as_bytes()).unwrap();
        let with = parse_ead_collection(MINIMAL.replace("COMPONENTS", COMPONENTS).as_bytes()).unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_ead_collection(b""), Err(EadError::Xml(_))));
        assert!(matches!(parse_ead_collection(b"title: not xml"), Err(EadError::Xml(_))));
        assert!(matches!(parse_ead_collection(&[0xff, 0xfe, 0x00]), Err(EadError::NotText)));
        assert!(matches!(
            parse_ead_collection(b"<ead><eadheader/></ead>"),
            Err(EadError::NoCollectionLevel)
        ));
    }

    #[test]
    fn builds_a_draft() {
        let vocab = crate::model::Vocabularies::builtin();
        let ctx = IngestContext::new(&vocab, "wxyz.xml");
        let sub = ingest_ead(MINIMAL.replace("COMPONENTS", "").as_bytes(), &ctx).unwrap();
        let f = &sub.proposed.fields;
        assert_eq!(f.title, "WXYZ Transcription Discs");
        assert_eq!(f.date_span.map(|d| (d.begin_year, d.end_year)), Some((1938, 1952)));
        assert_eq!(f.extent.map(|e| e.count), Some(1200));
        assert_eq!(f.languages, vec!["eng"]);
        // "Radio dramas" is no genre term: kept verbatim with an issue
        assert_eq!(f.genres, vec!["Radio dramas"]);
        assert!(sub.report.errors.is_empty(), "{:?}", sub.report);
    }
}
