//! Stable JSON form of reports. Field order is fixed by the wire structs;
//! witness maps are sorted by key. Integers beyond 2^53 travel as strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::{Certificate, GlobalReport, Overall, Place, PlaceVerdict, Status, TwistSpec, Witness};

/// The checked-in schema every emitted document satisfies.
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

pub const SCHEMA_VERSION: &str = "1";

/// A report or a set of single-place verdicts. `overall` is present
/// exactly when the document is a full report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub spec: TwistSpec,
    pub verdicts: Vec<PlaceVerdict>,
    pub overall: Option<Overall>,
}

impl From<&GlobalReport> for Document {
    fn from(r: &GlobalReport) -> Self {
        Document { spec: r.spec, verdicts: r.verdicts.clone(), overall: Some(r.overall.clone()) }
    }
}

impl Document {
    pub fn single(spec: TwistSpec, verdicts: Vec<PlaceVerdict>) -> Self {
        Document { spec, verdicts, overall: None }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSpec {
    #[serde(rename = "D")]
    big_d: u64,
    #[serde(rename = "N")]
    big_n: u64,
    d: i64,
    m: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireVerdict {
    place: String,
    status: String,
    clause: String,
    witnesses: BTreeMap<String, Witness>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    schema: String,
    spec: WireSpec,
    verdicts: Vec<WireVerdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    overall: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    fails_at: Option<Vec<String>>,
}

fn to_wire(doc: &Document) -> Wire {
    let s = &doc.spec;
    Wire {
        schema: SCHEMA_VERSION.to_string(),
        spec: WireSpec { big_d: s.big_d, big_n: s.big_n, d: s.d, m: s.m },
        verdicts: doc
            .verdicts
            .iter()
            .map(|v| WireVerdict {
                place: v.place.to_string(),
                status: v.status.as_str().to_string(),
                clause: v.certificate.clause.clone(),
                witnesses: v.certificate.witnesses.clone(),
            })
            .collect(),
        overall: doc.overall.as_ref().map(|o| o.name().to_string()),
        fails_at: match &doc.overall {
            Some(Overall::FailsAt(ps)) => Some(ps.iter().map(Place::to_string).collect()),
            _ => None,
        },
    }
}

/// Pretty-printed, newline-terminated; byte-identical for equal documents.
pub fn emit(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_wire(doc)).expect("wire types always serialize");
    s.push('\n');
    s
}

pub fn emit_report(report: &GlobalReport) -> String {
    emit(&Document::from(report))
}

pub fn parse(text: &str) -> Result<Document> {
    let bad = |m: String| Error::InvalidInput(format!("report JSON: {m}"));
    let w: Wire = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if w.schema != SCHEMA_VERSION {
        return Err(bad(format!("unsupported schema {:?}", w.schema)));
    }
    let spec = TwistSpec::new(w.spec.big_d, w.spec.big_n, w.spec.d, w.spec.m)?;
    let mut verdicts = Vec::with_capacity(w.verdicts.len());
    for v in w.verdicts {
        verdicts.push(PlaceVerdict {
            place: v.place.parse()?,
            status: v.status.parse::<Status>()?,
            certificate: Certificate { clause: v.clause, witnesses: v.witnesses },
        });
    }
    let overall = match (w.overall.as_deref(), w.fails_at) {
        (None, None) => None,
        (Some("EverywhereLocal"), None) => Some(Overall::EverywhereLocal),
        (Some("Undetermined"), None) => Some(Overall::Undetermined),
        (Some("FailsAt"), Some(ps)) => {
            Some(Overall::FailsAt(ps.iter().map(|p| p.parse()).collect::<Result<Vec<Place>>>()?))
        }
        (o, f) => return Err(bad(format!("inconsistent overall {o:?} / fails_at {f:?}"))),
    };
    if let Some(o) = &overall {
        if *o != Overall::from_verdicts(&verdicts) {
            return Err(bad(format!("overall {} disagrees with the verdicts", o.name())));
        }
    }
    Ok(Document { spec, verdicts, overall })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{decide_place, everywhere_local};

    #[test]
    fn report_round_trips() {
        let spec = TwistSpec::new(1, 39, 5, 39).unwrap();
        let doc = Document::from(&everywhere_local(&spec).unwrap());
        let text = emit(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
        assert!(text.contains("\"fails_at\""));
    }

    #[test]
    fn single_place_documents_have_no_overall() {
        let spec = TwistSpec::new(26, 1, -67, 26).unwrap();
        let v = decide_place(&spec, Place::Prime(67)).unwrap();
        let text = emit(&Document::single(spec, vec![v]));
        assert!(!text.contains("overall"));
        let doc = parse(&text).unwrap();
        assert_eq!(doc.verdicts[0].certificate.clause, "Ram.5");
    }

    #[test]
    fn tampered_overall_rejected() {
        let spec = TwistSpec::new(1, 39, 5, 39).unwrap();
        let text = emit_report(&everywhere_local(&spec).unwrap());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let mut v = v;
        v["overall"] = "EverywhereLocal".into();
        v.as_object_mut().unwrap().remove("fails_at");
        assert!(parse(&v.to_string()).is_err());
    }
}
