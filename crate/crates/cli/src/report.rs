//! JSON report assembly. Object keys are emitted in insertion order, so a
//! fixed construction order gives byte-stable output.

use num_bigint::BigUint;
use polystab_core::polyspaces::{E1Page, Exactness, HomologyTable, PoincareSeries};
use polystab_core::{AbelianGroup, GradedAbelianGroup, Ring};
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

fn torsion_value(t: &BigUint) -> Value {
    match u64::try_from(t) {
        Ok(v) => json!(v),
        Err(_) => json!(t.to_string()),
    }
}

/// `[free_rank, [torsion…]]`.
pub fn group_value(g: &AbelianGroup) -> Value {
    json!([g.free_rank, g.torsion.iter().map(torsion_value).collect::<Vec<_>>()])
}

/// `{"degree": [free_rank, [torsion…]], …}` in increasing degree.
pub fn graded_value(h: &GradedAbelianGroup) -> Value {
    let mut map = Map::new();
    for (degree, g) in h.iter() {
        map.insert(degree.to_string(), group_value(g));
    }
    Value::Object(map)
}

pub fn exactness_value(e: Exactness) -> Value {
    match e {
        Exactness::Complete => json!("complete"),
        Exactness::Through(d) => json!(d),
    }
}

pub fn table_payload(t: &HomologyTable) -> (Value, Value, Vec<String>) {
    (graded_value(&t.groups), exactness_value(t.exactness), t.notes.clone())
}

/// `[[k, s, [free_rank, [torsion…]]], …]` in `(k, s)` order.
pub fn e1_value(page: &E1Page) -> Value {
    Value::Array(page.entries().map(|((k, s), g)| json!([k, s, group_value(g)])).collect())
}

pub fn series_value(s: &PoincareSeries) -> Value {
    json!(s.coefficients)
}

/// The top-level document.
pub fn document(command: &str, parameters: Value, result: Value, exactness: Value, notes: Vec<String>) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(command));
    map.insert("parameters".into(), parameters);
    map.insert("result".into(), result);
    map.insert("exactness_bound".into(), exactness);
    map.insert("notes".into(), json!(notes));
    Value::Object(map)
}

pub fn error_document(kind: &str, message: &str) -> Value {
    let mut err = Map::new();
    err.insert("kind".into(), json!(kind));
    err.insert("message".into(), json!(message));
    let mut map = Map::new();
    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    map.insert("error".into(), Value::Object(err));
    Value::Object(map)
}

/// Human-readable homology listing, one degree per line. Over a field only
/// the dimension is meaningful, so it is printed instead of a group.
pub fn graded_text(h: &GradedAbelianGroup, ring: Ring) -> String {
    if h.is_zero() {
        return "  (zero)\n".into();
    }
    h.iter()
        .map(|(d, g)| match ring {
            Ring::Integers => format!("  H_{d:<3} = {g}\n"),
            _ => format!("  dim H_{d:<3} = {}\n", g.free_rank),
        })
        .collect()
}
