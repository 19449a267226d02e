//! Canonical JSON: object keys sorted, no insignificant whitespace, floats
//! in shortest round-trip form. Equal values always serialize to equal
//! bytes.

use serde_json::{Map, Value};

pub fn canonicalize(value: &Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k.clone(), canonicalize(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.iter().map(canonicalize).collect()),
        other => other.clone(),
    }
}

pub fn to_canonical_bytes(value: &Value) -> Vec<u8> {
    serde_json::to_vec(&canonicalize(value)).expect("json values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted_at_every_level() {
        let v = json!({"b": 1, "a": {"z": [ {"y": 1, "x": 2} ], "c": null}});
        assert_eq!(
            String::from_utf8(to_canonical_bytes(&v)).unwrap(),
            r#"{"a":{"c":null,"z":[{"x":2,"y":1}]},"b":1}"#
        );
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1f64 + 0.2, 1.0 / 3.0, 9.656_854_249_492_38, 1e-300, 0.0] {
            let bytes = to_canonical_bytes(&json!({ "v": x }));
            let back: Value = serde_json::from_slice(&bytes).unwrap();
            assert_eq!(back["v"].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }
}
