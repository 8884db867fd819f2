//! JSON family files.
//!
//! ```json
//! {
//!   "field": "C",
//!   "n": 2,
//!   "points": [
//!     { "weight": 1.0, "value": [[0.5, -1.0], [2.0, 0.0]] }
//!   ],
//!   "meta": { "label": "example", "tail_bound": 0.0 }
//! }
//! ```
//!
//! Real families (`"field": "R"`) store each value as a list of `n` numbers;
//! complex families store `[re, im]` pairs. Numbers are written in shortest
//! round-trip form, so write-then-read reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use cframe::{Family, FamilyMeta, Field, C};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed family file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid family file: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> FileError {
    FileError::Invalid(msg.into())
}

fn number(v: &Value, what: impl Fn() -> String) -> Result<f64, FileError> {
    let x = v.as_f64().ok_or_else(|| invalid(format!("{} is not a number", what())))?;
    if !x.is_finite() {
        return Err(invalid(format!("{} is not finite", what())));
    }
    Ok(x)
}

/// Parses a family from JSON text.
pub fn parse_family(text: &str) -> Result<Family, FileError> {
    let doc: Value = serde_json::from_str(text)?;
    let obj = doc.as_object().ok_or_else(|| invalid("top level must be an object"))?;

    let field = match obj.get("field").and_then(Value::as_str) {
        Some("R") => Field::Real,
        Some("C") => Field::Complex,
        Some(other) => return Err(invalid(format!("field must be \"R\" or \"C\", got {other:?}"))),
        None => return Err(invalid("missing string field \"field\"")),
    };
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .filter(|&n| n > 0)
        .ok_or_else(|| invalid("\"n\" must be a positive integer"))? as usize;
    let points = obj
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("missing array \"points\""))?;
    if points.is_empty() {
        return Err(invalid("\"points\" is empty"));
    }

    let mut weights = Vec::with_capacity(points.len());
    let mut vectors = Vec::with_capacity(points.len());
    for (j, p) in points.iter().enumerate() {
        let weight = p
            .get("weight")
            .ok_or_else(|| invalid(format!("point {j}: missing \"weight\"")))?;
        let weight = number(weight, || format!("point {j}: weight"))?;
        if weight < 0.0 {
            return Err(invalid(format!("point {j}: negative weight {weight}")));
        }
        let value = p
            .get("value")
            .and_then(Value::as_array)
            .ok_or_else(|| invalid(format!("point {j}: missing array \"value\"")))?;
        if value.len() != n {
            return Err(invalid(format!(
                "point {j}: value has {} entries, expected n = {n}",
                value.len()
            )));
        }
        let vector = value
            .iter()
            .enumerate()
            .map(|(k, entry)| match field {
                Field::Real => number(entry, || format!("point {j}: entry {k}")).map(|x| C::new(x, 0.0)),
                Field::Complex => {
                    let pair = entry
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| invalid(format!("point {j}: entry {k} must be a [re, im] pair")))?;
                    Ok(C::new(
                        number(&pair[0], || format!("point {j}: entry {k} real part"))?,
                        number(&pair[1], || format!("point {j}: entry {k} imaginary part"))?,
                    ))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        weights.push(weight);
        vectors.push(vector);
    }

    let mut meta = FamilyMeta::default();
    if let Some(m) = obj.get("meta").filter(|m| !m.is_null()) {
        let m = m.as_object().ok_or_else(|| invalid("\"meta\" must be an object"))?;
        meta.label = m.get("label").and_then(Value::as_str).map(str::to_owned);
        if let Some(t) = m.get("tail_bound").filter(|t| !t.is_null()) {
            let t = number(t, || "meta.tail_bound".to_owned())?;
            if t < 0.0 {
                return Err(invalid("meta.tail_bound must be nonnegative"));
            }
            meta.tail_bound = Some(t);
        }
    }

    Family::new(field, n, weights, vectors)
        .map(|f| f.with_meta(meta))
        .map_err(|e| invalid(e.to_string()))
}

pub fn family_to_json(fam: &Family) -> Value {
    let points: Vec<Value> = fam
        .points()
        .map(|(w, v)| {
            let value: Vec<Value> = match fam.field() {
                Field::Real => v.iter().map(|z| json!(z.re)).collect(),
                Field::Complex => v.iter().map(|z| json!([z.re, z.im])).collect(),
            };
            json!({ "weight": w, "value": value })
        })
        .collect();
    let mut obj = Map::new();
    obj.insert(
        "field".into(),
        json!(match fam.field() {
            Field::Real => "R",
            Field::Complex => "C",
        }),
    );
    obj.insert("n".into(), json!(fam.dim()));
    obj.insert("points".into(), Value::Array(points));
    let meta = fam.meta();
    if meta.label.is_some() || meta.tail_bound.is_some() {
        let mut m = Map::new();
        if let Some(label) = &meta.label {
            m.insert("label".into(), json!(label));
        }
        if let Some(t) = meta.tail_bound {
            m.insert("tail_bound".into(), json!(t));
        }
        obj.insert("meta".into(), Value::Object(m));
    }
    Value::Object(obj)
}

pub fn format_family(fam: &Family) -> String {
    let mut s = serde_json::to_string_pretty(&family_to_json(fam)).expect("family serializes");
    s.push('\n');
    s
}

pub fn read_family(path: &Path) -> Result<Family, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_family(&text)
}

pub fn write_family(fam: &Family, path: &Path) -> Result<(), FileError> {
    fs::write(path, format_family(fam)).map_err(|source| FileError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cframe::generators::{dirichlet_example, random_family};
    use proptest::prelude::*;

    fn any_finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e3..1e3f64,
            proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO,
        ]
    }

    proptest! {
        #[test]
        fn write_then_read_is_bit_exact(
            (n, field, pts) in (1usize..=3, any::<bool>()).prop_flat_map(|(n, complex)| {
                let point = (0.0..1e6f64, proptest::collection::vec((any_finite(), any_finite()), n));
                (Just(n), Just(complex), proptest::collection::vec(point, 1..6))
            })
        ) {
            let field = if field { Field::Complex } else { Field::Real };
            let mut weights: Vec<f64> = pts.iter().map(|p| p.0).collect();
            weights[0] = weights[0].max(1.0);
            let vectors = pts
                .iter()
                .map(|p| p.1.iter().map(|&(re, im)| C::new(re, if field == Field::Complex { im } else { 0.0 })).collect())
                .collect();
            let fam = Family::new(field, n, weights, vectors).unwrap();
            let back = parse_family(&format_family(&fam)).unwrap();
            for (a, b) in fam.points().zip(back.points()) {
                prop_assert_eq!(a.0.to_bits(), b.0.to_bits());
                for (x, y) in a.1.iter().zip(b.1) {
                    prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                    prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
                }
            }
        }
    }

    #[test]
    fn round_trip_random_complex() {
        let fam = random_family::<f64>(5, 3, Field::Complex, 7).unwrap();
        let back = parse_family(&format_family(&fam)).unwrap();
        assert_eq!(back, fam);
    }

    #[test]
    fn round_trip_keeps_meta() {
        let fam = dirichlet_example::<f64>(0.5, 0.0, 10).unwrap();
        let back = parse_family(&format_family(&fam)).unwrap();
        assert_eq!(back, fam);
        assert_eq!(back.meta().tail_bound, Some(0.2));
    }

    #[test]
    fn rejects_negative_weight() {
        let text = r#"{"field":"R","n":1,"points":[{"weight":1,"value":[1]},{"weight":-1,"value":[2]}]}"#;
        let err = parse_family(text).unwrap_err().to_string();
        assert!(err.contains("point 1") && err.contains("negative weight"), "{err}");
    }

    #[test]
    fn rejects_scalar_in_complex_family() {
        let text = r#"{"field":"C","n":2,"points":[{"weight":1,"value":[[1,0],3]}]}"#;
        let err = parse_family(text).unwrap_err().to_string();
        assert!(err.contains("point 0: entry 1 must be a [re, im] pair"), "{err}");
    }

    #[test]
    fn rejects_structural_errors() {
        for (text, needle) in [
            (r#"{"field":"Q","n":1,"points":[]}"#, "field must be"),
            (r#"{"field":"R","n":0,"points":[]}"#, "positive integer"),
            (r#"{"field":"R","n":2,"points":[{"weight":1,"value":[1]}]}"#, "expected n = 2"),
            (r#"{"field":"R","n":1,"points":[{"weight":0,"value":[1]}]}"#, "all weights are zero"),
            (r#"{"field":"R","n":1,"points":[{"weight":1,"value":["x"]}]}"#, "not a number"),
            (r#"{"field":"R","n":1,"points":[{"weight":1,"value":[1e999]}]}"#, "malformed"),
            (r#"[1, 2]"#, "object"),
        ] {
            let err = parse_family(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text}: {err}");
        }
    }
}
