//! JSON instance and solution files.
//!
//! ```text
//! {"sense":"packing","k":1,"n":2,"A":[[2,3]],"b":[4],"c":[1,"1/2"],"d":[1,"inf"]}
//! {"x":[1,0],"value":"1"}
//! ```

use num::Signed;
use serde_json::{json, Map, Value};

use super::{Bound, IntegralSolution, KnapsackInstance, Sense};
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::format(key, "missing field"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::format(path, "expected an array"))
}

fn nonneg_int(v: &Value, path: &str, what: &str) -> Result<u64> {
    if let Some(u) = v.as_u64() {
        return Ok(u);
    }
    if v.as_i64().is_some_and(|i| i < 0) || v.as_f64().is_some_and(|f| f < 0.0) {
        return Err(Error::format(path, format!("negative {what}")));
    }
    Err(Error::format(path, "expected a non-negative integer"))
}

fn count(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    let v = field(obj, key)?;
    Ok(nonneg_int(v, key, "count")? as usize)
}

fn cost(v: &Value, path: &str) -> Result<Rational> {
    let q = match v {
        Value::Number(_) => {
            if v.as_i64().is_some_and(|i| i < 0) {
                return Err(Error::format(path, "negative cost"));
            }
            int(v
                .as_u64()
                .ok_or_else(|| Error::format(path, "expected an integer or \"p/q\""))?)
        }
        Value::String(s) => rational::parse(s)
            .ok_or_else(|| Error::format(path, format!("malformed rational {s:?}")))?,
        _ => return Err(Error::format(path, "expected an integer or \"p/q\"")),
    };
    if q.is_negative() {
        return Err(Error::format(path, "negative cost"));
    }
    Ok(q)
}

fn bound(v: &Value, path: &str) -> Result<Bound> {
    match v {
        Value::String(s) if s == "inf" => Ok(Bound::Infinite),
        Value::String(s) => Err(Error::format(path, format!("unknown bound {s:?}"))),
        _ => nonneg_int(v, path, "bound").map(Bound::Finite),
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(doc: &str) -> Result<KnapsackInstance> {
    let root: Value =
        serde_json::from_str(doc).map_err(|e| Error::format("$", format!("malformed JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::format("$", "expected an object"))?;

    let sense = match field(obj, "sense")?.as_str() {
        Some("packing") => Sense::Packing,
        Some("covering") => Sense::Covering,
        _ => return Err(Error::format("sense", "expected \"packing\" or \"covering\"")),
    };
    let k = count(obj, "k")?;
    let n = count(obj, "n")?;

    let rows = array(field(obj, "A")?, "A")?;
    if rows.len() != k {
        return Err(Error::format("A", format!("dimension mismatch: {} rows, k = {k}", rows.len())));
    }
    let mut a = Vec::with_capacity(k);
    for (j, row) in rows.iter().enumerate() {
        let path = format!("A[{j}]");
        let row = array(row, &path)?;
        if row.len() != n {
            return Err(Error::format(path, format!("dimension mismatch: {} entries, n = {n}", row.len())));
        }
        a.push(
            row.iter()
                .enumerate()
                .map(|(i, v)| nonneg_int(v, &format!("A[{j}][{i}]"), "weight"))
                .collect::<Result<Vec<_>>>()?,
        );
    }

    let b_vals = array(field(obj, "b")?, "b")?;
    if b_vals.len() != k {
        return Err(Error::format("b", format!("dimension mismatch: {} entries, k = {k}", b_vals.len())));
    }
    let b = b_vals
        .iter()
        .enumerate()
        .map(|(j, v)| nonneg_int(v, &format!("b[{j}]"), "limit"))
        .collect::<Result<Vec<_>>>()?;

    let c_vals = array(field(obj, "c")?, "c")?;
    if c_vals.len() != n {
        return Err(Error::format("c", format!("dimension mismatch: {} entries, n = {n}", c_vals.len())));
    }
    let c = c_vals
        .iter()
        .enumerate()
        .map(|(i, v)| cost(v, &format!("c[{i}]")))
        .collect::<Result<Vec<_>>>()?;

    let d_vals = array(field(obj, "d")?, "d")?;
    if d_vals.len() != n {
        return Err(Error::format("d", format!("dimension mismatch: {} entries, n = {n}", d_vals.len())));
    }
    let d = d_vals
        .iter()
        .enumerate()
        .map(|(i, v)| bound(v, &format!("d[{i}]")))
        .collect::<Result<Vec<_>>>()?;

    KnapsackInstance::new(sense, a, b, c, d)
}

fn cost_value(q: &Rational) -> Value {
    match (q.is_integer(), num::ToPrimitive::to_u64(q.numer())) {
        (true, Some(v)) => json!(v),
        _ => json!(rational::render(q)),
    }
}

pub fn instance_value(inst: &KnapsackInstance) -> Value {
    json!({
        "sense": inst.sense().to_string(),
        "k": inst.k(),
        "n": inst.n(),
        "A": inst.a(),
        "b": inst.b(),
        "c": inst.c().iter().map(cost_value).collect::<Vec<_>>(),
        "d": inst.d().iter().map(|d| match d {
            Bound::Finite(v) => json!(v),
            Bound::Infinite => json!("inf"),
        }).collect::<Vec<_>>(),
    })
}

/// Compact single-line JSON with a fixed key order.
pub fn serialize_instance(inst: &KnapsackInstance) -> String {
    instance_value(inst).to_string()
}

pub fn solution_value(s: &IntegralSolution) -> Value {
    json!({ "x": s.x, "value": rational::render(&s.value) })
}

pub fn serialize_solution(s: &IntegralSolution) -> String {
    solution_value(s).to_string()
}

pub fn parse_solution(doc: &str) -> Result<IntegralSolution> {
    let root: Value =
        serde_json::from_str(doc).map_err(|e| Error::format("$", format!("malformed JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::format("$", "expected an object"))?;
    let x = array(field(obj, "x")?, "x")?
        .iter()
        .enumerate()
        .map(|(i, v)| nonneg_int(v, &format!("x[{i}]"), "entry"))
        .collect::<Result<Vec<_>>>()?;
    let value = field(obj, "value")?
        .as_str()
        .and_then(rational::parse)
        .ok_or_else(|| Error::format("value", "expected \"p/q\""))?;
    Ok(IntegralSolution { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn parses_running_example() {
        let doc = r#"{"sense":"packing","k":1,"n":2,"A":[[2,3]],"b":[4],"c":[1,1],"d":[1,1]}"#;
        let inst = parse_instance(doc).unwrap();
        assert_eq!(inst.a(), &[vec![2, 3]]);
        assert_eq!(inst.b(), &[4]);
        assert_eq!(inst.c(), &[int(1), int(1)]);
        assert_eq!(inst.d(), &[Bound::Finite(1), Bound::Finite(1)]);
        assert_eq!(serialize_instance(&inst), doc);
    }

    #[test]
    fn negative_weight_is_reported_with_path() {
        let doc = r#"{"sense":"packing","k":1,"n":2,"A":[[2,-1]],"b":[4],"c":[1,1],"d":[1,1]}"#;
        let err = parse_instance(doc).unwrap_err();
        assert_eq!(err, Error::format("A[0][1]", "negative weight"));
        assert!(err.to_string().contains("negative weight"));
    }

    #[test]
    fn infinite_bound_and_rational_cost() {
        let doc = r#"{"sense":"covering","k":1,"n":2,"A":[[2,3]],"b":[4],"c":["3/6",2],"d":["inf",1]}"#;
        let inst = parse_instance(doc).unwrap();
        assert_eq!(inst.d()[0], Bound::Infinite);
        assert_eq!(inst.c()[0], ratio(1, 2));
        let again = parse_instance(&serialize_instance(&inst)).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn dimension_and_shape_errors() {
        let bad_k = r#"{"sense":"packing","k":2,"n":2,"A":[[2,3]],"b":[4],"c":[1,1],"d":[1,1]}"#;
        assert!(matches!(parse_instance(bad_k), Err(Error::Format { path, .. }) if path == "A"));
        let bad_row = r#"{"sense":"packing","k":1,"n":2,"A":[[2]],"b":[4],"c":[1,1],"d":[1,1]}"#;
        assert!(matches!(parse_instance(bad_row), Err(Error::Format { path, .. }) if path == "A[0]"));
        let bad_c = r#"{"sense":"packing","k":1,"n":2,"A":[[2,3]],"b":[4],"c":[1,"-1/2"],"d":[1,1]}"#;
        assert!(matches!(parse_instance(bad_c), Err(Error::Format { path, .. }) if path == "c[1]"));
        let bad_sense = r#"{"sense":"both","k":0,"n":0,"A":[],"b":[],"c":[],"d":[]}"#;
        assert!(parse_instance(bad_sense).is_err());
        assert!(parse_instance("{").is_err());
        let missing = r#"{"sense":"packing","k":0,"n":0,"A":[],"b":[],"c":[]}"#;
        assert!(matches!(parse_instance(missing), Err(Error::Format { path, .. }) if path == "d"));
    }

    #[test]
    fn solution_round_trip() {
        let s = IntegralSolution { x: vec![1, 0, 3], value: ratio(7, 2) };
        let text = serialize_solution(&s);
        assert_eq!(text, r#"{"x":[1,0,3],"value":"7/2"}"#);
        assert_eq!(parse_solution(&text).unwrap(), s);
    }
}
