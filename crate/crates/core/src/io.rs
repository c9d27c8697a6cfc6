//! Map specification files and output metadata.
//!
//! Map files are JSON objects `{"p": [c0, c1, ...], "b": [re, im],
//! "compose": [...]}` with coefficients in ascending degree order. A
//! coefficient is either a number or a `[re, im]` pair. The top-level `p`, `b`
//! pair is the first component and each `compose` entry (an object with its
//! own `p` and `b`) is applied after it. One-dimensional polynomials use the
//! same schema with `b` omitted.

use crate::error::{HenonError, Result};
use crate::linalg::C64;
use crate::map::HenonMap;
use crate::poly::Poly;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

fn parse_complex(v: &Value, what: &str) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(HenonError::InvalidMap(format!("{what}: expected [re, im] numbers"))),
        },
        _ => Err(HenonError::InvalidMap(format!(
            "{what}: expected a number or a [re, im] pair"
        ))),
    }
}

fn parse_coeffs(v: Option<&Value>) -> Result<Vec<C64>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| HenonError::InvalidMap("missing coefficient array \"p\"".into()))?;
    arr.iter()
        .enumerate()
        .map(|(k, c)| parse_complex(c, &format!("p[{k}]")))
        .collect()
}

fn parse_component(obj: &Value) -> Result<(Vec<C64>, C64)> {
    if !obj.is_object() {
        return Err(HenonError::InvalidMap("map component must be an object".into()));
    }
    let p = parse_coeffs(obj.get("p"))?;
    let b = parse_complex(
        obj.get("b")
            .ok_or_else(|| HenonError::InvalidMap("missing Jacobian \"b\"".into()))?,
        "b",
    )?;
    Ok((p, b))
}

pub fn map_from_value(v: &Value) -> Result<HenonMap> {
    let mut parts = vec![parse_component(v)?];
    if let Some(c) = v.get("compose") {
        let arr = c
            .as_array()
            .ok_or_else(|| HenonError::InvalidMap("\"compose\" must be an array".into()))?;
        for item in arr {
            parts.push(parse_component(item)?);
        }
    }
    HenonMap::compose(parts)
}

pub fn map_from_json(text: &str) -> Result<HenonMap> {
    map_from_value(&serde_json::from_str(text)?)
}

pub fn load_map(path: &Path) -> Result<HenonMap> {
    map_from_json(&std::fs::read_to_string(path)?)
}

/// Like [`map_from_json`], but a single component with b = 0 yields the
/// forward-only degenerate map instead of an error.
pub fn forward_map_from_json(text: &str) -> Result<HenonMap> {
    let v: Value = serde_json::from_str(text)?;
    if v.get("compose").is_none() {
        let (p, b) = parse_component(&v)?;
        if b == C64::new(0.0, 0.0) {
            return HenonMap::degenerate(p, b);
        }
    }
    map_from_value(&v)
}

/// One-dimensional polynomial from the map schema; `b` and `compose` are ignored.
pub fn poly_from_json(text: &str) -> Result<Poly> {
    let v: Value = serde_json::from_str(text)?;
    let coeffs = parse_coeffs(v.get("p"))?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(HenonError::InvalidMap("non-finite coefficient".into()));
    }
    Ok(Poly::new(coeffs))
}

fn complex_value(c: C64) -> Value {
    json!([c.re, c.im])
}

fn component_value(p: &Poly, b: C64) -> Value {
    json!({
        "p": p.coeffs().iter().map(|&c| complex_value(c)).collect::<Vec<_>>(),
        "b": complex_value(b),
    })
}

/// Map in the specification schema (round-trips through [`map_from_value`]).
pub fn map_to_value(map: &HenonMap) -> Value {
    let comps = map.components();
    let mut v = component_value(&comps[0].poly, comps[0].b);
    if comps.len() > 1 {
        v["compose"] = Value::Array(comps[1..].iter().map(|c| component_value(&c.poly, c.b)).collect());
    }
    v
}

/// Provenance block attached to every emitted file.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub map: Value,
}

impl Meta {
    pub fn new(command: &str, seed: u64, map: Option<&HenonMap>) -> Self {
        Meta {
            tool: "henonlab",
            version: crate::VERSION,
            command: command.to_string(),
            seed,
            map: map.map(map_to_value).unwrap_or(Value::Null),
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("metadata serializes")
    }

    /// Single-line JSON rendering for comment headers.
    pub fn header_line(&self) -> String {
        serde_json::to_string(self).expect("metadata serializes")
    }
}

/// Writes a CSV file with a `# {meta}` comment line, a column header and rows.
pub fn write_csv(path: &Path, meta: &Meta, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "# {}", meta.header_line())?;
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        writeln!(out, "{}", r.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Binary PPM (P6), row-major RGB triples, metadata in a header comment.
pub fn write_ppm(path: &Path, meta: &Meta, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    if rgb.len() != 3 * width * height {
        return Err(HenonError::InvalidArgument("pixel buffer size mismatch".into()));
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(out, "P6\n# {}\n{} {}\n255\n", meta.header_line(), width, height)?;
    out.write_all(rgb)?;
    out.flush()?;
    Ok(())
}

/// Pretty JSON with the metadata under `"meta"`.
pub fn write_json(path: &Path, meta: &Meta, mut body: Value) -> Result<()> {
    if let Value::Object(m) = &mut body {
        m.insert("meta".into(), meta.to_value());
    }
    std::fs::write(path, serde_json::to_string_pretty(&body)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Point2C;

    #[test]
    fn parses_real_and_complex_coefficients() {
        let f = map_from_json(r#"{"p": [-6, 0, 1], "b": [0.001, 0]}"#).unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.jacobian(), C64::new(0.001, 0.0));
        let g = map_from_json(r#"{"p": [[0.1, 0.2], 0, [1, 0]], "b": 0.3}"#).unwrap();
        assert_eq!(g.components()[0].poly.coeffs()[0], C64::new(0.1, 0.2));
    }

    #[test]
    fn composition_order() {
        let f = map_from_json(
            r#"{"p": [0, 0, 1], "b": 0.3, "compose": [{"p": [-1, 0, 1], "b": [0.5, 0]}]}"#,
        )
        .unwrap();
        assert_eq!(f.degree(), 4);
        let z = Point2C::real(1.0, 1.0);
        let first = f.components()[0].apply(z);
        assert_eq!(f.apply(z).unwrap(), f.components()[1].apply(first));
        let back = map_from_value(&map_to_value(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_malformed() {
        assert!(map_from_json(r#"{"p": [0, 1], "b": 0.3}"#).is_err());
        assert!(map_from_json(r#"{"p": [0, 0, 1]}"#).is_err());
        assert!(map_from_json(r#"{"p": [0, 0, 1], "b": 0}"#).is_err());
        assert!(map_from_json(r#"{"p": [0, 0, "x"], "b": 0.1}"#).is_err());
        assert!(map_from_json(r#"{"p": [0, 0, 1], "b": 0.1"#).is_err());
    }

    #[test]
    fn degenerate_maps_load_forward_only() {
        let f = forward_map_from_json(r#"{"p": [0, 0, 1], "b": 0}"#).unwrap();
        assert!(!f.is_invertible());
        assert!(forward_map_from_json(r#"{"p": [0, 0, 1], "b": 0.2}"#).unwrap().is_invertible());
    }

    #[test]
    fn poly_schema_without_b() {
        let p = poly_from_json(r#"{"p": [-6, 0, 1]}"#).unwrap();
        assert_eq!(p.degree(), 2);
    }
}
