//! JSON function specs.
//!
//! ```json
//! { "n": 2, "function": { "kind": "multilinear",
//!   "terms": [ { "subset": [1, 2], "coeff": "1/3" } ] } }
//! ```
//! Kinds: `multilinear`, `choquet` (both with `terms`), `pseudo_multilinear`
//! (`terms` and `transforms`), `multiplicative` (`transforms`),
//! `geometric_mean` (`weights`) and `expression` (`expr`, optional `smoothness`).
//! Transforms are `"identity"`, `{"power": c}`,
//! `{"affine": {"intercept": p, "slope": q}}` or `{"tabulated": [[t, y], …]}`.
//! Rationals are strings `"p/q"` or JSON numbers; subsets list 1-based indices
//! in increasing order.

use std::sync::Arc;

use cube_interact::scalar::rational_from_f64;
use cube_interact::{
    BlackBox, FunctionSpec, MultilinearPoly, Rational, SetFunction, Smoothness, SubsetMask,
    Tabulated, Unary, Value,
};
use num_traits::Zero;
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::expr;

#[derive(Debug, Error, PartialEq)]
#[error("{path}: {message}")]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

fn err(path: &str, message: impl Into<String>) -> SpecError {
    SpecError {
        path: path.to_string(),
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Map<String, Json>, path: &str, key: &str) -> Result<&'a Json, SpecError> {
    obj.get(key)
        .ok_or_else(|| err(path, format!("missing field \"{key}\"")))
}

fn object<'a>(v: &'a Json, path: &str) -> Result<&'a Map<String, Json>, SpecError> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn array<'a>(v: &'a Json, path: &str) -> Result<&'a Vec<Json>, SpecError> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn only_fields(obj: &Map<String, Json>, path: &str, allowed: &[&str]) -> Result<(), SpecError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(err(path, format!("unknown field \"{k}\""))),
        None => Ok(()),
    }
}

/// `"p/q"`, `"p"`, or a JSON number (floats convert exactly).
pub fn parse_rational(v: &Json, path: &str) -> Result<Rational, SpecError> {
    match v {
        Json::String(s) => {
            let s = s.trim();
            let (num, den) = match s.split_once('/') {
                Some((p, q)) => (p.trim(), q.trim()),
                None => (s, "1"),
            };
            let num: num_bigint::BigInt = num
                .parse()
                .map_err(|_| err(path, format!("malformed rational \"{s}\"")))?;
            let den: num_bigint::BigInt = den
                .parse()
                .map_err(|_| err(path, format!("malformed rational \"{s}\"")))?;
            if den.is_zero() {
                return Err(err(path, format!("zero denominator in \"{s}\"")));
            }
            Ok(Rational::new(num, den))
        }
        Json::Number(x) => {
            if let Some(i) = x.as_i64() {
                return Ok(Rational::from_integer(i.into()));
            }
            x.as_f64()
                .and_then(rational_from_f64)
                .ok_or_else(|| err(path, "number is not finite"))
        }
        _ => Err(err(
            path,
            "expected a rational string such as \"1/3\" or a number",
        )),
    }
}

fn parse_subset(v: &Json, n: usize, path: &str) -> Result<SubsetMask, SpecError> {
    let items = array(v, path)?;
    let mut indices = Vec::with_capacity(items.len());
    for (j, item) in items.iter().enumerate() {
        let p = format!("{path}[{j}]");
        let i = item
            .as_u64()
            .ok_or_else(|| err(&p, "expected a positive integer index"))? as usize;
        if i == 0 || i > n {
            return Err(err(&p, format!("index {i} is outside 1..{n}")));
        }
        if indices.last().is_some_and(|&last| last >= i) {
            return Err(err(&p, "indices must be strictly increasing"));
        }
        indices.push(i);
    }
    SubsetMask::from_indices(n, &indices).map_err(|e| err(path, e.to_string()))
}

fn parse_terms(
    obj: &Map<String, Json>,
    n: usize,
    path: &str,
) -> Result<Vec<(SubsetMask, Rational)>, SpecError> {
    let p = format!("{path}.terms");
    let items = array(field(obj, path, "terms")?, &p)?;
    let mut out = Vec::with_capacity(items.len());
    for (j, item) in items.iter().enumerate() {
        let tp = format!("{p}[{j}]");
        let term = object(item, &tp)?;
        only_fields(term, &tp, &["subset", "coeff"])?;
        let s = parse_subset(field(term, &tp, "subset")?, n, &format!("{tp}.subset"))?;
        let c = parse_rational(field(term, &tp, "coeff")?, &format!("{tp}.coeff"))?;
        out.push((s, c));
    }
    Ok(out)
}

fn parse_unary(v: &Json, path: &str) -> Result<Unary, SpecError> {
    if v.as_str() == Some("identity") {
        return Ok(Unary::Identity);
    }
    let obj = object(v, path)?;
    if obj.len() != 1 {
        return Err(err(
            path,
            "a transform is \"identity\" or an object with one key",
        ));
    }
    let (key, body) = obj.iter().next().expect("one entry");
    let p = format!("{path}.{key}");
    match key.as_str() {
        "power" => Unary::power(parse_rational(body, &p)?).map_err(|e| err(&p, e.to_string())),
        "affine" => {
            let a = object(body, &p)?;
            only_fields(a, &p, &["intercept", "slope"])?;
            Ok(Unary::Affine {
                intercept: parse_rational(field(a, &p, "intercept")?, &format!("{p}.intercept"))?,
                slope: parse_rational(field(a, &p, "slope")?, &format!("{p}.slope"))?,
            })
        }
        "tabulated" => {
            let knots = array(body, &p)?
                .iter()
                .enumerate()
                .map(|(j, k)| {
                    let kp = format!("{p}[{j}]");
                    match k.as_array().map(Vec::as_slice) {
                        Some([t, y]) => Ok((
                            parse_rational(t, &format!("{kp}[0]"))?,
                            parse_rational(y, &format!("{kp}[1]"))?,
                        )),
                        _ => Err(err(&kp, "a knot is a pair [t, y]")),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            Tabulated::new(knots)
                .map(Unary::Tabulated)
                .map_err(|e| err(&p, e.to_string()))
        }
        other => Err(err(path, format!("unknown transform \"{other}\""))),
    }
}

fn parse_transforms(
    obj: &Map<String, Json>,
    n: usize,
    path: &str,
) -> Result<Vec<Unary>, SpecError> {
    let p = format!("{path}.transforms");
    let items = array(field(obj, path, "transforms")?, &p)?;
    if items.len() != n {
        return Err(err(
            &p,
            format!("expected {n} transforms, got {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(j, t)| parse_unary(t, &format!("{p}[{j}]")))
        .collect()
}

pub fn parse_smoothness(s: &str) -> Option<Smoothness> {
    match s {
        "smooth" => Some(Smoothness::Smooth),
        "lattice" => Some(Smoothness::Lattice),
        "rough" => Some(Smoothness::Rough),
        _ => None,
    }
}

/// Parses a spec document. `smoothness` overrides the hint of expression specs.
pub fn parse_spec(text: &str, smoothness: Option<Smoothness>) -> Result<FunctionSpec, SpecError> {
    let doc: Json =
        serde_json::from_str(text).map_err(|e| err("$", format!("invalid JSON: {e}")))?;
    let root = object(&doc, "$")?;
    let n_value = field(root, "$", "n")?;
    let n = n_value
        .as_u64()
        .filter(|&n| (1..=63).contains(&n))
        .ok_or_else(|| err("$.n", "expected an integer in 1..63"))? as usize;
    let path = "$.function";
    let f = object(field(root, "$", "function")?, path)?;
    let kind = field(f, path, "kind")?
        .as_str()
        .ok_or_else(|| err("$.function.kind", "expected a string"))?;
    let core = |e: cube_interact::Error| err(path, e.to_string());
    match kind {
        "multilinear" => {
            only_fields(f, path, &["kind", "terms"])?;
            let terms = parse_terms(f, n, path)?;
            Ok(FunctionSpec::Multilinear(
                sum_terms(n, terms).map_err(core)?,
            ))
        }
        "choquet" => {
            only_fields(f, path, &["kind", "terms"])?;
            if n > cube_interact::set_function::MAX_DENSE_N {
                return Err(err("$.n", "choquet specs are limited to n <= 24"));
            }
            let mut a = SetFunction::zeros(n).map_err(core)?;
            for (s, c) in parse_terms(f, n, path)? {
                let sum = a.get(s) + c;
                a.set(s, sum);
            }
            Ok(FunctionSpec::Choquet(a))
        }
        "pseudo_multilinear" => {
            only_fields(f, path, &["kind", "terms", "transforms"])?;
            let poly = sum_terms(n, parse_terms(f, n, path)?).map_err(core)?;
            let ts = parse_transforms(f, n, path)?;
            FunctionSpec::pseudo_multilinear(poly, ts).map_err(core)
        }
        "multiplicative" => {
            only_fields(f, path, &["kind", "transforms"])?;
            FunctionSpec::multiplicative(parse_transforms(f, n, path)?).map_err(core)
        }
        "geometric_mean" => {
            only_fields(f, path, &["kind", "weights"])?;
            let p = "$.function.weights";
            let items = array(field(f, path, "weights")?, p)?;
            if items.len() != n {
                return Err(err(p, format!("expected {n} weights, got {}", items.len())));
            }
            let w = items
                .iter()
                .enumerate()
                .map(|(j, v)| parse_rational(v, &format!("{p}[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            FunctionSpec::geometric_mean(w).map_err(|e| err(p, e.to_string()))
        }
        "expression" => {
            only_fields(f, path, &["kind", "expr", "smoothness"])?;
            let src = field(f, path, "expr")?
                .as_str()
                .ok_or_else(|| err("$.function.expr", "expected a string"))?;
            let e = expr::parse(src, n).map_err(|e| err("$.function.expr", e.to_string()))?;
            let declared = match f.get("smoothness") {
                None => None,
                Some(v) => Some(v.as_str().and_then(parse_smoothness).ok_or_else(|| {
                    err(
                        "$.function.smoothness",
                        "expected \"smooth\", \"lattice\" or \"rough\"",
                    )
                })?),
            };
            let hint = smoothness.or(declared).unwrap_or(Smoothness::Rough);
            let support = SubsetMask::new(e.variables(), n).map_err(core)?;
            let e = Arc::new(e);
            let bb = BlackBox::new(n, hint, move |x: &[f64]| e.eval(x))
                .and_then(|b| b.with_support(support))
                .map_err(core)?
                .with_label(src);
            Ok(FunctionSpec::BlackBox(bb))
        }
        other => Err(err("$.function.kind", format!("unknown kind \"{other}\""))),
    }
}

fn sum_terms(
    n: usize,
    terms: Vec<(SubsetMask, Rational)>,
) -> cube_interact::Result<MultilinearPoly<Rational>> {
    let mut p = MultilinearPoly::zero(n)?;
    for (s, c) in terms {
        p.add_term(s, c);
    }
    Ok(p)
}

/// A JSON number for floats, a `"p/q"` string for exact values.
pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Exact(r) => Json::String(cube_interact::scalar::format_rational(r)),
        Value::Approx(x) => json!(x),
    }
}

pub fn subset_json(s: SubsetMask) -> Json {
    json!(s.indices())
}

/// A multilinear spec document for `poly`, readable by [`parse_spec`].
pub fn poly_document(poly: &MultilinearPoly<Value>) -> Map<String, Json> {
    let mut terms: Vec<(SubsetMask, &Value)> = poly.terms().collect();
    terms.sort_by_key(|(s, _)| *s);
    let terms: Vec<Json> = terms
        .into_iter()
        .map(|(s, c)| json!({ "subset": subset_json(s), "coeff": value_json(c) }))
        .collect();
    let mut doc = Map::new();
    doc.insert("n".into(), json!(poly.n()));
    doc.insert(
        "function".into(),
        json!({ "kind": "multilinear", "terms": terms }),
    );
    doc
}
