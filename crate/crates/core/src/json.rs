//! JSON interchange formats. Indices are 1-based and rationals are strings
//! (`"p"` or `"p/q"`); parsers also accept JSON integers.
//!
//! Algebra: `{"name", "dim", "binary": [[i, j, [c…]]…], "ternary": [[i, j, k, [c…]]…]}`
//! with `i < j` in both lists and omitted entries zero.
//!
//! Representation: `{"e", "rho": [M…], "D": [[M…]…], "theta": [[M…]…]}` with
//! each `M` an `e×e` row-major matrix.
//!
//! Cochain pair: `{"level", "dim", "e", "f": [[i₁, …, i₂ₚ, [v…]]…], "g": [[…, [v…]]…]}`
//! with each consecutive pair of indices increasing.
//!
//! Bundle: `{"fiber", "charts": [{"name", "coords", "samples"}…],
//! "transitions": [{"from", "to", "matrix", "samples", "to_samples"?}…],
//! "triples": [{"i", "j", "k", "samples", "samples_j"?}…]}`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{AlgebraError, AxiomReport, LyAlgebra};
use crate::bundle::{parse_expr, BundleError, BundleSpec, Chart, Expr, Transition, TripleOverlap};
use crate::cohomology::{CochainPair, CohomologyError, CohomologyReport};
use crate::linalg::{format_rational, parse_rational, Matrix, Rational};
use crate::representation::{RepError, RepReport, Representation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("at {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Representation(#[from] RepError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

fn schema(path: &str, message: impl Into<String>) -> JsonError {
    JsonError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn parse(text: &str) -> Result<Value, JsonError> {
    serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))
}

pub fn rational_to_json(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational, JsonError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| schema(path, e.to_string())),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => parse_rational(&n.to_string()).map_err(|e| schema(path, e.to_string())),
        },
        _ => Err(schema(path, "expected a rational string")),
    }
}

pub fn vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub fn vector_from_json(v: &Value, path: &str) -> Result<Vec<Rational>, JsonError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|r| vector_to_json(m.row(r))).collect())
}

pub fn matrix_from_json(v: &Value, rows: usize, cols: usize, path: &str) -> Result<Matrix, JsonError> {
    let rs = array(v, path)?;
    if rs.len() != rows {
        return Err(schema(path, format!("expected {rows} rows, got {}", rs.len())));
    }
    let mut m = Matrix::zeros(rows, cols);
    for (r, row) in rs.iter().enumerate() {
        let p = format!("{path}[{r}]");
        let vals = vector_from_json(row, &p)?;
        if vals.len() != cols {
            return Err(schema(&p, format!("expected {cols} entries, got {}", vals.len())));
        }
        for (c, x) in vals.into_iter().enumerate() {
            m.set(r, c, x);
        }
    }
    Ok(m)
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, JsonError> {
    o.get(key).ok_or_else(|| schema(path, format!("missing field `{key}`")))
}

fn usize_field(o: &Map<String, Value>, key: &str, path: &str) -> Result<usize, JsonError> {
    field(o, key, path)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "expected a nonnegative integer"))
}

fn str_field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str, JsonError> {
    field(o, key, path)?
        .as_str()
        .ok_or_else(|| schema(&format!("{path}.{key}"), "expected a string"))
}

/// Reads `[i₁, …, iₙ, [v…]]` with 1-based indices below `bound`.
fn indexed_entry(
    v: &Value,
    n: usize,
    bound: usize,
    len: usize,
    path: &str,
) -> Result<(Vec<usize>, Vec<Rational>), JsonError> {
    let items = array(v, path)?;
    if items.len() != n + 1 {
        return Err(schema(path, format!("expected {n} indices and a vector")));
    }
    let mut idx = Vec::with_capacity(n);
    for (k, x) in items[..n].iter().enumerate() {
        match x.as_u64() {
            Some(i) if i >= 1 && (i as usize) <= bound => idx.push(i as usize - 1),
            _ => return Err(schema(&format!("{path}[{k}]"), format!("index must be in 1..={bound}"))),
        }
    }
    let vec = vector_from_json(&items[n], &format!("{path}[{n}]"))?;
    if vec.len() != len {
        return Err(schema(
            path,
            format!("vector must have {len} entries, got {}", vec.len()),
        ));
    }
    Ok((idx, vec))
}

fn one_based(t: &[usize]) -> Vec<Value> {
    t.iter().map(|&i| json!(i + 1)).collect()
}

fn is_zero(v: &[Rational]) -> bool {
    crate::linalg::is_zero_vec(v)
}

pub fn algebra_to_json(a: &LyAlgebra) -> Value {
    let d = a.dim();
    let mut binary = Vec::new();
    let mut ternary = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let v = a.binary().get(i, j);
            if !is_zero(v) {
                let mut e = one_based(&[i, j]);
                e.push(vector_to_json(v));
                binary.push(Value::Array(e));
            }
            for k in 0..d {
                let v = a.ternary().get(i, j, k);
                if !is_zero(v) {
                    let mut e = one_based(&[i, j, k]);
                    e.push(vector_to_json(v));
                    ternary.push(Value::Array(e));
                }
            }
        }
    }
    json!({"name": a.name(), "dim": d, "binary": binary, "ternary": ternary})
}

pub fn algebra_from_json(v: &Value) -> Result<LyAlgebra, JsonError> {
    algebra_at(v, "$")
}

fn algebra_at(v: &Value, path: &str) -> Result<LyAlgebra, JsonError> {
    let o = object(v, path)?;
    let d = usize_field(o, "dim", path)?;
    let name = match o.get("name") {
        None => "algebra",
        Some(n) => n
            .as_str()
            .ok_or_else(|| schema(&format!("{path}.name"), "expected a string"))?,
    };
    let empty = Vec::new();
    let list = |key: &str| -> Result<&Vec<Value>, JsonError> {
        match o.get(key) {
            None => Ok(&empty),
            Some(x) => array(x, &format!("{path}.{key}")),
        }
    };
    let mut binary = Vec::new();
    for (n, e) in list("binary")?.iter().enumerate() {
        let p = format!("{path}.binary[{n}]");
        let (idx, vec) = indexed_entry(e, 2, d, d, &p)?;
        if idx[0] >= idx[1] {
            return Err(schema(&p, "binary entries need i < j"));
        }
        if binary.iter().any(|(i, j, _)| (*i, *j) == (idx[0], idx[1])) {
            return Err(schema(&p, "duplicate entry"));
        }
        binary.push((idx[0], idx[1], vec));
    }
    let mut ternary = Vec::new();
    for (n, e) in list("ternary")?.iter().enumerate() {
        let p = format!("{path}.ternary[{n}]");
        let (idx, vec) = indexed_entry(e, 3, d, d, &p)?;
        if idx[0] >= idx[1] {
            return Err(schema(&p, "ternary entries need i < j"));
        }
        if ternary
            .iter()
            .any(|(i, j, k, _)| (*i, *j, *k) == (idx[0], idx[1], idx[2]))
        {
            return Err(schema(&p, "duplicate entry"));
        }
        ternary.push((idx[0], idx[1], idx[2], vec));
    }
    Ok(LyAlgebra::from_entries(name, d, &binary, &ternary)?)
}

pub fn representation_to_json(r: &Representation) -> Value {
    let d = r.algebra_dim();
    let grid = |f: fn(&Representation, usize, usize) -> &Matrix| -> Value {
        Value::Array(
            (0..d)
                .map(|i| Value::Array((0..d).map(|j| matrix_to_json(f(r, i, j))).collect()))
                .collect(),
        )
    };
    json!({
        "e": r.module_dim(),
        "rho": (0..d).map(|i| matrix_to_json(r.rho(i))).collect::<Vec<_>>(),
        "D": grid(Representation::d_op),
        "theta": grid(Representation::theta),
    })
}

/// Reads a representation of an algebra of dimension `d`.
pub fn representation_from_json(v: &Value, d: usize) -> Result<Representation, JsonError> {
    let path = "$";
    let o = object(v, path)?;
    let e = usize_field(o, "e", path)?;
    let rho_v = array(field(o, "rho", path)?, "$.rho")?;
    if rho_v.len() != d {
        return Err(schema("$.rho", format!("expected {d} matrices, got {}", rho_v.len())));
    }
    let rho = rho_v
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, e, e, &format!("$.rho[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = |key: &str| -> Result<Vec<Matrix>, JsonError> {
        let p = format!("$.{key}");
        let rows = array(field(o, key, path)?, &p)?;
        if rows.len() != d {
            return Err(schema(&p, format!("expected {d} rows, got {}", rows.len())));
        }
        let mut out = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            let rp = format!("{p}[{i}]");
            let ms = array(row, &rp)?;
            if ms.len() != d {
                return Err(schema(&rp, format!("expected {d} matrices, got {}", ms.len())));
            }
            for (j, m) in ms.iter().enumerate() {
                out.push(matrix_from_json(m, e, e, &format!("{rp}[{j}]"))?);
            }
        }
        Ok(out)
    };
    let d_map = grid("D")?;
    let theta = grid("theta")?;
    Ok(Representation::new(d, e, rho, d_map, theta)?)
}

pub fn cochain_pair_to_json(c: &CochainPair) -> Value {
    let list = |coeffs: &crate::cohomology::Cochain| -> Vec<Value> {
        let shape = coeffs.shape();
        (0..shape.blocks())
            .filter_map(|b| {
                let args = shape.block_args(b);
                let v = coeffs.eval(&args);
                if is_zero(&v) {
                    return None;
                }
                let mut e = one_based(&args);
                e.push(vector_to_json(&v));
                Some(Value::Array(e))
            })
            .collect()
    };
    json!({
        "level": c.level(),
        "dim": c.algebra_dim(),
        "e": c.module_dim(),
        "f": list(c.f()),
        "g": list(c.g()),
    })
}

pub fn cochain_pair_from_json(v: &Value) -> Result<CochainPair, JsonError> {
    let path = "$";
    let o = object(v, path)?;
    let level = usize_field(o, "level", path)?;
    if level == 0 {
        return Err(schema("$.level", "level starts at 1"));
    }
    let d = usize_field(o, "dim", path)?;
    let e = usize_field(o, "e", path)?;
    let mut c = CochainPair::zero(level, d, e);
    for (key, arity) in [("f", 2 * level), ("g", 2 * level + 1)] {
        let entries = match o.get(key) {
            None => continue,
            Some(x) => array(x, &format!("$.{key}"))?,
        };
        for (n, entry) in entries.iter().enumerate() {
            let p = format!("$.{key}[{n}]");
            let (idx, vec) = indexed_entry(entry, arity, d, e, &p)?;
            let target = if key == "f" { c.f_mut() } else { c.g_mut() };
            if !is_zero(&target.eval(&idx)) {
                return Err(schema(&p, "duplicate entry"));
            }
            target
                .set(&idx, &vec)
                .map_err(|_| schema(&p, "each index pair must be increasing"))?;
        }
    }
    Ok(c)
}

fn points_to_json(ps: &[Vec<Rational>]) -> Value {
    Value::Array(ps.iter().map(|p| vector_to_json(p)).collect())
}

fn points_from_json(v: &Value, path: &str) -> Result<Vec<Vec<Rational>>, JsonError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, p)| vector_from_json(p, &format!("{path}[{i}]")))
        .collect()
}

fn expr_matrix_to_json(m: &[Vec<Expr>]) -> Value {
    Value::Array(
        m.iter()
            .map(|r| Value::Array(r.iter().map(|e| Value::String(e.to_string())).collect()))
            .collect(),
    )
}

pub fn expr_matrix_from_json(v: &Value, path: &str) -> Result<Vec<Vec<Expr>>, JsonError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(r, row)| {
            array(row, &format!("{path}[{r}]"))?
                .iter()
                .enumerate()
                .map(|(c, x)| {
                    let p = format!("{path}[{r}][{c}]");
                    match x {
                        Value::String(s) => parse_expr(s).map_err(|e| schema(&p, e.to_string())),
                        Value::Number(_) => Ok(Expr::Num(rational_from_json(x, &p)?)),
                        _ => Err(schema(&p, "expected an expression string")),
                    }
                })
                .collect()
        })
        .collect()
}

pub fn bundle_to_json(b: &BundleSpec) -> Value {
    let charts: Vec<Value> = b
        .charts
        .iter()
        .map(|c| json!({"name": c.name, "coords": c.coords, "samples": points_to_json(&c.samples)}))
        .collect();
    let transitions: Vec<Value> = b
        .transitions
        .iter()
        .map(|t| {
            let mut o = json!({
                "from": t.from,
                "to": t.to,
                "matrix": expr_matrix_to_json(&t.matrix),
                "samples": points_to_json(&t.samples),
            });
            if let Some(ts) = &t.to_samples {
                o["to_samples"] = points_to_json(ts);
            }
            o
        })
        .collect();
    let triples: Vec<Value> = b
        .triples
        .iter()
        .map(|t| {
            let mut o = json!({"i": t.i, "j": t.j, "k": t.k, "samples": points_to_json(&t.samples)});
            if let Some(sj) = &t.samples_j {
                o["samples_j"] = points_to_json(sj);
            }
            o
        })
        .collect();
    json!({
        "fiber": algebra_to_json(&b.fiber),
        "charts": charts,
        "transitions": transitions,
        "triples": triples,
    })
}

pub fn bundle_from_json(v: &Value) -> Result<BundleSpec, JsonError> {
    let path = "$";
    let o = object(v, path)?;
    let fiber = algebra_at(field(o, "fiber", path)?, "$.fiber")?;
    let mut charts = Vec::new();
    for (n, c) in array(field(o, "charts", path)?, "$.charts")?.iter().enumerate() {
        let p = format!("$.charts[{n}]");
        let co = object(c, &p)?;
        let coords = array(field(co, "coords", &p)?, &format!("{p}.coords"))?
            .iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| schema(&format!("{p}.coords"), "expected strings"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        charts.push(Chart {
            name: str_field(co, "name", &p)?.to_string(),
            coords,
            samples: points_from_json(field(co, "samples", &p)?, &format!("{p}.samples"))?,
        });
    }
    let empty = Value::Array(Vec::new());
    let mut transitions = Vec::new();
    for (n, t) in array(o.get("transitions").unwrap_or(&empty), "$.transitions")?
        .iter()
        .enumerate()
    {
        let p = format!("$.transitions[{n}]");
        let to = object(t, &p)?;
        transitions.push(Transition {
            from: str_field(to, "from", &p)?.to_string(),
            to: str_field(to, "to", &p)?.to_string(),
            matrix: expr_matrix_from_json(field(to, "matrix", &p)?, &format!("{p}.matrix"))?,
            samples: points_from_json(field(to, "samples", &p)?, &format!("{p}.samples"))?,
            to_samples: to
                .get("to_samples")
                .map(|x| points_from_json(x, &format!("{p}.to_samples")))
                .transpose()?,
        });
    }
    let mut triples = Vec::new();
    for (n, t) in array(o.get("triples").unwrap_or(&empty), "$.triples")?
        .iter()
        .enumerate()
    {
        let p = format!("$.triples[{n}]");
        let to = object(t, &p)?;
        triples.push(TripleOverlap {
            i: str_field(to, "i", &p)?.to_string(),
            j: str_field(to, "j", &p)?.to_string(),
            k: str_field(to, "k", &p)?.to_string(),
            samples: points_from_json(field(to, "samples", &p)?, &format!("{p}.samples"))?,
            samples_j: to
                .get("samples_j")
                .map(|x| points_from_json(x, &format!("{p}.samples_j")))
                .transpose()?,
        });
    }
    Ok(BundleSpec::new(fiber, charts, transitions, triples)?)
}

pub fn axiom_report_to_json(r: &AxiomReport) -> Value {
    Value::Array(
        r.violations
            .iter()
            .map(|v| {
                json!({
                    "axiom": v.axiom.to_string(),
                    "tuple": one_based(&v.tuple),
                    "defect": vector_to_json(&v.defect),
                })
            })
            .collect(),
    )
}

pub fn rep_report_to_json(r: &RepReport) -> Value {
    let list = |vs: &[crate::representation::RepViolation]| -> Value {
        Value::Array(
            vs.iter()
                .map(|v| {
                    json!({
                        "condition": v.condition.to_string(),
                        "tuple": one_based(&v.tuple),
                        "defect": matrix_to_json(&v.defect),
                    })
                })
                .collect(),
        )
    };
    json!({"violations": list(&r.violations), "rlyb7_violations": list(&r.rlyb7)})
}

pub fn cohomology_report_to_json(r: &CohomologyReport) -> Value {
    let mut o = json!({
        "p": r.p,
        "dimZ": r.dim_z,
        "dimB": r.dim_b,
        "dimH": r.dim_h,
        "delta_squared_zero": r.delta_squared_zero,
    });
    let named = match r.p {
        0 => "dimH1".to_string(),
        p => format!("dimH{}{}", 2 * p, 2 * p + 1),
    };
    o[named] = json!(r.dim_h);
    if let Some(z) = r.z_reading {
        o["z_reading"] = json!(z);
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cross_product_lie, example_3dim, meson};
    use crate::bundle::circle_bundle;
    use crate::linalg::{q, qf};

    #[test]
    fn algebra_round_trip() {
        for a in [example_3dim(), meson(2), meson(3), cross_product_lie()] {
            let v = algebra_to_json(&a);
            assert_eq!(algebra_from_json(&v).unwrap(), a);
        }
        let v = algebra_to_json(&example_3dim());
        assert_eq!(
            v,
            json!({"name": "3dim", "dim": 3, "binary": [[1, 2, ["0", "0", "1"]]], "ternary": [[1, 2, 1, ["0", "0", "1"]]]})
        );
    }

    #[test]
    fn algebra_schema_errors() {
        let bad = [
            json!({"dim": 2, "binary": [[2, 1, ["0", "1"]]]}),
            json!({"dim": 2, "binary": [[1, 3, ["0", "1"]]]}),
            json!({"dim": 2, "binary": [[1, 2, ["0"]]]}),
            json!({"dim": 2, "binary": [[1, 2, ["x", "1"]]]}),
            json!({"dim": 2, "binary": [[1, 2, ["0", "1"]], [1, 2, ["0", "1"]]]}),
            json!({"binary": []}),
            json!([1, 2]),
        ];
        for v in bad {
            assert!(matches!(algebra_from_json(&v), Err(JsonError::Schema { .. })), "{v}");
        }
        let a = algebra_from_json(&json!({"dim": 1, "binary": [], "ternary": [], "name": "x"})).unwrap();
        assert_eq!(a.dim(), 1);
        let a = algebra_from_json(&json!({"dim": 2, "binary": [[1, 2, [0, "1/2"]]]})).unwrap();
        assert_eq!(a.binary().get(0, 1), &[q(0), qf(1, 2)]);
        assert_eq!(a.binary().get(1, 0), &[q(0), qf(-1, 2)]);
        assert!(matches!(parse("{"), Err(JsonError::Syntax(_))));
    }

    #[test]
    fn representation_round_trip() {
        let a = example_3dim();
        for r in [Representation::adjoint(&a).unwrap(), Representation::trivial(&a, 2)] {
            let v = representation_to_json(&r);
            assert_eq!(representation_from_json(&v, 3).unwrap(), r);
        }
        let v = representation_to_json(&Representation::trivial(&a, 2));
        assert!(representation_from_json(&v, 2).is_err());
    }

    #[test]
    fn cochain_round_trip() {
        let mut c = CochainPair::zero(1, 3, 2);
        c.f_mut().set(&[0, 2], &[q(1), qf(-2, 3)]).unwrap();
        c.g_mut().set(&[1, 2, 0], &[q(0), q(5)]).unwrap();
        let v = cochain_pair_to_json(&c);
        assert_eq!(v["f"], json!([[1, 3, ["1", "-2/3"]]]));
        assert_eq!(cochain_pair_from_json(&v).unwrap(), c);
        let bad = json!({"level": 1, "dim": 3, "e": 2, "f": [[3, 1, ["1", "0"]]]});
        assert!(matches!(cochain_pair_from_json(&bad), Err(JsonError::Schema { .. })));
    }

    #[test]
    fn bundle_round_trip() {
        let b = circle_bundle(example_3dim());
        let v = bundle_to_json(&b);
        assert_eq!(v["transitions"][0]["matrix"][1][1], json!("1 + t^2"));
        assert_eq!(v["transitions"][1]["matrix"][2][2], json!("s^2/(1 + s^2)"));
        assert_eq!(bundle_from_json(&v).unwrap(), b);
        let mut broken = v.clone();
        broken["transitions"][0]["matrix"][0][0] = json!("1 +");
        assert!(matches!(bundle_from_json(&broken), Err(JsonError::Schema { .. })));
        let mut unknown = v;
        unknown["transitions"][0]["to"] = json!("U7");
        assert!(matches!(bundle_from_json(&unknown), Err(JsonError::Bundle(_))));
    }

    #[test]
    fn cohomology_report_keys() {
        let r = CohomologyReport {
            p: 1,
            dim_z: 4,
            dim_b: 1,
            dim_h: 3,
            delta_squared_zero: true,
            z_reading: Some("z"),
        };
        let v = cohomology_report_to_json(&r);
        assert_eq!(v["dimH23"], json!(3));
        assert_eq!(v["dimZ"], json!(4));
        assert_eq!(v["z_reading"], json!("z"));
    }
}
