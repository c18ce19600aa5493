//! JSON wire formats for scalars, tensors and matrices.
//!
//! Exact scalars are written as canonical `"p/q"` strings so that a
//! write/read cycle is bit-exact. Floating entries use JSON numbers, which
//! `serde_json` round-trips exactly with `float_roundtrip`.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, parse_rational, Domain, EpsPoly, QComplex, Scalar};
use crate::tensor::Tensor;

/// A scalar that knows its JSON representation.
pub trait JsonScalar: Scalar {
    /// Fields merged into the entry object.
    fn to_fields(&self) -> Map<String, Value>;
    fn from_fields(obj: &Map<String, Value>) -> Result<Self>;
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
}

fn exact_part(v: &Value) -> Result<num_rational::BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("expected rational string, got {other}"))),
    }
}

fn qcomplex_fields(q: &QComplex) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("re".into(), Value::String(format_rational(&q.re)));
    m.insert("im".into(), Value::String(format_rational(&q.im)));
    m
}

fn qcomplex_from(obj: &Map<String, Value>) -> Result<QComplex> {
    let re = exact_part(field(obj, "re")?)?;
    let im = match obj.get("im") {
        Some(v) => exact_part(v)?,
        None => num_rational::BigRational::default(),
    };
    Ok(QComplex::new(re, im))
}

impl JsonScalar for QComplex {
    fn to_fields(&self) -> Map<String, Value> {
        qcomplex_fields(self)
    }

    fn from_fields(obj: &Map<String, Value>) -> Result<Self> {
        qcomplex_from(obj)
    }
}

impl JsonScalar for EpsPoly {
    fn to_fields(&self) -> Map<String, Value> {
        let coeffs: Map<String, Value> =
            self.coeffs().iter().map(|(d, c)| (d.to_string(), Value::Object(qcomplex_fields(c)))).collect();
        let mut m = Map::new();
        m.insert("coeffs".into(), Value::Object(coeffs));
        m
    }

    fn from_fields(obj: &Map<String, Value>) -> Result<Self> {
        let coeffs = field(obj, "coeffs")?
            .as_object()
            .ok_or_else(|| Error::Parse("`coeffs` must be an object".into()))?;
        let mut terms = Vec::with_capacity(coeffs.len());
        for (deg, c) in coeffs {
            let deg: u32 = deg.parse().map_err(|_| Error::Parse(format!("invalid ε-degree `{deg}`")))?;
            let c = c.as_object().ok_or_else(|| Error::Parse("coefficient must be an object".into()))?;
            terms.push((deg, qcomplex_from(c)?));
        }
        Ok(EpsPoly::from_coeffs(terms))
    }
}

impl JsonScalar for Complex64 {
    fn to_fields(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("re".into(), json!(self.re));
        m.insert("im".into(), json!(self.im));
        m
    }

    fn from_fields(obj: &Map<String, Value>) -> Result<Self> {
        let num = |key: &str| -> Result<f64> {
            match obj.get(key) {
                None if key == "im" => Ok(0.0),
                None => Err(Error::Parse(format!("missing field `{key}`"))),
                Some(v) => v.as_f64().ok_or_else(|| Error::Parse(format!("`{key}` must be a number"))),
            }
        };
        Ok(Complex64::new(num("re")?, num("im")?))
    }
}

fn usize_array(v: &Value, what: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("`{what}` must hold naturals"))))
        .collect()
}

pub fn tensor_to_json<S: JsonScalar>(t: &Tensor<S>) -> Value {
    let entries: Vec<Value> = t
        .entries()
        .map(|(idx, v)| {
            let mut obj = v.to_fields();
            obj.insert("i".into(), json!(idx));
            Value::Object(obj)
        })
        .collect();
    json!({
        "order": t.order(),
        "dims": t.dims(),
        "domain": S::DOMAIN.tag(),
        "entries": entries,
    })
}

fn domain_of(v: &Value) -> Result<Domain> {
    Domain::from_tag(
        v.get("domain").and_then(Value::as_str).ok_or_else(|| Error::Parse("missing field `domain`".into()))?,
    )
}

pub fn tensor_from_json<S: JsonScalar>(v: &Value) -> Result<Tensor<S>> {
    let domain = domain_of(v)?;
    if domain != S::DOMAIN {
        return Err(Error::DomainMismatch(S::DOMAIN, domain));
    }
    let dims = usize_array(v.get("dims").ok_or_else(|| Error::Parse("missing field `dims`".into()))?, "dims")?;
    if let Some(order) = v.get("order") {
        if order.as_u64() != Some(dims.len() as u64) {
            return Err(Error::Parse(format!("`order` {order} disagrees with {} dims", dims.len())));
        }
    }
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing array `entries`".into()))?;
    let mut parsed = Vec::with_capacity(entries.len());
    for e in entries {
        let obj = e.as_object().ok_or_else(|| Error::Parse("entry must be an object".into()))?;
        parsed.push((usize_array(field(obj, "i")?, "i")?, S::from_fields(obj)?));
    }
    Tensor::from_entries(dims, parsed)
}

/// A tensor of any domain, as read from a file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyTensor {
    Rational(Tensor<QComplex>),
    Eps(Tensor<EpsPoly>),
    Float(Tensor<Complex64>),
}

impl AnyTensor {
    pub fn from_json(v: &Value) -> Result<Self> {
        Ok(match domain_of(v)? {
            Domain::RationalComplex => Self::Rational(tensor_from_json(v)?),
            Domain::EpsPoly => Self::Eps(tensor_from_json(v)?),
            Domain::FloatComplex => Self::Float(tensor_from_json(v)?),
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Rational(t) => tensor_to_json(t),
            Self::Eps(t) => tensor_to_json(t),
            Self::Float(t) => tensor_to_json(t),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            Self::Rational(_) => Domain::RationalComplex,
            Self::Eps(_) => Domain::EpsPoly,
            Self::Float(_) => Domain::FloatComplex,
        }
    }

    pub fn into_rational(self) -> Result<Tensor<QComplex>> {
        match self {
            Self::Rational(t) => Ok(t),
            other => Err(Error::DomainMismatch(Domain::RationalComplex, other.domain())),
        }
    }
}

pub fn matrix_to_json<S: JsonScalar>(m: &Matrix<S>) -> Value {
    let rows: Vec<Value> =
        (0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(|v| Value::Object(v.to_fields())).collect())).collect();
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "domain": S::DOMAIN.tag(),
        "entries": rows,
    })
}

pub fn matrix_from_json<S: JsonScalar>(v: &Value) -> Result<Matrix<S>> {
    if v.get("domain").is_some() {
        let domain = domain_of(v)?;
        if domain != S::DOMAIN {
            return Err(Error::DomainMismatch(S::DOMAIN, domain));
        }
    }
    let rows = v.get("rows").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing `rows`".into()))? as usize;
    let cols = v.get("cols").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing `cols`".into()))? as usize;
    let data = v.get("entries").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing `entries`".into()))?;
    if data.len() != rows {
        return Err(Error::Parse(format!("matrix declares {rows} rows but has {}", data.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for row in data {
        let row = row.as_array().ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
        if row.len() != cols {
            return Err(Error::Parse(format!("matrix declares {cols} columns but a row has {}", row.len())));
        }
        let parsed = row
            .iter()
            .map(|x| S::from_fields(x.as_object().ok_or_else(|| Error::Parse("scalar must be an object".into()))?))
            .collect::<Result<Vec<S>>>()?;
        out.push(parsed);
    }
    if rows == 0 {
        return Ok(Matrix::zeros(0, cols));
    }
    Matrix::from_rows(out)
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
