//! Named tensors and a small on-disk store of tensors with verified
//! decompositions and degeneration certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::io::{read_json, tensor_from_json, tensor_to_json, write_json, JsonScalar};
use crate::matrix::Matrix;
use crate::preorder::{verify_degeneration, DegenerationCertificate};
use crate::scalar::{EpsPoly, QComplex, Scalar};
use crate::tensor::Tensor;

/// `GHZ_r^{(k)} = Σ_i e_i ⊗ ⋯ ⊗ e_i`.
pub fn ghz(r: usize, k: usize) -> Tensor<QComplex> {
    Tensor::from_ones(vec![r; k], (0..r).map(|i| vec![i; k])).expect("valid GHZ parameters")
}

/// `W = e₀⊗e₀⊗e₁ + e₀⊗e₁⊗e₀ + e₁⊗e₀⊗e₀`.
pub fn w_state() -> Tensor<QComplex> {
    Tensor::from_ones(vec![2, 2, 2], [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).expect("static")
}

pub fn epr(d: usize) -> Tensor<QComplex> {
    ghz(d, 2)
}

/// `MaMu(d) = Σ (e_{i₁}⊗e_{i₂}) ⊗ (e_{i₂}⊗e_{i₃}) ⊗ (e_{i₃}⊗e_{i₁})`, each pair
/// packed row-major into one factor of dimension d².
pub fn mamu(d: usize) -> Tensor<QComplex> {
    let mut idx = Vec::with_capacity(d * d * d);
    for i1 in 0..d {
        for i2 in 0..d {
            for i3 in 0..d {
                idx.push(vec![i1 * d + i2, i2 * d + i3, i3 * d + i1]);
            }
        }
    }
    Tensor::from_ones(vec![d * d; 3], idx).expect("valid MaMu parameters")
}

/// `cw_q = Σ_{i=1}^q (e_i⊗e_i⊗e_0 + e_i⊗e_0⊗e_i + e_0⊗e_i⊗e_i)`.
pub fn cw(q: usize) -> Tensor<QComplex> {
    let idx = (1..=q).flat_map(|i| [vec![i, i, 0], vec![i, 0, i], vec![0, i, i]]);
    Tensor::from_ones(vec![q + 1; 3], idx).expect("valid CW parameters")
}

/// The order-k tensor with all dimensions 1 and entry 1: the unit for ⊠.
pub fn unit(k: usize) -> Tensor<QComplex> {
    Tensor::from_ones(vec![1; k], [vec![0; k]]).expect("valid unit parameters")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedTensor {
    Ghz { r: usize, k: usize },
    W,
    Epr { d: usize },
    MaMu { d: usize },
    Cw { q: usize },
    Unit { k: usize },
}

impl NamedTensor {
    /// Parse a name plus the parameters relevant to it. Unused parameters
    /// are ignored; missing ones default to `k = 3`, and otherwise `2`.
    pub fn parse(name: &str, r: Option<usize>, k: Option<usize>, d: Option<usize>, q: Option<usize>) -> Result<Self> {
        let spec = match name.to_ascii_lowercase().as_str() {
            "ghz" => Self::Ghz { r: r.or(d).unwrap_or(2), k: k.unwrap_or(3) },
            "w" => Self::W,
            "epr" => Self::Epr { d: d.or(r).unwrap_or(2) },
            "mamu" => Self::MaMu { d: d.unwrap_or(2) },
            "cw" => Self::Cw { q: q.unwrap_or(2) },
            "unit" => Self::Unit { k: k.unwrap_or(3) },
            other => return Err(Error::InvalidParameter(format!("unknown tensor name `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Ghz { r, k } => r >= 1 && k >= 1,
            Self::W => true,
            Self::Epr { d } | Self::MaMu { d } => d >= 1,
            Self::Cw { q } => q >= 1,
            Self::Unit { k } => k >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("parameters of {self} must be positive")))
        }
    }
}

impl fmt::Display for NamedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ghz { r, k } => write!(f, "GHZ(r={r},k={k})"),
            Self::W => write!(f, "W"),
            Self::Epr { d } => write!(f, "EPR(d={d})"),
            Self::MaMu { d } => write!(f, "MaMu(d={d})"),
            Self::Cw { q } => write!(f, "CW(q={q})"),
            Self::Unit { k } => write!(f, "Unit(k={k})"),
        }
    }
}

pub fn make_named(spec: NamedTensor) -> Result<Tensor<QComplex>> {
    spec.validate()?;
    Ok(match spec {
        NamedTensor::Ghz { r, k } => ghz(r, k),
        NamedTensor::W => w_state(),
        NamedTensor::Epr { d } => epr(d),
        NamedTensor::MaMu { d } => mamu(d),
        NamedTensor::Cw { q } => cw(q),
        NamedTensor::Unit { k } => unit(k),
    })
}

/// A list of simple tensors; term `r` is `v₁ ⊗ ⋯ ⊗ v_k`.
pub type Decomposition = Vec<Vec<Vec<QComplex>>>;

/// Sum of the simple terms as a tensor with the given dims.
pub fn decomposition_sum(dims: &[usize], terms: &Decomposition) -> Result<Tensor<QComplex>> {
    Tensor::from_simple_terms(dims.to_vec(), terms)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationWitness {
    pub source: Tensor<QComplex>,
    pub certificate: DegenerationCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnownValue {
    pub value: String,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub tensor: Tensor<QComplex>,
    pub decomposition: Option<Decomposition>,
    pub degeneration: Option<DegenerationWitness>,
    pub metadata: BTreeMap<String, KnownValue>,
}

impl CatalogEntry {
    pub fn new(id: impl Into<String>, tensor: Tensor<QComplex>) -> Self {
        Self { id: id.into(), tensor, decomposition: None, degeneration: None, metadata: BTreeMap::new() }
    }

    pub fn with_decomposition(mut self, terms: Decomposition) -> Self {
        self.decomposition = Some(terms);
        self
    }

    pub fn with_degeneration(mut self, source: Tensor<QComplex>, certificate: DegenerationCertificate) -> Self {
        self.degeneration = Some(DegenerationWitness { source, certificate });
        self
    }

    pub fn with_known(mut self, key: &str, value: &str, provenance: &str) -> Self {
        self.metadata.insert(key.into(), KnownValue { value: value.into(), provenance: provenance.into() });
        self
    }

    /// Exact re-verification of every stored witness.
    pub fn verify(&self) -> Result<()> {
        if let Some(terms) = &self.decomposition {
            let sum = decomposition_sum(self.tensor.dims(), terms)?;
            if sum != self.tensor {
                return Err(Error::Verification(format!(
                    "{}: the {}-term decomposition does not sum to the tensor",
                    self.id,
                    terms.len()
                )));
            }
        }
        if let Some(w) = &self.degeneration {
            let check = verify_degeneration(&w.source, &self.tensor, &w.certificate)?;
            if !check.ok {
                return Err(Error::Verification(format!("{}: degeneration certificate does not verify", self.id)));
            }
        }
        Ok(())
    }

    /// Number of simple terms of the stored decomposition.
    pub fn rank_witness(&self) -> Option<usize> {
        self.decomposition.as_ref().map(Vec::len)
    }

    /// `r` when the stored degeneration starts from `GHZ_r`.
    pub fn border_rank_witness(&self) -> Option<usize> {
        let w = self.degeneration.as_ref()?;
        let r = w.source.dims()[0];
        (w.source == ghz(r, w.source.order())).then_some(r)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("id".into(), json!(self.id));
        obj.insert("tensor".into(), tensor_to_json(&self.tensor));
        if let Some(terms) = &self.decomposition {
            let terms: Vec<Value> = terms
                .iter()
                .map(|term| {
                    Value::Array(
                        term.iter()
                            .map(|v| Value::Array(v.iter().map(|x| Value::Object(x.to_fields())).collect()))
                            .collect(),
                    )
                })
                .collect();
            obj.insert("decomposition".into(), Value::Array(terms));
        }
        if let Some(w) = &self.degeneration {
            obj.insert(
                "degeneration".into(),
                json!({"source": tensor_to_json(&w.source), "certificate": w.certificate.to_json()}),
            );
        }
        let meta: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), json!({"value": v.value, "provenance": v.provenance})))
            .collect();
        obj.insert("metadata".into(), Value::Object(meta));
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let id = v.get("id").and_then(Value::as_str).ok_or_else(|| Error::Parse("entry without `id`".into()))?;
        let tensor = tensor_from_json(v.get("tensor").ok_or_else(|| Error::Parse("entry without `tensor`".into()))?)?;
        let mut entry = Self::new(id, tensor);
        if let Some(terms) = v.get("decomposition") {
            let bad = || Error::Parse("decomposition must be [[[scalar..]..]..]".into());
            let mut parsed = Vec::new();
            for term in terms.as_array().ok_or_else(bad)? {
                let mut factors = Vec::new();
                for vec in term.as_array().ok_or_else(bad)? {
                    let entries = vec
                        .as_array()
                        .ok_or_else(bad)?
                        .iter()
                        .map(|x| QComplex::from_fields(x.as_object().ok_or_else(bad)?))
                        .collect::<Result<Vec<_>>>()?;
                    factors.push(entries);
                }
                parsed.push(factors);
            }
            entry.decomposition = Some(parsed);
        }
        if let Some(d) = v.get("degeneration") {
            let source = tensor_from_json(d.get("source").ok_or_else(|| Error::Parse("missing `source`".into()))?)?;
            let cert = DegenerationCertificate::from_json(
                d.get("certificate").ok_or_else(|| Error::Parse("missing `certificate`".into()))?,
            )?;
            entry.degeneration = Some(DegenerationWitness { source, certificate: cert });
        }
        if let Some(meta) = v.get("metadata").and_then(Value::as_object) {
            for (k, kv) in meta {
                let get = |f: &str| kv.get(f).and_then(Value::as_str).unwrap_or_default().to_string();
                entry.metadata.insert(k.clone(), KnownValue { value: get("value"), provenance: get("provenance") });
            }
        }
        Ok(entry)
    }
}

/// In-memory catalog; every entry has passed [`CatalogEntry::verify`].
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: BTreeMap<String, CatalogEntry>,
}

pub const MANIFEST: &str = "manifest.json";

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// The entries shipped with the library.
    pub fn builtin() -> Self {
        let mut c = Self::new();
        for entry in builtin_entries() {
            c.put(entry).expect("builtin catalog entries verify");
        }
        c
    }

    pub fn put(&mut self, entry: CatalogEntry) -> Result<()> {
        entry.verify()?;
        self.entries.insert(entry.id.clone(), entry);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&CatalogEntry> {
        self.entries.get(id).ok_or_else(|| Error::UnknownId(id.into()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Read a catalog directory, re-verifying every entry.
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = read_json(&dir.join(MANIFEST))?;
        let list = manifest
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("manifest without `entries` array".into()))?;
        let mut c = Self::new();
        for item in list {
            let id = item.get("id").and_then(Value::as_str).ok_or_else(|| Error::Parse("manifest item without id".into()))?;
            let file =
                item.get("file").and_then(Value::as_str).ok_or_else(|| Error::Parse("manifest item without file".into()))?;
            let entry = CatalogEntry::from_json(&read_json(&dir.join(file))?)?;
            if entry.id != id {
                return Err(Error::Parse(format!("manifest id `{id}` but file holds `{}`", entry.id)));
            }
            c.put(entry)?;
        }
        Ok(c)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut items = Vec::new();
        for entry in self.entries.values() {
            let file = format!("{}.json", entry.id);
            write_json(&dir.join(&file), &entry.to_json())?;
            items.push(json!({"id": entry.id, "file": file}));
        }
        write_json(&dir.join(MANIFEST), &json!({ "entries": items }))
    }
}

fn q(n: i64) -> QComplex {
    QComplex::from_int(n)
}

fn vector(v: &[i64]) -> Vec<QComplex> {
    v.iter().map(|&x| q(x)).collect()
}

/// The paper-style border-rank certificate: `m = (e₀ + εe₁)e₀* − e₀e₁*` on
/// every factor, degenerating `GHZ₂` to `W` with `d = 1`, `e = 2`.
pub fn w_border_certificate() -> DegenerationCertificate {
    let m = Matrix::from_rows(vec![
        vec![EpsPoly::one(), EpsPoly::constant(q(-1))],
        vec![EpsPoly::eps(), EpsPoly::zero()],
    ])
    .expect("static");
    DegenerationCertificate::new(vec![m.clone(), m.clone(), m], 1, 2)
}

/// Strassen's seven products for 2×2 matrix multiplication, written in the
/// `MaMu(2)` basis: factor 1 is `A_{ij}` at `2i+j`, factor 2 is `B_{jk}` at
/// `2j+k`, and factor 3 is the output `C_{ik}` at `2k+i`.
pub fn strassen_decomposition() -> Decomposition {
    let a = |e: &[(usize, usize, i64)]| {
        let mut v = vec![0i64; 4];
        for &(i, j, s) in e {
            v[2 * i + j] += s;
        }
        vector(&v)
    };
    let c = |e: &[(usize, usize, i64)]| {
        let mut v = vec![0i64; 4];
        for &(i, k, s) in e {
            v[2 * k + i] += s;
        }
        vector(&v)
    };
    vec![
        vec![a(&[(0, 0, 1), (1, 1, 1)]), a(&[(0, 0, 1), (1, 1, 1)]), c(&[(0, 0, 1), (1, 1, 1)])],
        vec![a(&[(1, 0, 1), (1, 1, 1)]), a(&[(0, 0, 1)]), c(&[(1, 0, 1), (1, 1, -1)])],
        vec![a(&[(0, 0, 1)]), a(&[(0, 1, 1), (1, 1, -1)]), c(&[(0, 1, 1), (1, 1, 1)])],
        vec![a(&[(1, 1, 1)]), a(&[(1, 0, 1), (0, 0, -1)]), c(&[(0, 0, 1), (1, 0, 1)])],
        vec![a(&[(0, 0, 1), (0, 1, 1)]), a(&[(1, 1, 1)]), c(&[(0, 0, -1), (0, 1, 1)])],
        vec![a(&[(1, 0, 1), (0, 0, -1)]), a(&[(0, 0, 1), (0, 1, 1)]), c(&[(1, 1, 1)])],
        vec![a(&[(0, 1, 1), (1, 1, -1)]), a(&[(1, 0, 1), (1, 1, 1)]), c(&[(0, 0, 1)])],
    ]
}

/// Seven symmetric terms `λ ℓ⊗ℓ⊗ℓ` summing to `W⊠W`.
///
/// `W⊠W` is the symmetric tensor of the cubic `3u₀²u₃ + 6u₀u₁u₂` on
/// `ℂ⁴ = ℂ²⊗ℂ²`, and the two Waring identities
/// `6u₀²u₃ = (u₀+u₃)³ − (u₀−u₃)³ − 2u₃³` and
/// `24u₀u₁u₂ = (u₀+u₁+u₂)³ − (−u₀+u₁+u₂)³ − (u₀−u₁+u₂)³ − (u₀+u₁−u₂)³`
/// give the terms; λ is folded into the first factor.
pub fn ww_decomposition() -> Decomposition {
    let term = |scale: QComplex, l: &[i64]| {
        let l = vector(l);
        let first = l.iter().map(|x| x.mul(&scale)).collect();
        vec![first, l.clone(), l]
    };
    let half = QComplex::from_frac(1, 2);
    let quarter = QComplex::from_frac(1, 4);
    vec![
        term(half.clone(), &[1, 0, 0, 1]),
        term(half.neg(), &[1, 0, 0, -1]),
        term(q(-1), &[0, 0, 0, 1]),
        term(quarter.clone(), &[1, 1, 1, 0]),
        term(quarter.neg(), &[-1, 1, 1, 0]),
        term(quarter.neg(), &[1, -1, 1, 0]),
        term(quarter.neg(), &[1, 1, -1, 0]),
    ]
}

pub const STRASSEN_ID: &str = "strassen-mamu2-rank7";
pub const WW_ID: &str = "ww-kron-rank7";
pub const W_BORDER_ID: &str = "w-border2-degeneration";

fn builtin_entries() -> Vec<CatalogEntry> {
    let w = w_state();
    let ww = w.kron(&w).expect("same order");
    vec![
        CatalogEntry::new(STRASSEN_ID, mamu(2))
            .with_decomposition(strassen_decomposition())
            .with_known("rank", "7", "Strassen 1969 (upper bound); Winograd 1971 (optimality)")
            .with_known("border_rank", "7", "Landsberg 2006"),
        CatalogEntry::new(WW_ID, ww)
            .with_decomposition(ww_decomposition())
            .with_known("rank", "7", "Chen–Friedland 2018; R(W)^2=9 > R(W⊗W)=8 > R(W⊠W)=7"),
        CatalogEntry::new(W_BORDER_ID, w)
            .with_degeneration(ghz(2, 3), w_border_certificate())
            .with_known("rank", "3", "classical (three-qubit SLOCC classification)")
            .with_known("border_rank", "2", "degeneration from GHZ_2")
            .with_known("subrank", "1", "classical (three-qubit SLOCC classification)")
            .with_known(
                "asymptotic_subrank",
                "2^h(1/3) ≈ 1.8898816",
                "Strassen 1991; h the binary entropy (stored, not computed)",
            ),
    ]
}

impl FromStr for NamedTensor {
    type Err = Error;

    /// `"GHZ:r:k"`, `"W"`, `"EPR:d"`, `"MaMu:d"`, `"CW:q"`, `"Unit:k"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let nums = parts
            .map(|p| p.parse::<usize>().map_err(|_| Error::Parse(format!("bad parameter `{p}` in `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        let n = |i: usize| nums.get(i).copied();
        match name.to_ascii_lowercase().as_str() {
            "ghz" => Self::parse(name, n(0), n(1), None, None),
            "epr" | "mamu" => Self::parse(name, None, None, n(0), None),
            "cw" => Self::parse(name, None, None, None, n(0)),
            "unit" => Self::parse(name, None, n(0), None, None),
            _ => Self::parse(name, None, None, None, None),
        }
    }
}
