//! Bound reports for asymptotic rank, the lattice obstruction and
//! construction, and the ω arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::catalog::{mamu, Catalog, Decomposition, STRASSEN_ID};
use crate::error::{Error, Result};
use crate::hypergraph::{build_structure, make_family, EdgeAssignment, Family, Hypergraph};
use crate::linalg::{rank_factorization, Rank};
use crate::matrix::Matrix;
use crate::obstructions::{flattening_ratio, gauge_points, koszul_flatten_power, KoszulSpec};
use crate::preorder::{interpolate, verify_degeneration, verify_restriction, DegenerationCertificate, RestrictionCertificate};
use crate::scalar::{format_rational, parse_rational, EpsPoly, QComplex, Scalar};
use crate::tensor::{unpack, Tensor};

/// Upper limit on the dense size of structure tensors in constructions.
pub const MAX_STRUCTURE_VOLUME: usize = 1_000_000;

/// An exact or floating bound value.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Rational(BigRational),
    /// `radicand^{1/n}`.
    Root { radicand: usize, n: u32 },
    /// `log₂(radicand) / n`.
    Log2 { radicand: usize, n: u32 },
    Float(f64),
}

impl BoundValue {
    pub fn int(v: usize) -> Self {
        Self::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn approx(&self) -> f64 {
        match self {
            Self::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            Self::Root { radicand, n } => (*radicand as f64).powf(1.0 / *n as f64),
            Self::Log2 { radicand, n } => (*radicand as f64).log2() / *n as f64,
            Self::Float(x) => *x,
        }
    }

    pub fn to_json(&self) -> Value {
        let exact = match self {
            Self::Rational(q) => json!({"kind": "rational", "value": format_rational(q)}),
            Self::Root { radicand, n } => json!({"kind": "root", "radicand": radicand, "n": n}),
            Self::Log2 { radicand, n } => json!({"kind": "log2", "radicand": radicand, "n": n}),
            Self::Float(x) => json!({"kind": "float", "value": x}),
        };
        let mut obj = exact.as_object().cloned().expect("object literal");
        obj.insert("display".into(), json!(self.to_string()));
        obj.insert("approx".into(), json!(self.approx()));
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| Error::Parse("bound without `kind`".into()))?;
        let nat = |key: &str| {
            v.get(key).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("bound without natural `{key}`")))
        };
        Ok(match kind {
            "rational" => Self::Rational(parse_rational(
                v.get("value").and_then(Value::as_str).ok_or_else(|| Error::Parse("rational bound value".into()))?,
            )?),
            "root" => Self::Root { radicand: nat("radicand")? as usize, n: nat("n")? as u32 },
            "log2" => Self::Log2 { radicand: nat("radicand")? as usize, n: nat("n")? as u32 },
            "float" => Self::Float(
                v.get("value").and_then(Value::as_f64).ok_or_else(|| Error::Parse("float bound value".into()))?,
            ),
            other => return Err(Error::Parse(format!("unknown bound kind `{other}`"))),
        })
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(q) => write!(f, "{}", format_rational(q)),
            Self::Root { radicand, n: 1 } => write!(f, "{radicand}"),
            Self::Root { radicand, n } => write!(f, "{radicand}^(1/{n})"),
            Self::Log2 { radicand, n } if radicand.is_power_of_two() => {
                let q = BigRational::new(BigInt::from(radicand.trailing_zeros()), BigInt::from(*n));
                write!(f, "{}", format_rational(&q))
            }
            Self::Log2 { radicand, n: 1 } => write!(f, "log2({radicand})"),
            Self::Log2 { radicand, n } => write!(f, "log2({radicand})/{n}"),
            Self::Float(x) => write!(f, "{x:.6}"),
        }
    }
}

/// A bound together with a reference to what proves it.
#[derive(Clone, Debug, PartialEq)]
pub struct Bound {
    pub value: BoundValue,
    pub witness: String,
}

impl Bound {
    pub fn new(value: BoundValue, witness: impl Into<String>) -> Self {
        Self { value, witness: witness.into() }
    }

    fn to_json(&self) -> Value {
        json!({"value": self.value.to_json(), "witness": self.witness})
    }

    fn from_json(v: &Value) -> Result<Self> {
        Ok(Self {
            value: BoundValue::from_json(v.get("value").ok_or_else(|| Error::Parse("bound without value".into()))?)?,
            witness: v.get("witness").and_then(Value::as_str).unwrap_or_default().into(),
        })
    }
}

/// One finite-`n` data point behind an asymptotic bound.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteRow {
    pub n: usize,
    pub quantity: String,
    pub value: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct BoundReport {
    pub quantity: String,
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
    pub table: Vec<FiniteRow>,
    /// Caller-asserted hypotheses the numbers rest on.
    pub premises: Vec<String>,
    /// Reports implied by this one (e.g. the ω interval).
    pub derived: Vec<BoundReport>,
}

impl BoundReport {
    pub fn new(quantity: impl Into<String>) -> Self {
        Self { quantity: quantity.into(), ..Self::default() }
    }

    /// `lower ≤ upper`, when both are present.
    pub fn is_consistent(&self) -> bool {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => l.value.approx() <= u.value.approx() + 1e-12,
            _ => true,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "quantity": self.quantity,
            "lower": self.lower.as_ref().map(Bound::to_json),
            "upper": self.upper.as_ref().map(Bound::to_json),
            "table": self.table.iter().map(|r| json!({
                "n": r.n, "quantity": r.quantity, "value": r.value, "witness": r.witness,
            })).collect::<Vec<_>>(),
            "premises": self.premises,
            "derived": self.derived.iter().map(BoundReport::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let quantity =
            v.get("quantity").and_then(Value::as_str).ok_or_else(|| Error::Parse("report without `quantity`".into()))?;
        let bound = |key: &str| match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(b) => Bound::from_json(b).map(Some),
        };
        let text = |r: &Value, key: &str| r.get(key).and_then(Value::as_str).unwrap_or_default().to_string();
        let table = v
            .get("table")
            .and_then(Value::as_array)
            .map(|rows| {
                rows.iter()
                    .map(|r| FiniteRow {
                        n: r.get("n").and_then(Value::as_u64).unwrap_or(0) as usize,
                        quantity: text(r, "quantity"),
                        value: text(r, "value"),
                        witness: text(r, "witness"),
                    })
                    .collect()
            })
            .unwrap_or_default();
        let premises = v
            .get("premises")
            .and_then(Value::as_array)
            .map(|p| p.iter().filter_map(Value::as_str).map(String::from).collect())
            .unwrap_or_default();
        let derived = match v.get("derived").and_then(Value::as_array) {
            Some(list) => list.iter().map(Self::from_json).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        Ok(Self { quantity: quantity.into(), lower: bound("lower")?, upper: bound("upper")?, table, premises, derived })
    }
}

const HEADER: [&str; 5] = ["quantity", "bound", "exact", "approx", "witness"];

/// Fixed-width text table: one row per present bound, derived reports
/// after their parent.
pub fn render_report(report: &BoundReport) -> String {
    let mut rows: Vec<[String; 5]> = Vec::new();
    fn collect(r: &BoundReport, rows: &mut Vec<[String; 5]>) {
        for (side, b) in [("lower", &r.lower), ("upper", &r.upper)] {
            if let Some(b) = b {
                rows.push([
                    r.quantity.clone(),
                    side.into(),
                    b.value.to_string(),
                    format!("{:.6}", b.value.approx()),
                    b.witness.clone(),
                ]);
            }
        }
        for d in &r.derived {
            collect(d, rows);
        }
    }
    if !report.quantity.is_empty() {
        collect(report, &mut rows);
    }
    let mut widths = HEADER.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(cell);
            } else {
                s.push_str(&format!("{cell:<w$}  "));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&HEADER.map(String::from));
    for row in &rows {
        out.push_str(&line(row));
    }
    out
}

/// A decomposition of `t` into simple tensors: an exact rank factorization
/// of the first flattening, recursing on a basis of the slice span. The factor
/// sliced first is chosen to minimize the number of terms.
pub fn slice_decomposition(t: &Tensor<QComplex>) -> Result<Decomposition> {
    fn rec(t: &Tensor<QComplex>) -> Result<Decomposition> {
        match t.order() {
            1 => Ok(if t.is_zero() { vec![] } else { vec![vec![(0..t.dims()[0]).map(|i| t.get(&[i])).collect()]] }),
            2 => {
                let (c, r) = rank_factorization(&t.flatten(&[0])?);
                Ok((0..c.cols())
                    .map(|l| vec![(0..c.rows()).map(|i| c.get(i, l).clone()).collect(), r.row(l).to_vec()])
                    .collect())
            }
            k => {
                // t = Σ_l c_l ⊗ S_l over a basis of the slice span.
                let (c, r) = rank_factorization(&t.flatten(&[0])?);
                let rest = t.dims()[1..].to_vec();
                let mut out = Vec::new();
                for l in 0..c.cols() {
                    let entries = r.row(l).iter().enumerate().filter(|(_, v)| !v.is_zero());
                    let slice = Tensor::from_entries(rest.clone(), entries.map(|(f, v)| (unpack(f, &rest), v.clone())))?;
                    let col: Vec<QComplex> = (0..c.rows()).map(|i| c.get(i, l).clone()).collect();
                    for mut term in rec(&slice)? {
                        debug_assert_eq!(term.len(), k - 1);
                        term.insert(0, col.clone());
                        out.push(term);
                    }
                }
                Ok(out)
            }
        }
    }
    let k = t.order();
    let mut best: Option<Decomposition> = None;
    for first in 0..k {
        let perm: Vec<usize> = std::iter::once(first).chain((0..k).filter(|&j| j != first)).collect();
        let terms = rec(&t.permute(&perm)?)?;
        if best.as_ref().is_none_or(|b| terms.len() < b.len()) {
            // Undo the permutation on each term.
            let restored = terms
                .into_iter()
                .map(|term| {
                    let mut out = vec![Vec::new(); k];
                    for (slot, v) in perm.iter().zip(term) {
                        out[*slot] = v;
                    }
                    out
                })
                .collect();
            best = Some(restored);
        }
    }
    let best = best.unwrap_or_default();
    if Tensor::from_simple_terms(t.dims().to_vec(), &best)? != *t {
        return Err(Error::Verification("slice decomposition does not reproduce the tensor".into()));
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug)]
pub struct BoundOptions {
    pub trials: usize,
    pub seed: u64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { trials: 64, seed: 0 }
    }
}

fn rational(q: &BigRational) -> BoundValue {
    BoundValue::Rational(q.clone())
}

fn keep_max(slot: &mut Option<(BigRational, String)>, value: BigRational, witness: String) {
    if slot.as_ref().is_none_or(|(v, _)| value > *v) {
        *slot = Some((value, witness));
    }
}

fn keep_min(slot: &mut Option<(BigRational, String)>, value: BigRational, witness: String) {
    if slot.as_ref().is_none_or(|(v, _)| value < *v) {
        *slot = Some((value, witness));
    }
}

fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Bounds on the disjoint asymptotic rank.
///
/// Lower: the best of the gauge points and, for order 3, the Koszul ratios
/// for every `p`. Upper: the least `r` of a catalog degeneration from
/// `GHZ_r` or a catalog decomposition matching `t` up to padding, and the
/// verified slice decomposition of `t`.
pub fn disjoint_rank_bounds(t: &Tensor<QComplex>, catalog: &Catalog, opts: &BoundOptions) -> Result<BoundReport> {
    let mut report = BoundReport::new("R_disjoint(t)");
    if t.is_zero() {
        report.lower = Some(Bound::new(BoundValue::int(0), "zero tensor"));
        report.upper = Some(Bound::new(BoundValue::int(0), "zero tensor"));
        return Ok(report);
    }
    let mut lower = None;
    for (j, g) in gauge_points(t)?.into_iter().enumerate() {
        keep_max(&mut lower, int(g), format!("gauge point {}", j + 1));
    }
    if t.order() == 3 {
        for p in 0..t.dims()[2] {
            let spec = KoszulSpec::new(t.dims()[2], p)?;
            let r = flattening_ratio(t, &spec, opts.trials, opts.seed)?;
            report.table.push(FiniteRow {
                n: 1,
                quantity: format!("koszul p={p}"),
                value: format!("{}/{}", r.rank, r.simple_rank),
                witness: format!("koszul d3={} p={p}", spec.d3),
            });
            keep_max(&mut lower, r.ratio, format!("koszul p={p} rank {}/{}", r.rank, r.simple_rank));
        }
    }
    let mut upper = None;
    for entry in catalog.entries() {
        if entry.tensor.order() != t.order() || !entry.tensor.equal_up_to_padding(t)? {
            continue;
        }
        if let Some(r) = entry.border_rank_witness() {
            keep_min(&mut upper, int(r), format!("catalog:{} (degeneration from GHZ_{r})", entry.id));
        }
        if let Some(r) = entry.rank_witness() {
            keep_min(&mut upper, int(r), format!("catalog:{} ({r}-term decomposition)", entry.id));
        }
    }
    let slices = slice_decomposition(t)?;
    keep_min(&mut upper, int(slices.len()), format!("slice decomposition ({} terms)", slices.len()));
    report.lower = lower.map(|(v, w)| Bound::new(rational(&v), w));
    report.upper = upper.map(|(v, w)| Bound::new(rational(&v), w));
    Ok(report)
}

/// Whether `a^{1/n} < b^{1/m}`, exactly.
fn root_less(a: usize, n: u32, b: usize, m: u32) -> bool {
    BigInt::from(a).pow(m) < BigInt::from(b).pow(n)
}

/// Bounds on the Strassen asymptotic rank from rank decompositions of the
/// Kronecker powers `t^{⊠n}`, `n ≤ n_max`, and the max gauge point.
///
/// For `MaMu(2)` the implied interval for ω is attached as a derived report.
pub fn strassen_rank_bounds(t: &Tensor<QComplex>, n_max: usize, catalog: &Catalog) -> Result<BoundReport> {
    let mut report = BoundReport::new("R_strassen(t)");
    if t.is_zero() {
        report.lower = Some(Bound::new(BoundValue::int(0), "zero tensor"));
        report.upper = Some(Bound::new(BoundValue::int(0), "zero tensor"));
        return Ok(report);
    }
    let gauge = gauge_points(t)?;
    let (j, &g) = gauge.iter().enumerate().max_by_key(|(j, g)| (**g, std::cmp::Reverse(*j))).expect("order ≥ 1");
    report.lower = Some(Bound::new(BoundValue::int(g), format!("gauge point {}", j + 1)));

    let mut best: Option<(usize, u32, String)> = None;
    let consider = |r: usize, n: u32, witness: String, best: &mut Option<(usize, u32, String)>| {
        if best.as_ref().is_none_or(|(br, bn, _)| root_less(r, n, *br, *bn)) {
            *best = Some((r, n, witness));
        }
    };
    let slices = slice_decomposition(t)?;
    report.table.push(FiniteRow {
        n: 1,
        quantity: "R(t)".into(),
        value: format!("<= {}", slices.len()),
        witness: "slice decomposition".into(),
    });
    consider(slices.len(), 1, format!("slice decomposition ({} terms)", slices.len()), &mut best);

    let mut power = t.clone();
    for n in 1..=n_max.max(1) {
        if n > 1 {
            let nnz = power.nnz().checked_mul(t.nnz());
            if nnz.is_none_or(|x| x > MAX_STRUCTURE_VOLUME) {
                break;
            }
            power = power.kron(t)?;
        }
        for entry in catalog.entries() {
            let Some(r) = entry.rank_witness() else { continue };
            if entry.tensor.order() != power.order() || !entry.tensor.equal_up_to_padding(&power)? {
                continue;
            }
            report.table.push(FiniteRow {
                n,
                quantity: format!("R(t^{n})"),
                value: format!("<= {r}"),
                witness: format!("catalog:{}", entry.id),
            });
            consider(r, n as u32, format!("catalog:{} ({r}-term decomposition of t^{n})", entry.id), &mut best);
        }
    }
    if let Some((r, n, w)) = best {
        report.upper = Some(Bound::new(BoundValue::Root { radicand: r, n }, w));
    }
    if *t == mamu(2) {
        report.derived.push(omega_from_mamu2(&report));
    }
    Ok(report)
}

/// `ω = log₂ R̰(MaMu(2))`, so the rank bounds on `MaMu(2)` bound ω.
fn omega_from_mamu2(r: &BoundReport) -> BoundReport {
    let mut omega = BoundReport::new("omega");
    if let Some(l) = &r.lower {
        if let BoundValue::Rational(q) = &l.value {
            if let Some(v) = q.to_integer().to_usize().filter(|_| q.is_integer()) {
                omega.lower = Some(Bound::new(BoundValue::Log2 { radicand: v, n: 1 }, format!("log2 of {}", l.witness)));
            }
        }
    }
    if let Some(u) = &r.upper {
        if let BoundValue::Root { radicand, n } = u.value {
            omega.upper = Some(Bound::new(BoundValue::Log2 { radicand, n }, format!("log2 of {}", u.witness)));
        }
    }
    omega.premises.push(format!("omega = log2 of the asymptotic rank of MaMu(2) ({STRASSEN_ID})"));
    omega
}

/// `log₂(α/β)` from the caller's premises `GHZ_α ≳ t` and `t ≳ β·EPR₂Δ`-type
/// statements; the premises themselves are not checked.
pub fn omega_bound(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha <= 0.0 || beta <= 0.0 {
        return Err(Error::InvalidParameter(format!("α={alpha} and β={beta} must be positive")));
    }
    if alpha < beta {
        return Err(Error::InvalidParameter(format!("need α ≥ β, got α={alpha} < β={beta}")));
    }
    Ok((alpha / beta).log2())
}

pub fn omega_report(alpha: f64, beta: f64, premises: Vec<String>) -> Result<BoundReport> {
    let value = omega_bound(alpha, beta)?;
    let mut r = BoundReport::new("omega");
    let exact = (alpha.fract() == 0.0 && beta == 1.0 && alpha <= usize::MAX as f64)
        .then_some(BoundValue::Log2 { radicand: alpha as usize, n: 1 });
    r.upper = Some(Bound::new(exact.unwrap_or(BoundValue::Float(value)), format!("omega_bound({alpha}, {beta})")));
    r.premises = premises;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeObstruction {
    pub covering: u32,
    pub rank_source: usize,
    pub rank_target: usize,
    /// `rk F(t^{⊠c}) < rk F(t′^{⊠c})`: no lattice restriction `t ≳ t′`.
    pub obstructed: bool,
}

/// Compare `c`-fold product Koszul ranks of `t^{⊠c}` and `t′^{⊠c}`.
pub fn lattice_obstruction(
    t: &Tensor<QComplex>,
    target: &Tensor<QComplex>,
    covering: u32,
    spec: &KoszulSpec,
) -> Result<LatticeObstruction> {
    if t.order() != 3 || target.order() != 3 {
        return Err(Error::ShapeMismatch("lattice obstruction needs order-3 tensors".into()));
    }
    if covering == 0 {
        return Err(Error::InvalidParameter("covering must be positive".into()));
    }
    let rank = |x: &Tensor<QComplex>| -> Result<usize> {
        let spec_x = KoszulSpec::new(x.dims()[2], spec.p)?;
        if spec_x.d3 != spec.d3 {
            return Err(Error::ShapeMismatch(format!("third dimension {} but spec has {}", spec_x.d3, spec.d3)));
        }
        let power = x.kron_power(covering as usize)?;
        koszul_flatten_power(&power, spec, covering)?.rank()
    };
    let (rank_source, rank_target) = (rank(t)?, rank(target)?);
    Ok(LatticeObstruction { covering, rank_source, rank_target, obstructed: rank_source < rank_target })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeConstruction {
    pub hypergraph: Hypergraph,
    pub source: Tensor<QComplex>,
    pub target: Tensor<QComplex>,
    pub summands: usize,
    pub certificate: RestrictionCertificate,
}

fn check_volume(dims: &[usize]) -> Result<()> {
    let vol = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    if vol.is_none_or(|v| v > MAX_STRUCTURE_VOLUME) {
        return Err(Error::TooLarge(format!("structure tensor with dims {dims:?} exceeds {MAX_STRUCTURE_VOLUME} entries")));
    }
    Ok(())
}

/// From `t ⊵ t′`, build a verified restriction `⊕^{s} t_{H_n} ≥ t′_{H_n}`.
///
/// Every vertex gets the Kronecker product of the certificate maps of its
/// incidences; the combined degeneration has degrees `(n·d, ≤ n·e)` and is
/// interpolated once.
pub fn lattice_construction(
    t: &Tensor<QComplex>,
    target: &Tensor<QComplex>,
    cert: &DegenerationCertificate,
    family: Family,
    n: usize,
) -> Result<LatticeConstruction> {
    let check = verify_degeneration(t, target, cert)?;
    if !check.ok {
        return Err(Error::Verification("degeneration certificate does not verify".into()));
    }
    let h = make_family(family, n, t.order())?;
    let inc = h.incidences();
    for x in [t, target] {
        let dims: Vec<usize> = inc.iter().map(|l| l.iter().map(|&(pos, _)| x.dims()[pos]).product()).collect();
        check_volume(&dims)?;
    }
    let source = build_structure(&h, &EdgeAssignment::broadcast(t, h.edge_count()))?;
    let goal = build_structure(&h, &EdgeAssignment::broadcast(target, h.edge_count()))?;
    let maps: Vec<Matrix<EpsPoly>> = inc
        .iter()
        .map(|list| {
            list.iter().fold(Matrix::identity(1), |acc: Matrix<EpsPoly>, &(pos, _)| acc.kron(&cert.maps[pos]))
        })
        .collect();
    let edges = h.edge_count() as u32;
    let combined = DegenerationCertificate::new(maps, edges * check.d, edges * check.e);
    let certificate = interpolate(&source, &goal, &combined)?;
    let summands = certificate.maps[0].cols() / source.dims()[0];
    let padded = source.direct_power(summands)?;
    if !verify_restriction(&padded, &goal, &certificate)? {
        return Err(Error::Verification("constructed lattice certificate does not verify".into()));
    }
    Ok(LatticeConstruction { hypergraph: h, source, target: goal, summands, certificate })
}
