//! Restriction and degeneration: certificates, exact verification,
//! interpolation of a degeneration into a direct-sum restriction, the
//! 2×2×2 orbit classifier and a numeric restriction search.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::io::{matrix_from_json, matrix_to_json};
use crate::linalg::{rationalize, solve, Rank};
use crate::matrix::Matrix;
use crate::obstructions::hyperdeterminant_222;
use crate::scalar::{EpsPoly, QComplex, Scalar};
use crate::tensor::Tensor;

/// Maps `m_j : ℂ^{d_j} → ℂ^{d′_j}` witnessing `t ≥ t′`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionCertificate {
    pub maps: Vec<Matrix<QComplex>>,
}

/// ε-polynomial maps witnessing `t ⊵ t′` with declared degrees `d` and `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationCertificate {
    pub maps: Vec<Matrix<EpsPoly>>,
    pub d: u32,
    pub e: u32,
}

/// Outcome of [`verify_degeneration`]: measured degrees and the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegenerationCheck {
    pub ok: bool,
    pub d: u32,
    pub e: u32,
}

fn maps_to_json<S: crate::io::JsonScalar>(maps: &[Matrix<S>]) -> Value {
    Value::Array(maps.iter().map(matrix_to_json).collect())
}

fn maps_from_json<S: crate::io::JsonScalar>(v: &Value) -> Result<Vec<Matrix<S>>> {
    v.get("maps")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("certificate without `maps` array".into()))?
        .iter()
        .map(matrix_from_json)
        .collect()
}

fn check_kind(v: &Value, kind: &str) -> Result<()> {
    match v.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => Ok(()),
        Some(k) => Err(Error::Parse(format!("expected a {kind} certificate, found `{k}`"))),
        None => Err(Error::Parse("certificate without `kind`".into())),
    }
}

impl RestrictionCertificate {
    pub fn new(maps: Vec<Matrix<QComplex>>) -> Self {
        Self { maps }
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { maps: dims.iter().map(|&d| Matrix::identity(d)).collect() }
    }

    /// Certificate for `t ≥ v` from `self: t ≥ u` and `next: u ≥ v`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.maps.len() != next.maps.len() {
            return Err(Error::OrderMismatch(self.maps.len(), next.maps.len()));
        }
        let maps = self.maps.iter().zip(&next.maps).map(|(a, b)| b.matmul(a)).collect::<Result<_>>()?;
        Ok(Self { maps })
    }

    /// Number of direct summands of the source when it is `⊕ʳ t`.
    pub fn source_dims(&self) -> Vec<usize> {
        self.maps.iter().map(Matrix::cols).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"kind": "restriction", "maps": maps_to_json(&self.maps)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        check_kind(v, "restriction")?;
        Ok(Self { maps: maps_from_json(v)? })
    }
}

impl DegenerationCertificate {
    pub fn new(maps: Vec<Matrix<EpsPoly>>, d: u32, e: u32) -> Self {
        Self { maps, d, e }
    }

    /// A restriction viewed as a degeneration with `d = e = 0`.
    pub fn from_restriction(r: &RestrictionCertificate) -> Self {
        Self { maps: r.maps.iter().map(Matrix::to_eps).collect(), d: 0, e: 0 }
    }

    pub fn to_json(&self) -> Value {
        json!({"kind": "degeneration", "maps": maps_to_json(&self.maps), "d": self.d, "e": self.e})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        check_kind(v, "degeneration")?;
        let deg = |key: &str| -> Result<u32> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as u32)
                .ok_or_else(|| Error::Parse(format!("degeneration certificate without natural `{key}`")))
        };
        Ok(Self { maps: maps_from_json(v)?, d: deg("d")?, e: deg("e")? })
    }
}

fn check_shapes<S: Scalar, T: Scalar>(t: &Tensor<QComplex>, target: &Tensor<S>, maps: &[Matrix<T>]) -> Result<()> {
    if maps.len() != t.order() || target.order() != t.order() {
        return Err(Error::ShapeMismatch(format!(
            "{} maps between tensors of order {} and {}",
            maps.len(),
            t.order(),
            target.order()
        )));
    }
    for (j, m) in maps.iter().enumerate() {
        if m.shape() != (target.dims()[j], t.dims()[j]) {
            return Err(Error::ShapeMismatch(format!(
                "map {j} is {}x{} but must be {}x{}",
                m.rows(),
                m.cols(),
                target.dims()[j],
                t.dims()[j]
            )));
        }
    }
    Ok(())
}

/// `(⊗ m_j) t == t′` exactly.
pub fn verify_restriction(t: &Tensor<QComplex>, target: &Tensor<QComplex>, cert: &RestrictionCertificate) -> Result<bool> {
    check_shapes(t, target, &cert.maps)?;
    Ok(t.apply(&cert.maps)? == *target)
}

/// Expand `(⊗ m_j(ε)) t` and compare its lowest coefficient with `t′`.
///
/// `ok` requires the lowest coefficient to equal `t′`, the measured `d` to
/// equal the declared one, and the measured error degree to stay within
/// the declared `e`.
pub fn verify_degeneration(
    t: &Tensor<QComplex>,
    target: &Tensor<QComplex>,
    cert: &DegenerationCertificate,
) -> Result<DegenerationCheck> {
    check_shapes(t, target, &cert.maps)?;
    let expanded = t.to_eps().apply(&cert.maps)?;
    let coeffs = expanded.coefficients();
    let (Some((&d, lowest)), Some(&top)) = (coeffs.iter().next(), coeffs.keys().next_back()) else {
        return Err(Error::Verification("the maps send the source to zero".into()));
    };
    let e = top - d;
    let ok = lowest == target && d == cert.d && e <= cert.e;
    Ok(DegenerationCheck { ok, d, e })
}

/// Interpolation points `1, 2, …, e+1` and the weights `λ_a / ε_a^d` that
/// extract the `ε^d` coefficient from the values at those points.
pub fn interpolation_weights(d: u32, e: u32) -> Vec<(QComplex, QComplex)> {
    let points: Vec<QComplex> = (1..=e as i64 + 1).map(QComplex::from_int).collect();
    points
        .iter()
        .enumerate()
        .map(|(a, ea)| {
            let lambda = points.iter().enumerate().filter(|(b, _)| *b != a).fold(QComplex::one(), |acc, (_, eb)| {
                let w = eb.div(&eb.sub(ea)).expect("distinct points");
                acc.mul(&w)
            });
            let weight = lambda.div(&ea.pow(d)).expect("nonzero point");
            (ea.clone(), weight)
        })
        .collect()
}

/// Turn a degeneration `t ⊵ t′` with error degree `e` into a restriction
/// `⊕^{e+1} t ≥ t′`.
///
/// Factor `j` of the output is `[m_j(ε₀) | ⋯ | m_j(ε_e)]`; on the first
/// factor each block is scaled by its interpolation weight.
pub fn interpolate(
    t: &Tensor<QComplex>,
    target: &Tensor<QComplex>,
    cert: &DegenerationCertificate,
) -> Result<RestrictionCertificate> {
    let check = verify_degeneration(t, target, cert)?;
    if !check.ok {
        return Err(Error::Verification(format!(
            "degeneration certificate does not verify (measured d={}, e={}; declared d={}, e={})",
            check.d, check.e, cert.d, cert.e
        )));
    }
    let weights = interpolation_weights(check.d, check.e);
    let maps = cert
        .maps
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let blocks: Vec<Matrix<QComplex>> = weights
                .iter()
                .map(|(point, w)| {
                    let b = m.eval(point);
                    if j == 0 {
                        b.scale(w)
                    } else {
                        b
                    }
                })
                .collect();
            Matrix::hstack(&blocks)
        })
        .collect::<Result<_>>()?;
    Ok(RestrictionCertificate { maps })
}

/// SLOCC orbits of 2×2×2 tensors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitClass222 {
    Zero,
    Product,
    Epr12,
    Epr13,
    Epr23,
    W,
    Ghz,
}

impl OrbitClass222 {
    pub const ALL: [Self; 7] = [Self::Zero, Self::Product, Self::Epr12, Self::Epr13, Self::Epr23, Self::W, Self::Ghz];

    pub fn name(self) -> &'static str {
        match self {
            Self::Zero => "Zero",
            Self::Product => "Product",
            Self::Epr12 => "EPR_12",
            Self::Epr13 => "EPR_13",
            Self::Epr23 => "EPR_23",
            Self::W => "W",
            Self::Ghz => "GHZ",
        }
    }

    /// A canonical representative.
    pub fn representative(self) -> Tensor<QComplex> {
        let ones = |idx: &[[usize; 3]]| {
            Tensor::from_ones(vec![2, 2, 2], idx.iter().map(|i| i.to_vec())).expect("static representative")
        };
        match self {
            Self::Zero => Tensor::zeros(vec![2, 2, 2]).expect("static"),
            Self::Product => ones(&[[0, 0, 0]]),
            Self::Epr12 => ones(&[[0, 0, 0], [1, 1, 0]]),
            Self::Epr13 => ones(&[[0, 0, 0], [1, 0, 1]]),
            Self::Epr23 => ones(&[[0, 0, 0], [0, 1, 1]]),
            Self::W => ones(&[[0, 0, 1], [0, 1, 0], [1, 0, 0]]),
            Self::Ghz => ones(&[[0, 0, 0], [1, 1, 1]]),
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Product => 1,
            Self::Epr12 | Self::Epr13 | Self::Epr23 | Self::Ghz => 2,
            Self::W => 3,
        }
    }

    pub fn border_rank(self) -> usize {
        match self {
            Self::W => 2,
            other => other.rank(),
        }
    }

    pub fn subrank(self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Ghz => 2,
            _ => 1,
        }
    }

    fn restricts_to(self, other: Self) -> bool {
        use OrbitClass222::*;
        match (self, other) {
            (_, Zero) => true,
            (Zero, _) => false,
            (_, Product) => true,
            (a, b) if a == b => true,
            (W | Ghz, Epr12 | Epr13 | Epr23) => true,
            _ => false,
        }
    }

    fn degenerates_to(self, other: Self) -> bool {
        self.restricts_to(other) || (self == Self::Ghz && other == Self::W)
    }
}

impl fmt::Display for OrbitClass222 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_222(t: &Tensor<QComplex>) -> Result<()> {
    if t.dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch(format!("expected dims (2,2,2), got {:?}", t.dims())));
    }
    Ok(())
}

pub fn classify_222(t: &Tensor<QComplex>) -> Result<OrbitClass222> {
    check_222(t)?;
    if t.is_zero() {
        return Ok(OrbitClass222::Zero);
    }
    if !hyperdeterminant_222(t)?.is_zero() {
        return Ok(OrbitClass222::Ghz);
    }
    let r: Vec<usize> = (0..3).map(|j| t.flatten(&[j])?.rank()).collect::<Result<_>>()?;
    Ok(match (r[0], r[1], r[2]) {
        (1, 1, 1) => OrbitClass222::Product,
        (2, 2, 1) => OrbitClass222::Epr12,
        (2, 1, 2) => OrbitClass222::Epr13,
        (1, 2, 2) => OrbitClass222::Epr23,
        (2, 2, 2) => OrbitClass222::W,
        other => unreachable!("flattening ranks {other:?} cannot occur for a nonzero 2x2x2 tensor"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Restriction,
    Degeneration,
}

/// Decide `t ≥ t′` or `t ⊵ t′` for 2×2×2 tensors from the orbit posets.
pub fn decide_222(t: &Tensor<QComplex>, target: &Tensor<QComplex>, mode: Mode) -> Result<bool> {
    let (a, b) = (classify_222(t)?, classify_222(target)?);
    Ok(match mode {
        Mode::Restriction => a.restricts_to(b),
        Mode::Degeneration => a.degenerates_to(b),
    })
}

pub fn rank_222(t: &Tensor<QComplex>) -> Result<usize> {
    classify_222(t).map(OrbitClass222::rank)
}

pub fn subrank_222(t: &Tensor<QComplex>) -> Result<usize> {
    classify_222(t).map(OrbitClass222::subrank)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlsInit {
    /// Independent standard complex Gaussian entries.
    Random,
    /// Identity-like maps (ones on the diagonal), then random restarts.
    Identity,
}

#[derive(Clone, Copy, Debug)]
pub struct AlsOptions {
    pub iterations: usize,
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    pub init: AlsInit,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self { iterations: 200, restarts: 50, tol: 1e-12, seed: 0, init: AlsInit::Random }
    }
}

/// Best candidate found by [`heuristic_restriction_search`]. A small
/// residual is evidence, never proof; a large one proves nothing either.
#[derive(Clone, Debug)]
pub struct AlsResult {
    pub maps: Vec<Matrix<Complex64>>,
    pub residual: f64,
    pub restart: usize,
    pub iterations: usize,
}

fn residual(t: &Tensor<Complex64>, target: &Tensor<Complex64>, maps: &[Matrix<Complex64>]) -> Result<f64> {
    let image = t.apply(maps)?;
    let diff = image.add(&target.scale(&Complex64::new(-1.0, 0.0)))?;
    Ok(diff.entries().map(|(_, v)| v.norm_sqr()).sum())
}

fn pinv(m: &Matrix<Complex64>) -> Matrix<Complex64> {
    let a = m.to_nalgebra();
    let svd = a.svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = smax * 1e-12;
    let (u, vt) = (svd.u.expect("computed"), svd.v_t.expect("computed"));
    let mut out = nalgebra::DMatrix::<Complex64>::zeros(m.cols(), m.rows());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            let v = vt.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (v * uk).scale(1.0 / s);
        }
    }
    Matrix::from_nalgebra(&out)
}

/// One ALS sweep over all factors.
fn als_sweep(t: &Tensor<Complex64>, target: &Tensor<Complex64>, maps: &mut [Matrix<Complex64>]) -> Result<()> {
    for j in 0..maps.len() {
        let mut partial = maps.to_vec();
        partial[j] = Matrix::identity(t.dims()[j]);
        let u = t.apply(&partial)?.flatten(&[j])?;
        let want = target.flatten(&[j])?;
        maps[j] = want.matmul(&pinv(&u))?;
    }
    Ok(())
}

/// Alternating least squares over the factor maps, minimizing
/// `‖(⊗ m_j) t − t′‖²` across restarts.
pub fn heuristic_restriction_search(
    t: &Tensor<QComplex>,
    target: &Tensor<QComplex>,
    opts: &AlsOptions,
) -> Result<AlsResult> {
    if t.order() != target.order() {
        return Err(Error::OrderMismatch(t.order(), target.order()));
    }
    let (tf, gf) = (t.to_float(), target.to_float());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<AlsResult> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut maps: Vec<Matrix<Complex64>> = t
            .dims()
            .iter()
            .zip(target.dims())
            .map(|(&d, &dp)| match (opts.init, restart) {
                (AlsInit::Identity, 0) => Matrix::from_fn(dp, d, |r, c| {
                    if r == c {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }),
                _ => Matrix::from_fn(dp, d, |_, _| {
                    Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
                }),
            })
            .collect();
        let mut res = residual(&tf, &gf, &maps)?;
        let mut iterations = 0;
        while res > opts.tol && iterations < opts.iterations {
            als_sweep(&tf, &gf, &mut maps)?;
            res = residual(&tf, &gf, &maps)?;
            iterations += 1;
        }
        if best.as_ref().is_none_or(|b| res < b.residual) {
            best = Some(AlsResult { maps, residual: res, restart, iterations });
        }
        if res <= opts.tol {
            break;
        }
    }
    Ok(best.expect("at least one restart"))
}

fn snap(x: Complex64, max_den: u64) -> QComplex {
    QComplex::new(rationalize(x.re, max_den), rationalize(x.im, max_den))
}

/// Try to turn a numeric candidate into an exact certificate: snap every
/// entry to a nearby rational, then re-solve one factor exactly with the
/// others fixed. Returns the first candidate that verifies exactly.
pub fn rationalize_candidate(
    t: &Tensor<QComplex>,
    target: &Tensor<QComplex>,
    candidate: &AlsResult,
    max_den: u64,
) -> Result<Option<RestrictionCertificate>> {
    let snapped: Vec<Matrix<QComplex>> = candidate.maps.iter().map(|m| m.map(|&x| snap(x, max_den))).collect();
    let cert = RestrictionCertificate::new(snapped.clone());
    if verify_restriction(t, target, &cert)? {
        return Ok(Some(cert));
    }
    for j in 0..snapped.len() {
        let mut partial = snapped.clone();
        partial[j] = Matrix::identity(t.dims()[j]);
        let u = t.apply(&partial)?.flatten(&[j])?;
        let want = target.flatten(&[j])?;
        if let Some(x) = solve(&u.transpose(), &want.transpose())? {
            let mut maps = snapped.clone();
            maps[j] = x.transpose();
            let cert = RestrictionCertificate::new(maps);
            if verify_restriction(t, target, &cert)? {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}
