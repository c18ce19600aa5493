//! Monotones used as obstructions: gauge points, Cayley's hyperdeterminant,
//! Koszul flattenings and point values of the quantum functionals.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{binomial, singular_values, subsets, Rank};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, QComplex, Scalar};
use crate::tensor::{for_each_product, unpack, Tensor};

/// Flattening ranks `rk t_j` for every factor `j`.
pub fn gauge_points<S: Scalar>(t: &Tensor<S>) -> Result<Vec<usize>>
where
    Matrix<S>: Rank,
{
    (0..t.order()).map(|j| t.flatten(&[j])?.rank()).collect()
}

/// Cayley's hyperdeterminant of a 2×2×2 tensor.
pub fn hyperdeterminant_222(t: &Tensor<QComplex>) -> Result<QComplex> {
    if t.dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch(format!("hyperdeterminant needs dims (2,2,2), got {:?}", t.dims())));
    }
    let a = |i: usize, j: usize, k: usize| t.get(&[i, j, k]);
    let (a000, a001, a010, a011) = (a(0, 0, 0), a(0, 0, 1), a(0, 1, 0), a(0, 1, 1));
    let (a100, a101, a110, a111) = (a(1, 0, 0), a(1, 0, 1), a(1, 1, 0), a(1, 1, 1));
    let sq = |x: &QComplex, y: &QComplex| x.mul(y).mul(&x.mul(y));
    let pair = |w: &QComplex, x: &QComplex, y: &QComplex, z: &QComplex| w.mul(x).mul(&y.mul(z));
    let c = QComplex::from_int;

    let mut det = sq(&a000, &a111)
        .add(&sq(&a001, &a110))
        .add(&sq(&a010, &a101))
        .add(&sq(&a100, &a011));
    for (w, x, y, z) in [
        (&a000, &a111, &a011, &a100),
        (&a000, &a111, &a101, &a010),
        (&a000, &a111, &a110, &a001),
        (&a011, &a100, &a101, &a010),
        (&a011, &a100, &a110, &a001),
        (&a101, &a010, &a110, &a001),
    ] {
        det = det.sub(&c(2).mul(&pair(w, x, y, z)));
    }
    det = det.add(&c(4).mul(&a000.mul(&a011).mul(&a101.mul(&a110))));
    det = det.add(&c(4).mul(&a111.mul(&a100).mul(&a010.mul(&a001))));
    Ok(det)
}

/// Koszul flattening on the third factor: `ℂ^{d₃} → Hom(⋀^p, ⋀^{p+1})`,
/// `v ↦ (w ↦ w ∧ v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KoszulSpec {
    pub d3: usize,
    pub p: usize,
}

impl KoszulSpec {
    pub fn new(d3: usize, p: usize) -> Result<Self> {
        if d3 == 0 || p >= d3 {
            return Err(Error::InvalidParameter(format!("Koszul parameter p={p} must satisfy 0 ≤ p < d₃={d3}")));
        }
        Ok(Self { d3, p })
    }

    /// `(dim ⋀^{p+1}, dim ⋀^p)`.
    pub fn wedge_dims(&self) -> (usize, usize) {
        (binomial(self.d3, self.p + 1), binomial(self.d3, self.p))
    }

    /// Rank of the flattening of any nonzero simple tensor: `binom(d₃−1, p)`.
    pub fn simple_rank(&self) -> usize {
        binomial(self.d3 - 1, self.p)
    }
}

/// For basis vector `e_c` and each `p`-subset `w ∌ c` (as an index into the
/// lexicographic list), the index of `w ∪ {c}` among `(p+1)`-subsets and the
/// sign of `e_w ∧ e_c` in that basis.
fn wedge_table(spec: &KoszulSpec) -> Vec<Vec<(usize, usize, bool)>> {
    let lower = subsets(spec.d3, spec.p);
    let upper = subsets(spec.d3, spec.p + 1);
    (0..spec.d3)
        .map(|c| {
            lower
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.contains(&c))
                .map(|(wi, w)| {
                    let mut s = w.clone();
                    s.push(c);
                    s.sort_unstable();
                    let si = upper.binary_search(&s).expect("subset present");
                    let after = w.iter().filter(|&&x| x > c).count();
                    (si, wi, after % 2 == 1)
                })
                .collect()
        })
        .collect()
}

/// The `c`-fold product Koszul flattening of an order-3 tensor whose third
/// factor is `(ℂ^{d₃})^{⊗c}` packed row-major.
///
/// Rows are indexed by `(a, S₁, …, S_c)`, columns by `(b, w₁, …, w_c)`, both
/// row-major. With `c = 1` this is the ordinary Koszul flattening of shape
/// `d₁·binom(d₃,p+1) × d₂·binom(d₃,p)`.
pub fn koszul_flatten_power<S: Scalar>(t: &Tensor<S>, spec: &KoszulSpec, c: u32) -> Result<Matrix<S>> {
    if t.order() != 3 {
        return Err(Error::ShapeMismatch(format!("Koszul flattening needs an order-3 tensor, got order {}", t.order())));
    }
    let radices = vec![spec.d3; c as usize];
    if c == 0 || spec.d3.checked_pow(c) != Some(t.dims()[2]) {
        return Err(Error::ShapeMismatch(format!(
            "third factor has dimension {} but the spec needs {}^{c}",
            t.dims()[2],
            spec.d3
        )));
    }
    let (up, down) = spec.wedge_dims();
    let (up_c, down_c) = (up.pow(c), down.pow(c));
    let rows = t.dims()[0].checked_mul(up_c);
    let cols = t.dims()[1].checked_mul(down_c);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= 100_000 && c <= 100_000 => (r, c),
        _ => return Err(Error::TooLarge("Koszul flattening side exceeds 1e5".into())),
    };
    let table = wedge_table(spec);
    let mut m: Matrix<S> = Matrix::zeros(rows, cols);
    for (idx, v) in t.entries() {
        let digits = unpack(idx[2], &radices);
        let lists: Vec<Vec<(usize, usize, bool)>> = digits.iter().map(|&d| table[d].clone()).collect();
        for_each_product(&lists, |choice| {
            let (mut r, mut col, mut neg) = (idx[0], idx[1], false);
            for &(si, wi, s) in choice {
                r = r * up + si;
                col = col * down + wi;
                neg ^= s;
            }
            let add = if neg { v.neg() } else { v.clone() };
            let cur = m.get(r, col).add(&add);
            m.set(r, col, cur);
        });
    }
    Ok(m)
}

pub fn koszul_flatten<S: Scalar>(t: &Tensor<S>, spec: &KoszulSpec) -> Result<Matrix<S>> {
    koszul_flatten_power(t, spec, 1)
}

/// `rk F(t) / max_s rk F(s)` for a Koszul flattening `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatteningRatio {
    pub rank: usize,
    pub simple_rank: usize,
    pub ratio: BigRational,
}

/// A random simple tensor with dense entries `k/8`, `k ∈ [-8, 8]`.
pub fn random_simple(dims: &[usize], rng: &mut impl Rng) -> Tensor<QComplex> {
    let vecs: Vec<Vec<QComplex>> =
        dims.iter().map(|&d| (0..d).map(|_| QComplex::from_frac(rng.random_range(-8..=8), 8)).collect()).collect();
    Tensor::from_simple_terms(dims.to_vec(), &[vecs]).expect("consistent dims")
}

/// Ratio lower bound for border rank from a Koszul flattening. The
/// denominator is the larger of the closed simple-tensor rank and the
/// ranks of `trials` random simple tensors.
pub fn flattening_ratio(t: &Tensor<QComplex>, spec: &KoszulSpec, trials: usize, seed: u64) -> Result<FlatteningRatio> {
    let rank = koszul_flatten(t, spec)?.rank()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut simple_rank = spec.simple_rank();
    for _ in 0..trials {
        let s = random_simple(t.dims(), &mut rng);
        simple_rank = simple_rank.max(koszul_flatten(&s, spec)?.rank()?);
    }
    let ratio = BigRational::new((rank as i64).into(), (simple_rank as i64).into());
    Ok(FlatteningRatio { rank, simple_rank, ratio })
}

/// A probability vector over the factors.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaWeights(Vec<f64>);

impl ThetaWeights {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        let sum: f64 = theta.iter().sum();
        if theta.is_empty() || theta.iter().any(|&x| x.is_nan() || x < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("θ = {theta:?} is not a probability vector")));
        }
        Ok(Self(theta))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Shannon entropy (bits) of the normalized squared singular values.
fn spectrum_entropy(m: &Matrix<Complex64>) -> f64 {
    let sq: Vec<f64> = singular_values(m).into_iter().map(|s| s * s).collect();
    let total: f64 = sq.iter().sum();
    sq.iter().filter(|&&x| x > 0.0).map(|&x| x / total).map(|p| -p * p.log2()).sum()
}

/// `2^{Σ_j θ_j H(t_j)}` evaluated at `t` itself.
pub fn quantum_functional_point(t: &Tensor<Complex64>, theta: &ThetaWeights) -> Result<f64> {
    if theta.0.len() != t.order() {
        return Err(Error::ShapeMismatch(format!("θ has {} weights for order {}", theta.0.len(), t.order())));
    }
    if t.is_zero() {
        return Err(Error::InvalidParameter("quantum functional of the zero tensor".into()));
    }
    let mut e = 0.0;
    for (j, &w) in theta.0.iter().enumerate() {
        if w > 0.0 {
            e += w * spectrum_entropy(&t.flatten(&[j])?);
        }
    }
    Ok(e.exp2())
}

/// Everything `obstruct` reports for one tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    pub gauge: Vec<usize>,
    pub det222: Option<QComplex>,
    pub koszul: Option<(usize, FlatteningRatio)>,
    pub qf: (Vec<f64>, f64),
}

pub fn obstruction_report(
    t: &Tensor<QComplex>,
    p: Option<usize>,
    theta: &ThetaWeights,
    trials: usize,
    seed: u64,
) -> Result<ObstructionReport> {
    let gauge = gauge_points(t)?;
    let det222 = if t.dims() == [2, 2, 2] { Some(hyperdeterminant_222(t)?) } else { None };
    let koszul = match (p, t.order()) {
        (Some(p), 3) => Some((p, flattening_ratio(t, &KoszulSpec::new(t.dims()[2], p)?, trials, seed)?)),
        (Some(_), k) => return Err(Error::ShapeMismatch(format!("Koszul flattening needs order 3, got {k}"))),
        (None, _) => None,
    };
    let value = quantum_functional_point(&t.to_float(), theta)?;
    Ok(ObstructionReport { gauge, det222, koszul, qf: (theta.0.clone(), value) })
}

impl ObstructionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "gauge": self.gauge,
            "det222": self.det222.as_ref().map(|d| d.to_string()),
            "koszul": self.koszul.as_ref().map(|(p, r)| json!({
                "p": p,
                "rank": r.rank,
                "ratio": format_rational(&r.ratio),
            })),
            "qf": {"theta": self.qf.0, "value": self.qf.1},
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ghz, mamu, w_state};

    #[test]
    fn gauge_points_of_named_tensors() {
        assert_eq!(gauge_points(&ghz(3, 3)).unwrap(), vec![3, 3, 3]);
        assert_eq!(gauge_points(&mamu(2)).unwrap(), vec![4, 4, 4]);
        assert_eq!(gauge_points(&mamu(3)).unwrap(), vec![9, 9, 9]);
        assert_eq!(gauge_points(&w_state()).unwrap(), vec![2, 2, 2]);
    }

    #[test]
    fn hyperdeterminant_values() {
        assert_eq!(hyperdeterminant_222(&w_state()).unwrap(), QComplex::zero());
        assert_eq!(hyperdeterminant_222(&ghz(2, 3)).unwrap(), QComplex::one());
        assert!(hyperdeterminant_222(&ghz(3, 3)).is_err());
    }

    #[test]
    fn koszul_ranks() {
        let spec = KoszulSpec::new(3, 1).unwrap();
        let simple = Tensor::from_ones(vec![3, 3, 3], [vec![0, 0, 0]]).unwrap();
        let f = koszul_flatten(&simple, &spec).unwrap();
        assert_eq!(f.shape(), (9, 9));
        assert_eq!(f.rank().unwrap(), 2);
        assert_eq!(koszul_flatten(&ghz(3, 3), &spec).unwrap().rank().unwrap(), 6);
        assert!(KoszulSpec::new(3, 3).is_err());
        assert!(koszul_flatten(&ghz(2, 3), &spec).is_err());
    }

    #[test]
    fn koszul_p0_is_the_13_flattening() {
        let t = w_state();
        let f = koszul_flatten(&t, &KoszulSpec::new(2, 0).unwrap()).unwrap();
        assert_eq!(f, t.permute(&[0, 2, 1]).unwrap().flatten(&[0, 1]).unwrap());
    }

    #[test]
    fn ratio_of_ghz3() {
        let r = flattening_ratio(&ghz(3, 3), &KoszulSpec::new(3, 1).unwrap(), 8, 1).unwrap();
        assert_eq!((r.rank, r.simple_rank), (6, 2));
        assert_eq!(format_rational(&r.ratio), "3");
    }

    #[test]
    fn theta_validation() {
        assert!(ThetaWeights::new(vec![0.5, 0.6]).is_err());
        assert!(ThetaWeights::new(vec![-0.5, 1.5]).is_err());
        assert!(ThetaWeights::new(vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn functional_of_w() {
        let v = quantum_functional_point(&w_state().to_float(), &ThetaWeights::uniform(3)).unwrap();
        let h = -(1.0f64 / 3.0) * (1.0f64 / 3.0).log2() - (2.0f64 / 3.0) * (2.0f64 / 3.0).log2();
        assert!((v - h.exp2()).abs() < 1e-9);
    }
}
