//! Rank, determinants and exact solves.
//!
//! Exact rank uses fraction-free (Bareiss) elimination over the Gaussian
//! integers after clearing row denominators; every intermediate entry is a
//! minor of the scaled input, so each division is exact. Floating rank
//! counts singular values above `tol · σ_max`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Domain, EpsPoly, QComplex, Scalar};

/// Relative singular-value cutoff for floating rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Matrix rank over the matrix's scalar domain.
pub trait Rank {
    fn rank(&self) -> Result<usize>;
}

impl Rank for Matrix<QComplex> {
    fn rank(&self) -> Result<usize> {
        Ok(exact_rank(self))
    }
}

impl Rank for Matrix<Complex64> {
    fn rank(&self) -> Result<usize> {
        Ok(float_rank(self, DEFAULT_RANK_TOL))
    }
}

impl Rank for Matrix<EpsPoly> {
    fn rank(&self) -> Result<usize> {
        Err(Error::UnsupportedDomain(Domain::EpsPoly))
    }
}

#[derive(Clone, Debug, PartialEq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &Self) -> Self {
        GaussInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    /// Exact quotient; the caller guarantees divisibility.
    fn div_exact(&self, d: &Self) -> Self {
        let n = &d.re * &d.re + &d.im * &d.im;
        let num = self.mul(&GaussInt { re: d.re.clone(), im: -&d.im });
        debug_assert!(num.re.is_multiple_of(&n) && num.im.is_multiple_of(&n), "inexact Bareiss division");
        GaussInt { re: num.re / &n, im: num.im / n }
    }
}

fn clear_row(row: &[QComplex]) -> Vec<GaussInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.re.denom()).lcm(q.im.denom()));
    row.iter()
        .map(|q| GaussInt {
            re: q.re.numer() * (&lcm / q.re.denom()),
            im: q.im.numer() * (&lcm / q.im.denom()),
        })
        .collect()
}

/// Exact rank of a Gaussian-rational matrix.
pub fn exact_rank(m: &Matrix<QComplex>) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<GaussInt>> = (0..rows).map(|r| clear_row(m.row(r))).collect();
    a.retain(|row| row.iter().any(|v| !v.is_zero()));
    let rows = a.len();
    let mut prev = GaussInt { re: BigInt::one(), im: BigInt::zero() };
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for r in rank + 1..rows {
            let lead = a[r][col].clone();
            for c in col + 1..cols {
                let v = pivot.mul(&a[r][c]).sub(&lead.mul(&a[rank][c]));
                a[r][c] = v.div_exact(&prev);
            }
            a[r][col] = GaussInt { re: BigInt::zero(), im: BigInt::zero() };
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

pub fn singular_values(m: &Matrix<Complex64>) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `tol · σ_max`.
pub fn float_rank(m: &Matrix<Complex64>, tol: f64) -> usize {
    let sv = singular_values(m);
    let Some(&max) = sv.first() else { return 0 };
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(a: &mut [Vec<QComplex>], ncols: usize) -> Vec<usize> {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for v in a[r].iter_mut() {
            *v = Scalar::mul(v, &inv);
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..a[i].len() {
                    let v = Scalar::sub(&a[i][j], &Scalar::mul(&f, &a[r][j]));
                    a[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solve `A X = B` exactly. Returns `None` when inconsistent; free
/// variables are set to zero.
pub fn solve(a: &Matrix<QComplex>, b: &Matrix<QComplex>) -> Result<Option<Matrix<QComplex>>> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!("solve: A has {} rows, B has {}", a.rows(), b.rows())));
    }
    let n = a.cols();
    let mut aug: Vec<Vec<QComplex>> =
        (0..a.rows()).map(|r| a.row(r).iter().chain(b.row(r)).cloned().collect()).collect();
    let pivots = rref(&mut aug, n);
    // A zero row of A with nonzero right-hand side means no solution.
    for row in aug.iter().skip(pivots.len()) {
        if row[n..].iter().any(|v| !v.is_zero()) {
            return Ok(None);
        }
    }
    let mut x = Matrix::zeros(n, b.cols());
    for (r, &c) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x.set(c, j, aug[r][n + j].clone());
        }
    }
    Ok(Some(x))
}

/// `M = C·R` with `C` the pivot columns of `M` and `R` the nonzero rows of
/// its reduced echelon form; both have `rank(M)` columns/rows.
pub fn rank_factorization(m: &Matrix<QComplex>) -> (Matrix<QComplex>, Matrix<QComplex>) {
    let mut a = m.to_rows();
    let pivots = rref(&mut a, m.cols());
    let c = Matrix::from_fn(m.rows(), pivots.len(), |r, k| m.get(r, pivots[k]).clone());
    let r = Matrix::from_fn(pivots.len(), m.cols(), |k, col| a[k][col].clone());
    (c, r)
}

pub fn determinant(m: &Matrix<QComplex>) -> Result<QComplex> {
    if m.rows() != m.cols() {
        return Err(Error::ShapeMismatch(format!("determinant of non-square {}x{}", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut det = QComplex::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(QComplex::zero());
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv().expect("nonzero pivot");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let v = &a[i][j] - &(&f * &a[c][j]);
                a[i][j] = v;
            }
        }
    }
    Ok(det)
}

pub fn inverse(m: &Matrix<QComplex>) -> Result<Option<Matrix<QComplex>>> {
    if m.rows() != m.cols() {
        return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
    }
    let x = solve(m, &Matrix::identity(m.rows()))?;
    Ok(x.filter(|x| m.matmul(x).map(|p| p == Matrix::identity(m.rows())).unwrap_or(false)))
}

/// All `p`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        rec(0, n, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The `p`-th compound matrix `∧^p g`: entry `(S, T)` is the minor of `g`
/// on rows `S` and columns `T`, with subsets in lexicographic order.
pub fn compound(g: &Matrix<QComplex>, p: usize) -> Result<Matrix<QComplex>> {
    let row_sets = subsets(g.rows(), p);
    let col_sets = subsets(g.cols(), p);
    let mut out = Matrix::zeros(row_sets.len(), col_sets.len());
    for (i, s) in row_sets.iter().enumerate() {
        for (j, t) in col_sets.iter().enumerate() {
            let minor = Matrix::from_fn(p, p, |r, c| g.get(s[r], t[c]).clone());
            out.set(i, j, determinant(&minor)?);
        }
    }
    Ok(out)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn rationalize(x: f64, max_den: u64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    let neg = x < 0.0;
    let y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut frac = y;
    loop {
        let a = frac.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as u128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as u128 {
            // Semiconvergent with the largest admissible coefficient.
            let k = (max_den as u128 - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            if q1 != 0 && qs != 0 && (ps as f64 / qs as f64 - y).abs() < (p1 as f64 / q1 as f64 - y).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rem = frac - a;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if q1 == 0 {
        return BigRational::zero();
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}
