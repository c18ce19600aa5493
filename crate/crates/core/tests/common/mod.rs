//! Helpers shared by the integration tests: random exact tensors and maps,
//! and an independent rank oracle (plain rational Gaussian elimination on
//! real matrices, unrelated to the library's fraction-free routine).
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use tpl_core::linalg::determinant;
use tpl_core::{Matrix, QComplex, Scalar, Tensor};

pub fn q(num: i64, den: i64) -> QComplex {
    QComplex::from_frac(num, den)
}

/// Rank of a real rational matrix by textbook elimination.
pub fn rank_oracle(m: &Matrix<QComplex>) -> usize {
    let mut a: Vec<Vec<BigRational>> = m
        .to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| {
                    assert!(x.im.is_zero(), "oracle handles real matrices only");
                    x.re
                })
                .collect()
        })
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for k in c..cols {
                    let v = &a[rank][k] * &f;
                    a[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dense random tensor with entries `k/den`, `|k| ≤ den`, each present with
/// probability `density`.
pub fn random_tensor(rng: &mut impl Rng, dims: &[usize], density: f64, den: i64) -> Tensor<QComplex> {
    let mut entries = Vec::new();
    let total: usize = dims.iter().product();
    for flat in 0..total {
        if rng.random_bool(density) {
            let mut idx = vec![0; dims.len()];
            let mut rest = flat;
            for (slot, &d) in idx.iter_mut().zip(dims).rev() {
                *slot = rest % d;
                rest /= d;
            }
            entries.push((idx, q(rng.random_range(-den..=den), den)));
        }
    }
    Tensor::from_entries(dims.to_vec(), entries).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, den: i64) -> Matrix<QComplex> {
    Matrix::from_fn(rows, cols, |_, _| q(rng.random_range(-den..=den), den))
}

pub fn random_invertible(rng: &mut impl Rng, n: usize) -> Matrix<QComplex> {
    loop {
        let m = random_matrix(rng, n, n, 3);
        if !determinant(&m).unwrap().is_zero() {
            return m;
        }
    }
}

/// Every index tuple of `dims`, row-major.
pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out.into_iter().flat_map(|p| (0..d).map(move |i| [p.clone(), vec![i]].concat())).collect();
    }
    out
}

pub fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
