//! Dense matrices over any scalar domain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{EpsPoly, QComplex, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>, // row-major
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(Self { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Nonzero entries `(row, value)` of column `c`.
    pub fn column_support(&self, c: usize) -> Vec<(usize, S)> {
        (0..self.rows)
            .filter_map(|r| {
                let v = self.get(r, c);
                (!v.is_zero()).then(|| (r, v.clone()))
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product, `self` indexing the most significant block.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let a = self.get(r / other.rows, c / other.cols);
            if a.is_zero() {
                return S::zero();
            }
            a.mul(other.get(r % other.rows, c % other.cols))
        })
    }

    /// Side-by-side concatenation `[a | b | ...]`.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::ShapeMismatch("hstack blocks have different row counts".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for r in 0..rows {
                for c in 0..b.cols {
                    out.set(r, offset + c, b.get(r, c).clone());
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    pub fn block_diag(blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(ro + r, co + c, b.get(r, c).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v.mul(s)).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl Matrix<QComplex> {
    pub fn to_float(&self) -> Matrix<Complex64> {
        self.map(QComplex::to_complex64)
    }

    pub fn to_eps(&self) -> Matrix<EpsPoly> {
        self.map(|q| EpsPoly::constant(q.clone()))
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<QComplex>> =
            rows.iter().map(|r| r.iter().map(|&v| QComplex::from_int(v)).collect()).collect();
        Self::from_rows(rows).expect("rectangular literal")
    }
}

impl Matrix<EpsPoly> {
    /// Substitute ε := `at`.
    pub fn eval(&self, at: &QComplex) -> Matrix<QComplex> {
        self.map(|p| p.eval(at))
    }

    /// Highest ε-degree over all entries (0 for a constant matrix).
    pub fn degree(&self) -> u32 {
        self.data.iter().filter_map(EpsPoly::high_degree).max().unwrap_or(0)
    }
}

impl Matrix<Complex64> {
    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_places_left_factor_most_significant() {
        let a = Matrix::from_ints(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(*k.get(0, 1), QComplex::from_int(1));
        assert_eq!(*k.get(2, 1), QComplex::from_int(3));
        assert_eq!(*k.get(3, 2), QComplex::from_int(4));
        assert_eq!(*k.get(3, 3), QComplex::from_int(0));
    }

    #[test]
    fn matmul_checks_shapes() {
        let a = Matrix::<QComplex>::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        let i = Matrix::<QComplex>::identity(3);
        assert_eq!(a.matmul(&i).unwrap(), a);
    }

    #[test]
    fn hstack_and_block_diag() {
        let a = Matrix::from_ints(&[&[1], &[2]]);
        let b = Matrix::from_ints(&[&[3, 4], &[5, 6]]);
        let h = Matrix::hstack(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(h, Matrix::from_ints(&[&[1, 3, 4], &[2, 5, 6]]));
        let d = Matrix::block_diag(&[a, b]);
        assert_eq!(d.shape(), (4, 3));
        assert_eq!(*d.get(3, 2), QComplex::from_int(6));
    }
}
