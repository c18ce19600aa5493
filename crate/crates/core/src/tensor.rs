//! Sparse order-k tensors.
//!
//! Entries are kept in a `BTreeMap` keyed by index tuple, so iteration order
//! is canonical and zero entries are never stored. Every grouping,
//! flattening and splitting uses row-major packing: the first listed
//! position is the most significant digit.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Domain, EpsPoly, QComplex, Scalar};

pub type Index = Vec<usize>;

#[derive(Clone, PartialEq, Debug)]
pub struct Tensor<S> {
    dims: Vec<usize>,
    entries: BTreeMap<Index, S>,
}

/// Ordered partition of factor positions. Each block becomes one factor of
/// the result, its dimension the product of the block's dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupingSpec {
    pub blocks: Vec<Vec<usize>>,
}

impl GroupingSpec {
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        Self { blocks }
    }

    /// Every position its own block.
    pub fn trivial(n: usize) -> Self {
        Self { blocks: (0..n).map(|i| vec![i]).collect() }
    }

    /// Pairs position `j` of a `k`-tensor with position `k + j` of a second
    /// `k`-tensor: the Kronecker product ⊠.
    pub fn kronecker(k: usize) -> Self {
        Self { blocks: (0..k).map(|j| vec![j, k + j]).collect() }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for block in &self.blocks {
            if block.is_empty() {
                return Err(Error::InvalidGrouping("empty block".into()));
            }
            for &p in block {
                if p >= n {
                    return Err(Error::InvalidGrouping(format!("position {p} out of range 0..{n}")));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(Error::InvalidGrouping(format!("position {p} appears twice")));
                }
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidGrouping(format!("position {p} not covered")));
        }
        Ok(())
    }
}

pub(crate) fn pack(digits: impl IntoIterator<Item = (usize, usize)>) -> usize {
    digits.into_iter().fold(0, |acc, (digit, radix)| acc * radix + digit)
}

pub(crate) fn unpack(mut value: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (slot, &r) in out.iter_mut().zip(radices).rev() {
        *slot = value % r;
        value /= r;
    }
    out
}

fn checked_product(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::TooLarge(format!("dimension product of {dims:?} overflows")))
}

impl<S: Scalar> Tensor<S> {
    /// The zero tensor with the given local dimensions.
    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("tensor order must be positive".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidParameter(format!("zero local dimension in {dims:?}")));
        }
        Ok(Self { dims, entries: BTreeMap::new() })
    }

    /// Build from entries; repeated indices are summed and zeros dropped.
    pub fn from_entries(dims: Vec<usize>, entries: impl IntoIterator<Item = (Index, S)>) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        for (idx, v) in entries {
            t.check_index(&idx)?;
            t.accumulate(idx, &v);
        }
        Ok(t)
    }

    /// Sum of simple tensors `v₁ ⊗ v₂ ⊗ … ⊗ v_k`.
    pub fn from_simple_terms(dims: Vec<usize>, terms: &[Vec<Vec<S>>]) -> Result<Self> {
        let mut t = Self::zeros(dims.clone())?;
        for term in terms {
            if term.len() != dims.len() || term.iter().zip(&dims).any(|(v, &d)| v.len() != d) {
                return Err(Error::ShapeMismatch("simple term does not match dims".into()));
            }
            let supports: Vec<Vec<(usize, &S)>> = term
                .iter()
                .map(|v| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
                .collect();
            for_each_product(&supports, |choice| {
                let idx: Index = choice.iter().map(|(i, _)| *i).collect();
                let v = choice.iter().skip(1).fold(choice[0].1.clone(), |acc, (_, x)| acc.mul(x));
                t.accumulate(idx, &v);
            });
        }
        Ok(t)
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.dims.len() || idx.iter().zip(&self.dims).any(|(&i, &d)| i >= d) {
            return Err(Error::ShapeMismatch(format!("index {idx:?} outside dims {:?}", self.dims)));
        }
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, idx: Index, v: &S) {
        if v.is_zero() {
            return;
        }
        match self.entries.get_mut(&idx) {
            Some(slot) => {
                let sum = slot.add(v);
                if sum.is_zero() {
                    self.entries.remove(&idx);
                } else {
                    *slot = sum;
                }
            }
            None => {
                self.entries.insert(idx, v.clone());
            }
        }
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn domain(&self) -> Domain {
        S::DOMAIN
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Index, &S)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.entries.get(idx).cloned().unwrap_or_else(S::zero)
    }

    /// Product of the local dimensions (the dense entry count).
    pub fn volume(&self) -> Result<usize> {
        checked_product(&self.dims)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        let mut out = Tensor { dims: self.dims.clone(), entries: BTreeMap::new() };
        for (idx, v) in &self.entries {
            out.accumulate(idx.clone(), &f(v));
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.mul(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!("cannot add {:?} and {:?}", self.dims, other.dims)));
        }
        let mut out = self.clone();
        for (idx, v) in &other.entries {
            out.accumulate(idx.clone(), v);
        }
        Ok(out)
    }

    /// Block embedding: `self` in the low index block, `other` in the high one.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let mut entries = self.entries.clone();
        for (idx, v) in &other.entries {
            let shifted = idx.iter().zip(&self.dims).map(|(i, d)| i + d).collect();
            entries.insert(shifted, v.clone());
        }
        Ok(Self { dims, entries })
    }

    /// `⊕ⁿ self`.
    pub fn direct_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("direct power needs at least one summand".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.direct_sum(self)?;
        }
        Ok(out)
    }

    /// Plain tensor product of order `k + k′`.
    pub fn outer(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut entries = BTreeMap::new();
        for (a, x) in &self.entries {
            for (b, y) in &other.entries {
                let v = x.mul(y);
                if !v.is_zero() {
                    let mut idx = a.clone();
                    idx.extend_from_slice(b);
                    entries.insert(idx, v);
                }
            }
        }
        Self { dims, entries }
    }

    /// Tensor product followed by grouping of the `k + k′` positions.
    pub fn tensor_product(&self, other: &Self, grouping: &GroupingSpec) -> Result<Self> {
        grouping.validate(self.order() + other.order())?;
        self.outer(other).group(grouping)
    }

    /// Kronecker product ⊠: pairs factor `j` of `self` with factor `j` of `other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        self.tensor_product(other, &GroupingSpec::kronecker(self.order()))
    }

    /// `self^{⊠n}`.
    pub fn kron_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Kronecker power needs n ≥ 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.kron(self)?;
        }
        Ok(out)
    }

    /// Regroup factors according to an ordered partition of positions.
    pub fn group(&self, grouping: &GroupingSpec) -> Result<Self> {
        grouping.validate(self.order())?;
        let dims: Vec<usize> = grouping
            .blocks
            .iter()
            .map(|b| checked_product(&b.iter().map(|&p| self.dims[p]).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| {
                let new_idx =
                    grouping.blocks.iter().map(|b| pack(b.iter().map(|&p| (idx[p], self.dims[p])))).collect();
                (new_idx, v.clone())
            })
            .collect();
        Ok(Self { dims, entries })
    }

    /// Inverse of grouping: split factor `j` into factors of dimensions
    /// `parts[j]` (row-major), concatenated in factor order.
    pub fn split(&self, parts: &[Vec<usize>]) -> Result<Self> {
        if parts.len() != self.order() {
            return Err(Error::ShapeMismatch(format!("split spec has {} factors, tensor {}", parts.len(), self.order())));
        }
        for (j, p) in parts.iter().enumerate() {
            if p.is_empty() || checked_product(p)? != self.dims[j] {
                return Err(Error::ShapeMismatch(format!("factor {j} of dim {} cannot split as {p:?}", self.dims[j])));
            }
        }
        let dims: Vec<usize> = parts.iter().flatten().copied().collect();
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| (idx.iter().zip(parts).flat_map(|(&i, p)| unpack(i, p)).collect(), v.clone()))
            .collect();
        Ok(Self { dims, entries })
    }

    /// Reorder factors: factor `j` of the result is factor `perm[j]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let spec = GroupingSpec::new(perm.iter().map(|&p| vec![p]).collect());
        self.group(&spec)
    }

    /// Matrix with rows indexed by the factors in `left` (increasing
    /// order, row-major) and columns by the remaining factors.
    pub fn flatten(&self, left: &[usize]) -> Result<Matrix<S>> {
        let left: BTreeSet<usize> = left.iter().copied().collect();
        if left.is_empty() || left.len() >= self.order() || left.iter().any(|&p| p >= self.order()) {
            return Err(Error::InvalidFlattening(format!(
                "left set {left:?} must be a nonempty proper subset of 0..{}",
                self.order()
            )));
        }
        let right: Vec<usize> = (0..self.order()).filter(|p| !left.contains(p)).collect();
        let left: Vec<usize> = left.into_iter().collect();
        let rows = checked_product(&left.iter().map(|&p| self.dims[p]).collect::<Vec<_>>())?;
        let cols = checked_product(&right.iter().map(|&p| self.dims[p]).collect::<Vec<_>>())?;
        if rows.checked_mul(cols).is_none_or(|n| n > 50_000_000) {
            return Err(Error::TooLarge(format!("flattening of shape {rows}x{cols}")));
        }
        let mut m = Matrix::zeros(rows, cols);
        for (idx, v) in &self.entries {
            let r = pack(left.iter().map(|&p| (idx[p], self.dims[p])));
            let c = pack(right.iter().map(|&p| (idx[p], self.dims[p])));
            m.set(r, c, v.clone());
        }
        Ok(m)
    }

    /// `(m₁ ⊗ m₂ ⊗ ⋯ ⊗ m_k) self`, where `m_j` maps factor `j` (its
    /// columns) to the new factor `j` (its rows).
    pub fn apply(&self, maps: &[Matrix<S>]) -> Result<Self> {
        if maps.len() != self.order() {
            return Err(Error::ShapeMismatch(format!("{} maps for a tensor of order {}", maps.len(), self.order())));
        }
        for (j, m) in maps.iter().enumerate() {
            if m.cols() != self.dims[j] {
                return Err(Error::ShapeMismatch(format!(
                    "map {j} has {} columns but factor {j} has dimension {}",
                    m.cols(),
                    self.dims[j]
                )));
            }
        }
        let dims: Vec<usize> = maps.iter().map(Matrix::rows).collect();
        let mut out = Self::zeros(dims)?;
        let columns: Vec<Vec<Vec<(usize, S)>>> =
            maps.iter().map(|m| (0..m.cols()).map(|c| m.column_support(c)).collect()).collect();
        for (idx, v) in &self.entries {
            let supports: Vec<Vec<(usize, &S)>> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| columns[j][i].iter().map(|(r, x)| (*r, x)).collect())
                .collect();
            for_each_product(&supports, |choice| {
                let coeff = choice.iter().fold(v.clone(), |acc, (_, x)| acc.mul(x));
                out.accumulate(choice.iter().map(|(r, _)| *r).collect(), &coeff);
            });
        }
        Ok(out)
    }

    /// Drop all-zero slices on every factor and relabel indices in
    /// increasing order.
    pub fn compress(&self) -> Self {
        let used: Vec<BTreeMap<usize, usize>> = (0..self.order())
            .map(|j| {
                let set: BTreeSet<usize> = self.entries.keys().map(|idx| idx[j]).collect();
                set.into_iter().enumerate().map(|(new, old)| (old, new)).collect()
            })
            .collect();
        let dims = used.iter().map(|m| m.len().max(1)).collect();
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| (idx.iter().enumerate().map(|(j, i)| used[j][i]).collect(), v.clone()))
            .collect();
        Self { dims, entries }
    }

    /// Equal after removing zero padding on every factor.
    pub fn equal_up_to_padding(&self, other: &Self) -> Result<bool> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(self.compress() == other.compress())
    }

    /// Pad factor dimensions up to `dims` with zeros.
    pub fn pad_to(&self, dims: &[usize]) -> Result<Self> {
        if dims.len() != self.order() || dims.iter().zip(&self.dims).any(|(n, o)| n < o) {
            return Err(Error::ShapeMismatch(format!("cannot pad {:?} to {dims:?}", self.dims)));
        }
        Ok(Self { dims: dims.to_vec(), entries: self.entries.clone() })
    }
}

impl Tensor<QComplex> {
    pub fn to_float(&self) -> Tensor<Complex64> {
        self.map(QComplex::to_complex64)
    }

    pub fn to_eps(&self) -> Tensor<EpsPoly> {
        self.map(|q| EpsPoly::constant(q.clone()))
    }

    /// Tensor with all listed entries equal to one.
    pub fn from_ones(dims: Vec<usize>, indices: impl IntoIterator<Item = Index>) -> Result<Self> {
        Self::from_entries(dims, indices.into_iter().map(|i| (i, QComplex::one())))
    }
}

impl Tensor<EpsPoly> {
    /// Coefficient tensors by ε-degree (only nonzero ones).
    pub fn coefficients(&self) -> BTreeMap<u32, Tensor<QComplex>> {
        let mut out: BTreeMap<u32, Tensor<QComplex>> = BTreeMap::new();
        for (idx, p) in &self.entries {
            for (d, c) in p.coeffs() {
                out.entry(*d)
                    .or_insert_with(|| Tensor { dims: self.dims.clone(), entries: BTreeMap::new() })
                    .accumulate(idx.clone(), c);
            }
        }
        out
    }
}

/// Visit every element of the Cartesian product of `lists`.
pub(crate) fn for_each_product<T: Clone>(lists: &[Vec<T>], mut f: impl FnMut(&[T])) {
    if lists.iter().any(Vec::is_empty) {
        return;
    }
    let mut pos = vec![0usize; lists.len()];
    let mut cur: Vec<T> = lists.iter().map(|l| l[0].clone()).collect();
    loop {
        f(&cur);
        let mut j = lists.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            pos[j] += 1;
            if pos[j] < lists[j].len() {
                cur[j] = lists[j][pos[j]].clone();
                break;
            }
            pos[j] = 0;
            cur[j] = lists[j][0].clone();
        }
    }
}
