//! Sparse operators on the doubled Fock space.
//!
//! Storage is compressed sparse row with sorted column indices and no stored
//! entries below [`PRUNE`] in magnitude. All arithmetic is exact sparse
//! arithmetic with a fixed summation order, so results do not depend on the
//! number of worker threads.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Result, TfdError};
use crate::fock::{same_basis, BasisDescriptor, ModeId, StateVector};

/// Entries with magnitude below this are never stored.
pub const PRUNE: f64 = 1e-300;

/// Row count above which products and matrix-vector actions run on the rayon pool.
const PAR_ROWS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    basis: Arc<BasisDescriptor>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    /// Assembles an operator from `(row, col, value)` triplets. Duplicates are
    /// summed in input order.
    pub fn from_triplets(basis: &Arc<BasisDescriptor>, mut triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        let dim = basis.total_dim();
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(TfdError::IndexOutOfRange { index: r.max(c), dim });
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            match rows[r].last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => rows[r].push((c, v)),
            }
        }
        Ok(Self::from_rows(basis, rows))
    }

    fn from_rows(basis: &Arc<BasisDescriptor>, rows: Vec<Vec<(usize, C64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v.norm() >= PRUNE {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseOperator { basis: Arc::clone(basis), row_ptr, col_idx, values }
    }

    pub fn zero(basis: &Arc<BasisDescriptor>) -> Self {
        SparseOperator {
            basis: Arc::clone(basis),
            row_ptr: vec![0; basis.total_dim() + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(basis: &Arc<BasisDescriptor>) -> Self {
        Self::diagonal(basis, |_| C64::new(1.0, 0.0))
    }

    /// Diagonal operator with entries `f(index)`.
    pub fn diagonal(basis: &Arc<BasisDescriptor>, f: impl Fn(usize) -> C64) -> Self {
        let rows = (0..basis.total_dim()).map(|i| vec![(i, f(i))]).collect();
        Self::from_rows(basis, rows)
    }

    /// Truncated lowering operator: `⟨…,n−1,…|a|…,n,…⟩ = √n`.
    pub fn annihilator(mode: ModeId, basis: &Arc<BasisDescriptor>) -> Self {
        let stride = basis.stride(mode);
        let rows = (0..basis.total_dim())
            .map(|i| {
                // row i = |…,n,…⟩ receives from column |…,n+1,…⟩
                let n = basis.occupation(i, mode);
                if n < basis.cutoff(mode) {
                    vec![(i + stride, C64::new(((n + 1) as f64).sqrt(), 0.0))]
                } else {
                    Vec::new()
                }
            })
            .collect();
        Self::from_rows(basis, rows)
    }

    /// Truncated raising operator; the amplitude that would leave the cutoff is dropped.
    pub fn creator(mode: ModeId, basis: &Arc<BasisDescriptor>) -> Self {
        Self::annihilator(mode, basis).dagger()
    }

    pub fn number_operator(mode: ModeId, basis: &Arc<BasisDescriptor>) -> Self {
        Self::diagonal(basis, |i| C64::new(basis.occupation(i, mode) as f64, 0.0))
    }

    /// Lifts a `(cutoff+1)²` single-mode matrix to `M ⊗ 1` on the full basis.
    pub fn embed_single_mode(mode: ModeId, matrix: &[Vec<C64>], basis: &Arc<BasisDescriptor>) -> Result<Self> {
        let d = basis.mode_dim(mode);
        if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(TfdError::DimensionMismatch { expected: d, found: matrix.len() });
        }
        let stride = basis.stride(mode);
        let rows = (0..basis.total_dim())
            .map(|i| {
                let n = basis.occupation(i, mode);
                let base = i - n * stride;
                (0..d).map(|m| (base + m * stride, matrix[n][m])).collect()
            })
            .collect();
        Ok(Self::from_rows(basis, rows))
    }

    pub fn basis(&self) -> &Arc<BasisDescriptor> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// All stored entries as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim()).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    fn check_same(&self, other: &SparseOperator) -> Result<()> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(TfdError::BasisMismatch);
        }
        Ok(())
    }

    pub fn scale(&self, z: C64) -> SparseOperator {
        let rows = (0..self.dim()).map(|r| self.row(r).map(|(c, v)| (c, v * z)).collect()).collect();
        Self::from_rows(&self.basis, rows)
    }

    /// `self + z·other`, merged row by row.
    pub fn add_scaled(&self, z: C64, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_same(other)?;
        let rows = (0..self.dim())
            .map(|r| {
                let mut out = Vec::new();
                let mut lhs = self.row(r).peekable();
                let mut rhs = other.row(r).map(|(c, v)| (c, v * z)).peekable();
                loop {
                    match (lhs.peek().copied(), rhs.peek().copied()) {
                        (Some((lc, lv)), Some((rc, rv))) => {
                            if lc == rc {
                                out.push((lc, lv + rv));
                                lhs.next();
                                rhs.next();
                            } else if lc < rc {
                                out.push((lc, lv));
                                lhs.next();
                            } else {
                                out.push((rc, rv));
                                rhs.next();
                            }
                        }
                        (Some(e), None) => {
                            out.push(e);
                            lhs.next();
                        }
                        (None, Some(e)) => {
                            out.push(e);
                            rhs.next();
                        }
                        (None, None) => break,
                    }
                }
                out
            })
            .collect();
        Ok(Self::from_rows(&self.basis, rows))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.add_scaled(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.add_scaled(C64::new(-1.0, 0.0), other)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_same(other)?;
        let dim = self.dim();
        let product_row = |r: usize| {
            let mut acc: Vec<(usize, C64)> = Vec::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    acc.push((c, a * b));
                }
            }
            // stable sort keeps the accumulation order fixed per column
            acc.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(acc.len());
            for (c, v) in acc {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged
        };
        let rows: Vec<Vec<(usize, C64)>> = if dim >= PAR_ROWS {
            (0..dim).into_par_iter().map(product_row).collect()
        } else {
            (0..dim).map(product_row).collect()
        };
        Ok(Self::from_rows(&self.basis, rows))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> SparseOperator {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.dim()];
        for (r, c, v) in self.triplets() {
            rows[c].push((r, v.conj()));
        }
        Self::from_rows(&self.basis, rows)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if !same_basis(&self.basis, state.basis()) {
            return Err(TfdError::BasisMismatch);
        }
        let out = self.apply_slice(state.amplitudes());
        StateVector::from_amplitudes(&self.basis, out)
    }

    /// Raw matrix-vector product on amplitude slices of length `dim`.
    pub fn apply_slice(&self, x: &[C64]) -> Vec<C64> {
        let row_dot = |r: usize| -> C64 { self.row(r).map(|(c, v)| v * x[c]).sum() };
        if self.dim() >= PAR_ROWS {
            (0..self.dim()).into_par_iter().map(row_dot).collect()
        } else {
            (0..self.dim()).map(row_dot).collect()
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |A_ij − B_ij|`.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim()).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Max absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut cols = vec![0.0; self.dim()];
        for (_, c, v) in self.triplets() {
            cols[c] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    /// `max |A − A†|` over entries; exactly zero for operators assembled as `X + X†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger()).expect("same basis")
    }

    /// Dense row-major copy, for small operators.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut m = vec![vec![C64::new(0.0, 0.0); self.dim()]; self.dim()];
        for (r, c, v) in self.triplets() {
            m[r][c] = v;
        }
        m
    }

    /// Keeps only the entries whose row and column both satisfy `keep`.
    pub fn restricted(&self, keep: impl Fn(usize) -> bool) -> SparseOperator {
        let rows = (0..self.dim())
            .map(|r| if keep(r) { self.row(r).filter(|&(c, _)| keep(c)).collect() } else { Vec::new() })
            .collect();
        Self::from_rows(&self.basis, rows)
    }
}
