//! Doubled multimode Fock space: mode labels, the mixed-radix basis and dense
//! state vectors.
//!
//! Every basis carries the six modes `a, ã, b, b̃, c, c̃` in that fixed order,
//! with `a` as the most significant digit. A mode that should not take part in
//! a computation is given cutoff 0 (a single occupation level).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TfdError};

pub const NUM_MODES: usize = 6;

/// Per-mode occupation numbers in basis order.
pub type Occupations = [usize; NUM_MODES];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeId {
    A,
    ATilde,
    B,
    BTilde,
    C,
    CTilde,
}

impl ModeId {
    pub const ALL: [ModeId; NUM_MODES] = [
        ModeId::A,
        ModeId::ATilde,
        ModeId::B,
        ModeId::BTilde,
        ModeId::C,
        ModeId::CTilde,
    ];

    pub const HAT: [ModeId; 3] = [ModeId::A, ModeId::B, ModeId::C];

    /// Position of the mode in the basis ordering.
    pub fn position(self) -> usize {
        self as usize
    }

    pub fn is_tilde(self) -> bool {
        matches!(self, ModeId::ATilde | ModeId::BTilde | ModeId::CTilde)
    }

    pub fn partner(self) -> ModeId {
        match self {
            ModeId::A => ModeId::ATilde,
            ModeId::ATilde => ModeId::A,
            ModeId::B => ModeId::BTilde,
            ModeId::BTilde => ModeId::B,
            ModeId::C => ModeId::CTilde,
            ModeId::CTilde => ModeId::C,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModeId::A => "a",
            ModeId::ATilde => "a~",
            ModeId::B => "b",
            ModeId::BTilde => "b~",
            ModeId::C => "c",
            ModeId::CTilde => "c~",
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Truncated doubled Fock basis with mixed-radix indexing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisDescriptor {
    cutoffs: Occupations,
    strides: [usize; NUM_MODES],
    total_dim: usize,
}

impl BasisDescriptor {
    /// Builds the basis from a cutoff for each of the six modes.
    pub fn build(mode_cutoffs: &BTreeMap<ModeId, usize>) -> Result<Self> {
        let mut cutoffs = [0; NUM_MODES];
        for mode in ModeId::ALL {
            cutoffs[mode.position()] = *mode_cutoffs.get(&mode).ok_or(TfdError::MissingMode(mode))?;
        }
        Self::from_cutoffs(cutoffs)
    }

    /// Same as [`BasisDescriptor::build`] with one cutoff per hat/tilde pair.
    pub fn from_pair_cutoffs(a: usize, b: usize, c: usize) -> Result<Self> {
        Self::from_cutoffs([a, a, b, b, c, c])
    }

    pub fn from_cutoffs(cutoffs: Occupations) -> Result<Self> {
        for hat in ModeId::HAT {
            let tilde = hat.partner();
            let (hc, tc) = (cutoffs[hat.position()], cutoffs[tilde.position()]);
            if hc != tc {
                return Err(TfdError::MismatchedPartnerCutoff {
                    hat,
                    tilde,
                    hat_cutoff: hc,
                    tilde_cutoff: tc,
                });
            }
        }
        let mut strides = [0; NUM_MODES];
        let mut total: usize = 1;
        for pos in (0..NUM_MODES).rev() {
            strides[pos] = total;
            total = total
                .checked_mul(cutoffs[pos] + 1)
                .ok_or(TfdError::DimensionGuard { dim: usize::MAX, max: usize::MAX })?;
        }
        Ok(BasisDescriptor { cutoffs, strides, total_dim: total })
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn cutoffs(&self) -> Occupations {
        self.cutoffs
    }

    pub fn cutoff(&self, mode: ModeId) -> usize {
        self.cutoffs[mode.position()]
    }

    pub fn mode_dim(&self, mode: ModeId) -> usize {
        self.cutoffs[mode.position()] + 1
    }

    pub fn stride(&self, mode: ModeId) -> usize {
        self.strides[mode.position()]
    }

    pub fn check_dim(&self, max: usize) -> Result<()> {
        if self.total_dim > max {
            Err(TfdError::DimensionGuard { dim: self.total_dim, max })
        } else {
            Ok(())
        }
    }

    /// Mixed-radix rank of an occupation tuple.
    pub fn state_index(&self, occupations: &Occupations) -> Result<usize> {
        let mut index = 0;
        for mode in ModeId::ALL {
            let pos = mode.position();
            let n = occupations[pos];
            if n > self.cutoffs[pos] {
                return Err(TfdError::OccupationOutOfRange {
                    mode,
                    occupation: n,
                    cutoff: self.cutoffs[pos],
                });
            }
            index += n * self.strides[pos];
        }
        Ok(index)
    }

    pub fn occupations_of(&self, index: usize) -> Result<Occupations> {
        if index >= self.total_dim {
            return Err(TfdError::IndexOutOfRange { index, dim: self.total_dim });
        }
        let mut occ = [0; NUM_MODES];
        for pos in 0..NUM_MODES {
            occ[pos] = (index / self.strides[pos]) % (self.cutoffs[pos] + 1);
        }
        Ok(occ)
    }

    /// Occupation of one mode at a (valid) index.
    #[inline]
    pub fn occupation(&self, index: usize, mode: ModeId) -> usize {
        let pos = mode.position();
        (index / self.strides[pos]) % (self.cutoffs[pos] + 1)
    }

    /// Same basis with a new cutoff on one hat/tilde pair.
    pub fn with_pair_cutoff(&self, hat: ModeId, cutoff: usize) -> Self {
        let mut cutoffs = self.cutoffs;
        cutoffs[hat.position()] = cutoff;
        cutoffs[hat.partner().position()] = cutoff;
        Self::from_cutoffs(cutoffs).expect("partner cutoffs set together")
    }
}

/// Dense complex amplitudes over a [`BasisDescriptor`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: Arc<BasisDescriptor>,
    amplitudes: Vec<C64>,
}

pub(crate) fn same_basis(a: &Arc<BasisDescriptor>, b: &Arc<BasisDescriptor>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl StateVector {
    pub fn zeros(basis: &Arc<BasisDescriptor>) -> Self {
        StateVector {
            basis: Arc::clone(basis),
            amplitudes: vec![C64::new(0.0, 0.0); basis.total_dim()],
        }
    }

    pub fn from_amplitudes(basis: &Arc<BasisDescriptor>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != basis.total_dim() {
            return Err(TfdError::DimensionMismatch {
                expected: basis.total_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { basis: Arc::clone(basis), amplitudes })
    }

    /// The product state `|occupations⟩`.
    pub fn basis_state(basis: &Arc<BasisDescriptor>, occupations: &Occupations) -> Result<Self> {
        let idx = basis.state_index(occupations)?;
        let mut s = Self::zeros(basis);
        s.amplitudes[idx] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn basis(&self) -> &Arc<BasisDescriptor> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, occupations: &Occupations) -> Result<C64> {
        Ok(self.amplitudes[self.basis.state_index(occupations)?])
    }

    pub fn set_amplitude(&mut self, occupations: &Occupations, value: C64) -> Result<()> {
        let idx = self.basis.state_index(occupations)?;
        self.amplitudes[idx] = value;
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<C64> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(TfdError::BasisMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    pub fn normalize(&self) -> Result<StateVector> {
        let norm = self.norm();
        if norm <= 1e-300 {
            return Err(TfdError::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector {
            basis: Arc::clone(&self.basis),
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: C64, other: &StateVector) -> Result<StateVector> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(TfdError::BasisMismatch);
        }
        Ok(StateVector {
            basis: Arc::clone(&self.basis),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(x, y)| x + factor * y)
                .collect(),
        })
    }

    /// Largest entrywise amplitude difference.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(TfdError::BasisMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// Iterator over `(occupations, amplitude)` for amplitudes with magnitude above `threshold`.
    pub fn support(&self, threshold: f64) -> impl Iterator<Item = (Occupations, C64)> + '_ {
        self.amplitudes.iter().enumerate().filter_map(move |(i, z)| {
            (z.norm() > threshold).then(|| (self.basis.occupations_of(i).expect("index in range"), *z))
        })
    }

    /// Marginal occupation distribution of one mode, `P(n)` for `n = 0..=cutoff`.
    pub fn marginal(&self, mode: ModeId) -> Vec<f64> {
        let mut probs = vec![0.0; self.basis.mode_dim(mode)];
        for (i, z) in self.amplitudes.iter().enumerate() {
            probs[self.basis.occupation(i, mode)] += z.norm_sqr();
        }
        probs
    }

    /// `⟨ψ|n̂_mode|ψ⟩ / ⟨ψ|ψ⟩`, evaluated directly from the occupations.
    pub fn mean_occupation(&self, mode: ModeId) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, z) in self.amplitudes.iter().enumerate() {
            let p = z.norm_sqr();
            num += p * self.basis.occupation(i, mode) as f64;
            den += p;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(cutoff: usize) -> BTreeMap<ModeId, usize> {
        ModeId::ALL.iter().map(|&m| (m, cutoff)).collect()
    }

    #[test]
    fn dimension_products() {
        assert_eq!(BasisDescriptor::build(&uniform(1)).unwrap().total_dim(), 64);
        let b = BasisDescriptor::from_pair_cutoffs(16, 3, 3).unwrap();
        assert_eq!(b.total_dim(), 73984);
    }

    #[test]
    fn mismatched_partner_is_rejected() {
        let mut cut = uniform(1);
        cut.insert(ModeId::A, 2);
        cut.insert(ModeId::ATilde, 3);
        let err = BasisDescriptor::build(&cut).unwrap_err();
        assert_eq!(
            err,
            TfdError::MismatchedPartnerCutoff {
                hat: ModeId::A,
                tilde: ModeId::ATilde,
                hat_cutoff: 2,
                tilde_cutoff: 3
            }
        );
    }

    #[test]
    fn missing_mode_is_rejected() {
        let mut cut = uniform(1);
        cut.remove(&ModeId::CTilde);
        assert_eq!(BasisDescriptor::build(&cut).unwrap_err(), TfdError::MissingMode(ModeId::CTilde));
    }

    #[test]
    fn index_extremes() {
        let b = BasisDescriptor::from_pair_cutoffs(3, 2, 1).unwrap();
        assert_eq!(b.state_index(&[0; 6]).unwrap(), 0);
        assert_eq!(b.state_index(&b.cutoffs()).unwrap(), b.total_dim() - 1);
        assert!(matches!(
            b.state_index(&[4, 0, 0, 0, 0, 0]),
            Err(TfdError::OccupationOutOfRange { mode: ModeId::A, occupation: 4, cutoff: 3 })
        ));
    }

    #[test]
    fn index_is_a_bijection() {
        let b = BasisDescriptor::from_pair_cutoffs(4, 2, 3).unwrap();
        for i in 0..b.total_dim() {
            let occ = b.occupations_of(i).unwrap();
            assert_eq!(b.state_index(&occ).unwrap(), i);
            for m in ModeId::ALL {
                assert_eq!(b.occupation(i, m), occ[m.position()]);
            }
        }
        assert!(b.occupations_of(b.total_dim()).is_err());
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let b = Arc::new(BasisDescriptor::from_pair_cutoffs(1, 1, 0).unwrap());
        let vac = StateVector::basis_state(&b, &[0; 6]).unwrap();
        assert_eq!(vac.amplitudes()[0], C64::new(1.0, 0.0));
        let pair = StateVector::basis_state(&b, &[1, 1, 0, 0, 0, 0]).unwrap();
        assert_eq!(pair.norm(), 1.0);
        assert_eq!(vac.inner_product(&pair).unwrap(), C64::new(0.0, 0.0));
        for i in 0..b.total_dim() {
            for j in 0..b.total_dim() {
                let x = StateVector::basis_state(&b, &b.occupations_of(i).unwrap()).unwrap();
                let y = StateVector::basis_state(&b, &b.occupations_of(j).unwrap()).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(x.inner_product(&y).unwrap(), C64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn normalize_cases() {
        let b = Arc::new(BasisDescriptor::from_pair_cutoffs(1, 0, 0).unwrap());
        let vac = StateVector::basis_state(&b, &[0; 6]).unwrap();
        assert_eq!(vac.scaled(C64::new(2.0, 0.0)).normalize().unwrap(), vac);
        assert!(vac.normalize().unwrap().max_abs_diff(&vac).unwrap() <= 1e-15);
        assert_eq!(StateVector::zeros(&b).normalize().unwrap_err(), TfdError::ZeroNorm);
    }

    #[test]
    fn basis_mismatch() {
        let b1 = Arc::new(BasisDescriptor::from_pair_cutoffs(1, 0, 0).unwrap());
        let b2 = Arc::new(BasisDescriptor::from_pair_cutoffs(2, 0, 0).unwrap());
        let s1 = StateVector::zeros(&b1);
        let s2 = StateVector::zeros(&b2);
        assert_eq!(s1.inner_product(&s2).unwrap_err(), TfdError::BasisMismatch);
        // equal descriptors behind different Arcs are the same basis
        let b3 = Arc::new(BasisDescriptor::from_pair_cutoffs(1, 0, 0).unwrap());
        assert!(s1.inner_product(&StateVector::zeros(&b3)).is_ok());
    }

    #[test]
    fn wrong_length_amplitudes() {
        let b = Arc::new(BasisDescriptor::from_pair_cutoffs(1, 0, 0).unwrap());
        assert_eq!(
            StateVector::from_amplitudes(&b, vec![C64::new(0.0, 0.0); 3]).unwrap_err(),
            TfdError::DimensionMismatch { expected: 4, found: 3 }
        );
    }
}
