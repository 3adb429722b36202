//! Down-conversion Hamiltonian, its tilde copy and the Liouvillian `L̄ = Ĥ − H̃`.
//!
//! ```text
//! Ĥ = ω₀ a†a + ω₁ b†b + ω₂ c†c + κ (a b†c† + a†b c)
//! ```
//!
//! `H̃` is obtained from `Ĥ` by tilde conjugation of the expression, and the
//! doubled state evolves as `|ψ(t)⟩ = exp(−iL̄t)|ψ(0)⟩`.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TfdError};
use crate::expm::{exp_action, ExpmOptions, ExpmStats};
use crate::expr::{lower, number, raise, OperatorExpression};
use crate::fock::{BasisDescriptor, ModeId, StateVector};
use crate::operator::SparseOperator;

/// Relative mismatch of `ω₀ − ω₁ − ω₂` tolerated before a config is flagged off-resonance.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeCutoffs {
    pub pump: usize,
    pub signal: usize,
    pub idler: usize,
}

impl Default for ModeCutoffs {
    fn default() -> Self {
        ModeCutoffs { pump: 16, signal: 3, idler: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdcConfig {
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub kappa: f64,
    pub t: f64,
    pub cutoffs: ModeCutoffs,
    pub series_tolerance: f64,
}

impl Default for PdcConfig {
    fn default() -> Self {
        PdcConfig {
            omega0: 1.0,
            omega1: 0.5,
            omega2: 0.5,
            kappa: 1.0,
            t: 1.0,
            cutoffs: ModeCutoffs::default(),
            series_tolerance: 1e-10,
        }
    }
}

impl PdcConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("omega0", self.omega0), ("omega1", self.omega1), ("omega2", self.omega2)] {
            if !(w > 0.0) || !w.is_finite() {
                return Err(TfdError::invalid(name, format!("must be finite and > 0, got {w}")));
            }
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(TfdError::invalid("kappa", format!("must be finite and >= 0, got {}", self.kappa)));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(TfdError::invalid("t", format!("must be finite and >= 0, got {}", self.t)));
        }
        if !(self.series_tolerance > 0.0) {
            return Err(TfdError::invalid("series_tolerance", "must be > 0"));
        }
        Ok(())
    }

    /// `true` when `ω₀ ≠ ω₁ + ω₂`. Such configs still run.
    pub fn off_resonance(&self) -> bool {
        (self.omega0 - self.omega1 - self.omega2).abs() > RESONANCE_TOLERANCE * self.omega0
    }

    pub fn basis(&self) -> Result<BasisDescriptor> {
        BasisDescriptor::from_pair_cutoffs(self.cutoffs.pump, self.cutoffs.signal, self.cutoffs.idler)
    }
}

/// `a b†c† + a†b c` with unit coupling.
pub fn conversion_expr() -> OperatorExpression {
    (lower(ModeId::A) * raise(ModeId::B) * raise(ModeId::C)).plus_hc()
}

pub fn pdc_hamiltonian_expr(config: &PdcConfig) -> OperatorExpression {
    number(ModeId::A).scale_re(config.omega0)
        + number(ModeId::B).scale_re(config.omega1)
        + number(ModeId::C).scale_re(config.omega2)
        + conversion_expr().scale_re(config.kappa)
}

pub fn pdc_hamiltonian(config: &PdcConfig, basis: &Arc<BasisDescriptor>) -> Result<SparseOperator> {
    pdc_hamiltonian_expr(config).evaluate(basis)
}

pub fn liouvillian_expr(config: &PdcConfig) -> Result<OperatorExpression> {
    let h = pdc_hamiltonian_expr(config);
    let h_tilde = h.tilde_conjugate()?;
    Ok(h - h_tilde)
}

pub fn liouvillian(config: &PdcConfig, basis: &Arc<BasisDescriptor>) -> Result<SparseOperator> {
    liouvillian_expr(config)?.evaluate(basis)
}

/// Interaction part of `L̄` with unit coupling: `(a b†c† + h.c.) − (ã b̃†c̃† + h.c.)`.
pub fn interaction_operator(basis: &Arc<BasisDescriptor>) -> Result<SparseOperator> {
    let v = conversion_expr();
    (v.clone() - v.tilde_conjugate()?).evaluate(basis)
}

/// `exp(−iL̄t)|state⟩`, sub-stepped automatically.
pub fn evolve(state: &StateVector, liouvillian: &SparseOperator, t: f64, tolerance: f64) -> Result<StateVector> {
    Ok(evolve_with_stats(state, liouvillian, t, tolerance)?.0)
}

pub fn evolve_with_stats(
    state: &StateVector,
    liouvillian: &SparseOperator,
    t: f64,
    tolerance: f64,
) -> Result<(StateVector, ExpmStats)> {
    exp_action(liouvillian, t, state, &ExpmOptions::with_tolerance(tolerance))
}

/// `true` when signal and idler pairs are both in the doubled vacuum.
pub fn in_output_vacuum(basis: &BasisDescriptor, index: usize) -> bool {
    [ModeId::B, ModeId::BTilde, ModeId::C, ModeId::CTilde]
        .into_iter()
        .all(|m| basis.occupation(index, m) == 0)
}

/// Drops the components with empty signal and idler pairs (the unconverted part).
pub fn project_out_output_vacuum(state: &StateVector) -> StateVector {
    let basis = Arc::clone(state.basis());
    let amplitudes = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, z)| if in_output_vacuum(&basis, i) { C64::new(0.0, 0.0) } else { *z })
        .collect();
    StateVector::from_amplitudes(&basis, amplitudes).expect("same length")
}

/// Normalised first-order converted component, `∝ −i·V|initial⟩` with the
/// zeroth-order part removed.
///
/// The coupling–time factor cancels in the normalisation, so the result does
/// not depend on `κt`; the config only fixes the basis check.
pub fn first_order_branch(initial: &StateVector, config: &PdcConfig, basis: &Arc<BasisDescriptor>) -> Result<StateVector> {
    config.validate()?;
    let v = interaction_operator(basis)?;
    let kicked = v.apply(initial)?.scaled(C64::new(0.0, -1.0));
    project_out_output_vacuum(&kicked).normalize()
}
