//! Action of `exp(−i·t·H)` on a vector for sparse `H`.
//!
//! The time interval is cut into `s` equal sub-steps so that each step has
//! `|τ|·‖H‖ ≤ step_norm`, and each step sums the Taylor series up to the order
//! where the a-priori remainder bound
//!
//! ```text
//! ‖v‖ · x^(m+1) / (m+1)! · 1 / (1 − x/(m+2)),   x = |τ|·‖H‖
//! ```
//!
//! falls below `tolerance / s`. `‖H‖` is bounded by `sqrt(‖H‖₁‖H‖∞)`. The total
//! error in the 2-norm is therefore below `tolerance·‖v‖`.

use num_complex::Complex64 as C64;

use crate::error::{Result, TfdError};
use crate::fock::StateVector;
use crate::operator::SparseOperator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpmOptions {
    pub tolerance: f64,
    /// Highest Taylor order tried in a single step before the step count is doubled.
    pub max_order: usize,
    pub max_substeps: usize,
    /// Target value of `|τ|·‖H‖` per step.
    pub step_norm: f64,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        ExpmOptions {
            tolerance: 1e-10,
            max_order: 60,
            max_substeps: 1 << 20,
            step_norm: 1.0,
        }
    }
}

impl ExpmOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        ExpmOptions { tolerance, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpmStats {
    pub substeps: usize,
    pub order: usize,
    pub norm_bound: f64,
}

/// Smallest Taylor order whose remainder bound is below `tol` for step norm `x`.
fn taylor_order(x: f64, tol: f64, max_order: usize) -> Option<usize> {
    if x == 0.0 {
        return Some(0);
    }
    // term = x^(m+1)/(m+1)!
    let mut term = x;
    for m in 0..=max_order {
        let denom = 1.0 - x / (m as f64 + 2.0);
        if denom > 0.0 && term / denom <= tol {
            return Some(m);
        }
        term *= x / (m as f64 + 2.0);
    }
    None
}

/// Returns `exp(−i·t·H)·state`.
pub fn exp_action(
    generator: &SparseOperator,
    t: f64,
    state: &StateVector,
    opts: &ExpmOptions,
) -> Result<(StateVector, ExpmStats)> {
    if !(opts.tolerance > 0.0) {
        return Err(TfdError::invalid("tolerance", "must be positive"));
    }
    if !t.is_finite() {
        return Err(TfdError::invalid("t", "must be finite"));
    }
    let norm_bound = (generator.one_norm() * generator.inf_norm()).sqrt();
    let scaled = t.abs() * norm_bound;
    if scaled == 0.0 {
        let _ = generator.apply(state)?;
        return Ok((state.clone(), ExpmStats { substeps: 0, order: 0, norm_bound }));
    }

    let mut substeps = ((scaled / opts.step_norm).ceil() as usize).max(1);
    let order = loop {
        if substeps > opts.max_substeps {
            return Err(TfdError::ConvergenceFailure(format!(
                "exp action with |t|·‖H‖ = {scaled:.3e} needs more than {} sub-steps",
                opts.max_substeps
            )));
        }
        let x = scaled / substeps as f64;
        match taylor_order(x, opts.tolerance / substeps as f64, opts.max_order) {
            Some(m) => break m,
            None => substeps *= 2,
        }
    };

    let tau = t / substeps as f64;
    // multiplies by −iτ
    let factor = C64::new(0.0, -tau);
    let mut v = state.amplitudes().to_vec();
    for _ in 0..substeps {
        let mut sum = v.clone();
        let mut term = v;
        for k in 1..=order {
            let hv = generator.apply_slice(&term);
            let f = factor / k as f64;
            term = hv.into_iter().map(|z| z * f).collect();
            for (s, z) in sum.iter_mut().zip(&term) {
                *s += z;
            }
        }
        v = sum;
    }
    let out = StateVector::from_amplitudes(state.basis(), v)?;
    Ok((out, ExpmStats { substeps, order, norm_bound }))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fock::{BasisDescriptor, ModeId};

    #[test]
    fn order_selection() {
        assert_eq!(taylor_order(0.0, 1e-12, 60), Some(0));
        let m = taylor_order(1.0, 1e-12, 60).unwrap();
        assert!(m >= 13 && m <= 16, "{m}");
        assert_eq!(taylor_order(50.0, 1e-12, 10), None);
    }

    #[test]
    fn zero_time_is_identity() {
        let b = Arc::new(BasisDescriptor::from_pair_cutoffs(3, 0, 0).unwrap());
        let h = SparseOperator::number_operator(ModeId::A, &b);
        let s = StateVector::basis_state(&b, &[2, 1, 0, 0, 0, 0]).unwrap();
        let (out, stats) = exp_action(&h, 0.0, &s, &ExpmOptions::default()).unwrap();
        assert_eq!(out, s);
        assert_eq!(stats.substeps, 0);
    }

    #[test]
    fn diagonal_phases() {
        let b = Arc::new(BasisDescriptor::from_pair_cutoffs(4, 0, 0).unwrap());
        let h = SparseOperator::number_operator(ModeId::A, &b);
        let s = StateVector::basis_state(&b, &[3, 0, 0, 0, 0, 0]).unwrap();
        let t = 2.7;
        let (out, _) = exp_action(&h, t, &s, &ExpmOptions::with_tolerance(1e-13)).unwrap();
        let expect = C64::new(0.0, -3.0 * t).exp();
        assert!((out.amplitude(&[3, 0, 0, 0, 0, 0]).unwrap() - expect).norm() <= 1e-12);
    }

    #[test]
    fn too_few_substeps_fails() {
        let b = Arc::new(BasisDescriptor::from_pair_cutoffs(4, 0, 0).unwrap());
        let h = SparseOperator::number_operator(ModeId::A, &b);
        let s = StateVector::basis_state(&b, &[3, 0, 0, 0, 0, 0]).unwrap();
        let opts = ExpmOptions { max_substeps: 2, ..Default::default() };
        assert!(matches!(exp_action(&h, 100.0, &s, &opts), Err(TfdError::ConvergenceFailure(_))));
    }
}
