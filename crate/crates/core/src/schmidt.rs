//! Schmidt coefficients across a cut of the mode ordering.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::fock::{ModeId, StateVector, NUM_MODES};

/// Second singular value at or below this counts as a product state.
pub const SEPARABILITY_THRESHOLD: f64 = 1e-10;

/// Singular values (descending) of the amplitude matrix whose rows are the
/// first `split` modes and whose columns are the remaining ones.
pub fn bipartite_singular_values(state: &StateVector, split: usize) -> Vec<f64> {
    assert!(split <= NUM_MODES, "split {split} beyond the last mode");
    let basis = state.basis();
    let rows: usize = ModeId::ALL[..split].iter().map(|&m| basis.mode_dim(m)).product();
    let cols = basis.total_dim() / rows;
    // amplitudes are row-major in (left, right) because earlier modes are more significant
    let m = DMatrix::<C64>::from_row_slice(rows, cols, state.amplitudes());
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparabilityReport {
    pub separable: bool,
    pub singular_values: Vec<f64>,
    pub second_singular_value: f64,
}

impl SeparabilityReport {
    fn from_values(singular_values: Vec<f64>) -> Self {
        let second = singular_values.get(1).copied().unwrap_or(0.0);
        SeparabilityReport {
            separable: second <= SEPARABILITY_THRESHOLD,
            second_singular_value: second,
            singular_values,
        }
    }

    pub fn schmidt_rank(&self) -> usize {
        self.singular_values.iter().filter(|&&s| s > SEPARABILITY_THRESHOLD).count()
    }
}

/// Product-state test across the `(a, ã, b, b̃) | (c, c̃)` cut. For a state
/// whose pump pair has cutoff 0 this is the signal/idler cut.
pub fn separability_check(conditional: &StateVector) -> SeparabilityReport {
    SeparabilityReport::from_values(bipartite_singular_values(conditional, 4))
}

/// Product-state test across the pump `(a, ã)` versus output `(b, b̃, c, c̃)` cut.
pub fn pump_output_separability(state: &StateVector) -> SeparabilityReport {
    SeparabilityReport::from_values(bipartite_singular_values(state, 2))
}
