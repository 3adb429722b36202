//! Parametric down conversion of a bosonic thermofield vacuum.
//!
//! The pump pair `(a, ã)` starts in the thermal vacuum with amplitudes
//! `λ_n = e^{−nβω₀/2}·√(1 − e^{−βω₀})` on `|n, ñ⟩`, while the signal `(b, b̃)`
//! and idler `(c, c̃)` pairs start empty. To first order in the coupling the
//! converted state is
//!
//! ```text
//! (2 Σ n λ_n²)^(-1/2) Σ_n λ_n √n ( −i |n−1, ñ⟩|1, 0̃⟩|1, 0̃⟩ + i |n, ñ−1⟩|0, 1̃⟩|0, 1̃⟩ )
//! ```
//!
//! Photon numbers of the signal and idler are reported per pair (hat plus
//! tilde occupation); the pump number is the hat occupation alone.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TfdError};
use crate::fock::{BasisDescriptor, ModeId, StateVector};
use crate::liouville::{evolve_with_stats, first_order_branch, liouvillian, project_out_output_vacuum, PdcConfig};
use crate::schmidt::{separability_check, SeparabilityReport};
use crate::thermofield::{boltzmann_power, thermofield_vacuum_closed_form, Statistics, ThermalParams};

/// Thermal vacuum amplitudes of the pump, truncated at `cutoff`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSeries {
    pub beta_omega0: f64,
    pub cutoff: usize,
    pub lambdas: Vec<f64>,
    /// `Σ_{n > cutoff} λ_n² = e^{−(cutoff+1)βω₀}`.
    pub tail_weight: f64,
}

impl LambdaSeries {
    pub fn new(beta_omega0: f64, cutoff: usize) -> Result<Self> {
        if !(beta_omega0 > 0.0) || beta_omega0.is_nan() {
            return Err(TfdError::invalid("beta_omega0", format!("must be > 0, got {beta_omega0}")));
        }
        let norm = (-(-beta_omega0).exp_m1()).sqrt();
        let lambdas = (0..=cutoff).map(|n| boltzmann_power(n, beta_omega0) * norm).collect();
        Ok(LambdaSeries {
            beta_omega0,
            cutoff,
            lambdas,
            tail_weight: (-(cutoff as f64 + 1.0) * beta_omega0).exp(),
        })
    }

    /// Bose-Einstein occupation `1/(e^{βω₀} − 1)` of the untruncated series.
    pub fn bose_einstein(&self) -> f64 {
        1.0 / self.beta_omega0.exp_m1()
    }

    /// `Σ n λ_n²` over the truncated series.
    pub fn mean_occupation(&self) -> f64 {
        moment(&self.lambdas, 1)
    }

    /// `Σ (2n² − n) λ_n² / (2 Σ n λ_n²)`: pump occupation after conversion.
    pub fn pump_after_conversion(&self) -> f64 {
        residual_formulas(&self.lambdas).main
    }
}

fn moment(lambdas: &[f64], power: i32) -> f64 {
    lambdas.iter().enumerate().map(|(n, l)| (n as f64).powi(power) * l * l).sum()
}

/// Builds the basis from the config and checks the dimension guard.
pub fn experiment_basis(config: &PdcConfig, max_dim: usize) -> Result<Arc<BasisDescriptor>> {
    let basis = config.basis()?;
    basis.check_dim(max_dim)?;
    Ok(Arc::new(basis))
}

fn pump_params(beta: f64, config: &PdcConfig) -> Result<ThermalParams> {
    config.validate()?;
    ThermalParams::new(beta, config.omega0, Statistics::Boson)
}

/// Thermal pump vacuum times empty signal and idler pairs.
pub fn build_initial_state(beta: f64, config: &PdcConfig, basis: &Arc<BasisDescriptor>) -> Result<StateVector> {
    let params = pump_params(beta, config)?;
    Ok(thermofield_vacuum_closed_form(&params, basis, ModeId::A, ModeId::ATilde)?.state)
}

fn require_outputs(basis: &BasisDescriptor) -> Result<()> {
    if basis.cutoff(ModeId::B) < 1 || basis.cutoff(ModeId::C) < 1 {
        return Err(TfdError::invalid("cutoffs", "signal and idler need cutoff >= 1"));
    }
    Ok(())
}

/// The two-branch converted state written down coefficient by coefficient.
pub fn closed_form_output_state(beta: f64, config: &PdcConfig, basis: &Arc<BasisDescriptor>) -> Result<StateVector> {
    let params = pump_params(beta, config)?;
    require_outputs(basis)?;
    let series = LambdaSeries::new(params.beta_omega(), basis.cutoff(ModeId::A))?;
    let norm = (2.0 * series.mean_occupation()).sqrt();
    if norm <= 1e-300 {
        return Err(TfdError::ZeroNorm);
    }
    let mut out = StateVector::zeros(basis);
    for (n, &l) in series.lambdas.iter().enumerate().skip(1) {
        let c = l * (n as f64).sqrt() / norm;
        out.set_amplitude(&[n - 1, n, 1, 0, 1, 0], C64::new(0.0, -c))?;
        out.set_amplitude(&[n, n - 1, 0, 1, 0, 1], C64::new(0.0, c))?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    ExactEvolution,
}

/// Photon numbers before and after conversion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PdcReport {
    pub method: Method,
    pub beta_omega0: f64,
    pub n0_before: f64,
    pub n1_before: f64,
    pub n2_before: f64,
    /// Hat occupation of the pump.
    pub n0_after: f64,
    /// Signal photons, hat plus tilde.
    pub n1_after: f64,
    /// Idler photons, hat plus tilde.
    pub n2_after: f64,
    pub n1_hat_after: f64,
    pub n2_hat_after: f64,
    /// Marginal distribution of the pump hat occupation, before and after.
    pub profile_before: Vec<f64>,
    pub profile_after: Vec<f64>,
    /// Gibbs weight above the pump cutoff.
    pub tail_weight: f64,
    /// Probability of the converted sector (exact evolution only).
    pub branch_weight: Option<f64>,
    /// `|‖ψ(t)‖ − 1|` (exact evolution only).
    pub norm_drift: Option<f64>,
    pub off_resonance: bool,
}

/// `⟨n̂ + ñ⟩ / ⟨ψ|ψ⟩` for one hat/tilde pair.
fn pair_number(state: &StateVector, hat: ModeId) -> f64 {
    let basis = state.basis();
    let (mut num, mut den) = (0.0, 0.0);
    for (i, z) in state.amplitudes().iter().enumerate() {
        let p = z.norm_sqr();
        num += p * (basis.occupation(i, hat) + basis.occupation(i, hat.partner())) as f64;
        den += p;
    }
    num / den
}

/// Report together with the output state it was computed from.
#[derive(Clone, Debug)]
pub struct PdcRun {
    pub report: PdcReport,
    pub initial: StateVector,
    pub output: StateVector,
}

pub fn run_pdc(beta: f64, config: &PdcConfig, basis: &Arc<BasisDescriptor>, method: Method) -> Result<PdcRun> {
    let params = pump_params(beta, config)?;
    let initial = build_initial_state(beta, config, basis)?;
    let (output, branch_weight, norm_drift) = match method {
        Method::ClosedForm => (closed_form_output_state(beta, config, basis)?, None, None),
        Method::ExactEvolution => {
            require_outputs(basis)?;
            let l = liouvillian(config, basis)?;
            let (evolved, _) = evolve_with_stats(&initial, &l, config.t, config.series_tolerance)?;
            let converted = project_out_output_vacuum(&evolved);
            let weight = converted.norm_sqr();
            (converted.normalize()?, Some(weight), Some((evolved.norm() - 1.0).abs()))
        }
    };
    let report = PdcReport {
        method,
        beta_omega0: params.beta_omega(),
        n0_before: initial.mean_occupation(ModeId::A),
        n1_before: pair_number(&initial, ModeId::B),
        n2_before: pair_number(&initial, ModeId::C),
        n0_after: output.mean_occupation(ModeId::A),
        n1_after: pair_number(&output, ModeId::B),
        n2_after: pair_number(&output, ModeId::C),
        n1_hat_after: output.mean_occupation(ModeId::B),
        n2_hat_after: output.mean_occupation(ModeId::C),
        profile_before: initial.marginal(ModeId::A),
        profile_after: output.marginal(ModeId::A),
        tail_weight: LambdaSeries::new(params.beta_omega(), basis.cutoff(ModeId::A))?.tail_weight,
        branch_weight,
        norm_drift,
        off_resonance: config.off_resonance(),
    };
    Ok(PdcRun { report, initial, output })
}

pub fn photon_number_report(beta: f64, config: &PdcConfig, method: Method) -> Result<PdcReport> {
    let basis = Arc::new(config.basis()?);
    Ok(run_pdc(beta, config, &basis, method)?.report)
}

/// `|⟨a|b⟩|²` for normalised states.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner_product(b)?.norm_sqr())
}

/// The pump occupation after conversion evaluated two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualFormulaAudit {
    /// `Σ (2n² − n) λ_n² / (2 Σ n λ_n²)`.
    pub main: f64,
    /// `N − Σ_{n≠m} n m λ_n λ_m / N − 1/2` with `N = Σ n λ_n²`.
    pub simplified: f64,
    /// `simplified − main`.
    pub discrepancy: f64,
}

/// Evaluates both pump-occupation formulas on an arbitrary coefficient list
/// (`lambdas[n]` is the coefficient of `|n, ñ⟩`).
pub fn residual_formulas(lambdas: &[f64]) -> ResidualFormulaAudit {
    let n_mean = moment(lambdas, 1);
    let main = (2.0 * moment(lambdas, 2) - n_mean) / (2.0 * n_mean);
    let mut cross = 0.0;
    for (n, ln) in lambdas.iter().enumerate() {
        for (m, lm) in lambdas.iter().enumerate() {
            if n != m {
                cross += (n * m) as f64 * ln * lm;
            }
        }
    }
    let simplified = n_mean - cross / n_mean - 0.5;
    ResidualFormulaAudit { main, simplified, discrepancy: simplified - main }
}

pub fn residual_simplified_eval(beta_omega0: f64, cutoff: usize) -> Result<ResidualFormulaAudit> {
    Ok(residual_formulas(&LambdaSeries::new(beta_omega0, cutoff)?.lambdas))
}

/// Partial inner product `⟨n_hat, ñ_tilde|_a ψ⟩` as a state of the output pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PumpProjection {
    pub n_hat: usize,
    pub n_tilde: usize,
    /// Unnormalised; lives on a basis whose pump pair has cutoff 0.
    pub conditional: StateVector,
    pub probability: f64,
    pub separability: SeparabilityReport,
}

pub fn project_pump(state: &StateVector, n_hat: usize, n_tilde: usize) -> Result<PumpProjection> {
    let basis = state.basis();
    let start = basis.state_index(&[n_hat, n_tilde, 0, 0, 0, 0])?;
    let len = basis.stride(ModeId::ATilde);
    let out_basis = Arc::new(BasisDescriptor::from_pair_cutoffs(0, basis.cutoff(ModeId::B), basis.cutoff(ModeId::C))?);
    let conditional = StateVector::from_amplitudes(&out_basis, state.amplitudes()[start..start + len].to_vec())?;
    let probability = conditional.norm_sqr();
    let separability = separability_check(&conditional);
    Ok(PumpProjection { n_hat, n_tilde, conditional, probability, separability })
}

/// Every pump outcome `(n, ñ)` in row-major order.
pub fn project_all(state: &StateVector) -> Result<Vec<PumpProjection>> {
    let k = state.basis().cutoff(ModeId::A);
    let mut out = Vec::with_capacity((k + 1) * (k + 1));
    for n in 0..=k {
        for m in 0..=k {
            out.push(project_pump(state, n, m)?);
        }
    }
    Ok(out)
}

/// Conversion of the pump vacuum cut after the two-photon term.
#[derive(Clone, Debug)]
pub struct TwoPhotonExperiment {
    pub input: StateVector,
    pub output: StateVector,
}

/// Input `√(1−e^{−βω₀})/√(1−e^{−3βω₀}) (|0,0̃⟩ + e^{−βω₀/2}|1,1̃⟩ + e^{−βω₀}|2,2̃⟩)`
/// and its first-order converted state.
pub fn truncated_two_photon_state(beta: f64, config: &PdcConfig) -> Result<TwoPhotonExperiment> {
    let params = pump_params(beta, config)?;
    if config.cutoffs.pump < 2 {
        return Err(TfdError::invalid("cutoffs.pump", "two-photon truncation needs pump cutoff >= 2"));
    }
    let basis = Arc::new(config.basis()?);
    require_outputs(&basis)?;
    let x = params.beta_omega();
    let prefactor = ((-x).exp_m1() / (-3.0 * x).exp_m1()).sqrt();
    let mut input = StateVector::zeros(&basis);
    for n in 0..=2 {
        let amp = prefactor * boltzmann_power(n, x);
        input.set_amplitude(&[n, n, 0, 0, 0, 0], C64::new(amp, 0.0))?;
    }
    let output = first_order_branch(&input, config, &basis)?;
    Ok(TwoPhotonExperiment { input, output })
}
