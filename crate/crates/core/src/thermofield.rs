//! Thermofield vacua and the Bogoliubov transformation that generates them.
//!
//! A single oscillator of frequency `ω` at inverse temperature `β` is doubled
//! into a hat/tilde pair. The thermal vacuum is the pure state
//!
//! ```text
//! |0(β)⟩ = Z^(-1/2) Σ_n exp(−βE_n/2) |n, ñ⟩
//! ```
//!
//! whose hat-sector expectation values equal Gibbs averages. It is also
//! `exp(−iḠ)|0, 0̃⟩` with `Ḡ = iθ(a†b̃† − a b̃)` and mixing angle
//! `ϑ = atanh(e^{−βω/2})` (bosons) or `θ = atan(e^{−βω/2})` (fermions).
//!
//! Fermions are realised on cutoff-1 pair modes; nothing beyond the single
//! pair is supported.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TfdError};
use crate::expm::{exp_action, ExpmOptions};
use crate::expr::raise;
use crate::fock::{same_basis, BasisDescriptor, ModeId, Occupations, StateVector};
use crate::operator::{SparseOperator, PRUNE};

/// Default tolerance for exponential actions.
pub const SERIES_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalParams {
    beta: f64,
    omega: f64,
    statistics: Statistics,
}

impl ThermalParams {
    /// `beta` may be `+∞` (zero temperature); both must be positive.
    pub fn new(beta: f64, omega: f64, statistics: Statistics) -> Result<Self> {
        if !(beta > 0.0) || beta.is_nan() {
            return Err(TfdError::invalid("beta", format!("must be > 0, got {beta}")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(TfdError::invalid("omega", format!("must be finite and > 0, got {omega}")));
        }
        Ok(ThermalParams { beta, omega, statistics })
    }

    /// Unit frequency with `β = beta_omega`.
    pub fn from_beta_omega(beta_omega: f64, statistics: Statistics) -> Result<Self> {
        Self::new(beta_omega, 1.0, statistics)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn beta_omega(&self) -> f64 {
        self.beta * self.omega
    }

    /// `e^{−βω/2}`, the ratio of successive vacuum amplitudes.
    pub fn boltzmann_ratio(&self) -> f64 {
        (-0.5 * self.beta_omega()).exp()
    }

    pub fn mixing_angle(&self) -> f64 {
        let q = self.boltzmann_ratio();
        match self.statistics {
            Statistics::Boson => q.atanh(),
            Statistics::Fermion => q.atan(),
        }
    }

    /// Bose-Einstein or Fermi-Dirac mean occupation.
    pub fn thermal_occupation(&self) -> f64 {
        let x = self.beta_omega();
        match self.statistics {
            Statistics::Boson => 1.0 / x.exp_m1(),
            Statistics::Fermion => 1.0 / (x.exp() + 1.0),
        }
    }
}

/// Energy levels `E_0, E_1, …` of a single hat-sector oscillator.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalSpectrum {
    energies: Vec<f64>,
}

impl ThermalSpectrum {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(TfdError::invalid("energies", "spectrum is empty"));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(TfdError::invalid("energies", "all levels must be finite"));
        }
        Ok(ThermalSpectrum { energies })
    }

    /// `E_n = n·ω` for `n = 0..=cutoff`.
    pub fn harmonic(omega: f64, cutoff: usize) -> Self {
        ThermalSpectrum { energies: (0..=cutoff).map(|n| n as f64 * omega).collect() }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn partition_function(&self, beta: f64) -> f64 {
        self.energies.iter().map(|e| (-beta * e).exp()).sum()
    }

    /// Gibbs populations `e^{−βE_n}/Z`, computed relative to the ground level.
    pub fn populations(&self, beta: f64) -> Vec<f64> {
        let e0 = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = self.energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }
}

/// A thermofield vacuum together with the thermal weight its cutoff discards.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermofieldVacuum {
    pub state: StateVector,
    pub params: ThermalParams,
    pub hat_mode: ModeId,
    /// Gibbs probability of occupations above the cutoff.
    pub tail_weight: f64,
}

impl ThermofieldVacuum {
    pub fn cutoff(&self) -> usize {
        self.state.basis().cutoff(self.hat_mode)
    }

    /// `|⟨n̂⟩_truncated − ⟨n̂⟩_Gibbs|`; for bosons this is exactly `(K+1)·w/(1−w)`.
    pub fn occupation_error_bound(&self) -> f64 {
        let w = self.tail_weight;
        (self.cutoff() as f64 + 1.0) * w / (1.0 - w)
    }
}

/// `e^{−n·x/2}`, with the `n = 0` term exactly 1 even at zero temperature.
pub(crate) fn boltzmann_power(n: usize, x: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        (-0.5 * n as f64 * x).exp()
    }
}

pub(crate) fn check_pair(hat: ModeId, tilde: ModeId) -> Result<()> {
    if hat.is_tilde() || tilde != hat.partner() {
        return Err(TfdError::NotAPartnerPair { hat, tilde });
    }
    Ok(())
}

fn pair_occupations(hat: ModeId, n_hat: usize, n_tilde: usize) -> Occupations {
    let mut occ = [0; 6];
    occ[hat.position()] = n_hat;
    occ[hat.partner().position()] = n_tilde;
    occ
}

/// `Σ_n c_n |n, ñ⟩` with every other mode empty.
fn paired_state(basis: &Arc<BasisDescriptor>, hat: ModeId, coefficients: &[f64]) -> Result<StateVector> {
    let mut s = StateVector::zeros(basis);
    for (n, &c) in coefficients.iter().enumerate() {
        s.set_amplitude(&pair_occupations(hat, n, n), C64::new(c, 0.0))?;
    }
    Ok(s)
}

/// Closed-form vacuum, renormalised over the truncated support.
pub fn thermofield_vacuum_closed_form(
    params: &ThermalParams,
    basis: &Arc<BasisDescriptor>,
    hat_mode: ModeId,
    tilde_mode: ModeId,
) -> Result<ThermofieldVacuum> {
    check_pair(hat_mode, tilde_mode)?;
    let cutoff = basis.cutoff(hat_mode);
    let (coefficients, tail_weight) = match params.statistics() {
        Statistics::Boson => {
            let x = params.beta_omega();
            let c: Vec<f64> = (0..=cutoff).map(|n| boltzmann_power(n, x)).collect();
            (c, (-(cutoff as f64 + 1.0) * x).exp())
        }
        Statistics::Fermion => {
            if cutoff < 1 {
                return Err(TfdError::invalid("cutoff", "fermionic vacuum needs cutoff >= 1"));
            }
            let theta = params.mixing_angle();
            (vec![theta.cos(), theta.sin()], 0.0)
        }
    };
    let state = paired_state(basis, hat_mode, &coefficients)?.normalize()?;
    Ok(ThermofieldVacuum { state, params: *params, hat_mode, tail_weight })
}

/// Vacuum for an arbitrary spectrum: amplitude `e^{−βE_n/2}/√Z` on `|n, ñ⟩`.
pub fn thermofield_vacuum_from_spectrum(
    spectrum: &ThermalSpectrum,
    beta: f64,
    basis: &Arc<BasisDescriptor>,
    hat_mode: ModeId,
    tilde_mode: ModeId,
) -> Result<StateVector> {
    check_pair(hat_mode, tilde_mode)?;
    let capacity = basis.mode_dim(hat_mode);
    if spectrum.len() > capacity {
        return Err(TfdError::SpectrumTooLong { len: spectrum.len(), capacity });
    }
    let coefficients: Vec<f64> = spectrum.populations(beta).into_iter().map(f64::sqrt).collect();
    paired_state(basis, hat_mode, &coefficients)
}

/// `Ḡ = iθ(a†b̃† − a b̃)` on a hat/tilde pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovGenerator {
    pub angle: f64,
    pub statistics: Statistics,
    pub hat_mode: ModeId,
    pub tilde_mode: ModeId,
    operator: SparseOperator,
}

impl BogoliubovGenerator {
    pub fn operator(&self) -> &SparseOperator {
        &self.operator
    }

    fn rebuild(&self, basis: &Arc<BasisDescriptor>) -> Result<SparseOperator> {
        generator_matrix(self.angle, basis, self.hat_mode, self.tilde_mode)
    }
}

fn generator_matrix(angle: f64, basis: &Arc<BasisDescriptor>, hat: ModeId, tilde: ModeId) -> Result<SparseOperator> {
    // iθ·a†b̃† plus its adjoint −iθ·a b̃
    (raise(hat) * raise(tilde)).scale(C64::new(0.0, angle)).plus_hc().evaluate(basis)
}

pub fn bogoliubov_generator(
    angle: f64,
    statistics: Statistics,
    basis: &Arc<BasisDescriptor>,
    hat_mode: ModeId,
    tilde_mode: ModeId,
) -> Result<BogoliubovGenerator> {
    check_pair(hat_mode, tilde_mode)?;
    if !angle.is_finite() {
        return Err(TfdError::invalid("angle", "must be finite"));
    }
    Ok(BogoliubovGenerator {
        angle,
        statistics,
        hat_mode,
        tilde_mode,
        operator: generator_matrix(angle, basis, hat_mode, tilde_mode)?,
    })
}

/// Copies `state` into `target`, which must contain every occupation of the source basis.
fn embed(state: &StateVector, target: &Arc<BasisDescriptor>) -> Result<StateVector> {
    let src = state.basis();
    let mut out = StateVector::zeros(target);
    for (i, z) in state.amplitudes().iter().enumerate() {
        let occ = src.occupations_of(i)?;
        out.amplitudes_mut()[target.state_index(&occ)?] = *z;
    }
    Ok(out)
}

/// Restriction of `state` to the occupations that exist in `target`, plus the discarded weight.
fn restrict(state: &StateVector, target: &Arc<BasisDescriptor>) -> Result<(StateVector, f64)> {
    let src = state.basis();
    let limits = target.cutoffs();
    let mut out = StateVector::zeros(target);
    let mut leaked = 0.0;
    for (i, z) in state.amplitudes().iter().enumerate() {
        let occ = src.occupations_of(i)?;
        if occ.iter().zip(limits.iter()).all(|(n, k)| n <= k) {
            out.amplitudes_mut()[target.state_index(&occ)?] = *z;
        } else {
            leaked += z.norm_sqr();
        }
    }
    Ok((out, leaked))
}

/// `exp(−iḠ)|state⟩`.
///
/// Fermionic pairs are exponentiated in their exact two-level space. For bosons
/// the transformation is evaluated on a basis padded with guard levels on the
/// pair and then projected back, so the result is the projection of the
/// untruncated transformation. Fails when the guard levels stay populated or
/// when the projection loses more than `tolerance` of the norm, i.e. the cutoff
/// is too small for the angle.
pub fn apply_bogoliubov(state: &StateVector, generator: &BogoliubovGenerator, tolerance: f64) -> Result<StateVector> {
    if !same_basis(state.basis(), generator.operator.basis()) {
        return Err(TfdError::BasisMismatch);
    }
    let opts = ExpmOptions::with_tolerance(tolerance);
    if generator.statistics == Statistics::Fermion || generator.angle == 0.0 {
        return Ok(exp_action(&generator.operator, 1.0, state, &opts)?.0);
    }

    let basis = state.basis();
    let hat = generator.hat_mode;
    let cutoff = basis.cutoff(hat);
    let max_padding = 8 * (cutoff + 1) + 64;
    let mut padding = (cutoff / 2).max(16);
    loop {
        let padded = Arc::new(basis.with_pair_cutoff(hat, cutoff + padding));
        let op = generator.rebuild(&padded)?;
        let (out, _) = exp_action(&op, 1.0, &embed(state, &padded)?, &opts)?;
        let band_start = cutoff + padding / 2;
        let guard: f64 = out
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                padded.occupation(*i, hat) > band_start || padded.occupation(*i, hat.partner()) > band_start
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        if guard.sqrt() <= 1e-2 * tolerance {
            let (projected, _) = restrict(&out, basis)?;
            let drift = (projected.norm() - state.norm()).abs();
            if drift > tolerance {
                return Err(TfdError::ConvergenceFailure(format!(
                    "cutoff {cutoff} too small for angle {}: projection changes the norm by {drift:.3e}",
                    generator.angle
                )));
            }
            return Ok(projected);
        }
        if padding >= max_padding {
            return Err(TfdError::ConvergenceFailure(format!(
                "guard levels still populated ({:.3e}) after padding by {padding}",
                guard.sqrt()
            )));
        }
        padding = (2 * padding).min(max_padding);
    }
}

/// `exp(−iḠ)` restricted to the `(|1,1̃⟩, |0,0̃⟩)` plane and to the
/// `(|1,0̃⟩, |0,1̃⟩)` plane of a fermionic pair. Row `i` holds the image of
/// the `i`-th basis vector, matching `U (|1,1̃⟩, |0,0̃⟩)ᵀ = R (|1,1̃⟩, |0,0̃⟩)ᵀ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FermionicRotation {
    pub rotation: [[f64; 2]; 2],
    pub orthogonal_block: [[f64; 2]; 2],
    /// Largest imaginary part seen in either block.
    pub max_imaginary: f64,
}

pub fn fermionic_rotation_check(angle: f64) -> Result<FermionicRotation> {
    let basis = Arc::new(BasisDescriptor::from_pair_cutoffs(1, 0, 0)?);
    let gen = bogoliubov_generator(angle, Statistics::Fermion, &basis, ModeId::A, ModeId::ATilde)?;
    let ket = |n: usize, m: usize| pair_occupations(ModeId::A, n, m);
    let mut max_imaginary: f64 = 0.0;
    let mut block = |states: [Occupations; 2]| -> Result<[[f64; 2]; 2]> {
        let mut out = [[0.0; 2]; 2];
        for (i, src) in states.iter().enumerate() {
            let image = apply_bogoliubov(&StateVector::basis_state(&basis, src)?, &gen, 1e-15)?;
            for (j, dst) in states.iter().enumerate() {
                let z = image.amplitude(dst)?;
                max_imaginary = max_imaginary.max(z.im.abs());
                out[i][j] = z.re;
            }
        }
        Ok(out)
    };
    let rotation = block([ket(1, 1), ket(0, 0)])?;
    let orthogonal_block = block([ket(1, 0), ket(0, 1)])?;
    Ok(FermionicRotation { rotation, orthogonal_block, max_imaginary })
}

/// Thermal lowering operator `ā_β = exp(−iḠ) a exp(iḠ)`, conjugated inside the
/// truncated space column by column.
///
/// Truncation distorts the entries near the cutoff; low-occupation blocks
/// agree with [`bogoliubov_ladder_reference`].
pub fn thermal_annihilator(
    params: &ThermalParams,
    basis: &Arc<BasisDescriptor>,
    hat_mode: ModeId,
    tilde_mode: ModeId,
    tolerance: f64,
) -> Result<SparseOperator> {
    check_pair(hat_mode, tilde_mode)?;
    let gen = generator_matrix(params.mixing_angle(), basis, hat_mode, tilde_mode)?;
    let lower_op = SparseOperator::annihilator(hat_mode, basis);
    let opts = ExpmOptions::with_tolerance(tolerance);
    let mut triplets = Vec::new();
    let mut column = StateVector::zeros(basis);
    for j in 0..basis.total_dim() {
        column.amplitudes_mut()[j] = C64::new(1.0, 0.0);
        // exp(iḠ) e_j
        let (w, _) = exp_action(&gen, -1.0, &column, &opts)?;
        let (image, _) = exp_action(&gen, 1.0, &lower_op.apply(&w)?, &opts)?;
        column.amplitudes_mut()[j] = C64::new(0.0, 0.0);
        for (i, z) in image.amplitudes().iter().enumerate() {
            if z.norm() >= PRUNE {
                triplets.push((i, j, *z));
            }
        }
    }
    SparseOperator::from_triplets(basis, triplets)
}

/// The untruncated Bogoliubov combination written in the truncated space:
/// `cosh ϑ·a − sinh ϑ·b̃†` for bosons and `cos θ·a − sin θ·b̃†` for fermions,
/// where the fermionic `b̃†` carries the parity string `(−1)^{n_a}` so that it
/// anticommutes with `a`.
pub fn bogoliubov_ladder_reference(
    params: &ThermalParams,
    basis: &Arc<BasisDescriptor>,
    hat_mode: ModeId,
    tilde_mode: ModeId,
) -> Result<SparseOperator> {
    check_pair(hat_mode, tilde_mode)?;
    let angle = params.mixing_angle();
    let lower_op = SparseOperator::annihilator(hat_mode, basis);
    let tilde_raise = SparseOperator::creator(tilde_mode, basis);
    let (c, s, tilde_raise) = match params.statistics() {
        Statistics::Boson => (angle.cosh(), angle.sinh(), tilde_raise),
        Statistics::Fermion => {
            let parity = SparseOperator::diagonal(basis, |i| {
                let sign = if basis.occupation(i, hat_mode) % 2 == 0 { 1.0 } else { -1.0 };
                C64::new(sign, 0.0)
            });
            (angle.cos(), angle.sin(), parity.compose(&tilde_raise)?)
        }
    };
    lower_op.scale(C64::new(c, 0.0)).add_scaled(C64::new(-s, 0.0), &tilde_raise)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnnihilationResidual {
    /// `‖ā_β|0(β)⟩‖`.
    pub residual: f64,
    /// `tanh^K ϑ` for bosons at cutoff `K`; zero for the exact fermionic pair.
    pub tail_amplitude: f64,
    /// Whether the residual is within `max(tolerance, tail_amplitude)`.
    pub within_bound: bool,
}

/// Norm of the thermal lowering operator applied to a thermofield vacuum.
pub fn annihilation_residual(
    params: &ThermalParams,
    basis: &Arc<BasisDescriptor>,
    vacuum: &StateVector,
    hat_mode: ModeId,
    tolerance: f64,
) -> Result<AnnihilationResidual> {
    let lowering = thermal_annihilator(params, basis, hat_mode, hat_mode.partner(), tolerance)?;
    let residual = lowering.apply(vacuum)?.norm();
    let tail_amplitude = match params.statistics() {
        Statistics::Boson => params.boltzmann_ratio().powi(basis.cutoff(hat_mode) as i32),
        Statistics::Fermion => 0.0,
    };
    Ok(AnnihilationResidual {
        residual,
        tail_amplitude,
        within_bound: residual <= tolerance.max(tail_amplitude),
    })
}

/// Gibbs average `Tr(ρ̂ Â) = Σ_n p_n ⟨n|Â|n⟩` of an operator that acts only on
/// `hat_mode` (as `Â ⊗ 1` on the full basis).
pub fn gibbs_expectation(
    operator: &SparseOperator,
    spectrum: &ThermalSpectrum,
    beta: f64,
    hat_mode: ModeId,
) -> Result<C64> {
    let basis = operator.basis();
    let d = basis.mode_dim(hat_mode);
    if spectrum.len() > d {
        return Err(TfdError::SpectrumTooLong { len: spectrum.len(), capacity: d });
    }
    let stride = basis.stride(hat_mode);
    // single-mode block, read off the rows where every other mode is empty
    let local = |i: usize| -> usize { basis.occupation(i, hat_mode) };
    let mut block = vec![vec![C64::new(0.0, 0.0); d]; d];
    for n in 0..d {
        for (c, v) in operator.row(n * stride) {
            if c % stride != 0 || c / stride >= d {
                let other = ModeId::ALL
                    .into_iter()
                    .find(|&m| m != hat_mode && basis.occupation(c, m) != 0)
                    .unwrap_or(hat_mode);
                return Err(TfdError::OperatorTouchesTildeSector(other));
            }
            block[n][c / stride] = v;
        }
    }
    for (r, c, v) in operator.triplets() {
        let rest_r = r - local(r) * stride;
        let rest_c = c - local(c) * stride;
        if rest_r != rest_c || block[local(r)][local(c)] != v {
            let other = ModeId::ALL
                .into_iter()
                .find(|&m| m != hat_mode && basis.occupation(r, m) != basis.occupation(c, m))
                .unwrap_or(hat_mode.partner());
            return Err(TfdError::OperatorTouchesTildeSector(other));
        }
    }
    let block_nnz = block.iter().flatten().filter(|v| v.norm() >= PRUNE).count();
    if operator.nnz() != block_nnz * (basis.total_dim() / d) {
        return Err(TfdError::OperatorTouchesTildeSector(hat_mode.partner()));
    }
    Ok(spectrum
        .populations(beta)
        .iter()
        .enumerate()
        .map(|(n, p)| block[n][n] * *p)
        .sum())
}
