//! Quick invariant checks runnable from the command line.

use std::f64::consts::LN_2;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tfd_core::liouville::{evolve, first_order_branch, liouvillian, ModeCutoffs, PdcConfig};
use tfd_core::pdc::{build_initial_state, closed_form_output_state, project_all};
use tfd_core::thermofield::{
    apply_bogoliubov, bogoliubov_generator, gibbs_expectation, thermofield_vacuum_closed_form, Statistics,
    ThermalParams, ThermalSpectrum,
};
use tfd_core::{BasisDescriptor, ModeId, Result, SparseOperator, StateVector, C64};

use crate::args::SelftestArgs;
use crate::commands::Outcome;
use crate::output::{Cell, Report, Table};
use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn check(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check { name, value, tolerance, passed: value <= tolerance }
}

fn pair_basis(cutoff: usize) -> Result<Arc<BasisDescriptor>> {
    Ok(Arc::new(BasisDescriptor::from_pair_cutoffs(cutoff, 0, 0)?))
}

fn fermi_dirac() -> Result<f64> {
    let basis = pair_basis(1)?;
    let mut worst: f64 = 0.0;
    for x in [0.1, 3f64.ln(), 5.0] {
        let p = ThermalParams::from_beta_omega(x, Statistics::Fermion)?;
        let vac = thermofield_vacuum_closed_form(&p, &basis, ModeId::A, ModeId::ATilde)?;
        worst = worst.max((vac.state.mean_occupation(ModeId::A) - 1.0 / (x.exp() + 1.0)).abs());
    }
    Ok(worst)
}

fn bose_einstein() -> Result<f64> {
    let p = ThermalParams::from_beta_omega(LN_2, Statistics::Boson)?;
    let vac = thermofield_vacuum_closed_form(&p, &pair_basis(40)?, ModeId::A, ModeId::ATilde)?;
    Ok((vac.state.mean_occupation(ModeId::A) - 1.0).abs())
}

fn bogoliubov_equivalence() -> Result<f64> {
    let x = 4f64.ln();
    let basis = pair_basis(24)?;
    let p = ThermalParams::from_beta_omega(x, Statistics::Boson)?;
    let closed = thermofield_vacuum_closed_form(&p, &basis, ModeId::A, ModeId::ATilde)?;
    let gen = bogoliubov_generator(p.mixing_angle(), Statistics::Boson, &basis, ModeId::A, ModeId::ATilde)?;
    let built = apply_bogoliubov(&StateVector::basis_state(&basis, &[0; 6])?, &gen, 1e-12)?;
    built.max_abs_diff(&closed.state)
}

/// Largest `|⟨0(β)|A⊗1|0(β)⟩ − Tr(ρA)|` over `count` random Hermitian `A`.
fn statistical_equality(seed: u64, count: usize) -> Result<f64> {
    let cutoff = 4;
    let basis = pair_basis(cutoff)?;
    let p = ThermalParams::from_beta_omega(1.0, Statistics::Boson)?;
    let vac = thermofield_vacuum_closed_form(&p, &basis, ModeId::A, ModeId::ATilde)?.state;
    let spectrum = ThermalSpectrum::harmonic(1.0, cutoff);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = cutoff + 1;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let mut m = vec![vec![C64::new(0.0, 0.0); d]; d];
        for i in 0..d {
            m[i][i] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..d {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[i][j] = z;
                m[j][i] = z.conj();
            }
        }
        let op = SparseOperator::embed_single_mode(ModeId::A, &m, &basis)?;
        let lhs = vac.inner_product(&op.apply(&vac)?)?;
        let rhs = gibbs_expectation(&op, &spectrum, 1.0, ModeId::A)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

fn small_config() -> PdcConfig {
    PdcConfig {
        cutoffs: ModeCutoffs { pump: 8, signal: 1, idler: 1 },
        ..PdcConfig::default()
    }
}

fn branch_exactness() -> Result<f64> {
    let config = small_config();
    let basis = Arc::new(config.basis()?);
    let initial = build_initial_state(LN_2, &config, &basis)?;
    let branch = first_order_branch(&initial, &config, &basis)?;
    branch.max_abs_diff(&closed_form_output_state(LN_2, &config, &basis)?)
}

fn projection_completeness() -> Result<f64> {
    let config = small_config();
    let basis = Arc::new(config.basis()?);
    let state = closed_form_output_state(LN_2, &config, &basis)?;
    let total: f64 = project_all(&state)?.iter().map(|p| p.probability).sum();
    Ok((total - 1.0).abs())
}

fn evolution_norm() -> Result<f64> {
    let config = PdcConfig {
        kappa: 0.3,
        cutoffs: ModeCutoffs { pump: 4, signal: 2, idler: 2 },
        ..PdcConfig::default()
    };
    let basis = Arc::new(config.basis()?);
    let initial = build_initial_state(LN_2, &config, &basis)?;
    let out = evolve(&initial, &liouvillian(&config, &basis)?, config.t, 1e-12)?;
    Ok((out.norm() - 1.0).abs())
}

pub fn run_checks(seed: u64, count: usize) -> Result<Vec<Check>> {
    Ok(vec![
        check("fermi_dirac_occupation", fermi_dirac()?, 1e-12),
        check("bose_einstein_cutoff_40", bose_einstein()?, 1e-8),
        check("bogoliubov_construction", bogoliubov_equivalence()?, 1e-8),
        check("statistical_equality", statistical_equality(seed, count)?, 1e-12),
        check("first_order_branch", branch_exactness()?, 1e-12),
        check("projection_completeness", projection_completeness()?, 1e-10),
        check("evolution_norm", evolution_norm()?, 1e-10),
    ])
}

#[derive(Debug, Serialize)]
struct SelftestInputs {
    seed: u64,
    count: usize,
}

#[derive(Debug, Serialize)]
struct SelftestOutputs {
    passed: bool,
    checks: Vec<Check>,
}

/// Fails with a numerical error when any check fails, after the report is written.
pub fn selftest(args: &SelftestArgs) -> std::result::Result<(Outcome, bool), Failure> {
    let seed = args.seed.unwrap_or(2024);
    let count = args.count.unwrap_or(50);
    let checks = run_checks(seed, count)?;
    let passed = checks.iter().all(|c| c.passed);
    let mut table = Table::new(vec!["check", "value", "tolerance", "passed"]);
    for c in &checks {
        table.push(vec![
            Cell::Text(c.name.to_string()),
            Cell::Float(c.value),
            Cell::Float(c.tolerance),
            Cell::Text(c.passed.to_string()),
        ]);
    }
    let report = Report::new("selftest", SelftestInputs { seed, count }, SelftestOutputs { passed, checks }, vec![]);
    Ok((Outcome { report, table: Some(table) }, passed))
}
