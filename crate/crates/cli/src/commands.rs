//! Subcommand bodies. Each returns the JSON report and the CSV table it wants written.

use std::f64::consts::LN_2;
use std::sync::Arc;

use serde::Serialize;
use tfd_core::liouville::{ModeCutoffs, PdcConfig};
use tfd_core::pdc::{
    closed_form_output_state, experiment_basis, fidelity, project_pump, residual_simplified_eval, run_pdc,
    truncated_two_photon_state, LambdaSeries, Method, PdcReport, PdcRun,
};
use tfd_core::thermofield::{
    annihilation_residual, thermofield_vacuum_closed_form, Statistics, ThermalParams, SERIES_TOLERANCE,
};
use tfd_core::{BasisDescriptor, ModeId, StateVector};

use crate::args::{
    ExampleArgs, MethodArg, PdcArgs, PhysicsArgs, ProjectArgs, SourceArg, StatisticsArg, SweepArgs, VacuumArgs,
};
use crate::output::{Cell, Report, Table};
use crate::Failure;

pub struct Outcome {
    pub report: Report,
    pub table: Option<Table>,
}

/// Pump tail weights above this produce a truncation warning.
const TAIL_WARNING: f64 = 1e-6;

fn required<T>(value: Option<T>, name: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Config(format!("missing required parameter {name}")))
}

#[derive(Debug, Clone, Serialize)]
struct VacuumInputs {
    statistics: Statistics,
    beta_omega: f64,
    omega: f64,
    cutoff: usize,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
struct VacuumOutputs {
    beta: f64,
    omega: f64,
    statistics: Statistics,
    angle: f64,
    /// Occupation of the truncated vacuum.
    occupation: f64,
    /// Bose-Einstein or Fermi-Dirac value.
    exact_occupation: f64,
    occupation_error_bound: f64,
    residual: f64,
    residual_bound: f64,
    residual_within_bound: bool,
    tail_weight: f64,
}

pub fn vacuum(args: &VacuumArgs, max_dim: usize) -> Result<Outcome, Failure> {
    let statistics = match args.statistics.unwrap_or(StatisticsArg::Boson) {
        StatisticsArg::Boson => Statistics::Boson,
        StatisticsArg::Fermion => Statistics::Fermion,
    };
    let beta_omega = required(args.beta_omega, "beta_omega")?;
    let omega = args.omega.unwrap_or(1.0);
    let cutoff = args.cutoff.unwrap_or(match statistics {
        Statistics::Boson => 16,
        Statistics::Fermion => 1,
    });
    if statistics == Statistics::Fermion && cutoff != 1 {
        return Err(Failure::Config(format!("cutoff: a fermionic mode needs cutoff 1, got {cutoff}")));
    }
    let tolerance = args.tolerance.unwrap_or(SERIES_TOLERANCE);
    if !(tolerance > 0.0) {
        return Err(Failure::Config(format!("tolerance: must be > 0, got {tolerance}")));
    }
    if !(beta_omega > 0.0) {
        return Err(Failure::Config(format!("beta_omega: must be > 0, got {beta_omega}")));
    }
    let params = ThermalParams::new(beta_omega / omega, omega, statistics)?;
    let basis = BasisDescriptor::from_pair_cutoffs(cutoff, 0, 0)?;
    basis.check_dim(max_dim)?;
    let basis = Arc::new(basis);
    let vacuum = thermofield_vacuum_closed_form(&params, &basis, ModeId::A, ModeId::ATilde)?;
    let residual = annihilation_residual(&params, &basis, &vacuum.state, ModeId::A, tolerance)?;

    let mut table = Table::new(vec!["n", "amplitude_re", "amplitude_im", "probability"]);
    for n in 0..=cutoff {
        let z = vacuum.state.amplitude(&[n, n, 0, 0, 0, 0])?;
        table.push(vec![Cell::Int(n), Cell::Float(z.re), Cell::Float(z.im), Cell::Float(z.norm_sqr())]);
    }
    let outputs = VacuumOutputs {
        beta: params.beta(),
        omega,
        statistics,
        angle: params.mixing_angle(),
        occupation: vacuum.state.mean_occupation(ModeId::A),
        exact_occupation: params.thermal_occupation(),
        occupation_error_bound: vacuum.occupation_error_bound(),
        residual: residual.residual,
        residual_bound: residual.tail_amplitude.max(tolerance),
        residual_within_bound: residual.within_bound,
        tail_weight: vacuum.tail_weight,
    };
    let mut warnings = Vec::new();
    if !residual.within_bound {
        warnings.push(format!(
            "truncation: annihilation residual {} exceeds max(tolerance, tail amplitude)",
            residual.residual
        ));
    }
    let inputs = VacuumInputs { statistics, beta_omega, omega, cutoff, tolerance };
    Ok(Outcome { report: Report::new("vacuum", inputs, outputs, warnings), table: Some(table) })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolvedPhysics {
    pub beta_omega0: f64,
    #[serde(flatten)]
    pub config: PdcConfig,
}

impl ResolvedPhysics {
    pub fn from_args(args: &PhysicsArgs) -> Result<Self, Failure> {
        let d = PdcConfig::default();
        let config = PdcConfig {
            omega0: args.omega0.unwrap_or(d.omega0),
            omega1: args.omega1.unwrap_or(d.omega1),
            omega2: args.omega2.unwrap_or(d.omega2),
            kappa: args.kappa.unwrap_or(d.kappa),
            t: args.t.unwrap_or(d.t),
            cutoffs: ModeCutoffs {
                pump: args.pump_cutoff.unwrap_or(d.cutoffs.pump),
                signal: args.signal_cutoff.unwrap_or(d.cutoffs.signal),
                idler: args.idler_cutoff.unwrap_or(d.cutoffs.idler),
            },
            series_tolerance: args.tolerance.unwrap_or(d.series_tolerance),
        };
        config.validate()?;
        let beta_omega0 = args.beta_omega0.unwrap_or(LN_2);
        Self::check_beta_omega0(beta_omega0)?;
        Ok(ResolvedPhysics { beta_omega0, config })
    }

    fn check_beta_omega0(x: f64) -> Result<(), Failure> {
        if !(x > 0.0) {
            return Err(Failure::Config(format!("beta_omega0: must be > 0, got {x}")));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        self.beta_omega0 / self.config.omega0
    }

    fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.config.off_resonance() {
            w.push("off-resonance".to_string());
        }
        if let Ok(series) = LambdaSeries::new(self.beta_omega0, self.config.cutoffs.pump) {
            if series.tail_weight > TAIL_WARNING {
                w.push(format!("truncation: pump tail weight {} above {TAIL_WARNING}", series.tail_weight));
            }
        }
        w
    }
}

#[derive(Debug, Serialize)]
struct PdcInputs {
    #[serde(flatten)]
    physics: ResolvedPhysics,
    method: MethodArg,
}

#[derive(Debug, Serialize)]
struct PdcOutputs {
    closed_form: Option<PdcReport>,
    evolve: Option<PdcReport>,
    /// `|⟨closed form|evolved converted sector⟩|²` (method both).
    branch_fidelity: Option<f64>,
}

fn profile_table(run: &PdcRun) -> Table {
    let mut table = Table::new(vec!["n", "probability_before", "probability_after"]);
    for (n, (b, a)) in run.report.profile_before.iter().zip(&run.report.profile_after).enumerate() {
        table.push(vec![Cell::Int(n), Cell::Float(*b), Cell::Float(*a)]);
    }
    table
}

pub fn pdc(args: &PdcArgs, max_dim: usize) -> Result<Outcome, Failure> {
    let physics = ResolvedPhysics::from_args(&args.physics)?;
    let method = args.method.unwrap_or(MethodArg::ClosedForm);
    let basis = experiment_basis(&physics.config, max_dim)?;
    let beta = physics.beta();
    let closed = match method {
        MethodArg::ClosedForm | MethodArg::Both => Some(run_pdc(beta, &physics.config, &basis, Method::ClosedForm)?),
        MethodArg::Evolve => None,
    };
    let evolved = match method {
        MethodArg::Evolve | MethodArg::Both => Some(run_pdc(beta, &physics.config, &basis, Method::ExactEvolution)?),
        MethodArg::ClosedForm => None,
    };
    let branch_fidelity = match (&closed, &evolved) {
        (Some(c), Some(e)) => Some(fidelity(&c.output, &e.output)?),
        _ => None,
    };
    let table = profile_table(closed.as_ref().or(evolved.as_ref()).expect("one method ran"));
    let outputs = PdcOutputs {
        closed_form: closed.map(|r| r.report),
        evolve: evolved.map(|r| r.report),
        branch_fidelity,
    };
    let warnings = physics.warnings();
    let inputs = PdcInputs { physics, method };
    Ok(Outcome { report: Report::new("pdc", inputs, outputs, warnings), table: Some(table) })
}

#[derive(Debug, Serialize)]
struct ProjectInputs {
    #[serde(flatten)]
    physics: ResolvedPhysics,
    n_hat: usize,
    n_tilde: usize,
    source: SourceArg,
}

#[derive(Debug, Serialize)]
struct Amplitude {
    b: usize,
    b_tilde: usize,
    c: usize,
    c_tilde: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct ProjectOutputs {
    probability: f64,
    separable: bool,
    second_singular_value: f64,
    schmidt_rank: usize,
    singular_values: Vec<f64>,
    conditional: Vec<Amplitude>,
}

fn source_state(
    source: SourceArg,
    physics: &ResolvedPhysics,
    basis: &Arc<BasisDescriptor>,
) -> Result<StateVector, Failure> {
    let beta = physics.beta();
    Ok(match source {
        SourceArg::ClosedForm => closed_form_output_state(beta, &physics.config, basis)?,
        SourceArg::TwoPhoton => truncated_two_photon_state(beta, &physics.config)?.output,
        SourceArg::Evolve => run_pdc(beta, &physics.config, basis, Method::ExactEvolution)?.output,
    })
}

pub fn project(args: &ProjectArgs, max_dim: usize) -> Result<Outcome, Failure> {
    let physics = ResolvedPhysics::from_args(&args.physics)?;
    let n_hat = required(args.n_hat, "n_hat")?;
    let n_tilde = required(args.n_tilde, "n_tilde")?;
    let source = args.source.unwrap_or(SourceArg::ClosedForm);
    let basis = experiment_basis(&physics.config, max_dim)?;
    // range check before any expensive state preparation
    basis.state_index(&[n_hat, n_tilde, 0, 0, 0, 0])?;
    let state = source_state(source, &physics, &basis)?;
    let projection = project_pump(&state, n_hat, n_tilde)?;

    let mut table = Table::new(vec!["b", "b_tilde", "c", "c_tilde", "amplitude_re", "amplitude_im", "probability"]);
    let mut conditional = Vec::new();
    for (occ, z) in projection.conditional.support(0.0) {
        let [_, _, b, b_tilde, c, c_tilde] = occ;
        table.push(vec![
            Cell::Int(b),
            Cell::Int(b_tilde),
            Cell::Int(c),
            Cell::Int(c_tilde),
            Cell::Float(z.re),
            Cell::Float(z.im),
            Cell::Float(z.norm_sqr()),
        ]);
        conditional.push(Amplitude { b, b_tilde, c, c_tilde, re: z.re, im: z.im });
    }
    let sep = &projection.separability;
    let outputs = ProjectOutputs {
        probability: projection.probability,
        separable: sep.separable,
        second_singular_value: sep.second_singular_value,
        schmidt_rank: sep.schmidt_rank(),
        singular_values: sep.singular_values.clone(),
        conditional,
    };
    let warnings = physics.warnings();
    let inputs = ProjectInputs { physics, n_hat, n_tilde, source };
    Ok(Outcome { report: Report::new("project", inputs, outputs, warnings), table: Some(table) })
}

#[derive(Debug, Serialize)]
struct SweepRow {
    beta_omega0: f64,
    n0_before: f64,
    n0_after: f64,
    tail_weight: f64,
}

#[derive(Debug, Serialize)]
struct SweepInputs {
    #[serde(flatten)]
    physics: ResolvedPhysics,
    values: Vec<f64>,
}

/// `from, from + step, …` up to `to`; a last point within `1e-9·step` of `to` is kept.
pub fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>, Failure> {
    if !args.values.is_empty() {
        return Ok(args.values.clone());
    }
    let from = required(args.from, "from")?;
    let to = args.to.unwrap_or(from);
    let step = args.step.unwrap_or(1.0);
    if !(step > 0.0) || !step.is_finite() {
        return Err(Failure::Config(format!("step: must be finite and > 0, got {step}")));
    }
    if !(to >= from) || !from.is_finite() || !to.is_finite() {
        return Err(Failure::Config(format!("range: empty sweep from {from} to {to}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

pub fn sweep(args: &SweepArgs, max_dim: usize) -> Result<Outcome, Failure> {
    let base = ResolvedPhysics::from_args(&args.physics)?;
    let values = sweep_values(args)?;
    let basis = experiment_basis(&base.config, max_dim)?;
    let mut table = Table::new(vec!["beta_omega0", "n0_before", "n0_after", "tail_weight"]);
    let mut rows = Vec::with_capacity(values.len());
    let mut warnings = Vec::new();
    for &x in &values {
        ResolvedPhysics::check_beta_omega0(x)?;
        let point = ResolvedPhysics { beta_omega0: x, ..base };
        let report = run_pdc(point.beta(), &point.config, &basis, Method::ClosedForm)?.report;
        table.push(vec![
            Cell::Float(x),
            Cell::Float(report.n0_before),
            Cell::Float(report.n0_after),
            Cell::Float(report.tail_weight),
        ]);
        rows.push(SweepRow {
            beta_omega0: x,
            n0_before: report.n0_before,
            n0_after: report.n0_after,
            tail_weight: report.tail_weight,
        });
        for w in point.warnings() {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    let inputs = SweepInputs { physics: base, values };
    Ok(Outcome { report: Report::new("sweep", inputs, rows, warnings), table: Some(table) })
}

#[derive(Debug, Serialize)]
struct ExampleValues {
    n0_before: f64,
    /// Not printed as a number with the example, only as a sum.
    n0_after: Option<f64>,
    n1_after: f64,
    n2_after: f64,
}

#[derive(Debug, Serialize)]
struct ExampleOutputs {
    /// As printed with the worked example.
    stated: ExampleValues,
    /// Computed from the truncated state amplitudes.
    recomputed: ExampleValues,
    /// `1/(e^{βω₀} − 1)` without truncation.
    bose_einstein: f64,
    /// `(1/2)[Σ n² e^{−n ln 2} − 1]` over the truncated sum.
    example_sum: f64,
    simplified_formula: f64,
    simplified_discrepancy: f64,
}

#[derive(Debug, Serialize)]
struct ExampleInputs {
    beta_omega0: f64,
    pump_cutoff: usize,
}

pub fn example(args: &ExampleArgs, max_dim: usize) -> Result<Outcome, Failure> {
    let pump_cutoff = args.pump_cutoff.unwrap_or(40);
    let config = PdcConfig {
        cutoffs: ModeCutoffs { pump: pump_cutoff, signal: 1, idler: 1 },
        ..PdcConfig::default()
    };
    let basis = experiment_basis(&config, max_dim)?;
    let run = run_pdc(LN_2 / config.omega0, &config, &basis, Method::ClosedForm)?;
    let series = LambdaSeries::new(LN_2, pump_cutoff)?;
    let example_sum = 0.5
        * ((0..=pump_cutoff).map(|n| (n * n) as f64 * (-(n as f64) * LN_2).exp()).sum::<f64>() - 1.0);
    let audit = residual_simplified_eval(LN_2, pump_cutoff)?;
    let r = &run.report;
    let outputs = ExampleOutputs {
        stated: ExampleValues { n0_before: 2.0, n0_after: None, n1_after: 1.0, n2_after: 1.0 },
        recomputed: ExampleValues {
            n0_before: r.n0_before,
            n0_after: Some(r.n0_after),
            n1_after: r.n1_after,
            n2_after: r.n2_after,
        },
        bose_einstein: series.bose_einstein(),
        example_sum,
        simplified_formula: audit.simplified,
        simplified_discrepancy: audit.discrepancy,
    };
    let warnings = vec![format!(
        "stated n0_before = 2 disagrees with 1/(e^(beta omega0) - 1) = {} at beta omega0 = ln 2",
        series.bose_einstein()
    )];
    let inputs = ExampleInputs { beta_omega0: LN_2, pump_cutoff };
    Ok(Outcome { report: Report::new("example", inputs, outputs, warnings), table: None })
}
