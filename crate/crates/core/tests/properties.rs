//! Property tests over randomly drawn cutoffs, states, operators and parameters.

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfd_core::expr::{lower, number, raise, OperatorExpression};
use tfd_core::liouville::{evolve, liouvillian, pdc_hamiltonian, ModeCutoffs, PdcConfig};
use tfd_core::pdc::{closed_form_output_state, project_all, run_pdc, LambdaSeries, Method};
use tfd_core::schmidt::pump_output_separability;
use tfd_core::thermofield::{
    apply_bogoliubov, bogoliubov_generator, gibbs_expectation, thermofield_vacuum_closed_form, Statistics,
    ThermalParams, ThermalSpectrum,
};
use tfd_core::{BasisDescriptor, ModeId, SparseOperator, StateVector, C64};

fn basis(a: usize, b: usize, c: usize) -> Arc<BasisDescriptor> {
    Arc::new(BasisDescriptor::from_pair_cutoffs(a, b, c).unwrap())
}

fn random_state(basis: &Arc<BasisDescriptor>, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..basis.total_dim())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(basis, amps).unwrap()
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    let mut m = vec![vec![C64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        m[i][i] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..d {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[i][j] = z;
            m[j][i] = z.conj();
        }
    }
    m
}

fn hat_mode() -> impl Strategy<Value = ModeId> {
    prop::sample::select(ModeId::HAT.to_vec())
}

fn any_mode() -> impl Strategy<Value = ModeId> {
    prop::sample::select(ModeId::ALL.to_vec())
}

/// Small random polynomial in the ladder operators of the hat modes.
fn hat_expression() -> impl Strategy<Value = OperatorExpression> {
    let leaf = prop_oneof![
        hat_mode().prop_map(lower),
        hat_mode().prop_map(raise),
        hat_mode().prop_map(number),
        Just(OperatorExpression::Identity),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (inner.clone(), -2.0..2.0f64, -2.0..2.0f64).prop_map(|(e, re, im)| e.scale(C64::new(re, im))),
            prop::collection::vec(inner.clone(), 1..3).prop_map(OperatorExpression::Sum),
            prop::collection::vec(inner.clone(), 1..3).prop_map(OperatorExpression::Product),
            inner.prop_map(|e| e.dagger()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn index_bijection(a in 0usize..4, b in 0usize..3, c in 0usize..3) {
        let basis = basis(a, b, c);
        for i in 0..basis.total_dim() {
            let occ = basis.occupations_of(i).unwrap();
            prop_assert_eq!(basis.state_index(&occ).unwrap(), i);
        }
    }

    #[test]
    fn basis_states_are_orthonormal(a in 0usize..3, i in 0usize..1000, j in 0usize..1000) {
        let basis = basis(a, 1, 1);
        let d = basis.total_dim();
        let (i, j) = (i % d, j % d);
        let si = StateVector::basis_state(&basis, &basis.occupations_of(i).unwrap()).unwrap();
        let sj = StateVector::basis_state(&basis, &basis.occupations_of(j).unwrap()).unwrap();
        let expect = if i == j { 1.0 } else { 0.0 };
        prop_assert_eq!(si.inner_product(&sj).unwrap(), C64::new(expect, 0.0));
    }

    #[test]
    fn phase_preserves_norm(seed: u64, phi in -10.0..10.0f64) {
        let s = random_state(&basis(2, 1, 1), seed);
        let rotated = s.scaled(C64::from_polar(1.0, phi));
        prop_assert!((rotated.norm() - s.norm()).abs() <= 1e-15 * s.norm().max(1.0));
    }

    #[test]
    fn inner_product_is_sesquilinear(seed: u64, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let b = basis(2, 1, 1);
        let (u, v, w) = (random_state(&b, seed), random_state(&b, seed ^ 1), random_state(&b, seed ^ 2));
        let z = C64::new(re, im);
        let uv = u.inner_product(&v).unwrap();
        prop_assert!((uv - v.inner_product(&u).unwrap().conj()).norm() < 1e-12);
        let lhs = u.inner_product(&v.add_scaled(z, &w).unwrap()).unwrap();
        let rhs = uv + z * u.inner_product(&w).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn compose_matches_sequential_apply(seed: u64, m1 in any_mode(), m2 in any_mode(), dag in any::<bool>()) {
        let b = basis(3, 2, 1);
        let x = SparseOperator::annihilator(m1, &b);
        let y = if dag { SparseOperator::creator(m2, &b) } else { SparseOperator::number_operator(m2, &b) };
        let v = random_state(&b, seed);
        let direct = x.compose(&y).unwrap().apply(&v).unwrap();
        let seq = x.apply(&y.apply(&v).unwrap()).unwrap();
        prop_assert!(direct.max_abs_diff(&seq).unwrap() < 1e-13);
    }

    #[test]
    fn canonical_commutator_with_cutoff_artifact(m in any_mode(), a in 1usize..4, b in 1usize..3) {
        let basis = basis(a, b, 1);
        let comm = SparseOperator::annihilator(m, &basis)
            .commutator(&SparseOperator::creator(m, &basis))
            .unwrap();
        let k = basis.cutoff(m);
        for (r, c, v) in comm.triplets() {
            prop_assert_eq!(r, c);
            let expect = if basis.occupation(r, m) < k { 1.0 } else { -(k as f64) };
            prop_assert!((v - C64::new(expect, 0.0)).norm() < 1e-13, "{} {:?}", r, v);
        }
    }

    #[test]
    fn hat_and_tilde_operators_commute(x in hat_expression(), y in hat_expression()) {
        let b = basis(2, 1, 1);
        let xm = x.evaluate(&b).unwrap();
        let ym = y.tilde_conjugate().unwrap().evaluate(&b).unwrap();
        prop_assert_eq!(xm.commutator(&ym).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn tilde_conjugation_is_an_involution(x in hat_expression()) {
        let once = x.tilde_conjugate().unwrap();
        prop_assert!(once.modes().iter().all(|m| m.is_tilde()));
        prop_assert_eq!(once.substitute_partners(), x);
    }

    #[test]
    fn pdc_operators_are_hermitian(w0 in 0.1..3.0f64, w1 in 0.1..3.0f64, w2 in 0.1..3.0f64, kappa in 0.0..2.0f64) {
        let config = PdcConfig { omega0: w0, omega1: w1, omega2: w2, kappa, ..PdcConfig::default() };
        let b = basis(3, 2, 2);
        prop_assert_eq!(pdc_hamiltonian(&config, &b).unwrap().hermiticity_defect(), 0.0);
        prop_assert_eq!(liouvillian(&config, &b).unwrap().hermiticity_defect(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bogoliubov_preserves_norm(x in 0.8..6.0f64, fermion in any::<bool>()) {
        let statistics = if fermion { Statistics::Fermion } else { Statistics::Boson };
        let cutoff = if fermion { 1 } else { 24 };
        let b = basis(cutoff, 0, 0);
        let p = ThermalParams::from_beta_omega(x, statistics).unwrap();
        let g = bogoliubov_generator(p.mixing_angle(), statistics, &b, ModeId::A, ModeId::ATilde).unwrap();
        let tol = 1e-9;
        let out = apply_bogoliubov(&StateVector::basis_state(&b, &[0; 6]).unwrap(), &g, tol).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= tol);
    }

    #[test]
    fn statistical_equality_on_truncated_ensemble(seed: u64, x in 0.2..4.0f64, cutoff in 1usize..8) {
        let b = basis(cutoff, 0, 0);
        let p = ThermalParams::from_beta_omega(x, Statistics::Boson).unwrap();
        let vac = thermofield_vacuum_closed_form(&p, &b, ModeId::A, ModeId::ATilde).unwrap().state;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_hermitian(cutoff + 1, &mut rng);
        let op = SparseOperator::embed_single_mode(ModeId::A, &m, &b).unwrap();
        let lhs = vac.inner_product(&op.apply(&vac).unwrap()).unwrap();
        let rhs = gibbs_expectation(&op, &ThermalSpectrum::harmonic(1.0, cutoff), x, ModeId::A).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!(lhs.im.abs() < 1e-15);
    }

    #[test]
    fn evolution_is_unitary_and_conserves_energy_difference(
        seed: u64,
        kappa in 0.0..1.5f64,
        t in 0.0..2.0f64,
        w1 in 0.2..0.8f64,
    ) {
        let config = PdcConfig {
            omega0: 1.0,
            omega1: w1,
            omega2: 1.0 - w1,
            kappa,
            t,
            cutoffs: ModeCutoffs { pump: 2, signal: 2, idler: 2 },
            series_tolerance: 1e-12,
        };
        let b = Arc::new(config.basis().unwrap());
        let v = random_state(&b, seed).normalize().unwrap();
        let out = evolve(&v, &liouvillian(&config, &b).unwrap(), t, 1e-12).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
        let energy = |s: &StateVector| -> f64 {
            let occ = |m: ModeId| s.mean_occupation(m);
            config.omega0 * (occ(ModeId::A) - occ(ModeId::ATilde))
                + config.omega1 * (occ(ModeId::B) - occ(ModeId::BTilde))
                + config.omega2 * (occ(ModeId::C) - occ(ModeId::CTilde))
        };
        prop_assert!((energy(&out) - energy(&v)).abs() <= 1e-8);
    }

    #[test]
    fn projections_are_complete(seed: u64, a in 0usize..4) {
        let b = basis(a, 1, 1);
        let v = random_state(&b, seed).normalize().unwrap();
        let total: f64 = project_all(&v).unwrap().iter().map(|p| p.probability).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn converted_state_structure(x in 0.2..5.0f64, pump in 2usize..10) {
        let config = PdcConfig { cutoffs: ModeCutoffs { pump, signal: 1, idler: 1 }, ..PdcConfig::default() };
        let b = Arc::new(config.basis().unwrap());
        let out = closed_form_output_state(x, &config, &b).unwrap();
        for p in project_all(&out).unwrap() {
            prop_assert!(p.separability.second_singular_value <= 1e-10);
            if p.probability > 0.0 {
                let c = &p.conditional;
                // one photon per output pair, on the hat or the tilde side
                let hat = c.mean_occupation(ModeId::B);
                prop_assert!(hat == 1.0 || c.mean_occupation(ModeId::BTilde) == 1.0);
                prop_assert_eq!(hat, c.mean_occupation(ModeId::C));
            }
        }
        prop_assert!(pump_output_separability(&out).schmidt_rank() >= 2);

        let report = run_pdc(x, &config, &b, Method::ClosedForm).unwrap().report;
        let formula = LambdaSeries::new(x, pump).unwrap().pump_after_conversion();
        prop_assert!((report.n0_after - formula).abs() <= 1e-12);
    }
}
