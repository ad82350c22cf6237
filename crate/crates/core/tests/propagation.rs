use multitime::models::{coupled_dimer, two_level_atom};
use multitime::operator::{
    basis_projector, dagger, identity, kron, real, sigma_minus, sigma_plus, sigma_x, sigma_z,
    trace, Operator,
};
use multitime::oracles::closed_correlator;
use multitime::validation::{random_density, random_operator, rng};
use multitime::{
    c64, CorrelatorSpec, Error, Insertion, Method, OpenSystem, PropagationOptions, Propagator,
};

fn dimer(options: PropagationOptions) -> Propagator {
    let m = coupled_dimer(1.0, 1.2, 0.1, 0.05, 0.08, 0.3).unwrap();
    Propagator::new(OpenSystem::from_model_exact(&m, None).unwrap(), options).unwrap()
}

fn close(a: &[c64], b: &[c64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

#[test]
fn all_methods_agree_on_two_slot_dimer_correlators() {
    let mut r = rng(21);
    let a: Vec<Operator> = (0..3).map(|_| random_operator(&mut r, 4)).collect();
    let b: Vec<Operator> = (0..2).map(|_| random_operator(&mut r, 4)).collect();
    let rho = random_density(&mut r, 4);
    let taus = [0.0, 1.0, 2.5, 10.0, 40.0];
    let run = |options| {
        dimer(options)
            .equal_time_group_correlator(&a, &b, &rho, &taus)
            .unwrap()
            .values
    };
    let expm = run(PropagationOptions {
        method: Method::Expm,
        ..Default::default()
    });
    let auto = run(PropagationOptions::default());
    let action = run(PropagationOptions {
        slot_budget: 4096,
        ..Default::default()
    });
    let ode = run(PropagationOptions {
        method: Method::Ode,
        tol: 1e-12,
        ..Default::default()
    });
    let matrix_free = run(PropagationOptions {
        slot_budget: 16,
        ..Default::default()
    });
    assert!(close(&expm, &auto, 1e-12));
    assert!(close(&expm, &action, 1e-12));
    assert!(close(&expm, &ode, 1e-9));
    assert!(close(&expm, &matrix_free, 1e-8));
}

#[test]
fn three_slot_generators_beyond_the_dense_exponential_limit() {
    // 4^6 coordinates: propagated by exponential action, checked against ODE
    let mut r = rng(22);
    let b: Vec<Operator> = (0..3).map(|_| random_operator(&mut r, 4)).collect();
    let a: Vec<Operator> = (0..4).map(|_| random_operator(&mut r, 4)).collect();
    let rho = random_density(&mut r, 4);
    let taus = [0.0, 3.0, 12.0];
    let auto = dimer(PropagationOptions::default())
        .equal_time_group_correlator(&a, &b, &rho, &taus)
        .unwrap();
    let ode = dimer(PropagationOptions {
        method: Method::Ode,
        tol: 1e-12,
        ..Default::default()
    })
    .equal_time_group_correlator(&a, &b, &rho, &taus)
    .unwrap();
    assert!(close(&auto.values, &ode.values, 1e-8));
}

#[test]
fn expm_only_mode_reports_the_budget_with_depth() {
    let p = dimer(PropagationOptions {
        method: Method::Expm,
        slot_budget: 256,
        ..Default::default()
    });
    let ops = [sigma_x(), sigma_z(), sigma_x(), sigma_z()].map(|s| kron(&s, &identity(2)));
    let spec = CorrelatorSpec::new(
        vec![
            Insertion::new(ops[0].clone(), 3.0),
            Insertion::new(ops[1].clone(), 2.0),
            Insertion::new(ops[2].clone(), 1.0),
            Insertion::new(ops[3].clone(), 0.0),
        ],
        identity(4) * real(0.25),
    )
    .unwrap();
    // the earliest instant is contracted, so three later instants need three slots
    match p.general_correlator(&spec) {
        Err(Error::SlotBudget {
            slots: 3,
            dim: 4,
            required: 4096,
            budget: 256,
            depth: Some(2),
        }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn general_correlator_reduces_to_the_regression_form() {
    let m = two_level_atom(1.0, 0.1, 0.4).unwrap();
    let p = Propagator::with_defaults(OpenSystem::from_model_exact(&m, None).unwrap()).unwrap();
    let rho = random_density(&mut rng(3), 2);
    let taus = [0.0, 0.5, 4.0, 9.0];
    // ⟨σ⁻(t) σ⁺(t+τ) σz(t)⟩ with t = 1.5
    let spec = CorrelatorSpec::new(
        vec![
            Insertion::new(sigma_minus(), 1.5),
            Insertion::new(sigma_plus(), 1.5),
            Insertion::new(sigma_z(), 1.5),
        ],
        rho.clone(),
    )
    .unwrap();
    let sweep = p.general_correlator_sweep(&spec, &[1], &taus).unwrap();
    let rho_t = p.evolve_density(&rho, 1.5).unwrap();
    let qrt = p
        .qrt_correlator(&sigma_minus(), &sigma_plus(), &sigma_z(), &rho_t, &taus)
        .unwrap();
    assert!(close(&sweep.values, &qrt.values, 1e-10));
}

#[test]
fn equal_time_neighbours_merge_into_a_product() {
    let m = two_level_atom(1.0, 0.1, 0.2).unwrap();
    let p = Propagator::with_defaults(OpenSystem::from_model_exact(&m, None).unwrap()).unwrap();
    let rho = random_density(&mut rng(8), 2);
    let split = CorrelatorSpec::new(
        vec![
            Insertion::new(sigma_x(), 2.0),
            Insertion::new(sigma_plus(), 2.0),
            Insertion::new(sigma_z(), 0.5),
        ],
        rho.clone(),
    )
    .unwrap();
    let merged = CorrelatorSpec::new(
        vec![
            Insertion::new(sigma_x() * sigma_plus(), 2.0),
            Insertion::new(sigma_z(), 0.5),
        ],
        rho,
    )
    .unwrap();
    let (x, y) = (
        p.general_correlator(&split).unwrap(),
        p.general_correlator(&merged).unwrap(),
    );
    assert!((x - y).norm() < 1e-12);
}

#[test]
fn closed_dimer_matches_exact_diagonalization() {
    let m = coupled_dimer(1.0, 1.4, 0.2, 0.0, 0.0, 0.0).unwrap();
    let p = Propagator::with_defaults(OpenSystem::from_model_exact(&m, None).unwrap()).unwrap();
    let mut r = rng(12);
    let rho = random_density(&mut r, 4);
    let spec = CorrelatorSpec::new(
        vec![
            Insertion::new(random_operator(&mut r, 4), 0.3),
            Insertion::new(random_operator(&mut r, 4), 2.1),
            Insertion::new(random_operator(&mut r, 4), 1.2),
            Insertion::new(random_operator(&mut r, 4), 0.0),
        ],
        rho,
    )
    .unwrap();
    let lindblad = p.general_correlator(&spec).unwrap();
    let exact = closed_correlator(m.hamiltonian(), &spec).unwrap();
    assert!((lindblad - exact).norm() <= 1e-8);
}

#[test]
fn otoc_of_a_damped_qubit_starts_at_the_operator_product() {
    let m = two_level_atom(1.0, 0.2, 0.0).unwrap();
    let p = Propagator::with_defaults(OpenSystem::from_model_exact(&m, None).unwrap()).unwrap();
    let rho = basis_projector(2, 0);
    let (w, v) = (sigma_x(), sigma_z());
    let f = p.otoc(&w, &v, &rho, &[0.0, 5.0, 80.0, 120.0]).unwrap();
    let at_zero = trace(&(dagger(&w) * dagger(&v) * &w * &v * &rho));
    assert!((f.values[0] - at_zero).norm() < 1e-12);
    // relaxes at rate γ/2 or faster towards a stationary value
    assert!((f.values[2] - f.values[3]).norm() < 1e-3);
}

#[test]
fn invalid_density_matrices_are_rejected() {
    let m = two_level_atom(1.0, 0.1, 0.0).unwrap();
    let p = Propagator::with_defaults(OpenSystem::from_model_exact(&m, None).unwrap()).unwrap();
    let not_psd =
        Operator::from_diagonal(&nalgebra::DVector::from_vec(vec![real(1.5), real(-0.5)]));
    assert!(matches!(
        p.evolve_density(&not_psd, 1.0),
        Err(Error::InvalidState(_))
    ));
    assert!(matches!(
        p.evolve_density(&(identity(2) * real(0.4)), 1.0),
        Err(Error::InvalidState(_))
    ));
}
