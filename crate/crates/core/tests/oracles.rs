use multitime::models::{truncated_oscillator, two_level_atom};
use multitime::operator::{
    basis_projector, hermitian_eig, identity, real, sigma_minus, sigma_plus, trace, Operator,
};
use multitime::oracles::{naive_equation_integrator, FiniteBath, FiniteBathSystem, ModeKind};
use multitime::validation::{random_density, random_operator, rng};
use multitime::{
    c64, CorrelatorSpec, Insertion, Method, OpenSystem, PropagationOptions, Propagator,
};

#[test]
fn oscillator_relaxes_to_the_truncated_thermal_state() {
    // n̄ = 1/(e^{ω/T} − 1) = 0.1
    let (omega, levels) = (1.0, 10);
    let temperature = omega / 11.0f64.ln();
    let model = truncated_oscillator(omega, levels, 0.05, temperature).unwrap();
    let p = Propagator::with_defaults(OpenSystem::from_model_exact(&model, None).unwrap()).unwrap();
    let rho = p.steady_state().unwrap();
    let weights: Vec<f64> = (0..levels)
        .map(|k| (-(k as f64) * omega / temperature).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    for i in 0..levels {
        for j in 0..levels {
            let expected = if i == j { weights[i] / z } else { 0.0 };
            assert!(
                (rho[(i, j)] - real(expected)).norm() <= 1e-8,
                "({i},{j}) {}",
                rho[(i, j)]
            );
        }
    }
    let n: f64 = (0..levels).map(|k| k as f64 * rho[(k, k)].re).sum();
    assert!((n - 0.1).abs() < 1e-6);
}

#[test]
fn richardson_extrapolated_euler_matches_the_propagator() {
    let gamma = 0.1;
    let model = two_level_atom(1.0, gamma, 0.3).unwrap();
    let sys = OpenSystem::from_model_exact(&model, None).unwrap();
    let p = Propagator::new(
        sys.clone(),
        PropagationOptions {
            method: Method::Expm,
            ..Default::default()
        },
    )
    .unwrap();
    let mut r = rng(11);
    let a: Vec<Operator> = (0..3).map(|_| random_operator(&mut r, 2)).collect();
    let b: Vec<Operator> = (0..2).map(|_| random_operator(&mut r, 2)).collect();
    let rho = random_density(&mut r, 2);
    let tau_end = 2.0;
    let exact = p
        .equal_time_group_correlator(&a, &b, &rho, &[tau_end])
        .unwrap()
        .values[0];
    let h = 1e-5 / gamma;
    let coarse = naive_equation_integrator(
        sys.hamiltonian(),
        sys.decompositions(),
        &b,
        &a,
        &rho,
        tau_end,
        h,
    )
    .unwrap();
    let fine = naive_equation_integrator(
        sys.hamiltonian(),
        sys.decompositions(),
        &b,
        &a,
        &rho,
        tau_end,
        h / 2.0,
    )
    .unwrap();
    let extrapolated = fine * 2.0 - coarse;
    assert!(
        (extrapolated - exact).norm() <= 1e-6,
        "{extrapolated} vs {exact}"
    );
    assert!((fine - exact).norm() < (coarse - exact).norm());
}

#[test]
fn band_decay_rate_follows_the_golden_rule() {
    let (omega0, gamma) = (1.0, 0.1);
    let model = two_level_atom(omega0, gamma, 0.0).unwrap();
    let bath = FiniteBath::golden_rule_band(omega0, gamma, 8, ModeKind::Qubit, 0.0).unwrap();
    let fb = FiniteBathSystem::new(&model, &bath).unwrap();
    let spec = CorrelatorSpec::new(
        vec![
            Insertion::new(sigma_plus(), 0.0),
            Insertion::new(sigma_minus(), 0.0),
        ],
        basis_projector(2, 0),
    )
    .unwrap();
    let taus: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1 / gamma).collect();
    let trace = fb.correlator_trace(&spec, &[0], &taus).unwrap();
    // least-squares slope of ln|C(τ)| = −γ_fit τ / 2
    let ys: Vec<f64> = trace.values.iter().map(|v| v.norm().ln()).collect();
    let n = taus.len() as f64;
    let (mx, my) = (taus.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = taus.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = taus.iter().map(|x| (x - mx).powi(2)).sum();
    let fitted = -2.0 * sxy / sxx;
    assert!((fitted / gamma - 1.0).abs() <= 0.15, "fitted rate {fitted}");
}

#[test]
fn finite_bath_initial_state_factorizes() {
    let model = two_level_atom(1.0, 0.1, 0.5).unwrap();
    let bath =
        FiniteBath::golden_rule_band(1.0, 0.1, 4, ModeKind::Oscillator { levels: 3 }, 0.5).unwrap();
    let fb = FiniteBathSystem::new(&model, &bath).unwrap();
    let rho = random_density(&mut rng(5), 2);
    // ⟨1⟩ = 1 and ⟨σz(0)⟩ = trace(σz ρ_S)
    let id = CorrelatorSpec::new(vec![Insertion::new(identity(2), 3.0)], rho.clone()).unwrap();
    assert!((fb.correlator(&id).unwrap() - c64::new(1.0, 0.0)).norm() < 1e-10);
    let sz = multitime::operator::sigma_z();
    let spec = CorrelatorSpec::new(vec![Insertion::new(sz.clone(), 0.0)], rho.clone()).unwrap();
    assert!((fb.correlator(&spec).unwrap() - trace(&(&sz * &rho))).norm() < 1e-10);
}

#[test]
fn oversized_baths_are_refused() {
    let model = two_level_atom(1.0, 0.1, 0.0).unwrap();
    let mut bath = FiniteBath::golden_rule_band(1.0, 0.1, 8, ModeKind::Qubit, 0.0).unwrap();
    bath.dimension_cap = 64;
    assert!(FiniteBathSystem::new(&model, &bath).is_err());
}

#[test]
fn thermal_steady_state_matches_gibbs_for_the_qubit() {
    let omega0 = 1.3;
    let temperature = 0.8;
    let model = two_level_atom(omega0, 0.2, temperature).unwrap();
    let p = Propagator::with_defaults(OpenSystem::from_model_exact(&model, None).unwrap()).unwrap();
    let rho = p.steady_state().unwrap();
    let eig = hermitian_eig(model.hamiltonian()).unwrap();
    let gibbs = eig.map_spectrum(|e| real((-e / temperature).exp()));
    let gibbs = &gibbs / trace(&gibbs);
    assert!((rho - gibbs).iter().all(|z| z.norm() < 1e-10));
}
