use beamgame_core::channel::{
    build_channels, place_sensors, sample_error, ChannelState, PhaseModel, Point, Scenario,
};
use beamgame_core::game::{
    best_response_power, equilibrium_closed_form, estimate_non_outage, EffectiveGameParams,
};
use beamgame_core::linalg::{eigh, psd_sqrt, rayleigh, sample_unit_sphere, ComplexVector, HermitianMatrix};
use beamgame_core::multinode::{
    bound_set, global_search_with, nu_bounds, BoundOptions, SdpOptions, SearchOptions, WeightedInstance,
};
use beamgame_core::single_antenna::ChiSquareParams;
use beamgame_core::RandomStream;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian(n: usize, raw: &[(f64, f64)]) -> HermitianMatrix {
    HermitianMatrix::from_fn(n, |i, j| {
        let (a, b) = if i <= j { raw[i * n + j] } else { raw[j * n + i] };
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Complex64::new(a, 0.0),
            std::cmp::Ordering::Less => Complex64::new(a, b),
            std::cmp::Ordering::Greater => Complex64::new(a, -b),
        }
    })
    .unwrap()
}

fn arb_hermitian() -> impl Strategy<Value = HermitianMatrix> {
    (1usize..=8).prop_flat_map(|n| {
        prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n * n).prop_map(move |raw| hermitian(n, &raw))
    })
}

fn to_nalgebra(q: &HermitianMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(q.dim(), q.dim(), |i, j| q.get(i, j))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalues_match_nalgebra(q in arb_hermitian()) {
        let ours = eigh(&q).unwrap();
        let mut theirs: Vec<f64> = to_nalgebra(&q).symmetric_eigen().eigenvalues.iter().cloned().collect();
        theirs.sort_by(f64::total_cmp);
        let scale = q.frobenius_norm().max(1.0);
        for (a, b) in ours.eigenvalues.iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
        for (l, v) in ours.eigenvalues.iter().zip(&ours.eigenvectors) {
            let r = q.mul_vec(v).add(&v.scale((-l).into()));
            prop_assert!(r.norm() <= 1e-10 * scale);
            prop_assert!((v.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rayleigh_between_extremes(q in arb_hermitian(), seed in any::<u64>()) {
        let d = eigh(&q).unwrap();
        let w = sample_unit_sphere(q.dim(), &mut RandomStream::new(seed, 0)).unwrap();
        let r = rayleigh(&q, &w).unwrap();
        let tol = 1e-12 * q.frobenius_norm().max(1.0);
        prop_assert!(d.min().0 - tol <= r && r <= d.max().0 + tol);
    }

    #[test]
    fn square_root_squares_back(q in arb_hermitian()) {
        let psd = HermitianMatrix::from_cmat(&q.as_cmat().adjoint() * q.as_cmat()).unwrap();
        let root = psd_sqrt(&psd).unwrap();
        let back = HermitianMatrix::from_cmat(root.as_cmat() * root.as_cmat()).unwrap();
        prop_assert!(back.sub(&psd).frobenius_norm() <= 1e-9 * psd.frobenius_norm().max(1.0));
    }

    #[test]
    fn best_response_non_increasing(
        g in 1e-2..1e3f64, a in 1e-1..1e3f64, tau in 0.05..0.95f64,
        r1 in 1e-3..1e4f64, r2 in 1e-3..1e4f64,
    ) {
        let p = EffectiveGameParams::new(g, a, tau, 1.0).unwrap();
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(best_response_power(hi, &p).unwrap() <= best_response_power(lo, &p).unwrap());
    }

    #[test]
    fn closed_form_is_stationary(g in 1e-1..1e3f64, a in 1.0..1e3f64, tau in 0.1..0.9f64, c in 0.1..10.0f64) {
        let p = EffectiveGameParams::new(g, a, tau, c).unwrap();
        let eq = equilibrium_closed_form(&p);
        prop_assume!(eq.rho_star > c * (1.0 + 1e-3) && eq.p_star > 0.0);
        let h = 1e-6 * eq.p_star;
        let d_bs = (p.utility_bs(eq.rho_star, eq.p_star + h) - p.utility_bs(eq.rho_star, eq.p_star - h)) / (2.0 * h);
        prop_assert!(d_bs.abs() <= 1e-6 * (tau * eq.rho_star), "{d_bs}");
        let leader = |rho: f64| p.utility_pb(rho, best_response_power(rho, &p).unwrap());
        let k = 1e-6 * eq.rho_star;
        let d_pb = (leader(eq.rho_star + k) - leader(eq.rho_star - k)) / (2.0 * k);
        prop_assert!(d_pb.abs() <= 1e-6 * eq.p_star.max(1e-12), "{d_pb}");
    }

    #[test]
    fn bound_chain_holds(seed in 0u64..1000, n in 1usize..6, m in 1usize..5) {
        let sc = Scenario { sensors: n, antennas: m, phase_model: PhaseModel::Uniform, ..Scenario::default() };
        let mut s = RandomStream::new(seed, 0);
        let pos = place_sensors(&sc, &mut s).unwrap();
        let inst = WeightedInstance::from_channels(&build_channels(&sc, &pos, &mut s).unwrap()).unwrap();
        let opts = BoundOptions {
            sdp: SdpOptions::default(),
            search: SearchOptions { budget: 500, restarts: 3, ..SearchOptions::default() },
        };
        let b = bound_set(&inst, &opts, &s).unwrap();
        let tol = 1e-6 * b.nu_max;
        prop_assert!(b.nu_min <= b.nu_gs + tol);
        prop_assert!(b.nu_gs <= b.nu_sdp() + tol);
        prop_assert!(b.nu_sdp() <= b.nu_max + tol);
        prop_assert!(b.sdp.nu_rounded <= b.nu_sdp() + 1e-8 * b.nu_max);
    }
}

#[test]
fn log_utility_concave_on_grid() {
    let p = EffectiveGameParams::new(50.0, 20.0, 0.5, 1.0).unwrap();
    for k in 0..60 {
        let x = 1e-4 * 10f64.powf(k as f64 / 10.0);
        let h = 1e-3 * x;
        let d2 = p.utility_bs(3.0, x + h) - 2.0 * p.utility_bs(3.0, x) + p.utility_bs(3.0, x - h);
        assert!(d2 <= 1e-8, "{x}: {d2}");
    }
}

#[test]
fn tail_utility_concave_above_half_eta() {
    let (a, eta, tau, rho) = (10.0, 1.0, 0.5, 4.0);
    let u = |p: f64| a * (-eta / p).exp() - tau * rho * p;
    for k in 0..60 {
        let x = eta * 0.5 * 200f64.powf(k as f64 / 59.0);
        let h = 1e-3 * x;
        assert!(u(x + h) - 2.0 * u(x) + u(x - h) <= 1e-8, "{x}");
    }
}

#[test]
fn error_draws_have_requested_covariance() {
    let sigma = HermitianMatrix::new(
        2,
        vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.5, 0.5),
            Complex64::new(0.5, -0.5),
            Complex64::new(1.0, 0.0),
        ],
    )
    .unwrap();
    let mut s = RandomStream::new(77, 0);
    let n = 200_000;
    let mut acc = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut mean = [Complex64::new(0.0, 0.0); 2];
    for _ in 0..n {
        let e = sample_error(&sigma, &mut s).unwrap();
        for (i, row) in acc.iter_mut().enumerate() {
            mean[i] += e[i];
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += e[i] * e[j].conj();
            }
        }
    }
    for (i, row) in acc.iter().enumerate() {
        assert!((mean[i] / n as f64).norm() < 0.01);
        for (j, cell) in row.iter().enumerate() {
            let est = cell / n as f64;
            assert!((est - sigma.get(i, j)).norm() < 0.02, "({i},{j}) {est}");
        }
    }
}

#[test]
fn lower_bound_is_phase_free_and_upper_bound_is_beam_free() {
    let sc = Scenario {
        sensors: 6,
        antennas: 4,
        phase_model: PhaseModel::Uniform,
        ..Scenario::default()
    };
    let pos = place_sensors(&sc, &mut RandomStream::new(5, 0)).unwrap();
    let a =
        WeightedInstance::from_channels(&build_channels(&sc, &pos, &mut RandomStream::new(6, 0)).unwrap())
            .unwrap();
    let b =
        WeightedInstance::from_channels(&build_channels(&sc, &pos, &mut RandomStream::new(7, 0)).unwrap())
            .unwrap();
    let (lo_a, hi_a) = nu_bounds(&a).unwrap();
    let (lo_b, hi_b) = nu_bounds(&b).unwrap();
    assert!((lo_a - lo_b).abs() <= 1e-12 * lo_a);
    // λ_max(ĥĥ† + sI) = ‖ĥ‖² + s does not see the phases either.
    assert!((hi_a - hi_b).abs() <= 1e-12 * hi_a);
}

#[test]
fn beams_are_unit_norm() {
    let sc = Scenario {
        sensors: 4,
        antennas: 3,
        phase_model: PhaseModel::Uniform,
        ..Scenario::default()
    };
    let pos = vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 2.0),
        Point::new(-3.0, -4.0),
        Point::new(2.0, 9.0),
    ];
    let ch = build_channels(&sc, &pos, &mut RandomStream::new(1, 0)).unwrap();
    let b = bound_set(
        &WeightedInstance::from_channels(&ch).unwrap(),
        &BoundOptions::default(),
        &RandomStream::new(2, 0),
    )
    .unwrap();
    let unit = |w: &ComplexVector| (w.norm() - 1.0).abs() <= 1e-12;
    assert!(unit(&b.w_gs) && unit(&b.sdp.w_sdp));
}

#[test]
fn search_never_worse_with_larger_budget() {
    for seed in 0..10 {
        let sc = Scenario {
            sensors: 8,
            antennas: 4,
            phase_model: PhaseModel::Uniform,
            ..Scenario::default()
        };
        let mut s = RandomStream::new(seed, 0);
        let pos = place_sensors(&sc, &mut s).unwrap();
        let inst = WeightedInstance::from_channels(&build_channels(&sc, &pos, &mut s).unwrap()).unwrap();
        let mut last = f64::NEG_INFINITY;
        for budget in [1, 10, 100, 1000] {
            let opts = SearchOptions {
                budget,
                restarts: 2,
                iterations: 50,
                ..SearchOptions::default()
            };
            let (v, _) = global_search_with(&inst, &opts, &mut RandomStream::new(99, seed)).unwrap();
            assert!(v >= last, "seed {seed} budget {budget}: {v} < {last}");
            last = v;
        }
    }
}

#[test]
fn tail_model_scales_with_error_variance() {
    // With σ₁² far from 1 the tail exp(−x/(σ₁²(1 + θ²/2))) must still match
    // sampling; dropping σ₁² from the scale would be off by orders of magnitude.
    let sc = Scenario {
        sensors: 1,
        antennas: 1,
        ..Scenario::default()
    };
    let (sigma1_sq, theta2, bs_gain) = (1e-4, 0.1, 1e-3);
    let params = ChiSquareParams::from_theta2(theta2, sigma1_sq, bs_gain, &sc).unwrap();
    let h = (theta2 * sigma1_sq / 2.0).sqrt();
    let ch = ChannelState::from_parts(
        vec![ComplexVector::from_real(&[h])],
        vec![HermitianMatrix::diag(&[sigma1_sq])],
        vec![Complex64::new(bs_gain.sqrt(), 0.0)],
        vec![Point::new(0.0, 0.0)],
    )
    .unwrap();
    let w = ComplexVector::basis(1, 0);
    for (k, ratio) in [0.5, 1.0, 2.0, 8.0].into_iter().enumerate() {
        let power = ratio * params.eta;
        let (p_hat, _) = estimate_non_outage(
            power,
            &w,
            &ch,
            0,
            &sc,
            50_000,
            &mut RandomStream::new(31, k as u64),
        )
        .unwrap();
        assert!(
            (params.approx_non_outage(power) - p_hat).abs() < 0.05,
            "P/η = {ratio}: {p_hat}"
        );
    }
}
