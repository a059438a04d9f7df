use flocksim::dynamics::{transition, ConfidencePolicy, FlockNetwork};
use flocksim::spectral::{
    check_contraction, gamma, gamma_partial, gamma_via_inverse, limit_configuration, lyapunov_variance, mass_center,
    spectrum, tau1, tau2_sq,
};
use flocksim::{Matrix, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_stochastic(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..6)).collect();
        let total: i64 = w.iter().sum::<i64>().max(1);
        for j in 0..n {
            m[(i, j)] = Rational::frac(w[j], total);
        }
        if w.iter().all(|&x| x == 0) {
            m[(i, i)] = Rational::one();
        }
    }
    m
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> FlockNetwork {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.4) {
                    edges.push((i, j));
                }
            }
        }
        let g = FlockNetwork::from_edges(n, &edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

#[test]
fn tau2_is_submultiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let a = random_stochastic(&mut rng, 5);
        let b = random_stochastic(&mut rng, 5);
        let t1 = tau1(&a);
        let lhs = tau2_sq(&a.matmul(&b).unwrap());
        assert!(lhs <= &(&t1 * &t1) * &tau2_sq(&b));
        assert!(t1 <= Rational::one() && !t1.is_negative());
        assert!(tau2_sq(&a) <= &Rational::from_integer(2) * &(&t1 * &t1));
    }
}

#[test]
fn tau1_vanishes_only_on_equal_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let a = random_stochastic(&mut rng, 4);
        let equal = (1..4).all(|i| a.row(i) == a.row(0));
        assert_eq!(tau1(&a).is_zero(), equal);
    }
}

#[test]
fn normalized_tau2_is_not_submultiplicative_on_k22_walk() {
    // each vertex keeps 1/10 and splits the rest between its two neighbors
    let keep = Rational::frac(1, 10);
    let share = Rational::frac(9, 20);
    let side = |i: usize| i / 2;
    let mut a = Matrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            a[(i, j)] = if i == j {
                keep.clone()
            } else if side(i) != side(j) {
                share.clone()
            } else {
                Rational::zero()
            };
        }
    }
    // τ̂₂² = τ₂²/2; compare τ̂₂(A²)² against (τ̂₂(A)²)²
    let two = Rational::from_integer(2);
    let hat_a = &tau2_sq(&a) / &two;
    let hat_a2 = &tau2_sq(&a.matmul(&a).unwrap()) / &two;
    assert!(hat_a2 > &hat_a * &hat_a);
}

#[test]
fn gamma_identities_hold_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..30 {
        let n = rng.gen_range(2..=8);
        let policy = if case % 2 == 0 { ConfidencePolicy::Vicsek } else { ConfidencePolicy::LazyWalk };
        let t = transition(&random_connected(&mut rng, n), &policy).unwrap();
        let s = spectrum(&t.p).unwrap();
        let g = gamma(&t.p, &s.pi).unwrap();
        assert_eq!(g, gamma_via_inverse(&t.p, &s.pi).unwrap());
        let id = Matrix::<Rational>::identity(n);
        let ones_pi = Matrix::from_rows(vec![s.pi.clone(); n]).unwrap();
        assert_eq!(g.matmul(&id.sub(&t.p).unwrap()).unwrap(), id.sub(&ones_pi).unwrap());
        assert!(g.row_sums().iter().all(Rational::is_zero));
        assert!(g.vec_mat(&s.pi).unwrap().iter().all(Rational::is_zero));
        assert!(s.mu < 1.0);
    }
}

#[test]
fn partial_gamma_converges_at_spectral_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let t = transition(&random_connected(&mut rng, 5), &ConfidencePolicy::Vicsek).unwrap();
        let s = spectrum(&t.p).unwrap();
        let g = gamma(&t.p, &s.pi).unwrap();
        let gt = gamma_partial(&t.p, &s.pi, 50).unwrap();
        let err = g.sub(&gt).unwrap().max_abs_f64();
        // ‖Γ − Γ_t‖ = ‖Σ_{s≥t}(Pˢ − 𝟙πᵀ)‖ ≤ κ·m·μᵗ/(1−μ), κ the conditioning of C^{1/2}
        let c: Vec<f64> = s.weights.iter().map(Rational::to_f64).collect();
        let kappa = (c.iter().cloned().fold(0.0, f64::max) / c.iter().cloned().fold(f64::INFINITY, f64::min)).sqrt();
        let bound = kappa * 5.0 * s.mu.powi(50) / (1.0 - s.mu);
        assert!(err <= bound + 1e-15, "err {err} bound {bound}");
    }
}

#[test]
fn invariant_flock_converges_to_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..6 {
        let n = 5;
        let policy = if case % 2 == 0 { ConfidencePolicy::Vicsek } else { ConfidencePolicy::LazyWalk };
        let t = transition(&random_connected(&mut rng, n), &policy).unwrap();
        let s = spectrum(&t.p).unwrap();
        let x0 = Matrix::from_vec(n, 2, (0..2 * n).map(|_| Rational::frac(rng.gen_range(0..64), 16)).collect()).unwrap();
        let v1 = Matrix::from_vec(n, 2, (0..2 * n).map(|_| Rational::frac(rng.gen_range(-8..=8), 64)).collect()).unwrap();
        let lim = limit_configuration(&x0, &v1, &t.p, &s.pi).unwrap();
        let center0 = mass_center(&x0, &s.pi).unwrap();
        // exact run: mass center moves by the drift every tick
        let (mut x, mut v) = (x0.add(&v1).unwrap(), v1.clone());
        for tick in 1..=30i64 {
            let c = mass_center(&x, &s.pi).unwrap();
            for k in 0..2 {
                assert_eq!(c[k], &center0[k] + &(&Rational::from_integer(tick) * &lim.drift[k]));
            }
            v = t.p.matmul(&v).unwrap();
            x = x.add(&v).unwrap();
        }
        // float run to t = 400
        let pf = t.p.to_f64();
        let pif: Vec<f64> = s.pi.iter().map(Rational::to_f64).collect();
        let (mut x, mut v) = (x0.to_f64().add(&v1.to_f64()).unwrap(), v1.to_f64());
        for _ in 1..400 {
            v = pf.matmul(&v).unwrap();
            x = x.add(&v).unwrap();
        }
        let c = mass_center(&x, &pif).unwrap();
        let rel = lim.relative.to_f64();
        for i in 0..n {
            for k in 0..2 {
                assert!((x[(i, k)] - c[k] - rel[(i, k)]).abs() <= 1e-8);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn variance_contracts(seed in any::<u64>(), n in 2usize..=8, lazy in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let policy = if lazy { ConfidencePolicy::LazyWalk } else { ConfidencePolicy::Vicsek };
        let t = transition(&random_connected(&mut rng, n), &policy).unwrap();
        let s = spectrum(&t.p).unwrap();
        let pi: Vec<f64> = s.pi.iter().map(Rational::to_f64).collect();
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        prop_assert!(check_contraction(&t.p.to_f64(), &pi, &xi, s.mu));
        prop_assert!(lyapunov_variance(&xi, &pi) >= 0.0);
    }
}
