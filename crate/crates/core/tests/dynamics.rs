use flocksim::dynamics::{
    build_network, run, simulate, Configuration, ConfidencePolicy, ExactState, FastForward, FlockNetwork, FlockState,
    HysteresisRule, PerturbationEvent, RunOptions, ScheduledEvents,
};
use flocksim::{Matrix, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn column(v: &[&str]) -> Matrix<Rational> {
    Matrix::from_rows(v.iter().map(|s| vec![r(s)]).collect()).unwrap()
}

fn oscillator() -> Configuration<Rational> {
    Configuration::new(column(&["0", "1/2", "21/16", "29/16"]), column(&["1/8", "-1/8", "1/8", "-1/8"])).unwrap()
}

fn random_config(rng: &mut ChaCha8Rng, n: usize, d: usize, span: i64, vden: i64) -> Configuration<Rational> {
    let mut x = Matrix::zeros(n, d);
    let mut v = Matrix::zeros(n, d);
    for i in 0..n {
        for k in 0..d {
            x[(i, k)] = Rational::frac(rng.gen_range(0..=span * 16), 16);
            v[(i, k)] = Rational::frac(rng.gen_range(-8..=8), vden);
        }
    }
    Configuration::new(x, v).unwrap()
}

#[test]
fn oscillator_velocity_is_geometric() {
    let mut opts = RunOptions::new(200, ConfidencePolicy::LazyWalk);
    opts.rule = HysteresisRule::disabled();
    let out = simulate(oscillator(), &opts).unwrap();
    let v1 = column(&["1/8", "-1/8", "1/8", "-1/8"]);
    assert_eq!(out.trace.records.len(), 201);
    for rec in &out.trace.records[1..] {
        let f = Rational::from_integer(-3).pow(1 - rec.tick as i64).unwrap();
        let v = rec.velocities.as_ref().unwrap();
        for i in 0..4 {
            assert_eq!(r(&v[i][0]), &v1[(i, 0)] * &f, "tick {}", rec.tick);
        }
        let x = rec.positions.as_ref().unwrap();
        let gap = r(&x[2][0]) - r(&x[1][0]);
        let expect = Rational::one() + Rational::frac(1, 16) * Rational::frac(-1, 3).pow(rec.tick as i64 - 1).unwrap();
        assert_eq!(gap, expect);
    }
}

#[test]
fn oscillator_network_alternates() {
    let mut opts = RunOptions::new(100, ConfidencePolicy::LazyWalk);
    opts.rule = HysteresisRule::disabled();
    opts.record_states = false;
    let out = simulate(oscillator(), &opts).unwrap();
    let recs = &out.trace.records;
    assert_eq!(recs[0].edges, vec![(0, 1), (1, 2), (2, 3)]);
    for rec in &recs[1..] {
        let expect: Vec<(usize, usize)> =
            if rec.tick % 2 == 1 { vec![(0, 1), (2, 3)] } else { vec![(0, 1), (1, 2), (2, 3)] };
        assert_eq!(rec.edges, expect, "tick {}", rec.tick);
        assert!(rec.switched);
    }
    assert_eq!(recs.iter().filter(|r| r.switched).count(), 100);
}

#[test]
fn unit_distance_is_an_edge() {
    let cfg = Configuration::new(column(&["0", "1", "5/2"]), column(&["0", "0", "0"])).unwrap();
    let g = build_network(&cfg, None, &HysteresisRule::default()).unwrap().network;
    assert_eq!(g.edges(), vec![(0, 1)]);
}

#[test]
fn far_points_give_empty_graph() {
    let cfg = Configuration::new(column(&["0", "3", "6"]), column(&["0", "0", "0"])).unwrap();
    let g = build_network(&cfg, None, &HysteresisRule::default()).unwrap().network;
    assert_eq!(g, FlockNetwork::empty(3));
}

#[test]
fn thirty_points_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let cfg = random_config(&mut rng, 30, 2, 4, 1);
        let g = build_network(&cfg, None, &HysteresisRule::disabled()).unwrap().network;
        for i in 0..30 {
            for j in 0..30 {
                if i == j {
                    continue;
                }
                let dx = &cfg.x[(i, 0)] - &cfg.x[(j, 0)];
                let dy = &cfg.x[(i, 1)] - &cfg.x[(j, 1)];
                let close = &dx * &dx + &dy * &dy <= Rational::one();
                assert_eq!(g.has_edge(i, j), close);
            }
        }
    }
}

#[test]
fn exact_engine_matches_rational_configuration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..12 {
        let n = rng.gen_range(2..=7);
        let d = rng.gen_range(1..=2);
        let cfg = random_config(&mut rng, n, d, 3, 64);
        let policy = if case % 2 == 0 { ConfidencePolicy::Vicsek } else { ConfidencePolicy::LazyWalk };
        let opts = RunOptions::new(40, policy);
        let events = vec![PerturbationEvent::new(5, (0..n).collect(), vec![Rational::frac(-1, 2); d])];
        let a = run(cfg.clone(), &opts, &mut ScheduledEvents::new(events.clone()), &mut []).unwrap();
        let b = run(ExactState::from_configuration(&cfg), &opts, &mut ScheduledEvents::new(events), &mut []).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(b.state.to_configuration(), a.state);
    }
}

#[test]
fn exact_runs_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = random_config(&mut rng, 6, 2, 3, 32);
    let opts = RunOptions::new(60, ConfidencePolicy::Vicsek);
    let a = simulate(ExactState::from_configuration(&cfg), &opts).unwrap();
    let b = simulate(ExactState::from_configuration(&cfg), &opts).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.state, b.state);
}

/// Two pairs drifting apart slowly: the network never changes after tick 0.
fn drifting_pairs() -> Configuration<Rational> {
    Configuration::new(
        column(&["0", "1/2", "3", "7/2"]),
        column(&["-1/1000", "1/1000", "1/500", "1/250"]),
    )
    .unwrap()
}

#[test]
fn jumps_agree_with_single_steps() {
    for policy in [ConfidencePolicy::LazyWalk, ConfidencePolicy::Vicsek] {
        let mut plain = RunOptions::new(500, policy.clone());
        plain.record_states = false;
        let mut fast = plain.clone();
        fast.fast_forward = Some(FastForward::default());
        let cfg = drifting_pairs();
        let a = simulate(ExactState::from_configuration(&cfg), &plain).unwrap();
        let b = simulate(ExactState::from_configuration(&cfg), &fast).unwrap();
        assert!(b.skipped > 0, "no jump taken");
        assert_eq!(a.state.to_configuration(), b.state.to_configuration());
        let c = simulate(cfg.clone(), &fast).unwrap();
        assert_eq!(c.state, a.state.to_configuration());
        for rec in &b.trace.records {
            assert_eq!(rec.edges, a.trace.records[rec.tick as usize].edges);
        }
    }
}

#[test]
fn jump_stops_before_events() {
    let cfg = drifting_pairs();
    let mut opts = RunOptions::new(300, ConfidencePolicy::LazyWalk);
    opts.fast_forward = Some(FastForward::default());
    let ev = PerturbationEvent::flip(150, vec![2, 3], 1);
    let fast = run(ExactState::from_configuration(&cfg), &opts, &mut ScheduledEvents::new(vec![ev.clone()]), &mut []).unwrap();
    opts.fast_forward = None;
    let slow = run(ExactState::from_configuration(&cfg), &opts, &mut ScheduledEvents::new(vec![ev]), &mut []).unwrap();
    assert!(fast.trace.records.iter().any(|r| r.tick == 150 && r.events.len() == 1));
    assert_eq!(fast.state.to_configuration(), slow.state.to_configuration());
}

#[test]
fn horizon_zero_keeps_initial_record() {
    let out = simulate(oscillator(), &RunOptions::new(0, ConfidencePolicy::LazyWalk)).unwrap();
    assert_eq!(out.trace.records.len(), 1);
    assert_eq!(out.state, oscillator());
}

#[test]
fn approx_tracks_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = random_config(&mut rng, 6, 2, 3, 32);
    let opts = RunOptions::new(50, ConfidencePolicy::Vicsek);
    let exact = simulate(cfg.clone(), &opts).unwrap();
    let approx = simulate(cfg.to_approx(128), &opts).unwrap();
    for i in 0..6 {
        for k in 0..2 {
            let e = exact.state.position_f64(i, k);
            assert!((approx.state.position_f64(i, k) - e).abs() < 1e-20 + 1e-15 * e.abs());
        }
    }
}

fn sup_norm(v: &[Vec<String>]) -> Rational {
    v.iter().flatten().map(|s| r(s).abs()).max().unwrap_or_else(Rational::zero)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn averaging_never_grows_velocities(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng, 5, 2, 2, 16);
        let out = simulate(cfg, &RunOptions::new(30, ConfidencePolicy::Vicsek)).unwrap();
        let recs = &out.trace.records;
        for w in recs[1..].windows(2) {
            let a = sup_norm(w[0].velocities.as_ref().unwrap());
            let b = sup_norm(w[1].velocities.as_ref().unwrap());
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn displacement_bounded_by_velocity_gap(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng, 5, 2, 2, 16);
        let out = simulate(cfg.to_approx(64), &RunOptions::new(30, ConfidencePolicy::LazyWalk)).unwrap();
        let recs = &out.trace.records;
        let parse = |m: &Vec<Vec<String>>| -> Vec<Vec<f64>> {
            m.iter().map(|row| row.iter().map(|s| s.parse::<f64>().unwrap()).collect()).collect()
        };
        for w in recs[1..].windows(2) {
            let x0 = parse(w[0].positions.as_ref().unwrap());
            let x1 = parse(w[1].positions.as_ref().unwrap());
            let v1 = parse(w[1].velocities.as_ref().unwrap());
            let dist = |x: &Vec<Vec<f64>>, i: usize, j: usize| ((x[i][0] - x[j][0]).powi(2) + (x[i][1] - x[j][1]).powi(2)).sqrt();
            for i in 0..5 {
                for j in i + 1..5 {
                    let gap = ((v1[i][0] - v1[j][0]).powi(2) + (v1[i][1] - v1[j][1]).powi(2)).sqrt();
                    prop_assert!((dist(&x1, i, j) - dist(&x0, i, j)).abs() <= gap + 1e-12);
                }
            }
        }
    }
}
