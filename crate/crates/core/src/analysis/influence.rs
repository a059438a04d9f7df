use serde::Serialize;

use crate::dynamics::{transition, ConfidencePolicy, FlockNetwork, Trace};
use crate::numerics::{Matrix, Rational};

use super::{network_runs, AnalysisError};

/// Boolean footprint of the backward product `P(t, s) = P(t)⋯P(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfluenceState {
    pub s: u64,
    pub tick: u64,
    pub n: usize,
    pub footprint: Vec<bool>,
    /// Number of true entries after each tick.
    pub history: Vec<(u64, usize)>,
}

impl InfluenceState {
    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.footprint[i * self.n + j]
    }

    pub fn ones(&self) -> usize {
        self.footprint.iter().filter(|&&b| b).count()
    }
}

/// Networks acting on velocities at ticks `≥ s`, as `(first tick, network, count)`.
///
/// Tick 0 moves birds without averaging, so it never contributes a factor.
fn factors(trace: &Trace, s: u64) -> Result<Vec<(u64, FlockNetwork, u64)>, AnalysisError> {
    let last = trace.records.last().map(|r| r.tick).unwrap_or(0);
    if trace.records.is_empty() || s > last {
        return Err(AnalysisError::TickNotFound(s));
    }
    let from = s.max(1);
    Ok(network_runs(trace)?
        .into_iter()
        .filter_map(|(t, g, repeat)| {
            let first = (t + 1 - repeat).max(from);
            (t >= first).then(|| (first, g, t - first + 1))
        })
        .collect())
}

/// `F ← (A + I)·F` restricted to `members`.
fn advance(f: &mut [bool], g: &FlockNetwork, members: &[usize]) -> bool {
    let m = members.len();
    let mut next = f.to_vec();
    for a in 0..m {
        for b in 0..m {
            if a != b && g.has_edge(members[a], members[b]) {
                for c in 0..m {
                    if f[b * m + c] {
                        next[a * m + c] = true;
                    }
                }
            }
        }
    }
    let changed = next != f;
    f.copy_from_slice(&next);
    changed
}

fn identity(m: usize) -> Vec<bool> {
    (0..m * m).map(|k| k / m == k % m).collect()
}

pub fn influence(trace: &Trace, s: u64) -> Result<InfluenceState, AnalysisError> {
    let n = trace.n;
    let all: Vec<usize> = (0..n).collect();
    let mut f = identity(n);
    let mut history = Vec::new();
    let mut tick = s;
    for (first, g, count) in factors(trace, s)? {
        // boolean powers settle after n factors
        for k in 0..count.min(n as u64) {
            advance(&mut f, &g, &all);
            history.push((first + k, f.iter().filter(|&&b| b).count()));
        }
        tick = first + count - 1;
    }
    Ok(InfluenceState { s, tick, n, footprint: f, history })
}

/// One refreshed-influence stage: the set reached from a bird and when it stopped growing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilizer {
    pub members: Vec<usize>,
    pub settled: u64,
}

/// Nested stabilizers `V_1 ⊇ V_2 ⊇ …` of bird `i` from tick `s`.
///
/// Stops at the trace end or once a reboot returns the same set as the stage before it.
pub fn stabilizers(trace: &Trace, s: u64, i: usize) -> Result<Vec<Stabilizer>, AnalysisError> {
    if i >= trace.n {
        return Err(AnalysisError::BirdOutOfRange(i));
    }
    let runs = factors(trace, s)?;
    let mut members: Vec<usize> = (0..trace.n).collect();
    let mut start = s.max(1);
    let mut out = Vec::new();
    loop {
        let m = members.len();
        let col = members.iter().position(|&b| b == i).expect("bird stays in its stabilizer");
        let mut f = identity(m);
        let column = |f: &[bool]| -> Vec<bool> { (0..m).map(|a| f[a * m + col]).collect() };
        let mut last_col = column(&f);
        let mut settled = start - 1;
        let mut any = false;
        for (first, g, count) in runs.iter().filter(|(first, _, count)| first + count > start) {
            let lo = (*first).max(start);
            let reps = (first + count - lo).min(m as u64);
            for k in 0..reps {
                any = true;
                advance(&mut f, g, &members);
                let c = column(&f);
                if c != last_col {
                    settled = lo + k;
                    last_col = c;
                }
            }
        }
        if !any {
            break;
        }
        let next: Vec<usize> = (0..m).filter(|&a| last_col[a]).map(|a| members[a]).collect();
        let fixpoint = next == members && !out.is_empty();
        out.push(Stabilizer { members: next.clone(), settled });
        if fixpoint {
            break;
        }
        members = next;
        start = settled + 1;
    }
    Ok(out)
}

/// Last stabilizer of every bird.
pub fn recurrent_influence(trace: &Trace, s: u64) -> Result<Vec<Vec<usize>>, AnalysisError> {
    (0..trace.n)
        .map(|i| Ok(stabilizers(trace, s, i)?.pop().map(|st| st.members).unwrap_or_else(|| vec![i])))
        .collect()
}

/// Exact backward product data at one tick.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductStep {
    pub tick: u64,
    pub ones: usize,
    pub footprint_changed: bool,
    /// Smallest positive entry of `P(t, s)`.
    pub rho: Rational,
}

/// Exact `P(t, s)` for `t` from `s` through `until`, summarized per tick.
pub fn product_profile(trace: &Trace, s: u64, until: u64, policy: &ConfidencePolicy) -> Result<Vec<ProductStep>, AnalysisError> {
    let mut prod = Matrix::<Rational>::identity(trace.n);
    let mut ones = trace.n;
    let mut out = Vec::new();
    for (first, g, count) in factors(trace, s)? {
        let p = transition(&g, policy)?.p;
        for k in 0..count {
            let tick = first + k;
            if tick > until {
                return Ok(out);
            }
            prod = p.matmul(&prod).map_err(crate::dynamics::DynamicsError::from)?;
            let pos: Vec<&Rational> = prod.entries().iter().filter(|x| !x.is_zero()).collect();
            let now = pos.len();
            let rho = pos.into_iter().min().cloned().unwrap_or_else(Rational::zero);
            out.push(ProductStep { tick, ones: now, footprint_changed: now != ones, rho });
            ones = now;
        }
    }
    Ok(out)
}
