use serde::Serialize;

use crate::dynamics::{ConfidencePolicy, TickRecord, Trace};
use crate::numerics::Rational;
use crate::spectral::stationary_from_weights;

use super::AnalysisError;

/// Parses a recorded coordinate: `p/q` exactly, anything else as a float.
pub fn parse_entry(s: &str) -> Result<(Option<Rational>, f64), AnalysisError> {
    if let Ok(r) = s.parse::<Rational>() {
        let f = r.to_f64();
        return Ok((Some(r), f));
    }
    s.parse::<f64>().map(|f| (None, f)).map_err(|_| AnalysisError::BadEntry(s.to_string()))
}

fn record_at(trace: &Trace, tick: u64) -> Result<&TickRecord, AnalysisError> {
    trace
        .records
        .binary_search_by_key(&tick, |r| r.tick)
        .map(|k| &trace.records[k])
        .map_err(|_| AnalysisError::TickNotFound(tick))
}

/// π-weighted velocity of one flock.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlockVelocity {
    pub members: Vec<usize>,
    /// Present when every recorded velocity is an exact rational.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_rationals")]
    pub exact: Option<Vec<Rational>>,
    pub approx: Vec<f64>,
}

fn ser_opt_rationals<S: serde::Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
    let strings: Option<Vec<String>> = v.as_ref().map(|v| v.iter().map(Rational::to_string).collect());
    serde::Serialize::serialize(&strings, s)
}

/// Stationary velocity `(πᵀ ⊗ I_d) v` of every flock at `tick`.
///
/// The record at tick 0 carries `v(1)`.
pub fn stationary_velocities(trace: &Trace, tick: u64, policy: &ConfidencePolicy) -> Result<Vec<FlockVelocity>, AnalysisError> {
    let rec = record_at(trace, tick)?;
    let vel = rec.velocities.as_ref().ok_or(AnalysisError::MissingStates(tick))?;
    let g = rec.network(trace.n)?;
    let weights = policy.coefficients(&g)?;
    rec.flocks
        .iter()
        .map(|f| {
            let c: Vec<Rational> = f.iter().map(|&i| weights[i].clone()).collect();
            let pi = stationary_from_weights(&c)?;
            let mut exact = Some(vec![Rational::zero(); trace.d]);
            let mut approx = vec![0.0; trace.d];
            for (&i, w) in f.iter().zip(&pi) {
                for k in 0..trace.d {
                    let (r, x) = parse_entry(&vel[i][k])?;
                    approx[k] += w.to_f64() * x;
                    match (&mut exact, r) {
                        (Some(acc), Some(r)) => acc[k] += &(w * &r),
                        _ => exact = None,
                    }
                }
            }
            if let Some(e) = &exact {
                approx = e.iter().map(Rational::to_f64).collect();
            }
            Ok(FlockVelocity { members: f.clone(), exact, approx })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeObservables {
    /// Angle between the lifted position `(x_i(t), t)` and lifted velocity `(v_i(t), 1)`.
    pub omega: f64,
    /// `‖v_i(t) − x_i(t)/t‖₂`.
    pub offset: f64,
    /// `w_i(t) = x_i(t)/t`, lifted.
    pub w: Vec<f64>,
}

fn angle(a: &[f64], b: &[f64]) -> Result<f64, AnalysisError> {
    let bb: f64 = b.iter().map(|x| x * x).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    if aa == 0.0 || bb == 0.0 {
        return Err(AnalysisError::UndefinedAngle);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let rej: f64 = a.iter().zip(b).map(|(x, y)| (x - dot / bb * y).powi(2)).sum::<f64>().sqrt();
    Ok((rej * bb.sqrt()).atan2(dot))
}

pub fn escape_observables(trace: &Trace, tick: u64, bird: usize) -> Result<EscapeObservables, AnalysisError> {
    if bird >= trace.n {
        return Err(AnalysisError::BirdOutOfRange(bird));
    }
    if tick == 0 {
        return Err(AnalysisError::TickNotFound(0));
    }
    let rec = record_at(trace, tick)?;
    let (pos, vel) = match (&rec.positions, &rec.velocities) {
        (Some(p), Some(v)) => (p, v),
        _ => return Err(AnalysisError::MissingStates(tick)),
    };
    let t = tick as f64;
    let mut x = pos[bird].iter().map(|s| parse_entry(s).map(|e| e.1)).collect::<Result<Vec<_>, _>>()?;
    let mut v = vel[bird].iter().map(|s| parse_entry(s).map(|e| e.1)).collect::<Result<Vec<_>, _>>()?;
    x.push(t);
    v.push(1.0);
    let omega = angle(&x, &v)?;
    let w: Vec<f64> = x.iter().map(|c| c / t).collect();
    let offset = v.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    Ok(EscapeObservables { omega, offset, w })
}
