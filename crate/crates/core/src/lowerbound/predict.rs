use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::{IBig, UBig};
use serde::Serialize;

use crate::numerics::{BigFraction, Rational};

use super::params::LBParams;
use super::LowerBoundError;

/// `log₁₀|a/b|` from the leading bits, without materialising a quotient.
pub fn log10_abs(x: &BigFraction) -> f64 {
    fn log2_of(u: &UBig) -> f64 {
        let bits = u.bit_len();
        if bits <= 64 {
            let v: u64 = u.try_into().expect("fits in 64 bits");
            return (v as f64).log2();
        }
        let top: u64 = (u >> (bits - 64)).try_into().expect("64 leading bits");
        (top as f64).log2() + (bits - 64) as f64
    }
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    (log2_of(&(&x.num).unsigned_abs()) - log2_of(&x.den)) * std::f64::consts::LOG10_2
}

/// Closed forms for the pair phase, valid for `0 ≤ t ≤ θ₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct Height1Prediction {
    pub q: Rational,
    pub theta1: u64,
    pub m1: Rational,
}

impl Height1Prediction {
    /// Position of bird `i` at tick `t`: the four-bird pattern repeats shifted by 4.
    pub fn position(&self, i: usize, t: u64) -> Rational {
        let half_q = &self.q / &Rational::from_integer(2);
        let osc = Rational::frac(1, 4) * Rational::from_integer(-3).pow(1 - t as i64).expect("nonzero base");
        let t = Rational::from_integer(t);
        let three_quarters = Rational::frac(3, 4);
        let lead = &half_q * &(&(&t + &three_quarters) + &osc);
        let trail = &half_q * &(&(&t - &three_quarters) - &osc);
        let base = Rational::from_integer(4 * (i / 4) as i64);
        let local = match i % 4 {
            0 => lead,
            1 => &Rational::frac(2, 3) + &trail,
            2 => &Rational::from_integer(2) - &lead,
            _ => &Rational::frac(8, 3) - &trail,
        };
        &base + &local
    }

    /// `x₃(t) − x₂(t) = 4/3 − tq`.
    pub fn inter_pair_gap(&self, t: u64) -> Rational {
        &Rational::frac(4, 3) - &(&Rational::from_integer(t) * &self.q)
    }

    /// `x₂(t) − x₁(t) = 2/3 − (3/4)q(1 − (−1/3)^t)`.
    pub fn pair_gap(&self, t: u64) -> Rational {
        let decay = Rational::frac(-1, 3).pow(t as i64).expect("nonzero base");
        &Rational::frac(2, 3) - &(&(&Rational::frac(3, 4) * &self.q) * &(&Rational::one() - &decay))
    }

    /// Gap at the first merge, `1 − q/3`.
    pub fn merge_gap(&self) -> Rational {
        self.inter_pair_gap(self.theta1)
    }
}

pub fn predict_height1(p: &LBParams) -> Result<Height1Prediction, LowerBoundError> {
    p.validate()?;
    Ok(Height1Prediction { q: p.q.clone(), theta1: p.theta1(), m1: &p.q / &Rational::from_integer(2) })
}

/// `m₂ = (q/2)(−3)^{−θ₁}`.
pub fn predict_m2(q: &Rational, theta1: u64) -> Rational {
    let half_q = q / &Rational::from_integer(2);
    &half_q * &Rational::from_integer(-3).pow(-(theta1 as i64)).expect("nonzero base")
}

/// `m₃ = (q/42)(4(2/3)^{θ₂} − (−3)^{−θ₂})`, left unreduced since `θ₂` may be in the millions.
pub fn predict_m3(q: &Rational, theta2: u64) -> BigFraction {
    let t = theta2 as usize;
    let parity = if theta2 % 2 == 0 { IBig::ONE } else { -IBig::ONE };
    let num = (IBig::from(4u8) * (IBig::ONE << t) - parity) * q.numer();
    let den = UBig::from(42u8) * q.denom() * UBig::from(3u8).pow(t);
    BigFraction { num, den }
}

/// Merge-time window `lag + (1 ± slack)/(6|m|)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaWindow {
    pub j: u32,
    pub lag: u64,
    pub slack: f64,
    /// `+∞` when `1/(6|m|)` exceeds the double range.
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
    pub log10_center: f64,
}

impl ThetaWindow {
    pub fn contains(&self, theta: u64) -> bool {
        let t = theta as f64;
        self.lo <= t && t <= self.hi
    }
}

pub fn predict_theta(j: u32, m: &BigFraction, lag: u64, slack: f64) -> Result<ThetaWindow, LowerBoundError> {
    if m.is_zero() {
        return Err(LowerBoundError::Degenerate(j));
    }
    let log10_core = -(log10_abs(m) + 6f64.log10());
    let core = 10f64.powf(log10_core);
    let lagf = lag as f64;
    let center = lagf + core;
    Ok(ThetaWindow {
        j,
        lag,
        slack,
        center,
        lo: lagf + core * (1.0 - slack),
        hi: lagf + core * (1.0 + slack),
        log10_center: center.log10().max(log10_core),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipMode {
    /// Left children of even height and right children of odd height above 2.
    TrueRule,
    /// Only right children of height 2 and above.
    RightOnly,
}

/// Sign of the left-spine drift at formation and after any scheduled flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignPattern {
    pub at_formation: i8,
    pub after_flip: i8,
}

pub fn sign_pattern(j: u32, mode: FlipMode) -> SignPattern {
    match mode {
        FlipMode::RightOnly => {
            let s = if matches!(j % 4, 0 | 1) { 1 } else { -1 };
            SignPattern { at_formation: s, after_flip: s }
        }
        FlipMode::TrueRule => {
            let s = if j % 2 == 1 { 1 } else { -1 };
            SignPattern { at_formation: s, after_flip: 1 }
        }
    }
}

/// Second eigenvalue `(1 + 2cos(π/(2^j − 1)))/3` of the lazy walk on a `2^j`-path.
pub fn path_second_eigenvalue(j: u32) -> f64 {
    let m = (1u64 << j) as f64;
    (1.0 + 2.0 * (std::f64::consts::PI / (m - 1.0)).cos()) / 3.0
}

/// One height of the predictor chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainEntry {
    pub j: u32,
    #[serde(skip)]
    pub m: Option<BigFraction>,
    pub m_log10: f64,
    pub sign: i8,
    /// `true` when `m` is an exact closed form; otherwise a leading-order estimate.
    pub exact: bool,
    /// Lifetime of the flock at this height, when known or predictable.
    pub window: Option<ThetaWindow>,
    pub theta_used: Option<u64>,
}

/// Drifts and merge times by height, using realized lifetimes where given.
///
/// Heights 1 to 3 use exact closed forms. Higher heights keep only the slowest
/// surviving mode, `|m_{j+1}| ≈ q·λ₂(P_j)^{θ_j}`, in log scale until `θ_j` leaves
/// the double range.
pub fn predict_chain(p: &LBParams, realized: &[Option<u64>], slack: f64) -> Result<Vec<ChainEntry>, LowerBoundError> {
    p.validate()?;
    let realized_at = |j: u32| realized.get(j as usize).copied().flatten();
    let mut out: Vec<ChainEntry> = Vec::new();
    let h = p.height();
    for j in 1..=h {
        let sign = sign_pattern(j, FlipMode::TrueRule).at_formation;
        let m = match j {
            1 => Some(BigFraction::from_rational(&(&p.q / &Rational::from_integer(2)))),
            2 => Some(BigFraction::from_rational(&predict_m2(&p.q, realized_at(1).unwrap_or(p.theta1())))),
            3 => {
                let prev = &out[1];
                let theta = realized_at(2).or_else(|| prev.window.as_ref().and_then(|w| round_window(w.center)));
                theta.map(|t| predict_m3(&p.q, t))
            }
            _ => None,
        };
        let m_log10 = match &m {
            Some(m) => log10_abs(m),
            None => {
                let prev = &out[(j - 2) as usize];
                let theta = realized_at(j - 1)
                    .map(|t| t as f64)
                    .unwrap_or_else(|| prev.window.as_ref().map_or(f64::INFINITY, |w| w.center));
                p.q.to_f64().log10() + theta * path_second_eigenvalue(j - 1).log10()
            }
        };
        let window = if j == h || !m_log10.is_finite() {
            None
        } else {
            let lag = if j == 1 { 0 } else { p.lag };
            let mf = m.clone().unwrap_or_else(|| magnitude_fraction(m_log10));
            Some(predict_theta(j, &mf, lag, slack)?)
        };
        out.push(ChainEntry { j, m, m_log10, sign, exact: j <= 3, window, theta_used: realized_at(j) });
    }
    Ok(out)
}

fn round_window(c: f64) -> Option<u64> {
    (c.is_finite() && c < u64::MAX as f64).then(|| c.round() as u64)
}

/// A positive fraction of the given decimal magnitude, for windows of estimated drifts.
fn magnitude_fraction(log10: f64) -> BigFraction {
    let log2 = log10 / std::f64::consts::LOG10_2;
    let shift = (-log2).floor().max(0.0) as usize;
    let mant = 2f64.powf(log2 + shift as f64);
    let scaled = (mant * (1u64 << 52) as f64) as u64;
    BigFraction { num: IBig::from(scaled.max(1)), den: UBig::ONE << (shift + 52) }
}
