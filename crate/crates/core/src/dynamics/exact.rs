use std::cmp::Ordering;
use std::collections::HashMap;

use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::{IBig, UBig};

use crate::numerics::{lcm, ratio_to_f64, BigFraction, Matrix, Mode, Rational};

use super::state::{Configuration, FlockState, JumpBlock};
use super::transition::{integer_form, TransitionMatrix};
use super::DynamicsError;

/// Exact state with all positions and velocities over one shared denominator.
///
/// Nothing is ever reduced: a step multiplies the denominator by the lcm of the
/// transition entries' denominators, which keeps the cost of a tick linear in the
/// operand size.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactState {
    tick: u64,
    n: usize,
    d: usize,
    x: Vec<IBig>,
    v: Vec<IBig>,
    den: UBig,
}

impl ExactState {
    pub fn from_configuration(cfg: &Configuration<Rational>) -> Self {
        let n = cfg.x.rows();
        let d = cfg.x.cols();
        let mut den = UBig::ONE;
        for r in cfg.x.entries().iter().chain(cfg.v.entries()) {
            den = lcm(&den, r.denom());
        }
        let scale = |r: &Rational| r.numer() * IBig::from(&den / r.denom());
        ExactState {
            tick: cfg.tick,
            n,
            d,
            x: cfg.x.entries().iter().map(scale).collect(),
            v: cfg.v.entries().iter().map(scale).collect(),
            den,
        }
    }

    pub fn to_configuration(&self) -> Configuration<Rational> {
        let conv = |m: &[IBig]| {
            let data = m.iter().map(|a| Rational::reduced(a.clone(), self.den.clone())).collect();
            Matrix::from_vec(self.n, self.d, data).expect("consistent shape")
        };
        Configuration { tick: self.tick, x: conv(&self.x), v: conv(&self.v) }
    }

    pub fn denominator(&self) -> &UBig {
        &self.den
    }

    pub fn velocity_fraction(&self, i: usize, k: usize) -> BigFraction {
        BigFraction { num: self.v[i * self.d + k].clone(), den: self.den.clone() }
    }

    pub fn position_fraction(&self, i: usize, k: usize) -> BigFraction {
        BigFraction { num: self.x[i * self.d + k].clone(), den: self.den.clone() }
    }

    fn diffs(&self, m: &[IBig], i: usize, j: usize) -> Vec<IBig> {
        (0..self.d).map(|k| &m[i * self.d + k] - &m[j * self.d + k]).collect()
    }

    fn sq_dist(&self, i: usize, j: usize) -> BigFraction {
        let num: IBig = self.diffs(&self.x, i, j).iter().map(|a| a * a).sum();
        BigFraction { num, den: &self.den * &self.den }
    }

    fn rescale(&mut self, f: &UBig) {
        if f.is_one() {
            return;
        }
        let fi = IBig::from(f.clone());
        for a in self.x.iter_mut().chain(self.v.iter_mut()) {
            *a *= &fi;
        }
        self.den *= f;
    }
}

fn mat_mul_int(a: &[IBig], b: &[IBig], m: usize, cols: usize) -> Vec<IBig> {
    let mut out = vec![IBig::ZERO; m * cols];
    for i in 0..m {
        for k in 0..m {
            let x = &a[i * m + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..cols {
                let y = &b[k * cols + j];
                if !y.is_zero() {
                    out[i * cols + j] += x * y;
                }
            }
        }
    }
    out
}

/// `|√a − √b| < ε` for squared lengths given as fractions.
fn sqrt_gap_below_frac(a: &BigFraction, b: &BigFraction, eps: &Rational) -> bool {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let e = BigFraction::from_rational(eps);
    let e2 = e.mul(&e);
    let lhs = hi.sub(lo).sub(&e2);
    if lhs.signum() < 0 {
        return true;
    }
    let four = BigFraction::from_rational(&Rational::from_integer(4));
    lhs.mul(&lhs) < four.mul(&e2).mul(lo)
}

/// Cached powers `N^{2^k}` per integer block.
#[derive(Default)]
pub struct PowerCache {
    powers: HashMap<(usize, Vec<IBig>), Vec<Vec<IBig>>>,
}

impl PowerCache {
    /// Applies `N^s` to the `m × cols` integer matrix `z`.
    fn apply_power(&mut self, n: &[IBig], m: usize, s: u64, mut z: Vec<IBig>, cols: usize) -> Vec<IBig> {
        let entry = self.powers.entry((m, n.to_vec())).or_insert_with(|| vec![n.to_vec()]);
        let mut k = 0;
        let mut rest = s;
        while rest > 0 {
            if entry.len() <= k {
                let last = entry.last().expect("seeded with N");
                let sq = mat_mul_int(last, last, m, m);
                entry.push(sq);
            }
            if rest & 1 == 1 {
                z = mat_mul_int(&entry[k], &z, m, cols);
            }
            rest >>= 1;
            k += 1;
        }
        z
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }
}

fn rational_vec_integer(v: &[Rational]) -> (Vec<IBig>, UBig) {
    let mut den = UBig::ONE;
    for r in v {
        den = lcm(&den, r.denom());
    }
    let ints = v.iter().map(|r| r.numer() * IBig::from(&den / r.denom())).collect();
    (ints, den)
}

impl FlockState for ExactState {
    type JumpCache = PowerCache;

    fn n(&self) -> usize {
        self.n
    }

    fn d(&self) -> usize {
        self.d
    }

    fn tick(&self) -> u64 {
        self.tick
    }

    fn mode(&self) -> Mode {
        Mode::Exact
    }

    fn compare_distance(&self, i: usize, j: usize, r: &Rational) -> Ordering {
        let dx = self.diffs(&self.x, i, j);
        let nonzero: Vec<&IBig> = dx.iter().filter(|a| !a.is_zero()).collect();
        let a = IBig::from(r.numer().clone());
        let b = IBig::from(r.denom().clone());
        let e = IBig::from(self.den.clone());
        match nonzero.len() {
            0 => IBig::ZERO.cmp(&a),
            1 => (IBig::from(nonzero[0].unsigned_abs()) * &b).cmp(&(&a * &e)),
            _ => {
                let sq: IBig = nonzero.iter().map(|x| *x * *x).sum();
                (sq * &b * &b).cmp(&(&a * &a * &e * &e))
            }
        }
    }

    fn keeps_edge(&self, prev: &Self, i: usize, j: usize, eps: &Rational) -> bool {
        sqrt_gap_below_frac(&self.sq_dist(i, j), &prev.sq_dist(i, j), eps)
    }

    fn position_order(&self, i: usize, j: usize, k: usize) -> Ordering {
        self.x[i * self.d + k].cmp(&self.x[j * self.d + k])
    }

    fn step(&mut self, p: &TransitionMatrix) {
        let (nm, dd) = integer_form(&p.p);
        let n = self.n;
        let nv = mat_mul_int(&nm, &self.v, n, self.d);
        let di = IBig::from(dd.clone());
        if !dd.is_one() {
            for a in self.x.iter_mut() {
                *a *= &di;
            }
            self.den *= &dd;
        }
        for (a, b) in self.x.iter_mut().zip(&nv) {
            *a += b;
        }
        self.v = nv;
        self.tick += 1;
    }

    fn perturb(&mut self, members: &[usize], alpha: &[Rational]) -> f64 {
        let mut sq = 0.0;
        for &i in members {
            for (k, a) in alpha.iter().enumerate() {
                let dv = (a - &Rational::one()) * Rational::new(self.v[i * self.d + k].clone(), self.den.clone()).expect("nonzero denominator");
                sq += dv.to_f64() * dv.to_f64();
            }
        }
        let mut l = UBig::ONE;
        for a in alpha {
            l = lcm(&l, a.denom());
        }
        self.rescale(&l);
        let li = IBig::from(l.clone());
        let mut inside = vec![false; self.n];
        for &i in members {
            inside[i] = true;
        }
        for i in (0..self.n).filter(|&i| inside[i]) {
            for (k, a) in alpha.iter().enumerate() {
                // after rescaling, v·L is stored; v·α is v·L·a/(b) over the new denominator
                let factor = a.numer() * (&li / IBig::from(a.denom().clone()));
                let idx = i * self.d + k;
                self.v[idx] = &self.v[idx] / &li * factor;
            }
        }
        sq.sqrt()
    }

    fn jump(&mut self, blocks: &[JumpBlock], s: u64, cache: &mut PowerCache) -> Result<(), DynamicsError> {
        if s == 0 {
            return Ok(());
        }
        let mut covered = vec![false; self.n];
        for b in blocks {
            for &i in &b.members {
                covered[i] = true;
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(DynamicsError::Invalid("jump blocks must cover every bird".into()));
        }
        let d = self.d;
        let su = usize::try_from(s).map_err(|_| DynamicsError::Invalid("jump too long".into()))?;
        struct Prepared {
            n: Vec<IBig>,
            dd: UBig,
            pi: (Vec<IBig>, UBig),
            gamma: (Vec<IBig>, UBig),
        }
        let mut big_d = UBig::ONE;
        let mut g_all = UBig::ONE;
        let mut prepared = Vec::with_capacity(blocks.len());
        for b in blocks {
            let (n, dd) = integer_form(&b.p);
            let pi = rational_vec_integer(&b.pi);
            let gamma = rational_vec_integer(b.gamma.entries());
            big_d = lcm(&big_d, &dd);
            g_all = lcm(&g_all, &lcm(&pi.1, &gamma.1));
            prepared.push(Prepared { n, dd, pi, gamma });
        }
        let k_total = big_d.pow(su + 1) * &g_all;
        let k_int = IBig::from(k_total.clone());
        let s_int = IBig::from(s);
        let mut new_x = vec![IBig::ZERO; self.n * d];
        let mut new_v = vec![IBig::ZERO; self.n * d];
        let mut ratio_pows: HashMap<UBig, (IBig, IBig)> = HashMap::new();
        for (b, pr) in blocks.iter().zip(&prepared) {
            let m = b.members.len();
            let vb: Vec<IBig> =
                b.members.iter().flat_map(|&i| (0..d).map(move |k| (i, k))).map(|(i, k)| self.v[i * d + k].clone()).collect();
            let z = cache.apply_power(&pr.n, m, s, vb.clone(), d);
            let nv = mat_mul_int(&pr.n, &vb, m, d);
            let nz = mat_mul_int(&pr.n, &z, m, d);
            let ds = IBig::from(pr.dd.pow(su));
            let w: Vec<IBig> = nv.iter().zip(&nz).map(|(a, c)| &ds * a - c).collect();
            let gw = mat_mul_int(&pr.gamma.0, &w, m, d);
            // K / D_F^s and K / (g_F · D_F^{s+1}) as (D/D_F)^s · D · G and (D/D_F)^{s+1} · G/g_F
            let (rs, rs1) = ratio_pows
                .entry(pr.dd.clone())
                .or_insert_with(|| {
                    let ratio = &big_d / &pr.dd;
                    let rs = ratio.pow(su);
                    let rs1 = &rs * &ratio;
                    (IBig::from(rs), IBig::from(rs1))
                })
                .clone();
            let v_scale = rs * IBig::from(&big_d * &g_all);
            let gamma_scale = rs1 * IBig::from(&g_all / &pr.gamma.1);
            let pi_scale = &k_int / IBig::from(pr.pi.1.clone()) * &s_int;
            for k in 0..d {
                let piv: IBig = (0..m).map(|a| &pr.pi.0[a] * &vb[a * d + k]).sum();
                let drift = &pi_scale * &piv;
                for (a, &i) in b.members.iter().enumerate() {
                    let idx = i * d + k;
                    new_x[idx] = &self.x[idx] * &k_int + &drift + &gw[a * d + k] * &gamma_scale;
                    new_v[idx] = &z[a * d + k] * &v_scale;
                }
            }
        }
        self.x = new_x;
        self.v = new_v;
        self.den *= &k_total;
        self.tick += s;
        Ok(())
    }

    fn distance_f64(&self, i: usize, j: usize) -> f64 {
        self.diffs(&self.x, i, j)
            .iter()
            .map(|a| {
                let f = ratio_to_f64(a, &self.den);
                f * f
            })
            .sum::<f64>()
            .sqrt()
    }

    fn velocity_gap_f64(&self, i: usize, j: usize) -> f64 {
        self.diffs(&self.v, i, j)
            .iter()
            .map(|a| {
                let f = ratio_to_f64(a, &self.den);
                f * f
            })
            .sum::<f64>()
            .sqrt()
    }

    fn position_f64(&self, i: usize, k: usize) -> f64 {
        ratio_to_f64(&self.x[i * self.d + k], &self.den)
    }

    fn velocity_f64(&self, i: usize, k: usize) -> f64 {
        ratio_to_f64(&self.v[i * self.d + k], &self.den)
    }

    fn position_text(&self, i: usize, k: usize) -> String {
        Rational::reduced(self.x[i * self.d + k].clone(), self.den.clone()).to_string()
    }

    fn velocity_text(&self, i: usize, k: usize) -> String {
        Rational::reduced(self.v[i * self.d + k].clone(), self.den.clone()).to_string()
    }

    fn weighted_velocity(&self, members: &[usize], weights: &[Rational], k: usize) -> Option<BigFraction> {
        let (w, l) = rational_vec_integer(weights);
        let num: IBig = members.iter().zip(&w).map(|(&i, wi)| wi * &self.v[i * self.d + k]).sum();
        Some(BigFraction { num, den: l * &self.den })
    }

    fn to_rational(&self) -> Option<Configuration<Rational>> {
        Some(self.to_configuration())
    }

    fn size_bits(&self) -> usize {
        let m = self.x.iter().chain(&self.v).map(|a| a.unsigned_abs().bit_len()).max().unwrap_or(0);
        m.max(self.den.bit_len())
    }
}
