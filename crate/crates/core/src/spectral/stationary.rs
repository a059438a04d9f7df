use crate::numerics::{Matrix, Rational};

use super::SpectralError;

/// Whether the graph of nonzero off-diagonal entries of `p` is connected.
pub fn footprint_connected(p: &Matrix<Rational>) -> bool {
    let m = p.rows();
    if m == 0 {
        return false;
    }
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..m {
            if !seen[j] && (!p[(i, j)].is_zero() || !p[(j, i)].is_zero()) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// `π_i ∝ 1/c_i`.
pub fn stationary_from_weights(c: &[Rational]) -> Result<Vec<Rational>, SpectralError> {
    if c.iter().any(|x| !x.is_positive()) {
        return Err(SpectralError::NonPositiveWeight);
    }
    let inv = c.iter().map(Rational::recip).collect::<Result<Vec<_>, _>>()?;
    let total: Rational = inv.iter().cloned().sum();
    Ok(inv.iter().map(|x| x / &total).collect())
}

/// Stationary distribution of the averaging matrix `p` with weights `c`.
pub fn stationary_distribution(p: &Matrix<Rational>, c: &[Rational]) -> Result<Vec<Rational>, SpectralError> {
    if !footprint_connected(p) {
        return Err(SpectralError::Disconnected);
    }
    stationary_from_weights(c)
}

/// Recovers `c` from `p = I − diag(c)·L`, checking that form.
pub fn infer_weights(p: &Matrix<Rational>) -> Result<Vec<Rational>, SpectralError> {
    let m = p.rows();
    if !p.is_square() {
        return Err(SpectralError::Dimension(format!("{}x{} is not square", p.rows(), p.cols())));
    }
    let mut c = Vec::with_capacity(m);
    for i in 0..m {
        let mut w: Option<Rational> = None;
        let mut sum = Rational::zero();
        for j in (0..m).filter(|&j| j != i) {
            let a = &p[(i, j)];
            if a.is_zero() {
                continue;
            }
            if a.is_negative() {
                return Err(SpectralError::NotAveraging(format!("negative entry at ({i},{j})")));
            }
            match &w {
                Some(x) if x != a => {
                    return Err(SpectralError::NotAveraging(format!("row {i} has unequal neighbor weights")))
                }
                _ => w = Some(a.clone()),
            }
            sum += a;
        }
        if &Rational::one() - &sum != p[(i, i)] {
            return Err(SpectralError::NotAveraging(format!("row {i} does not sum to 1")));
        }
        c.push(w.unwrap_or_else(Rational::one));
    }
    for i in 0..m {
        for j in 0..i {
            if p[(i, j)].is_zero() != p[(j, i)].is_zero() {
                return Err(SpectralError::NotAveraging(format!("footprint not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(c)
}

/// `M = C^{-1/2} P C^{1/2}`.
pub fn symmetrize(p: &Matrix<Rational>, c: &[Rational]) -> Result<Matrix<f64>, SpectralError> {
    if c.len() != p.rows() {
        return Err(SpectralError::Dimension(format!("{} weights for {} rows", c.len(), p.rows())));
    }
    if c.iter().any(|x| !x.is_positive()) {
        return Err(SpectralError::NonPositiveWeight);
    }
    let m = p.rows();
    let mut out = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = p[(i, j)].to_f64() * (c[j].to_f64() / c[i].to_f64()).sqrt();
        }
    }
    Ok(out)
}

/// Exact symmetry test of `M` through squared entries `P_ij² c_j / c_i` and signs.
pub fn symmetric_exactly(p: &Matrix<Rational>, c: &[Rational]) -> bool {
    let m = p.rows();
    (0..m).all(|i| {
        (0..i).all(|j| {
            let a = &p[(i, j)];
            let b = &p[(j, i)];
            a.signum() == b.signum() && &(a * a) * &(&c[j] / &c[i]) == &(b * b) * &(&c[i] / &c[j])
        })
    })
}
