use super::{Matrix, NumericsError, Scalar};

/// Solves `A X = B` by Gauss-Jordan elimination with largest-magnitude pivoting.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>, NumericsError> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(NumericsError::Dimension(format!(
            "solve with {}x{} system and {}x{} right-hand side",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let m = b.cols();
    let mut rows: Vec<Vec<S>> = (0..n)
        .map(|i| a.row(i).iter().chain(b.row(i)).cloned().collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !rows[r][col].is_zero())
            .max_by(|&x, &y| {
                rows[x][col]
                    .abs()
                    .partial_cmp(&rows[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(NumericsError::Singular)?;
        rows.swap(col, pivot);
        let p = rows[col][col].clone();
        let prow: Vec<S> = rows[col].iter().map(|x| x.clone() / p.clone()).collect();
        rows[col] = prow;
        for r in 0..n {
            if r == col || rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            let pr = rows[col].clone();
            for (x, y) in rows[r].iter_mut().zip(pr) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y;
                }
            }
        }
    }
    let data = rows.into_iter().flat_map(|r| r.into_iter().skip(n)).collect();
    Matrix::from_vec(n, m, data)
}

pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>, NumericsError> {
    solve(a, &Matrix::identity(a.rows()))
}
