use std::fmt;

use super::{NumericsError, Rational, Scalar};

/// Dense row-major matrix over a [`Scalar`] field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Column vectors are plain vectors.
pub type Vector<S> = Vec<S>;

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, NumericsError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(NumericsError::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn column(v: Vec<S>) -> Self {
        let n = v.len();
        Matrix { rows: n, cols: 1, data: v }
    }

    pub fn diag(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Result<&S, NumericsError> {
        if i >= self.rows || j >= self.cols {
            return Err(NumericsError::OutOfRange { i, j, rows: self.rows, cols: self.cols });
        }
        Ok(&self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) -> Result<(), NumericsError> {
        if i >= self.rows || j >= self.cols {
            return Err(NumericsError::OutOfRange { i, j, rows: self.rows, cols: self.cols });
        }
        self.data[i * self.cols + j] = v;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn matmul(&self, o: &Self) -> Result<Self, NumericsError> {
        if self.cols != o.rows {
            return Err(NumericsError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k * o.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[S]) -> Result<Vec<S>, NumericsError> {
        if self.cols != v.len() {
            return Err(NumericsError::Dimension(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Row vector times matrix: `vᵀ A`.
    pub fn vec_mat(&self, v: &[S]) -> Result<Vec<S>, NumericsError> {
        self.transpose().mat_vec(v)
    }

    pub fn add(&self, o: &Self) -> Result<Self, NumericsError> {
        self.zip_with(o, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, o: &Self) -> Result<Self, NumericsError> {
        self.zip_with(o, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self, NumericsError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(NumericsError::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Largest absolute entry, as a double.
    pub fn max_abs_f64(&self) -> f64 {
        self.data.iter().map(|a| a.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn row_sums(&self) -> Vec<S> {
        (0..self.rows).map(|i| self.row(i).iter().cloned().fold(S::zero(), |a, b| a + b)).collect()
    }

    /// Submatrix with the given rows and columns, in that order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.data[a * cols.len() + b] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|a| a.to_f64())
    }
}

impl Matrix<Rational> {
    /// Parses whitespace-separated `p/q` literals, one row per non-empty line.
    pub fn parse(text: &str) -> Result<Self, NumericsError> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(str::parse)
                    .collect::<Result<Vec<Rational>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    /// Panics on out-of-range access; use [`Matrix::get`] for a checked lookup.
    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) outside {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) outside {}x{}", self.rows, self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", line.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `A^s` by repeated squaring; `A^0` is the identity.
pub fn mat_power<S: Scalar>(a: &Matrix<S>, s: u64) -> Result<Matrix<S>, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::Dimension(format!("power of a {}x{} matrix", a.rows, a.cols)));
    }
    let mut result = Matrix::identity(a.rows);
    let mut base = a.clone();
    let mut e = s;
    while e > 0 {
        if e & 1 == 1 {
            result = result.matmul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base)?;
        }
    }
    Ok(result)
}

/// `Σ_{i=1}^{s} A^i` together with `A^s`, by doubling.
pub fn power_sum<S: Scalar>(a: &Matrix<S>, s: u64) -> Result<(Matrix<S>, Matrix<S>), NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::Dimension(format!("power of a {}x{} matrix", a.rows, a.cols)));
    }
    if s == 0 {
        return Ok((Matrix::zeros(a.rows, a.rows), Matrix::identity(a.rows)));
    }
    let (half_sum, half_pow) = power_sum(a, s / 2)?;
    // S_{2k} = S_k + A^k S_k, A^{2k} = (A^k)^2
    let mut sum = half_sum.add(&half_pow.matmul(&half_sum)?)?;
    let mut pow = half_pow.matmul(&half_pow)?;
    if s % 2 == 1 {
        pow = pow.matmul(a)?;
        sum = sum.add(&pow)?;
    }
    Ok((sum, pow))
}
