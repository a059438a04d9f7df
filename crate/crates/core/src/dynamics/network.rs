use std::cmp::Ordering;
use std::fmt;

use crate::numerics::{Matrix, Rational, Scalar};

use super::state::FlockState;
use super::DynamicsError;

/// Undirected simple graph on birds `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FlockNetwork {
    n: usize,
    adj: Vec<Vec<bool>>,
}

impl FlockNetwork {
    pub fn empty(n: usize) -> Self {
        FlockNetwork { n, adj: vec![vec![false; n]; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, DynamicsError> {
        let mut g = Self::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(DynamicsError::Dimension(format!("edge ({i},{j}) on {n} vertices")));
            }
            if i == j {
                return Err(DynamicsError::Invalid(format!("self-loop at {i}")));
            }
            g.adj[i][j] = true;
            g.adj[j][i] = true;
        }
        Ok(g)
    }

    /// Path 0 - 1 - ... - (n-1).
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("valid path")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, &edges).expect("valid clique")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&b| b).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j)
    }

    /// Edges `(i, j)` with `i < j`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Connected components (flocks), each sorted, ordered by smallest member.
    pub fn flocks(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let u = comp[k];
                k += 1;
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Flock index of every bird, matching the order of [`FlockNetwork::flocks`].
    pub fn flock_labels(&self) -> Vec<usize> {
        let mut lab = vec![0; self.n];
        for (k, f) in self.flocks().iter().enumerate() {
            for &i in f {
                lab[i] = k;
            }
        }
        lab
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.flocks().len() == 1
    }

    /// Induced subgraph on `members`, relabelled `0..members.len()`.
    pub fn induced(&self, members: &[usize]) -> FlockNetwork {
        let m = members.len();
        let mut g = Self::empty(m);
        for a in 0..m {
            for b in 0..m {
                g.adj[a][b] = self.adj[members[a]][members[b]];
            }
        }
        g
    }

    /// Edges gained and lost relative to `prev`.
    pub fn diff(&self, prev: &FlockNetwork) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let mut gained = Vec::new();
        let mut lost = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                match (prev.adj[i][j], self.adj[i][j]) {
                    (false, true) => gained.push((i, j)),
                    (true, false) => lost.push((i, j)),
                    _ => {}
                }
            }
        }
        (gained, lost)
    }
}

impl fmt::Debug for FlockNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlockNetwork(n={}, edges={:?})", self.n, self.edges())
    }
}

/// Edge retention rule: an existing edge survives while its length changes by less than `epsilon`.
#[derive(Clone, Debug, PartialEq)]
pub struct HysteresisRule {
    pub epsilon: Rational,
    pub enabled: bool,
}

impl HysteresisRule {
    pub fn new(epsilon: Rational) -> Result<Self, DynamicsError> {
        if !epsilon.is_positive() {
            return Err(DynamicsError::Invalid("hysteresis epsilon must be positive".into()));
        }
        Ok(HysteresisRule { epsilon, enabled: true })
    }

    pub fn disabled() -> Self {
        HysteresisRule { epsilon: default_epsilon(), enabled: false }
    }
}

impl Default for HysteresisRule {
    fn default() -> Self {
        HysteresisRule { epsilon: default_epsilon(), enabled: true }
    }
}

fn default_epsilon() -> Rational {
    Rational::frac(1, 1 << 40)
}

/// A freshly built network together with the edges kept only by hysteresis.
#[derive(Clone, Debug)]
pub struct NetworkBuild {
    pub network: FlockNetwork,
    pub retained: Vec<(usize, usize)>,
}

/// Builds `G_t` from the current state, consulting the previous network and state for hysteresis.
pub fn build_network<St: FlockState>(
    state: &St,
    prev: Option<(&FlockNetwork, &St)>,
    rule: &HysteresisRule,
) -> Result<NetworkBuild, DynamicsError> {
    let n = state.n();
    if let Some((g, s)) = prev {
        if g.n() != n || s.n() != n {
            return Err(DynamicsError::Dimension(format!(
                "previous network has {} vertices, state has {n} birds",
                g.n()
            )));
        }
    }
    let one = Rational::one();
    let mut g = FlockNetwork::empty(n);
    let mut retained = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let close = state.compare_distance(i, j, &one) != Ordering::Greater;
            let keep = !close
                && rule.enabled
                && prev.is_some_and(|(pg, ps)| pg.has_edge(i, j) && state.keeps_edge(ps, i, j, &rule.epsilon));
            if close || keep {
                g.adj[i][j] = true;
                g.adj[j][i] = true;
            }
            if keep {
                retained.push((i, j));
            }
        }
    }
    Ok(NetworkBuild { network: g, retained })
}

/// `L = D − A`.
pub fn laplacian<S: Scalar>(g: &FlockNetwork) -> Matrix<S> {
    let n = g.n();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        l[(i, i)] = S::from_i64(g.degree(i) as i64);
        for j in g.neighbors(i) {
            l[(i, j)] = S::from_i64(-1);
        }
    }
    l
}

/// `|√a − √b| < ε` decided exactly from squared lengths `a`, `b`.
pub fn sqrt_gap_below<S: Scalar>(a: &S, b: &S, eps: &S) -> bool {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let e2 = eps.clone() * eps.clone();
    let lhs = hi.clone() - lo.clone() - e2.clone();
    if lhs < S::zero() {
        return true;
    }
    lhs.clone() * lhs < S::from_i64(4) * e2 * lo.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_path_laplacian() {
        let l: Matrix<Rational> = laplacian(&FlockNetwork::path(3));
        assert_eq!(l, Matrix::parse("1 -1 0\n-1 2 -1\n0 -1 1").unwrap());
        for s in l.row_sums() {
            assert!(s.is_zero());
        }
    }

    #[test]
    fn empty_laplacian_is_zero() {
        let l: Matrix<Rational> = laplacian(&FlockNetwork::empty(3));
        assert_eq!(l, Matrix::zeros(3, 3));
    }

    #[test]
    fn flocks_and_diff() {
        let g = FlockNetwork::from_edges(5, &[(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.flocks(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        let h = FlockNetwork::from_edges(5, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(h.diff(&g), (vec![(1, 2)], vec![(3, 4)]));
        assert!(FlockNetwork::from_edges(2, &[(1, 1)]).is_err());
    }

    #[test]
    fn sqrt_gap_exact() {
        let r = |s: &str| s.parse::<Rational>().unwrap();
        // √(25/16) − √1 = 1/4
        assert!(!sqrt_gap_below(&r("25/16"), &r("1"), &r("1/4")));
        assert!(sqrt_gap_below(&r("25/16"), &r("1"), &(&r("1/4") + r("1/1000000"))));
        assert!(sqrt_gap_below(&r("1"), &r("1"), &r("1/1000")));
        // √2 − 1 ≈ 0.41421
        assert!(sqrt_gap_below(&r("2"), &r("1"), &r("41422/100000")));
        assert!(!sqrt_gap_below(&r("2"), &r("1"), &r("41421/100000")));
    }
}
