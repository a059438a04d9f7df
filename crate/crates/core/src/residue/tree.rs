use std::fmt;
use std::str::FromStr;

use dashu_int::UBig;

use super::poly::{oplus, SparsePoly};
use super::ResidueError;

/// Binary tree whose leaves carry polynomials; internal nodes combine with ⊕.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CombineTree {
    Leaf(SparsePoly),
    Node(Box<CombineTree>, Box<CombineTree>),
}

impl CombineTree {
    pub fn node(l: CombineTree, r: CombineTree) -> Self {
        CombineTree::Node(Box::new(l), Box::new(r))
    }

    pub fn leaves(&self) -> usize {
        match self {
            CombineTree::Leaf(_) => 1,
            CombineTree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Folds ⊕ bottom-up, left operand first.
    pub fn eval(&self, budget_bits: usize) -> Result<SparsePoly, ResidueError> {
        match self {
            CombineTree::Leaf(p) => Ok(p.clone()),
            CombineTree::Node(l, r) => oplus(&l.eval(budget_bits)?, &r.eval(budget_bits)?, budget_bits),
        }
    }
}

/// Complete tree with `2^{k−1}` leaves, leaf `(−1)^{left turns}·x`.
pub fn canonical_tree(k: u32) -> Result<CombineTree, ResidueError> {
    fn build(levels: u32, lefts: u32) -> CombineTree {
        if levels == 1 {
            let s = if lefts % 2 == 0 { 1 } else { -1 };
            return CombineTree::Leaf(SparsePoly::linear(s));
        }
        CombineTree::node(build(levels - 1, lefts + 1), build(levels - 1, lefts))
    }
    if k == 0 {
        return Err(ResidueError::Levels);
    }
    Ok(build(k, 0))
}

/// `d_1 = 1`, `d_k = d_{k−1} + 2^{d_{k−1}}`, while the terms stay below `budget_bits` bits.
pub fn degree_recurrence(k: u32, budget_bits: usize) -> Result<Vec<UBig>, ResidueError> {
    let mut out = vec![UBig::ONE];
    while out.len() < k as usize {
        let d = out.last().expect("seeded");
        let bits = usize::try_from(d).ok().filter(|&b| b < budget_bits).ok_or_else(|| ResidueError::Overflow {
            height: format!("(a {}-bit integer)", dashu_int::ops::BitTest::bit_len(d)),
            budget: budget_bits,
        })?;
        let next = d + (UBig::ONE << bits);
        out.push(next);
    }
    Ok(out)
}

impl fmt::Display for CombineTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombineTree::Leaf(p) => write!(f, "{p}"),
            CombineTree::Node(l, r) => write!(f, "({l}, {r})"),
        }
    }
}

impl FromStr for CombineTree {
    type Err = ResidueError;

    /// `tree := poly | "(" tree "," tree ")"`.
    fn from_str(s: &str) -> Result<Self, ResidueError> {
        fn parse(s: &str, pos: &mut usize) -> Result<CombineTree, ResidueError> {
            let b = s.as_bytes();
            while *pos < b.len() && b[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < b.len() && b[*pos] == b'(' {
                *pos += 1;
                let l = parse(s, pos)?;
                expect(s, pos, b',')?;
                let r = parse(s, pos)?;
                expect(s, pos, b')')?;
                return Ok(CombineTree::node(l, r));
            }
            let start = *pos;
            while *pos < b.len() && !matches!(b[*pos], b',' | b')' | b'(') {
                *pos += 1;
            }
            Ok(CombineTree::Leaf(s[start..*pos].parse()?))
        }
        fn expect(s: &str, pos: &mut usize, c: u8) -> Result<(), ResidueError> {
            let b = s.as_bytes();
            while *pos < b.len() && b[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < b.len() && b[*pos] == c {
                *pos += 1;
                Ok(())
            } else {
                Err(ResidueError::Parse(format!("expected {:?} at byte {} of {s:?}", c as char, *pos)))
            }
        }
        let mut pos = 0;
        let t = parse(s, &mut pos)?;
        if !s[pos..].trim().is_empty() {
            return Err(ResidueError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::DEFAULT_EXPONENT_BITS;
    use dashu_int::IBig;

    #[test]
    fn small_levels() {
        let b = DEFAULT_EXPONENT_BITS;
        assert_eq!(canonical_tree(1).unwrap().eval(b).unwrap(), SparsePoly::linear(1));
        assert_eq!(canonical_tree(2).unwrap().eval(b).unwrap(), SparsePoly::monomial(-2, 3u8));
        let t3 = canonical_tree(3).unwrap();
        assert_eq!(t3.leaves(), 4);
        assert_eq!(t3.eval(b).unwrap(), SparsePoly::monomial(4, 11u8));
    }

    #[test]
    fn recurrence() {
        let d = degree_recurrence(4, DEFAULT_EXPONENT_BITS).unwrap();
        assert_eq!(d, [1u32, 3, 11, 2059].map(UBig::from));
        assert!(degree_recurrence(6, DEFAULT_EXPONENT_BITS).is_err());
    }

    #[test]
    fn tree_text() {
        let t: CombineTree = "((x, -x), (-x, x))".parse().unwrap();
        assert_eq!(t.to_string(), "((x, -x), (-x, x))");
        assert_eq!(t.eval(DEFAULT_EXPONENT_BITS).unwrap().leading_coeff(), Some(&IBig::from(4)));
        assert!("(x, y)".parse::<CombineTree>().is_err());
        assert!("(x, x".parse::<CombineTree>().is_err());
    }
}
