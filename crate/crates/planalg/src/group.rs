//! Finite groups given by multiplication tables.

use crate::error::{Error, Result};

/// Multiplication table `table[g][h] = g * h`, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Group("empty multiplication table".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Group(format!("row {g} has length {}, want {n}", row.len())));
            }
            if row.iter().any(|&x| x >= n) {
                return Err(Error::Group(format!("row {g} has out-of-range entry")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::Group("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::Group(format!("element {g} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Group(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|g| (0..n).all(|h| self.table[g][h] == self.table[h][g]))
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

pub fn cyclic(n: usize) -> FiniteGroup {
    let table = (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect();
    FiniteGroup::new(table).expect("cyclic table is a group")
}

/// S3 as permutations of three points; element 0 is the identity.
pub fn symmetric3() -> FiniteGroup {
    let perms: [[usize; 3]; 6] =
        [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
    let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
        // (p q)(x) = p(q(x))
        [p[q[0]], p[q[1]], p[q[2]]]
    };
    let index_of = |r: &[usize; 3]| perms.iter().position(|p| p == r).unwrap();
    let table = perms
        .iter()
        .map(|p| perms.iter().map(|q| index_of(&compose(p, q))).collect())
        .collect();
    FiniteGroup::new(table).expect("S3 table is a group")
}

/// The permutation of points realized by S3 element `g` (matching
/// `symmetric3` numbering).
pub fn symmetric3_perm(g: usize) -> [usize; 3] {
    [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]][g]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups_validate() {
        for n in 1..=6 {
            let g = cyclic(n);
            assert_eq!(g.order(), n);
            assert_eq!(g.identity(), 0);
            assert!(g.is_abelian());
        }
    }

    #[test]
    fn s3_is_nonabelian_of_order_six() {
        let g = symmetric3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        for x in 0..6 {
            assert_eq!(g.mul(x, g.inv(x)), g.identity());
        }
    }

    #[test]
    fn invalid_tables_rejected() {
        // not associative / no identity
        let bad = vec![vec![1, 0], vec![0, 0]];
        assert!(FiniteGroup::new(bad).is_err());
        let bad2 = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::new(bad2).is_err());
    }
}
