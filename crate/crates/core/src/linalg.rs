//! Exact sparse linear algebra over arbitrary-precision rationals.
//!
//! Everything downstream reduces to two primitives: span membership against a
//! growing set of sparse rows (quotient dimensions, relation closures) and
//! solving sparse affine systems with the free coordinates pinned to zero
//! (associator extraction). Columns are plain `usize` indices; callers keep
//! their own dense numbering of basis objects.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    assert!(den != 0, "zero denominator");
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Sparse vector with exact rational entries; absent keys are zero.
pub type SparseVec = BTreeMap<usize, Q>;

pub fn sv_scale(v: &SparseVec, c: &Q) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&k, a)| (k, a * c)).collect()
}

pub fn sv_add_scaled(target: &mut SparseVec, src: &SparseVec, c: &Q) {
    if c.is_zero() {
        return;
    }
    for (&k, a) in src {
        let entry = target.entry(k).or_insert_with(Q::zero);
        *entry += a * c;
        if entry.is_zero() {
            target.remove(&k);
        }
    }
}

/// A row-echelon basis of a subspace, grown one vector at a time.
///
/// Each stored row is normalized to have coefficient 1 in its pivot column,
/// which is the smallest column of its support; rows are indexed by pivot.
#[derive(Clone, Debug, Default)]
pub struct RowSpan {
    rows: BTreeMap<usize, SparseVec>,
}

impl RowSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after eliminating every pivot column of the basis.
    /// The residual is zero exactly when `v` lies in the span.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        while let Some((&col, _)) = v.first_key_value() {
            let coeff = v.remove(&col).expect("key just observed");
            if coeff.is_zero() {
                continue;
            }
            if let Some(row) = self.rows.get(&col) {
                // Row support beyond its pivot sits at larger columns, so the
                // increasing sweep terminates.
                for (&c2, a) in row {
                    if c2 == col {
                        continue;
                    }
                    let entry = v.entry(c2).or_insert_with(Q::zero);
                    *entry -= a * &coeff;
                    if entry.is_zero() {
                        v.remove(&c2);
                    }
                }
            } else {
                out.insert(col, coeff);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Adds `v` to the spanned subspace. Returns true when the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((&pivot, _)) = r.first_key_value() else {
            return false;
        };
        let lead = r[&pivot].clone();
        let row: SparseVec = r.iter().map(|(&k, a)| (k, a / &lead)).collect();
        self.rows.insert(pivot, row);
        true
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }
}

/// Solves the affine system given by `rows` (left side over `n` unknowns,
/// right side a rational). Returns the unique solution with every free
/// (non-pivot) unknown set to zero, or None when the system is inconsistent.
pub fn solve_affine(rows: Vec<(SparseVec, Q)>, n: usize) -> Option<Vec<Q>> {
    let mut pivot_rows: BTreeMap<usize, (SparseVec, Q)> = BTreeMap::new();
    for (lhs, rhs) in rows {
        let mut v = lhs;
        let mut b = rhs;
        let mut lead: Option<(usize, Q)> = None;
        let mut reduced = SparseVec::new();
        while let Some((&col, _)) = v.first_key_value() {
            let coeff = v.remove(&col).expect("key just observed");
            if coeff.is_zero() {
                continue;
            }
            if let Some((prow, pb)) = pivot_rows.get(&col) {
                for (&c2, a) in prow {
                    if c2 == col {
                        continue;
                    }
                    let entry = v.entry(c2).or_insert_with(Q::zero);
                    *entry -= a * &coeff;
                    if entry.is_zero() {
                        v.remove(&c2);
                    }
                }
                b -= pb * &coeff;
            } else if lead.is_none() {
                lead = Some((col, coeff));
            } else {
                reduced.insert(col, coeff);
            }
        }
        match lead {
            None => {
                if !b.is_zero() {
                    return None;
                }
            }
            Some((col, c)) => {
                let mut row: SparseVec = reduced.iter().map(|(&k, a)| (k, a / &c)).collect();
                row.insert(col, Q::one());
                pivot_rows.insert(col, (row, b / &c));
            }
        }
    }
    let mut x = alloc::vec![Q::zero(); n];
    for (&col, (row, b)) in pivot_rows.iter().rev() {
        let mut val = b.clone();
        for (&c2, a) in row {
            if c2 != col {
                val -= a * &x[c2];
            }
        }
        x[col] = val;
    }
    Some(x)
}

/// Exact absolute value, handy in tests.
pub fn q_abs(a: &Q) -> Q {
    a.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, n)| (k, q_int(n))).collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut span = RowSpan::new();
        assert!(span.insert(sv(&[(0, 1), (1, 2)])));
        assert!(span.insert(sv(&[(1, 1), (2, 1)])));
        assert!(!span.insert(sv(&[(0, 2), (1, 6), (2, 2)])));
        assert_eq!(span.rank(), 2);
        assert!(span.contains(&sv(&[(0, 1), (1, 3), (2, 1)])));
        assert!(!span.contains(&sv(&[(2, 1)])));
        assert!(span.contains(&SparseVec::new()));
    }

    #[test]
    fn reduce_eliminates_interior_pivots() {
        let mut span = RowSpan::new();
        span.insert(sv(&[(1, 1), (3, 1)]));
        let r = span.reduce(sv(&[(0, 1), (1, 2), (3, 5)]));
        assert_eq!(r, sv(&[(0, 1), (3, 3)]));
    }

    #[test]
    fn solve_with_free_variables_pinned() {
        // x0 + x1 = 3, x1 + x2 = 1; x2 free -> 0, so x1 = 1, x0 = 2.
        let rows = vec![(sv(&[(0, 1), (1, 1)]), q_int(3)), (sv(&[(1, 1), (2, 1)]), q_int(1))];
        let x = solve_affine(rows, 3).unwrap();
        assert_eq!(x, vec![q_int(2), q_int(1), q_int(0)]);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let rows = vec![
            (sv(&[(0, 1)]), q_int(1)),
            (sv(&[(0, 2)]), q_int(3)),
        ];
        assert!(solve_affine(rows, 1).is_none());
    }

    #[test]
    fn solve_rational_pivots() {
        // 2 x0 = 1 -> x0 = 1/2; x0 + 3 x1 = 2 -> x1 = 1/2.
        let rows = vec![
            (sv(&[(0, 2)]), q_int(1)),
            (sv(&[(0, 1), (1, 3)]), q_int(2)),
        ];
        let x = solve_affine(rows, 2).unwrap();
        assert_eq!(x, vec![q_ratio(1, 2), q_ratio(1, 2)]);
    }
}
