//! Small dense matrices: integer matrices for Weyl group elements and exact
//! rational elimination for the handful of linear solves the crate needs.

use num_traits::{One, Signed, Zero};

use crate::Q;

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        IntMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        IntMatrix { n, data }
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        IntMatrix { n, data }
    }

    pub fn apply_int(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut acc = Q::zero();
                for (j, x) in v.iter().enumerate() {
                    let c = self.get(i, j);
                    if c != 0 {
                        acc += x * Q::from_integer(c.into());
                    }
                }
                acc
            })
            .collect()
    }
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `m x = b` exactly for square nonsingular `m`.
pub fn solve(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let inv = invert(m)?;
    Some(
        inv.iter()
            .map(|row| row.iter().zip(b).map(|(a, x)| a * x).sum())
            .collect(),
    )
}

/// Incremental row-echelon basis over the rationals. Rows are sparse maps
/// from a column key to a coefficient; `insert` reports whether the row was
/// independent of the rows seen so far.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis<K: Ord + Clone> {
    rows: Vec<(K, std::collections::BTreeMap<K, Q>)>,
}

impl<K: Ord + Clone> EchelonBasis<K> {
    pub fn new() -> Self {
        EchelonBasis { rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis, returning the remainder.
    pub fn reduce(&self, v: &std::collections::BTreeMap<K, Q>) -> std::collections::BTreeMap<K, Q> {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            if let Some(c) = v.get(pivot).cloned() {
                for (k, x) in row {
                    let e = v.entry(k.clone()).or_insert_with(Q::zero);
                    *e -= &c * x;
                    if e.is_zero() {
                        v.remove(k);
                    }
                }
            }
        }
        v
    }

    pub fn insert(&mut self, v: &std::collections::BTreeMap<K, Q>) -> bool {
        let r = self.reduce(v);
        let Some((pivot, lead)) = r.iter().find(|(_, x)| !x.is_zero()) else {
            return false;
        };
        let pivot = pivot.clone();
        let inv = lead.recip();
        let row: std::collections::BTreeMap<K, Q> = r.iter().map(|(k, x)| (k.clone(), x * &inv)).collect();
        // keep existing rows reduced with respect to the new pivot
        for (_, other) in self.rows.iter_mut() {
            if let Some(c) = other.get(&pivot).cloned() {
                for (k, x) in &row {
                    let e = other.entry(k.clone()).or_insert_with(Q::zero);
                    *e -= &c * x;
                    if e.is_zero() {
                        other.remove(k);
                    }
                }
            }
        }
        self.rows.push((pivot, row));
        true
    }

    pub fn contains(&self, v: &std::collections::BTreeMap<K, Q>) -> bool {
        self.reduce(v).values().all(|x| x.is_zero())
    }
}

pub(crate) fn sign_of(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
