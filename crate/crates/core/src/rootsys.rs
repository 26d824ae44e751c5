//! Root data for the supported small-rank semisimple types.
//!
//! Conventions (Bourbaki numbering throughout):
//!
//! * `cartan[i][j] = <alpha_j, coroot_i>`, so `s_i(alpha_j) = alpha_j - cartan[i][j] alpha_i`.
//! * A [`Weight`] carries its coordinates in the fundamental-weight basis
//!   (`omega[i] = <lambda, coroot_i>`) and in the simple-root basis.
//! * A [`Coweight`] is stored by its values on the simple roots.
//! * The "m-coordinates" of a weight are `m_i = <lambda + rho, coroot_i>`;
//!   every charge polynomial in the crate lives in these variables.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::weylkl::WeylElt;
use crate::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::G => 'G',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LieType {
    pub family: Family,
    pub rank: usize,
}

impl LieType {
    /// The supported types, in the order reports list them.
    pub const SUPPORTED: [LieType; 9] = [
        LieType {
            family: Family::A,
            rank: 1,
        },
        LieType {
            family: Family::A,
            rank: 2,
        },
        LieType {
            family: Family::A,
            rank: 3,
        },
        LieType {
            family: Family::A,
            rank: 4,
        },
        LieType {
            family: Family::B,
            rank: 2,
        },
        LieType {
            family: Family::B,
            rank: 3,
        },
        LieType {
            family: Family::C,
            rank: 3,
        },
        LieType {
            family: Family::D,
            rank: 4,
        },
        LieType {
            family: Family::G,
            rank: 2,
        },
    ];

    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let t = LieType { family, rank };
        if Self::SUPPORTED.contains(&t) {
            Ok(t)
        } else {
            Err(Error::UnsupportedType {
                family: family.letter(),
                rank,
            })
        }
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for LieType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('G') => Family::G,
            _ => return Err(Error::BadTypeName(s.to_string())),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| Error::BadTypeName(s.to_string()))?;
        LieType::new(family, rank)
    }
}

/// A weight, stored in both the fundamental-weight and simple-root bases.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    pub omega: Vec<Q>,
    pub alpha: Vec<Q>,
}

impl Weight {
    pub fn rank(&self) -> usize {
        self.omega.len()
    }
}

/// A coweight, stored by its values `<alpha_i, x>` on the simple roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coweight {
    pub values: Vec<Q>,
}

impl Coweight {
    pub fn new(values: Vec<Q>) -> Self {
        Coweight { values }
    }
}

#[derive(Debug, Clone)]
pub struct RootDatum {
    pub lie_type: LieType,
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates, sorted by height and then
    /// by descending lexicographic order (so simple roots appear as 1..r).
    pub positive_roots: Vec<Vec<i64>>,
    /// `coroots[k]` is the coroot of `positive_roots[k]`, in simple-coroot coordinates.
    pub coroots: Vec<Vec<i64>>,
    pub rho: Weight,
    pub rho_check: Coweight,
    pub n_pos: usize,
    /// Squared lengths `(alpha_i, alpha_i)` of the simple roots.
    pub sq_lengths: Vec<i64>,
    inv_cartan: Vec<Vec<Q>>,
}

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Gram matrix `(alpha_i, alpha_j)` of the simple roots.
fn gram_matrix(t: LieType) -> Vec<Vec<i64>> {
    let r = t.rank;
    let mut g = vec![vec![0i64; r]; r];
    let chain = |g: &mut Vec<Vec<i64>>, upto: usize| {
        for i in 0..upto {
            g[i][i] = 2;
            if i + 1 < upto {
                g[i][i + 1] = -1;
                g[i + 1][i] = -1;
            }
        }
    };
    match t.family {
        Family::A => chain(&mut g, r),
        Family::B => {
            chain(&mut g, r);
            g[r - 1][r - 1] = 1;
        }
        Family::C => {
            chain(&mut g, r);
            g[r - 1][r - 1] = 4;
            g[r - 2][r - 1] = -2;
            g[r - 1][r - 2] = -2;
        }
        Family::D => {
            // alpha_{r-2} branches to alpha_{r-1} and alpha_r
            chain(&mut g, r - 1);
            g[r - 1][r - 1] = 2;
            g[r - 3][r - 1] = -1;
            g[r - 1][r - 3] = -1;
        }
        Family::G => {
            g[0][0] = 2;
            g[1][1] = 6;
            g[0][1] = -3;
            g[1][0] = -3;
        }
    }
    g
}

impl RootDatum {
    pub fn new(t: LieType) -> Result<Self> {
        let t = LieType::new(t.family, t.rank)?;
        let r = t.rank;
        let gram = gram_matrix(t);
        let cartan: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| 2 * gram[i][j] / gram[i][i]).collect())
            .collect();

        // Closure of the simple roots under simple reflections, positive part.
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for i in 0..r {
            let mut e = vec![0; r];
            e[i] = 1;
            seen.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(beta) = queue.pop_front() {
            for i in 0..r {
                let pairing: i64 = (0..r).map(|j| beta[j] * cartan[i][j]).sum();
                let mut img = beta.clone();
                img[i] -= pairing;
                if img.iter().all(|&c| c >= 0) && seen.insert(img.clone()) {
                    queue.push_back(img);
                }
            }
        }
        let mut positive_roots: Vec<Vec<i64>> = seen.into_iter().collect();
        positive_roots.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });

        let sq_lengths: Vec<i64> = (0..r).map(|i| gram[i][i]).collect();
        let coroots: Vec<Vec<i64>> = positive_roots
            .iter()
            .map(|beta| {
                let norm: i64 = (0..r)
                    .flat_map(|i| (0..r).map(move |j| (i, j)))
                    .map(|(i, j)| beta[i] * beta[j] * gram[i][j])
                    .sum();
                (0..r).map(|i| beta[i] * sq_lengths[i] / norm).collect()
            })
            .collect();

        let cartan_q: Vec<Vec<Q>> = cartan.iter().map(|row| row.iter().map(|&c| qi(c)).collect()).collect();
        let inv_cartan = linalg::invert(&cartan_q).expect("Cartan matrix is invertible");

        let n_pos = positive_roots.len();
        let two = qi(2);
        let rho_alpha: Vec<Q> = (0..r)
            .map(|i| positive_roots.iter().map(|b| qi(b[i])).sum::<Q>() / &two)
            .collect();
        let mut rd = RootDatum {
            lie_type: t,
            cartan,
            positive_roots,
            coroots,
            rho: Weight {
                omega: vec![],
                alpha: vec![],
            },
            rho_check: Coweight { values: vec![] },
            n_pos,
            sq_lengths,
            inv_cartan,
        };
        rd.rho = rd.weight_from_alpha(rho_alpha);
        let rho_check_coroot: Vec<Q> = (0..r)
            .map(|i| rd.coroots.iter().map(|c| qi(c[i])).sum::<Q>() / &two)
            .collect();
        rd.rho_check = rd.coweight_from_coroot_coords(&rho_check_coroot);
        Ok(rd)
    }

    pub fn rank(&self) -> usize {
        self.lie_type.rank
    }

    pub fn weight_from_omega(&self, omega: Vec<Q>) -> Weight {
        assert_eq!(omega.len(), self.rank());
        let alpha = self
            .inv_cartan
            .iter()
            .map(|row| row.iter().zip(&omega).map(|(a, b)| a * b).sum())
            .collect();
        Weight { omega, alpha }
    }

    pub fn weight_from_alpha(&self, alpha: Vec<Q>) -> Weight {
        assert_eq!(alpha.len(), self.rank());
        let r = self.rank();
        let omega = (0..r)
            .map(|i| (0..r).map(|j| qi(self.cartan[i][j]) * &alpha[j]).sum())
            .collect();
        Weight { omega, alpha }
    }

    pub fn weight_from_ints(&self, omega: &[i64]) -> Weight {
        self.weight_from_omega(omega.iter().map(|&x| qi(x)).collect())
    }

    pub fn zero_weight(&self) -> Weight {
        self.weight_from_omega(vec![Q::zero(); self.rank()])
    }

    /// Weight with the given m-coordinates, i.e. `lambda = m - rho` in the omega basis.
    pub fn weight_from_m(&self, m: &[Q]) -> Weight {
        self.weight_from_omega(m.iter().map(|x| x - Q::one()).collect())
    }

    /// Checks `alpha = C^{-1} omega` exactly.
    pub fn is_consistent(&self, w: &Weight) -> bool {
        w.rank() == self.rank() && self.weight_from_omega(w.omega.clone()).alpha == w.alpha
    }

    pub fn simple_root(&self, i: usize) -> Weight {
        let mut a = vec![Q::zero(); self.rank()];
        a[i] = Q::one();
        self.weight_from_alpha(a)
    }

    pub fn root_weight(&self, k: usize) -> Weight {
        self.weight_from_alpha(self.positive_roots[k].iter().map(|&c| qi(c)).collect())
    }

    pub fn coweight_from_coroot_coords(&self, c: &[Q]) -> Coweight {
        let r = self.rank();
        Coweight {
            values: (0..r)
                .map(|i| (0..r).map(|j| &c[j] * qi(self.cartan[j][i])).sum())
                .collect(),
        }
    }

    /// The coroot of `positive_roots[k]` as a coweight.
    pub fn coroot_coweight(&self, k: usize) -> Coweight {
        let c: Vec<Q> = self.coroots[k].iter().map(|&x| qi(x)).collect();
        self.coweight_from_coroot_coords(&c)
    }

    pub fn height(&self, k: usize) -> i64 {
        self.positive_roots[k].iter().sum()
    }

    pub fn heights(&self) -> Vec<i64> {
        (0..self.n_pos).map(|k| self.height(k)).collect()
    }

    /// Product of the heights of all positive roots, `prod <alpha, rho_check>`.
    pub fn height_product(&self) -> i64 {
        self.heights().iter().product()
    }

    pub fn pairing(&self, mu: &Weight, x: &Coweight) -> Result<Q> {
        pairing(mu, x)
    }

    /// `<lambda, beta_check>` for the `k`-th positive coroot.
    pub fn coroot_pairing(&self, lambda: &Weight, k: usize) -> Q {
        self.coroots[k].iter().zip(&lambda.omega).map(|(&c, x)| qi(c) * x).sum()
    }

    pub fn m_coordinates(&self, lambda: &Weight) -> Vec<Q> {
        m_coordinates(lambda)
    }

    /// Matrix of the simple reflection `s_i` acting on omega coordinates.
    pub fn simple_reflection(&self, i: usize) -> IntMatrix {
        let r = self.rank();
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|j| {
                (0..r)
                    .map(|k| {
                        let delta = i64::from(j == k);
                        if k == i {
                            delta - self.cartan[j][i]
                        } else {
                            delta
                        }
                    })
                    .collect()
            })
            .collect();
        IntMatrix::from_rows(&rows)
    }

    /// `w(lambda)` for the linear action.
    pub fn act(&self, w: &WeylElt, lambda: &Weight) -> Weight {
        self.weight_from_omega(w.matrix.apply(&lambda.omega))
    }

    /// `w . lambda = w(lambda + rho) - rho`.
    pub fn dot_action(&self, w: &WeylElt, lambda: &Weight) -> Weight {
        let shifted: Vec<Q> = lambda.omega.iter().map(|x| x + Q::one()).collect();
        let moved = w.matrix.apply(&shifted);
        self.weight_from_omega(moved.into_iter().map(|x| x - Q::one()).collect())
    }

    /// Indices of positive roots lying in the span of the simple roots in `subset`.
    pub fn levi_roots(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.n_pos)
            .filter(|&k| {
                self.positive_roots[k]
                    .iter()
                    .enumerate()
                    .all(|(i, &c)| c == 0 || subset.contains(&i))
            })
            .collect()
    }

    /// Human-readable name of a positive root, e.g. `a1+a2`.
    pub fn root_name(&self, k: usize) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.positive_roots[k].iter().enumerate() {
            match c {
                0 => {}
                1 => parts.push(format!("a{}", i + 1)),
                c => parts.push(format!("{}a{}", c, i + 1)),
            }
        }
        parts.join("+")
    }
}

pub fn build_root_datum(t: LieType) -> Result<RootDatum> {
    RootDatum::new(t)
}

pub fn pairing(mu: &Weight, x: &Coweight) -> Result<Q> {
    if mu.alpha.len() != x.values.len() {
        return Err(Error::DimensionMismatch {
            expected: mu.alpha.len(),
            got: x.values.len(),
        });
    }
    Ok(mu.alpha.iter().zip(&x.values).map(|(a, v)| a * v).sum())
}

pub fn m_coordinates(lambda: &Weight) -> Vec<Q> {
    lambda.omega.iter().map(|x| x + Q::one()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn rd(s: &str) -> RootDatum {
        RootDatum::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn a2_and_a1_basics() {
        let a2 = rd("A2");
        assert_eq!(a2.n_pos, 3);
        assert_eq!(a2.heights(), vec![1, 1, 2]);
        let a1 = rd("A1");
        assert_eq!(a1.n_pos, 1);
        assert_eq!(a1.cartan, vec![vec![2]]);
    }

    #[test]
    fn positive_root_counts() {
        for (name, n) in [
            ("A1", 1),
            ("A2", 3),
            ("A3", 6),
            ("A4", 10),
            ("B2", 4),
            ("B3", 9),
            ("C3", 9),
            ("D4", 12),
            ("G2", 6),
        ] {
            assert_eq!(rd(name).n_pos, n, "{name}");
        }
    }

    #[test]
    fn g2_root_count_matches_full_reflection_closure() {
        // oracle: close {a1, a2} under all simple reflections, keeping negatives too
        let g2 = rd("G2");
        let mut all: BTreeSet<Vec<i64>> = [vec![1, 0], vec![0, 1]].into();
        loop {
            let mut next = all.clone();
            for beta in &all {
                for i in 0..2 {
                    let p: i64 = (0..2).map(|j| beta[j] * g2.cartan[i][j]).sum();
                    let mut img = beta.clone();
                    img[i] -= p;
                    next.insert(img);
                }
            }
            if next.len() == all.len() {
                break;
            }
            all = next;
        }
        assert_eq!(all.len(), 12);
        assert_eq!(all.iter().filter(|b| b.iter().all(|&c| c >= 0)).count(), g2.n_pos);
    }

    #[test]
    fn cartan_shape_and_rho_invariants() {
        for t in LieType::SUPPORTED {
            let d = RootDatum::new(t).unwrap();
            let r = d.rank();
            for i in 0..r {
                assert_eq!(d.cartan[i][i], 2);
                for j in 0..r {
                    if i != j {
                        assert!(d.cartan[i][j] <= 0);
                    }
                }
                assert_eq!(d.rho.omega[i], q(1, 1), "{t}: <rho, coroot_{i}>");
                assert_eq!(d.rho_check.values[i], q(1, 1), "{t}: <alpha_{i}, rho_check>");
            }
            assert!(d.is_consistent(&d.rho));
            // sum of positive roots is 2 rho
            for i in 0..r {
                let s: i64 = d.positive_roots.iter().map(|b| b[i]).sum();
                assert_eq!(qi(s), &d.rho.alpha[i] * qi(2));
            }
            // coroots pair to 2 with their root
            for k in 0..d.n_pos {
                assert_eq!(d.coroot_pairing(&d.root_weight(k), k), q(2, 1), "{t} root {k}");
            }
        }
    }

    #[test]
    fn bourbaki_numbering() {
        // B2: alpha_2 short, so <alpha_1, coroot_2> = -2
        assert_eq!(rd("B2").cartan, vec![vec![2, -1], vec![-2, 2]]);
        assert_eq!(rd("C3").cartan[1][2], -2);
        assert_eq!(rd("G2").cartan, vec![vec![2, -3], vec![-1, 2]]);
        let d4 = rd("D4");
        assert_eq!(d4.cartan[1], vec![-1, 2, -1, -1]);
    }

    #[test]
    fn pairing_examples() {
        let a2 = rd("A2");
        assert_eq!(a2.pairing(&a2.rho, &a2.rho_check).unwrap(), q(2, 1));
        assert_eq!(a2.pairing(&a2.zero_weight(), &a2.rho_check).unwrap(), q(0, 1));
        let highest = a2.weight_from_alpha(vec![q(1, 1), q(1, 1)]);
        assert_eq!(a2.pairing(&highest, &a2.rho_check).unwrap(), q(2, 1));
        let a1 = rd("A1");
        assert!(matches!(
            pairing(&a1.rho, &a2.rho_check),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn m_coordinate_examples() {
        let a2 = rd("A2");
        assert_eq!(a2.m_coordinates(&a2.zero_weight()), vec![q(1, 1), q(1, 1)]);
        let minus_rho = a2.weight_from_ints(&[-1, -1]);
        assert_eq!(a2.m_coordinates(&minus_rho), vec![q(0, 1), q(0, 1)]);
        let omega1 = a2.weight_from_ints(&[1, 0]);
        assert_eq!(a2.m_coordinates(&omega1), vec![q(2, 1), q(1, 1)]);
    }

    #[test]
    fn unsupported_types_rejected() {
        assert!(matches!("E6".parse::<LieType>(), Err(Error::BadTypeName(_))));
        assert!(matches!("A5".parse::<LieType>(), Err(Error::UnsupportedType { .. })));
        assert!(matches!("G3".parse::<LieType>(), Err(Error::UnsupportedType { .. })));
        assert!(matches!("D3".parse::<LieType>(), Err(Error::UnsupportedType { .. })));
        assert_eq!("b3".parse::<LieType>().unwrap().to_string(), "B3");
    }
}
