//! Taylor components of character numerators, GK dimensions, the central
//! charge polynomial, and a Hilbert-series oracle for leading coefficients.
//!
//! A class `sum a_w [Delta(w.lambda)]` has character numerator
//! `sum a_w e^{w(lambda+rho)}`. Expanding at the origin, the first
//! nonvanishing homogeneous piece has degree `k = |roots+| - GK`. The
//! central charge in stratum `d` is
//!
//! ```text
//! Z = s * sum_w a_w <w(lambda+rho), rho_check>^k,   k = |roots+| - d,
//! ```
//!
//! written in the m-coordinates `m_i = <lambda+rho, coroot_i>`, with the
//! scale `s` chosen so that dominant values are leading coefficients of the
//! weighted Hilbert quasi-polynomial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ktheory::{
    change_basis, class_of_parabolic_verma, is_minimal_coset_rep, weyl_act_k0, Basis, Block, K0Class,
};
use crate::linalg;
use crate::polyengine::{monomials_of_degree, LinearForm, MPoly};
use crate::rootsys::{RootDatum, Weight};
use crate::weylkl::WeylGroup;
use crate::Q;

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Variable names `m1..mr` used when rendering charges.
pub fn m_names(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("m{i}")).collect()
}

/// Simple-root coordinates of `w(lambda+rho)` as linear forms in m, one matrix per element:
/// `rows[i][j]` is the coefficient of `m_j` in the i-th coordinate.
fn alpha_matrix(rd: &RootDatum, group: &WeylGroup, w: usize) -> Vec<Vec<Q>> {
    let r = rd.rank();
    let matrix = &group.elem(w).matrix;
    let columns: Vec<Vec<Q>> = (0..r)
        .map(|j| {
            let col: Vec<Q> = (0..r).map(|i| Q::from_integer(matrix.get(i, j).into())).collect();
            rd.weight_from_omega(col).alpha
        })
        .collect();
    (0..r)
        .map(|i| (0..r).map(|j| columns[j][i].clone()).collect())
        .collect()
}

/// `ell_w(m) = <w(lambda+rho), rho_check>` for every element.
pub(crate) fn ell_forms(rd: &RootDatum, group: &WeylGroup) -> Vec<MPoly> {
    let r = rd.rank();
    (0..group.order())
        .map(|w| {
            let a = alpha_matrix(rd, group, w);
            let coeffs = (0..r).map(|j| a.iter().map(|row| row[j].clone()).sum()).collect();
            LinearForm::new(coeffs).to_poly()
        })
        .collect()
}

/// `(1/k!) sum_w a_w <w(lambda+rho), x>^k` as a polynomial in the coweight
/// coordinates `x_i = <alpha_i, x>`.
pub fn taylor_component(block: &Block, c: &K0Class, lambda: &Weight, k: usize) -> MPoly {
    let rd = &block.rd;
    let r = rd.rank();
    let c = change_basis(block, c, Basis::Verma);
    let shifted = rd.weight_from_omega(lambda.omega.iter().map(|x| x + Q::one()).collect());
    let mut out = MPoly::zero(r);
    for (w, a) in c.terms() {
        let moved = rd.act(block.group.elem(w), &shifted);
        let form = LinearForm::new(moved.alpha).to_poly();
        out.add_scaled(&form.pow(k as u32), a);
    }
    out.scale(&Q::from_integer(factorial(k)).recip())
}

/// The same component with `lambda` symbolic: variables are `m1..mr`
/// followed by `x1..xr`.
pub fn taylor_component_symbolic(block: &Block, c: &K0Class, k: usize) -> MPoly {
    let rd = &block.rd;
    let r = rd.rank();
    let c = change_basis(block, c, Basis::Verma);
    let mut out = MPoly::zero(2 * r);
    for (w, a) in c.terms() {
        let matrix = alpha_matrix(rd, &block.group, w);
        let mut form = MPoly::zero(2 * r);
        for (i, row) in matrix.iter().enumerate() {
            let x = MPoly::var(2 * r, r + i);
            for (j, coeff) in row.iter().enumerate() {
                form.add_scaled(&(&MPoly::var(2 * r, j) * &x), coeff);
            }
        }
        out.add_scaled(&form.pow(k as u32), a);
    }
    out.scale(&Q::from_integer(factorial(k)).recip())
}

/// Whether the degree-`k` Taylor component at `lambda = 0` vanishes, tested
/// monomial by monomial without building polynomials.
fn taylor_vanishes_at_zero(block: &Block, c: &K0Class, k: usize) -> bool {
    let r = block.rank();
    monomials_of_degree(r, k as u32).iter().all(|e| {
        let mut acc = Q::zero();
        for (w, a) in c.terms() {
            let mut t = a.clone();
            for (x, &p) in block.rho_orbit[w].iter().zip(&e.0) {
                if p > 0 {
                    t *= num_traits::pow(x.clone(), p as usize);
                }
            }
            acc += t;
        }
        acc.is_zero()
    })
}

/// `|roots+| - k` for the least `k` with a nonzero Taylor component at `lambda = 0`.
pub fn gk_dimension(block: &Block, c: &K0Class) -> Result<usize> {
    if c.is_zero() {
        return Err(Error::ZeroClass);
    }
    let c = change_basis(block, c, Basis::Verma);
    let n = block.n_pos();
    (0..=n)
        .find(|&k| !taylor_vanishes_at_zero(block, &c, k))
        .map(|k| n - k)
        .ok_or_else(|| Error::AssertionFailure("character numerator vanishes to infinite order".into()))
}

/// The scale `s` of the stratum-`d` charge.
pub fn normalization(block: &Block, d: usize) -> Q {
    let n = block.n_pos();
    assert!(d <= n, "stratum beyond |roots+|");
    let k = n - d;
    let mut denom = factorial(k) * BigInt::from(block.rd.height_product());
    if d >= 1 {
        denom *= factorial(d - 1);
    }
    Q::new(BigInt::one(), denom)
}

/// A stratum-`d` central charge in the m-coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargePoly {
    pub poly: MPoly,
    pub stratum_d: usize,
    pub normalization: Q,
}

impl ChargePoly {
    pub fn eval(&self, m: &[Q]) -> Q {
        self.poly.eval(m)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Same charge with the scale replaced by `s`.
    pub fn with_normalization(&self, s: &Q) -> ChargePoly {
        ChargePoly {
            poly: self.poly.scale(&(s / &self.normalization)),
            stratum_d: self.stratum_d,
            normalization: s.clone(),
        }
    }

    pub fn render(&self) -> String {
        let names = m_names(self.poly.nvars());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        self.poly.render(&refs)
    }
}

fn stratum_check(block: &Block, c: &K0Class, d: usize) -> Result<()> {
    if d > block.n_pos() {
        return Err(Error::DimensionMismatch {
            expected: block.n_pos(),
            got: d,
        });
    }
    let simple = change_basis(block, c, Basis::Simple);
    if let Some(w) = simple.support().find(|&w| block.gk_of_simple(w) > d) {
        return Err(Error::StratumViolation {
            simple: block.name(w),
            gk: block.gk_of_simple(w),
            d,
        });
    }
    Ok(())
}

pub fn central_charge_poly(block: &Block, c: &K0Class, d: usize) -> Result<ChargePoly> {
    stratum_check(block, c, d)?;
    let k = block.n_pos() - d;
    let s = normalization(block, d);
    let c = change_basis(block, c, Basis::Verma);
    let powers = block.ell_powers(k);
    let mut poly = MPoly::zero(block.rank());
    for (w, a) in c.terms() {
        poly.add_scaled(&powers[w], a);
    }
    Ok(ChargePoly {
        poly: poly.scale(&s),
        stratum_d: d,
        normalization: s,
    })
}

/// Charge of `c` in its own stratum evaluated at `lambda`.
pub fn leading_coefficient(block: &Block, c: &K0Class, lambda: &Weight) -> Result<Q> {
    let m = block.rd.m_coordinates(lambda);
    if m.iter().any(Signed::is_negative) {
        return Err(Error::NotDominant(format_q_list(&m)));
    }
    let d = gk_dimension(block, c)?;
    Ok(central_charge_poly(block, c, d)?.eval(&m))
}

pub fn format_q_list(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// `Z(y^{-1}.lambda)[y M] = Z(lambda)[M]` for every `y`, as polynomial identities.
pub fn w_equivariance_check(block: &Block, c: &K0Class, d: usize) -> Result<bool> {
    let base = central_charge_poly(block, c, d)?;
    for y in 0..block.order() {
        let moved = central_charge_poly(block, &weyl_act_k0(block, y, c), d)?;
        let y_inv = &block.group.elem(block.group.inverse(y)).matrix;
        if moved.poly.substitute_matrix(y_inv) != base.poly {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quasi-polynomial `n -> branches[n mod period](n)`, valid from `onset` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub period: usize,
    /// Coefficients low to high degree, one polynomial per residue class.
    pub branches: Vec<Vec<Q>>,
    pub onset: usize,
}

impl QuasiPolynomial {
    pub fn eval(&self, n: usize) -> Q {
        let b = &self.branches[n % self.period];
        let x = Q::from_integer(n.into());
        b.iter().rev().fold(Q::zero(), |acc, c| acc * &x + c)
    }

    /// Degree shared by all branches; `None` when every branch is zero.
    pub fn degree(&self) -> Option<usize> {
        self.branches.first().and_then(|b| b.len().checked_sub(1))
    }

    pub fn leading_coefficient(&self) -> Q {
        self.branches
            .first()
            .and_then(|b| b.last().cloned())
            .unwrap_or_else(Q::zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSample {
    /// `dims[n] = dim(M_n / M_{n-1})` for the filtration weighted by height.
    pub dims: Vec<BigInt>,
    pub fitted: QuasiPolynomial,
    pub lc: Q,
}

fn trim_q(p: &mut Vec<Q>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Heights of the positive roots outside the Levi of `subset`.
fn heights_outside(block: &Block, subset: &[usize]) -> Vec<usize> {
    let levi = block.rd.levi_roots(subset);
    (0..block.n_pos())
        .filter(|k| !levi.contains(k))
        .map(|k| block.rd.height(k) as usize)
        .collect()
}

/// Smallest depth at which every residue class has enough samples past the
/// onset to fit and then check one extra point.
pub fn hilbert_min_depth(block: &Block, subset: &[usize]) -> usize {
    let heights = heights_outside(block, subset);
    if heights.is_empty() {
        return 1;
    }
    let period = heights.iter().fold(1usize, |acc, &h| acc.lcm(&h));
    2 * period * (heights.len() + 1)
}

/// Layer dimensions of the parabolic Verma `Delta_I(w.lambda)` from its
/// generating function, and the quasi-polynomial fitted to them.
pub fn hilbert_oracle(
    block: &Block,
    subset: &[usize],
    w: usize,
    lambda: &Weight,
    depth: usize,
) -> Result<HilbertSample> {
    let rd = &block.rd;
    let group = &block.group;
    if lambda.omega.iter().any(|x| !x.is_integer() || x.is_negative()) {
        return Err(Error::NotDominant(format_q_list(&lambda.omega)));
    }
    if !is_minimal_coset_rep(group, subset, w) {
        return Err(Error::InvalidCosetRepresentative(group.name(w)));
    }
    let levi = rd.levi_roots(subset);
    let shifted = rd.weight_from_omega(lambda.omega.iter().map(|x| x + Q::one()).collect());
    let moved = rd.act(group.elem(w), &shifted);
    let rho_shift = rd.weight_from_omega(vec![Q::one(); rd.rank()]);
    let mut dim_v = Q::one();
    for &k in &levi {
        dim_v *= rd.coroot_pairing(&moved, k) / rd.coroot_pairing(&rho_shift, k);
    }
    if !dim_v.is_integer() || dim_v.is_negative() {
        return Err(Error::AssertionFailure(format!(
            "Levi module dimension {dim_v} is not a natural number"
        )));
    }
    let dim_v = dim_v.to_integer();

    let outside = heights_outside(block, subset);
    let mut series = vec![BigInt::zero(); depth + 1];
    series[0] = BigInt::one();
    for &h in &outside {
        for n in h..=depth {
            let prev = series[n - h].clone();
            series[n] += prev;
        }
    }
    let dims: Vec<BigInt> = series.into_iter().map(|x| x * &dim_v).collect();

    let d = outside.len();
    if d == 0 {
        let fitted = QuasiPolynomial {
            period: 1,
            branches: vec![Vec::new()],
            onset: 1,
        };
        return Ok(HilbertSample {
            lc: Q::from_integer(dims[0].clone()),
            dims,
            fitted,
        });
    }
    let period = outside.iter().fold(1usize, |acc, &h| acc.lcm(&h));
    let degree = d - 1;
    let onset = depth / 2;
    let mut branches = Vec::with_capacity(period);
    for residue in 0..period {
        let first = onset + (residue + period - onset % period) % period;
        let points: Vec<usize> = (first..=depth).step_by(period).collect();
        if points.len() < degree + 2 {
            return Err(Error::FitFailure(format!(
                "depth {depth} leaves {} samples in residue class {residue}; need {}",
                points.len(),
                degree + 2
            )));
        }
        let system: Vec<Vec<Q>> = points[..=degree]
            .iter()
            .map(|&n| {
                (0..=degree)
                    .map(|e| num_traits::pow(Q::from_integer(n.into()), e))
                    .collect()
            })
            .collect();
        let rhs: Vec<Q> = points[..=degree]
            .iter()
            .map(|&n| Q::from_integer(dims[n].clone()))
            .collect();
        let mut coeffs =
            linalg::solve(&system, &rhs).ok_or_else(|| Error::FitFailure("singular interpolation system".into()))?;
        trim_q(&mut coeffs);
        branches.push(coeffs);
    }
    let fitted = QuasiPolynomial {
        period,
        branches,
        onset,
    };
    for n in onset..=depth {
        if fitted.eval(n) != Q::from_integer(dims[n].clone()) {
            return Err(Error::FitFailure(format!(
                "fitted quasi-polynomial misses sample n = {n}"
            )));
        }
    }
    let lc = fitted.leading_coefficient();
    for (residue, b) in fitted.branches.iter().enumerate() {
        if b.len() != degree + 1 || b.last() != Some(&lc) {
            return Err(Error::FitFailure(format!(
                "branch {residue} has degree {} or leading coefficient differing from {lc}",
                b.len() as isize - 1
            )));
        }
    }
    Ok(HilbertSample { dims, fitted, lc })
}

/// Hilbert-oracle leading coefficient next to the charge-side value for one
/// parabolic Verma.
pub fn oracle_pair(block: &Block, subset: &[usize], w: usize, lambda: &Weight, depth: usize) -> Result<(Q, Q)> {
    let sample = hilbert_oracle(block, subset, w, lambda, depth)?;
    let class = class_of_parabolic_verma(block, subset, w)?;
    Ok((sample.lc, leading_coefficient(block, &class, lambda)?))
}
