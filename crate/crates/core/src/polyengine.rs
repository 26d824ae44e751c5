//! Exact multivariate polynomials over the rationals.
//!
//! Terms are kept in a map ordered by graded lexicographic order, which is
//! also the order used for rendering (highest term first). Zero
//! coefficients are never stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{EchelonBasis, IntMatrix};
use crate::Q;

/// Exponent vector, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `deg` in `nvars` variables.
pub fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == nvars {
            prefix.push(deg);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            rec(nvars, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if deg == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    rec(nvars, deg, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        MPoly {
            nvars,
            terms: [(Monomial(e), Q::one())].into(),
        }
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut p = Self::zero(m.0.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self, deg: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == deg)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &MPoly) -> Result<()> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(Error::VariableMismatch(self.nvars, other.nvars))
        }
    }

    pub fn checked_add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &MPoly, c: &Q) {
        assert_eq!(self.nvars, other.nvars, "variable mismatch");
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Q) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong dimension");
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Replaces variable `i` by the affine form `images[i]`; the result lives
    /// in the variables of the forms.
    pub fn substitute_linear(&self, images: &[LinearForm]) -> Result<MPoly> {
        if images.len() != self.nvars {
            return Err(Error::VariableMismatch(self.nvars, images.len()));
        }
        let new_vars = images.first().map_or(0, |f| f.coeffs.len());
        if let Some(bad) = images.iter().find(|f| f.coeffs.len() != new_vars) {
            return Err(Error::VariableMismatch(new_vars, bad.coeffs.len()));
        }
        let image_polys: Vec<MPoly> = images.iter().map(LinearForm::to_poly).collect();
        let mut powers: HashMap<(usize, u32), MPoly> = HashMap::new();
        let mut out = MPoly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(new_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((i, e)).or_insert_with(|| image_polys[i].pow(e));
                t = &t * p;
            }
            out.add_scaled(&t, &Q::one());
        }
        Ok(out)
    }

    /// Linear change of variables `x -> M x` (`x_i -> sum_j M[i][j] x_j`).
    pub fn substitute_matrix(&self, m: &IntMatrix) -> MPoly {
        let images: Vec<LinearForm> = (0..m.dim())
            .map(|i| LinearForm::new((0..m.dim()).map(|j| Q::from_integer(m.get(i, j).into())).collect()))
            .collect();
        self.substitute_linear(&images)
            .expect("square matrix matches variable count")
    }

    /// Smallest exponent of variable `i` over all terms; `None` for zero.
    pub fn min_exponent(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[i]).min()
    }

    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            n.0[i] -= 1;
            out.add_term(n, c * Q::from_integer(e.into()));
        }
        out
    }

    /// Largest `n` with `ell^n` dividing `self`; `None` for the zero polynomial.
    pub fn vanishing_order(&self, ell: &LinearForm) -> Option<u32> {
        vanishing_order(self, ell)
    }

    pub fn render(&self, names: &[&str]) -> String {
        render(self, names)
    }

    /// True when no coefficient is negative.
    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.checked_add(rhs).expect("variable mismatch")
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.checked_add(&-rhs).expect("variable mismatch")
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.checked_mul(rhs).expect("variable mismatch")
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Affine form `sum c_i x_i + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub coeffs: Vec<Q>,
    pub constant: Q,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Q>) -> Self {
        LinearForm {
            coeffs,
            constant: Q::zero(),
        }
    }

    pub fn affine(coeffs: Vec<Q>, constant: Q) -> Self {
        LinearForm { coeffs, constant }
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(nvars: usize, i: usize) -> Self {
        let mut c = vec![Q::zero(); nvars];
        c[i] = Q::one();
        LinearForm::new(c)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        LinearForm::new(coeffs.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero) && self.constant.is_zero()
    }

    pub fn to_poly(&self) -> MPoly {
        let n = self.coeffs.len();
        let mut p = MPoly::constant(n, self.constant.clone());
        for (i, c) in self.coeffs.iter().enumerate() {
            p.add_scaled(&MPoly::var(n, i), c);
        }
        p
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        self.coeffs.iter().zip(point).map(|(a, b)| a * b).sum::<Q>() + &self.constant
    }
}

pub fn vanishing_order(p: &MPoly, ell: &LinearForm) -> Option<u32> {
    assert!(!ell.is_zero(), "vanishing order along the zero form");
    if p.is_zero() {
        return None;
    }
    let Some(j) = ell.coeffs.iter().position(|c| !c.is_zero()) else {
        // nonzero constant form never vanishes
        return Some(0);
    };
    assert_eq!(ell.coeffs.len(), p.nvars(), "form and polynomial disagree on variables");
    // New coordinates: y_j = ell(x), y_i = x_i otherwise.
    let n = p.nvars();
    let cj = ell.coeffs[j].clone();
    let images: Vec<LinearForm> = (0..n)
        .map(|i| {
            if i == j {
                let coeffs = (0..n)
                    .map(|k| if k == j { cj.recip() } else { -&ell.coeffs[k] / &cj })
                    .collect();
                LinearForm::affine(coeffs, -&ell.constant / &cj)
            } else {
                LinearForm::coordinate(n, i)
            }
        })
        .collect();
    let moved = p.substitute_linear(&images).expect("matching variables");
    moved.min_exponent(j)
}

/// Applies `op`, read as a constant-coefficient differential operator in the
/// partial derivatives dual to the variables of `f`.
pub fn apply_diff_op(op: &MPoly, f: &MPoly) -> Result<MPoly> {
    if op.nvars() != f.nvars() {
        return Err(Error::VariableMismatch(op.nvars(), f.nvars()));
    }
    let mut out = MPoly::zero(f.nvars());
    for (a, c) in op.terms() {
        for (e, x) in f.terms() {
            if e.0.iter().zip(&a.0).any(|(ei, ai)| ei < ai) {
                continue;
            }
            let mut factor = BigInt::one();
            for (&ei, &ai) in e.0.iter().zip(&a.0) {
                for k in 0..ai {
                    factor *= BigInt::from(ei - k);
                }
            }
            let m = Monomial(e.0.iter().zip(&a.0).map(|(ei, ai)| ei - ai).collect());
            out.add_term(m, c * x * Q::from_integer(factor));
        }
    }
    Ok(out)
}

/// Spanning set (in fact a basis) of the invariants of positive degree up to
/// `max_deg`, obtained by averaging every monomial over the matrix group
/// `action` acting by `x -> M x`.
pub fn reynolds_invariants(action: &[IntMatrix], nvars: usize, max_deg: u32) -> Vec<MPoly> {
    let order = Q::from_integer(action.len().into());
    let images: Vec<Vec<MPoly>> = action
        .iter()
        .map(|m| {
            (0..nvars)
                .map(|i| LinearForm::new((0..nvars).map(|j| Q::from_integer(m.get(i, j).into())).collect()).to_poly())
                .collect()
        })
        .collect();
    let mut power_cache: Vec<HashMap<(usize, u32), MPoly>> = vec![HashMap::new(); action.len()];
    let mut out = Vec::new();
    for deg in 1..=max_deg {
        let mut basis: EchelonBasis<Monomial> = EchelonBasis::new();
        for mono in monomials_of_degree(nvars, deg) {
            let mut avg = MPoly::zero(nvars);
            for (g, cache) in power_cache.iter_mut().enumerate() {
                let mut t = MPoly::one(nvars);
                for (i, &e) in mono.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let p = cache.entry((i, e)).or_insert_with(|| images[g][i].pow(e));
                    t = &t * p;
                }
                avg.add_scaled(&t, &Q::one());
            }
            let avg = avg.scale(&order.recip());
            if avg.is_zero() {
                continue;
            }
            if basis.insert(&avg.terms) {
                out.push(avg);
            }
        }
    }
    out
}

fn fmt_coeff(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn default_names(nvars: usize, prefix: &str) -> Vec<String> {
    (1..=nvars).map(|i| format!("{prefix}{i}")).collect()
}

/// Canonical text: graded-lex descending, explicit rational coefficients,
/// e.g. `m1^2 + 1/2*m1*m2 - 3`.
pub fn render(p: &MPoly, names: &[&str]) -> String {
    assert_eq!(names.len(), p.nvars(), "one name per variable");
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(names[i].to_string()),
                e => factors.push(format!("{}^{}", names[i], e)),
            }
        }
        if factors.is_empty() {
            out.push_str(&fmt_coeff(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&fmt_coeff(&abs));
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars, "x");
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&render(self, &refs))
    }
}

fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        Some(Q::from_integer(s.parse().ok()?))
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    parse_rational(s)
}

/// Parses the canonical rendering (and reasonable variations of spacing and
/// term order) back into a polynomial over the named variables.
pub fn parse_poly(s: &str, names: &[&str]) -> Result<MPoly> {
    let err = |msg: String| Error::Parse { line: 0, msg };
    let nvars = names.len();
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty polynomial".into()));
    }
    // split into signed terms at top-level + and -
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (k, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && !(k > 0 && current.ends_with('^')) {
            if !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
            } else if k != 0 {
                return Err(err(format!("dangling sign in `{s}`")));
            }
            negative = ch == '-';
        } else {
            current.push(ch);
        }
    }
    if current.is_empty() {
        return Err(err(format!("trailing sign in `{s}`")));
    }
    terms.push((negative, current));

    let mut p = MPoly::zero(nvars);
    for (negative, term) in terms {
        let mut coeff = Q::one();
        let mut exps = vec![0u32; nvars];
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(err(format!("empty factor in `{term}`")));
            }
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => {
                    let e: u32 = e.parse().map_err(|_| err(format!("bad exponent `{factor}`")))?;
                    (b, e)
                }
                None => (factor, 1),
            };
            if let Some(i) = names.iter().position(|n| *n == base) {
                exps[i] += exp;
            } else if let Some(c) = parse_rational(base) {
                coeff *= num_traits::pow(c, exp as usize);
            } else if let Some(c) = factor.contains('/').then(|| parse_rational(factor)).flatten() {
                coeff *= c;
            } else {
                return Err(err(format!("unknown factor `{factor}`")));
            }
        }
        if negative {
            coeff = -coeff;
        }
        p.add_term(Monomial(exps), coeff);
    }
    Ok(p)
}
