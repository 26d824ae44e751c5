//! Checks of the two axioms of a real variation of stability conditions for
//! the charge of each GK stratum: positivity on alcoves, and wall-crossing
//! shifts governed by vanishing orders along coroot hyperplanes.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charge::{central_charge_poly, format_q_list, w_equivariance_check, ChargePoly};
use crate::error::{Error, Result};
use crate::ktheory::{change_basis, class_of_simple, project_to_stratum, weyl_act_k0, Basis, Block, K0Class};
use crate::polyengine::{apply_diff_op, reynolds_invariants, LinearForm, MPoly};
use crate::rootsys::Weight;
use crate::Q;

/// The region `{lambda : <w^{-1}(lambda+rho), coroot_i> > 0 for all i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alcove {
    pub label: usize,
}

pub fn alcove_of(block: &Block, lambda: &Weight) -> Result<Alcove> {
    let rd = &block.rd;
    let m = rd.m_coordinates(lambda);
    for k in 0..rd.n_pos {
        if coroot_form(block, k).eval(&m).is_zero() {
            return Err(Error::OnWall {
                coroot: rd.root_name(k),
            });
        }
    }
    (0..block.order())
        .find(|&w| {
            let inv = &block.group.elem(block.group.inverse(w)).matrix;
            inv.apply(&m).iter().all(Signed::is_positive)
        })
        .map(|label| Alcove { label })
        .ok_or_else(|| Error::AssertionFailure(format!("no alcove contains m = {}", format_q_list(&m))))
}

/// `<lambda+rho, beta_check>` for the k-th positive root, in m-coordinates.
pub fn coroot_form(block: &Block, k: usize) -> LinearForm {
    LinearForm::from_ints(&block.rd.coroots[k])
}

/// An interior rational point of an alcove, as m-coordinates: `w(rho)`.
pub fn alcove_sample(block: &Block, a: Alcove) -> Vec<Q> {
    let ones = vec![Q::one(); block.rank()];
    block.group.elem(a.label).matrix.apply(&ones)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallCrossing {
    pub from: Alcove,
    pub to: Alcove,
    /// `<lambda+rho, beta_check>` for the positive root `beta = +-w(alpha)`.
    pub wall: LinearForm,
    /// Whether `to` lies on the same side of the wall as the dominant alcove.
    pub above: bool,
}

pub fn wall_crossing(block: &Block, from: Alcove, alpha: usize) -> WallCrossing {
    let g = &block.group;
    let to = Alcove {
        label: g.multiply(from.label, g.simple(alpha)),
    };
    // <lambda+rho, w(coroot_alpha)> = (w^{-1} m)_alpha
    let inv = &g.elem(g.inverse(from.label)).matrix;
    let mut coeffs: Vec<i64> = (0..block.rank()).map(|j| inv.get(alpha, j)).collect();
    if coeffs.iter().any(|&c| c < 0) {
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    let wall = LinearForm::from_ints(&coeffs);
    let above = wall.eval(&alcove_sample(block, to)).is_positive();
    WallCrossing { from, to, wall, above }
}

fn stratum_charge(block: &Block, w: usize, d: usize) -> Result<ChargePoly> {
    if block.gk_of_simple(w) != d {
        return Err(Error::StratumViolation {
            simple: block.name(w),
            gk: block.gk_of_simple(w),
            d,
        });
    }
    central_charge_poly(block, &class_of_simple(block, w), d)
}

/// Vanishing order of the charge of `L(w)` along the simple wall `m_alpha = 0`.
pub fn wall_order(block: &Block, w: usize, alpha: usize, d: usize) -> Result<u32> {
    let z = stratum_charge(block, w, d)?;
    let wall = LinearForm::coordinate(block.rank(), alpha);
    Ok(z.poly.vanishing_order(&wall).expect("simple charges are nonzero"))
}

/// Largest vanishing order of `p` over all positive-coroot walls.
pub fn max_coroot_order(block: &Block, p: &MPoly) -> Option<u32> {
    (0..block.n_pos())
        .map(|k| p.vanishing_order(&coroot_form(block, k)))
        .try_fold(0, |acc, o| o.map(|o| acc.max(o)))
}

/// Simples of stratum `d` whose charge vanishes on `m_alpha = 0` are exactly
/// those with `l(w s_alpha) = l(w) + 1`.
pub fn length_criterion_check(block: &Block, alpha: usize, d: usize) -> Result<bool> {
    let g = &block.group;
    for w in block.strata().stratum(d) {
        let vanishes = wall_order(block, w, alpha, d)? >= 1;
        let ascent = g.length(g.multiply(w, g.simple(alpha))) > g.length(w);
        if vanishes != ascent {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every simple of stratum `d`, and `combos` seeded random nonnegative
/// integer combinations of them, vanish to order at most 1 on every
/// positive-coroot wall.
pub fn no_double_zero_check(block: &Block, d: usize, combos: usize, seed: u64) -> Result<bool> {
    let members = block.strata().stratum(d);
    if members.is_empty() {
        return Ok(true);
    }
    let charges: Vec<MPoly> = members
        .iter()
        .map(|&w| stratum_charge(block, w, d).map(|z| z.poly))
        .collect::<Result<_>>()?;
    for z in &charges {
        if max_coroot_order(block, z).is_none_or(|o| o > 1) {
            return Ok(false);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..combos {
        let mut coeffs: Vec<i64> = (0..charges.len()).map(|_| rng.gen_range(0..=3)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            let k = rng.gen_range(0..coeffs.len());
            coeffs[k] = 1;
        }
        let mut sum = MPoly::zero(block.rank());
        for (z, &c) in charges.iter().zip(&coeffs) {
            sum.add_scaled(z, &Q::from_integer(c.into()));
        }
        if max_coroot_order(block, &sum).is_none_or(|o| o > 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Invariant constant-coefficient operators without constant term, of
/// degree up to `|roots+|`, acting in the coordinates dual to m.
pub fn invariant_operators(block: &Block) -> &[MPoly] {
    block
        .invariants
        .get_or_init(|| reynolds_invariants(&block.group.derivation_action(), block.rank(), block.n_pos() as u32))
}

/// `Z(m) = (1/|W|) sum_w Z(m + w u)`, checked symbolically in `(m, u)`.
pub fn mean_value_check(block: &Block, z: &MPoly) -> bool {
    let r = block.rank();
    let embedded = z
        .substitute_linear(&(0..r).map(|i| LinearForm::coordinate(2 * r, i)).collect::<Vec<_>>())
        .expect("rank variables");
    let mut avg = MPoly::zero(2 * r);
    for elem in (0..block.order()).map(|w| block.group.elem(w)) {
        let images: Vec<LinearForm> = (0..r)
            .map(|i| {
                let mut coeffs = vec![Q::zero(); 2 * r];
                coeffs[i] = Q::one();
                for j in 0..r {
                    coeffs[r + j] = Q::from_integer(elem.matrix.get(i, j).into());
                }
                LinearForm::new(coeffs)
            })
            .collect();
        avg.add_scaled(&z.substitute_linear(&images).expect("rank variables"), &Q::one());
    }
    avg.scale(&Q::from_integer(block.order().into()).recip()) == embedded
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicVerdict {
    pub annihilated: bool,
    pub mean_value: bool,
}

impl HarmonicVerdict {
    pub fn pass(&self) -> bool {
        self.annihilated && self.mean_value
    }
}

pub fn harmonicity(block: &Block, c: &K0Class, d: usize) -> Result<HarmonicVerdict> {
    let z = central_charge_poly(block, c, d)?;
    let deg = z.poly.degree().unwrap_or(0);
    let annihilated = invariant_operators(block)
        .iter()
        .filter(|op| op.degree().is_some_and(|k| k <= deg))
        .all(|op| apply_diff_op(op, &z.poly).expect("rank variables").is_zero());
    Ok(HarmonicVerdict {
        annihilated,
        mean_value: mean_value_check(block, &z.poly),
    })
}

pub fn harmonicity_check(block: &Block, c: &K0Class, d: usize) -> Result<bool> {
    harmonicity(block, c, d).map(|v| v.pass())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Positivity {
    /// Nonzero with all coefficients nonnegative: positive on the open orthant.
    CoeffCert,
    /// Strictly positive at every sampled point; evidence, not proof.
    Sampled { points: usize },
    /// A non-positive value at an interior point.
    Fail { witness: Vec<Q>, value: Q },
}

impl Positivity {
    pub fn tier(&self) -> &'static str {
        match self {
            Positivity::CoeffCert => "COEFF-CERT",
            Positivity::Sampled { .. } => "SAMPLED",
            Positivity::Fail { .. } => "FAIL",
        }
    }

    pub fn pass(&self) -> bool {
        !matches!(self, Positivity::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom1Verdict {
    pub simple: usize,
    pub charge: ChargePoly,
    pub positivity: Positivity,
}

/// Deterministic interior points of the dominant alcove: seeded rationals
/// followed by every lattice point with coordinates in `1..=3`.
pub fn sample_points(rank: usize, count: usize, seed: u64) -> Vec<Vec<Q>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<Q>> = (0..count)
        .map(|_| {
            (0..rank)
                .map(|_| Q::new(rng.gen_range(1i64..=1000).into(), rng.gen_range(1i64..=97).into()))
                .collect()
        })
        .collect();
    let mut lattice = vec![vec![]];
    for _ in 0..rank {
        lattice = lattice
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (1..=3).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    points.extend(
        lattice
            .into_iter()
            .map(|p| p.into_iter().map(|x| Q::from_integer(x.into())).collect()),
    );
    points
}

pub fn positivity(z: &MPoly, grid: usize, seed: u64) -> Positivity {
    if !z.is_zero() && z.all_coefficients_nonnegative() {
        return Positivity::CoeffCert;
    }
    let points = sample_points(z.nvars(), grid, seed);
    for p in &points {
        let v = z.eval(p);
        if !v.is_positive() {
            return Positivity::Fail {
                witness: p.clone(),
                value: v,
            };
        }
    }
    Positivity::Sampled { points: points.len() }
}

/// Positivity of every stratum-`d` simple charge on the dominant alcove.
pub fn axiom1_verify(block: &Block, d: usize, grid: usize, seed: u64) -> Result<Vec<Axiom1Verdict>> {
    block
        .strata()
        .stratum(d)
        .into_iter()
        .map(|w| {
            let charge = stratum_charge(block, w, d)?;
            let positivity = positivity(&charge.poly, grid, seed);
            Ok(Axiom1Verdict {
                simple: w,
                charge,
                positivity,
            })
        })
        .collect()
}

/// Wall-crossing data for one simple wall of one stratum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom2Table {
    pub alpha: usize,
    pub order_one: Vec<usize>,
    pub order_zero: Vec<usize>,
    pub higher: Vec<usize>,
    /// Order-1 simples `L` with `s_alpha [L] = -[L]`.
    pub shift_one: bool,
    /// Order-0 simples with `s_alpha [L] = [L]` modulo order-1 simples after projection.
    pub shift_zero: bool,
    pub length_criterion: bool,
}

impl Axiom2Table {
    pub fn pass(&self) -> bool {
        self.higher.is_empty() && self.shift_one && self.shift_zero && self.length_criterion
    }
}

pub fn axiom2_table(block: &Block, alpha: usize, d: usize) -> Result<Axiom2Table> {
    let g = &block.group;
    let s = g.simple(alpha);
    let mut table = Axiom2Table {
        alpha,
        order_one: Vec::new(),
        order_zero: Vec::new(),
        higher: Vec::new(),
        shift_one: true,
        shift_zero: true,
        length_criterion: length_criterion_check(block, alpha, d)?,
    };
    for w in block.strata().stratum(d) {
        match wall_order(block, w, alpha, d)? {
            0 => table.order_zero.push(w),
            1 => table.order_one.push(w),
            _ => table.higher.push(w),
        }
    }
    for &w in &table.order_one {
        let l = class_of_simple(block, w);
        if weyl_act_k0(block, s, &l) != l.neg() {
            table.shift_one = false;
        }
    }
    for &w in &table.order_zero {
        let l = class_of_simple(block, w);
        let moved = project_to_stratum(block, &weyl_act_k0(block, s, &l), d)?;
        let rest = moved.sub(&change_basis(block, &l, Basis::Simple));
        if rest.support().any(|v| !table.order_one.contains(&v)) {
            table.shift_zero = false;
        }
    }
    Ok(table)
}

pub fn axiom2_verify(block: &Block, alpha: usize, d: usize) -> Result<bool> {
    axiom2_table(block, alpha, d).map(|t| t.pass())
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub grid: usize,
    pub seed: u64,
    pub combos: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid: 1000,
            seed: 0,
            combos: 100,
        }
    }
}

/// Full verification record for one stratum.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub d: usize,
    pub normalization: Q,
    pub axiom1: Vec<Axiom1Verdict>,
    pub axiom2: Vec<Axiom2Table>,
    pub harmonic: Vec<(usize, HarmonicVerdict)>,
    pub equivariant: Vec<(usize, bool)>,
    pub no_double_zero: bool,
    pub max_wall_order: u32,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.axiom1.iter().all(|v| v.positivity.pass())
            && self.axiom2.iter().all(Axiom2Table::pass)
            && self.harmonic.iter().all(|(_, h)| h.pass())
            && self.equivariant.iter().all(|&(_, e)| e)
            && self.no_double_zero
            && self.max_wall_order <= 1
    }
}

pub fn verify_stratum(block: &Block, d: usize, opts: &VerifyOptions) -> Result<AxiomReport> {
    let members = block.strata().stratum(d);
    let axiom1 = axiom1_verify(block, d, opts.grid, opts.seed)?;
    let axiom2 = (0..block.rank())
        .map(|a| axiom2_table(block, a, d))
        .collect::<Result<Vec<_>>>()?;
    let mut harmonic = Vec::new();
    let mut equivariant = Vec::new();
    let mut max_wall_order = 0;
    for &w in &members {
        let c = class_of_simple(block, w);
        harmonic.push((w, harmonicity(block, &c, d)?));
        equivariant.push((w, w_equivariance_check(block, &c, d)?));
        let z = central_charge_poly(block, &c, d)?;
        max_wall_order = max_wall_order.max(max_coroot_order(block, &z.poly).unwrap_or(u32::MAX));
    }
    Ok(AxiomReport {
        d,
        normalization: crate::charge::normalization(block, d),
        axiom1,
        axiom2,
        harmonic,
        equivariant,
        no_double_zero: no_double_zero_check(block, d, opts.combos, opts.seed)?,
        max_wall_order,
    })
}
