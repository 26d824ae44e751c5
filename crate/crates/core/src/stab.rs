//! Complexified charges and phases of simple classes at points of the
//! covering space of the regular locus.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::charge::{central_charge_poly, format_q_list};
use crate::error::{Error, Result};
use crate::ktheory::{class_of_simple, weyl_act_k0, Block};
use crate::linalg::sign_of;
use crate::polyengine::parse_q;
use crate::rootsys::Weight;
use crate::rvsc::wall_order;
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComplexQ {
    pub re: Q,
    pub im: Q,
}

impl ComplexQ {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl fmt::Display for ComplexQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, -&self.im)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

/// Where a phase lies in `(0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseClass {
    /// Strictly upper half-plane.
    Between0And1,
    /// Negative real axis.
    One,
    /// Strictly lower half-plane.
    Between1And2,
    /// Positive real axis.
    Two,
}

impl fmt::Display for PhaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseClass::Between0And1 => "(0,1)",
            PhaseClass::One => "1",
            PhaseClass::Between1And2 => "(1,2)",
            PhaseClass::Two => "2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub class: PhaseClass,
    /// `im / re` when `re != 0`.
    pub tan: Option<Q>,
    /// Floating-point phase for display only.
    pub approx: f64,
}

pub fn phase(z: &ComplexQ) -> Result<Phase> {
    let class = match (sign_of(&z.im), sign_of(&z.re)) {
        (1, _) => PhaseClass::Between0And1,
        (-1, _) => PhaseClass::Between1And2,
        (_, -1) => PhaseClass::One,
        (_, 1) => PhaseClass::Two,
        _ => return Err(Error::ZeroCharge),
    };
    let tan = (!z.re.is_zero()).then(|| &z.im / &z.re);
    let (re, im) = (z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN));
    let mut approx = im.atan2(re) / std::f64::consts::PI;
    if approx <= 0.0 {
        approx += 2.0;
    }
    Ok(Phase { class, tan, approx })
}

/// One letter of a braid word: generator index and whether it is inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BraidLetter {
    pub generator: usize,
    pub inverse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveredPoint {
    pub braid_word: Vec<BraidLetter>,
    pub lambda: Weight,
    pub mu: Weight,
}

fn positive(m: &[Q]) -> bool {
    m.iter().all(Signed::is_positive)
}

fn nonnegative(m: &[Q]) -> bool {
    m.iter().all(|x| !x.is_negative())
}

/// `lambda` in the dominant alcove, or on its closure with `mu` inside.
pub fn in_fundamental_domain(block: &Block, lambda: &Weight, mu: &Weight) -> bool {
    let ml = block.rd.m_coordinates(lambda);
    positive(&ml) || (nonnegative(&ml) && positive(&block.rd.m_coordinates(mu)))
}

impl CoveredPoint {
    pub fn new(block: &Block, braid_word: Vec<BraidLetter>, lambda: Weight, mu: Weight) -> Result<Self> {
        if let Some(l) = braid_word.iter().find(|l| l.generator >= block.rank()) {
            return Err(Error::DimensionMismatch {
                expected: block.rank(),
                got: l.generator + 1,
            });
        }
        if !in_fundamental_domain(block, &lambda, &mu) {
            return Err(Error::AssertionFailure(format!(
                "({}, {}) is outside the fundamental domain",
                format_q_list(&lambda.omega),
                format_q_list(&mu.omega)
            )));
        }
        Ok(CoveredPoint { braid_word, lambda, mu })
    }

    /// Image of the braid word in the Weyl group.
    pub fn weyl_image(&self, block: &Block) -> usize {
        let g = &block.group;
        self.braid_word
            .iter()
            .fold(g.identity(), |acc, l| g.multiply(acc, g.simple(l.generator)))
    }

    pub fn word_string(&self) -> String {
        if self.braid_word.is_empty() {
            return "1".into();
        }
        self.braid_word
            .iter()
            .map(|l| {
                let c = (b'a' + l.generator as u8) as char;
                if l.inverse {
                    format!("{c}'")
                } else {
                    c.to_string()
                }
            })
            .collect()
    }
}

/// `i (Z(lambda) + i Z(mu))` of the transported class `Phi(b) L(w)` at the
/// projected point `y (lambda, mu)`, where `y` is the Weyl image of `b`.
pub fn complex_charge(block: &Block, point: &CoveredPoint, w: usize, d: usize, norm: Option<&Q>) -> Result<ComplexQ> {
    if block.gk_of_simple(w) != d {
        return Err(Error::StratumViolation {
            simple: block.name(w),
            gk: block.gk_of_simple(w),
            d,
        });
    }
    let g = &block.group;
    let y = point.weyl_image(block);
    let moved = weyl_act_k0(block, g.inverse(y), &class_of_simple(block, w));
    let mut z = central_charge_poly(block, &moved, d)?;
    if let Some(s) = norm {
        z = z.with_normalization(s);
    }
    let y_mat = &g.elem(y).matrix;
    let zl = z.eval(&y_mat.apply(&block.rd.m_coordinates(&point.lambda)));
    let zm = z.eval(&y_mat.apply(&block.rd.m_coordinates(&point.mu)));
    Ok(ComplexQ { re: -zm, im: zl })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEntry {
    pub simple: usize,
    pub value: ComplexQ,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub point: CoveredPoint,
    pub d: usize,
    pub entries: Vec<PhaseEntry>,
}

pub fn report(block: &Block, point: &CoveredPoint, d: usize, norm: Option<&Q>) -> Result<StabilityReport> {
    let entries = block
        .strata()
        .stratum(d)
        .into_iter()
        .map(|w| {
            let value = complex_charge(block, point, w, d, norm)?;
            let phase = phase(&value).map_err(|_| {
                Error::AssertionFailure(format!(
                    "charge of L({}) vanishes at word {}",
                    block.name(w),
                    point.word_string()
                ))
            })?;
            Ok(PhaseEntry {
                simple: w,
                value,
                phase,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport {
        point: point.clone(),
        d,
        entries,
    })
}

fn assert_report(block: &Block, r: &StabilityReport) -> Result<()> {
    let ml = block.rd.m_coordinates(&r.point.lambda);
    let fail = |w: usize, e: &PhaseEntry, expected: &str| {
        Err(Error::AssertionFailure(format!(
            "L({}) at word {} lambda {}: value {} has phase {}, expected {expected}",
            block.name(w),
            r.point.word_string(),
            format_q_list(&r.point.lambda.omega),
            e.value,
            e.phase.class
        )))
    };
    let walls: Vec<usize> = (0..block.rank()).filter(|&i| ml[i].is_zero()).collect();
    for e in &r.entries {
        if walls.is_empty() {
            if e.phase.class != PhaseClass::Between0And1 {
                return fail(e.simple, e, "(0,1)");
            }
            continue;
        }
        let mut order_one = false;
        for &a in &walls {
            order_one |= wall_order(block, e.simple, a, r.d)? >= 1;
        }
        let expected = if order_one {
            PhaseClass::One
        } else {
            PhaseClass::Between0And1
        };
        if e.phase.class != expected {
            return fail(e.simple, e, &expected.to_string());
        }
    }
    Ok(())
}

/// Reports for every point, asserting the interior and wall phase
/// statements and invariance under prepending each generator to the word.
pub fn scan(block: &Block, points: &[CoveredPoint], d: usize, norm: Option<&Q>) -> Result<Vec<StabilityReport>> {
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let r = report(block, p, d, norm)?;
        assert_report(block, &r)?;
        for generator in 0..block.rank() {
            for inverse in [false, true] {
                let mut q = p.clone();
                q.braid_word.insert(0, BraidLetter { generator, inverse });
                let other = report(block, &q, d, norm)?;
                if other.entries != r.entries {
                    return Err(Error::AssertionFailure(format!(
                        "report at word {} differs from word {}",
                        q.word_string(),
                        p.word_string()
                    )));
                }
            }
        }
        out.push(r);
    }
    Ok(out)
}

pub fn parse_braid_word(s: &str, rank: usize) -> std::result::Result<Vec<BraidLetter>, String> {
    if s == "1" {
        return Ok(Vec::new());
    }
    let mut out: Vec<BraidLetter> = Vec::new();
    for c in s.chars() {
        if c == '\'' {
            match out.last_mut() {
                Some(l) if !l.inverse => l.inverse = true,
                _ => return Err(format!("misplaced ' in `{s}`")),
            }
            continue;
        }
        let generator = (c as u32).wrapping_sub('a' as u32) as usize;
        if !c.is_ascii_lowercase() || generator >= rank {
            return Err(format!(
                "`{c}` is not a generator (use a..{})",
                (b'a' + rank as u8 - 1) as char
            ));
        }
        out.push(BraidLetter {
            generator,
            inverse: false,
        });
    }
    Ok(out)
}

/// Reads a scan script: per line a braid word (`1` for the empty word) and
/// `2r` rationals giving `lambda` then `mu` in fundamental-weight
/// coordinates. `#` starts a comment.
pub fn parse_scan_script(block: &Block, text: &str) -> Result<Vec<CoveredPoint>> {
    let r = block.rank();
    let mut points = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 1 + 2 * r {
            return Err(err(format!(
                "expected a word and {} rationals, found {} fields",
                2 * r,
                fields.len()
            )));
        }
        let word = parse_braid_word(fields[0], r).map_err(err)?;
        let nums: Vec<Q> = fields[1..]
            .iter()
            .map(|f| parse_q(f).ok_or_else(|| err(format!("`{f}` is not a rational"))))
            .collect::<Result<_>>()?;
        let lambda = block.rd.weight_from_omega(nums[..r].to_vec());
        let mu = block.rd.weight_from_omega(nums[r..].to_vec());
        let p = CoveredPoint::new(block, word, lambda, mu).map_err(|e| err(e.to_string()))?;
        points.push(p);
    }
    Ok(points)
}

/// The phase of the zero class is undefined; its value is zero.
pub fn zero_charge() -> ComplexQ {
    ComplexQ {
        re: Q::zero(),
        im: Q::zero(),
    }
}

/// `(lambda, mu)` with `lambda + rho = rho - sum of the given omegas`,
/// useful for constructing wall points.
pub fn wall_point(block: &Block, walls: &[usize], mu: Weight) -> Result<CoveredPoint> {
    let omega = (0..block.rank())
        .map(|i| if walls.contains(&i) { -Q::one() } else { Q::zero() })
        .collect();
    CoveredPoint::new(block, Vec::new(), block.rd.weight_from_omega(omega), mu)
}
