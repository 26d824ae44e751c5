//! Weyl group enumeration in ShortLex normal form, Bruhat order and
//! Kazhdan–Lusztig polynomials.
//!
//! Elements are identified by their matrix on omega coordinates; the
//! canonical word is the ShortLex-minimal reduced word. Indices into
//! [`WeylGroup::elems`] follow the (length, ShortLex) order, so index 0 is
//! the identity and the last index is the longest element.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::rootsys::{LieType, RootDatum};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElt {
    /// ShortLex-minimal reduced word, 0-based simple indices.
    pub word: Vec<u8>,
    pub length: usize,
    /// Action on omega coordinates: product of the simple reflections of `word`.
    pub matrix: IntMatrix,
}

impl WeylElt {
    /// `s1s2s1` style name (1-based), `e` for the identity.
    pub fn name(&self) -> String {
        word_name(&self.word)
    }
}

pub fn word_name(word: &[u8]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    let mut s = String::new();
    for &i in word {
        let _ = write!(s, "s{}", i + 1);
    }
    s
}

#[derive(Debug, Clone)]
pub struct WeylGroup {
    pub lie_type: LieType,
    pub rank: usize,
    pub elems: Vec<WeylElt>,
    lookup: HashMap<IntMatrix, usize>,
    mult: Vec<u32>,
    inverse: Vec<usize>,
    bruhat: Vec<Vec<bool>>,
}

impl WeylGroup {
    pub fn new(rd: &RootDatum) -> Self {
        let r = rd.rank();
        let gens: Vec<IntMatrix> = (0..r).map(|i| rd.simple_reflection(i)).collect();
        let identity = WeylElt {
            word: vec![],
            length: 0,
            matrix: IntMatrix::identity(r),
        };
        let mut lookup = HashMap::new();
        lookup.insert(identity.matrix.clone(), 0);
        let mut elems = vec![identity];
        // Level-by-level BFS. Each level is discovered in ShortLex order because
        // the parents are processed in ShortLex order and generators ascending.
        let mut level = vec![0usize];
        while !level.is_empty() {
            let mut next = Vec::new();
            for &p in &level {
                for (i, g) in gens.iter().enumerate() {
                    let m = elems[p].matrix.mul(g);
                    if lookup.contains_key(&m) {
                        continue;
                    }
                    let mut word = elems[p].word.clone();
                    word.push(i as u8);
                    let idx = elems.len();
                    lookup.insert(m.clone(), idx);
                    elems.push(WeylElt {
                        length: word.len(),
                        word,
                        matrix: m,
                    });
                    next.push(idx);
                }
            }
            level = next;
        }

        let n = elems.len();
        let mut mult = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let m = elems[a].matrix.mul(&elems[b].matrix);
                mult[a * n + b] = lookup[&m] as u32;
            }
        }
        let inverse = (0..n)
            .map(|a| (0..n).find(|&b| mult[a * n + b] == 0).expect("inverse exists"))
            .collect();

        let mut group = WeylGroup {
            lie_type: rd.lie_type,
            rank: r,
            elems,
            lookup,
            mult,
            inverse,
            bruhat: Vec::new(),
        };
        group.bruhat = group.compute_bruhat();
        group
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn longest(&self) -> usize {
        self.elems.len() - 1
    }

    pub fn elem(&self, i: usize) -> &WeylElt {
        &self.elems[i]
    }

    pub fn length(&self, i: usize) -> usize {
        self.elems[i].length
    }

    pub fn name(&self, i: usize) -> String {
        self.elems[i].name()
    }

    pub fn index_of_matrix(&self, m: &IntMatrix) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    /// Index of the `i`-th simple reflection.
    pub fn simple(&self, i: usize) -> usize {
        1 + i
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order() + b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Element spelled by an arbitrary (not necessarily reduced) word.
    pub fn from_word(&self, word: &[u8]) -> usize {
        word.iter()
            .fold(0, |acc, &i| self.multiply(acc, self.simple(i as usize)))
    }

    /// Parses `e`, `s1s2s1` or `121` (1-based indices).
    pub fn parse(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        if s == "e" {
            return Ok(0);
        }
        let digits: String = s.chars().filter(|c| *c != 's').collect();
        let mut word = Vec::new();
        for c in digits.chars() {
            let d = c
                .to_digit(10)
                .filter(|&d| d >= 1 && (d as usize) <= self.rank)
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("bad Weyl word `{s}`"),
                })?;
            word.push((d - 1) as u8);
        }
        if word.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("bad Weyl word `{s}`"),
            });
        }
        Ok(self.from_word(&word))
    }

    /// `l(w s_i) < l(w)`.
    pub fn is_right_descent(&self, w: usize, i: usize) -> bool {
        self.length(self.multiply(w, self.simple(i))) < self.length(w)
    }

    pub fn is_left_descent(&self, w: usize, i: usize) -> bool {
        self.length(self.multiply(self.simple(i), w)) < self.length(w)
    }

    pub fn sign(&self, w: usize) -> i64 {
        if self.length(w).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn bruhat_leq(&self, y: usize, w: usize) -> bool {
        self.bruhat[w][y]
    }

    /// Bruhat order via the lifting property: if `ws < w` then
    /// `y <= w` iff `min(y, ys) <= ws`.
    fn compute_bruhat(&self) -> Vec<Vec<bool>> {
        let n = self.order();
        let mut leq = vec![vec![false; n]; n];
        leq[0][0] = true;
        for w in 1..n {
            let s = (0..self.rank)
                .find(|&i| self.is_right_descent(w, i))
                .expect("non-identity element has a right descent");
            let v = self.multiply(w, self.simple(s));
            for y in 0..n {
                let ys = self.multiply(y, self.simple(s));
                let low = if self.length(ys) < self.length(y) { ys } else { y };
                leq[w][y] = leq[v][low];
            }
        }
        leq
    }

    /// Matrices of the coordinate action on m-coordinates, one per element.
    pub fn coordinate_action(&self) -> Vec<IntMatrix> {
        self.elems.iter().map(|e| e.matrix.clone()).collect()
    }

    /// Contragredient matrices: how each element acts on the partial
    /// derivatives dual to the m-coordinates.
    pub fn derivation_action(&self) -> Vec<IntMatrix> {
        self.elems.iter().map(|e| e.matrix.transpose()).collect()
    }

    /// Parabolic subgroup generated by the simple reflections in `subset`.
    pub fn parabolic_subgroup(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.order())
            .filter(|&w| self.elems[w].word.iter().all(|i| subset.contains(&(*i as usize))))
            .collect()
    }
}

pub fn enumerate_weyl(rd: &RootDatum) -> WeylGroup {
    WeylGroup::new(rd)
}

/// Integer polynomial in `q`, coefficients low to high degree, no trailing zeros.
pub type KLPoly = Vec<i64>;

fn trim(p: &mut KLPoly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn add_shifted(acc: &mut KLPoly, p: &[i64], shift: usize, scale: i64) {
    if p.is_empty() || scale == 0 {
        return;
    }
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, 0);
    }
    for (k, c) in p.iter().enumerate() {
        acc[k + shift] += scale * c;
    }
}

pub fn eval_at_one(p: &[i64]) -> i64 {
    p.iter().sum()
}

pub fn kl_poly_name(p: &[i64]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (k, &c) in p.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mono = match k {
            0 => format!("{c}"),
            1 if c == 1 => "q".into(),
            1 => format!("{c}q"),
            _ if c == 1 => format!("q^{k}"),
            _ => format!("{c}q^{k}"),
        };
        parts.push(mono);
    }
    parts.join(" + ")
}

/// Kazhdan–Lusztig polynomials `P_{y,w}` for all `y <= w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KLTable {
    pub lie_type: LieType,
    /// `entries[w][y]`, `None` when `y` is not below `w`.
    entries: Vec<Vec<Option<KLPoly>>>,
}

pub const KL_CACHE_VERSION: &str = "gkstab-kl-cache v1";

impl KLTable {
    /// Classical recursion with explicit mu-coefficients, peeling off the
    /// first right descent of `w`.
    pub fn compute(group: &WeylGroup) -> Self {
        let n = group.order();
        let mut entries: Vec<Vec<Option<KLPoly>>> = vec![vec![None; n]; n];
        entries[0][0] = Some(vec![1]);
        for w in 1..n {
            let s = (0..group.rank)
                .find(|&i| group.is_right_descent(w, i))
                .expect("right descent");
            let sg = group.simple(s);
            let v = group.multiply(w, sg);
            let lw = group.length(w);
            // z < v with zs < z and mu(z, v) != 0
            let mut mus: Vec<(usize, i64)> = Vec::new();
            for z in 0..n {
                if z == v || !group.bruhat_leq(z, v) || !group.is_right_descent(z, s) {
                    continue;
                }
                let m = mu_of(&entries, group, z, v);
                if m != 0 {
                    mus.push((z, m));
                }
            }
            for y in 0..n {
                if !group.bruhat_leq(y, w) {
                    continue;
                }
                let ys = group.multiply(y, sg);
                let c = usize::from(group.length(ys) < group.length(y));
                let mut p: KLPoly = Vec::new();
                if let Some(a) = &entries[v][ys] {
                    add_shifted(&mut p, a, 1 - c, 1);
                }
                if let Some(b) = &entries[v][y] {
                    add_shifted(&mut p, b, c, 1);
                }
                for &(z, m) in &mus {
                    if let Some(pz) = &entries[z][y] {
                        add_shifted(&mut p, pz, (lw - group.length(z)) / 2, -m);
                    }
                }
                trim(&mut p);
                entries[w][y] = Some(p);
            }
        }
        KLTable {
            lie_type: group.lie_type,
            entries,
        }
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, y: usize, w: usize) -> Option<&KLPoly> {
        self.entries.get(w).and_then(|row| row.get(y)).and_then(|p| p.as_ref())
    }

    /// Coefficient of `q^{(l(w)-l(y)-1)/2}` in `P_{y,w}`, zero for even length difference.
    pub fn mu(&self, group: &WeylGroup, y: usize, w: usize) -> i64 {
        mu_of(&self.entries, group, y, w)
    }

    /// Checks that this table was built for `group`: same type, same size,
    /// and exactly the Bruhat-comparable pairs present.
    pub fn is_complete_for(&self, group: &WeylGroup) -> bool {
        self.lie_type == group.lie_type
            && self.order() == group.order()
            && (0..group.order())
                .all(|w| (0..group.order()).all(|y| group.bruhat_leq(y, w) == self.entries[w][y].is_some()))
    }

    /// Serializes to the versioned text cache format.
    pub fn to_cache_string(&self, group: &WeylGroup) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {}",
            KL_CACHE_VERSION,
            self.lie_type.family.letter(),
            self.lie_type.rank
        );
        for w in 0..self.order() {
            for y in 0..self.order() {
                if let Some(p) = &self.entries[w][y] {
                    let coeffs: Vec<String> = p.iter().map(|c| c.to_string()).collect();
                    let _ = writeln!(
                        out,
                        "{} {} {}",
                        cache_word(&group.elem(y).word),
                        cache_word(&group.elem(w).word),
                        coeffs.join(",")
                    );
                }
            }
        }
        out
    }

    /// Parses the cache format, rejecting anything that does not describe a
    /// complete table for `group`.
    pub fn from_cache_str(group: &WeylGroup, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty cache".into(),
        })?;
        let expected = format!(
            "{} {} {}",
            KL_CACHE_VERSION,
            group.lie_type.family.letter(),
            group.lie_type.rank
        );
        if header != expected {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header `{header}` != `{expected}`"),
            });
        }
        let n = group.order();
        let mut entries: Vec<Vec<Option<KLPoly>>> = vec![vec![None; n]; n];
        for (k, line) in lines {
            let bad = |msg: &str| Error::Parse {
                line: k + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split(' ').collect();
            if fields.len() != 3 {
                return Err(bad("expected `y w coeffs`"));
            }
            let y = parse_cache_word(group, fields[0]).ok_or_else(|| bad("bad y word"))?;
            let w = parse_cache_word(group, fields[1]).ok_or_else(|| bad("bad w word"))?;
            let coeffs: std::result::Result<Vec<i64>, _> = fields[2].split(',').map(str::parse).collect();
            let coeffs = coeffs.map_err(|_| bad("bad coefficient list"))?;
            if entries[w][y].replace(coeffs).is_some() {
                return Err(bad("duplicate record"));
            }
        }
        let table = KLTable {
            lie_type: group.lie_type,
            entries,
        };
        if !table.is_complete_for(group) {
            return Err(Error::IncompleteCache(group.lie_type));
        }
        Ok(table)
    }
}

fn mu_of(entries: &[Vec<Option<KLPoly>>], group: &WeylGroup, y: usize, w: usize) -> i64 {
    let (ly, lw) = (group.length(y), group.length(w));
    if lw <= ly || (lw - ly) % 2 == 0 {
        return 0;
    }
    let k = (lw - ly - 1) / 2;
    entries[w][y].as_ref().and_then(|p| p.get(k).copied()).unwrap_or(0)
}

fn cache_word(word: &[u8]) -> String {
    if word.is_empty() {
        "e".into()
    } else {
        word.iter().map(|i| char::from(b'1' + i)).collect()
    }
}

fn parse_cache_word(group: &WeylGroup, s: &str) -> Option<usize> {
    if s == "e" {
        return Some(0);
    }
    let word: Option<Vec<u8>> = s
        .bytes()
        .map(|b| b.checked_sub(b'1').filter(|&i| (i as usize) < group.rank))
        .collect();
    let word = word?;
    let idx = group.from_word(&word);
    // records must use canonical words
    (group.elem(idx).word == word).then_some(idx)
}

pub fn kl_polynomial<'a>(group: &WeylGroup, table: &'a KLTable, y: usize, w: usize) -> Result<&'a KLPoly> {
    if !group.bruhat_leq(y, w) {
        return Err(Error::NotComparable {
            y: group.name(y),
            w: group.name(w),
        });
    }
    table.get(y, w).ok_or(Error::IncompleteCache(group.lie_type))
}

/// Row `w` holds the Verma-basis expansion of `[L(w.0)]`:
/// `a_y = (-1)^{l(y)-l(w)} P_{w0 y, w0 w}(1)` for `y >= w`, zero otherwise.
pub fn simple_to_verma_matrix(group: &WeylGroup, table: &KLTable) -> Result<Vec<Vec<i64>>> {
    if !table.is_complete_for(group) {
        return Err(Error::IncompleteCache(group.lie_type));
    }
    let n = group.order();
    let w0 = group.longest();
    let mut m = vec![vec![0i64; n]; n];
    for (w, row) in m.iter_mut().enumerate() {
        let w0w = group.multiply(w0, w);
        for (y, entry) in row.iter_mut().enumerate() {
            let w0y = group.multiply(w0, y);
            if let Some(p) = table.get(w0y, w0w) {
                let sign = if (group.length(y) + group.length(w)).is_multiple_of(2) {
                    1
                } else {
                    -1
                };
                *entry = sign * eval_at_one(p);
            }
        }
    }
    Ok(m)
}

/// Inverse of a matrix that is unitriangular with respect to the Bruhat
/// order on indices (row `w` supported on columns `y >= w`).
pub fn invert_unitriangular(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut inv = vec![vec![0i64; n]; n];
    // Indices are sorted by length, so columns y >= w only occur at y >= w index-wise.
    for w in (0..n).rev() {
        inv[w][w] = 1;
        for y in (w + 1)..n {
            let s: i64 = (w..y).map(|z| inv[w][z] * m[z][y]).sum();
            inv[w][y] = -s;
        }
    }
    inv
}
