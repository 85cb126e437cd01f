//! Generators for the welded knot families used as the test corpus.
//!
//! Most codes come from a small strip tracer: vertical strands oriented
//! upward, a word of classical and welded letters read bottom to top, and
//! either braid closure or plat closure. Signs fall out of the traced
//! directions, so the tracer is the single source of sign conventions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{validate, GaussCode, Pass, Sign, Strand};
use crate::moves::crossing_sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("unknown family {0:?} (expected B, Bridge, A, Torus2 or WK)")]
    UnknownFamily(String),
    #[error("diagram closes up into more than one component")]
    NotAKnot,
}

/// Which incoming strand is on top at a classical letter: the one entering
/// from the bottom left or from the bottom right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverFrom {
    Left,
    Right,
}

/// One row of the strip, acting on positions `left` and `left + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    Classical { left: usize, over: OverFrom },
    Welded { left: usize },
}

impl Letter {
    fn left(self) -> usize {
        match self {
            Letter::Classical { left, .. } | Letter::Welded { left } => left,
        }
    }
}

const R: Letter = Letter::Classical { left: 0, over: OverFrom::Right };
const L: Letter = Letter::Classical { left: 0, over: OverFrom::Left };
const W: Letter = Letter::Welded { left: 0 };

enum Closure<'a> {
    Braid,
    /// Cups join `(0,1), (2,3), ...` at the bottom; caps are given.
    Plat { caps: &'a [(usize, usize)] },
}

type Dir = (i64, i64);

fn trace_strip(strands: usize, word: &[Letter], closure: Closure<'_>) -> Result<GaussCode, FamilyError> {
    if word.iter().any(|l| l.left() + 1 >= strands) {
        return Err(FamilyError::InvalidParameter("letter outside the strip".into()));
    }
    let partner = |pairs: &[(usize, usize)], p: usize| {
        pairs.iter().find_map(|&(a, b)| if a == p { Some(b) } else if b == p { Some(a) } else { None })
    };
    let cups: Vec<(usize, usize)> = (0..strands / 2).map(|k| (2 * k, 2 * k + 1)).collect();

    let mut visits: Vec<(usize, Strand, Dir)> = Vec::new();
    let (mut pos, mut up) = (0usize, true);
    loop {
        let order: Vec<usize> =
            if up { (0..word.len()).collect() } else { (0..word.len()).rev().collect() };
        for j in order {
            let letter = word[j];
            let i = letter.left();
            if pos != i && pos != i + 1 {
                continue;
            }
            let from_left = pos == i;
            pos = if from_left { i + 1 } else { i };
            if let Letter::Classical { over, .. } = letter {
                // The SW-NE segment joins bottom-left and top-right.
                let on_sw_ne = from_left == up;
                let dir = match (from_left, up) {
                    (true, true) => (1, 1),
                    (false, true) => (-1, 1),
                    (true, false) => (1, -1),
                    (false, false) => (-1, -1),
                };
                let is_over = on_sw_ne == (over == OverFrom::Left);
                visits.push((j, if is_over { Strand::Over } else { Strand::Under }, dir));
            }
        }
        match closure {
            Closure::Braid => {}
            Closure::Plat { caps } => {
                let pairs = if up { caps } else { &cups[..] };
                pos = partner(pairs, pos)
                    .ok_or_else(|| FamilyError::InvalidParameter("unpaired plat end".into()))?;
                up = !up;
            }
        }
        if pos == 0 && up {
            break;
        }
        if visits.len() > 2 * word.len() {
            return Err(FamilyError::NotAKnot);
        }
    }

    let classical = word.iter().filter(|l| matches!(l, Letter::Classical { .. })).count();
    if visits.len() != 2 * classical {
        return Err(FamilyError::NotAKnot);
    }
    let sign_of = |j: usize| -> Sign {
        let over = visits.iter().find(|v| v.0 == j && v.1 == Strand::Over).expect("over visit").2;
        let under = visits.iter().find(|v| v.0 == j && v.1 == Strand::Under).expect("under visit").2;
        crossing_sign(under, over)
    };
    let passes: Vec<Pass> =
        visits.iter().map(|&(j, strand, _)| Pass::new(j as u32 + 1, strand, sign_of(j))).collect();
    validate(passes).map_err(|_| FamilyError::NotAKnot)
}

/// Closure of a braid-like word, every strand oriented upward.
pub fn braid_closure(strands: usize, word: &[Letter]) -> Result<GaussCode, FamilyError> {
    trace_strip(strands, word, Closure::Braid)
}

/// Plat closure: cups `(0,1), (2,3), ...` below and the given caps above.
pub fn plat_closure(strands: usize, word: &[Letter], caps: &[(usize, usize)]) -> Result<GaussCode, FamilyError> {
    trace_strip(strands, word, Closure::Plat { caps })
}

/// The `(2, q)` torus knot as the closure of `q` positive crossings.
pub fn torus2(q: u32) -> Result<GaussCode, FamilyError> {
    if q.is_multiple_of(2) {
        return Err(FamilyError::InvalidParameter(format!("Torus2 needs odd q, got {q}")));
    }
    let passes = (0..2 * q)
        .map(|i| {
            let strand = if i % 2 == 0 { Strand::Over } else { Strand::Under };
            Pass::new(i % q + 1, strand, Sign::Pos)
        })
        .collect();
    Ok(validate(passes).expect("torus pattern is well formed"))
}

/// The basic nontrivial welded knot with three classical crossings.
pub fn b1() -> GaussCode {
    braid_closure(2, &[W, L, W, R, R]).expect("B1 is a knot")
}

/// Chain of `n` copies of [`b1`]; even copies are traversed backwards.
pub fn b_family(n: u32) -> Result<GaussCode, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParameter("B needs n >= 1".into()));
    }
    let base = b1();
    let half = base.len() / 2;
    let (h1, h2) = base.passes().split_at(half);
    let copy = |k: u32, leg: &[Pass], reversed: bool| -> Vec<Pass> {
        let mut out: Vec<Pass> =
            leg.iter().map(|p| Pass::new(p.label + 3 * (k - 1), p.strand, p.sign)).collect();
        if reversed {
            out.reverse();
        }
        out
    };
    let mut passes = Vec::with_capacity(6 * n as usize);
    for k in 1..=n {
        passes.extend(if k % 2 == 1 { copy(k, h1, false) } else { copy(k, h2, true) });
    }
    for k in (1..=n).rev() {
        passes.extend(if k % 2 == 1 { copy(k, h2, false) } else { copy(k, h1, true) });
    }
    Ok(validate(passes).expect("chain is well formed"))
}

/// Two-bridge knot with a `2n`-crossing twist region and a 2-crossing region.
pub fn bridge(n: u32) -> Result<GaussCode, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParameter("Bridge needs n >= 1".into()));
    }
    let mid = Letter::Classical { left: 1, over: OverFrom::Right };
    let side = Letter::Classical { left: 0, over: OverFrom::Left };
    let mut word = vec![mid; 2 * n as usize];
    word.extend([side, side]);
    plat_closure(4, &word, &[(0, 3), (1, 2)])
}

/// Two-strand diagram with a welded clasp followed by `2n` positive crossings.
pub fn a_family(n: u32) -> Result<GaussCode, FamilyError> {
    if n == 0 {
        return Err(FamilyError::InvalidParameter("A needs n >= 1".into()));
    }
    let mut word = vec![W, L, W];
    word.extend(std::iter::repeat_n(R, 2 * n as usize));
    braid_closure(2, &word)
}

/// Chain of `n` blocks; `WK(0)` is the trivial diagram.
pub fn wk(n: u32) -> GaussCode {
    if n == 0 {
        return GaussCode::empty();
    }
    // Per block: Cb, Ca, P, Q, R, S.
    let label = |k: u32, slot: u32| 6 * (k - 1) + slot;
    let sign = |slot: u32| match slot {
        1 | 3 | 5 => Sign::Pos,
        _ => Sign::Neg,
    };
    let o = |k, s| Pass::over(label(k, s), sign(s));
    let u = |k, s| Pass::under(label(k, s), sign(s));
    let lp = |k| vec![o(k, 1), u(k, 2), o(k, 3), o(k, 4), o(k, 2), u(k, 1), o(k, 5), o(k, 6)];
    let cross = |k| vec![u(k, 6), u(k, 3)];
    // The inner return strand runs downward, under Q then R.
    let turn = |k| vec![u(k, 4), u(k, 5)];

    let mut path = lp(n);
    path.extend(cross(n));
    for k in (1..n).rev() {
        let mut next = path;
        next.extend(lp(k));
        next.extend(turn(k + 1));
        next.extend(cross(k));
        path = next;
    }
    path.extend(turn(1));
    validate(path).expect("chain is well formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    B,
    Bridge,
    A,
    Torus2,
    WK,
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "b" => Ok(Family::B),
            "bridge" => Ok(Family::Bridge),
            "a" => Ok(Family::A),
            "torus2" | "t" | "torus" => Ok(Family::Torus2),
            "wk" => Ok(Family::WK),
            _ => Err(FamilyError::UnknownFamily(s.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::B => "B",
            Family::Bridge => "Bridge",
            Family::A => "A",
            Family::Torus2 => "Torus2",
            Family::WK => "WK",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyId {
    pub family: Family,
    pub param: u32,
}

impl FamilyId {
    pub fn new(family: Family, param: u32) -> Self {
        FamilyId { family, param }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.param)
    }
}

/// `A` takes `n` and produces the `2n + 1` crossing diagram; `Torus2` takes
/// the (odd) crossing number directly.
pub fn generate(id: FamilyId) -> Result<GaussCode, FamilyError> {
    match id.family {
        Family::B => b_family(id.param),
        Family::Bridge => bridge(id.param),
        Family::A => a_family(id.param),
        Family::Torus2 => torus2(id.param),
        Family::WK => Ok(wk(id.param)),
    }
}

/// Every family for parameters `1..=max_param`, family by family. Torus knots
/// use `q = 2k + 1`.
pub fn corpus(max_param: u32) -> Vec<(FamilyId, GaussCode)> {
    let mut out = Vec::new();
    for family in [Family::B, Family::Bridge, Family::A, Family::Torus2, Family::WK] {
        for k in 1..=max_param {
            let param = if family == Family::Torus2 { 2 * k + 1 } else { k };
            let id = FamilyId::new(family, param);
            out.push((id, generate(id).expect("corpus parameters are valid")));
        }
    }
    out
}
