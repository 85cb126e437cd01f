//! Welded moves and the twist move as rewrites of signed Gauss codes.
//!
//! Positions are indices into the cyclic pass word. A gap `g` is the spot just
//! after pass `g`; the empty code has the single gap `0`.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{GaussCode, Pass, Sign, Strand};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    /// Adds a kink with new label `n + 1` after pass `gap`.
    R1Insert { gap: usize, over_first: bool, sign: Sign },
    R1Delete { label: u32 },
    /// Adds a bigon with new labels `a = n + 1` (carrying `sign`) and
    /// `b = n + 2` (carrying `-sign`). The over passes `O_a O_b` go after
    /// pass `over_gap`, the under passes `U_a U_b` (or `U_b U_a` when
    /// `under_reversed`) after pass `under_gap`. When both gaps coincide,
    /// `under_first` decides which pair comes first.
    R2Insert {
        over_gap: usize,
        under_gap: usize,
        under_reversed: bool,
        sign: Sign,
        #[serde(default)]
        under_first: bool,
    },
    R2Delete { a: u32, b: u32 },
    /// Three disjoint adjacent pairs starting at the given positions.
    R3 { positions: [usize; 3] },
    /// Over-commutation: swaps the Over passes at `position` and `position + 1`.
    OC { position: usize },
    TwistFlip { label: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    R1Insert,
    R1Delete,
    R2Insert,
    R2Delete,
    R3,
    OC,
    TwistFlip,
}

impl MoveKind {
    pub const ALL: [MoveKind; 7] = [
        MoveKind::R1Insert,
        MoveKind::R1Delete,
        MoveKind::R2Insert,
        MoveKind::R2Delete,
        MoveKind::R3,
        MoveKind::OC,
        MoveKind::TwistFlip,
    ];

    /// Moves that never add crossings and never change the welded knot.
    pub const NON_INCREASING: [MoveKind; 4] =
        [MoveKind::R1Delete, MoveKind::R2Delete, MoveKind::OC, MoveKind::R3];

    pub const INSERTIONS: [MoveKind; 2] = [MoveKind::R1Insert, MoveKind::R2Insert];

    /// Every kind except the twist move.
    pub const WELDED: [MoveKind; 6] = [
        MoveKind::R1Insert,
        MoveKind::R1Delete,
        MoveKind::R2Insert,
        MoveKind::R2Delete,
        MoveKind::R3,
        MoveKind::OC,
    ];
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::R1Insert { .. } => MoveKind::R1Insert,
            Move::R1Delete { .. } => MoveKind::R1Delete,
            Move::R2Insert { .. } => MoveKind::R2Insert,
            Move::R2Delete { .. } => MoveKind::R2Delete,
            Move::R3 { .. } => MoveKind::R3,
            Move::OC { .. } => MoveKind::OC,
            Move::TwistFlip { .. } => MoveKind::TwistFlip,
        }
    }

    pub fn is_flip(&self) -> bool {
        matches!(self, Move::TwistFlip { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("NotApplicable: {0}")]
    NotApplicable(String),
}

fn not_applicable(m: &Move, why: &str) -> MoveError {
    MoveError::NotApplicable(format!("{m:?}: {why}"))
}

fn label_positions(code: &GaussCode, label: u32) -> Option<(usize, usize)> {
    if label == 0 || label as usize > code.n() {
        return None;
    }
    code.positions().get(label as usize - 1).copied()
}

fn cyclic_adjacent(i: usize, j: usize, m: usize) -> bool {
    m >= 2 && ((i + 1) % m == j || (j + 1) % m == i)
}

/// Applies a move, renormalizing labels after deletions.
pub fn apply(code: &GaussCode, m: &Move) -> Result<GaussCode, MoveError> {
    let passes = code.passes();
    let len = passes.len();
    let n = code.n() as u32;
    match *m {
        Move::TwistFlip { label } => {
            label_positions(code, label).ok_or_else(|| not_applicable(m, "no such label"))?;
            let out = passes
                .iter()
                .map(|p| if p.label == label { Pass { strand: p.strand.flipped(), ..*p } } else { *p })
                .collect();
            Ok(GaussCode::compacted(out))
        }
        Move::OC { position } => oc_swap(code, position),
        Move::R1Delete { label } => {
            let (o, u) =
                label_positions(code, label).ok_or_else(|| not_applicable(m, "no such label"))?;
            if !cyclic_adjacent(o, u, len) {
                return Err(not_applicable(m, "passes are not adjacent"));
            }
            Ok(without_labels(code, &[label]))
        }
        Move::R2Delete { a, b } => {
            let (oa, ua) = label_positions(code, a).ok_or_else(|| not_applicable(m, "no such label"))?;
            let (ob, ub) = label_positions(code, b).ok_or_else(|| not_applicable(m, "no such label"))?;
            if a == b || passes[oa].sign == passes[ob].sign {
                return Err(not_applicable(m, "crossings must have opposite signs"));
            }
            if !cyclic_adjacent(oa, ob, len) || !cyclic_adjacent(ua, ub, len) {
                return Err(not_applicable(m, "passes are not adjacent"));
            }
            Ok(without_labels(code, &[a, b]))
        }
        Move::R1Insert { gap, over_first, sign } => {
            check_gap(len, gap).map_err(|why| not_applicable(m, why))?;
            let label = n + 1;
            let pair = if over_first {
                [Pass::over(label, sign), Pass::under(label, sign)]
            } else {
                [Pass::under(label, sign), Pass::over(label, sign)]
            };
            Ok(GaussCode::compacted(insert_after(passes, &[(gap, &pair)])))
        }
        Move::R2Insert { over_gap, under_gap, under_reversed, sign, under_first } => {
            check_gap(len, over_gap).map_err(|why| not_applicable(m, why))?;
            check_gap(len, under_gap).map_err(|why| not_applicable(m, why))?;
            if under_first && over_gap != under_gap {
                return Err(not_applicable(m, "under_first needs equal gaps"));
            }
            let (a, b) = (n + 1, n + 2);
            let overs = [Pass::over(a, sign), Pass::over(b, sign.negated())];
            let unders = if under_reversed {
                [Pass::under(b, sign.negated()), Pass::under(a, sign)]
            } else {
                [Pass::under(a, sign), Pass::under(b, sign.negated())]
            };
            let out = if over_gap == under_gap {
                let mut both = Vec::with_capacity(4);
                if under_first {
                    both.extend_from_slice(&unders);
                    both.extend_from_slice(&overs);
                } else {
                    both.extend_from_slice(&overs);
                    both.extend_from_slice(&unders);
                }
                insert_after(passes, &[(over_gap, &both)])
            } else {
                insert_after(passes, &[(over_gap, &overs), (under_gap, &unders)])
            };
            Ok(GaussCode::compacted(out))
        }
        Move::R3 { positions } => {
            let site = r3_site(code, positions).ok_or_else(|| not_applicable(m, "not an R3 site"))?;
            let mut out = passes.to_vec();
            for seg in site {
                out.swap(seg, (seg + 1) % len);
            }
            Ok(GaussCode::compacted(out))
        }
    }
}

fn check_gap(len: usize, gap: usize) -> Result<(), &'static str> {
    if (len == 0 && gap == 0) || gap < len {
        Ok(())
    } else {
        Err("gap out of range")
    }
}

/// Inserts each block right after the pass at its gap index.
fn insert_after(passes: &[Pass], blocks: &[(usize, &[Pass])]) -> Vec<Pass> {
    let mut out = Vec::with_capacity(passes.len() + 4);
    if passes.is_empty() {
        for (_, block) in blocks {
            out.extend_from_slice(block);
        }
        return out;
    }
    for (i, p) in passes.iter().enumerate() {
        out.push(*p);
        for (gap, block) in blocks {
            if *gap == i {
                out.extend_from_slice(block);
            }
        }
    }
    out
}

/// Removes both passes of each listed label and compacts the rest.
pub fn without_labels(code: &GaussCode, labels: &[u32]) -> GaussCode {
    GaussCode::compacted(
        code.passes().iter().filter(|p| !labels.contains(&p.label)).copied().collect(),
    )
}

/// Swaps the two adjacent Over passes at cyclic positions `i` and `i + 1`.
pub fn oc_swap(code: &GaussCode, i: usize) -> Result<GaussCode, MoveError> {
    let m = Move::OC { position: i };
    let len = code.len();
    if len < 2 || i >= len {
        return Err(not_applicable(&m, "position out of range"));
    }
    let j = (i + 1) % len;
    let passes = code.passes();
    if passes[i].strand != Strand::Over || passes[j].strand != Strand::Over {
        return Err(not_applicable(&m, "both passes must be Over"));
    }
    let mut out = passes.to_vec();
    out.swap(i, j);
    Ok(GaussCode::compacted(out))
}

/// Local picture of a Reidemeister III triangle, up to the planar move.
/// The strands are top (over at both crossings), middle and bottom. For each
/// strand we record whether it meets its crossing with the higher-listed
/// partner first, plus the three crossing signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct R3Pattern {
    top_meets_middle_first: bool,
    middle_meets_top_first: bool,
    bottom_meets_top_first: bool,
    sign_tm: Sign,
    sign_tb: Sign,
    sign_mb: Sign,
}

type Vec2 = (i64, i64);

fn cross(a: Vec2, b: Vec2) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// Sign of a crossing from the directions of its under and over strands:
/// positive when the under strand runs SW to NE beneath an over strand
/// running SE to NW.
pub fn crossing_sign(under_dir: Vec2, over_dir: Vec2) -> Sign {
    Sign::from_orientation(cross(under_dir, over_dir)).expect("strands are transverse")
}

/// Every R3 configuration, enumerated from three lines in the plane: a
/// horizontal line at height `h` and the two diagonals through the origin.
/// Moving `h` from `1` to `-1` is the move itself.
fn r3_patterns() -> &'static HashSet<R3Pattern> {
    static PATTERNS: OnceLock<HashSet<R3Pattern>> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        let mut out = HashSet::new();
        for h in [1i64, -1] {
            let base: [(Vec2, Vec2); 3] = [((0, h), (1, 0)), ((0, 0), (1, 1)), ((0, 0), (1, -1))];
            // Intersection points indexed by unordered line pair.
            let meet = |i: usize, j: usize| -> Vec2 {
                match (i.min(j), i.max(j)) {
                    (0, 1) => (h, h),
                    (0, 2) => (-h, h),
                    _ => (0, 0),
                }
            };
            for orient in 0..8 {
                let lines: Vec<(Vec2, Vec2)> = base
                    .iter()
                    .enumerate()
                    .map(|(k, &(pt, d))| {
                        let s = if orient >> k & 1 == 1 { -1 } else { 1 };
                        (pt, (d.0 * s, d.1 * s))
                    })
                    .collect();
                let param = |line: usize, x: Vec2| {
                    let (pt, d) = lines[line];
                    (x.0 - pt.0) * d.0 + (x.1 - pt.1) * d.1
                };
                for perm in PERMUTATIONS {
                    let [t, mid, b] = perm;
                    let sign = |over: usize, under: usize| crossing_sign(lines[under].1, lines[over].1);
                    out.insert(R3Pattern {
                        top_meets_middle_first: param(t, meet(t, mid)) < param(t, meet(t, b)),
                        middle_meets_top_first: param(mid, meet(mid, t)) < param(mid, meet(mid, b)),
                        bottom_meets_top_first: param(b, meet(b, t)) < param(b, meet(b, mid)),
                        sign_tm: sign(t, mid),
                        sign_tb: sign(t, b),
                        sign_mb: sign(mid, b),
                    });
                }
            }
        }
        out
    })
}

const PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Validates an R3 site and returns its segment start positions.
fn r3_site(code: &GaussCode, positions: [usize; 3]) -> Option<[usize; 3]> {
    let len = code.len();
    if len < 6 || positions.iter().any(|&p| p >= len) {
        return None;
    }
    let mut cells: Vec<usize> = positions.iter().flat_map(|&p| [p, (p + 1) % len]).collect();
    cells.sort_unstable();
    cells.dedup();
    if cells.len() != 6 {
        return None;
    }
    let passes = code.passes();
    let seg = |p: usize| (passes[p], passes[(p + 1) % len]);
    let mut top = None;
    let mut middle = None;
    let mut bottom = None;
    for &p in &positions {
        let (x, y) = seg(p);
        if x.label == y.label {
            return None;
        }
        match (x.strand, y.strand) {
            (Strand::Over, Strand::Over) => top = Some(p),
            (Strand::Under, Strand::Under) => bottom = Some(p),
            _ => middle = Some(p),
        }
    }
    let (top, middle, bottom) = (top?, middle?, bottom?);
    let (t0, t1) = seg(top);
    let (m0, m1) = seg(middle);
    let (b0, b1) = seg(bottom);
    let (m_over, m_under) = if m0.strand == Strand::Over { (m0, m1) } else { (m1, m0) };
    let tm = m_under.label;
    let mb = m_over.label;
    let tb = if t0.label == tm { t1.label } else { t0.label };
    let top_labels = [t0.label, t1.label];
    let bottom_labels = [b0.label, b1.label];
    if !top_labels.contains(&tm)
        || !top_labels.contains(&tb)
        || tm == tb
        || !bottom_labels.contains(&tb)
        || !bottom_labels.contains(&mb)
        || tb == mb
        || tm == mb
    {
        return None;
    }
    let pattern = R3Pattern {
        top_meets_middle_first: t0.label == tm,
        middle_meets_top_first: m0.label == tm,
        bottom_meets_top_first: b0.label == tb,
        sign_tm: m_under.sign,
        sign_tb: if t0.label == tb { t0.sign } else { t1.sign },
        sign_mb: m_over.sign,
    };
    r3_patterns().contains(&pattern).then_some(positions)
}

/// All applicable moves of the given kinds, in kind order then position
/// order. Insertions are enumerated without a crossing limit.
pub fn enumerate_moves(code: &GaussCode, kinds: &[MoveKind]) -> Vec<Move> {
    enumerate_moves_within(code, kinds, usize::MAX)
}

/// Like [`enumerate_moves`], but insertions are only listed when the result
/// has at most `max_crossings` crossings.
pub fn enumerate_moves_within(code: &GaussCode, kinds: &[MoveKind], max_crossings: usize) -> Vec<Move> {
    let mut out = Vec::new();
    for &kind in kinds {
        match kind {
            MoveKind::TwistFlip => out.extend(code.labels().map(|label| Move::TwistFlip { label })),
            MoveKind::OC => out.extend(oc_sites(code).map(|position| Move::OC { position })),
            MoveKind::R1Delete => out.extend(r1_delete_sites(code)),
            MoveKind::R2Delete => out.extend(r2_delete_sites(code)),
            MoveKind::R3 => out.extend(r3_sites(code)),
            MoveKind::R1Insert => {
                if code.n() < max_crossings {
                    out.extend(r1_insert_sites(code));
                }
            }
            MoveKind::R2Insert => {
                if code.n() + 1 < max_crossings {
                    out.extend(r2_insert_sites(code));
                }
            }
        }
    }
    out
}

fn oc_sites(code: &GaussCode) -> impl Iterator<Item = usize> + '_ {
    let len = code.len();
    let passes = code.passes();
    (0..len).filter(move |&i| {
        len >= 2 && passes[i].strand == Strand::Over && passes[(i + 1) % len].strand == Strand::Over
    })
}

/// Deletable kinks, ordered by the position of their first pass.
pub(crate) fn r1_delete_sites(code: &GaussCode) -> Vec<Move> {
    let len = code.len();
    let passes = code.passes();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for i in 0..len {
        let label = passes[i].label;
        if len >= 2 && passes[(i + 1) % len].label == label && seen.insert(label) {
            out.push(Move::R1Delete { label });
        }
    }
    out
}

/// Deletable bigons, ordered by the position of their over pair.
pub(crate) fn r2_delete_sites(code: &GaussCode) -> Vec<Move> {
    let len = code.len();
    if len < 4 {
        return Vec::new();
    }
    let passes = code.passes();
    let pos = code.positions();
    let mut out = Vec::new();
    for i in oc_sites(code) {
        let (a, b) = (passes[i].label, passes[(i + 1) % len].label);
        let (ua, ub) = (pos[a as usize - 1].1, pos[b as usize - 1].1);
        if passes[i].sign != passes[(i + 1) % len].sign && cyclic_adjacent(ua, ub, len) {
            out.push(Move::R2Delete { a, b });
        }
    }
    out
}

fn r3_sites(code: &GaussCode) -> Vec<Move> {
    let len = code.len();
    if len < 6 {
        return Vec::new();
    }
    let pos = code.positions();
    let mut found = HashSet::new();
    let mut out = Vec::new();
    for top in oc_sites(code) {
        let passes = code.passes();
        let (x, y) = (passes[top].label, passes[(top + 1) % len].label);
        let (ux, uy) = (pos[x as usize - 1].1, pos[y as usize - 1].1);
        for sx in [(ux + len - 1) % len, ux] {
            for sy in [(uy + len - 1) % len, uy] {
                let mut site = [top, sx, sy];
                site.sort_unstable();
                if found.contains(&site) {
                    continue;
                }
                if r3_site(code, site).is_some() {
                    found.insert(site);
                    out.push(Move::R3 { positions: site });
                }
            }
        }
    }
    out
}

fn r1_insert_sites(code: &GaussCode) -> Vec<Move> {
    let gaps = code.len().max(1);
    let mut out = Vec::with_capacity(4 * gaps);
    for gap in 0..gaps {
        for over_first in [true, false] {
            for sign in [Sign::Pos, Sign::Neg] {
                out.push(Move::R1Insert { gap, over_first, sign });
            }
        }
    }
    out
}

fn r2_insert_sites(code: &GaussCode) -> Vec<Move> {
    let gaps = code.len().max(1);
    let mut out = Vec::new();
    for over_gap in 0..gaps {
        for under_gap in 0..gaps {
            for under_reversed in [false, true] {
                for sign in [Sign::Pos, Sign::Neg] {
                    let orders: &[bool] = if over_gap == under_gap { &[false, true] } else { &[false] };
                    for &under_first in orders {
                        out.push(Move::R2Insert { over_gap, under_gap, under_reversed, sign, under_first });
                    }
                }
            }
        }
    }
    out
}

/// A replayable sequence of moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveTrace {
    pub start: GaussCode,
    pub steps: Vec<Move>,
    pub end: GaussCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("ReplayMismatch at step {step}: {reason}")]
    Mismatch { step: usize, reason: String },
}

impl MoveTrace {
    pub fn empty(code: GaussCode) -> Self {
        MoveTrace { start: code.clone(), steps: Vec::new(), end: code }
    }

    /// Builds a trace by applying `steps` to `start`.
    pub fn from_steps(start: GaussCode, steps: Vec<Move>) -> Result<Self, ReplayError> {
        let end = replay_steps(&start, &steps)?;
        Ok(MoveTrace { start, steps, end })
    }

    /// Appends moves applied to the current end.
    pub fn extend(&mut self, steps: &[Move]) -> Result<(), ReplayError> {
        let offset = self.steps.len();
        let end = replay_steps(&self.end, steps).map_err(|e| match e {
            ReplayError::Mismatch { step, reason } => ReplayError::Mismatch { step: step + offset, reason },
        })?;
        self.steps.extend_from_slice(steps);
        self.end = end;
        Ok(())
    }

    /// Concatenates `other`, which must start exactly where `self` ends.
    pub fn append(&mut self, other: &MoveTrace) -> Result<(), ReplayError> {
        if other.start != self.end {
            return Err(ReplayError::Mismatch {
                step: self.steps.len(),
                reason: "traces do not join".into(),
            });
        }
        self.extend(&other.steps)
    }

    pub fn flips(&self) -> usize {
        self.steps.iter().filter(|m| m.is_flip()).count()
    }

    /// Re-applies every step and checks the end code exactly.
    pub fn verify(&self) -> Result<(), ReplayError> {
        let end = replay_steps(&self.start, &self.steps)?;
        if end != self.end {
            return Err(ReplayError::Mismatch {
                step: self.steps.len(),
                reason: format!("replay ends at {end}, trace claims {}", self.end),
            });
        }
        Ok(())
    }
}

fn replay_steps(start: &GaussCode, steps: &[Move]) -> Result<GaussCode, ReplayError> {
    let mut cur = start.clone();
    for (i, m) in steps.iter().enumerate() {
        cur = apply(&cur, m).map_err(|e| ReplayError::Mismatch { step: i, reason: e.to_string() })?;
    }
    Ok(cur)
}

/// One greedy exposure: OC swaps bringing two passes together, followed by
/// the deletion they enable.
fn exposure(code: &GaussCode) -> Option<Vec<Move>> {
    let len = code.len();
    let n = code.n();
    let passes = code.passes();
    let pos = code.positions();
    let all_over = |from: usize, to: usize| {
        // Open cyclic interval (from, to).
        let mut i = (from + 1) % len;
        while i != to {
            if passes[i].strand != Strand::Over {
                return false;
            }
            i = (i + 1) % len;
        }
        true
    };
    let cyc = |from: usize, to: usize| (to + len - from) % len;
    let mut best: Option<(usize, Vec<Move>)> = None;
    let mut consider = |key: usize, moves: Vec<Move>| {
        if moves.len() <= n + 1 && best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, moves));
        }
    };
    for (idx, &(o, u)) in pos.iter().enumerate() {
        let label = idx as u32 + 1;
        if all_over(o, u) {
            // O_a, Overs, U_a: slide O_a right.
            let steps = cyc(o, u) - 1;
            let mut moves: Vec<Move> = (0..steps).map(|k| Move::OC { position: (o + k) % len }).collect();
            moves.push(Move::R1Delete { label });
            consider(o, moves);
        } else if all_over(u, o) {
            // U_a, Overs, O_a: slide O_a left.
            let steps = cyc(u, o) - 1;
            let mut moves: Vec<Move> =
                (0..steps).map(|k| Move::OC { position: (o + len - 1 - k) % len }).collect();
            moves.push(Move::R1Delete { label });
            consider(u, moves);
        }
    }
    for i in 0..len {
        let j = (i + 1) % len;
        let (x, y) = (passes[i], passes[j]);
        if len < 4 || x.strand != Strand::Under || y.strand != Strand::Under || x.sign == y.sign {
            continue;
        }
        let (oa, ob) = (pos[x.label as usize - 1].0, pos[y.label as usize - 1].0);
        // Both over passes in one run of Overs: slide the later one back.
        for (first, second) in [(oa, ob), (ob, oa)] {
            if all_over(first, second) && cyc(first, second) < len {
                let steps = cyc(first, second) - 1;
                let mut moves: Vec<Move> =
                    (0..steps).map(|k| Move::OC { position: (second + len - 1 - k) % len }).collect();
                moves.push(Move::R2Delete { a: x.label, b: y.label });
                consider(i.min(first), moves);
                break;
            }
        }
    }
    best.map(|(_, moves)| moves)
}

/// Greedy, deterministic reduction using deletions and OC exposures. Never
/// inserts crossings. `effort` caps the number of applied moves.
pub fn simplify(code: &GaussCode, effort: usize) -> (GaussCode, MoveTrace) {
    let mut trace = MoveTrace::empty(code.clone());
    loop {
        let cur = &trace.end;
        if cur.is_empty() || trace.steps.len() >= effort {
            break;
        }
        let mut deletions = r1_delete_sites(cur);
        deletions.extend(r2_delete_sites(cur));
        let first_position = |m: &Move| -> usize {
            let pos = cur.positions();
            match *m {
                Move::R1Delete { label } => {
                    let (o, u) = pos[label as usize - 1];
                    if (o + 1) % cur.len() == u { o } else { u }
                }
                Move::R2Delete { a, .. } => pos[a as usize - 1].0,
                _ => usize::MAX,
            }
        };
        let step = match deletions.iter().min_by_key(|m| first_position(m)) {
            Some(m) => vec![*m],
            None => match exposure(cur) {
                Some(moves) if trace.steps.len() + moves.len() <= effort => moves,
                _ => break,
            },
        };
        trace.extend(&step).expect("simplify only emits applicable moves");
    }
    (trace.end.clone(), trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::coloring_dim;
    use crate::ffield::FieldSpec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use crate::families::{braid_closure, Letter, OverFrom};
    use rand_chacha::ChaCha8Rng;

    fn code(s: &str) -> GaussCode {
        s.parse().unwrap()
    }

    fn trefoil() -> GaussCode {
        code("O1+ U2+ O3+ U1+ O2+ U3+")
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&code("O1+ U1+"), &Move::R1Delete { label: 1 }).unwrap(), GaussCode::empty());
        assert_eq!(
            apply(&trefoil(), &Move::TwistFlip { label: 1 }).unwrap().to_string(),
            "U1+ U2+ O3+ O1+ O2+ U3+"
        );
        assert!(apply(&trefoil(), &Move::R1Delete { label: 1 }).is_err());
        assert!(apply(&trefoil(), &Move::TwistFlip { label: 4 }).is_err());
    }

    #[test]
    fn oc_examples() {
        let c = code("O1+ O2- U1+ U2-");
        assert_eq!(oc_swap(&c, 0).unwrap().to_string(), "O2- O1+ U1+ U2-");
        assert!(oc_swap(&code("O1+ U1+"), 0).is_err());
        // Cyclic swap across the end of the word.
        let e = code("O2- U1+ U2- O1+");
        assert_eq!(oc_swap(&e, 3).unwrap().to_string(), "O1+ U1+ U2- O2-");
    }

    #[test]
    fn enumerate_examples() {
        let kinds = [MoveKind::R1Delete, MoveKind::R2Delete, MoveKind::OC];
        assert!(enumerate_moves(&GaussCode::empty(), &kinds).is_empty());
        assert_eq!(enumerate_moves(&code("O1+ U1+"), &[MoveKind::R1Delete]).len(), 1);
        assert_eq!(enumerate_moves(&trefoil(), &[MoveKind::TwistFlip]).len(), 3);
        assert_eq!(enumerate_moves(&GaussCode::empty(), &[MoveKind::R1Insert]).len(), 4);
        assert!(enumerate_moves_within(&GaussCode::empty(), &[MoveKind::R2Insert], 1).is_empty());
    }

    #[test]
    fn r2_examples() {
        let c = code("O1+ O2- U1+ U2-");
        assert_eq!(enumerate_moves(&c, &[MoveKind::R2Delete]), vec![Move::R2Delete { a: 1, b: 2 }]);
        assert_eq!(apply(&c, &Move::R2Delete { a: 1, b: 2 }).unwrap(), GaussCode::empty());
        let same_sign = code("O1+ O2+ U1+ U2+");
        assert!(enumerate_moves(&same_sign, &[MoveKind::R2Delete]).is_empty());
        let ins = Move::R2Insert { over_gap: 0, under_gap: 0, under_reversed: false, sign: Sign::Pos, under_first: false };
        assert_eq!(apply(&GaussCode::empty(), &ins).unwrap(), c);
    }

    #[test]
    fn r3_table_is_closed_under_the_move_and_mirroring() {
        let table = r3_patterns();
        assert!(!table.is_empty());
        for p in table {
            let moved = R3Pattern {
                top_meets_middle_first: !p.top_meets_middle_first,
                middle_meets_top_first: !p.middle_meets_top_first,
                bottom_meets_top_first: !p.bottom_meets_top_first,
                ..*p
            };
            assert!(table.contains(&moved));
            let mirrored = R3Pattern {
                sign_tm: p.sign_tm.negated(),
                sign_tb: p.sign_tb.negated(),
                sign_mb: p.sign_mb.negated(),
                ..*p
            };
            assert!(table.contains(&mirrored));
        }
    }

    fn sigma(left: usize, positive: bool) -> Letter {
        Letter::Classical { left, over: if positive { OverFrom::Right } else { OverFrom::Left } }
    }

    #[test]
    fn r3_realizes_braid_relations() {
        // a b a = b a b in every sign pattern that is a genuine braid relation.
        let cases: [([(usize, bool); 3], [(usize, bool); 3]); 3] = [
            ([(0, true), (1, true), (0, true)], [(1, true), (0, true), (1, true)]),
            ([(0, false), (1, false), (0, false)], [(1, false), (0, false), (1, false)]),
            ([(0, true), (1, true), (0, false)], [(1, false), (0, true), (1, true)]),
        ];
        for (lhs, rhs) in cases {
            // Close up with an extra letter so the closure is a knot.
            let tail = [sigma(1, true)];
            let word = |w: [(usize, bool); 3]| -> Vec<Letter> {
                w.iter().map(|&(l, s)| sigma(l, s)).chain(tail).collect()
            };
            let a = braid_closure(3, &word(lhs)).unwrap();
            let b = braid_closure(3, &word(rhs)).unwrap();
            let moves = enumerate_moves(&a, &[MoveKind::R3]);
            let keys: Vec<_> = moves.iter().map(|m| apply(&a, m).unwrap().canonical_key()).collect();
            assert!(keys.contains(&b.canonical_key()), "{a} -> {b}");
            for m in &moves {
                let after = apply(&a, m).unwrap();
                assert_eq!(apply(&after, m).unwrap(), a);
            }
        }
    }

    #[test]
    fn simplify_examples() {
        let (out, trace) = simplify(&code("O1+ U1+ O2- U2-"), 100);
        assert!(out.is_empty());
        assert_eq!(trace.verify(), Ok(()));
        let (out, trace) = simplify(&trefoil(), 100);
        assert_eq!(out, trefoil());
        assert!(trace.steps.is_empty());
        assert_eq!(simplify(&GaussCode::empty(), 100).0, GaussCode::empty());
    }

    #[test]
    fn trefoil_admits_no_reduction_after_oc() {
        // Every code reachable by OC swaps alone has no deletion.
        let mut seen = HashSet::new();
        let mut stack = vec![trefoil()];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            assert!(enumerate_moves(&c, &[MoveKind::R1Delete, MoveKind::R2Delete]).is_empty());
            for m in enumerate_moves(&c, &[MoveKind::OC]) {
                stack.push(apply(&c, &m).unwrap());
            }
        }
    }

    #[test]
    fn trace_tampering_is_detected() {
        let (_, mut trace) = simplify(&code("O1+ O3+ U1+ O2- U2- U3+"), 100);
        assert_eq!(trace.verify(), Ok(()));
        trace.steps.insert(0, Move::TwistFlip { label: 1 });
        assert!(matches!(trace.verify(), Err(ReplayError::Mismatch { .. })));
        let json = serde_json::to_string(&MoveTrace::empty(trefoil())).unwrap();
        let back: MoveTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verify(), Ok(()));
    }

    #[test]
    fn move_json_shape() {
        let json = serde_json::to_string(&Move::TwistFlip { label: 2 }).unwrap();
        assert_eq!(json, r#"{"kind":"TwistFlip","label":2}"#);
    }

    fn fields() -> Vec<FieldSpec> {
        ["R3", "R5", "F4", "F9", "5:2,1", "7:2,1"].iter().map(|s| s.parse().unwrap()).collect()
    }

    fn random_code(seed: u64, n: usize) -> GaussCode {
        GaussCode::random(&mut ChaCha8Rng::seed_from_u64(seed), n)
    }

    proptest! {
        #[test]
        fn welded_moves_preserve_colorings(seed in any::<u64>(), n in 0usize..7, pick in any::<usize>()) {
            let c = random_code(seed, n);
            let moves = enumerate_moves(&c, &MoveKind::WELDED);
            prop_assume!(!moves.is_empty());
            let m = moves[pick % moves.len()];
            let after = apply(&c, &m).unwrap();
            for f in fields() {
                prop_assert_eq!(coloring_dim(&after, &f), coloring_dim(&c, &f), "{:?} on {} over {}", m, c, f);
            }
        }

        #[test]
        fn r3_on_random_braids_preserves_colorings(seed in any::<u64>(), len in 3usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let strands = rng.gen_range(3..5);
            let word: Vec<Letter> = (0..len).map(|_| {
                let left = rng.gen_range(0..strands - 1);
                if rng.gen_bool(0.15) { Letter::Welded { left } } else { sigma(left, rng.gen_bool(0.5)) }
            }).collect();
            let Ok(c) = braid_closure(strands, &word) else { return Ok(()); };
            for m in enumerate_moves(&c, &[MoveKind::R3]) {
                let after = apply(&c, &m).unwrap();
                for f in fields() {
                    prop_assert_eq!(coloring_dim(&after, &f), coloring_dim(&c, &f), "{:?} on {}", m, c);
                }
            }
        }

        #[test]
        fn flip_changes_dim_by_at_most_one(seed in any::<u64>(), n in 1usize..8, pick in any::<u32>()) {
            let c = random_code(seed, n);
            let label = pick % n as u32 + 1;
            let after = apply(&c, &Move::TwistFlip { label }).unwrap();
            prop_assert_eq!(apply(&after, &Move::TwistFlip { label }).unwrap(), c.clone());
            for f in fields() {
                let (a, b) = (coloring_dim(&c, &f), coloring_dim(&after, &f));
                prop_assert!(a.abs_diff(b) <= 1);
            }
        }

        #[test]
        fn enumerated_moves_apply(seed in any::<u64>(), n in 0usize..6) {
            let c = random_code(seed, n);
            for m in enumerate_moves(&c, &MoveKind::ALL) {
                prop_assert!(apply(&c, &m).is_ok(), "{:?} on {}", m, c);
            }
        }

        #[test]
        fn simplify_is_monotone_and_replays(seed in any::<u64>(), n in 0usize..9) {
            let c = random_code(seed, n);
            let (out, trace) = simplify(&c, 1000);
            prop_assert!(out.n() <= c.n());
            prop_assert_eq!(trace.verify(), Ok(()));
            prop_assert_eq!(trace.end, out);
        }

        #[test]
        fn insert_then_delete_round_trips(seed in any::<u64>(), n in 0usize..6, pick in any::<usize>()) {
            let c = random_code(seed, n);
            let inserts = enumerate_moves(&c, &MoveKind::INSERTIONS);
            let m = inserts[pick % inserts.len()];
            let grown = apply(&c, &m).unwrap();
            let deletes = enumerate_moves(&grown, &[MoveKind::R1Delete, MoveKind::R2Delete]);
            let keys: Vec<_> = deletes.iter().map(|d| apply(&grown, d).unwrap().canonical_key()).collect();
            prop_assert!(keys.contains(&c.canonical_key()));
        }
    }
}
