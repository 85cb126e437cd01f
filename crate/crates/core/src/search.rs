//! Bounded layered searches with machine-checkable certificates for the
//! unknotting twist number, the welded unknotting number and the twist
//! distance.
//!
//! Layer `k` holds codes reached with exactly `k` twist moves. Each layer is
//! closed under welded moves before the next flip: first the non-increasing
//! moves, then one tier of insertions per unit of crossing headroom. Frontier
//! expansion runs in parallel; results are merged in frontier order, so the
//! outcome does not depend on the number of worker threads.

use std::cell::Cell;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::coloring_dim;
use crate::ffield::FieldSpec;
use crate::gauss::{CanonicalKey, GaussCode};
use crate::invariants::{
    descent_trace, greedy_reduction, warping_degree_both, warping_witness,
};
use crate::moves::{apply, enumerate_moves, enumerate_moves_within, simplify, without_labels, Move, MoveKind, MoveTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: usize,
    /// Maximum number of twist moves.
    pub max_depth: usize,
    /// Crossing headroom for insertion moves above the starting code.
    pub max_crossings: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 100_000, max_depth: 4, max_crossings: 2 }
    }
}

/// Frontier nodes expanded per parallel batch.
const BATCH: usize = 256;

struct Node {
    code: GaussCode,
    parent: Option<(usize, Move)>,
    flips: usize,
}

/// Explored codes, deduplicated by canonical key.
pub(crate) struct Explorer {
    nodes: Vec<Node>,
    index: HashMap<CanonicalKey, usize>,
    max_nodes: usize,
    crossing_limit: usize,
    headroom: usize,
    exhausted: bool,
}

impl Explorer {
    fn new(root: GaussCode, budget: &SearchBudget) -> Self {
        let crossing_limit = root.n() + budget.max_crossings;
        let mut e = Explorer {
            nodes: Vec::new(),
            index: HashMap::new(),
            max_nodes: budget.max_nodes.max(1),
            crossing_limit,
            headroom: budget.max_crossings,
            exhausted: false,
        };
        e.index.insert(root.canonical_key(), 0);
        e.nodes.push(Node { code: root, parent: None, flips: 0 });
        e
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn code(&self, i: usize) -> &GaussCode {
        &self.nodes[i].code
    }

    fn key_index(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    fn try_add(&mut self, parent: usize, m: Move, code: GaussCode, key: CanonicalKey, flips: usize) -> Option<usize> {
        if self.index.contains_key(&key) {
            return None;
        }
        if self.nodes.len() >= self.max_nodes {
            self.exhausted = true;
            return None;
        }
        let idx = self.nodes.len();
        self.index.insert(key, idx);
        self.nodes.push(Node { code, parent: Some((parent, m)), flips });
        Some(idx)
    }

    /// Moves from the root to node `i`.
    fn path(&self, mut i: usize) -> MoveTrace {
        let end = self.nodes[i].code.clone();
        let mut steps = Vec::new();
        while let Some((p, m)) = self.nodes[i].parent {
            steps.push(m);
            i = p;
        }
        steps.reverse();
        MoveTrace { start: self.nodes[0].code.clone(), steps, end }
    }

    /// Nodes on the path from the root to `i`, root first, each with the
    /// move that produced it.
    fn lineage(&self, mut i: usize) -> Vec<(usize, Option<Move>)> {
        let mut out = Vec::new();
        loop {
            match self.nodes[i].parent {
                Some((p, m)) => {
                    out.push((i, Some(m)));
                    i = p;
                }
                None => {
                    out.push((i, None));
                    break;
                }
            }
        }
        out.reverse();
        out
    }

    /// Expands `frontier` with the given kinds; new nodes keep the parent's
    /// flip count plus `extra_flips`. Calls `visit` on each new node and
    /// stops early when it returns true.
    fn expand(
        &mut self,
        frontier: &[usize],
        kinds: &[MoveKind],
        extra_flips: usize,
        visit: &mut dyn FnMut(&Explorer, usize) -> bool,
    ) -> (Vec<usize>, bool) {
        let mut added = Vec::new();
        for chunk in frontier.chunks(BATCH) {
            let limit = self.crossing_limit;
            let nodes = &self.nodes;
            let children: Vec<Vec<(usize, Move, GaussCode, CanonicalKey)>> = chunk
                .par_iter()
                .map(|&i| {
                    let code = &nodes[i].code;
                    enumerate_moves_within(code, kinds, limit)
                        .into_iter()
                        .map(|m| {
                            let c = apply(code, &m).expect("enumerated moves apply");
                            let k = c.canonical_key();
                            (i, m, c, k)
                        })
                        .collect()
                })
                .collect();
            for (parent, m, code, key) in children.into_iter().flatten() {
                let flips = self.nodes[parent].flips + extra_flips;
                if let Some(idx) = self.try_add(parent, m, code, key, flips) {
                    added.push(idx);
                    if visit(self, idx) {
                        return (added, true);
                    }
                }
            }
            if self.exhausted {
                break;
            }
        }
        (added, false)
    }

    /// Adds the greedy simplification path of node `i` as a chain of nodes.
    fn add_simplified(&mut self, i: usize, visit: &mut dyn FnMut(&Explorer, usize) -> bool) -> (Vec<usize>, bool) {
        let (_, trace) = simplify(self.code(i), crate::invariants::SIMPLIFY_EFFORT);
        let flips = self.nodes[i].flips;
        let mut cur = i;
        let mut code = self.code(i).clone();
        let mut added = Vec::new();
        for m in trace.steps {
            code = apply(&code, &m).expect("simplify trace replays");
            let key = code.canonical_key();
            match self.try_add(cur, m, code.clone(), key.clone(), flips) {
                Some(idx) => {
                    added.push(idx);
                    cur = idx;
                    if visit(self, idx) {
                        return (added, true);
                    }
                }
                // Already known: the rest of the chain is explored from there.
                None => break,
            }
        }
        (added, false)
    }

    /// Closes `seeds` under welded moves within the crossing headroom and
    /// returns every node added (seeds included).
    fn close(&mut self, seeds: Vec<usize>, visit: &mut dyn FnMut(&Explorer, usize) -> bool) -> (Vec<usize>, bool) {
        let mut all = seeds.clone();
        let mut tier_seeds = seeds;
        // Greedy paths first: cheap and usually the shortest way down.
        for s in tier_seeds.clone() {
            let (added, stop) = self.add_simplified(s, visit);
            all.extend(&added);
            tier_seeds.extend(added);
            if stop {
                return (all, true);
            }
        }
        let mut inserted_up_to = 0;
        for tier in 0..=self.headroom {
            let mut frontier = tier_seeds;
            while !frontier.is_empty() && !self.exhausted {
                let (added, stop) = self.expand(&frontier, &MoveKind::NON_INCREASING, 0, visit);
                all.extend(&added);
                if stop {
                    return (all, true);
                }
                frontier = added;
            }
            if tier == self.headroom || self.exhausted {
                break;
            }
            let sources: Vec<usize> = all[inserted_up_to..].to_vec();
            inserted_up_to = all.len();
            let (added, stop) = self.expand(&sources, &MoveKind::INSERTIONS, 0, visit);
            all.extend(&added);
            if stop {
                return (all, true);
            }
            tier_seeds = added;
        }
        (all, false)
    }

    /// One twist move from every node of `layer`, labels ascending.
    fn flip_layer(&mut self, layer: &[usize], visit: &mut dyn FnMut(&Explorer, usize) -> bool) -> (Vec<usize>, bool) {
        self.expand(layer, &[MoveKind::TwistFlip], 1, visit)
    }
}

/// Searches the welded closure of `code` (no twist moves) for a descending
/// code. Returns a reduction to the empty code when found, and the number of
/// nodes explored.
pub fn find_descending(code: &GaussCode, budget: &SearchBudget) -> (Option<MoveTrace>, usize) {
    let mut ex = Explorer::new(code.clone(), budget);
    let mut hit = None;
    let mut visit = |e: &Explorer, i: usize| {
        if warping_degree_both(e.code(i)) == 0 {
            hit = Some(i);
            true
        } else {
            false
        }
    };
    if visit(&ex, 0) {
        return (descent_trace(code), 1);
    }
    ex.close(vec![0], &mut visit);
    let found = hit.and_then(|i| {
        let mut trace = ex.path(i);
        trace.append(&descent_trace(&trace.end)?).ok()?;
        Some(trace)
    });
    (found, ex.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    UT,
    UW,
    DT,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum LowerWitness {
    /// `value = dim - 1` over `field`.
    ColoringDim { field: FieldSpec, dim: usize },
    /// `value = |dim_a - dim_b|`: one twist changes a dimension by at most 1.
    DimDifference { field: FieldSpec, dim_a: usize, dim_b: usize },
    /// The subject is already trivial, so the quantity is 0.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub value: usize,
    pub witness: LowerWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    pub value: usize,
    /// For UT: subject to empty. For DT: subject to a code equivalent to the
    /// target. For UW: subject-minus-`deleted` to empty.
    pub trace: MoveTrace,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub deleted: Vec<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BudgetSpent {
    pub nodes: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCertificate {
    pub quantity: Quantity,
    pub subject: GaussCode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<GaussCode>,
    pub lower: Option<LowerBound>,
    pub upper: Option<UpperBound>,
    pub budget_spent: BudgetSpent,
    /// True when the node budget ran out before the interval closed.
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("lower bound {lower} exceeds upper bound {upper}")]
    Interval { lower: usize, upper: usize },
    #[error("lower witness does not reproduce: {0}")]
    Lower(String),
    #[error("upper witness does not replay: {0}")]
    Upper(String),
}

impl BoundCertificate {
    pub fn is_determined(&self) -> bool {
        matches!((&self.lower, &self.upper), (Some(l), Some(u)) if l.value == u.value)
    }

    /// Re-checks every witness from scratch.
    pub fn verify(&self) -> Result<(), CertificateError> {
        if let (Some(l), Some(u)) = (&self.lower, &self.upper) {
            if l.value > u.value {
                return Err(CertificateError::Interval { lower: l.value, upper: u.value });
            }
        }
        if let Some(l) = &self.lower {
            let ok = match &l.witness {
                LowerWitness::ColoringDim { field, dim } => {
                    coloring_dim(&self.subject, field) == *dim && dim.saturating_sub(1) >= l.value
                }
                LowerWitness::DimDifference { field, dim_a, dim_b } => {
                    let target = self.target.as_ref().ok_or_else(|| CertificateError::Lower("no target".into()))?;
                    coloring_dim(&self.subject, field) == *dim_a
                        && coloring_dim(target, field) == *dim_b
                        && dim_a.abs_diff(*dim_b) >= l.value
                }
                LowerWitness::Trivial => l.value == 0,
            };
            if !ok {
                return Err(CertificateError::Lower(format!("{:?}", l.witness)));
            }
        }
        if let Some(u) = &self.upper {
            u.trace.verify().map_err(|e| CertificateError::Upper(e.to_string()))?;
            let upper_err = |why: &str| Err(CertificateError::Upper(why.to_string()));
            match self.quantity {
                Quantity::UT => {
                    if u.trace.start != self.subject || !u.trace.end.is_empty() {
                        return upper_err("trace must run from the subject to the empty code");
                    }
                    if u.trace.flips() != u.value {
                        return upper_err("flip count differs from the bound");
                    }
                }
                Quantity::DT => {
                    let target = self.target.as_ref().ok_or_else(|| CertificateError::Upper("no target".into()))?;
                    if u.trace.start != self.subject || u.trace.end.canonical_key() != target.canonical_key() {
                        return upper_err("trace must run from the subject to the target");
                    }
                    if u.trace.flips() != u.value {
                        return upper_err("flip count differs from the bound");
                    }
                }
                Quantity::UW => {
                    if u.deleted.len() != u.value
                        || u.trace.start != without_labels(&self.subject, &u.deleted)
                        || !u.trace.end.is_empty()
                        || u.trace.flips() != 0
                    {
                        return upper_err("deleted crossings do not leave a trivial code");
                    }
                }
            }
        }
        Ok(())
    }
}

fn best_dim_lower(code: &GaussCode, fields: &[FieldSpec]) -> LowerBound {
    let dims: Vec<usize> = fields.par_iter().map(|f| coloring_dim(code, f)).collect();
    let best = dims.iter().enumerate().max_by_key(|&(i, &d)| (d, std::cmp::Reverse(i)));
    match best {
        Some((i, &dim)) => LowerBound {
            value: dim - 1,
            witness: LowerWitness::ColoringDim { field: fields[i].clone(), dim },
        },
        None => LowerBound { value: 0, witness: LowerWitness::Trivial },
    }
}

/// Bounds on the unknotting twist number.
///
/// The lower bound is the best `dim - 1` over the fields. Every explored code
/// reached with `k` flips contributes the upper candidate `k` plus its
/// two-orientation warping degree.
pub fn ut_bounds(code: &GaussCode, fields: &[FieldSpec], budget: &SearchBudget) -> BoundCertificate {
    let mut lower = best_dim_lower(code, fields);
    if code.is_empty() {
        lower = LowerBound { value: 0, witness: LowerWitness::Trivial };
    }
    let mut ex = Explorer::new(code.clone(), budget);
    // Best (value, node) so far.
    let best: Cell<Option<(usize, usize)>> = Cell::new(None);
    let target = lower.value;
    let mut visit = |e: &Explorer, i: usize| {
        let cand = e.nodes[i].flips + warping_degree_both(e.code(i));
        if best.get().is_none_or(|(v, _)| cand < v) {
            best.set(Some((cand, i)));
        }
        best.get().is_some_and(|(v, _)| v <= target)
    };
    let mut depth = 0;
    let mut done = visit(&ex, 0);
    let mut layer = Vec::new();
    if !done {
        let (nodes, stop) = ex.close(vec![0], &mut visit);
        layer = nodes;
        done = stop;
    }
    while !done && !ex.exhausted && depth < budget.max_depth {
        // A layer-(k+1) code cannot beat an upper bound of k + 1.
        if best.get().is_some_and(|(v, _)| v <= depth + 1) {
            break;
        }
        depth += 1;
        let (seeds, stop) = ex.flip_layer(&layer, &mut visit);
        if stop {
            break;
        }
        let (nodes, stop) = ex.close(seeds, &mut visit);
        layer = nodes;
        done = stop;
    }
    let upper = best.get().and_then(|(value, i)| {
        let mut trace = ex.path(i);
        let w = warping_witness(&trace.end);
        let flips: Vec<Move> = w.flips.iter().map(|&label| Move::TwistFlip { label }).collect();
        trace.extend(&flips).ok()?;
        trace.append(&descent_trace(&trace.end)?).ok()?;
        debug_assert_eq!(trace.flips(), value);
        Some(UpperBound { value, trace, deleted: Vec::new() })
    });
    let closed = matches!(&upper, Some(u) if u.value == lower.value);
    BoundCertificate {
        quantity: Quantity::UT,
        subject: code.clone(),
        target: None,
        lower: Some(lower),
        upper,
        budget_spent: BudgetSpent { nodes: ex.len(), depth },
        exhausted: ex.exhausted && !closed,
    }
}

/// Lexicographic `k`-subsets of `1..=n`.
fn subsets(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for l in start..=n {
            if (n - l + 1) as usize + cur.len() < k {
                break;
            }
            cur.push(l);
            rec(l + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Upper bound on the welded unknotting number: the fewest crossings whose
/// deletion leaves a code certified trivial.
pub fn uw_upper(code: &GaussCode, fields: &[FieldSpec], budget: &SearchBudget) -> BoundCertificate {
    let mut spent = 0usize;
    let mut exhausted = false;
    let mut upper = None;
    let per_candidate = SearchBudget { max_nodes: (budget.max_nodes / 50).clamp(1, 2000), ..*budget };
    // Per size: a cheap greedy pass over every subset, then bounded searches.
    'outer: for k in 0..=code.n() {
        if binomial(code.n(), k) > budget.max_nodes.saturating_sub(spent) {
            exhausted = true;
            break;
        }
        let candidates = subsets(code.n() as u32, k);
        for searching in [false, true] {
            for subset in &candidates {
                if spent >= budget.max_nodes {
                    exhausted = true;
                    break 'outer;
                }
                let reduced = without_labels(code, subset);
                spent += 1;
                let trace = if searching {
                    // A coloring witness already rules the candidate out.
                    if fields.iter().any(|f| coloring_dim(&reduced, f) > 1) {
                        continue;
                    }
                    let (t, nodes) = find_descending(&reduced, &per_candidate);
                    spent += nodes;
                    t
                } else {
                    greedy_reduction(&reduced)
                };
                if let Some(trace) = trace {
                    upper = Some(UpperBound { value: k, trace, deleted: subset.clone() });
                    break 'outer;
                }
            }
        }
    }
    let lower = match &upper {
        Some(u) if u.value == 0 => Some(LowerBound { value: 0, witness: LowerWitness::Trivial }),
        // A coloring witness proves the knot is nontrivial, so u_w >= 1.
        _ => {
            let l = best_dim_lower(code, fields);
            match l.witness {
                LowerWitness::ColoringDim { field, dim } if dim > 1 => {
                    Some(LowerBound { value: 1, witness: LowerWitness::ColoringDim { field, dim } })
                }
                _ => None,
            }
        }
    };
    BoundCertificate {
        quantity: Quantity::UW,
        subject: code.clone(),
        target: None,
        lower,
        upper,
        budget_spent: BudgetSpent { nodes: spent, depth: 0 },
        exhausted,
    }
}

/// The inverse kinds to try when replaying a step backwards.
fn inverse_kinds(m: &Move) -> &'static [MoveKind] {
    match m.kind() {
        MoveKind::R1Delete => &[MoveKind::R1Insert],
        MoveKind::R1Insert => &[MoveKind::R1Delete],
        MoveKind::R2Delete => &[MoveKind::R2Insert],
        MoveKind::R2Insert => &[MoveKind::R2Delete],
        MoveKind::R3 => &[MoveKind::R3],
        MoveKind::OC => &[MoveKind::OC],
        MoveKind::TwistFlip => &[MoveKind::TwistFlip],
    }
}

/// Upper bound on the twist distance by a bidirectional layered search.
///
/// Both sides grow by flips, alternating so their depths stay balanced. When a key
/// is shared, the target-side path is run backwards from the meeting code,
/// re-deriving each inverse step on the actual codes.
pub fn twist_distance_ub(a: &GaussCode, b: &GaussCode, fields: &[FieldSpec], budget: &SearchBudget) -> BoundCertificate {
    let lower = fields
        .par_iter()
        .map(|f| (f, coloring_dim(a, f), coloring_dim(b, f)))
        .collect::<Vec<_>>()
        .into_iter()
        .max_by_key(|&(_, da, db)| da.abs_diff(db))
        .map(|(f, dim_a, dim_b)| LowerBound {
            value: dim_a.abs_diff(dim_b),
            witness: LowerWitness::DimDifference { field: f.clone(), dim_a, dim_b },
        });
    let mut cert = BoundCertificate {
        quantity: Quantity::DT,
        subject: a.clone(),
        target: Some(b.clone()),
        lower,
        upper: None,
        budget_spent: BudgetSpent::default(),
        exhausted: false,
    };
    if a.canonical_key() == b.canonical_key() {
        cert.upper = Some(UpperBound { value: 0, trace: MoveTrace::empty(a.clone()), deleted: Vec::new() });
        cert.lower = Some(LowerBound { value: 0, witness: LowerWitness::Trivial });
        return cert;
    }
    let half = SearchBudget { max_nodes: (budget.max_nodes / 2).max(1), ..*budget };
    let mut sides = [Explorer::new(a.clone(), &half), Explorer::new(b.clone(), &half)];
    let mut layers: [Vec<usize>; 2] = [vec![0], vec![0]];
    let mut depths = [0usize; 2];
    let mut meeting: Option<(usize, usize)> = None;

    // Close both starting layers, checking for a meeting as nodes appear.
    for s in 0..2 {
        let (mine, other) = split(&mut sides, s);
        let mut visit = |e: &Explorer, i: usize| {
            if let Some(j) = other.key_index(&e.code(i).canonical_key()) {
                meeting = Some(if s == 0 { (i, j) } else { (j, i) });
                return true;
            }
            false
        };
        if visit(mine, 0) {
            break;
        }
        let (nodes, stop) = mine.close(vec![0], &mut visit);
        layers[s] = nodes;
        if stop {
            break;
        }
    }
    while meeting.is_none() && depths[0] + depths[1] < budget.max_depth {
        // Balance depths; break ties by expanding the smaller side.
        let s = match depths[0].cmp(&depths[1]) {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Equal => usize::from(sides[0].len() > sides[1].len()),
        };
        if sides[s].exhausted {
            break;
        }
        depths[s] += 1;
        let (mine, other) = split(&mut sides, s);
        let mut visit = |e: &Explorer, i: usize| {
            if let Some(j) = other.key_index(&e.code(i).canonical_key()) {
                meeting = Some(if s == 0 { (i, j) } else { (j, i) });
                return true;
            }
            false
        };
        let (seeds, stop) = mine.flip_layer(&layers[s], &mut visit);
        if stop {
            break;
        }
        let (nodes, stop) = mine.close(seeds, &mut visit);
        layers[s] = nodes;
        if stop {
            break;
        }
    }
    cert.budget_spent = BudgetSpent { nodes: sides[0].len() + sides[1].len(), depth: depths[0] + depths[1] };
    cert.exhausted = meeting.is_none() && (sides[0].exhausted || sides[1].exhausted);
    if let Some((ia, ib)) = meeting {
        if let Some(trace) = join(&sides[0], ia, &sides[1], ib) {
            let value = trace.flips();
            cert.upper = Some(UpperBound { value, trace, deleted: Vec::new() });
        }
    }
    cert
}

fn split(sides: &mut [Explorer; 2], s: usize) -> (&mut Explorer, &Explorer) {
    let (left, right) = sides.split_at_mut(1);
    if s == 0 {
        (&mut left[0], &right[0])
    } else {
        (&mut right[0], &left[0])
    }
}

/// Path from `a` to the meeting node, then the `b`-side path walked back.
fn join(ea: &Explorer, ia: usize, eb: &Explorer, ib: usize) -> Option<MoveTrace> {
    let mut trace = ea.path(ia);
    let lineage = eb.lineage(ib);
    for k in (1..lineage.len()).rev() {
        let (_, m) = lineage[k];
        let m = m?;
        let parent_key = eb.code(lineage[k - 1].0).canonical_key();
        let cur = trace.end.clone();
        let step = enumerate_moves(&cur, inverse_kinds(&m))
            .into_iter()
            .find(|cand| apply(&cur, cand).map(|c| c.canonical_key() == parent_key).unwrap_or(false))?;
        trace.extend(&[step]).ok()?;
    }
    Some(trace)
}
