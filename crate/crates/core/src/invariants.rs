//! Warping degree, descending diagrams and a three-valued triviality oracle.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coloring::{summary, ColoringSummary};
use crate::ffield::FieldSpec;
use crate::gauss::{GaussCode, Strand};
use crate::moves::{simplify, Move, MoveTrace};
use crate::search::{find_descending, SearchBudget};

/// Upper limit on moves applied by one greedy simplification.
pub const SIMPLIFY_EFFORT: usize = 100_000;

/// Number of labels first met at their under pass when walking from `base`.
pub fn warping_degree_at(code: &GaussCode, base: usize) -> usize {
    under_first_labels(code, base).len()
}

fn under_first_labels(code: &GaussCode, base: usize) -> Vec<u32> {
    let m = code.len();
    let mut seen = vec![false; code.n() + 1];
    let mut out = Vec::new();
    for k in 0..m {
        let p = code.passes()[(base + k) % m];
        if !seen[p.label as usize] {
            seen[p.label as usize] = true;
            if p.strand == Strand::Under {
                out.push(p.label);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Minimum over base points; 0 for the empty code.
pub fn warping_degree(code: &GaussCode) -> usize {
    (0..code.len()).map(|b| warping_degree_at(code, b)).min().unwrap_or(0)
}

/// Minimum over both orientations.
pub fn warping_degree_both(code: &GaussCode) -> usize {
    warping_degree(code).min(warping_degree(&code.reverse()))
}

pub fn is_descending(code: &GaussCode) -> bool {
    warping_degree_both(code) == 0
}

/// A base point and orientation realizing [`warping_degree_both`], with the
/// labels whose flip makes the code descending there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WarpingWitness {
    pub degree: usize,
    pub reversed: bool,
    pub base: usize,
    pub flips: Vec<u32>,
}

/// First minimizer in the order: forward bases ascending, then reversed.
pub fn warping_witness(code: &GaussCode) -> WarpingWitness {
    let mut best = WarpingWitness { degree: 0, reversed: false, base: 0, flips: Vec::new() };
    if code.is_empty() {
        return best;
    }
    best.degree = usize::MAX;
    let rev = code.reverse();
    for (reversed, c) in [(false, code), (true, &rev)] {
        for base in 0..c.len() {
            let flips = under_first_labels(c, base);
            if flips.len() < best.degree {
                best = WarpingWitness { degree: flips.len(), reversed, base, flips };
            }
        }
    }
    best
}

/// Reduces a descending code to the empty code with OC swaps and kink
/// deletions. Returns `None` if the code is not descending.
pub fn descent_trace(code: &GaussCode) -> Option<MoveTrace> {
    let mut trace = MoveTrace::empty(code.clone());
    while !trace.end.is_empty() {
        let cur = trace.end.clone();
        let w = warping_witness(&cur);
        if w.degree != 0 {
            return None;
        }
        let m = cur.len();
        let pos = cur.positions();
        let mut steps = Vec::new();
        if !w.reversed {
            // Walking forward from the base, the first under pass closes a
            // stretch of over passes that starts at its own over pass.
            let u = (0..m).map(|k| (w.base + k) % m).find(|&i| cur.passes()[i].strand == Strand::Under)?;
            let label = cur.passes()[u].label;
            let mut o = pos[label as usize - 1].0;
            while (o + 1) % m != u {
                steps.push(Move::OC { position: o });
                o = (o + 1) % m;
            }
            steps.push(Move::R1Delete { label });
        } else {
            // The base indexes the reversed word, i.e. a backward walk from
            // position m - 1 - base. Mirror image of the forward case.
            let start = m - 1 - w.base;
            let u = (0..m)
                .map(|k| (start + m - k) % m)
                .find(|&i| cur.passes()[i].strand == Strand::Under)?;
            let label = cur.passes()[u].label;
            let mut o = pos[label as usize - 1].0;
            while (u + 1) % m != o {
                let prev = (o + m - 1) % m;
                steps.push(Move::OC { position: prev });
                o = prev;
            }
            steps.push(Move::R1Delete { label });
        }
        trace.extend(&steps).ok()?;
    }
    Some(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictValue {
    Trivial,
    Nontrivial,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimWitness {
    pub field: FieldSpec,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: VerdictValue,
    /// For `Trivial`: a replayable reduction to the empty code.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<MoveTrace>,
    /// For `Nontrivial`: a field with more than the constant colorings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<DimWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantsError {
    #[error("internal inconsistency: {0} is both trivial and nontrivial")]
    Inconsistent(String),
}

/// Coloring summaries for a battery, in battery order.
pub fn battery(code: &GaussCode, fields: &[FieldSpec]) -> Vec<ColoringSummary> {
    fields.par_iter().map(|f| summary(code, f)).collect()
}

/// The reduction found by greedy simplification, finished by a descent if the
/// greedy phase stops at a descending code.
pub fn greedy_reduction(code: &GaussCode) -> Option<MoveTrace> {
    let (out, mut trace) = simplify(code, SIMPLIFY_EFFORT);
    if out.is_empty() {
        return Some(trace);
    }
    let tail = descent_trace(&out)?;
    trace.append(&tail).ok()?;
    Some(trace)
}

/// Trivial needs a reduction trace, Nontrivial a coloring witness; anything
/// else is Unknown. Dimension 1 everywhere proves nothing.
pub fn triviality(code: &GaussCode, fields: &[FieldSpec], budget: &SearchBudget) -> Result<Verdict, InvariantsError> {
    let witness = battery(code, fields)
        .into_iter()
        .find(|s| s.dim > 1)
        .map(|s| DimWitness { field: s.field, dim: s.dim });
    let trace = if witness.is_some() {
        // Still look cheaply for a contradiction; it would expose a bug.
        greedy_reduction(code)
    } else {
        greedy_reduction(code).or_else(|| find_descending(code, budget).0)
    };
    match (trace, witness) {
        (Some(_), Some(_)) => Err(InvariantsError::Inconsistent(code.to_string())),
        (Some(trace), None) => Ok(Verdict { value: VerdictValue::Trivial, trace: Some(trace), witness: None }),
        (None, Some(w)) => Ok(Verdict { value: VerdictValue::Nontrivial, trace: None, witness: Some(w) }),
        (None, None) => Ok(Verdict { value: VerdictValue::Unknown, trace: None, witness: None }),
    }
}
