//! Alexander-quandle colorings of semi-arcs over `F_q`.
//!
//! Semi-arc `s_i` is the gap after pass `i`, so the pass at position `i` has
//! incoming semi-arc `s_{i-1}` and outgoing semi-arc `s_i`. At a crossing the
//! over strand keeps its color (`delta = gamma`) and the under strand is acted
//! on: `beta = t*alpha + (1-t)*gamma` for a positive crossing, with `t^-1` in
//! place of `t` for a negative one.

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::ffield::{FieldElement, FieldSpec, FqMatrix};
use crate::gauss::{GaussCode, Sign};

/// Relation matrix of a code: one column per semi-arc, two rows per crossing.
#[derive(Clone, Debug)]
pub struct ColoringSystem {
    pub field: FieldSpec,
    pub generators: usize,
    pub relations: FqMatrix,
}

impl ColoringSystem {
    /// Dimension of the coloring space. The empty code is a single closed
    /// arc with one free color.
    pub fn dim(&self) -> usize {
        if self.generators == 0 {
            1
        } else {
            self.relations.nullity(&self.field)
        }
    }
}

/// Parameters `(tau, 1 - tau)` of the quandle action at a crossing.
fn action(field: &FieldSpec, sign: Sign) -> (FieldElement, FieldElement) {
    let t = match sign {
        Sign::Pos => field.t(),
        Sign::Neg => field.inv(field.t()).expect("t is invertible in a valid field"),
    };
    (t, field.sub(field.one(), t))
}

pub fn build_system(code: &GaussCode, field: &FieldSpec) -> ColoringSystem {
    let m = code.len();
    let mut relations = FqMatrix::zeros(m, m);
    let prev = |i: usize| (i + m - 1) % m;
    for (k, &(o, u)) in code.positions().iter().enumerate() {
        let sign = code.passes()[o].sign;
        let (gamma, delta) = (prev(o), o);
        let (alpha, beta) = (prev(u), u);
        let (tau, one_minus_tau) = action(field, sign);

        let mut over_row = vec![field.zero(); m];
        accumulate(field, &mut over_row, delta, field.one());
        accumulate(field, &mut over_row, gamma, field.neg(field.one()));

        let mut under_row = vec![field.zero(); m];
        accumulate(field, &mut under_row, beta, field.one());
        accumulate(field, &mut under_row, alpha, field.neg(tau));
        accumulate(field, &mut under_row, gamma, field.neg(one_minus_tau));

        for (r, row) in [over_row, under_row].into_iter().enumerate() {
            for (c, v) in monic(field, row).into_iter().enumerate() {
                relations.set(2 * k + r, c, v);
            }
        }
    }
    ColoringSystem { field: field.clone(), generators: m, relations }
}

fn accumulate(field: &FieldSpec, row: &mut [FieldElement], col: usize, v: FieldElement) {
    row[col] = field.add(row[col], v);
}

/// Scales a row so its first nonzero entry is 1.
fn monic(field: &FieldSpec, row: Vec<FieldElement>) -> Vec<FieldElement> {
    match row.iter().find(|e| !e.is_zero()) {
        Some(&lead) => {
            let inv = field.inv(lead).expect("nonzero");
            row.into_iter().map(|e| field.mul(e, inv)).collect()
        }
        None => row,
    }
}

pub fn coloring_dim(code: &GaussCode, field: &FieldSpec) -> usize {
    build_system(code, field).dim()
}

/// Number of colorings, always `q^dim`.
pub fn coloring_count(code: &GaussCode, field: &FieldSpec) -> BigUint {
    BigUint::from(field.order()).pow(coloring_dim(code, field) as u32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColoringSummary {
    pub field: FieldSpec,
    pub dim: usize,
    #[serde(serialize_with = "as_decimal")]
    pub count: BigUint,
}

fn as_decimal<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn summary(code: &GaussCode, field: &FieldSpec) -> ColoringSummary {
    let dim = coloring_dim(code, field);
    ColoringSummary {
        field: field.clone(),
        dim,
        count: BigUint::from(field.order()).pow(dim as u32),
    }
}

/// Counts colorings by enumerating every semi-arc assignment and checking the
/// quandle rule at each crossing directly. Returns `None` when more than
/// `limit` assignments would be needed.
pub fn brute_force_count(code: &GaussCode, field: &FieldSpec, limit: u64) -> Option<u64> {
    let m = code.len();
    if m == 0 {
        return Some(field.order() as u64);
    }
    let q = field.order() as u64;
    let total = q.checked_pow(m as u32).filter(|&t| t <= limit)?;
    let crossings: Vec<(usize, usize, Sign)> = code
        .positions()
        .into_iter()
        .map(|(o, u)| (o, u, code.passes()[o].sign))
        .collect();
    let t = field.t();
    let t_inv = field.inv(t).expect("t is invertible");
    let one = field.one();
    // x * y = t x + (1 - t) y, and its inverse operation with t^-1.
    let op = |x: FieldElement, y: FieldElement, s: Sign| {
        let tt = if s == Sign::Pos { t } else { t_inv };
        field.add(field.mul(tt, x), field.mul(field.sub(one, tt), y))
    };
    let mut colors = vec![FieldElement::ZERO; m];
    let elements: Vec<FieldElement> = field.elements().collect();
    let mut count = 0;
    for idx in 0..total {
        let mut x = idx;
        for c in colors.iter_mut() {
            *c = elements[(x % q) as usize];
            x /= q;
        }
        let ok = crossings.iter().all(|&(o, u, s)| {
            let over_in = colors[(o + m - 1) % m];
            let over_out = colors[o];
            let under_in = colors[(u + m - 1) % m];
            let under_out = colors[u];
            over_in == over_out && under_out == op(under_in, over_in, s)
        });
        count += ok as u64;
    }
    Some(count)
}
