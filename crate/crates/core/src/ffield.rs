//! Finite fields `F_q = Z_p[t]/f(t)` and linear algebra over them.
//!
//! Elements are remainders of polynomials modulo `f`, packed into a single
//! integer `sum c_i p^i`. Every field is tiny, so addition, multiplication and
//! inversion are precomputed tables shared behind an `Arc`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported field order. Tables are `q * q` entries.
pub const MAX_ORDER: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("NotPrime: {0} is not prime")]
    NotPrime(u32),
    #[error("polynomial must be monic of degree >= 1")]
    NotMonic,
    #[error("polynomial {0} is reducible mod {1}")]
    Reducible(String, u32),
    #[error("polynomial {0} is excluded: t and 1 - t must both be invertible")]
    Excluded(String),
    #[error("field order {0} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge(u64),
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("invalid field syntax {0:?} (expected p:c0,c1,..., Rp, F4 or F9)")]
    Syntax(String),
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over Z_p, low-to-high, no trailing zeros except for zero itself.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_is_zero(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64 % p as u64).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let sub = lead * c as u64 % p as u64;
                r[shift + i] = (r[shift + i] + p as u64 - sub) % p as u64;
            }
        }
    }
    if r.is_empty() {
        r.push(0);
    }
    trim(r.into_iter().map(|c| c as u32).collect())
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// True iff the monic `f` has no monic factor of degree `1..=deg/2` over `Z_p`.
pub fn is_irreducible(f: &[u32], p: u32) -> Result<bool, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let f = trim(f.iter().map(|c| c % p).collect());
    if f.len() < 2 || *f.last().unwrap() != 1 {
        return Err(FieldError::NotMonic);
    }
    let d = f.len() - 1;
    for k in 1..=d / 2 {
        // All monic polynomials of degree k.
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(k + 1);
            let mut x = idx;
            for _ in 0..k {
                g.push((x % p as u64) as u32);
                x /= p as u64;
            }
            g.push(1);
            if poly_is_zero(&poly_rem(&f, &g, p)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn poly_string(f: &[u32]) -> String {
    f.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug)]
struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    t: u16,
}

/// `F_q = Z_p[t]/f(t)` with `f` monic, irreducible, and different from `t`
/// and `t - 1`.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    f: Vec<u32>,
    q: u32,
    tables: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.f.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({self})")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.p, poly_string(&self.f))
    }
}

/// A field element in remainder representation, packed as `sum c_i p^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl FieldSpec {
    /// Builds the field, checking every structural requirement.
    pub fn new(p: u32, f: Vec<u32>) -> Result<FieldSpec, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let f = trim(f.into_iter().map(|c| c % p).collect());
        if f.len() < 2 || *f.last().unwrap() != 1 {
            return Err(FieldError::NotMonic);
        }
        let d = f.len() - 1;
        let q = (p as u64).pow(d as u32);
        if q > MAX_ORDER as u64 {
            return Err(FieldError::TooLarge(q));
        }
        // f = t or f = t - 1 would make t or 1 - t vanish.
        if d == 1 && (f[0] == 0 || f[0] == p - 1) {
            return Err(FieldError::Excluded(poly_string(&f)));
        }
        if !is_irreducible(&f, p)? {
            return Err(FieldError::Reducible(poly_string(&f), p));
        }
        let tables = Arc::new(build_tables(p, &f, q as u32));
        Ok(FieldSpec { p, f, q: q as u32, tables })
    }

    /// The dihedral preset `R_p`: `f = t + 1`, so `t` acts as `-1`.
    pub fn dihedral(p: u32) -> Result<FieldSpec, FieldError> {
        FieldSpec::new(p, vec![1, 1])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Coefficients of `f`, low to high, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The image of `t`.
    pub fn t(&self) -> FieldElement {
        FieldElement(self.tables.t)
    }

    /// Element from a coefficient vector (low to high), reduced mod `f` and `p`.
    pub fn element(&self, coeffs: &[u32]) -> FieldElement {
        let r = poly_rem(if coeffs.is_empty() { &[0] } else { coeffs }, &self.f, self.p);
        FieldElement(pack(&r, self.p) as u16)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        let c = n.rem_euclid(self.p as i64) as u32;
        FieldElement(c as u16)
    }

    /// Remainder coefficients of length `d`.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut x = a.0 as u32;
        (0..self.degree())
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    /// Enumerates all `q` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u16).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.tables.add[a.index() * self.q as usize + b.index()])
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.tables.neg[a.index()])
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.tables.mul[a.index() * self.q as usize + b.index()])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(FieldElement(self.tables.inv[a.index()]))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn build_tables(p: u32, f: &[u32], q: u32) -> Tables {
    let d = f.len() - 1;
    let unpack = |mut x: u32| -> Vec<u32> {
        (0..d)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    };
    let polys: Vec<Vec<u32>> = (0..q).map(unpack).collect();
    let n = q as usize;
    let mut add = vec![0u16; n * n];
    let mut mul = vec![0u16; n * n];
    let mut neg = vec![0u16; n];
    for a in 0..n {
        let pa = &polys[a];
        neg[a] = pack(&pa.iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p) as u16;
        for b in 0..n {
            let pb = &polys[b];
            let sum: Vec<u32> = pa.iter().zip(pb).map(|(&x, &y)| (x + y) % p).collect();
            add[a * n + b] = pack(&sum, p) as u16;
            let prod = poly_rem(&poly_mul(&trim(pa.clone()), &trim(pb.clone()), p), f, p);
            mul[a * n + b] = pack(&prod, p) as u16;
        }
    }
    let mut inv = vec![0u16; n];
    for a in 1..n {
        inv[a] = (1..n).find(|&b| mul[a * n + b] == 1).expect("field has inverses") as u16;
    }
    let t = pack(&poly_rem(&[0, 1], f, p), p) as u16;
    Tables { add, mul, neg, inv, t }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let syntax = || FieldError::Syntax(s.to_string());
        match s {
            "F4" => return FieldSpec::new(2, vec![1, 1, 1]),
            "F9" => return FieldSpec::new(3, vec![1, 0, 1]),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('R') {
            let p: u32 = rest.parse().map_err(|_| syntax())?;
            return FieldSpec::dihedral(p);
        }
        let (p, f) = s.split_once(':').ok_or_else(syntax)?;
        let p: u32 = p.trim().parse().map_err(|_| syntax())?;
        let f = f
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| syntax()))
            .collect::<Result<Vec<_>, _>>()?;
        FieldSpec::new(p, f)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated battery such as `R3,R5,F4` or `R3,3:1,0,1`.
/// Bare numbers following a `p:coeffs` entry continue its coefficient list.
pub fn parse_battery(s: &str) -> Result<Vec<FieldSpec>, FieldError> {
    let mut entries: Vec<String> = Vec::new();
    for token in s.split([',', ';']).map(str::trim) {
        if token.is_empty() {
            continue;
        }
        let continues = token.chars().all(|c| c.is_ascii_digit())
            && entries.last().is_some_and(|e| e.contains(':'));
        match entries.last_mut() {
            Some(last) if continues => {
                last.push(',');
                last.push_str(token);
            }
            _ => entries.push(token.to_string()),
        }
    }
    entries.iter().map(|e| e.parse()).collect()
}

/// R_3, R_5, R_7, F_4, F_9.
pub fn default_battery() -> Vec<FieldSpec> {
    ["R3", "R5", "R7", "F4", "F9"].iter().map(|s| s.parse().expect("preset")).collect()
}

/// Dense row-major matrix over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FqMatrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>, cols: usize) -> Self {
        let mut m = FqMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), cols, "rectangular matrix required");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(&row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Rank by Gaussian elimination with first-nonzero pivoting.
    pub fn rank(&self, field: &FieldSpec) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| !m[r * cols + c].is_zero()) else {
                continue;
            };
            if pivot != rank {
                for k in 0..cols {
                    m.swap(pivot * cols + k, rank * cols + k);
                }
            }
            let inv = field.inv(m[rank * cols + c]).expect("pivot is nonzero");
            for k in c..cols {
                m[rank * cols + k] = field.mul(m[rank * cols + k], inv);
            }
            for r in rank + 1..rows {
                let factor = m[r * cols + c];
                if factor.is_zero() {
                    continue;
                }
                for k in c..cols {
                    let v = field.mul(factor, m[rank * cols + k]);
                    m[r * cols + k] = field.sub(m[r * cols + k], v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Dimension of the right nullspace.
    pub fn nullity(&self, field: &FieldSpec) -> usize {
        self.cols - self.rank(field)
    }
}
