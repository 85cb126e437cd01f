//! Signed Gauss codes: the only diagram representation in the crate.
//!
//! A code is a cyclic word of passes. Every classical crossing contributes one
//! over-pass and one under-pass carrying the crossing's sign. Welded crossings
//! are not recorded at all; the detour move makes their placement irrelevant.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strand {
    #[serde(rename = "O")]
    Over,
    #[serde(rename = "U")]
    Under,
}

impl Strand {
    pub fn flipped(self) -> Strand {
        match self {
            Strand::Over => Strand::Under,
            Strand::Under => Strand::Over,
        }
    }

    fn letter(self) -> char {
        match self {
            Strand::Over => 'O',
            Strand::Under => 'U',
        }
    }
}

/// Crossing sign. Serialized as the integers `1` and `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn negated(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn from_orientation(value: i64) -> Option<Sign> {
        match value.signum() {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(value: i8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(sign: Sign) -> i8 {
        match sign {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// One visit of the knot to a classical crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pass {
    pub label: u32,
    pub strand: Strand,
    pub sign: Sign,
}

impl Pass {
    pub fn new(label: u32, strand: Strand, sign: Sign) -> Self {
        Pass { label, strand, sign }
    }

    pub fn over(label: u32, sign: Sign) -> Self {
        Pass::new(label, Strand::Over, sign)
    }

    pub fn under(label: u32, sign: Sign) -> Self {
        Pass::new(label, Strand::Under, sign)
    }
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.strand.letter(), self.label, self.sign.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("LabelCountError: label {label} occurs {count} time(s), expected exactly 2")]
    LabelCount { label: u32, count: usize },
    #[error("StrandError: label {label} needs one over-pass and one under-pass")]
    Strand { label: u32 },
    #[error("SignMismatch: the two passes of label {label} disagree on sign")]
    SignMismatch { label: u32 },
    #[error("ParseError: {0}")]
    Parse(String),
}

/// A validated, label-normalized signed Gauss code.
///
/// Labels are always `1..=n`. Normalization compacts labels while keeping
/// their relative order, so a move that does not delete crossings never
/// renames anything.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct GaussCode {
    passes: Vec<Pass>,
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    passes: Vec<Pass>,
}

impl TryFrom<RawCode> for GaussCode {
    type Error = GaussError;

    fn try_from(raw: RawCode) -> Result<Self, Self::Error> {
        validate(raw.passes)
    }
}

impl From<GaussCode> for RawCode {
    fn from(code: GaussCode) -> Self {
        RawCode { passes: code.passes }
    }
}

/// Checks label multiplicities, strand roles and signs, then compacts labels
/// to `1..=n` preserving their order.
pub fn validate(raw: Vec<Pass>) -> Result<GaussCode, GaussError> {
    let mut seen: HashMap<u32, Vec<Pass>> = HashMap::new();
    for pass in &raw {
        if pass.label == 0 {
            return Err(GaussError::Parse("crossing labels must be positive".into()));
        }
        seen.entry(pass.label).or_default().push(*pass);
    }
    let mut labels: Vec<u32> = seen.keys().copied().collect();
    labels.sort_unstable();
    for &label in &labels {
        let group = &seen[&label];
        if group.len() != 2 {
            return Err(GaussError::LabelCount { label, count: group.len() });
        }
        if group[0].strand == group[1].strand {
            return Err(GaussError::Strand { label });
        }
        if group[0].sign != group[1].sign {
            return Err(GaussError::SignMismatch { label });
        }
    }
    Ok(GaussCode::compacted(raw))
}

impl GaussCode {
    pub fn empty() -> Self {
        GaussCode { passes: Vec::new() }
    }

    /// Relabels to `1..=n` preserving relative label order. Callers guarantee
    /// the pass multiset is already well formed.
    pub(crate) fn compacted(mut passes: Vec<Pass>) -> Self {
        let mut labels: Vec<u32> = passes.iter().map(|p| p.label).collect();
        labels.sort_unstable();
        labels.dedup();
        let contiguous = labels.iter().enumerate().all(|(i, &l)| l as usize == i + 1);
        if !contiguous {
            let rank: HashMap<u32, u32> =
                labels.iter().enumerate().map(|(i, &l)| (l, i as u32 + 1)).collect();
            for p in &mut passes {
                p.label = rank[&p.label];
            }
        }
        GaussCode { passes }
    }

    pub fn passes(&self) -> &[Pass] {
        &self.passes
    }

    /// Number of classical crossings.
    pub fn n(&self) -> usize {
        self.passes.len() / 2
    }

    /// Number of passes (`2n`).
    pub fn len(&self) -> usize {
        self.passes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passes.is_empty()
    }

    /// `(over position, under position)` for every label, indexed by `label - 1`.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(usize::MAX, usize::MAX); self.n()];
        for (i, p) in self.passes.iter().enumerate() {
            let slot = &mut out[p.label as usize - 1];
            match p.strand {
                Strand::Over => slot.0 = i,
                Strand::Under => slot.1 = i,
            }
        }
        out
    }

    pub fn sign_of(&self, label: u32) -> Option<Sign> {
        self.passes.iter().find(|p| p.label == label).map(|p| p.sign)
    }

    pub fn labels(&self) -> impl Iterator<Item = u32> {
        1..=self.n() as u32
    }

    /// Reverses the orientation. Strand roles and signs are unchanged because
    /// reversing both strands at a crossing preserves its sign.
    pub fn reverse(&self) -> GaussCode {
        let mut passes = self.passes.clone();
        passes.reverse();
        GaussCode { passes }
    }

    /// The same cyclic word read from position `k`.
    pub fn rotated(&self, k: usize) -> GaussCode {
        if self.passes.is_empty() {
            return self.clone();
        }
        let mut passes = self.passes.clone();
        passes.rotate_left(k % self.passes.len());
        GaussCode { passes }
    }

    /// Rotation- and relabeling-invariant key. Orientation reversal and
    /// mirroring are deliberately not folded in.
    pub fn canonical_key(&self) -> CanonicalKey {
        let m = self.passes.len();
        if m == 0 {
            return CanonicalKey(Vec::new());
        }
        let mut best: Option<Vec<u8>> = None;
        let mut buf = Vec::with_capacity(3 * m);
        let mut relabel = vec![0u16; self.n() + 1];
        for start in 0..m {
            buf.clear();
            relabel.iter_mut().for_each(|x| *x = 0);
            let mut next = 1u16;
            for i in 0..m {
                let p = self.passes[(start + i) % m];
                let slot = &mut relabel[p.label as usize];
                if *slot == 0 {
                    *slot = next;
                    next += 1;
                }
                buf.extend_from_slice(&slot.to_be_bytes());
                let strand_bit = if p.strand == Strand::Over { 0 } else { 1 };
                let sign_bit = if p.sign == Sign::Pos { 0 } else { 2 };
                buf.push(strand_bit | sign_bit);
                if let Some(b) = &best {
                    // Prefix already larger: this rotation cannot win.
                    if buf.as_slice() > &b[..buf.len()] {
                        break;
                    }
                }
            }
            if buf.len() == 3 * m && best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        CanonicalKey(best.unwrap_or_default())
    }

    /// Uniformly shuffled code with `n` crossings and random strands and signs.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GaussCode {
        let mut slots: Vec<usize> = (0..2 * n).collect();
        slots.shuffle(rng);
        let mut passes = vec![Pass::over(1, Sign::Pos); 2 * n];
        for label in 0..n {
            let sign = if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg };
            let (a, b) = (slots[2 * label], slots[2 * label + 1]);
            let (o, u) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            passes[o] = Pass::over(label as u32 + 1, sign);
            passes[u] = Pass::under(label as u32 + 1, sign);
        }
        GaussCode::compacted(passes)
    }

    /// Parses either the text format or the JSON format.
    pub fn parse_any(input: &str) -> Result<GaussCode, GaussError> {
        if input.trim_start().starts_with('{') {
            serde_json::from_str(input).map_err(|e| {
                // serde wraps our own errors; surface them verbatim.
                GaussError::Parse(e.to_string())
            })
        } else {
            input.parse()
        }
    }
}

impl FromStr for GaussCode {
    type Err = GaussError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        validate(parse_passes(s)?)
    }
}

/// Tokenizes the text format without validating crossing structure.
/// Tokens may be separated by whitespace or written back to back.
pub fn parse_passes(s: &str) -> Result<Vec<Pass>, GaussError> {
    let mut out = Vec::new();
    for line in s.lines() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == ',' {
                i += 1;
                continue;
            }
            let strand = match c {
                'O' | 'o' => Strand::Over,
                'U' | 'u' => Strand::Under,
                other => {
                    return Err(GaussError::Parse(format!(
                        "unexpected character {other:?} (expected O or U)"
                    )))
                }
            };
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(GaussError::Parse(format!("missing crossing label after {c}")));
            }
            let digits: String = chars[start..i].iter().collect();
            let label: u32 = digits
                .parse()
                .map_err(|_| GaussError::Parse(format!("label {digits} out of range")))?;
            let sign = match chars.get(i) {
                Some('+') => Sign::Pos,
                Some('-') | Some('\u{2212}') => Sign::Neg,
                _ => {
                    return Err(GaussError::Parse(format!(
                        "missing sign after {c}{digits} (expected + or -)"
                    )))
                }
            };
            i += 1;
            out.push(Pass::new(label, strand, sign));
        }
    }
    Ok(out)
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.passes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Byte key identifying a code up to rotation and relabeling.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trefoil() -> GaussCode {
        "O1+ U2+ O3+ U1+ O2+ U3+".parse().unwrap()
    }

    #[test]
    fn parses_trefoil() {
        let t = trefoil();
        assert_eq!(t.n(), 3);
        assert_eq!(t.to_string(), "O1+ U2+ O3+ U1+ O2+ U3+");
        let packed: GaussCode = "O1+U2+O3+U1+O2+U3+".parse().unwrap();
        assert_eq!(packed, t);
    }

    #[test]
    fn empty_input_is_unknot() {
        let e: GaussCode = "".parse().unwrap();
        assert_eq!(e.n(), 0);
        let commented: GaussCode = "# nothing here\n".parse().unwrap();
        assert!(commented.is_empty());
    }

    #[test]
    fn malformed_codes_are_rejected() {
        assert_eq!("O1+ O1+".parse::<GaussCode>(), Err(GaussError::Strand { label: 1 }));
        assert_eq!(
            "O1+ U2+".parse::<GaussCode>(),
            Err(GaussError::LabelCount { label: 1, count: 1 })
        );
        assert_eq!("O1+ U1-".parse::<GaussCode>(), Err(GaussError::SignMismatch { label: 1 }));
        assert!(matches!("X1+".parse::<GaussCode>(), Err(GaussError::Parse(_))));
        assert!(matches!("O1".parse::<GaussCode>(), Err(GaussError::Parse(_))));
        assert!(matches!("O0+ U0+".parse::<GaussCode>(), Err(GaussError::Parse(_))));
    }

    #[test]
    fn unicode_minus_is_accepted() {
        let c: GaussCode = "O1+ O2\u{2212} U1+ U2\u{2212}".parse().unwrap();
        assert_eq!(c.to_string(), "O1+ O2- U1+ U2-");
    }

    #[test]
    fn labels_are_compacted_in_order() {
        let c: GaussCode = "O7+ U3- O3- U7+".parse().unwrap();
        assert_eq!(c.to_string(), "O2+ U1- O1- U2+");
    }

    #[test]
    fn json_round_trip() {
        let t = trefoil();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.starts_with(r#"{"passes":[{"label":1,"strand":"O","sign":1}"#));
        assert_eq!(GaussCode::parse_any(&json).unwrap(), t);
        let bad = r#"{"passes":[{"label":1,"strand":"O","sign":1},{"label":1,"strand":"O","sign":1}]}"#;
        assert!(GaussCode::parse_any(bad).is_err());
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(GaussCode::empty().reverse(), GaussCode::empty());
        let c: GaussCode = "O1+ U1+".parse().unwrap();
        assert_eq!(c.reverse().to_string(), "U1+ O1+");
    }

    #[test]
    fn canonical_key_examples() {
        let t = trefoil();
        for k in 0..6 {
            assert_eq!(t.rotated(k).canonical_key(), t.canonical_key());
        }
        assert_ne!(t.canonical_key(), GaussCode::empty().canonical_key());
        // Computed independently; no equality is claimed either way.
        let _ = t.reverse().canonical_key();
    }

    #[test]
    fn key_distinguishes_signs() {
        let a: GaussCode = "O1+ U2+ O3+ U1+ O2+ U3+".parse().unwrap();
        let b: GaussCode = "O1- U2- O3- U1- O2- U3-".parse().unwrap();
        assert_ne!(a.canonical_key(), b.canonical_key());
    }

    fn arb_code() -> impl Strategy<Value = GaussCode> {
        (0usize..9, any::<u64>()).prop_map(|(n, seed)| {
            GaussCode::random(&mut ChaCha8Rng::seed_from_u64(seed), n)
        })
    }

    proptest! {
        #[test]
        fn key_is_rotation_and_relabel_invariant(code in arb_code(), r in 0usize..20, seed in any::<u64>()) {
            let rotated = code.rotated(r);
            prop_assert_eq!(rotated.canonical_key(), code.canonical_key());
            // Random relabeling through a permutation of labels.
            let mut perm: Vec<u32> = code.labels().collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let relabeled: Vec<Pass> = code.passes().iter()
                .map(|p| Pass::new(perm[p.label as usize - 1], p.strand, p.sign))
                .collect();
            prop_assert_eq!(validate(relabeled).unwrap().canonical_key(), code.canonical_key());
        }

        #[test]
        fn text_and_json_round_trip(code in arb_code()) {
            prop_assert_eq!(code.to_string().parse::<GaussCode>().unwrap(), code.clone());
            let json = serde_json::to_string(&code).unwrap();
            prop_assert_eq!(GaussCode::parse_any(&json).unwrap(), code);
        }

        #[test]
        fn reverse_is_an_involution(code in arb_code()) {
            prop_assert_eq!(code.reverse().reverse(), code.clone());
            prop_assert_eq!(code.reverse().reverse().canonical_key(), code.canonical_key());
        }
    }
}
