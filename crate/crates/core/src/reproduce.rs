//! The reproduction suite: each criterion recomputes a published identity
//! from scratch and reports pass, fail, budget or skipped.

use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::{brute_force_count, coloring_dim};
use crate::families::{a_family, b_family, bridge, corpus, torus2, wk};
use crate::ffield::{default_battery, FieldSpec};
use crate::gauss::GaussCode;
use crate::invariants::{triviality, warping_degree_both, VerdictValue};
use crate::moves::{apply, enumerate_moves, Move, MoveKind, MoveTrace};
use crate::search::{twist_distance_ub, ut_bounds, uw_upper, BoundCertificate, SearchBudget};

/// Default seed for every randomized suite.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Largest `q^(2n)` enumerated by the brute-force oracle.
pub const ORACLE_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct ReproduceConfig {
    pub fields: Vec<FieldSpec>,
    /// Overrides the per-criterion node budget.
    pub max_nodes: Option<usize>,
    /// Overrides the per-criterion flip depth.
    pub max_depth: Option<usize>,
    pub max_crossings: Option<usize>,
    pub seed: u64,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        ReproduceConfig {
            fields: default_battery(),
            max_nodes: None,
            max_depth: None,
            max_crossings: None,
            seed: DEFAULT_SEED,
        }
    }
}

impl ReproduceConfig {
    fn budget(&self, nodes: usize, depth: usize) -> SearchBudget {
        let d = SearchBudget::default();
        SearchBudget {
            max_nodes: self.max_nodes.unwrap_or(nodes),
            max_depth: self.max_depth.unwrap_or(depth),
            max_crossings: self.max_crossings.unwrap_or(d.max_crossings),
        }
    }

    fn has(&self, name: &str) -> bool {
        let f: FieldSpec = name.parse().expect("preset");
        self.fields.contains(&f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    /// The search budget ran out before the bound was reached.
    Budget,
    /// The configured battery lacks a field the criterion needs.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Budget => "budget",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub criterion: u32,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Fail)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{:>2}  {:<8} {:<42} {}", r.criterion, r.status, r.title, r.detail)?;
        }
        Ok(())
    }
}

fn preset(name: &str) -> FieldSpec {
    name.parse().expect("preset")
}

/// Runs every criterion in order.
pub fn run(config: &ReproduceConfig) -> Report {
    let mut rows = vec![b_gate(config), b_ut(config), bridge_ut(config), a_torus(config), wk_chain(config)];
    let flips = flip_suite(config.seed, 200);
    rows.push(Row {
        criterion: 6,
        title: "flip changes dim by at most 1",
        status: if flips.violations == 0 { Status::Pass } else { Status::Fail },
        detail: flips.to_string(),
    });
    let moves = move_invariance(config.seed, 500);
    rows.push(Row {
        criterion: 7,
        title: "welded moves preserve dim",
        status: if moves.violations == 0 { Status::Pass } else { Status::Fail },
        detail: moves.to_string(),
    });
    let oracle = oracle_equivalence(config.seed, 100);
    rows.push(Row {
        criterion: 8,
        title: "dim matches brute-force count",
        status: if oracle.violations == 0 { Status::Pass } else { Status::Fail },
        detail: oracle.to_string(),
    });
    rows.push(sandwich(config));
    rows.push(trefoil_row(config));
    Report { rows }
}

fn b_gate(config: &ReproduceConfig) -> Row {
    let title = "dim_R3 B(n) = n + 1, n = 1..6";
    if !config.has("R3") {
        return Row { criterion: 1, title, status: Status::Skipped, detail: "R3 not in battery".into() };
    }
    let r3 = preset("R3");
    let start = Instant::now();
    let dims: Vec<usize> = (1..=6).map(|n| coloring_dim(&b_family(n).expect("n >= 1"), &r3)).collect();
    let elapsed = start.elapsed();
    let ok = dims.iter().zip(2..).all(|(&d, want)| d == want) && elapsed.as_secs_f64() < 1.0;
    Row {
        criterion: 1,
        title,
        status: if ok { Status::Pass } else { Status::Fail },
        detail: format!("dims {dims:?} in {elapsed:.2?}"),
    }
}

/// Classifies a bound certificate against an exact expected value.
fn judge(cert: &BoundCertificate, want: usize) -> Status {
    if cert.verify().is_err() {
        return Status::Fail;
    }
    let lower = cert.lower.as_ref().map(|l| l.value);
    let upper = cert.upper.as_ref().map(|u| u.value);
    if lower.is_some_and(|l| l > want) || upper.is_some_and(|u| u < want) {
        return Status::Fail;
    }
    match upper {
        Some(u) if u == want && lower == Some(want) => Status::Pass,
        _ if cert.exhausted => Status::Budget,
        _ => Status::Fail,
    }
}

fn worst(statuses: impl IntoIterator<Item = Status>) -> Status {
    let all: Vec<Status> = statuses.into_iter().collect();
    for s in [Status::Fail, Status::Skipped, Status::Budget] {
        if all.contains(&s) {
            return s;
        }
    }
    Status::Pass
}

fn fmt_bounds(cert: &BoundCertificate) -> String {
    let show = |v: Option<usize>| v.map_or("?".to_string(), |v| v.to_string());
    format!(
        "[{}, {}]",
        show(cert.lower.as_ref().map(|l| l.value)),
        show(cert.upper.as_ref().map(|u| u.value))
    )
}

fn b_ut(config: &ReproduceConfig) -> Row {
    let title = "ut(B(n)) = n, n = 1..4";
    if !config.has("R3") {
        return Row { criterion: 2, title, status: Status::Skipped, detail: "R3 not in battery".into() };
    }
    let mut statuses = Vec::new();
    let mut parts = Vec::new();
    for n in 1..=4u32 {
        let cert = ut_bounds(&b_family(n).expect("n >= 1"), &config.fields, &config.budget(100_000, n as usize + 1));
        statuses.push(judge(&cert, n as usize));
        parts.push(format!("B{n} {}", fmt_bounds(&cert)));
    }
    Row { criterion: 2, title, status: worst(statuses), detail: parts.join(", ") }
}

/// Primes tried when looking for a dihedral witness of nontriviality.
const DIHEDRAL_PRIMES: [u32; 6] = [3, 5, 7, 11, 13, 17];

fn bridge_ut(config: &ReproduceConfig) -> Row {
    let title = "Bridge(n) nontrivial, ut = 1, n = 1..3";
    let start = Instant::now();
    let mut statuses = Vec::new();
    let mut parts = Vec::new();
    for n in 1..=3u32 {
        let code = bridge(n).expect("n >= 1");
        let budget = config.budget(100_000, 4);
        let verdict = triviality(&code, &config.fields, &budget).map(|v| v.value);
        let dihedral = DIHEDRAL_PRIMES
            .iter()
            .find(|&&p| coloring_dim(&code, &FieldSpec::dihedral(p).expect("prime")) >= 2);
        let cert = ut_bounds(&code, &config.fields, &budget);
        let status = match (verdict, dihedral) {
            (Ok(VerdictValue::Nontrivial), Some(_)) => judge(&cert, 1),
            // The configured battery cannot certify the lower bound.
            (Ok(VerdictValue::Unknown), Some(_)) => Status::Skipped,
            _ => Status::Fail,
        };
        statuses.push(status);
        let witness = dihedral.map_or("none".into(), |p| format!("R{p}"));
        parts.push(format!("Bridge{n} {} via {witness}", fmt_bounds(&cert)));
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 10.0 {
        statuses.push(Status::Fail);
    }
    Row { criterion: 3, title, status: worst(statuses), detail: format!("{} in {elapsed:.2?}", parts.join(", ")) }
}

fn a_torus(config: &ReproduceConfig) -> Row {
    let title = "d_T(A(2n), T(2, 2n-1)) = 1, n = 2, 3";
    let mut statuses = Vec::new();
    let mut parts = Vec::new();
    for n in 2..=3u32 {
        let a = a_family(n).expect("n >= 1");
        let t = torus2(2 * n - 1).expect("odd");
        let cert = twist_distance_ub(&a, &t, &config.fields, &config.budget(100_000, 4));
        let status = match (&cert.upper, cert.verify()) {
            (_, Err(_)) => Status::Fail,
            (Some(u), Ok(())) if u.value == 1 => Status::Pass,
            (Some(_), Ok(())) => Status::Fail,
            (None, Ok(())) if cert.exhausted => Status::Budget,
            (None, Ok(())) => Status::Fail,
        };
        statuses.push(status);
        parts.push(format!("A{} {}", 2 * n, fmt_bounds(&cert)));
    }
    Row { criterion: 4, title, status: worst(statuses), detail: parts.join(", ") }
}

/// A replayable trace from `WK(n)` to a code equivalent to `WK(m)` whose only
/// twist flips the first braid crossing of block `m + 1`. The flag reports
/// whether the search after the flip ran out of budget.
pub fn wk_one_flip_trace(n: u32, m: u32, fields: &[FieldSpec], budget: &SearchBudget) -> (Option<MoveTrace>, bool) {
    if m >= n {
        return (None, false);
    }
    let Ok(mut trace) = MoveTrace::from_steps(wk(n), vec![Move::TwistFlip { label: 6 * m + 1 }]) else {
        return (None, false);
    };
    let rest = twist_distance_ub(&trace.end, &wk(m), fields, budget);
    let Some(tail) = rest.upper.filter(|u| u.value == 0) else {
        return (None, rest.exhausted);
    };
    (trace.append(&tail.trace).ok().map(|()| trace), false)
}

fn wk_chain(config: &ReproduceConfig) -> Row {
    let title = "d_T(WK(n), WK(m)) <= 1, dims 1";
    let mut statuses = Vec::new();
    let mut parts = Vec::new();
    for n in 1..=3u32 {
        for m in 0..n {
            let budget = config.budget(100_000, 4);
            let cert = twist_distance_ub(&wk(n), &wk(m), &config.fields, &budget);
            let search = match (&cert.upper, cert.verify()) {
                (_, Err(_)) => Status::Fail,
                (Some(u), Ok(())) if u.value <= 1 => Status::Pass,
                (Some(_), Ok(())) => Status::Fail,
                (None, Ok(())) if cert.exhausted => Status::Budget,
                (None, Ok(())) => Status::Fail,
            };
            let (trace, exhausted) = wk_one_flip_trace(n, m, &config.fields, &budget);
            let one_flip = trace.is_some_and(|t| {
                t.verify().is_ok() && t.flips() == 1 && t.end.canonical_key() == wk(m).canonical_key()
            });
            statuses.push(search);
            statuses.push(match (one_flip, exhausted) {
                (true, _) => Status::Pass,
                (false, true) => Status::Budget,
                (false, false) => Status::Fail,
            });
            let found = cert.upper.as_ref().map_or("?".into(), |u| u.value.to_string());
            parts.push(format!("WK{n}-WK{m} {found}{}", if one_flip { " (1-flip trace ok)" } else { " (no 1-flip trace)" }));
        }
    }
    let dims_ok = (0..=3).all(|n| ["R3", "R5", "R7"].iter().all(|f| coloring_dim(&wk(n), &preset(f)) == 1));
    if !dims_ok {
        statuses.push(Status::Fail);
    }
    Row {
        criterion: 5,
        title,
        status: worst(statuses),
        detail: format!("search d_T {}; dims_R3,R5,R7 = 1: {dims_ok}", parts.join(" ")),
    }
}

/// Outcome of a randomized suite.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteResult {
    pub trials: usize,
    pub checks: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

impl SuiteResult {
    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(describe());
            }
        }
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} trials, {} checks, {} violations", self.trials, self.checks, self.violations)?;
        if let Some(v) = &self.first_violation {
            write!(f, " (first: {v})")?;
        }
        Ok(())
    }
}

/// Random codes with up to 8 crossings, one random flip each, compared over
/// R3, R5, F4 and F9.
pub fn flip_suite(seed: u64, trials: usize) -> SuiteResult {
    let fields: Vec<FieldSpec> = ["R3", "R5", "F4", "F9"].iter().map(|s| preset(s)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteResult { trials, ..Default::default() };
    for _ in 0..trials {
        let n = rng.gen_range(1..=8);
        let code = GaussCode::random(&mut rng, n);
        let label = rng.gen_range(1..=n as u32);
        let flipped = apply(&code, &Move::TwistFlip { label }).expect("label exists");
        for f in &fields {
            let (a, b) = (coloring_dim(&code, f), coloring_dim(&flipped, f));
            out.record(a.abs_diff(b) <= 1, || format!("{code} flip {label} over {f}: {a} -> {b}"));
        }
    }
    out
}

/// Random (code, welded move, field) triples.
pub fn move_invariance(seed: u64, trials: usize) -> SuiteResult {
    let fields = default_battery();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut out = SuiteResult { trials, ..Default::default() };
    for _ in 0..trials {
        let n = rng.gen_range(0..=6);
        let code = GaussCode::random(&mut rng, n);
        // Pick the kind first so rarely applicable kinds still get sampled.
        let kinds: Vec<MoveKind> =
            MoveKind::WELDED.iter().copied().filter(|&k| !enumerate_moves(&code, &[k]).is_empty()).collect();
        let kind = *kinds.choose(&mut rng).expect("insertions always apply");
        let mv = enumerate_moves(&code, &[kind]).choose(&mut rng).cloned().expect("nonempty");
        let after = apply(&code, &mv).expect("enumerated moves apply");
        let f = fields.choose(&mut rng).expect("nonempty battery");
        let (a, b) = (coloring_dim(&code, f), coloring_dim(&after, f));
        out.record(a == b, || format!("{code} {mv:?} over {f}: {a} -> {b}"));
    }
    out
}

/// Linear algebra against direct enumeration for the corpus and `random`
/// random codes, wherever `q^(2n)` stays within [`ORACLE_LIMIT`].
pub fn oracle_equivalence(seed: u64, random: usize) -> SuiteResult {
    let fields = default_battery();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut codes: Vec<GaussCode> = corpus(3).into_iter().map(|(_, c)| c).collect();
    codes.push(GaussCode::empty());
    for _ in 0..random {
        let n = rng.gen_range(0..=6);
        codes.push(GaussCode::random(&mut rng, n));
    }
    let mut out = SuiteResult { trials: codes.len(), ..Default::default() };
    for code in &codes {
        for f in &fields {
            let Some(count) = brute_force_count(code, f, ORACLE_LIMIT) else { continue };
            let dim = coloring_dim(code, f);
            let expect = (f.order() as u64).checked_pow(dim as u32);
            out.record(expect == Some(count), || format!("{code} over {f}: dim {dim}, count {count}"));
        }
    }
    out
}

fn sandwich(config: &ReproduceConfig) -> Row {
    let title = "uw/2 <= ut <= wd_both where determined";
    let mut statuses = Vec::new();
    let mut parts = Vec::new();
    let mut subjects: Vec<(String, GaussCode, usize)> = Vec::new();
    if config.has("R3") {
        subjects.extend((1..=4).map(|n| (format!("B{n}"), b_family(n).expect("n >= 1"), n as usize + 1)));
    }
    subjects.extend((1..=3).map(|n| (format!("Bridge{n}"), bridge(n).expect("n >= 1"), 4)));
    for (name, code, depth) in subjects {
        let budget = config.budget(100_000, depth);
        let ut = ut_bounds(&code, &config.fields, &budget);
        if !ut.is_determined() {
            statuses.push(Status::Budget);
            parts.push(format!("{name} ut undetermined"));
            continue;
        }
        let ut = ut.upper.expect("determined").value;
        let uw = uw_upper(&code, &config.fields, &budget);
        let wd = warping_degree_both(&code);
        let status = match &uw.upper {
            _ if uw.verify().is_err() => Status::Fail,
            Some(u) if u.value <= 2 * ut && ut <= wd => Status::Pass,
            Some(_) => Status::Fail,
            None if ut <= wd => Status::Budget,
            None => Status::Fail,
        };
        statuses.push(status);
        let uw = uw.upper.map_or("?".into(), |u| u.value.to_string());
        parts.push(format!("{name} {uw}/2 <= {ut} <= {wd}"));
    }
    Row { criterion: 9, title, status: worst(statuses), detail: parts.join(", ") }
}

fn trefoil_row(config: &ReproduceConfig) -> Row {
    let title = "trefoil ut certificate (1, 1)";
    if !config.has("R3") {
        return Row { criterion: 10, title, status: Status::Skipped, detail: "R3 not in battery".into() };
    }
    let code = torus2(3).expect("odd");
    let cert = ut_bounds(&code, &config.fields, &config.budget(100_000, 4));
    let flips_ok = cert.upper.as_ref().is_some_and(|u| u.trace.flips() == 1);
    let status = match judge(&cert, 1) {
        Status::Pass if !flips_ok => Status::Fail,
        s => s,
    };
    Row { criterion: 10, title, status, detail: fmt_bounds(&cert) }
}
