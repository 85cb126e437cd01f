//! Acceptance criteria, one printed pass/fail line each. Coloring counts are
//! checked against a brute-force enumerator written here from scratch, and
//! every trace is replayed step by step.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wknot::families::{a_family, b_family, bridge, corpus, torus2, wk};
use wknot::ffield::default_battery;
use wknot::reproduce::{flip_suite, move_invariance, oracle_equivalence, wk_one_flip_trace};
use wknot::search::SearchBudget;
use wknot::{
    apply, coloring_dim, twist_distance_ub, ut_bounds, uw_upper, warping_degree_both, FieldSpec, GaussCode,
    MoveTrace, Sign, Strand,
};

/// `GF(p)` or `GF(p^2)` with elements `a + b t`, `t^2 = -(c1 t + c0)`.
#[derive(Clone, Copy)]
struct SmallField {
    p: u64,
    /// `None` for a prime field where `t = t0`.
    quad: Option<(u64, u64)>,
    t0: u64,
}

type El = (u64, u64);

impl SmallField {
    fn dihedral(p: u64) -> Self {
        SmallField { p, quad: None, t0: p - 1 }
    }

    fn quadratic(p: u64, c0: u64, c1: u64) -> Self {
        SmallField { p, quad: Some((c0, c1)), t0: 0 }
    }

    fn order(&self) -> u64 {
        if self.quad.is_some() { self.p * self.p } else { self.p }
    }

    fn element(&self, i: u64) -> El {
        if self.quad.is_some() { (i % self.p, i / self.p) } else { (i, 0) }
    }

    fn t(&self) -> El {
        if self.quad.is_some() { (0, 1) } else { (self.t0, 0) }
    }

    fn add(&self, x: El, y: El) -> El {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn sub(&self, x: El, y: El) -> El {
        ((x.0 + self.p - y.0) % self.p, (x.1 + self.p - y.1) % self.p)
    }

    fn mul(&self, x: El, y: El) -> El {
        let p = self.p;
        match self.quad {
            None => (x.0 * y.0 % p, 0),
            Some((c0, c1)) => {
                // (a + b t)(c + d t) = ac + (ad + bc) t + bd t^2.
                let bd = x.1 * y.1 % p;
                let lin = (x.0 * y.1 + x.1 * y.0) % p;
                let con = x.0 * y.0 % p;
                ((con + p * p - bd * c0 % p) % p, (lin + p * p - bd * c1 % p) % p)
            }
        }
    }

    fn inv(&self, x: El) -> El {
        (0..self.order()).map(|i| self.element(i)).find(|&y| self.mul(x, y) == (1, 0)).expect("invertible")
    }

    /// `x * y` for a crossing of the given sign acting with over color `y`.
    fn act(&self, x: El, y: El, sign: Sign) -> El {
        let t = if sign == Sign::Pos { self.t() } else { self.inv(self.t()) };
        self.add(self.mul(t, x), self.mul(self.sub((1, 0), t), y))
    }
}

/// Number of colorings by enumerating all semi-arc colors, or `None` above
/// a million assignments.
fn oracle_count(code: &GaussCode, f: &SmallField) -> Option<u64> {
    let passes = code.passes();
    let m = passes.len();
    if m == 0 {
        return Some(f.order());
    }
    let total = f.order().checked_pow(m as u32).filter(|&t| t <= 1_000_000)?;
    let mut over_at = vec![0; code.n() + 1];
    let mut under_at = vec![0; code.n() + 1];
    for (i, pass) in passes.iter().enumerate() {
        match pass.strand {
            Strand::Over => over_at[pass.label as usize] = i,
            Strand::Under => under_at[pass.label as usize] = i,
        }
    }
    let before = |i: usize| if i == 0 { m - 1 } else { i - 1 };
    let mut count = 0;
    for idx in 0..total {
        let mut rest = idx;
        let colors: Vec<El> = (0..m)
            .map(|_| {
                let c = f.element(rest % f.order());
                rest /= f.order();
                c
            })
            .collect();
        let ok = (1..=code.n()).all(|l| {
            let (o, u) = (over_at[l], under_at[l]);
            colors[o] == colors[before(o)]
                && colors[u] == f.act(colors[before(u)], colors[before(o)], passes[o].sign)
        });
        count += ok as u64;
    }
    Some(count)
}

fn oracle_fields() -> Vec<(SmallField, FieldSpec)> {
    let lib = |s: &str| s.parse::<FieldSpec>().unwrap();
    vec![
        (SmallField::dihedral(3), lib("R3")),
        (SmallField::dihedral(5), lib("R5")),
        (SmallField::dihedral(7), lib("R7")),
        (SmallField::quadratic(2, 1, 1), lib("F4")),
        (SmallField::quadratic(3, 1, 0), lib("F9")),
    ]
}

/// Re-applies a trace one move at a time.
fn replays(trace: &MoveTrace) -> bool {
    let mut cur = trace.start.clone();
    for m in &trace.steps {
        match apply(&cur, m) {
            Ok(next) => cur = next,
            Err(_) => return false,
        }
    }
    cur == trace.end
}

struct Outcome {
    results: Vec<(u32, bool)>,
}

impl Outcome {
    fn report(&mut self, n: u32, ok: bool, detail: String) {
        println!("criterion {n:>2}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        self.results.push((n, ok));
    }
}

fn budget(nodes: usize, depth: usize) -> SearchBudget {
    SearchBudget { max_nodes: nodes, max_depth: depth, ..SearchBudget::default() }
}

#[test]
fn acceptance() {
    let battery = default_battery();
    let r3: FieldSpec = "R3".parse().unwrap();
    let mut out = Outcome { results: Vec::new() };

    // 1. B(n) coloring gate.
    let start = Instant::now();
    let dims: Vec<usize> = (1..=6).map(|n| coloring_dim(&b_family(n).unwrap(), &r3)).collect();
    let elapsed = start.elapsed();
    let oracle_b1 = oracle_count(&b_family(1).unwrap(), &SmallField::dihedral(3));
    let ok = dims == [2, 3, 4, 5, 6, 7] && elapsed.as_secs_f64() < 1.0 && oracle_b1 == Some(9);
    out.report(1, ok, format!("dim_R3 B(1..6) = {dims:?} in {elapsed:.2?}; brute force B(1) = {oracle_b1:?}"));

    // 2. ut(B(n)) = n.
    let mut ok = true;
    let mut parts = Vec::new();
    let mut ut_b = Vec::new();
    for n in 1..=4u32 {
        let cert = ut_bounds(&b_family(n).unwrap(), &battery, &budget(100_000, n as usize + 1));
        let (l, u) = (cert.lower.as_ref().map(|l| l.value), cert.upper.as_ref().map(|u| u.value));
        let trace_ok = cert
            .upper
            .as_ref()
            .is_some_and(|u| replays(&u.trace) && u.trace.end.is_empty() && u.trace.flips() == n as usize);
        ok &= l == Some(n as usize) && u == Some(n as usize) && trace_ok && cert.verify().is_ok();
        ut_b.push(u);
        parts.push(format!("B{n} [{l:?}, {u:?}]"));
    }
    out.report(2, ok, parts.join(", "));

    // 3. Bridge(n): nontrivial by a dihedral prime, ut = 1, under 10 s.
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut ut_bridge = Vec::new();
    for n in 1..=3u32 {
        let code = bridge(n).unwrap();
        let witness = [3u32, 5, 7, 11, 13]
            .into_iter()
            .find(|&p| coloring_dim(&code, &FieldSpec::dihedral(p).unwrap()) >= 2);
        let cert = ut_bounds(&code, &battery, &budget(100_000, 4));
        let one_flip = cert.upper.as_ref().is_some_and(|u| u.value == 1 && u.trace.flips() == 1 && replays(&u.trace));
        let determined = cert.lower.as_ref().map(|l| l.value) == Some(1);
        ok &= witness.is_some() && one_flip && determined && cert.verify().is_ok();
        ut_bridge.push(if one_flip && determined { Some(1) } else { None });
        parts.push(format!("Bridge{n} witness R{}", witness.unwrap_or(0)));
    }
    // The smallest member is checked against the enumerator too.
    let b1_count = oracle_count(&bridge(1).unwrap(), &SmallField::dihedral(5));
    ok &= b1_count == Some(25);
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 10.0;
    out.report(3, ok, format!("{}, ut = 1 each; brute force R5 Bridge1 = {b1_count:?}; {elapsed:.2?}", parts.join(", ")));

    // 4. A(2n) to T(2, 2n - 1).
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=3u32 {
        let target = torus2(2 * n - 1).unwrap();
        let cert = twist_distance_ub(&a_family(n).unwrap(), &target, &battery, &budget(100_000, 4));
        let good = cert.upper.as_ref().is_some_and(|u| {
            u.value == 1
                && u.trace.flips() == 1
                && replays(&u.trace)
                && u.trace.end.canonical_key() == target.canonical_key()
        });
        ok &= good && cert.verify().is_ok();
        parts.push(format!("A{} -> T(2,{}) upper {:?}", 2 * n, 2 * n - 1, cert.upper.as_ref().map(|u| u.value)));
    }
    out.report(4, ok, parts.join(", "));

    // 5. WK chain.
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3u32 {
        for m in 0..n {
            let cert = twist_distance_ub(&wk(n), &wk(m), &battery, &SearchBudget::default());
            let search = cert.upper.as_ref().map(|u| u.value);
            let (trace, _) = wk_one_flip_trace(n, m, &battery, &SearchBudget::default());
            let one_flip = trace.as_ref().is_some_and(|t| {
                t.start == wk(n)
                    && t.flips() == 1
                    && replays(t)
                    && t.end.canonical_key() == wk(m).canonical_key()
            });
            ok &= search.is_some_and(|v| v <= 1) && cert.verify().is_ok() && one_flip;
            parts.push(format!("WK{n}-WK{m}: search {search:?}, one-flip trace {one_flip}"));
        }
    }
    let dims_ok = (0..=3).all(|n| {
        ["R3", "R5", "R7"].iter().all(|f| coloring_dim(&wk(n), &f.parse().unwrap()) == 1)
    });
    ok &= dims_ok;
    out.report(5, ok, format!("{}; dims 1 over R3,R5,R7: {dims_ok}", parts.join("; ")));

    // 6. Flip lemma.
    let flips = flip_suite(7, 200);
    out.report(6, flips.violations == 0 && flips.checks == 800, flips.to_string());

    // 7. Move invariance.
    let moves = move_invariance(7, 500);
    out.report(7, moves.violations == 0 && moves.checks == 500, moves.to_string());

    // 8. Linear algebra against the enumerator written here.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut codes: Vec<GaussCode> = corpus(3).into_iter().map(|(_, c)| c).collect();
    codes.push(GaussCode::empty());
    codes.extend((0..150).map(|_| {
        let n = rng.gen_range(0..=6);
        GaussCode::random(&mut rng, n)
    }));
    let (mut checked, mut mismatches) = (0, 0);
    for code in &codes {
        for (small, field) in oracle_fields() {
            let Some(count) = oracle_count(code, &small) else { continue };
            checked += 1;
            let dim = coloring_dim(code, &field);
            if small.order().pow(dim as u32) != count {
                mismatches += 1;
                println!("  mismatch: {code} over {field}: dim {dim}, count {count}");
            }
        }
    }
    let library_oracle = oracle_equivalence(8, 100);
    out.report(
        8,
        mismatches == 0 && checked > 300 && library_oracle.violations == 0,
        format!("{checked} (code, field) pairs, {mismatches} mismatches; library enumerator: {library_oracle}"),
    );

    // 9. uw/2 <= ut <= wd_both at the points fixed by criteria 2 and 3.
    let mut ok = true;
    let mut parts = Vec::new();
    let subjects = (1..=4u32)
        .map(|n| (format!("B{n}"), b_family(n).unwrap(), ut_b[n as usize - 1], n as usize + 1))
        .chain((1..=3u32).map(|n| (format!("Bridge{n}"), bridge(n).unwrap(), ut_bridge[n as usize - 1], 4)));
    for (name, code, ut, depth) in subjects {
        let Some(ut) = ut else {
            ok = false;
            parts.push(format!("{name} ut undetermined"));
            continue;
        };
        let uw = uw_upper(&code, &battery, &budget(100_000, depth));
        let wd = warping_degree_both(&code);
        let uw_value = uw.upper.as_ref().map(|u| u.value);
        ok &= uw.verify().is_ok() && uw_value.is_some_and(|v| v <= 2 * ut) && ut <= wd;
        parts.push(format!("{name} {uw_value:?}/2 <= {ut} <= {wd}"));
    }
    out.report(9, ok, parts.join(", "));

    // 10. Trefoil.
    let trefoil: GaussCode = "O1+ U2+ O3+ U1+ O2+ U3+".parse().unwrap();
    let count = oracle_count(&trefoil, &SmallField::dihedral(3));
    let cert = ut_bounds(&trefoil, &battery, &SearchBudget::default());
    let ok = count == Some(9)
        && cert.lower.as_ref().map(|l| l.value) == Some(1)
        && cert.upper.as_ref().is_some_and(|u| u.value == 1 && u.trace.flips() == 1 && replays(&u.trace))
        && cert.verify().is_ok();
    out.report(10, ok, format!("R3 colorings {count:?}, certificate ({:?}, {:?})",
        cert.lower.map(|l| l.value), cert.upper.map(|u| u.value)));

    let failed: Vec<u32> = out.results.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
