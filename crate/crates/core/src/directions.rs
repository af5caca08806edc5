//! Direction sets of function graphs and their additive spans.
//!
//! The exhaustive scan checks, function by function, that a graph whose
//! directions lie in a proper `F_p`-subspace of `F_q` is a line.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};
use crate::report::{Report, Verdict};

/// Default cap on `q^q` for exhaustive scans; admits `q = 8`.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 1 << 24;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// A function `F_q -> F_q` as its value table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FuncTable {
    pub values: Vec<Fe>,
}

impl FuncTable {
    pub fn new(ctx: &FieldCtx, values: Vec<Fe>) -> Result<Self> {
        if values.len() != ctx.q() as usize {
            return Err(Error::InvalidArgument(format!(
                "function table needs {} values, got {}",
                ctx.q(),
                values.len()
            )));
        }
        Ok(FuncTable { values })
    }

    pub fn from_fn(ctx: &FieldCtx, f: impl Fn(Fe) -> Fe) -> Self {
        FuncTable { values: ctx.elements().map(f).collect() }
    }

    /// Odometer index: position `x` is the base-`q` digit of weight `q^x`.
    pub fn from_index(ctx: &FieldCtx, mut idx: u64) -> Self {
        let q = ctx.q() as u64;
        let values = (0..q)
            .map(|_| {
                let v = Fe((idx % q) as u32);
                idx /= q;
                v
            })
            .collect();
        FuncTable { values }
    }

    pub fn index(&self, ctx: &FieldCtx) -> u64 {
        let q = ctx.q() as u64;
        self.values.iter().rev().fold(0u64, |acc, v| acc.wrapping_mul(q).wrapping_add(v.0 as u64))
    }

    pub fn at(&self, x: Fe) -> Fe {
        self.values[x.0 as usize]
    }

    pub fn indices(&self) -> Vec<u32> {
        self.values.iter().map(|v| v.0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DirectionSet {
    /// Sorted by element index.
    pub members: Vec<Fe>,
    pub span_dim: usize,
}

impl DirectionSet {
    pub fn in_proper_subspace(&self, ctx: &FieldCtx) -> bool {
        self.span_dim < ctx.n() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub dim: usize,
    /// Members of the input that extended the rank, in input order.
    pub basis: Vec<Fe>,
}

/// Incremental row echelon form over `F_p` on coefficient digit vectors.
struct Echelon {
    p: u32,
    rows: Vec<(usize, Vec<u32>)>,
}

impl Echelon {
    fn new(p: u32) -> Self {
        Echelon { p, rows: Vec::new() }
    }

    /// Reduces `v` and keeps it when independent; returns whether it was.
    fn insert(&mut self, mut v: Vec<u32>) -> bool {
        let p = self.p as u64;
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (vi, &ri) in v.iter_mut().zip(row) {
                    *vi = ((*vi as u64 + (p - c as u64) * ri as u64) % p) as u32;
                }
            }
        }
        match v.iter().position(|&c| c != 0) {
            None => false,
            Some(pivot) => {
                let inv = mod_inv(v[pivot], self.p);
                for c in v.iter_mut() {
                    *c = (*c as u64 * inv as u64 % p) as u32;
                }
                // Keep earlier rows reduced against the new pivot.
                for (_, row) in self.rows.iter_mut() {
                    let c = row[pivot];
                    if c != 0 {
                        for (ri, &vi) in row.iter_mut().zip(&v) {
                            *ri = ((*ri as u64 + (p - c as u64) * vi as u64) % p) as u32;
                        }
                    }
                }
                self.rows.push((pivot, v));
                true
            }
        }
    }
}

fn mod_inv(a: u32, p: u32) -> u32 {
    (1..p).find(|&b| (a as u64 * b as u64) % p as u64 == 1).expect("nonzero residue")
}

/// Dimension of the `F_p`-span of `members`, with a basis drawn from them.
pub fn additive_span(ctx: &FieldCtx, members: &[Fe]) -> Result<Span> {
    if members.is_empty() {
        return Err(Error::Empty("direction set"));
    }
    let mut ech = Echelon::new(ctx.p());
    let mut basis = Vec::new();
    for &m in members {
        if ech.insert(ctx.digits(m)) {
            basis.push(m);
        }
    }
    Ok(Span { dim: basis.len(), basis })
}

/// `{(s(x) - s(y)) / (x - y) : x != y}`.
pub fn direction_set(ctx: &FieldCtx, func: &FuncTable) -> Result<DirectionSet> {
    if func.values.len() != ctx.q() as usize {
        return Err(Error::InvalidArgument("function table has the wrong length".into()));
    }
    let mut seen = vec![false; ctx.q() as usize];
    for x in ctx.elements() {
        for y in (x.0 + 1..ctx.q()).map(Fe) {
            let num = ctx.sub(func.at(x), func.at(y));
            let den = ctx.sub(x, y);
            seen[ctx.mul(num, ctx.inv_nonzero(den)).0 as usize] = true;
        }
    }
    let members: Vec<Fe> = (0..ctx.q()).filter(|&i| seen[i as usize]).map(Fe).collect();
    if members.is_empty() {
        // Only possible for q = 1, which is not a field.
        return Err(Error::Empty("direction set"));
    }
    let span_dim = additive_span(ctx, &members)?.dim;
    Ok(DirectionSet { members, span_dim })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    scanned: u64,
    affine: u64,
    proper: u64,
    counterexamples: u64,
    /// Smallest odometer index among counterexamples.
    first_counterexample: Option<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.scanned += other.scanned;
        self.affine += other.affine;
        self.proper += other.proper;
        self.counterexamples += other.counterexamples;
        self.first_counterexample = match (self.first_counterexample, other.first_counterexample) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Precomputed slope and span tables for bitmask scans (`q <= 16`).
struct MaskTables {
    q: usize,
    /// `slope_bit[(pair(x, y) * q + vx) * q + vy]`, `x < y`.
    slope_bit: Vec<u32>,
    pair_base: Vec<usize>,
    /// `proper[mask]`: the directions in `mask` span a proper subspace.
    proper: Vec<bool>,
}

impl MaskTables {
    fn new(ctx: &FieldCtx) -> Self {
        let q = ctx.q() as usize;
        assert!(q <= 16);
        let mut pair_base = vec![0usize; q * q];
        let mut slope_bit = Vec::new();
        let mut next = 0;
        for y in 0..q {
            for x in 0..y {
                pair_base[x * q + y] = next;
                next += 1;
                let inv = ctx.inv_nonzero(ctx.sub(Fe(x as u32), Fe(y as u32)));
                for vx in 0..q {
                    for vy in 0..q {
                        let d = ctx.mul(ctx.sub(Fe(vx as u32), Fe(vy as u32)), inv);
                        slope_bit.push(1u32 << d.0);
                    }
                }
            }
        }
        let n = ctx.n() as usize;
        let proper = (0..1u32 << q)
            .map(|mask| {
                let members: Vec<Fe> = (0..q as u32).filter(|b| mask >> b & 1 == 1).map(Fe).collect();
                members.is_empty() || additive_span(ctx, &members).expect("nonempty").dim < n
            })
            .collect();
        MaskTables { q, slope_bit, pair_base, proper }
    }

    #[inline]
    fn new_slopes(&self, values: &[u32], y: usize) -> u32 {
        let q = self.q;
        let vy = values[y] as usize;
        let mut mask = 0;
        for (x, &vx) in values[..y].iter().enumerate() {
            let base = self.pair_base[x * q + y];
            mask |= self.slope_bit[(base * q + vx as usize) * q + vy];
        }
        mask
    }

    /// Depth-first over value vectors. A subtree is skipped once its partial
    /// direction set already spans `F_q` and has two or more slopes: no
    /// completion can then be proper or affine.
    fn dfs(&self, values: &mut Vec<u32>, mask: u32, tally: &mut Tally, pow: &[u64]) {
        let depth = values.len();
        if depth == self.q {
            tally.scanned += 1;
            let single = mask.count_ones() == 1;
            if single {
                tally.affine += 1;
            }
            if self.proper[mask as usize] {
                tally.proper += 1;
                if !single {
                    tally.counterexamples += 1;
                    let idx = values.iter().rev().fold(0u64, |acc, &v| acc * self.q as u64 + v as u64);
                    tally.first_counterexample =
                        Some(tally.first_counterexample.map_or(idx, |m| m.min(idx)));
                }
            }
            return;
        }
        for v in 0..self.q as u32 {
            values.push(v);
            let m = mask | self.new_slopes(values, depth);
            if !self.proper[m as usize] && m.count_ones() >= 2 {
                tally.scanned += pow[self.q - depth - 1];
            } else {
                self.dfs(values, m, tally, pow);
            }
            values.pop();
        }
    }
}

fn classify(ctx: &FieldCtx, func: &FuncTable) -> (bool, bool) {
    let d = direction_set(ctx, func).expect("valid table");
    (d.members.len() == 1, d.in_proper_subspace(ctx))
}

/// Checks that every scanned function whose directions lie in a proper
/// additive subgroup is affine.
pub fn carlitz_scan(ctx: &FieldCtx, mode: ScanMode, budget: u64) -> Result<Report> {
    let started = Instant::now();
    let q = ctx.q() as u64;
    let mut report = Report::new("direction-subspace-affine", ctx.spec_string());
    let tally = match mode {
        ScanMode::Exhaustive => {
            let total = q.checked_pow(q as u32).filter(|&t| t <= budget);
            if total.is_none() || q > 16 {
                return Err(Error::BudgetExceeded(format!(
                    "exhaustive scan over {q}^{q} functions exceeds the budget of {budget}; use sampling"
                )));
            }
            report = report.param("mode", "exhaustive").param("budget", budget);
            let tables = MaskTables::new(ctx);
            let pow: Vec<u64> = (0..=q as u32).map(|e| q.pow(e)).collect();
            // Work units: the first two values, q^2 independent subtrees.
            let prefixes: Vec<(u32, u32)> =
                (0..q as u32).flat_map(|a| (0..q as u32).map(move |b| (a, b))).collect();
            prefixes
                .par_iter()
                .map(|&(a, b)| {
                    let mut tally = Tally::default();
                    let mut values = vec![a, b];
                    let mask = tables.new_slopes(&values, 1);
                    if !tables.proper[mask as usize] && mask.count_ones() >= 2 {
                        tally.scanned += pow[q as usize - 2];
                    } else {
                        tables.dfs(&mut values, mask, &mut tally, &pow);
                    }
                    tally
                })
                .reduce(Tally::default, Tally::merge)
        }
        ScanMode::Sample { count, seed } => {
            report = report.param("mode", "sample").param("samples", count).seed(seed);
            const CHUNK: u64 = 4096;
            let chunks = count.div_ceil(CHUNK);
            (0..chunks)
                .into_par_iter()
                .map(|chunk| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(chunk);
                    let mut tally = Tally::default();
                    let len = CHUNK.min(count - chunk * CHUNK);
                    for _ in 0..len {
                        let func = FuncTable {
                            values: (0..q).map(|_| Fe(rng.gen_range(0..q as u32))).collect(),
                        };
                        tally.scanned += 1;
                        let (affine, proper) = classify(ctx, &func);
                        tally.affine += affine as u64;
                        tally.proper += proper as u64;
                        if proper && !affine {
                            tally.counterexamples += 1;
                            let idx = func.index(ctx);
                            tally.first_counterexample =
                                Some(tally.first_counterexample.map_or(idx, |m| m.min(idx)));
                        }
                    }
                    tally
                })
                .reduce(Tally::default, Tally::merge)
        }
    };
    report = report
        .counter("scanned", tally.scanned)
        .counter("affine", tally.affine)
        .counter("properSpan", tally.proper)
        .counter("counterexamples", tally.counterexamples);
    if let Some(idx) = tally.first_counterexample {
        let func = FuncTable::from_index(ctx, idx);
        report = report.witness(serde_json::json!({ "values": func.indices(), "index": idx }));
    }
    let mut ok = tally.counterexamples == 0;
    if mode == ScanMode::Exhaustive {
        ok &= tally.affine == q * q && tally.scanned == q.pow(q as u32);
        if tally.affine != q * q {
            report = report.witness(serde_json::json!({ "affineCount": tally.affine, "expected": q * q }));
        }
    }
    let verdict = if q <= 2 {
        report = report.note("vacuous: the statement needs q > 2");
        Verdict::Inapplicable
    } else {
        Verdict::from_bool(ok)
    };
    Ok(report.verdict(verdict).finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, n: u32) -> FieldCtx {
        FieldCtx::with_order(p, n).unwrap()
    }

    #[test]
    fn identity_has_one_direction() {
        let ctx = f(3, 2);
        let d = direction_set(&ctx, &FuncTable::from_fn(&ctx, |x| x)).unwrap();
        assert_eq!(d.members, vec![Fe::ONE]);
        assert_eq!(d.span_dim, 1);
    }

    #[test]
    fn squaring_in_f4() {
        let ctx = f(2, 2);
        let d = direction_set(&ctx, &FuncTable::from_fn(&ctx, |x| ctx.mul(x, x))).unwrap();
        assert_eq!(d.members, vec![Fe(1), Fe(2), Fe(3)]);
        assert_eq!(d.span_dim, 2);
    }

    #[test]
    fn squaring_in_f5() {
        // Oracle: the slopes of x^2 are x + y over distinct x, y; listed by hand
        // from the ten pairs of F_5: {0,1,2,3,4} all occur.
        let ctx = f(5, 1);
        let mut expected: Vec<u32> = Vec::new();
        for x in 0..5u32 {
            for y in x + 1..5 {
                expected.push((x + y) % 5);
            }
        }
        expected.sort();
        expected.dedup();
        let d = direction_set(&ctx, &FuncTable::from_fn(&ctx, |x| ctx.mul(x, x))).unwrap();
        assert_eq!(d.members.iter().map(|m| m.0).collect::<Vec<_>>(), expected);
        assert_eq!(d.members.len(), 5);
    }

    #[test]
    fn span_examples() {
        let f4 = f(2, 2);
        assert_eq!(additive_span(&f4, &[Fe(1)]).unwrap().dim, 1);
        assert_eq!(additive_span(&f4, &[Fe(1), Fe(2)]).unwrap().dim, 2);
        let f9 = f(3, 2);
        let s = additive_span(&f9, &[Fe(1), Fe(2)]).unwrap();
        assert_eq!(s.dim, 1);
        assert_eq!(s.basis, vec![Fe(1)]);
        assert_eq!(additive_span(&f9, &[]), Err(Error::Empty("direction set")));
        let f27 = f(3, 3);
        assert_eq!(additive_span(&f27, &[Fe(1), Fe(3), Fe(4), Fe(9)]).unwrap().dim, 3);
    }

    #[test]
    fn span_is_monotone() {
        let ctx = f(2, 3);
        let all: Vec<Fe> = ctx.nonzero().collect();
        for mask in 1u32..256 {
            let d: Vec<Fe> = (0..8).filter(|b| mask >> b & 1 == 1).map(Fe).collect();
            let base = additive_span(&ctx, &d).unwrap().dim;
            for &extra in &all {
                let mut bigger = d.clone();
                bigger.push(extra);
                assert!(additive_span(&ctx, &bigger).unwrap().dim >= base);
            }
        }
    }

    #[test]
    fn affine_maps_have_a_single_direction() {
        for (p, n) in [(2, 2), (3, 1), (5, 1), (2, 3), (7, 1), (3, 2)] {
            let ctx = f(p, n);
            for a in ctx.elements() {
                for b in ctx.elements() {
                    let func = FuncTable::from_fn(&ctx, |x| ctx.add(ctx.mul(a, x), b));
                    assert_eq!(direction_set(&ctx, &func).unwrap().members, vec![a]);
                }
            }
        }
    }

    #[test]
    fn directions_invariant_under_translation() {
        let ctx = f(7, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let func = FuncTable { values: (0..7).map(|_| Fe(rng.gen_range(0..7))).collect() };
            let base = direction_set(&ctx, &func).unwrap();
            for c in ctx.elements() {
                let lifted = FuncTable::from_fn(&ctx, |x| ctx.add(func.at(x), c));
                let moved = FuncTable::from_fn(&ctx, |x| func.at(ctx.add(x, c)));
                assert_eq!(direction_set(&ctx, &lifted).unwrap(), base);
                assert_eq!(direction_set(&ctx, &moved).unwrap(), base);
            }
        }
    }

    #[test]
    fn odometer_index_round_trip() {
        let ctx = f(3, 1);
        for idx in 0..27 {
            assert_eq!(FuncTable::from_index(&ctx, idx).index(&ctx), idx);
        }
        assert_eq!(FuncTable::from_index(&ctx, 1).indices(), vec![1, 0, 0]);
    }

    fn brute_scan(ctx: &FieldCtx) -> (u64, u64, u64) {
        let q = ctx.q() as u64;
        let (mut affine, mut proper, mut bad) = (0, 0, 0);
        for idx in 0..q.pow(q as u32) {
            let (a, p) = classify(ctx, &FuncTable::from_index(ctx, idx));
            affine += a as u64;
            proper += p as u64;
            bad += (p && !a) as u64;
        }
        (affine, proper, bad)
    }

    #[test]
    fn pruned_scan_matches_plain_enumeration() {
        for (p, n) in [(2, 2), (3, 1), (5, 1)] {
            let ctx = f(p, n);
            let r = carlitz_scan(&ctx, ScanMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
            let (affine, proper, bad) = brute_scan(&ctx);
            let q = ctx.q() as u64;
            assert_eq!(r.counters["scanned"], q.pow(q as u32));
            assert_eq!(r.counters["affine"], affine);
            assert_eq!(r.counters["properSpan"], proper);
            assert_eq!(r.counters["counterexamples"], bad);
            assert_eq!(r.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn q4_scan() {
        let ctx = f(2, 2);
        let r = carlitz_scan(&ctx, ScanMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
        assert_eq!(r.counters["scanned"], 256);
        assert_eq!(r.counters["affine"], 16);
        assert_eq!(r.counters["counterexamples"], 0);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn q2_is_vacuous() {
        let ctx = f(2, 1);
        let r = carlitz_scan(&ctx, ScanMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
        assert_eq!(r.verdict, Verdict::Inapplicable);
        assert_eq!(r.counters["affine"], 4);
    }

    #[test]
    fn budget_and_sampling() {
        let ctx = f(3, 2);
        assert!(matches!(
            carlitz_scan(&ctx, ScanMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET),
            Err(Error::BudgetExceeded(_))
        ));
        let mode = ScanMode::Sample { count: 5000, seed: 11 };
        let a = carlitz_scan(&ctx, mode, 0).unwrap();
        let b = carlitz_scan(&ctx, mode, 0).unwrap();
        assert_eq!(a.verdict, Verdict::Pass);
        assert_eq!(a.counters, b.counters);
        assert_eq!(a.counters["scanned"], 5000);
    }
}
