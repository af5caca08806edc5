//! Brute-force oracles over intersection graphs: vertices are all
//! polynomials of degree at most `k`, edges join pairs sharing enough (or
//! few enough) points, and an exact branch-and-bound clique solver bounds
//! the families.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{common_point, is_t_intersecting, Family, StabilityThreshold};
use crate::gf::{Fe, FieldCtx};
use crate::polyfun::{unpack, PolyK};
use crate::report::{Report, Verdict};

pub const DEFAULT_VERTEX_CAP: u64 = 4096;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
/// Maximum-clique enumeration (and the pencil-only check) runs only up to
/// this many vertices.
pub const ENUMERATION_VERTEX_LIMIT: usize = 64;

/// Undirected simple graph stored as one bitset row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitGraph { n, words, rows: vec![0; n * words] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = BitGraph::empty(n);
        for (u, v) in edges {
            if u != v {
                g.set(u, v);
                g.set(v, u);
            }
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        BitGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    fn set(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> u64 {
        (0..self.n).map(|u| self.degree(u) as u64).sum::<u64>() / 2
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(i, &u)| vs[i + 1..].iter().all(|&v| u != v && self.adjacent(u, v)))
    }

    /// Same graph with vertex `order[i]` renamed to `i`.
    fn permuted(&self, order: &[usize]) -> BitGraph {
        let mut g = BitGraph::empty(self.n);
        for (i, &u) in order.iter().enumerate() {
            for (j, &v) in order.iter().enumerate() {
                if self.adjacent(u, v) {
                    g.set(i, j);
                }
            }
        }
        g
    }

    fn full_set(&self) -> Vec<u64> {
        let mut s = vec![0u64; self.words];
        for v in 0..self.n {
            s[v / 64] |= 1 << (v % 64);
        }
        s
    }
}

/// Which pairs of polynomials are joined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Relation {
    /// at least `t` shared points
    AtLeast(usize),
    /// at most `t` shared points
    AtMost(usize),
}

impl Relation {
    fn holds(self, shared: usize) -> bool {
        match self {
            Relation::AtLeast(t) => shared >= t,
            Relation::AtMost(t) => shared <= t,
        }
    }
}

/// Vertex `i` is the polynomial with base-`q` packed coefficients `i`
/// (constant term least significant), see [`unpack`].
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    pub q: u32,
    pub k: usize,
    pub relation: Relation,
    pub graph: BitGraph,
}

impl IntersectionGraph {
    pub fn poly(&self, ctx: &FieldCtx, v: usize) -> PolyK {
        unpack(ctx, v as u64, self.k)
    }

    pub fn family(&self, ctx: &FieldCtx, vs: &[usize]) -> Family {
        Family::new(self.k, vs.iter().map(|&v| self.poly(ctx, v))).expect("uniform bound")
    }

    /// Text dump: a `#` header line with the parameters, then one line per
    /// vertex holding its adjacency row as 16-digit hex words, least
    /// significant word first (bit `j` of word `w` is vertex `64 w + j`).
    pub fn export(&self) -> String {
        let mut out = format!(
            "# ffekr-graph q={} k={} relation={:?} vertices={} words={}\n",
            self.q,
            self.k,
            self.relation,
            self.graph.n,
            self.graph.words
        );
        for u in 0..self.graph.n {
            let row: Vec<String> = self.graph.row(u).iter().map(|w| format!("{w:016x}")).collect();
            writeln!(out, "{}", row.join(" ")).expect("string write");
        }
        out
    }
}

/// The `t`-intersection graph on all polynomials of degree at most `k`.
pub fn build_graph(ctx: &FieldCtx, k: usize, t: usize) -> Result<IntersectionGraph> {
    build_graph_with(ctx, k, Relation::AtLeast(t), DEFAULT_VERTEX_CAP)
}

pub fn build_graph_with(ctx: &FieldCtx, k: usize, relation: Relation, cap: u64) -> Result<IntersectionGraph> {
    let q = ctx.q() as u64;
    let n = q
        .checked_pow(k as u32 + 1)
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::BudgetExceeded(format!("q^(k+1) = {q}^{} exceeds the vertex cap {cap}", k + 1)))?
        as usize;
    // Shared points of u and v = roots of u - v, looked up by packed index.
    let roots: Vec<usize> = (0..n)
        .map(|d| {
            let p = unpack(ctx, d as u64, k);
            ctx.elements().filter(|&x| p.eval(ctx, x).is_zero()).count()
        })
        .collect();
    let coeffs: Vec<Vec<Fe>> = (0..n).map(|v| unpack(ctx, v as u64, k).coeffs().to_vec()).collect();
    let words = n.div_ceil(64).max(1);
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = vec![0u64; words];
            for v in (0..n).filter(|&v| v != u) {
                let diff = coeffs[u]
                    .iter()
                    .zip(&coeffs[v])
                    .rev()
                    .fold(0usize, |acc, (&a, &b)| acc * q as usize + ctx.sub(a, b).0 as usize);
                if relation.holds(roots[diff]) {
                    row[v / 64] |= 1 << (v % 64);
                }
            }
            row
        })
        .collect();
    let graph = BitGraph { n, words, rows: rows.concat() };
    Ok(IntersectionGraph { q: ctx.q(), k, relation, graph })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CliqueResult {
    pub size: usize,
    /// Sorted vertex list.
    pub witness: Vec<usize>,
    pub nodes_explored: u64,
    /// The search finished, so no larger clique exists.
    pub proven: bool,
}

enum Goal {
    Max,
    AllOfSize(usize),
}

struct Solver<'a> {
    g: &'a BitGraph,
    goal: Goal,
    budget: u64,
    nodes: u64,
    aborted: bool,
    current: Vec<usize>,
    best: Vec<usize>,
    found: Vec<Vec<usize>>,
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

impl Solver<'_> {
    /// Greedy sequential colouring of `p`: vertices in colour order with
    /// nondecreasing colour numbers.
    fn colour(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = p.to_vec();
        let (mut order, mut colours) = (Vec::new(), Vec::new());
        let mut colour = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            colour += 1;
            let mut avail = uncoloured.clone();
            while let Some(v) = first_bit(&avail) {
                uncoloured[v / 64] &= !(1 << (v % 64));
                for (a, r) in avail.iter_mut().zip(self.g.row(v)) {
                    *a &= !r;
                }
                avail[v / 64] &= !(1 << (v % 64));
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, mut p: Vec<u64>) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let (order, colours) = self.colour(&p);
        for i in (0..order.len()).rev() {
            let bound = self.current.len() + colours[i];
            let prune = match self.goal {
                Goal::Max => bound <= self.best.len(),
                Goal::AllOfSize(target) => bound < target,
            };
            if prune {
                return;
            }
            let v = order[i];
            self.current.push(v);
            let next: Vec<u64> = p.iter().zip(self.g.row(v)).map(|(a, b)| a & b).collect();
            if next.iter().all(|&w| w == 0) {
                match self.goal {
                    Goal::Max if self.current.len() > self.best.len() => self.best = self.current.clone(),
                    Goal::AllOfSize(target) if self.current.len() == target => {
                        self.found.push(self.current.clone())
                    }
                    _ => {}
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            p[v / 64] &= !(1 << (v % 64));
            if self.aborted {
                return;
            }
        }
    }
}

/// Vertices sorted by degree, highest first, ties by index.
fn degree_order(g: &BitGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

/// Exact maximum clique by branch and bound with a greedy-colouring bound.
/// Stops after `budget` search nodes and then reports the best clique found
/// with `proven = false`. Deterministic.
pub fn max_clique(g: &BitGraph, budget: u64) -> CliqueResult {
    let order = degree_order(g);
    let pg = g.permuted(&order);
    let mut s = Solver {
        g: &pg,
        goal: Goal::Max,
        budget,
        nodes: 0,
        aborted: false,
        current: Vec::new(),
        best: Vec::new(),
        found: Vec::new(),
    };
    if g.n > 0 {
        s.expand(pg.full_set());
    }
    let mut witness: Vec<usize> = s.best.iter().map(|&v| order[v]).collect();
    witness.sort_unstable();
    CliqueResult { size: witness.len(), witness, nodes_explored: s.nodes, proven: !s.aborted }
}

/// Every clique of exactly `size` vertices, assuming none is larger. Each
/// is sorted; the list is sorted. `None` when the budget runs out.
pub fn cliques_of_size(g: &BitGraph, size: usize, budget: u64) -> Option<Vec<Vec<usize>>> {
    let order = degree_order(g);
    let pg = g.permuted(&order);
    let mut s = Solver {
        g: &pg,
        goal: Goal::AllOfSize(size),
        budget,
        nodes: 0,
        aborted: false,
        current: Vec::new(),
        best: Vec::new(),
        found: Vec::new(),
    };
    if size == 0 || g.n == 0 {
        return Some(vec![Vec::new()]);
    }
    s.expand(pg.full_set());
    if s.aborted {
        return None;
    }
    let mut all: Vec<Vec<usize>> = s
        .found
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| order[v]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    all.sort();
    all.dedup();
    Some(all)
}

/// Maximum intersecting families of degree-at-most-`k` polynomials: checks
/// the size is `q^k` and, on graphs of at most 64 vertices, that every
/// maximum family is a pencil and every pencil occurs.
pub fn ekr_oracle(ctx: &FieldCtx, k: usize, budget: u64) -> Result<Report> {
    let started = Instant::now();
    let ig = build_graph(ctx, k, 1)?;
    let expected = (ctx.q() as usize).pow(k as u32);
    let res = max_clique(&ig.graph, budget);
    let mut report = Report::new("intersecting-family-max-size", ctx.spec_string())
        .param("k", k)
        .param("expectedMax", expected)
        .param("maxClique", res.size)
        .param("proven", res.proven)
        .counter("vertices", ig.graph.n as u64)
        .counter("edges", ig.graph.edge_count())
        .counter("nodesExplored", res.nodes_explored);
    if !res.proven {
        let verdict = if res.size > expected { Verdict::Fail } else { Verdict::BudgetExceeded };
        if res.size > expected {
            report = report.witness(serde_json::json!({ "clique": ig.family(ctx, &res.witness).members() }));
        }
        return Ok(report.verdict(verdict).finish(started));
    }
    let mut ok = res.size == expected;
    if !ok {
        report = report.witness(serde_json::json!({ "clique": ig.family(ctx, &res.witness).members() }));
    }
    if ok && ig.graph.n <= ENUMERATION_VERTEX_LIMIT {
        let all = cliques_of_size(&ig.graph, res.size, budget)
            .ok_or_else(|| Error::BudgetExceeded("maximum clique enumeration".into()))?;
        let mut points = Vec::new();
        for c in &all {
            match common_point(ctx, &ig.family(ctx, c))? {
                Some(pt) => points.push(pt),
                None => {
                    ok = false;
                    report = report.witness(serde_json::json!({ "nonPencilMaximum": ig.family(ctx, c).members() }));
                }
            }
        }
        points.sort();
        points.dedup();
        let all_points = points.len() == (ctx.q() as usize).pow(2);
        if !all_points && ok {
            ok = false;
            report = report.witness(serde_json::json!({ "pencilCentres": points }));
        }
        report = report
            .counter("maximumCliques", all.len() as u64)
            .param("commonPoints", points.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>());
    } else if ok {
        report = report.note("maximizer structure not enumerated above 64 vertices");
    }
    Ok(report.verdict(Verdict::from_bool(ok)).finish(started))
}

/// Number of `v` for which `d x^2 + v x + w` has a root in `F_q`.
pub fn rootable_count(ctx: &FieldCtx, d: Fe, w: Fe) -> Result<u64> {
    if d.is_zero() || w.is_zero() {
        return Err(Error::InvalidArgument("d and w must be nonzero".into()));
    }
    Ok(ctx.elements().filter(|&v| ctx.quadratic_roots(d, v, w).has_root()).count() as u64)
}

/// `(q + 1) / 2` or `(q - 1) / 2` for odd `q` as `w / d` is a square or not;
/// `q / 2` for even `q`.
pub fn rootable_closed_form(ctx: &FieldCtx, d: Fe, w: Fe) -> Result<u64> {
    if d.is_zero() || w.is_zero() {
        return Err(Error::InvalidArgument("d and w must be nonzero".into()));
    }
    let ratio = ctx.div(w, d)?;
    let q = ctx.q() as u64;
    Ok(if !ctx.is_odd() {
        q / 2
    } else if ctx.is_square(ratio) {
        q.div_ceil(2)
    } else {
        (q - 1) / 2
    })
}

/// [`rootable_count`] against [`rootable_closed_form`] for every nonzero
/// `(d, w)`.
pub fn rootable_scan(ctx: &FieldCtx) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new("rootable-quadratic-count", ctx.spec_string());
    let (mut scanned, mut mismatches) = (0u64, 0u64);
    for d in ctx.nonzero() {
        for w in ctx.nonzero() {
            scanned += 1;
            let (count, closed) = (rootable_count(ctx, d, w)?, rootable_closed_form(ctx, d, w)?);
            if count != closed {
                mismatches += 1;
                if mismatches <= 16 {
                    report = report.witness(serde_json::json!({ "d": d, "w": w, "count": count, "closedForm": closed }));
                }
            }
        }
    }
    report = report.counter("scanned", scanned).counter("mismatches", mismatches);
    Ok(report.verdict(Verdict::from_bool(mismatches == 0)).finish(started))
}

/// Families whose pairs all share at least `t` points have at most
/// `q^(k+1-t)` members; families whose pairs all share at most `t - 1`
/// points have at most `q^t`. Both checked by exact clique search.
pub fn sam0_check(ctx: &FieldCtx, k: usize, t: usize, budget: u64) -> Result<Report> {
    if t == 0 || t > k {
        return Err(Error::InvalidArgument(format!("t = {t} must lie in 1..={k}")));
    }
    let started = Instant::now();
    let q = ctx.q() as usize;
    let many = build_graph_with(ctx, k, Relation::AtLeast(t), DEFAULT_VERTEX_CAP)?;
    let few = build_graph_with(ctx, k, Relation::AtMost(t - 1), DEFAULT_VERTEX_CAP)?;
    let bound1 = q.pow((k + 1 - t) as u32);
    let bound2 = q.pow(t as u32);
    let r1 = max_clique(&many.graph, budget);
    let r2 = max_clique(&few.graph, budget);
    let mut report = Report::new("agreement-count-bounds", ctx.spec_string())
        .param("k", k)
        .param("t", t)
        .param("atLeastTBound", bound1)
        .param("atLeastTMax", r1.size)
        .param("atMostTMinus1Bound", bound2)
        .param("atMostTMinus1Max", r2.size)
        .counter("nodesExplored", r1.nodes_explored + r2.nodes_explored);
    let mut ok = true;
    if r1.size > bound1 {
        ok = false;
        report = report.witness(serde_json::json!({ "atLeastT": many.family(ctx, &r1.witness).members() }));
    }
    if r2.size > bound2 {
        ok = false;
        report = report.witness(serde_json::json!({ "atMostTMinus1": few.family(ctx, &r2.witness).members() }));
    }
    let verdict = if !ok {
        Verdict::Fail
    } else if r1.proven && r2.proven {
        Verdict::Pass
    } else {
        Verdict::BudgetExceeded
    };
    Ok(report.verdict(verdict).finish(started))
}

/// Greedily completes random seeds of 1 to 3 polynomials to maximal
/// intersecting families (degree at most 2). Every family larger than the
/// stability threshold must have a common point, and none may exceed `q^2`.
/// This samples the space of maximal families; it is a probe, not a proof.
pub fn stability_probe(ctx: &FieldCtx, trials: u64, seed: u64) -> Result<Report> {
    let started = Instant::now();
    let ig = build_graph(ctx, 2, 1)?;
    let g = &ig.graph;
    let q = ctx.q() as usize;
    let threshold = StabilityThreshold::new(q as u64, 2)?;
    let outcomes: Vec<(usize, Vec<usize>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let family = random_maximal_clique(g, &mut rng, trial % 2 == 1);
            (family.len(), family)
        })
        .collect();

    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    let (mut above, mut with_point, mut violations) = (0u64, 0u64, 0u64);
    let mut report = Report::new("stability-probe", ctx.spec_string())
        .param("k", 2)
        .param("trials", trials)
        .param("threshold", (threshold.approx() * 1e4).round() / 1e4)
        .param("minSizeAboveThreshold", threshold.min_exceeding())
        .seed(seed)
        .note("random maximal families sampled by greedy completion: a probe, not a proof");
    for (trial, (size, vs)) in outcomes.iter().enumerate() {
        *histogram.entry(*size).or_default() += 1;
        let too_big = *size > q * q;
        let mut missing_point = false;
        if threshold.exceeded_by(*size as u64) {
            above += 1;
            match common_point(ctx, &ig.family(ctx, vs))? {
                Some(_) => with_point += 1,
                None => missing_point = true,
            }
        }
        if too_big || missing_point {
            violations += 1;
            if violations <= 8 {
                report = report.witness(serde_json::json!({
                    "trial": trial,
                    "size": size,
                    "family": ig.family(ctx, vs).members(),
                }));
            }
        }
    }
    report = report
        .param("sizeHistogram", histogram.iter().map(|(s, c)| (s.to_string(), *c)).collect::<BTreeMap<_, _>>())
        .counter("scanned", trials)
        .counter("aboveThreshold", above)
        .counter("aboveThresholdWithCommonPoint", with_point)
        .counter("violations", violations);
    Ok(report.verdict(Verdict::from_bool(violations == 0)).finish(started))
}

/// Seeds with 1 to 3 random vertices (dropping any not adjacent to those
/// already chosen), then adds candidates until none remain. With `lookahead`
/// the next vertex is the best of up to 16 sampled candidates by how many
/// candidates it keeps; otherwise it is uniform.
fn random_maximal_clique(g: &BitGraph, rng: &mut ChaCha8Rng, lookahead: bool) -> Vec<usize> {
    let mut cand = g.full_set();
    let mut clique = Vec::new();
    let add = |v: usize, cand: &mut Vec<u64>, clique: &mut Vec<usize>| {
        clique.push(v);
        for (c, r) in cand.iter_mut().zip(g.row(v)) {
            *c &= r;
        }
    };
    for _ in 0..rng.gen_range(1..=3) {
        let v = rng.gen_range(0..g.n);
        if cand[v / 64] >> (v % 64) & 1 == 1 {
            add(v, &mut cand, &mut clique);
        }
    }
    loop {
        let members: Vec<usize> = (0..g.n).filter(|&v| cand[v / 64] >> (v % 64) & 1 == 1).collect();
        if members.is_empty() {
            break;
        }
        let v = if lookahead {
            let keep = |v: usize| -> u32 { cand.iter().zip(g.row(v)).map(|(a, b)| (a & b).count_ones()).sum() };
            (0..16.min(members.len()))
                .map(|_| members[rng.gen_range(0..members.len())])
                .max_by_key(|&v| (keep(v), std::cmp::Reverse(v)))
                .expect("nonempty")
        } else {
            members[rng.gen_range(0..members.len())]
        };
        add(v, &mut cand, &mut clique);
    }
    clique.sort_unstable();
    clique
}

/// Random greedy cliques checked against [`is_t_intersecting`], and random
/// non-cliques checked to fail it.
pub fn clique_family_round_trip(ctx: &FieldCtx, k: usize, t: usize, samples: u64, seed: u64) -> Result<bool> {
    let ig = build_graph(ctx, k, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let c = random_maximal_clique(&ig.graph, &mut rng, false);
        if c.len() >= 2 && !is_t_intersecting(ctx, &ig.family(ctx, &c), t)?.holds {
            return Ok(false);
        }
        let mut vs: Vec<usize> = (0..rng.gen_range(2..6)).map(|_| rng.gen_range(0..ig.graph.n)).collect();
        vs.sort_unstable();
        vs.dedup();
        if vs.len() >= 2 && ig.graph.is_clique(&vs) != is_t_intersecting(ctx, &ig.family(ctx, &vs), t)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}
