//! Quadratic character sums over `F_q` (odd `q`) and the polynomial facts
//! around them: the Weil bound with an exact distinct-root count, the closed
//! form for quadratics, perfect-square detection, and exhaustive scans of the
//! square-value and functional-equation statements built on them.

use std::cmp::Ordering;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directions::FuncTable;
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};
use crate::report::{Report, Verdict};

/// A polynomial over `F_q` without a degree bound, kept trimmed: the last
/// coefficient is nonzero unless the polynomial is zero (empty vector).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DensePoly {
    coeffs: Vec<Fe>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn from_indices(ix: &[u32]) -> Self {
        DensePoly::new(ix.iter().map(|&i| Fe(i)).collect())
    }

    pub fn zero() -> Self {
        DensePoly::default()
    }

    pub fn constant(c: Fe) -> Self {
        DensePoly::new(vec![c])
    }

    pub fn monomial(c: Fe, deg: usize) -> Self {
        let mut v = vec![Fe::ZERO; deg + 1];
        v[deg] = c;
        DensePoly::new(v)
    }

    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|tok| {
                let v: u64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient {tok:?} in {s:?}")))?;
                ctx.element(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DensePoly::new(coeffs))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Fe) -> Fe {
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        DensePoly::new((0..len).map(|i| ctx.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        DensePoly::new((0..len).map(|i| ctx.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fe) -> Self {
        DensePoly::new(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero();
        }
        let mut out = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        DensePoly::new(out)
    }

    pub fn pow(&self, ctx: &FieldCtx, e: u32) -> Self {
        (0..e).fold(DensePoly::constant(Fe::ONE), |acc, _| acc.mul(ctx, self))
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn div_rem(&self, ctx: &FieldCtx, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = ctx.inv_nonzero(divisor.lead());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((DensePoly::zero(), self.clone()));
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let factor = ctx.mul(rem[top], lead_inv);
            if factor.is_zero() {
                continue;
            }
            quot[top - dd] = factor;
            for (i, &c) in divisor.coeffs.iter().enumerate() {
                let idx = top - dd + i;
                rem[idx] = ctx.sub(rem[idx], ctx.mul(factor, c));
            }
        }
        Ok((DensePoly::new(quot), DensePoly::new(rem)))
    }

    pub fn monic(&self, ctx: &FieldCtx) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(ctx, ctx.inv_nonzero(self.lead()))
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, ctx: &FieldCtx, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(ctx, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    /// Formal derivative; `i * c_i` with `i` reduced mod `p`.
    pub fn derivative(&self, ctx: &FieldCtx) -> Self {
        DensePoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ctx.mul(ctx.from_int(i as i64), c))
                .collect(),
        )
    }

    /// For `f = sum a_{pi} x^{pi}` (zero derivative), the `g` with `g^p = f`.
    fn pth_root(&self, ctx: &FieldCtx) -> Self {
        let p = ctx.p() as usize;
        let n = ctx.n() as u64;
        DensePoly::new(
            self.coeffs
                .iter()
                .step_by(p)
                .map(|&c| ctx.frobenius(c, n - 1))
                .collect(),
        )
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn require_odd(ctx: &FieldCtx) -> Result<()> {
    if ctx.is_odd() {
        Ok(())
    } else {
        Err(Error::RequiresOddOrder(ctx.q()))
    }
}

/// `sum_c psi(a f(c))` by direct evaluation, `psi` the quadratic character.
pub fn char_sum(ctx: &FieldCtx, f: &DensePoly, a: Fe) -> Result<i64> {
    require_odd(ctx)?;
    Ok(ctx.elements().map(|c| ctx.chi(ctx.mul(a, f.eval(ctx, c))) as i64).sum())
}

/// Closed form of `sum_x psi(a x^2 + b x + c)`: `-psi(a)` for a nonzero
/// discriminant, `(q - 1) psi(a)` for a zero one.
pub fn quad_sum_exact(ctx: &FieldCtx, a: Fe, b: Fe, c: Fe) -> Result<i64> {
    require_odd(ctx)?;
    if a.is_zero() {
        return Err(Error::InvalidArgument("leading coefficient must be nonzero".into()));
    }
    let disc = ctx.sub(ctx.mul(b, b), ctx.mul(ctx.from_int(4), ctx.mul(a, c)));
    let psi_a = ctx.chi(a) as i64;
    Ok(if disc.is_zero() { (ctx.q() as i64 - 1) * psi_a } else { -psi_a })
}

/// Number of distinct roots of `f` in the algebraic closure, i.e. the degree
/// of its radical, computed with gcds only.
pub fn distinct_root_count(ctx: &FieldCtx, f: &DensePoly) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("the zero polynomial has no root count".into()));
    }
    Ok(radical_degree(ctx, f))
}

fn radical_degree(ctx: &FieldCtx, f: &DensePoly) -> usize {
    if f.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let df = f.derivative(ctx);
    if df.is_zero() {
        return radical_degree(ctx, &f.pth_root(ctx));
    }
    let g = f.gcd(ctx, &df);
    // w: one copy of every irreducible factor whose multiplicity is prime to p.
    let (w, _) = f.div_rem(ctx, &g).expect("gcd divides");
    // Strip those factors from g; what remains has only multiplicities
    // divisible by p and is a p-th power.
    let mut rest = g;
    loop {
        let h = rest.gcd(ctx, &w);
        if h.degree() == Some(0) {
            break;
        }
        rest = rest.div_rem(ctx, &h).expect("gcd divides").0;
    }
    w.degree().unwrap_or(0) + radical_degree(ctx, &rest.pth_root(ctx))
}

/// `g` with `g^2 = f`, if one exists. Of the two roots `+-g` the one whose
/// leading coefficient has the smaller index is returned.
pub fn perfect_square_test(ctx: &FieldCtx, f: &DensePoly) -> Result<Option<DensePoly>> {
    require_odd(ctx)?;
    let Some(deg) = f.degree() else {
        return Ok(Some(DensePoly::zero()));
    };
    if deg % 2 == 1 {
        return Ok(None);
    }
    let Some(s) = ctx.sqrt(f.lead()) else {
        return Ok(None);
    };
    let s = s.min(ctx.neg(s));
    let m = deg / 2;
    // Solve for g from the top coefficient down:
    // f_{2m-j} = 2 g_m g_{m-j} + sum_{i=1}^{j-1} g_{m-i} g_{m-j+i}.
    let mut g = vec![Fe::ZERO; m + 1];
    g[m] = s;
    let inv_2s = ctx.inv_nonzero(ctx.mul(ctx.from_int(2), s));
    for j in 1..=m {
        let mut acc = f.coeff(2 * m - j);
        for i in 1..j {
            acc = ctx.sub(acc, ctx.mul(g[m - i], g[m - j + i]));
        }
        g[m - j] = ctx.mul(acc, inv_2s);
    }
    let g = DensePoly::new(g);
    Ok((g.mul(ctx, &g) == *f).then_some(g))
}

/// Decides `|sum| <= (d - 1) sqrt(q)` without floating point.
fn within_weil_bound(sum: i64, d: usize, q: u32) -> bool {
    if d == 0 {
        return sum == 0;
    }
    let lhs = (sum as i128) * (sum as i128);
    let k = d as i128 - 1;
    lhs <= k * k * q as i128
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CharSumResult {
    pub sum_value: i64,
    pub distinct_roots: usize,
    /// `(d - 1) sqrt(q)`, informational; the verdict uses exact arithmetic.
    pub bound: f64,
    pub within_bound: bool,
    /// `f` is a constant times the square of a polynomial; the bound does
    /// not apply then.
    pub is_square_shape: bool,
}

impl CharSumResult {
    /// True unless the bound applies and is violated.
    pub fn consistent(&self) -> bool {
        self.is_square_shape || self.within_bound
    }
}

pub fn weil_check(ctx: &FieldCtx, f: &DensePoly, a: Fe) -> Result<CharSumResult> {
    require_odd(ctx)?;
    if f.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument("polynomial must have positive degree".into()));
    }
    if a.is_zero() {
        return Err(Error::InvalidArgument("scalar a must be nonzero".into()));
    }
    let sum_value = char_sum(ctx, f, a)?;
    let d = distinct_root_count(ctx, f)?;
    let is_square_shape = perfect_square_test(ctx, &f.monic(ctx))?.is_some();
    Ok(CharSumResult {
        sum_value,
        distinct_roots: d,
        bound: (d as f64 - 1.0) * (ctx.q() as f64).sqrt(),
        within_bound: within_weil_bound(sum_value, d, ctx.q()),
        is_square_shape,
    })
}

/// Random monic polynomials of degree `1..=max_degree` that are not perfect
/// squares, checked against the Weil bound.
pub fn weil_sample_scan(ctx: &FieldCtx, samples: u64, max_degree: usize, seed: u64) -> Result<Report> {
    require_odd(ctx)?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = ctx.q();
    let mut polys = Vec::with_capacity(samples as usize);
    let mut rejected = 0u64;
    while (polys.len() as u64) < samples {
        let deg = rng.gen_range(1..=max_degree);
        let mut coeffs: Vec<Fe> = (0..deg).map(|_| Fe(rng.gen_range(0..q))).collect();
        coeffs.push(Fe::ONE);
        let f = DensePoly::new(coeffs);
        if perfect_square_test(ctx, &f)?.is_some() {
            rejected += 1;
            continue;
        }
        polys.push(f);
    }
    let results: Vec<(DensePoly, CharSumResult)> = polys
        .into_par_iter()
        .map(|f| {
            let r = weil_check(ctx, &f, Fe::ONE).expect("valid input");
            (f, r)
        })
        .collect();
    let mut report = Report::new("weil-bound", ctx.spec_string())
        .param("samples", samples)
        .param("maxDegree", max_degree)
        .seed(seed);
    let mut violations = 0u64;
    let mut max_ratio: f64 = 0.0;
    for (f, r) in &results {
        if r.distinct_roots > 1 {
            max_ratio = max_ratio.max(r.sum_value.abs() as f64 / r.bound);
        }
        if !r.within_bound {
            violations += 1;
            report = report.witness(serde_json::json!({ "poly": f.to_string(), "result": r }));
        }
    }
    report = report
        .counter("scanned", samples)
        .counter("rejectedSquares", rejected)
        .counter("violations", violations)
        .param("maxSumOverBound", (max_ratio * 1e6).round() / 1e6);
    Ok(report.verdict(Verdict::from_bool(violations == 0)).finish(started))
}

/// Scans every `a x^(p^k+1) + d x^(p^k) + b x + c` for perfect squares and
/// checks that each one satisfies `d^(p^k) a = b a^(p^k)` and
/// `d^(p^k+1) a = c a^(p^k+1)`, or has `a = b = d = 0`.
pub fn square_shape_scan(ctx: &FieldCtx, k: u32) -> Result<Report> {
    require_odd(ctx)?;
    if k == 0 {
        return Err(Error::InvalidArgument("exponent k must be positive".into()));
    }
    let started = Instant::now();
    let pk = (ctx.p() as u64).checked_pow(k).filter(|&v| v < 1 << 20).ok_or_else(|| {
        Error::InvalidArgument(format!("p^{k} is too large for a dense scan"))
    })?;
    let q = ctx.q();
    let deg = pk as usize + 1;
    let tuples: Vec<(Fe, Fe)> = ctx.elements().flat_map(|a| ctx.elements().map(move |d| (a, d))).collect();
    let outcomes: Vec<(u64, u64, Vec<[u32; 4]>)> = tuples
        .par_iter()
        .map(|&(a, d)| {
            let mut squares = 0u64;
            let mut scanned = 0u64;
            let mut bad = Vec::new();
            for b in ctx.elements() {
                for c in ctx.elements() {
                    scanned += 1;
                    let mut coeffs = vec![Fe::ZERO; deg + 1];
                    coeffs[deg] = a;
                    coeffs[deg - 1] = ctx.add(coeffs[deg - 1], d);
                    coeffs[1] = ctx.add(coeffs[1], b);
                    coeffs[0] = c;
                    let f = DensePoly::new(coeffs);
                    if perfect_square_test(ctx, &f).expect("odd q").is_none() {
                        continue;
                    }
                    squares += 1;
                    let ok = if a.is_zero() {
                        b.is_zero() && d.is_zero()
                    } else {
                        let lhs1 = ctx.mul(ctx.pow(d, pk), a);
                        let rhs1 = ctx.mul(b, ctx.pow(a, pk));
                        let lhs2 = ctx.mul(ctx.pow(d, pk + 1), a);
                        let rhs2 = ctx.mul(c, ctx.pow(a, pk + 1));
                        lhs1 == rhs1 && lhs2 == rhs2
                    };
                    if !ok {
                        bad.push([a.0, d.0, b.0, c.0]);
                    }
                }
            }
            (scanned, squares, bad)
        })
        .collect();
    let scanned: u64 = outcomes.iter().map(|o| o.0).sum();
    let squares: u64 = outcomes.iter().map(|o| o.1).sum();
    let bad: Vec<[u32; 4]> = outcomes.into_iter().flat_map(|o| o.2).collect();
    debug_assert_eq!(scanned, (q as u64).pow(4));
    let mut report = Report::new("square-shape-coefficients", ctx.spec_string())
        .param("k", k)
        .param("shape", format!("a*x^{} + d*x^{} + b*x + c", pk + 1, pk))
        .counter("scanned", scanned)
        .counter("perfectSquares", squares)
        .counter("violations", bad.len() as u64);
    for w in bad.iter().take(16) {
        report = report.witness(serde_json::json!({ "a": w[0], "d": w[1], "b": w[2], "c": w[3] }));
    }
    Ok(report.verdict(Verdict::from_bool(bad.is_empty())).finish(started))
}

/// Over odd square `q > 9` with `s = sqrt(q)`: every
/// `l(x) = a x^(s+1) + d x^s + b x + c`, `a != 0`, whose values are squares
/// on more than `q - s/2 + 1/2` points satisfies `a^s b = d^s a`. Also checks
/// that `u^2 (t + r x)^(s+1)` takes only square values for all `u, r != 0`.
pub fn shortcut_scan(ctx: &FieldCtx) -> Result<Report> {
    require_odd(ctx)?;
    let q = ctx.q();
    let s = match ctx.sqrt_q() {
        Some(s) if q > 9 => s,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "the square-value scan needs an odd square q > 9, got {q}"
            )))
        }
    };
    let started = Instant::now();
    let pow_s: Vec<Fe> = ctx.elements().map(|x| ctx.pow(x, s as u64)).collect();
    let norm: Vec<Fe> = ctx.elements().map(|x| ctx.norm(x).expect("square q")).collect();
    // |D| > q - s/2 + 1/2  <=>  2|D| > 2q - s + 1
    let threshold = 2 * q as i64 - s as i64 + 1;

    let per_a: Vec<(u64, u64, Vec<[u32; 4]>)> = ctx
        .nonzero()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| {
            let (mut scanned, mut qualifying) = (0u64, 0u64);
            let mut bad = Vec::new();
            let mut base = vec![Fe::ZERO; q as usize];
            let a_s = ctx.pow(a, s as u64);
            for d in ctx.elements() {
                let d_s_a = ctx.mul(ctx.pow(d, s as u64), a);
                for b in ctx.elements() {
                    for x in ctx.elements() {
                        let xi = x.0 as usize;
                        base[xi] = ctx.add(
                            ctx.add(ctx.mul(a, norm[xi]), ctx.mul(d, pow_s[xi])),
                            ctx.mul(b, x),
                        );
                    }
                    let relation = ctx.mul(a_s, b) == d_s_a;
                    for c in ctx.elements() {
                        scanned += 1;
                        let squares =
                            base.iter().filter(|&&v| ctx.chi(ctx.add(v, c)) >= 0).count() as i64;
                        if 2 * squares > threshold {
                            qualifying += 1;
                            if !relation {
                                bad.push([a.0, d.0, b.0, c.0]);
                            }
                        }
                    }
                }
            }
            (scanned, qualifying, bad)
        })
        .collect();
    let scanned: u64 = per_a.iter().map(|o| o.0).sum();
    let qualifying: u64 = per_a.iter().map(|o| o.1).sum();
    let bad: Vec<[u32; 4]> = per_a.into_iter().flat_map(|o| o.2).collect();

    // Positive control: u^2 (t + r x)^(s+1) in product and expanded form.
    let mut control = 0u64;
    let mut control_bad = Vec::new();
    for u in ctx.nonzero() {
        let u2 = ctx.mul(u, u);
        for t in ctx.elements() {
            for r in ctx.nonzero() {
                control += 1;
                let ca = ctx.mul(u2, ctx.pow(r, s as u64 + 1));
                let cd = ctx.mul(u2, ctx.mul(ctx.pow(r, s as u64), t));
                let cb = ctx.mul(u2, ctx.mul(r, ctx.pow(t, s as u64)));
                let cc = ctx.mul(u2, ctx.pow(t, s as u64 + 1));
                let ok = ctx.elements().all(|x| {
                    let product = ctx.mul(u2, ctx.pow(ctx.add(t, ctx.mul(r, x)), s as u64 + 1));
                    let xi = x.0 as usize;
                    let expanded = ctx.add(
                        ctx.add(ctx.mul(ca, norm[xi]), ctx.mul(cd, pow_s[xi])),
                        ctx.add(ctx.mul(cb, x), cc),
                    );
                    product == expanded && ctx.chi(product) >= 0
                });
                if !ok {
                    control_bad.push([u.0, t.0, r.0]);
                }
            }
        }
    }

    let mut report = Report::new("square-value-shortcut", ctx.spec_string())
        .param("sqrtQ", s)
        .param("minSquareValues", threshold / 2 + 1)
        .counter("scanned", scanned)
        .counter("qualifying", qualifying)
        .counter("violations", bad.len() as u64)
        .counter("controlScanned", control)
        .counter("controlFailures", control_bad.len() as u64);
    for w in bad.iter().take(16) {
        report = report.witness(serde_json::json!({ "a": w[0], "d": w[1], "b": w[2], "c": w[3] }));
    }
    for w in control_bad.iter().take(16) {
        report = report.witness(serde_json::json!({ "control": { "s": w[0], "t": w[1], "r": w[2] } }));
    }
    let ok = bad.is_empty() && control_bad.is_empty();
    Ok(report.verdict(Verdict::from_bool(ok)).finish(started))
}

/// Cap on search nodes for [`mcconnel_scan`].
pub const MCCONNEL_NODE_BUDGET: u64 = 200_000_000;

/// All `F` with `F(0) = 0`, `F(1) = 1` and
/// `(F(x) - F(y))^((q-1)/delta) = (x - y)^((q-1)/delta)` for every pair,
/// in odometer order. Values are assigned in index order and a branch is cut
/// at the first violated pair.
pub fn mcconnel_scan(ctx: &FieldCtx, delta: u64) -> Result<Vec<FuncTable>> {
    let q = ctx.q() as u64;
    if delta <= 1 || !(q - 1).is_multiple_of(delta) {
        return Err(Error::InvalidArgument(format!("delta = {delta} must exceed 1 and divide q - 1 = {}", q - 1)));
    }
    let e = (q - 1) / delta;
    let pow_e: Vec<Fe> = ctx.elements().map(|x| ctx.pow(x, e)).collect();
    let mut values = vec![Fe::ZERO, Fe::ONE];
    let mut found = Vec::new();
    let mut nodes = 0u64;
    fn extend(
        ctx: &FieldCtx,
        pow_e: &[Fe],
        values: &mut Vec<Fe>,
        found: &mut Vec<FuncTable>,
        nodes: &mut u64,
    ) -> Result<()> {
        let x = values.len();
        if x == ctx.q() as usize {
            found.push(FuncTable { values: values.clone() });
            return Ok(());
        }
        for v in ctx.elements() {
            *nodes += 1;
            if *nodes > MCCONNEL_NODE_BUDGET {
                return Err(Error::BudgetExceeded(format!("more than {MCCONNEL_NODE_BUDGET} search nodes")));
            }
            let fits = (0..x).all(|y| {
                let lhs = pow_e[ctx.sub(v, values[y]).0 as usize];
                let rhs = pow_e[ctx.sub(Fe(x as u32), Fe(y as u32)).0 as usize];
                lhs == rhs
            });
            if fits {
                values.push(v);
                extend(ctx, pow_e, values, found, nodes)?;
                values.pop();
            }
        }
        Ok(())
    }
    if q == 2 {
        return Ok(vec![FuncTable { values }]);
    }
    extend(ctx, &pow_e, &mut values, &mut found, &mut nodes)?;
    found.sort_by(|a, b| cmp_odometer(ctx, a, b));
    Ok(found)
}

fn cmp_odometer(ctx: &FieldCtx, a: &FuncTable, b: &FuncTable) -> Ordering {
    a.index(ctx).cmp(&b.index(ctx))
}

/// The Frobenius powers `x^(p^j)`, `0 <= j < n`, with `delta | p^j - 1`.
pub fn mcconnel_predicted(ctx: &FieldCtx, delta: u64) -> Vec<FuncTable> {
    let p = ctx.p() as u64;
    let mut out: Vec<FuncTable> = (0..ctx.n() as u64)
        .filter(|&j| (p.pow(j as u32) - 1).is_multiple_of(delta))
        .map(|j| FuncTable::from_fn(ctx, |x| ctx.frobenius(x, j)))
        .collect();
    out.sort_by(|a, b| cmp_odometer(ctx, a, b));
    out.dedup();
    out
}

pub fn mcconnel_report(ctx: &FieldCtx, delta: u64) -> Result<Report> {
    let started = Instant::now();
    let found = mcconnel_scan(ctx, delta)?;
    let predicted = mcconnel_predicted(ctx, delta);
    let mut report = Report::new("power-map-functional-equation", ctx.spec_string())
        .param("delta", delta)
        .param("found", found.iter().map(|f| f.indices()).collect::<Vec<_>>())
        .param("predicted", predicted.iter().map(|f| f.indices()).collect::<Vec<_>>())
        .counter("solutions", found.len() as u64)
        .note("Frobenius exponents taken over 0 <= j < n");
    let ok = found == predicted;
    if !ok {
        for f in found.iter().filter(|f| !predicted.contains(f)) {
            report = report.witness(serde_json::json!({ "unpredicted": f.indices() }));
        }
        for f in predicted.iter().filter(|f| !found.contains(f)) {
            report = report.witness(serde_json::json!({ "missing": f.indices() }));
        }
    }
    Ok(report.verdict(Verdict::from_bool(ok)).finish(started))
}

/// Exhaustive comparison of [`quad_sum_exact`] with [`char_sum`] over every
/// `(a, b, c)` with `a != 0`.
pub fn quad_sum_scan(ctx: &FieldCtx) -> Result<Report> {
    require_odd(ctx)?;
    let started = Instant::now();
    let mut report = Report::new("quadratic-sum-closed-form", ctx.spec_string());
    let mut scanned = 0u64;
    let mut mismatches = 0u64;
    for a in ctx.nonzero() {
        for b in ctx.elements() {
            for c in ctx.elements() {
                scanned += 1;
                let direct = char_sum(ctx, &DensePoly::new(vec![c, b, a]), Fe::ONE)?;
                let closed = quad_sum_exact(ctx, a, b, c)?;
                if direct != closed {
                    mismatches += 1;
                    if mismatches <= 16 {
                        report = report.witness(serde_json::json!({
                            "a": a, "b": b, "c": c, "direct": direct, "closedForm": closed
                        }));
                    }
                }
            }
        }
    }
    report = report.counter("scanned", scanned).counter("mismatches", mismatches);
    Ok(report.verdict(Verdict::from_bool(mismatches == 0)).finish(started))
}
