//! Intersecting families of polynomial graphs: the standard constructions
//! (pencils, the point-and-line family, the tangent family), pairwise
//! verification, common points, extension to a pencil, and the exact
//! stability threshold.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx, FieldString};
use crate::polyfun::{intersection_count, PointAG, PolyK};
use crate::report::{Report, Verdict};

/// A set of polynomials with a common degree bound, kept sorted
/// (lexicographic on coefficient indices, constant term first) and free of
/// duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    k: usize,
    members: Vec<PolyK>,
}

impl Family {
    pub fn new(k: usize, members: impl IntoIterator<Item = PolyK>) -> Result<Self> {
        let mut members: Vec<PolyK> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|m| m.k() != k) {
            return Err(Error::DegreeMismatch(k, bad.k()));
        }
        members.sort();
        members.dedup();
        Ok(Family { k, members })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[PolyK] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: &PolyK) -> bool {
        self.members.binary_search(f).is_ok()
    }

    pub fn is_subset_of(&self, other: &Family) -> bool {
        self.members.iter().all(|m| other.contains(m))
    }

    pub fn without(&self, f: &PolyK) -> Family {
        Family { k: self.k, members: self.members.iter().filter(|m| *m != f).cloned().collect() }
    }
}

/// All `q^k` polynomials of degree at most `k` through `(alpha, beta)`.
pub fn pencil(ctx: &FieldCtx, alpha: Fe, beta: Fe, k: usize) -> Result<Family> {
    if k == 0 {
        return Err(Error::InvalidArgument("degree bound must be at least 1".into()));
    }
    let q = ctx.q() as u64;
    let powers: Vec<Fe> = (0..=k as u64).map(|i| ctx.pow(alpha, i)).collect();
    let members = (0..q.pow(k as u32)).map(|mut idx| {
        let mut coeffs = vec![Fe::ZERO; k + 1];
        let mut acc = Fe::ZERO;
        for i in 1..=k {
            coeffs[i] = Fe((idx % q) as u32);
            idx /= q;
            acc = ctx.add(acc, ctx.mul(coeffs[i], powers[i]));
        }
        coeffs[0] = ctx.sub(beta, acc);
        PolyK::new(coeffs)
    });
    Family::new(k, members)
}

/// The family of degree-at-most-2 polynomials through `p` whose graph meets
/// the line `y = v x + w`, together with that line. `p` must lie off the
/// line. Built by filtering all `q^3` polynomials.
pub fn hilton_milner(ctx: &FieldCtx, p: PointAG, v: Fe, w: Fe) -> Result<Family> {
    let line = PolyK::new(vec![w, v, Fe::ZERO]);
    if line.passes_through(ctx, p) {
        return Err(Error::InvalidArgument(format!("point {p} lies on the line y = {v}x + {w}")));
    }
    let through_p = pencil(ctx, p.x, p.y, 2)?;
    let mut members: Vec<PolyK> = through_p
        .members
        .into_iter()
        .filter(|h| intersection_count(ctx, h, &line).expect("same bound") > 0)
        .collect();
    members.push(line);
    Family::new(2, members)
}

/// For `f = A x^2 + B x + C` over odd `q`: `f` together with every
/// `a x^2 + b x + C - (B - b)^2 / (4 (A - a))` where `A - a` is a nonzero
/// square. Each added member meets `f` in exactly one point.
pub fn tangent_family(ctx: &FieldCtx, a_top: Fe, b_top: Fe, c_top: Fe) -> Result<Family> {
    if !ctx.is_odd() {
        return Err(Error::RequiresOddOrder(ctx.q()));
    }
    let four = ctx.from_int(4);
    let mut members = vec![PolyK::new(vec![c_top, b_top, a_top])];
    for a in ctx.elements() {
        let u = ctx.sub(a_top, a);
        if u.is_zero() || !ctx.is_square(u) {
            continue;
        }
        let inv = ctx.inv_nonzero(ctx.mul(four, u));
        for b in ctx.elements() {
            let beta = ctx.sub(b_top, b);
            let c = ctx.sub(c_top, ctx.mul(ctx.mul(beta, beta), inv));
            members.push(PolyK::new(vec![c, b, a]));
        }
    }
    Family::new(2, members)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairCheck {
    pub holds: bool,
    /// Lex-least pair (in canonical member order) violating the condition.
    pub failing_pair: Option<(PolyK, PolyK)>,
    pub failing_count: Option<usize>,
}

/// Whether every pair of members shares at least `t` points.
pub fn is_t_intersecting(ctx: &FieldCtx, fam: &Family, t: usize) -> Result<PairCheck> {
    if t == 0 || t > fam.k {
        return Err(Error::InvalidArgument(format!("t = {t} must lie in 1..={}", fam.k)));
    }
    let m = &fam.members;
    let failure = (0..m.len()).into_par_iter().find_map_first(|i| {
        (i + 1..m.len()).find_map(|j| {
            let c = intersection_count(ctx, &m[i], &m[j]).expect("same bound");
            (c < t).then(|| (m[i].clone(), m[j].clone(), c))
        })
    });
    Ok(match failure {
        None => PairCheck { holds: true, failing_pair: None, failing_count: None },
        Some((f, g, c)) => PairCheck { holds: false, failing_pair: Some((f, g)), failing_count: Some(c) },
    })
}

/// Every point on all member graphs, in lexicographic order.
pub fn common_points(ctx: &FieldCtx, fam: &Family) -> Result<Vec<PointAG>> {
    let first = fam.members.first().ok_or(Error::Empty("family"))?;
    Ok(ctx
        .elements()
        .map(|x| PointAG::new(x, first.eval(ctx, x)))
        .filter(|&pt| fam.members.iter().all(|g| g.passes_through(ctx, pt)))
        .collect())
}

/// The lex-least point on all member graphs, if any.
pub fn common_point(ctx: &FieldCtx, fam: &Family) -> Result<Option<PointAG>> {
    Ok(common_points(ctx, fam)?.into_iter().next())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Extension {
    /// The family has more than `q^(k-1)` members, so at most one point is
    /// shared and the containing pencil is determined.
    Unique { point: PointAG, pencil: Family },
    /// Too few members to force uniqueness; one pencil per shared point.
    NotImplied { candidates: Vec<(PointAG, Family)> },
}

/// Extends an intersecting family with a common point to the pencil(s)
/// containing it.
pub fn extend_unique(ctx: &FieldCtx, fam: &Family) -> Result<Extension> {
    let check = is_t_intersecting(ctx, fam, 1)?;
    if !check.holds {
        return Err(Error::NotIntersecting(1));
    }
    let points = common_points(ctx, fam)?;
    if points.is_empty() {
        return Err(Error::NoCommonPoint);
    }
    let mut candidates = Vec::with_capacity(points.len());
    for &pt in &points {
        let p = pencil(ctx, pt.x, pt.y, fam.k)?;
        assert!(fam.is_subset_of(&p), "family not inside the pencil of its common point {pt}");
        candidates.push((pt, p));
    }
    let guarantee = (ctx.q() as u64).pow(fam.k as u32 - 1);
    if fam.len() as u64 > guarantee {
        assert_eq!(candidates.len(), 1, "two shared points on more than q^(k-1) graphs");
        let (point, pencil) = candidates.pop().expect("one candidate");
        Ok(Extension::Unique { point, pencil })
    } else {
        Ok(Extension::NotImplied { candidates })
    }
}

/// Whether `f -> (coeffs[t], ..., coeffs[k])` is injective on a
/// `t`-intersecting family. Returns the first colliding pair, if any.
pub fn top_coeff_injective(ctx: &FieldCtx, fam: &Family, t: usize) -> Result<Option<(PolyK, PolyK)>> {
    if !is_t_intersecting(ctx, fam, t)?.holds {
        return Err(Error::NotIntersecting(t));
    }
    let mut keyed: Vec<(&[Fe], &PolyK)> = fam.members.iter().map(|m| (&m.coeffs()[t..], m)).collect();
    keyed.sort();
    Ok(keyed
        .windows(2)
        .find(|w| w[0].0 == w[1].0)
        .map(|w| (w[0].1.clone(), w[1].1.clone())))
}

/// The size above which a large intersecting family must have a common
/// point, as the exact predicate `scale * size > m + sqrt_coeff * sqrt(q)`.
///
/// For `k = 2` this is `size > q^2 - q sqrt(q)/4 + c q/8 + sqrt(q)/8` with
/// `c = 1` for even `q` and `c = 3` for odd `q`, i.e.
/// `8 size > 8 q^2 + c q + (1 - 2q) sqrt(q)`. For `k > 2` it is
/// `size > q^k - q^(k-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityThreshold {
    pub q: u64,
    pub k: u32,
    pub c: u8,
    pub scale: i128,
    pub m: i128,
    pub sqrt_coeff: i128,
}

impl StabilityThreshold {
    pub fn new(q: u64, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("stability threshold needs k >= 2, got {k}")));
        }
        if q < 2 {
            return Err(Error::InvalidArgument(format!("q = {q} is not a field order")));
        }
        let c = if q.is_multiple_of(2) { 1 } else { 3 };
        let qi = q as i128;
        Ok(if k == 2 {
            StabilityThreshold { q, k, c, scale: 8, m: 8 * qi * qi + c as i128 * qi, sqrt_coeff: 1 - 2 * qi }
        } else {
            let top = qi.checked_pow(k).ok_or_else(|| Error::InvalidArgument("q^k overflows".into()))?;
            StabilityThreshold { q, k, c, scale: 1, m: top - top / qi, sqrt_coeff: 0 }
        })
    }

    /// Decides `l > m + sqrt_coeff sqrt(q)` with `sqrt_coeff <= 0` exactly.
    pub fn exceeded_by(&self, size: u64) -> bool {
        let l = self.scale * size as i128;
        if l >= self.m {
            return l > self.m || self.sqrt_coeff < 0;
        }
        let gap = self.m - l;
        gap * gap < self.sqrt_coeff * self.sqrt_coeff * self.q as i128
    }

    /// Floating-point value of the threshold, for display only.
    pub fn approx(&self) -> f64 {
        (self.m as f64 + self.sqrt_coeff as f64 * (self.q as f64).sqrt()) / self.scale as f64
    }

    /// Smallest integer size that exceeds the threshold.
    pub fn min_exceeding(&self) -> u64 {
        let mut s = self.approx().floor().max(0.0) as u64;
        s = s.saturating_sub(2);
        while !self.exceeded_by(s) {
            s += 1;
        }
        s
    }
}

pub fn stability_exceeds(ctx: &FieldCtx, size: u64, k: u32) -> Result<bool> {
    Ok(StabilityThreshold::new(ctx.q() as u64, k)?.exceeded_by(size))
}

/// Intersection, common point and top-coefficient checks for one family.
pub fn verify_family(ctx: &FieldCtx, fam: &Family, t: usize) -> Result<Report> {
    let started = Instant::now();
    let check = is_t_intersecting(ctx, fam, t)?;
    let mut report = Report::new("family-verify", ctx.spec_string())
        .param("k", fam.k)
        .param("t", t)
        .param("size", fam.len())
        .counter("members", fam.len() as u64);
    if let Some((f, g)) = &check.failing_pair {
        report = report
            .param("intersecting", false)
            .witness(serde_json::json!({
                "pair": [f.to_string(), g.to_string()],
                "sharedPoints": check.failing_count,
            }));
        return Ok(report.verdict(Verdict::Fail).finish(started));
    }
    let point = common_point(ctx, fam)?;
    report = report.param("intersecting", true).param("commonPoint", point.map(|p| [p.x, p.y]));
    if point.is_none() {
        report = report.note("HM-type: intersecting without a common point");
    }
    let collision = top_coeff_injective(ctx, fam, t)?;
    report = report.param("topCoefficientsInjective", collision.is_none());
    if let Some((f, g)) = &collision {
        report = report.witness(serde_json::json!({ "sameTopCoefficients": [f.to_string(), g.to_string()] }));
    }
    if fam.k >= 2 {
        let th = StabilityThreshold::new(ctx.q() as u64, fam.k as u32)?;
        report = report.param("exceedsStabilityThreshold", th.exceeded_by(fam.len() as u64));
    }
    Ok(report.verdict(Verdict::from_bool(collision.is_none())).finish(started))
}

/// Serializes a family: the field spec on the first line, then one member
/// per line as comma-separated coefficient indices.
pub fn write_family_file(ctx: &FieldCtx, fam: &Family) -> String {
    let mut out = format!("{}\n", ctx.spec_string());
    for m in &fam.members {
        writeln!(out, "{m}").expect("string write");
    }
    out
}

#[derive(Clone, Debug)]
pub struct FamilyFile {
    pub ctx: FieldCtx,
    pub family: Family,
    pub warnings: Vec<String>,
}

/// Parses the format written by [`write_family_file`]. Blank lines and lines
/// starting with `#` are skipped; duplicate members are dropped with a
/// warning.
pub fn parse_family_file(text: &str) -> Result<FamilyFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty family file".into()))?;
    let ctx = header
        .parse::<FieldString>()
        .and_then(|fs| fs.build())
        .map_err(|e| Error::Parse(format!("line 1: bad field spec {header:?}: {e}")))?;
    let mut k = None;
    let mut members = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (lineno, line) in lines {
        let f = PolyK::parse(&ctx, line, k).map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
        k.get_or_insert(f.k());
        if !seen.insert(f.clone()) {
            warnings.push(format!("line {lineno}: duplicate member {f} dropped"));
            continue;
        }
        members.push(f);
    }
    let k = k.ok_or_else(|| Error::Parse("family file has no members".into()))?;
    let family = Family::new(k, members)?;
    Ok(FamilyFile { ctx, family, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfun::{all_polys, intersection_count_exhaustive};

    fn f(p: u64, n: u32) -> FieldCtx {
        FieldCtx::with_order(p, n).unwrap()
    }

    fn poly(ix: &[u32]) -> PolyK {
        PolyK::from_indices(ix)
    }

    fn pt(x: u32, y: u32) -> PointAG {
        PointAG::new(Fe(x), Fe(y))
    }

    #[test]
    fn pencil_examples() {
        let f7 = f(7, 1);
        let p = pencil(&f7, Fe(0), Fe(0), 2).unwrap();
        assert_eq!(p.len(), 49);
        assert!(p.members().iter().all(|g| g.coeff(0).is_zero()));
        let f3 = f(3, 1);
        let p = pencil(&f3, Fe(1), Fe(1), 1).unwrap();
        assert_eq!(p.members(), &[poly(&[0, 1]), poly(&[1, 0]), poly(&[2, 2])]);
        assert_eq!(common_point(&f3, &p).unwrap(), Some(pt(1, 1)));
        assert!(pencil(&f3, Fe(0), Fe(0), 0).is_err());
    }

    #[test]
    fn pencils_match_filtered_enumeration() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (7, 1), (3, 2)] {
            let ctx = f(p, n);
            for k in 1..=3usize {
                if (ctx.q() as u64).pow(k as u32 + 1) > 10_000 {
                    continue;
                }
                for (x, y) in [(0, 0), (1, 0), (ctx.q() - 1, 1)] {
                    let fam = pencil(&ctx, Fe(x), Fe(y), k).unwrap();
                    let brute: Vec<PolyK> =
                        all_polys(&ctx, k).filter(|g| g.passes_through(&ctx, pt(x, y))).collect();
                    let brute = Family::new(k, brute).unwrap();
                    assert_eq!(fam, brute);
                    assert_eq!(fam.len() as u64, (ctx.q() as u64).pow(k as u32));
                }
            }
        }
    }

    #[test]
    fn hilton_milner_examples() {
        for (p, n, size) in [(5, 1, 15), (7, 1, 28), (2, 3, 36), (3, 1, 6), (2, 2, 10), (3, 2, 45)] {
            let ctx = f(p, n);
            let hm = hilton_milner(&ctx, pt(0, 1), Fe(0), Fe(0)).unwrap();
            assert_eq!(hm.len(), size, "q = {}", ctx.q());
            assert!(is_t_intersecting(&ctx, &hm, 1).unwrap().holds);
            assert_eq!(common_point(&ctx, &hm).unwrap(), None);
            assert_eq!(top_coeff_injective(&ctx, &hm, 1).unwrap(), None);
        }
        let f5 = f(5, 1);
        assert!(hilton_milner(&f5, pt(1, 3), Fe(2), Fe(1)).is_err());
        // a different point and line give the same size
        let hm = hilton_milner(&f5, pt(2, 4), Fe(3), Fe(1)).unwrap();
        assert_eq!(hm.len(), 15);
        assert!(is_t_intersecting(&f5, &hm, 1).unwrap().holds);
    }

    #[test]
    fn tangent_family_examples() {
        let f5 = f(5, 1);
        let m = tangent_family(&f5, Fe(1), Fe(0), Fe(0)).unwrap();
        assert_eq!(m.len(), 11);
        let top = poly(&[0, 0, 1]);
        for g in m.members().iter().filter(|g| **g != top) {
            assert_eq!(intersection_count_exhaustive(&f5, &top, g).unwrap(), 1);
        }
        assert!(is_t_intersecting(&f5, &m, 1).unwrap().holds);
        let two = is_t_intersecting(&f5, &m, 2).unwrap();
        assert!(!two.holds && two.failing_pair.is_some());
        assert_eq!(top_coeff_injective(&f5, &m, 1).unwrap(), None);
        let f7 = f(7, 1);
        let m = tangent_family(&f7, Fe(1), Fe(1), Fe(0)).unwrap();
        assert_eq!(m.len(), 22);
        assert!(is_t_intersecting(&f7, &m, 1).unwrap().holds);
        assert!(tangent_family(&f(2, 2), Fe(1), Fe(0), Fe(0)).is_err());
    }

    #[test]
    fn tangent_pair_discriminant_is_the_displayed_square() {
        for (p, n) in [(5, 1), (7, 1), (3, 2), (11, 1)] {
            let ctx = f(p, n);
            for (a_top, b_top, c_top) in [(1, 0, 0), (2, 3, 1), (ctx.q() - 1, 1, 2)] {
                let (a_top, b_top, c_top) = (Fe(a_top), Fe(b_top), Fe(c_top));
                let m = tangent_family(&ctx, a_top, b_top, c_top).unwrap();
                let top = PolyK::new(vec![c_top, b_top, a_top]);
                let rest: Vec<&PolyK> = m.members().iter().filter(|g| **g != top).collect();
                assert_eq!(rest.len() as u32, ctx.q() * (ctx.q() - 1) / 2);
                for (i, gi) in rest.iter().enumerate() {
                    for gj in &rest[i + 1..] {
                        let (ai, bi) = (gi.coeff(2), gi.coeff(1));
                        let (aj, bj) = (gj.coeff(2), gj.coeff(1));
                        let d = gi.sub(&ctx, gj).unwrap();
                        let disc = ctx.sub(
                            ctx.mul(d.coeff(1), d.coeff(1)),
                            ctx.mul(ctx.from_int(4), ctx.mul(d.coeff(2), d.coeff(0))),
                        );
                        let terms = [
                            ctx.mul(ai, b_top),
                            ctx.neg(ctx.mul(aj, b_top)),
                            ctx.neg(ctx.mul(a_top, bi)),
                            ctx.mul(aj, bi),
                            ctx.mul(a_top, bj),
                            ctx.neg(ctx.mul(ai, bj)),
                        ];
                        let num = terms.iter().fold(Fe::ZERO, |acc, &t| ctx.add(acc, t));
                        let den = ctx.mul(ctx.sub(a_top, ai), ctx.sub(a_top, aj));
                        let expr = ctx.div(ctx.mul(num, num), den).unwrap();
                        assert_eq!(disc, expr);
                        assert!(ctx.is_square(expr));
                    }
                }
            }
        }
    }

    #[test]
    fn t_intersection_examples() {
        let f5 = f(5, 1);
        let p = pencil(&f5, Fe(2), Fe(3), 2).unwrap();
        assert!(is_t_intersecting(&f5, &p, 1).unwrap().holds);
        let fam = Family::new(2, [poly(&[0, 0, 1]), poly(&[1, 0, 1])]).unwrap();
        let r = is_t_intersecting(&f5, &fam, 1).unwrap();
        assert!(!r.holds);
        assert_eq!(r.failing_pair, Some((poly(&[0, 0, 1]), poly(&[1, 0, 1]))));
        assert!(is_t_intersecting(&f5, &fam, 0).is_err());
        assert!(is_t_intersecting(&f5, &fam, 3).is_err());
        assert_eq!(top_coeff_injective(&f5, &fam, 1), Err(Error::NotIntersecting(1)));
    }

    #[test]
    fn failing_pair_is_lex_least() {
        let f3 = f(3, 1);
        let all = Family::new(2, all_polys(&f3, 2)).unwrap();
        let r = is_t_intersecting(&f3, &all, 1).unwrap();
        assert_eq!(r.failing_pair, Some((poly(&[0, 0, 0]), poly(&[1, 0, 0]))));
    }

    #[test]
    fn common_point_examples() {
        let f5 = f(5, 1);
        let single = Family::new(2, [poly(&[3, 1, 4])]).unwrap();
        assert_eq!(common_point(&f5, &single).unwrap(), Some(pt(0, 3)));
        let p = pencil(&f5, Fe(0), Fe(0), 2).unwrap();
        assert_eq!(common_point(&f5, &p).unwrap(), Some(pt(0, 0)));
        assert_eq!(common_point(&f5, &Family::new(2, []).unwrap()), Err(Error::Empty("family")));
    }

    #[test]
    fn extension_examples() {
        let f5 = f(5, 1);
        let p = pencil(&f5, Fe(0), Fe(0), 2).unwrap();
        for removed in p.members() {
            match extend_unique(&f5, &p.without(removed)).unwrap() {
                Extension::Unique { point, pencil } => {
                    assert_eq!(point, pt(0, 0));
                    assert_eq!(pencil, p);
                }
                other => panic!("expected unique extension, got {other:?}"),
            }
        }
        // x^2 and x share (0,0) and (1,1) only... plus nothing else over F_5
        let pair = Family::new(2, [poly(&[0, 1, 0]), poly(&[0, 0, 1])]).unwrap();
        match extend_unique(&f5, &pair).unwrap() {
            Extension::NotImplied { candidates } => {
                let pts: Vec<PointAG> = candidates.iter().map(|c| c.0).collect();
                assert_eq!(pts, vec![pt(0, 0), pt(1, 1)]);
            }
            other => panic!("expected candidates, got {other:?}"),
        }
        let hm = hilton_milner(&f5, pt(0, 1), Fe(0), Fe(0)).unwrap();
        assert_eq!(extend_unique(&f5, &hm), Err(Error::NoCommonPoint));
        let bad = Family::new(2, [poly(&[0, 0, 1]), poly(&[1, 0, 1])]).unwrap();
        assert_eq!(extend_unique(&f5, &bad), Err(Error::NotIntersecting(1)));
    }

    #[test]
    fn threshold_examples() {
        let t25 = StabilityThreshold::new(25, 2).unwrap();
        assert_eq!((t25.c, t25.m, t25.sqrt_coeff), (3, 5075, -49));
        assert!(t25.exceeded_by(604));
        assert!(!t25.exceeded_by(603));
        assert_eq!(t25.min_exceeding(), 604);
        let t16 = StabilityThreshold::new(16, 2).unwrap();
        assert!(t16.exceeded_by(243));
        assert!(!t16.exceeded_by(242));
        let t11 = StabilityThreshold::new(11, 2).unwrap();
        assert!((t11.approx() - 116.4186).abs() < 1e-3);
        assert!(t11.exceeded_by(117));
        assert!(!t11.exceeded_by(116));
        let t3 = StabilityThreshold::new(5, 3).unwrap();
        assert!(t3.exceeded_by(101));
        assert!(!t3.exceeded_by(100));
        assert!(StabilityThreshold::new(5, 1).is_err());
        assert!(stability_exceeds(&f(5, 1), 25, 2).unwrap());
    }

    #[test]
    fn threshold_matches_float_away_from_boundary() {
        for q in 2..400u64 {
            let th = StabilityThreshold::new(q, 2).unwrap();
            let exact = th.approx();
            for size in [exact.floor() as u64, exact.ceil() as u64, exact.ceil() as u64 + 1] {
                if (size as f64 - exact).abs() < 1e-9 {
                    continue;
                }
                assert_eq!(th.exceeded_by(size), size as f64 > exact, "q={q} size={size}");
            }
        }
    }

    #[test]
    fn point_line_family_stays_below_threshold() {
        for q in (11..=169u64).step_by(2) {
            let th = StabilityThreshold::new(q, 2).unwrap();
            assert!(!th.exceeded_by((q * q + q) / 2));
        }
    }

    #[test]
    fn family_file_round_trip() {
        let f5 = f(5, 1);
        let hm = hilton_milner(&f5, pt(0, 1), Fe(0), Fe(0)).unwrap();
        let text = write_family_file(&f5, &hm);
        assert!(text.starts_with("5^1\n"));
        let back = parse_family_file(&text).unwrap();
        assert_eq!(back.family, hm);
        assert!(back.warnings.is_empty());
        let dup = format!("{text}{}\n", hm.members()[3]);
        let back = parse_family_file(&dup).unwrap();
        assert_eq!(back.family, hm);
        assert_eq!(back.warnings.len(), 1);
        let err = parse_family_file("5^1\n0,1,2\n0,9,1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(parse_family_file("4^1\n0,1\n").is_err());
    }

    #[test]
    fn verify_reports() {
        let f5 = f(5, 1);
        let r = verify_family(&f5, &pencil(&f5, Fe(1), Fe(2), 2).unwrap(), 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.parameters["commonPoint"], serde_json::json!([1, 2]));
        let hm = hilton_milner(&f5, pt(0, 1), Fe(0), Fe(0)).unwrap();
        let r = verify_family(&f5, &hm, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.notes[0].contains("HM-type"));
        let bad = Family::new(2, [poly(&[0, 0, 1]), poly(&[1, 0, 1])]).unwrap();
        let r = verify_family(&f5, &bad, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }
}
