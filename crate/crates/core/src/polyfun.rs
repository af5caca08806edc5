//! Polynomials of bounded degree viewed as functions `F_q -> F_q`, and the
//! number of points their graphs share.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};

/// A polynomial of degree at most `k`, stored as exactly `k + 1`
/// coefficients (`coeffs[i]` multiplies `x^i`). Leading zeros are kept: the
/// degree bound, not the degree, is part of the identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyK {
    coeffs: Vec<Fe>,
}

/// A point of the affine plane `AG(2, q)`.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct PointAG {
    pub x: Fe,
    pub y: Fe,
}

impl PointAG {
    pub fn new(x: Fe, y: Fe) -> Self {
        PointAG { x, y }
    }
}

impl fmt::Display for PointAG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl PolyK {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<Fe>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least the constant coefficient");
        PolyK { coeffs }
    }

    pub fn from_indices(indices: &[u32]) -> Self {
        PolyK::new(indices.iter().map(|&i| Fe(i)).collect())
    }

    pub fn zero(k: usize) -> Self {
        PolyK { coeffs: vec![Fe::ZERO; k + 1] }
    }

    /// Parses `"1,3,2"` (meaning `1 + 3x + 2x^2`) against `ctx`. With `k`
    /// given, shorter inputs are zero-padded and longer ones rejected.
    pub fn parse(ctx: &FieldCtx, s: &str, k: Option<usize>) -> Result<Self> {
        let mut coeffs = s
            .split(',')
            .map(|tok| {
                let v: u64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient {tok:?} in {s:?}")))?;
                ctx.element(v)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(k) = k {
            if coeffs.len() > k + 1 {
                return Err(Error::Parse(format!(
                    "{s:?} has {} coefficients, degree bound {k} allows {}",
                    coeffs.len(),
                    k + 1
                )));
            }
            coeffs.resize(k + 1, Fe::ZERO);
        }
        Ok(PolyK::new(coeffs))
    }

    /// Degree bound.
    pub fn k(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs[i]
    }

    pub fn indices(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.0).collect()
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Fe) -> Fe {
        self.coeffs
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn graph(&self, ctx: &FieldCtx) -> Vec<PointAG> {
        ctx.elements().map(|x| PointAG::new(x, self.eval(ctx, x))).collect()
    }

    pub fn passes_through(&self, ctx: &FieldCtx, pt: PointAG) -> bool {
        self.eval(ctx, pt.x) == pt.y
    }

    pub fn add(&self, ctx: &FieldCtx, other: &PolyK) -> Result<PolyK> {
        self.zip(other, |a, b| ctx.add(a, b))
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &PolyK) -> Result<PolyK> {
        self.zip(other, |a, b| ctx.sub(a, b))
    }

    fn zip(&self, other: &PolyK, op: impl Fn(Fe, Fe) -> Fe) -> Result<PolyK> {
        if self.k() != other.k() {
            return Err(Error::DegreeMismatch(self.k(), other.k()));
        }
        Ok(PolyK {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    /// `f(x + alpha)`, under the same degree bound.
    pub fn shifted(&self, ctx: &FieldCtx, alpha: Fe) -> PolyK {
        // Horner over polynomials: acc <- acc * (x + alpha) + c.
        let k = self.k();
        let mut acc = vec![Fe::ZERO; k + 1];
        for &c in self.coeffs.iter().rev() {
            let mut next = vec![Fe::ZERO; k + 1];
            for i in 0..=k {
                next[i] = ctx.add(next[i], ctx.mul(acc[i], alpha));
                if i < k {
                    next[i + 1] = ctx.add(next[i + 1], acc[i]);
                }
            }
            next[0] = ctx.add(next[0], c);
            acc = next;
        }
        PolyK { coeffs: acc }
    }
}

impl fmt::Display for PolyK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Number of `x` with `f(x) = g(x)`; `q` when `f = g`.
///
/// Degree bounds up to 2 are solved in closed form through
/// [`FieldCtx::quadratic_roots`]; larger bounds are evaluated pointwise.
pub fn intersection_count(ctx: &FieldCtx, f: &PolyK, g: &PolyK) -> Result<usize> {
    let diff = f.sub(ctx, g)?;
    Ok(match diff.k() {
        0 => {
            if diff.coeffs[0].is_zero() {
                ctx.q() as usize
            } else {
                0
            }
        }
        1 | 2 => {
            let c = diff.coeffs.get(2).copied().unwrap_or(Fe::ZERO);
            ctx.quadratic_roots(diff.coeffs[0], diff.coeffs[1], c).count(ctx.q())
        }
        _ => ctx.elements().filter(|&x| diff.eval(ctx, x).is_zero()).count(),
    })
}

/// Pointwise count, independent of any closed form.
pub fn intersection_count_exhaustive(ctx: &FieldCtx, f: &PolyK, g: &PolyK) -> Result<usize> {
    if f.k() != g.k() {
        return Err(Error::DegreeMismatch(f.k(), g.k()));
    }
    Ok(ctx.elements().filter(|&x| f.eval(ctx, x) == g.eval(ctx, x)).count())
}

/// Whether the graphs of two distinct polynomials of degree at most 2 meet,
/// decided from the coefficients of `f - g = a + b x + c x^2` alone.
///
/// * `c = 0`: a nonconstant linear difference always has a root; a nonzero
///   constant never does.
/// * odd `q`, `c != 0`: the discriminant `b^2 - 4ac` must be a square.
/// * even `q`, `c != 0`: `b = 0` always meets (unique square root);
///   otherwise `Tr(ac / b^2) = 0`.
pub fn pair_intersects_fast(ctx: &FieldCtx, f: &PolyK, g: &PolyK) -> Result<bool> {
    if f.k() != 2 || g.k() != 2 {
        return Err(Error::InvalidArgument(format!(
            "closed-form pair test needs degree bound 2, got {} and {}",
            f.k(),
            g.k()
        )));
    }
    let d = f.sub(ctx, g)?;
    let (a, b, c) = (d.coeffs[0], d.coeffs[1], d.coeffs[2]);
    if c.is_zero() {
        if b.is_zero() {
            if a.is_zero() {
                return Err(Error::InvalidArgument("pair test needs f != g".into()));
            }
            return Ok(false);
        }
        return Ok(true);
    }
    if ctx.is_odd() {
        let disc = ctx.sub(ctx.mul(b, b), ctx.mul(ctx.from_int(4), ctx.mul(a, c)));
        Ok(ctx.chi(disc) >= 0)
    } else if b.is_zero() {
        Ok(true)
    } else {
        let b_inv = ctx.inv_nonzero(b);
        let u = ctx.mul(ctx.mul(a, c), ctx.mul(b_inv, b_inv));
        Ok(ctx.trace(u).is_zero())
    }
}

/// Every polynomial of degree at most `k`, ordered by base-`q` packing
/// (`index = sum coeffs[i] q^i`).
pub fn all_polys(ctx: &FieldCtx, k: usize) -> impl Iterator<Item = PolyK> + '_ {
    let q = ctx.q() as u64;
    let count = q.pow(k as u32 + 1);
    (0..count).map(move |idx| unpack(ctx, idx, k))
}

pub fn unpack(ctx: &FieldCtx, mut idx: u64, k: usize) -> PolyK {
    let q = ctx.q() as u64;
    let coeffs = (0..=k)
        .map(|_| {
            let c = Fe((idx % q) as u32);
            idx /= q;
            c
        })
        .collect();
    PolyK { coeffs }
}

pub fn pack(ctx: &FieldCtx, f: &PolyK) -> u64 {
    let q = ctx.q() as u64;
    f.coeffs.iter().rev().fold(0u64, |acc, c| acc * q + c.0 as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64, n: u32) -> FieldCtx {
        FieldCtx::with_order(p, n).unwrap()
    }

    fn poly(ix: &[u32]) -> PolyK {
        PolyK::from_indices(ix)
    }

    #[test]
    fn eval_examples() {
        let f5 = f(5, 1);
        assert_eq!(poly(&[0, 0, 1]).eval(&f5, Fe(3)), Fe(4));
        assert_eq!(PolyK::zero(2).eval(&f5, Fe(3)), Fe(0));
        let f4 = f(2, 2);
        // w x + 1 at x = w: w^2 + 1 = w
        assert_eq!(poly(&[1, 2]).eval(&f4, Fe(2)), Fe(2));
        assert_eq!(poly(&[1, 2, 3]).graph(&f4).len(), 4);
    }

    #[test]
    fn intersection_examples() {
        let f5 = f(5, 1);
        assert_eq!(intersection_count(&f5, &poly(&[0, 0, 1]), &poly(&[0, 1, 0])).unwrap(), 2);
        assert_eq!(intersection_count(&f5, &poly(&[1, 0, 1]), &poly(&[0, 0, 1])).unwrap(), 0);
        assert_eq!(intersection_count(&f5, &poly(&[0, 3, 1]), &poly(&[4, 1, 2])).unwrap(), 0);
        assert_eq!(intersection_count(&f5, &poly(&[4, 1, 2]), &poly(&[4, 1, 2])).unwrap(), 5);
        assert_eq!(
            intersection_count(&f5, &poly(&[0, 1]), &poly(&[0, 1, 0])),
            Err(Error::DegreeMismatch(1, 2))
        );
    }

    #[test]
    fn fast_pair_examples() {
        let f5 = f(5, 1);
        assert!(pair_intersects_fast(&f5, &poly(&[0, 0, 1]), &poly(&[0, 1, 0])).unwrap());
        assert!(!pair_intersects_fast(&f5, &poly(&[0, 3, 1]), &poly(&[4, 1, 2])).unwrap());
        let f4 = f(2, 2);
        assert!(pair_intersects_fast(&f4, &poly(&[0, 0, 1]), &poly(&[1, 1, 1])).unwrap());
        assert!(pair_intersects_fast(&f4, &poly(&[0, 1]), &poly(&[1, 1])).is_err());
        assert!(pair_intersects_fast(&f4, &poly(&[0, 1, 1]), &poly(&[0, 1, 1])).is_err());
    }

    #[test]
    fn fast_pair_matches_pointwise_count() {
        for (p, n) in [(3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let ctx = f(p, n);
            let polys: Vec<PolyK> = all_polys(&ctx, 2).collect();
            for (i, a) in polys.iter().enumerate() {
                for b in &polys[i + 1..] {
                    let brute = intersection_count_exhaustive(&ctx, a, b).unwrap();
                    assert_eq!(pair_intersects_fast(&ctx, a, b).unwrap(), brute >= 1);
                    assert_eq!(intersection_count(&ctx, a, b).unwrap(), brute);
                    assert!(brute <= 2);
                }
            }
        }
    }

    #[test]
    fn cubic_bound_uses_pointwise_count() {
        let ctx = f(5, 1);
        // x^3 - x = x(x-1)(x+1)
        let a = poly(&[0, 4, 0, 1]);
        assert_eq!(intersection_count(&ctx, &a, &PolyK::zero(3)).unwrap(), 3);
    }

    #[test]
    fn parse_and_display() {
        let ctx = f(5, 1);
        let p = PolyK::parse(&ctx, "1,3,2", None).unwrap();
        assert_eq!(p, poly(&[1, 3, 2]));
        assert_eq!(p.to_string(), "1,3,2");
        assert_eq!(PolyK::parse(&ctx, "1", Some(2)).unwrap(), poly(&[1, 0, 0]));
        assert!(PolyK::parse(&ctx, "1,5", None).is_err());
        assert!(PolyK::parse(&ctx, "1,2,3,4", Some(2)).is_err());
        assert!(PolyK::parse(&ctx, "1,,3", None).is_err());
    }

    #[test]
    fn pack_round_trip() {
        let ctx = f(3, 1);
        for (i, p) in all_polys(&ctx, 2).enumerate() {
            assert_eq!(pack(&ctx, &p), i as u64);
        }
    }

    fn arb_case() -> impl Strategy<Value = (u64, u32, Vec<u32>, Vec<u32>, Vec<u32>, u32)> {
        prop_oneof![Just((3u64, 1u32)), Just((2, 2)), Just((5, 1)), Just((7, 1)), Just((2, 3)), Just((3, 2))]
            .prop_flat_map(|(p, n)| {
                let q = (p as u32).pow(n);
                (
                    Just(p),
                    Just(n),
                    prop::collection::vec(0..q, 3),
                    prop::collection::vec(0..q, 3),
                    prop::collection::vec(0..q, 3),
                    0..q,
                )
            })
    }

    proptest! {
        #[test]
        fn count_symmetric_and_translation_invariant(
            (p, n, a, b, h, alpha) in arb_case()
        ) {
            let ctx = f(p, n);
            let (a, b, h) = (poly(&a), poly(&b), poly(&h));
            let c = intersection_count(&ctx, &a, &b).unwrap();
            prop_assert_eq!(c, intersection_count(&ctx, &b, &a).unwrap());
            let ah = a.add(&ctx, &h).unwrap();
            let bh = b.add(&ctx, &h).unwrap();
            prop_assert_eq!(c, intersection_count(&ctx, &ah, &bh).unwrap());
            let alpha = Fe(alpha);
            let (sa, sb) = (a.shifted(&ctx, alpha), b.shifted(&ctx, alpha));
            prop_assert_eq!(c, intersection_count(&ctx, &sa, &sb).unwrap());
            for x in ctx.elements() {
                prop_assert_eq!(sa.eval(&ctx, x), a.eval(&ctx, ctx.add(x, alpha)));
            }
            if a != b {
                prop_assert!(c <= 2);
            }
        }
    }
}
