//! Table-driven arithmetic in `F_{p^n}`.
//!
//! Elements are addressed by an integer index: the coefficient vector
//! `c_0 + c_1 x + ... + c_{n-1} x^{n-1}` of the residue modulo the defining
//! polynomial is packed as base-`p` digits, `index = sum c_i p^i`. Index 0 is
//! zero, index 1 is one, and for `n = 1` the index is the residue itself.
//!
//! A [`FieldCtx`] is built once (exp/log, trace, quadratic character, norm
//! and Artin-Schreier tables) and is immutable afterwards, so it can be shared
//! freely between threads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Fields up to this order get a full `q x q` addition table.
const ADD_TABLE_MAX: u32 = 1024;

/// A field element, identified by its index in the owning [`FieldCtx`].
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub const fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Characteristic, degree and defining polynomial of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    /// Monic, degree `n`, low-degree coefficient first (length `n + 1`).
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn order(&self) -> u32 {
        self.p.pow(self.n)
    }
}

/// Parsed form of the `p^n` / `p^n/c0,c1,...,cn` field string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldString {
    pub p: u64,
    pub n: u32,
    pub modulus: Option<Vec<u32>>,
}

impl FromStr for FieldString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed field spec {s:?}, expected p^n or p^n/c0,...,cn"));
        let s = s.trim();
        let (head, tail) = match s.split_once('/') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let (p, n) = head.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        let modulus = match tail {
            None => None,
            Some(t) => Some(
                t.split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(FieldString { p, n, modulus })
    }
}

impl FieldString {
    pub fn build(&self) -> Result<FieldCtx> {
        FieldCtx::new(self.p, self.n, self.modulus.as_deref())
    }
}

/// Operations accepted by [`FieldCtx::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Second operand is a non-negative exponent.
    Pow,
    /// Second operand `j` is the iteration count: `x -> x^(p^j)`.
    Frobenius,
}

impl FromStr for ArithOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "add" => ArithOp::Add,
            "sub" => ArithOp::Sub,
            "mul" => ArithOp::Mul,
            "div" => ArithOp::Div,
            "pow" => ArithOp::Pow,
            "frobenius" | "frob" => ArithOp::Frobenius,
            other => return Err(Error::Parse(format!("unknown field operation {other:?}"))),
        })
    }
}

/// Roots of `a + b x + c x^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadRoots {
    /// All three coefficients vanish; every element is a root. Kept apart from
    /// a root set so that "equal polynomials" never reads as "q common points".
    IdenticallyZero,
    /// Distinct roots in increasing index order (0, 1 or 2 of them).
    Roots(Vec<Fe>),
}

impl QuadRoots {
    pub fn count(&self, q: u32) -> usize {
        match self {
            QuadRoots::IdenticallyZero => q as usize,
            QuadRoots::Roots(r) => r.len(),
        }
    }

    pub fn has_root(&self) -> bool {
        match self {
            QuadRoots::IdenticallyZero => true,
            QuadRoots::Roots(r) => !r.is_empty(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FieldCtx {
    spec: FieldSpec,
    default_modulus: bool,
    q: u32,
    generator: Fe,
    /// `exp[i] = g^i` for `0 <= i < 2(q-1)`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u32>>,
    frob: Vec<u32>,
    trace: Vec<u32>,
    /// Quadratic character, odd `q` only.
    chi: Option<Vec<i8>>,
    /// `x^(sqrt(q)+1)`, even `n` only.
    norm: Option<Vec<u32>>,
    sqrt_q: Option<u32>,
    /// Even `q`: `as_root[u]` is the smaller solution of `y^2 + y = u`, or `u32::MAX`.
    as_root: Option<Vec<u32>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Polynomials over F_p, used only while building the tables.

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = fp_inv(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let factor = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        if factor != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = top - dm + i;
                let sub = (factor as u64 * mc as u64 % p as u64) as u32;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        trim(&mut r);
    }
    r
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Trial division by every monic polynomial of degree `1..=n/2`.
pub fn is_irreducible_fp(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut divisor = digits_of(idx, p, d);
            divisor.push(1);
            if fp_poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits_of(mut idx: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((idx % p as u64) as u32);
        idx /= p as u64;
    }
    out
}

/// The lexicographically smallest monic irreducible of degree `n`, comparing
/// coefficients low-degree first.
pub fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for lex in 0..count {
        // c_0 is the most significant digit of `lex`.
        let mut coeffs = vec![0u32; n as usize];
        let mut rest = lex;
        for i in (0..n as usize).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs.push(1);
        if is_irreducible_fp(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

fn format_modulus(m: &[u32]) -> String {
    m.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

impl FieldCtx {
    /// Builds `F_{p^n}`. Without an explicit modulus the smallest monic
    /// irreducible (see [`smallest_irreducible`]) is used.
    pub fn new(p: u64, n: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
        if q > MAX_ORDER as u128 {
            return Err(Error::FieldTooLarge { p, n });
        }
        let p = p as u32;
        let q = q as u32;
        let default = smallest_irreducible(p, n);
        let modulus = match modulus {
            None => default.clone(),
            Some(m) => {
                if m.len() != n as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients for degree {n}, got {}",
                        n + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus(format!("coefficient out of range for p = {p}")));
                }
                if m[n as usize] != 1 {
                    return Err(Error::BadModulus("modulus must be monic".into()));
                }
                if !is_irreducible_fp(m, p) {
                    return Err(Error::ReducibleModulus(format_modulus(m)));
                }
                m.to_vec()
            }
        };
        let default_modulus = modulus == default;
        let spec = FieldSpec { p, n, modulus };
        Ok(Self::build(spec, default_modulus, q))
    }

    /// Shorthand for the default-modulus field of order `p^n`.
    pub fn with_order(p: u64, n: u32) -> Result<Self> {
        Self::new(p, n, None)
    }

    fn build(spec: FieldSpec, default_modulus: bool, q: u32) -> Self {
        let p = spec.p;
        let n = spec.n as usize;
        let raw_mul = |a: u32, b: u32| -> u32 {
            let da = digits_of(a as u64, p, n);
            let db = digits_of(b as u64, p, n);
            let mut prod = vec![0u32; 2 * n];
            for (i, &x) in da.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let r = fp_poly_rem(&prod, &spec.modulus, p);
            r.iter().rev().fold(0u32, |acc, &c| acc * p + c)
        };

        // Generator: smallest index of multiplicative order q - 1.
        let order = q - 1;
        let mut generator = 1u32;
        let mut exp = Vec::new();
        if q > 2 {
            for cand in 2..q {
                let mut powers = Vec::with_capacity(order as usize);
                let mut x = 1u32;
                loop {
                    powers.push(x);
                    x = raw_mul(x, cand);
                    if x == 1 {
                        break;
                    }
                }
                if powers.len() == order as usize {
                    generator = cand;
                    exp = powers;
                    break;
                }
            }
        } else {
            exp = vec![1];
        }
        assert_eq!(exp.len(), order as usize, "no generator of order q-1 found");
        let mut log = vec![u32::MAX; q as usize];
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }
        let doubled: Vec<u32> = exp.iter().chain(exp.iter()).copied().collect();

        let neg: Vec<u32> = (0..q)
            .map(|x| {
                digits_of(x as u64, p, n)
                    .iter()
                    .rev()
                    .fold(0u32, |acc, &c| acc * p + (p - c) % p)
            })
            .collect();

        let mut ctx = FieldCtx {
            spec,
            default_modulus,
            q,
            generator: Fe(generator),
            exp: doubled,
            log,
            neg,
            add_table: None,
            frob: Vec::new(),
            trace: Vec::new(),
            chi: None,
            norm: None,
            sqrt_q: None,
            as_root: None,
        };
        if p != 2 && n > 1 && q <= ADD_TABLE_MAX {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = ctx.add_digits(a, b);
                }
            }
            ctx.add_table = Some(table);
        }
        ctx.frob = (0..q).map(|x| ctx.pow(Fe(x), p as u64).0).collect();
        ctx.trace = (0..q)
            .map(|x| {
                let mut acc = Fe::ZERO;
                let mut y = Fe(x);
                for _ in 0..n {
                    acc = ctx.add(acc, y);
                    y = Fe(ctx.frob[y.0 as usize]);
                }
                assert!(acc.0 < p, "trace of {x} left the prime field");
                acc.0
            })
            .collect();
        if p != 2 {
            let chi: Vec<i8> = (0..q)
                .map(|x| match x {
                    0 => 0,
                    _ if ctx.log[x as usize].is_multiple_of(2) => 1,
                    _ => -1,
                })
                .collect();
            assert_eq!(chi.iter().filter(|&&c| c == 1).count() as u32, (q - 1) / 2);
            ctx.chi = Some(chi);
        } else {
            let mut as_root = vec![u32::MAX; q as usize];
            for y in 0..q {
                let u = ctx.add(ctx.mul(Fe(y), Fe(y)), Fe(y)).0 as usize;
                if as_root[u] == u32::MAX {
                    as_root[u] = y;
                }
            }
            ctx.as_root = Some(as_root);
        }
        if n.is_multiple_of(2) {
            let s = p.pow(n as u32 / 2);
            ctx.sqrt_q = Some(s);
            ctx.norm = Some((0..q).map(|x| ctx.pow(Fe(x), s as u64 + 1).0).collect());
        }
        ctx
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// The `p^n` or `p^n/c0,...,cn` string this field round-trips through.
    pub fn spec_string(&self) -> String {
        if self.default_modulus {
            format!("{}^{}", self.spec.p, self.spec.n)
        } else {
            format!("{}^{}/{}", self.spec.p, self.spec.n, format_modulus(&self.spec.modulus))
        }
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.spec.n
    }

    #[inline]
    pub fn is_odd(&self) -> bool {
        self.spec.p != 2
    }

    /// `sqrt(q)` when `n` is even.
    pub fn sqrt_q(&self) -> Option<u32> {
        self.sqrt_q
    }

    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.q).map(Fe)
    }

    pub fn element(&self, index: u64) -> Result<Fe> {
        if index < self.q as u64 {
            Ok(Fe(index as u32))
        } else {
            Err(Error::ElementOutOfRange { index, q: self.q })
        }
    }

    /// Embeds an integer into the prime field.
    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.spec.p as i64) as u32)
    }

    /// Base-`p` coefficient digits of an element, low degree first.
    pub fn digits(&self, x: Fe) -> Vec<u32> {
        digits_of(x.0 as u64, self.spec.p, self.spec.n as usize)
    }

    pub fn from_digits(&self, digits: &[u32]) -> Fe {
        Fe(digits.iter().rev().fold(0u32, |acc, &c| acc * self.spec.p + c))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.spec.p == 2 {
            Fe(a.0 ^ b.0)
        } else if self.spec.n == 1 {
            let s = a.0 + b.0;
            Fe(if s >= self.q { s - self.q } else { s })
        } else if let Some(t) = &self.add_table {
            Fe(t[(a.0 * self.q + b.0) as usize])
        } else {
            Fe(self.add_digits(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fe(self.exp[i as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nonzero(a))
    }

    /// Inverse of an element the caller knows is nonzero.
    #[inline]
    pub fn inv_nonzero(&self, a: Fe) -> Fe {
        debug_assert!(!a.is_zero());
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Fe(self.exp[((order - l) % order) as usize])
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (e % order)) % order) as usize])
    }

    /// `x -> x^(p^j)`.
    pub fn frobenius(&self, x: Fe, j: u64) -> Fe {
        let mut y = x;
        for _ in 0..(j % self.spec.n as u64) {
            y = Fe(self.frob[y.0 as usize]);
        }
        y
    }

    /// Discrete logarithm base [`FieldCtx::generator`]; `None` at zero.
    pub fn log(&self, x: Fe) -> Option<u32> {
        (!x.is_zero()).then(|| self.log[x.0 as usize])
    }

    pub fn exp(&self, k: u64) -> Fe {
        Fe(self.exp[(k % (self.q as u64 - 1)) as usize])
    }

    pub fn arith(&self, op: ArithOp, x: Fe, y: u64) -> Result<Fe> {
        let as_elem = || self.element(y);
        Ok(match op {
            ArithOp::Add => self.add(x, as_elem()?),
            ArithOp::Sub => self.sub(x, as_elem()?),
            ArithOp::Mul => self.mul(x, as_elem()?),
            ArithOp::Div => self.div(x, as_elem()?)?,
            ArithOp::Pow => self.pow(x, y),
            ArithOp::Frobenius => self.frobenius(x, y),
        })
    }

    /// Absolute trace to the prime field; the result has index `< p`.
    #[inline]
    pub fn trace(&self, x: Fe) -> Fe {
        Fe(self.trace[x.0 as usize])
    }

    /// `x^(sqrt(q)+1)`, the norm to the index-2 subfield.
    pub fn norm(&self, x: Fe) -> Result<Fe> {
        match &self.norm {
            Some(t) => Ok(Fe(t[x.0 as usize])),
            None => Err(Error::RequiresSquareOrder(self.q)),
        }
    }

    /// Quadratic character: 0 at zero, 1 on nonzero squares, -1 otherwise.
    pub fn quadratic_character(&self, x: Fe) -> Result<i8> {
        match &self.chi {
            Some(t) => Ok(t[x.0 as usize]),
            None => Err(Error::RequiresOddOrder(self.q)),
        }
    }

    /// Unchecked character lookup for hot loops over odd fields.
    #[inline]
    pub fn chi(&self, x: Fe) -> i8 {
        self.chi.as_ref().expect("quadratic character needs odd q")[x.0 as usize]
    }

    /// Whether `x` is a square (zero included).
    pub fn is_square(&self, x: Fe) -> bool {
        match &self.chi {
            Some(t) => t[x.0 as usize] >= 0,
            None => true,
        }
    }

    /// A square root of `x`, if any. In odd characteristic the root with the
    /// smaller discrete logarithm is returned; in characteristic 2 it is unique.
    pub fn sqrt(&self, x: Fe) -> Option<Fe> {
        if x.is_zero() {
            return Some(Fe::ZERO);
        }
        let l = self.log[x.0 as usize];
        if self.is_odd() {
            l.is_multiple_of(2).then(|| Fe(self.exp[(l / 2) as usize]))
        } else {
            Some(self.pow(x, self.q as u64 / 2))
        }
    }

    /// Roots of `a + b x + c x^2`, found in closed form.
    ///
    /// Odd `q`, `c != 0`: roots exist iff the discriminant `b^2 - 4ac` is a
    /// square. Even `q`, `c != 0`: `b = 0` gives the unique square root of
    /// `a/c`; otherwise roots exist iff `Tr(ac/b^2) = 0`.
    pub fn quadratic_roots(&self, a: Fe, b: Fe, c: Fe) -> QuadRoots {
        let mut roots = Vec::with_capacity(2);
        if c.is_zero() {
            if b.is_zero() {
                if a.is_zero() {
                    return QuadRoots::IdenticallyZero;
                }
            } else {
                roots.push(self.neg(self.mul(a, self.inv_nonzero(b))));
            }
            return QuadRoots::Roots(roots);
        }
        let c_inv = self.inv_nonzero(c);
        if self.is_odd() {
            let four = self.from_int(4);
            let disc = self.sub(self.mul(b, b), self.mul(four, self.mul(a, c)));
            let two_c_inv = self.inv_nonzero(self.mul(self.from_int(2), c));
            let minus_b = self.neg(b);
            match self.chi(disc) {
                -1 => {}
                0 => roots.push(self.mul(minus_b, two_c_inv)),
                _ => {
                    let s = self.sqrt(disc).expect("square discriminant");
                    roots.push(self.mul(self.add(minus_b, s), two_c_inv));
                    roots.push(self.mul(self.sub(minus_b, s), two_c_inv));
                }
            }
        } else if b.is_zero() {
            roots.push(self.sqrt(self.mul(a, c_inv)).expect("squares are surjective in char 2"));
        } else {
            // x = (b/c) y turns the equation into y^2 + y = ac/b^2.
            let b_inv = self.inv_nonzero(b);
            let u = self.mul(self.mul(a, c), self.mul(b_inv, b_inv));
            if self.trace(u).is_zero() {
                let table = self.as_root.as_ref().expect("even field has Artin-Schreier table");
                let y = Fe(table[u.0 as usize]);
                let scale = self.mul(b, c_inv);
                roots.push(self.mul(scale, y));
                roots.push(self.mul(scale, self.add(y, Fe::ONE)));
            }
        }
        roots.sort_unstable();
        roots.dedup();
        QuadRoots::Roots(roots)
    }
}
