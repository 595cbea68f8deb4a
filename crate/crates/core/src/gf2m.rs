//! Arithmetic in GF(2^m) for 3 <= m <= 24 in the polynomial basis.
//!
//! Elements are `m`-bit vectors stored in a `u32`; bit `j` is the coefficient
//! of `alpha^j`, where `alpha` is a root of the context modulus. Contexts with
//! `m <= 16` carry log/antilog and Frobenius tables; larger fields multiply by
//! carry-less shift-and-xor followed by reduction. Both paths are exposed so
//! they can be checked against each other.
//!
//! In debug builds every [`Fe`] carries the tag of the context that created
//! it, and every operation asserts that tags match.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const MIN_DEGREE: u32 = 3;
pub const MAX_DEGREE: u32 = 24;
const TABLE_MAX_DEGREE: u32 = 16;

#[cfg(debug_assertions)]
static NEXT_TAG: std::sync::atomic::AtomicU32 = std::sync::atomic::AtomicU32::new(1);

/// One element of GF(2^m), relative to the [`FieldCtx`] that created it.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fe {
    bits: u32,
    #[cfg(debug_assertions)]
    tag: u32,
}

impl Fe {
    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.bits == 1
    }
}

impl PartialOrd for Fe {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fe {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bits.cmp(&other.bits)
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.bits)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.bits)
    }
}

impl Serialize for Fe {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Options for [`FieldCtx::with_options`].
#[derive(Debug, Clone, Copy)]
pub struct CtxOptions {
    /// Modulus including the degree-m bit. `None` selects the smallest
    /// irreducible polynomial of degree m.
    pub modulus: Option<u32>,
    /// Reject `gcd(i, m) != 1`.
    pub theorem_mode: bool,
}

impl Default for CtxOptions {
    fn default() -> Self {
        CtxOptions {
            modulus: None,
            theorem_mode: true,
        }
    }
}

struct Tables {
    log: Vec<u32>,
    // exp[k] = g^k for k < 2 * order, so log sums need no reduction.
    exp: Vec<u32>,
    frob: Vec<u32>,
}

/// A concrete binary field GF(2^m) together with the Frobenius `x -> x^q`,
/// `q = 2^i`.
///
/// Immutable once built and cheap to clone; safe to share across threads.
#[derive(Clone)]
pub struct FieldCtx {
    m: u32,
    i: u32,
    modulus: u32,
    mask: u32,
    #[cfg(debug_assertions)]
    tag: u32,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("m", &self.m)
            .field("i", &self.i)
            .field("modulus", &format_args!("{:#x}", self.modulus))
            .finish()
    }
}

impl FieldCtx {
    /// Theorem-mode context with the default modulus.
    pub fn new(m: u32, i: u32) -> Result<Self> {
        Self::with_options(m, i, CtxOptions::default())
    }

    pub fn with_options(m: u32, i: u32, opts: CtxOptions) -> Result<Self> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&m) {
            return Err(Error::DegreeOutOfRange {
                m,
                min: MIN_DEGREE,
                max: MAX_DEGREE,
            });
        }
        if i == 0 {
            return Err(Error::FrobeniusOutOfRange { i, m });
        }
        let g = gcd(i as u64, m as u64) as u32;
        if opts.theorem_mode && g != 1 {
            return Err(Error::GcdViolation { i, m, gcd: g });
        }
        if i >= m {
            return Err(Error::FrobeniusOutOfRange { i, m });
        }
        let modulus = match opts.modulus {
            Some(p) => {
                if poly_degree(p as u64) != Some(m) || !is_irreducible(p as u64) {
                    return Err(Error::NonIrreducibleModulus {
                        modulus: format!("{p:#x}"),
                        m,
                    });
                }
                p
            }
            None => smallest_irreducible(m),
        };
        let mut ctx = FieldCtx {
            m,
            i,
            modulus,
            mask: (1u32 << m) - 1,
            #[cfg(debug_assertions)]
            tag: NEXT_TAG.fetch_add(1, std::sync::atomic::Ordering::Relaxed),
            tables: None,
        };
        if m <= TABLE_MAX_DEGREE {
            ctx.tables = Some(Arc::new(ctx.build_tables()));
        }
        Ok(ctx)
    }

    fn build_tables(&self) -> Tables {
        let order = self.mask;
        let gen = (2..=self.mask)
            .find(|&g| self.is_primitive_bits(g))
            .expect("multiplicative group is cyclic");
        let mut log = vec![0u32; (order + 1) as usize];
        let mut exp = vec![0u32; 2 * order as usize];
        let mut x = 1u32;
        for k in 0..order {
            exp[k as usize] = x;
            exp[(k + order) as usize] = x;
            log[x as usize] = k;
            x = self.mul_carryless(x, gen);
        }
        let frob = (0..=self.mask).map(|x| self.frob_by_squaring(x)).collect();
        Tables { log, exp, frob }
    }

    fn is_primitive_bits(&self, g: u32) -> bool {
        let order = self.mask as u64;
        prime_factors(order)
            .into_iter()
            .all(|p| self.pow_by_squaring(g, order / p) != 1)
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn i(&self) -> u32 {
        self.i
    }

    /// `q = 2^i`.
    #[inline]
    pub fn q(&self) -> u64 {
        1u64 << self.i
    }

    /// The modulus, including the degree-m bit.
    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// `2^m - 1`, the order of the multiplicative group.
    #[inline]
    pub fn order(&self) -> u64 {
        self.mask as u64
    }

    /// `2^m`, the number of elements.
    #[inline]
    pub fn size(&self) -> u64 {
        1u64 << self.m
    }

    /// True when `m` is odd and `gcd(i, m) = 1`.
    pub fn is_theorem_field(&self) -> bool {
        self.m % 2 == 1 && gcd(self.i as u64, self.m as u64) == 1
    }

    /// Errors unless the family theorems apply (m odd, gcd(i, m) = 1).
    pub fn ensure_theorem_field(&self) -> Result<()> {
        let g = gcd(self.i as u64, self.m as u64) as u32;
        if g != 1 {
            return Err(Error::GcdViolation {
                i: self.i,
                m: self.m,
                gcd: g,
            });
        }
        if self.m.is_multiple_of(2) {
            return Err(Error::EvenDegree { m: self.m });
        }
        Ok(())
    }

    /// Wraps raw coordinate bits. Panics if bits above `m` are set.
    #[inline]
    pub fn elem(&self, bits: u32) -> Fe {
        assert!(bits <= self.mask, "element {bits:#x} has bits above m = {}", self.m);
        self.wrap(bits)
    }

    #[inline]
    fn wrap(&self, bits: u32) -> Fe {
        Fe {
            bits,
            #[cfg(debug_assertions)]
            tag: self.tag,
        }
    }

    #[inline]
    fn check(&self, _x: Fe) {
        #[cfg(debug_assertions)]
        debug_assert_eq!(_x.tag, self.tag, "field element used with a foreign context");
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        self.wrap(0)
    }

    #[inline]
    pub fn one(&self) -> Fe {
        self.wrap(1)
    }

    /// The basis element `alpha`, a root of the modulus.
    #[inline]
    pub fn alpha(&self) -> Fe {
        self.wrap(2)
    }

    /// All elements in encoding order, starting at zero.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..=self.mask).map(move |b| self.wrap(b))
    }

    /// All nonzero elements in encoding order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (1..=self.mask).map(move |b| self.wrap(b))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        self.wrap(rng.gen::<u32>() & self.mask)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        self.wrap(rng.gen_range(1..=self.mask))
    }

    /// Lowercase hex, e.g. `0x3` for `1 + alpha`.
    pub fn to_hex(&self, x: Fe) -> String {
        self.check(x);
        format!("{:#x}", x.bits)
    }

    pub fn modulus_hex(&self) -> String {
        format!("{:#x}", self.modulus)
    }

    /// Parses the hex encoding produced by [`FieldCtx::to_hex`]; the `0x`
    /// prefix is optional.
    pub fn parse_elem(&self, s: &str) -> Result<Fe> {
        let bad = |reason: &str| Error::ParseElement {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        if digits.is_empty() {
            return Err(bad("empty"));
        }
        let v = u64::from_str_radix(digits, 16).map_err(|e| bad(&e.to_string()))?;
        if v > self.mask as u64 {
            return Err(bad(&format!("does not fit in m = {} bits", self.m)));
        }
        Ok(self.wrap(v as u32))
    }

    #[inline]
    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        self.check(x);
        self.check(y);
        self.wrap(x.bits ^ y.bits)
    }

    #[inline]
    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        self.check(x);
        self.check(y);
        self.wrap(self.mul_bits(x.bits, y.bits))
    }

    #[inline]
    fn mul_bits(&self, x: u32, y: u32) -> u32 {
        match &self.tables {
            Some(t) => {
                if x == 0 || y == 0 {
                    0
                } else {
                    t.exp[(t.log[x as usize] + t.log[y as usize]) as usize]
                }
            }
            None => self.mul_carryless(x, y),
        }
    }

    /// Multiplication by carry-less product and reduction, independent of
    /// the lookup tables.
    pub fn mul_schoolbook(&self, x: Fe, y: Fe) -> Fe {
        self.check(x);
        self.check(y);
        self.wrap(self.mul_carryless(x.bits, y.bits))
    }

    #[inline]
    fn mul_carryless(&self, x: u32, y: u32) -> u32 {
        let x = x as u64;
        let mut y = y;
        let mut prod = 0u64;
        while y != 0 {
            prod ^= x << y.trailing_zeros();
            y &= y - 1;
        }
        self.reduce(prod)
    }

    #[inline]
    fn reduce(&self, mut prod: u64) -> u32 {
        let m = self.m;
        let modulus = self.modulus as u64;
        while prod >> m != 0 {
            let top = 63 - prod.leading_zeros();
            prod ^= modulus << (top - m);
        }
        prod as u32
    }

    #[inline]
    pub fn square(&self, x: Fe) -> Fe {
        self.mul(x, x)
    }

    /// `x^e`; `0^0 = 1`.
    pub fn pow(&self, x: Fe, e: u64) -> Fe {
        self.check(x);
        if e == 0 {
            return self.one();
        }
        if x.bits == 0 {
            return self.zero();
        }
        match &self.tables {
            Some(t) => {
                let order = self.mask as u64;
                let k = (t.log[x.bits as usize] as u64 * (e % order)) % order;
                self.wrap(t.exp[k as usize])
            }
            None => self.wrap(self.pow_by_squaring(x.bits, e)),
        }
    }

    fn pow_by_squaring(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul_carryless(acc, base);
            }
            base = self.mul_carryless(base, base);
            e >>= 1;
        }
        acc
    }

    /// `x^(2^m - 2)`, the inverse of a nonzero `x`.
    pub fn inv(&self, x: Fe) -> Result<Fe> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nonzero(x))
    }

    #[inline]
    pub(crate) fn inv_nonzero(&self, x: Fe) -> Fe {
        debug_assert!(!x.is_zero());
        self.check(x);
        match &self.tables {
            Some(t) => {
                let order = self.mask;
                let l = t.log[x.bits as usize];
                self.wrap(t.exp[((order - l) % order) as usize])
            }
            None => self.wrap(self.pow_by_squaring(x.bits, self.order() - 1)),
        }
    }

    pub fn div(&self, x: Fe, y: Fe) -> Result<Fe> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^q` with `q = 2^i`.
    #[inline]
    pub fn frob_q(&self, x: Fe) -> Fe {
        self.check(x);
        match &self.tables {
            Some(t) => self.wrap(t.frob[x.bits as usize]),
            None => self.wrap(self.frob_by_squaring(x.bits)),
        }
    }

    fn frob_by_squaring(&self, mut x: u32) -> u32 {
        for _ in 0..self.i {
            x = self.mul_carryless(x, x);
        }
        x
    }

    /// `x^(2^k)`; exponents are taken modulo m.
    pub fn frob_pow2(&self, x: Fe, k: u32) -> Fe {
        self.check(x);
        let mut b = x.bits;
        for _ in 0..k % self.m {
            b = self.mul_bits(b, b);
        }
        self.wrap(b)
    }

    /// Absolute trace `sum_{j<m} c^(2^j)`, as 0 or 1.
    pub fn trace_abs(&self, c: Fe) -> u8 {
        self.trace_rel(c, 1).bits as u8
    }

    /// Relative trace to GF(2^k): `sum_{j < m/k} c^(2^(k j))`. `k` must divide m.
    pub fn trace_rel(&self, c: Fe, k: u32) -> Fe {
        assert!(k >= 1 && self.m.is_multiple_of(k), "k = {k} must divide m = {}", self.m);
        let mut acc = self.zero();
        let mut t = c;
        for _ in 0..self.m / k {
            acc = self.add(acc, t);
            t = self.frob_pow2(t, k);
        }
        acc
    }

    /// Whether `t^q + t = c` has a solution. The map `t -> t^q + t` has
    /// kernel GF(2^g), `g = gcd(i, m)`, and image the kernel of the relative
    /// trace to GF(2^g); for `g = 1` this is `trace_abs(c) == 0`.
    pub fn artin_schreier_solvable(&self, c: Fe) -> bool {
        let g = gcd(self.i as u64, self.m as u64) as u32;
        self.trace_rel(c, g).is_zero()
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn poly_degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every polynomial of degree at most `deg(p) / 2`.
pub fn is_irreducible(p: u64) -> bool {
    let Some(d) = poly_degree(p) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    (2u64..1u64 << (d / 2 + 1)).all(|f| poly_rem(p, f) != 0)
}

/// The irreducible polynomial of degree m whose coefficient vector, read as
/// an integer with the constant term in bit 0, is smallest.
pub fn smallest_irreducible(m: u32) -> u32 {
    ((1u64 << m) + 1..1u64 << (m + 1))
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree") as u32
}
