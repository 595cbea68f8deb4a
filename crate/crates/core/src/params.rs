//! Good parameters, the point-counting lower bound on their number, and
//! fiber statistics of `g(u) = (u^d + 1) / u`.
//!
//! A parameter `a != 0` is good when `Q_a` has no root in `GF(2^m)`.
//! Since `Q_a(u) = 0` iff `a = g(u)`, the bad parameters are exactly the
//! nonzero values of `g`, giving a second, single-pass route to the good set.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{ensure_degree, Result};
use crate::exec::Exec;
use crate::gf2m::{Fe, FieldCtx};
use crate::trivariate::Family;
use crate::univariate::{exponent_d, PolyVariant, VariantEval};

pub const DIRECT_COUNT_MAX_DEGREE: u32 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GoodSetMethod {
    Rootscan,
    Gimage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodSetReport {
    pub m: u32,
    pub i: u32,
    pub d: u64,
    pub good: Vec<Fe>,
    pub count: usize,
    pub method: GoodSetMethod,
}

impl GoodSetReport {
    fn new(ctx: &FieldCtx, good: Vec<Fe>, method: GoodSetMethod) -> Self {
        GoodSetReport {
            m: ctx.m(),
            i: ctx.i(),
            d: exponent_d(ctx),
            count: good.len(),
            good,
            method,
        }
    }

    pub fn contains(&self, a: Fe) -> bool {
        self.good.binary_search(&a).is_ok()
    }
}

/// `{a != 0 : v_a has no nonzero root}`, by one early-exit scan per `a`.
pub fn good_set_variant(ctx: &FieldCtx, v: PolyVariant, exec: Exec) -> Result<GoodSetReport> {
    ctx.ensure_theorem_field()?;
    let good = exec
        .map_collect(1..ctx.size(), |b| {
            let a = ctx.elem(b as u32);
            let ev = VariantEval::new(ctx, a);
            let root = ctx.nonzero_elements().any(|t| ev.eval(ctx, v, t).is_zero());
            (!root).then_some(a)
        })
        .into_iter()
        .flatten()
        .collect();
    Ok(GoodSetReport::new(ctx, good, GoodSetMethod::Rootscan))
}

pub fn good_set_rootscan(ctx: &FieldCtx, exec: Exec) -> Result<GoodSetReport> {
    good_set_variant(ctx, PolyVariant::Q, exec)
}

/// Good parameters for a family, through its own criterion polynomial.
pub fn good_set_family(ctx: &FieldCtx, family: Family, exec: Exec) -> Result<GoodSetReport> {
    good_set_variant(ctx, family.criterion_variant(), exec)
}

/// `g(u) = (u^d + 1) / u` for `u != 0`.
#[inline]
pub fn g_value(ctx: &FieldCtx, u: Fe) -> Fe {
    let uq = ctx.frob_q(u);
    let ud = ctx.mul(ctx.frob_q(uq), ctx.mul(uq, u));
    ctx.mul(ctx.add(ud, ctx.one()), ctx.inv_nonzero(u))
}

/// Fiber sizes `#{u != 0 : g(u) = v}` indexed by the encoding of `v`.
pub fn fiber_histogram(ctx: &FieldCtx, exec: Exec) -> Vec<u32> {
    let hist: Vec<AtomicU32> = (0..ctx.size()).map(|_| AtomicU32::new(0)).collect();
    exec.fold_reduce(
        1..ctx.size(),
        || (),
        |(), b| {
            let v = g_value(ctx, ctx.elem(b as u32));
            hist[v.bits() as usize].fetch_add(1, Ordering::Relaxed);
        },
        |(), ()| (),
    );
    hist.into_iter().map(AtomicU32::into_inner).collect()
}

/// The complement of `g(GF(2^m)*)` in `GF(2^m)*`.
pub fn good_set_gimage(ctx: &FieldCtx, exec: Exec) -> Result<GoodSetReport> {
    ctx.ensure_theorem_field()?;
    let hist = fiber_histogram(ctx, exec);
    let good = ctx.nonzero_elements().filter(|a| hist[a.bits() as usize] == 0).collect();
    Ok(GoodSetReport::new(ctx, good, GoodSetMethod::Gimage))
}

/// `(2^m + 1 - (d-1)(d-2) 2^(m/2) - d) / d`, evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBound {
    pub d: u64,
    /// `floor(value * 10^12)`.
    scaled: BigInt,
    pub ceiling: BigInt,
}

const SCALE_DIGITS: u32 = 12;

impl LowerBound {
    /// The value rounded to `decimals <= 12` places, e.g. `"97.765"`.
    pub fn value_string(&self, decimals: u32) -> String {
        assert!(decimals <= SCALE_DIGITS);
        let drop = BigInt::from(10u64.pow(SCALE_DIGITS - decimals));
        // round half up on the scaled floor
        let twice: BigInt = &self.scaled * 2 + &drop;
        let rounded = twice.div_floor(&(drop * 2));
        let neg = rounded < BigInt::from(0);
        let digits = rounded.magnitude().to_string();
        let digits = format!("{digits:0>width$}", width = decimals as usize + 1);
        let (int, frac) = digits.split_at(digits.len() - decimals as usize);
        let sign = if neg { "-" } else { "" };
        if decimals == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    pub fn value_f64(&self) -> f64 {
        self.value_string(SCALE_DIGITS).parse().expect("decimal string")
    }

    pub fn is_vacuous(&self) -> bool {
        self.ceiling <= BigInt::from(0)
    }

    /// `count >= ceiling`.
    pub fn satisfied_by(&self, count: u64) -> bool {
        BigInt::from(count) >= self.ceiling
    }
}

impl Serialize for LowerBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LowerBound", 3)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("value", &self.value_string(3))?;
        st.serialize_field("ceiling", &self.ceiling.to_string())?;
        st.end()
    }
}

pub fn lower_bound(ctx: &FieldCtx) -> LowerBound {
    lower_bound_for(ctx.m(), ctx.q())
}

/// The bound for explicit `m` and `q`.
///
/// With `N = 2^m + 1 - d` and `K = (d-1)(d-2)`, the bound is
/// `(N - K sqrt(2^m)) / d`. For integer `T = N - floor(K sqrt(2^m))` its
/// ceiling is `ceil(T / d)` whether or not the square root is rational.
pub fn lower_bound_for(m: u32, q: u64) -> LowerBound {
    let d = q * q + q + 1;
    let big = |x: u64| BigInt::from(x);
    let n = (BigInt::from(1) << m) + 1 - big(d);
    let k = big(d - 1) * big(d - 2);
    let k_sq_pow = (&k * &k) << m;
    let floor_x = k_sq_pow.sqrt();
    let t: BigInt = &n - floor_x;
    let ceiling = Integer::div_ceil(&t, &big(d));
    let scale = BigInt::from(10u64).pow(SCALE_DIGITS);
    let floor_x_scaled = (k_sq_pow * &scale * &scale).sqrt();
    // within one unit of floor(value * 10^12), far below display precision
    let numer: BigInt = &n * &scale - floor_x_scaled;
    let scaled = numer.div_floor(&big(d));
    LowerBound { d, scaled, ceiling }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberStats {
    pub m: u32,
    pub i: u32,
    pub d: u64,
    /// Fiber size `i` mapped to `#C_i = #{v : #g^-1(v) = i}` over all `v`.
    pub class_counts: BTreeMap<u32, u64>,
    pub max_fiber: u32,
    /// `sum_i (i^2 - i) #C_i`.
    pub gamma_fiber: u64,
    /// `#{(x, y) : x != y, g(x) = g(y)}`, by pair scan.
    pub collision_pairs: Option<u64>,
    /// Points `x, y != 0` of `x y sum_{j<=d-2} x^(d-2-j) y^j + 1 = 0`,
    /// including any on the diagonal.
    pub gamma_direct: Option<u64>,
    /// Points of the same equation with `x = y`.
    pub gamma_diagonal: Option<u64>,
    /// Nonzero values with an empty fiber: the good parameters.
    pub c0: u64,
    pub lower_bound: LowerBound,
}

impl FiberStats {
    /// `sum #C_i = 2^m` and `sum i #C_i = 2^m - 1`.
    pub fn partition_identities_hold(&self) -> bool {
        let size = 1u64 << self.m;
        let total: u64 = self.class_counts.values().sum();
        let weighted: u64 = self.class_counts.iter().map(|(&i, &c)| i as u64 * c).sum();
        total == size && weighted == size - 1
    }

    /// Every count that was computed agrees with `gamma_fiber`.
    pub fn gamma_counts_agree(&self) -> bool {
        [self.collision_pairs, self.gamma_direct]
            .into_iter()
            .flatten()
            .all(|c| c == self.gamma_fiber)
    }
}

/// `x y sum_{j=0}^{d-2} x^(d-2-j) y^j + 1`.
pub fn gamma_equation(ctx: &FieldCtx, x: Fe, y: Fe) -> Fe {
    let d = exponent_d(ctx);
    let mut acc = ctx.zero();
    let mut yj = ctx.one();
    for _ in 0..=d - 2 {
        acc = ctx.add(ctx.mul(acc, x), yj);
        yj = ctx.mul(yj, y);
    }
    ctx.add(ctx.mul(ctx.mul(x, y), acc), ctx.one())
}

/// Fiber classes for any `m`; the two pair scans only for `m <= 13`.
pub fn fiber_stats(ctx: &FieldCtx, exec: Exec) -> Result<FiberStats> {
    let mut stats = fiber_classes(ctx, exec);
    if ctx.m() <= DIRECT_COUNT_MAX_DEGREE {
        let (pairs, direct, diag) = direct_counts(ctx, exec)?;
        stats.collision_pairs = Some(pairs);
        stats.gamma_direct = Some(direct);
        stats.gamma_diagonal = Some(diag);
    }
    Ok(stats)
}

/// Fiber classes and the bound, without the pair scans.
pub fn fiber_classes(ctx: &FieldCtx, exec: Exec) -> FiberStats {
    let hist = fiber_histogram(ctx, exec);
    let mut class_counts = BTreeMap::new();
    for &c in &hist {
        *class_counts.entry(c).or_insert(0u64) += 1;
    }
    let gamma_fiber = class_counts.iter().map(|(&i, &c)| (i as u64 * i as u64 - i as u64) * c).sum();
    let c0 = hist.iter().skip(1).filter(|&&c| c == 0).count() as u64;
    FiberStats {
        m: ctx.m(),
        i: ctx.i(),
        d: exponent_d(ctx),
        max_fiber: hist.iter().copied().max().unwrap_or(0),
        class_counts,
        gamma_fiber,
        collision_pairs: None,
        gamma_direct: None,
        gamma_diagonal: None,
        c0,
        lower_bound: lower_bound(ctx),
    }
}

/// Collision pairs of `g`, points of the Gamma equation, and diagonal points
/// of the Gamma equation, each by a full scan of nonzero pairs.
pub fn direct_counts(ctx: &FieldCtx, exec: Exec) -> Result<(u64, u64, u64)> {
    ensure_degree("direct Gamma count", ctx.m(), DIRECT_COUNT_MAX_DEGREE)?;
    let g: Vec<u32> = std::iter::once(0)
        .chain(ctx.nonzero_elements().map(|u| g_value(ctx, u).bits()))
        .collect();
    let g = &g;
    let n = ctx.order();
    let triple = exec.fold_reduce(
        1..n + 1,
        || (0u64, 0u64, 0u64),
        |(mut pairs, mut direct, mut diag), xb| {
            let x = ctx.elem(xb as u32);
            for yb in 1..=n {
                if yb != xb && g[xb as usize] == g[yb as usize] {
                    pairs += 1;
                }
                if gamma_equation(ctx, x, ctx.elem(yb as u32)).is_zero() {
                    direct += 1;
                    diag += (yb == xb) as u64;
                }
            }
            (pairs, direct, diag)
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    );
    Ok(triple)
}

/// One row of the good-parameter table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub m: u32,
    pub i: u32,
    pub q: u64,
    pub order: u64,
    pub good: usize,
    pub a1_good: bool,
}

impl Table1Row {
    pub const CSV_HEADER: &'static str = "m,i,q,order,good,a1_good";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.m,
            self.i,
            self.q,
            self.order,
            self.good,
            if self.a1_good { "yes" } else { "no" }
        )
    }
}

pub fn table1_row(ctx: &FieldCtx, exec: Exec) -> Result<Table1Row> {
    let set = good_set_rootscan(ctx, exec)?;
    Ok(Table1Row {
        m: ctx.m(),
        i: ctx.i(),
        q: ctx.q(),
        order: ctx.order(),
        good: set.count,
        a1_good: set.contains(ctx.one()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn ctx(m: u32, i: u32) -> FieldCtx {
        FieldCtx::new(m, i).unwrap()
    }

    #[test]
    fn small_good_counts() {
        assert_eq!(good_set_rootscan(&ctx(3, 1), Exec::Parallel).unwrap().count, 7);
        assert_eq!(good_set_gimage(&ctx(5, 1), Exec::Parallel).unwrap().count, 11);
        let c7 = ctx(7, 1);
        let r = good_set_rootscan(&c7, Exec::Parallel).unwrap();
        assert_eq!(r.count, 35);
        assert!(!r.contains(c7.one()));
        assert!(r.good.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn two_routes_agree() {
        for (m, i) in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 3), (9, 2)] {
            let c = ctx(m, i);
            let a = good_set_rootscan(&c, Exec::Parallel).unwrap();
            let b = good_set_gimage(&c, Exec::Parallel).unwrap();
            assert_eq!(a.good, b.good, "m={m} i={i}");
            assert_eq!(good_set_family(&c, Family::H, Exec::Parallel).unwrap().good, a.good);
        }
    }

    #[test]
    fn rejects_non_theorem_fields() {
        let raw = crate::gf2m::CtxOptions {
            theorem_mode: false,
            ..Default::default()
        };
        let c = FieldCtx::with_options(6, 1, raw).unwrap();
        assert_eq!(good_set_rootscan(&c, Exec::Parallel).unwrap_err(), Error::EvenDegree { m: 6 });
    }

    /// Rough floating-point evaluation of the closed form.
    fn float_bound(m: u32, q: u64) -> f64 {
        let d = (q * q + q + 1) as f64;
        (2f64.powi(m as i32) + 1.0 - (d - 1.0) * (d - 2.0) * 2f64.powf(m as f64 / 2.0) - d) / d
    }

    #[test]
    fn lower_bound_values() {
        let b = lower_bound_for(11, 2);
        assert_eq!(b.value_string(3), "97.765");
        assert_eq!(b.ceiling, BigInt::from(98));
        assert!(!b.is_vacuous());
        for (m, q) in [(3, 2), (5, 2), (5, 4), (9, 2), (13, 2), (15, 2), (21, 2), (21, 8), (23, 4)] {
            let b = lower_bound_for(m, q);
            let f = float_bound(m, q);
            assert!((b.value_f64() - f).abs() < 1e-6 * f.abs().max(1.0), "m={m} q={q}");
            assert_eq!(b.ceiling, BigInt::from(f.ceil() as i64), "m={m} q={q}");
        }
        assert!(lower_bound_for(5, 2).is_vacuous());
        assert!(lower_bound_for(3, 2).value_string(3).starts_with('-'));
    }

    #[test]
    fn even_degree_bound_is_rational() {
        // 2^(m/2) is an integer: (2^8 + 1 - 30*16 - 7)/7 = -230/7
        let b = lower_bound_for(8, 2);
        assert_eq!(b.value_string(3), "-32.857");
        assert_eq!(b.ceiling, BigInt::from(-32));
    }

    #[test]
    fn fiber_identities() {
        for (m, i) in [(3, 1), (5, 1), (5, 2), (7, 1), (9, 1), (9, 2)] {
            let c = ctx(m, i);
            let s = fiber_stats(&c, Exec::Parallel).unwrap();
            assert!(s.partition_identities_hold(), "m={m}");
            assert!(s.gamma_counts_agree(), "m={m}: {s:?}");
            assert_eq!(s.gamma_diagonal, Some(0));
            assert!(s.max_fiber as u64 <= s.d);
            assert_eq!(s.c0 as usize, good_set_rootscan(&c, Exec::Parallel).unwrap().count);
        }
    }

    #[test]
    fn gamma_equation_is_one_on_the_diagonal() {
        let c = ctx(7, 2);
        for x in c.nonzero_elements() {
            assert_eq!(gamma_equation(&c, x, x), c.one());
        }
    }

    #[test]
    fn histogram_is_schedule_independent() {
        let c = ctx(11, 3);
        assert_eq!(fiber_histogram(&c, Exec::Sequential), fiber_histogram(&c, Exec::Parallel));
    }

    #[test]
    fn table_rows() {
        let r = table1_row(&ctx(5, 2), Exec::Parallel).unwrap();
        assert_eq!(r.csv_row(), "5,2,4,31,11,yes");
        let r = table1_row(&ctx(7, 2), Exec::Parallel).unwrap();
        assert_eq!(r.csv_row(), "7,2,4,127,35,no");
    }
}
