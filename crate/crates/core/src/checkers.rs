//! Permutation and APN decisions for a [`QuadForm3`].
//!
//! Ground-truth methods:
//!
//! * image: evaluate on all `2^(3m)` inputs and mark an occupancy bitset;
//! * linear permutation test: `f` is injective iff `f(w)` is outside the image
//!   of `D_w f` for every `w != 0`;
//! * kernel APN test: every nonzero direction has `|ker D_d f| = 2`;
//! * exhaustive APN test: per-direction histograms of `f(x+d) + f(x)`.
//!
//! The root criterion of [`crate::univariate`] is a theorem-derived shortcut
//! and is labeled as such in reports.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::Serialize;

use crate::error::{ensure_degree, Result};
use crate::exec::Exec;
use crate::gf2lin::EchelonBasis;
use crate::gf2m::{Fe, FieldCtx};
use crate::trivariate::{decode_triple, diff_nullity_with, encode_triple, Family, QuadForm3, Triple};
use crate::univariate;

pub const IMAGE_MAX_DEGREE: u32 = 10;
pub const KERNEL_MAX_DEGREE: u32 = 9;
pub const EXHAUSTIVE_MAX_DEGREE: u32 = 5;

/// Whether `f` is a bijection of `GF(2^m)^3`, by marking every image.
pub fn is_permutation(ctx: &FieldCtx, f: &QuadForm3, exec: Exec) -> Result<bool> {
    ensure_degree("is_permutation (image)", ctx.m(), IMAGE_MAX_DEGREE)?;
    let n = 1u64 << (3 * ctx.m());
    let words: Vec<AtomicU64> = (0..n.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
    let collision = exec.find_first(0..n, |idx| {
        let y = encode_triple(ctx, f.eval(ctx, decode_triple(ctx, idx as u128))) as u64;
        let bit = 1u64 << (y % 64);
        let prev = words[(y / 64) as usize].fetch_or(bit, Ordering::Relaxed);
        (prev & bit != 0).then_some(())
    });
    Ok(collision.is_none())
}

/// Columns of `D_w f` and whether `f(w)` lies in their span.
fn value_in_diff_image(ctx: &FieldCtx, f: &QuadForm3, w: Triple, basis: &mut EchelonBasis) -> bool {
    diff_nullity_with(ctx, f, w, basis);
    basis.contains(encode_triple(ctx, f.eval(ctx, w)))
}

/// Permutation test by linear algebra: `f(x + w) = f(x)` has a solution iff
/// `f(w)` lies in the image of `D_w f`. Returns the first colliding
/// difference, if any.
pub fn permutation_collision(ctx: &FieldCtx, f: &QuadForm3, exec: Exec) -> Result<Option<Triple>> {
    ensure_degree("is_permutation (linear)", ctx.m(), KERNEL_MAX_DEGREE)?;
    let n = 1u64 << (3 * ctx.m());
    Ok(exec.find_first_init(
        1..n,
        || EchelonBasis::with_capacity(72),
        |basis, idx| {
            let w = decode_triple(ctx, idx as u128);
            value_in_diff_image(ctx, f, w, basis).then_some(w)
        },
    ))
}

pub fn is_permutation_linear(ctx: &FieldCtx, f: &QuadForm3, exec: Exec) -> Result<bool> {
    Ok(permutation_collision(ctx, f, exec)?.is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ApnKernelReport {
    pub is_apn: bool,
    /// 2 when APN, otherwise the kernel size at the witness.
    pub max_kernel: u128,
    /// Lowest-encoded direction with kernel larger than 2.
    pub witness: Option<Triple>,
}

pub fn is_apn_kernel(ctx: &FieldCtx, f: &QuadForm3, exec: Exec) -> Result<ApnKernelReport> {
    ensure_degree("is_apn_kernel", ctx.m(), KERNEL_MAX_DEGREE)?;
    let n = 1u64 << (3 * ctx.m());
    let hit = exec.find_first_init(
        1..n,
        || EchelonBasis::with_capacity(72),
        |basis, idx| {
            let d = decode_triple(ctx, idx as u128);
            let k = diff_nullity_with(ctx, f, d, basis);
            (k > 1).then_some((d, 1u128 << k))
        },
    );
    Ok(match hit {
        None => ApnKernelReport {
            is_apn: true,
            max_kernel: 2,
            witness: None,
        },
        Some((d, size)) => ApnKernelReport {
            is_apn: false,
            max_kernel: size,
            witness: Some(d),
        },
    })
}

/// A direction `d` and output difference `b` with more than two solutions of
/// `f(x + d) + f(x) = b`, with the solution count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DifferentialViolation {
    pub direction: Triple,
    pub output: Triple,
    pub solutions: u64,
}

struct Histogram {
    counts: Vec<u32>,
    stamps: Vec<u32>,
    stamp: u32,
}

/// First violation of the APN definition, found by counting solutions for
/// every direction and output difference. `m <= 5`.
pub fn apn_exhaustive_violation(ctx: &FieldCtx, f: &QuadForm3, exec: Exec) -> Result<Option<DifferentialViolation>> {
    ensure_degree("is_apn_exhaustive", ctx.m(), EXHAUSTIVE_MAX_DEGREE)?;
    let n = 1usize << (3 * ctx.m());
    let table: Vec<u32> = (0..n)
        .map(|i| encode_triple(ctx, f.eval(ctx, decode_triple(ctx, i as u128))) as u32)
        .collect();
    let table = &table;
    Ok(exec.find_first_init(
        1..n as u64,
        || Histogram {
            counts: vec![0; n],
            stamps: vec![0; n],
            stamp: 0,
        },
        |h, d| {
            let d = d as usize;
            h.stamp += 1;
            let mut worst = (0u32, 0usize);
            for x in 0..n {
                let b = (table[x ^ d] ^ table[x]) as usize;
                if h.stamps[b] != h.stamp {
                    h.stamps[b] = h.stamp;
                    h.counts[b] = 0;
                }
                h.counts[b] += 1;
                if h.counts[b] > worst.0 {
                    worst = (h.counts[b], b);
                }
            }
            (worst.0 > 2).then(|| DifferentialViolation {
                direction: decode_triple(ctx, d as u128),
                output: decode_triple(ctx, worst.1 as u128),
                solutions: worst.0 as u64,
            })
        },
    ))
}

pub fn is_apn_exhaustive(ctx: &FieldCtx, f: &QuadForm3, exec: Exec) -> Result<bool> {
    Ok(apn_exhaustive_violation(ctx, f, exec)?.is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Exhaustive up to m = 5, kernel up to m = 9, criterion beyond.
    Auto,
    /// Linear permutation test and kernel APN test.
    Kernel,
    /// Image permutation test and exhaustive APN test.
    Exhaustive,
    /// Image permutation test and kernel APN test.
    Image,
    /// Root-freeness of the family's univariate criterion, not a measurement.
    Criterion,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Kernel => "kernel",
            Method::Exhaustive => "exhaustive",
            Method::Image => "image",
            Method::Criterion => "criterion",
        }
    }

    /// The concrete method `Auto` selects for degree `m`.
    pub fn resolve(self, m: u32) -> Method {
        match self {
            Method::Auto if m <= EXHAUSTIVE_MAX_DEGREE => Method::Exhaustive,
            Method::Auto if m <= KERNEL_MAX_DEGREE => Method::Kernel,
            Method::Auto => Method::Criterion,
            other => other,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatusReport {
    pub a: Fe,
    pub family: Family,
    pub is_permutation: bool,
    pub is_apn: bool,
    pub method: Method,
    /// Absent under [`Method::Criterion`], where nothing is measured.
    pub max_kernel: Option<u128>,
    pub elapsed_ms: f64,
}

impl StatusReport {
    pub const CSV_HEADER: &'static str = "a_hex,family,is_perm,is_apn,method,max_kernel,elapsed_ms";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3}",
            self.a,
            self.family,
            self.is_permutation,
            self.is_apn,
            self.method,
            self.max_kernel.map(|k| k.to_string()).unwrap_or_default(),
            self.elapsed_ms
        )
    }
}

pub fn check_status(ctx: &FieldCtx, family: Family, a: Fe, method: Method, exec: Exec) -> Result<StatusReport> {
    let start = Instant::now();
    let f = family.make(ctx, a)?;
    let method = method.resolve(ctx.m());
    let (is_permutation, is_apn, max_kernel) = match method {
        Method::Kernel => {
            let apn = is_apn_kernel(ctx, &f, exec)?;
            (is_permutation_linear(ctx, &f, exec)?, apn.is_apn, Some(apn.max_kernel))
        }
        Method::Image => {
            let apn = is_apn_kernel(ctx, &f, exec)?;
            (is_permutation(ctx, &f, exec)?, apn.is_apn, Some(apn.max_kernel))
        }
        Method::Exhaustive => {
            let v = apn_exhaustive_violation(ctx, &f, exec)?;
            let max = v.map_or(2, |v| v.solutions as u128);
            (is_permutation(ctx, &f, exec)?, v.is_none(), Some(max))
        }
        Method::Criterion | Method::Auto => {
            let good = !univariate::has_root(ctx, family.criterion_variant(), a, exec)?;
            (good, good, None)
        }
    };
    Ok(StatusReport {
        a,
        family,
        is_permutation,
        is_apn,
        method,
        max_kernel,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Root counts of the six variants, in [`PolyVariant::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct RootCounts {
    pub P: usize,
    pub Pprime: usize,
    pub Q: usize,
    pub Qq: usize,
    pub R: usize,
    pub S: usize,
}

impl RootCounts {
    pub fn from_array(c: [usize; 6]) -> Self {
        RootCounts {
            P: c[0],
            Pprime: c[1],
            Q: c[2],
            Qq: c[3],
            R: c[4],
            S: c[5],
        }
    }

    pub fn to_array(self) -> [usize; 6] {
        [self.P, self.Pprime, self.Q, self.Qq, self.R, self.S]
    }

    /// All six have a root or none does.
    pub fn consistent(self) -> bool {
        let a = self.to_array();
        a.iter().all(|&c| c == 0) || a.iter().all(|&c| c > 0)
    }
}

/// Verdicts for one parameter: root counts, measured status, and whether
/// `a^(q^2+q+1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamReport {
    pub a: Fe,
    pub family: Family,
    pub roots: RootCounts,
    /// The family's criterion polynomial is root-free.
    pub criterion_good: bool,
    pub is_permutation: bool,
    pub is_apn: bool,
    pub method: Method,
    pub max_kernel: Option<u128>,
    pub diagonal: bool,
}

impl ParamReport {
    pub const CSV_HEADER: &'static str =
        "a_hex,family,roots_P,roots_Pprime,roots_Q,roots_Qq,roots_R,roots_S,criterion_good,is_perm,is_apn,method,max_kernel,diagonal";

    pub fn csv_row(&self) -> String {
        let r = self.roots.to_array().map(|c| c.to_string()).join(",");
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.a,
            self.family,
            r,
            self.criterion_good,
            self.is_permutation,
            self.is_apn,
            self.method,
            self.max_kernel.map(|k| k.to_string()).unwrap_or_default(),
            self.diagonal
        )
    }

    /// Criterion, permutation and APN verdicts agree, and the six variants
    /// are root-consistent.
    pub fn correlated(&self) -> bool {
        self.roots.consistent() && self.criterion_good == self.is_permutation && self.is_permutation == self.is_apn
    }
}

pub fn param_report(ctx: &FieldCtx, family: Family, a: Fe, method: Method, exec: Exec) -> Result<ParamReport> {
    let roots = RootCounts::from_array(univariate::root_counts(ctx, a)?);
    let crit = match family.criterion_variant() {
        crate::univariate::PolyVariant::Q => roots.Q,
        _ => roots.Pprime,
    };
    let status = check_status(ctx, family, a, method, exec)?;
    Ok(ParamReport {
        a,
        family,
        roots,
        criterion_good: crit == 0,
        is_permutation: status.is_permutation,
        is_apn: status.is_apn,
        method: status.method,
        max_kernel: status.max_kernel,
        diagonal: crate::equivalence::diag_criterion(ctx, a)?,
    })
}
