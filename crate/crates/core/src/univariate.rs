//! The six root-equivalent polynomials attached to a parameter `a`, the
//! linearized polynomial `L_a(S) = S^(q^3) + a S^q + S`, and the
//! companion-matrix product test for its kernel.
//!
//! With `d = q^2 + q + 1`:
//!
//! ```text
//! P_a(T)     = T^d + (a T^q + 1)^(q+1)
//! P'_a(T)    = T^d + a T^(q^2+q) + 1
//! Q_a(T)     = T^d + a T + 1
//! Q_{a^q}(T) = T^d + a^q T + 1
//! R_a(T)     = T^d + (a T + 1)^(q+1)
//! S_a(T)     = T^d + a^q T^(q+1) + 1
//! ```
//!
//! Root finding is exhaustive evaluation over GF(2^m)*. Each variant is
//! evaluated from `t`, `t^q` and `t^(q^2)`, so a point costs two Frobenius
//! applications and a few multiplications.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gf2lin;
use crate::gf2m::{Fe, FieldCtx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PolyVariant {
    P,
    Pprime,
    Q,
    Qq,
    R,
    S,
}

impl PolyVariant {
    pub const ALL: [PolyVariant; 6] = [
        PolyVariant::P,
        PolyVariant::Pprime,
        PolyVariant::Q,
        PolyVariant::Qq,
        PolyVariant::R,
        PolyVariant::S,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolyVariant::P => "P",
            PolyVariant::Pprime => "Pprime",
            PolyVariant::Q => "Q",
            PolyVariant::Qq => "Qq",
            PolyVariant::R => "R",
            PolyVariant::S => "S",
        }
    }
}

impl std::fmt::Display for PolyVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Nonzero roots of one variant, in encoding order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootReport {
    pub variant: PolyVariant,
    pub a: Fe,
    pub roots: Vec<Fe>,
    pub count: usize,
}

/// `q^2 + q + 1`.
pub fn exponent_d(ctx: &FieldCtx) -> u64 {
    let q = ctx.q();
    q * q + q + 1
}

fn ensure_nonzero(a: Fe) -> Result<()> {
    if a.is_zero() {
        Err(Error::ZeroParameter)
    } else {
        Ok(())
    }
}

/// Per-parameter constants shared by every evaluation point.
#[derive(Clone, Copy)]
pub(crate) struct VariantEval {
    a: Fe,
    aq: Fe,
}

impl VariantEval {
    pub(crate) fn new(ctx: &FieldCtx, a: Fe) -> Self {
        VariantEval { a, aq: ctx.frob_q(a) }
    }

    #[inline]
    pub(crate) fn eval(&self, ctx: &FieldCtx, v: PolyVariant, t: Fe) -> Fe {
        let tq = ctx.frob_q(t);
        let tq2 = ctx.frob_q(tq);
        let tq1 = ctx.mul(tq, t);
        let td = ctx.mul(tq2, tq1);
        let one = ctx.one();
        match v {
            PolyVariant::P => {
                let u = ctx.add(ctx.mul(self.a, tq), one);
                ctx.add(td, ctx.mul(ctx.frob_q(u), u))
            }
            PolyVariant::Pprime => ctx.add(ctx.add(td, ctx.mul(self.a, ctx.mul(tq2, tq))), one),
            PolyVariant::Q => ctx.add(ctx.add(td, ctx.mul(self.a, t)), one),
            PolyVariant::Qq => ctx.add(ctx.add(td, ctx.mul(self.aq, t)), one),
            PolyVariant::R => {
                let u = ctx.add(ctx.mul(self.a, t), one);
                ctx.add(td, ctx.mul(ctx.frob_q(u), u))
            }
            PolyVariant::S => ctx.add(ctx.add(td, ctx.mul(self.aq, tq1)), one),
        }
    }

    /// `U (U^q + a)^(q+1) + 1`, the reciprocal of `P_a`.
    #[inline]
    fn eval_p_star(&self, ctx: &FieldCtx, u: Fe) -> Fe {
        let w = ctx.add(ctx.frob_q(u), self.a);
        ctx.add(ctx.mul(u, ctx.mul(ctx.frob_q(w), w)), ctx.one())
    }
}

pub fn eval_variant(ctx: &FieldCtx, v: PolyVariant, a: Fe, t: Fe) -> Result<Fe> {
    ensure_nonzero(a)?;
    Ok(VariantEval::new(ctx, a).eval(ctx, v, t))
}

pub fn roots_in_field(ctx: &FieldCtx, v: PolyVariant, a: Fe, exec: Exec) -> Result<RootReport> {
    ensure_nonzero(a)?;
    let ev = VariantEval::new(ctx, a);
    let roots: Vec<Fe> = exec
        .map_collect(1..ctx.size(), |b| {
            let t = ctx.elem(b as u32);
            ev.eval(ctx, v, t).is_zero().then_some(t)
        })
        .into_iter()
        .flatten()
        .collect();
    Ok(RootReport {
        variant: v,
        a,
        count: roots.len(),
        roots,
    })
}

/// Smallest nonzero root, stopping at the first hit.
pub fn first_root(ctx: &FieldCtx, v: PolyVariant, a: Fe, exec: Exec) -> Result<Option<Fe>> {
    ensure_nonzero(a)?;
    let ev = VariantEval::new(ctx, a);
    Ok(exec.find_first(1..ctx.size(), |b| {
        let t = ctx.elem(b as u32);
        ev.eval(ctx, v, t).is_zero().then_some(t)
    }))
}

pub fn has_root(ctx: &FieldCtx, v: PolyVariant, a: Fe, exec: Exec) -> Result<bool> {
    Ok(first_root(ctx, v, a, exec)?.is_some())
}

/// Root counts of all six variants, in [`PolyVariant::ALL`] order.
pub fn root_counts(ctx: &FieldCtx, a: Fe) -> Result<[usize; 6]> {
    ensure_nonzero(a)?;
    let ev = VariantEval::new(ctx, a);
    let mut counts = [0usize; 6];
    for t in ctx.nonzero_elements() {
        for (k, v) in PolyVariant::ALL.into_iter().enumerate() {
            if ev.eval(ctx, v, t).is_zero() {
                counts[k] += 1;
            }
        }
    }
    Ok(counts)
}

/// True iff the six variants either all have a nonzero root or none does.
pub fn variants_root_consistent(ctx: &FieldCtx, a: Fe) -> Result<bool> {
    let counts = root_counts(ctx, a)?;
    let with_roots = counts.iter().filter(|&&c| c > 0).count();
    Ok(with_roots == 0 || with_roots == counts.len())
}

/// Outcome of re-checking each substitution step of the root equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepChecks {
    /// `P_a`, its reciprocal `P*_a` and `P'_a` have roots simultaneously.
    pub step1: bool,
    /// `P'_a(t) = 0` iff `Q_a(1/t) = 0`, pointwise.
    pub step2: bool,
    /// `t -> t^q` maps the roots of `Q_a` onto the roots of `Q_{a^q}`.
    pub step3: bool,
    /// `R_a` and `Q_a` have roots simultaneously.
    pub step4: bool,
    /// `S_a` and `Q_a` have roots simultaneously.
    pub step5: bool,
}

impl StepChecks {
    pub fn all(&self) -> bool {
        self.step1 && self.step2 && self.step3 && self.step4 && self.step5
    }
}

pub fn step_checks(ctx: &FieldCtx, a: Fe) -> Result<StepChecks> {
    ensure_nonzero(a)?;
    let ev = VariantEval::new(ctx, a);
    let roots_of = |v: PolyVariant| -> Vec<Fe> {
        ctx.nonzero_elements()
            .filter(|&t| ev.eval(ctx, v, t).is_zero())
            .collect()
    };
    let p = roots_of(PolyVariant::P);
    let pp = roots_of(PolyVariant::Pprime);
    let q = roots_of(PolyVariant::Q);
    let qq = roots_of(PolyVariant::Qq);
    let r = roots_of(PolyVariant::R);
    let s = roots_of(PolyVariant::S);
    let p_star: Vec<Fe> = ctx
        .nonzero_elements()
        .filter(|&u| ev.eval_p_star(ctx, u).is_zero())
        .collect();

    let step1 = p.is_empty() == p_star.is_empty() && p_star.is_empty() == pp.is_empty();
    let step2 = ctx.nonzero_elements().all(|t| {
        ev.eval(ctx, PolyVariant::Pprime, t).is_zero()
            == ev.eval(ctx, PolyVariant::Q, ctx.inv_nonzero(t)).is_zero()
    });
    let mut mapped: Vec<Fe> = q.iter().map(|&t| ctx.frob_q(t)).collect();
    mapped.sort();
    let step3 = mapped == qq;
    let step4 = r.is_empty() == q.is_empty();
    let step5 = s.is_empty() == q.is_empty();
    Ok(StepChecks {
        step1,
        step2,
        step3,
        step4,
        step5,
    })
}

/// `L_a(s) = s^(q^3) + a s^q + s`.
pub fn linearized_eval(ctx: &FieldCtx, a: Fe, s: Fe) -> Result<Fe> {
    ensure_nonzero(a)?;
    Ok(linearized(ctx, a, s))
}

#[inline]
fn linearized(ctx: &FieldCtx, a: Fe, s: Fe) -> Fe {
    let sq = ctx.frob_q(s);
    let sq3 = ctx.frob_q(ctx.frob_q(sq));
    ctx.add(ctx.add(sq3, ctx.mul(a, sq)), s)
}

/// GF(2)-dimension of the kernel of `s -> L_a(s)`, from the m x m matrix of
/// the map in the polynomial basis.
pub fn linearized_kernel_dim(ctx: &FieldCtx, a: Fe) -> Result<u32> {
    ensure_nonzero(a)?;
    let columns: Vec<u128> = (0..ctx.m())
        .map(|j| linearized(ctx, a, ctx.elem(1 << j)).bits() as u128)
        .collect();
    Ok(gf2lin::kernel_basis(&columns).len() as u32)
}

/// A 3 x 3 matrix over GF(2^m).
pub type Mat3 = [[Fe; 3]; 3];

pub fn mat3_identity(ctx: &FieldCtx) -> Mat3 {
    let (o, l) = (ctx.zero(), ctx.one());
    [[l, o, o], [o, l, o], [o, o, l]]
}

pub fn mat3_mul(ctx: &FieldCtx, x: &Mat3, y: &Mat3) -> Mat3 {
    let mut out = [[ctx.zero(); 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).fold(ctx.zero(), |acc, k| ctx.add(acc, ctx.mul(x[r][k], y[k][c])));
        }
    }
    out
}

/// Cofactor expansion along the first row.
pub fn mat3_det(ctx: &FieldCtx, x: &Mat3) -> Fe {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        ctx.add(ctx.mul(x[r1][c1], x[r2][c2]), ctx.mul(x[r1][c2], x[r2][c1]))
    };
    let t0 = ctx.mul(x[0][0], minor(1, 2, 1, 2));
    let t1 = ctx.mul(x[0][1], minor(1, 2, 0, 2));
    let t2 = ctx.mul(x[0][2], minor(1, 2, 0, 1));
    ctx.add(ctx.add(t0, t1), t2)
}

/// The companion matrix of `L_a` twisted `k` times by the Frobenius.
pub fn companion_twisted(ctx: &FieldCtx, a: Fe, k: u32) -> Mat3 {
    let (o, l) = (ctx.zero(), ctx.one());
    let mut ak = a;
    for _ in 0..k {
        ak = ctx.frob_q(ak);
    }
    [[o, o, l], [l, o, ak], [o, l, o]]
}

/// `A_L = C_L C_L^sigma ... C_L^(sigma^(m-1))`, `sigma(x) = x^q`.
pub fn companion_product(ctx: &FieldCtx, a: Fe) -> Result<Mat3> {
    ensure_nonzero(a)?;
    let (o, l) = (ctx.zero(), ctx.one());
    let mut acc = mat3_identity(ctx);
    let mut ak = a;
    for _ in 0..ctx.m() {
        let c = [[o, o, l], [l, o, ak], [o, l, o]];
        acc = mat3_mul(ctx, &acc, &c);
        ak = ctx.frob_q(ak);
    }
    Ok(acc)
}

/// Whether `A_L - I` is singular, i.e. whether `L_a` has a nonzero root.
pub fn companion_product_test(ctx: &FieldCtx, a: Fe) -> Result<bool> {
    let mut m = companion_product(ctx, a)?;
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ctx.add(row[k], ctx.one());
    }
    Ok(mat3_det(ctx, &m).is_zero())
}
