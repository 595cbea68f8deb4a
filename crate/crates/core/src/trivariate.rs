//! The families `G_a`, `H_a` as triprojective quadratic maps of
//! `GF(2^m)^3`, their differentials and the per-direction kernel
//! classification of `G_a`.
//!
//! ```text
//! G_a(x,y,z) = (x^(q+1) + a x^q z + y z^q,  x^q z + y^(q+1),  x y^q + a y^q z + z^(q+1))
//! H_a(x,y,z) = (x^(q+1) + a x y^q + y z^q,  x y^q + z^(q+1),  x^q z + y^(q+1) + a y^q z)
//! ```
//!
//! Because the maps are quadratic, `x -> f(x+d) + f(x) + f(d)` is
//! GF(2)-linear; its kernel is found from the 3m x 3m binary matrix built by
//! evaluating on basis triples. Triples are packed into a `u128` as
//! `x | y << m | z << 2m`, which is also the bit order of kernel vectors.

use serde::Serialize;

use crate::error::{ensure_degree, Error, Result};
use crate::exec::Exec;
use crate::gf2lin::{self, EchelonBasis};
use crate::gf2m::{Fe, FieldCtx};
use crate::univariate::{PolyVariant, VariantEval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Triple {
    pub x: Fe,
    pub y: Fe,
    pub z: Fe,
}

impl Triple {
    pub fn new(x: Fe, y: Fe, z: Fe) -> Self {
        Triple { x, y, z }
    }

    pub fn zero(ctx: &FieldCtx) -> Self {
        let o = ctx.zero();
        Triple::new(o, o, o)
    }

    pub fn coords(self) -> [Fe; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_coords(c: [Fe; 3]) -> Self {
        Triple::new(c[0], c[1], c[2])
    }

    pub fn is_zero(self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn add(self, ctx: &FieldCtx, other: Triple) -> Triple {
        Triple::new(
            ctx.add(self.x, other.x),
            ctx.add(self.y, other.y),
            ctx.add(self.z, other.z),
        )
    }

    /// `(z, y, x)`.
    pub fn swap_outer(self) -> Triple {
        Triple::new(self.z, self.y, self.x)
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

pub fn encode_triple(ctx: &FieldCtx, t: Triple) -> u128 {
    let m = ctx.m();
    t.x.bits() as u128 | (t.y.bits() as u128) << m | (t.z.bits() as u128) << (2 * m)
}

pub fn decode_triple(ctx: &FieldCtx, bits: u128) -> Triple {
    let m = ctx.m();
    let mask = (1u128 << m) - 1;
    Triple::new(
        ctx.elem((bits & mask) as u32),
        ctx.elem((bits >> m & mask) as u32),
        ctx.elem((bits >> (2 * m) & mask) as u32),
    )
}

/// Which family a parameterized map belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    G,
    H,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::G, Family::H];

    pub fn make(self, ctx: &FieldCtx, a: Fe) -> Result<QuadForm3> {
        match self {
            Family::G => make_g(ctx, a),
            Family::H => make_h(ctx, a),
        }
    }

    /// The univariate polynomial whose root-freeness decides the family's
    /// APN and permutation status.
    pub fn criterion_variant(self) -> PolyVariant {
        match self {
            Family::G => PolyVariant::Q,
            Family::H => PolyVariant::Pprime,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::G => "G",
            Family::H => "H",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `F(x)_k = sum_{i,j} coeff[k][i][j] x_i^q x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadForm3 {
    pub coeff: [[[Fe; 3]; 3]; 3],
}

impl QuadForm3 {
    pub fn zero(ctx: &FieldCtx) -> Self {
        QuadForm3 {
            coeff: [[[ctx.zero(); 3]; 3]; 3],
        }
    }

    pub fn eval(&self, ctx: &FieldCtx, v: Triple) -> Triple {
        let x = v.coords();
        let xq = [ctx.frob_q(x[0]), ctx.frob_q(x[1]), ctx.frob_q(x[2])];
        let mut out = [ctx.zero(); 3];
        for (k, o) in out.iter_mut().enumerate() {
            for (i, row) in self.coeff[k].iter().enumerate() {
                let mut inner = ctx.zero();
                for (j, &c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        inner = ctx.add(inner, ctx.mul(c, x[j]));
                    }
                }
                if !inner.is_zero() {
                    *o = ctx.add(*o, ctx.mul(xq[i], inner));
                }
            }
        }
        Triple::from_coords(out)
    }

    /// Number of nonzero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeff.iter().flatten().flatten().filter(|c| !c.is_zero()).count()
    }
}

fn ensure_param(a: Fe) -> Result<()> {
    if a.is_zero() {
        Err(Error::ZeroParameter)
    } else {
        Ok(())
    }
}

pub fn make_g(ctx: &FieldCtx, a: Fe) -> Result<QuadForm3> {
    ensure_param(a)?;
    let one = ctx.one();
    let mut f = QuadForm3::zero(ctx);
    f.coeff[0][0][0] = one;
    f.coeff[0][0][2] = a;
    f.coeff[0][2][1] = one;
    f.coeff[1][0][2] = one;
    f.coeff[1][1][1] = one;
    f.coeff[2][1][0] = one;
    f.coeff[2][1][2] = a;
    f.coeff[2][2][2] = one;
    Ok(f)
}

pub fn make_h(ctx: &FieldCtx, a: Fe) -> Result<QuadForm3> {
    ensure_param(a)?;
    let one = ctx.one();
    let mut f = QuadForm3::zero(ctx);
    f.coeff[0][0][0] = one;
    f.coeff[0][1][0] = a;
    f.coeff[0][2][1] = one;
    f.coeff[1][1][0] = one;
    f.coeff[1][2][2] = one;
    f.coeff[2][0][2] = one;
    f.coeff[2][1][1] = one;
    f.coeff[2][1][2] = a;
    Ok(f)
}

fn ensure_direction(d: Triple) -> Result<()> {
    if d.is_zero() {
        Err(Error::ZeroDirection)
    } else {
        Ok(())
    }
}

/// Images of the 3m basis triples under `x -> f(x+d) + f(x) + f(d)`.
fn diff_columns(ctx: &FieldCtx, f: &QuadForm3, d: Triple, out: &mut [u128; 72]) -> usize {
    let m = ctx.m() as usize;
    let fd = f.eval(ctx, d);
    let o = ctx.zero();
    for c in 0..3 {
        for b in 0..m {
            let mut e = [o; 3];
            e[c] = ctx.elem(1 << b);
            let e = Triple::from_coords(e);
            let col = f.eval(ctx, e.add(ctx, d)).add(ctx, f.eval(ctx, e)).add(ctx, fd);
            out[c * m + b] = encode_triple(ctx, col);
        }
    }
    3 * m
}

/// Nullity of `D_d f`, reusing `scratch` between calls.
pub(crate) fn diff_nullity_with(
    ctx: &FieldCtx,
    f: &QuadForm3,
    d: Triple,
    scratch: &mut EchelonBasis,
) -> u32 {
    let mut cols = [0u128; 72];
    let n = diff_columns(ctx, f, d, &mut cols);
    scratch.clear();
    for &c in &cols[..n] {
        scratch.insert(c, 0);
    }
    (n - scratch.rank()) as u32
}

/// `|{x : f(x+d) + f(x) + f(d) = 0}|`.
pub fn diff_kernel_size(ctx: &FieldCtx, f: &QuadForm3, d: Triple) -> Result<u128> {
    ensure_direction(d)?;
    let mut scratch = EchelonBasis::with_capacity(72);
    Ok(1u128 << diff_nullity_with(ctx, f, d, &mut scratch))
}

/// A basis of the kernel of `D_d f`.
pub fn diff_kernel_basis(ctx: &FieldCtx, f: &QuadForm3, d: Triple) -> Result<Vec<Triple>> {
    ensure_direction(d)?;
    let mut cols = [0u128; 72];
    let n = diff_columns(ctx, f, d, &mut cols);
    Ok(gf2lin::kernel_basis(&cols[..n])
        .into_iter()
        .map(|v| decode_triple(ctx, v))
        .collect())
}

/// Zero pattern of a nonzero direction `(A, B, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DirectionType {
    /// Exactly one coordinate nonzero.
    Axis,
    /// `(A, B, 0)`.
    Type1,
    /// `(A, 0, C)`.
    Type2a,
    /// `(0, B, C)`.
    Type2b,
    /// All coordinates nonzero.
    Type3,
}

impl DirectionType {
    pub fn of(d: Triple) -> Option<DirectionType> {
        match (d.x.is_zero(), d.y.is_zero(), d.z.is_zero()) {
            (true, true, true) => None,
            (false, true, true) | (true, false, true) | (true, true, false) => Some(DirectionType::Axis),
            (false, false, true) => Some(DirectionType::Type1),
            (false, true, false) => Some(DirectionType::Type2a),
            (true, false, false) => Some(DirectionType::Type2b),
            (false, false, false) => Some(DirectionType::Type3),
        }
    }
}

/// A predicted kernel size, exact or a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub size: u128,
    pub exact: bool,
}

impl Prediction {
    pub fn exact(size: u128) -> Self {
        Prediction { size, exact: true }
    }

    pub fn at_least(size: u128) -> Self {
        Prediction { size, exact: false }
    }

    pub fn holds(&self, measured: u128) -> bool {
        if self.exact {
            measured == self.size
        } else {
            measured >= self.size
        }
    }
}

/// Measured kernel size of `D_d G_a` next to two predictions: `stated`
/// follows the published case analysis verbatim, `refined` replaces its
/// `(0,B,C)` and all-nonzero rules with the ones that match measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelProfile {
    pub direction: Triple,
    pub direction_type: DirectionType,
    pub kernel_size: u128,
    pub stated: Prediction,
    pub refined: Prediction,
}

impl KernelProfile {
    pub fn stated_holds(&self) -> bool {
        self.stated.holds(self.kernel_size)
    }

    pub fn refined_holds(&self) -> bool {
        self.refined.holds(self.kernel_size)
    }
}

/// Per-parameter state for classifying many directions of one `G_a`.
pub struct GClassifier<'a> {
    ctx: &'a FieldCtx,
    a: Fe,
    form: QuadForm3,
    ev: VariantEval,
    q_has_root: bool,
}

impl<'a> GClassifier<'a> {
    pub fn new(ctx: &'a FieldCtx, a: Fe) -> Result<Self> {
        let form = make_g(ctx, a)?;
        let ev = VariantEval::new(ctx, a);
        let q_has_root = ctx
            .nonzero_elements()
            .any(|t| ev.eval(ctx, PolyVariant::Q, t).is_zero());
        Ok(GClassifier {
            ctx,
            a,
            form,
            ev,
            q_has_root,
        })
    }

    pub fn form(&self) -> &QuadForm3 {
        &self.form
    }

    fn vanishes(&self, v: PolyVariant, num: Fe, den: Fe) -> bool {
        let t = self.ctx.mul(num, self.ctx.inv_nonzero(den));
        self.ev.eval(self.ctx, v, t).is_zero()
    }

    fn predictions(&self, d: Triple, ty: DirectionType) -> (Prediction, Prediction) {
        let two = Prediction::exact(2);
        let full = Prediction::exact(1u128 << self.ctx.m());
        let pick = |hit: bool| if hit { full } else { two };
        match ty {
            DirectionType::Axis => (two, two),
            DirectionType::Type1 => {
                let p = pick(self.vanishes(PolyVariant::Qq, d.x, d.y));
                (p, p)
            }
            DirectionType::Type2a => {
                let p = pick(self.vanishes(PolyVariant::Q, d.z, d.x));
                (p, p)
            }
            DirectionType::Type2b => (
                pick(self.vanishes(PolyVariant::Q, d.z, d.y)),
                pick(self.vanishes(PolyVariant::P, d.y, d.z)),
            ),
            DirectionType::Type3 => {
                let stated = if self.q_has_root {
                    Prediction::at_least(1u128 << self.ctx.m())
                } else {
                    two
                };
                let refined = if h_poly(self.ctx, self.a, d.x, d.y, d.z).is_zero() {
                    Prediction::at_least(1u128 << self.ctx.m())
                } else {
                    two
                };
                (stated, refined)
            }
        }
    }

    pub(crate) fn classify_with(&self, d: Triple, scratch: &mut EchelonBasis) -> KernelProfile {
        let ty = DirectionType::of(d).expect("nonzero direction");
        let kernel_size = 1u128 << diff_nullity_with(self.ctx, &self.form, d, scratch);
        let (stated, refined) = self.predictions(d, ty);
        KernelProfile {
            direction: d,
            direction_type: ty,
            kernel_size,
            stated,
            refined,
        }
    }

    pub fn classify(&self, d: Triple) -> Result<KernelProfile> {
        ensure_direction(d)?;
        Ok(self.classify_with(d, &mut EchelonBasis::with_capacity(72)))
    }
}

#[allow(non_snake_case)]
pub fn classify_direction_G(ctx: &FieldCtx, a: Fe, d: Triple) -> Result<KernelProfile> {
    ensure_direction(d)?;
    GClassifier::new(ctx, a)?.classify(d)
}

/// Tallies of a full direction scan of `G_a`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DirectionScan {
    pub directions: u64,
    pub stated_mismatches: u64,
    pub refined_mismatches: u64,
    /// Lowest-encoded direction violating the stated prediction.
    pub first_stated_mismatch: Option<KernelProfile>,
    pub first_refined_mismatch: Option<KernelProfile>,
    pub max_kernel: u128,
}

fn merge_first(x: Option<KernelProfile>, y: Option<KernelProfile>, ctx: &FieldCtx) -> Option<KernelProfile> {
    match (x, y) {
        (Some(p), Some(r)) => {
            if encode_triple(ctx, p.direction) <= encode_triple(ctx, r.direction) {
                Some(p)
            } else {
                Some(r)
            }
        }
        (p, r) => p.or(r),
    }
}

/// Classifies every nonzero direction of `G_a`. Limited to `m <= 7`.
pub fn scan_directions_g(ctx: &FieldCtx, a: Fe, exec: Exec) -> Result<DirectionScan> {
    ensure_degree("direction scan", ctx.m(), 7)?;
    let cls = GClassifier::new(ctx, a)?;
    let total = 1u64 << (3 * ctx.m());
    let fold = |(mut acc, mut scratch): (DirectionScan, EchelonBasis), idx: u64| {
        let p = cls.classify_with(decode_triple(ctx, idx as u128), &mut scratch);
        acc.directions += 1;
        acc.max_kernel = acc.max_kernel.max(p.kernel_size);
        if !p.stated_holds() {
            acc.stated_mismatches += 1;
            acc.first_stated_mismatch = merge_first(acc.first_stated_mismatch, Some(p), ctx);
        }
        if !p.refined_holds() {
            acc.refined_mismatches += 1;
            acc.first_refined_mismatch = merge_first(acc.first_refined_mismatch, Some(p), ctx);
        }
        (acc, scratch)
    };
    let (scan, _) = exec.fold_reduce(
        1..total,
        || (DirectionScan::default(), EchelonBasis::with_capacity(72)),
        fold,
        |(x, s), (y, _)| {
            (
                DirectionScan {
                    directions: x.directions + y.directions,
                    stated_mismatches: x.stated_mismatches + y.stated_mismatches,
                    refined_mismatches: x.refined_mismatches + y.refined_mismatches,
                    first_stated_mismatch: merge_first(x.first_stated_mismatch, y.first_stated_mismatch, ctx),
                    first_refined_mismatch: merge_first(x.first_refined_mismatch, y.first_refined_mismatch, ctx),
                    max_kernel: x.max_kernel.max(y.max_kernel),
                },
                s,
            )
        },
    );
    Ok(scan)
}

/// The homogeneous form of degree `q^2+q+1` whose zeros locate the
/// all-nonzero directions with a large kernel:
///
/// ```text
/// A^(q²+q+1) + a^q A B^(q²+q) + A B^q C^(q²) + a A^(q²+q) C + A^q B^(q²) C
///   + A^(q²) B C^q + B^(q²+q+1) + a^(q+1) B^(q²+q) C + a B^q C^(q²+1)
///   + a^q B^(q²) C^(q+1) + C^(q²+q+1)
/// ```
pub fn h_poly(ctx: &FieldCtx, a: Fe, x: Fe, y: Fe, z: Fe) -> Fe {
    let f = |v| ctx.frob_q(v);
    let (aq, xq, yq, zq) = (f(a), f(x), f(y), f(z));
    let (xq2, yq2, zq2) = (f(xq), f(yq), f(zq));
    let m = |u, v| ctx.mul(u, v);
    let terms = [
        m(xq2, m(xq, x)),
        m(aq, m(x, m(yq2, yq))),
        m(x, m(yq, zq2)),
        m(a, m(m(xq2, xq), z)),
        m(xq, m(yq2, z)),
        m(xq2, m(y, zq)),
        m(yq2, m(yq, y)),
        m(m(aq, a), m(m(yq2, yq), z)),
        m(a, m(yq, m(zq2, z))),
        m(aq, m(yq2, m(zq, z))),
        m(zq2, m(zq, z)),
    ];
    terms.into_iter().fold(ctx.zero(), |acc, t| ctx.add(acc, t))
}

/// Whether "`h_poly` has a zero with all of `A, B, C` nonzero" agrees with
/// "`Q_a` has a root". Exhaustive over `(2^m - 1)^3` triples; `m <= 7`.
pub fn h_factorization_check(ctx: &FieldCtx, a: Fe, exec: Exec) -> Result<bool> {
    ensure_param(a)?;
    ensure_degree("h_factorization_check", ctx.m(), 7)?;
    let q_root = VariantEval::new(ctx, a);
    let q_has_root = ctx
        .nonzero_elements()
        .any(|t| q_root.eval(ctx, PolyVariant::Q, t).is_zero());
    let n = ctx.order();
    let h_zero = exec
        .find_first(0..n * n * n, |idx| {
            let x = ctx.elem((idx % n + 1) as u32);
            let y = ctx.elem((idx / n % n + 1) as u32);
            let z = ctx.elem((idx / (n * n) + 1) as u32);
            h_poly(ctx, a, x, y, z).is_zero().then_some(())
        })
        .is_some();
    Ok(h_zero == q_has_root)
}

/// Whether `f(z, y, x) = sigma(f(x, y, z))` at `v`, `sigma` swapping the
/// first and third coordinates.
pub fn swap_symmetry_holds(ctx: &FieldCtx, f: &QuadForm3, v: Triple) -> bool {
    f.eval(ctx, v.swap_outer()) == f.eval(ctx, v).swap_outer()
}

/// Lowest-encoded input violating [`swap_symmetry_holds`]. Limited to
/// `m <= 7`.
pub fn swap_symmetry_counterexample(ctx: &FieldCtx, f: &QuadForm3, exec: Exec) -> Result<Option<Triple>> {
    ensure_degree("swap symmetry scan", ctx.m(), 7)?;
    Ok(exec.find_first(0..1u64 << (3 * ctx.m()), |idx| {
        let v = decode_triple(ctx, idx as u128);
        (!swap_symmetry_holds(ctx, f, v)).then_some(v)
    }))
}
