//! Diagonal and monomial equivalence between members of the families.
//!
//! A [`MonomialMap`] sends `x_j` to `s_j * x_{perm[j]}^(2^t_j)`. Substituting
//! monomial maps into a [`QuadForm3`] only relabels and twists its terms, so
//! `outer . f . inner` is computed symbolically by [`compose_monomial`] and
//! compared coefficientwise.
//!
//! The monomial search enumerates inner maps in a fixed order (permutation,
//! then twists, then scalars, each lexicographic with the identity first),
//! solves for the outer map by coefficient matching, and reports the first
//! hit in that order regardless of how the scan is scheduled.

use rand::Rng;
use serde::Serialize;

use crate::error::{ensure_degree, Error, Result};
use crate::exec::Exec;
use crate::gf2m::{gcd, Fe, FieldCtx};
use crate::trivariate::{decode_triple, Family, QuadForm3, Triple};
use crate::univariate::exponent_d;

pub const SEARCH_MAX_DEGREE: u32 = 7;

/// `a^(q^2+q+1) = 1`.
pub fn diag_criterion(ctx: &FieldCtx, a: Fe) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    Ok(ctx.pow(a, exponent_d(ctx)).is_one())
}

/// `gcd(q^2+q+1, 2^m - 1)`, the number of `a` meeting [`diag_criterion`].
pub fn d0(ctx: &FieldCtx) -> u64 {
    gcd(exponent_d(ctx), ctx.order())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialMap {
    pub perm: [usize; 3],
    pub scalars: [Fe; 3],
    pub twists: [u32; 3],
}

impl MonomialMap {
    pub fn identity(ctx: &FieldCtx) -> Self {
        MonomialMap::diagonal(ctx, [ctx.one(); 3])
    }

    pub fn diagonal(_ctx: &FieldCtx, scalars: [Fe; 3]) -> Self {
        MonomialMap {
            perm: [0, 1, 2],
            scalars,
            twists: [0; 3],
        }
    }

    pub fn apply(&self, ctx: &FieldCtx, v: Triple) -> Triple {
        let c = v.coords();
        Triple::from_coords(std::array::from_fn(|j| {
            ctx.mul(self.scalars[j], ctx.frob_pow2(c[self.perm[j]], self.twists[j]))
        }))
    }
}

/// `outer . f . inner`, or `None` when some term leaves the `x_r^q x_s`
/// shape.
///
/// Distinct terms of `f` never land on the same monomial (that would need
/// `q = 1`), so whether the shape survives depends only on the permutations
/// and twists, never on the scalars.
pub fn compose_monomial(ctx: &FieldCtx, f: &QuadForm3, inner: &MonomialMap, outer: &MonomialMap) -> Option<QuadForm3> {
    let m = ctx.m();
    let e = ctx.i() % m;
    let mut out = QuadForm3::zero(ctx);
    for k in 0..3 {
        let src = outer.perm[k];
        let tw = outer.twists[k] % m;
        for i in 0..3 {
            for j in 0..3 {
                let c = f.coeff[src][i][j];
                if c.is_zero() {
                    continue;
                }
                let coef = ctx.mul(c, ctx.mul(ctx.frob_q(inner.scalars[i]), inner.scalars[j]));
                let coef = ctx.mul(outer.scalars[k], ctx.frob_pow2(coef, tw));
                let (u, v) = (inner.perm[i], inner.perm[j]);
                let alpha = (inner.twists[i] + e + tw) % m;
                let beta = (inner.twists[j] + tw) % m;
                let (r, s) = if alpha == e && beta == 0 {
                    (u, v)
                } else if alpha == 0 && beta == e {
                    (v, u)
                } else {
                    return None;
                };
                out.coeff[k][r][s] = ctx.add(out.coeff[k][r][s], coef);
            }
        }
    }
    Some(out)
}

/// Whether `g = outer . f . inner` coefficientwise.
pub fn witness_holds(ctx: &FieldCtx, f: &QuadForm3, g: &QuadForm3, inner: &MonomialMap, outer: &MonomialMap) -> bool {
    compose_monomial(ctx, f, inner, outer).as_ref() == Some(g)
}

/// Compares `g(x)` with `outer(f(inner(x)))` on every input when `m <= 3`,
/// otherwise on `samples` random inputs.
pub fn verify_witness_by_eval<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    f: &QuadForm3,
    g: &QuadForm3,
    inner: &MonomialMap,
    outer: &MonomialMap,
    samples: usize,
    rng: &mut R,
) -> bool {
    let check = |x: Triple| g.eval(ctx, x) == outer.apply(ctx, f.eval(ctx, inner.apply(ctx, x)));
    if ctx.m() <= 3 {
        (0..1u128 << (3 * ctx.m())).all(|i| check(decode_triple(ctx, i)))
    } else {
        (0..samples).all(|_| check(Triple::new(ctx.random(rng), ctx.random(rng), ctx.random(rng))))
    }
}

/// `F_1 = diag(mu, nu, rho) . F_a . diag(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagWitness {
    pub mu: Fe,
    pub nu: Fe,
    pub rho: Fe,
    pub lambda: [Fe; 3],
}

impl DiagWitness {
    pub fn inner(&self, ctx: &FieldCtx) -> MonomialMap {
        MonomialMap::diagonal(ctx, self.lambda)
    }

    pub fn outer(&self, ctx: &FieldCtx) -> MonomialMap {
        MonomialMap::diagonal(ctx, [self.mu, self.nu, self.rho])
    }
}

/// Output scalars forced by the pure-power coefficients: for each output the
/// coefficient of some `x_i^(q+1)` must match the target.
fn solve_outer_diagonal(ctx: &FieldCtx, f: &QuadForm3, target: &QuadForm3, lambda: [Fe; 3]) -> Option<DiagWitness> {
    let mut scal = [ctx.zero(); 3];
    for (k, s) in scal.iter_mut().enumerate() {
        let i = (0..3).find(|&i| !target.coeff[k][i][i].is_zero())?;
        let c = f.coeff[k][i][i];
        if c.is_zero() {
            return None;
        }
        let li = lambda[i];
        let scaled = ctx.mul(c, ctx.mul(ctx.frob_q(li), li));
        *s = ctx.mul(target.coeff[k][i][i], ctx.inv_nonzero(scaled));
    }
    let w = DiagWitness {
        mu: scal[0],
        nu: scal[1],
        rho: scal[2],
        lambda,
    };
    witness_holds(ctx, f, target, &w.inner(ctx), &w.outer(ctx)).then_some(w)
}

/// First diagonal witness of `F_1 ~ F_a`, scanning `lambda` in
/// lexicographic order from `(1, 1, 1)`. `m <= 7`.
pub fn diag_search(ctx: &FieldCtx, family: Family, a: Fe, exec: Exec) -> Result<Option<DiagWitness>> {
    ensure_degree("diag_search", ctx.m(), SEARCH_MAX_DEGREE)?;
    let f = family.make(ctx, a)?;
    let target = family.make(ctx, ctx.one())?;
    let n = ctx.order();
    Ok(exec.find_first(0..n * n * n, |idx| {
        let lambda = scalar_triple(ctx, idx, n);
        solve_outer_diagonal(ctx, &f, &target, lambda)
    }))
}

/// The explicit scaling that realizes the equivalence when
/// [`diag_criterion`] holds; `None` otherwise.
pub fn sufficiency_witness(ctx: &FieldCtx, family: Family, a: Fe) -> Result<Option<DiagWitness>> {
    if !diag_criterion(ctx, a)? {
        return Ok(None);
    }
    let q = ctx.q();
    let a_inv = ctx.inv_nonzero(a);
    let one = ctx.one();
    let lambda = match family {
        Family::G => {
            let l1 = ctx.pow(a_inv, q);
            [l1, one, ctx.mul(l1, a_inv)]
        }
        Family::H => [ctx.pow(a_inv, q + 1), one, a_inv],
    };
    let f = family.make(ctx, a)?;
    let target = family.make(ctx, one)?;
    Ok(solve_outer_diagonal(ctx, &f, &target, lambda))
}

/// `idx` in `0..n^3` to `(s0, s1, s2)` with `s0` most significant.
fn scalar_triple(ctx: &FieldCtx, idx: u64, n: u64) -> [Fe; 3] {
    [
        ctx.elem((idx / (n * n) + 1) as u32),
        ctx.elem((idx / n % n + 1) as u32),
        ctx.elem((idx % n + 1) as u32),
    ]
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// An inner (permutation, twist) pattern whose composition keeps the
/// `x_r^q x_s` shape once each output is twisted by `out_twists`.
#[derive(Debug, Clone, Copy)]
struct Pattern {
    perm: [usize; 3],
    twists: [u32; 3],
    out_twists: [u32; 3],
}

/// The output twist that restores the shape of component `k`, if one exists.
fn component_twist(ctx: &FieldCtx, f: &QuadForm3, k: usize, twists: [u32; 3]) -> Option<u32> {
    let m = ctx.m();
    let e = ctx.i() % m;
    let mut need = None;
    for i in 0..3 {
        for j in 0..3 {
            if f.coeff[k][i][j].is_zero() {
                continue;
            }
            let alpha = (twists[i] + e) % m;
            let beta = twists[j] % m;
            let t = if (alpha + m - beta) % m == e {
                (m - beta) % m
            } else if (beta + m - alpha) % m == e {
                (m - alpha) % m
            } else {
                return None;
            };
            match need {
                None => need = Some(t),
                Some(prev) if prev != t => return None,
                _ => {}
            }
        }
    }
    Some(need.unwrap_or(0))
}

fn surviving_patterns(ctx: &FieldCtx, f: &QuadForm3) -> Vec<Pattern> {
    let m = ctx.m();
    let mut out = Vec::new();
    for perm in PERMS {
        for t0 in 0..m {
            for t1 in 0..m {
                for t2 in 0..m {
                    let twists = [t0, t1, t2];
                    let tw: Option<Vec<u32>> = (0..3).map(|k| component_twist(ctx, f, k, twists)).collect();
                    if let Some(tw) = tw {
                        out.push(Pattern {
                            perm,
                            twists,
                            out_twists: [tw[0], tw[1], tw[2]],
                        });
                    }
                }
            }
        }
    }
    out
}

/// `s` with `target_k = s * h_c` coefficientwise, if the supports agree.
fn component_ratio(ctx: &FieldCtx, h: &[[Fe; 3]; 3], target: &[[Fe; 3]; 3]) -> Option<Fe> {
    let mut ratio = None;
    for i in 0..3 {
        for j in 0..3 {
            match (h[i][j].is_zero(), target[i][j].is_zero()) {
                (true, true) => {}
                (false, false) => {
                    let r = ctx.mul(target[i][j], ctx.inv_nonzero(h[i][j]));
                    match ratio {
                        None => ratio = Some(r),
                        Some(prev) if prev != r => return None,
                        _ => {}
                    }
                }
                _ => return None,
            }
        }
    }
    ratio
}

/// Outer permutation and scalars with `g_k = s_k h_{perm[k]}`, first in
/// lexicographic permutation order.
fn solve_outer(ctx: &FieldCtx, h: &QuadForm3, g: &QuadForm3) -> Option<([usize; 3], [Fe; 3])> {
    let mut table = [[None; 3]; 3];
    for (k, row) in table.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = component_ratio(ctx, &h.coeff[c], &g.coeff[k]);
        }
    }
    PERMS.iter().find_map(|p| {
        let s = [table[0][p[0]]?, table[1][p[1]]?, table[2][p[2]]?];
        Some((*p, s))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EquivResult {
    Equivalent { inner: MonomialMap, outer: MonomialMap },
    Inequivalent,
    BudgetExceeded,
}

/// Which conclusion an exhausted monomial search supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Linear equivalences between these maps are monomial, so exhausting
    /// monomial maps decides EL (hence EA and CCZ) equivalence.
    El,
    /// Outside that range only monomial maps have been excluded.
    MonomialOnly,
}

impl Scope {
    pub fn for_degree(m: u32) -> Scope {
        if m > 2 && m != 4 && m != 6 && !m.is_multiple_of(7) {
            Scope::El
        } else {
            Scope::MonomialOnly
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scope::El => "EL/EA/CCZ-inequivalent (monomial maps suffice)",
            Scope::MonomialOnly => "monomial-inequivalent only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonomialSearch {
    pub result: EquivResult,
    pub maps_searched: u64,
    /// Inner maps in the full space after the twist prune.
    pub space: u64,
}

/// Searches monomial `inner`, `outer` with `g = outer . f . inner`, examining
/// at most `budget` inner maps. `m <= 7`.
pub fn el_equiv_monomial_search(ctx: &FieldCtx, f: &QuadForm3, g: &QuadForm3, budget: u64, exec: Exec) -> Result<MonomialSearch> {
    ensure_degree("el_equiv_monomial_search", ctx.m(), SEARCH_MAX_DEGREE)?;
    let patterns = surviving_patterns(ctx, f);
    let n = ctx.order();
    let per_pattern = n * n * n;
    let space = patterns.len() as u64 * per_pattern;
    let limit = space.min(budget);
    let patterns = &patterns;
    let hit = exec.find_first(0..limit, |idx| {
        let p = patterns[(idx / per_pattern) as usize];
        let inner = MonomialMap {
            perm: p.perm,
            scalars: scalar_triple(ctx, idx % per_pattern, n),
            twists: p.twists,
        };
        let pre = MonomialMap {
            perm: [0, 1, 2],
            scalars: [ctx.one(); 3],
            twists: p.out_twists,
        };
        let h = compose_monomial(ctx, f, &inner, &pre)?;
        let (perm, scalars) = solve_outer(ctx, &h, g)?;
        let outer = MonomialMap {
            perm,
            scalars,
            twists: [p.out_twists[perm[0]], p.out_twists[perm[1]], p.out_twists[perm[2]]],
        };
        Some((idx, inner, outer))
    });
    Ok(match hit {
        Some((idx, inner, outer)) => MonomialSearch {
            result: EquivResult::Equivalent { inner, outer },
            maps_searched: idx + 1,
            space,
        },
        None if limit < space => MonomialSearch {
            result: EquivResult::BudgetExceeded,
            maps_searched: limit,
            space,
        },
        None => MonomialSearch {
            result: EquivResult::Inequivalent,
            maps_searched: space,
            space,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub a: Fe,
    pub b: Fe,
    pub families: (Family, Family),
    pub result: EquivResult,
    pub maps_searched: u64,
    pub scope: Scope,
}

/// Monomial search for `F_a ~ F'_b` across (or within) the families.
pub fn equiv_report(
    ctx: &FieldCtx,
    fam_a: Family,
    a: Fe,
    fam_b: Family,
    b: Fe,
    budget: u64,
    exec: Exec,
) -> Result<EquivReport> {
    let f = fam_a.make(ctx, a)?;
    let g = fam_b.make(ctx, b)?;
    let s = el_equiv_monomial_search(ctx, &f, &g, budget, exec)?;
    Ok(EquivReport {
        a,
        b,
        families: (fam_a, fam_b),
        result: s.result,
        maps_searched: s.maps_searched,
        scope: Scope::for_degree(ctx.m()),
    })
}
