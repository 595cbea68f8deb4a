//! Dense linear algebra over GF(2) for systems of at most 128 unknowns.
//!
//! A linear map is given by the images of the unit vectors (its columns),
//! each packed into a `u128`. Elimination keeps a fully reduced basis: the
//! leading bit of every pivot appears in no other pivot, so reduction can
//! visit pivots in any order.

#[derive(Clone, Copy)]
struct Pivot {
    vec: u128,
    lead: u128,
    combo: u128,
}

/// Incremental row-echelon basis of a set of GF(2) vectors.
#[derive(Default, Clone)]
pub struct EchelonBasis {
    pivots: Vec<Pivot>,
}

impl EchelonBasis {
    pub fn with_capacity(n: usize) -> Self {
        EchelonBasis {
            pivots: Vec::with_capacity(n),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn clear(&mut self) {
        self.pivots.clear();
    }

    fn reduce(&self, mut v: u128, mut combo: u128) -> (u128, u128) {
        for p in &self.pivots {
            if v & p.lead != 0 {
                v ^= p.vec;
                combo ^= p.combo;
            }
        }
        (v, combo)
    }

    /// Inserts `v` tagged with `combo`. Returns the reduced combination when
    /// `v` was already in the span (a dependency), `None` otherwise.
    pub fn insert(&mut self, v: u128, combo: u128) -> Option<u128> {
        let (v, combo) = self.reduce(v, combo);
        if v == 0 {
            return Some(combo);
        }
        let lead = 1u128 << (127 - v.leading_zeros());
        for p in &mut self.pivots {
            if p.vec & lead != 0 {
                p.vec ^= v;
                p.combo ^= combo;
            }
        }
        self.pivots.push(Pivot { vec: v, lead, combo });
        None
    }

    pub fn contains(&self, v: u128) -> bool {
        self.reduce(v, 0).0 == 0
    }
}

/// Rank of the span of `columns`.
pub fn rank(columns: &[u128]) -> usize {
    let mut basis = EchelonBasis::with_capacity(columns.len());
    for &c in columns {
        basis.insert(c, 0);
    }
    basis.rank()
}

/// A basis of `{x : sum_j x_j columns[j] = 0}`, with `x` packed so that bit
/// `j` selects column `j`. At most 128 columns.
pub fn kernel_basis(columns: &[u128]) -> Vec<u128> {
    assert!(columns.len() <= 128);
    let mut basis = EchelonBasis::with_capacity(columns.len());
    columns
        .iter()
        .enumerate()
        .filter_map(|(j, &c)| basis.insert(c, 1u128 << j))
        .collect()
}

/// Whether `target` lies in the span of `columns`.
pub fn in_span(columns: &[u128], target: u128) -> bool {
    let mut basis = EchelonBasis::with_capacity(columns.len());
    for &c in columns {
        basis.insert(c, 0);
    }
    basis.contains(target)
}
