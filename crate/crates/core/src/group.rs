//! The action of `G = Z/2 x Z/q` on `F_p^{2q}`.
//!
//! `(0, 1)` rotates both halves right by one position simultaneously and
//! `(1, 0)` negates every coordinate. Orbits have length 1 (the zero vector),
//! 2 (nonzero vectors with constant halves) or `2q`; length `q` cannot occur
//! because `q` is odd.
//!
//! The same action restricted to a single block of `q` coordinates is used to
//! enumerate orbit representatives of right halves and of first rows.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::counting::centered_ball_count;
use crate::error::{Error, Result};
use crate::modp::{norm_sq_of, FpVector, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    pub negate: bool,
    /// Right rotation amount, `0 <= shift < q`.
    pub shift: usize,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            negate: false,
            shift: 0,
        }
    }

    /// `(1, 0)`.
    pub fn negation() -> Self {
        GroupElement {
            negate: true,
            shift: 0,
        }
    }

    /// `(0, 1)`.
    pub fn rotation() -> Self {
        GroupElement {
            negate: false,
            shift: 1,
        }
    }

    /// All `2q` elements.
    pub fn all(q: usize) -> Vec<GroupElement> {
        [false, true]
            .into_iter()
            .flat_map(|negate| (0..q).map(move |shift| GroupElement { negate, shift }))
            .collect()
    }

    /// The product `self * other` (apply `other` first).
    pub fn compose(self, other: GroupElement, q: usize) -> GroupElement {
        GroupElement {
            negate: self.negate ^ other.negate,
            shift: (self.shift + other.shift) % q,
        }
    }

    /// Image of block-structured centered coordinates; `coords.len()` must be
    /// a multiple of `q`.
    pub fn apply(self, coords: &[i64], q: usize) -> Vec<i64> {
        let sign = if self.negate { -1 } else { 1 };
        let mut out = vec![0; coords.len()];
        for (block_in, block_out) in coords.chunks_exact(q).zip(out.chunks_exact_mut(q)) {
            for (i, slot) in block_out.iter_mut().enumerate() {
                *slot = sign * block_in[(i + q - self.shift) % q];
            }
        }
        out
    }
}

/// `g . x`.
pub fn act(g: GroupElement, x: &FpVector) -> FpVector {
    let params = x.params();
    FpVector::from_centered_unchecked(params, g.apply(x.coords(), params.q()))
}

/// Compares `g . x` with `x` lexicographically without building the image.
#[inline]
fn image_cmp(coords: &[i64], q: usize, negate: bool, shift: usize) -> std::cmp::Ordering {
    let sign = if negate { -1 } else { 1 };
    for (b, block) in coords.chunks_exact(q).enumerate() {
        for i in 0..q {
            let img = sign * block[(i + q - shift) % q];
            let cur = coords[b * q + i];
            if img != cur {
                return img.cmp(&cur);
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// Whether `coords` is the lexicographic minimum of its orbit.
#[inline]
pub fn is_canonical(coords: &[i64], q: usize) -> bool {
    for negate in [false, true] {
        for shift in 0..q {
            if (negate || shift != 0) && image_cmp(coords, q, negate, shift).is_lt() {
                return false;
            }
        }
    }
    true
}

/// Size of the stabiliser of `coords`.
#[inline]
pub fn stabilizer_size(coords: &[i64], q: usize) -> usize {
    let mut count = 0;
    for negate in [false, true] {
        for shift in 0..q {
            if image_cmp(coords, q, negate, shift).is_eq() {
                count += 1;
            }
        }
    }
    count
}

/// `|G| / |Stab(x)|`.
#[inline]
pub fn orbit_length_of(coords: &[i64], q: usize) -> usize {
    2 * q / stabilizer_size(coords, q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClass {
    /// Lexicographic minimum of the orbit in centered coordinates.
    pub representative: FpVector,
    pub length: usize,
}

/// The orbit of `x` by explicit enumeration of all `2q` images.
pub fn orbit_of(x: &FpVector) -> OrbitClass {
    let q = x.params().q();
    let mut images: Vec<Vec<i64>> = GroupElement::all(q)
        .into_iter()
        .map(|g| g.apply(x.coords(), q))
        .collect();
    images.sort();
    images.dedup();
    let length = images.len();
    let representative =
        FpVector::from_centered_unchecked(x.params(), images.into_iter().next().expect("nonempty"));
    OrbitClass {
        representative,
        length,
    }
}

/// Orbit counts for the vectors of `F_p^n` with squared norm at most `w_sq`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitCensus {
    pub q: usize,
    pub p: u64,
    pub w_sq: u64,
    /// Orbit length to number of orbits of that length.
    pub orbits: BTreeMap<usize, u64>,
    /// Number of vectors covered, `sum(length * count)`.
    pub vectors: u64,
    pub strategy: String,
}

impl OrbitCensus {
    fn from_counts(params: Params, w_sq: u64, counts: BTreeMap<usize, u64>, strategy: &str) -> Self {
        let vectors = counts.iter().map(|(&l, &c)| l as u64 * c).sum();
        OrbitCensus {
            q: params.q(),
            p: params.p(),
            w_sq,
            orbits: counts,
            vectors,
            strategy: strategy.to_string(),
        }
    }
}

fn merge_counts(mut a: BTreeMap<usize, u64>, b: BTreeMap<usize, u64>) -> BTreeMap<usize, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// A way of partitioning a ball into orbits.
pub trait CensusStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn census(&self, params: Params, w_sq: u64, budget: u64) -> Result<OrbitCensus>;
}

/// Visits every vector of `F_p^n` and keeps those inside the ball.
pub struct FullSweep;

impl CensusStrategy for FullSweep {
    fn name(&self) -> &'static str {
        "sweep"
    }

    fn census(&self, params: Params, w_sq: u64, budget: u64) -> Result<OrbitCensus> {
        let space = params.pow_f64(params.n());
        if space > budget as f64 {
            return Err(Error::BudgetExceeded {
                needed: format!("{}^{}", params.p(), params.n()),
                budget,
            });
        }
        let n = params.n();
        let q = params.q();
        let h = params.half();
        let counts = (-h..=h)
            .into_par_iter()
            .map(|first| {
                let mut counts = BTreeMap::new();
                let mut x = vec![-h; n];
                x[0] = first;
                loop {
                    if norm_sq_of(&x) <= w_sq && is_canonical(&x, q) {
                        *counts.entry(orbit_length_of(&x, q)).or_insert(0) += 1;
                    }
                    // Odometer over coordinates 1..n, last fastest.
                    let mut k = n - 1;
                    loop {
                        if k == 0 {
                            return counts;
                        }
                        if x[k] < h {
                            x[k] += 1;
                            break;
                        }
                        x[k] = -h;
                        k -= 1;
                    }
                }
            })
            .reduce(BTreeMap::new, merge_counts);
        Ok(OrbitCensus::from_counts(params, w_sq, counts, self.name()))
    }
}

/// Depth-first enumeration restricted to the ball.
pub struct BallSearch;

fn ball_dfs(
    x: &mut Vec<i64>,
    depth: usize,
    used: u64,
    w_sq: u64,
    h: i64,
    q: usize,
    counts: &mut BTreeMap<usize, u64>,
) {
    if depth == x.len() {
        if is_canonical(x, q) {
            *counts.entry(orbit_length_of(x, q)).or_insert(0) += 1;
        }
        return;
    }
    for c in -h..=h {
        let sq = (c * c) as u64;
        if used + sq > w_sq {
            continue;
        }
        x[depth] = c;
        ball_dfs(x, depth + 1, used + sq, w_sq, h, q, counts);
    }
    x[depth] = 0;
}

impl CensusStrategy for BallSearch {
    fn name(&self) -> &'static str {
        "ball"
    }

    fn census(&self, params: Params, w_sq: u64, budget: u64) -> Result<OrbitCensus> {
        let size = centered_ball_count(params.n(), params.p(), w_sq);
        if size > budget.into() {
            return Err(Error::BudgetExceeded {
                needed: size.to_string(),
                budget,
            });
        }
        let n = params.n();
        let q = params.q();
        let h = params.half();
        let counts = (-h..=h)
            .into_par_iter()
            .filter(|c| (c * c) as u64 <= w_sq)
            .map(|first| {
                let mut counts = BTreeMap::new();
                let mut x = vec![0; n];
                x[0] = first;
                ball_dfs(&mut x, 1, (first * first) as u64, w_sq, h, q, &mut counts);
                counts
            })
            .reduce(BTreeMap::new, merge_counts);
        Ok(OrbitCensus::from_counts(params, w_sq, counts, self.name()))
    }
}

/// Full sweep when `p^n` fits the budget, otherwise ball search.
pub fn orbit_census(params: Params, w_sq: u64, budget: u64) -> Result<OrbitCensus> {
    if params.pow_f64(params.n()) <= budget as f64 {
        FullSweep.census(params, w_sq, budget)
    } else {
        BallSearch.census(params, w_sq, budget)
    }
}

/// Lexicographically minimal representatives of the orbits of `Z/2 x Z/q`
/// on `F_p^q` (a single rotating block), with their orbit lengths, in
/// odometer order. The zero vector is excluded.
pub fn block_representatives(params: Params, budget: u64) -> Result<Vec<(Vec<i64>, usize)>> {
    let q = params.q();
    if params.pow_f64(q) > budget as f64 {
        return Err(Error::BudgetExceeded {
            needed: format!("{}^{}", params.p(), q),
            budget,
        });
    }
    let h = params.half();
    let mut out = Vec::new();
    let mut x = vec![-h; q];
    loop {
        if x.iter().any(|&c| c != 0) && is_canonical(&x, q) {
            out.push((x.clone(), orbit_length_of(&x, q)));
        }
        let mut k = q;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if x[k] < h {
                x[k] += 1;
                break;
            }
            x[k] = -h;
        }
    }
}
