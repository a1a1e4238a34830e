//! Double circulant codes `C = ker [I_q | A]` over `F_p`.
//!
//! `A` is the circulant whose first row is `a = (a_1, ..., a_q)`; row `i` is
//! `a` rotated right `i` times, so `A[i][j] = a[(j - i) mod q]`. A codeword is
//! determined by its right half: `x_L = -x_R A^T`.
//!
//! Three minimum-norm algorithms are provided (see [`MinNormStrategy`]):
//! a full odometer sweep over all `p^q` words with per-word branch and bound,
//! a sweep over orbit representatives of right halves, and a depth-first
//! search restricted to right halves lighter than the best word so far.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cyclic::{cyclic_code_of, RingElement};
use crate::error::{Error, Result};
use crate::group::block_representatives;
use crate::modp::{FpVector, Params};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DoubleCirculantCode {
    params: Params,
    a: Vec<i64>,
}

impl DoubleCirculantCode {
    /// `a` is reduced mod `p`; it must have `q` entries.
    pub fn new(params: Params, a: &[i64]) -> Result<Self> {
        if a.len() != params.q() {
            return Err(Error::InvalidParams(format!(
                "first row needs {} entries, got {}",
                params.q(),
                a.len()
            )));
        }
        Ok(DoubleCirculantCode {
            params,
            a: a.iter().map(|&v| params.lift(v)).collect(),
        })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// First row of `A`, centered.
    pub fn first_row(&self) -> &[i64] {
        &self.a
    }

    /// `A[i][j]`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        let q = self.params.q();
        self.a[(j + q - i) % q]
    }

    /// The circulant `A` as rows.
    pub fn circulant(&self) -> Vec<Vec<i64>> {
        let q = self.params.q();
        (0..q).map(|i| (0..q).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// `(a_1, a_q, a_{q-1}, ..., a_2)`: the first column of `A`, so that
    /// `sigma_R(x)` is `x_R(Z) * a_hat(Z)` in `R`.
    pub fn first_column(&self) -> RingElement {
        let q = self.params.q();
        let col: Vec<i64> = (0..q).map(|k| self.a[(q - k) % q]).collect();
        RingElement::new(self.params, &col).expect("q entries")
    }

    /// `x_R A^T` by direct matrix action.
    pub fn right_syndrome_matrix(&self, right: &[i64]) -> Vec<i64> {
        let q = self.params.q();
        (0..q)
            .map(|i| {
                let s: i64 = (0..q).map(|j| self.entry(i, j) * right[j]).sum();
                self.params.lift(s)
            })
            .collect()
    }

    /// `x H^T` for `H = [I_q | A]`.
    pub fn syndrome(&self, x: &FpVector) -> Syndrome {
        assert_eq!(x.params(), self.params, "vector and code parameters differ");
        let left = RingElement::new(self.params, x.left()).expect("q entries");
        let x_r = RingElement::new(self.params, x.right()).expect("q entries");
        let right = x_r.ring_mul(&self.first_column());
        let by_matrix = self.right_syndrome_matrix(x.right());
        assert_eq!(
            right.coeffs(),
            by_matrix.as_slice(),
            "polynomial and matrix syndromes disagree"
        );
        let total_coeffs: Vec<i64> = x
            .left()
            .iter()
            .zip(&by_matrix)
            .map(|(&l, &r)| self.params.lift(l + r))
            .collect();
        let total = RingElement::new(self.params, &total_coeffs).expect("q entries");
        debug_assert_eq!(total, left.add(&right));
        Syndrome { left, right, total }
    }

    pub fn contains(&self, x: &FpVector) -> bool {
        assert_eq!(x.params(), self.params, "vector and code parameters differ");
        let s = self.right_syndrome_matrix(x.right());
        x.left()
            .iter()
            .zip(s)
            .all(|(&l, r)| self.params.lift(l + r) == 0)
    }

    /// The codeword with right half `right`.
    pub fn codeword(&self, right: &[i64]) -> FpVector {
        let left: Vec<i64> = self.right_syndrome_matrix(right).into_iter().map(|v| -v).collect();
        let mut coords = left;
        coords.extend(right.iter().map(|&v| self.params.lift(v)));
        FpVector::from_centered_unchecked(self.params, coords)
    }

    /// All `p^q` codewords, right halves in odometer order over centered
    /// digits (last coordinate fastest, each from `-(p-1)/2` up).
    pub fn codewords(&self, budget: u64) -> Result<Codewords<'_>> {
        check_word_budget(self.params, budget)?;
        let h = self.params.half();
        Ok(Codewords {
            code: self,
            right: vec![-h; self.params.q()],
            done: false,
        })
    }

    pub fn min_norm_sq(&self, budget: u64) -> Result<MinNorm> {
        FullSweep.min_norm(self, budget)
    }
}

fn check_word_budget(params: Params, budget: u64) -> Result<()> {
    if params.pow_f64(params.q()) > budget as f64 {
        return Err(Error::BudgetExceeded {
            needed: format!("{}^{}", params.p(), params.q()),
            budget,
        });
    }
    Ok(())
}

pub struct Codewords<'a> {
    code: &'a DoubleCirculantCode,
    right: Vec<i64>,
    done: bool,
}

impl Iterator for Codewords<'_> {
    type Item = FpVector;

    fn next(&mut self) -> Option<FpVector> {
        if self.done {
            return None;
        }
        let word = self.code.codeword(&self.right);
        let h = self.code.params.half();
        self.done = true;
        for d in self.right.iter_mut().rev() {
            if *d < h {
                *d += 1;
                self.done = false;
                break;
            }
            *d = -h;
        }
        Some(word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndrome {
    /// `x_L`.
    pub left: RingElement,
    /// `x_R A^T`.
    pub right: RingElement,
    pub total: RingElement,
}

/// Least nonzero codeword norm with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinNorm {
    pub d_sq: u64,
    pub witness: FpVector,
    pub words_visited: u64,
}

/// `Pr[x in C]` for a uniformly random first row: `1/|C(x_R)|` when
/// `x_L in C(x_R)`, else 0.
pub fn membership_probability(x: &FpVector) -> BigRational {
    if x.is_zero() {
        return BigRational::one();
    }
    let params = x.params();
    let right = RingElement::new(params, x.right()).expect("q entries");
    let left = RingElement::new(params, x.left()).expect("q entries");
    let code = cyclic_code_of(&right);
    if code.contains(&left) {
        BigRational::new(BigInt::one(), BigInt::from(code.cardinality().clone()))
    } else {
        BigRational::zero()
    }
}

/// A first row drawn uniformly from `F_p^q`.
pub fn random_code(params: Params, seed: u64) -> DoubleCirculantCode {
    random_code_stream(params, seed, 0)
}

/// Independent draws for one seed, indexed by `stream`.
pub fn random_code_stream(params: Params, seed: u64, stream: u64) -> DoubleCirculantCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let a: Vec<i64> = (0..params.q())
        .map(|_| rng.gen_range(0..params.p()) as i64)
        .collect();
    DoubleCirculantCode::new(params, &a).expect("q entries")
}

/// Outcome of sweeping every first row for one fixed `x`.
#[derive(Debug, Clone)]
pub struct SyndromeSweep {
    /// How often each right syndrome `x_R A^T` occurred.
    pub right_syndromes: BTreeMap<Vec<i64>, u64>,
    /// Number of rows `a` whose code contains `x`.
    pub containing: u64,
    pub rows: u64,
}

/// Sweeps all `p^q` first rows.
pub fn syndrome_sweep(x: &FpVector, budget: u64) -> Result<SyndromeSweep> {
    let params = x.params();
    check_word_budget(params, budget)?;
    let q = params.q();
    let h = params.half();
    let mut a = vec![-h; q];
    let mut out = SyndromeSweep {
        right_syndromes: BTreeMap::new(),
        containing: 0,
        rows: 0,
    };
    loop {
        let code = DoubleCirculantCode::new(params, &a)?;
        let s = code.syndrome(x);
        *out.right_syndromes.entry(s.right.coeffs().to_vec()).or_insert(0) += 1;
        if s.total.is_zero() {
            out.containing += 1;
        }
        out.rows += 1;
        let mut k = q;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if a[k] < h {
                a[k] += 1;
                break;
            }
            a[k] = -h;
        }
    }
}

/// A named minimum-norm algorithm.
pub trait MinNormStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn min_norm(&self, code: &DoubleCirculantCode, budget: u64) -> Result<MinNorm>;
}

/// Residue arithmetic shared by the sweeps: columns of `A` and squared
/// centered values per residue.
struct Tables {
    p: u64,
    q: usize,
    /// `cols[j * q + i] = A[i][j] mod p`.
    cols: Vec<u64>,
    /// `sq[r] = lift(r)^2`.
    sq: Vec<u64>,
}

impl Tables {
    fn new(code: &DoubleCirculantCode) -> Self {
        let params = code.params;
        let (p, q) = (params.p(), params.q());
        let mut cols = vec![0u64; q * q];
        for j in 0..q {
            for i in 0..q {
                cols[j * q + i] = code.entry(i, j).rem_euclid(p as i64) as u64;
            }
        }
        let sq = (0..p)
            .map(|r| {
                let c = params.lift(r as i64);
                (c * c) as u64
            })
            .collect();
        Tables { p, q, cols, sq }
    }

    #[inline]
    fn col(&self, j: usize) -> &[u64] {
        &self.cols[j * self.q..(j + 1) * self.q]
    }

    /// Squared norm of `x_L = -s`, abandoning once it reaches `limit`.
    #[inline]
    fn left_norm_below(&self, s: &[u64], base: u64, limit: u64) -> Option<u64> {
        let mut acc = base;
        for &r in s {
            acc += self.sq[r as usize];
            if acc >= limit {
                return None;
            }
        }
        Some(acc)
    }

    fn residue(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }
}

/// Every codeword in odometer order with incremental syndromes.
pub struct FullSweep;

impl MinNormStrategy for FullSweep {
    fn name(&self) -> &'static str {
        "full"
    }

    fn min_norm(&self, code: &DoubleCirculantCode, budget: u64) -> Result<MinNorm> {
        check_word_budget(code.params, budget)?;
        let t = Tables::new(code);
        let params = code.params;
        let (p, q, h) = (t.p, t.q, params.half());
        let start = t.residue(-h);
        let mut digits = vec![start; q];
        let mut s = vec![0u64; q];
        for j in 0..q {
            for (si, &c) in s.iter_mut().zip(t.col(j)) {
                *si = (*si + start * c) % p;
            }
        }
        let mut right_norm: u64 = q as u64 * t.sq[start as usize];
        let mut best = u64::MAX;
        let mut best_digits = digits.clone();
        let mut visited = 0u64;
        loop {
            visited += 1;
            if right_norm > 0 && right_norm < best {
                if let Some(norm) = t.left_norm_below(&s, right_norm, best) {
                    best = norm;
                    best_digits.copy_from_slice(&digits);
                }
            }
            // Advance: every step, including wrap-around from (p-1)/2 to
            // -(p-1)/2, adds 1 mod p to one digit.
            let mut k = q;
            loop {
                if k == 0 {
                    let right: Vec<i64> = best_digits.iter().map(|&r| params.lift(r as i64)).collect();
                    return Ok(MinNorm {
                        d_sq: best,
                        witness: code.codeword(&right),
                        words_visited: visited,
                    });
                }
                k -= 1;
                let old = digits[k];
                let new = if old + 1 == p { 0 } else { old + 1 };
                digits[k] = new;
                right_norm = right_norm - t.sq[old as usize] + t.sq[new as usize];
                for (si, &c) in s.iter_mut().zip(t.col(k)) {
                    *si += c;
                    if *si >= p {
                        *si -= p;
                    }
                }
                if new != start {
                    break;
                }
            }
        }
    }
}

/// Orbit representatives of right halves under rotation and negation. The
/// group maps the code to itself, so the minimum over representatives is the
/// minimum over all words.
pub struct OrbitReduced;

type RepList = Arc<Vec<(Vec<i64>, usize)>>;

fn cached_representatives(params: Params, budget: u64) -> Result<RepList> {
    static CACHE: OnceLock<Mutex<HashMap<Params, RepList>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(reps) = cache.lock().expect("cache poisoned").get(&params) {
        return Ok(reps.clone());
    }
    let reps = Arc::new(block_representatives(params, budget)?);
    cache
        .lock()
        .expect("cache poisoned")
        .insert(params, reps.clone());
    Ok(reps)
}

impl MinNormStrategy for OrbitReduced {
    fn name(&self) -> &'static str {
        "orbit"
    }

    fn min_norm(&self, code: &DoubleCirculantCode, budget: u64) -> Result<MinNorm> {
        check_word_budget(code.params, budget)?;
        let reps = cached_representatives(code.params, budget)?;
        let t = Tables::new(code);
        let (p, q) = (t.p, t.q);
        let mut best = u64::MAX;
        let mut best_idx = 0;
        let mut s = vec![0u64; q];
        for (idx, (right, _)) in reps.iter().enumerate() {
            let right_norm: u64 = right.iter().map(|&c| (c * c) as u64).sum();
            if right_norm >= best {
                continue;
            }
            s.iter_mut().for_each(|v| *v = 0);
            for (j, &c) in right.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let r = t.residue(c);
                for (si, &a) in s.iter_mut().zip(t.col(j)) {
                    *si = (*si + r * a) % p;
                }
            }
            if let Some(norm) = t.left_norm_below(&s, right_norm, best) {
                best = norm;
                best_idx = idx;
            }
        }
        Ok(MinNorm {
            d_sq: best,
            witness: code.codeword(&reps[best_idx].0),
            words_visited: reps.len() as u64,
        })
    }
}

/// Depth-first search over right halves with `|x_R|^2 < best`, trying small
/// coordinates first so that the bound shrinks early.
pub struct SphereSearch;

struct SphereState<'a> {
    t: &'a Tables,
    order: Vec<(u64, u64)>,
    right: Vec<u64>,
    best: u64,
    best_right: Vec<u64>,
    visited: u64,
    budget: u64,
}

impl SphereState<'_> {
    fn dfs(&mut self, depth: usize, used: u64, s: &[u64]) -> Result<()> {
        let t = self.t;
        if depth == t.q {
            if used == 0 {
                return Ok(());
            }
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::BudgetExceeded {
                    needed: format!("more than {}", self.budget),
                    budget: self.budget,
                });
            }
            if let Some(norm) = t.left_norm_below(s, used, self.best) {
                self.best = norm;
                self.best_right.copy_from_slice(&self.right);
            }
            return Ok(());
        }
        let mut next = vec![0u64; t.q];
        for idx in 0..self.order.len() {
            let (r, sq) = self.order[idx];
            if used + sq >= self.best {
                break;
            }
            self.right[depth] = r;
            for ((ni, &si), &c) in next.iter_mut().zip(s).zip(t.col(depth)) {
                *ni = (si + r * c) % t.p;
            }
            self.dfs(depth + 1, used + sq, &next)?;
        }
        self.right[depth] = 0;
        Ok(())
    }
}

impl MinNormStrategy for SphereSearch {
    fn name(&self) -> &'static str {
        "sphere"
    }

    fn min_norm(&self, code: &DoubleCirculantCode, budget: u64) -> Result<MinNorm> {
        let t = Tables::new(code);
        let h = code.params.half();
        // 0, 1, -1, 2, -2, ...
        let order: Vec<(u64, u64)> = std::iter::once(0)
            .chain((1..=h).flat_map(|v| [v, -v]))
            .map(|c| (t.residue(c), (c * c) as u64))
            .collect();
        let mut state = SphereState {
            t: &t,
            order,
            right: vec![0; t.q],
            best: u64::MAX,
            best_right: vec![0; t.q],
            visited: 0,
            budget,
        };
        let s = vec![0u64; t.q];
        state.dfs(0, 0, &s)?;
        let right: Vec<i64> = state
            .best_right
            .iter()
            .map(|&r| code.params.lift(r as i64))
            .collect();
        Ok(MinNorm {
            d_sq: state.best,
            witness: code.codeword(&right),
            words_visited: state.visited,
        })
    }
}
