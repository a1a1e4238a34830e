//! Searches over double circulant codes and the lemma-verification suite.
//!
//! A search either visits every first row `a in F_p^q` or draws rows from a
//! seeded stream, computes each code's minimum norm, and reports the
//! histogram of `d^2`, the best code and its lattice, and the fraction of
//! codes with a nonzero word inside the target radius next to the
//! first-moment bound for that radius.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use log::info;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{
    ball_count_report, centered_ball_count, ln_ball_volume, moment_bound, norm_profile,
    MomentBound, DENSITY_CONSTANT,
};
use crate::cyclic::{
    cyclic_code_of, irreducible_factors, nontrivial_cyclic_codes, CyclicCode, RingElement,
};
use crate::dcode::{membership_probability, random_code_stream, syndrome_sweep, DoubleCirculantCode};
use crate::error::{Error, Result};
use crate::group::{act, block_representatives, is_canonical, orbit_census, GroupElement};
use crate::json;
use crate::lattice::{construction_a, density, DensityReport};
use crate::modp::{FpVector, Params};
use crate::primes::is_primitive;
use crate::strategy::{min_norm_strategies, prime_selectors};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Random,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "random" => Ok(Mode::Random),
            other => Err(Error::InvalidParams(format!(
                "mode must be exhaustive or random, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Random => "random",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub q: usize,
    /// Chosen by `prime_method` when absent.
    pub p: Option<u64>,
    pub prime_method: String,
    pub mode: Mode,
    pub samples: u64,
    /// Defaults to [`target_radius_sq`] with [`DENSITY_CONSTANT`].
    pub w_sq: Option<u64>,
    pub seed: u64,
    /// Cap on the number of codes; exhaustive runs over more codes stop
    /// there and are flagged partial.
    pub budget: u64,
    /// Cap on words visited while computing one code's minimum norm.
    pub word_budget: u64,
    /// 0 lets the thread pool decide.
    pub workers: usize,
    pub strategy: String,
    /// Exhaustive mode: visit one first row per orbit of rotation and
    /// negation, weighted by the orbit size.
    pub reduce_codes: bool,
    /// Log a progress line every this many codes (0: never).
    pub progress_every: u64,
}

impl SearchConfig {
    pub fn new(q: usize) -> Self {
        SearchConfig {
            q,
            p: None,
            prime_method: "direct".into(),
            mode: Mode::Exhaustive,
            samples: 1000,
            w_sq: None,
            seed: 0,
            budget: crate::DEFAULT_BUDGET,
            word_budget: crate::DEFAULT_BUDGET,
            workers: 0,
            strategy: "sphere".into(),
            reduce_codes: true,
            progress_every: 0,
        }
    }
}

/// Enumeration cost of the search procedure at these parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Costs {
    /// `p^q` codes times `p^q` words each.
    #[serde(serialize_with = "json::big_uint")]
    pub code_word_pairs: BigUint,
    /// Orbits of first rows times nonzero orbits of right halves.
    #[serde(serialize_with = "json::big_uint")]
    pub orbit_reduced_pairs: BigUint,
}

/// Number of orbits of rotation and negation on `F_p^q`, zero included.
pub fn block_orbit_count(params: Params) -> BigUint {
    let (q, p) = (params.q(), params.p());
    let total = BigUint::from(p).pow(q as u32) + BigUint::from((q as u64 - 1) * p + q as u64);
    total / BigUint::from(2 * q as u64)
}

pub fn costs(params: Params) -> Costs {
    let codes = BigUint::from(params.p()).pow(params.q() as u32);
    let orbits = block_orbit_count(params);
    Costs {
        code_word_pairs: &codes * &codes,
        orbit_reduced_pairs: &orbits * (&orbits - 1u32),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub q: usize,
    pub p: u64,
    pub mode: Mode,
    pub seed: u64,
    pub strategy: String,
    pub w_sq: u64,
    /// Codes accounted for: `p^q` in a full exhaustive run, the sample count
    /// in random mode.
    pub codes_total: u64,
    /// Minimum-norm computations actually run.
    pub codes_visited: u64,
    pub words_visited: u64,
    /// `d^2` to number of codes.
    pub histogram: BTreeMap<u64, u64>,
    pub best_a: Vec<i64>,
    pub best_d_sq: u64,
    /// Codes with a nonzero word of squared norm at most `w_sq`.
    pub codes_within_w: u64,
    /// `codes_within_w / codes_total`.
    #[serde(serialize_with = "json::rational")]
    pub prob_estimate: BigRational,
    /// Binomial standard error of `prob_estimate` (random mode).
    pub std_error: Option<f64>,
    pub moment_bound: Option<MomentBound>,
    /// Why `moment_bound` is absent.
    pub moment_bound_note: Option<String>,
    pub density: DensityReport,
    /// `|B(d*)| / (n p^q)` for the best code.
    pub c_achieved: f64,
    pub c_target: f64,
    pub costs: Costs,
    /// The run stopped at the budget before covering every code.
    pub partial: bool,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    /// `d_sq,codes` lines with a header.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("d_sq,codes\n");
        for (d, c) in &self.histogram {
            out.push_str(&format!("{d},{c}\n"));
        }
        out
    }

    /// Fraction of codes with minimum norm at most `w_sq`, from the histogram.
    pub fn fraction_within(&self, w_sq: u64) -> BigRational {
        let hits: u64 = self.histogram.range(..=w_sq).map(|(_, c)| c).sum();
        BigRational::new(BigInt::from(hits), BigInt::from(self.codes_total))
    }
}

/// Largest `w_sq` with `vol S_n(sqrt(w_sq)) <= c n p^q`.
pub fn target_radius_sq(params: Params, c: f64) -> u64 {
    assert!(c > 0.0);
    let n = params.n();
    let target = c.ln() + (n as f64).ln() + params.q() as f64 * (params.p() as f64).ln();
    let fits = |w_sq: u64| ln_ball_volume(n, (w_sq as f64).sqrt()) <= target;
    let guess = ((target - ln_ball_volume(n, 1.0)) * 2.0 / n as f64).exp();
    let mut w = guess.floor().max(0.0) as u64;
    while w > 0 && !fits(w) {
        w -= 1;
    }
    while fits(w + 1) {
        w += 1;
    }
    w
}

struct Acc {
    histogram: BTreeMap<u64, u64>,
    best: Option<(u64, Vec<i64>)>,
    words: u64,
    visited: u64,
}

impl Acc {
    fn empty() -> Self {
        Acc {
            histogram: BTreeMap::new(),
            best: None,
            words: 0,
            visited: 0,
        }
    }

    fn add(mut self, a: Vec<i64>, d_sq: u64, weight: u64, words: u64) -> Self {
        *self.histogram.entry(d_sq).or_insert(0) += weight;
        self.words += words;
        self.visited += 1;
        self.best = better(self.best, Some((d_sq, a)));
        self
    }

    fn merge(mut self, other: Acc) -> Self {
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self.words += other.words;
        self.visited += other.visited;
        self.best = better(self.best, other.best);
        self
    }
}

/// Larger `d^2` wins; ties go to the lexicographically smaller row.
fn better(x: Option<(u64, Vec<i64>)>, y: Option<(u64, Vec<i64>)>) -> Option<(u64, Vec<i64>)> {
    match (x, y) {
        (None, b) => b,
        (a, None) => a,
        (Some(a), Some(b)) => {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

/// The `index`-th first row in odometer order over centered digits.
fn row_at(params: Params, mut index: u64) -> Vec<i64> {
    let (q, p, h) = (params.q(), params.p(), params.half());
    let mut a = vec![0i64; q];
    for k in (0..q).rev() {
        a[k] = (index % p) as i64 - h;
        index /= p;
    }
    a
}

pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    let p = match config.p {
        Some(p) => p,
        None => prime_selectors().get(&config.prime_method)?.select(config.q)?.p,
    };
    let params = Params::new(config.q, p)?;
    let strategy = min_norm_strategies().get(&config.strategy)?;
    let w_sq = config
        .w_sq
        .unwrap_or_else(|| target_radius_sq(params, DENSITY_CONSTANT));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if config.workers > 0 {
        builder = builder.num_threads(config.workers);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;

    let progress = AtomicU64::new(0);
    let tick = || {
        if config.progress_every > 0 {
            let done = progress.fetch_add(1, Ordering::Relaxed) + 1;
            if done.is_multiple_of(config.progress_every) {
                info!("{done} codes processed");
            }
        }
    };
    let budget = config.budget;
    let word_budget = config.word_budget;
    let evaluate = |a: Vec<i64>, weight: u64| -> Result<Acc> {
        let code = DoubleCirculantCode::new(params, &a)?;
        let m = strategy.min_norm(&code, word_budget)?;
        tick();
        Ok(Acc::empty().add(a, m.d_sq, weight, m.words_visited))
    };
    let combine = |x: Result<Acc>, y: Result<Acc>| -> Result<Acc> { Ok(x?.merge(y?)) };

    let total_codes = params.pow_f64(params.q());
    let (acc, codes_total, partial) = match config.mode {
        Mode::Exhaustive => {
            let fits = total_codes <= budget as f64;
            if fits && config.reduce_codes {
                let mut items = vec![(vec![0i64; params.q()], 1usize)];
                items.extend(block_representatives(params, budget.max(word_budget))?);
                let acc = pool.install(|| {
                    items
                        .into_par_iter()
                        .map(|(a, w)| evaluate(a, w as u64))
                        .reduce(|| Ok(Acc::empty()), combine)
                })?;
                (acc, total_codes as u64, false)
            } else {
                let count = if fits { total_codes as u64 } else { budget };
                let acc = pool.install(|| {
                    (0..count)
                        .into_par_iter()
                        .map(|i| evaluate(row_at(params, i), 1))
                        .reduce(|| Ok(Acc::empty()), combine)
                })?;
                (acc, count, !fits)
            }
        }
        Mode::Random => {
            let count = config.samples.min(budget);
            let seed = config.seed;
            let acc = pool.install(|| {
                (0..count)
                    .into_par_iter()
                    .map(|i| {
                        let code = random_code_stream(params, seed, i);
                        evaluate(code.first_row().to_vec(), 1)
                    })
                    .reduce(|| Ok(Acc::empty()), combine)
            })?;
            (acc, count, count < config.samples)
        }
    };
    if codes_total == 0 {
        return Err(Error::InvalidParams("no codes to search".into()));
    }

    let (best_d_sq, best_a) = acc.best.clone().expect("at least one code");
    let codes_within_w: u64 = acc.histogram.range(..=w_sq).map(|(_, c)| c).sum();
    let prob_estimate = BigRational::new(BigInt::from(codes_within_w), BigInt::from(codes_total));
    let std_error = (config.mode == Mode::Random).then(|| {
        let f = codes_within_w as f64 / codes_total as f64;
        (f * (1.0 - f) / codes_total as f64).sqrt()
    });
    let (moment, note) = match moment_bound(params, w_sq) {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let best_code = DoubleCirculantCode::new(params, &best_a)?;
    let lattice = construction_a(&best_code, best_d_sq)?;
    let report = density(&lattice);
    let n = params.n();
    let c_achieved = {
        let count = centered_ball_count(n, p, best_d_sq);
        let denom = BigUint::from(n) * BigUint::from(p).pow(params.q() as u32);
        json::rational_to_f64(&BigRational::new(count.into(), denom.into()))
    };
    Ok(SearchResult {
        q: params.q(),
        p,
        mode: config.mode,
        seed: config.seed,
        strategy: strategy.name().to_string(),
        w_sq,
        codes_total,
        codes_visited: acc.visited,
        words_visited: acc.words,
        histogram: acc.histogram,
        best_a,
        best_d_sq,
        codes_within_w,
        prob_estimate,
        std_error,
        moment_bound: moment,
        moment_bound_note: note,
        density: report,
        c_achieved,
        c_target: DENSITY_CONSTANT,
        costs: costs(params),
        partial,
    })
}

/// `sum_{x != 0, |x|^2 <= w_sq} Pr[x in C] / l(x)`, by visiting each orbit
/// once: `Pr` is constant on orbits, so each orbit contributes `Pr` of its
/// canonical member.
pub fn moment_expectation_by_enumeration(
    params: Params,
    w_sq: u64,
    budget: u64,
) -> Result<BigRational> {
    let n = params.n();
    let points = centered_ball_count(n, params.p(), w_sq);
    if points > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: points.to_string(),
            budget,
        });
    }
    let mut sum = BigRational::zero();
    let mut x = vec![0i64; n];
    let mut visit = |coords: &[i64]| {
        if coords.iter().any(|&c| c != 0) && is_canonical(coords, params.q()) {
            let v = FpVector::from_centered(params, coords.to_vec()).expect("centered");
            sum += membership_probability(&v);
        }
    };
    ball_walk(params, w_sq, 0, 0, &mut x, &mut visit);
    Ok(sum)
}

fn ball_walk(
    params: Params,
    w_sq: u64,
    depth: usize,
    used: u64,
    x: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    if depth == x.len() {
        visit(x);
        return;
    }
    let h = params.half();
    for c in -h..=h {
        let sq = (c * c) as u64;
        if used + sq <= w_sq {
            x[depth] = c;
            ball_walk(params, w_sq, depth + 1, used + sq, x, visit);
        }
    }
    x[depth] = 0;
}

/// Twenty vectors covering the four kinds of right half (zero, nonzero
/// constant, nonzero with coordinate sum zero, invertible in the ring) with
/// five left halves each.
pub fn structural_vectors(params: Params) -> Vec<FpVector> {
    let q = params.q();
    let unit_vec = |k: usize| -> Vec<i64> { (0..q).map(|i| i64::from(i == k)).collect() };
    let ones = vec![1i64; q];
    let mut diff = unit_vec(0);
    diff[1] = -1;
    let ramp: Vec<i64> = (0..q as i64).map(|i| params.lift(i + 1)).collect();
    let lefts = [vec![0i64; q], ones.clone(), diff.clone(), unit_vec(0), ramp];

    let rotate = |v: &[i64], s: usize| -> Vec<i64> { (0..q).map(|i| v[(i + q - s % q) % q]).collect() };
    let scale = |v: &[i64], k: i64| -> Vec<i64> { v.iter().map(|&c| params.lift(c * k)).collect() };
    let units = [unit_vec(0), {
        // 2 + Z: invertible unless it vanishes at a q-th root of unity.
        let mut u = unit_vec(1);
        u[0] = 2;
        u
    }];
    let is_unit = |v: &[i64]| {
        cyclic_code_of(&RingElement::new(params, v).expect("q entries")).is_whole_space()
    };
    let mut out = Vec::with_capacity(20);
    for (k, left) in lefts.iter().enumerate() {
        let kk = k as i64 % (params.p() as i64 - 1) + 1;
        let unit = units
            .iter()
            .map(|u| rotate(u, k))
            .find(|u| is_unit(u))
            .unwrap_or_else(|| unit_vec(k % q));
        let rights = [
            vec![0i64; q],
            scale(&ones, kk),
            scale(&rotate(&diff, k), kk),
            scale(&unit, kk),
        ];
        for right in rights {
            out.push(FpVector::from_halves(params, left, &right).expect("q entries"));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub counterexample: Option<serde_json::Value>,
}

impl LemmaCheck {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        LemmaCheck {
            name,
            status: Status::Pass,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn fail(name: &'static str, detail: impl Into<String>, example: serde_json::Value) -> Self {
        LemmaCheck {
            name,
            status: Status::Fail,
            detail: detail.into(),
            counterexample: Some(example),
        }
    }

    fn with(name: &'static str, status: Status, detail: impl Into<String>) -> Self {
        LemmaCheck {
            name,
            status,
            detail: detail.into(),
            counterexample: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub q: usize,
    pub p: u64,
    pub budget: u64,
    /// `fail` if any check failed, else `skipped` if any was skipped.
    pub status: Status,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn check(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

pub const LEMMA_NAMES: [&str; 7] = [
    "syndrome-identity",
    "syndrome-distribution",
    "two-code-structure",
    "orbit-lengths",
    "code-invariance",
    "moment-bound",
    "ball-count",
];

pub fn verify_lemmas(params: Params, budget: u64) -> LemmaReport {
    let checks: Vec<LemmaCheck> = if budget == 0 {
        LEMMA_NAMES
            .iter()
            .map(|&name| LemmaCheck::with(name, Status::Skipped, "budget is zero"))
            .collect()
    } else {
        vec![
            check_syndrome_identity(params, budget),
            check_syndrome_distribution(params, budget),
            check_two_code_structure(params, budget),
            check_orbit_lengths(params, budget),
            check_code_invariance(params, budget),
            check_moment_bound(params, budget),
            check_ball_count(params, budget),
        ]
    };
    let status = if checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else if checks.iter().any(|c| c.status == Status::Skipped) {
        Status::Skipped
    } else {
        Status::Pass
    };
    LemmaReport {
        q: params.q(),
        p: params.p(),
        budget,
        status,
        checks,
    }
}

fn over_budget(name: &'static str, work: f64, budget: u64) -> Option<LemmaCheck> {
    (work > budget as f64).then(|| {
        LemmaCheck::with(
            name,
            Status::Skipped,
            format!("needs about {work:.0} steps, budget {budget}"),
        )
    })
}

fn all_rows(params: Params) -> impl Iterator<Item = Vec<i64>> {
    let count = params.pow_f64(params.q()) as u64;
    (0..count).map(move |i| row_at(params, i))
}

fn check_syndrome_identity(params: Params, budget: u64) -> LemmaCheck {
    const NAME: &str = "syndrome-identity";
    let xs = structural_vectors(params);
    let work = params.pow_f64(params.q()) * xs.len() as f64;
    if let Some(skip) = over_budget(NAME, work, budget) {
        return skip;
    }
    for a in all_rows(params) {
        let code = DoubleCirculantCode::new(params, &a).expect("q entries");
        let col = code.first_column();
        for x in &xs {
            let by_ring = RingElement::new(params, x.right())
                .expect("q entries")
                .ring_mul(&col);
            let by_matrix = code.right_syndrome_matrix(x.right());
            if by_ring.coeffs() != by_matrix.as_slice() {
                return LemmaCheck::fail(
                    NAME,
                    "x_R(Z) a_hat(Z) differs from x_R A^T",
                    serde_json::json!({"a": a, "x": x.coords()}),
                );
            }
        }
    }
    LemmaCheck::pass(NAME, format!("{} rows x {} vectors", work / xs.len() as f64, xs.len()))
}

fn check_syndrome_distribution(params: Params, budget: u64) -> LemmaCheck {
    const NAME: &str = "syndrome-distribution";
    let xs = structural_vectors(params);
    let rows = params.pow_f64(params.q());
    if let Some(skip) = over_budget(NAME, rows * xs.len() as f64, budget) {
        return skip;
    }
    for x in &xs {
        let sweep = match syndrome_sweep(x, budget) {
            Ok(s) => s,
            Err(e) => return LemmaCheck::with(NAME, Status::Skipped, e.to_string()),
        };
        let code = cyclic_code_of(&RingElement::new(params, x.right()).expect("q entries"));
        let size = code.cardinality().to_u64().unwrap_or(u64::MAX);
        let uniform = sweep.right_syndromes.len() as u64 == size
            && sweep
                .right_syndromes
                .iter()
                .all(|(s, &c)| code.contains_coeffs(s) && c * size == sweep.rows);
        let freq = BigRational::new(BigInt::from(sweep.containing), BigInt::from(sweep.rows));
        let prob = membership_probability(x);
        if !uniform || freq != prob {
            return LemmaCheck::fail(
                NAME,
                "right syndrome not uniform on C(x_R) or membership frequency off",
                serde_json::json!({
                    "x": x.coords(),
                    "code_size": size,
                    "distinct_syndromes": sweep.right_syndromes.len(),
                    "frequency": freq.to_string(),
                    "probability": prob.to_string(),
                }),
            );
        }
    }
    LemmaCheck::pass(NAME, format!("{} vectors, all first rows", xs.len()))
}

fn check_two_code_structure(params: Params, budget: u64) -> LemmaCheck {
    const NAME: &str = "two-code-structure";
    let (q, p) = (params.q(), params.p());
    let primitive = is_primitive(p as i64, q as u64).expect("p is not 0 mod q");
    let factors = irreducible_factors(params);
    let degrees: Vec<usize> = factors.iter().map(|f| f.degree().unwrap_or(0)).collect();
    if !primitive {
        if factors.len() > 2 {
            return LemmaCheck::with(
                NAME,
                Status::NotApplicable,
                format!(
                    "{}; Z^q - 1 has {} irreducible factors of degrees {degrees:?}",
                    Error::NotTwoCodeRegime { q: q as u64, p },
                    factors.len()
                ),
            );
        }
        return LemmaCheck::fail(
            NAME,
            "p is not primitive mod q but Z^q - 1 has only two factors",
            serde_json::json!({"degrees": degrees}),
        );
    }
    if degrees != [1, q - 1] {
        return LemmaCheck::fail(NAME, "unexpected factor degrees", serde_json::json!({"degrees": degrees}));
    }
    match nontrivial_cyclic_codes(params, budget) {
        Ok(codes) => {
            let expected = [CyclicCode::repetition(params), CyclicCode::sum_zero(params)];
            let all_expected = codes.len() == 2 && codes.iter().all(|c| expected.contains(c));
            if all_expected {
                LemmaCheck::pass(NAME, "Z^q - 1 = (Z - 1)(1 + ... + Z^{q-1}); codes C1 and its dual")
            } else {
                LemmaCheck::fail(
                    NAME,
                    "unexpected nontrivial cyclic codes",
                    serde_json::json!({"generators": codes.iter().map(|c| c.generator().centered()).collect::<Vec<_>>()}),
                )
            }
        }
        Err(e) => LemmaCheck::with(NAME, Status::Skipped, e.to_string()),
    }
}

fn check_orbit_lengths(params: Params, budget: u64) -> LemmaCheck {
    const NAME: &str = "orbit-lengths";
    let q = params.q();
    let w_sq = if params.pow_f64(params.n()) <= budget as f64 {
        params.max_norm_sq()
    } else {
        target_radius_sq(params, DENSITY_CONSTANT)
    };
    let census = match orbit_census(params, w_sq, budget) {
        Ok(c) => c,
        Err(e) => return LemmaCheck::with(NAME, Status::Skipped, e.to_string()),
    };
    let bad: Vec<usize> = census
        .orbits
        .keys()
        .copied()
        .filter(|&l| l != 1 && l != 2 && l != 2 * q)
        .collect();
    let expected = centered_ball_count(params.n(), params.p(), w_sq);
    if !bad.is_empty() || BigUint::from(census.vectors) != expected {
        return LemmaCheck::fail(
            NAME,
            "orbit length outside {1, 2, 2q} or census does not cover the ball",
            serde_json::to_value(&census).expect("serialisable"),
        );
    }
    LemmaCheck::pass(
        NAME,
        format!("w_sq = {w_sq}: {:?} over {} vectors", census.orbits, census.vectors),
    )
}

fn check_code_invariance(params: Params, budget: u64) -> LemmaCheck {
    const NAME: &str = "code-invariance";
    const CODES: u64 = 8;
    let words = params.pow_f64(params.q());
    let work = words * CODES as f64 * params.n() as f64;
    if let Some(skip) = over_budget(NAME, work, budget) {
        return skip;
    }
    let group = GroupElement::all(params.q());
    for s in 0..CODES {
        let code = random_code_stream(params, 0, s);
        let words = code.codewords(budget).expect("within budget");
        for w in words {
            for &g in &group {
                let image = act(g, &w);
                if !code.contains(&image) {
                    return LemmaCheck::fail(
                        NAME,
                        "group image of a codeword left the code",
                        serde_json::json!({"a": code.first_row(), "word": w.coords(), "negate": g.negate, "shift": g.shift}),
                    );
                }
            }
        }
    }
    LemmaCheck::pass(NAME, format!("{CODES} codes, every codeword, whole group"))
}

fn check_moment_bound(params: Params, budget: u64) -> LemmaCheck {
    const NAME: &str = "moment-bound";
    let p = params.p();
    let w_sq = target_radius_sq(params, DENSITY_CONSTANT).min((p * p - 1) / 4);
    let bound = match moment_bound(params, w_sq) {
        Ok(b) => b,
        Err(e @ Error::NotTwoCodeRegime { .. }) => {
            return LemmaCheck::with(NAME, Status::NotApplicable, e.to_string())
        }
        Err(e) => return LemmaCheck::with(NAME, Status::Skipped, e.to_string()),
    };
    if bound.exact_expectation > bound.closed_form_bound {
        return LemmaCheck::fail(
            NAME,
            "exact expectation exceeds the closed-form bound",
            serde_json::to_value(&bound).expect("serialisable"),
        );
    }
    match moment_expectation_by_enumeration(params, w_sq, budget) {
        Ok(enumerated) if enumerated == bound.exact_expectation => LemmaCheck::pass(
            NAME,
            format!(
                "w_sq = {w_sq}: E = {} <= {} (enumeration agrees)",
                json::rational_to_f64(&bound.exact_expectation),
                json::rational_to_f64(&bound.closed_form_bound)
            ),
        ),
        Ok(enumerated) => LemmaCheck::fail(
            NAME,
            "closed-form expectation differs from enumeration",
            serde_json::json!({"w_sq": w_sq, "closed_form": bound.exact_expectation.to_string(), "enumerated": enumerated.to_string()}),
        ),
        Err(_) => LemmaCheck::pass(
            NAME,
            format!("w_sq = {w_sq}: E <= bound; enumeration cross-check over budget"),
        ),
    }
}

fn check_ball_count(params: Params, budget: u64) -> LemmaCheck {
    const NAME: &str = "ball-count";
    let p = params.p();
    let max_regime = (p * p - 1) / 4;
    let mut dims = 0;
    for dim in 1..=params.n() {
        let brute_points = (p as f64).powi(dim as i32);
        if brute_points > budget as f64 {
            break;
        }
        let cap = max_regime.min(dim as u64 * (params.half() * params.half()) as u64);
        let mut brute = vec![0u64; cap as usize + 1];
        let h = params.half();
        let mut x = vec![-h; dim];
        loop {
            let norm: u64 = x.iter().map(|&c| (c * c) as u64).sum();
            if norm <= cap {
                brute[norm as usize] += 1;
            }
            let mut k = dim;
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                if x[k] < h {
                    x[k] += 1;
                    break false;
                }
                x[k] = -h;
            };
            if done {
                break;
            }
        }
        let profile = norm_profile(dim, p, cap);
        let mut running = 0u64;
        for d_sq in 0..=cap {
            running += brute[d_sq as usize];
            let report = ball_count_report(dim, p, d_sq).expect("in regime");
            if report.count != BigUint::from(running) || profile[d_sq as usize] != BigUint::from(brute[d_sq as usize]) {
                return LemmaCheck::fail(
                    NAME,
                    "dynamic programme disagrees with brute force",
                    serde_json::json!({"n": dim, "d_sq": d_sq, "dp": report.count.to_string(), "brute": running}),
                );
            }
            let d = (d_sq as f64).sqrt();
            if d >= (dim as f64).sqrt() / 2.0 && !report.sandwich_holds() {
                return LemmaCheck::fail(
                    NAME,
                    "volume sandwich violated",
                    serde_json::to_value(&report).expect("serialisable"),
                );
            }
        }
        dims = dim;
    }
    if dims == 0 {
        return LemmaCheck::with(NAME, Status::Skipped, "p exceeds the budget");
    }
    LemmaCheck::pass(NAME, format!("dimensions 1..={dims} checked against brute force"))
}
