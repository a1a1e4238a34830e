//! Exact lattice-point counts in balls and the first-moment bound.
//!
//! Counts are produced by dynamic programming over coordinates, indexed by the
//! exact squared norm (and, for sum-zero halves, the coordinate sum mod `p`).
//! Probabilities and bounds are exact rationals; floats only appear in volume
//! comparisons and reported ratios.

use std::f64::consts::{E, PI};
use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;
use crate::modp::Params;
use crate::primes::is_primitive;

/// `(2 - 1/e) / (2 + e^2 pi)`: the density constant reached by the argument.
pub const DENSITY_CONSTANT: f64 = (2.0 - 1.0 / E) / (2.0 + E * E * PI);

/// `1 / (2 e pi)`, the optimal choice of `t` in the type-2 estimate.
pub const TYPE2_OPTIMAL_T: f64 = 1.0 / (2.0 * E * PI);

/// `ln Gamma(n/2 + 1)`, exact up to float rounding for every integer `n >= 0`.
pub fn ln_gamma_half_plus_one(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        (2..=n / 2).map(|k| (k as f64).ln()).sum()
    } else {
        // Gamma(k + 1/2) = sqrt(pi) * prod_{j < k} (j + 1/2), with k = (n+1)/2.
        0.5 * PI.ln() + (0..n.div_ceil(2)).map(|j| (j as f64 + 0.5).ln()).sum::<f64>()
    }
}

/// `ln vol S_n`, the unit ball.
pub fn ln_unit_ball_volume(n: usize) -> f64 {
    0.5 * n as f64 * PI.ln() - ln_gamma_half_plus_one(n)
}

/// `ln vol S_n(d)`; `-inf` for `d = 0`.
pub fn ln_ball_volume(n: usize, d: f64) -> f64 {
    if d == 0.0 {
        return f64::NEG_INFINITY;
    }
    ln_unit_ball_volume(n) + n as f64 * d.ln()
}

/// `vol S_n(d) = pi^{n/2} d^n / Gamma(n/2 + 1)`, evaluated in log space.
pub fn ball_volume(n: usize, d: f64) -> f64 {
    assert!(n >= 1 && d >= 0.0);
    ln_ball_volume(n, d).exp()
}

/// The radius with `vol S_n(rho) = p^{n/2}` and its asymptotic form
/// `sqrt(p n / (2 e pi))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rho {
    pub exact: f64,
    pub approx: f64,
    pub ratio: f64,
}

pub fn rho(n: usize, p: u64) -> Rho {
    let nf = n as f64;
    let ln_exact = (0.5 * nf * (p as f64).ln() - ln_unit_ball_volume(n)) / nf;
    let exact = ln_exact.exp();
    let approx = (p as f64 * nf / (2.0 * E * PI)).sqrt();
    Rho {
        exact,
        approx,
        ratio: exact / approx,
    }
}

trait Counter: Clone + Zero + One + for<'a> AddAssign<&'a Self> + Into<BigUint> {}
impl Counter for u128 {}
impl Counter for BigUint {}

/// Whether counts of vectors in `[-h, h]^k` with squared norm at most
/// `max_sq` fit a `u128`. Such vectors lie in the box of side
/// `min(p, 2 floor(sqrt(max_sq)) + 1)`.
fn fits_u128(p: u64, k: usize, max_sq: u64) -> bool {
    let side = p.min(2 * max_sq.isqrt() + 1);
    (k as f64) * (side as f64).log2() < 126.0
}

/// `out[s]` = number of vectors in `[-h, h]^dim` with squared norm exactly `s`.
fn norm_profile_with<T: Counter>(dim: usize, h: i64, max_sq: u64) -> Vec<T> {
    let len = max_sq as usize + 1;
    let mut layer = vec![T::zero(); len];
    layer[0] = T::one();
    for _ in 0..dim {
        let mut next = vec![T::zero(); len];
        for (s, cnt) in layer.iter().enumerate() {
            if cnt.is_zero() {
                continue;
            }
            for c in 0..=h {
                let t = s + (c * c) as usize;
                if t >= len {
                    break;
                }
                next[t] += cnt;
                if c != 0 {
                    next[t] += cnt;
                }
            }
        }
        layer = next;
    }
    layer
}

/// `out[s]` = number of vectors of `F_p^dim` (centered) with squared norm
/// exactly `s`, for `s <= max_sq`.
pub fn norm_profile(dim: usize, p: u64, max_sq: u64) -> Vec<BigUint> {
    let h = ((p - 1) / 2) as i64;
    if fits_u128(p, dim, max_sq) {
        into_big(norm_profile_with::<u128>(dim, h, max_sq))
    } else {
        norm_profile_with::<BigUint>(dim, h, max_sq)
    }
}

/// Like [`norm_profile`] but restricted to vectors whose coordinate sum is
/// `0 mod p`.
pub fn sum_zero_profile(dim: usize, p: u64, max_sq: u64) -> Vec<BigUint> {
    let h = ((p - 1) / 2) as i64;
    if fits_u128(p, dim, max_sq) {
        into_big(sum_zero_profile_with::<u128>(dim, h, p, max_sq))
    } else {
        sum_zero_profile_with::<BigUint>(dim, h, p, max_sq)
    }
}

/// Tracks the integer coordinate sum rather than its residue: by
/// Cauchy-Schwarz it stays within `sqrt(dim * max_sq)`, usually far below `p`.
fn sum_zero_profile_with<T: Counter>(dim: usize, h: i64, p: u64, max_sq: u64) -> Vec<T> {
    let len = max_sq as usize + 1;
    let cmax = h.min(max_sq.isqrt() as i64);
    let smax = (dim as i64 * h).min((dim as u64 * max_sq).isqrt() as i64);
    let width = (2 * smax + 1) as usize;
    let at = |s: usize, sum: i64| s * width + (sum + smax) as usize;
    let mut layer = vec![T::zero(); len * width];
    layer[at(0, 0)] = T::one();
    for _ in 0..dim {
        let mut next = vec![T::zero(); len * width];
        for s in 0..len {
            for sum in -smax..=smax {
                let cnt = &layer[at(s, sum)];
                if cnt.is_zero() {
                    continue;
                }
                for c in -cmax..=cmax {
                    let t = s + (c * c) as usize;
                    let total = sum + c;
                    if t >= len || total.abs() > smax {
                        continue;
                    }
                    next[at(t, total)] += cnt;
                }
            }
        }
        layer = next;
    }
    let p = p as i64;
    (0..len)
        .map(|s| {
            let mut acc = T::zero();
            let first = -(smax / p) * p;
            let mut sum = first;
            while sum <= smax {
                acc += &layer[at(s, sum)];
                sum += p;
            }
            acc
        })
        .collect()
}

fn into_big(v: Vec<u128>) -> Vec<BigUint> {
    v.into_iter().map(BigUint::from).collect()
}

fn prefix_sum(profile: &[BigUint], upto: u64) -> BigUint {
    profile.iter().take(upto as usize + 1).sum()
}

/// `sum_{s + t <= w} a[s] b[t]`.
fn convolve_upto(a: &[BigUint], b: &[BigUint], w: u64) -> BigUint {
    let w = w as usize;
    let mut b_prefix = Vec::with_capacity(b.len());
    let mut acc = BigUint::zero();
    for v in b {
        acc += v;
        b_prefix.push(acc.clone());
    }
    let mut total = BigUint::zero();
    for (s, av) in a.iter().enumerate().take(w + 1) {
        if av.is_zero() {
            continue;
        }
        let t = (w - s).min(b_prefix.len() - 1);
        total += av * &b_prefix[t];
    }
    total
}

/// Number of vectors of `F_p^n` with centered squared norm at most `d_sq`,
/// with no restriction on the radius.
pub fn centered_ball_count(n: usize, p: u64, d_sq: u64) -> BigUint {
    let h = (p - 1) / 2;
    let cap = d_sq.min(n as u64 * h * h);
    prefix_sum(&norm_profile(n, p, cap), cap)
}

fn check_regime(p: u64, d_sq: u64) -> Result<()> {
    if 4 * d_sq as u128 >= (p as u128) * (p as u128) {
        return Err(Error::RegimeViolation { d_sq, p });
    }
    Ok(())
}

/// `|B_{n,p}(d)| = |Z^n cap S_n(d)|`, valid for `d < p/2`.
pub fn ball_count(n: usize, p: u64, d_sq: u64) -> Result<BigUint> {
    check_regime(p, d_sq)?;
    Ok(centered_ball_count(n, p, d_sq))
}

/// A ball count together with the unit-cube volume sandwich.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallCount {
    pub n: usize,
    pub p: u64,
    pub d_sq: u64,
    #[serde(serialize_with = "json::big_uint")]
    pub count: BigUint,
    /// `vol S_n(d - sqrt(n)/2)`, or 0 when `d < sqrt(n)/2`.
    pub vol_lo: f64,
    /// `vol S_n(d + sqrt(n)/2)`.
    pub vol_hi: f64,
}

impl BallCount {
    /// The volumes carry floating-point rounding and the bounds can be
    /// attained exactly (in one dimension, say), so each side is compared
    /// with a relative slack of `1e-9`.
    pub fn sandwich_holds(&self) -> bool {
        const SLACK: f64 = 1e-9;
        let c = self.count.to_f64().unwrap_or(f64::INFINITY);
        self.vol_lo <= c * (1.0 + SLACK) && c <= self.vol_hi * (1.0 + SLACK)
    }
}

pub fn ball_count_report(n: usize, p: u64, d_sq: u64) -> Result<BallCount> {
    let count = ball_count(n, p, d_sq)?;
    let d = (d_sq as f64).sqrt();
    let half_diag = (n as f64).sqrt() / 2.0;
    let vol_lo = if d >= half_diag {
        ball_volume(n, d - half_diag)
    } else {
        0.0
    };
    Ok(BallCount {
        n,
        p,
        d_sq,
        count,
        vol_lo,
        vol_hi: ball_volume(n, d + half_diag),
    })
}

/// Vectors `(alpha 1, beta 1)` with both halves constant inside the ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Type1Count {
    pub w_sq: u64,
    #[serde(serialize_with = "json::big_uint")]
    pub count: BigUint,
    /// `pi (w sqrt(2/n) + sqrt 2)^2`.
    pub disc_bound: f64,
    /// `w < (p - 1)/2`.
    pub in_regime: bool,
}

/// `#{(alpha, beta) centered : q (alpha^2 + beta^2) <= w_sq}`.
pub fn count_type1(params: Params, w_sq: u64) -> Type1Count {
    let h = params.half() as u64;
    let r = w_sq / params.q() as u64;
    let mut count = 0u64;
    for a in 0..=h.min(r.isqrt()) {
        let rest = r - a * a;
        let betas = 2 * rest.isqrt().min(h) + 1;
        count += if a == 0 { betas } else { 2 * betas };
    }
    let w = (w_sq as f64).sqrt();
    let disc = w * (2.0 / params.n() as f64).sqrt() + 2f64.sqrt();
    Type1Count {
        w_sq,
        count: BigUint::from(count),
        disc_bound: PI * disc * disc,
        in_regime: w_sq < h * h,
    }
}

/// Vectors whose halves both sum to `0 mod p`, inside the ball.
pub fn count_type2(params: Params, w_sq: u64) -> BigUint {
    let cap = w_sq.min(params.max_norm_sq());
    let half = sum_zero_profile(params.q(), params.p(), cap);
    convolve_upto(&half, &half, cap)
}

/// Exact and closed-form values of the first-moment bound at one radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentBound {
    pub q: usize,
    pub p: u64,
    pub w_sq: u64,
    /// Type-1 vectors in the ball, zero included.
    #[serde(serialize_with = "json::big_uint")]
    pub n1: BigUint,
    /// Type-2 vectors in the ball, zero included.
    #[serde(serialize_with = "json::big_uint")]
    pub n2: BigUint,
    #[serde(serialize_with = "json::big_uint")]
    pub ball: BigUint,
    /// `E[X'(w)] = sum_{x != 0} Pr[x in C] / l(x)`.
    #[serde(serialize_with = "json::rational")]
    pub exact_expectation: BigRational,
    /// `(N1-1)/(2p) + (N2-1) p^{1-q}/n + (|B|-1) p^{-q}/n`.
    #[serde(serialize_with = "json::rational")]
    pub closed_form_bound: BigRational,
    /// `N1 / (p/e)`; tends to at most 1 asymptotically.
    pub n1_ratio: f64,
    /// `N2 / (e^2 pi |B| / 2p)`; tends to at most 1 asymptotically.
    pub n2_ratio: f64,
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn big_to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// Requires `p mod q` primitive (two nontrivial cyclic codes) and `w < p/2`.
pub fn moment_bound(params: Params, w_sq: u64) -> Result<MomentBound> {
    let (q, p, n) = (params.q(), params.p(), params.n());
    if !is_primitive(p as i64, q as u64)? {
        return Err(Error::NotTwoCodeRegime { q: q as u64, p });
    }
    check_regime(p, w_sq)?;

    let all = norm_profile(q, p, w_sq);
    let zero_sum = sum_zero_profile(q, p, w_sq);
    let ball = convolve_upto(&all, &all, w_sq);
    let n2 = convolve_upto(&zero_sum, &zero_sum, w_sq);
    let n1 = count_type1(params, w_sq).count;

    let pb = BigUint::from(p);
    let nb = BigUint::from(n);
    let p_q = pb.pow(q as u32);
    let p_q1 = pb.pow(q as u32 - 1);
    let one = BigUint::one();

    let closed_form_bound = ratio(&n1 - &one, BigUint::from(2u32) * &pb)
        + ratio(&n2 - &one, &nb * &p_q1)
        + ratio(&ball - &one, &nb * &p_q);

    // Type 1 with beta != 0: orbit length 2, probability 1/p.
    let n1_beta_zero = count_type1(params, 0).count.clone() // (0, 0)
        + beta_zero_type1(params, w_sq);
    let t1 = ratio(&n1 - n1_beta_zero, BigUint::from(2u32) * &pb);
    // Type 2 with x_R != 0: orbit length n, probability p^{1-q}.
    let right_zero = prefix_sum(&zero_sum, w_sq);
    let t2 = ratio(&n2 - right_zero, &nb * &p_q1);
    // x_R a unit of R: orbit length n, probability p^{-q}.
    let unit: Vec<BigUint> = (0..=w_sq as usize)
        .map(|s| {
            let constant_nonzero = constant_nonzero_count(params, s as u64);
            &all[s] - &zero_sum[s] - constant_nonzero
        })
        .collect();
    let t3 = ratio(convolve_upto(&all, &unit, w_sq), &nb * &p_q);
    let exact_expectation = t1 + t2 + t3;

    let n1_ratio = big_to_f64(&n1) / (p as f64 / E);
    let n2_ratio = big_to_f64(&n2) / (E * E * PI / (2.0 * p as f64) * big_to_f64(&ball));
    Ok(MomentBound {
        q,
        p,
        w_sq,
        n1,
        n2,
        ball,
        exact_expectation,
        closed_form_bound,
        n1_ratio,
        n2_ratio,
    })
}

/// `#{alpha != 0 : q alpha^2 <= w_sq}`: type-1 vectors with a zero right half.
fn beta_zero_type1(params: Params, w_sq: u64) -> BigUint {
    let r = (w_sq / params.q() as u64).isqrt().min(params.half() as u64);
    BigUint::from(2 * r)
}

/// `#{beta != 0 : q beta^2 = s}`: nonzero constant half-vectors of norm `s`.
fn constant_nonzero_count(params: Params, s: u64) -> BigUint {
    let q = params.q() as u64;
    if s == 0 || !s.is_multiple_of(q) {
        return BigUint::zero();
    }
    let b = (s / q).isqrt();
    if b * b == s / q && b <= params.half() as u64 {
        BigUint::from(2u32)
    } else {
        BigUint::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: usize, p: u64) -> Params {
        Params::new(q, p).unwrap()
    }

    /// Histogram of squared norms over all of `[-h, h]^n`, by brute force.
    fn brute_histogram(n: usize, p: u64) -> Vec<u64> {
        let h = ((p - 1) / 2) as i64;
        let max = n * (h * h) as usize;
        let mut hist = vec![0u64; max + 1];
        let mut x = vec![-h; n];
        loop {
            hist[x.iter().map(|c| (c * c) as usize).sum::<usize>()] += 1;
            let mut k = n;
            loop {
                if k == 0 {
                    return hist;
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

    #[test]
    fn volume_examples() {
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-14);
        assert!((ball_volume(1, 3.0) - 6.0).abs() < 1e-13);
        assert!((ball_volume(6, 1.0) - PI.powi(3) / 6.0).abs() < 1e-13);
        assert!((ball_volume(3, 2.0) - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        assert_eq!(ball_volume(4, 0.0), 0.0);
    }

    #[test]
    fn rho_examples() {
        for p in [5u64, 71, 1009] {
            let r = rho(2, p);
            assert!((r.exact - (p as f64 / PI).sqrt()).abs() < 1e-12 * r.exact);
        }
        let r6 = rho(6, 71);
        let closed = (71f64.powi(3) * 6.0 / PI.powi(3)).powf(1.0 / 6.0);
        assert!((r6.exact - closed).abs() < 1e-12 * closed);
        assert!((ball_volume(6, r6.exact) - 71f64.powi(3)).abs() < 1e-8 * 71f64.powi(3));
        // Approximation improves with n.
        let small = (rho(6, 71).ratio - 1.0).abs();
        let large = (rho(200, 71).ratio - 1.0).abs();
        assert!(large < small);
    }

    #[test]
    fn ball_count_examples() {
        assert_eq!(ball_count(2, 5, 1).unwrap(), BigUint::from(5u32));
        assert_eq!(ball_count(1, 7, 4).unwrap(), BigUint::from(5u32));
        let hist = brute_histogram(6, 5);
        let v: u64 = hist[..=4].iter().sum();
        assert_eq!(ball_count(6, 5, 4).unwrap(), BigUint::from(v));
        assert!(matches!(ball_count(6, 5, 7), Err(Error::RegimeViolation { .. })));
        assert_eq!(centered_ball_count(6, 5, 100), BigUint::from(15625u32));
    }

    #[test]
    fn dp_matches_brute_force() {
        for p in [3u64, 5, 7] {
            for n in 1..=6 {
                let hist = brute_histogram(n, p);
                let prof = norm_profile(n, p, hist.len() as u64 - 1);
                for (s, &c) in hist.iter().enumerate() {
                    assert_eq!(prof[s], BigUint::from(c), "n={n} p={p} s={s}");
                }
            }
        }
    }

    #[test]
    fn big_and_small_accumulators_agree() {
        let a = norm_profile_with::<u128>(7, 6, 60);
        let b = norm_profile_with::<BigUint>(7, 6, 60);
        assert_eq!(into_big(a), b);
    }

    #[test]
    fn sandwich_small() {
        for n in 1..=4 {
            for d_sq in 1..12u64 {
                let r = ball_count_report(n, 7, d_sq).unwrap();
                if (d_sq as f64).sqrt() >= (n as f64).sqrt() / 2.0 {
                    assert!(r.sandwich_holds(), "{r:?}");
                }
            }
        }
    }

    #[test]
    fn type1_examples() {
        let pr = params(3, 5);
        assert_eq!(count_type1(pr, 12).count, BigUint::from(13u32));
        assert_eq!(count_type1(pr, 0).count, BigUint::one());
        // Whole space: p^2 pairs.
        assert_eq!(count_type1(pr, 1000).count, BigUint::from(25u32));
        let t = count_type1(params(5, 233), 4000);
        assert!(t.count.to_f64().unwrap() <= t.disc_bound);
    }

    fn brute_type2(q: usize, p: u64, w: u64) -> u64 {
        let n = 2 * q;
        let h = ((p - 1) / 2) as i64;
        let mut x = vec![-h; n];
        let mut count = 0;
        loop {
            let norm: u64 = x.iter().map(|c| (c * c) as u64).sum();
            let l: i64 = x[..q].iter().sum();
            let r: i64 = x[q..].iter().sum();
            if norm <= w && l.rem_euclid(p as i64) == 0 && r.rem_euclid(p as i64) == 0 {
                count += 1;
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return count;
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

    #[test]
    fn type2_examples() {
        let pr = params(3, 5);
        assert_eq!(count_type2(pr, 0), BigUint::one());
        assert_eq!(count_type2(pr, 50), BigUint::from(625u32));
        for w in 0..=24 {
            assert_eq!(count_type2(pr, w), BigUint::from(brute_type2(3, 5, w)), "w={w}");
        }
        for w in [0, 3, 7, 12, 20] {
            assert_eq!(count_type2(params(3, 7), w), BigUint::from(brute_type2(3, 7, w)));
        }
    }

    #[test]
    fn moment_bound_trivial_cases() {
        let m = moment_bound(params(3, 5), 0).unwrap();
        assert!(m.exact_expectation.is_zero());
        assert!(m.closed_form_bound.is_zero());
        assert!(matches!(
            moment_bound(params(3, 7), 2),
            Err(Error::NotTwoCodeRegime { .. })
        ));
        assert!(matches!(
            moment_bound(params(3, 5), 7),
            Err(Error::RegimeViolation { .. })
        ));
        for w in 0..=300 {
            if 4 * w < 71 * 71 {
                let m = moment_bound(params(3, 71), w).unwrap();
                assert!(m.exact_expectation <= m.closed_form_bound, "w={w}");
            }
        }
    }

    #[test]
    fn constants() {
        assert!((DENSITY_CONSTANT - 0.0647).abs() < 5e-4);
        assert!((TYPE2_OPTIMAL_T * 2.0 * E * PI - 1.0).abs() < 1e-15);
    }
}
