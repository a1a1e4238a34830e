//! Centered arithmetic modulo an odd prime and the norm on `F_p^n`.
//!
//! Elements of `F_p` are stored as their centered integer representatives in
//! `[-(p-1)/2, (p-1)/2]`; norms are exact integer squares.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::is_prime;

/// Largest alphabet accepted. Keeps every squared norm inside `u64`.
pub const MAX_P: u64 = 1 << 31;

/// The length parameter `q`, the alphabet `p` and `n = 2q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Params {
    q: usize,
    p: u64,
}

impl Params {
    pub fn new(q: usize, p: u64) -> Result<Self> {
        if q < 3 || !is_prime(q as u64) {
            return Err(Error::InvalidParams(format!("q = {q} must be an odd prime")));
        }
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} must be an odd prime")));
        }
        if p == q as u64 {
            return Err(Error::InvalidParams(format!("p and q must differ (both {p})")));
        }
        if p >= MAX_P {
            return Err(Error::InvalidParams(format!("p = {p} exceeds {MAX_P}")));
        }
        let half = (p - 1) / 2;
        if half
            .checked_mul(half)
            .and_then(|h2| h2.checked_mul(2 * q as u64))
            .is_none()
        {
            return Err(Error::InvalidParams(format!(
                "squared norms overflow for q = {q}, p = {p}"
            )));
        }
        Ok(Params { q, p })
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        2 * self.q
    }

    /// `(p - 1) / 2`, the largest centered representative.
    #[inline]
    pub fn half(&self) -> i64 {
        ((self.p - 1) / 2) as i64
    }

    /// Largest possible squared norm of a vector in `F_p^n`.
    pub fn max_norm_sq(&self) -> u64 {
        let h = self.half() as u64;
        self.n() as u64 * h * h
    }

    /// `p^k` as a float; only for budget estimates.
    pub(crate) fn pow_f64(&self, k: usize) -> f64 {
        (self.p as f64).powi(k as i32)
    }

    #[inline]
    pub fn lift(&self, z: i64) -> i64 {
        centered_lift(z, self.p)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q={}, p={}, n={})", self.q, self.p, self.n())
    }
}

/// The representative of `z mod p` in `[-(p-1)/2, (p-1)/2]`. `p` must be odd.
#[inline]
pub fn centered_lift(z: i64, p: u64) -> i64 {
    debug_assert!(p % 2 == 1);
    let p = p as i64;
    let r = z.rem_euclid(p);
    if r > p / 2 {
        r - p
    } else {
        r
    }
}

/// Squared norm of a slice of centered coordinates.
#[inline]
pub fn norm_sq_of(coords: &[i64]) -> u64 {
    coords.iter().map(|&c| (c * c) as u64).sum()
}

/// A vector of `F_p^n` held in centered coordinates together with its squared
/// norm.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpVector {
    params: Params,
    coords: Vec<i64>,
    norm_sq: u64,
}

impl FpVector {
    pub fn zero(params: Params) -> Self {
        FpVector {
            params,
            coords: vec![0; params.n()],
            norm_sq: 0,
        }
    }

    /// Builds a vector from arbitrary integers, reducing each mod `p`.
    pub fn from_residues(params: Params, values: &[i64]) -> Result<Self> {
        if values.len() != params.n() {
            return Err(Error::InvalidParams(format!(
                "expected {} coordinates, got {}",
                params.n(),
                values.len()
            )));
        }
        let coords: Vec<i64> = values.iter().map(|&z| params.lift(z)).collect();
        Ok(Self::from_centered_unchecked(params, coords))
    }

    /// Builds a vector from coordinates that must already be centered.
    pub fn from_centered(params: Params, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != params.n() {
            return Err(Error::InvalidParams(format!(
                "expected {} coordinates, got {}",
                params.n(),
                coords.len()
            )));
        }
        let h = params.half();
        if let Some(c) = coords.iter().find(|c| c.abs() > h) {
            return Err(Error::InvalidParams(format!(
                "coordinate {c} outside [-{h}, {h}]"
            )));
        }
        Ok(Self::from_centered_unchecked(params, coords))
    }

    pub(crate) fn from_centered_unchecked(params: Params, coords: Vec<i64>) -> Self {
        debug_assert!(coords.len() == params.n());
        let norm_sq = norm_sq_of(&coords);
        FpVector {
            params,
            coords,
            norm_sq,
        }
    }

    /// Concatenates two halves `(x_L, x_R)` given as centered coordinates.
    pub fn from_halves(params: Params, left: &[i64], right: &[i64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(params.n());
        coords.extend_from_slice(left);
        coords.extend_from_slice(right);
        Self::from_centered(params, coords)
    }

    #[inline]
    pub fn params(&self) -> Params {
        self.params
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    #[inline]
    pub fn norm_sq(&self) -> u64 {
        self.norm_sq
    }

    /// `x_L`, the first `q` coordinates.
    #[inline]
    pub fn left(&self) -> &[i64] {
        &self.coords[..self.params.q()]
    }

    /// `x_R`, the last `q` coordinates.
    #[inline]
    pub fn right(&self) -> &[i64] {
        &self.coords[self.params.q()..]
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sq == 0
    }

    fn check_same(&self, other: &FpVector) {
        assert_eq!(
            self.params, other.params,
            "FpVector operands built over different parameters"
        );
    }

    /// Component-wise sum. Panics if the operands use different parameters.
    pub fn add(&self, other: &FpVector) -> FpVector {
        self.check_same(other);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| self.params.lift(a + b))
            .collect();
        Self::from_centered_unchecked(self.params, coords)
    }

    pub fn neg(&self) -> FpVector {
        // Centered ranges are symmetric, so negation needs no re-lift.
        let coords = self.coords.iter().map(|&c| -c).collect();
        FpVector {
            params: self.params,
            coords,
            norm_sq: self.norm_sq,
        }
    }

    pub fn scale(&self, k: i64) -> FpVector {
        let k = self.params.lift(k);
        let coords = self
            .coords
            .iter()
            .map(|&c| self.params.lift(c * k))
            .collect();
        Self::from_centered_unchecked(self.params, coords)
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: usize, p: u64) -> Params {
        Params::new(q, p).unwrap()
    }

    #[test]
    fn lift_examples() {
        assert_eq!(centered_lift(3, 5), -2);
        assert_eq!(centered_lift(0, 7), 0);
        assert_eq!(centered_lift(6, 13), 6);
        assert_eq!(centered_lift(-4, 5), 1);
    }

    #[test]
    fn lift_is_bijective_for_small_primes() {
        for p in (3..=101u64).filter(|&p| is_prime(p)) {
            let h = ((p - 1) / 2) as i64;
            let mut seen = vec![false; p as usize];
            for z in 0..p as i64 {
                let c = centered_lift(z, p);
                assert!(c.abs() <= h);
                assert_eq!((c - z).rem_euclid(p as i64), 0);
                let slot = (c + h) as usize;
                assert!(!seen[slot], "p={p} z={z}");
                seen[slot] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(3, 5).is_ok());
        assert!(Params::new(3, 3).is_err());
        assert!(Params::new(4, 5).is_err());
        assert!(Params::new(3, 9).is_err());
        assert!(Params::new(3, 2).is_err());
        assert!(Params::new(2, 5).is_err());
        assert_eq!(params(5, 11).n(), 10);
    }

    #[test]
    fn norm_examples() {
        let p3 = params(3, 7);
        assert_eq!(FpVector::zero(p3).norm_sq(), 0);
        let x = FpVector::from_residues(p3, &[2, 3, 3, 2, 0, 1]).unwrap();
        assert_eq!(x.norm_sq(), 27);
        let p5 = params(3, 5);
        let y = FpVector::from_residues(p5, &[1, 4, 0, 0, 0, 0]).unwrap();
        assert_eq!(y.coords()[..2], [1, -1]);
        assert_eq!(y.norm_sq(), 2);
    }

    #[test]
    fn arithmetic() {
        let pr = params(3, 5);
        let x = FpVector::from_residues(pr, &[1, 2, 3, 4, 0, 2]).unwrap();
        assert!(x.add(&x.neg()).is_zero());
        assert_eq!(x.scale(1), x);
        let two = FpVector::from_residues(pr, &[2, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(two.scale(-2).coords()[0], 1);
        assert!(x.scale(0).is_zero());
        assert!(FpVector::from_centered(pr, vec![3, 0, 0, 0, 0, 0]).is_err());
        assert!(FpVector::from_residues(pr, &[0; 5]).is_err());
    }

    #[test]
    #[should_panic(expected = "different parameters")]
    fn mismatched_params_panic() {
        let a = FpVector::zero(params(3, 5));
        let b = FpVector::zero(params(3, 7));
        let _ = a.add(&b);
    }

    #[test]
    fn norm_bounded_by_max() {
        let pr = params(3, 7);
        let x = FpVector::from_residues(pr, &[3, 4, 3, 4, 3, 4]).unwrap();
        assert_eq!(x.norm_sq(), pr.max_norm_sq());
    }
}
