//! The ring `R = F_p[Z]/(Z^q - 1)` and its ideals, the cyclic codes of
//! length `q`.
//!
//! A cyclic code is identified by its monic generator `g | Z^q - 1`; the ideal
//! generated by an arbitrary `u(Z)` is the code generated by
//! `gcd(u(Z), Z^q - 1)`. The factorisation of `Z^q - 1` is driven by the
//! cyclotomic cosets of `p` acting on `Z/qZ`: every factor of
//! `1 + Z + ... + Z^{q-1}` has degree `ord_q(p)`.

use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;
use crate::modp::{centered_lift, Params};
use crate::primes::{mod_pow, multiplicative_order};

/// Dense polynomial over `F_p`, residues in `[0, p)`, lowest degree first,
/// no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn zero(p: u64) -> Poly {
        Poly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Poly {
        Poly { p, coeffs: vec![1] }
    }

    /// `c Z^k`.
    pub fn monomial(p: u64, k: usize, c: u64) -> Poly {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c % p;
        Poly::from_residues(p, coeffs)
    }

    pub fn from_residues(p: u64, mut coeffs: Vec<u64>) -> Poly {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut out = Poly { p, coeffs };
        out.trim();
        out
    }

    pub fn from_integers(p: u64, coeffs: &[i64]) -> Poly {
        let pi = p as i64;
        Poly::from_residues(p, coeffs.iter().map(|&c| c.rem_euclid(pi) as u64).collect())
    }

    /// `Z^q - 1`.
    pub fn x_pow_minus_one(p: u64, q: usize) -> Poly {
        let mut coeffs = vec![0; q + 1];
        coeffs[0] = p - 1;
        coeffs[q] = 1;
        Poly { p, coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// Coefficients as centered integers.
    pub fn centered(&self) -> Vec<i64> {
        self.coeffs.iter().map(|&c| centered_lift(c as i64, self.p)).collect()
    }

    fn lead(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    fn inv(&self, a: u64) -> u64 {
        mod_pow(a, self.p - 2, self.p)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let li = self.inv(self.lead());
        self.scale(li)
    }

    pub fn scale(&self, k: u64) -> Poly {
        let p = self.p;
        Poly::from_residues(p, self.coeffs.iter().map(|&c| c * (k % p) % p).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let p = self.p;
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_residues(
            p,
            (0..len).map(|i| (self.coeff(i) + other.coeff(i)) % p).collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let p = self.p;
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_residues(
            p,
            (0..len).map(|i| (self.coeff(i) + p - other.coeff(i)) % p).collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Poly::from_residues(self.p, acc.into_iter().map(|c| c as u64).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let p = self.p;
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Poly::zero(p), Poly::zero(p));
        };
        if nd < dd {
            return (Poly::zero(p), self.clone());
        }
        let li = self.inv(divisor.lead());
        let mut quot = vec![0u64; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = rem[k + dd] * li % p;
            quot[k] = c;
            if c != 0 {
                for (j, &d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = (rem[k + j] + p - c * d % p) % p;
                }
            }
        }
        rem.truncate(dd);
        (Poly::from_residues(p, quot), Poly::from_residues(p, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mul_mod(&self, other: &Poly, modulus: &Poly) -> Poly {
        self.mul(other).rem(modulus)
    }

    pub fn pow_mod(&self, exp: &BigUint, modulus: &Poly) -> Poly {
        let mut acc = Poly::one(self.p).rem(modulus);
        let base = self.rem(modulus);
        for i in (0..exp.bits()).rev() {
            acc = acc.mul_mod(&acc, modulus);
            if exp.bit(i) {
                acc = acc.mul_mod(&base, modulus);
            }
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = centered_lift(c as i64, self.p);
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            write!(f, "{sign}")?;
            match (k, mag) {
                (0, m) => write!(f, "{m}")?,
                (_, 1) => {}
                (_, m) => write!(f, "{m}")?,
            }
            match k {
                0 => {}
                1 => write!(f, "Z")?,
                _ => write!(f, "Z^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Rabin's test: `f` of degree `d` is irreducible iff `Z^{p^d} = Z mod f` and
/// `gcd(Z^{p^{d/r}} - Z, f) = 1` for every prime `r | d`.
pub fn is_irreducible(f: &Poly) -> bool {
    let Some(d) = f.degree() else { return false };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let p = f.p();
    let f = f.monic();
    let z = Poly::monomial(p, 1, 1);
    let pb = BigUint::from(p);
    // frob[k] = Z^{p^k} mod f
    let mut frob = vec![z.rem(&f)];
    for k in 1..=d {
        let next = frob[k - 1].pow_mod(&pb, &f);
        frob.push(next);
    }
    if frob[d] != z.rem(&f) {
        return false;
    }
    crate::primes::prime_factors(d as u64).into_iter().all(|r| {
        let h = frob[d / r as usize].sub(&z);
        h.gcd(&f).degree() == Some(0)
    })
}

/// Orbits of `k -> p k` on `Z/qZ` (cyclotomic cosets), each sorted, ordered
/// by least element.
pub fn cyclotomic_cosets(params: Params) -> Vec<Vec<usize>> {
    let q = params.q();
    let pm = (params.p() % q as u64) as usize;
    let mut seen = vec![false; q];
    let mut out = Vec::new();
    for start in 0..q {
        if seen[start] {
            continue;
        }
        let mut coset = Vec::new();
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            coset.push(k);
            k = k * pm % q;
        }
        coset.sort_unstable();
        out.push(coset);
    }
    out
}

/// Splits a squarefree product of irreducibles that all have degree `m`
/// (Cantor-Zassenhaus, odd `p`).
fn equal_degree_split(f: &Poly, m: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    let d = f.degree().expect("nonzero");
    if d == m {
        out.push(f.monic());
        return;
    }
    let p = f.p();
    let exp = (BigUint::from(p).pow(m as u32) - 1u32) / 2u32;
    loop {
        let a = Poly::from_residues(p, (0..d).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut g = a.gcd(f);
        if g.degree() == Some(0) {
            let b = a.pow_mod(&exp, f).sub(&Poly::one(p));
            g = b.gcd(f);
        }
        if let Some(gd) = g.degree() {
            if gd > 0 && gd < d {
                let h = f.div_rem(&g).0;
                equal_degree_split(&g, m, rng, out);
                equal_degree_split(&h, m, rng, out);
                return;
            }
        }
    }
}

/// Monic irreducible factors of `Z^q - 1` over `F_p`, sorted by degree and
/// then coefficients. `Z - 1` always comes first.
pub fn irreducible_factors(params: Params) -> Vec<Poly> {
    let p = params.p();
    let q = params.q();
    let order = multiplicative_order(p % q as u64, q as u64).expect("p != q") as usize;
    let cyclotomic = Poly::from_residues(p, vec![1; q]);
    let mut factors = vec![Poly::from_residues(p, vec![p - 1, 1])];
    if order == q - 1 {
        factors.push(cyclotomic);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(p ^ ((q as u64) << 32));
        let mut rest = Vec::new();
        equal_degree_split(&cyclotomic, order, &mut rng, &mut rest);
        rest.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
        factors.extend(rest);
    }
    factors
}

/// An element of `F_p[Z]/(Z^q - 1)` stored as `q` centered coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    params: Params,
    coeffs: Vec<i64>,
}

impl RingElement {
    /// Reduces arbitrary integers mod `p`; `values.len()` must be `q`.
    pub fn new(params: Params, values: &[i64]) -> Result<Self> {
        if values.len() != params.q() {
            return Err(Error::InvalidParams(format!(
                "ring elements have {} coefficients, got {}",
                params.q(),
                values.len()
            )));
        }
        Ok(RingElement {
            params,
            coeffs: values.iter().map(|&v| params.lift(v)).collect(),
        })
    }

    pub fn zero(params: Params) -> Self {
        RingElement {
            params,
            coeffs: vec![0; params.q()],
        }
    }

    pub fn one(params: Params) -> Self {
        Self::monomial(params, 0)
    }

    /// `Z^k`.
    pub fn monomial(params: Params, k: usize) -> Self {
        let mut coeffs = vec![0; params.q()];
        coeffs[k % params.q()] = 1;
        RingElement { params, coeffs }
    }

    /// Reduction of a polynomial modulo `Z^q - 1`.
    pub fn from_poly(params: Params, poly: &Poly) -> Self {
        let q = params.q();
        let mut coeffs = vec![0i64; q];
        for (k, &c) in poly.coeffs().iter().enumerate() {
            coeffs[k % q] += c as i64;
        }
        RingElement {
            params,
            coeffs: coeffs.into_iter().map(|c| params.lift(c)).collect(),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_integers(self.params.p(), &self.coeffs)
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        assert_eq!(self.params, other.params);
        RingElement {
            params: self.params,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| self.params.lift(a + b))
                .collect(),
        }
    }

    pub fn scale(&self, k: i64) -> RingElement {
        RingElement {
            params: self.params,
            coeffs: self.coeffs.iter().map(|&c| self.params.lift(c * k)).collect(),
        }
    }

    /// Multiplication by `Z`: a right cyclic shift of the coefficients.
    pub fn shift(&self) -> RingElement {
        let mut coeffs = self.coeffs.clone();
        coeffs.rotate_right(1);
        RingElement {
            params: self.params,
            coeffs,
        }
    }

    /// `u(Z) v(Z) mod (Z^q - 1, p)`.
    pub fn ring_mul(&self, other: &RingElement) -> RingElement {
        assert_eq!(self.params, other.params);
        let q = self.params.q();
        let p = self.params.p() as i64;
        let mut acc = vec![0i64; q];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = (i + j) % q;
                acc[k] = (acc[k] + a * b) % p;
            }
        }
        RingElement {
            params: self.params,
            coeffs: acc.into_iter().map(|c| self.params.lift(c)).collect(),
        }
    }
}

/// The ideal of `R` generated by a monic divisor of `Z^q - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CyclicCode {
    #[serde(skip)]
    params: Params,
    /// Generator coefficients, lowest degree first, centered.
    #[serde(rename = "generator")]
    generator_centered: Vec<i64>,
    #[serde(skip)]
    generator: Poly,
    dimension: usize,
    #[serde(serialize_with = "json::big_uint")]
    cardinality: BigUint,
}

impl CyclicCode {
    /// Code with generator `g`; `g` is normalised to monic and must divide
    /// `Z^q - 1`.
    pub fn from_generator(params: Params, g: &Poly) -> Result<Self> {
        if g.is_zero() {
            return Err(Error::Domain("zero generator".into()));
        }
        let g = g.monic();
        let modulus = Poly::x_pow_minus_one(params.p(), params.q());
        if !g.divides(&modulus) {
            return Err(Error::Domain(format!("{g} does not divide Z^{} - 1", params.q())));
        }
        let dimension = params.q() - g.degree().expect("nonzero");
        Ok(CyclicCode {
            params,
            generator_centered: g.centered(),
            generator: g,
            dimension,
            cardinality: BigUint::from(params.p()).pow(dimension as u32),
        })
    }

    /// `C_1`: the repetition code, generator `1 + Z + ... + Z^{q-1}`.
    pub fn repetition(params: Params) -> Self {
        Self::from_generator(params, &Poly::from_residues(params.p(), vec![1; params.q()]))
            .expect("divides Z^q - 1")
    }

    /// `C_1^perp`: the coordinate-sum-zero code, generator `Z - 1`.
    pub fn sum_zero(params: Params) -> Self {
        Self::from_generator(params, &Poly::from_residues(params.p(), vec![params.p() - 1, 1]))
            .expect("divides Z^q - 1")
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn generator(&self) -> &Poly {
        &self.generator
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cardinality(&self) -> &BigUint {
        &self.cardinality
    }

    pub fn is_zero_code(&self) -> bool {
        self.dimension == 0
    }

    pub fn is_whole_space(&self) -> bool {
        self.dimension == self.params.q()
    }

    pub fn contains(&self, x: &RingElement) -> bool {
        assert_eq!(self.params, x.params);
        self.generator.divides(&x.to_poly())
    }

    /// Membership for raw centered coefficients.
    pub fn contains_coeffs(&self, coeffs: &[i64]) -> bool {
        self.generator.divides(&Poly::from_integers(self.params.p(), coeffs))
    }

    /// Every codeword `m(Z) g(Z)`, `deg m < dimension`, in odometer order of
    /// the message residues. Fails if there are more than `budget`.
    pub fn elements(&self, budget: u64) -> Result<Vec<RingElement>> {
        if self.cardinality > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                needed: self.cardinality.to_string(),
                budget,
            });
        }
        let p = self.params.p();
        let k = self.dimension;
        let total = p.pow(k as u32);
        let mut msg = vec![0u64; k];
        let mut out = Vec::with_capacity(total as usize);
        for _ in 0..total {
            let m = Poly::from_residues(p, msg.clone());
            out.push(RingElement::from_poly(self.params, &m.mul(&self.generator)));
            for digit in msg.iter_mut() {
                *digit += 1;
                if *digit < p {
                    break;
                }
                *digit = 0;
            }
        }
        Ok(out)
    }
}

/// `C(u)`: the ideal generated by `u(Z)`, with generator `gcd(u, Z^q - 1)`.
pub fn cyclic_code_of(u: &RingElement) -> CyclicCode {
    let params = u.params();
    let modulus = Poly::x_pow_minus_one(params.p(), params.q());
    let g = u.to_poly().gcd(&modulus);
    CyclicCode::from_generator(params, &g).expect("gcd divides the modulus")
}

/// Every cyclic code other than `{0}` and `F_p^q`, one per proper nontrivial
/// product of irreducible factors of `Z^q - 1`.
///
/// When `p mod q` is primitive this is exactly `[C_1, C_1^perp]`.
pub fn nontrivial_cyclic_codes(params: Params, max_codes: u64) -> Result<Vec<CyclicCode>> {
    let factors = irreducible_factors(params);
    let k = factors.len();
    let count = if k >= 64 { u64::MAX } else { (1u64 << k) - 2 };
    if count > max_codes {
        return Err(Error::BudgetExceeded {
            needed: if k >= 64 { format!("2^{k} - 2") } else { count.to_string() },
            budget: max_codes,
        });
    }
    let mut codes = Vec::with_capacity(count as usize);
    for mask in 1..(1u64 << k) - 1 {
        let g = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(Poly::one(params.p()), |acc, (_, f)| acc.mul(f));
        codes.push(CyclicCode::from_generator(params, &g)?);
    }
    // Largest generators (smallest codes) first.
    codes.sort_by(|a, b| {
        a.dimension
            .cmp(&b.dimension)
            .then_with(|| a.generator.coeffs().cmp(b.generator.coeffs()))
    });
    Ok(codes)
}

/// Whether `Z^q - 1 = (Z - 1)(1 + ... + Z^{q-1})` with the second factor
/// irreducible, decided by Rabin's test (no coset theory involved).
pub fn has_two_code_structure(params: Params) -> bool {
    let cyclotomic = Poly::from_residues(params.p(), vec![1; params.q()]);
    is_irreducible(&cyclotomic)
}
