//! Construction A lattices `A_p(C) = { x in Z^n : x mod p in C }` built from
//! double circulant codes, with exact determinants, a small-dimension
//! shortest-vector oracle and packing densities.

use std::f64::consts::LN_2;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::counting::{centered_ball_count, ln_ball_volume, DENSITY_CONSTANT};
use crate::dcode::DoubleCirculantCode;
use crate::error::{Error, Result};
use crate::json;
use crate::modp::Params;

/// Largest dimension accepted by [`sv_oracle`].
pub const MAX_ORACLE_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeBasis {
    #[serde(skip)]
    params: Params,
    #[serde(skip)]
    code: DoubleCirculantCode,
    /// Row-major; rows `[-A^T | I_q]` then `[p I_q | 0]`.
    pub basis: Vec<Vec<i64>>,
    #[serde(serialize_with = "json::big_uint")]
    pub det_abs: BigUint,
    pub mu: u64,
}

/// `[-A^T | I_q]` over `[p I_q | 0]`, with the determinant checked exactly and
/// every row checked against the code. `d_sq` is the code's minimum norm.
pub fn construction_a(code: &DoubleCirculantCode, d_sq: u64) -> Result<LatticeBasis> {
    let params = code.params();
    let (q, p) = (params.q(), params.p());
    let mut basis = Vec::with_capacity(2 * q);
    for j in 0..q {
        let mut row: Vec<i64> = (0..q).map(|i| -code.entry(i, j)).collect();
        row.extend((0..q).map(|k| i64::from(k == j)));
        basis.push(row);
    }
    for i in 0..q {
        let mut row = vec![0i64; 2 * q];
        row[i] = p as i64;
        basis.push(row);
    }
    let det_abs = determinant(&basis).abs().to_biguint().expect("nonnegative");
    let expected = BigUint::from(p).pow(q as u32);
    if det_abs != expected {
        return Err(Error::Invariant(format!(
            "|det| = {det_abs}, expected {p}^{q}"
        )));
    }
    for row in &basis {
        if !reduces_into(code, row) {
            return Err(Error::Invariant(format!("basis row {row:?} is not in the code")));
        }
    }
    Ok(LatticeBasis {
        params,
        code: code.clone(),
        basis,
        det_abs,
        mu: d_sq.min(p * p),
    })
}

fn reduces_into(code: &DoubleCirculantCode, v: &[i64]) -> bool {
    let params = code.params();
    let x = crate::modp::FpVector::from_residues(params, v).expect("length n");
    code.contains(&x)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), n, "square matrix required");
            r.iter().map(|&v| BigInt::from(v)).collect()
        })
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

impl LatticeBasis {
    pub fn params(&self) -> Params {
        self.params
    }

    pub fn code(&self) -> &DoubleCirculantCode {
        &self.code
    }

    /// `B B^T`.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        gram(&self.basis)
    }

    /// Is `v` an integer combination of the rows? Returns the coefficients.
    pub fn coefficients(&self, v: &[i64]) -> Option<Vec<i64>> {
        let q = self.params.q();
        let p = self.params.p() as i64;
        assert_eq!(v.len(), 2 * q);
        // The right half of v fixes the first q coefficients; the remaining
        // left-half residue must be a multiple of p.
        let y = &v[q..];
        let mut coeffs = y.to_vec();
        for i in 0..q {
            let partial: i64 = (0..q).map(|j| y[j] * self.basis[j][i]).sum();
            let rest = v[i] - partial;
            if rest % p != 0 {
                return None;
            }
            coeffs.push(rest / p);
        }
        Some(coeffs)
    }

    /// Row-style Hermite normal form: upper triangular, positive diagonal,
    /// entries above each pivot reduced into `[0, pivot)`.
    ///
    /// The lattice contains `p Z^n`, so every pivot is 1 or `p`: the 1s come
    /// from the reduced row echelon form of the code over `F_p`, the `p`s sit
    /// on its free columns.
    pub fn hermite_normal_form(&self) -> Vec<Vec<i64>> {
        let n = self.params.n();
        let p = self.params.p();
        let q = self.params.q();
        let mut rows: Vec<Vec<u64>> = self.basis[..q]
            .iter()
            .map(|r| r.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            let Some(found) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(rank, found);
            let inv = inverse_mod(rows[rank][col], p);
            for v in rows[rank].iter_mut() {
                *v = *v * inv % p;
            }
            for i in 0..rows.len() {
                if i != rank && rows[i][col] != 0 {
                    let f = rows[i][col];
                    for j in 0..n {
                        rows[i][j] = (rows[i][j] + (p - f) * rows[rank][j]) % p;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let mut out = Vec::with_capacity(n);
        let mut next_pivot = 0;
        for col in 0..n {
            if next_pivot < pivots.len() && pivots[next_pivot] == col {
                out.push(rows[next_pivot].iter().map(|&v| v as i64).collect());
                next_pivot += 1;
            } else {
                let mut row = vec![0i64; n];
                row[col] = p as i64;
                out.push(row);
            }
        }
        out
    }
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    crate::primes::mod_pow(a, p - 2, p)
}

pub fn gram(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|a| {
            rows.iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect()
}

/// Shortest nonzero squared norm in the lattice spanned by `rows`, if one is
/// `<= bound_sq`. Fincke-Pohst enumeration over coefficient vectors with a
/// floating Gram-Schmidt for pruning and exact integer norms at the leaves.
pub fn sv_oracle(rows: &[Vec<i64>], bound_sq: u64, budget: u64) -> Result<Option<u64>> {
    let n = rows.len();
    if n > MAX_ORACLE_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_ORACLE_DIM,
        });
    }
    // Put the longest rows first: the search then branches widely only on
    // the short Gram-Schmidt directions enumerated last.
    let mut order: Vec<&Vec<i64>> = rows.iter().collect();
    order.sort_by_key(|r| std::cmp::Reverse(r.iter().map(|v| v * v).sum::<i64>()));
    let b: Vec<Vec<f64>> = order
        .iter()
        .map(|r| r.iter().map(|&v| v as f64).collect())
        .collect();
    let dim = rows.first().map_or(0, Vec::len);
    let mut mu = vec![vec![0f64; n]; n];
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut bnorm = vec![0f64; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            let m = dot(&b[i], &bstar[j]) / bnorm[j];
            mu[i][j] = m;
            for k in 0..dim {
                v[k] -= m * bstar[j][k];
            }
        }
        bnorm[i] = dot(&v, &v);
        if bnorm[i] < 1e-9 {
            return Err(Error::Invariant("basis rows are dependent".into()));
        }
        bstar.push(v);
    }
    let mut search = Enumeration {
        rows: order.iter().map(|r| r.as_slice()).collect(),
        mu,
        bnorm,
        coeffs: vec![0; n],
        best: bound_sq.saturating_add(1),
        nodes: 0,
        budget,
    };
    search.descend(n, 0.0)?;
    Ok((search.best <= bound_sq).then_some(search.best))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Enumeration<'a> {
    rows: Vec<&'a [i64]>,
    mu: Vec<Vec<f64>>,
    bnorm: Vec<f64>,
    coeffs: Vec<i64>,
    /// Strict upper bound on the answer.
    best: u64,
    nodes: u64,
    budget: u64,
}

impl Enumeration<'_> {
    /// Chooses coefficient `level - 1` given those above it.
    fn descend(&mut self, level: usize, partial: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                needed: format!("more than {} enumeration nodes", self.budget),
                budget: self.budget,
            });
        }
        if level == 0 {
            if self.coeffs.iter().all(|&c| c == 0) {
                return Ok(());
            }
            let dim = self.rows[0].len();
            let mut norm: i64 = 0;
            for k in 0..dim {
                let v: i64 = self.coeffs.iter().zip(&self.rows).map(|(c, r)| c * r[k]).sum();
                norm += v * v;
            }
            let norm = norm as u64;
            if norm < self.best {
                self.best = norm;
            }
            return Ok(());
        }
        let k = level - 1;
        let center: f64 = -(level..self.coeffs.len())
            .map(|j| self.mu[j][k] * self.coeffs[j] as f64)
            .sum::<f64>();
        // Slack absorbs rounding in the Gram-Schmidt data.
        let limit = (self.best as f64 - 1.0) * (1.0 + 1e-9) + 1e-6;
        let room = limit - partial;
        if room < 0.0 {
            return Ok(());
        }
        let radius = (room / self.bnorm[k]).sqrt();
        let lo = (center - radius).ceil() as i64;
        let hi = (center + radius).floor() as i64;
        for c in lo..=hi {
            let off = c as f64 - center;
            let next = partial + off * off * self.bnorm[k];
            let limit = (self.best as f64 - 1.0) * (1.0 + 1e-9) + 1e-6;
            if next > limit {
                continue;
            }
            self.coeffs[k] = c;
            self.descend(k, next)?;
        }
        self.coeffs[k] = 0;
        Ok(())
    }
}

/// `zeta(n)` for `n >= 2`: partial sum plus an Euler-Maclaurin tail.
pub fn zeta(n: usize) -> f64 {
    assert!(n >= 2);
    const K: usize = 1000;
    let s = n as f64;
    let head: f64 = (1..K).rev().map(|k| (k as f64).powf(-s)).sum();
    let kf = K as f64;
    let tail = kf.powf(1.0 - s) / (s - 1.0) + 0.5 * kf.powf(-s) + s * kf.powf(-s - 1.0) / 12.0;
    head + tail
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub mu: u64,
    #[serde(serialize_with = "json::big_uint")]
    pub det_abs: BigUint,
    pub delta: f64,
    pub log2_delta: f64,
    /// `|B(d)| (1 + sqrt(n)/(2d))^{-n} / (2^n p^q)` at `d^2 = mu`; only
    /// defined when `4 mu < p^2`.
    pub delta_lb: Option<f64>,
    /// `delta / (2^{1-n} zeta(n))`.
    pub ratio_minkowski: f64,
    /// `delta / (c n 2^{-n})`.
    pub ratio_cn: f64,
}

/// `ln` of `vol S_n(sqrt(mu)/2) / det`.
pub fn ln_density(n: usize, mu: u64, det_abs: &BigUint) -> f64 {
    ln_ball_volume(n, (mu as f64).sqrt() / 2.0) - ln_big(det_abs)
}

fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().expect("finite").ln();
    }
    let shift = bits - 900;
    (v >> shift).to_f64().expect("finite").ln() + shift as f64 * LN_2
}

pub fn density(basis: &LatticeBasis) -> DensityReport {
    let params = basis.params;
    let (n, p) = (params.n(), params.p());
    let ln_delta = ln_density(n, basis.mu, &basis.det_abs);
    let delta = ln_delta.exp();
    let nf = n as f64;
    let delta_lb = (4 * basis.mu < p * p).then(|| {
        let count = centered_ball_count(n, p, basis.mu);
        let d = (basis.mu as f64).sqrt();
        (ln_big(&count) - nf * (1.0 + nf.sqrt() / (2.0 * d)).ln() - nf * LN_2
            - ln_big(&basis.det_abs))
        .exp()
    });
    let ln_minkowski = (1.0 - nf) * LN_2 + zeta(n).ln();
    let ln_cn = DENSITY_CONSTANT.ln() + nf.ln() - nf * LN_2;
    DensityReport {
        mu: basis.mu,
        det_abs: basis.det_abs.clone(),
        delta,
        log2_delta: ln_delta / LN_2,
        delta_lb,
        ratio_minkowski: (ln_delta - ln_minkowski).exp(),
        ratio_cn: (ln_delta - ln_cn).exp(),
    }
}
