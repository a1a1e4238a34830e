use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A ball of squared radius `d_sq` with `4 d_sq >= p^2` no longer matches
    /// the integer-lattice count.
    #[error("radius outside the d < p/2 regime: d^2 = {d_sq}, p = {p}")]
    RegimeViolation { d_sq: u64, p: u64 },

    #[error("enumeration of {needed} items exceeds budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    /// `p mod q` is not a primitive root, so `Z^q - 1` has more than two
    /// irreducible factors over `F_p`.
    #[error("p = {p} is not primitive mod q = {q}; more than two nontrivial cyclic codes")]
    NotTwoCodeRegime { q: u64, p: u64 },

    #[error("no prime in the auxiliary window [{lo:.3}, {hi:.3}] for q = {q}")]
    NoPrimeInWindow { q: u64, lo: f64, hi: f64 },

    #[error("no admissible prime found up to {limit}")]
    NoPrimeFound { limit: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown {kind} strategy `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("dimension {n} too large for exhaustive enumeration (max {max})")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),
}
