use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("zero polynomial has no content decomposition")]
    ZeroPolynomial,
    #[error("constant polynomial where a non-constant one is required")]
    ConstantInput,
    #[error("degree {degree} exceeds the complete-factorization cap {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },
    #[error("digit search at p = {p} exhausted its depth budget")]
    ValuationUnresolvable { p: u64 },
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("component at p = {p} is an exact root")]
    InfiniteValuation { p: u64 },
    #[error("prime quota unmet for {poly}; retry with a larger bound")]
    QuotaUnmet { poly: String },
    #[error("prime search exhausted its range")]
    ExhaustedPrimes,
    #[error("no admissible residue modulo {q}")]
    NoResidue { q: u64 },
    #[error("fresh-prime root search exceeded its scan cap")]
    LefschetzSearchExhausted,
    #[error("ledger violation: {0}")]
    LedgerViolation(String),
    #[error("no component defined at p = {p} and no ledger promise applies")]
    UnknownComponent { p: u64 },
    #[error("difference tuple {0:?} covers all residues modulo some prime")]
    NotInS(Vec<u64>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
