//! Exact-arithmetic machinery for the discretely ordered subrings of
//! Q[x] cut out by a profinite substitution parameter: an element f of
//! Q[x] belongs to the ring when f(tau_p) is a p-adic integer at every
//! prime p.
//!
//! The crate models finite approximations of the parameter (exact
//! integer coordinates or residue towers of growing precision), decides
//! membership, unit and primality queries against such an
//! approximation, and runs the stage-wise builders that realize rings
//! with a sparse prime set or with cofinal prescribed prime
//! progressions.

pub mod construct;
pub mod error;
pub mod padic;
pub mod poly;
pub mod primes;
pub mod tau;

pub use construct::{
    build_justprimes, build_main, build_sparse, check_s, iota, lemma_largeprimes, lemma_manyk,
    sf_primes, DiffTuple, KProgression, LargePrimesWitness,
};
pub use error::{Error, Result};
pub use padic::{crt_solve, is_unit_value, refine, valuation, Congruence, PadicComponent, Valuation};
pub use poly::{
    enumerate_i, first_members, irreducible_over_z, irreducible_over_z_capped, IntPoly,
    IrreducibleEnum, RTauElem,
};
pub use tau::{
    r0_prime_oracle, BuilderKind, Certainty, Certificate, LedgerEntry, PidReport,
    ProgressionCertificate, TauState,
};
