//! Shared fixtures for the benchmark targets.

use num_bigint::BigInt;
use rtau_core::{IntPoly, RTauElem};

/// A mix of polynomials hitting the cheap certificates and the
/// complete factorization path.
pub fn irreducibility_batch() -> Vec<IntPoly> {
    vec![
        IntPoly::from_i64(&[-2, 0, 0, 1]),          // Eisenstein
        IntPoly::from_i64(&[1, 1, 0, 0, 1]),        // irreducible mod 2
        IntPoly::from_i64(&[1, 0, 0, 0, 1]),        // needs recombination
        IntPoly::from_i64(&[4, 0, 0, 0, 1]),        // splits into two quadratics
        IntPoly::from_i64(&[9, -3, 7, 2, 5]),       // generic quartic
        IntPoly::from_i64(&[-1, -1, 0, 0, 0, 0, 1]) // generic sextic
    ]
}

pub fn twin_representative(n: usize) -> RTauElem {
    let mut coeffs = vec![0i64; n + 1];
    coeffs[0] = -2;
    coeffs[n] = 1;
    RTauElem::new(IntPoly::from_i64(&coeffs), BigInt::from(2)).expect("canonical")
}
