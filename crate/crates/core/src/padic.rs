//! Finite-precision p-adic coordinates.
//!
//! A coordinate is either an exact integer or a residue known modulo
//! p^m. Refinement only ever extends a residue tower: the new residue
//! agrees with the old one modulo the old p^m, so anything decided at
//! a finite stage stays decided.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::primes::valuation_int;

/// Backtracking budget for one refinement call: how many extra digits
/// deep the search may go past the entry precision.
pub const REFINE_DEPTH_CAP: u32 = 64;

/// Total node budget for one refinement search.
const REFINE_NODE_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// The coordinate is a known integer.
    Exact(BigInt),
    /// The coordinate is known modulo p^precision.
    Approx { precision: u32, residue: BigInt },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicComponent {
    p: u64,
    mode: Mode,
}

impl PadicComponent {
    pub fn exact(p: u64, value: BigInt) -> Self {
        PadicComponent {
            p,
            mode: Mode::Exact(value),
        }
    }

    pub fn approx(p: u64, precision: u32, residue: BigInt) -> Self {
        assert!(precision >= 1, "precision must be at least 1");
        let modulus = BigInt::from(p).pow(precision);
        assert!(
            !residue.is_negative() && residue < modulus,
            "residue out of range"
        );
        PadicComponent {
            p,
            mode: Mode::Approx { precision, residue },
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, Mode::Exact(_))
    }

    pub fn precision(&self) -> Option<u32> {
        match &self.mode {
            Mode::Exact(_) => None,
            Mode::Approx { precision, .. } => Some(*precision),
        }
    }

    /// The residue of the coordinate modulo p.
    pub fn residue_mod_p(&self) -> u64 {
        let p = BigInt::from(self.p);
        let r = match &self.mode {
            Mode::Exact(v) => v.mod_floor(&p),
            Mode::Approx { residue, .. } => residue.mod_floor(&p),
        };
        u64::try_from(r).expect("residue below a u64 prime")
    }

    /// Whether the coordinate is a unit in Z_p, decidable at precision 1.
    pub fn is_unit(&self) -> bool {
        self.residue_mod_p() != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Determined(u32),
    Infinite,
    NeedMorePrecision(u32),
}

impl Valuation {
    pub fn determined(self) -> Option<u32> {
        match self {
            Valuation::Determined(e) => Some(e),
            _ => None,
        }
    }
}

/// v_p(g(tau_p)) as far as the component decides it. For a residue of
/// precision m the answer is determined exactly when g(residue) is
/// nonzero modulo p^m.
pub fn valuation(g: &IntPoly, c: &PadicComponent) -> Valuation {
    match &c.mode {
        Mode::Exact(v) => {
            let value = g.eval(v);
            match valuation_int(&value, c.p) {
                None => Valuation::Infinite,
                Some(e) => Valuation::Determined(e),
            }
        }
        Mode::Approx { precision, residue } => {
            let modulus = BigInt::from(c.p).pow(*precision);
            let value = g.eval_mod(residue, &modulus);
            if value.is_zero() {
                Valuation::NeedMorePrecision(precision + 1)
            } else {
                Valuation::Determined(valuation_int(&value, c.p).expect("nonzero value"))
            }
        }
    }
}

/// g(tau_p) is a unit in Z_p; decidable at precision 1.
pub fn is_unit_value(g: &IntPoly, c: &PadicComponent) -> bool {
    matches!(valuation(g, c), Valuation::Determined(0))
}

/// Extends an approximate coordinate to precision >= `target` while
/// giving every polynomial in `avoid` a determined (finite) valuation.
///
/// Digit policy: at each extension step, digits that newly determine
/// some still-open polynomial are tried first (smallest first), then
/// the remaining digits ascending; dead ends backtrack. The result is
/// deterministic.
pub fn refine(c: &PadicComponent, avoid: &[&IntPoly], target: u32) -> Result<PadicComponent> {
    let Mode::Approx { precision, residue } = &c.mode else {
        panic!("refine requires an approximate component");
    };
    debug_assert!(avoid.iter().all(|g| !g.is_zero()));
    let p = c.p;
    let bp = BigInt::from(p);

    struct Search<'a> {
        p: u64,
        bp: BigInt,
        avoid: &'a [&'a IntPoly],
        nodes: u64,
    }

    impl Search<'_> {
        fn open_polys(&self, residue: &BigInt, modulus: &BigInt) -> Vec<usize> {
            self.avoid
                .iter()
                .enumerate()
                .filter(|(_, g)| g.eval_mod(residue, modulus).is_zero())
                .map(|(i, _)| i)
                .collect()
        }

        /// Returns the extended (residue, precision) with all avoid
        /// polynomials determined, or None if the budget is exhausted
        /// along every path.
        fn search(
            &mut self,
            residue: BigInt,
            precision: u32,
            modulus: BigInt,
            depth_left: u32,
        ) -> Option<(BigInt, u32)> {
            self.nodes += 1;
            if self.nodes > REFINE_NODE_CAP {
                return None;
            }
            let open = self.open_polys(&residue, &modulus);
            if open.is_empty() {
                return Some((residue, precision));
            }
            if depth_left == 0 {
                return None;
            }
            let next_modulus = &modulus * &self.bp;
            // order digits: progress first, then ascending
            let mut scored: Vec<(bool, u64)> = Vec::with_capacity(self.p as usize);
            for d in 0..self.p {
                let cand = &residue + &modulus * BigInt::from(d);
                let progress = open
                    .iter()
                    .any(|&i| !self.avoid[i].eval_mod(&cand, &next_modulus).is_zero());
                scored.push((progress, d));
            }
            scored.sort_by_key(|&(progress, d)| (!progress, d));
            for (_, d) in scored {
                let cand = &residue + &modulus * BigInt::from(d);
                if let Some(hit) =
                    self.search(cand, precision + 1, next_modulus.clone(), depth_left - 1)
                {
                    return Some(hit);
                }
            }
            None
        }
    }

    let mut search = Search {
        p,
        bp: bp.clone(),
        avoid,
        nodes: 0,
    };
    let modulus = bp.pow(*precision);
    let (residue, precision) = search
        .search(residue.clone(), *precision, modulus, REFINE_DEPTH_CAP)
        .ok_or(Error::ValuationUnresolvable { p })?;
    // zero digits extend the tower to the target without new choices
    Ok(PadicComponent::approx(p, precision.max(target), residue))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub residue: BigInt,
    pub modulus: BigInt,
}

impl Congruence {
    pub fn new(residue: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Self {
        Congruence {
            residue: residue.into(),
            modulus: modulus.into(),
        }
    }

    pub fn holds_for(&self, value: &BigInt) -> bool {
        (value - &self.residue).mod_floor(&self.modulus).is_zero()
    }
}

/// Solves a system with pairwise coprime moduli; returns the unique
/// solution in [0, M) together with M, verified against every input.
pub fn crt_solve(system: &[Congruence]) -> Result<(BigInt, BigInt)> {
    let mut solution = BigInt::zero();
    let mut modulus = BigInt::one();
    for c in system {
        if c.modulus < BigInt::one() {
            return Err(Error::Precondition("modulus must be positive".into()));
        }
        let e = modulus.extended_gcd(&c.modulus);
        if !e.gcd.is_one() {
            return Err(Error::NonCoprimeModuli);
        }
        // solution + modulus * t = residue (mod c.modulus)
        let t = ((&c.residue - &solution) * e.x).mod_floor(&c.modulus);
        solution += &modulus * t;
        modulus *= &c.modulus;
        solution = solution.mod_floor(&modulus);
    }
    for c in system {
        if !c.holds_for(&solution) {
            return Err(Error::Internal("CRT verification failed".into()));
        }
    }
    Ok((solution, modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn valuation_exact_examples() {
        // v_2((x^2+3)(1)) = v_2(4) = 2
        let c = PadicComponent::exact(2, BigInt::one());
        assert_eq!(valuation(&poly(&[3, 0, 1]), &c), Valuation::Determined(2));
        // g = x at 0 vanishes
        let c = PadicComponent::exact(5, BigInt::zero());
        assert_eq!(valuation(&poly(&[0, 1]), &c), Valuation::Infinite);
    }

    #[test]
    fn valuation_approx_needs_more_precision() {
        let c = PadicComponent::approx(2, 2, BigInt::one());
        assert_eq!(
            valuation(&poly(&[3, 0, 1]), &c),
            Valuation::NeedMorePrecision(3)
        );
    }

    #[test]
    fn unit_checks_at_precision_one() {
        let c = PadicComponent::approx(3, 1, BigInt::one());
        assert!(is_unit_value(&poly(&[1, 1]), &c)); // x + 1 -> 2
        assert!(!is_unit_value(&poly(&[2, 1]), &c)); // x + 2 -> 0
        assert!(is_unit_value(&poly(&[1]), &c));
    }

    #[test]
    fn refine_picks_first_progress_digit() {
        // starting from 0 mod 2, tracking x: digit 1 determines v = 1
        let c = PadicComponent::approx(2, 1, BigInt::zero());
        let x = poly(&[0, 1]);
        let r = refine(&c, &[&x], 2).unwrap();
        assert_eq!(r.precision(), Some(2));
        assert_eq!(r.mode(), &Mode::Approx {
            precision: 2,
            residue: BigInt::from(2)
        });
        assert_eq!(valuation(&x, &r), Valuation::Determined(1));
    }

    #[test]
    fn refine_extends_with_zero_digits_when_unconstrained() {
        let c = PadicComponent::approx(5, 1, BigInt::from(3));
        let r = refine(&c, &[], 2).unwrap();
        assert_eq!(r.precision(), Some(2));
        assert_eq!(r.mode(), &Mode::Approx {
            precision: 2,
            residue: BigInt::from(3)
        });
    }

    #[test]
    fn refine_digs_past_ambiguous_levels() {
        // tracking x^2 + 3 from 1 mod 2: both digits leave it open at
        // precision 2; the search goes deeper and determines v = 2
        let c = PadicComponent::approx(2, 1, BigInt::one());
        let g = poly(&[3, 0, 1]);
        let r = refine(&c, &[&g], 4).unwrap();
        assert!(r.precision().unwrap() >= 4);
        let v = valuation(&g, &r);
        assert_eq!(v, Valuation::Determined(2));
    }

    #[test]
    fn refinement_tower_is_coherent() {
        let c0 = PadicComponent::approx(3, 1, BigInt::from(2));
        let g = poly(&[1, 1]); // x + 1, open at 2 mod 3
        let c1 = refine(&c0, &[&g], 3).unwrap();
        // same residue mod 3
        assert_eq!(c1.residue_mod_p(), 2);
        let c2 = refine(&c1, &[&g], 6).unwrap();
        let m1 = BigInt::from(3).pow(c1.precision().unwrap());
        if let (Mode::Approx { residue: r1, .. }, Mode::Approx { residue: r2, .. }) =
            (c1.mode(), c2.mode())
        {
            assert_eq!(r2.mod_floor(&m1), r1.mod_floor(&m1));
        } else {
            unreachable!()
        }
        // determinations persist
        assert_eq!(valuation(&g, &c1), valuation(&g, &c2));
    }

    #[test]
    fn crt_frozen_example() {
        let system = [Congruence::new(7, 49), Congruence::new(9, 121)];
        let (sol, m) = crt_solve(&system).unwrap();
        assert_eq!(sol, BigInt::from(4123));
        assert_eq!(m, BigInt::from(5929));
    }

    #[test]
    fn crt_edges() {
        let (sol, m) = crt_solve(&[]).unwrap();
        assert_eq!((sol, m), (BigInt::zero(), BigInt::one()));
        let (sol, m) = crt_solve(&[Congruence::new(0, 5)]).unwrap();
        assert_eq!((sol, m), (BigInt::zero(), BigInt::from(5)));
        assert!(matches!(
            crt_solve(&[Congruence::new(1, 6), Congruence::new(2, 4)]),
            Err(Error::NonCoprimeModuli)
        ));
    }

    #[test]
    fn crt_random_systems_verify() {
        use rand_chacha::ChaCha8Rng;
        use rand_core::{RngCore, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23];
        for _ in 0..1000 {
            let mut system = Vec::new();
            for &p in primes.iter() {
                if rng.next_u64() % 2 == 0 {
                    continue;
                }
                let e = 1 + (rng.next_u64() % 3) as u32;
                let modulus = BigInt::from(p).pow(e);
                let residue = BigInt::from(rng.next_u64()).mod_floor(&modulus);
                system.push(Congruence {
                    residue,
                    modulus,
                });
            }
            let (sol, m) = crt_solve(&system).unwrap();
            assert!(sol >= BigInt::zero() && sol < m);
            for c in &system {
                assert!(c.holds_for(&sol));
            }
        }
    }
}
