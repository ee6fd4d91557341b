//! Exact polynomials over Z and canonical fractions over Q[x].
//!
//! `IntPoly` stores coefficients constant-term first with no trailing
//! zeros (the zero polynomial is the empty sequence). `RTauElem` is the
//! canonical pair g/k with g over Z, k a positive integer and
//! gcd(content(g), k) = 1; these are unique representatives, so
//! structural equality is ring equality.

mod enumerate;
mod factor;

pub use enumerate::{enumerate_i, first_members, IrreducibleEnum};
pub use factor::{irreducible_over_z, irreducible_over_z_capped, poly_gcd_z, DEFAULT_DEGREE_CAP};

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The identity polynomial x.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    /// max |a_i|; zero polynomial has height 0.
    pub fn height(&self) -> BigUint {
        self.coeffs
            .iter()
            .map(|c| c.magnitude().clone())
            .max()
            .unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// g(r) reduced into [0, modulus).
    pub fn eval_mod(&self, r: &BigInt, modulus: &BigInt) -> BigInt {
        debug_assert!(modulus.is_positive());
        let mut acc = BigInt::zero();
        let r = r.mod_floor(modulus);
        for c in self.coeffs.iter().rev() {
            acc = (acc * &r + c).mod_floor(modulus);
        }
        acc
    }

    /// Coefficients reduced into [0, p); lets residue scans run on
    /// machine words after one pass over big coefficients.
    pub fn coeffs_mod_u64(&self, p: u64) -> Vec<u64> {
        let bp = BigInt::from(p);
        self.coeffs
            .iter()
            .map(|c| u64::try_from(c.mod_floor(&bp)).expect("residue below a u64 modulus"))
            .collect()
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// gcd of the coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigUint {
        self.coeffs
            .iter()
            .fold(BigUint::zero(), |acc, c| acc.gcd(c.magnitude()))
    }

    /// Splits g = content * primitive with positive content; the
    /// primitive part keeps the sign of the leading coefficient.
    pub fn content_primitive(&self) -> Result<(BigUint, IntPoly)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let content = self.content();
        let c = BigInt::from(content.clone());
        let prim = IntPoly::new(self.coeffs.iter().map(|a| a / &c).collect());
        Ok((content, prim))
    }

    /// Primitive part normalized to a positive leading coefficient.
    pub fn primitive_positive(&self) -> Result<IntPoly> {
        let (_, prim) = self.content_primitive()?;
        if prim.leading().is_some_and(|l| l.is_negative()) {
            Ok(-&prim)
        } else {
            Ok(prim)
        }
    }

    /// p divides every non-leading coefficient, p does not divide the
    /// leading one, and p^2 does not divide the constant term.
    pub fn is_eisenstein_at(&self, p: &BigInt) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        if (&self.coeffs[d] % p).is_zero() {
            return false;
        }
        for c in &self.coeffs[..d] {
            if !(c % p).is_zero() {
                return false;
            }
        }
        !(&self.coeffs[0] % (p * p)).is_zero()
    }

    /// f + c.
    pub fn shift_add(&self, c: &BigInt) -> IntPoly {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(c.clone());
        } else {
            coeffs[0] += c;
        }
        IntPoly::new(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact quotient in Z[x] when `divisor` divides self, else None.
    pub fn exact_div(&self, divisor: &IntPoly) -> Option<IntPoly> {
        use num_rational::BigRational;
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dd = divisor.degree().unwrap();
        let nd = self.degree().unwrap();
        if nd < dd {
            return None;
        }
        let mut rem: Vec<BigRational> = self
            .coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let lead = BigRational::from_integer(divisor.coeffs[dd].clone());
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let q = &rem[k + dd] / &lead;
            if !q.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    let sub = &q * BigRational::from_integer(dc.clone());
                    rem[k + i] -= sub;
                }
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut out = Vec::with_capacity(quot.len());
        for q in quot {
            if !q.denom().is_one() {
                return None;
            }
            out.push(q.to_integer());
        }
        Some(IntPoly::new(out))
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

fn fmt_poly(coeffs: &[BigInt], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.magnitude();
        if first {
            if c.sign() == Sign::Minus {
                write!(f, "-")?;
            }
            first = false;
        } else if c.sign() == Sign::Minus {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        match i {
            0 => write!(f, "{mag}")?,
            _ => {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                if i == 1 {
                    write!(f, "x")?;
                } else {
                    write!(f, "x^{i}")?;
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(&self.coeffs, f)
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// Canonical element g/k of Q[x]: k >= 1 and gcd(content(g), k) = 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RTauElem {
    num: IntPoly,
    den: BigUint,
}

impl RTauElem {
    /// Canonicalizes num/den: the sign moves to the numerator and the
    /// common integer factor of content and denominator is removed.
    pub fn new(num: IntPoly, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let num = if den.is_negative() { -&num } else { num };
        let den = den.magnitude().clone();
        if num.is_zero() {
            return Ok(RTauElem {
                num,
                den: BigUint::one(),
            });
        }
        let g = num.content().gcd(&den);
        let gi = BigInt::from(g.clone());
        let num = IntPoly::new(num.coeffs.iter().map(|c| c / &gi).collect());
        Ok(RTauElem { num, den: den / g })
    }

    pub fn from_poly(p: IntPoly) -> Self {
        RTauElem {
            num: p,
            den: BigUint::one(),
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::from_poly(IntPoly::from_i64(&[n]))
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn den_int(&self) -> BigInt {
        BigInt::from(self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant()
    }

    pub fn degree(&self) -> Option<usize> {
        self.num.degree()
    }

    /// Whether this is 1 or -1.
    pub fn is_unit_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant() && self.num.constant_term().magnitude().is_one()
    }

    pub fn add(&self, rhs: &RTauElem) -> RTauElem {
        let num = &self.num.scale(&rhs.den_int()) + &rhs.num.scale(&self.den_int());
        RTauElem::new(num, self.den_int() * rhs.den_int()).expect("nonzero denominator")
    }

    pub fn sub(&self, rhs: &RTauElem) -> RTauElem {
        let num = &self.num.scale(&rhs.den_int()) - &rhs.num.scale(&self.den_int());
        RTauElem::new(num, self.den_int() * rhs.den_int()).expect("nonzero denominator")
    }

    pub fn neg(&self) -> RTauElem {
        RTauElem {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

/// The ring order: f < g iff g - f has a positive leading coefficient.
impl Ord for RTauElem {
    fn cmp(&self, other: &Self) -> Ordering {
        // sign of leading coefficient of (other - self), denominators positive
        let diff = &other.num.scale(&self.den_int()) - &self.num.scale(&other.den_int());
        match diff.leading() {
            None => Ordering::Equal,
            Some(l) if l.is_positive() => Ordering::Less,
            _ => Ordering::Greater,
        }
    }
}

impl PartialOrd for RTauElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RTauElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for RTauElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RTauElem({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    fn r(coeffs: &[i64], den: i64) -> RTauElem {
        RTauElem::new(p(coeffs), BigInt::from(den)).unwrap()
    }

    #[test]
    fn canonicalize_removes_common_factor() {
        // (2x + 2)/4 -> (x + 1)/2
        let e = r(&[2, 2], 4);
        assert_eq!(e.num(), &p(&[1, 1]));
        assert_eq!(e.den(), &BigUint::from(2u32));
    }

    #[test]
    fn canonicalize_identity() {
        let e = r(&[0, 1], 1);
        assert_eq!(e.num(), &p(&[0, 1]));
        assert_eq!(e.den(), &BigUint::from(1u32));
    }

    #[test]
    fn canonicalize_folds_sign() {
        // (-x^2 + 2)/(-2) -> (x^2 - 2)/2
        let e = r(&[2, 0, -1], -2);
        assert_eq!(e.num(), &p(&[-2, 0, 1]));
        assert_eq!(e.den(), &BigUint::from(2u32));
    }

    #[test]
    fn canonicalize_zero_denominator() {
        assert!(matches!(
            RTauElem::new(p(&[1]), BigInt::zero()),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn canonicalize_idempotent() {
        let e = r(&[6, 4], 10);
        let again = RTauElem::new(e.num().clone(), e.den_int()).unwrap();
        assert_eq!(e, again);
    }

    #[test]
    fn order_examples() {
        // 3 < x/2, x = x, x^2/2 > x
        assert_eq!(r(&[3], 1).cmp(&r(&[0, 1], 2)), Ordering::Less);
        assert_eq!(r(&[0, 1], 1).cmp(&r(&[0, 1], 1)), Ordering::Equal);
        assert_eq!(r(&[0, 0, 1], 2).cmp(&r(&[0, 1], 1)), Ordering::Greater);
    }

    #[test]
    fn content_primitive_examples() {
        let (c, prim) = p(&[2, 4, 6]).content_primitive().unwrap();
        assert_eq!(c, BigUint::from(2u32));
        assert_eq!(prim, p(&[1, 2, 3]));

        let (c, prim) = p(&[-1, 1]).content_primitive().unwrap();
        assert_eq!(c, BigUint::from(1u32));
        assert_eq!(prim, p(&[-1, 1]));

        // -4x keeps its sign on the primitive part
        let (c, prim) = p(&[0, -4]).content_primitive().unwrap();
        assert_eq!(c, BigUint::from(4u32));
        assert_eq!(prim, p(&[0, -1]));

        assert!(matches!(
            IntPoly::zero().content_primitive(),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn eval_mod_examples() {
        // (x^2 + 3)(1) = 4 = 0 mod 4
        assert_eq!(
            p(&[3, 0, 1]).eval_mod(&BigInt::from(1), &BigInt::from(4)),
            BigInt::zero()
        );
        assert_eq!(
            p(&[1]).eval_mod(&BigInt::from(9), &BigInt::from(7)),
            BigInt::one()
        );
        assert_eq!(
            p(&[0, 1]).eval_mod(&BigInt::from(2), &BigInt::from(7)),
            BigInt::from(2)
        );
    }

    #[test]
    fn eisenstein_examples() {
        assert!(p(&[-2, 0, 1]).is_eisenstein_at(&BigInt::from(2)));
        assert!(!p(&[-4, 0, 1]).is_eisenstein_at(&BigInt::from(2)));
        // 7 | 77, 7 | 4123, 49 does not divide 4123
        assert!(p(&[4123, 77, 1]).is_eisenstein_at(&BigInt::from(7)));
        assert!(!p(&[1, 1]).is_eisenstein_at(&BigInt::from(3)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(p(&[-1, 1]).to_string(), "x - 1");
        assert_eq!(p(&[2, 0, -1]).to_string(), "-x^2 + 2");
        assert_eq!(p(&[0]).to_string(), "0");
        assert_eq!(p(&[1, 77, 1]).to_string(), "x^2 + 77x + 1");
        assert_eq!(r(&[-2, 0, 0, 1], 2).to_string(), "(x^3 - 2)/2");
        assert_eq!(r(&[5], 1).to_string(), "5");
    }

    #[test]
    fn exact_division() {
        let prod = &p(&[-1, 1]) * &p(&[1, 1]);
        assert_eq!(prod, p(&[-1, 0, 1]));
        assert_eq!(prod.exact_div(&p(&[-1, 1])), Some(p(&[1, 1])));
        assert_eq!(prod.exact_div(&p(&[1, 2])), None);
        // 2x + 2 = 2 * (x + 1): division by x + 1 works, by 2x + 1 fails
        assert_eq!(p(&[2, 2]).exact_div(&p(&[1, 1])), Some(p(&[2])));
        assert_eq!(p(&[2, 2]).exact_div(&p(&[1, 2])), None);
    }

    #[test]
    fn discreteness_on_integer_constants() {
        // nothing in canonical form sits strictly between n and n + 1
        // with a degree-0 numerator unless the denominator exceeds 1,
        // and such constants are precisely the non-integers of Q.
        for n in -3i64..3 {
            let lo = RTauElem::integer(n);
            let hi = RTauElem::integer(n + 1);
            for den in 2i64..6 {
                for num in (n * den)..=(n + 1) * den {
                    let c = r(&[num], den);
                    if c > lo && c < hi {
                        assert!(!c.den().is_one());
                    }
                }
            }
        }
    }
}
