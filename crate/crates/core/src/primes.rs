//! Integer primality and factorization helpers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the 12-base certificate).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`. Panics close to u64::MAX.
pub fn next_prime_u64(n: u64) -> u64 {
    let mut k = n.checked_add(1).expect("prime search left the u64 range");
    if k <= 2 {
        return 2;
    }
    if k % 2 == 0 {
        k += 1;
    }
    loop {
        if is_prime_u64(k) {
            return k;
        }
        k = k.checked_add(2).expect("prime search left the u64 range");
    }
}

/// All primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Miller-Rabin on arbitrary-precision integers. Deterministic below
/// 3.3 * 10^24 via the 13-base certificate; fixed extra rounds beyond.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let bases: Vec<BigUint> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]
        .iter()
        .map(|&b| BigUint::from(b))
        .chain((0..24u64).map(|i| {
            // fixed pseudo-random bases derived from n itself
            let mix = BigUint::from(0x9e3779b97f4a7c15u64.wrapping_mul(i + 1));
            (n ^ &mix) % (n - 3u32) + &two
        }))
        .collect();
    'witness: for a in bases {
        let a = a % n;
        if a.is_zero() || a.is_one() || a == n_minus_1 {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_rho(n: &BigUint) -> Option<BigUint> {
    // Brent's cycle variant; deterministic parameter sweep.
    let one = BigUint::one();
    for c in 1u64..64 {
        let cc = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cc) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut count = 0u64;
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
            count += 1;
            if count > 1 << 22 {
                break;
            }
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}

/// Factor `n` by trial division and Pollard rho, with bounded effort.
/// Returns sorted (prime, exponent) pairs plus an unfactored cofactor
/// when the budget runs out.
pub fn partial_factor(n: &BigUint) -> (Vec<(BigUint, u32)>, Option<BigUint>) {
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() || rest.is_one() {
        return (factors, None);
    }
    let push = |p: BigUint, e: u32, factors: &mut Vec<(BigUint, u32)>| {
        if let Some(slot) = factors.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += e;
        } else {
            factors.push((p, e));
        }
    };
    for p in 2u64..100_000 {
        if rest.is_one() {
            break;
        }
        let big_p = BigUint::from(p);
        if &big_p * &big_p > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &big_p).is_zero() {
            rest /= &big_p;
            e += 1;
        }
        if e > 0 {
            push(big_p, e, &mut factors);
        }
    }
    let mut stack = vec![rest];
    let mut leftover: Option<BigUint> = None;
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime_big(&m) {
            push(m, 1, &mut factors);
            continue;
        }
        match brent_rho(&m) {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => {
                leftover = Some(match leftover {
                    Some(l) => l * m,
                    None => m,
                });
            }
        }
    }
    factors.sort();
    (factors, leftover)
}

/// Complete factorization; errors if the effort budget is exceeded.
pub fn factor(n: &BigUint) -> crate::error::Result<Vec<(BigUint, u32)>> {
    let (factors, leftover) = partial_factor(n);
    match leftover {
        None => Ok(factors),
        Some(l) => Err(crate::error::Error::Internal(format!(
            "could not factor cofactor {l}"
        ))),
    }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation_int(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u32;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        m = q;
    }
}
