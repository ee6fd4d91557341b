//! Stage-wise constructions.
//!
//! Three builders assemble parameter states: `build_justprimes` makes
//! every non-constant element divisible by infinitely many integer
//! primes, `build_sparse` certifies one non-standard prime per stage
//! with pairwise non-integer differences, and `build_main` additionally
//! realizes cofinal prime progressions for prescribed difference
//! tuples. The two lemma routines produce verified witnesses for the
//! progression polynomials x^n + kpx + a + d_i.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::padic::{crt_solve, is_unit_value, Congruence, PadicComponent, Valuation};
use crate::poly::{IntPoly, IrreducibleEnum};
use crate::primes::{next_prime_u64, primes_up_to};
use crate::tau::{BuilderKind, LedgerEntry, ProgressionTag, TauState};

/// Fresh primes examined before the root search gives up.
pub const LEFSCHETZ_SCAN_CAP: u64 = 1_000_000;
/// Candidate primes examined per witness search.
pub const WITNESS_SCAN_CAP: u64 = 1_000_000;

/// A strictly increasing tuple of positive differences (d_1, ..., d_l);
/// the implicit d_0 is 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiffTuple(Vec<u64>);

impl DiffTuple {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Precondition("difference tuple is empty".into()));
        }
        let increasing = entries[0] >= 1 && entries.windows(2).all(|w| w[0] < w[1]);
        if !increasing {
            return Err(Error::Precondition(format!(
                "difference tuple {entries:?} is not strictly increasing and positive"
            )));
        }
        Ok(DiffTuple(entries))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> u64 {
        *self.0.last().expect("tuples are nonempty")
    }

    /// 0, d_1, ..., d_l.
    pub fn offsets(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(0).chain(self.0.iter().copied())
    }
}

impl std::fmt::Display for DiffTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Does {0, d_1, ..., d_l} miss a residue class modulo every prime?
/// Only primes up to l + 1 can be covered, so the check is finite.
pub fn check_s(d: &DiffTuple) -> bool {
    let l = d.len() as u64;
    for p in primes_up_to(l + 1) {
        let mut hit = vec![false; p as usize];
        hit[0] = true;
        for &di in d.entries() {
            hit[(di % p) as usize] = true;
        }
        if hit.iter().all(|&h| h) {
            return false;
        }
    }
    true
}

/// The primes up to `bound` modulo which f has a root.
pub fn sf_primes(f: &IntPoly, bound: u64) -> Result<Vec<u64>> {
    if f.is_constant() {
        return Err(Error::ConstantInput);
    }
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        let bp = BigInt::from(p);
        if (0..p).any(|z| f.eval_mod(&BigInt::from(z), &bp).is_zero()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Greedily assigns pairwise disjoint prime sets T_f of size >= quota,
/// drawing from each root-prime set in list order.
pub fn assign_t(
    fs: &[IntPoly],
    quota: usize,
    bound: u64,
) -> Result<Vec<(IntPoly, Vec<u64>)>> {
    for (i, f) in fs.iter().enumerate() {
        if fs[..i].contains(f) {
            return Err(Error::Precondition(format!("duplicate polynomial {f}")));
        }
    }
    let mut claimed: BTreeSet<u64> = BTreeSet::new();
    let mut out = Vec::with_capacity(fs.len());
    for f in fs {
        let mut mine = Vec::with_capacity(quota);
        for p in sf_primes(f, bound)? {
            if mine.len() == quota {
                break;
            }
            if claimed.insert(p) {
                mine.push(p);
            }
        }
        if mine.len() < quota {
            return Err(Error::QuotaUnmet {
                poly: f.to_string(),
            });
        }
        out.push((f.clone(), mine));
    }
    Ok(out)
}

/// Exact integer coordinates making the first `count` enumerated
/// irreducibles divisible by every prime in their assigned sets;
/// unassigned coordinates stay zero.
pub fn build_justprimes(count: usize, quota: usize, bound: u64) -> Result<TauState> {
    let fs: Vec<IntPoly> = IrreducibleEnum::new().take(count).collect();
    let assignment = assign_t(&fs, quota, bound)?;
    let mut state = TauState::new_for_builder(BuilderKind::JustPrimes, 0, Vec::new());
    for (f, primes) in assignment {
        for p in primes {
            let bp = BigInt::from(p);
            let z = (0..p)
                .map(BigInt::from)
                .find(|z| f.eval_mod(z, &bp).is_zero())
                .expect("assigned primes admit a root");
            state.components.insert(p, PadicComponent::exact(p, z));
        }
    }
    state.stage = count as u32;
    Ok(state)
}

/// Verified witness (r, a, p_0 < ... < p_l) for the progression
/// polynomials: x^n + kpx + a + d_i is Eisenstein at p_i for every
/// k >= 0, the value r^n + kpr + a + d_i stays coprime to p = prod p_i,
/// and so does f(r) for every tracked f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargePrimesWitness {
    pub r: u64,
    pub a: BigUint,
    pub primes: Vec<u64>,
}

impl LargePrimesWitness {
    pub fn prime_product(&self) -> BigUint {
        self.primes.iter().map(|&p| BigUint::from(p)).product()
    }
}

pub fn lemma_largeprimes(
    f_set: &[IntPoly],
    n: u32,
    d: &DiffTuple,
    available: &dyn Fn(u64) -> bool,
) -> Result<LargePrimesWitness> {
    if n < 2 {
        return Err(Error::Precondition("progression degree must be >= 2".into()));
    }
    let d_last = BigUint::from(d.last());
    // smallest r with r^n > d_l avoiding the roots of every tracked f
    let mut r = 1u64;
    loop {
        let rn = BigUint::from(r).pow(n);
        let ok = rn > d_last
            && f_set
                .iter()
                .all(|f| !f.eval(&BigInt::from(r)).is_zero());
        if ok {
            break;
        }
        r += 1;
    }
    let root_product: BigUint = f_set
        .iter()
        .map(|f| f.eval(&BigInt::from(r)).magnitude().clone())
        .product();
    let floor = BigUint::from(r).pow(n) + &d_last;
    let floor = u64::try_from(floor).map_err(|_| Error::ExhaustedPrimes)?;
    if floor > u64::MAX / 4 {
        return Err(Error::ExhaustedPrimes);
    }
    // the l + 1 smallest available primes above r^n + d_l that miss
    // every tracked value at r
    let mut primes = Vec::with_capacity(d.len() + 1);
    let mut q = floor;
    let mut scanned = 0u64;
    while primes.len() < d.len() + 1 {
        q = next_prime_u64(q);
        scanned += 1;
        if scanned > WITNESS_SCAN_CAP {
            return Err(Error::ExhaustedPrimes);
        }
        if available(q) && !(&root_product % q).is_zero() {
            primes.push(q);
        }
    }
    let system: Vec<Congruence> = primes
        .iter()
        .zip(d.offsets())
        .map(|(&p, di)| Congruence::new(BigInt::from(p) - BigInt::from(di), BigInt::from(p) * p))
        .collect();
    let (a, _) = crt_solve(&system)?;
    let witness = LargePrimesWitness {
        r,
        a: a.magnitude().clone(),
        primes,
    };
    verify_witness(&witness, f_set, n, d)?;
    Ok(witness)
}

fn verify_witness(
    w: &LargePrimesWitness,
    f_set: &[IntPoly],
    n: u32,
    d: &DiffTuple,
) -> Result<()> {
    let p = w.prime_product();
    let pb = BigInt::from(p.clone());
    let a = BigInt::from(w.a.clone());
    let rn = BigInt::from(w.r).pow(n);
    let fail = |msg: String| Err(Error::Internal(format!("witness verification: {msg}")));
    for (&pi, di) in w.primes.iter().zip(d.offsets()) {
        // the exact inequality carrying the coprimality argument
        if BigInt::from(pi) <= &rn + BigInt::from(d.last()) {
            return fail(format!("prime {pi} is not past the value bound"));
        }
        for k in 0u32..=10 {
            let lin = BigInt::from(k) * &pb;
            let member = progression_member(n, &lin, &(&a + BigInt::from(di)));
            if !member.is_eisenstein_at(&BigInt::from(pi)) {
                return fail(format!("member at offset {di} not Eisenstein at {pi}"));
            }
            let value = &rn + &lin * BigInt::from(w.r) + &a + BigInt::from(di);
            if !value.gcd(&pb).is_one() {
                return fail(format!("value at offset {di}, k = {k} shares a factor with p"));
            }
        }
    }
    for f in f_set {
        if !f.eval(&BigInt::from(w.r)).gcd(&pb).is_one() {
            return fail(format!("{f}(r) shares a factor with p"));
        }
    }
    Ok(())
}

/// Horner evaluation of a reduced coefficient row modulo p.
fn eval_row(row: &[u64], r: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in row.iter().rev() {
        acc = ((acc as u128 * r as u128 + c as u128) % p as u128) as u64;
    }
    acc
}

/// x^n + (linear coefficient) x + constant.
fn progression_member(n: u32, linear: &BigInt, constant: &BigInt) -> IntPoly {
    let mut coeffs = vec![BigInt::zero(); n as usize + 1];
    coeffs[0] = constant.clone();
    coeffs[1] = linear.clone();
    coeffs[n as usize] = BigInt::one();
    IntPoly::new(coeffs)
}

/// A congruence class of multipliers k, every member of which keeps
/// all constrained coordinates away from the progression values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KProgression {
    pub k0: BigUint,
    pub modulus: BigUint,
    pub excluded: BTreeSet<BigUint>,
}

pub fn lemma_manyk(
    constraints: &BTreeMap<u64, u64>,
    p: &BigUint,
    d: &DiffTuple,
    a: &BigInt,
    n: u32,
    excluded: &BTreeSet<BigUint>,
) -> Result<KProgression> {
    if !check_s(d) {
        return Err(Error::NotInS(d.entries().to_vec()));
    }
    let mut system = Vec::with_capacity(constraints.len());
    for (&q, &c) in constraints {
        if c == 0 || c >= q {
            return Err(Error::Precondition(format!(
                "constraint residue at q = {q} is not a unit"
            )));
        }
        if (p % q).is_zero() {
            return Err(Error::Precondition(format!(
                "q = {q} divides the witness product"
            )));
        }
        let bq = BigInt::from(q);
        let cb = BigInt::from(c);
        let slope = (BigInt::from(p.clone()) * &cb).mod_floor(&bq);
        let slope_inv = {
            let e = slope.extended_gcd(&bq);
            debug_assert!(e.gcd.is_one());
            e.x.mod_floor(&bq)
        };
        let base = cb.modpow(&BigInt::from(n), &bq) + a;
        let mut bad = vec![false; q as usize];
        for di in d.offsets() {
            // the unique k-residue making q divide c^n + kpc + a + d_i
            let k_bad = ((-(&base + BigInt::from(di))) * &slope_inv).mod_floor(&bq);
            bad[u64::try_from(k_bad).expect("residue below q") as usize] = true;
        }
        let dq = (0..q).find(|&k| !bad[k as usize]).ok_or(Error::NoResidue { q })?;
        system.push(Congruence::new(BigInt::from(dq), bq));
    }
    let (residue, modulus) = crt_solve(&system)?;
    let modulus = modulus.magnitude().clone();
    let residue = residue.magnitude().clone();
    let mut k0 = if residue.is_zero() {
        modulus.clone()
    } else {
        residue
    };
    while excluded.contains(&k0) {
        k0 += &modulus;
    }
    let result = KProgression {
        k0,
        modulus,
        excluded: excluded.clone(),
    };
    // sample the first members against every constraint
    let mut k = result.k0.clone();
    for _ in 0..3 {
        for (&q, &c) in constraints {
            let bq = BigInt::from(q);
            let cb = BigInt::from(c);
            for di in d.offsets() {
                let value = cb.modpow(&BigInt::from(n), &bq)
                    + BigInt::from(k.clone()) * BigInt::from(p.clone()) * &cb
                    + a
                    + BigInt::from(di);
                if value.mod_floor(&bq).is_zero() {
                    return Err(Error::Internal(format!(
                        "class member {k} fails the constraint at q = {q}"
                    )));
                }
            }
        }
        k += &result.modulus;
    }
    Ok(result)
}

/// The stage pairing: row 0 is the plain branch, rows 1.. the tuples of
/// `diffs`; anti-diagonals are walked with the row index descending, so
/// column c pairs with degree 2 + c and every plain cell is reached.
pub fn iota<'a>(m: usize, diffs: &'a [DiffTuple]) -> (Option<&'a DiffTuple>, u32) {
    let rows = diffs.len() + 1;
    let mut remaining = m;
    let mut t = 0usize;
    loop {
        let cells = (t + 1).min(rows);
        if remaining < cells {
            let row = t.min(rows - 1) - remaining;
            let col = t - row;
            let branch = if row == 0 { None } else { Some(&diffs[row - 1]) };
            return (branch, 2 + col as u32);
        }
        remaining -= cells;
        t += 1;
    }
}

struct Builder {
    state: TauState,
    rng: ChaCha8Rng,
    enumerator: IrreducibleEnum,
    require_units: bool,
}

impl Builder {
    fn new(kind: BuilderKind, seed: u64, diffs: Vec<Vec<u64>>, require_units: bool, s0: u64) -> Self {
        let mut state = TauState::new_for_builder(kind, seed, diffs);
        state.s_m = s0;
        Builder {
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
            enumerator: IrreducibleEnum::new(),
            require_units,
        }
    }

    /// Residues modulo p on which no ledger polynomial vanishes (and
    /// which are units when the builder requires admissibility).
    fn candidate_residues(&self, p: u64) -> Vec<u64> {
        let rows: Vec<Vec<u64>> = self
            .state
            .ledger
            .iter()
            .map(|e| e.poly.coeffs_mod_u64(p))
            .collect();
        let start = u64::from(self.require_units);
        (start..p)
            .filter(|&c| rows.iter().all(|row| eval_row(row, c, p) != 0))
            .collect()
    }

    /// Defines coordinates at every undefined prime up to `s`; the
    /// choice among admissible residues is driven by the seed.
    fn define_components_up_to(&mut self, s: u64) -> Result<()> {
        for p in primes_up_to(s) {
            if self.state.components.contains_key(&p) {
                continue;
            }
            let candidates = self.candidate_residues(p);
            if candidates.is_empty() {
                return Err(Error::Internal(format!(
                    "no admissible residue at p = {p}; stage bound violated"
                )));
            }
            let pick = candidates[(self.rng.next_u64() % candidates.len() as u64) as usize];
            self.state
                .components
                .insert(p, PadicComponent::approx(p, 1, BigInt::from(pick)));
        }
        Ok(())
    }

    fn val_at(&mut self, p: u64, g: &IntPoly) -> Result<u32> {
        match self.state.determined_valuation(p, g)? {
            Valuation::Determined(e) => Ok(e),
            Valuation::Infinite => Err(Error::InfiniteValuation { p }),
            Valuation::NeedMorePrecision(_) => unreachable!("refined on demand"),
        }
    }

    /// prod p^(v_p(f(tau_p))) over every defined coordinate.
    fn normalizer(&mut self, f: &IntPoly) -> Result<BigUint> {
        let ps: Vec<u64> = self.state.components.keys().copied().collect();
        let mut n = BigUint::one();
        for p in ps {
            let e = self.val_at(p, f)?;
            if e > 0 {
                n *= BigUint::from(p).pow(e);
            }
        }
        Ok(n)
    }

    /// Multipliers t for which f/(t * base) would differ from some
    /// ledger prime by a constant. At most one t per entry: the
    /// non-constant coefficients must all match.
    fn collision_multipliers(&self, f: &IntPoly, base: &BigUint) -> BTreeSet<BigUint> {
        let mut out = BTreeSet::new();
        let Some(deg) = f.degree() else {
            return out;
        };
        let base = BigInt::from(base.clone());
        'entry: for e in &self.state.ledger {
            if e.poly.degree() != Some(deg) {
                continue;
            }
            // t * base = f_j * n / g_j for every j >= 1
            let n = BigInt::from(e.n.clone());
            let mut target: Option<BigInt> = None;
            for j in 1..=deg {
                let fj = f.coeff(j);
                let gj = e.poly.coeff(j);
                if fj.is_zero() != gj.is_zero() {
                    continue 'entry;
                }
                if fj.is_zero() {
                    continue;
                }
                let (quot, rem) = (&fj * &n).div_rem(&gj);
                if !rem.is_zero() {
                    continue 'entry;
                }
                match &target {
                    None => target = Some(quot),
                    Some(t) if *t == quot => {}
                    Some(_) => continue 'entry,
                }
            }
            if let Some(t_base) = target {
                if t_base.is_positive() {
                    let (t, rem) = t_base.div_rem(&base);
                    if rem.is_zero() && t.is_positive() {
                        out.insert(t.magnitude().clone());
                    }
                }
            }
        }
        out
    }

    /// The normalizer for a fresh entry, resolving integer-shift
    /// collisions with earlier entries by adopting one more fresh
    /// coordinate on a root of f that no ledger polynomial shares.
    fn resolve_normalizer(&mut self, f: &IntPoly) -> Result<BigUint> {
        let base = self.normalizer(f)?;
        let excluded = self.collision_multipliers(f, &base);
        if !excluded.contains(&BigUint::one()) {
            return Ok(base);
        }
        let mut q = 1u64;
        let mut scanned = 0u64;
        loop {
            q = next_prime_u64(q);
            scanned += 1;
            if scanned > LEFSCHETZ_SCAN_CAP {
                return Err(Error::LefschetzSearchExhausted);
            }
            if self.state.components.contains_key(&q) {
                continue;
            }
            let bq = BigInt::from(q);
            let start = u64::from(self.require_units);
            let root = (start..q).find(|&v| {
                let vb = BigInt::from(v);
                f.eval_mod(&vb, &bq).is_zero()
                    && self
                        .state
                        .ledger
                        .iter()
                        .all(|e| !e.poly.eval_mod(&vb, &bq).is_zero())
            });
            let Some(v) = root else { continue };
            self.state
                .components
                .insert(q, PadicComponent::approx(q, 1, BigInt::from(v)));
            let e = self.val_at(q, f)?;
            debug_assert!(e >= 1);
            let multiplier = BigUint::from(q).pow(e);
            if excluded.contains(&multiplier) {
                self.state.components.remove(&q);
                continue;
            }
            return Ok(base * multiplier);
        }
    }

    fn next_unused_irreducible(&mut self) -> IntPoly {
        loop {
            let f = self
                .enumerator
                .next()
                .expect("the enumeration is infinite");
            if self.state.ledger_lookup(&f).is_none() {
                return f;
            }
        }
    }
}

/// Stage-wise construction of a state whose certified primes have
/// pairwise non-integer differences.
pub fn build_sparse(stages: u32, seed: u64) -> Result<TauState> {
    if stages == 0 {
        return Err(Error::Precondition("at least one stage is required".into()));
    }
    let mut b = Builder::new(BuilderKind::Sparse, seed, Vec::new(), false, 0);
    for i in 0..stages {
        let f = b.enumerator.next().expect("the enumeration is infinite");
        b.state.s_m += (f.degree().expect("non-constant") as u64).max(1);
        b.define_components_up_to(b.state.s_m)?;
        let n = b.resolve_normalizer(&f)?;
        b.state.ledger.push(LedgerEntry {
            poly: f,
            n,
            stage: i,
            progression: None,
        });
        b.state.stage = i + 1;
    }
    Ok(b.state)
}

/// Stage-wise construction realizing, for every tuple in `diffs`, a
/// cofinal family of prime progressions with those differences, while
/// all other certified primes keep pairwise non-integer differences.
pub fn build_main(diffs: &[DiffTuple], stages: u32, seed: u64) -> Result<TauState> {
    if stages == 0 {
        return Err(Error::Precondition("at least one stage is required".into()));
    }
    for d in diffs {
        if !check_s(d) {
            return Err(Error::NotInS(d.entries().to_vec()));
        }
    }
    let doc_diffs: Vec<Vec<u64>> = diffs.iter().map(|d| d.entries().to_vec()).collect();
    let mut b = Builder::new(BuilderKind::Main, seed, doc_diffs, true, 1);
    for m in 0..stages {
        match iota(m as usize, diffs) {
            (None, _) => {
                let f = b.next_unused_irreducible();
                b.state.s_m += f.degree().expect("non-constant") as u64;
                b.define_components_up_to(b.state.s_m)?;
                let n = b.resolve_normalizer(&f)?;
                b.state.ledger.push(LedgerEntry {
                    poly: f,
                    n,
                    stage: m,
                    progression: None,
                });
            }
            (Some(d), n) => {
                let l = d.len() as u64;
                b.state.s_m += (l + 1) * n as u64;
                b.define_components_up_to(b.state.s_m)?;
                // unit residues of everything defined before the
                // witness coordinates exist
                let constraints: BTreeMap<u64, u64> = b
                    .state
                    .components
                    .iter()
                    .map(|(&q, c)| (q, c.residue_mod_p()))
                    .collect();
                let mut tracked: Vec<IntPoly> =
                    b.state.ledger.iter().map(|e| e.poly.clone()).collect();
                tracked.push(IntPoly::x());
                let defined: BTreeSet<u64> = b.state.components.keys().copied().collect();
                let witness =
                    lemma_largeprimes(&tracked, n, d, &|q| !defined.contains(&q))?;
                let p_prod = witness.prime_product();
                for &pi in &witness.primes {
                    b.state.components.insert(
                        pi,
                        PadicComponent::approx(pi, 1, BigInt::from(witness.r % pi)),
                    );
                }
                let a = BigInt::from(witness.a.clone());
                let excluded = excluded_multipliers(&b.state.ledger, n, &p_prod);
                let kprog = lemma_manyk(&constraints, &p_prod, d, &a, n, &excluded)?;
                let linear = BigInt::from(&kprog.k0 * &p_prod);
                let tag = ProgressionTag {
                    diffs: d.entries().to_vec(),
                    r: witness.r,
                    a: witness.a.clone(),
                    k: kprog.k0.clone(),
                    witness_primes: witness.primes.clone(),
                };
                for di in d.offsets() {
                    let member = progression_member(n, &linear, &(&a + BigInt::from(di)));
                    for (&q, c) in &b.state.components {
                        if !is_unit_value(&member, c) {
                            return Err(Error::LedgerViolation(format!(
                                "progression member {member} is not a unit at p = {q}"
                            )));
                        }
                    }
                    b.state.ledger.push(LedgerEntry {
                        poly: member,
                        n: BigUint::one(),
                        stage: m,
                        progression: Some(tag.clone()),
                    });
                }
            }
        }
        b.state.stage = m + 1;
    }
    Ok(b.state)
}

/// Multipliers k for which x^n + kpx + a (+ d_i) would sit an integer
/// away from a ledger prime g/n_g, or coincide with a raw ledger
/// polynomial. Each entry rules out at most one k per comparison.
fn excluded_multipliers(ledger: &[LedgerEntry], n: u32, p: &BigUint) -> BTreeSet<BigUint> {
    let mut out = BTreeSet::new();
    let pb = BigInt::from(p.clone());
    for e in ledger {
        if e.poly.degree() != Some(n as usize) {
            continue;
        }
        for scale in [BigInt::from(e.n.clone()), BigInt::one()] {
            // x^n + kpx matches the non-constant part of g/scale only
            // if g is x^n * scale + (linear) * scale-divisible terms
            if e.poly.coeff(n as usize) != scale {
                continue;
            }
            if (2..n as usize).any(|j| !e.poly.coeff(j).is_zero()) {
                continue;
            }
            let (lin, rem) = e.poly.coeff(1).div_rem(&scale);
            if !rem.is_zero() {
                continue;
            }
            let (k, rem) = lin.div_rem(&pb);
            if rem.is_zero() && k.is_positive() {
                out.insert(k.magnitude().clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tau::Certainty;
    use num_traits::ToPrimitive;

    fn dt(entries: &[u64]) -> DiffTuple {
        DiffTuple::new(entries.to_vec()).unwrap()
    }

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn sieve_membership_examples() {
        assert!(check_s(&dt(&[2])));
        assert!(check_s(&dt(&[6, 12])));
        assert!(!check_s(&dt(&[2, 4]))); // {0,2,1} covers Z/3
        assert!(!check_s(&dt(&[1]))); // odd entry covers Z/2
    }

    #[test]
    fn tuple_validation() {
        assert!(DiffTuple::new(vec![]).is_err());
        assert!(DiffTuple::new(vec![0, 2]).is_err());
        assert!(DiffTuple::new(vec![4, 2]).is_err());
        assert!(DiffTuple::new(vec![2, 2]).is_err());
    }

    #[test]
    fn root_prime_sets() {
        assert_eq!(sf_primes(&p(&[1, 0, 1]), 20).unwrap(), vec![2, 5, 13, 17]);
        assert_eq!(sf_primes(&p(&[0, 1]), 10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sf_primes(&p(&[-2, 0, 1]), 20).unwrap(), vec![2, 7, 17]);
        assert!(matches!(
            sf_primes(&p(&[3]), 10),
            Err(Error::ConstantInput)
        ));
    }

    #[test]
    fn greedy_disjoint_assignment() {
        let fs = [p(&[0, 1]), p(&[1, 1])];
        let got = assign_t(&fs, 2, 10).unwrap();
        assert_eq!(got[0].1, vec![2, 3]);
        assert_eq!(got[1].1, vec![5, 7]);

        let got = assign_t(&[p(&[0, 1])], 1, 2).unwrap();
        assert_eq!(got[0].1, vec![2]);

        let fs = [p(&[1, 0, 1]), p(&[-2, 0, 1])];
        let got = assign_t(&fs, 1, 20).unwrap();
        assert_eq!(got[0].1, vec![2]);
        assert_eq!(got[1].1, vec![7]);

        assert!(matches!(
            assign_t(&[p(&[1, 0, 1])], 10, 20),
            Err(Error::QuotaUnmet { .. })
        ));
    }

    #[test]
    fn witness_frozen_example() {
        let w = lemma_largeprimes(&[IntPoly::x()], 2, &dt(&[2]), &|_| true).unwrap();
        assert_eq!(w.r, 2);
        assert_eq!(w.primes, vec![7, 11]);
        assert_eq!(w.a, BigUint::from(4123u32));
    }

    #[test]
    fn witness_without_tracked_polys() {
        let w = lemma_largeprimes(&[], 2, &dt(&[2]), &|_| true).unwrap();
        assert_eq!(w.r, 2);
    }

    #[test]
    fn witness_respects_availability() {
        let w = lemma_largeprimes(&[IntPoly::x()], 2, &dt(&[2]), &|q| q != 7).unwrap();
        assert_eq!(w.primes, vec![11, 13]);
    }

    #[test]
    fn k_class_frozen_example() {
        let mut constraints = BTreeMap::new();
        constraints.insert(3u64, 1u64);
        let got = lemma_manyk(
            &constraints,
            &BigUint::from(77u32),
            &dt(&[2]),
            &BigInt::from(4123),
            2,
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(got.modulus, BigUint::from(3u32));
        assert_eq!(got.k0, BigUint::from(3u32)); // class k = 0 mod 3
    }

    #[test]
    fn k_class_empty_constraints() {
        let got = lemma_manyk(
            &BTreeMap::new(),
            &BigUint::from(77u32),
            &dt(&[2]),
            &BigInt::from(1),
            2,
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(got.k0, BigUint::one());
        assert_eq!(got.modulus, BigUint::one());
    }

    #[test]
    fn k_class_avoids_excluded() {
        let mut excluded = BTreeSet::new();
        excluded.insert(BigUint::one());
        excluded.insert(BigUint::from(2u32));
        let got = lemma_manyk(
            &BTreeMap::new(),
            &BigUint::from(5u32),
            &dt(&[2]),
            &BigInt::from(1),
            2,
            &excluded,
        )
        .unwrap();
        assert_eq!(got.k0, BigUint::from(3u32));
    }

    #[test]
    fn pairing_frozen_examples() {
        let d = [dt(&[2])];
        assert_eq!(iota(0, &d), (None, 2));
        assert_eq!(iota(1, &d), (Some(&d[0]), 2));
        assert_eq!(iota(2, &d), (None, 3));
        assert_eq!(iota(3, &d), (Some(&d[0]), 3));
        for m in 0..5 {
            assert_eq!(iota(m, &[]), (None, 2 + m as u32));
        }
    }

    #[test]
    fn pairing_is_bijective_on_a_window() {
        let d = [dt(&[2]), dt(&[6, 12])];
        let mut seen = BTreeSet::new();
        for m in 0..60 {
            let (branch, n) = iota(m, &d);
            let row = match branch {
                None => 0,
                Some(b) if b == &d[0] => 1,
                Some(_) => 2,
            };
            assert!(seen.insert((row, n)), "cell repeated at m = {m}");
        }
        for n in 2..10u32 {
            assert!(seen.contains(&(0, n)), "plain cell {n} missing");
        }
    }

    #[test]
    fn sparse_first_stages_trace() {
        let tau = build_sparse(3, 1).unwrap();
        let ledger = tau.ledger();
        assert_eq!(ledger[0].poly, p(&[-1, 1]));
        assert_eq!(ledger[0].n, BigUint::one());
        assert_eq!(ledger[1].poly, p(&[0, 1]));
        assert_eq!(ledger[1].n, BigUint::from(2u32));
        assert_eq!(ledger[2].poly, p(&[1, 1]));
        assert_eq!(ledger[2].n, BigUint::from(3u32));
        // tau_2 = 2 mod 4 under the stated digit policy
        let c2 = &tau.components()[&2];
        assert_eq!(c2.precision(), Some(2));
    }

    #[test]
    fn sparse_differences_not_integers() {
        let tau = build_sparse(8, 7).unwrap();
        let primes: Vec<_> = tau.ledger().iter().map(|e| e.normalized()).collect();
        for i in 0..primes.len() {
            for j in 0..i {
                let diff = primes[i].sub(&primes[j]);
                assert!(
                    !diff.is_constant(),
                    "entries {j} and {i} differ by a constant"
                );
            }
        }
    }

    #[test]
    fn justprimes_divisibility() {
        let mut tau = build_justprimes(3, 2, 50).unwrap();
        // every assigned coordinate divides its polynomial there
        let fs: Vec<IntPoly> = IrreducibleEnum::new().take(3).collect();
        let assignment = assign_t(&fs, 2, 50).unwrap();
        for (f, primes) in assignment {
            for q in primes {
                let f_over_q =
                    crate::poly::RTauElem::new(f.clone(), BigInt::from(q)).unwrap();
                assert_eq!(
                    tau.membership(&f_over_q).unwrap(),
                    Certainty::CertifiedTrue,
                    "{f}/{q}"
                );
            }
        }
    }

    #[test]
    fn main_two_stage_trace() {
        let tau = build_main(&[dt(&[2])], 2, 7).unwrap();
        let ledger = tau.ledger();
        // stage 0 is a plain branch on x - 1, stage 1 a twin pair of degree 2
        assert_eq!(ledger[0].poly, p(&[-1, 1]));
        assert!(ledger[0].progression.is_none());
        assert_eq!(ledger.len(), 3);
        assert_eq!(ledger[1].poly.degree(), Some(2));
        assert_eq!(ledger[2].poly.degree(), Some(2));
        let gap = &ledger[2].poly - &ledger[1].poly;
        assert_eq!(gap.degree(), Some(0));
        assert_eq!(gap.constant_term().to_i64(), Some(2));
        assert_eq!(ledger[1].n, BigUint::one());
        assert_eq!(ledger[2].n, BigUint::one());
        assert!(ledger[1].progression.is_some());
        // s grows by 1 then by (l+1) * n = 4
        assert_eq!(tau.s_m(), 1 + 1 + 4);
    }

    #[test]
    fn main_progressions_certify() {
        let mut tau = build_main(&[dt(&[2])], 6, 11).unwrap();
        let progs = tau.progressions();
        assert!(!progs.is_empty());
        for prog in &progs {
            assert_eq!(prog.members.len(), 2);
            for member in &prog.members {
                let f = crate::poly::RTauElem::from_poly(member.clone());
                let verdict = tau.is_prime(&f).unwrap();
                assert!(
                    verdict.true_or_promised(),
                    "{member}: {verdict}"
                );
            }
        }
        assert!(tau.pid_report().is_ok());
    }

    #[test]
    fn main_empty_diffs_matches_plain_enumeration() {
        let tau = build_main(&[], 5, 3).unwrap();
        let polys: Vec<_> = tau.ledger().iter().map(|e| e.poly.clone()).collect();
        let expected: Vec<_> = IrreducibleEnum::new().take(5).collect();
        assert_eq!(polys, expected);
    }

    #[test]
    fn builders_are_deterministic() {
        let a = build_main(&[dt(&[2])], 5, 42).unwrap();
        let b = build_main(&[dt(&[2])], 5, 42).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = build_sparse(6, 9).unwrap();
        let d = build_sparse(6, 9).unwrap();
        assert_eq!(c.to_json(), d.to_json());
    }

    #[test]
    fn main_rejects_covering_tuples() {
        assert!(matches!(
            build_main(&[dt(&[2, 4])], 2, 1),
            Err(Error::NotInS(_))
        ));
    }

    fn forced_collision_builder(kind: BuilderKind, require_units: bool) -> Builder {
        let mut b = Builder::new(kind, 0, Vec::new(), require_units, 0);
        b.state.ledger.push(LedgerEntry {
            poly: p(&[0, 1]),
            n: BigUint::one(),
            stage: 0,
            progression: None,
        });
        b
    }

    #[test]
    fn collision_adopts_a_fresh_root_prime() {
        // with x certified at n = 1 and no coordinates, x + 2 would sit
        // an integer away from it; the resolver must take a fresh
        // prime with a root of x + 2 avoiding the root of x
        for (kind, units) in [(BuilderKind::Sparse, false), (BuilderKind::Main, true)] {
            let mut b = forced_collision_builder(kind, units);
            let f = p(&[2, 1]);
            let excluded = b.collision_multipliers(&f, &BigUint::one());
            assert!(excluded.contains(&BigUint::one()));
            let n = b.resolve_normalizer(&f).unwrap();
            // q = 2 fails (the only root of x + 2 is 0, shared with x),
            // q = 3 succeeds with residue 1
            assert_eq!(n, BigUint::from(3u32));
            assert_eq!(b.state.components[&3].residue_mod_p(), 1);
        }
    }

    #[test]
    fn collision_skips_excluded_multipliers() {
        let mut b = forced_collision_builder(BuilderKind::Sparse, false);
        // a second degree-1 entry whose shift pattern rules out t = 3
        b.state.ledger.push(LedgerEntry {
            poly: p(&[5, 1]),
            n: BigUint::from(3u32),
            stage: 0,
            progression: None,
        });
        let f = p(&[2, 1]);
        let excluded = b.collision_multipliers(&f, &BigUint::one());
        assert!(excluded.contains(&BigUint::one()));
        assert!(excluded.contains(&BigUint::from(3u32)));
        let n = b.resolve_normalizer(&f).unwrap();
        // q = 3 yields the excluded multiplier 3 and is rolled back
        assert_eq!(n, BigUint::from(5u32));
        assert!(!b.state.components.contains_key(&3));
        assert!(b.state.components.contains_key(&5));
    }
}
