//! The finite parameter approximation and its ring queries.
//!
//! A `TauState` holds finitely many p-adic coordinates plus a ledger of
//! certified non-standard primes. The ledger carries a promise: every
//! coordinate defined after an entry keeps that entry's polynomial a
//! unit, so a query quantifying over all primes can answer exactly
//! (both coordinate data and certified), conditionally (`Promised`), or
//! not at all (`Unknown`).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_unit_value, refine, valuation, Mode, PadicComponent, Valuation};
use crate::poly::{irreducible_over_z, IntPoly, RTauElem};
use crate::primes::{factor, is_prime_big, is_prime_u64, next_prime_u64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuilderKind {
    Exact,
    JustPrimes,
    Sparse,
    Main,
}

impl BuilderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BuilderKind::Exact => "exact",
            BuilderKind::JustPrimes => "justprimes",
            BuilderKind::Sparse => "sparse",
            BuilderKind::Main => "main",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BuilderKind::Exact),
            "justprimes" => Ok(BuilderKind::JustPrimes),
            "sparse" => Ok(BuilderKind::Sparse),
            "main" => Ok(BuilderKind::Main),
            other => Err(Error::Precondition(format!("unknown builder kind {other}"))),
        }
    }

    /// Whether coordinates not present in the map default to an exact
    /// integer (zero) instead of being undefined.
    fn has_default(self) -> bool {
        matches!(self, BuilderKind::Exact | BuilderKind::JustPrimes)
    }
}

/// Three-valued-plus-one certification result for queries that
/// quantify over all primes at a finite stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    CertifiedTrue,
    CertifiedFalse,
    /// True in the idealized completion, resting on the ledger promise
    /// for the coordinates not defined yet.
    Promised,
    /// Undecidable until a coordinate at this prime exists.
    Unknown(u64),
}

impl Certainty {
    fn rank(self) -> u8 {
        match self {
            Certainty::CertifiedFalse => 0,
            Certainty::Unknown(_) => 1,
            Certainty::Promised => 2,
            Certainty::CertifiedTrue => 3,
        }
    }

    /// Conjunction: False dominates, then Unknown, then Promised, then
    /// True. Ties keep the left operand.
    pub fn and(self, other: Certainty) -> Certainty {
        if other.rank() < self.rank() {
            other
        } else {
            self
        }
    }

    pub fn is_certified_true(self) -> bool {
        self == Certainty::CertifiedTrue
    }

    pub fn true_or_promised(self) -> bool {
        matches!(self, Certainty::CertifiedTrue | Certainty::Promised)
    }
}

impl std::fmt::Display for Certainty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Certainty::CertifiedTrue => write!(f, "CertifiedTrue"),
            Certainty::CertifiedFalse => write!(f, "CertifiedFalse"),
            Certainty::Promised => write!(f, "Promised"),
            Certainty::Unknown(p) => write!(f, "Unknown(p = {p})"),
        }
    }
}

/// Witness data shared by the members of one realized progression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionTag {
    pub diffs: Vec<u64>,
    pub r: u64,
    pub a: BigUint,
    pub k: BigUint,
    pub witness_primes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub poly: IntPoly,
    pub n: BigUint,
    pub stage: u32,
    pub progression: Option<ProgressionTag>,
}

impl LedgerEntry {
    /// The certified prime this entry denotes.
    pub fn normalized(&self) -> RTauElem {
        RTauElem::new(self.poly.clone(), BigInt::from(self.n.clone()))
            .expect("ledger normalizer is nonzero")
    }
}

/// A realized progression (f, f + d_1, ..., f + d_l) of ledger primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressionCertificate {
    pub base: IntPoly,
    pub diffs: Vec<u64>,
    pub degree: usize,
    pub r: u64,
    pub a: BigUint,
    pub k: BigUint,
    pub witness_primes: Vec<u64>,
    pub members: Vec<IntPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauState {
    pub(crate) kind: BuilderKind,
    pub(crate) seed: u64,
    pub(crate) stage: u32,
    pub(crate) s_m: u64,
    /// Difference tuples driving the stage pairing (main builder only).
    pub(crate) diffs: Vec<Vec<u64>>,
    pub(crate) components: BTreeMap<u64, PadicComponent>,
    pub(crate) ledger: Vec<LedgerEntry>,
}

impl TauState {
    /// The parameter with every coordinate the exact integer zero.
    pub fn exact_zero() -> Self {
        TauState {
            kind: BuilderKind::Exact,
            seed: 0,
            stage: 0,
            s_m: 0,
            diffs: Vec::new(),
            components: BTreeMap::new(),
            ledger: Vec::new(),
        }
    }

    /// Exact coordinates at the given primes; everything else is zero.
    pub fn exact_with(assignments: BTreeMap<u64, BigInt>) -> Self {
        let mut state = Self::exact_zero();
        for (p, z) in assignments {
            state.components.insert(p, PadicComponent::exact(p, z));
        }
        state
    }

    pub(crate) fn new_for_builder(kind: BuilderKind, seed: u64, diffs: Vec<Vec<u64>>) -> Self {
        TauState {
            kind,
            seed,
            stage: 0,
            s_m: 0,
            diffs,
            components: BTreeMap::new(),
            ledger: Vec::new(),
        }
    }

    pub fn builder_kind(&self) -> BuilderKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn s_m(&self) -> u64 {
        self.s_m
    }

    pub fn components(&self) -> &BTreeMap<u64, PadicComponent> {
        &self.components
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn ledger_lookup(&self, poly: &IntPoly) -> Option<usize> {
        self.ledger.iter().position(|e| &e.poly == poly)
    }

    fn component_or_default(&self, p: u64) -> Option<PadicComponent> {
        match self.components.get(&p) {
            Some(c) => Some(c.clone()),
            None if self.kind.has_default() => Some(PadicComponent::exact(p, BigInt::zero())),
            None => None,
        }
    }

    fn least_undefined_prime(&self) -> u64 {
        let mut p = 2;
        while self.components.contains_key(&p) {
            p = next_prime_u64(p);
        }
        p
    }

    /// Extends the residue tower at p to at least `target` digits,
    /// keeping every ledger polynomial's valuation determined.
    pub fn refine_component(&mut self, p: u64, target: u32) -> Result<()> {
        let Some(c) = self.components.get(&p) else {
            return Err(Error::UnknownComponent { p });
        };
        if c.is_exact() {
            return Ok(());
        }
        let polys: Vec<&IntPoly> = self.ledger.iter().map(|e| &e.poly).collect();
        let refined = refine(c, &polys, target)?;
        self.components.insert(p, refined);
        Ok(())
    }

    /// Valuation of g at a defined coordinate, refining the residue
    /// tower in place until the answer is determined.
    pub(crate) fn determined_valuation(&mut self, p: u64, g: &IntPoly) -> Result<Valuation> {
        let c = self
            .component_or_default(p)
            .ok_or(Error::UnknownComponent { p })?;
        match valuation(g, &c) {
            Valuation::NeedMorePrecision(m) => {
                let refined = refine(&c, &[g], m)?;
                let v = valuation(g, &refined);
                debug_assert!(matches!(v, Valuation::Determined(_)));
                self.components.insert(p, refined);
                Ok(v)
            }
            v => Ok(v),
        }
    }

    /// Does f evaluate into the p-adic integers at every coordinate?
    pub fn membership(&mut self, f: &RTauElem) -> Result<Certainty> {
        if f.den().is_one() {
            return Ok(Certainty::CertifiedTrue);
        }
        let mut result = Certainty::CertifiedTrue;
        for (p, e) in factor_u64(f.den())? {
            match self.component_or_default(p) {
                None => result = result.and(Certainty::Unknown(p)),
                Some(_) => {
                    let v = self.determined_valuation(p, f.num())?;
                    let ok = match v {
                        Valuation::Infinite => true,
                        Valuation::Determined(got) => got >= e,
                        Valuation::NeedMorePrecision(_) => unreachable!("refined above"),
                    };
                    if !ok {
                        result = result.and(Certainty::CertifiedFalse);
                    }
                }
            }
        }
        Ok(result)
    }

    /// Is the tuple of values (f(tau_p))_p a unit of the profinite
    /// integers, i.e. v_p(f(tau_p)) = v_p(den) at every prime?
    pub fn is_unit_adeles(&mut self, f: &RTauElem) -> Result<Certainty> {
        if f.is_zero() {
            return Ok(Certainty::CertifiedFalse);
        }
        if f.is_constant() {
            // constant values are independent of the coordinates
            let unit = f.num().constant_term().magnitude() == f.den();
            return Ok(boolean(unit));
        }
        let num = f.num().clone();
        let den = f.den().clone();
        let (content, _) = num.content_primitive()?;
        let prim_pos = num.primitive_positive()?;

        if self.kind.has_default() {
            return self.unit_check_exact(&num, &den);
        }

        let mut result = Certainty::CertifiedTrue;
        let defined: Vec<u64> = self.components.keys().copied().collect();
        for p in &defined {
            let v = self.determined_valuation(*p, &num)?;
            let want = crate::primes::valuation_int(&BigInt::from(den.clone()), *p)
                .expect("positive denominator");
            let ok = matches!(v, Valuation::Determined(got) if got == want);
            if !ok {
                result = result.and(Certainty::CertifiedFalse);
            }
        }
        let tracked = self.ledger_lookup(&prim_pos).is_some();
        for (q, _) in factor_u64(&content)? {
            if !self.components.contains_key(&q) {
                // v_q >= v_q(content) >= 1 at an undefined coordinate,
                // while q cannot divide the denominator
                result = result.and(Certainty::CertifiedFalse);
            }
        }
        for (q, _) in factor_u64(&den)? {
            if !self.components.contains_key(&q) {
                result = result.and(if tracked {
                    // the promise pins the valuation at 0 there
                    Certainty::CertifiedFalse
                } else {
                    Certainty::Unknown(q)
                });
            }
        }
        result = result.and(if tracked {
            Certainty::Promised
        } else {
            Certainty::Unknown(self.least_undefined_prime())
        });
        Ok(result)
    }

    /// Exhaustive unit check when every coordinate is an exact integer.
    fn unit_check_exact(&mut self, num: &IntPoly, den: &BigUint) -> Result<Certainty> {
        let default_value = num.eval(&BigInt::zero());
        if default_value.is_zero() {
            // infinitely many coordinates evaluate to zero
            return Ok(Certainty::CertifiedFalse);
        }
        let mut relevant: Vec<u64> = self.components.keys().copied().collect();
        for (p, _) in factor_u64(den)? {
            relevant.push(p);
        }
        for (p, _) in factor_u64(default_value.magnitude())? {
            relevant.push(p);
        }
        relevant.sort_unstable();
        relevant.dedup();
        for p in relevant {
            let v = self.determined_valuation(p, num)?;
            let want = crate::primes::valuation_int(&BigInt::from(den.clone()), p)
                .expect("positive denominator");
            let ok = matches!(v, Valuation::Determined(got) if got == want);
            if !ok {
                return Ok(Certainty::CertifiedFalse);
            }
        }
        Ok(Certainty::CertifiedTrue)
    }

    /// Primality of f in the ring.
    pub fn is_prime(&mut self, f: &RTauElem) -> Result<Certainty> {
        if f.is_zero() || f.is_unit_constant() {
            return Ok(Certainty::CertifiedFalse);
        }
        if f.is_constant() {
            let prime = f.den().is_one() && is_prime_big(f.num().constant_term().magnitude());
            return Ok(boolean(prime));
        }
        let prim_pos = f.num().primitive_positive()?;
        // ledger entries were certified irreducible when they entered
        let irreducible = if self.ledger_lookup(&prim_pos).is_some() {
            true
        } else {
            irreducible_over_z(&prim_pos)?
        };
        if !irreducible {
            return Ok(Certainty::CertifiedFalse);
        }
        let unit = self.is_unit_adeles(f)?;
        Ok(Certainty::CertifiedTrue.and(unit))
    }

    /// For g irreducible with positive leading coefficient, the unique
    /// normalizer k with g/k prime: k collects p^(v_p(g(tau_p))) over
    /// the coordinates.
    pub fn normalize_prime(&mut self, g: &IntPoly) -> Result<RTauElem> {
        if g.is_constant() {
            return Err(Error::ConstantInput);
        }
        if !g.leading().is_some_and(|l| l.is_positive()) {
            return Err(Error::Precondition(
                "normalization requires a positive leading coefficient".into(),
            ));
        }
        if self.ledger_lookup(g).is_none() && !irreducible_over_z(g)? {
            return Err(Error::Precondition(format!("{g} is reducible over Z")));
        }
        if self.kind.has_default() {
            let default_value = g.eval(&BigInt::zero());
            if default_value.is_zero() {
                return Err(Error::InfiniteValuation {
                    p: self.least_undefined_prime(),
                });
            }
            let mut relevant: Vec<u64> = self.components.keys().copied().collect();
            for (p, _) in factor_u64(default_value.magnitude())? {
                relevant.push(p);
            }
            relevant.sort_unstable();
            relevant.dedup();
            let mut k = BigUint::one();
            for p in relevant {
                match self.determined_valuation(p, g)? {
                    Valuation::Infinite => return Err(Error::InfiniteValuation { p }),
                    Valuation::Determined(e) => k *= BigUint::from(p).pow(e),
                    Valuation::NeedMorePrecision(_) => unreachable!(),
                }
            }
            return RTauElem::new(g.clone(), BigInt::from(k));
        }
        match self.ledger_lookup(g) {
            Some(idx) => Ok(self.ledger[idx].normalized()),
            None => Err(Error::UnknownComponent {
                p: self.least_undefined_prime(),
            }),
        }
    }

    /// Per-entry support report: the defined primes with positive
    /// valuation must be exactly the factorization of the normalizer,
    /// no coordinate may be an exact root, and everything else rests on
    /// the ledger promise.
    pub fn pid_report(&self) -> Result<PidReport> {
        if self.kind.has_default() {
            return Err(Error::Precondition(
                "support reports require a sparse or main builder state".into(),
            ));
        }
        let mut entries = Vec::new();
        for (idx, entry) in self.ledger.iter().enumerate() {
            let mut support = Vec::new();
            let mut product = BigUint::one();
            for (&p, c) in &self.components {
                match valuation(&entry.poly, c) {
                    Valuation::Determined(0) => {}
                    Valuation::Determined(e) => {
                        support.push((p, e));
                        product *= BigUint::from(p).pow(e);
                    }
                    Valuation::Infinite => {
                        return Err(Error::LedgerViolation(format!(
                            "entry {idx} ({}) has an exact root at p = {p}",
                            entry.poly
                        )));
                    }
                    Valuation::NeedMorePrecision(_) => {
                        return Err(Error::LedgerViolation(format!(
                            "entry {idx} ({}) has an undetermined valuation at p = {p}",
                            entry.poly
                        )));
                    }
                }
            }
            if product != entry.n {
                return Err(Error::LedgerViolation(format!(
                    "entry {idx} ({}) carries n = {} but the coordinate support gives {}",
                    entry.poly, entry.n, product
                )));
            }
            entries.push(PidEntry {
                poly: entry.poly.clone(),
                n: entry.n.clone(),
                stage: entry.stage,
                support,
                in_progression: entry.progression.is_some(),
            });
        }
        Ok(PidReport { entries })
    }

    /// Groups consecutive ledger entries sharing one witness tag.
    pub fn progressions(&self) -> Vec<ProgressionCertificate> {
        let mut out: Vec<ProgressionCertificate> = Vec::new();
        for entry in &self.ledger {
            let Some(tag) = &entry.progression else {
                continue;
            };
            let matches_last = out.last().is_some_and(|c| {
                c.r == tag.r
                    && c.a == tag.a
                    && c.k == tag.k
                    && c.witness_primes == tag.witness_primes
                    && c.diffs == tag.diffs
            });
            if matches_last {
                out.last_mut().unwrap().members.push(entry.poly.clone());
            } else {
                out.push(ProgressionCertificate {
                    base: entry.poly.clone(),
                    diffs: tag.diffs.clone(),
                    degree: entry.poly.degree().unwrap_or(0),
                    r: tag.r,
                    a: tag.a.clone(),
                    k: tag.k.clone(),
                    witness_primes: tag.witness_primes.clone(),
                    members: vec![entry.poly.clone()],
                });
            }
        }
        out
    }

    /// Full certification of one element with printable evidence.
    pub fn certify(&mut self, f: &RTauElem) -> Result<Certificate> {
        let membership = self.membership(f)?;
        let unit = self.is_unit_adeles(f)?;
        let prime = self.is_prime(f)?;
        let mut evidence = Vec::new();
        let mut relevant: Vec<u64> = Vec::new();
        for (p, _) in factor_u64(f.den())? {
            relevant.push(p);
        }
        for (&p, c) in &self.components {
            if !f.num().is_zero() && !is_unit_value(f.num(), c) {
                relevant.push(p);
            }
        }
        relevant.sort_unstable();
        relevant.dedup();
        for p in relevant {
            let (valuation_text, determined) = match self.component_or_default(p) {
                None => ("undefined coordinate".to_string(), false),
                Some(_) => match self.determined_valuation(p, f.num())? {
                    Valuation::Infinite => ("infinite".to_string(), true),
                    Valuation::Determined(e) => (e.to_string(), true),
                    Valuation::NeedMorePrecision(_) => unreachable!(),
                },
            };
            let required = crate::primes::valuation_int(&BigInt::from(f.den().clone()), p)
                .expect("positive denominator");
            evidence.push(PrimeEvidence {
                p,
                valuation: valuation_text,
                determined,
                required,
            });
        }
        let promise = f
            .num()
            .primitive_positive()
            .ok()
            .and_then(|prim| self.ledger_lookup(&prim))
            .map(|idx| PromiseRef {
                ledger_index: idx,
                poly: self.ledger[idx].poly.clone(),
                n: self.ledger[idx].n.clone(),
            });
        Ok(Certificate {
            element: f.clone(),
            membership,
            unit,
            prime,
            evidence,
            promise,
        })
    }

    // ---- serialization ----

    pub fn to_document(&self) -> TauDocument {
        TauDocument {
            version: "1".to_string(),
            builder_kind: self.kind.as_str().to_string(),
            seed: self.seed,
            stage: self.stage,
            s_m: self.s_m,
            iota: IotaDoc {
                pairing: "antidiagonal".to_string(),
                diffs: self.diffs.clone(),
            },
            components: self
                .components
                .values()
                .map(|c| match c.mode() {
                    Mode::Exact(v) => ComponentDoc {
                        p: c.p(),
                        mode: "exact".to_string(),
                        value: Some(v.to_string()),
                        precision: None,
                        residue: None,
                    },
                    Mode::Approx { precision, residue } => ComponentDoc {
                        p: c.p(),
                        mode: "approx".to_string(),
                        value: None,
                        precision: Some(*precision),
                        residue: Some(residue.to_string()),
                    },
                })
                .collect(),
            ledger: self
                .ledger
                .iter()
                .map(|e| LedgerEntryDoc {
                    coeffs: e.poly.coeffs().iter().map(|c| c.to_string()).collect(),
                    n: e.n.to_string(),
                    stage: e.stage,
                    progression: e.progression.as_ref().map(|t| ProgressionDoc {
                        diffs: t.diffs.clone(),
                        r: t.r,
                        a: t.a.to_string(),
                        k: t.k.to_string(),
                        witness_primes: t.witness_primes.clone(),
                    }),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &TauDocument) -> Result<Self> {
        if doc.version != "1" {
            return Err(Error::Precondition(format!(
                "unsupported document version {}",
                doc.version
            )));
        }
        let kind = BuilderKind::parse(&doc.builder_kind)?;
        let mut components = BTreeMap::new();
        for c in &doc.components {
            if !is_prime_u64(c.p) {
                return Err(Error::Precondition(format!("{} is not prime", c.p)));
            }
            let comp = match c.mode.as_str() {
                "exact" => {
                    let v = c
                        .value
                        .as_deref()
                        .ok_or_else(|| Error::Precondition("missing exact value".into()))?;
                    PadicComponent::exact(c.p, parse_bigint(v)?)
                }
                "approx" => {
                    let precision = c
                        .precision
                        .ok_or_else(|| Error::Precondition("missing precision".into()))?;
                    let residue = parse_bigint(
                        c.residue
                            .as_deref()
                            .ok_or_else(|| Error::Precondition("missing residue".into()))?,
                    )?;
                    let modulus = BigInt::from(c.p).pow(precision);
                    if residue.is_negative() || residue >= modulus {
                        return Err(Error::Precondition(format!(
                            "residue out of range at p = {}",
                            c.p
                        )));
                    }
                    let comp = PadicComponent::approx(c.p, precision, residue);
                    if kind == BuilderKind::Main && !comp.is_unit() {
                        return Err(Error::Precondition(format!(
                            "main-builder coordinate at p = {} is not a unit",
                            c.p
                        )));
                    }
                    comp
                }
                other => {
                    return Err(Error::Precondition(format!("unknown mode {other}")));
                }
            };
            if components.insert(c.p, comp).is_some() {
                return Err(Error::Precondition(format!("duplicate coordinate {}", c.p)));
            }
        }
        let mut ledger = Vec::new();
        for e in &doc.ledger {
            let coeffs = e
                .coeffs
                .iter()
                .map(|s| parse_bigint(s))
                .collect::<Result<Vec<_>>>()?;
            let poly = IntPoly::new(coeffs);
            let n = parse_bigint(&e.n)?;
            if !n.is_positive() {
                return Err(Error::Precondition("ledger normalizer must be positive".into()));
            }
            ledger.push(LedgerEntry {
                poly,
                n: n.magnitude().clone(),
                stage: e.stage,
                progression: e.progression.as_ref().map(|t| -> Result<ProgressionTag> {
                    Ok(ProgressionTag {
                        diffs: t.diffs.clone(),
                        r: t.r,
                        a: parse_bigint(&t.a)?.magnitude().clone(),
                        k: parse_bigint(&t.k)?.magnitude().clone(),
                        witness_primes: t.witness_primes.clone(),
                    })
                }).transpose()?,
            });
        }
        Ok(TauState {
            kind,
            seed: doc.seed,
            stage: doc.stage,
            s_m: doc.s_m,
            diffs: doc.iota.diffs.clone(),
            components,
            ledger,
        })
    }

    /// Stable textual form; identical states serialize byte-identically.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document())
            .expect("document serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TauDocument = serde_json::from_str(text)
            .map_err(|e| Error::Precondition(format!("malformed state document: {e}")))?;
        Self::from_document(&doc)
    }
}

fn boolean(b: bool) -> Certainty {
    if b {
        Certainty::CertifiedTrue
    } else {
        Certainty::CertifiedFalse
    }
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>()
        .map_err(|_| Error::Precondition(format!("invalid integer literal {s:?}")))
}

/// Factor a positive integer into u64 primes.
fn factor_u64(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    for (p, e) in factor(n)? {
        let p = u64::try_from(p.clone()).map_err(|_| {
            Error::Precondition(format!("prime {p} exceeds the supported coordinate range"))
        })?;
        out.push((p, e));
    }
    Ok(out)
}

/// Closed-form primality test in the ring with every coordinate zero:
/// constants are the integer primes, and a non-constant element is
/// prime exactly when it is irreducible over Q with constant
/// coefficient +-1.
pub fn r0_prime_oracle(f: &RTauElem) -> Result<bool> {
    if f.is_zero() || f.is_unit_constant() {
        return Ok(false);
    }
    if f.is_constant() {
        return Ok(f.den().is_one() && is_prime_big(f.num().constant_term().magnitude()));
    }
    let prim_pos = f.num().primitive_positive()?;
    if !irreducible_over_z(&prim_pos)? {
        return Ok(false);
    }
    Ok(f.num().constant_term().magnitude() == f.den())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PidEntry {
    pub poly: IntPoly,
    pub n: BigUint,
    pub stage: u32,
    pub support: Vec<(u64, u32)>,
    pub in_progression: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PidReport {
    pub entries: Vec<PidEntry>,
}

#[derive(Debug, Clone)]
pub struct PrimeEvidence {
    pub p: u64,
    pub valuation: String,
    pub determined: bool,
    pub required: u32,
}

#[derive(Debug, Clone)]
pub struct PromiseRef {
    pub ledger_index: usize,
    pub poly: IntPoly,
    pub n: BigUint,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub element: RTauElem,
    pub membership: Certainty,
    pub unit: Certainty,
    pub prime: Certainty,
    pub evidence: Vec<PrimeEvidence>,
    pub promise: Option<PromiseRef>,
}

// ---- the stable on-disk document ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauDocument {
    pub version: String,
    pub builder_kind: String,
    pub seed: u64,
    pub stage: u32,
    pub s_m: u64,
    pub iota: IotaDoc,
    pub components: Vec<ComponentDoc>,
    pub ledger: Vec<LedgerEntryDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IotaDoc {
    pub pairing: String,
    pub diffs: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub p: u64,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerEntryDoc {
    pub coeffs: Vec<String>,
    pub n: String,
    pub stage: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub progression: Option<ProgressionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgressionDoc {
    pub diffs: Vec<u64>,
    pub r: u64,
    pub a: String,
    pub k: String,
    pub witness_primes: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(coeffs: &[i64], den: i64) -> RTauElem {
        RTauElem::new(IntPoly::from_i64(coeffs), BigInt::from(den)).unwrap()
    }

    #[test]
    fn membership_at_zero() {
        let mut tau = TauState::exact_zero();
        // x/2 is a member: x(0) = 0
        assert_eq!(
            tau.membership(&elem(&[0, 1], 2)).unwrap(),
            Certainty::CertifiedTrue
        );
        // (x+1)/2 is not: v_2(1) = 0
        assert_eq!(
            tau.membership(&elem(&[1, 1], 2)).unwrap(),
            Certainty::CertifiedFalse
        );
        // (x^2-2)/2 is: v_2(-2) = 1
        assert_eq!(
            tau.membership(&elem(&[-2, 0, 1], 2)).unwrap(),
            Certainty::CertifiedTrue
        );
    }

    #[test]
    fn unit_adeles_at_zero() {
        let mut tau = TauState::exact_zero();
        assert_eq!(
            tau.is_unit_adeles(&elem(&[-2, 0, 1], 2)).unwrap(),
            Certainty::CertifiedTrue
        );
        assert_eq!(
            tau.is_unit_adeles(&elem(&[0, 1], 1)).unwrap(),
            Certainty::CertifiedFalse
        );
        assert_eq!(
            tau.is_unit_adeles(&elem(&[1], 1)).unwrap(),
            Certainty::CertifiedTrue
        );
    }

    #[test]
    fn primality_at_zero() {
        let mut tau = TauState::exact_zero();
        assert_eq!(
            tau.is_prime(&elem(&[5], 1)).unwrap(),
            Certainty::CertifiedTrue
        );
        assert_eq!(
            tau.is_prime(&elem(&[4], 1)).unwrap(),
            Certainty::CertifiedFalse
        );
        // x^3/2 - 1 written as (x^3 - 2)/2
        assert_eq!(
            tau.is_prime(&elem(&[-2, 0, 0, 1], 2)).unwrap(),
            Certainty::CertifiedTrue
        );
        // reducible
        assert_eq!(
            tau.is_prime(&elem(&[-1, 0, 1], 1)).unwrap(),
            Certainty::CertifiedFalse
        );
        // member but divisible by 2: constant coefficient 2
        assert_eq!(
            tau.is_prime(&elem(&[2, 1], 1)).unwrap(),
            Certainty::CertifiedFalse
        );
    }

    #[test]
    fn normalization_at_zero() {
        let mut tau = TauState::exact_zero();
        let g = IntPoly::from_i64(&[2, 1, 1]); // x^2 + x + 2
        let f = tau.normalize_prime(&g).unwrap();
        assert_eq!(f, elem(&[2, 1, 1], 2));
        assert_eq!(tau.is_prime(&f).unwrap(), Certainty::CertifiedTrue);

        let g = IntPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(tau.normalize_prime(&g).unwrap(), elem(&[-2, 0, 1], 2));

        assert!(matches!(
            tau.normalize_prime(&IntPoly::x()),
            Err(Error::InfiniteValuation { .. })
        ));
    }

    #[test]
    fn oracle_examples() {
        assert!(r0_prime_oracle(&elem(&[-2, 0, 1], 2)).unwrap());
        assert!(!r0_prime_oracle(&elem(&[2, 1], 1)).unwrap());
        assert!(r0_prime_oracle(&elem(&[2, 1, 1], 2)).unwrap());
        assert!(r0_prime_oracle(&elem(&[5], 1)).unwrap());
        assert!(!r0_prime_oracle(&elem(&[1], 1)).unwrap());
    }

    #[test]
    fn twin_family_at_zero() {
        let mut tau = TauState::exact_zero();
        for n in 2..=6usize {
            let mut minus = vec![0i64; n + 1];
            minus[0] = -2;
            minus[n] = 1;
            let mut plus = vec![0i64; n + 1];
            plus[0] = 2;
            plus[n] = 1;
            for coeffs in [minus, plus] {
                let f = elem(&coeffs, 2);
                assert_eq!(
                    tau.is_prime(&f).unwrap(),
                    Certainty::CertifiedTrue,
                    "{f} should be prime"
                );
            }
        }
    }

    #[test]
    fn certainty_conjunction_order() {
        use Certainty::*;
        assert_eq!(CertifiedTrue.and(Promised), Promised);
        assert_eq!(Promised.and(Unknown(3)), Unknown(3));
        assert_eq!(Unknown(3).and(CertifiedFalse), CertifiedFalse);
        assert_eq!(CertifiedFalse.and(CertifiedTrue), CertifiedFalse);
        assert_eq!(Unknown(3).and(Unknown(5)), Unknown(3));
    }

    #[test]
    fn pid_report_rejects_exact_states() {
        let tau = TauState::exact_zero();
        assert!(matches!(tau.pid_report(), Err(Error::Precondition(_))));
    }

    #[test]
    fn document_round_trip_is_byte_identical() {
        let mut components = BTreeMap::new();
        components.insert(5, BigInt::from(3));
        let tau = TauState::exact_with(components);
        let text = tau.to_json();
        let back = TauState::from_json(&text).unwrap();
        assert_eq!(back, tau);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn justprimes_membership_with_assignment() {
        let mut components = BTreeMap::new();
        for p in [3u64, 7, 11] {
            components.insert(p, BigInt::one());
        }
        let mut tau = TauState::exact_with(components);
        tau.kind = BuilderKind::JustPrimes;
        // (x - 1)/p is a member whenever tau_p = 1
        for p in [3i64, 7, 11] {
            assert_eq!(
                tau.membership(&elem(&[-1, 1], p)).unwrap(),
                Certainty::CertifiedTrue
            );
        }
        assert_eq!(
            tau.membership(&elem(&[-1, 1], 5)).unwrap(),
            Certainty::CertifiedFalse
        );
    }
}
