//! Exact arithmetic over Q and F_p (p odd) and canonical square classes.
//!
//! All values are immutable and every operation is a pure function: rationals
//! are arbitrary-precision and always stored reduced, residues always reduced
//! mod p. There is no floating point anywhere in this crate.

use std::fmt;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Default trial-division bound for square-class canonicalization over Q.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

static FACTOR_BOUND: std::sync::OnceLock<u64> = std::sync::OnceLock::new();

/// Overrides the process-wide trial-division bound used by the plain
/// `reduce_square_class`. Settable once, before any computation; returns
/// false if a bound was already fixed.
pub fn set_default_factor_bound(bound: u64) -> bool {
    FACTOR_BOUND.set(bound).is_ok()
}

pub fn default_factor_bound() -> u64 {
    *FACTOR_BOUND.get().unwrap_or(&DEFAULT_FACTOR_BOUND)
}

/// The base field: Q or F_p for an odd prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldCtx {
    Rationals,
    PrimeField(u64),
}

impl FieldCtx {
    /// Builds the prime-field context, rejecting p that is not an odd prime.
    pub fn prime_field(p: u64) -> Result<FieldCtx> {
        if p < 3 || p % 2 == 0 || !is_prime_u64(p) {
            return Err(Error::InvalidPlace(format!("{p} is not an odd prime")));
        }
        Ok(FieldCtx::PrimeField(p))
    }

    /// Parses "Q" or "F<p>".
    pub fn parse(s: &str) -> Result<FieldCtx> {
        let s = s.trim();
        if s == "Q" || s == "q" {
            return Ok(FieldCtx::Rationals);
        }
        if let Some(rest) = s.strip_prefix('F').or_else(|| s.strip_prefix('f')) {
            let p: u64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad field spec {s:?}")))?;
            return FieldCtx::prime_field(p)
                .map_err(|_| Error::Parse(format!("bad field spec {s:?}: {p} is not an odd prime")));
        }
        Err(Error::Parse(format!(
            "bad field spec {s:?} (expected Q or F<p>)"
        )))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldCtx::Rationals => 0,
            FieldCtx::PrimeField(p) => *p,
        }
    }

    /// Element from a signed integer.
    pub fn int(&self, n: i64) -> FieldElem {
        match self {
            FieldCtx::Rationals => FieldElem::Rat(BigRational::from(BigInt::from(n))),
            FieldCtx::PrimeField(p) => FieldElem::Mod {
                p: *p,
                r: n.rem_euclid(*p as i64) as u64,
            },
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.int(0)
    }

    pub fn one(&self) -> FieldElem {
        self.int(1)
    }

    /// Parses "n" or "n/d" (optional leading minus, decimal digits).
    /// Over F_p the value is reduced mod p; a denominator divisible by p is rejected.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let s = s.trim();
        let (num_s, den_s) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num_s
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational literal {s:?}")))?;
        let den: BigInt = den_s
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational literal {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        match self {
            FieldCtx::Rationals => Ok(FieldElem::Rat(BigRational::new(num, den))),
            FieldCtx::PrimeField(p) => {
                let pn = BigInt::from(*p);
                let n = num.mod_floor(&pn).to_u64_digits().1.first().copied().unwrap_or(0);
                let d = den.mod_floor(&pn).to_u64_digits().1.first().copied().unwrap_or(0);
                if d == 0 {
                    return Err(Error::Parse(format!(
                        "denominator of {s:?} vanishes mod {p}"
                    )));
                }
                let r = mul_mod(n, inv_mod(d, *p), *p);
                Ok(FieldElem::Mod { p: *p, r })
            }
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldCtx::Rationals => write!(f, "Q"),
            FieldCtx::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// An element of the base field. Rationals are kept reduced with positive
/// denominator (num-rational's canonical form); residues live in [0, p-1].
/// The ordering is only used for deterministic output, not arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElem {
    Rat(BigRational),
    Mod { p: u64, r: u64 },
}

impl FieldElem {
    pub fn ctx(&self) -> FieldCtx {
        match self {
            FieldElem::Rat(_) => FieldCtx::Rationals,
            FieldElem::Mod { p, .. } => FieldCtx::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rat(x) => x.is_zero(),
            FieldElem::Mod { r, .. } => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rat(x) => x.is_one(),
            FieldElem::Mod { r, .. } => *r == 1,
        }
    }

    fn same_field<'a>(&'a self, rhs: &'a FieldElem) -> (&'a FieldElem, &'a FieldElem) {
        assert!(
            self.ctx() == rhs.ctx(),
            "field mismatch: {} vs {}",
            self.ctx(),
            rhs.ctx()
        );
        (self, rhs)
    }

    pub fn add(&self, rhs: &FieldElem) -> FieldElem {
        match self.same_field(rhs) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a + b),
            (FieldElem::Mod { p, r: a }, FieldElem::Mod { r: b, .. }) => FieldElem::Mod {
                p: *p,
                r: add_mod(*a, *b, *p),
            },
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, rhs: &FieldElem) -> FieldElem {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &FieldElem) -> FieldElem {
        match self.same_field(rhs) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a * b),
            (FieldElem::Mod { p, r: a }, FieldElem::Mod { r: b, .. }) => FieldElem::Mod {
                p: *p,
                r: mul_mod(*a, *b, *p),
            },
            _ => unreachable!(),
        }
    }

    pub fn div(&self, rhs: &FieldElem) -> FieldElem {
        self.mul(&rhs.inv().expect("division by zero"))
    }

    pub fn neg(&self) -> FieldElem {
        match self {
            FieldElem::Rat(a) => FieldElem::Rat(-a),
            FieldElem::Mod { p, r } => FieldElem::Mod {
                p: *p,
                r: if *r == 0 { 0 } else { p - r },
            },
        }
    }

    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldElem::Rat(a) => FieldElem::Rat(a.recip()),
            FieldElem::Mod { p, r } => FieldElem::Mod {
                p: *p,
                r: inv_mod(*r, *p),
            },
        })
    }

    pub fn square(&self) -> FieldElem {
        self.mul(self)
    }

    /// Sign over Q (-1, 0, +1); meaningless over F_p where it returns 0.
    pub fn sign(&self) -> i32 {
        match self {
            FieldElem::Rat(a) => {
                if a.is_zero() {
                    0
                } else if a.is_positive() {
                    1
                } else {
                    -1
                }
            }
            FieldElem::Mod { .. } => 0,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rat(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match self {
            FieldElem::Mod { r, .. } => Some(*r),
            _ => None,
        }
    }

    /// Exact square root in the field, if the element is a square.
    /// Over Q the reduced numerator and denominator must both be perfect
    /// squares; over F_p Tonelli-Shanks. Canonical root: nonnegative over Q,
    /// least residue over F_p.
    pub fn sqrt_exact(&self) -> Option<FieldElem> {
        match self {
            FieldElem::Rat(a) => {
                if a.is_negative() {
                    return None;
                }
                let n = sqrt_exact_bigint(a.numer())?;
                let d = sqrt_exact_bigint(a.denom())?;
                Some(FieldElem::Rat(BigRational::new(n, d)))
            }
            FieldElem::Mod { p, r } => {
                let s = sqrt_mod(*r, *p)?;
                Some(FieldElem::Mod {
                    p: *p,
                    r: s.min(p - s),
                })
            }
        }
    }

    /// True iff the element is a square in k; 0 counts as a square.
    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        match self {
            FieldElem::Rat(_) => self.sqrt_exact().is_some(),
            FieldElem::Mod { p, r } => legendre_symbol_u64(*r, *p) >= 0,
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rat(a) => {
                if a.denom().is_one() {
                    write!(f, "{}", a.numer())
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())
                }
            }
            FieldElem::Mod { r, .. } => write!(f, "{r}"),
        }
    }
}

/// Canonical representative of a class in k*/k*^2.
///
/// Over Q: a squarefree nonzero integer with the sign retained. Over F_p:
/// 1 or the least positive quadratic nonresidue.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareClass {
    Rat(BigInt),
    Mod { p: u64, r: u64 },
}

impl SquareClass {
    pub fn ctx(&self) -> FieldCtx {
        match self {
            SquareClass::Rat(_) => FieldCtx::Rationals,
            SquareClass::Mod { p, .. } => FieldCtx::PrimeField(*p),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            SquareClass::Rat(n) => n.is_one(),
            SquareClass::Mod { r, .. } => *r == 1,
        }
    }

    /// The representative as a field element.
    pub fn to_elem(&self) -> FieldElem {
        match self {
            SquareClass::Rat(n) => FieldElem::Rat(BigRational::from(n.clone())),
            SquareClass::Mod { p, r } => FieldElem::Mod { p: *p, r: *r },
        }
    }

    /// Product in k*/k*^2; canonical without any further factorization,
    /// because the product of two coprime squarefree integers is squarefree.
    pub fn mul(&self, rhs: &SquareClass) -> SquareClass {
        match (self, rhs) {
            (SquareClass::Rat(a), SquareClass::Rat(b)) => {
                let g = a.gcd(b);
                SquareClass::Rat((a / &g) * (b / &g))
            }
            (SquareClass::Mod { p, r: a }, SquareClass::Mod { r: b, .. }) => {
                assert_eq!(self.ctx(), rhs.ctx(), "field mismatch");
                let prod = mul_mod(*a, *b, *p);
                let canon = if legendre_symbol_u64(prod, *p) == 1 {
                    1
                } else {
                    least_nonresidue(*p)
                };
                SquareClass::Mod { p: *p, r: canon }
            }
            _ => panic!("field mismatch: {} vs {}", self.ctx(), rhs.ctx()),
        }
    }

    pub fn inverse(&self) -> SquareClass {
        // every class is its own inverse modulo squares
        self.clone()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareClass::Rat(n) => write!(f, "{n}"),
            SquareClass::Mod { r, .. } => write!(f, "{r}"),
        }
    }
}

/// Canonical square class of a nonzero element, with the process default
/// trial-division bound.
pub fn reduce_square_class(x: &FieldElem) -> Result<SquareClass> {
    reduce_square_class_bounded(x, default_factor_bound())
}

/// Canonical square class of a nonzero element.
///
/// Over Q the class of n/d equals the class of n*d, whose squarefree part is
/// found by trial division up to `bound`. A cofactor that survives trial
/// division is still resolved when it is a perfect square (contributes 1) or
/// a proven prime (contributes itself); otherwise the call fails loudly with
/// `FactorizationLimit` rather than ever returning a wrong class.
pub fn reduce_square_class_bounded(x: &FieldElem, bound: u64) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::DegenerateInput(
            "zero has no square class".to_string(),
        ));
    }
    match x {
        FieldElem::Rat(a) => {
            let prod = a.numer() * a.denom();
            let sign = prod.sign();
            let mut m: BigUint = prod.magnitude().clone();
            let mut squarefree = BigInt::one();
            let mut divisor: u64 = 2;
            while divisor <= bound {
                // pure u64 arithmetic once the cofactor fits
                if let Ok(small) = u64::try_from(&m) {
                    let mut v = small;
                    while divisor <= bound && divisor.saturating_mul(divisor) <= v {
                        let mut odd = false;
                        while v % divisor == 0 {
                            v /= divisor;
                            odd = !odd;
                        }
                        if odd {
                            squarefree *= BigInt::from(divisor);
                        }
                        divisor = if divisor == 2 { 3 } else { divisor + 2 };
                    }
                    m = BigUint::from(v);
                    break;
                }
                let d = BigUint::from(divisor);
                if &d * &d > m {
                    break;
                }
                let mut odd = false;
                loop {
                    let (q, r) = m.div_rem(&d);
                    if !r.is_zero() {
                        break;
                    }
                    m = q;
                    odd = !odd;
                }
                if odd {
                    squarefree *= BigInt::from(divisor);
                }
                divisor = if divisor == 2 { 3 } else { divisor + 2 };
            }
            if !m.is_one() {
                // all prime factors of m exceed min(bound, sqrt(original)),
                // so m <= bound^2 forces m prime; otherwise fall back to the
                // perfect-square / proven-prime resolutions.
                let root = m.sqrt();
                if &root * &root == m {
                    // all exponents even: contributes nothing
                } else if m <= BigUint::from(bound) * BigUint::from(bound)
                    || biguint_is_prime(&m)
                {
                    squarefree *= BigInt::from(m.clone());
                } else {
                    return Err(Error::FactorizationLimit {
                        bound,
                        cofactor: m.to_string(),
                    });
                }
            }
            if sign == Sign::Minus {
                squarefree = -squarefree;
            }
            Ok(SquareClass::Rat(squarefree))
        }
        FieldElem::Mod { p, r } => {
            let canon = if legendre_symbol_u64(*r, *p) == 1 {
                1
            } else {
                least_nonresidue(*p)
            };
            Ok(SquareClass::Mod { p: *p, r: canon })
        }
    }
}

/// Legendre symbol (a|p) in {-1, 0, +1}, by Euler's criterion.
pub fn legendre_symbol(a: &BigInt, p: u64) -> Result<i32> {
    if p < 3 || p % 2 == 0 || !is_prime_u64(p) {
        return Err(Error::InvalidPlace(format!("{p} is not an odd prime")));
    }
    let r = a
        .mod_floor(&BigInt::from(p))
        .to_u64_digits()
        .1
        .first()
        .copied()
        .unwrap_or(0);
    Ok(legendre_symbol_u64(r, p))
}

/// Legendre symbol for a residue already reduced mod the odd prime p.
pub fn legendre_symbol_u64(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let e = pow_mod(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Least positive quadratic nonresidue mod p, by linear scan.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&n| legendre_symbol_u64(n, p) == -1)
        .expect("odd prime fields have a nonresidue")
}

// ---- modular and integer helpers ----

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

/// Square root mod an odd prime (Tonelli-Shanks); None for nonresidues.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre_symbol_u64(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // write p-1 = q * 2^s with q odd
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = least_nonresidue(p);
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Deterministic Miller-Rabin for u64 (the usual 12-base certificate).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn biguint_is_prime(n: &BigUint) -> bool {
    match u64::try_from(n) {
        Ok(v) => is_prime_u64(v),
        // no deterministic certificate available at this size
        Err(_) => false,
    }
}

fn sqrt_exact_bigint(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn rat(s: &str) -> FieldElem {
        q().parse_elem(s).unwrap()
    }

    #[test]
    fn reduce_square_class_examples() {
        // 18 = 2 * 3^2
        assert_eq!(
            reduce_square_class(&rat("18")).unwrap(),
            SquareClass::Rat(BigInt::from(2))
        );
        // perfect square
        assert_eq!(
            reduce_square_class(&rat("4/9")).unwrap(),
            SquareClass::Rat(BigInt::one())
        );
        // F_7: squares are {1,2,4}, least nonresidue is 3
        let f7 = FieldCtx::prime_field(7).unwrap();
        let squares: Vec<u64> = (1..7).map(|x| x * x % 7).collect();
        assert!(squares.contains(&1) && squares.contains(&2) && squares.contains(&4));
        assert!(!squares.contains(&3));
        assert_eq!(
            reduce_square_class(&f7.int(3)).unwrap(),
            SquareClass::Mod { p: 7, r: 3 }
        );
    }

    #[test]
    fn reduce_square_class_rejects_zero() {
        assert!(matches!(
            reduce_square_class(&q().zero()),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn reduce_square_class_negative_keeps_sign() {
        assert_eq!(
            reduce_square_class(&rat("-12")).unwrap(),
            SquareClass::Rat(BigInt::from(-3))
        );
    }

    #[test]
    fn factorization_limit_is_loud() {
        // semiprime with both factors above the bound: cannot be resolved
        let n = BigInt::from(1_000_003u64) * BigInt::from(1_000_033u64);
        let x = FieldElem::Rat(BigRational::from(n));
        match reduce_square_class_bounded(&x, 1000) {
            Err(Error::FactorizationLimit { .. }) => {}
            other => panic!("expected FactorizationLimit, got {other:?}"),
        }
        // a single large prime cofactor is still provable
        let x = FieldElem::Rat(BigRational::from(BigInt::from(1_000_003u64)));
        assert_eq!(
            reduce_square_class_bounded(&x, 1000).unwrap(),
            SquareClass::Rat(BigInt::from(1_000_003u64))
        );
    }

    #[test]
    fn legendre_examples() {
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(legendre_symbol(&BigInt::one(), p).unwrap(), 1);
            assert_eq!(legendre_symbol(&BigInt::from(p), p).unwrap(), 0);
        }
        // 3^2 = 9 = 2 mod 7
        assert_eq!(legendre_symbol(&BigInt::from(2), 7).unwrap(), 1);
        assert!(matches!(
            legendre_symbol(&BigInt::one(), 15),
            Err(Error::InvalidPlace(_))
        ));
        assert!(matches!(
            legendre_symbol(&BigInt::one(), 2),
            Err(Error::InvalidPlace(_))
        ));
    }

    #[test]
    fn legendre_agrees_with_enumeration() {
        for p in [3u64, 5, 7, 11, 13, 17] {
            let squares: std::collections::HashSet<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre_symbol_u64(a, p), expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn is_square_examples() {
        assert!(rat("49/4").is_square());
        assert!(!rat("5").is_square());
        assert!(!rat("-4").is_square());
        assert!(rat("0").is_square());
        let f11 = FieldCtx::prime_field(11).unwrap();
        assert!(f11.int(4).is_square());
        assert!(!f11.int(least_nonresidue(11) as i64).is_square());
    }

    #[test]
    fn sqrt_exact_roundtrip() {
        assert_eq!(rat("49/4").sqrt_exact().unwrap(), rat("7/2"));
        assert_eq!(rat("5").sqrt_exact(), None);
        for p in [3u64, 5, 7, 11, 13, 41, 97] {
            let ctx = FieldCtx::prime_field(p).unwrap();
            for a in 0..p {
                let x = ctx.int(a as i64);
                match x.sqrt_exact() {
                    Some(s) => assert_eq!(s.square(), x, "p={p} a={a}"),
                    None => assert_eq!(legendre_symbol_u64(a, p), -1),
                }
            }
        }
    }

    #[test]
    fn square_class_product_matches_legendre_over_fp() {
        for p in [3u64, 5, 7, 11, 13] {
            let ctx = FieldCtx::prime_field(p).unwrap();
            let ns = least_nonresidue(p);
            let one = reduce_square_class(&ctx.int(1)).unwrap();
            let non = reduce_square_class(&ctx.int(ns as i64)).unwrap();
            assert_eq!(one.mul(&one), one);
            assert_eq!(one.mul(&non), non);
            assert_eq!(non.mul(&non), one);
        }
    }

    #[test]
    fn parse_elem_forms() {
        assert_eq!(rat("-3/6"), rat("-1/2"));
        let f7 = FieldCtx::prime_field(7).unwrap();
        assert_eq!(f7.parse_elem("-1/2").unwrap(), f7.int(3)); // -1/2 = 6*4 = 24 = 3 mod 7
        assert!(f7.parse_elem("1/7").is_err());
        assert!(FieldCtx::parse("F9").is_err());
        assert!(FieldCtx::parse("F2").is_err());
        assert_eq!(FieldCtx::parse("F13").unwrap(), FieldCtx::PrimeField(13));
    }

    #[test]
    fn is_prime_u64_small_and_carmichael() {
        assert!(is_prime_u64(2) && is_prime_u64(3) && is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1) && !is_prime_u64(561) && !is_prime_u64(1_000_001));
    }
}
