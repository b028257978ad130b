//! The local-global quadratic form kernel: Hilbert symbols, Hasse invariants,
//! isotropy and representability with exact witnesses, constructive
//! isometries, and quaternion-algebra comparison.
//!
//! Diagonal forms are the internal currency; non-diagonal Gram input is
//! diagonalized on ingestion. Over Q all decisions are local-global
//! (real place, 2, and the odd primes where some entry has odd valuation;
//! symbols are +1 everywhere else). Witness searches only run after the
//! decision side has said yes, so they can fail only with an explicit
//! budget error, never with a wrong answer.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{
    is_prime_u64, legendre_symbol_u64, mul_mod, reduce_square_class, sqrt_mod, FieldCtx,
    FieldElem, SquareClass,
};
use crate::linalg::{vec_is_zero, vec_scale, vec_sub, Matrix, Vector};

/// Default height bound for rational witness searches.
pub const DEFAULT_SEARCH_BUDGET: u64 = 5000;

/// A place of Q: the real place or a finite prime (2 allowed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    pub fn finite(p: u64) -> Result<Place> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidPlace(format!("{p} is not prime")));
        }
        Ok(Place::Finite(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "oo"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Nondegenerate diagonal ternary form, optionally remembering the original
/// Gram matrix and the basis change that diagonalized it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryForm {
    diag: [FieldElem; 3],
    provenance: Option<Box<Provenance>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub gram: Matrix,
    /// Columns are the diagonalizing basis: basis^T * gram * basis is diagonal.
    pub basis: Matrix,
}

/// Nondegenerate diagonal binary form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    diag: [FieldElem; 2],
}

/// An exact change of basis P with P^T * Gram(source) * P = Gram(target),
/// i.e. target = source o P. The identity is verified at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryWitness {
    matrix: Matrix,
}

impl IsometryWitness {
    pub fn new(target: &[FieldElem], source: &[FieldElem], matrix: Matrix) -> Result<Self> {
        let q = Matrix::diagonal(target);
        let qp = Matrix::diagonal(source);
        if matrix.transpose().mul(&qp).mul(&matrix) != q {
            return Err(Error::NotInGroup(
                "isometry witness fails P^T Q' P = Q".into(),
            ));
        }
        Ok(IsometryWitness { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

impl TernaryForm {
    pub fn new(d1: FieldElem, d2: FieldElem, d3: FieldElem) -> Result<Self> {
        if d1.ctx() != d2.ctx() || d2.ctx() != d3.ctx() {
            return Err(Error::FieldMismatch("mixed fields in form".into()));
        }
        if d1.is_zero() || d2.is_zero() || d3.is_zero() {
            return Err(Error::DegenerateInput("zero diagonal entry".into()));
        }
        Ok(TernaryForm {
            diag: [d1, d2, d3],
            provenance: None,
        })
    }

    pub fn from_slice(d: &[FieldElem]) -> Result<Self> {
        if d.len() != 3 {
            return Err(Error::Parse("ternary form needs 3 entries".into()));
        }
        TernaryForm::new(d[0].clone(), d[1].clone(), d[2].clone())
    }

    /// The reference form <1,1,1>.
    pub fn q0(ctx: FieldCtx) -> Self {
        TernaryForm::new(ctx.one(), ctx.one(), ctx.one()).unwrap()
    }

    pub fn ctx(&self) -> FieldCtx {
        self.diag[0].ctx()
    }

    pub fn diag(&self) -> &[FieldElem; 3] {
        &self.diag
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_deref()
    }

    pub fn gram(&self) -> Matrix {
        Matrix::diagonal(&self.diag)
    }

    /// Exact product of the diagonal entries.
    pub fn disc_elem(&self) -> FieldElem {
        self.diag[0].mul(&self.diag[1]).mul(&self.diag[2])
    }

    /// Square class of the discriminant.
    pub fn disc(&self) -> Result<SquareClass> {
        reduce_square_class(&self.disc_elem())
    }

    pub fn scale(&self, c: &FieldElem) -> Result<TernaryForm> {
        if c.is_zero() {
            return Err(Error::DegenerateInput("scaling by zero".into()));
        }
        TernaryForm::new(
            self.diag[0].mul(c),
            self.diag[1].mul(c),
            self.diag[2].mul(c),
        )
    }

    /// A scalar multiple with trivial discriminant class, plus the scalar used.
    pub fn normalized(&self) -> Result<(TernaryForm, FieldElem)> {
        let c = self.disc()?.to_elem();
        let scaled = self.scale(&c)?;
        debug_assert!(scaled.disc().map(|d| d.is_trivial()).unwrap_or(true));
        Ok((scaled, c))
    }

    pub fn evaluate(&self, v: &[FieldElem]) -> FieldElem {
        assert_eq!(v.len(), 3);
        let mut acc = self.ctx().zero();
        for (d, x) in self.diag.iter().zip(v) {
            acc = acc.add(&d.mul(&x.square()));
        }
        acc
    }

    /// Symmetric bilinear form with b(v, v) = q(v).
    pub fn bilinear(&self, u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
        let mut acc = self.ctx().zero();
        for i in 0..3 {
            acc = acc.add(&self.diag[i].mul(&u[i]).mul(&v[i]));
        }
        acc
    }

    /// Signature over Q as (positive entries, negative entries).
    pub fn signature(&self) -> Result<(usize, usize)> {
        if self.ctx() != FieldCtx::Rationals {
            return Err(Error::NotOverRationals("signature".into()));
        }
        let pos = self.diag.iter().filter(|d| d.sign() > 0).count();
        Ok((pos, 3 - pos))
    }

    pub fn hasse_invariant(&self, v: Place) -> Result<i32> {
        hasse_invariant(&self.diag, v)
    }

    pub fn is_isotropic(&self) -> Result<bool> {
        match self.ctx() {
            // every nondegenerate ternary form over F_p is isotropic
            FieldCtx::PrimeField(_) => Ok(true),
            FieldCtx::Rationals => global_isotropic(&self.diag),
        }
    }

    pub fn represents(&self, d: &FieldElem) -> Result<bool> {
        if d.is_zero() {
            return Err(Error::DegenerateInput(
                "representing 0 is the isotropy question".into(),
            ));
        }
        if d.ctx() != self.ctx() {
            return Err(Error::FieldMismatch("value from a different field".into()));
        }
        match self.ctx() {
            FieldCtx::PrimeField(_) => Ok(true), // universal in rank >= 2
            FieldCtx::Rationals => {
                if self.is_isotropic()? {
                    return Ok(true); // isotropic forms are universal
                }
                let four = [
                    self.diag[0].clone(),
                    self.diag[1].clone(),
                    self.diag[2].clone(),
                    d.neg(),
                ];
                global_isotropic(&four)
            }
        }
    }
}

impl fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{},{}>", self.diag[0], self.diag[1], self.diag[2])
    }
}

impl BinaryForm {
    pub fn new(d1: FieldElem, d2: FieldElem) -> Result<Self> {
        if d1.ctx() != d2.ctx() {
            return Err(Error::FieldMismatch("mixed fields in form".into()));
        }
        if d1.is_zero() || d2.is_zero() {
            return Err(Error::DegenerateInput("zero diagonal entry".into()));
        }
        Ok(BinaryForm { diag: [d1, d2] })
    }

    pub fn ctx(&self) -> FieldCtx {
        self.diag[0].ctx()
    }

    pub fn diag(&self) -> &[FieldElem; 2] {
        &self.diag
    }

    pub fn disc_elem(&self) -> FieldElem {
        self.diag[0].mul(&self.diag[1])
    }

    pub fn evaluate(&self, v: &[FieldElem]) -> FieldElem {
        assert_eq!(v.len(), 2);
        self.diag[0]
            .mul(&v[0].square())
            .add(&self.diag[1].mul(&v[1].square()))
    }

    pub fn hasse_invariant(&self, v: Place) -> Result<i32> {
        hasse_invariant(&self.diag, v)
    }

    /// Binary isotropy is decided algebraically: -disc must be a square.
    pub fn is_isotropic(&self) -> Result<bool> {
        Ok(self.disc_elem().neg().is_square())
    }

    pub fn represents(&self, d: &FieldElem) -> Result<bool> {
        if d.is_zero() {
            return Err(Error::DegenerateInput(
                "representing 0 is the isotropy question".into(),
            ));
        }
        if d.ctx() != self.ctx() {
            return Err(Error::FieldMismatch("value from a different field".into()));
        }
        match self.ctx() {
            FieldCtx::PrimeField(_) => Ok(true),
            FieldCtx::Rationals => {
                if self.is_isotropic()? {
                    return Ok(true);
                }
                let three = [self.diag[0].clone(), self.diag[1].clone(), d.neg()];
                global_isotropic(&three)
            }
        }
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.diag[0], self.diag[1])
    }
}

// ---- Hilbert symbols ----

/// Hilbert symbol (a, b)_v over Q: +1 iff z^2 = a x^2 + b y^2 has a
/// nontrivial solution over the completion at v.
pub fn hilbert_symbol(a: &FieldElem, b: &FieldElem, v: Place) -> Result<i32> {
    let (ar, br) = match (a, b) {
        (FieldElem::Rat(x), FieldElem::Rat(y)) => (x, y),
        _ => return Err(Error::NotOverRationals("hilbert symbol".into())),
    };
    if ar.is_zero() || br.is_zero() {
        return Err(Error::DegenerateInput("hilbert symbol of zero".into()));
    }
    hilbert_symbol_rat(ar, br, v)
}

fn hilbert_symbol_rat(a: &BigRational, b: &BigRational, v: Place) -> Result<i32> {
    match v {
        Place::Real => Ok(if a.is_negative() && b.is_negative() {
            -1
        } else {
            1
        }),
        Place::Finite(2) => {
            let (alpha, ua) = val_and_unit_mod8(a);
            let (beta, ub) = val_and_unit_mod8(b);
            let eps = |u: u64| ((u - 1) / 2) % 2; // u odd, in [1,7]
            let omega = |u: u64| u64::from(u == 3 || u == 5);
            let e = eps(ua) * eps(ub) + alpha * omega(ub) + beta * omega(ua);
            Ok(if e % 2 == 0 { 1 } else { -1 })
        }
        Place::Finite(p) => {
            if !is_prime_u64(p) {
                return Err(Error::InvalidPlace(format!("{p} is not prime")));
            }
            let (alpha, ua) = val_and_unit_mod_p(a, p);
            let (beta, ub) = val_and_unit_mod_p(b, p);
            let mut sign = 1i32;
            if alpha % 2 == 1 && beta % 2 == 1 && legendre_symbol_u64(p - 1, p) == -1 {
                sign = -sign;
            }
            if beta % 2 == 1 {
                sign *= legendre_symbol_u64(ua, p);
            }
            if alpha % 2 == 1 {
                sign *= legendre_symbol_u64(ub, p);
            }
            Ok(sign)
        }
    }
}

/// Hasse-Witt invariant of a diagonal form at v: the product of
/// hilbert_symbol(d_i, d_j, v) over i < j.
pub fn hasse_invariant(diag: &[FieldElem], v: Place) -> Result<i32> {
    let mut acc = 1i32;
    for i in 0..diag.len() {
        for j in (i + 1)..diag.len() {
            acc *= hilbert_symbol(&diag[i], &diag[j], v)?;
        }
    }
    Ok(acc)
}

/// p-adic valuation of a nonzero rational plus the unit part reduced mod p.
fn val_and_unit_mod_p(x: &BigRational, p: u64) -> (u64, u64) {
    let pb = BigInt::from(p);
    let (vn, n) = strip_prime(x.numer(), &pb);
    let (vd, d) = strip_prime(x.denom(), &pb);
    // parity is all the symbol formulas use, so a nonnegative residue works
    let val = if vn >= vd { vn - vd } else { vd - vn };
    let nr = n.mod_floor(&pb).to_u64().unwrap();
    let dr = d.mod_floor(&pb).to_u64().unwrap();
    let unit = mul_mod(nr, crate::field::pow_mod(dr, p - 2, p), p);
    (val, unit)
}

/// 2-adic valuation plus the odd part reduced mod 8 (d odd implies d^2 = 1 mod 8,
/// so n/d = n*d mod 8).
fn val_and_unit_mod8(x: &BigRational) -> (u64, u64) {
    let two = BigInt::from(2);
    let (vn, n) = strip_prime(x.numer(), &two);
    let (vd, d) = strip_prime(x.denom(), &two);
    let val = if vn >= vd { vn - vd } else { vd - vn };
    let eight = BigInt::from(8);
    let nr = n.mod_floor(&eight).to_u64().unwrap();
    let dr = d.mod_floor(&eight).to_u64().unwrap();
    (val, nr * dr % 8)
}

fn strip_prime(n: &BigInt, p: &BigInt) -> (u64, BigInt) {
    let mut m = n.clone();
    let mut v = 0u64;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

// ---- local-global isotropy over Q ----

/// Odd primes at which some entry has odd valuation; at every other odd
/// prime all local symbols are +1, so those places never obstruct. The
/// entries' squarefree representatives are what get factored, so a prime
/// appearing only to even powers never enters the place set.
fn odd_place_support(entries: &[FieldElem]) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    for e in entries {
        let class = reduce_square_class(e)?;
        let rep = match class {
            SquareClass::Rat(n) => n,
            _ => unreachable!("support is a rational-field computation"),
        };
        let mut v = u64::try_from(rep.magnitude()).map_err(|_| Error::FactorizationLimit {
            bound: u64::MAX,
            cofactor: rep.to_string(),
        })?;
        let mut d = 2u64;
        while d.saturating_mul(d) <= v {
            if v % d == 0 {
                if d % 2 == 1 {
                    out.insert(d);
                }
                while v % d == 0 {
                    v /= d;
                }
            }
            d = if d == 2 { 3 } else { d + 2 };
        }
        if v > 2 {
            out.insert(v);
        }
    }
    Ok(out)
}

/// Hasse-Minkowski over Q for a nondegenerate diagonal form of rank 2-4.
fn global_isotropic(entries: &[FieldElem]) -> Result<bool> {
    debug_assert!((2..=4).contains(&entries.len()));
    // real place: definite forms are anisotropic
    let pos = entries.iter().filter(|d| d.sign() > 0).count();
    if pos == 0 || pos == entries.len() {
        return Ok(false);
    }
    if entries.len() == 2 {
        return Ok(entries[0].mul(&entries[1]).neg().is_square());
    }
    let mut places = vec![Place::Finite(2)];
    places.extend(odd_place_support(entries)?.into_iter().map(Place::Finite));
    for v in places {
        if !local_isotropic_finite(entries, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn local_isotropic_finite(entries: &[FieldElem], v: Place) -> Result<bool> {
    let disc: FieldElem = entries
        .iter()
        .fold(entries[0].ctx().one(), |acc, d| acc.mul(d));
    let eps = hasse_invariant(entries, v)?;
    let minus_one = entries[0].ctx().int(-1);
    match entries.len() {
        3 => {
            let rhs = hilbert_symbol(&minus_one, &disc.neg(), v)?;
            Ok(eps == rhs)
        }
        4 => {
            let p = match v {
                Place::Finite(p) => p,
                Place::Real => unreachable!("real place handled by signature"),
            };
            let disc_square = rational_is_square_in_qp(disc.as_rational().unwrap(), p);
            let rhs = -hilbert_symbol(&minus_one, &minus_one, v)?;
            Ok(!(disc_square && eps == rhs))
        }
        _ => unreachable!(),
    }
}

fn rational_is_square_in_qp(x: &BigRational, p: u64) -> bool {
    if p == 2 {
        let (val, u8) = val_and_unit_mod8(x);
        val % 2 == 0 && u8 == 1
    } else {
        let (val, unit) = val_and_unit_mod_p(x, p);
        val % 2 == 0 && legendre_symbol_u64(unit, p) == 1
    }
}

// ---- isometry ----

/// Forms are isometric over Q iff dimension, discriminant class, signature and
/// every local Hasse invariant agree; over F_p iff the discriminants agree.
pub fn isometric(q: &TernaryForm, q2: &TernaryForm) -> Result<bool> {
    if q.ctx() != q2.ctx() {
        return Err(Error::FieldMismatch("forms over different fields".into()));
    }
    match q.ctx() {
        FieldCtx::PrimeField(_) => Ok(q.disc()? == q2.disc()?),
        FieldCtx::Rationals => {
            if q.disc()? != q2.disc()? {
                return Ok(false);
            }
            if q.signature()? != q2.signature()? {
                return Ok(false);
            }
            let mut entries: Vec<FieldElem> = q.diag().to_vec();
            entries.extend_from_slice(q2.diag());
            let mut places = vec![Place::Finite(2)];
            places.extend(odd_place_support(&entries)?.into_iter().map(Place::Finite));
            for v in places {
                if q.hasse_invariant(v)? != q2.hasse_invariant(v)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Quaternion algebras (a,b) and (c,d) are isomorphic iff their norm-one
/// conics agree, i.e. <-a,-b,ab> and <-c,-d,cd> are isometric.
pub fn quaternion_isomorphic(
    a: &FieldElem,
    b: &FieldElem,
    c: &FieldElem,
    d: &FieldElem,
) -> Result<bool> {
    for x in [a, b, c, d] {
        if x.is_zero() {
            return Err(Error::DegenerateInput("zero quaternion parameter".into()));
        }
    }
    let qa = TernaryForm::new(a.neg(), b.neg(), a.mul(b))?;
    let qb = TernaryForm::new(c.neg(), d.neg(), c.mul(d))?;
    isometric(&qa, &qb)
}

// ---- witness searches ----

/// Nonzero v with q(v) = 0 for an isotropic ternary form.
pub fn find_isotropy_vector(q: &TernaryForm) -> Result<Vector> {
    find_isotropy_vector_with_budget(q, DEFAULT_SEARCH_BUDGET)
}

pub fn find_isotropy_vector_with_budget(q: &TernaryForm, budget: u64) -> Result<Vector> {
    if !q.is_isotropic()? {
        return Err(Error::NotRepresentable(format!("{q} is anisotropic")));
    }
    let v = match q.ctx() {
        FieldCtx::PrimeField(p) => {
            let d: Vec<u64> = q.diag().iter().map(|x| x.as_residue().unwrap()).collect();
            fp_ternary_isotropy(&d, p)
        }
        FieldCtx::Rationals => {
            let (coeffs, _) = integerized(q.diag());
            let (x, y, z) = search_isotropy_int(&coeffs, budget)
                .ok_or(Error::SearchBudgetExceeded(budget))?;
            vec![
                FieldCtx::Rationals.int(x),
                FieldCtx::Rationals.int(y),
                FieldCtx::Rationals.int(z),
            ]
        }
    };
    debug_assert!(q.evaluate(&v).is_zero() && !vec_is_zero(&v));
    Ok(v)
}

/// Exact v with q(v) = d, verified by evaluation before return.
/// Representability is decided first via local symbols; the search can then
/// only fail with an explicit budget error.
pub fn find_representation_vector(q: &TernaryForm, d: &FieldElem) -> Result<Vector> {
    find_representation_vector_with_budget(q, d, DEFAULT_SEARCH_BUDGET)
}

pub fn find_representation_vector_with_budget(
    q: &TernaryForm,
    d: &FieldElem,
    budget: u64,
) -> Result<Vector> {
    if !q.represents(d)? {
        return Err(Error::NotRepresentable(format!("{q} does not represent {d}")));
    }
    let v = match q.ctx() {
        FieldCtx::PrimeField(p) => {
            let diag: Vec<u64> = q.diag().iter().map(|x| x.as_residue().unwrap()).collect();
            fp_ternary_represent(&diag, d.as_residue().unwrap(), p)
        }
        FieldCtx::Rationals => {
            if q.is_isotropic()? {
                // split a hyperbolic plane off an isotropy vector: everything
                // is represented on it by solving one linear equation
                let iso = find_isotropy_vector_with_budget(q, budget)?;
                hyperbolic_represent(
                    |u, v| q.bilinear(u, v),
                    &iso,
                    standard_basis(q.ctx(), 3),
                    d,
                )
            } else {
                let (coeffs, lcm) = integerized(q.diag());
                let (x, y, z, w) = search_represent_int(&coeffs, &lcm, d, budget)
                    .ok_or(Error::SearchBudgetExceeded(budget))?;
                let wf = FieldCtx::Rationals.int(w);
                vec![
                    FieldCtx::Rationals.int(x).div(&wf),
                    FieldCtx::Rationals.int(y).div(&wf),
                    FieldCtx::Rationals.int(z).div(&wf),
                ]
            }
        }
    };
    let got = q.evaluate(&v);
    if &got != d {
        return Err(Error::NotRepresentable(format!(
            "witness self-check failed: q(v) = {got} wanted {d}"
        )));
    }
    Ok(v)
}

/// Exact (x, y) with d1 x^2 + d2 y^2 = d over the base field.
pub fn find_binary_representation_vector(
    q: &BinaryForm,
    d: &FieldElem,
    budget: u64,
) -> Result<Vector> {
    if !q.represents(d)? {
        return Err(Error::NotRepresentable(format!("{q} does not represent {d}")));
    }
    let v = match q.ctx() {
        FieldCtx::PrimeField(p) => {
            let diag: Vec<u64> = q.diag().iter().map(|x| x.as_residue().unwrap()).collect();
            let (y, z) = fp_binary_represent(diag[0], diag[1], d.as_residue().unwrap(), p)
                .expect("binary forms over F_p are universal");
            vec![
                FieldElem::Mod { p, r: y },
                FieldElem::Mod { p, r: z },
            ]
        }
        FieldCtx::Rationals => {
            if q.is_isotropic()? {
                let iso = binary_isotropy_vector(q);
                hyperbolic_represent(
                    |u, v| {
                        q.diag()[0]
                            .mul(&u[0])
                            .mul(&v[0])
                            .add(&q.diag()[1].mul(&u[1]).mul(&v[1]))
                    },
                    &iso,
                    standard_basis(q.ctx(), 2),
                    d,
                )
            } else {
                let (coeffs, lcm) = integerized(q.diag());
                let (x, y, w) = search_represent_int_binary(&coeffs, &lcm, d, budget)
                    .ok_or(Error::SearchBudgetExceeded(budget))?;
                let wf = FieldCtx::Rationals.int(w);
                vec![
                    FieldCtx::Rationals.int(x).div(&wf),
                    FieldCtx::Rationals.int(y).div(&wf),
                ]
            }
        }
    };
    let got = q.evaluate(&v);
    if &got != d {
        return Err(Error::NotRepresentable(
            "binary witness self-check failed".into(),
        ));
    }
    Ok(v)
}

fn standard_basis(ctx: FieldCtx, n: usize) -> Vec<Vector> {
    (0..n)
        .map(|i| {
            let mut v = vec![ctx.zero(); n];
            v[i] = ctx.one();
            v
        })
        .collect()
}

/// Given an isotropy vector `iso` and candidate vectors, represents d on the
/// hyperbolic plane spanned by `iso` and any u with b(iso, u) != 0:
/// q(a*iso + u) = 2a*b(iso, u) + q(u), linear in a.
fn hyperbolic_represent<F>(bilinear: F, iso: &Vector, candidates: Vec<Vector>, d: &FieldElem) -> Vector
where
    F: Fn(&[FieldElem], &[FieldElem]) -> FieldElem,
{
    let ctx = d.ctx();
    let u = candidates
        .into_iter()
        .find(|u| !bilinear(iso, u).is_zero())
        .expect("nondegenerate form: isotropy vector pairs with some basis vector");
    let b = bilinear(iso, &u);
    let qu = bilinear(&u, &u);
    let a = d.sub(&qu).div(&ctx.int(2).mul(&b));
    let mut v = vec_scale(iso, &a);
    for i in 0..v.len() {
        v[i] = v[i].add(&u[i]);
    }
    v
}

fn binary_isotropy_vector(q: &BinaryForm) -> Vector {
    // -d1/d2 is a square; then (1, s) with s^2 = -d1/d2 is a zero
    let s = q.diag()[0]
        .neg()
        .div(&q.diag()[1])
        .sqrt_exact()
        .expect("isotropic binary form");
    vec![q.ctx().one(), s]
}

// integer models: clear denominators so searches run over integers.
// Returns (L*d_i as integers, L) for L the lcm of the entry denominators.
fn integerized(diag: &[FieldElem]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for d in diag {
        lcm = lcm.lcm(d.as_rational().unwrap().denom());
    }
    let coeffs = diag
        .iter()
        .map(|d| {
            let r = d.as_rational().unwrap();
            r.numer() * (&lcm / r.denom())
        })
        .collect();
    (coeffs, lcm)
}

fn zigzag(h: i64) -> Vec<i64> {
    let mut v = Vec::with_capacity((2 * h + 1) as usize);
    v.push(0);
    for k in 1..=h {
        v.push(k);
        v.push(-k);
    }
    v
}

fn search_isotropy_int(coeffs: &[BigInt], budget: u64) -> Option<(i64, i64, i64)> {
    let eval_zero = |x: i64, y: i64, z: i64| -> bool {
        let acc = &coeffs[0] * BigInt::from(x) * BigInt::from(x)
            + &coeffs[1] * BigInt::from(y) * BigInt::from(y)
            + &coeffs[2] * BigInt::from(z) * BigInt::from(z);
        acc.is_zero()
    };
    let fast: Option<Vec<i128>> = coeffs
        .iter()
        .map(|c| c.to_i128().filter(|v| v.abs() < (1 << 64)))
        .collect();
    for h in 1..=(budget as i64) {
        for z in zigzag(h) {
            for y in zigzag(h) {
                for x in zigzag(h) {
                    if x.abs().max(y.abs()).max(z.abs()) != h {
                        continue;
                    }
                    let hit = match &fast {
                        Some(c) => {
                            c[0] * (x as i128) * (x as i128)
                                + c[1] * (y as i128) * (y as i128)
                                + c[2] * (z as i128) * (z as i128)
                                == 0
                        }
                        None => eval_zero(x, y, z),
                    };
                    if hit {
                        return Some((x, y, z));
                    }
                }
            }
        }
    }
    None
}

fn search_represent_int(
    coeffs: &[BigInt],
    lcm: &BigInt,
    d: &FieldElem,
    budget: u64,
) -> Option<(i64, i64, i64, i64)> {
    // With A_i = L*d_i integral: q(v) = d at v = (x/w, y/w, z/w) iff
    // den(d) * sum A_i x_i^2 = L * num(d) * w^2.
    let r = d.as_rational().unwrap();
    let den = r.denom().clone();
    let a: Vec<BigInt> = coeffs.iter().map(|c| c * &den).collect();
    let target = lcm * r.numer();
    let fast_a: Option<Vec<i128>> = a
        .iter()
        .map(|c| c.to_i128().filter(|v| v.abs() < (1 << 64)))
        .collect();
    let fast_t = target.to_i128().filter(|v| v.abs() < (1 << 64));
    for h in 1..=(budget as i64) {
        for w in 1..=h {
            for z in zigzag(h) {
                for y in zigzag(h) {
                    for x in zigzag(h) {
                        if x.abs().max(y.abs()).max(z.abs()).max(w) != h {
                            continue;
                        }
                        let hit = match (&fast_a, fast_t) {
                            (Some(c), Some(t)) => {
                                c[0] * (x as i128) * (x as i128)
                                    + c[1] * (y as i128) * (y as i128)
                                    + c[2] * (z as i128) * (z as i128)
                                    == t * (w as i128) * (w as i128)
                            }
                            _ => {
                                &a[0] * BigInt::from(x) * BigInt::from(x)
                                    + &a[1] * BigInt::from(y) * BigInt::from(y)
                                    + &a[2] * BigInt::from(z) * BigInt::from(z)
                                    == &target * BigInt::from(w) * BigInt::from(w)
                            }
                        };
                        if hit {
                            return Some((x, y, z, w));
                        }
                    }
                }
            }
        }
    }
    None
}

fn search_represent_int_binary(
    coeffs: &[BigInt],
    lcm: &BigInt,
    d: &FieldElem,
    budget: u64,
) -> Option<(i64, i64, i64)> {
    let r = d.as_rational().unwrap();
    let den = r.denom().clone();
    let a: Vec<BigInt> = coeffs.iter().map(|c| c * &den).collect();
    let target = lcm * r.numer();
    let fast_a: Option<Vec<i128>> = a
        .iter()
        .map(|c| c.to_i128().filter(|v| v.abs() < (1 << 64)))
        .collect();
    let fast_t = target.to_i128().filter(|v| v.abs() < (1 << 64));
    for h in 1..=(budget as i64) {
        for w in 1..=h {
            for y in zigzag(h) {
                for x in zigzag(h) {
                    if x.abs().max(y.abs()).max(w) != h {
                        continue;
                    }
                    let hit = match (&fast_a, fast_t) {
                        (Some(c), Some(t)) => {
                            c[0] * (x as i128) * (x as i128) + c[1] * (y as i128) * (y as i128)
                                == t * (w as i128) * (w as i128)
                        }
                        _ => {
                            &a[0] * BigInt::from(x) * BigInt::from(x)
                                + &a[1] * BigInt::from(y) * BigInt::from(y)
                                == &target * BigInt::from(w) * BigInt::from(w)
                        }
                    };
                    if hit {
                        return Some((x, y, w));
                    }
                }
            }
        }
    }
    None
}

// F_p solvers: binary nondegenerate forms over F_p are universal, so these
// terminate after a short scan with a square-root test.

fn fp_binary_represent(d1: u64, d2: u64, t: u64, p: u64) -> Option<(u64, u64)> {
    let d2_inv = crate::field::pow_mod(d2, p - 2, p);
    for y in 0..p {
        let rhs = (t + p - mul_mod(d1, mul_mod(y, y, p), p) % p) % p;
        let z2 = mul_mod(rhs, d2_inv, p);
        if let Some(z) = sqrt_mod(z2, p) {
            return Some((y, z));
        }
    }
    None
}

fn fp_ternary_represent(diag: &[u64], t: u64, p: u64) -> Vector {
    // x = 0 already succeeds: the binary tail is universal
    let (y, z) = fp_binary_represent(diag[1], diag[2], t, p).expect("universal binary tail");
    vec![
        FieldElem::Mod { p, r: 0 },
        FieldElem::Mod { p, r: y },
        FieldElem::Mod { p, r: z },
    ]
}

fn fp_ternary_isotropy(diag: &[u64], p: u64) -> Vector {
    // with z = 1: d1 x^2 + d2 y^2 = -d3 is solvable since the binary form is universal
    let target = (p - diag[2] % p) % p;
    if target == 0 {
        unreachable!("nondegenerate entries are nonzero");
    }
    let (x, y) = fp_binary_represent(diag[0], diag[1], target, p).expect("universal binary");
    vec![
        FieldElem::Mod { p, r: x },
        FieldElem::Mod { p, r: y },
        FieldElem::Mod { p, r: 1 },
    ]
}

// ---- constructive isometry ----

/// Exact P with P^T * Gram(q') * P = Gram(q): find a vector of the right
/// value, split off its orthogonal complement, recurse on the binary rest
/// (constructive Witt decomposition).
pub fn explicit_isometry(q: &TernaryForm, q2: &TernaryForm) -> Result<IsometryWitness> {
    explicit_isometry_with_budget(q, q2, DEFAULT_SEARCH_BUDGET)
}

pub fn explicit_isometry_with_budget(
    q: &TernaryForm,
    q2: &TernaryForm,
    budget: u64,
) -> Result<IsometryWitness> {
    if !isometric(q, q2)? {
        return Err(Error::NotRepresentable(format!("{q} is not isometric to {q2}")));
    }
    let ctx = q.ctx();
    if q.diag() == q2.diag() {
        return IsometryWitness::new(q.diag(), q2.diag(), Matrix::identity(ctx, 3));
    }
    let d = q.diag();
    // column 1: v1 with q2(v1) = d[0]
    let v1 = find_representation_vector_with_budget(q2, &d[0], budget)?;
    let (u2, u3) = orthogonal_complement_basis(q2, &v1);
    let g2 = q2.evaluate(&u2);
    let g3 = q2.evaluate(&u3);
    // the complement <g2, g3> is isometric to <d1, d2> by Witt cancellation
    let bin = BinaryForm::new(g2.clone(), g3.clone())?;
    let xy = find_binary_representation_vector(&bin, &d[1], budget)?;
    let mut v2 = vec_scale(&u2, &xy[0]);
    for i in 0..3 {
        v2[i] = v2[i].add(&u3[i].mul(&xy[1]));
    }
    // complement of v2 inside the plane: kill b(v2, .) on span(u2, u3)
    let mut v3 = vec_scale(&u2, &xy[1].mul(&g3));
    for i in 0..3 {
        v3[i] = v3[i].sub(&u3[i].mul(&xy[0].mul(&g2)));
    }
    if vec_is_zero(&v3) {
        return Err(Error::DegenerateInput("complement collapsed".into()));
    }
    // last value differs from d[2] by an exact square; rescale
    let g = q2.evaluate(&v3);
    let s = g
        .div(&d[2])
        .sqrt_exact()
        .expect("discriminant match forces a square ratio");
    let v3 = vec_scale(&v3, &s.inv().expect("nonzero scale"));
    let p = Matrix::from_columns(&[v1, v2, v3])?;
    IsometryWitness::new(d, q2.diag(), p)
}

/// Orthogonal complement of an anisotropic vector v inside q's space:
/// project two standard basis vectors off v, then orthogonalize the pair.
pub fn orthogonal_complement_basis(q: &TernaryForm, v: &Vector) -> (Vector, Vector) {
    let ctx = q.ctx();
    let qv = q.evaluate(v);
    assert!(!qv.is_zero(), "complement needs an anisotropic vector");
    let pivot = (0..3).find(|&i| !v[i].is_zero()).expect("nonzero vector");
    let mut raw = Vec::new();
    for i in 0..3 {
        if i == pivot {
            continue;
        }
        let mut e = vec![ctx.zero(); 3];
        e[i] = ctx.one();
        let c = q.bilinear(v, &e).div(&qv);
        raw.push(vec_sub(&e, &vec_scale(v, &c)));
    }
    let (w2, w3) = (raw.remove(0), raw.remove(0));
    orthogonalize_plane_pair(q, w2, w3)
}

/// Turns a basis of a nondegenerate plane into an orthogonal one.
fn orthogonalize_plane_pair(q: &TernaryForm, w2: Vector, w3: Vector) -> (Vector, Vector) {
    let q2 = q.evaluate(&w2);
    let q3 = q.evaluate(&w3);
    let (a, b) = if !q2.is_zero() {
        (w2, w3)
    } else if !q3.is_zero() {
        (w3, w2)
    } else {
        // both isotropic: their sum is not, since b(w2, w3) != 0 on a
        // nondegenerate plane with char != 2
        let mut s = w2.clone();
        for i in 0..3 {
            s[i] = s[i].add(&w3[i]);
        }
        (s, w2)
    };
    let qa = q.evaluate(&a);
    let c = q.bilinear(&a, &b).div(&qa);
    let b2 = vec_sub(&b, &vec_scale(&a, &c));
    debug_assert!(q.bilinear(&a, &b2).is_zero());
    (a, b2)
}

// ---- diagonalization of Gram input ----

/// Symmetric Gaussian elimination over k with the standard pivot repair when
/// all remaining diagonal entries vanish. Returns the diagonal form and the
/// exact change of basis P with P^T * G * P = Gram(diagonal).
pub fn diagonalize(gram: &Matrix) -> Result<(TernaryForm, IsometryWitness)> {
    if gram.dim() != 3 {
        return Err(Error::Parse("expected a 3x3 Gram matrix".into()));
    }
    if gram != &gram.transpose() {
        return Err(Error::DegenerateInput("Gram matrix is not symmetric".into()));
    }
    if gram.det().is_zero() {
        return Err(Error::DegenerateInput("singular Gram matrix".into()));
    }
    let ctx = gram.ctx();
    let mut basis = Matrix::identity(ctx, 3);
    let current = |basis: &Matrix| basis.transpose().mul(gram).mul(basis);
    for k in 0..3 {
        let mut a = current(&basis);
        if a.at(k, k).is_zero() {
            if let Some(j) = ((k + 1)..3).find(|&j| !a.at(j, j).is_zero()) {
                // swap basis columns k and j
                let ck = basis.column(k);
                let cj = basis.column(j);
                for i in 0..3 {
                    basis.set(i, k, cj[i].clone());
                    basis.set(i, j, ck[i].clone());
                }
            } else {
                let j = ((k + 1)..3)
                    .find(|&j| !a.at(k, j).is_zero())
                    .expect("nondegenerate block has a nonzero pairing");
                // pivot repair: e_k += e_j gives diagonal entry 2*a_kj != 0
                for i in 0..3 {
                    let v = basis.at(i, k).add(basis.at(i, j));
                    basis.set(i, k, v);
                }
            }
            a = current(&basis);
        }
        let pivot = a.at(k, k).clone();
        for j in (k + 1)..3 {
            if a.at(k, j).is_zero() {
                continue;
            }
            let c = a.at(k, j).div(&pivot);
            for i in 0..3 {
                let v = basis.at(i, j).sub(&basis.at(i, k).mul(&c));
                basis.set(i, j, v);
            }
        }
    }
    let d = basis.transpose().mul(gram).mul(&basis);
    let mut form = TernaryForm::new(
        d.at(0, 0).clone(),
        d.at(1, 1).clone(),
        d.at(2, 2).clone(),
    )?;
    form.provenance = Some(Box::new(Provenance {
        gram: gram.clone(),
        basis: basis.clone(),
    }));
    let witness = IsometryWitness {
        matrix: basis.clone(),
    };
    // exact congruence self-check
    if basis.transpose().mul(gram).mul(&basis) != form.gram() {
        return Err(Error::NotInGroup("diagonalization self-check failed".into()));
    }
    Ok((form, witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn form(d: [i64; 3]) -> TernaryForm {
        TernaryForm::new(q().int(d[0]), q().int(d[1]), q().int(d[2])).unwrap()
    }

    #[test]
    fn hilbert_trivial_and_real() {
        let one = q().one();
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(7)] {
            for b in [-7i64, -1, 2, 5, 30] {
                assert_eq!(hilbert_symbol(&one, &q().int(b), v).unwrap(), 1);
            }
        }
        let m1 = q().int(-1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Real).unwrap(), -1);
    }

    #[test]
    fn hilbert_minus_one_minus_one_at_two() {
        // oracle: z^2 + x^2 + y^2 = 0 mod 8 has no solution with some coordinate odd
        let mut has_primitive = false;
        for z in 0..8u32 {
            for x in 0..8u32 {
                for y in 0..8u32 {
                    if (z * z + x * x + y * y) % 8 == 0 && (x % 2 == 1 || y % 2 == 1 || z % 2 == 1)
                    {
                        has_primitive = true;
                    }
                }
            }
        }
        assert!(!has_primitive);
        let m1 = q().int(-1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Finite(2)).unwrap(), -1);
    }

    #[test]
    fn hilbert_rejects_bad_input() {
        assert!(hilbert_symbol(&q().zero(), &q().one(), Place::Real).is_err());
        assert!(hilbert_symbol(&q().one(), &q().one(), Place::Finite(15)).is_err());
        let f7 = FieldCtx::prime_field(7).unwrap();
        assert!(hilbert_symbol(&f7.one(), &f7.one(), Place::Real).is_err());
    }

    #[test]
    fn hasse_examples() {
        let unit = form([1, 1, 1]);
        for p in [3, 5, 7, 11] {
            assert_eq!(unit.hasse_invariant(Place::Finite(p)).unwrap(), 1);
        }
        let lorentz = form([-1, -1, 1]);
        assert_eq!(lorentz.hasse_invariant(Place::Real).unwrap(), -1);
        assert_eq!(lorentz.hasse_invariant(Place::Finite(2)).unwrap(), -1);
    }

    #[test]
    fn isotropy_examples() {
        assert!(!form([1, 1, 1]).is_isotropic().unwrap());
        let lorentz = form([-1, -1, 1]);
        assert!(lorentz.is_isotropic().unwrap());
        let w = find_isotropy_vector(&lorentz).unwrap();
        assert!(lorentz.evaluate(&w).is_zero());
        assert!(!vec_is_zero(&w));
        // anisotropic over the 7-adics: -1 is a nonsquare mod 7
        assert_eq!(legendre_symbol_u64(6, 7), -1);
        assert!(!form([1, 1, -7]).is_isotropic().unwrap());
    }

    #[test]
    fn represents_examples() {
        let unit = form([1, 1, 1]);
        assert!(unit.represents(&q().int(3)).unwrap());
        // 7 = 4^0(8*0+7) is not a sum of three rational squares
        assert!(!unit.represents(&q().int(7)).unwrap());
        assert!(form([-1, -1, 1]).represents(&q().int(5)).unwrap());
        assert!(unit.represents(&q().zero()).is_err());
    }

    #[test]
    fn representation_vectors() {
        let unit = form([1, 1, 1]);
        let v = find_representation_vector(&unit, &q().int(3)).unwrap();
        assert_eq!(v, vec![q().one(), q().one(), q().one()]);
        let lorentz = form([-1, -1, 1]);
        let v = find_representation_vector(&lorentz, &q().int(5)).unwrap();
        assert_eq!(lorentz.evaluate(&v), q().int(5));
        let bin = BinaryForm::new(q().int(1), q().int(3)).unwrap();
        let v = find_binary_representation_vector(&bin, &q().int(7), 100).unwrap();
        assert_eq!(v, vec![q().int(2), q().int(1)]);
        assert!(matches!(
            find_representation_vector(&unit, &q().int(7)),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn isometric_examples() {
        let unit = form([1, 1, 1]);
        assert!(isometric(&unit, &unit).unwrap());
        assert!(!isometric(&unit, &form([-1, -1, 1])).unwrap());
        assert!(isometric(&unit, &form([1, 4, 9])).unwrap());
        let f5 = FieldCtx::prime_field(5).unwrap();
        let a = TernaryForm::new(f5.int(1), f5.int(1), f5.int(1)).unwrap();
        let b = TernaryForm::new(f5.int(1), f5.int(2), f5.int(3)).unwrap();
        // disc 6 = 1 mod 5 is a square, so both have trivial disc
        assert!(isometric(&a, &b).unwrap());
        assert!(isometric(&a, &unit).is_err());
    }

    #[test]
    fn explicit_isometry_examples() {
        let unit = form([1, 1, 1]);
        let id = explicit_isometry(&unit, &unit).unwrap();
        assert!(id.matrix().is_identity());
        let scaled = form([1, 4, 9]);
        let w = explicit_isometry(&unit, &scaled).unwrap();
        assert_eq!(
            w.matrix()
                .transpose()
                .mul(&scaled.gram())
                .mul(w.matrix()),
            unit.gram()
        );
        // over F_p
        let f7 = FieldCtx::prime_field(7).unwrap();
        let a = TernaryForm::new(f7.int(1), f7.int(1), f7.int(1)).unwrap();
        let b = TernaryForm::new(f7.int(2), f7.int(2), f7.int(1)).unwrap();
        assert!(isometric(&a, &b).unwrap());
        let w = explicit_isometry(&a, &b).unwrap();
        assert_eq!(
            w.matrix().transpose().mul(&b.gram()).mul(w.matrix()),
            a.gram()
        );
    }

    #[test]
    fn diagonalize_examples() {
        let ctx = q();
        // already diagonal: identity witness
        let g = Matrix::diagonal(&[ctx.int(2), ctx.int(-3), ctx.int(5)]);
        let (f, w) = diagonalize(&g).unwrap();
        assert_eq!(f.diag(), &[ctx.int(2), ctx.int(-3), ctx.int(5)]);
        assert!(w.matrix().is_identity());

        // hyperbolic 2x2 block plus <1>
        let rows = vec![
            vec![ctx.int(0), ctx.int(1), ctx.int(0)],
            vec![ctx.int(1), ctx.int(0), ctx.int(0)],
            vec![ctx.int(0), ctx.int(0), ctx.int(1)],
        ];
        let g = Matrix::from_rows(rows).unwrap();
        let (f, w) = diagonalize(&g).unwrap();
        assert_eq!(
            w.matrix().transpose().mul(&g).mul(w.matrix()),
            f.gram()
        );
        let mut classes: Vec<SquareClass> = f
            .diag()
            .iter()
            .map(|d| reduce_square_class(d).unwrap())
            .collect();
        classes.sort();
        let mut expect = vec![
            SquareClass::Rat(BigInt::from(1)),
            SquareClass::Rat(BigInt::from(2)),
            SquareClass::Rat(BigInt::from(-2)),
        ];
        expect.sort();
        assert_eq!(classes, expect);

        // one elimination step
        let rows = vec![
            vec![ctx.int(1), ctx.int(1), ctx.int(0)],
            vec![ctx.int(1), ctx.int(2), ctx.int(0)],
            vec![ctx.int(0), ctx.int(0), ctx.int(1)],
        ];
        let g = Matrix::from_rows(rows).unwrap();
        let (f, _) = diagonalize(&g).unwrap();
        assert_eq!(f.diag(), &[ctx.int(1), ctx.int(1), ctx.int(1)]);

        let singular = Matrix::diagonal(&[ctx.int(1), ctx.int(0), ctx.int(1)]);
        assert!(diagonalize(&singular).is_err());
    }

    #[test]
    fn quaternion_examples() {
        let (a, b) = (q().int(3), q().int(5));
        assert!(quaternion_isomorphic(&a, &b, &b, &a).unwrap());
        assert!(!quaternion_isomorphic(&q().int(1), &q().int(1), &q().int(-1), &q().int(-1))
            .unwrap());
        assert!(quaternion_isomorphic(&q().int(-1), &q().int(-1), &q().int(-1), &q().int(-2))
            .unwrap());
        assert!(quaternion_isomorphic(&q().zero(), &b, &b, &a).is_err());
    }

    #[test]
    fn fp_universality_exhaustive() {
        for p in [3u64, 5, 7, 11, 13] {
            let ctx = FieldCtx::prime_field(p).unwrap();
            let f = TernaryForm::new(ctx.int(1), ctx.int(2), ctx.int(p as i64 - 1)).unwrap();
            assert!(f.is_isotropic().unwrap());
            for t in 1..p {
                let t = ctx.int(t as i64);
                let v = find_representation_vector(&f, &t).unwrap();
                assert_eq!(f.evaluate(&v), t);
            }
            let w = find_isotropy_vector(&f).unwrap();
            assert!(f.evaluate(&w).is_zero() && !vec_is_zero(&w));
        }
    }

    #[test]
    fn normalized_has_trivial_disc() {
        for d in [[2i64, 3, 5], [-1, -1, 1], [2, -3, 7], [1, 1, 1]] {
            let f = form(d);
            let (n, c) = f.normalized().unwrap();
            assert!(n.disc().unwrap().is_trivial());
            assert_eq!(n.diag()[0], f.diag()[0].mul(&c));
        }
    }
}
