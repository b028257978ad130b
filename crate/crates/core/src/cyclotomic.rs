//! Trace data of roots of unity: alpha_n = (w + w^-1)/2 for a primitive n-th
//! root of unity w, beta_n = alpha_n^2 - 1, and the square class of
//! (alpha_n + 1)/2.
//!
//! Over Q only n in {1,2,3,4,6} admit alpha_n. Over F_p an order-n element
//! with trace in F_p exists iff p = +-1 mod n (its companion quadratic
//! x^2 - 2*alpha*x + 1 has a root of exact order n in F_p or F_{p^2}); the
//! canonical alpha is the least residue among the valid choices, which makes
//! every run reproducible.

use crate::error::{Error, Result};
use crate::field::{
    legendre_symbol_u64, mul_mod, reduce_square_class, sqrt_mod, FieldCtx, FieldElem,
    SquareClass,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicData {
    pub n: u32,
    pub alpha: FieldElem,
    pub beta: FieldElem,
    /// Square class of (alpha + 1)/2; absent exactly when that value is 0 (n = 2).
    pub half_alpha_plus_one_class: Option<SquareClass>,
}

impl CyclotomicData {
    fn build(n: u32, alpha: FieldElem) -> Result<CyclotomicData> {
        let ctx = alpha.ctx();
        let beta = alpha.square().sub(&ctx.one());
        debug_assert!(n < 3 || !beta.is_zero());
        let half = alpha.add(&ctx.one()).div(&ctx.int(2));
        let class = if half.is_zero() {
            None
        } else {
            Some(reduce_square_class(&half)?)
        };
        Ok(CyclotomicData {
            n,
            alpha,
            beta,
            half_alpha_plus_one_class: class,
        })
    }

    /// The class of (alpha_n + 1)/2, defined for n >= 3 (and n = 1).
    pub fn half_alpha_plus_one(&self) -> Result<&SquareClass> {
        self.half_alpha_plus_one_class
            .as_ref()
            .ok_or_else(|| Error::DegenerateInput("(alpha+1)/2 vanishes for n = 2".into()))
    }
}

/// Computes alpha_n and beta_n over k, or reports that no order-n trace
/// exists in k (a value, not an error). p | n is an error: the order-n
/// analysis requires n prime to the characteristic.
pub fn alpha_beta(n: u32, ctx: FieldCtx) -> Result<Option<CyclotomicData>> {
    if n == 0 {
        return Err(Error::Parse("order must be positive".into()));
    }
    match ctx {
        FieldCtx::Rationals => {
            let alpha = match n {
                1 => ctx.one(),
                2 => ctx.int(-1),
                3 => ctx.parse_elem("-1/2")?,
                4 => ctx.zero(),
                6 => ctx.parse_elem("1/2")?,
                _ => return Ok(None),
            };
            Ok(Some(CyclotomicData::build(n, alpha)?))
        }
        FieldCtx::PrimeField(p) => {
            if n as u64 % p == 0 {
                return Err(Error::PIrregular {
                    group: format!("Z/{n}Z"),
                    p,
                });
            }
            match least_alpha_mod_p(n, p) {
                Some(a) => Ok(Some(CyclotomicData::build(n, FieldElem::Mod { p, r: a })?)),
                None => {
                    debug_assert!(p % n as u64 != 1 && (p + 1) % n as u64 != 0);
                    Ok(None)
                }
            }
        }
    }
}

/// All alpha in F_p whose companion quadratic has a root of exact order n,
/// in increasing residue order.
pub fn valid_alphas_mod_p(n: u32, p: u64) -> Vec<u64> {
    (0..p).filter(|&a| alpha_has_order(a, n, p)).collect()
}

fn least_alpha_mod_p(n: u32, p: u64) -> Option<u64> {
    (0..p).find(|&a| alpha_has_order(a, n, p))
}

/// Does x^2 - 2*alpha*x + 1 have a root of exact multiplicative order n
/// (in F_p when the discriminant is a square, in F_{p^2} otherwise)?
fn alpha_has_order(alpha: u64, n: u32, p: u64) -> bool {
    let disc = (mul_mod(alpha, alpha, p) + p - 1) % p;
    if legendre_symbol_u64(disc, p) >= 0 {
        let s = sqrt_mod(disc, p).expect("square discriminant");
        let root = (alpha + s) % p;
        root != 0 && unit_order_fp(root, p) == n as u64
    } else {
        // root alpha + sqrt(disc) in F_{p^2} = F_p(sqrt(disc))
        fp2_order((alpha, 1), disc, p) == n as u64
    }
}

fn unit_order_fp(x: u64, p: u64) -> u64 {
    let mut acc = x % p;
    let mut k = 1u64;
    while acc != 1 {
        acc = mul_mod(acc, x, p);
        k += 1;
        debug_assert!(k <= p);
    }
    k
}

/// Multiplicative order of a + b*sqrt(d) in F_{p^2}; the elements handled
/// here have norm 1, so the order divides p + 1 and a linear scan is cheap.
fn fp2_order(x: (u64, u64), d: u64, p: u64) -> u64 {
    let mul = |u: (u64, u64), v: (u64, u64)| -> (u64, u64) {
        (
            (mul_mod(u.0, v.0, p) + mul_mod(mul_mod(u.1, v.1, p), d, p)) % p,
            (mul_mod(u.0, v.1, p) + mul_mod(u.1, v.0, p)) % p,
        )
    };
    let mut acc = x;
    let mut k = 1u64;
    while acc != (1, 0) {
        acc = mul(acc, x);
        k += 1;
        if k > p + 1 {
            // norm != 1 intruder; report an order that no caller accepts
            return u64::MAX;
        }
    }
    k
}

/// beta_n is a square in k exactly when w_n itself lies in k.
pub fn omega_in_field(n: u32, p: u64) -> bool {
    (1..p).any(|x| unit_order_fp(x, p) == n as u64)
}
