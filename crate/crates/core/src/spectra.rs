//! Element-level analysis inside SO(q): characteristic polynomial structure,
//! multiplicative order, unipotence, and exact isotropy witnesses.
//!
//! The characteristic polynomial of any M in SO(q) is palindromic up to sign,
//! so it factors as (x - 1)(x^2 - s x + 1) with s = tr(M) - 1 and the
//! eigenvalues are 1, lambda, lambda^-1. The quadratic factor may not split
//! over k; in that case only s = lambda + lambda^-1 is stored, which always
//! lies in k.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::linalg::{vec_is_zero, Matrix, Vector};
use crate::quadform::TernaryForm;

/// A verified element of SO(q)(k): M^T Gram(q) M = Gram(q) and det M = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoMatrix {
    matrix: Matrix,
    form: TernaryForm,
}

impl OrthoMatrix {
    pub fn new(matrix: Matrix, form: TernaryForm) -> Result<Self> {
        if matrix.dim() != 3 {
            return Err(Error::NotInGroup("expected a 3x3 matrix".into()));
        }
        if matrix.ctx() != form.ctx() {
            return Err(Error::FieldMismatch("matrix and form fields differ".into()));
        }
        let g = form.gram();
        if matrix.transpose().mul(&g).mul(&matrix) != g {
            return Err(Error::NotInGroup("M^T Q M != Q".into()));
        }
        if !matrix.det().is_one() {
            return Err(Error::NotInGroup("det M != 1".into()));
        }
        Ok(OrthoMatrix { matrix, form })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn form(&self) -> &TernaryForm {
        &self.form
    }

    pub fn ctx(&self) -> FieldCtx {
        self.matrix.ctx()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectralKind {
    Identity,
    /// Diagonalizable with the quadratic factor split: eigenvalues 1, lambda,
    /// lambda^-1 all in k.
    DiagonalizableSplit { lambda: FieldElem },
    /// The quadratic factor is irreducible over k; only the trace sum
    /// s = lambda + lambda^-1 lives in k.
    DiagonalizableQuadratic { trace_sum: FieldElem },
    /// Nontrivial unipotent: all eigenvalues 1, M != I.
    Unipotent,
    /// Eigenvalues {1, -1, -1} but not diagonalizable (M^2 is a nontrivial
    /// unipotent; only possible in positive characteristic).
    MinusUnipotentLike,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(u32),
    /// Order exceeds the cutoff (2(p+1) over F_p, 120 over Q), which no
    /// element of a finite subgroup can reach.
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralReport {
    /// Monic cubic coefficients [1, c2, c1, c0] of det(xI - M).
    pub char_poly: [FieldElem; 4],
    pub kind: SpectralKind,
    pub order: ElementOrder,
    /// Nonzero v with q(v) = 0, present for nontrivial unipotents and for
    /// split lambda != +-1.
    pub witness: Option<Vector>,
}

fn order_cutoff(ctx: FieldCtx) -> u32 {
    match ctx {
        FieldCtx::Rationals => 120,
        FieldCtx::PrimeField(p) => 2 * (p as u32 + 1),
    }
}

/// Multiplicative order by iteration, with the finite-subgroup cutoff.
pub fn element_order(m: &OrthoMatrix) -> ElementOrder {
    let cutoff = order_cutoff(m.ctx());
    let mut acc = m.matrix().clone();
    for k in 1..=cutoff {
        if acc.is_identity() {
            return ElementOrder::Finite(k);
        }
        acc = acc.mul(m.matrix());
    }
    ElementOrder::Infinite
}

/// Full spectral classification of an element of SO(q)(k).
pub fn analyze_element(m: &OrthoMatrix) -> Result<SpectralReport> {
    let ctx = m.ctx();
    let a = m.matrix();
    let q = m.form();

    let tr = a.trace();
    // char poly x^3 - tr x^2 + c1 x - det with det = 1; orthogonality forces
    // c1 = tr, i.e. (x - 1)(x^2 - s x + 1) with s = tr - 1
    let c1 = second_symmetric(a);
    let char_poly = [ctx.one(), tr.neg(), c1.clone(), ctx.int(-1)];
    if c1 != tr {
        return Err(Error::NotInGroup(
            "characteristic polynomial is not palindromic".into(),
        ));
    }
    let s = tr.sub(&ctx.one());
    let order = element_order(m);

    let two = ctx.int(2);
    let kind;
    let mut witness = None;
    if a.is_identity() {
        kind = SpectralKind::Identity;
    } else if s == two {
        kind = SpectralKind::Unipotent;
        witness = Some(unipotent_fixed_isotropic_vector(a, q)?);
    } else if s == two.neg() {
        // eigenvalues {1, -1, -1}: diagonalizable iff (M - I)(M + I) = 0
        let id = Matrix::identity(ctx, 3);
        let plus = add_matrices(a, &id);
        let minus = sub_matrices(a, &id);
        if minus.mul(&plus) == Matrix::diagonal(&[ctx.zero(), ctx.zero(), ctx.zero()]) {
            kind = SpectralKind::DiagonalizableSplit {
                lambda: ctx.int(-1),
            };
        } else {
            kind = SpectralKind::MinusUnipotentLike;
        }
    } else {
        let disc = s.square().sub(&ctx.int(4));
        match disc.sqrt_exact() {
            Some(root) => {
                let lambda = s.add(&root).div(&two);
                // three distinct eigenvalues: an eigenvector of lambda is an
                // exact isotropy witness since q(v) = q(Mv) = lambda^2 q(v)
                let mut shifted = a.clone();
                for i in 0..3 {
                    shifted.set(i, i, shifted.at(i, i).sub(&lambda));
                }
                let ker = shifted.kernel();
                let v = ker
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::NotInGroup("eigenvector missing".into()))?;
                if !q.evaluate(&v).is_zero() {
                    return Err(Error::NotInGroup("eigenvector witness not isotropic".into()));
                }
                witness = Some(v);
                kind = SpectralKind::DiagonalizableSplit { lambda };
            }
            None => {
                kind = SpectralKind::DiagonalizableQuadratic { trace_sum: s };
            }
        }
    }

    Ok(SpectralReport {
        char_poly,
        kind,
        order,
        witness,
    })
}

/// Isotropy witness forced by a p-irregular element: an order-p element over
/// F_p satisfies (M - I)^p = 0, hence is a nontrivial unipotent and its fixed
/// Jordan vector is isotropic.
pub fn p_irregular_isotropy_check(m: &OrthoMatrix) -> Result<Vector> {
    let p = match m.ctx() {
        FieldCtx::PrimeField(p) => p,
        FieldCtx::Rationals => {
            return Err(Error::OrderMismatch(
                "p-irregular analysis needs positive characteristic".into(),
            ))
        }
    };
    if m.matrix().is_identity() {
        return Err(Error::OrderMismatch("identity has order 1, not p".into()));
    }
    if p > u32::MAX as u64 {
        return Err(Error::BudgetExceeded("characteristic too large".into()));
    }
    if !m.matrix().pow(p as u32).is_identity() {
        return Err(Error::OrderMismatch(format!("M^{p} != I")));
    }
    let ctx = m.ctx();
    let id = Matrix::identity(ctx, 3);
    let n = sub_matrices(m.matrix(), &id);
    let zero = Matrix::diagonal(&[ctx.zero(), ctx.zero(), ctx.zero()]);
    if n.mul(&n).mul(&n) != zero {
        return Err(Error::OrderMismatch("(M - I)^3 != 0".into()));
    }
    unipotent_fixed_isotropic_vector(m.matrix(), m.form())
}

/// For nontrivial unipotent M, a nonzero v1 in im(M - I) with Mv1 = v1; the
/// Jordan chain relation b(v1, v2) = b(Mv1, Mv2) forces q(v1) = 0.
fn unipotent_fixed_isotropic_vector(a: &Matrix, q: &TernaryForm) -> Result<Vector> {
    let ctx = a.ctx();
    let id = Matrix::identity(ctx, 3);
    let n = sub_matrices(a, &id);
    let n2 = n.mul(&n);
    let candidate = |m: &Matrix| -> Option<Vector> {
        for j in 0..3 {
            let col = m.column(j);
            if !vec_is_zero(&col) {
                return Some(col);
            }
        }
        None
    };
    let v = match candidate(&n2) {
        Some(v) => v,                                  // Jordan block of size 3
        None => candidate(&n).ok_or_else(|| {
            Error::OrderMismatch("matrix is the identity, not unipotent".into())
        })?,                                           // size 2 + fixed line
    };
    if !vec_is_zero(&n.mul_vec(&v)) {
        return Err(Error::NotInGroup("fixed vector not fixed".into()));
    }
    if !q.evaluate(&v).is_zero() {
        return Err(Error::NotInGroup("unipotent witness not isotropic".into()));
    }
    Ok(v)
}

fn second_symmetric(a: &Matrix) -> FieldElem {
    let m = |i: usize, j: usize| a.at(i, j);
    let p01 = m(0, 0).mul(m(1, 1)).sub(&m(0, 1).mul(m(1, 0)));
    let p02 = m(0, 0).mul(m(2, 2)).sub(&m(0, 2).mul(m(2, 0)));
    let p12 = m(1, 1).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 1)));
    p01.add(&p02).add(&p12)
}

fn add_matrices(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = a.clone();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            out.set(i, j, a.at(i, j).add(b.at(i, j)));
        }
    }
    out
}

fn sub_matrices(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = a.clone();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            out.set(i, j, a.at(i, j).sub(b.at(i, j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q0() -> TernaryForm {
        TernaryForm::q0(FieldCtx::Rationals)
    }

    fn mat(rows: [[i64; 3]; 3], ctx: FieldCtx) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| ctx.int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_report() {
        let ctx = FieldCtx::Rationals;
        let m = OrthoMatrix::new(Matrix::identity(ctx, 3), q0()).unwrap();
        let r = analyze_element(&m).unwrap();
        assert_eq!(r.kind, SpectralKind::Identity);
        assert_eq!(r.order, ElementOrder::Finite(1));
    }

    #[test]
    fn involution_report() {
        let ctx = FieldCtx::Rationals;
        let m = OrthoMatrix::new(mat([[1, 0, 0], [0, -1, 0], [0, 0, -1]], ctx), q0()).unwrap();
        let r = analyze_element(&m).unwrap();
        assert_eq!(
            r.kind,
            SpectralKind::DiagonalizableSplit { lambda: ctx.int(-1) }
        );
        assert_eq!(r.order, ElementOrder::Finite(2));
        assert!(r.witness.is_none());
    }

    #[test]
    fn rotation_of_order_four() {
        let ctx = FieldCtx::Rationals;
        let m = OrthoMatrix::new(mat([[0, -1, 0], [1, 0, 0], [0, 0, 1]], ctx), q0()).unwrap();
        let r = analyze_element(&m).unwrap();
        assert_eq!(r.order, ElementOrder::Finite(4));
        assert!(matches!(r.kind, SpectralKind::DiagonalizableQuadratic { .. }));
    }

    #[test]
    fn infinite_order_rotation() {
        let ctx = FieldCtx::Rationals;
        let rows = vec![
            vec![
                ctx.parse_elem("3/5").unwrap(),
                ctx.parse_elem("-4/5").unwrap(),
                ctx.zero(),
            ],
            vec![
                ctx.parse_elem("4/5").unwrap(),
                ctx.parse_elem("3/5").unwrap(),
                ctx.zero(),
            ],
            vec![ctx.zero(), ctx.zero(), ctx.one()],
        ];
        let m = OrthoMatrix::new(Matrix::from_rows(rows).unwrap(), q0()).unwrap();
        let r = analyze_element(&m).unwrap();
        assert_eq!(r.order, ElementOrder::Infinite);
    }

    #[test]
    fn split_hyperbolic_rotation_has_witness() {
        let ctx = FieldCtx::Rationals;
        // preserves <1,-1,1> restricted to the (x,y) hyperbolic plane:
        // diag-ish boost with lambda = 2
        let rows = vec![
            vec![
                ctx.parse_elem("5/4").unwrap(),
                ctx.parse_elem("3/4").unwrap(),
                ctx.zero(),
            ],
            vec![
                ctx.parse_elem("3/4").unwrap(),
                ctx.parse_elem("5/4").unwrap(),
                ctx.zero(),
            ],
            vec![ctx.zero(), ctx.zero(), ctx.one()],
        ];
        let form = TernaryForm::new(ctx.one(), ctx.int(-1), ctx.one()).unwrap();
        let m = OrthoMatrix::new(Matrix::from_rows(rows).unwrap(), form.clone()).unwrap();
        let r = analyze_element(&m).unwrap();
        match &r.kind {
            SpectralKind::DiagonalizableSplit { lambda } => {
                assert_eq!(lambda, &ctx.int(2));
            }
            other => panic!("expected split kind, got {other:?}"),
        }
        let w = r.witness.expect("split lambda != +-1 has a witness");
        assert!(form.evaluate(&w).is_zero());
        assert!(!vec_is_zero(&w));
        assert_eq!(r.order, ElementOrder::Infinite);
    }

    #[test]
    fn rejects_non_orthogonal() {
        let ctx = FieldCtx::Rationals;
        assert!(OrthoMatrix::new(mat([[2, 0, 0], [0, 1, 0], [0, 0, 1]], ctx), q0()).is_err());
        // det = -1
        assert!(OrthoMatrix::new(mat([[1, 0, 0], [0, 1, 0], [0, 0, -1]], ctx), q0()).is_err());
    }

    #[test]
    fn p_irregular_check_rejects_identity() {
        let ctx = FieldCtx::prime_field(3).unwrap();
        let f = TernaryForm::q0(ctx);
        let m = OrthoMatrix::new(Matrix::identity(ctx, 3), f).unwrap();
        assert!(matches!(
            p_irregular_isotropy_check(&m),
            Err(Error::OrderMismatch(_))
        ));
    }

    #[test]
    fn unipotent_over_f5() {
        let ctx = FieldCtx::prime_field(5).unwrap();
        let f = TernaryForm::q0(ctx);
        // an order-5 element of SO(<1,1,1>)(F_5)
        let m = mat([[1, 1, 2], [4, 3, 4], [3, 4, 4]], ctx);
        let om = OrthoMatrix::new(m, f.clone()).unwrap();
        let r = analyze_element(&om).unwrap();
        assert_eq!(r.kind, SpectralKind::Unipotent);
        assert_eq!(r.order, ElementOrder::Finite(5));
        let w = r.witness.unwrap();
        assert!(f.evaluate(&w).is_zero());
        assert!(!vec_is_zero(&w));
        let back = p_irregular_isotropy_check(&om).unwrap();
        assert!(f.evaluate(&back).is_zero());
    }
}
