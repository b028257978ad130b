//! Which finite groups embed into SO(q), with verified generator matrices.
//!
//! The decision layer returns a reason trace naming the succeeding or failing
//! condition (existence of alpha_n, representability of -beta_n, isometry
//! with <1,1,1>, sqrt(5) membership). The synthesis layer produces matrices
//! that are re-verified from scratch before being returned: membership in
//! SO(q), the standard presentation relations, and the exact closure order.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::cyclotomic::{alpha_beta, CyclotomicData};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::linalg::Matrix;
use crate::quadform::{
    explicit_isometry_with_budget, find_representation_vector_with_budget, isometric,
    orthogonal_complement_basis, IsometryWitness, TernaryForm, DEFAULT_SEARCH_BUDGET,
};
use crate::spectra::OrthoMatrix;

/// Abstract finite subgroup type: C_n, D_2n (order 2n), A4, S4, A5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupSpec {
    Cyclic(u32),
    /// Dihedral(n) has order 2n; Dihedral(2) is the Klein four-group.
    Dihedral(u32),
    A4,
    S4,
    A5,
}

impl GroupSpec {
    pub fn order(&self) -> u32 {
        match self {
            GroupSpec::Cyclic(n) => *n,
            GroupSpec::Dihedral(n) => 2 * n,
            GroupSpec::A4 => 12,
            GroupSpec::S4 => 24,
            GroupSpec::A5 => 60,
        }
    }

    pub fn label(&self) -> String {
        match self {
            GroupSpec::Cyclic(n) => format!("C{n}"),
            GroupSpec::Dihedral(n) => format!("D{}", 2 * n),
            GroupSpec::A4 => "A4".into(),
            GroupSpec::S4 => "S4".into(),
            GroupSpec::A5 => "A5".into(),
        }
    }

    /// Parses C<n>, D<2n> (the label carries the order), A4, S4, A5.
    pub fn parse(s: &str) -> Result<GroupSpec> {
        let s = s.trim();
        match s {
            "A4" | "a4" => return Ok(GroupSpec::A4),
            "S4" | "s4" => return Ok(GroupSpec::S4),
            "A5" | "a5" => return Ok(GroupSpec::A5),
            _ => {}
        }
        if let Some(n) = s.strip_prefix('C').or_else(|| s.strip_prefix('c')) {
            let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad group {s:?}")))?;
            if n == 0 {
                return Err(Error::Parse("C0 is not a group".into()));
            }
            return Ok(GroupSpec::Cyclic(n));
        }
        if let Some(m) = s.strip_prefix('D').or_else(|| s.strip_prefix('d')) {
            let m: u32 = m.parse().map_err(|_| Error::Parse(format!("bad group {s:?}")))?;
            if m < 4 || m % 2 != 0 {
                return Err(Error::Parse(format!(
                    "dihedral label D<2n> needs an even order >= 4, got {s:?}"
                )));
            }
            return Ok(GroupSpec::Dihedral(m / 2));
        }
        Err(Error::Parse(format!(
            "bad group {s:?} (expected C<n>, D<2n>, A4, S4 or A5)"
        )))
    }

    pub fn is_p_regular(&self, p: u64) -> bool {
        p == 0 || self.order() as u64 % p != 0
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Outcome of an embedding decision with its reason trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub embeds: bool,
    pub trace: Vec<String>,
}

impl Decision {
    fn yes(trace: Vec<String>) -> Self {
        Decision { embeds: true, trace }
    }
    fn no(trace: Vec<String>) -> Self {
        Decision { embeds: false, trace }
    }
}

/// Decides whether G embeds into SO(q)(k). q is normalized to trivial
/// discriminant internally; scaling never changes the isometry group.
pub fn embeds(g: &GroupSpec, q: &TernaryForm) -> Result<Decision> {
    let ctx = q.ctx();
    if let FieldCtx::PrimeField(p) = ctx {
        if !g.is_p_regular(p) {
            return Err(Error::PIrregular {
                group: g.label(),
                p,
            });
        }
    }
    let (qn, scalar) = q.normalized()?;
    let mut trace = Vec::new();
    if !scalar.is_one() {
        trace.push(format!("normalized to {qn} (scaled by {scalar})"));
    }
    match g {
        GroupSpec::Cyclic(1) | GroupSpec::Cyclic(2) | GroupSpec::Dihedral(2) => {
            trace.push(format!("{g} is always contained in SO(q)"));
            Ok(Decision::yes(trace))
        }
        GroupSpec::Cyclic(n) | GroupSpec::Dihedral(n) => {
            match alpha_beta(*n, ctx)? {
                None => {
                    trace.push(match ctx {
                        FieldCtx::Rationals => format!(
                            "alpha_{n} is rational only for n = 1, 2, 3, 4 or 6"
                        ),
                        FieldCtx::PrimeField(p) => format!(
                            "alpha_{n} does not exist in F{p} (p is not +-1 mod {n})"
                        ),
                    });
                    Ok(Decision::no(trace))
                }
                Some(cd) => {
                    trace.push(format!("alpha_{n} = {} in k", cd.alpha));
                    let target = cd.beta.neg();
                    if qn.represents(&target)? {
                        trace.push(format!("q represents -beta_{n} = {target}"));
                        Ok(Decision::yes(trace))
                    } else {
                        trace.push(format!("q does not represent -beta_{n} = {target}"));
                        Ok(Decision::no(trace))
                    }
                }
            }
        }
        GroupSpec::A4 | GroupSpec::S4 => {
            let q0 = TernaryForm::q0(ctx);
            if isometric(&qn, &q0)? {
                trace.push("q is isometric to <1,1,1>".into());
                Ok(Decision::yes(trace))
            } else {
                trace.push(not_q0_reason(&qn)?);
                Ok(Decision::no(trace))
            }
        }
        GroupSpec::A5 => {
            let five = ctx.int(5);
            if !five.is_square() {
                trace.push(format!("sqrt(5) is not in {ctx}"));
                return Ok(Decision::no(trace));
            }
            trace.push(format!("sqrt(5) = {} in {ctx}", five.sqrt_exact().unwrap()));
            let q0 = TernaryForm::q0(ctx);
            if isometric(&qn, &q0)? {
                trace.push("q is isometric to <1,1,1>".into());
                Ok(Decision::yes(trace))
            } else {
                trace.push(not_q0_reason(&qn)?);
                Ok(Decision::no(trace))
            }
        }
    }
}

fn not_q0_reason(qn: &TernaryForm) -> Result<String> {
    match qn.ctx() {
        FieldCtx::Rationals => {
            let sig = qn.signature()?;
            if sig != (3, 0) {
                return Ok(format!(
                    "not isometric to <1,1,1>: signature is ({},{})",
                    sig.0, sig.1
                ));
            }
            Ok("not isometric to <1,1,1>: local invariants differ".into())
        }
        FieldCtx::PrimeField(_) => Ok(format!(
            "not isometric to <1,1,1>: discriminant class is {}",
            qn.disc()?
        )),
    }
}

/// The constructive shape q = <-beta_n, -gamma, beta_n*gamma>: a basis in
/// which the normalized form takes the dihedral normal shape, built by
/// splitting a representation vector of -beta_n off and reading gamma from
/// the orthogonal complement.
#[derive(Debug, Clone)]
pub struct DihedralNormalForm {
    pub cyclotomic: CyclotomicData,
    pub gamma: FieldElem,
    /// Columns (v1, v2, v3) with basis^T * Gram(q) * basis =
    /// diag(-beta, -gamma, beta*gamma).
    pub basis: Matrix,
    pub normal_form: TernaryForm,
    /// P = basis^{-1} with P^T * Gram(normal_form) * P = Gram(q).
    pub witness: IsometryWitness,
}

/// Builds the dihedral normal form for q, which must already have trivial
/// discriminant (the third entry is forced to be beta*gamma exactly).
pub fn dihedral_normal_form(n: u32, qn: &TernaryForm, budget: u64) -> Result<DihedralNormalForm> {
    let ctx = qn.ctx();
    if !qn.disc()?.is_trivial() {
        return Err(Error::DegenerateInput(format!(
            "normal form needs trivial discriminant, got class {}",
            qn.disc()?
        )));
    }
    let cd = alpha_beta(n, ctx)?.ok_or_else(|| {
        Error::NotEmbeddable(format!("alpha_{n} does not exist in {ctx}"))
    })?;
    let beta = cd.beta.clone();
    let target = beta.neg();
    let v1 = find_representation_vector_with_budget(qn, &target, budget)?;
    let (u2, u3) = orthogonal_complement_basis(qn, &v1);
    let gamma = qn.evaluate(&u2).neg();
    let want_third = beta.mul(&gamma);
    let g3 = qn.evaluate(&u3);
    // discriminant matching makes beta*gamma/g3 an exact square
    let c = want_third
        .div(&g3)
        .sqrt_exact()
        .expect("trivial discriminant forces a square ratio");
    let u3 = crate::linalg::vec_scale(&u3, &c);
    let basis = Matrix::from_columns(&[v1, u2, u3])?;
    let normal_form = TernaryForm::new(beta.neg(), gamma.neg(), want_third)?;
    if basis.transpose().mul(&qn.gram()).mul(&basis) != normal_form.gram() {
        return Err(Error::NotInGroup("normal form self-check failed".into()));
    }
    let p = basis.inverse().expect("basis is invertible");
    let witness = IsometryWitness::new(qn.diag(), normal_form.diag(), p)?;
    Ok(DihedralNormalForm {
        cyclotomic: cd,
        gamma,
        basis,
        normal_form,
        witness,
    })
}

/// The rotation s = [[1,0,0],[0,alpha,beta],[0,1,alpha]] of order n and the
/// flip t = diag(-1,1,-1), which preserve every form <-beta,-g,beta*g> and
/// satisfy s^n = t^2 = (st)^2 = 1.
pub fn standard_dihedral_generators(cd: &CyclotomicData, ctx: FieldCtx) -> (Matrix, Matrix) {
    let z = ctx.zero();
    let o = ctx.one();
    let s = Matrix::from_rows(vec![
        vec![o.clone(), z.clone(), z.clone()],
        vec![z.clone(), cd.alpha.clone(), cd.beta.clone()],
        vec![z.clone(), o.clone(), cd.alpha.clone()],
    ])
    .unwrap();
    let t = Matrix::diagonal(&[ctx.int(-1), ctx.one(), ctx.int(-1)]);
    (s, t)
}

/// Rotation generators of the cube group: the quarter turn about the third
/// axis and the coordinate 3-cycle. Both preserve <1,1,1>.
pub fn cube_generators(ctx: FieldCtx) -> (Matrix, Matrix) {
    let z = ctx.zero();
    let o = ctx.one();
    let m1 = ctx.int(-1);
    let r4 = Matrix::from_rows(vec![
        vec![z.clone(), m1.clone(), z.clone()],
        vec![o.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), o.clone()],
    ])
    .unwrap();
    let r3 = Matrix::from_rows(vec![
        vec![z.clone(), z.clone(), o.clone()],
        vec![o.clone(), z.clone(), z.clone()],
        vec![z.clone(), o.clone(), z.clone()],
    ])
    .unwrap();
    (r4, r3)
}

/// Tetrahedral generators inside the cube group: the half turn r4^2 and the
/// same 3-cycle.
pub fn tetrahedron_generators(ctx: FieldCtx) -> (Matrix, Matrix) {
    let (r4, r3) = cube_generators(ctx);
    (r4.mul(&r4), r3)
}

/// Icosahedral generators over a field containing sqrt(5): the order-5
/// rotation about the vertex axis (0, 1, phi) with phi = (1+sqrt(5))/2,
/// plus the coordinate 3-cycle. Both preserve <1,1,1>.
pub fn icosahedron_generators(ctx: FieldCtx) -> Result<(Matrix, Matrix)> {
    let five = ctx.int(5);
    let w = five.sqrt_exact().ok_or_else(|| {
        Error::NotEmbeddable(format!("sqrt(5) is not in {ctx}"))
    })?;
    let four_inv = ctx.int(4).inv().unwrap();
    let half = ctx.int(2).inv().unwrap();
    let a = w.sub(&ctx.one()).mul(&four_inv); // (sqrt5 - 1)/4 = cos(2pi/5)
    let b = w.add(&ctx.one()).mul(&four_inv); // (sqrt5 + 1)/4 = phi/2
    let r5 = Matrix::from_rows(vec![
        vec![a.clone(), b.neg(), half.clone()],
        vec![b.clone(), half.clone(), a.clone()],
        vec![half.neg(), a.clone(), b.clone()],
    ])
    .unwrap();
    let (_, r3) = cube_generators(ctx);
    Ok((r5, r3))
}

/// Record of the verification performed on a generator set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationCheck {
    /// Relations that were verified as exact matrix identities.
    pub relations: Vec<String>,
    /// Number of elements in the generated group, computed by closure.
    pub closure_order: usize,
}

/// Verified generators: every matrix is in SO(q)(k), the listed relations
/// hold exactly, and the closure has exactly |G| elements.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub group: GroupSpec,
    pub gens: Vec<OrthoMatrix>,
    pub presentation_check: PresentationCheck,
}

impl GeneratorSet {
    /// Runs every invariant check; the only way to obtain a GeneratorSet.
    pub fn verified(group: GroupSpec, gens: Vec<Matrix>, q: &TernaryForm) -> Result<GeneratorSet> {
        let checked: Vec<OrthoMatrix> = gens
            .iter()
            .map(|m| OrthoMatrix::new(m.clone(), q.clone()))
            .collect::<Result<_>>()?;
        let relations = verify_relations(&group, &gens)?;
        let elements = close_subgroup(&gens, 4 * group.order() as usize + 8)?;
        if elements.len() != group.order() as usize {
            return Err(Error::OrderMismatch(format!(
                "closure has {} elements, expected {}",
                elements.len(),
                group.order()
            )));
        }
        Ok(GeneratorSet {
            group,
            gens: checked,
            presentation_check: PresentationCheck {
                relations,
                closure_order: elements.len(),
            },
        })
    }
}

fn matrix_order(m: &Matrix, cap: u32) -> Option<u32> {
    let mut acc = m.clone();
    for k in 1..=cap {
        if acc.is_identity() {
            return Some(k);
        }
        acc = acc.mul(m);
    }
    None
}

fn verify_relations(group: &GroupSpec, gens: &[Matrix]) -> Result<Vec<String>> {
    let fail = |r: &str| Error::OrderMismatch(format!("relation {r} fails"));
    let mut out = Vec::new();
    match group {
        GroupSpec::Cyclic(n) => {
            if gens.len() != 1 {
                return Err(Error::Parse("cyclic groups take one generator".into()));
            }
            if matrix_order(&gens[0], *n) != Some(*n) {
                return Err(fail(&format!("s^{n} = 1 (with exact order {n})")));
            }
            out.push(format!("s^{n} = 1"));
        }
        GroupSpec::Dihedral(n) => {
            if gens.len() != 2 {
                return Err(Error::Parse("dihedral groups take two generators".into()));
            }
            let (s, t) = (&gens[0], &gens[1]);
            if matrix_order(s, *n) != Some(*n) {
                return Err(fail(&format!("s^{n} = 1")));
            }
            if matrix_order(t, 2) != Some(2) {
                return Err(fail("t^2 = 1"));
            }
            if matrix_order(&s.mul(t), 2) != Some(2) {
                return Err(fail("(st)^2 = 1"));
            }
            out.push(format!("s^{n} = 1"));
            out.push("t^2 = 1".into());
            out.push("(st)^2 = 1".into());
        }
        GroupSpec::A4 => {
            let (a, b) = two_gens(gens)?;
            check_order(a, 2, "a^2 = 1")?;
            check_order(b, 3, "b^3 = 1")?;
            check_order(&a.mul(b), 3, "(ab)^3 = 1")?;
            out.extend(["a^2 = 1".into(), "b^3 = 1".into(), "(ab)^3 = 1".into()]);
        }
        GroupSpec::S4 => {
            let (a, b) = two_gens(gens)?;
            check_order(a, 4, "a^4 = 1")?;
            check_order(b, 3, "b^3 = 1")?;
            check_order(&a.mul(b), 2, "(ab)^2 = 1")?;
            out.extend(["a^4 = 1".into(), "b^3 = 1".into(), "(ab)^2 = 1".into()]);
        }
        GroupSpec::A5 => {
            let (a, b) = two_gens(gens)?;
            check_order(a, 5, "a^5 = 1")?;
            check_order(b, 3, "b^3 = 1")?;
            check_order(&a.mul(b), 2, "(ab)^2 = 1")?;
            out.extend(["a^5 = 1".into(), "b^3 = 1".into(), "(ab)^2 = 1".into()]);
        }
    }
    Ok(out)
}

fn two_gens(gens: &[Matrix]) -> Result<(&Matrix, &Matrix)> {
    if gens.len() != 2 {
        return Err(Error::Parse("expected two generators".into()));
    }
    Ok((&gens[0], &gens[1]))
}

fn check_order(m: &Matrix, n: u32, rel: &str) -> Result<()> {
    if matrix_order(m, n) != Some(n) {
        return Err(Error::OrderMismatch(format!("relation {rel} fails")));
    }
    Ok(())
}

/// Synthesizes verified generators for an embeddable (G, q).
pub fn synthesize_generators(g: &GroupSpec, q: &TernaryForm) -> Result<GeneratorSet> {
    synthesize_generators_with_budget(g, q, DEFAULT_SEARCH_BUDGET)
}

pub fn synthesize_generators_with_budget(
    g: &GroupSpec,
    q: &TernaryForm,
    budget: u64,
) -> Result<GeneratorSet> {
    let decision = embeds(g, q)?;
    if !decision.embeds {
        return Err(Error::NotEmbeddable(format!(
            "{g} does not embed into SO({q}): {}",
            decision.trace.join("; ")
        )));
    }
    let ctx = q.ctx();
    let (qn, _) = q.normalized()?;
    let gens: Vec<Matrix> = match g {
        GroupSpec::Cyclic(1) => vec![Matrix::identity(ctx, 3)],
        GroupSpec::Cyclic(2) => vec![Matrix::diagonal(&[
            ctx.one(),
            ctx.int(-1),
            ctx.int(-1),
        ])],
        GroupSpec::Dihedral(2) => vec![
            Matrix::diagonal(&[ctx.one(), ctx.int(-1), ctx.int(-1)]),
            Matrix::diagonal(&[ctx.int(-1), ctx.one(), ctx.int(-1)]),
        ],
        GroupSpec::Cyclic(n) | GroupSpec::Dihedral(n) => {
            let nf = dihedral_normal_form(*n, &qn, budget)?;
            let (s, t) = standard_dihedral_generators(&nf.cyclotomic, ctx);
            let b_inv = nf.basis.inverse().expect("invertible basis");
            let conj = |m: &Matrix| nf.basis.mul(m).mul(&b_inv);
            match g {
                GroupSpec::Cyclic(_) => vec![conj(&s)],
                _ => vec![conj(&s), conj(&t)],
            }
        }
        GroupSpec::A4 | GroupSpec::S4 | GroupSpec::A5 => {
            let q0 = TernaryForm::q0(ctx);
            let w = explicit_isometry_with_budget(&qn, &q0, budget)?;
            // P^T Q0 P = Qn, so M -> P^{-1} M P carries SO(q0) onto SO(qn)
            let p = w.matrix().clone();
            let p_inv = p.inverse().expect("isometry witness is invertible");
            let conj = |m: &Matrix| p_inv.mul(m).mul(&p);
            let (a, b) = match g {
                GroupSpec::A4 => tetrahedron_generators(ctx),
                GroupSpec::S4 => cube_generators(ctx),
                GroupSpec::A5 => icosahedron_generators(ctx)?,
                _ => unreachable!(),
            };
            vec![conj(&a), conj(&b)]
        }
    };
    GeneratorSet::verified(*g, gens, q)
}

/// Closure of a generator list under multiplication, by breadth-first
/// right-multiplication. Errors out when the cap is passed (an infinite or
/// unexpected subgroup).
pub fn close_subgroup(gens: &[Matrix], cap: usize) -> Result<Vec<Matrix>> {
    if gens.is_empty() {
        return Err(Error::Parse("no generators".into()));
    }
    let ctx = gens[0].ctx();
    let id = Matrix::identity(ctx, gens[0].dim());
    let mut seen: HashSet<Matrix> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(m) = queue.pop_front() {
        for g in gens {
            let next = m.mul(g);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(Error::ClosureCapExceeded { cap });
                }
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Matrix> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Certificate checker: order, isomorphism type among the candidate list,
/// and p-regularity of a subgroup given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupReport {
    pub order: usize,
    /// None when the subgroup is p-irregular (flagged, not typed) or falls
    /// outside the candidate list.
    pub iso_type: Option<GroupSpec>,
    pub is_p_regular: bool,
}

pub const VERIFY_CLOSURE_CAP: usize = 400;

pub fn verify_subgroup(gens: &[Matrix], q: &TernaryForm) -> Result<SubgroupReport> {
    for m in gens {
        OrthoMatrix::new(m.clone(), q.clone())?;
    }
    let elements = close_subgroup(gens, VERIFY_CLOSURE_CAP)?;
    Ok(classify_elements(&elements, q.ctx()))
}

/// Identifies the isomorphism type from the closed element list by order,
/// cyclicity, involution count and the dihedral inversion structure; this
/// separates every candidate. p-irregular subgroups are flagged, not typed.
pub fn classify_elements(elements: &[Matrix], ctx: FieldCtx) -> SubgroupReport {
    let n = elements.len();
    let p = ctx.characteristic();
    let is_p_regular = p == 0 || n as u64 % p != 0;
    if !is_p_regular {
        return SubgroupReport {
            order: n,
            iso_type: None,
            is_p_regular,
        };
    }
    let cap = n as u32;
    let orders: Vec<u32> = elements
        .iter()
        .map(|m| matrix_order(m, cap).expect("element of a finite group"))
        .collect();
    let involutions = orders.iter().filter(|&&o| o == 2).count();
    let iso_type = if orders.iter().any(|&o| o == n as u32) {
        Some(GroupSpec::Cyclic(n as u32))
    } else if n == 4 {
        Some(GroupSpec::Dihedral(2)) // Klein four-group
    } else if n == 12 && involutions == 3 {
        Some(GroupSpec::A4)
    } else if n == 24 && involutions == 9 {
        Some(GroupSpec::S4)
    } else if n == 60 && involutions == 15 {
        Some(GroupSpec::A5)
    } else if n % 2 == 0 && is_dihedral(elements, &orders, n as u32 / 2) {
        Some(GroupSpec::Dihedral(n as u32 / 2))
    } else {
        None
    };
    SubgroupReport {
        order: n,
        iso_type,
        is_p_regular,
    }
}

fn is_dihedral(elements: &[Matrix], orders: &[u32], half: u32) -> bool {
    if half < 3 {
        return false;
    }
    let r = match elements
        .iter()
        .zip(orders)
        .find(|(_, &o)| o == half)
        .map(|(m, _)| m)
    {
        Some(r) => r,
        None => return false,
    };
    let r_inv = r.inverse().expect("group element");
    elements
        .iter()
        .zip(orders)
        .any(|(t, &o)| o == 2 && t.mul(r).mul(t) == r_inv)
}
