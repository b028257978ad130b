//! Conjugacy-class invariants for finite subgroups of SO(q): the axis class
//! of an involution (an element of D(q)), the S3-orbit invariant of a Klein
//! four-group (an orbit in Q_{a,b}), and the norm-group coset of a dihedral
//! subgroup (an element of D(<1,-beta_n>)/C), together with representative
//! synthesis and exact counts where the square-class group is finite.
//!
//! Involution classes are taken with respect to the form as given. The Klein
//! and dihedral invariants normalize to trivial discriminant first, since
//! their parameter sets are defined through the shape q = <-a,-b,ab>.

use std::collections::BTreeSet;

use crate::cyclotomic::CyclotomicData;
use crate::embedding::{
    classify_elements, close_subgroup, dihedral_normal_form, embeds, standard_dihedral_generators,
    GeneratorSet, GroupSpec,
};
use crate::error::{Error, Result};
use crate::field::{least_nonresidue, reduce_square_class, FieldCtx, FieldElem, SquareClass};
use crate::linalg::{vec_scale, Matrix, Vector};
use crate::quadform::{
    explicit_isometry_with_budget, find_representation_vector_with_budget,
    orthogonal_complement_basis, quaternion_isomorphic, BinaryForm, TernaryForm,
    DEFAULT_SEARCH_BUDGET,
};
use crate::spectra::OrthoMatrix;

/// The conjugacy invariant of an order-2 subgroup: the square class of
/// q on the fixed axis, together with the axis as a membership proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionClass {
    pub class: SquareClass,
    /// Fixed axis of the involution; q(axis) = value lies in `class`.
    pub axis: Vector,
    pub value: FieldElem,
}

/// Fixed axis of an involution in SO(q): the one-dimensional +1 eigenspace.
fn involution_axis(m: &Matrix) -> Result<Vector> {
    let ctx = m.ctx();
    if m.is_identity() {
        return Err(Error::NotInvolution("identity has no axis".into()));
    }
    if !m.mul(m).is_identity() {
        return Err(Error::NotInvolution("M^2 != I".into()));
    }
    let mut shifted = m.clone();
    for i in 0..3 {
        shifted.set(i, i, shifted.at(i, i).sub(&ctx.one()));
    }
    let ker = shifted.kernel();
    if ker.len() != 1 {
        return Err(Error::NotInvolution(format!(
            "fixed space has dimension {}",
            ker.len()
        )));
    }
    Ok(ker.into_iter().next().unwrap())
}

/// Invariant of the order-2 subgroup generated by M inside SO(q).
pub fn involution_class(m: &Matrix, q: &TernaryForm) -> Result<InvolutionClass> {
    OrthoMatrix::new(m.clone(), q.clone())?;
    let axis = involution_axis(m)?;
    let value = q.evaluate(&axis);
    if value.is_zero() {
        return Err(Error::DegenerateInput(
            "involution axis is isotropic, form degenerate".into(),
        ));
    }
    let class = reduce_square_class(&value)?;
    Ok(InvolutionClass { class, axis, value })
}

/// Representative involution for a class d in D(q): the half-turn about an
/// axis v with q(v) in d, built as B diag(1,-1,-1) B^{-1} for an orthogonal
/// basis extending v. Round-trips through `involution_class`.
pub fn representative_involution(d: &SquareClass, q: &TernaryForm) -> Result<GeneratorSet> {
    representative_involution_with_budget(d, q, DEFAULT_SEARCH_BUDGET)
}

pub fn representative_involution_with_budget(
    d: &SquareClass,
    q: &TernaryForm,
    budget: u64,
) -> Result<GeneratorSet> {
    let target = d.to_elem();
    if !q.represents(&target)? {
        return Err(Error::NotRepresentable(format!("{d} is not in D({q})")));
    }
    let v = find_representation_vector_with_budget(q, &target, budget)?;
    let (u2, u3) = orthogonal_complement_basis(q, &v);
    let basis = Matrix::from_columns(&[v, u2, u3])?;
    let ctx = q.ctx();
    let half_turn = Matrix::diagonal(&[ctx.one(), ctx.int(-1), ctx.int(-1)]);
    let m = basis
        .mul(&half_turn)
        .mul(&basis.inverse().expect("orthogonal basis is invertible"));
    GeneratorSet::verified(GroupSpec::Cyclic(2), vec![m], q)
}

/// The S3-orbit invariant of a Klein four-group: the canonical pair, its
/// full orbit, and the unordered triple of axis classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleinInvariant {
    /// Lexicographically least pair of the orbit.
    pub pair: (SquareClass, SquareClass),
    /// The full S3 orbit (at most 6 pairs), sorted.
    pub orbit: Vec<(SquareClass, SquareClass)>,
    /// Unordered triple {-a x, -b y, a b x y} of axis classes, sorted.
    pub axis_triple: [SquareClass; 3],
}

/// s.(x, y) = (-b x y, a b x) on square-class pairs.
pub fn klein_s_action(
    a: &FieldElem,
    b: &FieldElem,
    pair: &(SquareClass, SquareClass),
) -> Result<(SquareClass, SquareClass)> {
    let (x, y) = (pair.0.to_elem(), pair.1.to_elem());
    let nx = reduce_square_class(&b.neg().mul(&x).mul(&y))?;
    let ny = reduce_square_class(&a.mul(b).mul(&x))?;
    Ok((nx, ny))
}

/// t.(x, y) = (x, -a x y) on square-class pairs.
pub fn klein_t_action(
    a: &FieldElem,
    _b: &FieldElem,
    pair: &(SquareClass, SquareClass),
) -> Result<(SquareClass, SquareClass)> {
    let (x, y) = (pair.0.to_elem(), pair.1.to_elem());
    let ny = reduce_square_class(&a.neg().mul(&x).mul(&y))?;
    Ok((pair.0.clone(), ny))
}

/// Membership test for Q_{a,b}: (ax, by) and (a, b) give isomorphic
/// quaternion algebras.
pub fn in_q_ab(
    a: &FieldElem,
    b: &FieldElem,
    pair: &(SquareClass, SquareClass),
) -> Result<bool> {
    quaternion_isomorphic(&a.mul(&pair.0.to_elem()), &b.mul(&pair.1.to_elem()), a, b)
}

/// Computes the Klein invariant of the four-group generated by `gens`
/// inside SO(q). The form is normalized internally; the three nontrivial
/// involutions' axis classes {d1, d2, d3} recover the pair as
/// (x, y) = (-d_i/a, -d_j/b), and the orbit collects all orderings.
pub fn klein_invariant(gens: &[Matrix], q: &TernaryForm) -> Result<KleinInvariant> {
    for m in gens {
        OrthoMatrix::new(m.clone(), q.clone())?;
    }
    let elements = close_subgroup(gens, 8).map_err(|_| {
        Error::NotKleinFour("closure is larger than a Klein four-group".into())
    })?;
    let report = classify_elements(&elements, q.ctx());
    if report.iso_type != Some(GroupSpec::Dihedral(2)) {
        return Err(Error::NotKleinFour(format!(
            "subgroup of order {} is not (Z/2Z)^2",
            report.order
        )));
    }
    let (qn, _) = q.normalized()?;
    let a = qn.diag()[0].neg();
    let b = qn.diag()[1].neg();
    let mut axis_classes = Vec::new();
    for m in &elements {
        if m.is_identity() {
            continue;
        }
        let axis = involution_axis(m)?;
        axis_classes.push(reduce_square_class(&qn.evaluate(&axis))?);
    }
    debug_assert_eq!(axis_classes.len(), 3);

    let mut orbit: BTreeSet<(SquareClass, SquareClass)> = BTreeSet::new();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let x = reduce_square_class(&axis_classes[i].to_elem().neg().div(&a))?;
            let y = reduce_square_class(&axis_classes[j].to_elem().neg().div(&b))?;
            orbit.insert((x, y));
        }
    }
    // sanity: membership and closure under the S3 action
    for pair in &orbit {
        if !in_q_ab(&a, &b, pair)? {
            return Err(Error::NotKleinFour(format!(
                "recovered pair ({},{}) is outside Q_a,b",
                pair.0, pair.1
            )));
        }
        if !orbit.contains(&klein_s_action(&a, &b, pair)?)
            || !orbit.contains(&klein_t_action(&a, &b, pair)?)
        {
            return Err(Error::NotKleinFour("orbit not closed under S3".into()));
        }
    }
    let mut triple = axis_classes.clone();
    triple.sort();
    let product = triple[0].mul(&triple[1]).mul(&triple[2]);
    if !product.is_trivial() {
        return Err(Error::NotKleinFour(
            "axis classes do not multiply to the trivial class".into(),
        ));
    }
    let orbit: Vec<_> = orbit.into_iter().collect();
    Ok(KleinInvariant {
        pair: orbit[0].clone(),
        orbit,
        axis_triple: [triple[0].clone(), triple[1].clone(), triple[2].clone()],
    })
}

/// Representative Klein four-group for a pair (x, y) in Q_{a,b}: conjugate
/// the diagonal subgroup through an explicit isometry with <-ax, -by, abxy>.
pub fn representative_klein(
    pair: &(SquareClass, SquareClass),
    q: &TernaryForm,
) -> Result<GeneratorSet> {
    representative_klein_with_budget(pair, q, DEFAULT_SEARCH_BUDGET)
}

pub fn representative_klein_with_budget(
    pair: &(SquareClass, SquareClass),
    q: &TernaryForm,
    budget: u64,
) -> Result<GeneratorSet> {
    let (qn, _) = q.normalized()?;
    let a = qn.diag()[0].neg();
    let b = qn.diag()[1].neg();
    if !in_q_ab(&a, &b, pair)? {
        return Err(Error::NotRepresentable(format!(
            "({},{}) is not in Q_a,b",
            pair.0, pair.1
        )));
    }
    let (x, y) = (pair.0.to_elem(), pair.1.to_elem());
    let twisted = TernaryForm::new(
        a.mul(&x).neg(),
        b.mul(&y).neg(),
        a.mul(&b).mul(&x).mul(&y),
    )?;
    let w = explicit_isometry_with_budget(&qn, &twisted, budget)?;
    let p = w.matrix().clone();
    let p_inv = p.inverse().expect("isometry is invertible");
    let ctx = qn.ctx();
    let d1 = Matrix::diagonal(&[ctx.one(), ctx.int(-1), ctx.int(-1)]);
    let d2 = Matrix::diagonal(&[ctx.int(-1), ctx.one(), ctx.int(-1)]);
    let gens = vec![p_inv.mul(&d1).mul(&p), p_inv.mul(&d2).mul(&p)];
    GeneratorSet::verified(GroupSpec::Dihedral(2), gens, q)
}

/// Two Klein four-groups are conjugate iff their S3 orbits coincide,
/// equivalently their unordered axis-class triples match.
pub fn klein_same_class(s1: &[Matrix], s2: &[Matrix], q: &TernaryForm) -> Result<bool> {
    let k1 = klein_invariant(s1, q)?;
    let k2 = klein_invariant(s2, q)?;
    debug_assert_eq!(
        k1.orbit == k2.orbit,
        k1.axis_triple == k2.axis_triple,
        "orbit equality and triple equality must agree"
    );
    Ok(k1.axis_triple == k2.axis_triple)
}

/// The conjugacy invariant of a D_2n subgroup (n >= 3): a coset of
/// C = <class of (alpha_n+1)/2> inside the norm group D(<1,-beta_n>).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DihedralClassDescriptor {
    pub n: u32,
    pub beta: FieldElem,
    /// The norm form <1, -beta_n> whose represented classes parametrize
    /// the conjugacy classes (up to C).
    pub norm_form: BinaryForm,
    /// Canonical coset representative: the smaller of c and c * c_generator.
    pub c: SquareClass,
    /// Class of (alpha_n + 1)/2; C is the subgroup it generates.
    pub c_generator: SquareClass,
}

impl DihedralClassDescriptor {
    fn build(n: u32, cd: &CyclotomicData, c_raw: SquareClass) -> Result<Self> {
        let ctx = cd.alpha.ctx();
        let norm_form = BinaryForm::new(ctx.one(), cd.beta.neg())?;
        let c_generator = cd.half_alpha_plus_one()?.clone();
        if !norm_form.represents(&c_raw.to_elem())? {
            return Err(Error::NotInNormGroup(c_raw.to_string()));
        }
        if !norm_form.represents(&c_generator.to_elem())? {
            return Err(Error::NotInNormGroup(format!(
                "(alpha+1)/2 = {c_generator} escaped the norm group"
            )));
        }
        let alt = c_raw.mul(&c_generator);
        let c = if alt < c_raw { alt } else { c_raw };
        Ok(DihedralClassDescriptor {
            n,
            beta: cd.beta.clone(),
            norm_form,
            c,
            c_generator,
        })
    }
}

/// Extracts the invariant coset of a dihedral subgroup of SO(q).
///
/// The subgroup is put into normal position: the canonical-trace rotation r
/// is found, its fixed axis is rescaled to value -beta, the reflection axis
/// inside the complement gives w2, and w3 = r w2 - alpha w2 completes a basis
/// in which the form is exactly diag(-beta, -g, beta*g). The invariant is
/// the class of g against the reference gamma of the canonical normal form.
pub fn dihedral_class(
    gens: &[Matrix],
    n: u32,
    q: &TernaryForm,
) -> Result<DihedralClassDescriptor> {
    dihedral_class_with_budget(gens, n, q, DEFAULT_SEARCH_BUDGET)
}

pub fn dihedral_class_with_budget(
    gens: &[Matrix],
    n: u32,
    q: &TernaryForm,
    budget: u64,
) -> Result<DihedralClassDescriptor> {
    if n < 3 {
        return Err(Error::NotDihedral(
            "the coset invariant is defined for n >= 3".into(),
        ));
    }
    for m in gens {
        OrthoMatrix::new(m.clone(), q.clone())?;
    }
    let elements = close_subgroup(gens, 2 * n as usize)
        .map_err(|_| Error::NotDihedral(format!("closure exceeds order {}", 2 * n)))?;
    let report = classify_elements(&elements, q.ctx());
    if report.iso_type != Some(GroupSpec::Dihedral(n)) {
        return Err(Error::NotDihedral(format!(
            "subgroup of order {} is not D{}",
            report.order,
            2 * n
        )));
    }
    let (qn, _) = q.normalized()?;
    let reference = dihedral_normal_form(n, &qn, budget)?;
    let cd = &reference.cyclotomic;
    let beta = cd.beta.clone();
    let ctx = qn.ctx();

    // the rotation whose restricted trace matches the canonical alpha
    let want_trace = ctx.one().add(&cd.alpha).add(&cd.alpha);
    let r = elements
        .iter()
        .find(|m| m.trace() == want_trace && matrix_has_order(m, n))
        .ok_or_else(|| {
            Error::NotDihedral("no rotation with the canonical trace found".into())
        })?;

    // fixed axis of r, rescaled so q(v1) = -beta exactly
    let mut shifted = r.clone();
    for i in 0..3 {
        shifted.set(i, i, shifted.at(i, i).sub(&ctx.one()));
    }
    let ker = shifted.kernel();
    if ker.len() != 1 {
        return Err(Error::NotDihedral("rotation axis is not a line".into()));
    }
    let v1 = ker.into_iter().next().unwrap();
    let ratio = qn.evaluate(&v1).div(&beta.neg());
    let u = ratio
        .sqrt_exact()
        .ok_or_else(|| Error::NotDihedral("axis class differs from -beta".into()))?;
    let v1 = vec_scale(&v1, &u.inv().expect("nonzero axis value"));

    // a reflection (inverts r); its fixed axis lies in the complement of v1
    let tau = elements
        .iter()
        .find(|t| {
            !t.is_identity()
                && t.mul(t).is_identity()
                && t.mul(r).mul(t) == r.inverse().expect("group element")
        })
        .ok_or_else(|| Error::NotDihedral("no inverting reflection found".into()))?;
    let w2 = involution_axis(tau)?;
    // w3 = r w2 - alpha w2
    let rw2 = r.mul_vec(&w2);
    let w3: Vector = (0..3)
        .map(|i| rw2[i].sub(&cd.alpha.mul(&w2[i])))
        .collect();

    // the form in basis (v1, w2, w3) is exactly diag(-beta, -g, beta*g)
    let basis = Matrix::from_columns(&[v1, w2.clone(), w3])?;
    let gram = basis.transpose().mul(&qn.gram()).mul(&basis);
    let g = gram.at(1, 1).neg();
    let expected = Matrix::diagonal(&[beta.neg(), g.neg(), beta.mul(&g)]);
    if gram != expected {
        return Err(Error::NotDihedral(
            "aligned basis did not reach the normal shape".into(),
        ));
    }
    let c_raw = reduce_square_class(&g.mul(&reference.gamma))?;
    DihedralClassDescriptor::build(n, cd, c_raw)
}

/// Builds the representative dihedral subgroup for a class c in
/// D(<1,-beta_n>): conjugate the standard generators through an explicit
/// isometry with <-beta, -c*gamma, c*beta*gamma>.
pub fn representative_dihedral(
    c: &SquareClass,
    n: u32,
    q: &TernaryForm,
) -> Result<(DihedralClassDescriptor, GeneratorSet)> {
    representative_dihedral_with_budget(c, n, q, DEFAULT_SEARCH_BUDGET)
}

pub fn representative_dihedral_with_budget(
    c: &SquareClass,
    n: u32,
    q: &TernaryForm,
    budget: u64,
) -> Result<(DihedralClassDescriptor, GeneratorSet)> {
    let decision = embeds(&GroupSpec::Dihedral(n), q)?;
    if !decision.embeds {
        return Err(Error::NotEmbeddable(format!(
            "D{} does not embed: {}",
            2 * n,
            decision.trace.join("; ")
        )));
    }
    let (qn, _) = q.normalized()?;
    let reference = dihedral_normal_form(n, &qn, budget)?;
    let cd = reference.cyclotomic.clone();
    let descriptor = DihedralClassDescriptor::build(n, &cd, c.clone())?;
    let ctx = qn.ctx();
    let ce = c.to_elem();
    let twisted = TernaryForm::new(
        cd.beta.neg(),
        ce.mul(&reference.gamma).neg(),
        ce.mul(&cd.beta).mul(&reference.gamma),
    )?;
    let w = explicit_isometry_with_budget(&qn, &twisted, budget)?;
    let p = w.matrix().clone();
    let p_inv = p.inverse().expect("isometry is invertible");
    let (s, t) = standard_dihedral_generators(&cd, ctx);
    let gens = vec![p_inv.mul(&s).mul(&p), p_inv.mul(&t).mul(&p)];
    let set = GeneratorSet::verified(GroupSpec::Dihedral(n), gens, q)?;
    Ok((descriptor, set))
}

/// Same conjugacy class iff c1 * c2 lands in C = {1, class((alpha_n+1)/2)}.
pub fn dihedral_same_class(
    c1: &SquareClass,
    c2: &SquareClass,
    n: u32,
    q: &TernaryForm,
) -> Result<bool> {
    let ctx = q.ctx();
    let cd = crate::cyclotomic::alpha_beta(n, ctx)?.ok_or_else(|| {
        Error::NotEmbeddable(format!("alpha_{n} does not exist in {ctx}"))
    })?;
    let norm_form = BinaryForm::new(ctx.one(), cd.beta.neg())?;
    for c in [c1, c2] {
        if !norm_form.represents(&c.to_elem())? {
            return Err(Error::NotInNormGroup(c.to_string()));
        }
    }
    let prod = c1.mul(c2);
    let cgen = cd.half_alpha_plus_one()?;
    Ok(prod.is_trivial() || &prod == cgen)
}

fn matrix_has_order(m: &Matrix, n: u32) -> bool {
    let mut acc = m.clone();
    for _ in 1..n {
        if acc.is_identity() {
            return false; // a proper divisor of n already hit the identity
        }
        acc = acc.mul(m);
    }
    acc.is_identity()
}

/// How the classes of one isomorphism type are reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SummaryMode {
    /// Exactly this many conjugacy classes.
    FiniteCount(usize),
    /// The classes are parametrized by an infinite (or not enumerated) set;
    /// membership and equality queries remain available.
    DecisionOnly { parameter_set: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacySummary {
    pub group: GroupSpec,
    pub embeds: bool,
    pub mode: SummaryMode,
    /// Human-readable invariant per class, when enumerated.
    pub classes: Vec<String>,
    pub trace: Vec<String>,
}

/// Conjugacy-class bookkeeping for G inside SO(q).
///
/// Over F_p the two square classes make every parameter set finite, so exact
/// counts are produced. Over Q the count is finite only for cyclic n >= 3 and
/// the polyhedral types (at most one class each); involutions, Klein groups
/// and dihedral groups get a decision-only summary naming their parameter set.
pub fn conjugacy_summary(g: &GroupSpec, q: &TernaryForm) -> Result<ConjugacySummary> {
    let ctx = q.ctx();
    let decision = match embeds(g, q) {
        Ok(d) => d,
        Err(e) => return Err(e),
    };
    if !decision.embeds {
        return Ok(ConjugacySummary {
            group: *g,
            embeds: false,
            mode: SummaryMode::FiniteCount(0),
            classes: vec![],
            trace: decision.trace,
        });
    }
    let (qn, _) = q.normalized()?;
    match ctx {
        FieldCtx::PrimeField(p) => {
            let ns = least_nonresidue(p);
            let both_classes = [
                SquareClass::Mod { p, r: 1 },
                SquareClass::Mod { p, r: ns },
            ];
            match g {
                GroupSpec::Cyclic(1) => Ok(summary_finite(*g, decision.trace, vec!["trivial subgroup".into()])),
                GroupSpec::Cyclic(2) => {
                    // ternary forms over F_p are universal: D(q) has both classes
                    let classes = both_classes
                        .iter()
                        .map(|d| format!("axis class d = {d}"))
                        .collect();
                    Ok(summary_finite(*g, decision.trace, classes))
                }
                GroupSpec::Dihedral(2) => {
                    let a = qn.diag()[0].neg();
                    let b = qn.diag()[1].neg();
                    let mut orbits: Vec<Vec<(SquareClass, SquareClass)>> = Vec::new();
                    let mut assigned: BTreeSet<(SquareClass, SquareClass)> = BTreeSet::new();
                    for x in &both_classes {
                        for y in &both_classes {
                            let pair = (x.clone(), y.clone());
                            if assigned.contains(&pair) {
                                continue;
                            }
                            if !in_q_ab(&a, &b, &pair)? {
                                continue;
                            }
                            let orbit = klein_orbit(&a, &b, &pair)?;
                            for q in &orbit {
                                assigned.insert(q.clone());
                            }
                            orbits.push(orbit);
                        }
                    }
                    let classes = orbits
                        .iter()
                        .map(|o| {
                            let names: Vec<String> =
                                o.iter().map(|(x, y)| format!("({x},{y})")).collect();
                            format!("orbit {{{}}}", names.join(", "))
                        })
                        .collect();
                    Ok(summary_finite(*g, decision.trace, classes))
                }
                GroupSpec::Cyclic(_) | GroupSpec::A4 | GroupSpec::S4 | GroupSpec::A5 => Ok(
                    summary_finite(*g, decision.trace, vec!["unique class".into()]),
                ),
                GroupSpec::Dihedral(n) => {
                    let cd = crate::cyclotomic::alpha_beta(*n, ctx)?
                        .expect("embeds implies alpha exists");
                    let cgen = cd.half_alpha_plus_one()?.clone();
                    // binary forms over F_p are universal: D(<1,-beta>) is everything
                    let classes: Vec<String> = if cgen.is_trivial() {
                        both_classes
                            .iter()
                            .map(|c| format!("coset of c = {c}"))
                            .collect()
                    } else {
                        vec!["coset of c = 1 (C is everything)".into()]
                    };
                    Ok(summary_finite(*g, decision.trace, classes))
                }
            }
        }
        FieldCtx::Rationals => match g {
            GroupSpec::Cyclic(1) => Ok(summary_finite(*g, decision.trace, vec!["trivial subgroup".into()])),
            GroupSpec::Cyclic(2) => Ok(ConjugacySummary {
                group: *g,
                embeds: true,
                mode: SummaryMode::DecisionOnly {
                    parameter_set: format!("D({qn}), the square classes represented by q"),
                },
                classes: vec![],
                trace: decision.trace,
            }),
            GroupSpec::Dihedral(2) => Ok(ConjugacySummary {
                group: *g,
                embeds: true,
                mode: SummaryMode::DecisionOnly {
                    parameter_set: format!(
                        "Q_a,b / S3 for (a,b) = ({},{})",
                        qn.diag()[0].neg(),
                        qn.diag()[1].neg()
                    ),
                },
                classes: vec![],
                trace: decision.trace,
            }),
            GroupSpec::Dihedral(n) => {
                let cd = crate::cyclotomic::alpha_beta(*n, ctx)?
                    .expect("embeds implies alpha exists");
                Ok(ConjugacySummary {
                    group: *g,
                    embeds: true,
                    mode: SummaryMode::DecisionOnly {
                        parameter_set: format!(
                            "D(<1,{}>)/C with C generated by the class of {}",
                            cd.beta.neg(),
                            cd.half_alpha_plus_one()?
                        ),
                    },
                    classes: vec![],
                    trace: decision.trace,
                })
            }
            GroupSpec::Cyclic(_) | GroupSpec::A4 | GroupSpec::S4 | GroupSpec::A5 => Ok(
                summary_finite(*g, decision.trace, vec!["unique class".into()]),
            ),
        },
    }
}

fn summary_finite(group: GroupSpec, trace: Vec<String>, classes: Vec<String>) -> ConjugacySummary {
    ConjugacySummary {
        group,
        embeds: true,
        mode: SummaryMode::FiniteCount(classes.len()),
        classes,
        trace,
    }
}

/// The full S3 orbit of a square-class pair under the s and t maps.
pub fn klein_orbit(
    a: &FieldElem,
    b: &FieldElem,
    seed: &(SquareClass, SquareClass),
) -> Result<Vec<(SquareClass, SquareClass)>> {
    let mut orbit: BTreeSet<(SquareClass, SquareClass)> = BTreeSet::new();
    let mut frontier = vec![seed.clone()];
    orbit.insert(seed.clone());
    while let Some(p) = frontier.pop() {
        for next in [klein_s_action(a, b, &p)?, klein_t_action(a, b, &p)?] {
            if orbit.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    Ok(orbit.into_iter().collect())
}
