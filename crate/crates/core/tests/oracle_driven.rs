//! Properties checked against the exhaustive finite-field enumeration:
//! spectral structure of every group element, witness exactness, order
//! agreement, and conjugacy invariants cross-checked with brute force.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use soq_core::conjugacy::{
    dihedral_class, involution_class, klein_invariant, klein_same_class,
};
use soq_core::embedding::{close_subgroup, GroupSpec};
use soq_core::field::FieldCtx;
use soq_core::linalg::Matrix;
use soq_core::oracle::{enumerate_group, subgroup_census, CensusLabel};
use soq_core::quadform::TernaryForm;
use soq_core::spectra::{
    analyze_element, element_order, p_irregular_isotropy_check, ElementOrder, OrthoMatrix,
    SpectralKind,
};

fn fp_form(p: u64, d: [i64; 3]) -> TernaryForm {
    let ctx = FieldCtx::prime_field(p).unwrap();
    TernaryForm::new(ctx.int(d[0]), ctx.int(d[1]), ctx.int(d[2])).unwrap()
}

#[test]
fn char_poly_palindromic_for_every_element() {
    // analyze_element rejects any element whose characteristic polynomial
    // fails P(x) = -x^3 P(1/x); running it over the whole group is the check
    for p in [3u64, 5, 7] {
        let q = fp_form(p, [1, 1, 1]);
        for m in enumerate_group(&q).unwrap() {
            let om = OrthoMatrix::new(m, q.clone()).unwrap();
            let report = analyze_element(&om).unwrap();
            // coefficient palindrome: [1, -t, t, -1]
            assert_eq!(report.char_poly[1].neg(), report.char_poly[2]);
            // witnesses are exact zeros
            if let Some(w) = &report.witness {
                assert!(q.evaluate(w).is_zero());
                assert!(w.iter().any(|x| !x.is_zero()));
            }
        }
    }
}

#[test]
fn order_agrees_with_naive_multiplication() {
    let q = fp_form(5, [1, 1, 1]);
    for m in enumerate_group(&q).unwrap() {
        let om = OrthoMatrix::new(m.clone(), q.clone()).unwrap();
        let mut acc = m.clone();
        let mut naive = 1u32;
        while !acc.is_identity() {
            acc = acc.mul(&m);
            naive += 1;
        }
        assert_eq!(element_order(&om), ElementOrder::Finite(naive));
    }
}

#[test]
fn unipotents_over_f5_have_isotropy_witnesses() {
    let q = fp_form(5, [1, 1, 1]);
    let mut unipotent_count = 0;
    for m in enumerate_group(&q).unwrap() {
        let om = OrthoMatrix::new(m, q.clone()).unwrap();
        let report = analyze_element(&om).unwrap();
        if report.kind == SpectralKind::Unipotent {
            unipotent_count += 1;
            assert_eq!(report.order, ElementOrder::Finite(5));
            let w = report.witness.expect("unipotent witness");
            assert!(q.evaluate(&w).is_zero());
            let back = p_irregular_isotropy_check(&om).unwrap();
            assert!(q.evaluate(&back).is_zero());
        }
    }
    // SO(q)(F_5) = PGL2(F_5) has 24 elements of order 5
    assert_eq!(unipotent_count, 24);
}

#[test]
fn p_irregular_witnesses_on_scaled_form() {
    // q = <1,2,3> over F_5 has trivial discriminant (6 = 1); every order-5
    // element is unipotent and yields a verified witness
    let q = fp_form(5, [1, 2, 3]);
    let mut count = 0;
    for m in enumerate_group(&q).unwrap() {
        let om = OrthoMatrix::new(m, q.clone()).unwrap();
        if element_order(&om) == ElementOrder::Finite(5) {
            count += 1;
            let w = p_irregular_isotropy_check(&om).unwrap();
            assert!(q.evaluate(&w).is_zero());
            assert!(w.iter().any(|x| !x.is_zero()));
        }
    }
    assert_eq!(count, 24);
}

/// All subgroups of a census entry, as generator lists.
fn entry_class_generators(
    census: &soq_core::oracle::GroupCensus,
    label: &CensusLabel,
) -> Vec<Vec<Matrix>> {
    census
        .entry(label)
        .map(|e| e.representatives.clone())
        .unwrap_or_default()
}

#[test]
fn klein_invariant_separates_census_classes() {
    for p in [5u64, 7] {
        let q = fp_form(p, [1, 1, 1]);
        let census = subgroup_census(&q).unwrap();
        let classes = entry_class_generators(&census, &CensusLabel::Regular(GroupSpec::Dihedral(2)));
        assert!(!classes.is_empty());
        // representatives of distinct census classes must carry distinct
        // invariants; members of one class share theirs
        let invariants: Vec<_> = classes
            .iter()
            .map(|gens| klein_invariant(gens, &q).unwrap())
            .collect();
        for i in 0..invariants.len() {
            for j in (i + 1)..invariants.len() {
                assert_ne!(
                    invariants[i].axis_triple, invariants[j].axis_triple,
                    "distinct census classes collapsed at p={p}"
                );
            }
        }
        // and the number of classes matches the orbit count computed by the
        // conjugacy module
        let summary =
            soq_core::conjugacy::conjugacy_summary(&GroupSpec::Dihedral(2), &q).unwrap();
        assert_eq!(
            summary.mode,
            soq_core::conjugacy::SummaryMode::FiniteCount(classes.len())
        );
    }
}

/// All Klein four-groups of SO(q)(F_p), found directly: commuting pairs of
/// distinct involutions, deduplicated as element sets.
fn all_klein_subgroups(group: &[Matrix]) -> Vec<Vec<Matrix>> {
    let involutions: Vec<&Matrix> = group
        .iter()
        .filter(|m| !m.is_identity() && m.mul(m).is_identity())
        .collect();
    let mut seen: std::collections::BTreeSet<Vec<Matrix>> = std::collections::BTreeSet::new();
    for (i, a) in involutions.iter().enumerate() {
        for b in &involutions[i + 1..] {
            if a.mul(b) != b.mul(a) {
                continue;
            }
            let mut elems = close_subgroup(&[(*a).clone(), (*b).clone()], 4).unwrap();
            elems.sort();
            seen.insert(elems);
        }
    }
    seen.into_iter().collect()
}

#[test]
fn klein_same_class_agrees_with_direct_conjugacy_on_all_pairs() {
    for p in [5u64, 7] {
        let q = fp_form(p, [1, 1, 1]);
        let group = enumerate_group(&q).unwrap();
        let subgroups = all_klein_subgroups(&group);
        assert!(subgroups.len() >= 10, "p={p}: expected many Klein subgroups");
        // directly computed conjugacy: g^-1 S g = T for some g in the group
        let conjugate = |s: &Vec<Matrix>, t: &Vec<Matrix>| -> bool {
            group.iter().any(|g| {
                let g_inv = g.inverse().unwrap();
                let mut image: Vec<Matrix> =
                    s.iter().map(|m| g_inv.mul(m).mul(g)).collect();
                image.sort();
                &image == t
            })
        };
        let invariants: Vec<_> = subgroups
            .iter()
            .map(|s| klein_invariant(s, &q).unwrap())
            .collect();
        for i in 0..subgroups.len() {
            for j in i..subgroups.len() {
                let predicted = invariants[i].axis_triple == invariants[j].axis_triple;
                let actual = conjugate(&subgroups[i], &subgroups[j]);
                assert_eq!(
                    predicted, actual,
                    "p={p}: invariant and direct conjugacy disagree at ({i},{j})"
                );
                assert_eq!(
                    predicted,
                    klein_same_class(&subgroups[i], &subgroups[j], &q).unwrap()
                );
            }
        }
    }
}

#[test]
fn klein_conjugates_share_their_invariant() {
    let p = 7u64;
    let q = fp_form(p, [1, 1, 1]);
    let census = subgroup_census(&q).unwrap();
    let classes = entry_class_generators(&census, &CensusLabel::Regular(GroupSpec::Dihedral(2)));
    let group = enumerate_group(&q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for gens in &classes {
        for _ in 0..10 {
            let g = group.choose(&mut rng).unwrap();
            let g_inv = g.inverse().unwrap();
            let conj: Vec<Matrix> = gens.iter().map(|m| g_inv.mul(m).mul(g)).collect();
            assert!(klein_same_class(gens, &conj, &q).unwrap());
        }
    }
}

#[test]
fn dihedral_cosets_match_census_classes_at_p5() {
    // D6 inside SO(q)(F_5) = S5 splits into exactly two conjugacy classes;
    // the norm-group coset invariant must separate them, and conjugates of
    // any representative must keep their canonical coset
    let p = 5u64;
    let q = fp_form(p, [1, 1, 1]);
    let census = subgroup_census(&q).unwrap();
    let classes = entry_class_generators(&census, &CensusLabel::Regular(GroupSpec::Dihedral(3)));
    assert_eq!(classes.len(), 2, "S5 has two classes of S3 subgroups");
    let d0 = dihedral_class(&classes[0], 3, &q).unwrap();
    let d1 = dihedral_class(&classes[1], 3, &q).unwrap();
    assert_ne!(d0.c, d1.c, "census classes must carry distinct cosets");

    let group = enumerate_group(&q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (gens, expected) in [(&classes[0], &d0), (&classes[1], &d1)] {
        for _ in 0..10 {
            let g = group.choose(&mut rng).unwrap();
            let g_inv = g.inverse().unwrap();
            let conj: Vec<Matrix> = gens.iter().map(|m| g_inv.mul(m).mul(g)).collect();
            let got = dihedral_class(&conj, 3, &q).unwrap();
            assert_eq!(got.c, expected.c, "coset changed under conjugation");
        }
    }
}

#[test]
fn involution_classes_are_conjugation_invariant() {
    for p in [5u64, 7] {
        let q = fp_form(p, [1, 1, 1]);
        let group = enumerate_group(&q).unwrap();
        let involutions: Vec<&Matrix> = group
            .iter()
            .filter(|m| !m.is_identity() && m.mul(m).is_identity())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for _ in 0..25 {
            let m = involutions.choose(&mut rng).unwrap();
            let g = group.choose(&mut rng).unwrap();
            let g_inv = g.inverse().unwrap();
            let conj = g_inv.mul(m).mul(g);
            let a = involution_class(m, &q).unwrap();
            let b = involution_class(&conj, &q).unwrap();
            assert_eq!(a.class, b.class);
        }
        // and the two classes really do both occur
        let mut seen: Vec<_> = involutions
            .iter()
            .map(|m| involution_class(m, &q).unwrap().class)
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 2);
    }
}

#[test]
fn cross_check_passes_on_nontrivial_discriminant_forms() {
    // the normalization path: these forms have discriminant in the
    // nonsquare class, yet every prediction must still match brute force
    for (p, d) in [(3u64, [1i64, 1, 2]), (5, [1, 1, 2]), (5, [1, 1, 3])] {
        let q = fp_form(p, d);
        assert!(!q.disc().unwrap().is_trivial());
        let report = soq_core::oracle::cross_check(&q).unwrap();
        for line in &report.lines {
            assert!(line.pass, "p={p} {d:?}: {} ({})", line.name, line.detail);
        }
    }
}

#[test]
fn census_representatives_regenerate_their_subgroup() {
    let q = fp_form(5, [1, 1, 1]);
    let census = subgroup_census(&q).unwrap();
    for entry in &census.entries {
        for gens in &entry.representatives {
            let elements = close_subgroup(gens, census.group_order).unwrap();
            match &entry.label {
                CensusLabel::Regular(g) => {
                    assert_eq!(elements.len(), g.order() as usize, "label {g}");
                }
                CensusLabel::PIrregular { order } => {
                    assert_eq!(elements.len(), *order);
                    assert_eq!(elements.len() as u64 % 5, 0);
                }
            }
        }
    }
}
