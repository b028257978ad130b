//! Brute-force ground truth over F_p: enumerate all of SO(q)(F_p), build the
//! full 2-generated subgroup census with conjugacy classes, and cross-check
//! the embedding and conjugacy predictions against it.
//!
//! Everything here runs on raw residue matrices indexed into a multiplication
//! table, so closures are table lookups over bitsets rather than matrix
//! arithmetic. The element list is sorted, making every census deterministic.

use std::collections::HashMap;

use crate::conjugacy::{conjugacy_summary, SummaryMode};
use crate::embedding::{embeds, GroupSpec};
use crate::error::{Error, Result};
use crate::field::{mul_mod, FieldCtx, FieldElem};
use crate::linalg::Matrix;
use crate::quadform::TernaryForm;
use crate::spectra::{p_irregular_isotropy_check, OrthoMatrix};

/// Largest characteristic the oracle will enumerate.
pub const ORACLE_MAX_P: u64 = 13;

type Raw = [u64; 9];

fn raw_mul(a: &Raw, b: &Raw, p: u64) -> Raw {
    let mut out = [0u64; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0u128;
            for k in 0..3 {
                acc += a[3 * i + k] as u128 * b[3 * k + j] as u128;
            }
            out[3 * i + j] = (acc % p as u128) as u64;
        }
    }
    out
}

fn raw_det(m: &Raw, p: u64) -> u64 {
    let sub = |x: u64, y: u64| (x + p - y % p) % p;
    let c0 = sub(mul_mod(m[4], m[8], p), mul_mod(m[5], m[7], p));
    let c1 = sub(mul_mod(m[3], m[8], p), mul_mod(m[5], m[6], p));
    let c2 = sub(mul_mod(m[3], m[7], p), mul_mod(m[4], m[6], p));
    let t = mul_mod(m[0], c0, p) + p * p - mul_mod(m[1], c1, p) + mul_mod(m[2], c2, p);
    t % p
}

fn raw_to_matrix(m: &Raw, p: u64) -> Matrix {
    Matrix::from_rows(
        (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| FieldElem::Mod { p, r: m[3 * i + j] })
                    .collect()
            })
            .collect(),
    )
    .expect("3x3 residue matrix")
}

/// All of SO(q)(F_p), found column-wise: the i-th column ranges over the
/// q-sphere of value d_i, orthogonality prunes the rest. Sorted output.
pub fn enumerate_group(q: &TernaryForm) -> Result<Vec<Matrix>> {
    let (raw, p) = enumerate_raw(q)?;
    Ok(raw.iter().map(|m| raw_to_matrix(m, p)).collect())
}

fn enumerate_raw(q: &TernaryForm) -> Result<(Vec<Raw>, u64)> {
    let p = match q.ctx() {
        FieldCtx::PrimeField(p) => p,
        FieldCtx::Rationals => {
            return Err(Error::FieldMismatch(
                "the oracle enumerates over F_p only".into(),
            ))
        }
    };
    if p > ORACLE_MAX_P {
        return Err(Error::BudgetExceeded(format!(
            "enumeration is limited to p <= {ORACLE_MAX_P}, got {p}"
        )));
    }
    let d: Vec<u64> = q.diag().iter().map(|x| x.as_residue().unwrap()).collect();
    let value = |v: &[u64; 3]| -> u64 {
        (0..3).fold(0u64, |acc, i| {
            (acc + mul_mod(d[i], mul_mod(v[i], v[i], p), p)) % p
        })
    };
    let pair = |u: &[u64; 3], v: &[u64; 3]| -> u64 {
        (0..3).fold(0u64, |acc, i| {
            (acc + mul_mod(d[i], mul_mod(u[i], v[i], p), p)) % p
        })
    };
    // q-spheres for each diagonal value
    let mut spheres: Vec<Vec<[u64; 3]>> = vec![Vec::new(); 3];
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                let v = [x, y, z];
                let qv = value(&v);
                for i in 0..3 {
                    if qv == d[i] {
                        spheres[i].push(v);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for c1 in &spheres[0] {
        for c2 in &spheres[1] {
            if pair(c1, c2) != 0 {
                continue;
            }
            for c3 in &spheres[2] {
                if pair(c1, c3) != 0 || pair(c2, c3) != 0 {
                    continue;
                }
                let m: Raw = [
                    c1[0], c2[0], c3[0], c1[1], c2[1], c3[1], c1[2], c2[2], c3[2],
                ];
                if raw_det(&m, p) == 1 {
                    out.push(m);
                }
            }
        }
    }
    out.sort_unstable();
    Ok((out, p))
}

/// Indexed group: sorted elements, multiplication and inverse tables.
struct IndexedGroup {
    p: u64,
    elems: Vec<Raw>,
    table: Vec<u16>, // table[i * n + j] = index of elems[i] * elems[j]
    inv: Vec<u16>,
    identity: u16,
    orders: Vec<u32>,
}

impl IndexedGroup {
    fn build(q: &TernaryForm) -> Result<IndexedGroup> {
        let (elems, p) = enumerate_raw(q)?;
        let n = elems.len();
        if n > u16::MAX as usize {
            return Err(Error::BudgetExceeded("group too large to index".into()));
        }
        let index: HashMap<Raw, u16> = elems
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i as u16))
            .collect();
        let mut table = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = raw_mul(&elems[i], &elems[j], p);
                // failure here would mean the enumerated set is not closed
                let k = *index.get(&prod).ok_or_else(|| {
                    Error::NotInGroup("enumerated set is not closed under multiplication".into())
                })?;
                table[i * n + j] = k;
            }
        }
        let id_raw: Raw = [1, 0, 0, 0, 1, 0, 0, 0, 1];
        let identity = *index.get(&id_raw).expect("identity is orthogonal");
        let mut inv = vec![0u16; n];
        for i in 0..n {
            let j = (0..n)
                .find(|&j| table[i * n + j] == identity)
                .expect("finite group has inverses");
            inv[i] = j as u16;
        }
        let mut orders = vec![0u32; n];
        for i in 0..n {
            let mut acc = i as u16;
            let mut k = 1u32;
            while acc != identity {
                acc = table[acc as usize * n + i];
                k += 1;
            }
            orders[i] = k;
        }
        Ok(IndexedGroup {
            p,
            elems,
            table,
            inv,
            identity,
            orders,
        })
    }

    fn n(&self) -> usize {
        self.elems.len()
    }

    fn mul(&self, i: u16, j: u16) -> u16 {
        self.table[i as usize * self.n() + j as usize]
    }

    /// g^-1 * x * g
    fn conj(&self, x: u16, g: u16) -> u16 {
        self.mul(self.mul(self.inv[g as usize], x), g)
    }

    /// Closure of {a, b} as a sorted index list.
    fn close_pair(&self, a: u16, b: u16) -> Vec<u16> {
        let n = self.n();
        let words = n.div_ceil(64);
        let mut seen = vec![0u64; words];
        let set = |bits: &mut Vec<u64>, i: u16| {
            bits[i as usize / 64] |= 1u64 << (i as usize % 64)
        };
        let get = |bits: &[u64], i: u16| bits[i as usize / 64] >> (i as usize % 64) & 1 == 1;
        let mut frontier = vec![self.identity];
        set(&mut seen, self.identity);
        while let Some(x) = frontier.pop() {
            for g in [a, b] {
                let y = self.mul(x, g);
                if !get(&seen, y) {
                    set(&mut seen, y);
                    frontier.push(y);
                }
            }
        }
        let mut out = Vec::new();
        for (w, word) in seen.iter().enumerate() {
            let mut bits = *word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push((w * 64 + b) as u16);
                bits &= bits - 1;
            }
        }
        out
    }
}

/// Label of a census entry: a recognized p-regular type, or a p-irregular
/// subgroup flagged (not typed) by its order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CensusLabel {
    Regular(GroupSpec),
    PIrregular { order: usize },
}

impl std::fmt::Display for CensusLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CensusLabel::Regular(g) => write!(f, "{g}"),
            CensusLabel::PIrregular { order } => write!(f, "p-irregular(order {order})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub label: CensusLabel,
    pub subgroup_count: usize,
    pub conjugacy_class_count: usize,
    /// One generator pair per conjugacy class.
    pub representatives: Vec<Vec<Matrix>>,
}

#[derive(Debug, Clone)]
pub struct GroupCensus {
    pub p: u64,
    pub form: TernaryForm,
    pub group_order: usize,
    pub entries: Vec<CensusEntry>,
}

impl GroupCensus {
    pub fn entry(&self, label: &CensusLabel) -> Option<&CensusEntry> {
        self.entries.iter().find(|e| &e.label == label)
    }
}

/// Full census of the subgroups of SO(q)(F_p) generated by at most two
/// elements (which covers every cyclic, dihedral and polyhedral subgroup and
/// the relevant p-irregular ones), with conjugacy classes under the full
/// group action.
pub fn subgroup_census(q: &TernaryForm) -> Result<GroupCensus> {
    let g = IndexedGroup::build(q)?;
    let n = g.n();

    // distinct subgroups, remembering one generating pair each
    let mut subgroups: HashMap<Vec<u16>, (u16, u16)> = HashMap::new();
    for i in 0..n as u16 {
        for j in i..n as u16 {
            let key = g.close_pair(i, j);
            subgroups.entry(key).or_insert((i, j));
        }
    }

    // conjugacy classes of subgroups; conjugates of a 2-generated subgroup
    // are 2-generated, so every orbit member is already in the map
    let mut keys: Vec<Vec<u16>> = subgroups.keys().cloned().collect();
    keys.sort();
    let mut assigned: std::collections::HashSet<Vec<u16>> = std::collections::HashSet::new();
    let mut classes: Vec<(Vec<u16>, usize)> = Vec::new(); // (representative key, orbit size)
    for key in &keys {
        if assigned.contains(key) {
            continue;
        }
        let mut orbit_keys: std::collections::HashSet<Vec<u16>> =
            std::collections::HashSet::new();
        for conj_by in 0..n as u16 {
            let mut image: Vec<u16> = key.iter().map(|&x| g.conj(x, conj_by)).collect();
            image.sort_unstable();
            orbit_keys.insert(image);
        }
        let orbit_size = orbit_keys.len();
        for k in orbit_keys {
            assigned.insert(k);
        }
        classes.push((key.clone(), orbit_size));
    }

    // label each class and aggregate entries
    let mut per_label: Vec<(CensusLabel, usize, usize, Vec<Vec<Matrix>>)> = Vec::new();
    for (rep_key, orbit_size) in &classes {
        let label = classify_indexed(&g, rep_key);
        let (a, b) = subgroups[rep_key];
        let gens = vec![
            raw_to_matrix(&g.elems[a as usize], g.p),
            raw_to_matrix(&g.elems[b as usize], g.p),
        ];
        match per_label.iter_mut().find(|(l, ..)| l == &label) {
            Some((_, subs, cls, reps)) => {
                *subs += orbit_size;
                *cls += 1;
                reps.push(gens);
            }
            None => per_label.push((label, *orbit_size, 1, vec![gens])),
        }
    }
    per_label.sort_by(|a, b| a.0.cmp(&b.0));
    let entries = per_label
        .into_iter()
        .map(|(label, subgroup_count, conjugacy_class_count, representatives)| CensusEntry {
            label,
            subgroup_count,
            conjugacy_class_count,
            representatives,
        })
        .collect();
    Ok(GroupCensus {
        p: g.p,
        form: q.clone(),
        group_order: n,
        entries,
    })
}

/// Classify a subgroup given by sorted element indices: p-irregular flagged
/// by order, p-regular types separated by order, cyclicity, involution count
/// and the dihedral inversion test.
fn classify_indexed(g: &IndexedGroup, key: &[u16]) -> CensusLabel {
    let order = key.len();
    if order as u64 % g.p == 0 {
        return CensusLabel::PIrregular { order };
    }
    let orders: Vec<u32> = key.iter().map(|&i| g.orders[i as usize]).collect();
    let involutions = orders.iter().filter(|&&o| o == 2).count();
    if orders.iter().any(|&o| o == order as u32) {
        return CensusLabel::Regular(GroupSpec::Cyclic(order as u32));
    }
    if order == 4 {
        return CensusLabel::Regular(GroupSpec::Dihedral(2));
    }
    if order == 12 && involutions == 3 {
        return CensusLabel::Regular(GroupSpec::A4);
    }
    if order == 24 && involutions == 9 {
        return CensusLabel::Regular(GroupSpec::S4);
    }
    if order == 60 && involutions == 15 {
        return CensusLabel::Regular(GroupSpec::A5);
    }
    if order % 2 == 0 {
        let half = (order / 2) as u32;
        let r = key
            .iter()
            .find(|&&i| g.orders[i as usize] == half)
            .copied();
        if let Some(r) = r {
            let r_inv = g.inv[r as usize];
            let dihedral = key.iter().any(|&t| {
                g.orders[t as usize] == 2 && g.mul(g.mul(t, r), t) == r_inv
            });
            if dihedral && half >= 3 {
                return CensusLabel::Regular(GroupSpec::Dihedral(half));
            }
        }
    }
    // a p-regular subgroup outside the candidate list cannot occur in SO(q)
    CensusLabel::PIrregular { order }
}

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub p: u64,
    pub group_order: usize,
    pub lines: Vec<CheckLine>,
}

impl CrossCheckReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }
}

/// Compares every p-regular prediction (presence per the embedding rules,
/// class count per the conjugacy parametrizations) with the brute-force
/// census, and confirms an exact isotropy witness for every p-irregular
/// class. Failures become FAIL lines, never panics.
pub fn cross_check(q: &TernaryForm) -> Result<CrossCheckReport> {
    let census = subgroup_census(q)?;
    let p = census.p;
    let mut lines = Vec::new();

    let expect_order = (p * (p * p - 1)) as usize;
    lines.push(CheckLine {
        name: format!("|SO(q)(F{p})| = p(p^2-1) = {expect_order}"),
        pass: census.group_order == expect_order,
        detail: format!("enumerated {}", census.group_order),
    });

    let mut candidates: Vec<GroupSpec> = Vec::new();
    for n in 1..=(p as u32 + 1) {
        candidates.push(GroupSpec::Cyclic(n));
    }
    for n in 2..=(p as u32 + 1) {
        candidates.push(GroupSpec::Dihedral(n));
    }
    candidates.extend([GroupSpec::A4, GroupSpec::S4, GroupSpec::A5]);

    for g in candidates {
        if !g.is_p_regular(p) {
            continue; // covered by the p-irregular witness check below
        }
        let predicted = embeds(&g, q)?.embeds;
        let entry = census.entry(&CensusLabel::Regular(g));
        let present = entry.is_some();
        lines.push(CheckLine {
            name: format!("{g}: embeds prediction vs census presence"),
            pass: predicted == present,
            detail: format!("predicted {predicted}, census {present}"),
        });
        let predicted_count = match conjugacy_summary(&g, q)?.mode {
            SummaryMode::FiniteCount(c) => c,
            SummaryMode::DecisionOnly { .. } => {
                unreachable!("summaries over F_p always count")
            }
        };
        let census_count = entry.map(|e| e.conjugacy_class_count).unwrap_or(0);
        lines.push(CheckLine {
            name: format!("{g}: class count"),
            pass: predicted_count == census_count,
            detail: format!("predicted {predicted_count}, census {census_count}"),
        });
    }

    // Theorem-1 style check: every p-irregular class yields a verified
    // isotropy witness through its order-p element
    for entry in &census.entries {
        if let CensusLabel::PIrregular { order } = entry.label {
            for (k, gens) in entry.representatives.iter().enumerate() {
                let line = p_irregular_witness_line(q, &entry.label, k, order, gens);
                lines.push(line);
            }
        }
    }

    Ok(CrossCheckReport {
        p,
        group_order: census.group_order,
        lines,
    })
}

fn p_irregular_witness_line(
    q: &TernaryForm,
    label: &CensusLabel,
    class_idx: usize,
    order: usize,
    gens: &[Matrix],
) -> CheckLine {
    let name = format!("{label} class {class_idx}: isotropy witness from an order-p element");
    let result = (|| -> Result<String> {
        let elements = crate::embedding::close_subgroup(gens, order + 1)?;
        let p = q.ctx().characteristic();
        let elem = elements
            .iter()
            .map(|m| OrthoMatrix::new(m.clone(), q.clone()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|m| {
                crate::spectra::element_order(m) == crate::spectra::ElementOrder::Finite(p as u32)
            })
            .ok_or_else(|| Error::OrderMismatch("no order-p element found".into()))?;
        let witness = p_irregular_isotropy_check(&elem)?;
        let vals: Vec<String> = witness.iter().map(|x| x.to_string()).collect();
        Ok(format!("q(({})) = 0", vals.join(", ")))
    })();
    match result {
        Ok(detail) => CheckLine {
            name,
            pass: true,
            detail,
        },
        Err(e) => CheckLine {
            name,
            pass: false,
            detail: format!("{e}"),
        },
    }
}
