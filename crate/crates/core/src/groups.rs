//! Finite matrix groups as explicit element sets: breadth-first closure
//! from generators, orbits and stabilizers of anything a matrix can act on,
//! orbit partitions, and a brute-force search for transitive subgroups of a
//! given order.
//!
//! Storing every element is deliberate: each structural fact this crate
//! cares about is an exhaustive quantification over a group of desk-top
//! size, so the honest data structure is the full sorted element list,
//! guarded by caps.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::galois::FieldTower;
use crate::matspace::{matrix_order, Matrix, Subspace, SubspaceCode};
use crate::report::{CheckItem, CheckReport};
use crate::spread::{all_lines, build_segre_spread, first_summand, line_through, psi,
    second_summand};
use crate::{Error, Result, DEFAULT_CLOSURE_CAP};

/// Entry cap for the Cayley multiplication table used by the subgroup
/// search: |group|² must stay below this.
pub const DEFAULT_TABLE_CAP: u64 = 64_000_000;

/// A finite group of invertible matrices over one tower level, stored as
/// its canonically sorted element list plus the generators it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGroup {
    level: usize,
    n: usize,
    generators: Vec<Matrix>,
    elements: Vec<Matrix>,
}

impl MatrixGroup {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Matrix side length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    /// Sorted, duplicate-free, closed under product and inverse.
    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &MatrixGroup) -> bool {
        self.level == other.level
            && self.n == other.n
            && self.elements.iter().all(|m| other.contains(m))
    }

    /// The one-element group {I}.
    pub fn trivial(level: usize, n: usize) -> MatrixGroup {
        let id = Matrix::identity(level, n);
        MatrixGroup { level, n, generators: vec![id.clone()], elements: vec![id] }
    }

    /// Build from an element list already known to be a group; the list is
    /// sorted and deduplicated, closure is the caller's responsibility.
    fn from_elements(level: usize, n: usize, generators: Vec<Matrix>, mut elements: Vec<Matrix>) -> MatrixGroup {
        elements.sort();
        elements.dedup();
        MatrixGroup { level, n, generators, elements }
    }

    pub fn to_doc(&self, tower: &FieldTower, dump_elements: bool) -> GroupDoc {
        GroupDoc {
            q: tower.size(self.level),
            n: self.n,
            order: self.order(),
            generators: self.generators.iter().map(Matrix::to_rows).collect(),
            elements: dump_elements
                .then(|| self.elements.iter().map(Matrix::to_rows).collect()),
        }
    }
}

/// Wire form of a matrix group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDoc {
    pub q: u64,
    pub n: usize,
    pub order: usize,
    pub generators: Vec<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Vec<Vec<u64>>>>,
}

/// Close a generator list into the full group by breadth-first right
/// multiplication.  Errors if the element count passes `cap`.
pub fn close_group(tower: &FieldTower, generators: &[Matrix], cap: u64) -> Result<MatrixGroup> {
    let Some(first) = generators.first() else {
        return Err(Error::BadInput("a group needs at least one generator".to_string()));
    };
    let (level, n) = (first.level(), first.rows());
    for g in generators {
        if g.level() != level {
            return Err(Error::WrongLevel { expected: level, got: g.level() });
        }
        if g.rows() != n || g.cols() != n {
            return Err(Error::BadDimension(format!(
                "generator of shape {}×{} in a group of degree {n}",
                g.rows(),
                g.cols()
            )));
        }
        if g.det(tower).enc == 0 {
            return Err(Error::Singular);
        }
    }
    let id = Matrix::identity(level, n);
    let mut elements = BTreeSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(x) = queue.pop() {
        for g in generators {
            let y = x.mul(tower, g);
            if elements.contains(&y) {
                continue;
            }
            if elements.len() as u64 >= cap {
                return Err(Error::CapExceeded {
                    what: "group closure".to_string(),
                    needed: elements.len() as u64 + 1,
                    cap,
                });
            }
            elements.insert(y.clone());
            queue.push(y);
        }
    }
    Ok(MatrixGroup {
        level,
        n,
        generators: generators.to_vec(),
        elements: elements.into_iter().collect(),
    })
}

/// The 2×2 coordinate-swap matrix over the extension level.
fn swap2() -> Matrix {
    let mut m = Matrix::zero(FieldTower::MIDDLE, 2, 2);
    m.set_raw(0, 1, 1);
    m.set_raw(1, 0, 1);
    m
}

/// Upper unipotent 2×2 matrix [[1, x], [0, 1]] over the extension level.
fn upper_shear2(x: u64) -> Matrix {
    let mut m = Matrix::identity(FieldTower::MIDDLE, 2);
    m.set_raw(0, 1, x);
    m
}

/// Lower unipotent 2×2 matrix [[1, 0], [x, 1]] over the extension level.
fn lower_shear2(x: u64) -> Matrix {
    let mut m = Matrix::identity(FieldTower::MIDDLE, 2);
    m.set_raw(1, 0, x);
    m
}

/// The nonzero powers of the extension generator: encodings of α^0..α^{s-2}.
fn alpha_powers(tower: &FieldTower) -> Vec<u64> {
    let level = FieldTower::MIDDLE;
    let alpha = tower.alpha(level);
    (0..tower.size(level) - 1)
        .map(|i| tower.pow(alpha, i as i64).expect("powers of a unit").enc)
        .collect()
}

/// The block group of F_q^{2k}: generated by the block swap
/// [[0,I],[I,0]] and the block shears [[I,P^i],[0,I]] for every power of
/// the middle companion matrix P.
pub fn build_g(tower: &FieldTower) -> Result<MatrixGroup> {
    let level = FieldTower::GROUND;
    let k = tower.k();
    let ik = Matrix::identity(level, k);
    let zk = Matrix::zero(level, k, k);
    let p = tower.middle_companion();
    let mut generators = vec![Matrix::from_blocks(&zk, &ik, &ik, &zk)];
    let mut power = ik.clone();
    for _ in 0..tower.qk() - 1 {
        generators.push(Matrix::from_blocks(&ik, &power, &zk, &ik));
        power = power.mul(tower, &p);
    }
    close_group(tower, &generators, DEFAULT_CLOSURE_CAP)
}

/// The 2×2 preimage of [`build_g`] over GF(q^k): generated by the swap and
/// the upper shears by every nonzero field element.
pub fn build_gbar(tower: &FieldTower) -> Result<MatrixGroup> {
    let mut generators = vec![swap2()];
    for x in alpha_powers(tower) {
        generators.push(upper_shear2(x));
    }
    close_group(tower, &generators, DEFAULT_CLOSURE_CAP)
}

/// SL(2, q^k) from its unipotent generators: the upper and lower shears by
/// every nonzero field element.
pub fn build_sl2(tower: &FieldTower) -> Result<MatrixGroup> {
    let mut generators = Vec::new();
    for x in alpha_powers(tower) {
        generators.push(upper_shear2(x));
        generators.push(lower_shear2(x));
    }
    close_group(tower, &generators, DEFAULT_CLOSURE_CAP)
}

/// Every 2×2 matrix over GF(q^k) with determinant one, by scanning all
/// (q^k)^4 candidates.  Refused above field size 25.
pub fn sl2_by_determinant(tower: &FieldTower) -> Result<Vec<Matrix>> {
    let level = FieldTower::MIDDLE;
    let s = tower.size(level);
    if s > 25 {
        return Err(Error::CapExceeded {
            what: "exhaustive 2×2 matrix enumeration".to_string(),
            needed: s * s * s * s,
            cap: 25 * 25 * 25 * 25,
        });
    }
    let mut out = Vec::new();
    let mut m = Matrix::zero(level, 2, 2);
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                for d in 0..s {
                    m.set_raw(0, 0, a);
                    m.set_raw(0, 1, b);
                    m.set_raw(1, 0, c);
                    m.set_raw(1, 1, d);
                    if m.det(tower).enc == 1 {
                        out.push(m.clone());
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The cyclic structure behind the spread: the 2×2 companion matrix M of
/// the top-level polynomial (multiplicative order q^{2k}−1), the
/// determinant-one part ⟨M^{q^k−1}⟩ of order q^k+1, and its block-embedded
/// image in GL(2k, q).
pub struct SingerStructure {
    pub cycle: Matrix,
    pub det_one_part: MatrixGroup,
    pub embedded: MatrixGroup,
}

pub fn build_singer(tower: &FieldTower) -> Result<SingerStructure> {
    let poly = tower.level_poly(FieldTower::TOP);
    let cycle = tower.companion_matrix(&poly)?;
    let det_one_gen = cycle.pow(tower, tower.qk() - 1);
    let det_one_part = close_group(tower, &[det_one_gen.clone()], DEFAULT_CLOSURE_CAP)?;
    let embedded = close_group(tower, &[psi(tower, &det_one_gen)?], DEFAULT_CLOSURE_CAP)?;
    Ok(SingerStructure { cycle, det_one_part, embedded })
}

/// Anything a square matrix can move: subspaces now, flags later.
pub trait GroupAction: Clone + Ord + std::fmt::Debug {
    fn apply(&self, tower: &FieldTower, m: &Matrix) -> Self;
    fn ambient(&self) -> usize;
    fn level(&self) -> usize;
}

impl GroupAction for Subspace {
    fn apply(&self, tower: &FieldTower, m: &Matrix) -> Self {
        self.act(tower, m)
    }

    fn ambient(&self) -> usize {
        self.ambient()
    }

    fn level(&self) -> usize {
        self.level()
    }
}

/// An orbit with its stabilizer; the orbit–stabilizer identity is asserted
/// at construction.
#[derive(Debug, Clone)]
pub struct OrbitResult<P> {
    pub base: P,
    pub orbit: Vec<P>,
    pub stabilizer: MatrixGroup,
}

/// Orbit of `point` under every element of `group`, with the stabilizer
/// collected along the way.
pub fn orbit_of<P: GroupAction>(
    tower: &FieldTower,
    group: &MatrixGroup,
    point: &P,
) -> Result<OrbitResult<P>> {
    if point.ambient() != group.n {
        return Err(Error::AmbientMismatch(group.n, point.ambient()));
    }
    if point.level() != group.level {
        return Err(Error::WrongLevel { expected: group.level, got: point.level() });
    }
    let mut orbit = BTreeSet::new();
    let mut stab = Vec::new();
    for m in &group.elements {
        let image = point.apply(tower, m);
        if &image == point {
            stab.push(m.clone());
        }
        orbit.insert(image);
    }
    let stabilizer =
        MatrixGroup { level: group.level, n: group.n, generators: stab.clone(), elements: stab };
    assert_eq!(
        orbit.len() * stabilizer.order(),
        group.order(),
        "orbit–stabilizer identity violated — this is a bug"
    );
    Ok(OrbitResult { base: point.clone(), orbit: orbit.into_iter().collect(), stabilizer })
}

/// Split a point set into group orbits.  The set must be closed under the
/// action; each returned orbit carries the stabilizer of its smallest
/// representative.
pub fn partition_into_orbits<P: GroupAction>(
    tower: &FieldTower,
    group: &MatrixGroup,
    points: &[P],
) -> Result<Vec<OrbitResult<P>>> {
    let mut pool: BTreeSet<P> = points.iter().cloned().collect();
    let mut out = Vec::new();
    while let Some(base) = pool.iter().next().cloned() {
        let result = orbit_of(tower, group, &base)?;
        for p in &result.orbit {
            if !pool.remove(p) {
                return Err(Error::BadInput(
                    "point set is not closed under the group action".to_string(),
                ));
            }
        }
        out.push(result);
    }
    Ok(out)
}

/// A random 1- or 2-generated subgroup of `group`.
pub fn random_subgroup(
    tower: &FieldTower,
    group: &MatrixGroup,
    rng: &mut impl Rng,
) -> MatrixGroup {
    let pick = |rng: &mut dyn rand::RngCore| -> Matrix {
        group.elements[rng.gen_range(0..group.order())].clone()
    };
    let mut generators = vec![pick(rng)];
    if rng.gen_bool(0.7) {
        generators.push(pick(rng));
    }
    close_group(tower, &generators, group.order() as u64)
        .expect("a subgroup closure cannot exceed the parent order")
}

/// Identity-indexed Cayley table for a group: `table[i * n + j]` is the
/// element index of `elements[i] · elements[j]`.
pub(crate) struct CayleyTable {
    pub(crate) n: usize,
    pub(crate) table: Vec<u32>,
    pub(crate) identity: u32,
    pub(crate) orders: Vec<u64>,
}

pub(crate) fn build_cayley_table(
    tower: &FieldTower,
    group: &MatrixGroup,
    cap: u64,
) -> Result<CayleyTable> {
    let n = group.order();
    if (n as u64).saturating_mul(n as u64) > cap {
        return Err(Error::CapExceeded {
            what: "Cayley table".to_string(),
            needed: (n as u64).saturating_mul(n as u64),
            cap,
        });
    }
    let elements = &group.elements;
    let mut table = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            let prod = elements[i].mul(tower, &elements[j]);
            let idx = elements.binary_search(&prod).expect("groups are closed");
            table[i * n + j] = idx as u32;
        }
    }
    let identity = elements
        .binary_search(&Matrix::identity(group.level, group.n))
        .expect("groups contain the identity") as u32;
    let mut orders = vec![0u64; n];
    for i in 0..n {
        let mut x = i as u32;
        let mut ord = 1u64;
        while x != identity {
            x = table[x as usize * n + i];
            ord += 1;
        }
        orders[i] = ord;
    }
    Ok(CayleyTable { n, table, identity, orders })
}

impl CayleyTable {
    /// Closure of generator indices, aborting past `limit` elements.
    pub(crate) fn closure(&self, gens: &[u32], limit: usize) -> Option<Vec<u32>> {
        let mut seen = BTreeSet::from([self.identity]);
        let mut queue = vec![self.identity];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.table[x as usize * self.n + g as usize];
                if seen.insert(y) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push(y);
                }
            }
        }
        Some(seen.into_iter().collect())
    }
}

/// All subgroups of `group` of the given order, generated by one or two
/// elements, that act transitively on `points`.  Complete whenever every
/// group of that order is 2-generated (true for all orders this crate
/// searches: primes, squares of primes, and twice primes).
pub fn search_transitive_subgroups(
    tower: &FieldTower,
    group: &MatrixGroup,
    order: u64,
    points: &[Subspace],
    table_cap: u64,
) -> Result<Vec<MatrixGroup>> {
    if order == 0 || group.order() as u64 % order != 0 {
        return Err(Error::BadParameter(format!(
            "subgroup order {order} does not divide the group order {}",
            group.order()
        )));
    }
    let cayley = build_cayley_table(tower, group, table_cap)?;

    // Where each element sends the first point; transitivity of a subgroup
    // is then a coverage question over these images.
    let point_index: BTreeMap<&Subspace, usize> =
        points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let base = points
        .first()
        .ok_or_else(|| Error::BadInput("empty point set".to_string()))?;
    let base_images: Vec<Option<usize>> = group
        .elements
        .iter()
        .map(|m| point_index.get(&base.apply(tower, m)).copied())
        .collect();

    let candidates: Vec<u32> = (0..group.order() as u32)
        .filter(|&i| {
            let o = cayley.orders[i as usize];
            o > 1 && order % o == 0
        })
        .collect();

    let mut seen = BTreeSet::new();
    let mut found = Vec::new();
    let mut consider = |ids: Vec<u32>, gens: Vec<u32>| {
        if ids.len() as u64 != order || !seen.insert(ids.clone()) {
            return;
        }
        let mut covered = BTreeSet::new();
        for &i in &ids {
            match base_images[i as usize] {
                Some(p) => {
                    covered.insert(p);
                }
                None => return,
            }
        }
        if covered.len() == points.len() {
            found.push((ids, gens));
        }
    };

    for (ai, &a) in candidates.iter().enumerate() {
        if let Some(ids) = cayley.closure(&[a], order as usize) {
            consider(ids, vec![a]);
        }
        for &b in &candidates[ai + 1..] {
            if let Some(ids) = cayley.closure(&[a, b], order as usize) {
                consider(ids, vec![a, b]);
            }
        }
    }

    found.sort();
    Ok(found
        .into_iter()
        .map(|(ids, gens)| {
            MatrixGroup::from_elements(
                group.level,
                group.n,
                gens.iter().map(|&g| group.elements[g as usize].clone()).collect(),
                ids.iter().map(|&i| group.elements[i as usize].clone()).collect(),
            )
        })
        .collect())
}

// ---- named structural checks ------------------------------------------

/// The unipotent generators really generate the determinant-one group:
/// compare against the exhaustive determinant filter.
pub fn sl2_generators_check(tower: &FieldTower) -> Result<CheckReport> {
    let sl2 = build_sl2(tower)?;
    let brute = sl2_by_determinant(tower)?;
    let s = tower.qk();
    let alpha = tower.alpha(FieldTower::MIDDLE);
    let swap = swap2();
    let product = swap
        .mul(tower, &upper_shear2(alpha.enc))
        .mul(tower, &swap);
    let items = vec![
        CheckItem::compare("group order", (s * s - 1) * s, sl2.order() as u64),
        CheckItem::require("generated set equals the determinant-one filter", sl2.elements() == brute.as_slice()),
        CheckItem::compare(
            "swap-conjugated upper shear is the lower shear",
            lower_shear2(alpha.enc).to_rows(),
            product.to_rows(),
        ),
        CheckItem::require("lower shear is in the generated group", sl2.contains(&lower_shear2(alpha.enc))),
    ];
    Ok(CheckReport::new("prop_generadores_SL", items))
}

/// Structure of the 2×2 block-group preimage: equal to SL(2,q^k) in
/// characteristic two, index-two over it (split by the swap) otherwise.
pub fn gbar_structure_check(tower: &FieldTower) -> Result<CheckReport> {
    let gbar = build_gbar(tower)?;
    let sl2 = build_sl2(tower)?;
    let swap = swap2();
    let mut items = vec![
        CheckItem::require("determinant-one part is contained", sl2.is_subgroup_of(&gbar)),
    ];
    if tower.p() == 2 {
        items.push(CheckItem::compare("order equals the determinant-one order", sl2.order(), gbar.order()));
        items.push(CheckItem::require("element sets coincide", gbar.elements() == sl2.elements()));
    } else {
        items.push(CheckItem::compare("order is twice the determinant-one order", 2 * sl2.order(), gbar.order()));
        items.push(CheckItem::require("swap lies outside the determinant-one part", !sl2.contains(&swap)));
        items.push(CheckItem::compare(
            "swap has order two",
            2,
            matrix_order(tower, &swap, 4).expect("tiny order"),
        ));
        let normalizes = sl2
            .elements()
            .iter()
            .all(|x| sl2.contains(&swap.mul(tower, x).mul(tower, &swap)));
        items.push(CheckItem::require("swap normalizes the determinant-one part", normalizes));
        let mut coset: Vec<Matrix> =
            sl2.elements().iter().map(|x| x.mul(tower, &swap)).collect();
        let mut union: Vec<Matrix> = sl2.elements().to_vec();
        union.append(&mut coset);
        union.sort();
        union.dedup();
        items.push(CheckItem::require(
            "the group is the determinant-one part plus its swap coset",
            union == gbar.elements(),
        ));
    }
    Ok(CheckReport::new("prop_Estr_barG", items))
}

/// The block embedding carries the 2×2 group exactly onto the 2k×2k group.
pub fn psi_image_check(tower: &FieldTower, gbar: &MatrixGroup, g: &MatrixGroup) -> CheckReport {
    let mut image: Vec<Matrix> = gbar
        .elements()
        .iter()
        .map(|m| psi(tower, m).expect("group elements embed"))
        .collect();
    image.sort();
    image.dedup();
    let items = vec![
        CheckItem::compare("image size equals the source order", gbar.order(), image.len()),
        CheckItem::compare("orders agree", gbar.order(), g.order()),
        CheckItem::require("image equals the block group element set", image == g.elements()),
    ];
    CheckReport::new("psi_Gbar_equals_G", items)
}

/// Defining facts of the cyclic structure: the cycle's order and
/// determinant, and the size, determinants, and intersection description
/// of its determinant-one part.
pub fn singer_definition_check(tower: &FieldTower, g: &MatrixGroup) -> Result<CheckReport> {
    let singer = build_singer(tower)?;
    let qk = tower.qk();
    let full_order = qk * qk - 1;
    let mut items = vec![
        CheckItem::compare(
            "cycle order",
            full_order,
            matrix_order(tower, &singer.cycle, full_order + 1)?,
        ),
    ];

    let omega = tower.alpha(FieldTower::TOP);
    let norm = tower
        .subfield_project(tower.pow(omega, (qk + 1) as i64).expect("unit power"))
        .expect("norm lands one level down");
    items.push(CheckItem::compare(
        "cycle determinant is the top generator norm",
        norm.enc,
        singer.cycle.det(tower).enc,
    ));

    items.push(CheckItem::compare(
        "determinant-one part order",
        qk + 1,
        singer.det_one_part.order() as u64,
    ));
    let all_det_one = singer
        .det_one_part
        .elements()
        .iter()
        .all(|m| m.det(tower).enc == 1);
    items.push(CheckItem::require("every element has determinant one", all_det_one));

    let full_cycle = close_group(tower, &[singer.cycle.clone()], DEFAULT_CLOSURE_CAP)?;
    let mut det_one_filter: Vec<Matrix> = full_cycle
        .elements()
        .iter()
        .filter(|m| m.det(tower).enc == 1)
        .cloned()
        .collect();
    det_one_filter.sort();
    items.push(CheckItem::require(
        "determinant-one part is the cycle group intersected with the determinant-one filter",
        det_one_filter == singer.det_one_part.elements(),
    ));

    let mut image: Vec<Matrix> = singer
        .det_one_part
        .elements()
        .iter()
        .map(|m| psi(tower, m).expect("group elements embed"))
        .collect();
    image.sort();
    items.push(CheckItem::require(
        "embedded copy matches the blockwise image",
        image == singer.embedded.elements(),
    ));
    items.push(CheckItem::require(
        "embedded copy sits inside the block group",
        singer.embedded.is_subgroup_of(g),
    ));
    Ok(CheckReport::new("eq_def_barH", items))
}

/// Line stabilizers: exactly the scalar matrices under the full cycle
/// group, and {I} (even characteristic) or {±I} (odd) under the
/// determinant-one part.
pub fn singer_stabilizer_checks(tower: &FieldTower) -> Result<Vec<CheckReport>> {
    let singer = build_singer(tower)?;
    let full_cycle = close_group(tower, &[singer.cycle.clone()], DEFAULT_CLOSURE_CAP)?;
    let level = FieldTower::MIDDLE;

    let mut scalars: Vec<Matrix> = (1..tower.qk())
        .map(|a| Matrix::identity(level, 2).scale_raw(tower, a))
        .collect();
    scalars.sort();

    let mut expected_small = vec![Matrix::identity(level, 2)];
    if tower.p() != 2 {
        expected_small.push(Matrix::identity(level, 2).scale_raw(tower, tower.neg_raw(level, 1)));
    }
    expected_small.sort();

    let lines = all_lines(tower);
    let mut cycle_violations = 0u64;
    let mut small_violations = 0u64;
    for l in &lines {
        let stab = orbit_of(tower, &full_cycle, l)?.stabilizer;
        if stab.elements() != scalars.as_slice() {
            cycle_violations += 1;
        }
        let stab = orbit_of(tower, &singer.det_one_part, l)?.stabilizer;
        if stab.elements() != expected_small.as_slice() {
            small_violations += 1;
        }
    }

    let cycle_report = CheckReport::new("lem_stabM", vec![
        CheckItem::compare("lines checked", tower.qk() + 1, lines.len() as u64),
        CheckItem::compare("scalar stabilizer size", tower.qk() - 1, scalars.len() as u64),
        CheckItem::compare("lines with a non-scalar stabilizer", 0u64, cycle_violations),
    ]);
    let small_report = CheckReport::new("lem_stabHbar", vec![
        CheckItem::compare(
            "expected stabilizer size by characteristic",
            if tower.p() == 2 { 1usize } else { 2 },
            expected_small.len(),
        ),
        CheckItem::compare("lines with an unexpected stabilizer", 0u64, small_violations),
    ]);
    Ok(vec![cycle_report, small_report])
}

/// Orbit structure of the determinant-one part on the lines: regular in
/// even characteristic, exactly two half-size orbits in odd.
pub fn line_orbit_partition_check(tower: &FieldTower) -> Result<CheckReport> {
    let singer = build_singer(tower)?;
    let lines = all_lines(tower);
    let orbits = partition_into_orbits(tower, &singer.det_one_part, &lines)?;
    let qk = tower.qk();
    let mut items = vec![CheckItem::compare("line count", qk + 1, lines.len() as u64)];
    if tower.p() == 2 {
        items.push(CheckItem::compare("orbit count", 1usize, orbits.len()));
        items.push(CheckItem::compare(
            "single orbit size",
            qk + 1,
            orbits.first().map_or(0, |o| o.orbit.len()) as u64,
        ));
        items.push(CheckItem::compare(
            "stabilizer is trivial (regular action)",
            1usize,
            orbits.first().map_or(0, |o| o.stabilizer.order()),
        ));
    } else {
        items.push(CheckItem::compare("orbit count", 2usize, orbits.len()));
        for (i, o) in orbits.iter().enumerate() {
            items.push(CheckItem::compare(
                &format!("orbit {i} size"),
                (qk + 1) / 2,
                o.orbit.len() as u64,
            ));
        }
    }
    Ok(CheckReport::new("prop_AccioHbarra", items))
}

/// Odd characteristic only: the two coordinate lines witness the two
/// orbits, and their orbits partition the line set.
pub fn line_two_orbit_check(tower: &FieldTower) -> Result<CheckReport> {
    let singer = build_singer(tower)?;
    let one = tower.one(FieldTower::MIDDLE);
    let zero = tower.zero(FieldTower::MIDDLE);
    let l10 = line_through(tower, one, zero)?;
    let l01 = line_through(tower, zero, one)?;
    let orb10 = orbit_of(tower, &singer.det_one_part, &l10)?;
    let orb01 = orbit_of(tower, &singer.det_one_part, &l01)?;
    let mut union: Vec<Subspace> = orb10.orbit.iter().chain(orb01.orbit.iter()).cloned().collect();
    union.sort();
    union.dedup();
    let half = (tower.qk() + 1) / 2;
    let items = vec![
        CheckItem::compare("first coordinate-line orbit size", half, orb10.orbit.len() as u64),
        CheckItem::compare("second coordinate-line orbit size", half, orb01.orbit.len() as u64),
        CheckItem::require(
            "the two orbits are disjoint",
            orb10.orbit.iter().all(|l| !orb01.orbit.contains(l)),
        ),
        CheckItem::require("together they cover every line", union == all_lines(tower)),
    ];
    Ok(CheckReport::new("prop_eximpar", items))
}

/// The spread is exactly the block-group orbit of rowsp(I|0).
pub fn spread_orbit_check(tower: &FieldTower, g: &MatrixGroup) -> Result<CheckReport> {
    let spread = build_segre_spread(tower);
    let orbit = orbit_of(tower, g, &first_summand(tower))?;
    let items = vec![
        CheckItem::compare("orbit size", tower.qk() + 1, orbit.orbit.len() as u64),
        CheckItem::require("orbit equals the spread", orbit.orbit == spread.members()),
    ];
    Ok(CheckReport::new("def_spread_manganiello_orbital", items))
}

/// Every spread member has the same stabilizer under the embedded
/// determinant-one part: {I} in even characteristic, {±I} in odd.
pub fn spread_stabilizer_check(
    tower: &FieldTower,
    embedded: &MatrixGroup,
    spread: &SubspaceCode,
) -> Result<CheckReport> {
    let level = FieldTower::GROUND;
    let n = 2 * tower.k();
    let mut expected = vec![Matrix::identity(level, n)];
    if tower.p() != 2 {
        expected.push(Matrix::identity(level, n).scale_raw(tower, tower.neg_raw(level, 1)));
    }
    expected.sort();
    let mut violations = 0u64;
    for member in spread.members() {
        let stab = orbit_of(tower, embedded, member)?.stabilizer;
        if stab.elements() != expected.as_slice() {
            violations += 1;
        }
    }
    let items = vec![
        CheckItem::compare("members checked", tower.qk() + 1, spread.size() as u64),
        CheckItem::compare(
            "expected stabilizer size by characteristic",
            if tower.p() == 2 { 1usize } else { 2 },
            expected.len(),
        ),
        CheckItem::compare("members with an unexpected stabilizer", 0u64, violations),
    ];
    Ok(CheckReport::new("lem_stabH", items))
}

/// Orbit structure of the embedded determinant-one part on the spread:
/// one full orbit in even characteristic, two half-size orbits in odd.
pub fn spread_orbit_partition_check(
    tower: &FieldTower,
    embedded: &MatrixGroup,
    spread: &SubspaceCode,
) -> Result<CheckReport> {
    let orbits = partition_into_orbits(tower, embedded, spread.members())?;
    let qk = tower.qk();
    let mut items = Vec::new();
    if tower.p() == 2 {
        items.push(CheckItem::compare("orbit count", 1usize, orbits.len()));
        items.push(CheckItem::compare(
            "single orbit size (regular action)",
            qk + 1,
            orbits.first().map_or(0, |o| o.orbit.len()) as u64,
        ));
    } else {
        items.push(CheckItem::compare("orbit count", 2usize, orbits.len()));
        for (i, o) in orbits.iter().enumerate() {
            items.push(CheckItem::compare(
                &format!("orbit {i} size"),
                (qk + 1) / 2,
                o.orbit.len() as u64,
            ));
        }
    }
    Ok(CheckReport::new("thm_accioHsobreS", items))
}

/// Odd characteristic only: the spread is the disjoint union of the
/// orbits of rowsp(I|0) and rowsp(0|I) under the embedded group.
pub fn spread_two_orbit_check(
    tower: &FieldTower,
    embedded: &MatrixGroup,
    spread: &SubspaceCode,
) -> Result<CheckReport> {
    let orb_u = orbit_of(tower, embedded, &first_summand(tower))?;
    let orb_v = orbit_of(tower, embedded, &second_summand(tower))?;
    let mut union: Vec<Subspace> = orb_u.orbit.iter().chain(orb_v.orbit.iter()).cloned().collect();
    union.sort();
    union.dedup();
    let half = (tower.qk() + 1) / 2;
    let items = vec![
        CheckItem::compare("rowsp(I|0) orbit size", half, orb_u.orbit.len() as u64),
        CheckItem::compare("rowsp(0|I) orbit size", half, orb_v.orbit.len() as u64),
        CheckItem::require(
            "the two orbits are disjoint",
            orb_u.orbit.iter().all(|s| !orb_v.orbit.contains(s)),
        ),
        CheckItem::require("together they are the spread", union == spread.members()),
    ];
    Ok(CheckReport::new("prop_S_impar", items))
}

/// Even characteristic: searching the 2×2 group for transitive subgroups
/// of order q^k+1 must find the determinant-one cyclic part, and the
/// number of hits must be |group| / (2(q^k+1)): each such subgroup is a
/// full Sylow subgroup whose normalizer is dihedral of order 2(q^k+1).
/// Every hit, having order equal to the point count, acts regularly.
pub fn order_search_found_check(tower: &FieldTower, table_cap: u64) -> Result<CheckReport> {
    let gbar = build_gbar(tower)?;
    let singer = build_singer(tower)?;
    let lines = all_lines(tower);
    let found = search_transitive_subgroups(tower, &gbar, tower.qk() + 1, &lines, table_cap)?;
    let contains_singer = found
        .iter()
        .any(|g| g.elements() == singer.det_one_part.elements());
    let expected_count = gbar.order() as u64 / (2 * (tower.qk() + 1));
    let mut regular = true;
    for g in &found {
        let orbit = orbit_of(tower, g, &lines[0])?;
        regular &= orbit.orbit.len() == lines.len() && orbit.stabilizer.order() == 1;
    }
    let items = vec![
        CheckItem::compare("transitive subgroup count", expected_count, found.len() as u64),
        CheckItem::require("the cyclic determinant-one part is among them", contains_singer),
        CheckItem::require("every one of them acts regularly", regular),
    ];
    Ok(CheckReport::new("search_order_qk1", items))
}

/// q=3, k=2 only: the exhaustive order-10 search over the 1440-element
/// 2×2 group finds no subgroup transitive on the ten lines.
pub fn no_transitive_order_search_check(tower: &FieldTower, table_cap: u64) -> Result<CheckReport> {
    let gbar = build_gbar(tower)?;
    let lines = all_lines(tower);
    let found = search_transitive_subgroups(tower, &gbar, tower.qk() + 1, &lines, table_cap)?;
    let items = vec![
        CheckItem::compare("group order searched", 1440usize, gbar.order()),
        CheckItem::compare("transitive subgroups of the target order", 0usize, found.len()),
    ];
    Ok(CheckReport::new("rem_impar_no_regular", items))
}
