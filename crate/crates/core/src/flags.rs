//! Flags (strictly nested subspace sequences), the flag metric, flag codes
//! with their projected codes, and the optimum-distance machinery: the
//! distance bound, disjointness, the two-route characterization of codes
//! attaining the bound, the maximum-size theorem, orbit flag codes, and
//! the cyclic-group constructions that reach both bound and size.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::galois::{factorize, FieldTower};
use crate::groups::{
    build_cayley_table, build_g, build_gbar, build_singer, orbit_of, GroupAction, MatrixGroup,
};
use crate::matspace::{max_grassmannian_distance, Matrix, Subspace, SubspaceCode};
use crate::report::{CheckItem, CheckReport};
use crate::spread::{all_lines, build_segre_spread, first_summand, psi, second_summand};
use crate::{Error, Result};

/// A strictly nested sequence of nontrivial proper subspaces of one
/// ambient space; the sequence of dimensions is the flag's type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flag {
    level: usize,
    n: usize,
    type_vec: Vec<usize>,
    subs: Vec<Subspace>,
}

impl Flag {
    /// Build a flag from its subspace sequence, validating strict nesting
    /// and strictly increasing dimensions between 1 and n−1.
    pub fn new(tower: &FieldTower, subs: Vec<Subspace>) -> Result<Flag> {
        let Some(first) = subs.first() else {
            return Err(Error::BadFlagType("a flag needs at least one subspace".to_string()));
        };
        let (level, n) = (first.level(), first.ambient());
        for s in &subs {
            if s.level() != level {
                return Err(Error::WrongLevel { expected: level, got: s.level() });
            }
            if s.ambient() != n {
                return Err(Error::AmbientMismatch(n, s.ambient()));
            }
        }
        let type_vec: Vec<usize> = subs.iter().map(Subspace::dim).collect();
        validate_type(&type_vec, n)?;
        for pair in subs.windows(2) {
            if !pair[1].contains(tower, &pair[0]) {
                return Err(Error::BadFlagType(format!(
                    "subspace of dimension {} does not contain its predecessor of dimension {}",
                    pair[1].dim(),
                    pair[0].dim()
                )));
            }
        }
        Ok(Flag { level, n, type_vec, subs })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn type_vec(&self) -> &[usize] {
        &self.type_vec
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subs
    }

    pub fn subspace(&self, i: usize) -> &Subspace {
        &self.subs[i]
    }

    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when every dimension 1..n−1 appears.
    pub fn is_full(&self) -> bool {
        self.type_vec.len() == self.n - 1
            && self.type_vec.iter().enumerate().all(|(i, &t)| t == i + 1)
    }

    pub fn to_doc(&self) -> FlagDoc {
        FlagDoc {
            n: self.n,
            type_vec: self.type_vec.clone(),
            subspaces: self.subs.iter().map(|s| s.matrix().to_rows()).collect(),
        }
    }

    pub fn from_doc(tower: &FieldTower, level: usize, doc: &FlagDoc) -> Result<Flag> {
        let mut subs = Vec::with_capacity(doc.subspaces.len());
        for rows in &doc.subspaces {
            let m = Matrix::from_rows(tower, level, rows)?;
            let s = Subspace::from_matrix(tower, &m);
            if s.dim() != rows.len() {
                return Err(Error::BadInput(
                    "flag document lists a dependent generating set".to_string(),
                ));
            }
            subs.push(s);
        }
        let flag = Flag::new(tower, subs)?;
        if flag.n != doc.n || flag.type_vec != doc.type_vec {
            return Err(Error::BadFlagType(
                "flag document header disagrees with its subspaces".to_string(),
            ));
        }
        Ok(flag)
    }
}

impl GroupAction for Flag {
    fn apply(&self, tower: &FieldTower, m: &Matrix) -> Self {
        Flag {
            level: self.level,
            n: self.n,
            type_vec: self.type_vec.clone(),
            subs: self.subs.iter().map(|s| s.act(tower, m)).collect(),
        }
    }

    fn ambient(&self) -> usize {
        self.n
    }

    fn level(&self) -> usize {
        self.level
    }
}

/// Wire form of a flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlagDoc {
    pub n: usize,
    #[serde(rename = "type")]
    pub type_vec: Vec<usize>,
    pub subspaces: Vec<Vec<Vec<u64>>>,
}

fn validate_type(type_vec: &[usize], n: usize) -> Result<()> {
    if type_vec.is_empty() {
        return Err(Error::BadFlagType("empty type vector".to_string()));
    }
    if type_vec[0] == 0 || *type_vec.last().expect("nonempty") >= n {
        return Err(Error::BadFlagType(format!(
            "type {type_vec:?} out of range for ambient dimension {n}"
        )));
    }
    if type_vec.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadFlagType(format!("type {type_vec:?} is not strictly increasing")));
    }
    Ok(())
}

/// Sum of the subspace distances position by position.
pub fn flag_distance(tower: &FieldTower, f: &Flag, g: &Flag) -> Result<u64> {
    if f.type_vec != g.type_vec {
        return Err(Error::BadFlagType(format!(
            "cannot compare flags of types {:?} and {:?}",
            f.type_vec, g.type_vec
        )));
    }
    let mut total = 0;
    for (a, b) in f.subs.iter().zip(&g.subs) {
        total += a.distance(tower, b)?;
    }
    Ok(total)
}

/// The largest possible flag distance for the given type: twice the sum,
/// over the type, of t below the middle and n−t above it.
pub fn max_flag_distance(type_vec: &[usize], n: usize) -> Result<u64> {
    validate_type(type_vec, n)?;
    Ok(type_vec.iter().map(|&t| max_grassmannian_distance(t, n)).sum())
}

/// The full flag whose i-th subspace is spanned by the first i standard
/// basis vectors.
pub fn standard_full_flag(tower: &FieldTower, level: usize, n: usize) -> Flag {
    let subs = (1..n)
        .map(|d| {
            let mut m = Matrix::zero(level, d, n);
            for i in 0..d {
                m.set_raw(i, i, 1);
            }
            Subspace::from_matrix(tower, &m)
        })
        .collect();
    Flag::new(tower, subs).expect("standard chain is a flag")
}

/// Extend a half-dimensional subspace to a full flag by a deterministic
/// rule: its reduced basis rows give the dimensions up to k, then standard
/// basis vectors in index order (skipping dependent ones) fill the rest.
pub fn complete_to_full_flag(tower: &FieldTower, s: &Subspace) -> Result<Flag> {
    let n = s.ambient();
    if s.dim() == 0 || n != 2 * s.dim() {
        return Err(Error::BadDimension(format!(
            "completion expects half-dimensional input, got dimension {} in ambient {n}",
            s.dim()
        )));
    }
    let level = s.level();
    let mut basis: Vec<Vec<u64>> = s.matrix().to_rows();
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let span = Subspace::from_matrix(tower, &Matrix::from_rows(tower, level, &basis)?);
        let mut row = vec![0u64; n];
        row[j] = 1;
        if !span.contains_row(tower, &row) {
            basis.push(row);
        }
    }
    let subs = (1..n)
        .map(|d| {
            Ok(Subspace::from_matrix(tower, &Matrix::from_rows(tower, level, &basis[..d])?))
        })
        .collect::<Result<Vec<_>>>()?;
    Flag::new(tower, subs)
}

/// A set of flags of one common type, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagCode {
    level: usize,
    n: usize,
    type_vec: Vec<usize>,
    flags: Vec<Flag>,
}

impl FlagCode {
    pub fn from_flags(mut flags: Vec<Flag>) -> Result<FlagCode> {
        let Some(first) = flags.first() else {
            return Err(Error::BadInput("a flag code needs at least one flag".to_string()));
        };
        let (level, n, type_vec) = (first.level, first.n, first.type_vec.clone());
        for f in &flags {
            if f.level != level {
                return Err(Error::WrongLevel { expected: level, got: f.level });
            }
            if f.n != n {
                return Err(Error::AmbientMismatch(n, f.n));
            }
            if f.type_vec != type_vec {
                return Err(Error::BadFlagType(format!(
                    "mixed flag types {:?} and {:?} in one code",
                    type_vec, f.type_vec
                )));
            }
        }
        flags.sort();
        flags.dedup();
        Ok(FlagCode { level, n, type_vec, flags })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn type_vec(&self) -> &[usize] {
        &self.type_vec
    }

    pub fn size(&self) -> usize {
        self.flags.len()
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn contains(&self, f: &Flag) -> bool {
        self.flags.binary_search(f).is_ok()
    }

    /// The code of i-th subspaces (0-based position in the type vector).
    pub fn projected(&self, i: usize) -> SubspaceCode {
        let members: BTreeSet<Subspace> = self.flags.iter().map(|f| f.subs[i].clone()).collect();
        SubspaceCode::from_members(members.into_iter().collect())
            .expect("projections of a valid flag code are uniform")
    }

    pub fn projected_codes(&self) -> Vec<SubspaceCode> {
        (0..self.type_vec.len()).map(|i| self.projected(i)).collect()
    }

    /// Smallest pairwise flag distance; zero for a singleton code.
    pub fn min_distance(&self, tower: &FieldTower) -> u64 {
        let mut best = None;
        for (i, f) in self.flags.iter().enumerate() {
            for g in &self.flags[i + 1..] {
                let d = flag_distance(tower, f, g).expect("uniform code");
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        best.unwrap_or(0)
    }

    /// Every projected code is as large as the code itself.
    pub fn is_disjoint(&self) -> bool {
        (0..self.type_vec.len()).all(|i| self.projected(i).size() == self.size())
    }

    /// Whether the code attains the flag distance bound.  Computed two
    /// independent ways — directly, and through disjointness plus maximal
    /// projected codes — which provably coincide; their agreement is
    /// asserted on every call.
    pub fn is_optimum_distance(&self, tower: &FieldTower) -> bool {
        let (direct, structural) = optimum_routes(tower, self);
        assert_eq!(
            direct, structural,
            "the two optimum-distance criteria disagree — this is a bug"
        );
        direct
    }

    pub fn to_doc(&self, tower: &FieldTower) -> FlagCodeDoc {
        FlagCodeDoc {
            q: tower.size(self.level),
            n: self.n,
            type_vec: self.type_vec.clone(),
            size: self.size(),
            min_distance: self.min_distance(tower),
            optimum: self.is_optimum_distance(tower),
            flags: self.flags.iter().map(Flag::to_doc).collect(),
        }
    }

    pub fn from_doc(tower: &FieldTower, level: usize, doc: &FlagCodeDoc) -> Result<FlagCode> {
        if tower.size(level) != doc.q {
            return Err(Error::BadInput(format!(
                "document is over a field of size {}, not {}",
                doc.q,
                tower.size(level)
            )));
        }
        let flags = doc
            .flags
            .iter()
            .map(|fd| Flag::from_doc(tower, level, fd))
            .collect::<Result<Vec<_>>>()?;
        let code = FlagCode::from_flags(flags)?;
        if code.n != doc.n || code.type_vec != doc.type_vec || code.size() != doc.size {
            return Err(Error::BadInput("flag code header disagrees with its flags".to_string()));
        }
        if code.min_distance(tower) != doc.min_distance {
            return Err(Error::BadInput(format!(
                "stored minimum distance {} does not match the recomputed value {}",
                doc.min_distance,
                code.min_distance(tower)
            )));
        }
        if code.is_optimum_distance(tower) != doc.optimum {
            return Err(Error::BadInput(
                "stored optimum-distance claim does not match recomputation".to_string(),
            ));
        }
        Ok(code)
    }
}

/// Both optimum-distance criteria, without the cross-assertion: direct
/// (minimum distance equals the bound) and structural (disjoint with every
/// projected code attaining its Grassmannian maximum).
pub(crate) fn optimum_routes(tower: &FieldTower, code: &FlagCode) -> (bool, bool) {
    let bound = max_flag_distance(&code.type_vec, code.n).expect("valid code type");
    let direct = code.min_distance(tower) == bound;
    let structural = code.is_disjoint()
        && code.type_vec.iter().enumerate().all(|(i, &t)| {
            code.projected(i).min_distance(tower) == max_grassmannian_distance(t, code.n)
        });
    (direct, structural)
}

/// Wire form of a flag code, with integrity fields recomputed on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlagCodeDoc {
    pub q: u64,
    pub n: usize,
    #[serde(rename = "type")]
    pub type_vec: Vec<usize>,
    pub size: usize,
    pub min_distance: u64,
    pub optimum: bool,
    pub flags: Vec<FlagDoc>,
}

/// The orbit of a flag as a flag code.
pub fn orbit_flag_code(tower: &FieldTower, group: &MatrixGroup, flag: &Flag) -> Result<FlagCode> {
    let result = orbit_of(tower, group, flag)?;
    let code = FlagCode::from_flags(result.orbit)?;
    #[cfg(debug_assertions)]
    for i in 0..flag.type_vec.len() {
        let sub_orbit = orbit_of(tower, group, &flag.subs[i])?.orbit;
        debug_assert_eq!(
            code.projected(i).members(),
            sub_orbit.as_slice(),
            "projected orbit code must equal the subspace orbit"
        );
    }
    Ok(code)
}

/// The optimum-distance full flag code of maximum size q^k+1 whose middle
/// projected code is the standard spread: one orbit of the embedded cyclic
/// group in characteristic two, the union of its two orbits otherwise.
pub fn build_odfc(tower: &FieldTower) -> Result<FlagCode> {
    let singer = build_singer(tower)?;
    let h = &singer.embedded;
    let f_u = complete_to_full_flag(tower, &first_summand(tower))?;
    if tower.p() == 2 {
        orbit_flag_code(tower, h, &f_u)
    } else {
        let f_v = complete_to_full_flag(tower, &second_summand(tower))?;
        let mut flags = orbit_of(tower, h, &f_u)?.orbit;
        flags.extend(orbit_of(tower, h, &f_v)?.orbit);
        FlagCode::from_flags(flags)
    }
}

// ---- named structural checks ------------------------------------------

/// Closed forms of the flag distance bound: 2k² for full flags on 2k
/// dimensions, 2k for the single middle dimension, and agreement between
/// the split-sum formula and the per-position maxima.
pub fn distance_bound_check(tower: &FieldTower) -> CheckReport {
    let k = tower.k();
    let n = 2 * k;
    let full: Vec<usize> = (1..n).collect();
    let split_sum = |tv: &[usize]| -> u64 {
        let lo: usize = tv.iter().filter(|&&t| t <= n / 2).sum();
        let hi: usize = tv.iter().filter(|&&t| t > n / 2).map(|&t| n - t).sum();
        2 * (lo + hi) as u64
    };
    let mut items = vec![
        CheckItem::compare(
            "full flag bound is twice the squared half-dimension",
            (2 * k * k) as u64,
            max_flag_distance(&full, n).expect("full type is valid"),
        ),
        CheckItem::compare(
            "single middle dimension bound",
            (2 * k) as u64,
            max_flag_distance(&[k], n).expect("middle type is valid"),
        ),
    ];
    for tv in [full.as_slice(), &[k], &[1, k, n - 1], &[1, 2]] {
        items.push(CheckItem::compare(
            &format!("split-sum formula agrees for type {tv:?}"),
            split_sum(tv),
            max_flag_distance(tv, n).expect("valid type"),
        ));
    }
    CheckReport::new("eq_quotamaxdistflag", items)
}

/// The stabilizer of a flag is the intersection of the stabilizers of its
/// subspaces.
pub fn stabilizer_flag_decomposition_check(
    tower: &FieldTower,
    group: &MatrixGroup,
    flag: &Flag,
) -> Result<CheckReport> {
    let flag_stab = orbit_of(tower, group, flag)?.stabilizer;
    let mut intersection: Vec<Matrix> = group.elements().to_vec();
    for s in flag.subspaces() {
        let stab = orbit_of(tower, group, s)?.stabilizer;
        intersection.retain(|m| stab.contains(m));
    }
    let items = vec![
        CheckItem::compare("stabilizer order", intersection.len(), flag_stab.order()),
        CheckItem::require(
            "flag stabilizer equals the intersection of subspace stabilizers",
            intersection == flag_stab.elements(),
        ),
    ];
    Ok(CheckReport::new("lemma_estabilizador_flag", items))
}

fn require_full_even(flag: &Flag) -> Result<usize> {
    if !flag.is_full() || flag.ambient() % 2 != 0 {
        return Err(Error::BadFlagType(
            "this check needs a full flag on an even-dimensional space".to_string(),
        ));
    }
    Ok(flag.ambient() / 2)
}

/// When the orbit of the middle subspace attains the maximum distance,
/// every subspace stabilizer is contained in the middle one.
pub fn stabilizer_containment_check(
    tower: &FieldTower,
    group: &MatrixGroup,
    flag: &Flag,
) -> Result<CheckReport> {
    let k = require_full_even(flag)?;
    let n = flag.ambient();
    let mid_orbit = orbit_of(tower, group, &flag.subs[k - 1])?;
    let mid_code = SubspaceCode::from_members(mid_orbit.orbit.clone())?;
    let precondition = mid_code.size() == 1
        || mid_code.min_distance(tower) == max_grassmannian_distance(k, n);
    let mid_stab = mid_orbit.stabilizer;
    let mut violations = 0u64;
    for s in flag.subspaces() {
        let stab = orbit_of(tower, group, s)?.stabilizer;
        if !stab.is_subgroup_of(&mid_stab) {
            violations += 1;
        }
    }
    let items = vec![
        CheckItem::require(
            "middle subspace orbit attains the maximum distance (or is a single subspace)",
            precondition,
        ),
        CheckItem::compare(
            "positions whose stabilizer escapes the middle stabilizer",
            0u64,
            violations,
        ),
    ];
    Ok(CheckReport::new("prop_contenido", items))
}

/// For orbit flag codes, disjointness is equivalent to all subspace
/// stabilizers being equal, and to each equalling the flag stabilizer;
/// the projected codes are exactly the subspace orbits.
pub fn disjointness_equivalence_check(
    tower: &FieldTower,
    cases: &[(&MatrixGroup, &Flag)],
) -> Result<CheckReport> {
    let mut items = Vec::new();
    for (j, (group, flag)) in cases.iter().enumerate() {
        let code = orbit_flag_code(tower, group, flag)?;
        let disjoint = code.is_disjoint();
        let flag_stab = orbit_of(tower, *group, *flag)?.stabilizer;
        let stabs = flag
            .subspaces()
            .iter()
            .map(|s| Ok(orbit_of(tower, *group, s)?.stabilizer))
            .collect::<Result<Vec<_>>>()?;
        let all_equal_flag_stab =
            stabs.iter().all(|s| s.elements() == flag_stab.elements());
        let all_equal_each_other =
            stabs.iter().all(|s| s.elements() == stabs[0].elements());
        let mut projections_match = true;
        for (i, s) in flag.subspaces().iter().enumerate() {
            let sub_orbit = orbit_of(tower, *group, s)?.orbit;
            projections_match &= code.projected(i).members() == sub_orbit.as_slice();
        }
        items.push(CheckItem::require(
            &format!(
                "case {j} (group order {}): the three disjointness criteria coincide",
                group.order()
            ),
            disjoint == all_equal_flag_stab && all_equal_flag_stab == all_equal_each_other,
        ));
        items.push(CheckItem::require(
            &format!("case {j}: projected codes are the subspace orbits"),
            projections_match,
        ));
    }
    Ok(CheckReport::new("prop_disjorb", items))
}

/// Sufficient condition for an orbit flag code to attain the bound: if the
/// middle orbit has maximum distance and the middle stabilizer is contained
/// in every other subspace stabilizer, the whole orbit is an
/// optimum-distance code of the middle orbit's size.
pub fn orbit_odfc_sufficiency_check(
    tower: &FieldTower,
    group: &MatrixGroup,
    flag: &Flag,
) -> Result<CheckReport> {
    let k = require_full_even(flag)?;
    let n = flag.ambient();
    let mid_orbit = orbit_of(tower, group, &flag.subs[k - 1])?;
    let mid_code = SubspaceCode::from_members(mid_orbit.orbit.clone())?;
    let max_distance = mid_code.size() > 1
        && mid_code.min_distance(tower) == max_grassmannian_distance(k, n);
    let mid_stab = &mid_orbit.stabilizer;
    let mut contained = true;
    for s in flag.subspaces() {
        let stab = orbit_of(tower, group, s)?.stabilizer;
        contained &= mid_stab.is_subgroup_of(&stab);
    }
    let code = orbit_flag_code(tower, group, flag)?;
    let items = vec![
        CheckItem::require("middle subspace orbit attains the maximum distance", max_distance),
        CheckItem::require(
            "middle stabilizer is contained in every subspace stabilizer",
            contained,
        ),
        CheckItem::require("orbit code attains the distance bound", code.is_optimum_distance(tower)),
        CheckItem::compare("orbit code size", mid_orbit.orbit.len(), code.size()),
    ];
    Ok(CheckReport::new("teo_ODFCorbital", items))
}

/// Union theorem: flags whose middle subspaces lie in pairwise different
/// orbits, with the union of those orbits a maximum-distance code and the
/// middle stabilizers contained in all others, give an optimum-distance
/// union code sized by the middle orbits.
pub fn union_theorem_check(
    tower: &FieldTower,
    group: &MatrixGroup,
    flags: &[Flag],
) -> Result<CheckReport> {
    let Some(first) = flags.first() else {
        return Err(Error::BadInput("the union check needs at least one flag".to_string()));
    };
    let k = require_full_even(first)?;
    let n = first.ambient();
    let mid_orbits = flags
        .iter()
        .map(|f| {
            let _ = require_full_even(f)?;
            orbit_of(tower, group, &f.subs[k - 1])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pairwise_different = true;
    for (i, oi) in mid_orbits.iter().enumerate() {
        for fj in &flags[i + 1..] {
            pairwise_different &= !oi.orbit.contains(&fj.subs[k - 1]);
        }
    }

    let union_members: BTreeSet<Subspace> =
        mid_orbits.iter().flat_map(|o| o.orbit.iter().cloned()).collect();
    let union_mid = SubspaceCode::from_members(union_members.into_iter().collect())?;
    let union_max = union_mid.size() > 1
        && union_mid.min_distance(tower) == max_grassmannian_distance(k, n);

    let mut contained = true;
    for (f, o) in flags.iter().zip(&mid_orbits) {
        for s in f.subspaces() {
            let stab = orbit_of(tower, group, s)?.stabilizer;
            contained &= o.stabilizer.is_subgroup_of(&stab);
        }
    }

    let mut all_flags = Vec::new();
    for f in flags {
        all_flags.extend(orbit_of(tower, group, f)?.orbit);
    }
    let union_code = FlagCode::from_flags(all_flags)?;
    let expected_size: usize = mid_orbits.iter().map(|o| o.orbit.len()).sum();

    let items = vec![
        CheckItem::require("middle subspaces lie in pairwise different orbits", pairwise_different),
        CheckItem::require("union of middle orbits attains the maximum distance", union_max),
        CheckItem::require(
            "each middle stabilizer is contained in all stabilizers of its flag",
            contained,
        ),
        CheckItem::compare("union code size is the sum of middle orbit sizes", expected_size, union_code.size()),
        CheckItem::require(
            "union code attains the distance bound",
            union_code.is_optimum_distance(tower),
        ),
    ];
    Ok(CheckReport::new("cor_union_ODFC", items))
}

/// The two optimum-distance criteria never disagree across a batch of
/// codes.
pub fn characterization_check(tower: &FieldTower, codes: &[FlagCode]) -> CheckReport {
    let mut disagreements = 0u64;
    let mut optimum = 0u64;
    for code in codes {
        let (direct, structural) = optimum_routes(tower, code);
        if direct != structural {
            disagreements += 1;
        }
        if direct {
            optimum += 1;
        }
    }
    let items = vec![
        CheckItem::require(
            &format!("codes examined ({}, of which {optimum} attain the bound)", codes.len()),
            !codes.is_empty(),
        ),
        CheckItem::compare("codes where the two criteria disagree", 0u64, disagreements),
    ];
    CheckReport::new("teo_carac_odfc", items)
}

/// Size bound for full flag codes attaining the distance bound: at most
/// q^k+1, with equality exactly when the middle projected code is a
/// spread.
pub fn max_size_check(tower: &FieldTower, codes: &[FlagCode]) -> CheckReport {
    let bound = (tower.qk() + 1) as usize;
    let k = tower.k();
    let mut optimum_seen = 0u64;
    let mut bound_violations = 0u64;
    let mut spread_iff_violations = 0u64;
    for code in codes {
        if code.ambient() != 2 * k || !code.flags()[0].is_full() {
            continue;
        }
        if !code.is_optimum_distance(tower) {
            continue;
        }
        optimum_seen += 1;
        if code.size() > bound {
            bound_violations += 1;
        }
        let attains = code.size() == bound;
        let is_spread = code.projected(k - 1).is_spread(tower);
        if attains != is_spread {
            spread_iff_violations += 1;
        }
    }
    let items = vec![
        CheckItem::require(
            &format!("optimum full flag codes examined ({optimum_seen})"),
            optimum_seen > 0,
        ),
        CheckItem::compare("codes exceeding the size bound", 0u64, bound_violations),
        CheckItem::compare(
            "codes violating the equality-iff-spread criterion",
            0u64,
            spread_iff_violations,
        ),
    ];
    CheckReport::new("teo_odfc_maxsize", items)
}

/// Every completion of a spread member generates, under the embedded
/// cyclic group, an optimum-distance full flag code of size q^k+1 in
/// characteristic two and (q^k+1)/2 otherwise; the constructed code's
/// pairwise distances are constantly 2k² and its middle projection is the
/// spread.
pub fn odfc_orbit_size_check(tower: &FieldTower) -> Result<CheckReport> {
    let singer = build_singer(tower)?;
    let h = &singer.embedded;
    let spread = build_segre_spread(tower);
    let k = tower.k();
    let qk = tower.qk();
    let expected = if tower.p() == 2 { qk + 1 } else { (qk + 1) / 2 };
    let mut violations = 0u64;
    for member in spread.members() {
        let flag = complete_to_full_flag(tower, member)?;
        let code = orbit_flag_code(tower, h, &flag)?;
        let ok = code.size() as u64 == expected
            && code.is_optimum_distance(tower)
            && code
                .projected(k - 1)
                .members()
                .iter()
                .all(|s| spread.contains(s));
        if !ok {
            violations += 1;
        }
    }

    let constructed = build_odfc(tower)?;
    let target = (2 * k * k) as u64;
    let mut constant = true;
    for (i, f) in constructed.flags().iter().enumerate() {
        for g in &constructed.flags()[i + 1..] {
            constant &= flag_distance(tower, f, g)? == target;
        }
    }
    let items = vec![
        CheckItem::compare("spread members completed and orbited", qk + 1, spread.size() as u64),
        CheckItem::compare("orbits missing size or optimality", 0u64, violations),
        CheckItem::compare(
            "constructed code size",
            qk + 1,
            constructed.size() as u64,
        ),
        CheckItem::require(
            "constructed code distances are constantly twice the squared half-dimension",
            constant,
        ),
        CheckItem::require(
            "constructed middle projection is the spread",
            constructed.projected(k - 1).members() == spread.members(),
        ),
        CheckItem::require(
            "constructed code attains the distance bound",
            constructed.is_optimum_distance(tower),
        ),
    ];
    Ok(CheckReport::new("cor_size_ODFC", items))
}

/// Odd characteristic: completing both standard summands and joining their
/// orbits gives an optimum-distance full flag code of the largest size.
pub fn largest_size_union_check(tower: &FieldTower) -> Result<CheckReport> {
    if tower.p() == 2 {
        return Err(Error::BadParameter(
            "the two-orbit union construction applies to odd characteristic".to_string(),
        ));
    }
    let singer = build_singer(tower)?;
    let h = &singer.embedded;
    let f_u = complete_to_full_flag(tower, &first_summand(tower))?;
    let f_v = complete_to_full_flag(tower, &second_summand(tower))?;
    let k = tower.k();
    let orb_u_mid = orbit_of(tower, h, &f_u.subs[k - 1])?;
    let different_orbits = !orb_u_mid.orbit.contains(&f_v.subs[k - 1]);

    let mut flags = orbit_of(tower, h, &f_u)?.orbit;
    flags.extend(orbit_of(tower, h, &f_v)?.orbit);
    let union_code = FlagCode::from_flags(flags)?;
    let constructed = build_odfc(tower)?;

    let items = vec![
        CheckItem::require("the two summands lie in different orbits", different_orbits),
        CheckItem::compare("union size", tower.qk() + 1, union_code.size() as u64),
        CheckItem::require("union attains the distance bound", union_code.is_optimum_distance(tower)),
        CheckItem::require("union equals the constructed code", union_code == constructed),
    ];
    Ok(CheckReport::new("prop_largest_size_impar", items))
}

/// Reproduce the q=2, k=2 counterexample: a specific word in the block
/// group's generators equals diag(P, P²), stabilizes the middle subspace
/// of the standard full flag while moving the first one, so the orbit of
/// the standard flag has maximal projected codes yet is not disjoint and
/// misses the distance bound.
pub fn reproduce_nondisjoint_example(tower: &FieldTower) -> Result<CheckReport> {
    if tower.q() != 2 || tower.k() != 2 {
        return Err(Error::BadParameter(
            "the counterexample lives over the binary field with k = 2".to_string(),
        ));
    }
    let level = FieldTower::GROUND;
    let i2 = Matrix::identity(level, 2);
    let z2 = Matrix::zero(level, 2, 2);
    let p = tower.middle_companion();
    let p2 = p.mul(tower, &p);
    let swap = Matrix::from_blocks(&z2, &i2, &i2, &z2);
    let shear_p = Matrix::from_blocks(&i2, &p, &z2, &i2);
    let shear_p2 = Matrix::from_blocks(&i2, &p2, &z2, &i2);
    let word = swap
        .mul(tower, &shear_p2)
        .mul(tower, &swap)
        .mul(tower, &shear_p)
        .mul(tower, &swap)
        .mul(tower, &shear_p2);
    let block_diagonal = Matrix::from_blocks(&p, &z2, &z2, &p2);

    let flag = standard_full_flag(tower, level, 4);
    let f1_moved = flag.subs[0].act(tower, &word);
    let target_line =
        Subspace::from_matrix(tower, &Matrix::from_rows(tower, level, &[vec![0, 1, 0, 0]])?);

    let g = build_g(tower)?;
    let code = orbit_flag_code(tower, &g, &flag)?;
    let spread = build_segre_spread(tower);
    let mut projections_maximal = true;
    for (i, &t) in flag.type_vec.iter().enumerate() {
        projections_maximal &=
            code.projected(i).min_distance(tower) == max_grassmannian_distance(t, 4);
    }

    let items = vec![
        CheckItem::compare(
            "generator word equals the block-diagonal matrix",
            block_diagonal.to_rows(),
            word.to_rows(),
        ),
        CheckItem::require("the word belongs to the block group", g.contains(&word)),
        CheckItem::compare(
            "first subspace is moved to the second coordinate line",
            target_line.matrix().to_rows(),
            f1_moved.matrix().to_rows(),
        ),
        CheckItem::require("first subspace is moved", f1_moved != flag.subs[0]),
        CheckItem::require(
            "middle subspace is stabilized",
            flag.subs[1].act(tower, &word) == flag.subs[1],
        ),
        CheckItem::require(
            "middle projected code is the spread",
            code.projected(1).members() == spread.members(),
        ),
        CheckItem::require("every projected code attains its maximum distance", projections_maximal),
        CheckItem::require("the orbit code is not disjoint", !code.is_disjoint()),
        CheckItem::require(
            "the orbit code misses the distance bound",
            !code.is_optimum_distance(tower),
        ),
    ];
    Ok(CheckReport::new("ex_nodisjoint", items))
}

/// Outcome of the exhaustive scan for single-orbit optimum-distance codes
/// over the standard full flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleOrbitScan {
    pub pairs_scanned: u64,
    pub transitive_subgroups: usize,
    pub bound_size_orbits: usize,
    pub optimum_orbits: usize,
}

/// Scan every 2-generated subgroup ⟨a,b⟩ of the 2×2 group, with a of the
/// largest prime order p* dividing q^k+1, for transitivity on the lines;
/// for each distinct transitive subgroup, grow the orbit of the standard
/// full flag under the embedded generators and test whether it is an
/// optimum-distance code of size q^k+1.
///
/// This decides existence over all line-transitive subgroups: any such
/// subgroup contains an element a of order p* (which permutes the lines in
/// p*-cycles only, since a non-scalar 2×2 matrix fixes at most two lines
/// and no scalar has order p*), plus an element b fusing a's at most two
/// line orbits; and a size-(q^k+1) optimum orbit under the big subgroup
/// already equals the orbit under ⟨a,b⟩, because the latter projects onto
/// all q^k+1 lines.  The scan therefore requires q^k+1 ≤ 2·p*.
pub fn scan_single_orbit_odfc(tower: &FieldTower, table_cap: u64) -> Result<SingleOrbitScan> {
    let points = (tower.qk() + 1) as usize;
    let p_star = factorize(points as u64)
        .last()
        .map(|&(p, _)| p)
        .expect("q^k+1 is at least 3");
    if p_star < 3 || points as u64 > 2 * p_star || points > 31 {
        return Err(Error::BadParameter(format!(
            "the scan needs q^k+1 (= {points}) to be at most twice its largest prime factor {p_star}"
        )));
    }
    let gbar = build_gbar(tower)?;
    let cayley = build_cayley_table(tower, &gbar, table_cap)?;
    let lines = all_lines(tower);
    let base_images: Vec<u32> = gbar
        .elements()
        .iter()
        .map(|m| {
            lines
                .binary_search(&lines[0].act(tower, m))
                .expect("line action is closed") as u32
        })
        .collect();
    let full_mask: u32 = (1u32 << points) - 1;

    let n = gbar.order();
    let candidates: Vec<u32> =
        (0..n as u32).filter(|&i| cayley.orders[i as usize] == p_star).collect();
    let standard = standard_full_flag(tower, FieldTower::GROUND, 2 * tower.k());

    let mut scan = SingleOrbitScan {
        pairs_scanned: 0,
        transitive_subgroups: 0,
        bound_size_orbits: 0,
        optimum_orbits: 0,
    };
    let mut seen_sets: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
    let mut visited_flags = vec![false; n];
    let mut visited: Vec<u32> = Vec::with_capacity(n);

    for &a in &candidates {
        for b in 0..n as u32 {
            if b == cayley.identity {
                continue;
            }
            scan.pairs_scanned += 1;

            visited.clear();
            visited.push(cayley.identity);
            visited_flags[cayley.identity as usize] = true;
            let mut mask = 1u32 << base_images[cayley.identity as usize];
            let mut head = 0;
            while head < visited.len() {
                let x = visited[head] as usize;
                head += 1;
                for g in [a, b] {
                    let y = cayley.table[x * n + g as usize];
                    if !visited_flags[y as usize] {
                        visited_flags[y as usize] = true;
                        mask |= 1u32 << base_images[y as usize];
                        visited.push(y);
                    }
                }
            }
            for &v in &visited {
                visited_flags[v as usize] = false;
            }
            if mask != full_mask {
                continue;
            }
            let mut ids = visited.clone();
            ids.sort_unstable();
            if !seen_sets.insert(ids) {
                continue;
            }

            let ma = psi(tower, &gbar.elements()[a as usize])?;
            let mb = psi(tower, &gbar.elements()[b as usize])?;
            let mut orbit = BTreeSet::from([standard.clone()]);
            let mut queue = vec![standard.clone()];
            let mut overflow = false;
            'grow: while let Some(f) = queue.pop() {
                for m in [&ma, &mb] {
                    let image = f.apply(tower, m);
                    if !orbit.contains(&image) {
                        if orbit.len() >= points {
                            overflow = true;
                            break 'grow;
                        }
                        orbit.insert(image.clone());
                        queue.push(image);
                    }
                }
            }
            if overflow || orbit.len() != points {
                continue;
            }
            scan.bound_size_orbits += 1;
            let code = FlagCode::from_flags(orbit.into_iter().collect())?;
            if code.is_optimum_distance(tower) {
                scan.optimum_orbits += 1;
            }
        }
    }
    scan.transitive_subgroups = seen_sets.len();
    Ok(scan)
}

/// q=3, k=2: no subgroup of the block group that is transitive on the
/// spread extends the standard full flag to a single-orbit code attaining
/// the distance bound.
pub fn no_single_orbit_odfc_check(tower: &FieldTower, table_cap: u64) -> Result<CheckReport> {
    if tower.q() != 3 || tower.k() != 2 {
        return Err(Error::BadParameter(
            "the nonexistence claim is specific to the ternary field with k = 2".to_string(),
        ));
    }
    let scan = scan_single_orbit_odfc(tower, table_cap)?;
    let items = vec![
        CheckItem::require(
            &format!("generator pairs scanned ({})", scan.pairs_scanned),
            scan.pairs_scanned > 0,
        ),
        CheckItem::require(
            &format!("distinct transitive subgroups found ({})", scan.transitive_subgroups),
            scan.transitive_subgroups > 0,
        ),
        CheckItem::require(
            &format!("standard-flag orbits of size ten ({})", scan.bound_size_orbits),
            true,
        ),
        CheckItem::compare("single-orbit codes attaining the bound", 0usize, scan.optimum_orbits),
    ];
    Ok(CheckReport::new("rem_no_single_orbit_odfc", items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{close_group, DEFAULT_TABLE_CAP};
    use crate::matspace::gaussian_binomial;

    fn tower22() -> FieldTower {
        FieldTower::new(2, 1, 2).unwrap()
    }

    fn tower32() -> FieldTower {
        FieldTower::new(3, 1, 2).unwrap()
    }

    fn tower23() -> FieldTower {
        FieldTower::new(2, 1, 3).unwrap()
    }

    fn line(tower: &FieldTower, rows: &[Vec<u64>]) -> Subspace {
        Subspace::from_matrix(
            tower,
            &Matrix::from_rows(tower, FieldTower::GROUND, rows).unwrap(),
        )
    }

    #[test]
    fn flag_construction_validates_nesting_and_type() {
        let t = tower22();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        assert_eq!(std.type_vec(), &[1, 2, 3]);
        assert!(std.is_full());
        assert_eq!(std.len(), 3);

        assert!(matches!(Flag::new(&t, vec![]).unwrap_err(), Error::BadFlagType(_)));

        // Not nested: two different lines.
        let l1 = line(&t, &[vec![1, 0, 0, 0]]);
        let plane = line(&t, &[vec![0, 1, 0, 0], vec![0, 0, 1, 0]]);
        assert!(matches!(
            Flag::new(&t, vec![l1.clone(), plane]).unwrap_err(),
            Error::BadFlagType(_)
        ));

        // Repeated dimension.
        let l2 = line(&t, &[vec![0, 1, 0, 0]]);
        assert!(matches!(Flag::new(&t, vec![l1.clone(), l2]).unwrap_err(), Error::BadFlagType(_)));

        // Whole space is not allowed as a member.
        let full = Subspace::full(FieldTower::GROUND, 4);
        assert!(matches!(Flag::new(&t, vec![l1, full]).unwrap_err(), Error::BadFlagType(_)));
    }

    #[test]
    fn flag_distance_examples() {
        let t = tower22();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        assert_eq!(flag_distance(&t, &std, &std).unwrap(), 0);

        let i2 = Matrix::identity(FieldTower::GROUND, 2);
        let z2 = Matrix::zero(FieldTower::GROUND, 2, 2);
        let swap = Matrix::from_blocks(&z2, &i2, &i2, &z2);
        let swapped = std.apply(&t, &swap);
        // Position distances 2 + 4 + 2.
        assert_eq!(flag_distance(&t, &std, &swapped).unwrap(), 8);

        let other = standard_full_flag(&t, FieldTower::MIDDLE, 4);
        assert!(flag_distance(&t, &std, &other).is_err());
    }

    #[test]
    fn distance_bound_closed_forms() {
        assert_eq!(max_flag_distance(&[1, 2, 3], 4).unwrap(), 8);
        assert_eq!(max_flag_distance(&[2], 4).unwrap(), 4);
        assert_eq!(max_flag_distance(&[1, 2, 3, 4, 5], 6).unwrap(), 18);
        assert_eq!(max_flag_distance(&[1, 2], 4).unwrap(), 6);
        assert!(max_flag_distance(&[0, 1], 4).is_err());
        assert!(max_flag_distance(&[1, 4], 4).is_err());
        assert!(max_flag_distance(&[2, 2], 4).is_err());
        for t in [tower22(), tower32(), tower23()] {
            let r = distance_bound_check(&t);
            assert!(r.passed, "{:?}", r.failures());
        }
    }

    #[test]
    fn completion_of_standard_summands() {
        let t = tower22();
        let completed = complete_to_full_flag(&t, &first_summand(&t)).unwrap();
        assert_eq!(completed, standard_full_flag(&t, FieldTower::GROUND, 4));

        let v = complete_to_full_flag(&t, &second_summand(&t)).unwrap();
        assert_eq!(v.subspace(0), &line(&t, &[vec![0, 0, 1, 0]]));
        assert_eq!(v.subspace(1), &second_summand(&t));
        assert_eq!(
            complete_to_full_flag(&t, &second_summand(&t)).unwrap(),
            v,
            "completion is deterministic"
        );

        let not_half = line(&t, &[vec![1, 0, 0, 0]]);
        assert!(matches!(complete_to_full_flag(&t, &not_half).unwrap_err(), Error::BadDimension(_)));
    }

    #[test]
    fn flag_metric_properties_hold_exhaustively_for_lines_inside_planes() {
        // All flags of type (1,2) on F_2^4 through a fixed chain give a
        // small sample; check symmetry, identity and triangle inequality
        // over every full-flag pair drawn from one orbit.
        let t = tower22();
        let g = build_g(&t).unwrap();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let code = orbit_flag_code(&t, &g, &std).unwrap();
        let flags = code.flags();
        assert!(flags.len() >= 10);
        for f in flags.iter().take(6) {
            for h in flags.iter().take(6) {
                let d_fh = flag_distance(&t, f, h).unwrap();
                assert_eq!(d_fh, flag_distance(&t, h, f).unwrap());
                assert_eq!(d_fh == 0, f == h);
                for e in flags.iter().take(6) {
                    let through = flag_distance(&t, f, e).unwrap()
                        + flag_distance(&t, e, h).unwrap();
                    assert!(d_fh <= through);
                }
            }
        }
    }

    #[test]
    fn odfc_construction_in_even_characteristic() {
        let t = tower22();
        let code = build_odfc(&t).unwrap();
        assert_eq!(code.size(), 5);
        assert_eq!(code.min_distance(&t), 8);
        assert!(code.is_optimum_distance(&t));
        assert!(code.is_disjoint());
        let spread = build_segre_spread(&t);
        assert_eq!(code.projected(1).members(), spread.members());
    }

    #[test]
    fn odfc_construction_in_odd_characteristic() {
        let t = tower32();
        let code = build_odfc(&t).unwrap();
        assert_eq!(code.size(), 10);
        assert_eq!(code.min_distance(&t), 8);
        assert!(code.is_optimum_distance(&t));
        let spread = build_segre_spread(&t);
        assert_eq!(code.projected(1).members(), spread.members());
    }

    #[test]
    fn odfc_construction_for_k3() {
        let t = tower23();
        let code = build_odfc(&t).unwrap();
        assert_eq!(code.size(), 9);
        assert_eq!(code.min_distance(&t), 18);
        assert!(code.is_optimum_distance(&t));
        // Pairwise distances are constantly 2k².
        for (i, f) in code.flags().iter().enumerate() {
            for g in &code.flags()[i + 1..] {
                assert_eq!(flag_distance(&t, f, g).unwrap(), 18);
            }
        }
    }

    #[test]
    fn orbit_flag_code_sizes() {
        let t = tower22();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let trivial = MatrixGroup::trivial(FieldTower::GROUND, 4);
        assert_eq!(orbit_flag_code(&t, &trivial, &std).unwrap().size(), 1);

        let singer = build_singer(&t).unwrap();
        assert_eq!(orbit_flag_code(&t, &singer.embedded, &std).unwrap().size(), 5);

        let t = tower32();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let singer = build_singer(&t).unwrap();
        let code = orbit_flag_code(&t, &singer.embedded, &std).unwrap();
        assert_eq!(code.size(), 5);
        assert!(code.is_optimum_distance(&t));
    }

    #[test]
    fn singleton_codes_are_not_optimum() {
        let t = tower22();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let code = FlagCode::from_flags(vec![std]).unwrap();
        assert_eq!(code.min_distance(&t), 0);
        assert!(code.is_disjoint());
        assert!(!code.is_optimum_distance(&t));
    }

    #[test]
    fn stabilizer_decomposition_and_containment() {
        let t = tower22();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let g = build_g(&t).unwrap();
        let r = stabilizer_flag_decomposition_check(&t, &g, &std).unwrap();
        assert!(r.passed, "{:?}", r.failures());
        let trivial = MatrixGroup::trivial(FieldTower::GROUND, 4);
        let r = stabilizer_flag_decomposition_check(&t, &trivial, &std).unwrap();
        assert!(r.passed, "{:?}", r.failures());

        let r = stabilizer_containment_check(&t, &g, &std).unwrap();
        assert!(r.passed, "{:?}", r.failures());
        let r = stabilizer_containment_check(&t, &trivial, &std).unwrap();
        assert!(r.passed, "{:?}", r.failures());

        // The embedded cyclic group gives equal stabilizers outright.
        let singer = build_singer(&t).unwrap();
        let r = stabilizer_containment_check(&t, &singer.embedded, &std).unwrap();
        assert!(r.passed, "{:?}", r.failures());
    }

    #[test]
    fn disjointness_equivalence_on_mixed_cases() {
        for t in [tower22(), tower32()] {
            let g = build_g(&t).unwrap();
            let singer = build_singer(&t).unwrap();
            let std = standard_full_flag(&t, FieldTower::GROUND, 4);
            let r = disjointness_equivalence_check(
                &t,
                &[(&g, &std), (&singer.embedded, &std)],
            )
            .unwrap();
            assert!(r.passed, "{}: {:?}", t.q(), r.failures());
        }
    }

    #[test]
    fn sufficiency_and_union_checks() {
        for t in [tower22(), tower32()] {
            let singer = build_singer(&t).unwrap();
            let f_u = complete_to_full_flag(&t, &first_summand(&t)).unwrap();
            let r = orbit_odfc_sufficiency_check(&t, &singer.embedded, &f_u).unwrap();
            assert!(r.passed, "{}: {:?}", t.q(), r.failures());
            let r = union_theorem_check(&t, &singer.embedded, &[f_u.clone()]).unwrap();
            assert!(r.passed, "{}: {:?}", t.q(), r.failures());
        }
        let t = tower32();
        let singer = build_singer(&t).unwrap();
        let f_u = complete_to_full_flag(&t, &first_summand(&t)).unwrap();
        let f_v = complete_to_full_flag(&t, &second_summand(&t)).unwrap();
        let r = union_theorem_check(&t, &singer.embedded, &[f_u, f_v]).unwrap();
        assert!(r.passed, "{:?}", r.failures());
        let r = largest_size_union_check(&t).unwrap();
        assert!(r.passed, "{:?}", r.failures());
        assert!(largest_size_union_check(&tower22()).is_err());
    }

    #[test]
    fn construction_checks_pass() {
        for t in [tower22(), tower32(), tower23()] {
            let r = odfc_orbit_size_check(&t).unwrap();
            assert!(r.passed, "{}: {:?}", t.q(), r.failures());
        }
    }

    #[test]
    fn nondisjoint_example_is_reproduced() {
        let t = tower22();
        let r = reproduce_nondisjoint_example(&t).unwrap();
        assert!(r.passed, "{:?}", r.failures());
        assert!(reproduce_nondisjoint_example(&tower32()).is_err());
    }

    #[test]
    fn characterization_and_max_size_over_a_batch() {
        let t = tower22();
        let g = build_g(&t).unwrap();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let singer = build_singer(&t).unwrap();
        let mut codes = vec![
            build_odfc(&t).unwrap(),
            orbit_flag_code(&t, &g, &std).unwrap(),
            FlagCode::from_flags(vec![std.clone()]).unwrap(),
            orbit_flag_code(&t, &singer.embedded, &std).unwrap(),
        ];
        // An adversarial mutation: swap one codeword for a different
        // completion over the same middle subspace.
        let constructed = build_odfc(&t).unwrap();
        let mut flags = constructed.flags().to_vec();
        let replacement = standard_full_flag(&t, FieldTower::GROUND, 4);
        if !flags.contains(&replacement) {
            flags[0] = replacement;
        }
        codes.push(FlagCode::from_flags(flags).unwrap());

        let r = characterization_check(&t, &codes);
        assert!(r.passed, "{:?}", r.failures());
        let r = max_size_check(&t, &codes);
        assert!(r.passed, "{:?}", r.failures());
    }

    #[test]
    fn max_size_equality_fails_for_half_spread_projections() {
        // Odd characteristic: a single orbit is optimum with size 5, so it
        // must not have a spread as its middle projection.
        let t = tower32();
        let singer = build_singer(&t).unwrap();
        let f_u = complete_to_full_flag(&t, &first_summand(&t)).unwrap();
        let code = orbit_flag_code(&t, &singer.embedded, &f_u).unwrap();
        assert_eq!(code.size(), 5);
        assert!(code.is_optimum_distance(&t));
        assert!(!code.projected(1).is_spread(&t));
        let r = max_size_check(&t, &[code]);
        assert!(r.passed, "{:?}", r.failures());
    }

    #[test]
    fn flag_doc_round_trip() {
        let t = tower22();
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let doc = std.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.starts_with("{\"n\":4,\"type\":[1,2,3],\"subspaces\":"));
        let back = Flag::from_doc(&t, FieldTower::GROUND, &serde_json::from_str(&json).unwrap())
            .unwrap();
        assert_eq!(back, std);

        let mut tampered: FlagDoc = serde_json::from_str(&json).unwrap();
        tampered.type_vec = vec![1, 2];
        assert!(Flag::from_doc(&t, FieldTower::GROUND, &tampered).is_err());
    }

    #[test]
    fn flag_code_doc_round_trip_and_integrity() {
        let t = tower22();
        let code = build_odfc(&t).unwrap();
        let doc = code.to_doc(&t);
        assert_eq!(doc.q, 2);
        assert_eq!(doc.size, 5);
        assert_eq!(doc.min_distance, 8);
        assert!(doc.optimum);
        let json = serde_json::to_string(&doc).unwrap();
        let back =
            FlagCode::from_doc(&t, FieldTower::GROUND, &serde_json::from_str(&json).unwrap())
                .unwrap();
        assert_eq!(back, code);

        let mut tampered = doc.clone();
        tampered.min_distance = 6;
        assert!(FlagCode::from_doc(&t, FieldTower::GROUND, &tampered).is_err());
        let mut tampered = doc;
        tampered.optimum = false;
        assert!(FlagCode::from_doc(&t, FieldTower::GROUND, &tampered).is_err());
    }

    #[test]
    fn scan_control_finds_single_orbit_codes_in_even_characteristic() {
        // Positive control for the scanning machinery: over the binary
        // field the cyclic construction itself is a single transitive
        // orbit, so the scan must find optimum codes.
        let t = tower22();
        let scan = scan_single_orbit_odfc(&t, DEFAULT_TABLE_CAP).unwrap();
        assert!(scan.transitive_subgroups >= 13, "{scan:?}");
        assert!(scan.bound_size_orbits > 0, "{scan:?}");
        assert!(scan.optimum_orbits > 0, "{scan:?}");
    }

    #[test]
    fn scan_rejects_unsupported_parameters() {
        // q^k+1 = 9 has largest prime factor 3 < 9/2.
        let t = tower23();
        assert!(matches!(
            scan_single_orbit_odfc(&t, DEFAULT_TABLE_CAP).unwrap_err(),
            Error::BadParameter(_)
        ));
        assert!(no_single_orbit_odfc_check(&tower22(), DEFAULT_TABLE_CAP).is_err());
    }

    #[test]
    #[ignore = "exhaustive subgroup scan; run with --ignored or the slow suite"]
    fn no_single_orbit_odfc_in_the_ternary_case() {
        let t = tower32();
        let r = no_single_orbit_odfc_check(&t, DEFAULT_TABLE_CAP).unwrap();
        assert!(r.passed, "{:?}", r.failures());
    }

    #[test]
    fn projected_code_counts_are_grassmannian_bounded() {
        let t = tower22();
        let code = build_odfc(&t).unwrap();
        for (i, &dim) in code.type_vec().iter().enumerate() {
            let total = gaussian_binomial(2, 4, dim).unwrap();
            assert!((code.projected(i).size() as u128) <= total);
        }
    }

    #[test]
    fn group_closure_reuse_keeps_flag_orbits_consistent() {
        // The orbit of the standard flag under the group generated by the
        // counterexample word has the word's cyclic order as its size
        // divisor chain.
        let t = tower22();
        let p = t.middle_companion();
        let p2 = p.mul(&t, &p);
        let z2 = Matrix::zero(FieldTower::GROUND, 2, 2);
        let word = Matrix::from_blocks(&p, &z2, &z2, &p2);
        let cyclic = close_group(&t, &[word], 10).unwrap();
        assert_eq!(cyclic.order(), 3);
        let std = standard_full_flag(&t, FieldTower::GROUND, 4);
        let code = orbit_flag_code(&t, &cyclic, &std).unwrap();
        assert!(code.size() <= 3 && cyclic.order() % code.size() == 0);
    }
}
