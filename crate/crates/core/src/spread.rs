//! The Segre planar spread of F_q^{2k} and the two maps that tie the
//! 2-dimensional picture over GF(q^k) to the 2k-dimensional picture over
//! GF(q): the field reduction of lines and the block embedding of 2×2
//! matrices.
//!
//! The spread is assembled twice — once from its explicit member list and
//! once as the field-reduction image of every line — and the two results
//! are asserted identical, so a transcription slip in either construction
//! cannot survive the constructor.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::galois::{FieldElement, FieldTower, TowerDescriptor};
use crate::matspace::{grassmannian, matrix_order, random_invertible, Matrix, Subspace,
    SubspaceCode, SubspaceCodeDoc};
use crate::report::{CheckItem, CheckReport};
use crate::{Error, Result};

/// Seed for the deterministic matrix samples drawn by the sampled checks.
const SAMPLE_SEED: u64 = 0x5eed_0001;

/// rowsp(I_k | 0_k): the span of the first k standard basis vectors of
/// F_q^{2k}.
pub fn first_summand(tower: &FieldTower) -> Subspace {
    let k = tower.k();
    let level = FieldTower::GROUND;
    let mut m = Matrix::zero(level, k, 2 * k);
    for i in 0..k {
        m.set_raw(i, i, 1);
    }
    Subspace::from_matrix(tower, &m)
}

/// rowsp(0_k | I_k): the span of the last k standard basis vectors.
pub fn second_summand(tower: &FieldTower) -> Subspace {
    let k = tower.k();
    let level = FieldTower::GROUND;
    let mut m = Matrix::zero(level, k, 2 * k);
    for i in 0..k {
        m.set_raw(i, k + i, 1);
    }
    Subspace::from_matrix(tower, &m)
}

/// The line of F_{q^k}^2 spanned by the vector (x1, x2).
pub fn line_through(tower: &FieldTower, x1: FieldElement, x2: FieldElement) -> Result<Subspace> {
    let level = FieldTower::MIDDLE;
    if x1.level != level || x2.level != level {
        return Err(Error::WrongLevel { expected: level, got: x1.level.max(x2.level) });
    }
    if x1.enc == 0 && x2.enc == 0 {
        return Err(Error::ZeroElement);
    }
    let mut m = Matrix::zero(level, 1, 2);
    m.set_raw(0, 0, x1.enc);
    m.set_raw(0, 1, x2.enc);
    Ok(Subspace::from_matrix(tower, &m))
}

/// Every line of F_{q^k}^2, canonically sorted; there are q^k + 1 of them.
pub fn all_lines(tower: &FieldTower) -> Vec<Subspace> {
    grassmannian(tower, FieldTower::MIDDLE, 1, 2, tower.qk() + 1)
        .expect("the line count q^k + 1 never exceeds its own cap")
}

/// Field reduction of a line: rowsp(x1, x2) over GF(q^k) becomes
/// rowsp(iso(x1) | iso(x2)), a k-dimensional subspace of F_q^{2k}.
pub fn field_reduction(tower: &FieldTower, line: &Subspace) -> Result<Subspace> {
    if line.level() != FieldTower::MIDDLE {
        return Err(Error::WrongLevel { expected: FieldTower::MIDDLE, got: line.level() });
    }
    if line.ambient() != 2 {
        return Err(Error::AmbientMismatch(2, line.ambient()));
    }
    if line.dim() != 1 {
        return Err(Error::ZeroElement);
    }
    let x1 = line.matrix().get(0, 0);
    let x2 = line.matrix().get(0, 1);
    let left = tower.field_iso(x1)?;
    let right = tower.field_iso(x2)?;
    let reduced = Subspace::from_matrix(tower, &left.hstack(&right));
    debug_assert_eq!(reduced.dim(), tower.k(), "a line reduces to a k-dimensional subspace");
    Ok(reduced)
}

/// Blockwise field embedding of a square matrix over GF(q^k): every entry
/// becomes its k×k representation over GF(q), so an m×m input yields an
/// mk×mk output.  Multiplicative and injective; singular inputs are
/// rejected because only group elements are ever embedded.
pub fn psi(tower: &FieldTower, m: &Matrix) -> Result<Matrix> {
    if m.level() != FieldTower::MIDDLE {
        return Err(Error::WrongLevel { expected: FieldTower::MIDDLE, got: m.level() });
    }
    if m.rows() != m.cols() {
        return Err(Error::BadDimension("blockwise embedding of a non-square matrix".to_string()));
    }
    if m.det(tower).enc == 0 {
        return Err(Error::Singular);
    }
    let k = tower.k();
    let mut out = Matrix::zero(FieldTower::GROUND, m.rows() * k, m.cols() * k);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let block = tower.field_iso(m.get(i, j))?;
            for bi in 0..k {
                for bj in 0..k {
                    out.set_raw(i * k + bi, j * k + bj, block.get_raw(bi, bj));
                }
            }
        }
    }
    Ok(out)
}

/// The Segre planar spread of F_q^{2k}:
/// rowsp(0|I), rowsp(I|0), and rowsp(I|P^i) for i = 0..q^k−2, with P the
/// middle companion matrix.  Built both from that list and as the
/// field-reduction image of all lines; the two must agree exactly.
pub fn build_segre_spread(tower: &FieldTower) -> SubspaceCode {
    let k = tower.k();
    let level = FieldTower::GROUND;
    let p = tower.middle_companion();
    let identity = Matrix::identity(level, k);

    let mut members = vec![second_summand(tower), first_summand(tower)];
    let mut power = identity.clone();
    for _ in 0..tower.qk() - 1 {
        members.push(Subspace::from_matrix(tower, &identity.hstack(&power)));
        power = power.mul(tower, &p);
    }
    let direct = SubspaceCode::from_members(members).expect("uniform spread members");

    let reduced: Vec<Subspace> = all_lines(tower)
        .iter()
        .map(|l| field_reduction(tower, l).expect("lines reduce cleanly"))
        .collect();
    let via_lines = SubspaceCode::from_members(reduced).expect("uniform reduced members");

    assert_eq!(
        direct, via_lines,
        "the explicit spread list and the field-reduction image must coincide"
    );
    direct
}

/// Verify the action equivalence: reducing a moved line equals moving the
/// reduced line by the embedded matrix, for every line and every given
/// invertible 2×2 matrix.
pub fn action_equivalence_on(tower: &FieldTower, mats: &[Matrix]) -> CheckReport {
    let lines = all_lines(tower);
    let mut checked = 0u64;
    let mut items = Vec::new();
    for a in mats {
        let embedded = psi(tower, a).expect("equivalence check over invertible matrices");
        for l in &lines {
            checked += 1;
            let lhs = field_reduction(tower, &l.act(tower, a)).expect("moved line reduces");
            let rhs = field_reduction(tower, l).expect("line reduces").act(tower, &embedded);
            if lhs != rhs {
                items.push(CheckItem::compare(
                    &format!(
                        "violation at line {:?} under {:?}",
                        l.matrix().to_rows(),
                        a.to_rows()
                    ),
                    lhs.matrix().to_rows(),
                    rhs.matrix().to_rows(),
                ));
            }
        }
    }
    let violations = items.len();
    items.insert(0, CheckItem::compare("line/matrix pairs checked", mats.len() as u64 * lines.len() as u64, checked));
    items.insert(1, CheckItem::compare("equivalence violations", 0usize, violations));
    CheckReport::new("eq_accioequiv", items)
}

/// Sampled form of the action equivalence check: the identity plus
/// `sample_size` deterministically seeded random invertible matrices.
pub fn action_equivalence_check(tower: &FieldTower, sample_size: usize) -> CheckReport {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut mats = vec![Matrix::identity(FieldTower::MIDDLE, 2)];
    while mats.len() < sample_size.max(1) {
        mats.push(random_invertible(tower, FieldTower::MIDDLE, 2, &mut rng));
    }
    action_equivalence_on(tower, &mats)
}

/// Verify the field isomorphism into companion-matrix space: sends 1 to I
/// and the middle generator to P, respects + and · everywhere, and P has
/// the right determinant and multiplicative order.
pub fn field_iso_check(tower: &FieldTower) -> CheckReport {
    let level = FieldTower::MIDDLE;
    let p = tower.middle_companion();
    let alpha = tower.alpha(level);
    let mut items = vec![
        CheckItem::compare(
            "generator maps to the companion matrix",
            p.to_rows(),
            tower.field_iso(alpha).expect("iso of the generator").to_rows(),
        ),
        CheckItem::compare(
            "one maps to the identity",
            Matrix::identity(FieldTower::GROUND, tower.k()).to_rows(),
            tower.field_iso(tower.one(level)).expect("iso of one").to_rows(),
        ),
    ];

    let mut add_violations = 0u64;
    let mut mul_violations = 0u64;
    for xe in 0..tower.qk() {
        for ye in 0..tower.qk() {
            let (x, y) = (tower.element(level, xe).unwrap(), tower.element(level, ye).unwrap());
            let (fx, fy) = (tower.field_iso(x).unwrap(), tower.field_iso(y).unwrap());
            if tower.field_iso(tower.add(x, y)).unwrap() != fx.add(tower, &fy) {
                add_violations += 1;
            }
            if tower.field_iso(tower.mul(x, y)).unwrap() != fx.mul(tower, &fy) {
                mul_violations += 1;
            }
        }
    }
    items.push(CheckItem::compare("additivity violations", 0u64, add_violations));
    items.push(CheckItem::compare("multiplicativity violations", 0u64, mul_violations));

    let t = (tower.qk() - 1) / (tower.q() - 1);
    let expected_det = tower
        .subfield_project(tower.pow(alpha, t as i64).expect("power of the generator"))
        .expect("norm lands in the ground field");
    items.push(CheckItem::compare(
        "det of the companion matrix is the generator norm",
        expected_det.enc,
        p.det(tower).enc,
    ));
    items.push(CheckItem::compare(
        "companion matrix order",
        tower.qk() - 1,
        matrix_order(tower, &p, tower.qk()).expect("order below cap"),
    ));
    CheckReport::new("eq_isoalphaP", items)
}

/// Verify the Segre spread itself: member count, spread property, minimum
/// distance, and the two standard members.
pub fn spread_check(tower: &FieldTower) -> CheckReport {
    let spread = build_segre_spread(tower);
    let items = vec![
        CheckItem::compare("member count", tower.qk() + 1, spread.size() as u64),
        CheckItem::require("pairwise trivial intersections with full count", spread.is_spread(tower)),
        CheckItem::compare("minimum distance", 2 * tower.k() as u64, spread.min_distance(tower)),
        CheckItem::require("contains rowsp(I|0)", spread.contains(&first_summand(tower))),
        CheckItem::require("contains rowsp(0|I)", spread.contains(&second_summand(tower))),
    ];
    CheckReport::new("def_spread_manganiello", items)
}

/// Verify the field reduction map: injective on lines, image exactly the
/// spread, and the two coordinate lines land on the two standard members.
pub fn field_reduction_check(tower: &FieldTower) -> CheckReport {
    let lines = all_lines(tower);
    let image: Vec<Subspace> =
        lines.iter().map(|l| field_reduction(tower, l).expect("lines reduce")).collect();
    let mut dedup = image.clone();
    dedup.sort();
    dedup.dedup();

    let spread = build_segre_spread(tower);
    let image_code = SubspaceCode::from_members(image).expect("uniform image");

    let one = tower.one(FieldTower::MIDDLE);
    let zero = tower.zero(FieldTower::MIDDLE);
    let items = vec![
        CheckItem::compare("line count", tower.qk() + 1, lines.len() as u64),
        CheckItem::compare("injectivity: distinct images", lines.len(), dedup.len()),
        CheckItem::require("image equals the spread", image_code == spread),
        CheckItem::compare(
            "rowsp(1,0) reduces to rowsp(I|0)",
            first_summand(tower).matrix().to_rows(),
            field_reduction(tower, &line_through(tower, one, zero).unwrap())
                .unwrap()
                .matrix()
                .to_rows(),
        ),
        CheckItem::compare(
            "rowsp(0,1) reduces to rowsp(0|I)",
            second_summand(tower).matrix().to_rows(),
            field_reduction(tower, &line_through(tower, zero, one).unwrap())
                .unwrap()
                .matrix()
                .to_rows(),
        ),
    ];
    CheckReport::new("eq_fieldreduction", items)
}

/// Verify the block embedding: identity and swap go where they must, the
/// shear generators map blockwise, and the map is multiplicative,
/// injective, and determinant-1-preserving over a deterministic sample.
pub fn psi_check(tower: &FieldTower, sample_pairs: usize) -> CheckReport {
    let level = FieldTower::MIDDLE;
    let ground = FieldTower::GROUND;
    let k = tower.k();
    let mut items = Vec::new();

    let id2 = Matrix::identity(level, 2);
    items.push(CheckItem::compare(
        "identity embeds to the identity",
        Matrix::identity(ground, 2 * k).to_rows(),
        psi(tower, &id2).expect("identity embeds").to_rows(),
    ));

    let ik = Matrix::identity(ground, k);
    let zk = Matrix::zero(ground, k, k);
    let mut swap2 = Matrix::zero(level, 2, 2);
    swap2.set_raw(0, 1, 1);
    swap2.set_raw(1, 0, 1);
    items.push(CheckItem::compare(
        "swap embeds to the block swap",
        Matrix::from_blocks(&zk, &ik, &ik, &zk).to_rows(),
        psi(tower, &swap2).expect("swap embeds").to_rows(),
    ));

    let p = tower.middle_companion();
    let mut shear_violations = 0u64;
    let mut power = ik.clone();
    for i in 0..tower.qk() - 1 {
        let mut shear2 = Matrix::identity(level, 2);
        shear2.set_raw(0, 1, tower.pow(tower.alpha(level), i as i64).unwrap().enc);
        let expected = Matrix::from_blocks(&ik, &power, &zk, &ik);
        if psi(tower, &shear2).expect("shears embed") != expected {
            shear_violations += 1;
        }
        power = power.mul(tower, &p);
    }
    items.push(CheckItem::compare("shear generator embedding violations", 0u64, shear_violations));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 1);
    let mut mul_violations = 0u64;
    let mut det_one_violations = 0u64;
    let mut seen = std::collections::BTreeSet::new();
    let mut distinct_inputs = std::collections::BTreeSet::new();
    for _ in 0..sample_pairs {
        let a = random_invertible(tower, level, 2, &mut rng);
        let b = random_invertible(tower, level, 2, &mut rng);
        let pa = psi(tower, &a).unwrap();
        let pb = psi(tower, &b).unwrap();
        if psi(tower, &a.mul(tower, &b)).unwrap() != pa.mul(tower, &pb) {
            mul_violations += 1;
        }
        if a.det(tower).enc == 1 && pa.det(tower).enc != 1 {
            det_one_violations += 1;
        }
        distinct_inputs.insert(a.clone());
        seen.insert(pa);
    }
    items.push(CheckItem::compare("multiplicativity violations", 0u64, mul_violations));
    items.push(CheckItem::compare(
        "injectivity: image count matches input count",
        distinct_inputs.len(),
        seen.len(),
    ));
    items.push(CheckItem::compare("determinant-1 preservation violations", 0u64, det_one_violations));
    CheckReport::new("eq_hom_grasmanianas", items)
}

/// Wire form of the spread: the code document plus its construction tag
/// and the tower it was built over.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadDoc {
    pub construction: String,
    pub tower: TowerDescriptor,
    #[serde(flatten)]
    pub code: SubspaceCodeDoc,
}

impl SpreadDoc {
    pub fn new(tower: &FieldTower, spread: &SubspaceCode) -> SpreadDoc {
        SpreadDoc {
            construction: "segre".to_string(),
            tower: tower.descriptor(),
            code: spread.to_doc(tower),
        }
    }
}
