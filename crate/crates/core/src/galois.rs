//! Towers of finite fields with exact, table-driven arithmetic.
//!
//! A [`FieldTower`] stacks four fields
//!
//! ```text
//!   GF(p)  ⊆  GF(q)  ⊆  GF(q^k)  ⊆  GF(q^{2k}),        q = p^e
//! ```
//!
//! where each level is realised as an extension of the previous one by a
//! monic *primitive* polynomial (its root generates the multiplicative group
//! of the new level).  Unless explicit polynomials are supplied, each level
//! uses the lexicographically smallest primitive polynomial of the required
//! degree, with coefficient vectors read constant-term-first and coefficients
//! ordered by their integer encodings — so two towers built from the same
//! `(p, e, k)` are always identical.
//!
//! Elements are handled by a *canonical integer encoding*: an element with
//! coefficient vector `(a_0, …, a_{d-1})` over the previous level `S` encodes
//! as `Σ encode(a_i)·|S|^i`.  The encoding is a bijection onto
//! `0..|level|`, gives every level a total order, makes `0` encode as `0`
//! and `1` as `1` at every level, and is what all sorted/canonical output in
//! this crate ultimately rests on.
//!
//! Each level keeps log/exp tables for its cached primitive element, so
//! multiplication and inversion are O(1) lookups; addition recurses through
//! the coefficient digits down to arithmetic mod `p`.

use serde::{Deserialize, Serialize};

use crate::matspace::Matrix;
use crate::{Error, Result, MAX_LEVEL_SIZE};

/// An element of one level of a [`FieldTower`], stored by its canonical
/// integer encoding.  Elements are meaningless without the tower that created
/// them; all arithmetic lives on [`FieldTower`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement {
    pub level: usize,
    pub enc: u64,
}

/// A polynomial over one tower level, coefficient encodings stored
/// constant-term-first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub level: usize,
    pub coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(level: usize, coeffs: Vec<u64>) -> Self {
        Poly { level, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Monic means the leading coefficient encodes the field's one, which is
    /// always the integer 1.
    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }
}

/// Outcome of a primitivity test, with enough detail to say *why* a
/// polynomial was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimitiveStatus {
    Primitive,
    /// A proper monic divisor was found.
    Reducible { divisor: Vec<u64> },
    /// Irreducible, but the root generates a proper subgroup.
    WrongOrder { order: u64, expected: u64 },
}

/// One level of the tower: an extension of the previous level together with
/// its arithmetic tables.
#[derive(Debug, Clone)]
struct Level {
    /// Number of elements.
    size: u64,
    /// Extension degree over the previous level (level 0 records 1).
    degree: usize,
    /// Monic primitive polynomial over the previous level, constant-first.
    /// For level 0 this is `x - α₀` over GF(p) itself, kept for uniformity.
    poly: Vec<u64>,
    /// Encoding of the cached primitive element (the class of x, for proper
    /// extensions).
    alpha: u64,
    /// `exp[i]` encodes `α^i`, for `i` in `0..size-1`.
    exp: Vec<u64>,
    /// Inverse of `exp`; `log[0]` holds a sentinel.
    log: Vec<u64>,
}

const LOG_SENTINEL: u64 = u64::MAX;

/// Serializable description of a tower: the parameters plus the three
/// extension polynomials (levels 1..=3, constant-first integer encodings).
/// Rebuilding from a descriptor re-validates every polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDescriptor {
    pub p: u64,
    pub e: usize,
    pub k: usize,
    pub polys: Vec<Vec<u64>>,
}

/// The four-level field tower.  See the module docs for the encoding and
/// construction rules.  Immutable once built; all methods take `&self`.
#[derive(Debug, Clone)]
pub struct FieldTower {
    p: u64,
    e: usize,
    k: usize,
    levels: Vec<Level>,
}

impl FieldTower {
    /// Index of GF(p).
    pub const PRIME: usize = 0;
    /// Index of GF(q): the field the 2k-dimensional ambient space and its
    /// matrices live over.
    pub const GROUND: usize = 1;
    /// Index of GF(q^k): the field whose projective line indexes the spread.
    pub const MIDDLE: usize = 2;
    /// Index of GF(q^{2k}).
    pub const TOP: usize = 3;

    /// Build the tower for `(p, e, k)` with automatically chosen polynomials.
    pub fn new(p: u64, e: usize, k: usize) -> Result<Self> {
        Self::with_polys(p, e, k, &[])
    }

    /// Build the tower, overriding the first `overrides.len()` extension
    /// polynomials (level 1, then 2, then 3) with explicit coefficient
    /// vectors.  Every override is validated: it must be monic of the right
    /// degree and primitive over its base level.
    pub fn with_polys(p: u64, e: usize, k: usize, overrides: &[Vec<u64>]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 || k == 0 {
            return Err(Error::BadParameter(format!(
                "extension degrees must be positive, got e={e}, k={k}"
            )));
        }
        if overrides.len() > 3 {
            return Err(Error::BadParameter(format!(
                "at most 3 polynomial overrides are meaningful, got {}",
                overrides.len()
            )));
        }
        let mut tower = FieldTower { p, e, k, levels: vec![build_prime_level(p)?] };
        for (idx, degree) in [e, k, 2].into_iter().enumerate() {
            let level = tower.build_extension(degree, overrides.get(idx))?;
            tower.levels.push(level);
        }
        Ok(tower)
    }

    /// Rebuild a tower from a serialized descriptor, re-validating all
    /// polynomials.
    pub fn from_descriptor(d: &TowerDescriptor) -> Result<Self> {
        if d.polys.len() != 3 {
            return Err(Error::BadParameter(format!(
                "descriptor must carry exactly 3 polynomials, got {}",
                d.polys.len()
            )));
        }
        Self::with_polys(d.p, d.e, d.k, &d.polys)
    }

    pub fn descriptor(&self) -> TowerDescriptor {
        TowerDescriptor {
            p: self.p,
            e: self.e,
            k: self.k,
            polys: self.levels[1..].iter().map(|lv| lv.poly.clone()).collect(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// q = p^e.
    pub fn q(&self) -> u64 {
        self.levels[Self::GROUND].size
    }

    /// q^k.
    pub fn qk(&self) -> u64 {
        self.levels[Self::MIDDLE].size
    }

    /// Dimension 2k of the ambient row space over GF(q).
    pub fn n(&self) -> usize {
        2 * self.k
    }

    pub fn size(&self, level: usize) -> u64 {
        self.levels[level].size
    }

    pub fn degree(&self, level: usize) -> usize {
        self.levels[level].degree
    }

    /// The defining polynomial of `level` over its base level.
    pub fn level_poly(&self, level: usize) -> Poly {
        Poly::new(level.saturating_sub(1), self.levels[level].poly.clone())
    }

    // ---- elements ----------------------------------------------------

    pub fn element(&self, level: usize, enc: u64) -> Result<FieldElement> {
        if level >= self.levels.len() {
            return Err(Error::WrongLevel { expected: self.levels.len() - 1, got: level });
        }
        if enc >= self.levels[level].size {
            return Err(Error::BadEncoding { level, enc });
        }
        Ok(FieldElement { level, enc })
    }

    pub fn zero(&self, level: usize) -> FieldElement {
        FieldElement { level, enc: 0 }
    }

    pub fn one(&self, level: usize) -> FieldElement {
        FieldElement { level, enc: 1 }
    }

    /// The cached primitive element of `level`.
    pub fn alpha(&self, level: usize) -> FieldElement {
        FieldElement { level, enc: self.levels[level].alpha }
    }

    fn same_level(a: FieldElement, b: FieldElement) -> usize {
        assert_eq!(a.level, b.level, "elements of different tower levels");
        a.level
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let level = Self::same_level(a, b);
        FieldElement { level, enc: self.add_raw(level, a.enc, b.enc) }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let level = Self::same_level(a, b);
        FieldElement { level, enc: self.sub_raw(level, a.enc, b.enc) }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement { level: a.level, enc: self.neg_raw(a.level, a.enc) }
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let level = Self::same_level(a, b);
        FieldElement { level, enc: self.mul_raw(level, a.enc, b.enc) }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.enc == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(FieldElement { level: a.level, enc: self.inv_raw(a.level, a.enc) })
    }

    /// `a^exp`, with negative exponents meaning powers of the inverse.
    pub fn pow(&self, a: FieldElement, exp: i64) -> Result<FieldElement> {
        if a.enc == 0 {
            return match exp.cmp(&0) {
                std::cmp::Ordering::Less => Err(Error::ZeroElement),
                std::cmp::Ordering::Equal => Ok(self.one(a.level)),
                std::cmp::Ordering::Greater => Ok(a),
            };
        }
        let m = (self.levels[a.level].size - 1) as i64;
        let r = exp.rem_euclid(m) as u64;
        Ok(FieldElement { level: a.level, enc: self.pow_raw(a.level, a.enc, r) })
    }

    /// Multiplicative order of a nonzero element, computed by factoring the
    /// group order and descending through maximal divisors.
    pub fn element_order(&self, a: FieldElement) -> Result<u64> {
        if a.enc == 0 {
            return Err(Error::ZeroElement);
        }
        let group = self.levels[a.level].size - 1;
        let mut ord = group;
        for (prime, _) in factorize(group) {
            while ord % prime == 0 && self.pow_raw(a.level, a.enc, ord / prime) == 1 {
                ord /= prime;
            }
        }
        Ok(ord)
    }

    /// Coefficient vector of `a` over the previous level, constant-first.
    /// Level 0 elements are their own single coefficient.
    pub fn coeffs(&self, a: FieldElement) -> Vec<FieldElement> {
        if a.level == 0 {
            return vec![a];
        }
        self.decode_digits(a.level, a.enc)
            .into_iter()
            .map(|enc| FieldElement { level: a.level - 1, enc })
            .collect()
    }

    /// Assemble a level-`level` element from coefficients over the previous
    /// level.  Shorter vectors are zero-padded; longer ones are rejected.
    pub fn from_coeffs(&self, level: usize, coeffs: &[FieldElement]) -> Result<FieldElement> {
        if level == 0 || level >= self.levels.len() {
            return Err(Error::WrongLevel { expected: 1, got: level });
        }
        let d = self.levels[level].degree;
        if coeffs.len() > d {
            return Err(Error::BadInput(format!(
                "{} coefficients for a degree-{d} extension",
                coeffs.len()
            )));
        }
        let base = self.levels[level - 1].size;
        let mut enc = 0u64;
        for (i, c) in coeffs.iter().enumerate() {
            if c.level != level - 1 {
                return Err(Error::WrongLevel { expected: level - 1, got: c.level });
            }
            if c.enc >= base {
                return Err(Error::BadEncoding { level: level - 1, enc: c.enc });
            }
            enc += c.enc * base.pow(i as u32);
        }
        self.element(level, enc)
    }

    /// Reinterpret `a` as an element of the previous level, if it lies in
    /// that subfield (all higher coefficients vanish).
    pub fn subfield_project(&self, a: FieldElement) -> Option<FieldElement> {
        if a.level == 0 {
            return None;
        }
        let base = self.levels[a.level - 1].size;
        if a.enc < base {
            Some(FieldElement { level: a.level - 1, enc: a.enc })
        } else {
            None
        }
    }

    /// Embed `a` into the next level up (constant coefficient vector).
    pub fn lift(&self, a: FieldElement) -> Result<FieldElement> {
        if a.level + 1 >= self.levels.len() {
            return Err(Error::WrongLevel { expected: self.levels.len() - 2, got: a.level });
        }
        Ok(FieldElement { level: a.level + 1, enc: a.enc })
    }

    // ---- raw (encoding-level) arithmetic, shared with matspace --------

    pub(crate) fn add_raw(&self, level: usize, a: u64, b: u64) -> u64 {
        if level == 0 {
            return (a + b) % self.levels[0].size;
        }
        let base = self.levels[level - 1].size;
        let mut out = 0u64;
        let mut place = 1u64;
        let (mut a, mut b) = (a, b);
        for _ in 0..self.levels[level].degree {
            out += self.add_raw(level - 1, a % base, b % base) * place;
            place *= base;
            a /= base;
            b /= base;
        }
        out
    }

    pub(crate) fn neg_raw(&self, level: usize, a: u64) -> u64 {
        if level == 0 {
            let p = self.levels[0].size;
            return (p - a) % p;
        }
        let base = self.levels[level - 1].size;
        let mut out = 0u64;
        let mut place = 1u64;
        let mut a = a;
        for _ in 0..self.levels[level].degree {
            out += self.neg_raw(level - 1, a % base) * place;
            place *= base;
            a /= base;
        }
        out
    }

    pub(crate) fn sub_raw(&self, level: usize, a: u64, b: u64) -> u64 {
        self.add_raw(level, a, self.neg_raw(level, b))
    }

    pub(crate) fn mul_raw(&self, level: usize, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let lv = &self.levels[level];
        let m = lv.size - 1;
        lv.exp[((lv.log[a as usize] + lv.log[b as usize]) % m) as usize]
    }

    pub(crate) fn inv_raw(&self, level: usize, a: u64) -> u64 {
        debug_assert_ne!(a, 0, "inverse of zero");
        let lv = &self.levels[level];
        let m = lv.size - 1;
        lv.exp[((m - lv.log[a as usize]) % m) as usize]
    }

    pub(crate) fn pow_raw(&self, level: usize, a: u64, exp: u64) -> u64 {
        if a == 0 {
            return if exp == 0 { 1 } else { 0 };
        }
        let lv = &self.levels[level];
        let m = lv.size - 1;
        let l = (lv.log[a as usize] as u128 * exp as u128 % m as u128) as u64;
        lv.exp[l as usize]
    }

    fn decode_digits(&self, level: usize, enc: u64) -> Vec<u64> {
        let base = self.levels[level - 1].size;
        let mut digits = Vec::with_capacity(self.levels[level].degree);
        let mut enc = enc;
        for _ in 0..self.levels[level].degree {
            digits.push(enc % base);
            enc /= base;
        }
        digits
    }

    // ---- primitivity -------------------------------------------------

    /// Whether `poly` (over level `poly.level`) is monic, irreducible, and
    /// has a root generating the full multiplicative group of the extension
    /// it defines.
    pub fn is_primitive(&self, poly: &Poly) -> Result<bool> {
        Ok(matches!(self.primitive_status(poly)?, PrimitiveStatus::Primitive))
    }

    /// Like [`is_primitive`](Self::is_primitive) but says which of the two
    /// checks failed.
    pub fn primitive_status(&self, poly: &Poly) -> Result<PrimitiveStatus> {
        if poly.level >= self.levels.len() {
            return Err(Error::WrongLevel { expected: self.levels.len() - 1, got: poly.level });
        }
        if !poly.is_monic() {
            return Err(Error::NotMonic);
        }
        let d = poly.degree();
        if d == 0 {
            return Err(Error::BadInput("constant polynomial".to_string()));
        }
        let base = self.levels[poly.level].size;
        for &c in &poly.coeffs {
            if c >= base {
                return Err(Error::BadEncoding { level: poly.level, enc: c });
            }
        }
        let ext_size = checked_size(base, d as u32)?;

        // Irreducibility by trial division over the base level.
        if let Some(divisor) = self.find_monic_divisor(poly)? {
            return Ok(PrimitiveStatus::Reducible { divisor });
        }

        // Order of the class of x in the quotient field.
        let target = ext_size - 1;
        let x = self.x_mod(poly);
        if self.quotient_pow(poly, &x, target) != self.quotient_one(d) {
            // Only possible when x reduces to zero (poly = x), which trial
            // division does not reject for degree 1.
            return Ok(PrimitiveStatus::WrongOrder { order: 0, expected: target });
        }
        let mut ord = target;
        for (prime, _) in factorize(target) {
            while ord % prime == 0
                && self.quotient_pow(poly, &x, ord / prime) == self.quotient_one(d)
            {
                ord /= prime;
            }
        }
        if ord == target {
            Ok(PrimitiveStatus::Primitive)
        } else {
            Ok(PrimitiveStatus::WrongOrder { order: ord, expected: target })
        }
    }

    /// Smallest-degree monic divisor of `poly` with `1 <= deg <= deg/2`, or
    /// None when irreducible.
    fn find_monic_divisor(&self, poly: &Poly) -> Result<Option<Vec<u64>>> {
        let level = poly.level;
        let base = self.levels[level].size;
        let d = poly.degree();
        for deg in 1..=(d / 2) {
            let combos = checked_size(base, deg as u32)?;
            if combos > crate::DEFAULT_ENUMERATION_CAP {
                return Err(Error::CapExceeded {
                    what: format!("irreducibility trial division at degree {deg}"),
                    needed: combos,
                    cap: crate::DEFAULT_ENUMERATION_CAP,
                });
            }
            let mut divisor = vec![0u64; deg + 1];
            divisor[deg] = 1;
            for m in 0..combos {
                let mut m = m;
                for c in divisor.iter_mut().take(deg) {
                    *c = m % base;
                    m /= base;
                }
                if self.poly_rem_is_zero(level, &poly.coeffs, &divisor) {
                    return Ok(Some(divisor));
                }
            }
        }
        Ok(None)
    }

    /// Remainder test for monic divisors: reduce `num` by `div` in place.
    fn poly_rem_is_zero(&self, level: usize, num: &[u64], div: &[u64]) -> bool {
        let dd = div.len() - 1;
        let mut rem: Vec<u64> = num.to_vec();
        for j in (dd..rem.len()).rev() {
            let c = rem[j];
            if c == 0 {
                continue;
            }
            rem[j] = 0;
            for i in 0..dd {
                let t = self.mul_raw(level, c, div[i]);
                rem[j - dd + i] = self.sub_raw(level, rem[j - dd + i], t);
            }
        }
        rem.iter().all(|&c| c == 0)
    }

    /// The class of x in the quotient by `poly`, as a digit vector.
    fn x_mod(&self, poly: &Poly) -> Vec<u64> {
        let d = poly.degree();
        if d == 1 {
            vec![self.neg_raw(poly.level, poly.coeffs[0])]
        } else {
            let mut v = vec![0u64; d];
            v[1] = 1;
            v
        }
    }

    fn quotient_one(&self, d: usize) -> Vec<u64> {
        let mut v = vec![0u64; d];
        v[0] = 1;
        v
    }

    /// Product in the quotient ring `level[x]/(modulus)`, digit vectors of
    /// length `deg(modulus)`.
    fn quotient_mul(&self, level: usize, modulus: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
        let d = modulus.len() - 1;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let t = self.mul_raw(level, ai, bj);
                prod[i + j] = self.add_raw(level, prod[i + j], t);
            }
        }
        for j in (d..2 * d - 1).rev() {
            let c = prod[j];
            if c == 0 {
                continue;
            }
            prod[j] = 0;
            for i in 0..d {
                let t = self.mul_raw(level, c, modulus[i]);
                prod[j - d + i] = self.sub_raw(level, prod[j - d + i], t);
            }
        }
        prod.truncate(d);
        prod
    }

    fn quotient_pow(&self, poly: &Poly, base: &[u64], exp: u64) -> Vec<u64> {
        let d = poly.degree();
        let mut acc = self.quotient_one(d);
        let mut sq = base.to_vec();
        let mut exp = exp;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.quotient_mul(poly.level, &poly.coeffs, &acc, &sq);
            }
            sq = self.quotient_mul(poly.level, &poly.coeffs, &sq, &sq);
            exp >>= 1;
        }
        acc
    }

    // ---- construction -------------------------------------------------

    /// Build the next extension level of degree `degree` over the current
    /// top, either from an explicit polynomial or by lexicographic scan.
    fn build_extension(&self, degree: usize, override_poly: Option<&Vec<u64>>) -> Result<Level> {
        let base_level = self.levels.len() - 1;
        let base = self.levels[base_level].size;
        let size = checked_size(base, degree as u32)?;

        let coeffs = match override_poly {
            Some(c) => {
                if c.len() != degree + 1 {
                    return Err(Error::BadParameter(format!(
                        "override polynomial has degree {}, expected {degree}",
                        c.len().saturating_sub(1)
                    )));
                }
                let poly = Poly::new(base_level, c.clone());
                match self.primitive_status(&poly)? {
                    PrimitiveStatus::Primitive => c.clone(),
                    PrimitiveStatus::Reducible { divisor } => {
                        return Err(Error::NotPrimitive(format!(
                            "reducible, divisible by {divisor:?}"
                        )))
                    }
                    PrimitiveStatus::WrongOrder { order, expected } => {
                        return Err(Error::NotPrimitive(format!(
                            "irreducible but root order is {order}, not {expected}"
                        )))
                    }
                }
            }
            None => self.smallest_primitive(base_level, degree)?,
        };

        // Assemble log/exp tables by stepping through the powers of the root.
        let poly = Poly::new(base_level, coeffs.clone());
        let alpha_digits = self.x_mod(&poly);
        let alpha = self.encode_digits_at(base, &alpha_digits);
        let mut exp = Vec::with_capacity((size - 1) as usize);
        let mut log = vec![LOG_SENTINEL; size as usize];
        let mut cur = self.quotient_one(degree);
        for i in 0..size - 1 {
            let enc = self.encode_digits_at(base, &cur);
            debug_assert_eq!(log[enc as usize], LOG_SENTINEL, "primitive root cycled early");
            exp.push(enc);
            log[enc as usize] = i;
            cur = self.quotient_mul(base_level, &coeffs, &cur, &alpha_digits);
        }
        debug_assert_eq!(self.encode_digits_at(base, &cur), 1, "root order mismatch");

        Ok(Level { size, degree, poly: coeffs, alpha, exp, log })
    }

    fn encode_digits_at(&self, base: u64, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * base + d)
    }

    /// Lexicographically smallest monic primitive polynomial of `degree`
    /// over `base_level`, coefficient vectors compared constant-term-first.
    fn smallest_primitive(&self, base_level: usize, degree: usize) -> Result<Vec<u64>> {
        let base = self.levels[base_level].size;
        let combos = checked_size(base, degree as u32)?;
        for m in 0..combos {
            // Digit c_0 varies slowest so candidates appear in lex order.
            let mut coeffs = vec![0u64; degree + 1];
            coeffs[degree] = 1;
            let mut m = m;
            for i in (0..degree).rev() {
                coeffs[i] = m % base;
                m /= base;
            }
            let poly = Poly::new(base_level, coeffs);
            if self.primitive_status(&poly)? == PrimitiveStatus::Primitive {
                return Ok(poly.coeffs);
            }
        }
        // Primitive polynomials of every degree exist over every finite
        // field, so the scan cannot come up empty.
        unreachable!("no primitive polynomial of degree {degree} over level {base_level}")
    }

    // ---- companion matrices and the matrix representation --------------

    /// Companion matrix of a monic polynomial: ones on the superdiagonal,
    /// negated coefficients in the last row.
    pub fn companion_matrix(&self, poly: &Poly) -> Result<Matrix> {
        if !poly.is_monic() {
            return Err(Error::NotMonic);
        }
        let d = poly.degree();
        if d == 0 {
            return Err(Error::BadDimension("companion of a constant".to_string()));
        }
        let mut m = Matrix::zero(poly.level, d, d);
        for i in 0..d.saturating_sub(1) {
            m.set_raw(i, i + 1, 1);
        }
        for j in 0..d {
            m.set_raw(d - 1, j, self.neg_raw(poly.level, poly.coeffs[j]));
        }
        Ok(m)
    }

    /// Companion matrix of the defining polynomial of GF(q^k) over GF(q):
    /// the k×k matrix `P` whose powers mirror the powers of the cached
    /// primitive element.
    pub fn middle_companion(&self) -> Matrix {
        self.companion_matrix(&self.level_poly(Self::MIDDLE))
            .expect("tower polynomials are monic")
    }

    /// The field isomorphism GF(q^k) → GF(q)[P] ⊆ k×k matrices over GF(q):
    /// an element with coefficients `(a_0, …, a_{k-1})` maps to
    /// `Σ a_i·P^i`.  Injective ring homomorphism; sends 1 to the identity
    /// and the cached primitive element to `P`.
    pub fn field_iso(&self, x: FieldElement) -> Result<Matrix> {
        if x.level != Self::MIDDLE {
            return Err(Error::WrongLevel { expected: Self::MIDDLE, got: x.level });
        }
        let p_mat = self.middle_companion();
        let k = self.k;
        let digits = self.decode_digits(Self::MIDDLE, x.enc);
        let mut acc = Matrix::zero(Self::GROUND, k, k);
        let mut power = Matrix::identity(Self::GROUND, k);
        for (i, &d) in digits.iter().enumerate() {
            if d != 0 {
                acc = acc.add(self, &power.scale_raw(self, d));
            }
            if i + 1 < digits.len() {
                power = power.mul(self, &p_mat);
            }
        }
        Ok(acc)
    }
}

/// Level 0: GF(p) with tables from the root of the lexicographically
/// smallest primitive linear polynomial x + c (the same selection rule the
/// proper extensions use).
fn build_prime_level(p: u64) -> Result<Level> {
    if p > MAX_LEVEL_SIZE {
        return Err(Error::CapExceeded { what: "prime level size".to_string(), needed: p, cap: MAX_LEVEL_SIZE });
    }
    let factors = factorize(p - 1);
    let order_mod_p = |a: u64| -> u64 {
        let mut ord = p - 1;
        for &(prime, _) in &factors {
            while ord % prime == 0 && pow_mod(a, ord / prime, p) == 1 {
                ord /= prime;
            }
        }
        ord
    };
    for c in 0..p {
        let root = (p - c) % p;
        if root == 0 {
            continue;
        }
        if order_mod_p(root) == p - 1 {
            let mut exp = Vec::with_capacity((p - 1) as usize);
            let mut log = vec![LOG_SENTINEL; p as usize];
            let mut cur = 1u64;
            for i in 0..p - 1 {
                exp.push(cur);
                log[cur as usize] = i;
                cur = cur * root % p;
            }
            return Ok(Level { size: p, degree: 1, poly: vec![c, 1], alpha: root, exp, log });
        }
    }
    unreachable!("every prime field has a primitive root")
}

fn checked_size(base: u64, degree: u32) -> Result<u64> {
    let mut size = 1u128;
    for _ in 0..degree {
        size *= base as u128;
        if size > MAX_LEVEL_SIZE as u128 {
            return Err(Error::CapExceeded {
                what: format!("field of size {base}^{degree}"),
                needed: u64::MAX,
                cap: MAX_LEVEL_SIZE,
            });
        }
    }
    Ok(size as u64)
}

/// Deterministic trial-division primality test; fine at this crate's scales.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Trial-division factorization as (prime, multiplicity) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut mult = 0;
            while n % d == 0 {
                n /= d;
                mult += 1;
            }
            out.push((d, mult));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent scan for the smallest primitive quadratic over a small
    /// prime field, using nothing from the crate: elements of the quadratic
    /// quotient are plain (lo, hi) pairs mod p.
    fn oracle_smallest_primitive_quadratic(p: u64) -> Vec<u64> {
        let reduce = |x: i64| -> u64 { x.rem_euclid(p as i64) as u64 };
        let mul = |a: (u64, u64), b: (u64, u64), c0: u64, c1: u64| -> (u64, u64) {
            // (a0 + a1 x)(b0 + b1 x) with x^2 = -c1 x - c0.
            let t2 = a.1 * b.1 % p;
            let lo = reduce((a.0 * b.0 % p) as i64 - (t2 * c0 % p) as i64);
            let hi = reduce((a.0 * b.1 + a.1 * b.0) as i64 - (t2 * c1 % p) as i64);
            (lo, hi)
        };
        for c0 in 0..p {
            'cand: for c1 in 0..p {
                // Irreducible iff no root in GF(p).
                for r in 0..p {
                    if (r * r + c1 * r + c0) % p == 0 {
                        continue 'cand;
                    }
                }
                // Multiplicative order of the class of x must be p^2 - 1.
                let target = p * p - 1;
                let mut cur = (0u64, 1u64);
                let mut order = 1u64;
                while cur != (1, 0) {
                    cur = mul(cur, (0, 1), c0, c1);
                    order += 1;
                    assert!(order <= target);
                }
                if order == target {
                    return vec![c0, c1, 1];
                }
            }
        }
        panic!("no primitive quadratic over GF({p})");
    }

    #[test]
    fn default_polynomials_match_independent_scan() {
        assert_eq!(oracle_smallest_primitive_quadratic(2), vec![1, 1, 1]);
        assert_eq!(oracle_smallest_primitive_quadratic(3), vec![2, 1, 1]);
        assert_eq!(oracle_smallest_primitive_quadratic(5), vec![2, 1, 1]);

        let t2 = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(t2.level_poly(FieldTower::MIDDLE).coeffs, vec![1, 1, 1]);
        let t3 = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(t3.level_poly(FieldTower::MIDDLE).coeffs, vec![2, 1, 1]);
        let t5 = FieldTower::new(5, 1, 2).unwrap();
        assert_eq!(t5.level_poly(FieldTower::MIDDLE).coeffs, vec![2, 1, 1]);
    }

    #[test]
    fn degenerate_tower_uses_linear_polynomials() {
        // With e = k = 1 every level below the top is GF(2) itself.
        let t = FieldTower::new(2, 1, 1).unwrap();
        assert_eq!(t.level_poly(FieldTower::GROUND).coeffs, vec![1, 1]);
        assert_eq!(t.level_poly(FieldTower::MIDDLE).coeffs, vec![1, 1]);
        assert_eq!(t.q(), 2);
        assert_eq!(t.qk(), 2);
        assert_eq!(t.size(FieldTower::TOP), 4);
    }

    #[test]
    fn level_sizes_follow_parameters() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(
            (0..4).map(|l| t.size(l)).collect::<Vec<_>>(),
            vec![3, 3, 9, 81]
        );
        let t = FieldTower::new(2, 2, 2).unwrap();
        assert_eq!(
            (0..4).map(|l| t.size(l)).collect::<Vec<_>>(),
            vec![2, 4, 16, 256]
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldTower::new(4, 1, 2).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldTower::new(1, 1, 2).unwrap_err(), Error::NotPrime(1));
        assert!(matches!(FieldTower::new(2, 0, 2).unwrap_err(), Error::BadParameter(_)));
        assert!(matches!(FieldTower::new(2, 1, 0).unwrap_err(), Error::BadParameter(_)));
        // 2^(2·13) overflows the level-size cap.
        assert!(FieldTower::new(2, 1, 13).unwrap_err().is_cap());
    }

    #[test]
    fn primitivity_reports_the_failed_check() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        // x^2 + 1 over GF(3) is irreducible but its root has order 4, not 8.
        let status = t.primitive_status(&Poly::new(0, vec![1, 0, 1])).unwrap();
        assert_eq!(status, PrimitiveStatus::WrongOrder { order: 4, expected: 8 });
        assert!(!t.is_primitive(&Poly::new(0, vec![1, 0, 1])).unwrap());

        // x^2 + 2x + 1 = (x + 1)^2 is reducible.
        let status = t.primitive_status(&Poly::new(0, vec![1, 2, 1])).unwrap();
        assert!(matches!(status, PrimitiveStatus::Reducible { .. }));

        // 2x^2 + x + 1 is not monic.
        assert_eq!(t.is_primitive(&Poly::new(0, vec![1, 1, 2])).unwrap_err(), Error::NotMonic);

        // x^2 + x + 1 over GF(2) is primitive.
        let t2 = FieldTower::new(2, 1, 2).unwrap();
        assert!(t2.is_primitive(&Poly::new(0, vec![1, 1, 1])).unwrap());
    }

    #[test]
    fn override_polynomials_are_validated() {
        // The default level-1 and level-2 choices for p = 3, restated
        // explicitly, build the identical tower.
        let t = FieldTower::with_polys(3, 1, 2, &[vec![1, 1], vec![2, 1, 1]]).unwrap();
        let auto = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(t.descriptor(), auto.descriptor());

        // A non-primitive override is rejected with the reason.
        let err = FieldTower::with_polys(3, 1, 2, &[vec![1, 1], vec![1, 0, 1]]).unwrap_err();
        match err {
            Error::NotPrimitive(msg) => assert!(msg.contains("order is 4")),
            other => panic!("unexpected error {other:?}"),
        }

        let err = FieldTower::with_polys(3, 1, 2, &[vec![1, 1], vec![1, 2, 1]]).unwrap_err();
        assert!(matches!(err, Error::NotPrimitive(_)));

        let err = FieldTower::with_polys(3, 1, 2, &[vec![2, 2]]).unwrap_err();
        assert_eq!(err, Error::NotMonic);
    }

    #[test]
    fn encode_decode_round_trip_everywhere() {
        for (p, e, k) in [(2, 1, 2), (3, 1, 2), (2, 1, 3), (2, 2, 2), (5, 1, 2)] {
            let t = FieldTower::new(p, e, k).unwrap();
            for level in 1..4 {
                for enc in 0..t.size(level) {
                    let x = t.element(level, enc).unwrap();
                    let digits = t.coeffs(x);
                    let back = t.from_coeffs(level, &digits).unwrap();
                    assert_eq!(back, x, "({p},{e},{k}) level {level} enc {enc}");
                }
            }
        }
    }

    #[test]
    fn encoding_is_out_of_range_checked() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        assert!(t.element(FieldTower::MIDDLE, 4).is_err());
        assert!(t.element(7, 0).is_err());
        assert_eq!(t.element(FieldTower::TOP, 15).unwrap().enc, 15);
    }

    #[test]
    fn field_axioms_hold_exhaustively_on_small_levels() {
        for (p, e, k) in [(2, 1, 2), (3, 1, 2)] {
            let t = FieldTower::new(p, e, k).unwrap();
            for level in 0..4 {
                let n = t.size(level);
                if n > 16 {
                    continue;
                }
                let els: Vec<_> = (0..n).map(|enc| t.element(level, enc).unwrap()).collect();
                for &a in &els {
                    assert_eq!(t.add(a, t.zero(level)), a);
                    assert_eq!(t.mul(a, t.one(level)), a);
                    assert_eq!(t.add(a, t.neg(a)), t.zero(level));
                    if a.enc != 0 {
                        let inv = t.inv(a).unwrap();
                        assert_eq!(t.mul(a, inv), t.one(level));
                    }
                    for &b in &els {
                        assert_eq!(t.add(a, b), t.add(b, a));
                        assert_eq!(t.mul(a, b), t.mul(b, a));
                        for &c in &els {
                            assert_eq!(t.add(t.add(a, b), c), t.add(a, t.add(b, c)));
                            assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
                            assert_eq!(
                                t.mul(a, t.add(b, c)),
                                t.add(t.mul(a, b), t.mul(a, c)),
                                "distributivity at level {level}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_generates_every_level() {
        for (p, e, k) in [(2, 1, 2), (3, 1, 2), (2, 2, 2)] {
            let t = FieldTower::new(p, e, k).unwrap();
            for level in 0..4 {
                let a = t.alpha(level);
                assert_eq!(t.element_order(a).unwrap(), t.size(level) - 1);
            }
        }
    }

    #[test]
    fn element_orders() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        // The primitive element of GF(4) has order 3.
        assert_eq!(t.element_order(t.alpha(FieldTower::MIDDLE)).unwrap(), 3);
        assert_eq!(t.element_order(t.one(FieldTower::MIDDLE)).unwrap(), 1);
        assert_eq!(t.element_order(t.zero(FieldTower::TOP)).unwrap_err(), Error::ZeroElement);

        // Orders divide the group order, and each divisor count matches
        // Euler's phi — checked on GF(16).
        let t = FieldTower::new(2, 1, 2).unwrap();
        let group = t.size(FieldTower::TOP) - 1;
        for enc in 1..t.size(FieldTower::TOP) {
            let ord = t.element_order(t.element(FieldTower::TOP, enc).unwrap()).unwrap();
            assert_eq!(group % ord, 0);
        }
    }

    #[test]
    fn powers_and_inverses_agree_with_tables() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        let a = t.alpha(FieldTower::MIDDLE);
        assert_eq!(t.pow(a, 8).unwrap(), t.one(FieldTower::MIDDLE));
        assert_eq!(t.pow(a, -1).unwrap(), t.inv(a).unwrap());
        assert_eq!(t.pow(a, 0).unwrap(), t.one(FieldTower::MIDDLE));
        assert_eq!(t.pow(t.zero(2), 5).unwrap(), t.zero(2));
        assert!(t.pow(t.zero(2), -2).is_err());
        // alpha^4 = 2 in GF(9) built on x^2 + x + 2.
        assert_eq!(t.pow(a, 4).unwrap().enc, 2);
    }

    #[test]
    fn companion_matrix_shape() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let p = t.middle_companion();
        assert_eq!(p.entries_raw(), vec![0, 1, 1, 1]);

        // Degree-1 companion is the 1×1 negated constant.
        let c = t.companion_matrix(&Poly::new(0, vec![1, 1])).unwrap();
        assert_eq!(c.entries_raw(), vec![1]);

        assert_eq!(
            t.companion_matrix(&Poly::new(0, vec![1, 1, 0])).unwrap_err(),
            Error::NotMonic
        );
    }

    #[test]
    fn companion_determinant_is_alpha_power() {
        // det P = α^t with t = (q^k - 1)/(q - 1), viewed inside GF(q^k).
        for (p, e, k) in [(2, 1, 2), (3, 1, 2), (2, 1, 3), (5, 1, 2)] {
            let t = FieldTower::new(p, e, k).unwrap();
            let pm = t.middle_companion();
            let det = pm.det(&t);
            let exp = (t.qk() - 1) / (t.q() - 1);
            let alpha_t = t.pow(t.alpha(FieldTower::MIDDLE), exp as i64).unwrap();
            let proj = t.subfield_project(alpha_t).expect("α^t lies in the ground field");
            assert_eq!(det, proj, "({p},{e},{k})");
        }
    }

    #[test]
    fn companion_power_order_matches_field() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let p = t.middle_companion();
        let id = Matrix::identity(FieldTower::GROUND, 2);
        let mut pow = p.clone();
        let mut order = 1;
        while pow != id {
            pow = pow.mul(&t, &p);
            order += 1;
        }
        assert_eq!(order, t.qk() - 1);
    }

    #[test]
    fn field_iso_is_a_ring_isomorphism_exhaustively() {
        for (p, e, k) in [(2, 1, 2), (3, 1, 2)] {
            let t = FieldTower::new(p, e, k).unwrap();
            let size = t.qk();
            let els: Vec<_> =
                (0..size).map(|enc| t.element(FieldTower::MIDDLE, enc).unwrap()).collect();
            let images: Vec<_> = els.iter().map(|&x| t.field_iso(x).unwrap()).collect();

            // Injective, unital, sends the primitive element to P.
            let mut distinct = images.clone();
            distinct.sort();
            distinct.dedup();
            assert_eq!(distinct.len(), els.len());
            assert_eq!(t.field_iso(t.one(FieldTower::MIDDLE)).unwrap(),
                Matrix::identity(FieldTower::GROUND, t.k()));
            assert_eq!(t.field_iso(t.alpha(FieldTower::MIDDLE)).unwrap(), t.middle_companion());

            for (i, &x) in els.iter().enumerate() {
                for (j, &y) in els.iter().enumerate() {
                    assert_eq!(
                        t.field_iso(t.add(x, y)).unwrap(),
                        images[i].add(&t, &images[j])
                    );
                    assert_eq!(
                        t.field_iso(t.mul(x, y)).unwrap(),
                        images[i].mul(&t, &images[j])
                    );
                }
            }
        }
    }

    #[test]
    fn field_iso_image_is_zero_and_companion_powers() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let mut image: Vec<_> = (0..t.qk())
            .map(|enc| t.field_iso(t.element(FieldTower::MIDDLE, enc).unwrap()).unwrap())
            .collect();
        image.sort();

        let p = t.middle_companion();
        let mut expected = vec![Matrix::zero(FieldTower::GROUND, 2, 2)];
        let mut pow = Matrix::identity(FieldTower::GROUND, 2);
        for _ in 0..t.qk() - 1 {
            expected.push(pow.clone());
            pow = pow.mul(&t, &p);
        }
        expected.sort();
        assert_eq!(image, expected);
    }

    #[test]
    fn field_iso_rejects_other_levels() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let err = t.field_iso(t.one(FieldTower::TOP)).unwrap_err();
        assert_eq!(err, Error::WrongLevel { expected: FieldTower::MIDDLE, got: FieldTower::TOP });
    }

    #[test]
    fn subfield_projection_and_lift() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        let two = t.element(FieldTower::MIDDLE, 2).unwrap();
        let lifted = t.lift(two).unwrap();
        assert_eq!(lifted.level, FieldTower::TOP);
        assert_eq!(t.subfield_project(lifted).unwrap(), two);
        // alpha of GF(9) is not in GF(3).
        assert_eq!(t.subfield_project(t.alpha(FieldTower::MIDDLE)), None);
        assert!(t.lift(t.one(FieldTower::TOP)).is_err());
    }

    #[test]
    fn descriptor_round_trip_and_shape() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let d = t.descriptor();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"p":2,"e":1,"k":2,"polys":[[1,1],[1,1,1],[2,1,1]]}"#);
        let back = FieldTower::from_descriptor(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.descriptor(), d);

        // A tampered descriptor (non-primitive polynomial) is rejected.
        let bad: TowerDescriptor =
            serde_json::from_str(r#"{"p":3,"e":1,"k":2,"polys":[[1,1],[1,0,1],[2,1,1]]}"#).unwrap();
        assert!(FieldTower::from_descriptor(&bad).is_err());
    }

    #[test]
    fn helper_number_theory() {
        assert!(is_prime(2) && is_prime(3) && is_prime(97));
        assert!(!is_prime(0) && !is_prime(1) && !is_prime(91));
        assert_eq!(factorize(624), vec![(2, 4), (3, 1), (13, 1)]);
        assert_eq!(factorize(1), vec![]);
    }
}
