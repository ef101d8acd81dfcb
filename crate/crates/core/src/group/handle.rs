use num_bigint::BigInt;
use num_traits::One;

use super::element::{ByteReader, Element};
use super::freenil::TruncatedAlgebra;
use super::spec::{GroupSpec, SymFpVariant};
use crate::error::{LabError, Result};

/// Default refusal threshold on finite group orders.
pub const DEFAULT_ORDER_CAP: u128 = 1 << 24;

/// Group-order cap, overridable through `CAYLEY_LAB_CAP`.
pub fn order_cap() -> u128 {
    std::env::var("CAYLEY_LAB_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORDER_CAP)
}

#[derive(Debug, Clone)]
enum Backend {
    Abelian {
        moduli: Vec<u64>,
    },
    Unitriangular {
        dim: usize,
        p: u64,
    },
    Lamplighter {
        lamps: u32,
    },
    SymFp {
        degree: usize,
        p: u64,
        variant: SymFpVariant,
    },
    FreeNil(TruncatedAlgebra),
    Product(Box<GroupHandle>, Box<GroupHandle>),
}

/// An immutable group with exact arithmetic.
#[derive(Debug, Clone)]
pub struct GroupHandle {
    spec: GroupSpec,
    backend: Backend,
}

impl GroupHandle {
    /// Builds a group, refusing finite families above [`order_cap`].
    pub fn build(spec: &GroupSpec) -> Result<GroupHandle> {
        Self::build_with_cap(spec, order_cap())
    }

    pub fn build_with_cap(spec: &GroupSpec, cap: u128) -> Result<GroupHandle> {
        if spec.is_finite() {
            let order = spec.order().ok_or_else(|| LabError::Refused {
                what: format!("group {spec}"),
                size: u128::MAX,
                cap,
            })?;
            if order > cap {
                return Err(LabError::Refused {
                    what: format!("group {spec}"),
                    size: order,
                    cap,
                });
            }
        }
        let backend = match spec {
            GroupSpec::Cyclic { modulus } => Backend::Abelian {
                moduli: vec![*modulus],
            },
            GroupSpec::AbelianProduct { moduli } => {
                if moduli.is_empty() {
                    return Err(LabError::Semantic(
                        "abelian needs at least one modulus".into(),
                    ));
                }
                Backend::Abelian {
                    moduli: moduli.clone(),
                }
            }
            GroupSpec::Unitriangular { dim, p } => {
                if *p > u32::MAX as u64 {
                    return Err(LabError::Unsupported("prime above 2^32".into()));
                }
                Backend::Unitriangular { dim: *dim, p: *p }
            }
            GroupSpec::Lamplighter { lamps } => Backend::Lamplighter {
                lamps: *lamps as u32,
            },
            GroupSpec::SymFp { degree, p, variant } => Backend::SymFp {
                degree: *degree,
                p: *p,
                variant: *variant,
            },
            GroupSpec::FreeNilpotent { rank, step } => {
                Backend::FreeNil(TruncatedAlgebra::new(*rank, *step))
            }
            GroupSpec::DirectProduct { left, right } => Backend::Product(
                Box::new(Self::build_with_cap(left, cap)?),
                Box::new(Self::build_with_cap(right, cap)?),
            ),
        };
        Ok(GroupHandle {
            spec: spec.clone(),
            backend,
        })
    }

    /// Parses and builds in one go.
    pub fn from_text(text: &str) -> Result<GroupHandle> {
        Self::build(&GroupSpec::parse(text)?)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> Option<u128> {
        self.spec.order()
    }

    pub fn is_finite(&self) -> bool {
        self.spec.is_finite()
    }

    pub fn identity(&self) -> Element {
        match &self.backend {
            Backend::Abelian { moduli } => Element::Residues(vec![0; moduli.len()]),
            Backend::Unitriangular { dim, .. } => {
                Element::Unitriangular(vec![0; dim * (dim - 1) / 2])
            }
            Backend::Lamplighter { .. } => Element::Lamplighter {
                position: 0,
                lamps: 0,
            },
            Backend::SymFp { degree, .. } => Element::SymFp {
                perm: (0..*degree as u8).collect(),
                vector: vec![0; *degree],
            },
            Backend::FreeNil(alg) => Element::Polynomial(alg.one()),
            Backend::Product(a, b) => Element::Pair(Box::new(a.identity()), Box::new(b.identity())),
        }
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match (&self.backend, x, y) {
            (Backend::Abelian { moduli }, Element::Residues(a), Element::Residues(b)) => {
                Element::Residues(
                    moduli
                        .iter()
                        .zip(a.iter().zip(b))
                        .map(|(&m, (&u, &v))| ((u as u128 + v as u128) % m as u128) as u64)
                        .collect(),
                )
            }
            (
                Backend::Unitriangular { dim, p },
                Element::Unitriangular(a),
                Element::Unitriangular(b),
            ) => Element::Unitriangular(ut_mul(*dim, *p, a, b)),
            (
                Backend::Lamplighter { lamps },
                Element::Lamplighter {
                    position: a,
                    lamps: f,
                },
                Element::Lamplighter {
                    position: b,
                    lamps: g,
                },
            ) => Element::Lamplighter {
                position: (a + b) % lamps,
                lamps: f ^ rotate(*g, *a, *lamps),
            },
            (
                Backend::SymFp { p, .. },
                Element::SymFp { perm: s, vector: v },
                Element::SymFp { perm: t, vector: w },
            ) => {
                // (σ; v)(τ; w) = (στ; v + σ·w), with (σ·w)_{σ(i)} = w_i.
                let perm: Vec<u8> = t.iter().map(|&i| s[i as usize]).collect();
                let mut vector = v.clone();
                for (i, wi) in w.iter().enumerate() {
                    let j = s[i] as usize;
                    vector[j] = (vector[j] + wi) % p;
                }
                Element::SymFp { perm, vector }
            }
            (Backend::FreeNil(alg), Element::Polynomial(a), Element::Polynomial(b)) => {
                Element::Polynomial(alg.mul(a, b))
            }
            (Backend::Product(ga, gb), Element::Pair(a1, b1), Element::Pair(a2, b2)) => {
                Element::Pair(Box::new(ga.mul(a1, a2)), Box::new(gb.mul(b1, b2)))
            }
            _ => panic!("element does not belong to {}", self.spec),
        }
    }

    pub fn inv(&self, x: &Element) -> Element {
        match (&self.backend, x) {
            (Backend::Abelian { moduli }, Element::Residues(a)) => Element::Residues(
                moduli
                    .iter()
                    .zip(a)
                    .map(|(&m, &u)| if u == 0 { 0 } else { m - u })
                    .collect(),
            ),
            (Backend::Unitriangular { dim, p }, Element::Unitriangular(a)) => {
                Element::Unitriangular(ut_inv(*dim, *p, a))
            }
            (Backend::Lamplighter { lamps }, Element::Lamplighter { position, lamps: f }) => {
                let back = (lamps - position % lamps) % lamps;
                Element::Lamplighter {
                    position: back,
                    lamps: rotate(*f, back, *lamps),
                }
            }
            (Backend::SymFp { p, .. }, Element::SymFp { perm, vector }) => {
                let n = perm.len();
                let mut inv = vec![0u8; n];
                for (i, &s) in perm.iter().enumerate() {
                    inv[s as usize] = i as u8;
                }
                // -σ^{-1}·v : entry at σ^{-1}(j) is -v_j.
                let mut out = vec![0u64; n];
                for (j, vj) in vector.iter().enumerate() {
                    out[inv[j] as usize] = (p - vj % p) % p;
                }
                Element::SymFp {
                    perm: inv,
                    vector: out,
                }
            }
            (Backend::FreeNil(alg), Element::Polynomial(a)) => Element::Polynomial(alg.inv(a)),
            (Backend::Product(ga, gb), Element::Pair(a, b)) => {
                Element::Pair(Box::new(ga.inv(a)), Box::new(gb.inv(b)))
            }
            _ => panic!("element does not belong to {}", self.spec),
        }
    }

    /// Equality through canonical encodings.
    pub fn eq(&self, x: &Element, y: &Element) -> bool {
        x.canonical_bytes() == y.canonical_bytes()
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        self.eq(x, &self.identity())
    }

    /// `[x, y] = x⁻¹ y⁻¹ x y`, so that `yx = xy[y, x]`.
    pub fn commutator(&self, x: &Element, y: &Element) -> Element {
        let xi = self.inv(x);
        let yi = self.inv(y);
        self.mul(&self.mul(&xi, &yi), &self.mul(x, y))
    }

    /// `x^e` for any integer exponent, by repeated squaring.
    pub fn pow(&self, x: &Element, e: i64) -> Element {
        let base = if e < 0 { self.inv(x) } else { x.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            n >>= 1;
            if n > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Product of a word of elements.
    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a Element>) -> Element {
        items
            .into_iter()
            .fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    /// Checks backend validity, including membership in the chosen variant.
    pub fn is_valid(&self, x: &Element) -> bool {
        match (&self.backend, x) {
            (Backend::Abelian { moduli }, Element::Residues(a)) => {
                a.len() == moduli.len() && a.iter().zip(moduli).all(|(u, m)| u < m)
            }
            (Backend::Unitriangular { dim, p }, Element::Unitriangular(a)) => {
                a.len() == dim * (dim - 1) / 2 && a.iter().all(|u| u < p)
            }
            (Backend::Lamplighter { lamps }, Element::Lamplighter { position, lamps: f }) => {
                position < lamps && (*lamps == 64 || f >> lamps == 0)
            }
            (Backend::SymFp { degree, p, variant }, Element::SymFp { perm, vector }) => {
                if perm.len() != *degree || vector.len() != *degree {
                    return false;
                }
                let mut seen = vec![false; *degree];
                for &s in perm {
                    if s as usize >= *degree || seen[s as usize] {
                        return false;
                    }
                    seen[s as usize] = true;
                }
                if vector.iter().any(|v| v >= p) {
                    return false;
                }
                let sum_zero = vector.iter().fold(0u64, |a, v| (a + v) % p) == 0;
                match variant {
                    SymFpVariant::L => true,
                    SymFpVariant::Gprime => sum_zero,
                    SymFpVariant::G => sum_zero && permutation_is_even(perm),
                }
            }
            (Backend::FreeNil(alg), Element::Polynomial(c)) => {
                c.len() == alg.dimension() && c[0].is_one()
            }
            (Backend::Product(ga, gb), Element::Pair(a, b)) => ga.is_valid(a) && gb.is_valid(b),
            _ => false,
        }
    }

    /// Inverse of [`Element::canonical_bytes`].
    pub fn decode(&self, bytes: &[u8]) -> Result<Element> {
        let mut reader = ByteReader::new(bytes);
        let out = self.decode_from(&mut reader)?;
        reader.finish()?;
        if !self.is_valid(&out) {
            return Err(LabError::Decode("decoded element is not valid".into()));
        }
        Ok(out)
    }

    fn decode_from(&self, r: &mut ByteReader<'_>) -> Result<Element> {
        Ok(match &self.backend {
            Backend::Abelian { moduli } => {
                Element::Residues((0..moduli.len()).map(|_| r.u64()).collect::<Result<_>>()?)
            }
            Backend::Unitriangular { dim, .. } => Element::Unitriangular(
                (0..dim * (dim - 1) / 2)
                    .map(|_| r.u64())
                    .collect::<Result<_>>()?,
            ),
            Backend::Lamplighter { .. } => Element::Lamplighter {
                position: r.u32()?,
                lamps: r.u64()?,
            },
            Backend::SymFp { degree, .. } => {
                let perm = r.take(*degree)?.to_vec();
                let vector = (0..*degree).map(|_| r.u64()).collect::<Result<_>>()?;
                Element::SymFp { perm, vector }
            }
            Backend::FreeNil(alg) => Element::Polynomial(
                (0..alg.dimension())
                    .map(|_| r.bigint())
                    .collect::<Result<_>>()?,
            ),
            Backend::Product(ga, gb) => {
                let len = r.u32()? as usize;
                let left = r.take(len)?;
                let mut inner = ByteReader::new(left);
                let a = ga.decode_from(&mut inner)?;
                inner.finish()?;
                let b = gb.decode_from(r)?;
                Element::Pair(Box::new(a), Box::new(b))
            }
        })
    }

    /// Component groups of a direct product.
    pub fn factors(&self) -> Option<(&GroupHandle, &GroupHandle)> {
        match &self.backend {
            Backend::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub(crate) fn truncated_algebra(&self) -> Option<&TruncatedAlgebra> {
        match &self.backend {
            Backend::FreeNil(alg) => Some(alg),
            _ => None,
        }
    }

    /// Constructs a free-nilpotent element from raw coefficients.
    pub fn polynomial(&self, coeffs: Vec<BigInt>) -> Result<Element> {
        let e = Element::Polynomial(coeffs);
        if self.is_valid(&e) {
            Ok(e)
        } else {
            Err(LabError::InvalidElement(
                "not a constant-term-one polynomial of the right shape".into(),
            ))
        }
    }

    /// The letter generator `1 + X_i` of a free-nilpotent group.
    pub fn free_generator(&self, letter: usize) -> Option<Element> {
        let alg = self.truncated_algebra()?;
        (letter < alg.rank()).then(|| Element::Polynomial(alg.generator(letter)))
    }
}

fn rotate(bits: u64, by: u32, width: u32) -> u64 {
    // lamp i moves to i + by (mod width)
    if width == 0 {
        return bits;
    }
    let by = by % width;
    if by == 0 {
        return bits;
    }
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    ((bits << by) | (bits >> (width - by))) & mask
}

fn ut_index(dim: usize, i: usize, j: usize) -> usize {
    // position of entry (i, j), i < j, in row-major order of the strict upper triangle
    i * (2 * dim - i - 1) / 2 + (j - i - 1)
}

fn ut_mul(dim: usize, p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len()];
    for i in 0..dim {
        for j in i + 1..dim {
            let mut acc = a[ut_index(dim, i, j)] + b[ut_index(dim, i, j)];
            for k in i + 1..j {
                acc += a[ut_index(dim, i, k)] * b[ut_index(dim, k, j)] % p;
            }
            out[ut_index(dim, i, j)] = acc % p;
        }
    }
    out
}

fn ut_inv(dim: usize, p: u64, a: &[u64]) -> Vec<u64> {
    // Solve A·B = I column by column from the diagonal outwards.
    let mut b = vec![0u64; a.len()];
    for gap in 1..dim {
        for i in 0..dim - gap {
            let j = i + gap;
            let mut acc = a[ut_index(dim, i, j)];
            for k in i + 1..j {
                acc += a[ut_index(dim, i, k)] * b[ut_index(dim, k, j)] % p;
            }
            b[ut_index(dim, i, j)] = (p - acc % p) % p;
        }
    }
    b
}

pub(crate) fn permutation_is_even(perm: &[u8]) -> bool {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut transpositions = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions.is_multiple_of(2)
}

/// Unitriangular matrix with the given strictly-upper entries, as an element.
pub fn unitriangular_element(dim: usize, entries: &[(usize, usize, u64)], p: u64) -> Element {
    let mut v = vec![0u64; dim * (dim - 1) / 2];
    for &(i, j, x) in entries {
        assert!(i < j && j < dim);
        v[ut_index(dim, i, j)] = x % p;
    }
    Element::Unitriangular(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_arithmetic() {
        let g = GroupHandle::from_text("cyclic:12").unwrap();
        let x = Element::Residues(vec![7]);
        let y = Element::Residues(vec![8]);
        assert!(g.eq(&g.mul(&x, &y), &Element::Residues(vec![3])));
        assert_eq!(g.identity().canonical_bytes(), vec![0u8; 8]);
    }

    #[test]
    fn unitriangular_inverse() {
        let g = GroupHandle::from_text("ut:dim=4,p=5").unwrap();
        let a = Element::Unitriangular(vec![1, 2, 3, 4, 0, 2]);
        assert!(g.is_identity(&g.mul(&a, &g.inv(&a))));
        assert!(g.is_identity(&g.mul(&g.inv(&a), &a)));
    }

    #[test]
    fn lamplighter_inverse() {
        let g = GroupHandle::from_text("lamplighter:5").unwrap();
        let a = Element::Lamplighter {
            position: 3,
            lamps: 0b10110,
        };
        assert!(g.is_identity(&g.mul(&a, &g.inv(&a))));
        assert!(g.is_identity(&g.mul(&g.inv(&a), &a)));
    }

    #[test]
    fn symfp_inverse_and_parity() {
        let g = GroupHandle::from_text("symfp:n=4,p=5").unwrap();
        let a = Element::SymFp {
            perm: vec![1, 2, 3, 0],
            vector: vec![1, 0, 4, 2],
        };
        assert!(g.is_identity(&g.mul(&a, &g.inv(&a))));
        assert!(!permutation_is_even(&[1, 2, 3, 0]));
        assert!(permutation_is_even(&[1, 2, 0, 3]));
    }

    #[test]
    fn refuses_above_cap() {
        let spec = GroupSpec::parse("cyclic:100").unwrap();
        assert!(matches!(
            GroupHandle::build_with_cap(&spec, 50),
            Err(LabError::Refused { .. })
        ));
        // the free nilpotent group is infinite and never refused
        let spec = GroupSpec::parse("freenil:r=2,s=3").unwrap();
        assert!(GroupHandle::build_with_cap(&spec, 1).is_ok());
    }

    #[test]
    fn lamplighter_order_formula() {
        assert_eq!(
            GroupHandle::from_text("lamplighter:3").unwrap().order(),
            Some(24)
        );
    }
}
