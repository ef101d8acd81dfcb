//! Extensional checks of the progression containments and power laws.

use serde::Serialize;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::progression::{
    enumerate_progression, set_product, ElementSet, ProgressionKind, ProgressionSpec,
    ENUMERATION_CAP,
};
use crate::cayley::CayleyGraph;
use crate::error::{LabError, Result};
use crate::group::{symmetrize, Element, GeneratingSet, GroupHandle};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Containment {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl Containment {
    pub fn check(lhs: &str, a: &ElementSet, rhs: &str, b: &ElementSet) -> Containment {
        let missing = a.first_missing_from(b);
        Containment {
            lhs: lhs.into(),
            rhs: rhs.into(),
            holds: missing.is_none(),
            counterexample: missing.map(|x| format!("{x:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NestingReport {
    pub kind: &'static str,
    pub r: usize,
    pub s: usize,
    #[serde(rename = "L")]
    pub side: Vec<u64>,
    pub cardinalities: Cardinalities,
    pub containments: Vec<Containment>,
    pub convention: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cardinalities {
    pub ordered: usize,
    pub nilprogression: usize,
    pub nilpotent: usize,
    pub nilcomplete: usize,
}

pub const CONVENTION: &str =
    "commutator [a,b]=a^-1 b^-1 a b; generalised pairs [a^e,b^f] with b strictly before a, all four signs";

impl NestingReport {
    pub fn holds(&self) -> bool {
        self.containments.iter().all(|c| c.holds)
    }
}

/// Checks `P_ord ⊆ P* ⊆ P ⊆ P̄` by enumerating all four sets.
pub fn verify_nesting(spec: &ProgressionSpec) -> Result<NestingReport> {
    let mut sets = Vec::new();
    for kind in [
        ProgressionKind::Ordered,
        ProgressionKind::Nilprogression,
        ProgressionKind::Nilpotent,
        ProgressionKind::Nilcomplete,
    ] {
        sets.push(enumerate_progression(&spec.with_kind(kind))?.set);
    }
    let names = ["P_ord", "P*", "P", "Pbar"];
    let containments = (0..3)
        .map(|i| Containment::check(names[i], &sets[i], names[i + 1], &sets[i + 1]))
        .collect();
    Ok(NestingReport {
        kind: "nesting",
        r: spec.rank(),
        s: spec.step,
        side: spec.side.clone(),
        cardinalities: Cardinalities {
            ordered: sets[0].len(),
            nilprogression: sets[1].len(),
            nilpotent: sets[2].len(),
            nilcomplete: sets[3].len(),
        },
        containments,
        convention: CONVENTION,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProperReport {
    pub kind: &'static str,
    pub r: usize,
    pub s: usize,
    #[serde(rename = "L")]
    pub side: Vec<u64>,
    pub cardinality: usize,
    /// `∏(2L^{χ(c_i)} + 1)`.
    pub formula: u128,
    pub proper: bool,
    pub within_ceiling: bool,
}

/// Compares `|P|` with the exponent-box size.
pub fn verify_properness(spec: &ProgressionSpec) -> Result<ProperReport> {
    let p = enumerate_progression(&spec.with_kind(ProgressionKind::Nilpotent))?;
    let formula = p.box_size.unwrap();
    Ok(ProperReport {
        kind: "properness",
        r: spec.rank(),
        s: spec.step,
        side: spec.side.clone(),
        cardinality: p.len(),
        formula,
        proper: p.len() as u128 == formula,
        within_ceiling: p.len() as u128 <= formula,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerReport {
    pub kind: &'static str,
    pub r: usize,
    pub s: usize,
    #[serde(rename = "L")]
    pub side: Vec<u64>,
    pub n: u64,
    pub m_scale: u64,
    pub cardinalities: Vec<(String, usize)>,
    /// `P̄(L)^j ⊆ P̄(jL)` for `j = 2..=n`.
    pub containments: Vec<Containment>,
    /// Least `m` with `P̄(nL) ⊆ P̄(L)^m`, if found within the budget.
    pub minimal_power_m: Option<usize>,
    /// Greedy `X` with `P̄(ML) ⊆ P̄(L)·X`.
    pub cover_size: usize,
    pub cover_verified: bool,
}

impl PowerReport {
    pub fn holds(&self) -> bool {
        self.containments.iter().all(|c| c.holds) && self.cover_verified
    }
}

fn scaled(side: &[u64], n: u64) -> Vec<u64> {
    side.iter().map(|l| l * n).collect()
}

/// Breadth-first powers `B, B^2, ...` of a set containing the identity.
struct PowerLayers<'a> {
    group: &'a GroupHandle,
    base: &'a ElementSet,
    depth: FxHashMap<Vec<u8>, usize>,
    sphere: Vec<Element>,
    radius: usize,
}

impl<'a> PowerLayers<'a> {
    fn new(group: &'a GroupHandle, base: &'a ElementSet) -> Self {
        let depth = base.keys().iter().map(|k| (k.clone(), 1)).collect();
        PowerLayers {
            group,
            base,
            depth,
            sphere: base.elements().to_vec(),
            radius: 1,
        }
    }

    fn grow(&mut self) -> Result<()> {
        let work = self.sphere.len() as u128 * self.base.len() as u128;
        if work > ENUMERATION_CAP {
            return Err(LabError::Refused {
                what: "power layer".into(),
                size: work,
                cap: ENUMERATION_CAP,
            });
        }
        let (group, base, depth) = (self.group, self.base, &self.depth);
        let mut fresh: Vec<(Vec<u8>, Element)> = self
            .sphere
            .par_iter()
            .flat_map_iter(|x| {
                base.elements().iter().filter_map(move |p| {
                    let z = group.mul(x, p);
                    let key = z.canonical_bytes();
                    (!depth.contains_key(&key)).then_some((key, z))
                })
            })
            .collect();
        fresh.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        fresh.dedup_by(|a, b| a.0 == b.0);
        self.radius += 1;
        self.sphere.clear();
        for (key, z) in fresh {
            self.depth.insert(key, self.radius);
            self.sphere.push(z);
        }
        Ok(())
    }

    fn grow_to(&mut self, radius: usize) -> Result<()> {
        while self.radius < radius && !self.sphere.is_empty() {
            self.grow()?;
        }
        Ok(())
    }

    fn depth_of(&self, key: &[u8]) -> Option<usize> {
        self.depth.get(key).copied()
    }

    /// `B^j` as an explicit set.
    fn power(&self, j: usize) -> Result<ElementSet> {
        let mut out = Vec::new();
        for (key, &d) in &self.depth {
            if d <= j {
                out.push(self.group.decode(key)?);
            }
        }
        Ok(ElementSet::from_elements(out))
    }
}

/// Powers of a nilcomplete progression against rescaled progressions.
pub fn verify_power_laws(
    spec: &ProgressionSpec,
    n: u64,
    m_scale: u64,
    max_power: usize,
) -> Result<PowerReport> {
    let group = &spec.group;
    let spec = spec.with_kind(ProgressionKind::Nilcomplete);
    let base = enumerate_progression(&spec)?.set;
    let mut layers = PowerLayers::new(group, &base);
    let mut cardinalities = vec![("Pbar(L)".to_string(), base.len())];
    let mut containments = Vec::new();
    for j in 2..=n.max(1) {
        layers.grow_to(j as usize)?;
        let power = layers.power(j as usize)?;
        let target = enumerate_progression(&spec.with_side(&scaled(&spec.side, j)))?.set;
        cardinalities.push((format!("Pbar(L)^{j}"), power.len()));
        cardinalities.push((format!("Pbar({j}L)"), target.len()));
        containments.push(Containment::check(
            &format!("Pbar(L)^{j}"),
            &power,
            &format!("Pbar({j}L)"),
            &target,
        ));
    }

    // part (1): smallest m with P̄(nL) ⊆ P̄(L)^m
    let big = enumerate_progression(&spec.with_side(&scaled(&spec.side, n)))?.set;
    let mut minimal_power_m = Some(1);
    for key in big.keys() {
        loop {
            if let Some(d) = layers.depth_of(key) {
                minimal_power_m = minimal_power_m.map(|m: usize| m.max(d));
                break;
            }
            if layers.radius >= max_power || layers.sphere.is_empty() {
                minimal_power_m = None;
                break;
            }
            layers.grow()?;
        }
        if minimal_power_m.is_none() {
            break;
        }
    }

    // part (3): greedy right translates covering P̄(ML)
    let target = enumerate_progression(&spec.with_side(&scaled(&spec.side, m_scale)))?.set;
    let mut covered = vec![false; target.len()];
    let mut chosen: Vec<Element> = Vec::new();
    for (i, y) in target.elements().iter().enumerate() {
        if covered[i] {
            continue;
        }
        chosen.push(y.clone());
        for p in base.elements() {
            let z = group.mul(p, y);
            if let Ok(j) = target.keys().binary_search(&z.canonical_bytes()) {
                covered[j] = true;
            }
        }
    }
    let x_set = ElementSet::from_elements(chosen);
    let product = set_product(group, &base, &x_set)?;
    let cover_verified = target.is_subset(&product);
    cardinalities.push((format!("Pbar({m_scale}L)"), target.len()));
    Ok(PowerReport {
        kind: "powers",
        r: spec.rank(),
        s: spec.step,
        side: spec.side.clone(),
        n,
        m_scale,
        cardinalities,
        containments,
        minimal_power_m,
        cover_size: x_set.len(),
        cover_verified,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorDepth {
    pub group: String,
    pub progression_size: usize,
    pub derived_order: usize,
    pub nilpotency_class: usize,
    /// Least `m` with `[G,G] ⊆ P^m`.
    pub m: usize,
    /// `diam_P(G)`.
    pub gamma: usize,
    pub ratio: f64,
}

/// Subgroup generated by `gens`, closed under conjugation by `conj`.
fn normal_closure(group: &GroupHandle, gens: &[Element], conj: &[Element]) -> Result<ElementSet> {
    let mut current: Vec<Element> = gens
        .iter()
        .filter(|g| !group.is_identity(g))
        .cloned()
        .collect();
    loop {
        let subgroup = generated(group, &current)?;
        let mut extra = Vec::new();
        for h in &current {
            for c in conj {
                let z = group.mul(&group.mul(&group.inv(c), h), c);
                if !subgroup.contains(&z) {
                    extra.push(z);
                }
            }
        }
        if extra.is_empty() {
            return Ok(subgroup);
        }
        current.extend(ElementSet::from_elements(extra).elements().iter().cloned());
    }
}

fn generated(group: &GroupHandle, gens: &[Element]) -> Result<ElementSet> {
    if gens.is_empty() {
        return Ok(ElementSet::from_elements(vec![group.identity()]));
    }
    let s = symmetrize(group, gens)?;
    let cap = crate::group::order_cap().min(usize::MAX as u128) as usize;
    let g = CayleyGraph::generated(group, &s, cap)?;
    Ok(ElementSet::from_elements(g.elements().to_vec()))
}

/// Measures how deep the derived subgroup sits in the powers of a
/// generating progression of a finite nilpotent group.
pub fn commutator_depth(group: &GroupHandle, progression: &ElementSet) -> Result<CommutatorDepth> {
    let order = group
        .order()
        .ok_or_else(|| LabError::Unsupported("commutator depth needs a finite group".into()))?;
    let p_gens: GeneratingSet = symmetrize(group, progression.elements())?;
    let graph = CayleyGraph::build(group, &p_gens)?;
    let elems = p_gens.elements();

    // lower central series, terminating within log2|G| + 1 steps when nilpotent
    let bound = (128 - order.leading_zeros()) as usize + 1;
    let mut term = graph.elements().to_vec();
    let mut class = 0;
    let mut derived = None;
    loop {
        if term.len() == 1 {
            break;
        }
        if class > bound {
            return Err(LabError::NotNilpotent(bound));
        }
        let gens_of_term: Vec<Element> = if class == 0 {
            elems.to_vec()
        } else {
            term.clone()
        };
        let mut comms = Vec::new();
        for a in &gens_of_term {
            for b in elems {
                comms.push(group.commutator(a, b));
            }
        }
        let comms = ElementSet::from_elements(comms);
        let next = normal_closure(group, comms.elements(), elems)?;
        if next.len() == term.len() {
            return Err(LabError::NotNilpotent(class + 1));
        }
        class += 1;
        term = next.elements().to_vec();
        if derived.is_none() {
            derived = Some(next);
        }
    }
    let derived = derived.unwrap_or_else(|| ElementSet::from_elements(vec![group.identity()]));
    let depths = graph.depths();
    let m = derived
        .elements()
        .iter()
        .map(|x| depths[graph.index_of(x).unwrap()] as usize)
        .max()
        .unwrap_or(0);
    let gamma = graph.diameter();
    Ok(CommutatorDepth {
        group: group.spec().to_string(),
        progression_size: progression.len(),
        derived_order: derived.len(),
        nilpotency_class: class,
        m,
        gamma,
        ratio: if gamma == 0 {
            0.0
        } else {
            m as f64 / (gamma as f64).sqrt()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::unitriangular_element;

    #[test]
    fn nesting_two_two() {
        let spec = ProgressionSpec::free(ProgressionKind::Ordered, 2, 2, &[1, 1]).unwrap();
        let rep = verify_nesting(&spec).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.cardinalities.ordered, 9);
        assert_eq!(rep.cardinalities.nilpotent, 27);
    }

    #[test]
    fn properness_fails_in_small_quotient() {
        let g = GroupHandle::from_text("ut:dim=3,p=3").unwrap();
        let x = unitriangular_element(3, &[(0, 1, 1)], 3);
        let y = unitriangular_element(3, &[(1, 2, 1)], 3);
        let spec =
            ProgressionSpec::new(ProgressionKind::Nilpotent, g, vec![x, y], &[2, 2], 2).unwrap();
        let rep = verify_properness(&spec).unwrap();
        assert!(!rep.proper);
        assert!(rep.within_ceiling);
        assert_eq!(rep.formula, 225);
    }

    #[test]
    fn power_law_degenerate_n_one() {
        let spec = ProgressionSpec::free(ProgressionKind::Nilcomplete, 2, 2, &[1, 1]).unwrap();
        let rep = verify_power_laws(&spec, 1, 1, 4).unwrap();
        assert!(rep.containments.is_empty());
        assert_eq!(rep.minimal_power_m, Some(1));
        assert_eq!(rep.cover_size, 1);
        assert!(rep.cover_verified);
    }

    #[test]
    fn abelian_depth_is_zero() {
        let g = GroupHandle::from_text("abelian:4,6").unwrap();
        let p = ElementSet::from_elements(vec![
            Element::Residues(vec![1, 0]),
            Element::Residues(vec![0, 1]),
        ]);
        let d = commutator_depth(&g, &p).unwrap();
        assert_eq!((d.m, d.derived_order, d.nilpotency_class), (0, 1, 1));
    }

    #[test]
    fn heisenberg_depth_centre() {
        let g = GroupHandle::from_text("heis:5").unwrap();
        let x = unitriangular_element(3, &[(0, 1, 1)], 5);
        let y = unitriangular_element(3, &[(1, 2, 1)], 5);
        let spec = ProgressionSpec::new(
            ProgressionKind::Nilprogression,
            g.clone(),
            vec![x, y],
            &[1, 1],
            2,
        )
        .unwrap();
        let p = enumerate_progression(&spec).unwrap();
        let d = commutator_depth(&g, &p.set).unwrap();
        assert_eq!(d.derived_order, 5);
        assert_eq!(d.nilpotency_class, 2);
        assert!(d.m >= 1);
    }
}
