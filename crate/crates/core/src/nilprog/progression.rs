//! Enumeration of ordered progressions, nilprogressions, nilpotent
//! progressions and nilcomplete progressions as explicit element sets.

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::hall::{generalised_commutators, hall_basis, CommutatorList};
use crate::error::{LabError, Result};
use crate::group::{Element, GroupHandle};

/// Work budget: exponent tuples, words, or pairwise products in one stage.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProgressionKind {
    Ordered,
    Nilprogression,
    Nilpotent,
    Nilcomplete,
}

impl ProgressionKind {
    pub fn name(self) -> &'static str {
        match self {
            ProgressionKind::Ordered => "ordered",
            ProgressionKind::Nilprogression => "nilprogression",
            ProgressionKind::Nilpotent => "nilpotent",
            ProgressionKind::Nilcomplete => "nilcomplete",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProgressionSpec {
    pub kind: ProgressionKind,
    pub group: GroupHandle,
    pub generators: Vec<Element>,
    pub side: Vec<u64>,
    /// Nilpotency step used for the commutator lists.
    pub step: usize,
}

impl ProgressionSpec {
    /// A progression on the letter generators of `freenil:r,s`.
    pub fn free(kind: ProgressionKind, rank: usize, step: usize, side: &[u64]) -> Result<Self> {
        let group = GroupHandle::from_text(&format!("freenil:r={rank},s={step}"))?;
        let generators = (0..rank)
            .map(|i| group.free_generator(i).unwrap())
            .collect();
        Self::new(kind, group, generators, side, step)
    }

    pub fn new(
        kind: ProgressionKind,
        group: GroupHandle,
        generators: Vec<Element>,
        side: &[u64],
        step: usize,
    ) -> Result<Self> {
        if generators.len() != side.len() {
            return Err(LabError::Semantic(format!(
                "{} generators but {} side lengths",
                generators.len(),
                side.len()
            )));
        }
        if generators.is_empty() || step == 0 {
            return Err(LabError::Semantic("need rank and step at least 1".into()));
        }
        Ok(ProgressionSpec {
            kind,
            group,
            generators,
            side: side.to_vec(),
            step,
        })
    }

    pub fn with_kind(&self, kind: ProgressionKind) -> Self {
        ProgressionSpec {
            kind,
            ..self.clone()
        }
    }

    pub fn with_side(&self, side: &[u64]) -> Self {
        ProgressionSpec {
            side: side.to_vec(),
            ..self.clone()
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// A deduplicated set of elements, sorted by canonical bytes.
#[derive(Debug, Clone)]
pub struct ElementSet {
    keys: Vec<Vec<u8>>,
    elements: Vec<Element>,
    index: FxHashMap<Vec<u8>, usize>,
}

impl ElementSet {
    pub fn from_elements(items: Vec<Element>) -> Self {
        let mut pairs: Vec<(Vec<u8>, Element)> = items
            .into_iter()
            .map(|e| (e.canonical_bytes(), e))
            .collect();
        pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        Self::from_sorted(pairs)
    }

    fn from_sorted(pairs: Vec<(Vec<u8>, Element)>) -> Self {
        let (keys, elements): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let index = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        ElementSet {
            keys,
            elements,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.index.contains_key(&x.canonical_bytes())
    }

    pub fn contains_key(&self, key: &[u8]) -> bool {
        self.index.contains_key(key)
    }

    pub fn keys(&self) -> &[Vec<u8>] {
        &self.keys
    }

    /// First element of `self` missing from `other`, in canonical order.
    pub fn first_missing_from(&self, other: &ElementSet) -> Option<&Element> {
        self.keys
            .iter()
            .position(|k| !other.contains_key(k))
            .map(|i| &self.elements[i])
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.first_missing_from(other).is_none()
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys
    }
}

/// `{ab : a ∈ A, b ∈ B}`, refusing when `|A||B|` exceeds the work cap.
pub fn set_product(group: &GroupHandle, a: &ElementSet, b: &ElementSet) -> Result<ElementSet> {
    let work = a.len() as u128 * b.len() as u128;
    if work > ENUMERATION_CAP {
        return Err(LabError::Refused {
            what: "set product".into(),
            size: work,
            cap: ENUMERATION_CAP,
        });
    }
    let mut seen: FxHashMap<Vec<u8>, Element> = FxHashMap::default();
    let chunk = (1 << 16) / b.len().max(1) + 1;
    for block in a.elements().chunks(chunk) {
        let mut pairs: Vec<(Vec<u8>, Element)> = block
            .par_iter()
            .flat_map_iter(|x| {
                b.elements().iter().map(move |y| {
                    let z = group.mul(x, y);
                    (z.canonical_bytes(), z)
                })
            })
            .collect();
        pairs.par_sort_unstable_by(|p, q| p.0.cmp(&q.0));
        pairs.dedup_by(|p, q| p.0 == q.0);
        for (k, z) in pairs {
            seen.entry(k).or_insert(z);
        }
    }
    let mut pairs: Vec<(Vec<u8>, Element)> = seen.into_iter().collect();
    pairs.par_sort_unstable_by(|p, q| p.0.cmp(&q.0));
    Ok(ElementSet::from_sorted(pairs))
}

/// `{x^l : |l| ≤ m}`.
pub fn power_range(group: &GroupHandle, x: &Element, m: u64) -> ElementSet {
    let mut out = vec![group.identity()];
    let xi = group.inv(x);
    let (mut up, mut down) = (group.identity(), group.identity());
    for _ in 0..m {
        up = group.mul(&up, x);
        down = group.mul(&down, &xi);
        out.push(up.clone());
        out.push(down.clone());
    }
    ElementSet::from_elements(out)
}

/// `P_ord(y_1, ..., y_t; M) = {y_1^{l_1} ... y_t^{l_t} : |l_i| ≤ M_i}`.
pub fn ordered_product(group: &GroupHandle, ys: &[Element], ranges: &[u64]) -> Result<ElementSet> {
    let mut acc = ElementSet::from_elements(vec![group.identity()]);
    for (y, &m) in ys.iter().zip(ranges) {
        if m == 0 {
            continue;
        }
        acc = set_product(group, &acc, &power_range(group, y, m))?;
    }
    Ok(acc)
}

/// Product of the box sizes `∏(2M_i + 1)`, saturating.
pub fn box_size(ranges: &[u64]) -> u128 {
    ranges
        .iter()
        .fold(1u128, |acc, &m| acc.saturating_mul(2 * m as u128 + 1))
}

#[derive(Debug, Clone)]
pub struct ProgressionSet {
    pub kind: ProgressionKind,
    pub set: ElementSet,
    /// Exponent-box size for the kinds defined by one.
    pub box_size: Option<u128>,
    /// Properness, for the nilpotent kind.
    pub proper: Option<bool>,
}

impl ProgressionSet {
    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

/// Checks that all left-normed commutators of weight `s + 1` in the generators vanish.
pub fn check_step(group: &GroupHandle, gens: &[Element], step: usize) -> Result<()> {
    let mut layer: Vec<Element> = gens.to_vec();
    for _ in 0..step {
        let mut next = FxHashMap::default();
        for c in &layer {
            for g in gens {
                let z = group.commutator(c, g);
                next.entry(z.canonical_bytes()).or_insert(z);
            }
        }
        let mut v: Vec<(Vec<u8>, Element)> = next.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        layer = v.into_iter().map(|p| p.1).collect();
    }
    if layer.iter().all(|c| group.is_identity(c)) {
        Ok(())
    } else {
        Err(LabError::NotNilpotent(step))
    }
}

pub fn commutator_list(kind: ProgressionKind, rank: usize, step: usize) -> Result<CommutatorList> {
    match kind {
        ProgressionKind::Nilcomplete => generalised_commutators(rank, step),
        _ => hall_basis(rank, step),
    }
}

/// Exact element set of the progression.
pub fn enumerate_progression(spec: &ProgressionSpec) -> Result<ProgressionSet> {
    let group = &spec.group;
    check_step(group, &spec.generators, spec.step)?;
    match spec.kind {
        ProgressionKind::Ordered => {
            let b = box_size(&spec.side);
            refuse_box(b)?;
            Ok(ProgressionSet {
                kind: spec.kind,
                set: ordered_product(group, &spec.generators, &spec.side)?,
                box_size: Some(b),
                proper: None,
            })
        }
        ProgressionKind::Nilpotent => {
            let list = hall_basis(spec.rank(), spec.step)?;
            let ranges = list.side_lengths(&spec.side)?;
            let b = box_size(&ranges);
            refuse_box(b)?;
            let ys = list.evaluate(group, &spec.generators);
            let set = ordered_product(group, &ys, &ranges)?;
            Ok(ProgressionSet {
                kind: spec.kind,
                proper: Some(set.len() as u128 == b),
                set,
                box_size: Some(b),
            })
        }
        ProgressionKind::Nilcomplete => {
            // The box itself is far too large (3^38 for rank 2, step 3); the
            // set is built factor by factor, each stage under the work cap.
            let list = generalised_commutators(spec.rank(), spec.step)?;
            let ranges = list.side_lengths(&spec.side)?;
            let ys = list.evaluate(group, &spec.generators);
            Ok(ProgressionSet {
                kind: spec.kind,
                set: ordered_product(group, &ys, &ranges)?,
                box_size: Some(box_size(&ranges)),
                proper: None,
            })
        }
        ProgressionKind::Nilprogression => Ok(ProgressionSet {
            kind: spec.kind,
            set: nilprogression(group, &spec.generators, &spec.side)?,
            box_size: None,
            proper: None,
        }),
    }
}

fn refuse_box(b: u128) -> Result<()> {
    if b > ENUMERATION_CAP {
        return Err(LabError::Refused {
            what: "exponent box".into(),
            size: b,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Words in `x_i^{±1}` using each letter (with its inverse) at most `L_i` times.
///
/// Breadth-first over states `(element, usage vector)`; two words reaching the
/// same state have identical continuations, so states are deduplicated.
fn nilprogression(group: &GroupHandle, gens: &[Element], side: &[u64]) -> Result<ElementSet> {
    let inverses: Vec<Element> = gens.iter().map(|g| group.inv(g)).collect();
    let mut seen: FxHashSet<(Vec<u8>, Vec<u64>)> = FxHashSet::default();
    let id = group.identity();
    let start = (id.canonical_bytes(), vec![0u64; gens.len()]);
    seen.insert(start.clone());
    let mut frontier = vec![(id.clone(), start.1)];
    let mut out = vec![id];
    while !frontier.is_empty() {
        let mut next: Vec<((Vec<u8>, Vec<u64>), Element)> = frontier
            .par_iter()
            .flat_map_iter(|(x, used)| {
                let mut v = Vec::new();
                for i in 0..gens.len() {
                    if used[i] >= side[i] {
                        continue;
                    }
                    let mut u = used.clone();
                    u[i] += 1;
                    for y in [&gens[i], &inverses[i]] {
                        let z = group.mul(x, y);
                        v.push(((z.canonical_bytes(), u.clone()), z));
                    }
                }
                v
            })
            .collect();
        next.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        next.dedup_by(|a, b| a.0 == b.0);
        frontier.clear();
        for (state, z) in next {
            if seen.insert(state.clone()) {
                frontier.push((z.clone(), state.1));
                out.push(z);
            }
        }
        if seen.len() as u128 > ENUMERATION_CAP {
            return Err(LabError::Refused {
                what: "nilprogression word states".into(),
                size: seen.len() as u128,
                cap: ENUMERATION_CAP,
            });
        }
    }
    Ok(ElementSet::from_elements(out))
}
