use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::element::Element;
use super::handle::GroupHandle;
use crate::error::{LabError, Result};

/// A symmetric generating set containing the identity, sorted by canonical bytes.
#[derive(Clone)]
pub struct GeneratingSet {
    elements: Vec<Element>,
    identity_index: usize,
}

impl GeneratingSet {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// `k = |S|`, identity included.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains_identity(&self) -> bool {
        true
    }

    pub fn identity_index(&self) -> usize {
        self.identity_index
    }

    /// Index of `s⁻¹` for every `s`, in element order.
    pub fn inverse_indices(&self, group: &GroupHandle) -> Vec<usize> {
        let keys: BTreeMap<Vec<u8>, usize> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.canonical_bytes(), i))
            .collect();
        self.elements
            .iter()
            .map(|e| keys[&group.inv(e).canonical_bytes()])
            .collect()
    }

    /// The same set with the identity removed (used for the self-loop check).
    pub fn without_identity(&self) -> Vec<Element> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.identity_index)
            .map(|(_, e)| e.clone())
            .collect()
    }

    /// `S₁ × S₂` inside a direct product.
    pub fn product(
        group: &GroupHandle,
        left: &GeneratingSet,
        right: &GeneratingSet,
    ) -> Result<Self> {
        let mut raw = Vec::with_capacity(left.len() * right.len());
        for a in left.elements() {
            for b in right.elements() {
                raw.push(Element::Pair(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
        symmetrize(group, &raw)
    }
}

impl fmt::Debug for GeneratingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.elements).finish()
    }
}

/// Returns `raw ∪ raw⁻¹ ∪ {e}`, deduplicated by canonical bytes.
pub fn symmetrize(group: &GroupHandle, raw: &[Element]) -> Result<GeneratingSet> {
    if raw.is_empty() {
        return Err(LabError::InvalidElement("empty generator list".into()));
    }
    let mut by_key: BTreeMap<Vec<u8>, Element> = BTreeMap::new();
    for g in raw {
        if !group.is_valid(g) {
            return Err(LabError::InvalidElement(format!(
                "{g:?} is not an element of {}",
                group.spec()
            )));
        }
        let inv = group.inv(g);
        by_key.insert(g.canonical_bytes(), g.clone());
        by_key.insert(inv.canonical_bytes(), inv);
    }
    let id = group.identity();
    let id_key = id.canonical_bytes();
    by_key.insert(id_key.clone(), id);
    let identity_index = by_key.keys().position(|k| *k == id_key).unwrap();
    Ok(GeneratingSet {
        elements: by_key.into_values().collect(),
        identity_index,
    })
}

type Membership = dyn Fn(&Element) -> bool + Send + Sync;

/// A subgroup given by a membership predicate.
#[derive(Clone)]
pub struct SubgroupOracle {
    name: String,
    membership: Arc<Membership>,
    index_hint: Option<u64>,
}

impl SubgroupOracle {
    pub fn new(
        name: impl Into<String>,
        index_hint: Option<u64>,
        membership: impl Fn(&Element) -> bool + Send + Sync + 'static,
    ) -> Self {
        SubgroupOracle {
            name: name.into(),
            membership: Arc::new(membership),
            index_hint,
        }
    }

    /// The whole group.
    pub fn whole() -> Self {
        Self::new("whole group", Some(1), |_| true)
    }

    /// The trivial subgroup of `group`.
    pub fn trivial(group: &GroupHandle) -> Self {
        let id = group.identity().canonical_bytes();
        Self::new("trivial subgroup", None, move |x| x.canonical_bytes() == id)
    }

    /// Explicit subgroup given by its element list.
    pub fn from_elements(name: impl Into<String>, elements: &[Element]) -> Self {
        let keys: std::collections::HashSet<Vec<u8>> =
            elements.iter().map(|e| e.canonical_bytes()).collect();
        Self::new(name, None, move |x| keys.contains(&x.canonical_bytes()))
    }

    pub fn contains(&self, x: &Element) -> bool {
        (self.membership)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index_hint(&self) -> Option<u64> {
        self.index_hint
    }

    /// Checks identity membership and closure under product and inverse on
    /// every pair drawn from `sample` that lies in the subgroup.
    pub fn check_consistency(&self, group: &GroupHandle, sample: &[Element]) -> Result<()> {
        if !self.contains(&group.identity()) {
            return Err(LabError::OracleInconsistent(format!(
                "{} does not contain the identity",
                self.name
            )));
        }
        let members: Vec<&Element> = sample.iter().filter(|x| self.contains(x)).collect();
        for a in &members {
            if !self.contains(&group.inv(a)) {
                return Err(LabError::OracleInconsistent(format!(
                    "{} not closed under inverse at {a:?}",
                    self.name
                )));
            }
        }
        for a in members.iter().take(64) {
            for b in members.iter().take(64) {
                if !self.contains(&group.mul(a, b)) {
                    return Err(LabError::OracleInconsistent(format!(
                        "{} not closed under product at {a:?}·{b:?}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SubgroupOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubgroupOracle({})", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_cyclic() {
        let g = GroupHandle::from_text("cyclic:12").unwrap();
        let s = symmetrize(&g, &[Element::Residues(vec![1])]).unwrap();
        assert_eq!(s.len(), 3);
        let keys: Vec<Vec<u8>> = s.elements().iter().map(|e| e.canonical_bytes()).collect();
        assert!(keys.contains(&Element::Residues(vec![0]).canonical_bytes()));
        assert!(keys.contains(&Element::Residues(vec![11]).canonical_bytes()));
    }

    #[test]
    fn symmetrize_is_idempotent() {
        let g = GroupHandle::from_text("heis:5").unwrap();
        let x = crate::group::unitriangular_element(3, &[(0, 1, 1)], 5);
        let once = symmetrize(&g, &[x]).unwrap();
        let twice = symmetrize(&g, once.elements()).unwrap();
        let a: Vec<_> = once
            .elements()
            .iter()
            .map(|e| e.canonical_bytes())
            .collect();
        let b: Vec<_> = twice
            .elements()
            .iter()
            .map(|e| e.canonical_bytes())
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_foreign_elements() {
        let g = GroupHandle::from_text("cyclic:12").unwrap();
        assert!(symmetrize(&g, &[Element::Residues(vec![12])]).is_err());
        assert!(symmetrize(&g, &[]).is_err());
    }
}
