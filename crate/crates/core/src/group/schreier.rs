use super::element::Element;
use super::genset::{symmetrize, GeneratingSet, SubgroupOracle};
use super::handle::GroupHandle;
use crate::error::{LabError, Result};

/// Output of [`reidemeister_schreier`].
#[derive(Debug, Clone)]
pub struct SchreierData {
    /// Symmetric generating set of the subgroup, identity included.
    pub generators: GeneratingSet,
    /// Right-coset representatives in discovery order; `transversal[0]` is the identity.
    pub transversal: Vec<Element>,
    /// Word length of each representative (its BFS depth in the coset graph).
    pub transversal_depth: Vec<usize>,
    /// Index of the subgroup.
    pub index: usize,
}

/// Schreier generators `t s τ(ts)⁻¹` for a finite-index subgroup.
///
/// Cosets `H t` are explored breadth first by right multiplication with the
/// generators in canonical order, so `T ⊂ S^{d-1}` and the output is
/// deterministic.
pub fn reidemeister_schreier(
    group: &GroupHandle,
    gens: &GeneratingSet,
    sub: &SubgroupOracle,
) -> Result<SchreierData> {
    let coset_of = |x: &Element, reps: &[Element]| -> Option<usize> {
        reps.iter()
            .position(|t| sub.contains(&group.mul(x, &group.inv(t))))
    };

    let mut reps = vec![group.identity()];
    let mut depth = vec![0usize];
    let mut head = 0;
    let limit = sub.index_hint().map(|d| d as usize).unwrap_or(usize::MAX);
    while head < reps.len() {
        let t = reps[head].clone();
        for s in gens.elements() {
            let ts = group.mul(&t, s);
            if coset_of(&ts, &reps).is_none() {
                reps.push(ts);
                depth.push(depth[head] + 1);
                if reps.len() > limit {
                    return Err(LabError::OracleInconsistent(format!(
                        "{} has more than {limit} cosets",
                        sub.name()
                    )));
                }
            }
        }
        head += 1;
    }
    let index = reps.len();
    if let Some(hint) = sub.index_hint() {
        if hint as usize != index {
            return Err(LabError::NotGenerating {
                reached: index as u128,
                order: hint as u128,
            });
        }
    }

    let mut raw = Vec::with_capacity(index * gens.len());
    for t in &reps {
        for s in gens.elements() {
            let ts = group.mul(t, s);
            let j = coset_of(&ts, &reps).expect("coset graph is closed");
            let g = group.mul(&ts, &group.inv(&reps[j]));
            if !sub.contains(&g) {
                return Err(LabError::OracleInconsistent(format!(
                    "Schreier generator {g:?} rejected by {}",
                    sub.name()
                )));
            }
            raw.push(g);
        }
    }
    let mut sample = raw.clone();
    sample.extend(reps.iter().cloned());
    sub.check_consistency(group, &sample)?;
    Ok(SchreierData {
        generators: symmetrize(group, &raw)?,
        transversal: reps,
        transversal_depth: depth,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residue(x: u64) -> Element {
        Element::Residues(vec![x])
    }

    #[test]
    fn cyclic_index_three() {
        let g = GroupHandle::from_text("cyclic:12").unwrap();
        let s = symmetrize(&g, &[residue(1)]).unwrap();
        let h = SubgroupOracle::new("3Z/12", Some(3), |x| match x {
            Element::Residues(v) => v[0] % 3 == 0,
            _ => false,
        });
        let rs = reidemeister_schreier(&g, &s, &h).unwrap();
        assert_eq!(rs.index, 3);
        assert!(rs.transversal_depth.iter().all(|&d| d <= 2));
        let allowed: Vec<Vec<u8>> = [0, 3, 9]
            .iter()
            .map(|&x| residue(x).canonical_bytes())
            .collect();
        for e in rs.generators.elements() {
            assert!(allowed.contains(&e.canonical_bytes()), "{e:?}");
        }
    }

    #[test]
    fn whole_group_is_trivial_case() {
        let g = GroupHandle::from_text("cyclic:12").unwrap();
        let s = symmetrize(&g, &[residue(1)]).unwrap();
        let rs = reidemeister_schreier(&g, &s, &SubgroupOracle::whole()).unwrap();
        assert_eq!(rs.index, 1);
        assert_eq!(rs.transversal.len(), 1);
        let a: Vec<_> = rs
            .generators
            .elements()
            .iter()
            .map(|e| e.canonical_bytes())
            .collect();
        let b: Vec<_> = s.elements().iter().map(|e| e.canonical_bytes()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn inconsistent_oracle_is_rejected() {
        let g = GroupHandle::from_text("cyclic:12").unwrap();
        let s = symmetrize(&g, &[residue(1)]).unwrap();
        // {0, 1, 11} is not a subgroup
        let bad = SubgroupOracle::new("not closed", None, |x| match x {
            Element::Residues(v) => matches!(v[0], 0 | 1 | 11),
            _ => false,
        });
        assert!(reidemeister_schreier(&g, &s, &bad).is_err());
    }
}
