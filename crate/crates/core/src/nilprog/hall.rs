//! Formal commutators, the Hall basis and generalised commutators.

use std::cmp::Reverse;
use std::fmt;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::group::{Element, GroupHandle};

/// Largest list either constructor will build.
pub const LIST_CAP: usize = 10_000;

/// A formal commutator tree; bracket entries may carry an inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Commutator {
    Letter(usize),
    Bracket {
        left: Box<Commutator>,
        left_inverse: bool,
        right: Box<Commutator>,
        right_inverse: bool,
    },
}

impl Commutator {
    pub fn bracket(left: &Commutator, right: &Commutator) -> Commutator {
        Self::signed(left, false, right, false)
    }

    pub fn signed(
        left: &Commutator,
        left_inverse: bool,
        right: &Commutator,
        right_inverse: bool,
    ) -> Commutator {
        Commutator::Bracket {
            left: Box::new(left.clone()),
            left_inverse,
            right: Box::new(right.clone()),
            right_inverse,
        }
    }

    /// Letter counts `χ`.
    pub fn weight_vector(&self, rank: usize) -> Vec<u32> {
        let mut w = vec![0; rank];
        self.add_weights(&mut w);
        w
    }

    fn add_weights(&self, w: &mut [u32]) {
        match self {
            Commutator::Letter(i) => w[*i] += 1,
            Commutator::Bracket { left, right, .. } => {
                left.add_weights(w);
                right.add_weights(w);
            }
        }
    }

    pub fn total_weight(&self) -> usize {
        match self {
            Commutator::Letter(_) => 1,
            Commutator::Bracket { left, right, .. } => left.total_weight() + right.total_weight(),
        }
    }

    /// Right entry of a bracket.
    pub fn right(&self) -> Option<&Commutator> {
        match self {
            Commutator::Letter(_) => None,
            Commutator::Bracket { right, .. } => Some(right),
        }
    }

    /// True when no entry anywhere in the tree is inverted.
    pub fn is_unsigned(&self) -> bool {
        match self {
            Commutator::Letter(_) => true,
            Commutator::Bracket {
                left,
                left_inverse,
                right,
                right_inverse,
            } => !left_inverse && !right_inverse && left.is_unsigned() && right.is_unsigned(),
        }
    }

    fn tree_code(&self, out: &mut Vec<u32>) {
        match self {
            Commutator::Letter(i) => out.extend([0, *i as u32]),
            Commutator::Bracket { left, right, .. } => {
                out.push(1);
                left.tree_code(out);
                right.tree_code(out);
            }
        }
    }

    fn inner_signs(&self, out: &mut Vec<u8>) {
        if let Commutator::Bracket { left, right, .. } = self {
            left.all_signs(out);
            right.all_signs(out);
        }
    }

    fn all_signs(&self, out: &mut Vec<u8>) {
        if let Commutator::Bracket {
            left_inverse,
            right_inverse,
            ..
        } = self
        {
            self.inner_signs(out);
            out.extend([*left_inverse as u8, *right_inverse as u8]);
        }
    }

    fn top_signs(&self) -> (bool, bool) {
        match self {
            Commutator::Letter(_) => (false, false),
            Commutator::Bracket {
                left_inverse,
                right_inverse,
                ..
            } => (*left_inverse, *right_inverse),
        }
    }

    /// Sort key for `≺`: total weight, weight vector (so that `x_1` comes
    /// first), tree shape, then signs with the top-level pair last so that
    /// the four sign variants of one bracket are adjacent.
    pub fn order_key(&self, rank: usize) -> OrderKey {
        let mut tree = Vec::new();
        self.tree_code(&mut tree);
        let mut inner = Vec::new();
        self.inner_signs(&mut inner);
        OrderKey(
            self.total_weight(),
            Reverse(self.weight_vector(rank)),
            tree,
            inner,
            self.top_signs(),
        )
    }

    /// Value of the commutator on the given letter images.
    pub fn evaluate(&self, group: &GroupHandle, letters: &[Element]) -> Element {
        match self {
            Commutator::Letter(i) => letters[*i].clone(),
            Commutator::Bracket {
                left,
                left_inverse,
                right,
                right_inverse,
            } => {
                let mut a = left.evaluate(group, letters);
                if *left_inverse {
                    a = group.inv(&a);
                }
                let mut b = right.evaluate(group, letters);
                if *right_inverse {
                    b = group.inv(&b);
                }
                group.commutator(&a, &b)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrderKey(usize, Reverse<Vec<u32>>, Vec<u32>, Vec<u8>, (bool, bool));

impl fmt::Display for Commutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Commutator::Letter(i) => write!(f, "x{}", i + 1),
            Commutator::Bracket {
                left,
                left_inverse,
                right,
                right_inverse,
            } => {
                let sup = |inv: bool| if inv { "^-1" } else { "" };
                write!(
                    f,
                    "[{left}{},{right}{}]",
                    sup(*left_inverse),
                    sup(*right_inverse)
                )
            }
        }
    }
}

impl Serialize for Commutator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An ordered list of commutators with their weight vectors.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorList {
    pub rank: usize,
    pub step: usize,
    pub items: Vec<Commutator>,
    pub weights: Vec<Vec<u32>>,
}

impl CommutatorList {
    fn new(rank: usize, step: usize, items: Vec<Commutator>) -> Self {
        let weights = items.iter().map(|c| c.weight_vector(rank)).collect();
        CommutatorList {
            rank,
            step,
            items,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of entries of each total weight `1..=s`.
    pub fn weight_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.step];
        for c in &self.items {
            out[c.total_weight() - 1] += 1;
        }
        out
    }

    /// `L^χ` for every entry.
    pub fn side_lengths(&self, side: &[u64]) -> Result<Vec<u64>> {
        self.weights
            .iter()
            .map(|w| {
                w.iter().zip(side).try_fold(1u64, |acc, (&e, &l)| {
                    l.checked_pow(e)
                        .and_then(|p| acc.checked_mul(p))
                        .ok_or_else(|| LabError::Refused {
                            what: "side length L^chi".into(),
                            size: u128::MAX,
                            cap: u64::MAX as u128,
                        })
                })
            })
            .collect()
    }

    /// Evaluates every entry on the given letter images.
    pub fn evaluate(&self, group: &GroupHandle, letters: &[Element]) -> Vec<Element> {
        self.items
            .iter()
            .map(|c| c.evaluate(group, letters))
            .collect()
    }
}

fn check_args(rank: usize, step: usize) -> Result<()> {
    if rank == 0 || step == 0 {
        return Err(LabError::Semantic("rank and step must be positive".into()));
    }
    Ok(())
}

fn refuse(len: usize) -> LabError {
    LabError::Refused {
        what: "commutator list".into(),
        size: len as u128,
        cap: LIST_CAP as u128,
    }
}

/// Basic commutators of weight at most `s` in `r` letters, ordered by `≺`.
///
/// `[c_j, c_i]` is basic when `c_i ≺ c_j` and, if `c_j = [a, b]`, also `b ⪯ c_i`.
pub fn hall_basis(rank: usize, step: usize) -> Result<CommutatorList> {
    check_args(rank, step)?;
    let mut items: Vec<Commutator> = (0..rank).map(Commutator::Letter).collect();
    // index of the right entry of each item, for the Hall condition
    let mut right_index: Vec<Option<usize>> = vec![None; rank];
    let mut weight: Vec<usize> = vec![1; rank];
    for w in 2..=step {
        let mut layer: Vec<(Commutator, usize)> = Vec::new();
        for j in 0..items.len() {
            for i in 0..j {
                if weight[i] + weight[j] != w {
                    continue;
                }
                if right_index[j].is_some_and(|b| b > i) {
                    continue;
                }
                layer.push((Commutator::bracket(&items[j], &items[i]), i));
                if items.len() + layer.len() > LIST_CAP {
                    return Err(refuse(items.len() + layer.len()));
                }
            }
        }
        layer.sort_by_cached_key(|(c, _)| c.order_key(rank));
        for (c, i) in layer {
            items.push(c);
            right_index.push(Some(i));
            weight.push(w);
        }
    }
    Ok(CommutatorList::new(rank, step, items))
}

/// Generalised commutators `[α₁^{±1}, α₂^{±1}]` of weight at most `s`.
///
/// Pairs are taken with `α₂ ≺ α₁` strictly, which drops the trivial brackets
/// `[α^ε, α^δ]` and one of each mirrored pair. All four sign choices are kept.
pub fn generalised_commutators(rank: usize, step: usize) -> Result<CommutatorList> {
    check_args(rank, step)?;
    let mut items: Vec<Commutator> = (0..rank).map(Commutator::Letter).collect();
    let mut weight: Vec<usize> = vec![1; rank];
    for w in 2..=step {
        let mut layer = Vec::new();
        for a in 0..items.len() {
            for b in 0..a {
                if weight[a] + weight[b] != w {
                    continue;
                }
                for (ea, eb) in [(false, false), (false, true), (true, false), (true, true)] {
                    layer.push(Commutator::signed(&items[a], ea, &items[b], eb));
                }
                if items.len() + layer.len() > LIST_CAP {
                    return Err(refuse(items.len() + layer.len()));
                }
            }
        }
        layer.sort_by_cached_key(|c| c.order_key(rank));
        weight.extend(std::iter::repeat_n(w, layer.len()));
        items.extend(layer);
    }
    Ok(CommutatorList::new(rank, step, items))
}
