//! Ball enumeration and Cayley graphs with explicit neighbour tables.
//!
//! Edges go `x -> s·x`. Every BFS layer is expanded in parallel, then sorted
//! by canonical bytes and deduplicated, so vertex numbering (and everything
//! computed from it) does not depend on the number of worker threads.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{LabError, Result};
use crate::group::{Element, GeneratingSet, GroupHandle};

/// Frontiers smaller than this are expanded on the calling thread.
const PAR_THRESHOLD: usize = 512;

/// Runs `f` on a dedicated pool with `workers` threads (0 = rayon default).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

/// Elements of `S^R` in BFS order, spheres sorted by canonical bytes.
#[derive(Debug, Clone)]
pub struct Ball {
    elements: Vec<Element>,
    keys: FxHashMap<Vec<u8>, u32>,
    sphere_sizes: Vec<usize>,
    saturated: bool,
    truncated: bool,
}

impl Ball {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sphere_sizes(&self) -> &[usize] {
        &self.sphere_sizes
    }

    /// Largest radius enumerated.
    pub fn radius(&self) -> usize {
        self.sphere_sizes.len() - 1
    }

    /// True when the last layer added nothing: the ball is the generated subgroup.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// True when enumeration stopped on the element cap.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn index_of(&self, x: &Element) -> Option<usize> {
        self.keys.get(&x.canonical_bytes()).map(|&i| i as usize)
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.keys.contains_key(&x.canonical_bytes())
    }

    /// `|S^n|`; past saturation the size stays constant.
    pub fn ball_size(&self, n: usize) -> Option<usize> {
        if n <= self.radius() {
            Some(self.sphere_sizes[..=n].iter().sum())
        } else if self.saturated {
            Some(self.elements.len())
        } else {
            None
        }
    }

    /// Indices of `S^n` (a prefix of the BFS order).
    pub fn prefix(&self, n: usize) -> &[Element] {
        let m = self.ball_size(n).unwrap_or(self.elements.len());
        &self.elements[..m]
    }

    /// BFS depth of the element at index `i`.
    pub fn depth_of_index(&self, i: usize) -> usize {
        let mut acc = 0;
        for (r, &sz) in self.sphere_sizes.iter().enumerate() {
            acc += sz;
            if i < acc {
                return r;
            }
        }
        panic!("index {i} outside the ball")
    }
}

/// Enumerates `S^R` for `R = max_radius` (or until saturation when `None`).
///
/// Stops early, flagging `truncated`, once the ball would exceed `element_cap`.
pub fn enumerate_ball(
    group: &GroupHandle,
    gens: &GeneratingSet,
    max_radius: Option<usize>,
    element_cap: usize,
) -> Ball {
    let id = group.identity();
    let mut keys = FxHashMap::default();
    keys.insert(id.canonical_bytes(), 0u32);
    let mut elements = vec![id];
    let mut sphere_sizes = vec![1usize];
    let mut saturated = false;
    let mut truncated = false;
    let mut start = 0;
    loop {
        if max_radius.is_some_and(|r| sphere_sizes.len() > r) {
            break;
        }
        let frontier = &elements[start..];
        let expand = |x: &Element| -> Vec<(Vec<u8>, Element)> {
            gens.elements()
                .iter()
                .filter_map(|s| {
                    let y = group.mul(s, x);
                    let k = y.canonical_bytes();
                    (!keys.contains_key(&k)).then_some((k, y))
                })
                .collect()
        };
        let mut fresh: Vec<(Vec<u8>, Element)> = if frontier.len() >= PAR_THRESHOLD {
            frontier.par_iter().flat_map_iter(expand).collect()
        } else {
            frontier.iter().flat_map(expand).collect()
        };
        if fresh.len() >= PAR_THRESHOLD {
            fresh.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        } else {
            fresh.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        }
        fresh.dedup_by(|a, b| a.0 == b.0);
        if fresh.is_empty() {
            saturated = true;
            break;
        }
        if elements.len() + fresh.len() > element_cap {
            truncated = true;
            break;
        }
        start = elements.len();
        sphere_sizes.push(fresh.len());
        for (k, y) in fresh {
            keys.insert(k, elements.len() as u32);
            elements.push(y);
        }
    }
    Ball {
        elements,
        keys,
        sphere_sizes,
        saturated,
        truncated,
    }
}

/// Cayley graph of the subgroup generated by `S`, with `nb[x][j] = s_j·x`.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    group: GroupHandle,
    gens: GeneratingSet,
    ball: Ball,
    neighbors: Vec<u32>,
}

impl CayleyGraph {
    /// Cayley graph of the whole (finite) group; fails if `S` does not generate it.
    pub fn build(group: &GroupHandle, gens: &GeneratingSet) -> Result<CayleyGraph> {
        let order = group.order().ok_or_else(|| {
            LabError::Unsupported(format!("{} is infinite; no Cayley graph", group.spec()))
        })?;
        let cap = crate::group::order_cap();
        if order > cap {
            return Err(LabError::Refused {
                what: format!("Cayley graph of {}", group.spec()),
                size: order,
                cap,
            });
        }
        let graph = Self::generated(group, gens, order as usize)?;
        if graph.order() as u128 != order {
            return Err(LabError::NotGenerating {
                reached: graph.order() as u128,
                order,
            });
        }
        Ok(graph)
    }

    /// Cayley graph of `<S>`, refusing if it has more than `cap` elements.
    pub fn generated(group: &GroupHandle, gens: &GeneratingSet, cap: usize) -> Result<CayleyGraph> {
        let ball = enumerate_ball(group, gens, None, cap);
        if ball.truncated() {
            return Err(LabError::Refused {
                what: "subgroup enumeration".into(),
                size: (cap as u128) + 1,
                cap: cap as u128,
            });
        }
        let k = gens.len();
        let rows: Vec<Vec<u32>> = ball
            .elements()
            .par_iter()
            .map(|x| {
                gens.elements()
                    .iter()
                    .map(|s| ball.index_of(&group.mul(s, x)).expect("ball is closed") as u32)
                    .collect()
            })
            .collect();
        let mut neighbors = Vec::with_capacity(rows.len() * k);
        for r in rows {
            neighbors.extend(r);
        }
        Ok(CayleyGraph {
            group: group.clone(),
            gens: gens.clone(),
            ball,
            neighbors,
        })
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.ball.len()
    }

    /// `k = |S|`, self-loop included.
    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    pub fn elements(&self) -> &[Element] {
        self.ball.elements()
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.ball.elements()[i]
    }

    pub fn index_of(&self, x: &Element) -> Option<usize> {
        self.ball.index_of(x)
    }

    /// `[s_0·x, s_1·x, ...]` as vertex indices.
    pub fn neighbors(&self, x: usize) -> &[u32] {
        let k = self.degree();
        &self.neighbors[x * k..(x + 1) * k]
    }

    pub fn neighbor_table(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn diameter(&self) -> usize {
        self.ball.radius()
    }

    /// `|S^n|` for the identity-centred ball.
    pub fn ball_size(&self, n: usize) -> usize {
        self.ball.ball_size(n).unwrap()
    }

    /// Word length `|x|_S` of every vertex.
    pub fn depths(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.order());
        for (r, &sz) in self.ball.sphere_sizes().iter().enumerate() {
            out.extend(std::iter::repeat_n(r as u32, sz));
        }
        out
    }

    /// Graph distances from `source`.
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let n = self.order();
        let mut dist = vec![u32::MAX; n];
        dist[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbors(x) {
                let y = y as usize;
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }
}
