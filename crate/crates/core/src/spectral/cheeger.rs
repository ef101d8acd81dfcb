//! Cheeger constant: exact subset scan for small graphs, certified interval otherwise.

use serde::Serialize;

use super::{lambda1, Laplacian, SpectralReport};
use crate::cayley::CayleyGraph;
use crate::error::{LabError, Result};

pub const DEFAULT_EXACT_CAP: usize = 22;
/// Hard ceiling for the exhaustive scan (`2^(n−1)` subsets).
pub const EXACT_CEILING: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheegerMode {
    Exact,
    Bounded,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheegerReport {
    pub mode: CheegerMode,
    /// Exact value, or the certified interval `[lower, upper]`.
    pub lower: f64,
    pub upper: f64,
    /// Vertex indices of the best set found, with `|A| ≤ |G|/2`.
    pub witness: Vec<usize>,
    pub witness_boundary: u64,
    /// Exact ratio `|∂A| / |A|` of the witness as a fraction.
    pub witness_ratio: (u64, u64),
    /// Ratio of the best Fiedler sweep cut (bounded mode).
    pub sweep_ratio: Option<f64>,
    /// Geodesic-flow lower bound `⌈n/2⌉ / max_s load(s)` (bounded mode).
    pub flow_lower: Option<f64>,
}

impl CheegerReport {
    pub fn value(&self) -> Option<f64> {
        (self.mode == CheegerMode::Exact).then_some(self.lower)
    }
}

/// `|∂A| = #{(x, s) : x ∈ A, sx ∉ A}`.
pub fn boundary(lap: &Laplacian, members: &[bool]) -> u64 {
    (0..lap.order())
        .filter(|&x| members[x])
        .map(|x| {
            lap.neighbors(x)
                .iter()
                .filter(|&&y| !members[y as usize])
                .count() as u64
        })
        .sum()
}

/// Change of `|∂A|` when `v` enters (`adding`) or leaves `A`; `members` is the state before.
fn boundary_delta(lap: &Laplacian, members: &[bool], v: usize) -> i64 {
    let mut inside = 0i64;
    let mut outside = 0i64;
    for &y in lap.neighbors(v) {
        let y = y as usize;
        if y == v {
            continue;
        }
        if members[y] {
            inside += 1;
        } else {
            outside += 1;
        }
    }
    if members[v] {
        inside - outside
    } else {
        outside - inside
    }
}

fn better(b: u64, m: u64, best: (u64, u64)) -> bool {
    (b as u128) * (best.1 as u128) < (best.0 as u128) * (m as u128)
}

/// Exact `h` by Gray-code enumeration of the subsets avoiding the last vertex.
pub fn cheeger_exact(lap: &Laplacian) -> Result<CheegerReport> {
    let n = lap.order();
    if n < 2 {
        return Err(LabError::Semantic(
            "Cheeger constant of the trivial group is undefined".into(),
        ));
    }
    if n > EXACT_CEILING {
        return Err(LabError::Refused {
            what: "exact Cheeger scan".into(),
            size: n as u128,
            cap: EXACT_CEILING as u128,
        });
    }
    let free = n - 1;
    let mut members = vec![false; n];
    let mut size = 0u64;
    let mut bnd = 0i64;
    let mut best = (u64::MAX, 1u64);
    let mut best_mask = 0u64;
    let mut mask = 0u64;
    for step in 1u64..(1u64 << free) {
        let v = step.trailing_zeros() as usize;
        bnd += boundary_delta(lap, &members, v);
        if members[v] {
            size -= 1;
        } else {
            size += 1;
        }
        members[v] = !members[v];
        mask ^= 1 << v;
        let denom = size.min(n as u64 - size);
        if better(bnd as u64, denom, best) {
            best = (bnd as u64, denom);
            best_mask = mask;
        }
    }
    let mut witness: Vec<usize> = (0..free).filter(|&i| best_mask >> i & 1 == 1).collect();
    if 2 * witness.len() > n {
        witness = (0..n).filter(|&i| best_mask >> i & 1 == 0).collect();
    }
    let h = best.0 as f64 / best.1 as f64;
    Ok(CheegerReport {
        mode: CheegerMode::Exact,
        lower: h,
        upper: h,
        witness_ratio: (best.0, witness.len() as u64),
        witness_boundary: best.0,
        witness,
        sweep_ratio: None,
        flow_lower: None,
    })
}

/// Best prefix cut of the vertices ordered by `values`, ties broken by vertex index.
///
/// Vertex indices follow canonical-byte order within each BFS sphere, so the
/// tie-break is canonical.
pub fn sweep_cut(lap: &Laplacian, values: &[f64]) -> (Vec<usize>, u64, u64) {
    let n = lap.order();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut members = vec![false; n];
    let mut bnd = 0i64;
    let mut best = (u64::MAX, 1u64);
    let mut best_len = 0;
    for (i, &v) in order.iter().enumerate().take(n - 1) {
        bnd += boundary_delta(lap, &members, v);
        members[v] = true;
        let size = i as u64 + 1;
        let denom = size.min(n as u64 - size);
        if better(bnd as u64, denom, best) {
            best = (bnd as u64, denom);
            best_len = i + 1;
        }
    }
    let witness: Vec<usize> = if 2 * best_len <= n {
        order[..best_len].to_vec()
    } else {
        order[best_len..].to_vec()
    };
    let mut witness = witness;
    witness.sort_unstable();
    (witness, best.0, best.1)
}

/// Largest number of geodesic routes through a single edge `(z, s)` when every
/// ordered pair `(x, gx)` follows the BFS-tree word of `g` from vertex 0.
///
/// By right translation the load of `(z, s)` only depends on `s`: it is the
/// number of occurrences of `s` in all the tree words. Every set `A` with
/// `|A| ≤ n/2` has `|A|·|Aᶜ|` routes leaving it, each through `∂A`, so
/// `h ≥ ⌈n/2⌉ / max_load`.
pub fn geodesic_flow_load(lap: &Laplacian) -> u64 {
    let n = lap.order();
    let k = lap.degree();
    let mut parent = vec![u32::MAX; n];
    let mut label = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    parent[0] = 0;
    order.push(0usize);
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for (j, &y) in lap.neighbors(x).iter().enumerate() {
            let y = y as usize;
            if parent[y] == u32::MAX {
                parent[y] = x as u32;
                label[y] = j;
                order.push(y);
            }
        }
    }
    let mut subtree = vec![1u64; n];
    let mut load = vec![0u64; k];
    for &v in order.iter().skip(1).rev() {
        load[label[v]] += subtree[v];
        subtree[parent[v] as usize] += subtree[v];
    }
    load.into_iter().max().unwrap_or(0)
}

/// Interval `[max(λ₁/2, flow), min(sweep, √(2kλ₁))]` from a spectral report.
///
/// `λ₁ ≤ 2h` comes from the indicator test function, `h²/(2k) ≤ λ₁` is the
/// Cheeger inequality for the unnormalized Laplacian, the flow bound is from
/// [`geodesic_flow_load`] and the sweep ratio is attained by its witness.
pub fn cheeger_bounded(lap: &Laplacian, spec: &SpectralReport) -> CheegerReport {
    let n = lap.order();
    let k = lap.degree() as f64;
    let load = geodesic_flow_load(lap);
    let flow = n.div_ceil(2) as f64 / load.max(1) as f64;
    let (witness, b, m) = sweep_cut(lap, &spec.fiedler);
    let sweep = b as f64 / m as f64;
    CheegerReport {
        mode: CheegerMode::Bounded,
        lower: (spec.lambda1 / 2.0).max(flow),
        upper: sweep.min((2.0 * k * spec.lambda1).sqrt()),
        witness_ratio: (b, witness.len() as u64),
        witness_boundary: b,
        witness,
        sweep_ratio: Some(sweep),
        flow_lower: Some(flow),
    }
}

/// Exact scan when `|G| ≤ exact_cap`, certified interval otherwise.
pub fn cheeger(graph: &CayleyGraph, exact_cap: usize) -> Result<CheegerReport> {
    let lap = Laplacian::of(graph);
    if graph.order() <= exact_cap.min(EXACT_CEILING) {
        cheeger_exact(&lap)
    } else {
        let spec = lambda1(graph, 1e-10)?;
        Ok(cheeger_bounded(&lap, &spec))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::cycle;
    use super::*;

    #[test]
    fn cycles_exact() {
        for (n, want) in [(8u64, 0.5), (12, 1.0 / 3.0), (16, 0.25)] {
            let r = cheeger(&cycle(n), DEFAULT_EXACT_CAP).unwrap();
            assert_eq!(r.mode, CheegerMode::Exact);
            assert_eq!(r.lower, want);
            assert_eq!(r.witness.len() as u64, n / 2);
            assert_eq!(r.witness_boundary, 2);
        }
    }

    #[test]
    fn witness_is_an_arc() {
        let g = cycle(8);
        let r = cheeger(&g, 22).unwrap();
        let lap = Laplacian::of(&g);
        let mut m = vec![false; 8];
        r.witness.iter().for_each(|&i| m[i] = true);
        assert_eq!(boundary(&lap, &m), 2);
    }

    #[test]
    fn bounded_interval_contains_exact() {
        for n in [10u64, 14, 20] {
            let g = cycle(n);
            let exact = cheeger(&g, 22).unwrap().lower;
            let b = cheeger(&g, 0).unwrap();
            assert_eq!(b.mode, CheegerMode::Bounded);
            assert!(
                b.lower <= exact + 1e-12 && exact <= b.upper + 1e-12,
                "{n}: {b:?} {exact}"
            );
            assert_eq!(b.sweep_ratio, Some(exact));
        }
    }

    #[test]
    fn flow_bound_on_cycles() {
        for m in [4u64, 6, 8] {
            let lap = Laplacian::of(&cycle(2 * m));
            assert_eq!(geodesic_flow_load(&lap), m * (m + 1) / 2);
        }
    }

    #[test]
    fn boundary_symmetric_under_complement() {
        let g = cycle(9);
        let lap = Laplacian::of(&g);
        let m: Vec<bool> = (0..9).map(|i| i % 3 == 0).collect();
        let c: Vec<bool> = m.iter().map(|b| !b).collect();
        assert_eq!(boundary(&lap, &m), boundary(&lap, &c));
    }
}
