//! Laplacian spectral gap, Cheeger constant and the expansion inequalities.

mod checks;
mod cheeger;
mod solver;

pub use checks::*;
pub use cheeger::*;
pub use solver::*;

use serde::Serialize;

use crate::cayley::CayleyGraph;
use crate::error::{LabError, Result};

/// Largest order handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;

/// `Δf(x) = Σ_s (f(x) − f(sx))` on a neighbour table.
#[derive(Debug, Clone)]
pub struct Laplacian {
    n: usize,
    k: usize,
    table: Vec<u32>,
}

impl Laplacian {
    pub fn new(n: usize, k: usize, table: Vec<u32>) -> Result<Self> {
        if table.len() != n * k || table.iter().any(|&y| y as usize >= n) {
            return Err(LabError::Semantic("malformed neighbour table".into()));
        }
        Ok(Laplacian { n, k, table })
    }

    pub fn of(graph: &CayleyGraph) -> Self {
        Laplacian {
            n: graph.order(),
            k: graph.degree(),
            table: graph.neighbor_table().to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.table[x * self.k..(x + 1) * self.k]
    }

    /// The same operator with every self-loop column removed.
    pub fn without_self_loops(&self) -> Self {
        let mut keep = vec![true; self.k];
        for (j, flag) in keep.iter_mut().enumerate() {
            *flag = (0..self.n).any(|x| self.neighbors(x)[j] as usize != x);
        }
        let k = keep.iter().filter(|&&b| b).count();
        let mut table = Vec::with_capacity(self.n * k);
        for x in 0..self.n {
            for (j, &y) in self.neighbors(x).iter().enumerate() {
                if keep[j] {
                    table.push(y);
                }
            }
        }
        Laplacian {
            n: self.n,
            k,
            table,
        }
    }

    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        let k = self.k as f64;
        for (x, o) in out.iter_mut().enumerate() {
            let mut acc = k * f[x];
            for &y in self.neighbors(x) {
                acc -= f[y as usize];
            }
            *o = acc;
        }
    }

    /// `⟨f, Δf⟩ = ½ Σ_{x,s} (f(x) − f(sx))²`.
    pub fn energy(&self, f: &[f64]) -> f64 {
        let terms: Vec<f64> = (0..self.n)
            .map(|x| {
                let row: Vec<f64> = self
                    .neighbors(x)
                    .iter()
                    .map(|&y| (f[x] - f[y as usize]).powi(2))
                    .collect();
                pairwise_sum(&row)
            })
            .collect();
        0.5 * pairwise_sum(&terms)
    }

    pub fn dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::<f64>::zeros(self.n, self.n);
        for x in 0..self.n {
            m[(x, x)] += self.k as f64;
            for &y in self.neighbors(x) {
                m[(x, y as usize)] -= 1.0;
            }
        }
        m
    }
}

/// Pairwise (tree) summation in a fixed order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        v.iter().sum()
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&prods)
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub order: usize,
    pub k: usize,
    pub lambda1: f64,
    pub lambda_max: f64,
    /// `1 − λ₁/k`.
    #[serde(rename = "beta_S")]
    pub beta: f64,
    /// `1 − λ_max/k ≥ −(1 − λ₁/k)`, i.e. `β_S` is the second-largest
    /// absolute eigenvalue of the walk operator.
    pub beta_valid: bool,
    pub solver: Solver,
    /// `‖Δv − λ₁v‖₂ / ‖v‖₂` for the returned eigenvector.
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub fiedler: Vec<f64>,
}

impl SpectralReport {
    /// `T_rel = 1/(1 − β_S) = k/λ₁`.
    pub fn relaxation_time(&self) -> f64 {
        self.k as f64 / self.lambda1
    }
}

/// Smallest nonzero Laplacian eigenvalue with its eigenvector, and the largest eigenvalue.
pub fn lambda1(graph: &CayleyGraph, tol: f64) -> Result<SpectralReport> {
    lambda1_with(&Laplacian::of(graph), tol, SolverChoice::Auto)
}

pub fn lambda1_with(lap: &Laplacian, tol: f64, choice: SolverChoice) -> Result<SpectralReport> {
    let n = lap.order();
    if n < 2 {
        return Err(LabError::Semantic(
            "spectral gap of the trivial group is undefined".into(),
        ));
    }
    let dense = match choice {
        SolverChoice::Auto => n <= DENSE_LIMIT,
        SolverChoice::Dense => true,
        SolverChoice::Iterative => false,
    };
    if dense && n > DENSE_LIMIT {
        return Err(LabError::Refused {
            what: "dense eigensolve".into(),
            size: n as u128,
            cap: DENSE_LIMIT as u128,
        });
    }
    let ext = if dense {
        dense_extremes(lap)?
    } else {
        lanczos_extremes(lap, tol)?
    };
    let k = lap.degree() as f64;
    let (l1, lmax) = (ext.lambda1, ext.lambda_max);
    if l1 <= tol.max(1e-9) {
        return Err(LabError::Semantic(format!(
            "second eigenvalue {l1:e} vanishes: the graph is disconnected"
        )));
    }
    let beta = 1.0 - l1 / k;
    Ok(SpectralReport {
        order: n,
        k: lap.degree(),
        lambda1: l1,
        lambda_max: lmax,
        beta,
        beta_valid: 1.0 - lmax / k >= -beta,
        solver: if dense {
            Solver::Dense
        } else {
            Solver::Iterative
        },
        residual: residual(lap, l1, &ext.vector),
        tolerance: tol,
        fiedler: ext.vector,
    })
}

/// `‖Δv − λv‖₂ / ‖v‖₂`.
pub fn residual(lap: &Laplacian, lambda: f64, v: &[f64]) -> f64 {
    let mut w = vec![0.0; v.len()];
    lap.apply(v, &mut w);
    let r: Vec<f64> = w.iter().zip(v).map(|(a, b)| a - lambda * b).collect();
    norm2(&r) / norm2(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{symmetrize, Element, GroupHandle};

    pub(crate) fn cycle(n: u64) -> CayleyGraph {
        let g = GroupHandle::from_text(&format!("cyclic:{n}")).unwrap();
        let s = symmetrize(&g, &[Element::Residues(vec![1])]).unwrap();
        CayleyGraph::build(&g, &s).unwrap()
    }

    #[test]
    fn cycle_gaps_both_solvers() {
        for n in [8u64, 12, 16] {
            let want = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
            let lap = Laplacian::of(&cycle(n));
            for choice in [SolverChoice::Dense, SolverChoice::Iterative] {
                let r = lambda1_with(&lap, 1e-10, choice).unwrap();
                assert!(
                    (r.lambda1 - want).abs() < 1e-9,
                    "{n} {choice:?} {}",
                    r.lambda1
                );
                assert!(r.residual < 1e-8);
            }
        }
    }

    #[test]
    fn complete_generating_set() {
        let g = GroupHandle::from_text("cyclic:5").unwrap();
        let all: Vec<Element> = (0..5).map(|i| Element::Residues(vec![i])).collect();
        let s = symmetrize(&g, &all).unwrap();
        let r = lambda1(&CayleyGraph::build(&g, &s).unwrap(), 1e-10).unwrap();
        assert!((r.lambda1 - 5.0).abs() < 1e-9);
        assert!((r.lambda_max - 5.0).abs() < 1e-9);
    }

    #[test]
    fn self_loops_do_not_move_the_gap() {
        let lap = Laplacian::of(&cycle(12));
        let bare = lap.without_self_loops();
        assert_eq!(bare.degree(), 2);
        let a = lambda1_with(&lap, 1e-12, SolverChoice::Dense)
            .unwrap()
            .lambda1;
        let b = lambda1_with(&bare, 1e-12, SolverChoice::Dense)
            .unwrap()
            .lambda1;
        assert!((a - b).abs() < 1e-10);
        assert!((a - (2.0 - 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn energy_matches_quadratic_form() {
        let lap = Laplacian::of(&cycle(7));
        let f: Vec<f64> = (0..7).map(|i| (i * i) as f64 - 3.0).collect();
        let mut w = vec![0.0; 7];
        lap.apply(&f, &mut w);
        assert!((lap.energy(&f) - dot(&f, &w)).abs() < 1e-9);
    }
}
