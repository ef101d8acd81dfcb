//! The expansion inequalities, the distance-function probe and the
//! coset-constrained gap.

use serde::Serialize;

use super::{
    cheeger, dot, lambda1, pairwise_sum, CheegerReport, Laplacian, SpectralReport, DENSE_LIMIT,
};
use crate::cayley::CayleyGraph;
use crate::error::{LabError, Result};
use crate::group::SubgroupOracle;
use crate::report::finite_or_string;

pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Violated,
    Indeterminate,
}

/// One inequality `lhs ≤ rhs`; either side may be an interval when it depends on `h`.
#[derive(Debug, Clone, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub status: Status,
}

impl Inequality {
    pub fn new(name: &str, lhs: (f64, f64), rhs: (f64, f64)) -> Self {
        let status = if lhs.1 <= rhs.0 + SLACK {
            Status::Holds
        } else if lhs.0 > rhs.1 + SLACK {
            Status::Violated
        } else {
            Status::Indeterminate
        };
        Inequality {
            name: name.into(),
            lhs,
            rhs,
            status,
        }
    }

    pub fn point(name: &str, lhs: f64, rhs: f64) -> Self {
        Self::new(name, (lhs, lhs), (rhs, rhs))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralChain {
    pub group: String,
    pub order: usize,
    pub k: usize,
    pub gamma: usize,
    pub spectrum: SpectralReport,
    pub h: CheegerReport,
    pub inequalities: Vec<Inequality>,
    /// `λ₁γ²/k`.
    pub strong_buser_ratio: f64,
    /// `log γ / log(|G|/k)`.
    #[serde(serialize_with = "finite_or_string")]
    pub eps_star: f64,
}

impl SpectralChain {
    pub fn violations(&self) -> Vec<&Inequality> {
        self.inequalities
            .iter()
            .filter(|i| i.status == Status::Violated)
            .collect()
    }

    pub fn all_hold(&self) -> bool {
        self.inequalities.iter().all(|i| i.status == Status::Holds)
    }
}

/// Evaluates the diameter/expansion/gap chain with `h` exact or bracketed.
pub fn verify_spectral_inequalities(
    graph: &CayleyGraph,
    exact_cap: usize,
) -> Result<SpectralChain> {
    let spectrum = lambda1(graph, 1e-10)?;
    let h = if graph.order() <= exact_cap {
        cheeger(graph, exact_cap)?
    } else {
        super::cheeger_bounded(&Laplacian::of(graph), &spectrum)
    };
    Ok(chain_from(graph, spectrum, h))
}

pub fn chain_from(
    graph: &CayleyGraph,
    spectrum: SpectralReport,
    h: CheegerReport,
) -> SpectralChain {
    let n = graph.order() as f64;
    let k = graph.degree() as f64;
    let gamma = graph.diameter();
    let g = gamma as f64;
    let l1 = spectrum.lambda1;
    let hi = (h.lower, h.upper);
    let sq = (hi.0 * hi.0 / 2.0, hi.1 * hi.1 / 2.0);
    let log_n = n.ln();
    let inequalities = vec![
        Inequality::new(
            "diameter lower bound on h^2/2",
            (1.0 / (8.0 * g * g), 1.0 / (8.0 * g * g)),
            sq,
        ),
        Inequality::new("cheeger: h^2/2 <= lambda1", sq, (l1, l1)),
        Inequality::new(
            "buser: lambda1 <= 2kh",
            (l1, l1),
            (2.0 * k * hi.0, 2.0 * k * hi.1),
        ),
        Inequality::new(
            "diameter upper bound on 2kh",
            (2.0 * k * hi.0, 2.0 * k * hi.1),
            (8.0 * k * k * log_n / g, 8.0 * k * k * log_n / g),
        ),
        Inequality::new(
            "expansion upper: h <= 4k log|G|/gamma",
            hi,
            (4.0 * k * log_n / g, 4.0 * k * log_n / g),
        ),
        Inequality::new(
            "expansion lower: 1/(2 gamma) <= h",
            (1.0 / (2.0 * g), 1.0 / (2.0 * g)),
            hi,
        ),
    ];
    let base = n / k;
    let eps_star = if base <= 1.0 {
        f64::INFINITY
    } else {
        g.ln() / base.ln()
    };
    SpectralChain {
        group: graph.group().spec().to_string(),
        order: graph.order(),
        k: graph.degree(),
        gamma,
        strong_buser_ratio: l1 * g * g / k,
        eps_star,
        spectrum,
        h,
        inequalities,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RayleighProbe {
    pub gamma: usize,
    /// Index of the far endpoint `b` with `d(e, b) = γ`.
    pub far_vertex: usize,
    pub quotient: f64,
    pub lambda1: f64,
    /// `9k|G| / (γ²|S^{⌊γ/3⌋}|)`.
    pub bound: f64,
    pub ball_radius: usize,
    pub ball_size: usize,
    /// `|Σf|` before mean subtraction.
    pub raw_mean: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub skipped: Option<String>,
}

impl RayleighProbe {
    pub fn holds(&self) -> bool {
        self.skipped.is_some() || (self.lower_holds && self.upper_holds)
    }
}

/// Rayleigh quotient of `f = d(·, e) − d(·, b)` with `b` at maximal distance.
pub fn rayleigh_probe(graph: &CayleyGraph) -> Result<RayleighProbe> {
    let gamma = graph.diameter();
    let n = graph.order();
    let spectrum = if n >= 2 {
        Some(lambda1(graph, 1e-10)?)
    } else {
        None
    };
    let l1 = spectrum.as_ref().map_or(0.0, |s| s.lambda1);
    let mut out = RayleighProbe {
        gamma,
        far_vertex: 0,
        quotient: f64::NAN,
        lambda1: l1,
        bound: f64::NAN,
        ball_radius: gamma / 3,
        ball_size: graph.ball_size(gamma / 3),
        raw_mean: 0.0,
        lower_holds: false,
        upper_holds: false,
        skipped: None,
    };
    if gamma < 3 {
        out.skipped = Some(format!("diameter {gamma} < 3: probe degenerate"));
        return Ok(out);
    }
    let depths = graph.depths();
    let b = depths.iter().position(|&d| d as usize == gamma).unwrap();
    let from_b = graph.distances_from(b);
    let mut f: Vec<f64> = depths
        .iter()
        .zip(&from_b)
        .map(|(&da, &db)| da as f64 - db as f64)
        .collect();
    let mean = pairwise_sum(&f) / n as f64;
    f.iter_mut().for_each(|x| *x -= mean);
    let lap = Laplacian::of(graph);
    let r = lap.energy(&f) / dot(&f, &f);
    let k = graph.degree() as f64;
    let g = gamma as f64;
    let bound = 9.0 * k * n as f64 / (g * g * out.ball_size as f64);
    out.far_vertex = b;
    out.raw_mean = mean.abs();
    out.quotient = r;
    out.bound = bound;
    out.lower_holds = l1 <= r + SLACK;
    out.upper_holds = r <= bound + SLACK;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CosetGap {
    pub subgroup: String,
    pub subgroup_order: usize,
    pub index: usize,
    /// Largest word length of an element of `H`.
    pub gamma_h: usize,
    /// Least Rayleigh quotient over functions with zero mean on every coset `gH`.
    #[serde(serialize_with = "finite_or_string")]
    pub gap: f64,
    /// `1/γ_H²`.
    #[serde(serialize_with = "finite_or_string")]
    pub bound: f64,
    pub degenerate: bool,
    pub holds: bool,
}

/// Gap of the Laplacian compressed to functions averaging to zero on each coset of `H`.
pub fn coset_gap(graph: &CayleyGraph, sub: &SubgroupOracle) -> Result<CosetGap> {
    let n = graph.order();
    if n > DENSE_LIMIT {
        return Err(LabError::Refused {
            what: "coset-constrained dense eigensolve".into(),
            size: n as u128,
            cap: DENSE_LIMIT as u128,
        });
    }
    let group = graph.group();
    let members: Vec<usize> = (0..n).filter(|&i| sub.contains(graph.element(i))).collect();
    let h_elems: Vec<_> = members.iter().map(|&i| graph.element(i).clone()).collect();
    sub.check_consistency(group, &h_elems)?;
    for &i in &members {
        let h = graph.element(i);
        for s in graph.generators().elements() {
            let c = group.mul(&group.mul(s, h), &group.inv(s));
            if !sub.contains(&c) {
                return Err(LabError::NotNormal(format!(
                    "{} is not closed under conjugation by {s:?}",
                    sub.name()
                )));
            }
        }
    }
    let depths = graph.depths();
    let gamma_h = members
        .iter()
        .map(|&i| depths[i] as usize)
        .max()
        .unwrap_or(0);

    // coset labels for gH
    let mut coset = vec![usize::MAX; n];
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for g in 0..n {
        if coset[g] != usize::MAX {
            continue;
        }
        let id = cosets.len();
        let mut block = Vec::with_capacity(h_elems.len());
        for h in &h_elems {
            let j = graph
                .index_of(&group.mul(graph.element(g), h))
                .ok_or_else(|| {
                    LabError::OracleInconsistent(format!("{} leaves the group", sub.name()))
                })?;
            if coset[j] == usize::MAX {
                coset[j] = id;
                block.push(j);
            }
        }
        cosets.push(block);
    }
    let m = h_elems.len();
    let degenerate = m <= 1;
    if degenerate {
        return Ok(CosetGap {
            subgroup: sub.name().to_string(),
            subgroup_order: m,
            index: cosets.len(),
            gamma_h,
            gap: f64::INFINITY,
            bound: f64::INFINITY,
            degenerate,
            holds: true,
        });
    }

    // M = PΔP + cE with E the coset-averaging projector and P = I − E
    let lap = Laplacian::of(graph);
    let l = lap.dense();
    let inv_m = 1.0 / m as f64;
    let mut lp = l.clone();
    for x in 0..n {
        for block in &cosets {
            let s: f64 = block.iter().map(|&z| l[(x, z)]).sum::<f64>() * inv_m;
            for &y in block {
                lp[(x, y)] -= s;
            }
        }
    }
    let mut mat = lp.clone();
    for block in &cosets {
        for y in 0..n {
            let s: f64 = block.iter().map(|&z| lp[(z, y)]).sum::<f64>() * inv_m;
            for &x in block {
                mat[(x, y)] -= s;
            }
        }
    }
    let c = 2.0 * lap.degree() as f64 + 1.0;
    for block in &cosets {
        for &x in block {
            for &y in block {
                mat[(x, y)] += c * inv_m;
            }
        }
    }
    for x in 0..n {
        for y in 0..x {
            let avg = 0.5 * (mat[(x, y)] + mat[(y, x)]);
            mat[(x, y)] = avg;
            mat[(y, x)] = avg;
        }
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let values = mat
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| LabError::NoConvergence {
            residual: f64::NAN,
            detail: format!("{e:?}"),
        })?;
    let gap = values[0];
    let bound = 1.0 / (gamma_h as f64).powi(2);
    Ok(CosetGap {
        subgroup: sub.name().to_string(),
        subgroup_order: m,
        index: cosets.len(),
        gamma_h,
        gap,
        bound,
        degenerate,
        holds: gap + SLACK >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::cycle;
    use super::*;
    use crate::group::{symmetrize, Element, GroupHandle};

    #[test]
    fn cycle_twelve_chain() {
        let c = verify_spectral_inequalities(&cycle(12), 22).unwrap();
        assert!(c.all_hold(), "{:?}", c.inequalities);
        assert_eq!(c.gamma, 6);
        assert!((c.spectrum.lambda1 - (2.0 - 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(c.h.value(), Some(1.0 / 3.0));
    }

    #[test]
    fn two_element_group() {
        let c = verify_spectral_inequalities(&cycle(2), 22).unwrap();
        assert!(c.all_hold());
        assert!((c.spectrum.lambda1 - 2.0).abs() < 1e-12);
        assert_eq!(c.h.value(), Some(1.0));
    }

    #[test]
    fn rayleigh_cycle_twelve() {
        let r = rayleigh_probe(&cycle(12)).unwrap();
        assert!((r.quotient - 6.0 / 19.0).abs() < 1e-12, "{}", r.quotient);
        assert_eq!(r.ball_size, 5);
        assert!((r.bound - 1.8).abs() < 1e-12);
        assert!(r.holds());
        assert!(r.raw_mean.abs() < 1e-12);
    }

    #[test]
    fn coset_gap_extremes() {
        let g = cycle(12);
        let whole = coset_gap(&g, &SubgroupOracle::whole()).unwrap();
        assert!((whole.gap - (2.0 - 3f64.sqrt())).abs() < 1e-9);
        assert_eq!(whole.gamma_h, 6);
        let triv = coset_gap(&g, &SubgroupOracle::trivial(g.group())).unwrap();
        assert!(triv.degenerate && triv.gap.is_infinite());
    }

    #[test]
    fn coset_gap_index_three() {
        let g = cycle(12);
        let sub = SubgroupOracle::new("3Z/12", Some(3), |x| match x {
            Element::Residues(v) => v[0] % 3 == 0,
            _ => false,
        });
        let r = coset_gap(&g, &sub).unwrap();
        assert_eq!((r.subgroup_order, r.index, r.gamma_h), (4, 3, 6));
        assert!(r.holds);
    }

    #[test]
    fn non_normal_subgroup_rejected() {
        let grp = GroupHandle::from_text("lamplighter:3").unwrap();
        let raw = [
            Element::Lamplighter {
                position: 1,
                lamps: 0,
            },
            Element::Lamplighter {
                position: 0,
                lamps: 1,
            },
        ];
        let g = CayleyGraph::build(&grp, &symmetrize(&grp, &raw).unwrap()).unwrap();
        let sub = SubgroupOracle::new(
            "lamp at 0",
            None,
            |x| matches!(x, Element::Lamplighter { position: 0, lamps } if *lamps <= 1),
        );
        assert!(matches!(coset_gap(&g, &sub), Err(LabError::NotNormal(_))));
        let lamps = SubgroupOracle::new("lamps", Some(3), |x| {
            matches!(x, Element::Lamplighter { position: 0, .. })
        });
        let r = coset_gap(&g, &lamps).unwrap();
        assert_eq!((r.subgroup_order, r.index), (8, 3));
        assert!(r.holds, "{r:?}");
    }
}
