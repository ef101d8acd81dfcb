//! Growth diagnostics computed from exact ball sizes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::cayley::{enumerate_ball, Ball};
use crate::error::{LabError, Result};
use crate::group::{order_cap, Element, GeneratingSet, GroupHandle, SubgroupOracle};
use crate::report::{finite_or_string, Table};

/// Sphere and ball sizes of `S^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub sphere_sizes: Vec<u64>,
    pub ball_sizes: Vec<u64>,
    /// Radius at which the ball becomes the whole group.
    pub diameter: Option<usize>,
    pub group_order: Option<u128>,
    pub k: usize,
    pub reached_group: bool,
    pub truncated: bool,
}

impl GrowthProfile {
    pub fn from_ball(group: &GroupHandle, gens: &GeneratingSet, ball: &Ball) -> GrowthProfile {
        let sphere_sizes: Vec<u64> = ball.sphere_sizes().iter().map(|&x| x as u64).collect();
        let mut acc = 0;
        let ball_sizes = sphere_sizes
            .iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect::<Vec<_>>();
        let order = group.order();
        let total = *ball_sizes.last().unwrap() as u128;
        let reached_group = order == Some(total);
        GrowthProfile {
            diameter: reached_group.then(|| ball.radius()),
            sphere_sizes,
            ball_sizes,
            group_order: order,
            k: gens.len(),
            reached_group,
            truncated: ball.truncated(),
        }
    }

    /// `|S^n|`, extended by `|G|` past the diameter.
    pub fn ball(&self, n: usize) -> Option<u64> {
        match self.ball_sizes.get(n) {
            Some(&b) => Some(b),
            None if self.reached_group => self.ball_sizes.last().copied(),
            None => None,
        }
    }

    pub fn max_radius(&self) -> usize {
        self.ball_sizes.len() - 1
    }

    /// Requires the full group, returning `(γ, |G|)`.
    pub fn complete(&self) -> Result<(usize, u64)> {
        match self.diameter {
            Some(g) => Ok((g, *self.ball_sizes.last().unwrap())),
            None => Err(LabError::Truncated {
                radius: self.max_radius(),
                needed: self.max_radius() + 1,
            }),
        }
    }

    /// Checks the profile invariants: strict growth up to γ, `|S^{n+1}| ≤ k|S^n|`
    /// and submultiplicativity on every in-range pair.
    pub fn check_invariants(&self) -> Result<()> {
        let b = &self.ball_sizes;
        for n in 0..b.len() - 1 {
            if b[n + 1] <= b[n] {
                return Err(fail("strict growth", format!("|S^{}| = |S^{}|", n + 1, n)));
            }
            if b[n + 1] > self.k as u64 * b[n] {
                return Err(fail("degree bound", format!("|S^{}| > k|S^{n}|", n + 1)));
            }
        }
        for n in 0..b.len() {
            for m in 0..b.len() - n {
                if b[n + m] > b[n] * b[m] {
                    return Err(fail(
                        "submultiplicativity",
                        format!("|S^{}| > |S^{n}||S^{m}|", n + m),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Least-squares slope of `log |S^n|` against `log n` over `lo..=hi`.
    pub fn loglog_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        if lo == 0 || hi <= lo {
            return None;
        }
        let pts: Vec<(f64, f64)> = (lo..=hi)
            .map(|n| Some(((n as f64).ln(), (self.ball(n)? as f64).ln())))
            .collect::<Option<_>>()?;
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["n", "sphere", "ball", "ratio_2n1", "ratio_5n"]);
        for n in 0..self.ball_sizes.len() {
            let ratio = |m: usize| -> String {
                match (self.ball_sizes.get(m), self.ball_sizes[n]) {
                    (Some(&big), small) => crate::report::fmt_f64(big as f64 / small as f64),
                    _ => String::new(),
                }
            };
            t.push(vec![
                n.to_string(),
                self.sphere_sizes[n].to_string(),
                self.ball_sizes[n].to_string(),
                ratio(2 * n + 1),
                ratio(5 * n),
            ]);
        }
        t
    }
}

fn fail(name: &str, detail: String) -> LabError {
    LabError::CheckFailed {
        name: name.into(),
        detail,
    }
}

/// Exact `|S^n|` for `n ≤ max_radius` (or up to the diameter when `None`).
pub fn ball_growth(
    group: &GroupHandle,
    gens: &GeneratingSet,
    max_radius: Option<usize>,
) -> Result<GrowthProfile> {
    if max_radius.is_none() && !group.is_finite() {
        return Err(LabError::Unsupported(
            "an infinite group needs an explicit radius".into(),
        ));
    }
    let cap = order_cap().min(usize::MAX as u128) as usize;
    let ball = enumerate_ball(group, gens, max_radius, cap);
    Ok(GrowthProfile::from_ball(group, gens, &ball))
}

/// `diam_S(G)`, failing with the reached order when `S` does not generate.
pub fn diameter(group: &GroupHandle, gens: &GeneratingSet) -> Result<usize> {
    let order = group
        .order()
        .ok_or_else(|| LabError::Unsupported("diameter of an infinite group".into()))?;
    let cap = order_cap();
    if order > cap {
        return Err(LabError::Refused {
            what: format!("ball enumeration of {}", group.spec()),
            size: order,
            cap,
        });
    }
    let ball = enumerate_ball(group, gens, None, cap as usize);
    if ball.len() as u128 != order {
        return Err(LabError::NotGenerating {
            reached: ball.len() as u128,
            order,
        });
    }
    Ok(ball.radius())
}

/// One ratio `|S^a| / |S^n|` with its exact counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratio {
    pub n: usize,
    pub numerator: u64,
    pub denominator: u64,
    pub value: f64,
}

/// Result of searching the doubling-at-some-scale window for one `(ε, δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingWindow {
    pub eps: f64,
    pub delta: f64,
    /// The constant `5^{2/(εδ)}`.
    #[serde(serialize_with = "finite_or_string")]
    pub k_window: f64,
    pub lo: usize,
    pub hi: usize,
    pub empty: bool,
    /// Is the group ε-almost flat, so that a doubling scale must exist?
    pub flat: bool,
    pub scale: Option<usize>,
    pub ratio_at_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingScan {
    pub ratios_2n1: Vec<Ratio>,
    pub ratios_5n: Vec<Ratio>,
}

/// Ratio tables for every `n ≥ 1` whose radii stay within the diameter.
pub fn doubling_scan(profile: &GrowthProfile) -> Result<DoublingScan> {
    let (gamma, _) = profile.complete()?;
    let make = |mult: usize, add: usize| -> Vec<Ratio> {
        (1..=gamma)
            .take_while(|n| mult * n + add <= gamma)
            .map(|n| {
                let num = profile.ball_sizes[mult * n + add];
                let den = profile.ball_sizes[n];
                Ratio {
                    n,
                    numerator: num,
                    denominator: den,
                    value: num as f64 / den as f64,
                }
            })
            .collect()
    };
    Ok(DoublingScan {
        ratios_2n1: make(2, 1),
        ratios_5n: make(5, 0),
    })
}

impl DoublingScan {
    /// Smallest `n` with `|S^{2n+1}| ≤ K|S^n|`.
    pub fn first_scale(&self, k: f64) -> Option<usize> {
        self.ratios_2n1
            .iter()
            .find(|r| r.numerator as f64 <= k * r.denominator as f64)
            .map(|r| r.n)
    }

    /// `θ̂ = max_{m ≥ m0} |S^{2m+1}| / |S^m|` over the table.
    pub fn theta_hat(&self, m0: usize) -> Option<f64> {
        self.ratios_2n1
            .iter()
            .filter(|r| r.n >= m0)
            .map(|r| r.value)
            .reduce(f64::max)
    }
}

/// Searches `n ∈ [γ^{δ/2}, γ^δ]` for `|S^{5n}| ≤ 5^{2/(εδ)} |S^n|`.
pub fn doubling_window(profile: &GrowthProfile, eps: f64, delta: f64) -> Result<DoublingWindow> {
    let (gamma, _) = profile.complete()?;
    let flat = flatness(profile)?.is_eps_flat(eps);
    let k_window = 5f64.powf(2.0 / (eps * delta));
    let g = gamma as f64;
    let lo = (g.powf(delta / 2.0) - 1e-12).ceil().max(1.0) as usize;
    let hi = (g.powf(delta) + 1e-12).floor() as usize;
    let empty = lo > hi;
    let mut scale = None;
    let mut ratio_at_scale = None;
    if !empty {
        for n in lo..=hi {
            let num = profile.ball(5 * n).unwrap() as f64;
            let den = profile.ball(n).unwrap() as f64;
            if num <= k_window * den {
                scale = Some(n);
                ratio_at_scale = Some(num / den);
                break;
            }
        }
    }
    Ok(DoublingWindow {
        eps,
        delta,
        k_window,
        lo,
        hi,
        empty,
        flat,
        scale,
        ratio_at_scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub gamma: usize,
    pub order: u64,
    pub k: usize,
    /// `log γ / log(|G|/k)`; infinite when `|G| ≤ k`.
    #[serde(serialize_with = "finite_or_string")]
    pub eps_star: f64,
    /// `2(|G|/k)^{7/4}`.
    pub freiman_bound: f64,
    pub freiman_holds: bool,
}

impl FlatnessReport {
    /// `γ ≥ (|G|/k)^ε`.
    pub fn is_eps_flat(&self, eps: f64) -> bool {
        let base = self.order as f64 / self.k as f64;
        self.gamma as f64 >= base.powf(eps) * (1.0 - 1e-12)
    }
}

pub fn flatness(profile: &GrowthProfile) -> Result<FlatnessReport> {
    let (gamma, order) = profile.complete()?;
    let base = order as f64 / profile.k as f64;
    let eps_star = if base <= 1.0 {
        f64::INFINITY
    } else if gamma == 0 {
        f64::NEG_INFINITY
    } else {
        (gamma as f64).ln() / base.ln()
    };
    let freiman_bound = 2.0 * base.powf(1.75);
    Ok(FlatnessReport {
        gamma,
        order,
        k: profile.k,
        eps_star,
        freiman_bound,
        freiman_holds: gamma as f64 <= freiman_bound + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModerateGrowthFit {
    pub d: f64,
    /// `max_{1≤n≤γ} (n/γ)^d |G| / |S^n|`.
    #[serde(serialize_with = "finite_or_string")]
    pub a: f64,
    /// Exact value as `numerator/denominator` when `d` is a nonnegative integer.
    pub a_exact: Option<String>,
    pub argmax: usize,
    pub valid: bool,
}

pub fn moderate_fit(profile: &GrowthProfile, d: f64) -> Result<ModerateGrowthFit> {
    let (gamma, order) = profile.complete()?;
    if gamma == 0 {
        return Ok(ModerateGrowthFit {
            d,
            a: 1.0,
            a_exact: Some("1".into()),
            argmax: 0,
            valid: true,
        });
    }
    let integral = d >= 0.0 && d.fract() == 0.0 && d <= 64.0;
    if integral {
        let e = d as u32;
        let mut best: Option<(BigRational, usize)> = None;
        for n in 1..=gamma {
            let num = BigInt::from(n).pow(e) * BigInt::from(order);
            let den = BigInt::from(gamma).pow(e) * BigInt::from(profile.ball_sizes[n]);
            let q = BigRational::new(num, den);
            if best.as_ref().is_none_or(|(b, _)| q > *b) {
                best = Some((q, n));
            }
        }
        let (q, argmax) = best.unwrap();
        let a = q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap();
        let a = if a.is_finite() { a } else { ratio_to_f64(&q) };
        let exact = if q.denom().is_one() {
            q.numer().to_string()
        } else {
            format!("{}/{}", q.numer(), q.denom())
        };
        return Ok(ModerateGrowthFit {
            d,
            a,
            a_exact: Some(exact),
            argmax,
            valid: !q.numer().is_zero(),
        });
    }
    let mut a = f64::NEG_INFINITY;
    let mut argmax = 0;
    for n in 1..=gamma {
        let v = (n as f64 / gamma as f64).powf(d) * order as f64 / profile.ball_sizes[n] as f64;
        if v > a * (1.0 + 1e-12) {
            a = v;
            argmax = n;
        }
    }
    Ok(ModerateGrowthFit {
        d,
        a,
        a_exact: None,
        argmax,
        valid: a.is_finite(),
    })
}

fn ratio_to_f64(q: &BigRational) -> f64 {
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
    let scaled = if shift > 0 {
        BigRational::new(q.numer().clone(), q.denom().clone() << shift as u64)
    } else {
        BigRational::new(q.numer().clone() << (-shift) as u64, q.denom().clone())
    };
    let f = scaled.numer().to_f64().unwrap() / scaled.denom().to_f64().unwrap();
    f * 2f64.powi(shift as i32)
}

/// Greedy Ruzsa covering witness at scale `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuzsaWitness {
    pub n: usize,
    /// Ball indices (BFS order) of the chosen translates.
    pub chosen: Vec<usize>,
    pub size: usize,
    pub ball_n: u64,
    pub ball_5n: u64,
    /// `|S^{5n}| / |S^n|`.
    pub bound: f64,
    pub disjoint: bool,
    pub covers: bool,
    pub within_bound: bool,
}

/// Picks `X ⊂ S^{4n}` greedily in BFS order so that the translates `x·S^n` are
/// pairwise disjoint, then checks `S^{4n} ⊆ X·S^{2n}` element by element.
pub fn approximate_group_witness(
    group: &GroupHandle,
    gens: &GeneratingSet,
    n: usize,
) -> Result<RuzsaWitness> {
    let cap = order_cap().min(usize::MAX as u128) as usize;
    let ball = enumerate_ball(group, gens, Some(5 * n), cap);
    if ball.radius() < 5 * n && !ball.saturated() {
        return Err(LabError::Truncated {
            radius: ball.radius(),
            needed: 5 * n,
        });
    }
    let s_n = ball.prefix(n);
    let s_2n = ball.prefix(2 * n);
    let s_4n = ball.prefix(4 * n);
    let mut covered = vec![false; ball.len()];
    let mut chosen = Vec::new();
    let mut disjoint = true;
    for (i, x) in s_4n.iter().enumerate() {
        let translate: Vec<usize> = s_n
            .iter()
            .map(|a| ball.index_of(&group.mul(x, a)).expect("x·a lies in S^{5n}"))
            .collect();
        if translate.iter().all(|&j| !covered[j]) {
            for &j in &translate {
                if covered[j] {
                    disjoint = false;
                }
                covered[j] = true;
            }
            chosen.push(i);
        }
    }
    let mut reached: FxHashSet<Vec<u8>> = FxHashSet::default();
    for &i in &chosen {
        let x = &ball.elements()[i];
        for b in s_2n {
            reached.insert(group.mul(x, b).canonical_bytes());
        }
    }
    let covers = s_4n.iter().all(|y| reached.contains(&y.canonical_bytes()));
    let ball_n = s_n.len() as u64;
    let ball_5n = ball.ball_size(5 * n).unwrap() as u64;
    Ok(RuzsaWitness {
        n,
        size: chosen.len(),
        within_bound: (chosen.len() as u64) * ball_n <= ball_5n,
        chosen,
        ball_n,
        ball_5n,
        bound: ball_5n as f64 / ball_n as f64,
        disjoint,
        covers,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosetSaturation {
    /// Smallest `r` with `S^{r+1}Γ = S^rΓ`.
    pub r: usize,
    /// Number of left cosets met by `S^j`, for `j = 0..=γ`.
    pub trajectory: Vec<usize>,
    pub index: usize,
}

/// Counts left cosets `gΓ` met by successive balls and checks `G = S^rΓ`.
pub fn coset_saturation(
    group: &GroupHandle,
    gens: &GeneratingSet,
    sub: &SubgroupOracle,
) -> Result<CosetSaturation> {
    let order = group
        .order()
        .ok_or_else(|| LabError::Unsupported("coset counting in an infinite group".into()))?;
    let cap = order_cap();
    if order > cap {
        return Err(LabError::Refused {
            what: format!("ball enumeration of {}", group.spec()),
            size: order,
            cap,
        });
    }
    let ball = enumerate_ball(group, gens, None, cap as usize);
    if ball.len() as u128 != order {
        return Err(LabError::NotGenerating {
            reached: ball.len() as u128,
            order,
        });
    }
    sub.check_consistency(group, &ball.elements()[..ball.len().min(256)])?;
    let mut reps: Vec<Element> = Vec::new();
    let mut trajectory = Vec::new();
    let mut idx = 0;
    for &sz in ball.sphere_sizes() {
        for x in &ball.elements()[idx..idx + sz] {
            let xi = group.inv(x);
            if !reps.iter().any(|t| sub.contains(&group.mul(&xi, t))) {
                reps.push(x.clone());
            }
        }
        idx += sz;
        trajectory.push(reps.len());
    }
    let index = reps.len();
    let r = (0..trajectory.len())
        .find(|&j| {
            trajectory
                .get(j + 1)
                .is_none_or(|&next| next == trajectory[j])
        })
        .unwrap();
    if trajectory[r] != index {
        return Err(fail(
            "coset saturation",
            format!("S^{r} meets {} of {index} cosets", trajectory[r]),
        ));
    }
    Ok(CosetSaturation {
        r,
        trajectory,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{symmetrize, unitriangular_element};

    fn cycle(n: u64) -> (GroupHandle, GeneratingSet) {
        let g = GroupHandle::from_text(&format!("cyclic:{n}")).unwrap();
        let s = symmetrize(&g, &[Element::Residues(vec![1])]).unwrap();
        (g, s)
    }

    #[test]
    fn cycle_profile() {
        let (g, s) = cycle(100);
        let p = ball_growth(&g, &s, None).unwrap();
        assert_eq!(p.ball(5), Some(11));
        assert_eq!(p.ball(50), Some(100));
        assert_eq!(p.diameter, Some(50));
        p.check_invariants().unwrap();
        let scan = doubling_scan(&p).unwrap();
        let r5 = &scan.ratios_2n1[4];
        assert_eq!((r5.n, r5.numerator, r5.denominator), (5, 23, 11));
    }

    #[test]
    fn diameters() {
        let (g, s) = cycle(12);
        assert_eq!(diameter(&g, &s).unwrap(), 6);
        let g = GroupHandle::from_text("cyclic:1").unwrap();
        let s = symmetrize(&g, &[Element::Residues(vec![0])]).unwrap();
        assert_eq!(diameter(&g, &s).unwrap(), 0);
    }

    #[test]
    fn doubling_window_on_a_cycle() {
        let (g, s) = cycle(100);
        let p = ball_growth(&g, &s, None).unwrap();
        let w = doubling_window(&p, 0.5, 0.5).unwrap();
        assert_eq!(w.k_window, 5f64.powi(8));
        assert_eq!((w.lo, w.hi), (3, 7));
        for n in w.lo..=w.hi {
            assert!(p.ball(5 * n).unwrap() <= 5 * p.ball(n).unwrap());
        }
        assert_eq!(w.scale, Some(3));
    }

    #[test]
    fn moderate_fit_exact_values() {
        let (g, s) = cycle(20);
        let p = ball_growth(&g, &s, None).unwrap();
        let fit = moderate_fit(&p, 1.0).unwrap();
        assert_eq!(fit.a_exact.as_deref(), Some("1"));
        assert_eq!(fit.argmax, 10);
        let fit0 = moderate_fit(&p, 0.0).unwrap();
        assert_eq!(fit0.a_exact.as_deref(), Some("20/3"));
    }

    #[test]
    fn ruzsa_witness_on_cycle() {
        let (g, s) = cycle(100);
        let w = approximate_group_witness(&g, &s, 5).unwrap();
        assert!(w.disjoint && w.covers && w.within_bound);
        assert!(w.size <= 4);
        let (g, s) = cycle(10);
        let w = approximate_group_witness(&g, &s, 5).unwrap();
        assert_eq!(w.chosen, vec![0]);
    }

    #[test]
    fn heisenberg_freiman_bound() {
        let g = GroupHandle::from_text("ut:dim=3,p=11").unwrap();
        let s = symmetrize(
            &g,
            &[
                unitriangular_element(3, &[(0, 1, 1)], 11),
                unitriangular_element(3, &[(1, 2, 1)], 11),
            ],
        )
        .unwrap();
        let p = ball_growth(&g, &s, None).unwrap();
        let f = flatness(&p).unwrap();
        assert!(f.freiman_holds);
        assert!(f.is_eps_flat(f.eps_star));
    }

    #[test]
    fn coset_saturation_cyclic() {
        let (g, s) = cycle(12);
        let three = SubgroupOracle::new("3Z/12", Some(3), |x| match x {
            Element::Residues(v) => v[0] % 3 == 0,
            _ => false,
        });
        let c = coset_saturation(&g, &s, &three).unwrap();
        assert_eq!(c.r, 1);
        assert_eq!(c.index, 3);
        assert_eq!(&c.trajectory[..3], &[1, 3, 3]);
        let c = coset_saturation(&g, &s, &SubgroupOracle::whole()).unwrap();
        assert_eq!(c.r, 0);
    }
}
