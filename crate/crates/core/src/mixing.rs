//! Convolution powers of the uniform measure on `S`, mixing times, and the
//! elementary mixing-time inequalities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::cayley::CayleyGraph;
use crate::error::{LabError, Result};
use crate::growth::{doubling_scan, GrowthProfile};
use crate::report::finite_or_string;
use crate::spectral::{lambda1, pairwise_sum};

pub const SLACK: f64 = 1e-9;
/// Crossings are declared only this far below the threshold.
pub const CROSSING_MARGIN: f64 = 1e-12;
pub const EXACT_CALIBRATION_LIMIT: usize = 256;

/// `‖μ_S^{(n)} − μ_G‖_p` for `p = 1, 2, ∞` and `n = 0..`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Curves {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub dinf: Vec<f64>,
}

impl Curves {
    pub fn len(&self) -> usize {
        self.d1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d1.is_empty()
    }

    /// Distances at step `n`, divided by `‖μ_G‖_p`.
    pub fn normalized(&self, n: usize, order: usize) -> [f64; 3] {
        let g = order as f64;
        [self.d1[n], self.d2[n] * g.sqrt(), self.dinf[n] * g]
    }
}

/// `‖μ_G‖_p` for `p = 1, 2, ∞` under counting measure.
pub fn uniform_norms(order: usize) -> [f64; 3] {
    let g = order as f64;
    [1.0, 1.0 / g.sqrt(), 1.0 / g]
}

/// One step `v ← μ_S * v`, i.e. `v'(x) = (1/k) Σ_s v(s x)`.
pub fn convolve(graph: &CayleyGraph, v: &[f64], out: &mut [f64]) {
    let inv_k = 1.0 / graph.degree() as f64;
    for (x, o) in out.iter_mut().enumerate() {
        let terms: Vec<f64> = graph.neighbors(x).iter().map(|&y| v[y as usize]).collect();
        *o = pairwise_sum(&terms) * inv_k;
    }
}

fn distances(v: &[f64], u: f64) -> (f64, f64, f64) {
    let abs: Vec<f64> = v.iter().map(|x| (x - u).abs()).collect();
    let sq: Vec<f64> = abs.iter().map(|x| x * x).collect();
    let max = abs.iter().copied().fold(0.0, f64::max);
    (pairwise_sum(&abs), pairwise_sum(&sq).sqrt(), max)
}

/// Walk from `δ_e`, yielding the distribution after each step.
pub struct Walk<'a> {
    graph: &'a CayleyGraph,
    current: Vec<f64>,
    scratch: Vec<f64>,
    step: usize,
}

impl<'a> Walk<'a> {
    pub fn new(graph: &'a CayleyGraph) -> Self {
        let mut current = vec![0.0; graph.order()];
        current[0] = 1.0;
        Walk {
            graph,
            scratch: current.clone(),
            current,
            step: 0,
        }
    }

    pub fn distribution(&self) -> &[f64] {
        &self.current
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn advance(&mut self) {
        convolve(self.graph, &self.current, &mut self.scratch);
        std::mem::swap(&mut self.current, &mut self.scratch);
        self.step += 1;
    }

    /// `|Σv − 1|` and the most negative entry.
    pub fn stochastic_defect(&self) -> (f64, f64) {
        let min = self.current.iter().copied().fold(0.0, f64::min);
        ((pairwise_sum(&self.current) - 1.0).abs(), min)
    }
}

/// Distances for `n = 0..=n_max`.
pub fn convolution_curve(graph: &CayleyGraph, n_max: usize) -> Curves {
    let u = 1.0 / graph.order() as f64;
    let mut walk = Walk::new(graph);
    let mut c = Curves::default();
    loop {
        let (a, b, m) = distances(walk.distribution(), u);
        c.d1.push(a);
        c.d2.push(b);
        c.dinf.push(m);
        if walk.step_index() == n_max {
            return c;
        }
        walk.advance();
    }
}

/// `16 k γ² ⌈log |G|⌉`, which covers `T_2` and `T_∞` by the bounds under test.
pub fn default_n_max(order: usize, k: usize, gamma: usize) -> usize {
    let log = (order.max(2) as f64).ln().ceil() as usize;
    16 * k * gamma * gamma * log
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub group: String,
    pub order: usize,
    pub k: usize,
    pub gamma: usize,
    pub lambda1: f64,
    #[serde(rename = "beta_S")]
    pub beta: f64,
    pub beta_valid: bool,
    /// First `n` with `‖μ_S^{(n)} − μ_G‖_p ≤ ‖μ_G‖_p / 10`, for `p = 1, 2, ∞`.
    pub t1: Option<usize>,
    pub t2: Option<usize>,
    pub tinf: Option<usize>,
    /// `k / λ₁`.
    #[serde(serialize_with = "finite_or_string")]
    pub t_rel: f64,
    pub n_max: usize,
    /// Last step computed: `min(2·T_∞ + 2, n_max)`.
    pub n_end: usize,
    /// Worst `|Σv − 1|` and most negative mass seen.
    pub mass_defect: f64,
    pub min_mass: f64,
    pub curves: Curves,
}

impl MixingReport {
    pub fn times(&self) -> [Option<usize>; 3] {
        [self.t1, self.t2, self.tinf]
    }
}

/// Runs the walk until all three crossings are seen, then on to `2·T_∞ + 2`.
pub fn mixing_times(graph: &CayleyGraph) -> Result<MixingReport> {
    mixing_times_with(graph, None)
}

pub fn mixing_times_with(graph: &CayleyGraph, n_max: Option<usize>) -> Result<MixingReport> {
    let order = graph.order();
    let k = graph.degree();
    let gamma = graph.diameter();
    let n_max = n_max.unwrap_or_else(|| default_n_max(order, k, gamma));
    let (l1, beta, beta_valid) = if order >= 2 {
        let s = lambda1(graph, 1e-10)?;
        (s.lambda1, s.beta, s.beta_valid)
    } else {
        (f64::INFINITY, 0.0, true)
    };
    let norms = uniform_norms(order);
    let u = 1.0 / order as f64;
    let mut walk = Walk::new(graph);
    let mut curves = Curves::default();
    let mut times: [Option<usize>; 3] = [None; 3];
    let (mut mass_defect, mut min_mass) = (0.0f64, 0.0f64);
    let n_end = loop {
        let n = walk.step_index();
        let (a, b, m) = distances(walk.distribution(), u);
        let (defect, low) = walk.stochastic_defect();
        mass_defect = mass_defect.max(defect);
        min_mass = min_mass.min(low);
        for (p, d) in [a, b, m].into_iter().enumerate() {
            if times[p].is_none() && d <= norms[p] / 10.0 - CROSSING_MARGIN {
                times[p] = Some(n);
            }
        }
        curves.d1.push(a);
        curves.d2.push(b);
        curves.dinf.push(m);
        let target = times[2].map_or(n_max, |t| (2 * t + 2).min(n_max));
        if n >= target {
            break n;
        }
        walk.advance();
    };
    Ok(MixingReport {
        group: graph.group().spec().to_string(),
        order,
        k,
        gamma,
        lambda1: l1,
        beta,
        beta_valid,
        t1: times[0],
        t2: times[1],
        tinf: times[2],
        t_rel: k as f64 / l1,
        n_max,
        n_end,
        mass_defect,
        min_mass,
        curves,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemStatus {
    Holds,
    Violated,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingItem {
    pub item: u8,
    pub name: &'static str,
    pub status: ItemStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingVerification {
    pub report: MixingReport,
    pub hypothesis_lambda1_le_2: bool,
    pub items: Vec<MixingItem>,
}

impl MixingVerification {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.status != ItemStatus::Violated)
    }

    pub fn failures(&self) -> Vec<&MixingItem> {
        self.items
            .iter()
            .filter(|i| i.status == ItemStatus::Violated)
            .collect()
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK * b.abs().max(1.0)
}

const P_NAMES: [&str; 3] = ["1", "2", "inf"];

/// Checks the nine elementary mixing facts along the computed curves.
pub fn verify_basic_mixing(graph: &CayleyGraph) -> Result<MixingVerification> {
    let report = mixing_times(graph)?;
    Ok(check_items(report))
}

pub fn check_items(report: MixingReport) -> MixingVerification {
    let c = &report.curves;
    let order = report.order;
    let len = c.len();
    let g = report.gamma as f64;
    let k = report.k as f64;
    let hyp = report.lambda1 <= 2.0;
    let beta_ok = hyp && report.beta_valid;
    let beta_skip = if !hyp {
        format!("lambda1 = {} > 2", report.lambda1)
    } else {
        "beta_S is not the second-largest absolute eigenvalue".into()
    };
    let curve = |p: usize| -> &Vec<f64> {
        match p {
            0 => &c.d1,
            1 => &c.d2,
            _ => &c.dinf,
        }
    };
    let mut items = Vec::new();
    let mut push = |item: u8, name: &'static str, failure: Option<String>, skip: Option<String>| {
        let (status, detail) = match (skip, failure) {
            (Some(s), _) => (ItemStatus::Skipped, s),
            (None, Some(f)) => (ItemStatus::Violated, f),
            (None, None) => (ItemStatus::Holds, String::new()),
        };
        items.push(MixingItem {
            item,
            name,
            status,
            detail,
        });
    };

    // (1)
    let mut fail = None;
    'one: for p in 0..3 {
        let d = curve(p);
        for n in 1..len {
            if !le(d[n], d[n - 1]) {
                fail = Some(format!(
                    "p={} increases at n={n}: {} > {}",
                    P_NAMES[p],
                    d[n],
                    d[n - 1]
                ));
                break 'one;
            }
        }
    }
    push(1, "distance nonincreasing in n", fail, None);

    // (2)
    let mut fail = None;
    for n in 0..len {
        let v = c.normalized(n, order);
        if !(le(v[0], v[1]) && le(v[1], v[2])) {
            fail = Some(format!(
                "normalized distances not monotone in p at n={n}: {v:?}"
            ));
            break;
        }
    }
    if fail.is_none() {
        if let [Some(a), Some(b), Some(e)] = report.times() {
            if !(a <= b && b <= e) {
                fail = Some(format!("T1={a}, T2={b}, Tinf={e} not monotone"));
            }
        }
    }
    push(2, "normalized distance nondecreasing in p", fail, None);

    // (3)
    let mut fail = None;
    'three: for n in 0..len {
        let v = c.normalized(n, order);
        let bn = report.beta.powi(n as i32);
        for p in 0..3 {
            if !le(bn, v[p]) {
                fail = Some(format!(
                    "beta^{n} = {bn} > normalized d_{} = {}",
                    P_NAMES[p], v[p]
                ));
                break 'three;
            }
        }
    }
    push(
        3,
        "beta^n lower bound",
        fail,
        (!beta_ok).then(|| beta_skip.clone()),
    );

    // (4)
    let mut fail = None;
    'four: for n in 0..len {
        if 2 * n >= len {
            break;
        }
        let rhs = c.normalized(n, order)[1].powi(2);
        let lhs = c.normalized(2 * n, order);
        for p in 0..3 {
            if !le(lhs[p], rhs) {
                fail = Some(format!("p={} at n={n}: {} > {rhs}", P_NAMES[p], lhs[p]));
                break 'four;
            }
        }
    }
    push(4, "squaring bound via L2", fail, None);

    // (5)
    let mut fail = None;
    for n in 0..len {
        let bn = report.beta.powi(n as i32);
        if !le(c.d2[n], bn) {
            fail = Some(format!("d_2({n}) = {} > beta^{n} = {bn}", c.d2[n]));
            break;
        }
    }
    push(
        5,
        "L2 distance at most beta^n",
        fail,
        (!beta_ok).then(|| beta_skip.clone()),
    );

    let unreached = |name: &str| {
        Some(format!(
            "{name} not reached within n_max = {}",
            report.n_max
        ))
    };

    // (6)
    let fail = match (report.t2, report.tinf) {
        (Some(t2), Some(ti)) => (ti > 2 * t2).then(|| format!("Tinf={ti} > 2*T2={}", 2 * t2)),
        (None, _) => unreached("T2"),
        (_, None) => unreached("Tinf"),
    };
    push(6, "Tinf at most 2 T2", fail, None);

    // (7)
    let mut fail = None;
    for (p, t) in report.times().into_iter().enumerate() {
        match t {
            Some(t) if (t as f64) < g / 2.0 => {
                fail = Some(format!("T{}={t} < gamma/2", P_NAMES[p]))
            }
            None => fail = unreached(&format!("T{}", P_NAMES[p])),
            _ => {}
        }
    }
    if let Some(ti) = report.tinf {
        if ti < report.gamma {
            fail = Some(format!("Tinf={ti} < gamma={}", report.gamma));
        }
    }
    push(
        7,
        "mixing times at least gamma/2, Tinf at least gamma",
        fail,
        None,
    );

    // (8)
    let bound8 = 8.0 * k * g * g * (order as f64).ln();
    let fail = match report.t2 {
        Some(t) => (!le(t as f64, bound8)).then(|| format!("T2={t} > {bound8}")),
        None => unreached("T2"),
    };
    push(8, "T2 at most 8k gamma^2 log|G|", fail, None);

    // (9)
    let fail = match report.t1 {
        Some(t1) => {
            let bound = (t1 as f64).min(8.0 * k * g * g);
            (!le(report.t_rel, bound))
                .then(|| format!("T_rel={} > min(T1, 8k gamma^2)={bound}", report.t_rel))
        }
        None => unreached("T1"),
    };
    push(
        9,
        "T_rel at most min(T1, 8k gamma^2)",
        fail,
        (!beta_ok).then_some(beta_skip),
    );

    MixingVerification {
        hypothesis_lambda1_le_2: hyp,
        report,
        items,
    }
}

/// Largest absolute gap between the float walk and the exact rational walk
/// over the first `steps` steps.
pub fn float_error_calibration(graph: &CayleyGraph, steps: usize) -> Result<f64> {
    let n = graph.order();
    if n > EXACT_CALIBRATION_LIMIT {
        return Err(LabError::Refused {
            what: "exact rational walk".into(),
            size: n as u128,
            cap: EXACT_CALIBRATION_LIMIT as u128,
        });
    }
    let k = BigInt::from(graph.degree());
    let mut exact: Vec<BigRational> = vec![BigRational::zero(); n];
    exact[0] = BigRational::from_integer(1.into());
    let mut walk = Walk::new(graph);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let next: Vec<BigRational> = (0..n)
            .map(|x| {
                let s = graph
                    .neighbors(x)
                    .iter()
                    .fold(BigRational::zero(), |acc, &y| acc + &exact[y as usize]);
                s / BigRational::from_integer(k.clone())
            })
            .collect();
        exact = next;
        walk.advance();
        for (e, f) in exact.iter().zip(walk.distribution()) {
            worst = worst.max((e.to_f64().unwrap_or(f64::NAN) - f).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub group: String,
    pub order: usize,
    pub k: usize,
    pub gamma: usize,
    /// First `n` with `|S^{2n+1}| ≤ K|S^n|`.
    pub doubling_scale: Option<usize>,
    /// `doubling_scale ≤ γ^{2/3}`.
    pub below_two_thirds: bool,
    pub t1_over_gamma2: Option<f64>,
    pub t2_over_gamma2: Option<f64>,
    pub tinf_over_gamma2: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticScan {
    pub doubling_constant: f64,
    pub rows: Vec<ScanRow>,
    /// `T_∞/γ²` strictly increasing along the rows.
    pub strictly_increasing: Option<bool>,
    /// `max/min` of `T_∞/γ²` along the rows.
    pub band_ratio: Option<f64>,
}

/// Mixing times over γ² across a family, with the first doubling scale of each instance.
pub fn quadratic_scan(graphs: &[CayleyGraph], doubling_constant: f64) -> Result<QuadraticScan> {
    let mut rows = Vec::new();
    for graph in graphs {
        let profile = GrowthProfile::from_ball(graph.group(), graph.generators(), graph.ball());
        let scan = doubling_scan(&profile)?;
        let scale = scan.first_scale(doubling_constant);
        let m = mixing_times(graph)?;
        let g2 = (m.gamma * m.gamma) as f64;
        let ratio = |t: Option<usize>| t.map(|t| t as f64 / g2);
        rows.push(ScanRow {
            group: m.group.clone(),
            order: m.order,
            k: m.k,
            gamma: m.gamma,
            doubling_scale: scale,
            below_two_thirds: scale.is_some_and(|n| (n as f64) <= (m.gamma as f64).powf(2.0 / 3.0)),
            t1_over_gamma2: ratio(m.t1),
            t2_over_gamma2: ratio(m.t2),
            tinf_over_gamma2: ratio(m.tinf),
        });
    }
    let values: Option<Vec<f64>> = rows.iter().map(|r| r.tinf_over_gamma2).collect();
    let (strictly_increasing, band_ratio) = match values {
        Some(v) if v.len() >= 2 => {
            let inc = v.windows(2).all(|w| w[0] < w[1]);
            let max = v.iter().copied().fold(f64::MIN, f64::max);
            let min = v.iter().copied().fold(f64::MAX, f64::min);
            (Some(inc), Some(max / min))
        }
        _ => (None, None),
    };
    Ok(QuadraticScan {
        doubling_constant,
        rows,
        strictly_increasing,
        band_ratio,
    })
}
