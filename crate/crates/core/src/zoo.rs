//! The example families with their standard generating sets, and the
//! diameter and Schreier-generator checks for the permutation-vector family.

use serde::Serialize;

use crate::cayley::{enumerate_ball, CayleyGraph};
use crate::error::{LabError, Result};
use crate::group::{
    order_cap, permutation_is_even, reidemeister_schreier, symmetrize, unitriangular_element,
    Element, GeneratingSet, GroupHandle, GroupSpec, SubgroupOracle, SymFpVariant,
};

/// A group together with its family-default generating set.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub spec: GroupSpec,
    pub group: GroupHandle,
    pub generators: GeneratingSet,
    pub description: String,
}

impl FamilyInstance {
    pub fn graph(&self) -> Result<CayleyGraph> {
        CayleyGraph::build(&self.group, &self.generators)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyInfo {
    pub family: &'static str,
    pub example: &'static str,
    pub parameters: &'static str,
    pub generators: &'static str,
    pub description: &'static str,
}

pub fn families() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            family: "cyclic",
            example: "cyclic:12",
            parameters: "N >= 1",
            generators: "{0, +1, -1}",
            description: "cycle graph Z/N",
        },
        FamilyInfo {
            family: "abelian",
            example: "abelian:4,4,9",
            parameters: "moduli >= 1",
            generators: "{0, +e_i, -e_i}",
            description: "finite abelian group as a product of cyclic factors",
        },
        FamilyInfo {
            family: "ut",
            example: "ut:dim=4,p=3",
            parameters: "dim >= 2, p prime",
            generators: "I +- E_{i,i+1}",
            description: "unitriangular matrices over F_p, nilpotent of step dim-1",
        },
        FamilyInfo {
            family: "heis",
            example: "heis:7",
            parameters: "p prime",
            generators: "I +- E_12, I +- E_23",
            description: "Heisenberg group mod p, alias for ut:dim=3",
        },
        FamilyInfo {
            family: "lamplighter",
            example: "lamplighter:8",
            parameters: "1 <= M <= 64",
            generators: "identity, move left, move right, switch current lamp",
            description: "Z/M acting on (Z/2)^M by cyclic shift",
        },
        FamilyInfo {
            family: "symfp",
            example: "symfp:n=4,p=5,variant=G",
            parameters: "n >= 1, p prime > n, variant in {L, Gprime, G}",
            generators: "L: identity, (c;0)^+-1, (tau;0), (1;e_1)^+-1 with c the long cycle and tau=(12); \
                         Gprime: projection of the L set onto sum-zero vectors; G: Schreier generators of the index-two subgroup",
            description: "Sym(n) acting on F_p^n by coordinate permutation, and its subgroups Sym(n)|V and Alt(n)|V",
        },
        FamilyInfo {
            family: "freenil",
            example: "freenil:r=2,s=3",
            parameters: "r >= 1, s >= 1",
            generators: "1 +- X_i",
            description: "free s-step nilpotent group of rank r in a truncated free associative ring (infinite)",
        },
        FamilyInfo {
            family: "product",
            example: "product(lamplighter:3)x(cyclic:8)",
            parameters: "two specs",
            generators: "S_1 x S_2",
            description: "direct product with the product generating set",
        },
    ]
}

/// `(1; e_1)`, `(c; 0)` and `(τ; 0)` in `Sym(n) ⋉ F_p^n`.
pub fn symfp_raw_generators(n: usize) -> Vec<Element> {
    let cycle: Vec<u8> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
    let mut transposition: Vec<u8> = (0..n as u8).collect();
    if n >= 2 {
        transposition.swap(0, 1);
    }
    let mut e1 = vec![0u64; n];
    e1[0] = 1;
    vec![
        Element::SymFp {
            perm: cycle,
            vector: vec![0; n],
        },
        Element::SymFp {
            perm: transposition,
            vector: vec![0; n],
        },
        Element::SymFp {
            perm: (0..n as u8).collect(),
            vector: e1,
        },
    ]
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let (mut base, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// `v ↦ v − (Σv / n)·𝟙`, the projection of `L_n` onto the sum-zero part.
pub fn project_to_sum_zero(x: &Element, p: u64) -> Element {
    match x {
        Element::SymFp { perm, vector } => {
            let n = vector.len() as u64;
            let mean = vector.iter().fold(0, |a, v| (a + v) % p) * mod_inverse(n % p, p) % p;
            Element::SymFp {
                perm: perm.clone(),
                vector: vector.iter().map(|v| (v + p - mean) % p).collect(),
            }
        }
        other => other.clone(),
    }
}

/// The even-permutation subgroup of `Sym(n) ⋉ V`, of index two for `n ≥ 2`.
pub fn alternating_oracle() -> SubgroupOracle {
    SubgroupOracle::new("Alt(n) | V", Some(2), |x| match x {
        Element::SymFp { perm, .. } => permutation_is_even(perm),
        _ => false,
    })
}

/// Family-default generating set of `group`.
pub fn default_generators(group: &GroupHandle) -> Result<GeneratingSet> {
    match group.spec().clone() {
        GroupSpec::Cyclic { .. } => {
            symmetrize(group, &[Element::Residues(vec![1 % modulus_of(group, 0)])])
        }
        GroupSpec::AbelianProduct { moduli } => {
            let raw: Vec<Element> = (0..moduli.len())
                .map(|i| {
                    let mut v = vec![0; moduli.len()];
                    v[i] = 1 % moduli[i];
                    Element::Residues(v)
                })
                .collect();
            symmetrize(group, &raw)
        }
        GroupSpec::Unitriangular { dim, p } => {
            let raw: Vec<Element> = (0..dim - 1)
                .map(|i| unitriangular_element(dim, &[(i, i + 1, 1)], p))
                .collect();
            symmetrize(group, &raw)
        }
        GroupSpec::Lamplighter { lamps } => {
            let raw = [
                Element::Lamplighter {
                    position: 1 % lamps as u32,
                    lamps: 0,
                },
                Element::Lamplighter {
                    position: 0,
                    lamps: 1,
                },
            ];
            symmetrize(group, &raw)
        }
        GroupSpec::SymFp { degree, p, variant } => {
            let raw = symfp_raw_generators(degree);
            match variant {
                SymFpVariant::L => symmetrize(group, &raw),
                SymFpVariant::Gprime => {
                    let proj: Vec<Element> =
                        raw.iter().map(|x| project_to_sum_zero(x, p)).collect();
                    symmetrize(group, &proj)
                }
                SymFpVariant::G => {
                    let parent = GroupHandle::build(&GroupSpec::SymFp {
                        degree,
                        p,
                        variant: SymFpVariant::Gprime,
                    })?;
                    let parent_gens = default_generators(&parent)?;
                    if degree < 2 {
                        return Ok(parent_gens);
                    }
                    let rs = reidemeister_schreier(&parent, &parent_gens, &alternating_oracle())?;
                    symmetrize(group, rs.generators.elements())
                }
            }
        }
        GroupSpec::FreeNilpotent { rank, .. } => {
            let raw: Vec<Element> = (0..rank)
                .map(|i| group.free_generator(i).unwrap())
                .collect();
            symmetrize(group, &raw)
        }
        GroupSpec::DirectProduct { .. } => {
            let (a, b) = group.factors().expect("product handle");
            GeneratingSet::product(group, &default_generators(a)?, &default_generators(b)?)
        }
    }
}

fn modulus_of(group: &GroupHandle, i: usize) -> u64 {
    match group.spec() {
        GroupSpec::Cyclic { modulus } => *modulus,
        GroupSpec::AbelianProduct { moduli } => moduli[i],
        _ => 1,
    }
}

/// Builds a family member with its default generating set.
pub fn construct_family(spec_text: &str) -> Result<FamilyInstance> {
    let group = GroupHandle::from_text(spec_text)?;
    let generators = default_generators(&group)?;
    let family = family_name(group.spec());
    let description = families()
        .into_iter()
        .find(|f| f.family == family)
        .map(|f| f.description.to_string())
        .unwrap_or_default();
    Ok(FamilyInstance {
        spec: group.spec().clone(),
        group,
        generators,
        description,
    })
}

fn family_name(spec: &GroupSpec) -> &'static str {
    match spec {
        GroupSpec::Cyclic { .. } => "cyclic",
        GroupSpec::AbelianProduct { .. } => "abelian",
        GroupSpec::Unitriangular { .. } => "ut",
        GroupSpec::Lamplighter { .. } => "lamplighter",
        GroupSpec::SymFp { .. } => "symfp",
        GroupSpec::FreeNilpotent { .. } => "freenil",
        GroupSpec::DirectProduct { .. } => "product",
    }
}

/// The finite groups exercised by the acceptance suite, ascending in order.
pub const ACCEPTANCE_GRID: &[&str] = &[
    "cyclic:2",
    "cyclic:8",
    "cyclic:12",
    "cyclic:16",
    "abelian:2,2,2",
    "abelian:4,6",
    "heis:3",
    "ut:dim=4,p=2",
    "symfp:n=3,p=5,variant=G",
    "product(cyclic:4)x(heis:3)",
    "heis:5",
    "symfp:n=3,p=7,variant=G",
    "symfp:n=3,p=5,variant=Gprime",
    "lamplighter:3",
    "lamplighter:4",
    "lamplighter:5",
    "product(lamplighter:3)x(cyclic:8)",
    "symfp:n=3,p=7,variant=Gprime",
    "heis:7",
    "lamplighter:6",
    "ut:dim=4,p=3",
    "symfp:n=3,p=5,variant=L",
    "lamplighter:7",
    "symfp:n=4,p=5,variant=G",
    "lamplighter:8",
    "symfp:n=3,p=7,variant=L",
    "symfp:n=4,p=5,variant=Gprime",
];

/// `L_M × Z/N` with `M = ⌈N^α⌉` and the product generating set.
pub fn sharpness_family(alpha: f64, ns: &[u64]) -> Result<Vec<FamilyInstance>> {
    ns.iter()
        .map(|&n| {
            let m = (n as f64).powf(alpha).ceil() as u64;
            construct_family(&format!("product(lamplighter:{m})x(cyclic:{n})"))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SchreierContract {
    pub index: usize,
    pub parent_k: usize,
    pub sub_k: usize,
    /// `|S|/d ≤ |S₀| ≤ d|S|`.
    pub size_bounds: bool,
    /// Largest word length of a generator of `S₀` in `(G, S)`.
    pub max_generator_length: usize,
    /// `S₀ ⊆ G₀ ∩ S^{2d−1}`.
    pub inside_ball: bool,
    pub inside_subgroup: bool,
    /// `T ⊂ S^{d−1}`.
    pub transversal_in_ball: bool,
    pub generates: bool,
    pub gamma: usize,
    pub gamma_sub: usize,
    /// `(γ − d)/(2d) ≤ γ₀ ≤ γ`.
    pub diameter_bounds: bool,
}

impl SchreierContract {
    pub fn holds(&self) -> bool {
        self.size_bounds
            && self.inside_ball
            && self.inside_subgroup
            && self.transversal_in_ball
            && self.generates
            && self.diameter_bounds
    }
}

/// Runs Reidemeister–Schreier on a finite group and checks every stated property.
pub fn schreier_contract(
    group: &GroupHandle,
    gens: &GeneratingSet,
    sub: &SubgroupOracle,
) -> Result<SchreierContract> {
    let graph = CayleyGraph::build(group, gens)?;
    let rs = reidemeister_schreier(group, gens, sub)?;
    let d = rs.index;
    let depths = graph.depths();
    let mut max_len = 0;
    let mut inside_subgroup = true;
    for s in rs.generators.elements() {
        let i = graph.index_of(s).expect("generator lies in the group");
        max_len = max_len.max(depths[i] as usize);
        inside_subgroup &= sub.contains(s);
    }
    let transversal_in_ball = rs
        .transversal
        .iter()
        .all(|t| graph.index_of(t).is_some_and(|i| (depths[i] as usize) < d));
    let sub_graph = CayleyGraph::generated(group, &rs.generators, graph.order())?;
    let expected = graph.order() / d;
    let gamma = graph.diameter();
    let gamma_sub = sub_graph.diameter();
    let (k, k0) = (gens.len(), rs.generators.len());
    Ok(SchreierContract {
        index: d,
        parent_k: k,
        sub_k: k0,
        size_bounds: k <= d * k0 && k0 <= d * k,
        max_generator_length: max_len,
        inside_ball: max_len < 2 * d,
        inside_subgroup,
        transversal_in_ball,
        generates: sub_graph.order() == expected && graph.order() % d == 0,
        gamma,
        gamma_sub,
        diameter_bounds: (gamma as f64 - d as f64) / (2.0 * d as f64) <= gamma_sub as f64
            && gamma_sub <= gamma,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Bound {
    pub name: &'static str,
    pub value: f64,
    pub measured: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LggReport {
    pub n: usize,
    pub p: u64,
    pub orders: [usize; 3],
    pub k: [usize; 3],
    /// Diameters of `L_n`, `G'_n`, `G_n`.
    pub gamma: usize,
    pub gamma_prime: usize,
    pub gamma0: usize,
    pub lower_bounds: Vec<Bound>,
    /// `(γ − np)/n²`.
    pub c_meas: f64,
    pub c_ceiling: f64,
    pub c_holds: bool,
    pub schreier: SchreierContract,
}

impl LggReport {
    pub fn holds(&self) -> bool {
        self.lower_bounds.iter().all(|b| b.holds) && self.c_holds
    }
}

pub const LGG_CEILING: f64 = 8.0;

fn symfp(n: usize, p: u64, variant: SymFpVariant) -> Result<FamilyInstance> {
    construct_family(&format!("symfp:n={n},p={p},variant={}", variant.as_str()))
}

/// Diameters of the three permutation-vector groups against their lower bounds.
pub fn verify_lgg(n: usize, p: u64) -> Result<LggReport> {
    let l = symfp(n, p, SymFpVariant::L)?;
    let gp = symfp(n, p, SymFpVariant::Gprime)?;
    let g0 = symfp(n, p, SymFpVariant::G)?;
    let graphs = [l.graph()?, gp.graph()?, g0.graph()?];
    let [gamma, gamma_prime, gamma0] = [0, 1, 2].map(|i| graphs[i].diameter());
    let pf = p as f64;
    let root = pf.powf(1.0 - 1.0 / n as f64);
    let lower = [
        ("(p-1)/2 <= gamma", 0.5 * (pf - 1.0), gamma),
        ("(p^(1-1/n)-1)/2 <= gamma'", 0.5 * (root - 1.0), gamma_prime),
        ("p^(1-1/n)/10 <= gamma0", root / 10.0, gamma0),
    ];
    let lower_bounds = lower
        .iter()
        .map(|&(name, value, measured)| Bound {
            name,
            value,
            measured,
            holds: value <= measured as f64,
        })
        .collect();
    let c_meas = (gamma as f64 - n as f64 * pf) / (n * n) as f64;
    let schreier = schreier_contract(&gp.group, &gp.generators, &alternating_oracle())?;
    Ok(LggReport {
        n,
        p,
        orders: [0, 1, 2].map(|i| graphs[i].order()),
        k: [0, 1, 2].map(|i| graphs[i].degree()),
        gamma,
        gamma_prime,
        gamma0,
        lower_bounds,
        c_meas,
        c_ceiling: LGG_CEILING,
        c_holds: c_meas <= LGG_CEILING,
        schreier,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralFactorization {
    pub n: usize,
    pub p: u64,
    pub order: usize,
    pub sum_zero_order: usize,
    pub centre_order: usize,
    pub central: bool,
    pub bijective: bool,
}

/// `L_n = G'_n × Z` with `Z` the constant vectors, checked element by element.
pub fn central_factorization(n: usize, p: u64) -> Result<CentralFactorization> {
    let l = symfp(n, p, SymFpVariant::L)?;
    let gp = symfp(n, p, SymFpVariant::Gprime)?;
    let sum_zero = gp.graph()?;
    let ident: Vec<u8> = (0..n as u8).collect();
    let centre: Vec<Element> = (0..p)
        .map(|c| Element::SymFp {
            perm: ident.clone(),
            vector: vec![c; n],
        })
        .collect();
    let central = centre.iter().all(|z| {
        l.generators
            .elements()
            .iter()
            .all(|s| l.group.eq(&l.group.mul(z, s), &l.group.mul(s, z)))
    });
    let mut keys: Vec<Vec<u8>> = Vec::with_capacity(sum_zero.order() * centre.len());
    for g in sum_zero.elements() {
        for z in &centre {
            keys.push(l.group.mul(g, z).canonical_bytes());
        }
    }
    keys.sort_unstable();
    keys.dedup();
    let order = l.group.order().unwrap() as usize;
    Ok(CentralFactorization {
        n,
        p,
        order,
        sum_zero_order: sum_zero.order(),
        centre_order: centre.len(),
        central,
        bijective: keys.len() == order && sum_zero.order() * centre.len() == order,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoordinateWindow {
    pub n: usize,
    pub p: u64,
    pub radius: usize,
    /// Largest centred coordinate seen at each depth `r ≤ R`.
    pub max_coordinate: Vec<u64>,
    pub holds: bool,
}

/// Every element of `S̃^r` has vector coordinates in `[−r, r]` (centred mod p).
pub fn coordinate_window(n: usize, p: u64, radius: usize) -> Result<CoordinateWindow> {
    let l = symfp(n, p, SymFpVariant::L)?;
    let cap = order_cap().min(usize::MAX as u128) as usize;
    let ball = enumerate_ball(&l.group, &l.generators, Some(radius), cap);
    if ball.truncated() {
        return Err(LabError::Refused {
            what: "coordinate window ball".into(),
            size: cap as u128 + 1,
            cap: cap as u128,
        });
    }
    let mut max_coordinate = vec![0u64; ball.radius() + 1];
    for (i, x) in ball.elements().iter().enumerate() {
        if let Element::SymFp { vector, .. } = x {
            let r = ball.depth_of_index(i);
            for &v in vector {
                max_coordinate[r] = max_coordinate[r].max(v.min(p - v));
            }
        }
    }
    let holds = max_coordinate
        .iter()
        .enumerate()
        .all(|(r, &m)| m <= r as u64);
    Ok(CoordinateWindow {
        n,
        p,
        radius,
        max_coordinate,
        holds,
    })
}
