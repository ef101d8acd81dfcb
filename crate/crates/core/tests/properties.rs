use std::sync::OnceLock;

use cayley_lab::cayley::CayleyGraph;
use cayley_lab::growth::ball_growth;
use cayley_lab::mixing::Walk;
use cayley_lab::nilprog::{enumerate_progression, hall_basis, ProgressionKind, ProgressionSpec};
use cayley_lab::report::{parse_json, to_json};
use cayley_lab::spectral::{boundary, lambda1_with, Laplacian, SolverChoice};
use cayley_lab::zoo::{construct_family, FamilyInstance};
use cayley_lab::Element;
use num_bigint::BigInt;
use proptest::prelude::*;

const SPECS: &[&str] = &[
    "cyclic:30",
    "abelian:4,6",
    "heis:5",
    "ut:dim=4,p=3",
    "lamplighter:5",
    "symfp:n=4,p=5,variant=G",
    "freenil:r=2,s=3",
    "product(lamplighter:3)x(heis:3)",
];

fn families() -> &'static Vec<FamilyInstance> {
    static F: OnceLock<Vec<FamilyInstance>> = OnceLock::new();
    F.get_or_init(|| SPECS.iter().map(|s| construct_family(s).unwrap()).collect())
}

fn word(f: &FamilyInstance, letters: &[usize]) -> Element {
    let gens = f.generators.elements();
    f.group
        .product(letters.iter().map(|&i| &gens[i % gens.len()]))
}

fn config() -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(48)
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn associativity_and_inverses(
        fi in 0..SPECS.len(),
        a in prop::collection::vec(0usize..64, 0..12),
        b in prop::collection::vec(0usize..64, 0..12),
        c in prop::collection::vec(0usize..64, 0..12),
    ) {
        let f = &families()[fi];
        let g = &f.group;
        let (x, y, z) = (word(f, &a), word(f, &b), word(f, &c));
        prop_assert!(g.eq(&g.mul(&g.mul(&x, &y), &z), &g.mul(&x, &g.mul(&y, &z))));
        prop_assert!(g.is_identity(&g.mul(&x, &g.inv(&x))));
        prop_assert!(g.is_identity(&g.mul(&g.inv(&x), &x)));
        prop_assert!(g.eq(&g.inv(&g.mul(&x, &y)), &g.mul(&g.inv(&y), &g.inv(&x))));
        prop_assert!(g.is_valid(&x));
    }

    #[test]
    fn encoding_round_trip(fi in 0..SPECS.len(), a in prop::collection::vec(0usize..64, 0..24)) {
        let f = &families()[fi];
        let x = word(f, &a);
        let bytes = x.canonical_bytes();
        let back = f.group.decode(&bytes).unwrap();
        prop_assert!(f.group.eq(&back, &x));
        prop_assert_eq!(back.canonical_bytes(), bytes);
    }

    #[test]
    fn boundary_symmetric(mask in prop::collection::vec(any::<bool>(), 160)) {
        let g = construct_family("lamplighter:5").unwrap().graph().unwrap();
        let lap = Laplacian::of(&g);
        let comp: Vec<bool> = mask.iter().map(|b| !b).collect();
        prop_assert_eq!(boundary(&lap, &mask), boundary(&lap, &comp));
    }

    #[test]
    fn rayleigh_dominates_gap(values in prop::collection::vec(-1.0f64..1.0, 125)) {
        let g = construct_family("heis:5").unwrap().graph().unwrap();
        let lap = Laplacian::of(&g);
        let l1 = lambda1_with(&lap, 1e-10, SolverChoice::Dense).unwrap().lambda1;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let f: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let norm: f64 = f.iter().map(|v| v * v).sum();
        prop_assume!(norm > 1e-6);
        prop_assert!(lap.energy(&f) / norm >= l1 - 1e-9);
    }

    #[test]
    fn json_round_trip(fi in 0..6usize) {
        let g = construct_family(SPECS[fi]).unwrap().graph().unwrap();
        let rep = lambda1_with(&Laplacian::of(&g), 1e-10, SolverChoice::Auto).unwrap();
        let text = to_json(&rep).unwrap();
        let value = parse_json(&text).unwrap();
        prop_assert_eq!(value["lambda1"].as_f64().unwrap(), rep.lambda1);
        prop_assert_eq!(to_json(&value).unwrap(), text);
    }
}

#[test]
fn large_coefficients_round_trip() {
    let g = construct_family("freenil:r=2,s=3").unwrap().group;
    let x = g.free_generator(0).unwrap();
    let big = g.pow(&g.pow(&x, 1 << 35), 1 << 35);
    if let Element::Polynomial(c) = &big {
        assert!(c.contains(&(BigInt::from(1) << 70)));
    }
    let back = g.decode(&big.canonical_bytes()).unwrap();
    assert!(g.eq(&back, &big));
    assert!(g.is_identity(&g.mul(&big, &g.inv(&big))));
}

#[test]
fn ball_sizes_submultiplicative() {
    for spec in SPECS {
        let f = construct_family(spec).unwrap();
        let radius = if f.group.is_finite() { None } else { Some(5) };
        let p = ball_growth(&f.group, &f.generators, radius).unwrap();
        p.check_invariants().unwrap();
    }
}

fn necklaces(r: usize, w: usize) -> usize {
    fn mobius(n: usize) -> i64 {
        let (mut n, mut m, mut p) = (n, 1i64, 2);
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            -m
        } else {
            m
        }
    }
    let total: i64 = (1..=w)
        .filter(|d| w.is_multiple_of(*d))
        .map(|d| mobius(d) * (r as i64).pow((w / d) as u32))
        .sum();
    (total / w as i64) as usize
}

#[test]
fn basic_commutator_counts_match_witt() {
    for r in 1..=4 {
        for s in 1..=4 {
            let counts = hall_basis(r, s).unwrap().weight_counts();
            let want: Vec<usize> = (1..=s).map(|w| necklaces(r, w)).collect();
            assert_eq!(counts, want, "rank {r} step {s}");
        }
    }
}

#[test]
fn nilprogression_closed_under_inverse() {
    for side in [[1u64, 1], [2, 1], [2, 2]] {
        let spec = ProgressionSpec::free(ProgressionKind::Nilprogression, 2, 2, &side).unwrap();
        let set = enumerate_progression(&spec).unwrap().set;
        for x in set.elements() {
            assert!(set.contains(&spec.group.inv(x)));
        }
    }
}

#[test]
fn self_loops_leave_the_gap_alone() {
    for spec in ["cyclic:16", "heis:3", "lamplighter:4"] {
        let g = construct_family(spec).unwrap().graph().unwrap();
        let lap = Laplacian::of(&g);
        let a = lambda1_with(&lap, 1e-12, SolverChoice::Dense)
            .unwrap()
            .lambda1;
        let b = lambda1_with(&lap.without_self_loops(), 1e-12, SolverChoice::Dense)
            .unwrap()
            .lambda1;
        assert!((a - b).abs() < 1e-10, "{spec}: {a} vs {b}");
    }
}

#[test]
fn lanczos_agrees_with_dense() {
    for spec in [
        "cyclic:30",
        "heis:5",
        "lamplighter:5",
        "abelian:4,6",
        "symfp:n=3,p=5,variant=Gprime",
        "product(cyclic:4)x(heis:3)",
    ] {
        let g = construct_family(spec).unwrap().graph().unwrap();
        assert!(g.order() <= 500);
        let lap = Laplacian::of(&g);
        let d = lambda1_with(&lap, 1e-10, SolverChoice::Dense)
            .unwrap()
            .lambda1;
        let l = lambda1_with(&lap, 1e-10, SolverChoice::Iterative)
            .unwrap()
            .lambda1;
        assert!((d - l).abs() <= 1e-8 * d.max(1.0), "{spec}: {d} vs {l}");
    }
}

#[test]
fn walk_stays_stochastic_and_symmetric() {
    for spec in ["cyclic:12", "lamplighter:4", "symfp:n=3,p=5,variant=G"] {
        let g: CayleyGraph = construct_family(spec).unwrap().graph().unwrap();
        let mut w = Walk::new(&g);
        for target in [1, 5, 20] {
            while w.step_index() < target {
                w.advance();
            }
            let mu = w.distribution();
            let total: f64 = mu.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(mu.iter().all(|&m| m >= -1e-15));
            for (i, x) in g.elements().iter().enumerate() {
                let j = g.index_of(&g.group().inv(x)).unwrap();
                assert!((mu[i] - mu[j]).abs() < 1e-14, "{spec} n={target}");
            }
        }
    }
}
