//! The four progression models in free nilpotent groups, their nesting,
//! properness and power laws, plus commutator depth in Heisenberg groups.

use std::time::Instant;

use cayley_lab::group::unitriangular_element;
use cayley_lab::nilprog::{
    commutator_depth, enumerate_progression, hall_basis, verify_nesting, verify_power_laws,
    verify_properness, ProgressionKind, ProgressionSpec,
};
use cayley_lab::GroupHandle;

fn main() -> cayley_lab::Result<()> {
    let basis = hall_basis(2, 3)?;
    let names: Vec<String> = basis.items.iter().map(|c| c.to_string()).collect();
    println!("hall basis (2,3): {}", names.join(", "));

    for (r, s, side) in [
        (2, 2, vec![1, 1]),
        (2, 2, vec![2, 2]),
        (2, 3, vec![1, 1]),
        (3, 2, vec![1, 1, 1]),
    ] {
        let t = Instant::now();
        let spec = ProgressionSpec::free(ProgressionKind::Ordered, r, s, &side)?;
        let rep = verify_nesting(&spec)?;
        let c = &rep.cardinalities;
        println!(
            "nesting ({r},{s},{side:?}): {} {} {} {} holds={} [{:.2?}]",
            c.ordered,
            c.nilprogression,
            c.nilpotent,
            c.nilcomplete,
            rep.holds(),
            t.elapsed()
        );
    }

    let spec = ProgressionSpec::free(ProgressionKind::Nilpotent, 2, 2, &[3, 3])?;
    let rep = verify_properness(&spec)?;
    println!(
        "proper (2,2,[3,3]): |P|={} formula={} proper={}",
        rep.cardinality, rep.formula, rep.proper
    );

    for side in [vec![1, 1], vec![2, 1]] {
        let t = Instant::now();
        let spec = ProgressionSpec::free(ProgressionKind::Nilcomplete, 2, 2, &side)?;
        let rep = verify_power_laws(&spec, 3, 2, 8)?;
        println!(
            "powers L={side:?}: holds={} m={:?} |X|={} [{:.2?}]",
            rep.holds(),
            rep.minimal_power_m,
            rep.cover_size,
            t.elapsed()
        );
    }

    for p in [11, 31] {
        let t = Instant::now();
        let g = GroupHandle::from_text(&format!("heis:{p}"))?;
        let x = unitriangular_element(3, &[(0, 1, 1)], p);
        let y = unitriangular_element(3, &[(1, 2, 1)], p);
        let spec = ProgressionSpec::new(
            ProgressionKind::Nilprogression,
            g.clone(),
            vec![x, y],
            &[1, 1],
            2,
        )?;
        let set = enumerate_progression(&spec)?.set;
        let d = commutator_depth(&g, &set)?;
        println!(
            "commutator depth p={p}: m={} gamma={} m/sqrt(gamma)={:.4} [{:.2?}]",
            d.m,
            d.gamma,
            d.ratio,
            t.elapsed()
        );
    }
    Ok(())
}
