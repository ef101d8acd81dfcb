//! Exact convolution powers of the uniform generator measure: distance
//! curves, mixing times, the basic facts about them and the quadratic trend.

use cayley_lab::mixing::{mixing_times, quadratic_scan, verify_basic_mixing};
use cayley_lab::zoo::construct_family;

fn main() -> cayley_lab::Result<()> {
    let g = construct_family("cyclic:16")?.graph()?;
    let m = mixing_times(&g)?;
    println!(
        "cyclic:16  T1={:?} T2={:?} Tinf={:?} Trel={:.3}",
        m.t1, m.t2, m.tinf, m.t_rel
    );
    for n in [0, 8, 32, 64] {
        if n < m.curves.len() {
            println!(
                "  n={n:<3} d1={:.6} d2={:.6} dinf={:.6}",
                m.curves.d1[n], m.curves.d2[n], m.curves.dinf[n]
            );
        }
    }

    for spec in ["heis:5", "lamplighter:4", "symfp:n=3,p=5,variant=G"] {
        let v = verify_basic_mixing(&construct_family(spec)?.graph()?)?;
        let status: Vec<String> = v
            .items
            .iter()
            .map(|i| format!("{}:{:?}", i.item, i.status))
            .collect();
        println!("{spec:<26} {}", status.join(" "));
    }

    let lamps: Vec<_> = (3..=6)
        .map(|m| construct_family(&format!("lamplighter:{m}"))?.graph())
        .collect::<Result<_, _>>()?;
    let scan = quadratic_scan(&lamps, 16.0)?;
    for r in &scan.rows {
        println!(
            "{:<14} gamma={:<3} Tinf/gamma^2={:.4}",
            r.group,
            r.gamma,
            r.tinf_over_gamma2.unwrap()
        );
    }
    println!("strictly increasing: {:?}", scan.strictly_increasing);
    Ok(())
}
