//! Growth of balls: exact profiles, doubling scans, flatness, moderate
//! growth fits and the Ruzsa covering witness.

use cayley_lab::growth::{
    approximate_group_witness, ball_growth, doubling_scan, doubling_window, flatness, moderate_fit,
};
use cayley_lab::zoo::construct_family;

fn main() -> cayley_lab::Result<()> {
    let heis = construct_family("heis:31")?;
    let p = ball_growth(&heis.group, &heis.generators, None)?;
    println!(
        "heis:31 diameter {:?}, |G| {}",
        p.diameter,
        p.ball_sizes.last().unwrap()
    );
    println!(
        "  slope of log|S^n| over n in [4,12]: {:.3}",
        p.loglog_slope(4, 12).unwrap()
    );
    let scan = doubling_scan(&p)?;
    println!("  theta_hat (m >= 4): {:.3}", scan.theta_hat(4).unwrap());
    println!(
        "  first n with |S^(2n+1)| <= 16|S^n|: {:?}",
        scan.first_scale(16.0)
    );
    let w = doubling_window(&p, 0.5, 0.5)?;
    println!(
        "  window [{}, {}] flat={} scale={:?}",
        w.lo, w.hi, w.flat, w.scale
    );

    println!();
    println!(
        "{:<16} {:>6} {:>5} {:>10} {:>12}",
        "group", "|G|", "diam", "eps_star", "A (d=1)"
    );
    for spec in [
        "cyclic:20",
        "cyclic:100",
        "heis:11",
        "lamplighter:8",
        "symfp:n=3,p=7,variant=L",
    ] {
        let f = construct_family(spec)?;
        let p = ball_growth(&f.group, &f.generators, None)?;
        let flat = flatness(&p)?;
        let fit = moderate_fit(&p, 1.0)?;
        println!(
            "{:<16} {:>6} {:>5} {:>10.4} {:>12}",
            spec,
            flat.order,
            flat.gamma,
            flat.eps_star,
            fit.a_exact.unwrap()
        );
    }

    println!();
    for (spec, n) in [("cyclic:100", 5), ("heis:11", 3)] {
        let f = construct_family(spec)?;
        let r = approximate_group_witness(&f.group, &f.generators, n)?;
        println!(
            "Ruzsa {spec} n={n}: |X| = {} <= {}/{} ; disjoint={} covers={}",
            r.size, r.ball_5n, r.ball_n, r.disjoint, r.covers
        );
    }
    Ok(())
}
