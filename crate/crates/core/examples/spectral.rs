//! Spectral gap, Cheeger constant and the chain of inequalities linking
//! them to the diameter.

use cayley_lab::spectral::{
    cheeger, lambda1_with, rayleigh_probe, verify_spectral_inequalities, Laplacian, SolverChoice,
    DEFAULT_EXACT_CAP,
};
use cayley_lab::zoo::construct_family;

fn main() -> cayley_lab::Result<()> {
    for n in [8, 12, 16] {
        let g = construct_family(&format!("cyclic:{n}"))?.graph()?;
        let lap = Laplacian::of(&g);
        let dense = lambda1_with(&lap, 1e-10, SolverChoice::Dense)?;
        let lanczos = lambda1_with(&lap, 1e-10, SolverChoice::Iterative)?;
        let h = cheeger(&g, DEFAULT_EXACT_CAP)?;
        let exact = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
        println!(
            "C{n:<3} lambda1 dense {:.12} lanczos {:.12} closed form {:.12}  h = {:?}",
            dense.lambda1,
            lanczos.lambda1,
            exact,
            h.value()
        );
    }

    println!();
    for spec in [
        "heis:5",
        "lamplighter:5",
        "symfp:n=3,p=5,variant=Gprime",
        "ut:dim=4,p=3",
    ] {
        let g = construct_family(spec)?.graph()?;
        let chain = verify_spectral_inequalities(&g, DEFAULT_EXACT_CAP)?;
        println!(
            "{spec:<30} |G|={:<5} lambda1={:.6} h in [{:.4}, {:.4}] all hold: {}",
            chain.order,
            chain.spectrum.lambda1,
            chain.h.lower,
            chain.h.upper,
            chain.all_hold()
        );
        for ineq in &chain.inequalities {
            println!("    {:<44} {:?}", ineq.name, ineq.status);
        }
    }

    let g = construct_family("cyclic:12")?.graph()?;
    let r = rayleigh_probe(&g)?;
    println!(
        "\nRayleigh probe on C12: {:.4} <= bound {:.4}",
        r.quotient, r.bound
    );
    Ok(())
}
