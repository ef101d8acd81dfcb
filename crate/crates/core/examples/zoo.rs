//! The permutation-vector family: diameters against their lower bounds, the
//! Schreier generators of the even subgroup, and the central splitting.

use cayley_lab::zoo::{
    central_factorization, coordinate_window, families, sharpness_family, verify_lgg,
};

fn main() -> cayley_lab::Result<()> {
    for f in families() {
        println!("{:<12} {:<36} {}", f.family, f.example, f.description);
    }
    println!();
    for (n, p) in [(3, 7), (4, 5)] {
        let r = verify_lgg(n, p)?;
        println!(
            "n={n} p={p}: |L|={} |G'|={} |G|={}  diameters {} {} {}  c_meas={:.3}",
            r.orders[0], r.orders[1], r.orders[2], r.gamma, r.gamma_prime, r.gamma0, r.c_meas
        );
        for b in &r.lower_bounds {
            println!(
                "    {:<28} {:>8.4} <= {:<4} {}",
                b.name, b.value, b.measured, b.holds
            );
        }
        let s = &r.schreier;
        println!(
            "    Schreier: d={} |S|={} |S0|={} max length {} diam {} -> {}  holds={}",
            s.index,
            s.parent_k,
            s.sub_k,
            s.max_generator_length,
            s.gamma,
            s.gamma_sub,
            s.holds()
        );
    }
    let c = central_factorization(3, 5)?;
    println!(
        "\nL_3 = G'_3 x Z over F_5: {} = {} * {}  central={} bijective={}",
        c.order, c.sum_zero_order, c.centre_order, c.central, c.bijective
    );
    let w = coordinate_window(3, 23, 10)?;
    println!(
        "coordinate window (3,23), r <= 10: {:?} holds={}",
        w.max_coordinate, w.holds
    );

    for f in sharpness_family(0.5, &[4, 9, 16])? {
        println!(
            "sharpness member {} with |S| = {}",
            f.spec,
            f.generators.len()
        );
    }
    Ok(())
}
