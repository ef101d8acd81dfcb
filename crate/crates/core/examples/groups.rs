//! Group arithmetic from text specs: products, inverses, commutators and
//! the canonical encoding, across every backend.

use cayley_lab::group::{canonical_encode, unitriangular_element};
use cayley_lab::zoo::construct_family;
use cayley_lab::{Element, GroupHandle};

fn main() -> cayley_lab::Result<()> {
    let z = GroupHandle::from_text("cyclic:12")?;
    let s = z.mul(&Element::Residues(vec![7]), &Element::Residues(vec![8]));
    println!("cyclic:12  7 + 8 = {s:?}");

    let h = GroupHandle::from_text("heis:7")?;
    let x = unitriangular_element(3, &[(0, 1, 1)], 7);
    let y = unitriangular_element(3, &[(1, 2, 1)], 7);
    let c = h.commutator(&x, &y);
    println!(
        "heis:7     [x,y] = {c:?}  central: {}",
        h.eq(&h.mul(&c, &x), &h.mul(&x, &c))
    );

    let f = GroupHandle::from_text("freenil:r=2,s=3")?;
    let a = f.free_generator(0).unwrap();
    let b = f.free_generator(1).unwrap();
    let ab = f.commutator(&a, &b);
    println!(
        "freenil    [a,b] encodes to {} bytes",
        canonical_encode(&ab).len()
    );
    println!(
        "           [a,b]^-1 = [b,a]: {}",
        f.eq(&f.inv(&ab), &f.commutator(&b, &a))
    );

    for spec in [
        "abelian:4,4,9",
        "ut:dim=4,p=3",
        "lamplighter:8",
        "symfp:n=4,p=5,variant=G",
        "product(lamplighter:3)x(cyclic:8)",
    ] {
        let fam = construct_family(spec)?;
        println!(
            "{:<36} |G| = {:>8}  |S| = {:>2}  {}",
            fam.spec.to_string(),
            fam.group.order().unwrap(),
            fam.generators.len(),
            fam.description
        );
    }
    Ok(())
}
