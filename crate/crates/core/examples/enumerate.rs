//! Count and list fake-flat decorations of small complexes.
use twohol::complex::TwoComplex;
use twohol::group;
use twohol::holonomy::{count_fake_flat, enumerate_fake_flat};

fn main() {
    let cm = group::cm_02();
    for (name, c) in [
        ("triangle", TwoComplex::triangle()),
        ("square", TwoComplex::square()),
        ("fan", TwoComplex::fan()),
    ] {
        let n = c.edges().len();
        println!(
            "{name}: {} fake-flat decorations",
            count_fake_flat(&cm, &c, &vec![None; n]).unwrap()
        );
    }
    let c = TwoComplex::triangle();
    let (count, it) = enumerate_fake_flat(&cm, &c, &[Some(1), None, None]).unwrap();
    println!("triangle with edge 0 fixed to 1: {count}");
    for d in it {
        println!("  edges {:?} faces {:?}", d.edges, d.faces);
    }
}
