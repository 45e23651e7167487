//! Pachner moves on discs and handle moves on a spine of the 3-sphere.
use twohol::complex::TwoComplex;
use twohol::group;
use twohol::ribbon::Ribbon;
use twohol::selftest::handle_sequence;
use twohol::wilson::{evaluate, partition_function};

fn main() {
    let cm = group::cm_02();
    let c = TwoComplex::square();
    let flags = c.boundary_flags();
    let e = (0..c.edges().len()).find(|&e| !flags[e]).unwrap();
    let before = evaluate(&cm, &Ribbon::filling(c.clone()).unwrap(), None).unwrap();
    let after = evaluate(
        &cm,
        &Ribbon::filling(c.pachner_flip(e).unwrap()).unwrap(),
        None,
    )
    .unwrap();
    println!("flip of edge {e}: state unchanged {}", before == after);
    for p in handle_sequence() {
        println!(
            "{:?} Z = {}",
            p.body().counts(),
            partition_function(&cm, &p, None).unwrap()
        );
    }
}
