//! Gerbe data: cocycle check, coboundaries and a twisted partition function.
use num_rational::Rational64;
use twohol::group;
use twohol::polyhedron::gerbe::{check_pentagon, coboundary1, Cochain1, GerbeDatum};
use twohol::polyhedron::{self};
use twohol::wilson::partition_function;

fn main() {
    let p = polyhedron::coordinate_planes_s3();
    let nerve = p.nerve();
    let mut gamma = Cochain1::default();
    for (k, pair) in nerve.pairs().into_iter().enumerate() {
        for h in 0..2 {
            gamma
                .values
                .insert((vec![h], pair), Rational64::new(k as i64, 4));
        }
    }
    let sigma: GerbeDatum = coboundary1(&gamma, &nerve);
    println!(
        "coboundary is a cocycle: {}",
        check_pentagon(&sigma, &nerve).unwrap()
    );
    let cm = group::cm_02();
    println!("Z untwisted {}", partition_function(&cm, &p, None).unwrap());
    match partition_function(&cm, &p, Some(&sigma)) {
        // Triple points carry no orientation sign, so even a coboundary twist
        // can move Z.
        Ok(z) => println!("Z twisted by a coboundary {z}"),
        Err(e) => println!("twisted evaluation refused: {e}"),
    }
}
