//! Orientation pairings and the reflection-positivity Gram matrices.
use twohol::group;
use twohol::ribbon::cup;
use twohol::selftest::closing_families;
use twohol::wilson::{evaluate, orientation_pairing, reflection_positivity_check, Normalization};

fn main() {
    let cm = group::cm_s3();
    let norm = Normalization::for_cm(&cm);
    let r = cup();
    let v = orientation_pairing(
        &norm,
        &cm,
        &evaluate(&cm, &r.dagger1(), None).unwrap(),
        &evaluate(&cm, &r, None).unwrap(),
    )
    .unwrap();
    println!("<cup, cup> = {v}");
    for (names, rs) in closing_families() {
        let rep = reflection_positivity_check(&cm, &rs).unwrap();
        println!("{names:?}: psd {}", rep.is_psd);
    }
}
