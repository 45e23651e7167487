//! Stacking ribbons agrees with composing their states.
use twohol::group;
use twohol::ribbon::{b_times, identity_cylinder, stack_auto};
use twohol::wilson::{compose_states, evaluate, Normalization};

fn main() {
    let cm = group::cm_id2();
    let norm = Normalization::for_cm(&cm);
    let r = b_times();
    let id = identity_cylinder(r.target()).unwrap();
    let glued = evaluate(&cm, &stack_auto(&r, &id).unwrap(), None).unwrap();
    let composed = compose_states(
        &norm,
        &cm,
        &evaluate(&cm, &r, None).unwrap(),
        &evaluate(&cm, &id, None).unwrap(),
    )
    .unwrap();
    println!(
        "b_times then identity: glued == composed is {}",
        glued == composed
    );
}
