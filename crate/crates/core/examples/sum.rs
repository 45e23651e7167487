//! Connected sum of ribbons along markings against the collar tensor of states.
use twohol::group;
use twohol::ribbon::{cap, connected_sum};
use twohol::wilson::{evaluate, tensor_with_collar};

fn main() {
    let cm = group::cm_s3();
    let (a, b) = (cap().dagger2(), cap());
    let glued = evaluate(&cm, &connected_sum(&a, 0, &b, 0).unwrap(), None).unwrap();
    let tensored = tensor_with_collar(
        &cm,
        &evaluate(&cm, &a, None).unwrap(),
        0,
        &evaluate(&cm, &b, None).unwrap(),
        0,
    )
    .unwrap();
    println!(
        "cap # cap: {} entries, matches collar tensor: {}",
        glued.entries.len(),
        glued == tensored
    );
}
