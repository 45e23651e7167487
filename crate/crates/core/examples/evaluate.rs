//! Wilson states of a few gallery ribbons.
use twohol::group;
use twohol::ribbon::gallery_ribbon;
use twohol::wilson::evaluate;

fn main() {
    let cm = group::cm_02();
    for name in ["triangle_disc", "cup", "b_times", "saddle"] {
        let r = gallery_ribbon(name).unwrap();
        let s = evaluate(&cm, &r, None).unwrap();
        println!(
            "{name}: signature {:?}, {} nonzero entries",
            r.signature(),
            s.entries.len()
        );
    }
    let s = evaluate(&cm, &gallery_ribbon("cup").unwrap(), None).unwrap();
    println!("{}", serde_json::to_string(&s).unwrap());
}
