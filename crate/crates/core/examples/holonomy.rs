//! Total surface holonomy along a source path, histogrammed over decorations.
use std::collections::BTreeMap;

use twohol::complex::TwoComplex;
use twohol::group;
use twohol::holonomy::{enumerate_fake_flat, total_surface_holonomy};

fn main() {
    let cm = group::cm_s3();
    let sp = TwoComplex::square().make_unbroken().unwrap();
    println!("source path {:?}", sp.path);
    let (_, it) =
        enumerate_fake_flat(&cm, &sp.complex, &vec![None; sp.complex.edges().len()]).unwrap();
    let mut hist: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for d in it {
        let x = total_surface_holonomy(&cm, &sp, &d).unwrap();
        *hist.entry((x.h, x.g)).or_default() += 1;
    }
    for ((h, g), n) in hist {
        println!("(h={h}, g={g}) {n}");
    }
}
