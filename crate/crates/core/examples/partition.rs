//! Partition functions of closed polyhedra.
use twohol::complex::TwoComplex;
use twohol::group;
use twohol::polyhedron::{self, SimplePolyhedron};
use twohol::wilson::partition_function;

fn main() {
    let sphere = SimplePolyhedron::from_complex(TwoComplex::triangle().double()).unwrap();
    for (name, cm) in group::samples() {
        let z = partition_function(&cm, &sphere, None).unwrap();
        let t = partition_function(&cm, &polyhedron::torus_partition(), None).unwrap();
        println!("{name:<10} sphere {z}  torus {t}");
    }
}
