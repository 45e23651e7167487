//! Gauge orbits on the torus: conjugacy classes of commuting pairs.
use twohol::gauge::orbit_count;
use twohol::group::{CrossedModule, FiniteGroup};
use twohol::polyhedron;

fn main() {
    let g = FiniteGroup::symmetric3();
    let cm = CrossedModule::trivial_fiber(g.clone());
    let torus = polyhedron::torus_partition();
    let census = orbit_count(&cm, torus.body(), false).unwrap();
    println!(
        "commuting pairs {}, orbits {}, sizes {:?}",
        g.commuting_pairs(),
        census.orbits,
        census.sizes
    );
}
