pub mod complex;
pub mod error;
pub mod gauge;
pub mod group;
pub mod holonomy;
pub mod io;
pub mod polyhedron;
pub mod ribbon;
pub mod scalar;
pub mod selftest;
pub mod wilson;
