//! Everything the name lookup knows about.
use twohol::io::builtin_gallery;

fn main() {
    for e in builtin_gallery() {
        println!(
            "{:<24} {:<10} {:?} V={} E={} F={}",
            e.name, e.kind, e.signature, e.vertices, e.edges, e.faces
        );
    }
}
