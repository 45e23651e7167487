//! Simple 2d polyhedra: strata, singular graphs, builders and handlebody moves.

pub mod gerbe;
pub mod tri3;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::{assemble, GluingSet, TwoComplex};
use crate::error::{Error, ErrorKind, Module, Result};
use gerbe::CechNerve;
use tri3::Triangulation3;

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Polyhedron, kind, pre, detail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeStratum {
    Nonsingular,
    Triple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexStratum {
    Regular,
    Trisection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strata {
    pub edges: Vec<EdgeStratum>,
    pub vertices: Vec<VertexStratum>,
}

/// A triangulated simple polyhedron.
///
/// Edge strata follow from face degrees. A vertex is a trisection vertex when
/// at least three triple-edge ends meet there, or when a builder marks the
/// centre of a four-triangle interchanger disc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyhedron", into = "RawPolyhedron")]
pub struct SimplePolyhedron {
    body: TwoComplex,
    strata: Strata,
    triangulation: Option<Triangulation3>,
}

#[derive(Serialize, Deserialize)]
struct RawPolyhedron {
    #[serde(flatten)]
    body: TwoComplex,
    strata: Strata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    triangulation: Option<Triangulation3>,
}

impl TryFrom<RawPolyhedron> for SimplePolyhedron {
    type Error = Error;
    fn try_from(r: RawPolyhedron) -> Result<Self> {
        let marked: Vec<usize> = r
            .strata
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == VertexStratum::Trisection)
            .map(|(v, _)| v)
            .collect();
        let p = SimplePolyhedron::new(r.body, &marked)?;
        if p.strata != r.strata {
            return Err(err(
                ErrorKind::Structural,
                "strata agree with the face degrees",
                "stored strata differ from the computed ones",
            ));
        }
        Ok(SimplePolyhedron {
            triangulation: r.triangulation,
            ..p
        })
    }
}

impl From<SimplePolyhedron> for RawPolyhedron {
    fn from(p: SimplePolyhedron) -> Self {
        RawPolyhedron {
            body: p.body,
            strata: p.strata,
            triangulation: p.triangulation,
        }
    }
}

/// Triple edges and the vertices they touch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularGraph {
    /// Body vertices in the graph.
    pub vertices: Vec<usize>,
    /// Body edges in the graph.
    pub edges: Vec<usize>,
    pub trisection_vertices: Vec<usize>,
}

impl SimplePolyhedron {
    /// Classify the strata of `body`; `marked` vertices are trisection vertices
    /// in addition to those found from triple edges.
    pub fn new(body: TwoComplex, marked: &[usize]) -> Result<Self> {
        let deg = body.edge_degrees();
        if let Some(e) = deg.iter().position(|&d| d == 0 || d > 3) {
            return Err(err(
                ErrorKind::Structural,
                "edges lie in one, two or three faces",
                format!("edge {e} lies in {} faces", deg[e]),
            ));
        }
        let edges: Vec<EdgeStratum> = deg
            .iter()
            .map(|&d| {
                if d == 3 {
                    EdgeStratum::Triple
                } else {
                    EdgeStratum::Nonsingular
                }
            })
            .collect();
        let mut ends = vec![0usize; body.n_vertices()];
        for (e, ed) in body.edges().iter().enumerate() {
            if edges[e] == EdgeStratum::Triple {
                ends[ed.src] += 1;
                ends[ed.dst] += 1;
            }
        }
        let bverts = body.boundary_vertices();
        for &v in marked {
            if v >= body.n_vertices() {
                return Err(err(
                    ErrorKind::Structural,
                    "marked vertices exist",
                    format!("vertex {v}"),
                ));
            }
            if bverts.contains(&v) && ends[v] < 3 {
                return Err(err(
                    ErrorKind::Structural,
                    "trisection vertices are interior",
                    format!("vertex {v}"),
                ));
            }
        }
        let vertices = (0..body.n_vertices())
            .map(|v| {
                if ends[v] >= 3 || marked.contains(&v) {
                    VertexStratum::Trisection
                } else {
                    VertexStratum::Regular
                }
            })
            .collect();
        Ok(SimplePolyhedron {
            body,
            strata: Strata { edges, vertices },
            triangulation: None,
        })
    }

    pub fn from_complex(body: TwoComplex) -> Result<Self> {
        Self::new(body, &[])
    }

    /// The dual spine of a closed 3-dimensional triangulation.
    pub fn spine_of(t: &Triangulation3) -> Result<Self> {
        let sp = t.spine()?;
        let mut p = Self::new(sp.complex, &sp.tet_vertices)?;
        p.triangulation = Some(t.clone());
        Ok(p)
    }

    pub fn body(&self) -> &TwoComplex {
        &self.body
    }

    pub fn strata(&self) -> &Strata {
        &self.strata
    }

    pub fn triangulation(&self) -> Option<&Triangulation3> {
        self.triangulation.as_ref()
    }

    pub fn trisection_vertices(&self) -> Vec<usize> {
        (0..self.strata.vertices.len())
            .filter(|&v| self.strata.vertices[v] == VertexStratum::Trisection)
            .collect()
    }

    pub fn triple_edges(&self) -> Vec<usize> {
        (0..self.strata.edges.len())
            .filter(|&e| self.strata.edges[e] == EdgeStratum::Triple)
            .collect()
    }

    pub fn singular_graph(&self) -> SingularGraph {
        let edges = self.triple_edges();
        let tris = self.trisection_vertices();
        let mut vs: BTreeSet<usize> = tris.iter().copied().collect();
        for &e in &edges {
            let ed = self.body.edge(e);
            vs.insert(ed.src);
            vs.insert(ed.dst);
        }
        SingularGraph {
            vertices: vs.into_iter().collect(),
            edges,
            trisection_vertices: tris,
        }
    }

    /// Nerve whose vertices are faces and whose triples are the face triples
    /// around triple edges.
    pub fn nerve(&self) -> CechNerve {
        let ef = self.body.edge_faces();
        let triples = self.triple_edges().into_iter().map(|e| {
            let f: Vec<usize> = ef[e].iter().map(|x| x.0).collect();
            [f[0], f[1], f[2]]
        });
        CechNerve::from_triples(
            self.body.faces().len(),
            triples.filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2]),
        )
    }

    /// Genera of the complementary handlebodies, known for spines: one ball
    /// per vertex of the dual triangulation.
    pub fn handlebody_type(&self) -> Option<Vec<usize>> {
        self.triangulation
            .as_ref()
            .map(|t| vec![0; t.vertex_classes()])
    }

    fn with_triangulation(t: &Triangulation3) -> Result<Self> {
        Self::spine_of(t)
    }

    fn need_triangulation(&self) -> Result<&Triangulation3> {
        self.triangulation.as_ref().ok_or_else(|| {
            err(
                ErrorKind::MoveInapplicable,
                "polyhedron is a spine with a dual triangulation",
                "no dual triangulation",
            )
        })
    }
}

/// Lune (0-2) move. `site = [t, f1, f2]`: the true vertex dual to
/// tetrahedron `t` and the two triple edges dual to its faces `f1`, `f2`.
pub fn handle_move_02(p: &SimplePolyhedron, site: &[usize]) -> Result<SimplePolyhedron> {
    let &[t, f1, f2] = site else {
        return Err(err(
            ErrorKind::MoveInapplicable,
            "site lists a tetrahedron and two faces",
            format!("{site:?}"),
        ));
    };
    SimplePolyhedron::with_triangulation(&p.need_triangulation()?.move_02(t, f1, f2)?)
}

/// Inverse lune move. `site = [a, b]`: the two true vertices of the lune.
pub fn handle_move_20(p: &SimplePolyhedron, site: &[usize]) -> Result<SimplePolyhedron> {
    let &[a, b] = site else {
        return Err(err(
            ErrorKind::MoveInapplicable,
            "site lists two tetrahedra",
            format!("{site:?}"),
        ));
    };
    SimplePolyhedron::with_triangulation(&p.need_triangulation()?.move_20(a, b)?)
}

/// 2-3 move. `site = [t, f]`: the triple edge dual to face `f` of `t`,
/// joining two distinct true vertices.
pub fn handle_move_23(p: &SimplePolyhedron, site: &[usize]) -> Result<SimplePolyhedron> {
    let &[t, f] = site else {
        return Err(err(
            ErrorKind::MoveInapplicable,
            "site lists a tetrahedron and a face",
            format!("{site:?}"),
        ));
    };
    SimplePolyhedron::with_triangulation(&p.need_triangulation()?.move_23(t, f)?)
}

/// 3-2 move. `site = [t, a, b]`: the region dual to edge `ab` of `t`, a
/// triangle bounded by three triple edges.
pub fn handle_move_32(p: &SimplePolyhedron, site: &[usize]) -> Result<SimplePolyhedron> {
    let &[t, a, b] = site else {
        return Err(err(
            ErrorKind::MoveInapplicable,
            "site lists a tetrahedron and an edge",
            format!("{site:?}"),
        ));
    };
    SimplePolyhedron::with_triangulation(&p.need_triangulation()?.move_32(t, a, b)?)
}

/// Four triangles around an interior vertex, the interchanger disc.
pub fn gamma_plus() -> SimplePolyhedron {
    let g = GluingSet::new()
        .glue((0, 1), (1, 2), 1)
        .glue((2, 1), (3, 2), 1)
        .glue((0, 0), (2, 0), 1)
        .glue((1, 0), (3, 0), 1);
    let body = assemble(4, &g).expect("interchanger gluing");
    let centre = body.root();
    SimplePolyhedron::new(body, &[centre]).expect("valid strata")
}

/// Three triangles sharing one edge.
pub fn triple_point() -> SimplePolyhedron {
    let g = GluingSet::new()
        .glue((0, 0), (1, 0), 1)
        .glue((0, 0), (2, 0), 1);
    SimplePolyhedron::from_complex(assemble(3, &g).expect("triple gluing")).expect("valid strata")
}

/// Spine of the one-tetrahedron, one-vertex 3-sphere: closed, one true
/// vertex, complement a single ball.
pub fn coordinate_planes_s3() -> SimplePolyhedron {
    SimplePolyhedron::spine_of(&Triangulation3::one_tet_s3()).expect("spine")
}

/// One vertex, three loops `a`, `b`, `c` and faces reading `a b c⁻¹` and `b a c⁻¹`.
pub fn torus_partition() -> SimplePolyhedron {
    use crate::complex::{Edge, Face};
    let edges = vec![
        Edge {
            src: 0,
            dst: 0,
            frame: 1
        };
        3
    ];
    let faces = vec![
        Face::from_segments([(0, true), (2, true), (1, true)], 1),
        Face::from_segments([(1, true), (2, true), (0, true)], -1),
    ];
    let body = TwoComplex::new(1, 0, edges, faces).expect("torus");
    SimplePolyhedron::from_complex(body).expect("valid strata")
}

pub fn triangle() -> SimplePolyhedron {
    SimplePolyhedron::from_complex(TwoComplex::triangle()).expect("valid strata")
}

pub fn square() -> SimplePolyhedron {
    SimplePolyhedron::from_complex(TwoComplex::square()).expect("valid strata")
}

/// Named polyhedron builders.
pub fn builder(name: &str) -> Option<SimplePolyhedron> {
    Some(match name {
        "triangle" => triangle(),
        "square" => square(),
        "fan" => SimplePolyhedron::from_complex(TwoComplex::fan()).ok()?,
        "gamma_plus" => gamma_plus(),
        "triple_point" => triple_point(),
        "coordinate_planes_s3" => coordinate_planes_s3(),
        "torus_partition" => torus_partition(),
        "doubled_triangle" => {
            SimplePolyhedron::from_complex(TwoComplex::triangle().double()).ok()?
        }
        "doubled_square" => SimplePolyhedron::from_complex(TwoComplex::square().double()).ok()?,
        _ => return None,
    })
}

pub const BUILDER_NAMES: &[&str] = &[
    "coordinate_planes_s3",
    "doubled_square",
    "doubled_triangle",
    "fan",
    "gamma_plus",
    "square",
    "torus_partition",
    "triangle",
    "triple_point",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_census() {
        let g = gamma_plus();
        assert_eq!(g.body().counts(), (5, 8, 4));
        assert_eq!(g.trisection_vertices().len(), 1);
        let t = triple_point();
        assert_eq!(t.triple_edges().len(), 1);
        assert!(!t.body().is_regular());
        assert_eq!(t.singular_graph().edges.len(), 1);
        let s = coordinate_planes_s3();
        assert!(s.body().is_closed());
        assert_eq!(s.trisection_vertices().len(), 1);
        assert_eq!(s.handlebody_type(), Some(vec![0]));
        assert!(triangle().singular_graph().edges.is_empty());
        let tor = torus_partition();
        assert_eq!(tor.body().counts(), (1, 3, 2));
        assert_eq!(tor.body().euler_characteristic(), 0);
    }

    #[test]
    fn lune_round_trip() {
        let s = coordinate_planes_s3();
        let t0 = s.triangulation().unwrap().clone();
        let p1 = handle_move_02(&s, &[0, 0, 2]).unwrap();
        assert_eq!(p1.trisection_vertices().len(), 3);
        assert_eq!(p1.triple_edges().len(), s.triple_edges().len() + 8);
        let back = handle_move_20(&p1, &[1, 2]).unwrap();
        assert!(back.triangulation().unwrap().is_isomorphic(&t0));
        assert!(back.body().is_isomorphic(s.body()));
    }

    #[test]
    fn two_three_round_trip() {
        let s = coordinate_planes_s3();
        let p1 = handle_move_02(&s, &[0, 0, 2]).unwrap();
        let t1 = p1.triangulation().unwrap().clone();
        // find a face between distinct tetrahedra
        let (t, f) = (0..t1.size())
            .flat_map(|t| (0..4).map(move |f| (t, f)))
            .find(|&(t, f)| t1.adj[t][f].map_or(false, |(u, _)| u != t))
            .unwrap();
        let p2 = handle_move_23(&p1, &[t, f]).unwrap();
        let t2 = p2.triangulation().unwrap();
        assert_eq!(t2.size(), 4);
        assert!(t2.is_closed_manifold());
        // the new edge joins the three new tetrahedra (last three indices)
        let n = t2.size();
        let back = handle_move_32(&p2, &[n - 1, 0, 1]).unwrap();
        assert!(back.triangulation().unwrap().is_isomorphic(&t1));
    }

    #[test]
    fn serde_round_trip() {
        for name in BUILDER_NAMES {
            let p = builder(name).unwrap();
            let js = serde_json::to_string(&p).unwrap();
            let q: SimplePolyhedron = serde_json::from_str(&js).unwrap();
            assert_eq!(p, q, "{name}");
        }
    }
}
