//! Marked 2-ribbons as combinatorial presentations.
//!
//! A ribbon is a simple polyhedron together with two boundary graphs (source
//! and target layers) embedded as degree-one edges of the body, framed
//! anchors on those graphs, and marking paths joining anchors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::{TwoComplex, UnionFind};
use crate::error::{Error, ErrorKind, Module, Result};
use crate::polyhedron::SimplePolyhedron;

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Ribbon, kind, pre, detail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Source,
    Target,
}

impl Layer {
    pub fn other(self) -> Layer {
        match self {
            Layer::Source => Layer::Target,
            Layer::Target => Layer::Source,
        }
    }
}

/// A directed graph with framed anchors: incoming anchors carry framing `+1`,
/// outgoing anchors `−1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub incoming: Vec<usize>,
    #[serde(default)]
    pub outgoing: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<usize>,
}

/// Vertex and edge bijection between two boundary graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphIso {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl GraphIso {
    pub fn identity(g: &BoundaryGraph) -> Self {
        GraphIso {
            vertices: (0..g.vertices).collect(),
            edges: (0..g.edges.len()).collect(),
        }
    }
}

impl BoundaryGraph {
    pub fn new(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        incoming: Vec<usize>,
        outgoing: Vec<usize>,
    ) -> Result<Self> {
        let g = BoundaryGraph {
            vertices,
            edges,
            incoming,
            outgoing,
            base_point: None,
        };
        g.check()?;
        Ok(g)
    }

    pub fn check(&self) -> Result<()> {
        if self
            .edges
            .iter()
            .any(|&(a, b)| a >= self.vertices || b >= self.vertices)
        {
            return Err(err(
                ErrorKind::Structural,
                "graph edges join graph vertices",
                "endpoint out of range",
            ));
        }
        let mut seen = BTreeSet::new();
        for &v in self.incoming.iter().chain(&self.outgoing) {
            if v >= self.vertices || !seen.insert(v) {
                return Err(err(
                    ErrorKind::Structural,
                    "anchor vertices are distinct graph vertices",
                    format!("anchor {v}"),
                ));
            }
        }
        if self.base_point.map_or(false, |b| b >= self.vertices) {
            return Err(err(
                ErrorKind::Structural,
                "base point is a graph vertex",
                "out of range",
            ));
        }
        Ok(())
    }

    pub fn empty() -> Self {
        BoundaryGraph {
            vertices: 0,
            edges: vec![],
            incoming: vec![],
            outgoing: vec![],
            base_point: None,
        }
    }

    /// Two vertices joined by `0 → 1` and `1 → 0`; vertex 0 incoming, vertex 1 outgoing.
    pub fn circle() -> Self {
        Self::new(2, vec![(0, 1), (1, 0)], vec![0], vec![1]).expect("circle")
    }

    /// The circle with both anchors outgoing-first: framings of [`circle`](Self::circle) flipped.
    pub fn c_minus() -> Self {
        Self::circle().flipped()
    }

    pub fn c_plus() -> Self {
        Self::circle()
    }

    /// A single edge `0 → 1` between an incoming and an outgoing anchor.
    pub fn unit_arc() -> Self {
        Self::new(2, vec![(0, 1)], vec![0], vec![1]).expect("arc")
    }

    /// Middle edge `p → q` with a loop at each end.
    pub fn b_plus() -> Self {
        Self::new(2, vec![(0, 1), (0, 0), (1, 1)], vec![0], vec![1]).expect("b_plus")
    }

    /// Middle edge `p → q` with two crossing edges `p → q`, `q → p`.
    pub fn b_times() -> Self {
        Self::new(2, vec![(0, 1), (0, 1), (1, 0)], vec![0], vec![1]).expect("b_times")
    }

    /// One vertex with two loops.
    pub fn torus_standard() -> Self {
        Self::new(1, vec![(0, 0), (0, 0)], vec![], vec![]).expect("torus graph")
    }

    /// A cycle on `n` vertices `0 → 1 → … → 0` without anchors.
    pub fn cycle(n: usize) -> Self {
        Self::new(
            n,
            (0..n).map(|i| (i, (i + 1) % n)).collect(),
            vec![],
            vec![],
        )
        .expect("cycle")
    }

    pub fn anchor_count(&self) -> usize {
        self.incoming.len() + self.outgoing.len()
    }

    /// `(incoming, outgoing)` anchor counts.
    pub fn signature(&self) -> (usize, usize) {
        (self.incoming.len(), self.outgoing.len())
    }

    pub fn framing(&self, v: usize) -> Option<i8> {
        if self.incoming.contains(&v) {
            Some(1)
        } else if self.outgoing.contains(&v) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Edges reversed.
    pub fn reversed(&self) -> Self {
        BoundaryGraph {
            edges: self.edges.iter().map(|&(a, b)| (b, a)).collect(),
            ..self.clone()
        }
    }

    /// Incoming and outgoing anchors exchanged.
    pub fn flipped(&self) -> Self {
        BoundaryGraph {
            incoming: self.outgoing.clone(),
            outgoing: self.incoming.clone(),
            ..self.clone()
        }
    }

    /// Anchors forgotten.
    pub fn closed(&self) -> Self {
        BoundaryGraph {
            incoming: vec![],
            outgoing: vec![],
            ..self.clone()
        }
    }

    /// Identify the endpoints of a non-loop edge and remove it.
    pub fn contract_edge(&self, e: usize) -> Result<Self> {
        let &(a, b) = self
            .edges
            .get(e)
            .ok_or_else(|| err(ErrorKind::Contraction, "edge exists", format!("edge {e}")))?;
        if a == b {
            return Err(err(
                ErrorKind::Contraction,
                "edge is not a loop",
                format!("edge {e}"),
            ));
        }
        if self.framing(a).is_some() && self.framing(b).is_some() {
            return Err(err(
                ErrorKind::Contraction,
                "anchors stay distinct",
                format!("both ends of edge {e} are anchors"),
            ));
        }
        let relabel = |v: usize| {
            let v = if v == b { a } else { v };
            if v > b {
                v - 1
            } else {
                v
            }
        };
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != e)
            .map(|(_, &(x, y))| (relabel(x), relabel(y)))
            .collect();
        Ok(BoundaryGraph {
            vertices: self.vertices - 1,
            edges,
            incoming: self.incoming.iter().map(|&v| relabel(v)).collect(),
            outgoing: self.outgoing.iter().map(|&v| relabel(v)).collect(),
            base_point: self.base_point.map(relabel),
        })
    }

    /// Union with `other`, identifying the listed vertex pairs. Identified
    /// vertices become wedge points and lose their anchor roles. Vertices and
    /// edges of `self` come first; returns the vertex maps of both inputs.
    pub fn join(
        &self,
        other: &BoundaryGraph,
        pairs: &[(usize, usize)],
    ) -> (BoundaryGraph, Vec<usize>, Vec<usize>) {
        let mut m2 = vec![usize::MAX; other.vertices];
        for &(a, b) in pairs {
            m2[b] = a;
        }
        let mut n = self.vertices;
        for v in m2.iter_mut() {
            if *v == usize::MAX {
                *v = n;
                n += 1;
            }
        }
        let m1: Vec<usize> = (0..self.vertices).collect();
        let wedge1: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
        let wedge2: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
        let keep = |anchors: &[usize], wedge: &BTreeSet<usize>, m: &[usize]| -> Vec<usize> {
            anchors
                .iter()
                .filter(|v| !wedge.contains(v))
                .map(|&v| m[v])
                .collect()
        };
        let mut incoming = keep(&self.incoming, &wedge1, &m1);
        incoming.extend(keep(&other.incoming, &wedge2, &m2));
        let mut outgoing = keep(&self.outgoing, &wedge1, &m1);
        outgoing.extend(keep(&other.outgoing, &wedge2, &m2));
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (m2[a], m2[b])));
        let g = BoundaryGraph {
            vertices: n,
            edges,
            incoming,
            outgoing,
            base_point: self.base_point,
        };
        (g, m1, m2)
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertices);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.vertices {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// An isomorphism onto `other` preserving edge directions and anchor framings.
    pub fn find_isomorphism(&self, other: &BoundaryGraph) -> Option<GraphIso> {
        if self.vertices != other.vertices
            || self.edges.len() != other.edges.len()
            || self.signature() != other.signature()
        {
            return None;
        }
        let mut vmap = vec![usize::MAX; self.vertices];
        let mut used = vec![false; other.vertices];
        if !self.extend_iso(other, 0, &mut vmap, &mut used) {
            return None;
        }
        let edges = self.edge_matching(other, &vmap)?;
        Some(GraphIso {
            vertices: vmap,
            edges,
        })
    }

    pub fn is_isomorphic(&self, other: &BoundaryGraph) -> bool {
        self.find_isomorphism(other).is_some()
    }

    fn extend_iso(
        &self,
        other: &BoundaryGraph,
        v: usize,
        vmap: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if v == self.vertices {
            return self.edge_matching(other, vmap).is_some();
        }
        for w in 0..other.vertices {
            if used[w] || self.framing(v) != other.framing(w) || self.valence(v) != other.valence(w)
            {
                continue;
            }
            vmap[v] = w;
            used[w] = true;
            if self.partial_ok(other, vmap, v) && self.extend_iso(other, v + 1, vmap, used) {
                return true;
            }
            used[w] = false;
            vmap[v] = usize::MAX;
        }
        false
    }

    fn count(edges: &[(usize, usize)], a: usize, b: usize) -> usize {
        edges.iter().filter(|&&e| e == (a, b)).count()
    }

    fn partial_ok(&self, other: &BoundaryGraph, vmap: &[usize], v: usize) -> bool {
        (0..=v).all(|u| {
            Self::count(&self.edges, u, v) == Self::count(&other.edges, vmap[u], vmap[v])
                && Self::count(&self.edges, v, u) == Self::count(&other.edges, vmap[v], vmap[u])
        })
    }

    fn edge_matching(&self, other: &BoundaryGraph, vmap: &[usize]) -> Option<Vec<usize>> {
        let mut taken = vec![false; other.edges.len()];
        let mut out = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            let target = (vmap[a], vmap[b]);
            let j = (0..other.edges.len()).find(|&j| !taken[j] && other.edges[j] == target)?;
            taken[j] = true;
            out.push(j);
        }
        Some(out)
    }

    fn check_iso(&self, other: &BoundaryGraph, iso: &GraphIso) -> Result<()> {
        let bad = |d: String| {
            err(
                ErrorKind::Stacking,
                "identification is an anchor-preserving graph isomorphism",
                d,
            )
        };
        if iso.vertices.len() != self.vertices || iso.edges.len() != self.edges.len() {
            return Err(bad("size mismatch".into()));
        }
        if self.signature() != other.signature() {
            return Err(bad(format!(
                "anchor counts {:?} vs {:?}",
                self.signature(),
                other.signature()
            )));
        }
        let vs: BTreeSet<usize> = iso.vertices.iter().copied().collect();
        let es: BTreeSet<usize> = iso.edges.iter().copied().collect();
        if vs.len() != other.vertices
            || es.len() != other.edges.len()
            || vs.iter().any(|&v| v >= other.vertices)
            || es.iter().any(|&e| e >= other.edges.len())
        {
            return Err(bad("not a bijection".into()));
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if other.edges[iso.edges[e]] != (iso.vertices[a], iso.vertices[b]) {
                return Err(bad(format!("edge {e}")));
            }
        }
        for v in 0..self.vertices {
            if self.framing(v) != other.framing(iso.vertices[v]) {
                return Err(bad(format!("anchor {v}")));
            }
        }
        Ok(())
    }
}

/// Where a boundary graph sits in the body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Embedding {
    fn empty() -> Self {
        Embedding {
            vertices: vec![],
            edges: vec![],
        }
    }
}

/// An edge path in the body between two anchors. `sign` is the framing of the
/// anchor the path starts at.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Marking {
    pub path: Vec<usize>,
    pub sign: i8,
}

/// An anchor on one of the two layers, by graph vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct End {
    pub layer: Layer,
    pub vertex: usize,
}

/// A marking read as an oriented walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub start: End,
    pub end: End,
    /// `(edge, forward)` steps.
    pub steps: Vec<(usize, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRibbon", into = "RawRibbon")]
pub struct Ribbon {
    body: SimplePolyhedron,
    source: BoundaryGraph,
    target: BoundaryGraph,
    source_map: Embedding,
    target_map: Embedding,
    markings: Vec<Marking>,
    twist: i64,
}

#[derive(Serialize, Deserialize)]
struct RawRibbon {
    #[serde(flatten)]
    body: SimplePolyhedron,
    source: BoundaryGraph,
    target: BoundaryGraph,
    source_map: Embedding,
    target_map: Embedding,
    #[serde(default)]
    markings: Vec<Marking>,
    #[serde(default)]
    twist: i64,
}

impl TryFrom<RawRibbon> for Ribbon {
    type Error = Error;
    fn try_from(r: RawRibbon) -> Result<Self> {
        Ribbon::new(
            r.body,
            r.source,
            r.target,
            r.source_map,
            r.target_map,
            r.markings,
            r.twist,
        )
    }
}

impl From<Ribbon> for RawRibbon {
    fn from(r: Ribbon) -> Self {
        RawRibbon {
            body: r.body,
            source: r.source,
            target: r.target,
            source_map: r.source_map,
            target_map: r.target_map,
            markings: r.markings,
            twist: r.twist,
        }
    }
}

impl Ribbon {
    pub fn new(
        body: SimplePolyhedron,
        source: BoundaryGraph,
        target: BoundaryGraph,
        source_map: Embedding,
        target_map: Embedding,
        markings: Vec<Marking>,
        twist: i64,
    ) -> Result<Self> {
        source.check()?;
        target.check()?;
        let r = Ribbon {
            body,
            source,
            target,
            source_map,
            target_map,
            markings,
            twist,
        };
        r.check_layers()?;
        for i in 0..r.markings.len() {
            r.walk(i)?;
        }
        let mut ends = BTreeSet::new();
        for i in 0..r.markings.len() {
            let w = r.walk(i)?;
            for e in [w.start, w.end] {
                if !ends.insert(e) {
                    return Err(err(
                        ErrorKind::Structural,
                        "each anchor ends at most one marking",
                        format!("{e:?}"),
                    ));
                }
            }
        }
        Ok(r)
    }

    fn check_layers(&self) -> Result<()> {
        let c = self.body.body();
        let deg = c.edge_degrees();
        let mut vseen = BTreeSet::new();
        let mut eseen = BTreeSet::new();
        for (g, m, layer) in [
            (&self.source, &self.source_map, "source"),
            (&self.target, &self.target_map, "target"),
        ] {
            if m.vertices.len() != g.vertices || m.edges.len() != g.edges.len() {
                return Err(err(
                    ErrorKind::Structural,
                    "embedding covers the layer graph",
                    layer,
                ));
            }
            for &v in &m.vertices {
                if v >= c.n_vertices() || !vseen.insert(v) {
                    return Err(err(
                        ErrorKind::Structural,
                        "layer vertices are distinct body vertices",
                        format!("{layer} vertex {v}"),
                    ));
                }
            }
            for (i, &e) in m.edges.iter().enumerate() {
                if e >= c.edges().len() || !eseen.insert(e) {
                    return Err(err(
                        ErrorKind::Structural,
                        "layer edges are distinct body edges",
                        format!("{layer} edge {i}"),
                    ));
                }
                let ed = c.edge(e);
                let (a, b) = g.edges[i];
                if (ed.src, ed.dst) != (m.vertices[a], m.vertices[b]) {
                    return Err(err(
                        ErrorKind::Structural,
                        "embedding respects edge endpoints",
                        format!("{layer} edge {i}"),
                    ));
                }
                if deg[e] != 1 {
                    return Err(err(
                        ErrorKind::Structural,
                        "layer edges lie in exactly one face",
                        format!("{layer} edge {i}"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn anchor_at(&self, v: usize) -> Option<(End, i8)> {
        for (layer, g, m) in [
            (Layer::Source, &self.source, &self.source_map),
            (Layer::Target, &self.target, &self.target_map),
        ] {
            if let Some(x) = m.vertices.iter().position(|&y| y == v) {
                return g.framing(x).map(|f| (End { layer, vertex: x }, f));
            }
        }
        None
    }

    /// Resolve marking `i` into an oriented walk between anchors.
    pub fn walk(&self, i: usize) -> Result<Walk> {
        let m = &self.markings[i];
        let c = self.body.body();
        let bad = |d: String| {
            err(
                ErrorKind::Path,
                "markings are edge paths between anchors",
                d,
            )
        };
        let first = *m
            .path
            .first()
            .ok_or_else(|| bad(format!("marking {i} is empty")))?;
        if m.path.iter().any(|&e| e >= c.edges().len()) {
            return Err(bad(format!("marking {i} leaves the body")));
        }
        let e0 = c.edge(first);
        let mut last_err = bad(format!("marking {i} does not start at an anchor"));
        for start in [e0.src, e0.dst] {
            let Some((s_end, s_fr)) = self.anchor_at(start) else {
                continue;
            };
            let mut cur = start;
            let mut steps = Vec::with_capacity(m.path.len());
            let mut ok = true;
            for &e in &m.path {
                let ed = c.edge(e);
                if ed.src == cur {
                    steps.push((e, true));
                    cur = ed.dst;
                } else if ed.dst == cur {
                    steps.push((e, false));
                    cur = ed.src;
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                last_err = bad(format!("marking {i} is not connected"));
                continue;
            }
            let Some((t_end, t_fr)) = self.anchor_at(cur) else {
                last_err = bad(format!("marking {i} does not end at an anchor"));
                continue;
            };
            if s_end == t_end {
                last_err = bad(format!("marking {i} is closed"));
                continue;
            }
            let expected_end = if s_end.layer == t_end.layer {
                -s_fr
            } else {
                s_fr
            };
            if s_fr != m.sign || t_fr != expected_end {
                last_err = err(
                    ErrorKind::Structural,
                    "marking signs match endpoint framings",
                    format!("marking {i}"),
                );
                continue;
            }
            return Ok(Walk {
                start: s_end,
                end: t_end,
                steps,
            });
        }
        Err(last_err)
    }

    pub fn walks(&self) -> Vec<Walk> {
        (0..self.markings.len())
            .map(|i| self.walk(i).expect("validated"))
            .collect()
    }

    pub fn body(&self) -> &SimplePolyhedron {
        &self.body
    }

    pub fn complex(&self) -> &TwoComplex {
        self.body.body()
    }

    pub fn source(&self) -> &BoundaryGraph {
        &self.source
    }

    pub fn target(&self) -> &BoundaryGraph {
        &self.target
    }

    pub fn source_map(&self) -> &Embedding {
        &self.source_map
    }

    pub fn target_map(&self) -> &Embedding {
        &self.target_map
    }

    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    /// Anchor counts on the source and target layers.
    pub fn signature(&self) -> (usize, usize) {
        (self.source.anchor_count(), self.target.anchor_count())
    }

    /// Body edges lying on either layer.
    pub fn layer_edges(&self) -> BTreeSet<usize> {
        self.source_map
            .edges
            .iter()
            .chain(&self.target_map.edges)
            .copied()
            .collect()
    }

    pub fn layer_vertices(&self) -> BTreeSet<usize> {
        self.source_map
            .vertices
            .iter()
            .chain(&self.target_map.vertices)
            .copied()
            .collect()
    }

    /// The empty ribbon on the empty graph.
    pub fn empty() -> Self {
        Ribbon {
            body: SimplePolyhedron::from_complex(TwoComplex::empty()).expect("empty"),
            source: BoundaryGraph::empty(),
            target: BoundaryGraph::empty(),
            source_map: Embedding::empty(),
            target_map: Embedding::empty(),
            markings: vec![],
            twist: 0,
        }
    }

    /// A complex read as a ribbon: the listed edges form the source and target
    /// layers (vertices in order of first appearance), with no anchors.
    pub fn from_complex(
        c: TwoComplex,
        source_edges: &[usize],
        target_edges: &[usize],
    ) -> Result<Self> {
        Self::from_polyhedron(
            SimplePolyhedron::from_complex(c)?,
            source_edges,
            target_edges,
        )
    }

    /// As [`from_complex`](Self::from_complex), keeping the polyhedron's strata.
    pub fn from_polyhedron(
        p: SimplePolyhedron,
        source_edges: &[usize],
        target_edges: &[usize],
    ) -> Result<Self> {
        let c = p.body();
        let layer = |edges: &[usize]| -> (BoundaryGraph, Embedding) {
            let mut verts: Vec<usize> = Vec::new();
            let idx = |v: usize, verts: &mut Vec<usize>| match verts.iter().position(|&x| x == v) {
                Some(i) => i,
                None => {
                    verts.push(v);
                    verts.len() - 1
                }
            };
            let mut gedges = Vec::new();
            for &e in edges {
                let ed = c.edge(e);
                let a = idx(ed.src, &mut verts);
                let b = idx(ed.dst, &mut verts);
                gedges.push((a, b));
            }
            (
                BoundaryGraph {
                    vertices: verts.len(),
                    edges: gedges,
                    incoming: vec![],
                    outgoing: vec![],
                    base_point: None,
                },
                Embedding {
                    vertices: verts,
                    edges: edges.to_vec(),
                },
            )
        };
        if source_edges
            .iter()
            .chain(target_edges)
            .any(|&e| e >= c.edges().len())
        {
            return Err(err(
                ErrorKind::Structural,
                "layer edges exist",
                "edge out of range",
            ));
        }
        let (s, sm) = layer(source_edges);
        let (t, tm) = layer(target_edges);
        Ribbon::new(p.clone(), s, t, sm, tm, vec![], 0)
    }

    /// A bounded complex as a ribbon from its boundary graph to the empty graph.
    pub fn filling(c: TwoComplex) -> Result<Self> {
        let b = c.boundary_edges();
        Self::from_complex(c, &b, &[])
    }

    /// Swap the roles of source and target without touching the body.
    pub fn turned(&self) -> Ribbon {
        Ribbon {
            body: self.body.clone(),
            source: self.target.clone(),
            target: self.source.clone(),
            source_map: self.target_map.clone(),
            target_map: self.source_map.clone(),
            markings: self.markings.clone(),
            twist: self.twist,
        }
    }

    /// Orientation reversal: body and layer graphs reversed, source and target exchanged.
    pub fn dagger1(&self) -> Ribbon {
        let body =
            SimplePolyhedron::new(self.complex().dagger1(), &self.body.trisection_vertices())
                .expect("same strata");
        Ribbon {
            body,
            source: self.target.reversed(),
            target: self.source.reversed(),
            source_map: self.target_map.clone(),
            target_map: self.source_map.clone(),
            markings: self.markings.clone(),
            twist: -self.twist,
        }
    }

    /// Framing reversal: edge framings and anchor framings flipped.
    pub fn dagger2(&self) -> Ribbon {
        let body =
            SimplePolyhedron::new(self.complex().dagger2(), &self.body.trisection_vertices())
                .expect("same strata");
        Ribbon {
            body,
            source: self.source.flipped(),
            target: self.target.flipped(),
            source_map: self.source_map.clone(),
            target_map: self.target_map.clone(),
            markings: self
                .markings
                .iter()
                .map(|m| Marking {
                    path: m.path.clone(),
                    sign: -m.sign,
                })
                .collect(),
            twist: self.twist,
        }
    }

    /// Half-twist of a disjoint pair: the two target components are exchanged
    /// and the twist marker advances by one.
    pub fn pi_twist(&self) -> Result<Ribbon> {
        let comps = self.target.components();
        if comps.len() != 2 {
            return Err(err(
                ErrorKind::Structural,
                "target is a disjoint pair",
                format!("{} components", comps.len()),
            ));
        }
        let order: Vec<usize> = comps[1].iter().chain(&comps[0]).copied().collect();
        let mut newv = vec![0; self.target.vertices];
        for (i, &v) in order.iter().enumerate() {
            newv[v] = i;
        }
        let mut eorder: Vec<usize> = (0..self.target.edges.len()).collect();
        eorder.sort_by_key(|&e| (!comps[1].contains(&self.target.edges[e].0), e));
        let target = BoundaryGraph {
            vertices: self.target.vertices,
            edges: eorder
                .iter()
                .map(|&e| (newv[self.target.edges[e].0], newv[self.target.edges[e].1]))
                .collect(),
            incoming: self.target.incoming.iter().map(|&v| newv[v]).collect(),
            outgoing: self.target.outgoing.iter().map(|&v| newv[v]).collect(),
            base_point: self.target.base_point.map(|v| newv[v]),
        };
        let target_map = Embedding {
            vertices: order.iter().map(|&v| self.target_map.vertices[v]).collect(),
            edges: eorder.iter().map(|&e| self.target_map.edges[e]).collect(),
        };
        Ok(Ribbon {
            target,
            target_map,
            twist: self.twist + 1,
            ..self.clone()
        })
    }

    /// Disjoint union; cells of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &Ribbon) -> Result<Ribbon> {
        let (body, vmap, emap) = self.complex().union_identify(other.complex(), &[], &[])?;
        let (s, _, _) = self.source.join(&other.source, &[]);
        let (t, _, _) = self.target.join(&other.target, &[]);
        let cat = |a: &Embedding, b: &Embedding| Embedding {
            vertices: a
                .vertices
                .iter()
                .copied()
                .chain(b.vertices.iter().map(|&v| vmap[v]))
                .collect(),
            edges: a
                .edges
                .iter()
                .copied()
                .chain(b.edges.iter().map(|&e| emap[e]))
                .collect(),
        };
        let mut markings = self.markings.clone();
        markings.extend(other.markings.iter().map(|m| Marking {
            path: m.path.iter().map(|&e| emap[e]).collect(),
            sign: m.sign,
        }));
        let tris = hints(&self.body, &other.body, &vmap);
        Ribbon::new(
            SimplePolyhedron::new(body, &tris)?,
            s,
            t,
            cat(&self.source_map, &other.source_map),
            cat(&self.target_map, &other.target_map),
            markings,
            self.twist + other.twist,
        )
    }

    /// Structural comparison up to relabeling of cells.
    pub fn is_isomorphic(&self, other: &Ribbon) -> bool {
        if self.twist != other.twist
            || self.markings.len() != other.markings.len()
            || !self.source.is_isomorphic(&other.source)
            || !self.target.is_isomorphic(&other.target)
        {
            return false;
        }
        let (va, ea) = self.colors();
        let (vb, eb) = other.colors();
        self.complex()
            .is_isomorphic_colored(&va, &ea, other.complex(), &vb, &eb)
    }

    fn colors(&self) -> (Vec<u64>, Vec<u64>) {
        let c = self.complex();
        let mut vc = vec![0u64; c.n_vertices()];
        for (tag, g, m) in [
            (1u64, &self.source, &self.source_map),
            (4, &self.target, &self.target_map),
        ] {
            for (x, &v) in m.vertices.iter().enumerate() {
                vc[v] = tag + g.framing(x).map_or(0, |f| if f > 0 { 1 } else { 2 });
            }
        }
        let mut ec = vec![0u64; c.edges().len()];
        for &e in &self.source_map.edges {
            ec[e] = 1;
        }
        for &e in &self.target_map.edges {
            ec[e] = 2;
        }
        for m in &self.markings {
            for &e in &m.path {
                ec[e] += 4 * (1 + (m.sign > 0) as u64);
            }
        }
        (vc, ec)
    }

    /// Remove closed components whose body is a 2-sphere; the birth/death
    /// collapse of a house.
    pub fn collapse_house(&self) -> Result<Ribbon> {
        let c = self.complex();
        let layer_v = self.layer_vertices();
        let deg = c.edge_degrees();
        let mut drop_v = BTreeSet::new();
        let mut drop_e = BTreeSet::new();
        let mut drop_f = BTreeSet::new();
        for comp in c.components() {
            if comp.iter().any(|v| layer_v.contains(v)) {
                continue;
            }
            let vs: BTreeSet<usize> = comp.iter().copied().collect();
            let es: BTreeSet<usize> = (0..c.edges().len())
                .filter(|&e| vs.contains(&c.edge(e).src))
                .collect();
            let fs: BTreeSet<usize> = (0..c.faces().len())
                .filter(|&f| vs.contains(&c.corners(f)[0]))
                .collect();
            let closed_surface = es.iter().all(|&e| deg[e] == 2);
            let chi = vs.len() as i64 - es.len() as i64 + fs.len() as i64;
            let marked = self
                .markings
                .iter()
                .any(|m| m.path.iter().any(|e| es.contains(e)));
            if closed_surface && chi == 2 && !marked {
                drop_v.extend(vs);
                drop_e.extend(es);
                drop_f.extend(fs);
            }
        }
        let (body, rel) = c.remove_cells(&drop_v, &drop_e, &drop_f);
        let remap = |m: &Embedding| Embedding {
            vertices: m
                .vertices
                .iter()
                .map(|&v| rel.vertices[v].expect("kept"))
                .collect(),
            edges: m
                .edges
                .iter()
                .map(|&e| rel.edges[e].expect("kept"))
                .collect(),
        };
        let tris: Vec<usize> = self
            .body
            .trisection_vertices()
            .into_iter()
            .filter_map(|v| rel.vertices[v])
            .collect();
        Ribbon::new(
            SimplePolyhedron::new(body, &tris)?,
            self.source.clone(),
            self.target.clone(),
            remap(&self.source_map),
            remap(&self.target_map),
            self.markings
                .iter()
                .map(|m| Marking {
                    path: m
                        .path
                        .iter()
                        .map(|&e| rel.edges[e].expect("kept"))
                        .collect(),
                    sign: m.sign,
                })
                .collect(),
            self.twist,
        )
    }
}

fn hints(a: &SimplePolyhedron, b: &SimplePolyhedron, vmap_b: &[usize]) -> Vec<usize> {
    let mut t = a.trisection_vertices();
    t.extend(b.trisection_vertices().into_iter().map(|v| vmap_b[v]));
    t
}

/// A piece of a marking chain: which side it comes from, its index there, and
/// whether it is traversed backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece {
    pub second: bool,
    pub index: usize,
    pub reversed: bool,
}

/// Chain markings of two stacked ribbons through the glued layer. `a` and `b`
/// list marking endpoints; `glue[x]` is the source vertex of the upper piece
/// matched with target vertex `x` of the lower piece. Closed chains are dropped.
pub fn chain_markings(
    a: &[(End, End)],
    b: &[(End, End)],
    glue: &[usize],
) -> Result<Vec<Vec<Piece>>> {
    let is_glue = |second: bool, e: End| {
        if second {
            e.layer == Layer::Source
        } else {
            e.layer == Layer::Target
        }
    };
    let ends = |p: Piece| -> (End, End) {
        let (s, t) = if p.second { b[p.index] } else { a[p.index] };
        if p.reversed {
            (t, s)
        } else {
            (s, t)
        }
    };
    let partner = |second: bool, e: End| -> Result<Option<Piece>> {
        // glue point seen from the other side
        let (other, v) = if second {
            (false, glue.iter().position(|&x| x == e.vertex))
        } else {
            (true, glue.get(e.vertex).copied())
        };
        let Some(v) = v else { return Ok(None) };
        let list = if other { b } else { a };
        let want = End {
            layer: if other { Layer::Source } else { Layer::Target },
            vertex: v,
        };
        let hits: Vec<Piece> = list
            .iter()
            .enumerate()
            .filter_map(|(i, &(s, t))| {
                if s == want {
                    Some(Piece {
                        second: other,
                        index: i,
                        reversed: false,
                    })
                } else if t == want {
                    Some(Piece {
                        second: other,
                        index: i,
                        reversed: true,
                    })
                } else {
                    None
                }
            })
            .collect();
        if hits.len() > 1 {
            return Err(err(
                ErrorKind::Stacking,
                "each anchor ends at most one marking",
                format!("glue vertex {v}"),
            ));
        }
        Ok(hits.first().copied())
    };
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut chains = Vec::new();
    let all: Vec<(bool, usize)> = (0..a.len())
        .map(|i| (false, i))
        .chain((0..b.len()).map(|i| (true, i)))
        .collect();
    for &(second, i) in &all {
        if (second && used_b[i]) || (!second && used_a[i]) {
            continue;
        }
        let (s, t) = if second { b[i] } else { a[i] };
        let reversed = if !is_glue(second, s) {
            false
        } else if !is_glue(second, t) {
            true
        } else {
            continue;
        };
        let mut chain = Vec::new();
        let mut cur = Piece {
            second,
            index: i,
            reversed,
        };
        loop {
            if cur.second {
                used_b[cur.index] = true;
            } else {
                used_a[cur.index] = true;
            }
            chain.push(cur);
            let (_, far) = ends(cur);
            if !is_glue(cur.second, far) {
                break;
            }
            match partner(cur.second, far)? {
                Some(p) => cur = p,
                None => {
                    return Err(err(
                        ErrorKind::Stacking,
                        "markings continue through matched anchors",
                        format!("{far:?} has no continuation"),
                    ));
                }
            }
        }
        chains.push(chain);
    }
    Ok(chains)
}

/// Stack `upper` on `lower` along `iso`: lower target → upper source.
pub fn stack(lower: &Ribbon, upper: &Ribbon, iso: &GraphIso) -> Result<Ribbon> {
    lower.target.check_iso(&upper.source, iso)?;
    let vpairs: Vec<(usize, usize)> = (0..lower.target.vertices)
        .map(|x| {
            (
                lower.target_map.vertices[x],
                upper.source_map.vertices[iso.vertices[x]],
            )
        })
        .collect();
    let epairs: Vec<(usize, usize)> = (0..lower.target.edges.len())
        .map(|e| {
            (
                lower.target_map.edges[e],
                upper.source_map.edges[iso.edges[e]],
            )
        })
        .collect();
    let (body, vmap, emap) = lower
        .complex()
        .union_identify(upper.complex(), &vpairs, &epairs)
        .map_err(|e| err(ErrorKind::Stacking, "layers glue consistently", e.detail))?;
    let wa: Vec<(End, End)> = lower.walks().iter().map(|w| (w.start, w.end)).collect();
    let wb: Vec<(End, End)> = upper.walks().iter().map(|w| (w.start, w.end)).collect();
    let walks_a = lower.walks();
    let walks_b = upper.walks();
    let chains = chain_markings(&wa, &wb, &iso.vertices)?;
    let mut markings = Vec::new();
    for chain in chains {
        let mut path = Vec::new();
        for p in &chain {
            let steps = if p.second {
                &walks_b[p.index].steps
            } else {
                &walks_a[p.index].steps
            };
            let mapped: Vec<usize> = steps
                .iter()
                .map(|&(e, _)| if p.second { emap[e] } else { e })
                .collect();
            if p.reversed {
                path.extend(mapped.into_iter().rev());
            } else {
                path.extend(mapped);
            }
        }
        let first = chain[0];
        let (s, t) = if first.second {
            wb[first.index]
        } else {
            wa[first.index]
        };
        let start = if first.reversed { t } else { s };
        let g = match (first.second, start.layer) {
            (false, Layer::Source) => &lower.source,
            (true, Layer::Target) => &upper.target,
            _ => unreachable!("chains start off the glued layer"),
        };
        markings.push(Marking {
            path,
            sign: g.framing(start.vertex).expect("anchor"),
        });
    }
    let target_map = Embedding {
        vertices: upper.target_map.vertices.iter().map(|&v| vmap[v]).collect(),
        edges: upper.target_map.edges.iter().map(|&e| emap[e]).collect(),
    };
    let tris = hints(&lower.body, &upper.body, &vmap);
    Ribbon::new(
        SimplePolyhedron::new(body, &tris)?,
        lower.source.clone(),
        upper.target.clone(),
        lower.source_map.clone(),
        target_map,
        markings,
        lower.twist + upper.twist,
    )
}

/// Stack along the identity when `lower.target == upper.source`, otherwise
/// along any anchor-preserving isomorphism.
pub fn stack_auto(lower: &Ribbon, upper: &Ribbon) -> Result<Ribbon> {
    let iso = if lower.target == upper.source {
        GraphIso::identity(&lower.target)
    } else {
        lower
            .target
            .find_isomorphism(&upper.source)
            .ok_or_else(|| {
                err(
                    ErrorKind::Stacking,
                    "layers are isomorphic",
                    "no anchor-preserving isomorphism",
                )
            })?
    };
    stack(lower, upper, &iso)
}

/// Layer-vertex pairs identified by a connected sum along walks `a` of `r`
/// and `b` of `r2`: `(layer, vertex in r's graph, vertex in r2's graph)`.
pub fn summation_pairs(a: &(End, End), b: &(End, End)) -> Result<Vec<(Layer, usize, usize)>> {
    if a.0.layer != b.0.layer || a.1.layer != b.1.layer {
        return Err(err(
            ErrorKind::Summability,
            "joined markings start and end on the same layers",
            format!("{a:?} vs {b:?}"),
        ));
    }
    Ok(vec![
        (a.0.layer, a.0.vertex, b.0.vertex),
        (a.1.layer, a.1.vertex, b.1.vertex),
    ])
}

/// Layer graphs of a connected sum, with the vertex maps of both inputs.
pub fn summed_layers(
    (s1, t1): (&BoundaryGraph, &BoundaryGraph),
    (s2, t2): (&BoundaryGraph, &BoundaryGraph),
    pairs: &[(Layer, usize, usize)],
) -> [(BoundaryGraph, Vec<usize>, Vec<usize>); 2] {
    let pick = |l: Layer| -> Vec<(usize, usize)> {
        pairs
            .iter()
            .filter(|p| p.0 == l)
            .map(|p| (p.1, p.2))
            .collect()
    };
    [
        s1.join(s2, &pick(Layer::Source)),
        t1.join(t2, &pick(Layer::Target)),
    ]
}

/// Connected sum joining outgoing marking `i` of `r` to incoming marking `j`
/// of `r2` through a coned summation collar.
pub fn connected_sum(r: &Ribbon, i: usize, r2: &Ribbon, j: usize) -> Result<Ribbon> {
    let (m, m2) = match (r.markings.get(i), r2.markings.get(j)) {
        (Some(m), Some(m2)) => (m, m2),
        _ => {
            return Err(err(
                ErrorKind::Summability,
                "markings exist",
                format!("{i}, {j}"),
            ))
        }
    };
    if m.sign != -1 || m2.sign != 1 {
        return Err(err(
            ErrorKind::Summability,
            "an outgoing marking meets an incoming one",
            format!("signs {} and {}", m.sign, m2.sign),
        ));
    }
    let w = r.walk(i)?;
    let w2 = r2.walk(j)?;
    let pairs = summation_pairs(&(w.start, w.end), &(w2.start, w2.end))?;
    let body_vertex = |rb: &Ribbon, l: Layer, v: usize| match l {
        Layer::Source => rb.source_map.vertices[v],
        Layer::Target => rb.target_map.vertices[v],
    };
    let vpairs: Vec<(usize, usize)> = pairs
        .iter()
        .map(|&(l, a, b)| (body_vertex(r, l, a), body_vertex(r2, l, b)))
        .collect();
    let (mut body, vmap, emap) = r.complex().union_identify(r2.complex(), &vpairs, &[])?;
    // polygon: walk of r forwards, then walk of r2 backwards
    let mut poly: Vec<(usize, usize, usize)> = Vec::new();
    let mut cur = body_vertex(r, w.start.layer, w.start.vertex);
    for &(e, fwd) in &w.steps {
        let ed = body.edge(e);
        let next = if fwd { ed.dst } else { ed.src };
        poly.push((cur, e, next));
        cur = next;
    }
    for &(e, fwd) in w2.steps.iter().rev() {
        let e = emap[e];
        let ed = body.edge(e);
        let next = if fwd { ed.src } else { ed.dst };
        poly.push((cur, e, next));
        cur = next;
    }
    let z = body.add_vertex();
    let spokes: Vec<usize> = poly
        .iter()
        .map(|&(a, _, _)| body.add_edge(a, z, 1))
        .collect();
    for k in 0..poly.len() {
        let (a, e, b) = poly[k];
        let next = spokes[(k + 1) % poly.len()];
        body.add_face([a, b, z], [e, spokes[k], next], 1)?;
    }
    let [(src, sa, sb), (tgt, ta, tb)] =
        summed_layers((&r.source, &r.target), (&r2.source, &r2.target), &pairs);
    let embed = |g: &BoundaryGraph, m1: &Embedding, m2: &Embedding, ga: &[usize], gb: &[usize]| {
        let mut vertices = vec![usize::MAX; g.vertices];
        for (x, &v) in m1.vertices.iter().enumerate() {
            vertices[ga[x]] = v;
        }
        for (x, &v) in m2.vertices.iter().enumerate() {
            vertices[gb[x]] = vmap[v];
        }
        let edges = m1
            .edges
            .iter()
            .copied()
            .chain(m2.edges.iter().map(|&e| emap[e]))
            .collect();
        Embedding { vertices, edges }
    };
    let smap = embed(&src, &r.source_map, &r2.source_map, &sa, &sb);
    let tmap = embed(&tgt, &r.target_map, &r2.target_map, &ta, &tb);
    let mut markings: Vec<Marking> = r
        .markings
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, m)| m.clone())
        .collect();
    markings.extend(
        r2.markings
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, m)| Marking {
                path: m.path.iter().map(|&e| emap[e]).collect(),
                sign: m.sign,
            }),
    );
    let mut tris = hints(&r.body, &r2.body, &vmap);
    tris.sort_unstable();
    tris.dedup();
    Ribbon::new(
        SimplePolyhedron::new(body, &tris)?,
        src,
        tgt,
        smap,
        tmap,
        markings,
        r.twist + r2.twist,
    )
}

/// A graph map `B → X`: vertex images and, per edge, either an image edge with
/// a direction flag or `None` when the edge collapses to a vertex.
#[derive(Debug, Clone)]
pub struct GraphMap {
    pub vertices: Vec<usize>,
    pub edges: Vec<Option<(usize, bool)>>,
}

struct Cylinder {
    body: TwoComplex,
    bottom: Embedding,
    top: Embedding,
    vertical: Vec<usize>,
}

/// `B × [0,1]` with the top collapsed onto `X` along `f`.
fn cylinder_body(b: &BoundaryGraph, x: &BoundaryGraph, f: &GraphMap) -> Result<Cylinder> {
    let bad = |d: String| err(ErrorKind::Structural, "cylinder map is a graph map", d);
    if f.vertices.len() != b.vertices
        || f.edges.len() != b.edges.len()
        || f.vertices.iter().any(|&v| v >= x.vertices)
    {
        return Err(bad("size mismatch".into()));
    }
    let mut c = TwoComplex::empty();
    let top_v: Vec<usize> = (0..x.vertices).map(|_| c.add_vertex()).collect();
    let top_e: Vec<usize> = x
        .edges
        .iter()
        .map(|&(p, q)| c.add_edge(top_v[p], top_v[q], 1))
        .collect();
    let bot_v: Vec<usize> = (0..b.vertices).map(|_| c.add_vertex()).collect();
    let bot_e: Vec<usize> = b
        .edges
        .iter()
        .map(|&(p, q)| c.add_edge(bot_v[p], bot_v[q], 1))
        .collect();
    let vertical: Vec<usize> = (0..b.vertices)
        .map(|v| c.add_edge(bot_v[v], top_v[f.vertices[v]], 1))
        .collect();
    for (e, &(u, w)) in b.edges.iter().enumerate() {
        let (fu, fw) = (top_v[f.vertices[u]], top_v[f.vertices[w]]);
        match f.edges[e] {
            None => {
                if fu != fw {
                    return Err(bad(format!("collapsed edge {e} has distinct end images")));
                }
                c.add_face(
                    [bot_v[u], bot_v[w], fu],
                    [bot_e[e], vertical[u], vertical[w]],
                    1,
                )?;
            }
            Some((xe, fwd)) => {
                let (p, q) = x.edges[xe];
                let (s, t) = if fwd { (p, q) } else { (q, p) };
                if (top_v[s], top_v[t]) != (fu, fw) {
                    return Err(bad(format!("edge {e} does not cover its image")));
                }
                let diag = c.add_edge(bot_v[u], fw, 1);
                c.add_face([bot_v[u], bot_v[w], fw], [bot_e[e], diag, vertical[w]], 1)?;
                c.add_face([bot_v[u], fu, fw], [vertical[u], diag, top_e[xe]], -1)?;
            }
        }
    }
    Ok(Cylinder {
        body: c,
        bottom: Embedding {
            vertices: bot_v,
            edges: bot_e,
        },
        top: Embedding {
            vertices: top_v,
            edges: top_e,
        },
        vertical,
    })
}

/// Mapping cylinder of `f: B → X` as a ribbon from `B` to `X`. Anchors of `B`
/// sent to anchors of `X` with the same framing get a vertical marking.
pub fn mapping_cylinder(b: &BoundaryGraph, x: &BoundaryGraph, f: &GraphMap) -> Result<Ribbon> {
    let cyl = cylinder_body(b, x, f)?;
    let markings = b
        .incoming
        .iter()
        .chain(&b.outgoing)
        .filter(|&&v| b.framing(v) == x.framing(f.vertices[v]))
        .map(|&v| Marking {
            path: vec![cyl.vertical[v]],
            sign: b.framing(v).expect("anchor"),
        })
        .collect();
    Ribbon::new(
        SimplePolyhedron::from_complex(cyl.body)?,
        b.clone(),
        x.clone(),
        cyl.bottom,
        cyl.top,
        markings,
        0,
    )
}

/// Two mapping cylinders `B₀ → X ← B₁` glued along `X`. Anchors with a common
/// image and equal framing are joined by a marking through `X`.
pub fn double_cylinder(
    b0: &BoundaryGraph,
    b1: &BoundaryGraph,
    x: &BoundaryGraph,
    f0: &GraphMap,
    f1: &GraphMap,
    hint_centre: bool,
) -> Result<Ribbon> {
    let c0 = cylinder_body(b0, x, f0)?;
    let c1 = cylinder_body(b1, x, f1)?;
    let vpairs: Vec<(usize, usize)> = c0
        .top
        .vertices
        .iter()
        .copied()
        .zip(c1.top.vertices.iter().copied())
        .collect();
    let epairs: Vec<(usize, usize)> = c0
        .top
        .edges
        .iter()
        .copied()
        .zip(c1.top.edges.iter().copied())
        .collect();
    let (body, vmap, emap) = c0.body.union_identify(&c1.body, &vpairs, &epairs)?;
    let mut markings = Vec::new();
    for &v in b0.incoming.iter().chain(&b0.outgoing) {
        let fr = b0.framing(v);
        if let Some(&w) = b1
            .incoming
            .iter()
            .chain(&b1.outgoing)
            .find(|&&w| f1.vertices[w] == f0.vertices[v] && b1.framing(w) == fr)
        {
            markings.push(Marking {
                path: vec![c0.vertical[v], emap[c1.vertical[w]]],
                sign: fr.expect("anchor"),
            });
        }
    }
    let hint: Vec<usize> = if hint_centre {
        c0.top.vertices.clone()
    } else {
        vec![]
    };
    let target_map = Embedding {
        vertices: c1.bottom.vertices.iter().map(|&v| vmap[v]).collect(),
        edges: c1.bottom.edges.iter().map(|&e| emap[e]).collect(),
    };
    Ribbon::new(
        SimplePolyhedron::new(body, &hint)?,
        b0.clone(),
        b1.clone(),
        c0.bottom,
        target_map,
        markings,
        0,
    )
}

pub fn identity_cylinder(b: &BoundaryGraph) -> Result<Ribbon> {
    let f = GraphMap {
        vertices: (0..b.vertices).collect(),
        edges: (0..b.edges.len()).map(|e| Some((e, true))).collect(),
    };
    mapping_cylinder(b, b, &f)
}

/// The contraction `B → X` of edge 0 of a two-vertex graph onto one vertex.
fn contract_middle(b: &BoundaryGraph, images: &[Option<(usize, bool)>]) -> GraphMap {
    GraphMap {
        vertices: vec![0; b.vertices],
        edges: images.to_vec(),
    }
}

/// Identity on `B₊`.
pub fn b_plus() -> Ribbon {
    identity_cylinder(&BoundaryGraph::b_plus()).expect("b_plus cylinder")
}

/// `B₊ → B_×` through the torus standard graph, one trisection vertex.
pub fn b_times() -> Ribbon {
    let x = BoundaryGraph::torus_standard();
    let bp = BoundaryGraph::b_plus();
    let bx = BoundaryGraph::b_times();
    let f0 = contract_middle(&bp, &[None, Some((0, true)), Some((1, true))]);
    let f1 = contract_middle(&bx, &[None, Some((0, true)), Some((1, true))]);
    double_cylinder(&bp, &bx, &x, &f0, &f1, true).expect("b_times")
}

/// Disc bounded by a two-edge circle, with a marking through its centre.
fn disc_on_circle() -> (TwoComplex, [usize; 2], usize, usize) {
    let mut c = TwoComplex::empty();
    let (p, q, z) = (c.add_vertex(), c.add_vertex(), c.add_vertex());
    let e0 = c.add_edge(p, q, 1);
    let e1 = c.add_edge(q, p, 1);
    let s0 = c.add_edge(p, z, 1);
    let s1 = c.add_edge(q, z, 1);
    c.add_face([p, q, z], [e0, s0, s1], 1).expect("disc face");
    c.add_face([q, p, z], [e1, s1, s0], 1).expect("disc face");
    (c, [e0, e1], s0, s1)
}

/// Birth of a circle: `∅ → c`, signature `0 → 2`.
pub fn cup() -> Ribbon {
    let (c, e, s0, s1) = disc_on_circle();
    Ribbon::new(
        SimplePolyhedron::from_complex(c).expect("disc"),
        BoundaryGraph::empty(),
        BoundaryGraph::circle(),
        Embedding::empty(),
        Embedding {
            vertices: vec![0, 1],
            edges: e.to_vec(),
        },
        vec![Marking {
            path: vec![s0, s1],
            sign: 1,
        }],
        0,
    )
    .expect("cup")
}

/// Death of a circle: `c → ∅`, signature `2 → 0`.
pub fn cap() -> Ribbon {
    cup().turned()
}

/// The sphere `cup ∪ cap`, which collapses to the empty ribbon.
pub fn house() -> Ribbon {
    stack_auto(&cup(), &cap()).expect("house")
}

/// Saddle `c₋ ∨ c₊ ⇒ 1₂`: a pinched coned polygon and one triangle.
pub fn saddle() -> Ribbon {
    let (src, _, _) = BoundaryGraph::c_minus().join(&BoundaryGraph::c_plus(), &[(0, 0)]);
    // src: w = 0 (wedge), q = 1 (incoming), p = 2 (outgoing)
    let tgt = BoundaryGraph::unit_arc();
    let mut c = TwoComplex::empty();
    let sv: Vec<usize> = (0..src.vertices).map(|_| c.add_vertex()).collect();
    let se: Vec<usize> = src
        .edges
        .iter()
        .map(|&(a, b)| c.add_edge(sv[a], sv[b], 1))
        .collect();
    let (ti, to) = (c.add_vertex(), c.add_vertex());
    let x = c.add_edge(ti, to, 1);
    let (w, q, p) = (sv[0], sv[1], sv[2]);
    let s = c.add_edge(q, ti, 1);
    let t = c.add_edge(p, to, 1);
    let r = c.add_edge(q, p, 1);
    let [e_wq, e_qw, e_wp, e_pw] = [se[0], se[1], se[2], se[3]];
    // polygon w -e_wq-> q -s-> i -x-> o -t⁻¹-> p -e_pw-> w, coned
    let poly = [
        (w, e_wq, q),
        (q, s, ti),
        (ti, x, to),
        (to, t, p),
        (p, e_pw, w),
    ];
    let z = c.add_vertex();
    let spokes: Vec<usize> = poly.iter().map(|&(a, _, _)| c.add_edge(a, z, 1)).collect();
    for k in 0..poly.len() {
        let (a, e, b) = poly[k];
        c.add_face([a, b, z], [e, spokes[k], spokes[(k + 1) % poly.len()]], 1)
            .expect("saddle cone");
    }
    c.add_face([q, w, p], [e_qw, r, e_wp], 1)
        .expect("saddle triangle");
    let src_fr_q = src.framing(1).expect("anchor");
    let markings = vec![
        Marking {
            path: vec![s],
            sign: src_fr_q,
        },
        Marking {
            path: vec![t],
            sign: src.framing(2).expect("anchor"),
        },
    ];
    Ribbon::new(
        SimplePolyhedron::from_complex(c).expect("saddle body"),
        src.clone(),
        tgt,
        Embedding {
            vertices: sv,
            edges: se,
        },
        Embedding {
            vertices: vec![ti, to],
            edges: vec![x],
        },
        markings,
        0,
    )
    .expect("saddle")
}

/// A three-edge circle folded onto the two-edge circle by collapsing one edge.
pub fn cusp() -> Ribbon {
    let b = BoundaryGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], vec![0], vec![1]).expect("graph");
    let f = GraphMap {
        vertices: vec![0, 1, 1],
        edges: vec![Some((0, true)), None, Some((1, true))],
    };
    mapping_cylinder(&b, &BoundaryGraph::circle(), &f).expect("cusp")
}

/// Exchange of the two crossing edges of `B_×` through the torus standard graph.
pub fn fold_crossing() -> Ribbon {
    let x = BoundaryGraph::torus_standard();
    let bx = BoundaryGraph::b_times();
    let f0 = contract_middle(&bx, &[None, Some((0, true)), Some((1, true))]);
    let f1 = contract_middle(&bx, &[None, Some((1, true)), Some((0, true))]);
    double_cylinder(&bx, &bx, &x, &f0, &f1, true).expect("fold crossing")
}

/// Reidemeister witnesses: `i` removes a subdivision vertex, `ii` folds a
/// bigon onto an arc pair, `iii` is the identity on a triangle graph.
pub fn reidemeister(kind: u8) -> Result<Ribbon> {
    match kind {
        1 => {
            let b = BoundaryGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], vec![0], vec![1])
                .expect("graph");
            let f = GraphMap {
                vertices: vec![0, 1, 0],
                edges: vec![Some((0, true)), Some((1, true)), None],
            };
            mapping_cylinder(&b, &BoundaryGraph::circle(), &f)
        }
        2 => {
            let b = BoundaryGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], vec![0], vec![2])
                .expect("graph");
            let f = GraphMap {
                vertices: vec![0, 1, 1, 0],
                edges: vec![Some((0, true)), None, Some((1, true)), None],
            };
            mapping_cylinder(&b, &BoundaryGraph::circle(), &f)
        }
        3 => {
            let b = BoundaryGraph::new(3, vec![(0, 1), (1, 2), (0, 2)], vec![0], vec![2])
                .expect("graph");
            identity_cylinder(&b)
        }
        _ => Err(err(
            ErrorKind::Structural,
            "Reidemeister kind is 1, 2 or 3",
            format!("{kind}"),
        )),
    }
}

/// Named ribbons, sorted by name.
pub fn gallery() -> Vec<(&'static str, Ribbon)> {
    let tri = TwoComplex::triangle();
    let torus_disc = |f: usize| {
        let t = crate::polyhedron::torus_partition();
        let c = t.body();
        let (c, _) = c.remove_cells(
            &BTreeSet::new(),
            &BTreeSet::new(),
            &[1 - f].into_iter().collect(),
        );
        Ribbon::from_complex(c, &[0, 1, 2], &[]).expect("torus disc")
    };
    let torus_fan = {
        let t = crate::polyhedron::torus_partition();
        let (c, _) = t.body().remove_cells(
            &BTreeSet::new(),
            &BTreeSet::new(),
            &[1].into_iter().collect(),
        );
        Ribbon::from_complex(c.pachner_subdivide(0).expect("subdivide"), &[0, 1, 2], &[])
            .expect("torus fan")
    };
    let mut out: Vec<(&'static str, Ribbon)> = vec![
        ("b_plus", b_plus()),
        ("b_times", b_times()),
        ("cap", cap()),
        ("cup", cup()),
        ("cusp", cusp()),
        ("disc_acb", torus_disc(0)),
        ("disc_bca", torus_disc(1)),
        ("disc_acb_fan", torus_fan),
        ("fan_disc", Ribbon::filling(TwoComplex::fan()).expect("fan")),
        ("fold_crossing", fold_crossing()),
        ("house", house()),
        (
            "identity_circle",
            identity_cylinder(&BoundaryGraph::circle()).expect("id"),
        ),
        ("reidemeister_i", reidemeister(1).expect("r1")),
        ("reidemeister_ii", reidemeister(2).expect("r2")),
        ("reidemeister_iii", reidemeister(3).expect("r3")),
        ("saddle", saddle()),
        (
            "square_disc",
            Ribbon::filling(TwoComplex::square()).expect("square"),
        ),
        ("triangle_disc", Ribbon::filling(tri).expect("triangle")),
    ];
    out.sort_by_key(|p| p.0);
    out
}

pub fn gallery_ribbon(name: &str) -> Option<Ribbon> {
    gallery().into_iter().find(|p| p.0 == name).map(|p| p.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_signatures() {
        assert_eq!(cup().signature(), (0, 2));
        assert_eq!(cap().signature(), (2, 0));
        assert_eq!(b_times().signature(), (2, 2));
        assert_eq!(b_times().body().trisection_vertices().len(), 1);
        let s = saddle();
        assert_eq!(s.source().vertices, 3);
        assert_eq!(s.source().edges.len(), 4);
        assert_eq!(s.target(), &BoundaryGraph::unit_arc());
        for (name, r) in gallery() {
            for w in r.walks() {
                assert_ne!(w.start, w.end, "{name}");
            }
        }
    }

    #[test]
    fn torus_graph_from_b_times() {
        let g = b_times().target().closed();
        let t = g.contract_edge(0).unwrap();
        assert_eq!(t.vertices, 1);
        assert_eq!(t.edges, vec![(0, 0), (0, 0)]);
        assert!(b_times().target().contract_edge(0).is_err());
        let p = BoundaryGraph::b_plus().closed().contract_edge(0).unwrap();
        assert_eq!(p.vertices, 1);
        assert_eq!(p.edges.len(), 2);
        assert!(BoundaryGraph::torus_standard().contract_edge(0).is_err());
        assert_eq!(g.flipped().contract_edge(0).unwrap().flipped(), t);
    }

    #[test]
    fn daggers_are_commuting_involutions() {
        for (name, r) in gallery() {
            assert_eq!(r.dagger1().dagger1(), r, "{name}");
            assert_eq!(r.dagger2().dagger2(), r, "{name}");
            assert_eq!(r.dagger1().dagger2(), r.dagger2().dagger1(), "{name}");
        }
    }

    #[test]
    fn house_collapses() {
        let h = stack_auto(&cup(), &cap()).unwrap();
        assert!(h.markings().is_empty());
        assert!(h.complex().is_closed());
        assert_eq!(h.complex().euler_characteristic(), 2);
        let e = h.collapse_house().unwrap();
        assert!(e.is_isomorphic(&Ribbon::empty()));
        assert_eq!(e.complex().counts(), (0, 0, 0));
    }

    #[test]
    fn stacking_is_associative() {
        let id = identity_cylinder(&BoundaryGraph::b_times()).unwrap();
        let a = stack_auto(&stack_auto(&b_times(), &id).unwrap(), &id).unwrap();
        let b = stack_auto(&b_times(), &stack_auto(&id, &id).unwrap()).unwrap();
        assert!(a.is_isomorphic(&b));
        assert_eq!(a.markings().len(), 2);
        assert!(stack_auto(&cup(), &b_times()).is_err());
    }

    #[test]
    fn pi_twist_twice_differs() {
        let pair = identity_cylinder(&BoundaryGraph::circle())
            .unwrap()
            .disjoint_union(&identity_cylinder(&BoundaryGraph::unit_arc()).unwrap())
            .unwrap();
        let once = pair.pi_twist().unwrap();
        let twice = once.pi_twist().unwrap();
        assert_eq!(twice.twist(), 2);
        assert_ne!(twice, pair);
        assert!(!twice.is_isomorphic(&pair));
        assert_eq!(twice.target(), pair.target());
    }

    #[test]
    fn connected_sum_counts() {
        let a = identity_cylinder(&BoundaryGraph::c_minus()).unwrap();
        let b = identity_cylinder(&BoundaryGraph::c_plus()).unwrap();
        let i = a.markings().iter().position(|m| m.sign == -1).unwrap();
        let j = b.markings().iter().position(|m| m.sign == 1).unwrap();
        let s = connected_sum(&a, i, &b, j).unwrap();
        assert_eq!(s.source().signature(), (1, 1));
        assert_eq!(s.markings().len(), 2);
        assert_eq!(s.source().vertices, 3);
        assert!(connected_sum(&b, j, &a, i).is_err());
        assert!(connected_sum(&Ribbon::empty(), 0, &b, j).is_err());
    }

    #[test]
    fn serde_round_trip() {
        for (name, r) in gallery() {
            let js = serde_json::to_string(&r).unwrap();
            let back: Ribbon = serde_json::from_str(&js).unwrap();
            assert_eq!(back, r, "{name}");
        }
    }
}
