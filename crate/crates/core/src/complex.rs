//! Triangulated 2-complexes.
//!
//! Every face is a triangle with corners `v0 v1 v2` (`v0` is the root) and three
//! slots: slot 0 runs `v0 → v1` (the source slot), slot 1 runs `v0 → v2` and
//! slot 2 runs `v1 → v2`. A slot stores an edge and a sign; the sign pattern of an
//! edge aligned with its segment is `(+, −, +)`, matching `∂f = e₁ − e₂ + e₃`, and
//! a reversed edge carries the opposite sign. Slot indices are 0-based here.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorKind, Module, Result};

/// Boundary coefficient of an aligned edge in each slot.
pub const PATTERN: [i8; 3] = [1, -1, 1];

/// Corner pairs `(start, end)` of each slot's segment.
pub const SEGMENTS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize, i8)", into = "(usize, usize, i8)")]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub frame: i8,
}

impl From<(usize, usize, i8)> for Edge {
    fn from((src, dst, frame): (usize, usize, i8)) -> Self {
        Edge { src, dst, frame }
    }
}

impl From<Edge> for (usize, usize, i8) {
    fn from(e: Edge) -> Self {
        (e.src, e.dst, e.frame)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, i8)", into = "(usize, i8)")]
pub struct Slot {
    pub edge: usize,
    pub sign: i8,
}

impl From<(usize, i8)> for Slot {
    fn from((edge, sign): (usize, i8)) -> Self {
        Slot { edge, sign }
    }
}

impl From<Slot> for (usize, i8) {
    fn from(s: Slot) -> Self {
        (s.edge, s.sign)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub slots: [Slot; 3],
    pub eps: i8,
}

impl Face {
    /// Build a face from the edge on each segment and whether it runs along it.
    pub fn from_segments(segs: [(usize, bool); 3], eps: i8) -> Self {
        let mut slots = [Slot { edge: 0, sign: 1 }; 3];
        for i in 0..3 {
            let (edge, aligned) = segs[i];
            slots[i] = Slot {
                edge,
                sign: if aligned { PATTERN[i] } else { -PATTERN[i] },
            };
        }
        Face { slots, eps }
    }

    #[inline]
    pub fn aligned(&self, i: usize) -> bool {
        self.slots[i].sign == PATTERN[i]
    }

    pub fn edges(&self) -> [usize; 3] {
        [self.slots[0].edge, self.slots[1].edge, self.slots[2].edge]
    }
}

/// An identification of two face slots; `rel = 1` glues start to start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingEntry {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub rel: i8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingSet {
    pub entries: Vec<GluingEntry>,
}

impl GluingSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn glue(mut self, a: (usize, usize), b: (usize, usize), rel: i8) -> Self {
        self.entries.push(GluingEntry { a, b, rel });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawComplex", into = "RawComplex")]
pub struct TwoComplex {
    n_vertices: usize,
    root: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    vertices: usize,
    root: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

impl TryFrom<RawComplex> for TwoComplex {
    type Error = Error;
    fn try_from(r: RawComplex) -> Result<Self> {
        TwoComplex::new(r.vertices, r.root, r.edges, r.faces)
    }
}

impl From<TwoComplex> for RawComplex {
    fn from(c: TwoComplex) -> Self {
        RawComplex {
            vertices: c.n_vertices,
            root: c.root,
            edges: c.edges,
            faces: c.faces,
        }
    }
}

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Complex, kind, pre, detail)
}

/// How cells of an input complex map into the output of a move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabel {
    pub vertices: Vec<Option<usize>>,
    pub edges: Vec<Option<usize>>,
}

impl Relabel {
    pub fn identity(c: &TwoComplex) -> Self {
        Relabel {
            vertices: (0..c.n_vertices).map(Some).collect(),
            edges: (0..c.edges.len()).map(Some).collect(),
        }
    }
}

/// Result of [`TwoComplex::make_unbroken`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcePath {
    /// The complex with faces re-rooted.
    pub complex: TwoComplex,
    /// Faces in path order.
    pub order: Vec<usize>,
    /// Path edges with direction (`true` = along the edge).
    pub path: Vec<(usize, bool)>,
}

impl TwoComplex {
    pub fn new(n_vertices: usize, root: usize, edges: Vec<Edge>, faces: Vec<Face>) -> Result<Self> {
        if n_vertices > 0 && root >= n_vertices {
            return Err(err(
                ErrorKind::Structural,
                "root exists",
                format!("root {root}"),
            ));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.src >= n_vertices || e.dst >= n_vertices {
                return Err(err(
                    ErrorKind::Structural,
                    "edge endpoints exist",
                    format!("edge {i}"),
                ));
            }
            if e.frame != 1 && e.frame != -1 {
                return Err(err(
                    ErrorKind::Structural,
                    "framing is ±1",
                    format!("edge {i}"),
                ));
            }
        }
        let c = TwoComplex {
            n_vertices,
            root,
            edges,
            faces,
        };
        for f in 0..c.faces.len() {
            c.check_face(f)?;
        }
        Ok(c)
    }

    pub fn empty() -> Self {
        TwoComplex {
            n_vertices: 0,
            root: 0,
            edges: vec![],
            faces: vec![],
        }
    }

    fn check_face(&self, f: usize) -> Result<()> {
        let face = &self.faces[f];
        if face.eps != 1 && face.eps != -1 {
            return Err(err(
                ErrorKind::Structural,
                "orientation is ±1",
                format!("face {f}"),
            ));
        }
        for s in &face.slots {
            if s.edge >= self.edges.len() || (s.sign != 1 && s.sign != -1) {
                return Err(err(
                    ErrorKind::Structural,
                    "slots reference edges",
                    format!("face {f}"),
                ));
            }
        }
        // corner i is reached from two slots; both must agree
        let mut corner = [None::<usize>; 3];
        for (i, &(a, b)) in SEGMENTS.iter().enumerate() {
            let e = self.edges[face.slots[i].edge];
            let (s, t) = if face.aligned(i) {
                (e.src, e.dst)
            } else {
                (e.dst, e.src)
            };
            for (k, v) in [(a, s), (b, t)] {
                match corner[k] {
                    None => corner[k] = Some(v),
                    Some(w) if w == v => {}
                    Some(_) => {
                        return Err(err(
                            ErrorKind::Structural,
                            "face closes into a triangle loop",
                            format!("face {f}"),
                        ))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn set_root(&mut self, v: usize) {
        self.root = v;
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.n_vertices, self.edges.len(), self.faces.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Corners `[v0, v1, v2]` of a face.
    pub fn corners(&self, f: usize) -> [usize; 3] {
        let face = &self.faces[f];
        let e0 = self.edges[face.slots[0].edge];
        let e1 = self.edges[face.slots[1].edge];
        let (v0, v1) = if face.aligned(0) {
            (e0.src, e0.dst)
        } else {
            (e0.dst, e0.src)
        };
        let v2 = if face.aligned(1) { e1.dst } else { e1.src };
        [v0, v1, v2]
    }

    /// Corners in the order of the face's orientation.
    pub fn oriented_cycle(&self, f: usize) -> [usize; 3] {
        let c = self.corners(f);
        if self.faces[f].eps == 1 {
            c
        } else {
            [c[0], c[2], c[1]]
        }
    }

    /// Number of face slots referencing each edge.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.edges.len()];
        for f in &self.faces {
            for s in &f.slots {
                deg[s.edge] += 1;
            }
        }
        deg
    }

    /// Boundary flag per edge: the edge lies in exactly one face.
    pub fn boundary_flags(&self) -> Vec<bool> {
        self.edge_degrees().into_iter().map(|d| d == 1).collect()
    }

    pub fn boundary_edges(&self) -> Vec<usize> {
        self.boundary_flags()
            .into_iter()
            .enumerate()
            .filter_map(|(e, b)| b.then_some(e))
            .collect()
    }

    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        self.boundary_edges()
            .into_iter()
            .flat_map(|e| [self.edges[e].src, self.edges[e].dst])
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.edge_degrees().iter().all(|&d| d != 1)
    }

    pub fn is_regular(&self) -> bool {
        self.edge_degrees().iter().all(|&d| d <= 2)
    }

    /// Faces containing each edge, one entry per slot occurrence.
    pub fn edge_faces(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.edges.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for (i, s) in face.slots.iter().enumerate() {
                out[s.edge].push((f, i));
            }
        }
        out
    }

    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_vertices];
        for f in 0..self.faces.len() {
            let mut cs = self.corners(f).to_vec();
            cs.sort_unstable();
            cs.dedup();
            for v in cs {
                out[v].push(f);
            }
        }
        out
    }

    /// Connected components as vertex sets (edges connect their endpoints).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n_vertices);
        for e in &self.edges {
            uf.union(e.src, e.dst);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n_vertices {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Single triangle `v0 → v1 → v2` with `v0 → v2`.
    pub fn triangle() -> Self {
        assemble(1, &GluingSet::new()).expect("single simplex")
    }

    /// Two triangles glued along slot 1 of the first and slot 2 of the second.
    pub fn square() -> Self {
        assemble(2, &GluingSet::new().glue((0, 1), (1, 2), 1)).expect("square gluing")
    }

    /// The triangle after one 1-3 subdivision.
    pub fn fan() -> Self {
        Self::triangle().pachner_subdivide(0).expect("subdivide")
    }

    /// Re-root face `f` so that its corners become `[c[p0], c[p1], c[p2]]`.
    pub fn reroot_face(&mut self, f: usize, perm: [usize; 3]) {
        let face = self.faces[f];
        let mut segs = [(0usize, true); 3];
        for (k, &(a, b)) in SEGMENTS.iter().enumerate() {
            let (pa, pb) = (perm[a], perm[b]);
            let (lo, hi, flipped) = if pa < pb {
                (pa, pb, false)
            } else {
                (pb, pa, true)
            };
            let old = SEGMENTS
                .iter()
                .position(|&s| s == (lo, hi))
                .expect("segment");
            segs[k] = (face.slots[old].edge, face.aligned(old) != flipped);
        }
        let odd = perm_is_odd(perm);
        self.faces[f] = Face::from_segments(segs, if odd { -face.eps } else { face.eps });
    }

    /// Reverse all face orientations and edge directions.
    pub fn dagger1(&self) -> Self {
        let mut c = self.clone();
        for e in &mut c.edges {
            std::mem::swap(&mut e.src, &mut e.dst);
        }
        for f in &mut c.faces {
            f.eps = -f.eps;
            for s in &mut f.slots {
                s.sign = -s.sign;
            }
        }
        c
    }

    /// Flip all framings.
    pub fn dagger2(&self) -> Self {
        let mut c = self.clone();
        for e in &mut c.edges {
            e.frame = -e.frame;
        }
        c
    }

    /// Glue the complex to its orientation-reversed copy along the boundary.
    pub fn double(&self) -> Self {
        let bflags = self.boundary_flags();
        let bverts = self.boundary_vertices();
        let mut c = self.clone();
        let mut vmap: Vec<usize> = (0..self.n_vertices).collect();
        for v in 0..self.n_vertices {
            if !bverts.contains(&v) {
                vmap[v] = c.n_vertices;
                c.n_vertices += 1;
            }
        }
        let mut emap: Vec<usize> = (0..self.edges.len()).collect();
        for (e, &b) in bflags.iter().enumerate() {
            if !b {
                let old = self.edges[e];
                emap[e] = c.edges.len();
                c.edges.push(Edge {
                    src: vmap[old.src],
                    dst: vmap[old.dst],
                    frame: old.frame,
                });
            }
        }
        for f in &self.faces {
            let mut g = *f;
            g.eps = -g.eps;
            for s in &mut g.slots {
                s.edge = emap[s.edge];
            }
            c.faces.push(g);
        }
        c
    }

    /// Disjoint union; cells of `other` are appended.
    pub fn disjoint_union(&self, other: &TwoComplex) -> Self {
        self.union_identify(other, &[], &[])
            .expect("nothing to identify")
            .0
    }

    /// Union of `self` and `other` with the listed vertices and edges of `other`
    /// identified with those of `self`. Cells of `self` keep their indices; the
    /// returned maps send vertices and edges of `other` into the result.
    pub fn union_identify(
        &self,
        other: &TwoComplex,
        vpairs: &[(usize, usize)],
        epairs: &[(usize, usize)],
    ) -> Result<(TwoComplex, Vec<usize>, Vec<usize>)> {
        let mut c = self.clone();
        let mut vmap = vec![usize::MAX; other.n_vertices];
        for &(a, b) in vpairs {
            if vmap[b] != usize::MAX && vmap[b] != a {
                return Err(err(
                    ErrorKind::Gluing,
                    "identification is a function",
                    format!("vertex {b}"),
                ));
            }
            vmap[b] = a;
        }
        for &(a, b) in epairs {
            let (ea, eb) = (self.edges[a], other.edges[b]);
            for (x, y) in [(ea.src, eb.src), (ea.dst, eb.dst)] {
                if vmap[y] == usize::MAX {
                    vmap[y] = x;
                } else if vmap[y] != x {
                    return Err(err(
                        ErrorKind::Gluing,
                        "edge identification respects endpoints",
                        format!("edge {b}"),
                    ));
                }
            }
        }
        for v in vmap.iter_mut() {
            if *v == usize::MAX {
                *v = c.n_vertices;
                c.n_vertices += 1;
            }
        }
        let mut emap = vec![usize::MAX; other.edges.len()];
        for &(a, b) in epairs {
            emap[b] = a;
        }
        for (e, m) in emap.iter_mut().enumerate() {
            if *m == usize::MAX {
                let old = other.edges[e];
                *m = c.edges.len();
                c.edges.push(Edge {
                    src: vmap[old.src],
                    dst: vmap[old.dst],
                    frame: old.frame,
                });
            }
        }
        for f in &other.faces {
            let mut g = *f;
            for s in &mut g.slots {
                s.edge = emap[s.edge];
            }
            c.faces.push(g);
        }
        if self.n_vertices == 0 && other.n_vertices > 0 {
            c.root = vmap[other.root];
        }
        Ok((c, vmap, emap))
    }

    /// Append a vertex; returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.n_vertices += 1;
        self.n_vertices - 1
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, frame: i8) -> usize {
        self.edges.push(Edge { src, dst, frame });
        self.edges.len() - 1
    }

    /// Reverse the direction of edge `e`, keeping every face's corners.
    pub fn reverse_edge(&mut self, e: usize) {
        let ed = &mut self.edges[e];
        std::mem::swap(&mut ed.src, &mut ed.dst);
        for f in &mut self.faces {
            for s in &mut f.slots {
                if s.edge == e {
                    s.sign = -s.sign;
                }
            }
        }
    }

    /// Append a face with corners `[v0, v1, v2]` and the given edges on its
    /// segments; alignment is read off the edge endpoints.
    pub fn add_face(
        &mut self,
        corners: [usize; 3],
        seg_edges: [usize; 3],
        eps: i8,
    ) -> Result<usize> {
        let mut segs = [(0, true); 3];
        for (i, &(a, b)) in SEGMENTS.iter().enumerate() {
            let e = self.edges[seg_edges[i]];
            let aligned = if e.src == corners[a] && e.dst == corners[b] {
                true
            } else if e.src == corners[b] && e.dst == corners[a] {
                false
            } else {
                return Err(err(
                    ErrorKind::Structural,
                    "face closes into a triangle loop",
                    format!("segment {i}"),
                ));
            };
            segs[i] = (seg_edges[i], aligned);
        }
        self.faces.push(Face::from_segments(segs, eps));
        let f = self.faces.len() - 1;
        self.check_face(f)?;
        Ok(f)
    }

    /// Drop vertices and edges not used by the kept sets; returns the relabeling.
    pub fn remove_cells(
        &self,
        drop_vertices: &BTreeSet<usize>,
        drop_edges: &BTreeSet<usize>,
        drop_faces: &BTreeSet<usize>,
    ) -> (TwoComplex, Relabel) {
        let mut vnew = vec![None; self.n_vertices];
        let mut nv = 0;
        for (v, slot) in vnew.iter_mut().enumerate() {
            if !drop_vertices.contains(&v) {
                *slot = Some(nv);
                nv += 1;
            }
        }
        let mut enew = vec![None; self.edges.len()];
        let mut edges = Vec::new();
        for (e, slot) in enew.iter_mut().enumerate() {
            if !drop_edges.contains(&e) {
                let old = self.edges[e];
                *slot = Some(edges.len());
                edges.push(Edge {
                    src: vnew[old.src].expect("kept edge has kept endpoints"),
                    dst: vnew[old.dst].expect("kept edge has kept endpoints"),
                    frame: old.frame,
                });
            }
        }
        let faces = self
            .faces
            .iter()
            .enumerate()
            .filter(|(f, _)| !drop_faces.contains(f))
            .map(|(_, face)| {
                let mut g = *face;
                for s in &mut g.slots {
                    s.edge = enew[s.edge].expect("kept face has kept edges");
                }
                g
            })
            .collect();
        let root = vnew.get(self.root).copied().flatten().unwrap_or(0);
        (
            TwoComplex {
                n_vertices: nv,
                root,
                edges,
                faces,
            },
            Relabel {
                vertices: vnew,
                edges: enew,
            },
        )
    }

    /// Choose face roots and an order so that consecutive roots are equal or
    /// joined by the earlier face's source edge. The path has at most `k − 1` edges.
    pub fn make_unbroken(&self) -> Result<SourcePath> {
        let k = self.faces.len();
        if k == 0 {
            return Ok(SourcePath {
                complex: self.clone(),
                order: vec![],
                path: vec![],
            });
        }
        let used: BTreeSet<usize> = (0..k).flat_map(|f| self.corners(f)).collect();
        let mut uf = UnionFind::new(self.n_vertices);
        for f in 0..k {
            let c = self.corners(f);
            uf.union(c[0], c[1]);
            uf.union(c[0], c[2]);
        }
        let first = *used.iter().next().expect("nonempty");
        if used.iter().any(|&v| uf.find(v) != uf.find(first)) {
            return Err(err(
                ErrorKind::Connectivity,
                "complex is connected",
                "faces fall into several components",
            ));
        }
        let corners: Vec<[usize; 3]> = (0..k).map(|f| self.corners(f)).collect();
        let vf = self.vertex_faces();
        let mut search = UnbrokenSearch {
            corners: &corners,
            vertex_faces: &vf,
            visited: vec![false; k],
            order: Vec::with_capacity(k),
            roots: Vec::with_capacity(k),
            budget: 200_000,
        };
        let mut found = false;
        'outer: for f in 0..k {
            for &r in &dedup3(corners[f]) {
                search.visited[f] = true;
                search.order.push(f);
                search.roots.push(r);
                if search.extend() {
                    found = true;
                    break 'outer;
                }
                search.visited[f] = false;
                search.order.pop();
                search.roots.pop();
            }
        }
        if !found {
            return Err(err(
                ErrorKind::Connectivity,
                "an unbroken ordering exists",
                "search exhausted",
            ));
        }
        let (order, roots) = (search.order, search.roots);
        let mut out = self.clone();
        let mut path = Vec::new();
        for i in 0..k {
            let f = order[i];
            let r = roots[i];
            let c = corners[f];
            let a = c.iter().position(|&v| v == r).expect("root is a corner");
            let b = match roots.get(i + 1) {
                Some(&next) if next != r => c
                    .iter()
                    .position(|&v| v == next)
                    .expect("next root is a corner"),
                _ => (a + 1) % 3,
            };
            let rest = 3 - a - b;
            out.reroot_face(f, [a, b, rest]);
            if let Some(&next) = roots.get(i + 1) {
                if next != r {
                    let s = out.faces[f].slots[0];
                    path.push((s.edge, out.faces[f].aligned(0)));
                }
            }
        }
        out.root = roots[0];
        Ok(SourcePath {
            complex: out,
            order,
            path,
        })
    }

    /// Replace the diagonal `e` of the quadrilateral formed by its two faces.
    pub fn pachner_flip(&self, e: usize) -> Result<Self> {
        let inapplicable = |d: &str| {
            err(
                ErrorKind::MoveInapplicable,
                "interior edge of a quadrilateral",
                d.to_string(),
            )
        };
        if e >= self.edges.len() {
            return Err(inapplicable("no such edge"));
        }
        let ef = &self.edge_faces()[e];
        if ef.len() != 2 || ef[0].0 == ef[1].0 {
            return Err(inapplicable("edge is not shared by exactly two faces"));
        }
        let (f1, f2) = (ef[0].0, ef[1].0);
        let ed = self.edges[e];
        let (a, b) = (ed.src, ed.dst);
        let third = |f: usize| -> Option<usize> {
            let c = self.corners(f);
            let mut rest: Vec<usize> = c.iter().copied().filter(|&v| v != a && v != b).collect();
            if rest.len() == 1 && c.contains(&a) && c.contains(&b) {
                rest.pop()
            } else {
                None
            }
        };
        let (x, y) = match (third(f1), third(f2)) {
            (Some(x), Some(y)) if x != y && a != b => (x, y),
            _ => return Err(inapplicable("degenerate quadrilateral")),
        };
        let find_edge = |f: usize, u: usize, v: usize| -> Option<usize> {
            self.faces[f].edges().into_iter().find(|&g| {
                g != e && {
                    let ge = self.edges[g];
                    (ge.src == u && ge.dst == v) || (ge.src == v && ge.dst == u)
                }
            })
        };
        let (exa, exb, eya, eyb) = match (
            find_edge(f1, x, a),
            find_edge(f1, x, b),
            find_edge(f2, y, a),
            find_edge(f2, y, b),
        ) {
            (Some(p), Some(q), Some(r), Some(s)) => (p, q, r, s),
            _ => return Err(inapplicable("degenerate quadrilateral")),
        };
        // Orient the quadrilateral by f1: its cycle reads (p, q, x) with {p, q} = {a, b}.
        let cyc = self.oriented_cycle(f1);
        let xi = cyc.iter().position(|&v| v == x).expect("x in f1");
        let p = cyc[(xi + 1) % 3];
        let (ep_x, ep_y, eq_x, eq_y) = if p == a {
            (exa, eya, exb, eyb)
        } else {
            (exb, eyb, exa, eya)
        };
        let q = if p == a { b } else { a };
        let mut out = self.clone();
        out.edges[e] = Edge {
            src: x,
            dst: y,
            frame: ed.frame,
        };
        let seg = |out: &TwoComplex, g: usize, s: usize, t: usize| {
            (g, out.edges[g].src == s && out.edges[g].dst == t)
        };
        // cycle x → p → y and cycle y → q → x, both rooted at x
        out.faces[f1] = Face::from_segments(
            [
                seg(&out, ep_x, x, p),
                seg(&out, e, x, y),
                seg(&out, ep_y, p, y),
            ],
            1,
        );
        out.faces[f2] = Face::from_segments(
            [
                seg(&out, e, x, y),
                seg(&out, eq_x, x, q),
                seg(&out, eq_y, y, q),
            ],
            1,
        );
        out.check_face(f1)?;
        out.check_face(f2)?;
        Ok(out)
    }

    /// 1-3 subdivision of face `f` by a new interior vertex.
    pub fn pachner_subdivide(&self, f: usize) -> Result<Self> {
        if f >= self.faces.len() {
            return Err(err(
                ErrorKind::MoveInapplicable,
                "face exists",
                format!("face {f}"),
            ));
        }
        let face = self.faces[f];
        let c = self.corners(f);
        let mut out = self.clone();
        let z = out.add_vertex();
        let ez: Vec<usize> = c.iter().map(|&v| out.add_edge(v, z, 1)).collect();
        let s = |i: usize| (face.slots[i].edge, face.aligned(i));
        let t = |i: usize| (ez[i], true);
        let eps = face.eps;
        out.faces[f] = Face::from_segments([s(0), t(0), t(1)], eps);
        out.faces.push(Face::from_segments([s(2), t(1), t(2)], eps));
        let back = (face.slots[1].edge, !face.aligned(1));
        out.faces.push(Face::from_segments([back, t(2), t(0)], eps));
        Ok(out)
    }

    /// Inverse of [`pachner_subdivide`](Self::pachner_subdivide) at vertex `v`.
    pub fn pachner_merge(&self, v: usize) -> Result<Self> {
        self.pachner_merge_with_map(v).map(|(c, _)| c)
    }

    pub fn pachner_merge_with_map(&self, v: usize) -> Result<(Self, Relabel)> {
        let bad = |d: &str| {
            err(
                ErrorKind::MoveInapplicable,
                "interior vertex with a 3-face disc star",
                d.to_string(),
            )
        };
        if v >= self.n_vertices {
            return Err(bad("no such vertex"));
        }
        let incident: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edges[e].src == v || self.edges[e].dst == v)
            .collect();
        let star: Vec<usize> = self.vertex_faces()[v].clone();
        let deg = self.edge_degrees();
        if incident.len() != 3
            || star.len() != 3
            || incident
                .iter()
                .any(|&e| deg[e] != 2 || self.edges[e].src == self.edges[e].dst)
        {
            return Err(bad("star is not three faces around three interior edges"));
        }
        let mut link_edges = Vec::new();
        for &f in &star {
            let c = self.corners(f);
            if c.iter().filter(|&&u| u == v).count() != 1 {
                return Err(bad("vertex repeats in a face"));
            }
            let opp: Vec<usize> = self.faces[f]
                .edges()
                .into_iter()
                .filter(|e| !incident.contains(e))
                .collect();
            if opp.len() != 1 {
                return Err(bad("face does not have one link edge"));
            }
            link_edges.push(opp[0]);
        }
        let link: BTreeSet<usize> = incident
            .iter()
            .map(|&e| {
                if self.edges[e].src == v {
                    self.edges[e].dst
                } else {
                    self.edges[e].src
                }
            })
            .collect();
        if link.len() != 3 || link_edges.iter().collect::<BTreeSet<_>>().len() != 3 {
            return Err(bad("link is not a triangle"));
        }
        let f0 = star[0];
        let cyc = self.oriented_cycle(f0);
        let vi = cyc.iter().position(|&u| u == v).expect("v in face");
        let (p, q) = (cyc[(vi + 1) % 3], cyc[(vi + 2) % 3]);
        let r = *link
            .iter()
            .find(|&&u| u != p && u != q)
            .expect("third link vertex");
        let eps = self.faces[f0].eps;
        let corners = if eps == 1 { [p, q, r] } else { [q, p, r] };
        let find = |u: usize, w: usize| {
            link_edges
                .iter()
                .copied()
                .find(|&g| {
                    let ge = self.edges[g];
                    (ge.src == u && ge.dst == w) || (ge.src == w && ge.dst == u)
                })
                .expect("link edge")
        };
        let mut tmp = self.clone();
        let segs = [
            find(corners[0], corners[1]),
            find(corners[0], corners[2]),
            find(corners[1], corners[2]),
        ];
        let nf = tmp.add_face(corners, segs, eps)?;
        tmp.faces[f0] = tmp.faces[nf];
        tmp.faces.pop();
        let drop_v: BTreeSet<usize> = [v].into();
        let drop_e: BTreeSet<usize> = incident.into_iter().collect();
        let drop_f: BTreeSet<usize> = star[1..].iter().copied().collect();
        if self.root == v {
            tmp.root = r;
        }
        Ok(tmp.remove_cells(&drop_v, &drop_e, &drop_f))
    }

    /// Isomorphism of complexes preserving orientation cycles, edge directions,
    /// framings and the given cell colors. Roots and slot rotations are ignored.
    pub fn is_isomorphic_colored(
        &self,
        vc: &[u64],
        ec: &[u64],
        other: &TwoComplex,
        vc2: &[u64],
        ec2: &[u64],
    ) -> bool {
        iso::isomorphic(self, vc, ec, other, vc2, ec2)
    }

    pub fn is_isomorphic(&self, other: &TwoComplex) -> bool {
        let z = |n: usize| vec![0u64; n];
        self.is_isomorphic_colored(
            &z(self.n_vertices),
            &z(self.edges.len()),
            other,
            &z(other.n_vertices),
            &z(other.edges.len()),
        )
    }
}

fn dedup3(c: [usize; 3]) -> Vec<usize> {
    let mut v = Vec::with_capacity(3);
    for x in c {
        if !v.contains(&x) {
            v.push(x);
        }
    }
    v
}

fn perm_is_odd(p: [usize; 3]) -> bool {
    let mut inv = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

struct UnbrokenSearch<'a> {
    corners: &'a [[usize; 3]],
    vertex_faces: &'a [Vec<usize>],
    visited: Vec<bool>,
    order: Vec<usize>,
    roots: Vec<usize>,
    budget: usize,
}

impl UnbrokenSearch<'_> {
    fn extend(&mut self) -> bool {
        if self.order.len() == self.corners.len() {
            return true;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let f = *self.order.last().expect("nonempty");
        let r = *self.roots.last().expect("nonempty");
        // zero-cost moves first, then moves along an edge of the current face
        let mut cands: Vec<(usize, usize, usize)> = Vec::new();
        for (cost, root) in dedup3(self.corners[f])
            .into_iter()
            .map(|u| (usize::from(u != r), u))
        {
            for &g in &self.vertex_faces[root] {
                if !self.visited[g] {
                    cands.push((cost, g, root));
                }
            }
        }
        cands.sort_unstable();
        for (_, g, root) in cands {
            if self.visited[g] {
                continue;
            }
            self.visited[g] = true;
            self.order.push(g);
            self.roots.push(root);
            if self.extend() {
                return true;
            }
            self.visited[g] = false;
            self.order.pop();
            self.roots.pop();
        }
        false
    }
}

/// Union-find with path compression.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Quotient of `k` disjoint positively oriented simplices by a gluing set.
pub fn assemble(k: usize, gluing: &GluingSet) -> Result<TwoComplex> {
    assemble_oriented(&vec![1; k], gluing)
}

/// As [`assemble`], with a chosen orientation per simplex.
pub fn assemble_oriented(eps: &[i8], gluing: &GluingSet) -> Result<TwoComplex> {
    let k = eps.len();
    let nseg = 3 * k;
    // parity union-find over segments: parity[s] = direction relative to parent
    let mut parent: Vec<usize> = (0..nseg).collect();
    let mut parity = vec![false; nseg];
    fn find(parent: &mut [usize], parity: &mut [bool], x: usize) -> (usize, bool) {
        let mut path = Vec::new();
        let mut r = x;
        while parent[r] != r {
            path.push(r);
            r = parent[r];
        }
        // recompute parities to the root, then compress
        let mut acc = false;
        for &y in path.iter().rev() {
            acc ^= parity[y];
            parity[y] = acc;
            parent[y] = r;
        }
        (r, if path.is_empty() { false } else { parity[x] })
    }
    for (i, g) in gluing.entries.iter().enumerate() {
        let ok = |(f, s): (usize, usize)| f < k && s < 3;
        if !ok(g.a) || !ok(g.b) {
            return Err(err(
                ErrorKind::Gluing,
                "gluing refers to existing slots",
                format!("entry {i}"),
            ));
        }
        if g.a == g.b {
            return Err(err(
                ErrorKind::Gluing,
                "pairing of distinct face-slots",
                format!("entry {i}"),
            ));
        }
        if g.rel != 1 && g.rel != -1 {
            return Err(err(
                ErrorKind::Gluing,
                "relative orientation is ±1",
                format!("entry {i}"),
            ));
        }
        let sa = 3 * g.a.0 + g.a.1;
        let sb = 3 * g.b.0 + g.b.1;
        let flip = g.rel == -1;
        let (ra, pa) = find(&mut parent, &mut parity, sa);
        let (rb, pb) = find(&mut parent, &mut parity, sb);
        if ra == rb {
            if pa ^ pb != flip {
                return Err(err(
                    ErrorKind::Gluing,
                    "consistent identification",
                    format!("orientation conflict at entry {i}"),
                ));
            }
        } else {
            parent[rb] = ra;
            parity[rb] = pa ^ pb ^ flip;
        }
    }
    // vertex identification induced by segment identification
    let mut vuf = UnionFind::new(3 * k);
    let seg_ends = |s: usize| {
        let (f, i) = (s / 3, s % 3);
        let (a, b) = SEGMENTS[i];
        (3 * f + a, 3 * f + b)
    };
    for s in 0..nseg {
        let (r, p) = find(&mut parent, &mut parity, s);
        let (a, b) = seg_ends(s);
        let (ra, rb) = seg_ends(r);
        let (x, y) = if p { (b, a) } else { (a, b) };
        vuf.union(x, ra);
        vuf.union(y, rb);
    }
    let mut vindex = HashMap::new();
    for x in 0..3 * k {
        let r = vuf.find(x);
        let n = vindex.len();
        vindex.entry(r).or_insert(n);
    }
    let mut eindex: HashMap<usize, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    for f in 0..k {
        let mut segs = [(0usize, true); 3];
        for i in 0..3 {
            let s = 3 * f + i;
            let (r, p) = find(&mut parent, &mut parity, s);
            let e = *eindex.entry(r).or_insert_with(|| {
                let (a, b) = seg_ends(r);
                edges.push(Edge {
                    src: vindex[&vuf.find(a)],
                    dst: vindex[&vuf.find(b)],
                    frame: 1,
                });
                edges.len() - 1
            });
            segs[i] = (e, !p);
        }
        faces.push(Face::from_segments(segs, eps[f]));
    }
    let root = if k > 0 { vindex[&vuf.find(0)] } else { 0 };
    TwoComplex::new(vindex.len(), root, edges, faces)
        .map_err(|e| err(ErrorKind::Gluing, "consistent identification", e.detail))
}

mod iso {
    use super::TwoComplex;

    struct State<'a> {
        a: &'a TwoComplex,
        b: &'a TwoComplex,
        vc: (&'a [u64], &'a [u64]),
        ec: (&'a [u64], &'a [u64]),
        vmap: Vec<usize>,
        vinv: Vec<usize>,
        emap: Vec<usize>,
        einv: Vec<usize>,
        fmap: Vec<usize>,
        finv: Vec<usize>,
        a_edge_faces: Vec<Vec<(usize, usize)>>,
        b_edge_faces: Vec<Vec<(usize, usize)>>,
    }

    const NONE: usize = usize::MAX;

    /// Oriented cycle of a face as (vertex, edge to next vertex, edge runs forward).
    fn cycle(c: &TwoComplex, f: usize) -> [(usize, usize, bool); 3] {
        let face = c.face(f);
        let corners = c.corners(f);
        let seg = |i: usize| (face.slots[i].edge, face.aligned(i));
        // eps = +1: v0 -s0-> v1 -s2-> v2 -s1^-1-> v0
        let (e01, a01) = seg(0);
        let (e02, a02) = seg(1);
        let (e12, a12) = seg(2);
        if face.eps == 1 {
            [
                (corners[0], e01, a01),
                (corners[1], e12, a12),
                (corners[2], e02, !a02),
            ]
        } else {
            [
                (corners[0], e02, a02),
                (corners[2], e12, !a12),
                (corners[1], e01, !a01),
            ]
        }
    }

    pub fn isomorphic(
        a: &TwoComplex,
        vca: &[u64],
        eca: &[u64],
        b: &TwoComplex,
        vcb: &[u64],
        ecb: &[u64],
    ) -> bool {
        if a.counts() != b.counts() {
            return false;
        }
        let mut s1: Vec<u64> = vca.to_vec();
        let mut s2: Vec<u64> = vcb.to_vec();
        s1.sort_unstable();
        s2.sort_unstable();
        if s1 != s2 {
            return false;
        }
        let mut st = State {
            a,
            b,
            vc: (vca, vcb),
            ec: (eca, ecb),
            vmap: vec![NONE; a.n_vertices()],
            vinv: vec![NONE; b.n_vertices()],
            emap: vec![NONE; a.edges().len()],
            einv: vec![NONE; b.edges().len()],
            fmap: vec![NONE; a.faces().len()],
            finv: vec![NONE; b.faces().len()],
            a_edge_faces: a.edge_faces(),
            b_edge_faces: b.edge_faces(),
        };
        st.solve()
    }

    impl State<'_> {
        fn snapshot(
            &self,
        ) -> (
            Vec<usize>,
            Vec<usize>,
            Vec<usize>,
            Vec<usize>,
            Vec<usize>,
            Vec<usize>,
        ) {
            (
                self.vmap.clone(),
                self.vinv.clone(),
                self.emap.clone(),
                self.einv.clone(),
                self.fmap.clone(),
                self.finv.clone(),
            )
        }

        fn restore(
            &mut self,
            s: (
                Vec<usize>,
                Vec<usize>,
                Vec<usize>,
                Vec<usize>,
                Vec<usize>,
                Vec<usize>,
            ),
        ) {
            (
                self.vmap, self.vinv, self.emap, self.einv, self.fmap, self.finv,
            ) = s;
        }

        fn map_vertex(&mut self, x: usize, y: usize) -> bool {
            if self.vmap[x] == y && self.vinv[y] == x {
                return true;
            }
            if self.vmap[x] != NONE || self.vinv[y] != NONE || self.vc.0[x] != self.vc.1[y] {
                return false;
            }
            self.vmap[x] = y;
            self.vinv[y] = x;
            true
        }

        fn map_edge(&mut self, x: usize, y: usize) -> bool {
            if self.emap[x] == y && self.einv[y] == x {
                return true;
            }
            if self.emap[x] != NONE || self.einv[y] != NONE || self.ec.0[x] != self.ec.1[y] {
                return false;
            }
            let (ea, eb) = (self.a.edge(x), self.b.edge(y));
            if ea.frame != eb.frame || (ea.src == ea.dst) != (eb.src == eb.dst) {
                return false;
            }
            self.emap[x] = y;
            self.einv[y] = x;
            self.map_vertex(ea.src, eb.src) && self.map_vertex(ea.dst, eb.dst)
        }

        fn map_face(&mut self, fa: usize, fb: usize, shift: usize) -> bool {
            if self.fmap[fa] != NONE || self.finv[fb] != NONE {
                return self.fmap[fa] == fb && self.finv[fb] == fa;
            }
            let ca = cycle(self.a, fa);
            let cb = cycle(self.b, fb);
            self.fmap[fa] = fb;
            self.finv[fb] = fa;
            for i in 0..3 {
                let (va, ea, da) = ca[i];
                let (vb, eb, db) = cb[(i + shift) % 3];
                if da != db || !self.map_vertex(va, vb) || !self.map_edge(ea, eb) {
                    return false;
                }
            }
            true
        }

        fn solve(&mut self) -> bool {
            // pick an unmapped face of `a` adjacent to the mapped part if possible
            let nf = self.a.faces().len();
            let mut pick = None;
            for e in 0..self.a.edges().len() {
                if self.emap[e] == NONE {
                    continue;
                }
                if let Some(&(f, _)) = self.a_edge_faces[e]
                    .iter()
                    .find(|(f, _)| self.fmap[*f] == NONE)
                {
                    pick = Some((f, Some(e)));
                    break;
                }
            }
            if pick.is_none() {
                pick = (0..nf).find(|&f| self.fmap[f] == NONE).map(|f| (f, None));
            }
            let Some((fa, via)) = pick else {
                return self.finish();
            };
            let candidates: Vec<usize> = match via {
                Some(e) => self.b_edge_faces[self.emap[e]]
                    .iter()
                    .map(|&(f, _)| f)
                    .filter(|&f| self.finv[f] == NONE)
                    .collect(),
                None => (0..nf).filter(|&f| self.finv[f] == NONE).collect(),
            };
            for fb in candidates {
                for shift in 0..3 {
                    let snap = self.snapshot();
                    if self.map_face(fa, fb, shift) && self.solve() {
                        return true;
                    }
                    self.restore(snap);
                }
            }
            false
        }

        /// Match the cells not reached through faces by color and incidence.
        fn finish(&mut self) -> bool {
            let free_a: Vec<usize> = (0..self.a.edges().len())
                .filter(|&e| self.emap[e] == NONE)
                .collect();
            if let Some(&ea) = free_a.first() {
                for eb in 0..self.b.edges().len() {
                    if self.einv[eb] != NONE {
                        continue;
                    }
                    let snap = self.snapshot();
                    if self.map_edge(ea, eb) && self.finish() {
                        return true;
                    }
                    self.restore(snap);
                }
                return false;
            }
            let free_a: Vec<usize> = (0..self.a.n_vertices())
                .filter(|&v| self.vmap[v] == NONE)
                .collect();
            let free_b: Vec<usize> = (0..self.b.n_vertices())
                .filter(|&v| self.vinv[v] == NONE)
                .collect();
            let mut ca: Vec<u64> = free_a.iter().map(|&v| self.vc.0[v]).collect();
            let mut cb: Vec<u64> = free_b.iter().map(|&v| self.vc.1[v]).collect();
            ca.sort_unstable();
            cb.sort_unstable();
            ca == cb
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_counts() {
        assert_eq!(TwoComplex::triangle().counts(), (3, 3, 1));
        let sq = TwoComplex::square();
        assert_eq!(sq.counts(), (4, 5, 2));
        assert_eq!(sq.euler_characteristic(), 1);
        assert_eq!(TwoComplex::fan().counts(), (4, 6, 3));
    }

    #[test]
    fn daggers() {
        let sq = TwoComplex::square();
        assert_eq!(sq.dagger1().dagger1(), sq);
        assert_eq!(sq.dagger2().dagger2(), sq);
        let t = TwoComplex::triangle();
        assert_eq!(t.dagger1().dagger2(), t.dagger2().dagger1());
    }

    #[test]
    fn flip_square() {
        let sq = TwoComplex::square();
        let diag = (0..5).find(|&e| sq.edge_degrees()[e] == 2).unwrap();
        let fl = sq.pachner_flip(diag).unwrap();
        assert_eq!(fl.counts(), sq.counts());
        assert_eq!(fl.boundary_edges(), sq.boundary_edges());
        let old = sq.edge(diag);
        let new = fl.edge(diag);
        assert!(![old.src, old.dst].contains(&new.src) && ![old.src, old.dst].contains(&new.dst));
        let mut back = fl.pachner_flip(diag).unwrap();
        if !back.is_isomorphic(&sq) {
            back.reverse_edge(diag);
        }
        assert!(back.is_isomorphic(&sq));
        assert!(sq.pachner_flip(sq.boundary_edges()[0]).is_err());
    }

    #[test]
    fn merge_inverts_subdivide() {
        let t = TwoComplex::triangle();
        let fan = t.pachner_subdivide(0).unwrap();
        let back = fan.pachner_merge(3).unwrap();
        assert_eq!(back, t);
        let sq = TwoComplex::square();
        for f in 0..2 {
            let s = sq.pachner_subdivide(f).unwrap();
            assert!(s.pachner_merge(4).unwrap().is_isomorphic(&sq));
        }
    }

    #[test]
    fn double_is_sphere() {
        let d = TwoComplex::triangle().double();
        assert!(d.is_closed());
        assert_eq!(d.euler_characteristic(), 2);
        let d = TwoComplex::square().double();
        assert_eq!(d.counts(), (4, 6, 4));
    }

    #[test]
    fn orientation_conflict() {
        let g = GluingSet::new()
            .glue((0, 0), (1, 0), 1)
            .glue((0, 0), (1, 0), -1);
        assert_eq!(assemble(2, &g).unwrap_err().kind, ErrorKind::Gluing);
    }
}
