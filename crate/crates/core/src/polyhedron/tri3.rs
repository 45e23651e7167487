//! Closed 3-dimensional triangulations by face pairings, their dual spines and
//! the 0-2 / 2-3 moves.
//!
//! Face `f` of a tetrahedron is the face opposite vertex `f`. A gluing of face
//! `f` of `t` to `u` carries a vertex permutation `π`, so face `f` of `t` meets
//! face `π[f]` of `u` and vertex `v ≠ f` of `t` lands on vertex `π[v]` of `u`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{TwoComplex, UnionFind};
use crate::error::{Error, ErrorKind, Module, Result};

pub type Perm = [u8; 4];

pub const ID: Perm = [0, 1, 2, 3];

pub fn compose(a: Perm, b: Perm) -> Perm {
    [
        a[b[0] as usize],
        a[b[1] as usize],
        a[b[2] as usize],
        a[b[3] as usize],
    ]
}

pub fn inverse(a: Perm) -> Perm {
    let mut r = [0u8; 4];
    for i in 0..4 {
        r[a[i] as usize] = i as u8;
    }
    r
}

pub fn is_odd(a: Perm) -> bool {
    let mut odd = false;
    for i in 0..4 {
        for j in i + 1..4 {
            if a[i] > a[j] {
                odd = !odd;
            }
        }
    }
    odd
}

fn all_perms() -> Vec<Perm> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..4u8 {
                for d in 0..4u8 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Polyhedron, kind, pre, detail)
}

/// A triangulation given by its face pairings; `None` marks a boundary face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangulation3 {
    pub adj: Vec<[Option<(usize, Perm)>; 4]>,
}

/// Where a face of a removed tetrahedron goes: new tetrahedron, its face, and
/// the map from new vertex labels to old ones.
type SideMap = HashMap<(usize, usize), (usize, usize, Perm)>;

/// The dual 2-skeleton with its cell indexing.
#[derive(Debug, Clone)]
pub struct Spine {
    pub complex: TwoComplex,
    /// Spine vertices dual to tetrahedra (the true vertices).
    pub tet_vertices: Vec<usize>,
    /// Spine edges `c_τ → c_F` (halves of the dual edges; triple edges).
    pub dual_edges: Vec<usize>,
}

impl Triangulation3 {
    pub fn new(adj: Vec<[Option<(usize, Perm)>; 4]>) -> Result<Self> {
        let t = Triangulation3 { adj };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        for (t, faces) in self.adj.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                let Some((u, p)) = *g else { continue };
                let mut seen = [false; 4];
                for &x in &p {
                    if x > 3 || seen[x as usize] {
                        return Err(err(
                            ErrorKind::Structural,
                            "gluing maps are permutations",
                            format!("tet {t} face {f}"),
                        ));
                    }
                    seen[x as usize] = true;
                }
                let back = self.adj.get(u).and_then(|a| a[p[f] as usize]);
                if back != Some((t, inverse(p))) || (u == t && p[f] as usize == f) {
                    return Err(err(
                        ErrorKind::Structural,
                        "face pairings are symmetric",
                        format!("tet {t} face {f}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.adj.len()
    }

    pub fn is_closed(&self) -> bool {
        self.adj.iter().all(|a| a.iter().all(Option::is_some))
    }

    pub fn is_orientable_gluing(&self) -> bool {
        self.adj
            .iter()
            .all(|a| a.iter().flatten().all(|&(_, p)| is_odd(p)))
    }

    /// Face classes: representative side `(t, f)` for every side.
    pub fn face_classes(&self) -> (Vec<(usize, usize)>, HashMap<(usize, usize), usize>) {
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        for t in 0..self.size() {
            for f in 0..4 {
                if index.contains_key(&(t, f)) {
                    continue;
                }
                let k = reps.len();
                reps.push((t, f));
                index.insert((t, f), k);
                if let Some((u, p)) = self.adj[t][f] {
                    index.insert((u, p[f] as usize), k);
                }
            }
        }
        (reps, index)
    }

    /// Edge classes keyed by `(t, a, b)` with `a < b`; `None` if some edge is
    /// identified with itself reversed.
    pub fn edge_classes(&self) -> Option<(usize, HashMap<(usize, usize, usize), usize>)> {
        let key = |t: usize, a: usize, b: usize| 6 * t + pair_index(a, b);
        let n = 6 * self.size();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut parity = vec![false; n];
        fn find(parent: &mut [usize], parity: &mut [bool], x: usize) -> (usize, bool) {
            let mut p = false;
            let mut r = x;
            while parent[r] != r {
                p ^= parity[r];
                r = parent[r];
            }
            (r, p)
        }
        for t in 0..self.size() {
            for f in 0..4 {
                let Some((u, p)) = self.adj[t][f] else {
                    continue;
                };
                for a in 0..4 {
                    for b in a + 1..4 {
                        if a == f || b == f {
                            continue;
                        }
                        let (pa, pb) = (p[a] as usize, p[b] as usize);
                        let flip = pa > pb;
                        let (x, y) = (key(t, a, b), key(u, pa.min(pb), pa.max(pb)));
                        let (rx, px) = find(&mut parent, &mut parity, x);
                        let (ry, py) = find(&mut parent, &mut parity, y);
                        if rx == ry {
                            if px ^ py != flip {
                                return None;
                            }
                        } else {
                            parent[ry] = rx;
                            parity[ry] = px ^ py ^ flip;
                        }
                    }
                }
            }
        }
        let mut index = HashMap::new();
        let mut classes = HashMap::new();
        for t in 0..self.size() {
            for a in 0..4 {
                for b in a + 1..4 {
                    let (r, _) = find(&mut parent, &mut parity, key(t, a, b));
                    let n = classes.len();
                    let c = *classes.entry(r).or_insert(n);
                    index.insert((t, a, b), c);
                }
            }
        }
        Some((classes.len(), index))
    }

    pub fn vertex_classes(&self) -> usize {
        let mut uf = UnionFind::new(4 * self.size());
        for t in 0..self.size() {
            for f in 0..4 {
                let Some((u, p)) = self.adj[t][f] else {
                    continue;
                };
                for v in (0..4).filter(|&v| v != f) {
                    uf.union(4 * t + v, 4 * u + p[v] as usize);
                }
            }
        }
        (0..4 * self.size()).filter(|&x| uf.find(x) == x).count()
    }

    /// Closed, edge classes consistent and Euler characteristic zero.
    pub fn is_closed_manifold(&self) -> bool {
        if !self.is_closed() {
            return false;
        }
        let Some((ne, _)) = self.edge_classes() else {
            return false;
        };
        let (faces, _) = self.face_classes();
        self.vertex_classes() as i64 - ne as i64 + faces.len() as i64 - self.size() as i64 == 0
    }

    /// One tetrahedron, one vertex, glued into the 3-sphere.
    pub fn one_tet_s3() -> Self {
        Self::from_pairs(&[(0, 1, [1, 0, 2, 3]), (2, 3, [1, 2, 3, 0])])
    }

    /// Single-tetrahedron triangulation from two face pairings `(f, g, π)`.
    pub fn from_pairs(pairs: &[(usize, usize, Perm)]) -> Self {
        let mut adj = vec![[None; 4]];
        for &(f, g, p) in pairs {
            adj[0][f] = Some((0, p));
            adj[0][g] = Some((0, inverse(p)));
        }
        Triangulation3 { adj }
    }

    /// Every closed single-tetrahedron gluing with odd permutations.
    pub fn one_tet_candidates() -> Vec<Self> {
        let mut out = Vec::new();
        let pairings = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
        let perms = all_perms();
        for pr in pairings {
            for &p in perms
                .iter()
                .filter(|p| p[pr[0].0] as usize == pr[0].1 && is_odd(**p))
            {
                for &q in perms
                    .iter()
                    .filter(|q| q[pr[1].0] as usize == pr[1].1 && is_odd(**q))
                {
                    let t = Self::from_pairs(&[(pr[0].0, pr[0].1, p), (pr[1].0, pr[1].1, q)]);
                    if t.check().is_ok() {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Dual 2-skeleton, triangulated by the flags (tetrahedron, face, edge).
    pub fn spine(&self) -> Result<Spine> {
        if !self.is_closed() {
            return Err(err(
                ErrorKind::Geometry,
                "triangulation is closed",
                "boundary face",
            ));
        }
        let (ne, eidx) = self.edge_classes().ok_or_else(|| {
            err(
                ErrorKind::Geometry,
                "edges are not self-identified reversed",
                "pseudo-manifold",
            )
        })?;
        let (freps, fidx) = self.face_classes();
        let nt = self.size();
        let nf = freps.len();
        let mut c = TwoComplex::empty();
        for _ in 0..nt + nf + ne {
            c.add_vertex();
        }
        let tet_v = |t: usize| t;
        let face_v = |t: usize, f: usize| nt + fidx[&(t, f)];
        let edge_v = |t: usize, a: usize, b: usize| nt + nf + eidx[&(t, a.min(b), a.max(b))];
        let mut dual = HashMap::new();
        let mut dual_edges = Vec::new();
        for t in 0..nt {
            for f in 0..4 {
                let e = c.add_edge(tet_v(t), face_v(t, f), 1);
                dual.insert((t, f), e);
                dual_edges.push(e);
            }
        }
        // one edge per side of each face class, shared by both tetrahedron sides
        let mut mid: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
        for &(t, f) in &freps {
            let (u, p) = self.adj[t][f].expect("closed");
            for a in 0..4 {
                for b in a + 1..4 {
                    if a == f || b == f {
                        continue;
                    }
                    let e = c.add_edge(face_v(t, f), edge_v(t, a, b), 1);
                    mid.insert((t, f, a, b), e);
                    let (pa, pb) = (p[a] as usize, p[b] as usize);
                    mid.insert((u, p[f] as usize, pa.min(pb), pa.max(pb)), e);
                }
            }
        }
        let mut radial = HashMap::new();
        for t in 0..nt {
            for a in 0..4 {
                for b in a + 1..4 {
                    radial.insert((t, a, b), c.add_edge(tet_v(t), edge_v(t, a, b), 1));
                }
            }
        }
        for t in 0..nt {
            for f in 0..4 {
                for a in 0..4 {
                    for b in a + 1..4 {
                        if a == f || b == f {
                            continue;
                        }
                        c.add_face(
                            [tet_v(t), face_v(t, f), edge_v(t, a, b)],
                            [dual[&(t, f)], radial[&(t, a, b)], mid[&(t, f, a, b)]],
                            1,
                        )
                        .map_err(|e| {
                            err(ErrorKind::Structural, "spine faces close up", e.detail)
                        })?;
                    }
                }
            }
        }
        Ok(Spine {
            complex: c,
            tet_vertices: (0..nt).collect(),
            dual_edges,
        })
    }

    /// Rebuild after deleting `removed` tetrahedra; their sides are redirected
    /// through `sides`, and `internal` gluings among the `fresh` new ones are added.
    fn rebuild(
        &self,
        removed: &[usize],
        fresh: usize,
        sides: &SideMap,
        internal: &[(usize, usize, usize, Perm)],
    ) -> Self {
        let mut newidx = vec![usize::MAX; self.size()];
        let mut k = 0;
        for t in 0..self.size() {
            if !removed.contains(&t) {
                newidx[t] = k;
                k += 1;
            }
        }
        let total = k + fresh;
        let mut adj: Vec<[Option<(usize, Perm)>; 4]> = vec![[None; 4]; total];
        // where an old side lives now: (tet, face, new labels -> old labels)
        let locate = |t: usize, f: usize| -> Option<(usize, usize, Perm)> {
            if removed.contains(&t) {
                sides.get(&(t, f)).map(|&(n, g, s)| (k + n, g, s))
            } else {
                Some((newidx[t], f, ID))
            }
        };
        for t in 0..self.size() {
            for f in 0..4 {
                let Some((u, p)) = self.adj[t][f] else {
                    continue;
                };
                let (Some((nt, nf, s)), Some((nu, _nfu, r))) =
                    (locate(t, f), locate(u, p[f] as usize))
                else {
                    continue;
                };
                // new t -> old t -> old u -> new u
                let q = compose(inverse(r), compose(p, s));
                adj[nt][nf] = Some((nu, q));
            }
        }
        for &(a, fa, b, p) in internal {
            adj[k + a][fa] = Some((k + b, p));
            adj[k + b][p[fa] as usize] = Some((k + a, inverse(p)));
        }
        Triangulation3 { adj }
    }

    /// 2-3 move across face `f` of `t`, shared with a different tetrahedron.
    pub fn move_23(&self, t: usize, f: usize) -> Result<Self> {
        let bad = |d: &str| {
            err(
                ErrorKind::MoveInapplicable,
                "face shared by two distinct tetrahedra",
                d.to_string(),
            )
        };
        if t >= self.size() || f > 3 {
            return Err(bad("no such face"));
        }
        let Some((u, p)) = self.adj[t][f] else {
            return Err(bad("boundary face"));
        };
        if u == t {
            return Err(bad("face glued to its own tetrahedron"));
        }
        let a: Vec<usize> = (0..4).filter(|&v| v != f).collect();
        let mut sides = SideMap::new();
        let mut internal = Vec::new();
        for k in 0..3 {
            let (x, y, z) = (a[k], a[(k + 1) % 3], a[(k + 2) % 3]);
            // new tet k: 0 = d (vertex f of t), 1 = e (apex of u), 2 = a_{k+1}, 3 = a_{k+2}
            let to_t: Perm = [f as u8, x as u8, y as u8, z as u8];
            let to_u: Perm = [p[x], p[f], p[y], p[z]];
            sides.insert((t, x), (k, 1, to_t));
            sides.insert((u, p[x] as usize), (k, 0, to_u));
            internal.push((k, 2, (k + 1) % 3, [0, 1, 3, 2]));
        }
        Ok(self.rebuild(&[t, u], 3, &sides, &internal))
    }

    /// 3-2 move on the edge `{a, b}` of `t`, which must lie in exactly three
    /// distinct tetrahedra.
    pub fn move_32(&self, t: usize, a: usize, b: usize) -> Result<Self> {
        let bad = |d: &str| {
            err(
                ErrorKind::MoveInapplicable,
                "edge of degree three in distinct tetrahedra",
                d.to_string(),
            )
        };
        if t >= self.size() || a > 3 || b > 3 || a == b {
            return Err(bad("no such edge"));
        }
        // walk around the edge: (tet, x, y, z, w) with xy the edge, crossing face w next
        let others: Vec<usize> = (0..4).filter(|&v| v != a && v != b).collect();
        let mut ring = vec![(t, a, b, others[0], others[1])];
        loop {
            let &(s, x, y, z, w) = ring.last().expect("nonempty");
            let Some((n, p)) = self.adj[s][w] else {
                return Err(bad("boundary face"));
            };
            let (nx, ny, nz) = (p[x] as usize, p[y] as usize, p[z] as usize);
            let nw = 6 - nx - ny - nz;
            if n == t && nx == a && ny == b {
                if nz != others[1] || nw != others[0] {
                    return Err(bad("edge ring closes with a twist"));
                }
                break;
            }
            if ring.len() == 3 {
                return Err(bad("edge degree is not three"));
            }
            // the apex of n continues the ring; nz is on the face we came through
            ring.push((n, nx, ny, nw, nz));
        }
        if ring.len() != 3 {
            return Err(bad("edge degree is not three"));
        }
        let tets: Vec<usize> = ring.iter().map(|r| r.0).collect();
        if tets[0] == tets[1] || tets[1] == tets[2] || tets[0] == tets[2] {
            return Err(bad("tetrahedra around the edge are not distinct"));
        }
        // Ring entry i holds link vertices z_i and w_i = z_{i-1}.
        // New X = (x, z_0, z_1, z_2) and Y = (y, z_0, z_1, z_2).
        let mut sides = SideMap::new();
        for (i, &(s, x, y, z, w)) in ring.iter().enumerate() {
            // tet i's face opposite y holds x, z_i, z_{i-1}; it becomes X's face opposite z_{i+1}
            let j = (i + 1) % 3;
            let mut to_old = [0u8; 4];
            to_old[0] = x as u8;
            to_old[1 + i] = z as u8;
            to_old[1 + (i + 2) % 3] = w as u8;
            to_old[1 + j] = y as u8;
            sides.insert((s, y), (0, 1 + j, to_old));
            let mut to_old_y = to_old;
            to_old_y[0] = y as u8;
            to_old_y[1 + j] = x as u8;
            sides.insert((s, x), (1, 1 + j, to_old_y));
        }
        Ok(self.rebuild(&tets, 2, &sides, &[(0, 0, 1, ID)]))
    }

    /// 0-2 move: open faces `f1` and `f2` of `t` (which share an edge) and
    /// insert a pillow of two tetrahedra.
    pub fn move_02(&self, t: usize, f1: usize, f2: usize) -> Result<Self> {
        let bad = |d: &str| {
            err(
                ErrorKind::MoveInapplicable,
                "two faces of a tetrahedron not glued to each other",
                d.to_string(),
            )
        };
        if t >= self.size() || f1 > 3 || f2 > 3 || f1 == f2 {
            return Err(bad("no such faces"));
        }
        let (Some((n1, p1)), Some((n2, p2))) = (self.adj[t][f1], self.adj[t][f2]) else {
            return Err(bad("boundary face"));
        };
        if (n1, p1[f1] as usize) == (t, f2) {
            return Err(bad("the two faces are glued to each other"));
        }
        let e: Vec<usize> = (0..4).filter(|&v| v != f1 && v != f2).collect();
        // pillow vertex i -> t vertex: 0 = u, 1 = w, 2 = a (= f2), 3 = b (= f1)
        let pm: Perm = [e[0] as u8, e[1] as u8, f2 as u8, f1 as u8];
        let mut adj = self.adj.clone();
        let na = adj.len();
        let nb = na + 1;
        adj.push([None; 4]);
        adj.push([None; 4]);
        let inv = inverse(pm);
        // A hugs t along both faces
        adj[t][f1] = Some((na, inv));
        adj[t][f2] = Some((na, inv));
        adj[na][3] = Some((t, pm));
        adj[na][2] = Some((t, pm));
        // B takes over the outer neighbours
        let q1 = compose(p1, pm);
        let q2 = compose(p2, pm);
        let g1 = p1[f1] as usize;
        let g2 = p2[f2] as usize;
        adj[nb][3] = Some((n1, q1));
        adj[nb][2] = Some((n2, q2));
        adj[n1][g1] = Some((nb, inverse(q1)));
        adj[n2][g2] = Some((nb, inverse(q2)));
        adj[na][0] = Some((nb, ID));
        adj[na][1] = Some((nb, ID));
        adj[nb][0] = Some((na, ID));
        adj[nb][1] = Some((na, ID));
        let out = Triangulation3 { adj };
        out.check().map_err(|e| {
            err(
                ErrorKind::MoveInapplicable,
                "pillow insertion is consistent",
                e.detail,
            )
        })?;
        Ok(out)
    }

    /// 2-0 move: remove a pillow `a`, `b` glued to each other along two faces.
    pub fn move_20(&self, a: usize, b: usize) -> Result<Self> {
        let bad = |d: &str| {
            err(
                ErrorKind::MoveInapplicable,
                "two tetrahedra forming a pillow",
                d.to_string(),
            )
        };
        if a >= self.size() || b >= self.size() || a == b {
            return Err(bad("no such tetrahedra"));
        }
        let shared: Vec<usize> = (0..4)
            .filter(|&f| matches!(self.adj[a][f], Some((x, _)) if x == b))
            .collect();
        if shared.len() != 2 {
            return Err(bad("not glued along exactly two faces"));
        }
        let q = self.adj[a][shared[0]].expect("glued").1;
        let q2 = self.adj[a][shared[1]].expect("glued").1;
        if q != q2 {
            return Err(bad("pillow faces glued with different vertex maps"));
        }
        let outer: Vec<usize> = (0..4).filter(|f| !shared.contains(f)).collect();
        // a's outer face f is matched with b's face q[f]; splice their neighbours
        let mut adj = self.adj.clone();
        for &f in &outer {
            let g = q[f] as usize;
            let (Some((x, px)), Some((y, py))) = (self.adj[a][f], self.adj[b][g]) else {
                return Err(bad("boundary face on the pillow"));
            };
            if x == a || x == b || y == a || y == b {
                return Err(bad("pillow glued to itself"));
            }
            // x face px[f] -> a -> b -> y
            let xf = px[f] as usize;
            let m = compose(py, compose(q, inverse(px)));
            adj[x][xf] = Some((y, m));
            adj[y][py[g] as usize] = Some((x, inverse(m)));
        }
        let tmp = Triangulation3 { adj };
        Ok(tmp.rebuild(&[a, b], 0, &SideMap::new(), &[]))
    }

    /// Canonical code: the lexicographically least breadth-first relabelling.
    pub fn iso_code(&self) -> Vec<i64> {
        let mut best: Option<Vec<i64>> = None;
        for start in 0..self.size() {
            for p in all_perms() {
                let code = self.code_from(start, p);
                if best.as_ref().map_or(true, |b| code < *b) {
                    best = Some(code);
                }
            }
        }
        best.unwrap_or_default()
    }

    fn code_from(&self, start: usize, p0: Perm) -> Vec<i64> {
        // p: new vertex label -> old vertex label
        let n = self.size();
        let mut label = vec![usize::MAX; n];
        let mut perm = vec![ID; n];
        let mut order = vec![start];
        label[start] = 0;
        perm[start] = p0;
        let mut code = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let t = order[i];
            let pt = perm[t];
            for nf in 0..4 {
                let f = pt[nf] as usize;
                match self.adj[t][f] {
                    None => code.push(-1),
                    Some((u, g)) => {
                        if label[u] == usize::MAX {
                            label[u] = order.len();
                            order.push(u);
                            // choose u's labelling so the gluing reads as the identity on labels
                            let mut pu = [0u8; 4];
                            for v in 0..4 {
                                pu[v] = g[pt[v] as usize];
                            }
                            perm[u] = pu;
                        }
                        let pu = perm[u];
                        let inv_u = inverse(pu);
                        code.push(label[u] as i64);
                        for v in 0..4 {
                            code.push(inv_u[g[pt[v] as usize] as usize] as i64);
                        }
                    }
                }
            }
            i += 1;
        }
        code.push(if order.len() == n { 0 } else { 1 });
        code
    }

    pub fn is_isomorphic(&self, other: &Triangulation3) -> bool {
        self.size() == other.size() && self.iso_code() == other.iso_code()
    }
}

/// Index of the pair `{a, b}` among the six edges of a tetrahedron.
pub fn pair_index(a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        _ => 5,
    }
}
