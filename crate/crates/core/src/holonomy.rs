//! Decorations by crossed-module data, fake-flatness, enumeration and surface
//! holonomy.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{SourcePath, TwoComplex};
use crate::error::{Error, ErrorKind, Module, Result};
use crate::group::{CrossedModule, TwoGroupElement};

/// `h_e ∈ G` per edge and `b_f ∈ H` per face.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Decoration {
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
}

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Holonomy, kind, pre, detail)
}

/// Holonomy of slot `i` of face `f`: `h_e` if the edge runs along the segment.
#[inline]
pub fn slot_hol(cm: &CrossedModule, c: &TwoComplex, edges: &[usize], f: usize, i: usize) -> usize {
    let face = c.face(f);
    let h = edges[face.slots[i].edge];
    if face.aligned(i) {
        h
    } else {
        cm.base().inv(h)
    }
}

/// `w(f) = hol(s₀)·hol(s₂)·hol(s₁)⁻¹`, the loop around `f` based at its root.
pub fn boundary_word(cm: &CrossedModule, c: &TwoComplex, edges: &[usize], f: usize) -> usize {
    let g = cm.base();
    let a = slot_hol(cm, c, edges, f, 0);
    let b = slot_hol(cm, c, edges, f, 2);
    let d = slot_hol(cm, c, edges, f, 1);
    g.mul(g.mul(a, b), g.inv(d))
}

/// The value `t(b_f)` must take: `w(f)` or its inverse when `ε = −1`.
pub fn face_target(cm: &CrossedModule, c: &TwoComplex, edges: &[usize], f: usize) -> usize {
    let w = boundary_word(cm, c, edges, f);
    if c.face(f).eps == 1 {
        w
    } else {
        cm.base().inv(w)
    }
}

/// For each `g ∈ G`, the fiber elements `h` with `t(h) = g`, in index order.
pub fn preimages(cm: &CrossedModule) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); cm.base().order()];
    for h in cm.fiber().elements() {
        out[cm.t(h)].push(h);
    }
    out
}

fn check_total(c: &TwoComplex, d: &Decoration) -> Result<()> {
    if d.edges.len() != c.edges().len() || d.faces.len() != c.faces().len() {
        return Err(err(
            ErrorKind::Incomplete,
            "decoration is total",
            format!(
                "{} edge and {} face values for {} edges and {} faces",
                d.edges.len(),
                d.faces.len(),
                c.edges().len(),
                c.faces().len()
            ),
        ));
    }
    Ok(())
}

pub fn is_fake_flat(cm: &CrossedModule, c: &TwoComplex, d: &Decoration) -> Result<bool> {
    check_total(c, d)?;
    if d.edges.iter().any(|&x| x >= cm.base().order())
        || d.faces.iter().any(|&x| x >= cm.fiber().order())
    {
        return Err(err(
            ErrorKind::Domain,
            "decoration values are group elements",
            "index out of range",
        ));
    }
    Ok((0..c.faces().len()).all(|f| cm.t(d.faces[f]) == face_target(cm, c, &d.edges, f)))
}

fn check_fixed(c: &TwoComplex, fixed: &[Option<usize>], allow_interior: bool) -> Result<()> {
    if fixed.len() != c.edges().len() {
        return Err(err(
            ErrorKind::Domain,
            "fixed data covers the edge list",
            "length mismatch",
        ));
    }
    if !allow_interior {
        let b = c.boundary_flags();
        if let Some(e) = (0..fixed.len()).find(|&e| fixed[e].is_some() && !b[e]) {
            return Err(err(
                ErrorKind::Domain,
                "fixed edges are boundary edges",
                format!("edge {e} is interior"),
            ));
        }
    }
    Ok(())
}

/// Edges ordered so that faces complete early, and for each position the
/// faces whose last edge it is.
pub(crate) fn propagation_order(c: &TwoComplex, fixed: &[bool]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let ne = c.edges().len();
    let mut placed = fixed.to_vec();
    let mut order = Vec::new();
    let ef = c.edge_faces();
    // greedy: repeatedly take the face with the fewest unplaced edges
    let mut done_face = vec![false; c.faces().len()];
    loop {
        let mut best: Option<(usize, usize)> = None;
        for f in 0..c.faces().len() {
            if done_face[f] {
                continue;
            }
            let missing = c.face(f).edges().iter().filter(|&&e| !placed[e]).count();
            if best.map_or(true, |(m, _)| missing < m) {
                best = Some((missing, f));
            }
        }
        let Some((_, f)) = best else { break };
        done_face[f] = true;
        for e in c.face(f).edges() {
            if !placed[e] {
                placed[e] = true;
                order.push(e);
            }
        }
    }
    for e in 0..ne {
        if !placed[e] {
            order.push(e);
        }
    }
    let mut pos = vec![usize::MAX; ne];
    for (i, &e) in order.iter().enumerate() {
        pos[e] = i;
    }
    let mut checks = vec![Vec::new(); order.len() + 1];
    for f in 0..c.faces().len() {
        let last = c
            .face(f)
            .edges()
            .iter()
            .map(|&e| if fixed[e] { 0 } else { pos[e] + 1 })
            .max()
            .unwrap_or(0);
        checks[last].push(f);
    }
    let _ = &ef;
    (order, checks)
}

/// Exact number of fake-flat completions of the fixed edge values.
///
/// Counts in `G / im t`, then multiplies by `|im t|` per free edge and `|ker t|`
/// per face.
pub fn count_fake_flat(
    cm: &CrossedModule,
    c: &TwoComplex,
    fixed: &[Option<usize>],
) -> Result<BigUint> {
    count_fake_flat_impl(cm, c, fixed, false)
}

/// As [`count_fake_flat`], but interior edges may be fixed too.
pub fn count_fake_flat_debug(
    cm: &CrossedModule,
    c: &TwoComplex,
    fixed: &[Option<usize>],
) -> Result<BigUint> {
    count_fake_flat_impl(cm, c, fixed, true)
}

fn count_fake_flat_impl(
    cm: &CrossedModule,
    c: &TwoComplex,
    fixed: &[Option<usize>],
    allow_interior: bool,
) -> Result<BigUint> {
    check_fixed(c, fixed, allow_interior)?;
    let q = cm.quotient();
    let k = &q.group;
    let is_fixed: Vec<bool> = fixed.iter().map(Option::is_some).collect();
    let (order, checks) = propagation_order(c, &is_fixed);
    let mut vals: Vec<usize> = fixed.iter().map(|x| x.map_or(0, |g| q.coset[g])).collect();
    let face_ok = |vals: &[usize], f: usize| -> bool {
        let face = c.face(f);
        let s = |i: usize| {
            let x = vals[face.slots[i].edge];
            if face.aligned(i) {
                x
            } else {
                k.inv(x)
            }
        };
        k.mul(k.mul(s(0), s(2)), k.inv(s(1))) == 0
    };
    if !checks[0].iter().all(|&f| face_ok(&vals, f)) {
        return Ok(BigUint::zero());
    }
    fn rec(
        i: usize,
        order: &[usize],
        checks: &[Vec<usize>],
        vals: &mut Vec<usize>,
        kord: usize,
        ok: &dyn Fn(&[usize], usize) -> bool,
    ) -> u64 {
        if i == order.len() {
            return 1;
        }
        let e = order[i];
        let mut total = 0;
        for x in 0..kord {
            vals[e] = x;
            if checks[i + 1].iter().all(|&f| ok(vals, f)) {
                total += rec(i + 1, order, checks, vals, kord, ok);
            }
        }
        total
    }
    let n = rec(0, &order, &checks, &mut vals, k.order(), &face_ok);
    let free = fixed.iter().filter(|x| x.is_none()).count() as u32;
    Ok(BigUint::from(n)
        * BigUint::from(cm.image_order()).pow(free)
        * BigUint::from(cm.kernel_order()).pow(c.faces().len() as u32))
}

/// Streaming enumeration of fake-flat decorations extending `fixed`.
///
/// Edge values run lexicographically in (edge index, element index); for each
/// edge assignment the face values run over their `ker t`-cosets.
pub struct FakeFlatIter<'a> {
    cm: &'a CrossedModule,
    c: &'a TwoComplex,
    fixed: Vec<Option<usize>>,
    pre: Vec<Vec<usize>>,
    checks: Vec<Vec<usize>>,
    edges: Vec<usize>,
    depth: usize,
    started: bool,
    fibers: Vec<Vec<usize>>,
    fiber_pos: Vec<usize>,
    have_edges: bool,
}

pub fn enumerate_fake_flat<'a>(
    cm: &'a CrossedModule,
    c: &'a TwoComplex,
    fixed: &[Option<usize>],
) -> Result<(BigUint, FakeFlatIter<'a>)> {
    let count = count_fake_flat(cm, c, fixed)?;
    let ne = c.edges().len();
    let mut checks = vec![Vec::new(); ne + 1];
    for f in 0..c.faces().len() {
        let last = c.face(f).edges().into_iter().max().map_or(0, |e| e + 1);
        checks[last].push(f);
    }
    let it = FakeFlatIter {
        cm,
        c,
        fixed: fixed.to_vec(),
        pre: preimages(cm),
        checks,
        edges: fixed.iter().map(|x| x.unwrap_or(0)).collect(),
        depth: 0,
        started: false,
        fibers: vec![],
        fiber_pos: vec![],
        have_edges: false,
    };
    Ok((count, it))
}

impl FakeFlatIter<'_> {
    fn faces_ok(&self, upto: usize) -> bool {
        self.checks[upto]
            .iter()
            .all(|&f| !self.pre[face_target(self.cm, self.c, &self.edges, f)].is_empty())
    }

    /// Advance to the next valid full edge assignment.
    fn next_edges(&mut self) -> bool {
        let ne = self.c.edges().len();
        let gord = self.cm.base().order();
        if !self.started {
            self.started = true;
            if !self.checks[0]
                .iter()
                .all(|&f| !self.pre[face_target(self.cm, self.c, &self.edges, f)].is_empty())
            {
                return false;
            }
            self.depth = 0;
            // descend with first values
            loop {
                if self.depth == ne {
                    return true;
                }
                if !self.enter() {
                    if !self.backtrack(gord) {
                        return false;
                    }
                }
            }
        }
        if ne == 0 {
            return false;
        }
        self.depth = ne;
        if !self.backtrack(gord) {
            return false;
        }
        loop {
            if self.depth == ne {
                return true;
            }
            if !self.enter() && !self.backtrack(gord) {
                return false;
            }
        }
    }

    /// Start edge `depth` at its first value; true if it (and its faces) are valid.
    fn enter(&mut self) -> bool {
        let e = self.depth;
        self.edges[e] = self.fixed[e].unwrap_or(0);
        if self.faces_ok(e + 1) {
            self.depth += 1;
            true
        } else {
            false
        }
    }

    /// Increment the deepest edge that can still move and restore validity.
    /// On entry the edge at `depth` (if any) holds an invalid or exhausted value.
    fn backtrack(&mut self, gord: usize) -> bool {
        let mut e = self.depth.min(self.c.edges().len());
        loop {
            // try next values at position e (if e < ne), else move up
            if e < self.c.edges().len() && self.fixed[e].is_none() {
                while self.edges[e] + 1 < gord {
                    self.edges[e] += 1;
                    if self.faces_ok(e + 1) {
                        self.depth = e + 1;
                        return true;
                    }
                }
            }
            if e == 0 {
                return false;
            }
            e -= 1;
        }
    }
}

impl Iterator for FakeFlatIter<'_> {
    type Item = Decoration;

    fn next(&mut self) -> Option<Decoration> {
        if self.have_edges {
            // advance the face odometer
            let mut i = self.fibers.len();
            while i > 0 {
                i -= 1;
                if self.fiber_pos[i] + 1 < self.fibers[i].len() {
                    self.fiber_pos[i] += 1;
                    for p in &mut self.fiber_pos[i + 1..] {
                        *p = 0;
                    }
                    return Some(self.current());
                }
            }
            self.have_edges = false;
        }
        if !self.next_edges() {
            return None;
        }
        let nf = self.c.faces().len();
        self.fibers = (0..nf)
            .map(|f| self.pre[face_target(self.cm, self.c, &self.edges, f)].clone())
            .collect();
        self.fiber_pos = vec![0; nf];
        self.have_edges = true;
        Some(self.current())
    }
}

impl FakeFlatIter<'_> {
    fn current(&self) -> Decoration {
        Decoration {
            edges: self.edges.clone(),
            faces: self
                .fibers
                .iter()
                .zip(&self.fiber_pos)
                .map(|(v, &p)| v[p])
                .collect(),
        }
    }
}

/// Holonomy of an edge path starting at the root: product of the steps.
pub fn path_hol(
    cm: &CrossedModule,
    c: &TwoComplex,
    path: &[(usize, bool)],
    edges: &[usize],
) -> Result<usize> {
    let g = cm.base();
    let mut at = c.root();
    let mut acc = 0;
    for &(e, fwd) in path {
        let ed = c.edge(e);
        let (s, t) = if fwd {
            (ed.src, ed.dst)
        } else {
            (ed.dst, ed.src)
        };
        if s != at {
            return Err(err(
                ErrorKind::Path,
                "p is an edge path from the root",
                format!("step on edge {e} does not start at vertex {at}"),
            ));
        }
        at = t;
        acc = g.mul(acc, if fwd { edges[e] } else { g.inv(edges[e]) });
    }
    Ok(acc)
}

/// Whisker every cell by `h_p`: edges are conjugated and faces acted on.
pub fn whisker_decoration(
    cm: &CrossedModule,
    c: &TwoComplex,
    path: &[(usize, bool)],
    d: &Decoration,
) -> Result<Decoration> {
    check_total(c, d)?;
    let a = path_hol(cm, c, path, &d.edges)?;
    Ok(Decoration {
        edges: d.edges.iter().map(|&h| cm.base().conj(a, h)).collect(),
        faces: d.faces.iter().map(|&b| cm.act(a, b)).collect(),
    })
}

/// Oriented boundary cycle of a face as `(edge, along edge)` steps starting at the root.
pub fn face_cycle(c: &TwoComplex, f: usize) -> [(usize, bool); 3] {
    let face = c.face(f);
    let s = |i: usize| (face.slots[i].edge, face.aligned(i));
    let r = |i: usize| (face.slots[i].edge, !face.aligned(i));
    if face.eps == 1 {
        [s(0), s(2), r(1)]
    } else {
        [s(1), r(2), r(0)]
    }
}

fn step_hol(cm: &CrossedModule, edges: &[usize], (e, fwd): (usize, bool)) -> usize {
    if fwd {
        edges[e]
    } else {
        cm.base().inv(edges[e])
    }
}

fn word_hol(cm: &CrossedModule, edges: &[usize], w: &[(usize, bool)]) -> usize {
    w.iter()
        .fold(0, |acc, &s| cm.base().mul(acc, step_hol(cm, edges, s)))
}

/// Carry face values across a re-rooting of faces (same edges, new roots).
pub fn reroot_decoration(
    cm: &CrossedModule,
    old: &TwoComplex,
    new: &TwoComplex,
    d: &Decoration,
) -> Decoration {
    let mut faces = d.faces.clone();
    for f in 0..old.faces().len() {
        let a = face_cycle(old, f);
        let b = face_cycle(new, f);
        let same_orientation = (0..3).any(|k| (0..3).all(|i| a[(i + k) % 3] == b[i]));
        let mut x = d.faces[f];
        let mut cyc = a;
        if !same_orientation {
            x = cm.fiber().inv(x);
            cyc = [inv_step(a[2]), inv_step(a[1]), inv_step(a[0])];
        }
        let k = (0..3)
            .find(|&k| (0..3).all(|i| cyc[(i + k) % 3] == b[i]))
            .unwrap_or(0);
        let p = word_hol(cm, &d.edges, &cyc[..k]);
        faces[f] = cm.act(cm.base().inv(p), x);
    }
    Decoration {
        edges: d.edges.clone(),
        faces,
    }
}

fn inv_step((e, f): (usize, bool)) -> (usize, bool) {
    (e, !f)
}

/// The six based loops around a face (three rotations, two directions) with
/// the fiber element whose `t`-image is the loop's holonomy.
fn based_loops(
    cm: &CrossedModule,
    c: &TwoComplex,
    d: &Decoration,
    f: usize,
) -> Vec<([(usize, bool); 3], usize)> {
    let cyc = face_cycle(c, f);
    let b = d.faces[f];
    let mut out = Vec::with_capacity(6);
    for k in 0..3 {
        let rot = [cyc[k], cyc[(k + 1) % 3], cyc[(k + 2) % 3]];
        let p = word_hol(cm, &d.edges, &cyc[..k]);
        let x = cm.act(cm.base().inv(p), b);
        out.push((rot, x));
        out.push((
            [inv_step(rot[2]), inv_step(rot[1]), inv_step(rot[0])],
            cm.fiber().inv(x),
        ));
    }
    out
}

/// Build the region face by face along `order`, keeping a based boundary loop
/// `L` and an element `B` with `t(B) = hol(L)`. Returns `B` and `L`.
fn shell(
    cm: &CrossedModule,
    c: &TwoComplex,
    order: &[usize],
    d: &Decoration,
) -> Result<(usize, Vec<(usize, bool)>)> {
    let g = cm.base();
    let h = cm.fiber();
    let Some(&first) = order.first() else {
        return Ok((0, vec![]));
    };
    if c.corners(first)[0] != c.root() {
        return Err(err(
            ErrorKind::Geometry,
            "first face is rooted at the base vertex",
            format!("face {first}"),
        ));
    }
    let mut cover = vec![0usize; c.edges().len()];
    let mut l: Vec<(usize, bool)> = face_cycle(c, first).to_vec();
    let mut bb = d.faces[first];
    for e in c.face(first).edges() {
        cover[e] += 1;
    }
    let mut pending: Vec<usize> = order[1..].to_vec();
    while !pending.is_empty() {
        let mut attached = None;
        'search: for (pi, &f) in pending.iter().enumerate() {
            let loops = based_loops(cm, c, d, f);
            for m in (1..=3).rev() {
                if m > l.len() {
                    continue;
                }
                for i in 0..=l.len() - m {
                    let run = &l[i..i + m];
                    if run.iter().any(|&(e, _)| cover[e] != 1) {
                        continue;
                    }
                    for (lp, x) in &loops {
                        let tail = &lp[3 - m..];
                        let matches = (0..m).all(|j| tail[j] == inv_step(run[m - 1 - j]));
                        if matches {
                            attached = Some((pi, f, i, m, lp[..3 - m].to_vec(), *x));
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((pi, f, i, m, rest, x)) = attached else {
            return Err(err(
                ErrorKind::Geometry,
                "faces shell into a disc",
                format!("{} faces could not be attached", pending.len()),
            ));
        };
        pending.remove(pi);
        let pre = word_hol(cm, &d.edges, &l[..i]);
        bb = h.mul(cm.act(pre, x), bb);
        let mut nl: Vec<(usize, bool)> = l[..i].to_vec();
        nl.extend(rest);
        nl.extend_from_slice(&l[i + m..]);
        l = reduce_word(nl);
        for e in c.face(f).edges() {
            cover[e] += 1;
        }
    }
    debug_assert_eq!(cm.t(bb), word_hol(cm, &d.edges, &l));
    let _ = g;
    Ok((bb, l))
}

fn reduce_word(w: Vec<(usize, bool)>) -> Vec<(usize, bool)> {
    let mut out: Vec<(usize, bool)> = Vec::with_capacity(w.len());
    for s in w {
        if out.last() == Some(&inv_step(s)) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

/// Surface holonomy of a disc with an unbroken source path.
///
/// The fiber part is built by attaching faces in path order, each transported
/// to the base vertex along the current boundary; its `t`-image is the holonomy
/// of the boundary loop. The base part is the path-ordered product of the
/// faces' source edges.
pub fn total_surface_holonomy(
    cm: &CrossedModule,
    sp: &SourcePath,
    d: &Decoration,
) -> Result<TwoGroupElement> {
    let c = &sp.complex;
    check_total(c, d)?;
    if !c.is_regular() {
        return Err(err(
            ErrorKind::Geometry,
            "complex is regular",
            "an edge lies in three or more faces",
        ));
    }
    let (b, _) = shell(cm, c, &sp.order, d)?;
    let g = sp.order.iter().fold(0, |acc, &f| {
        cm.base().mul(acc, slot_hol(cm, c, &d.edges, f, 0))
    });
    Ok(TwoGroupElement::new(b, g))
}

/// `∏ b_f = 1` on a closed sphere-like complex, faces transported to the root.
pub fn check_two_flat(cm: &CrossedModule, c: &TwoComplex, d: &Decoration) -> Result<bool> {
    check_total(c, d)?;
    if !c.is_closed() || c.faces().is_empty() {
        return Err(err(
            ErrorKind::Geometry,
            "complex is closed",
            "complex has boundary",
        ));
    }
    let sp = c
        .make_unbroken()
        .map_err(|e| err(ErrorKind::Geometry, "complex is connected", e.detail))?;
    let dd = reroot_decoration(cm, c, &sp.complex, d);
    let (b, l) = shell(cm, &sp.complex, &sp.order, &dd)?;
    if !l.is_empty() {
        return Err(err(
            ErrorKind::Geometry,
            "complex is a sphere",
            "boundary loop does not close up",
        ));
    }
    Ok(b == 0)
}

/// Number of decorations as a big integer, for display.
pub fn total_configurations(cm: &CrossedModule, c: &TwoComplex) -> BigUint {
    let mut n = BigUint::one();
    for _ in 0..c.edges().len() {
        n *= cm.base().order();
    }
    for _ in 0..c.faces().len() {
        n *= cm.fiber().order();
    }
    n
}
