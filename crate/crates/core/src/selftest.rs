//! The acceptance checks in runnable form, for `--task selftest`.

use std::time::Instant;

use num_bigint::BigUint;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::complex::{assemble_oriented, GluingEntry, GluingSet, TwoComplex, SEGMENTS};
use crate::error::ErrorKind;
use crate::gauge::{check_internal_invariance, orbit_count};
use crate::group::{self, CrossedModule, FiniteGroup};
use crate::holonomy::{count_fake_flat, enumerate_fake_flat};
use crate::io::CrossedModuleFile;
use crate::polyhedron::gerbe::{
    check_gerbe_interchange, check_pentagon, coboundary1, CechNerve, Cochain1, GerbeDatum,
};
use crate::polyhedron::{self, handle_move_02, handle_move_23, SimplePolyhedron};
use crate::ribbon::{
    self, connected_sum, gallery, identity_cylinder, stack_auto, BoundaryGraph, Ribbon,
};
use crate::scalar::Cyclotomic;
use crate::wilson::{
    compose_states, evaluate, partition_function, reflection_positivity_check, tensor_with_collar,
    Normalization,
};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type Check = fn() -> (bool, String);

pub const CRITERIA: &[(usize, &str, Check)] = &[
    (1, "crossed-module axioms", axioms),
    (2, "source-path bound", source_paths),
    (3, "triangle count law", triangle_count),
    (4, "Pachner invariance", pachner),
    (5, "gauge invariance modulo boundary", gauge_invariance),
    (6, "functoriality", functoriality),
    (7, "monoidality", monoidality),
    (8, "handlebody invariance", handlebody),
    (9, "orientation-reversal triviality", reversal),
    (10, "reflection positivity", positivity),
    (11, "classical boundary recovery", classical),
    (12, "gerbe cocycles", gerbes),
];

pub fn run(only: Option<usize>) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .filter(|c| only.map_or(true, |k| k == c.0))
        .map(|&(id, title, f)| {
            let t = Instant::now();
            let (passed, detail) = f();
            CriterionReport {
                id,
                title,
                passed,
                detail,
                millis: t.elapsed().as_millis(),
            }
        })
        .collect()
}

/// Axiom check straight from the tables, independent of [`CrossedModule::validate`].
fn has_witness(f: &CrossedModuleFile) -> bool {
    let g = &f.mul;
    let hm = f
        .fiber
        .as_ref()
        .map(|x| x.mul.clone())
        .unwrap_or_else(|| vec![vec![0]]);
    let group_ok = |m: &Vec<Vec<usize>>| {
        let n = m.len();
        let assoc = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m[m[a][b]][c] == m[a][m[b][c]])));
        let unit = (0..n).all(|x| m[0][x] == x && m[x][0] == x);
        let inv = (0..n).all(|x| (0..n).any(|y| m[x][y] == 0 && m[y][x] == 0));
        assoc && unit && inv
    };
    if !group_ok(g) || !group_ok(&hm) {
        return true;
    }
    let (ng, nh) = (g.len(), hm.len());
    let (t, act) = (&f.t, &f.act);
    let ginv = |x: usize| (0..ng).find(|&y| g[x][y] == 0).expect("group");
    for a in 0..nh {
        for b in 0..nh {
            if t[hm[a][b]] != g[t[a]][t[b]] {
                return true;
            }
            if act[t[a]][b] != hm[hm[a][b]][(0..nh).find(|&y| hm[a][y] == 0).expect("group")] {
                return true;
            }
        }
    }
    for x in 0..ng {
        for a in 0..nh {
            if t[act[x][a]] != g[g[x][t[a]]][ginv(x)] {
                return true;
            }
            for b in 0..nh {
                if act[x][hm[a][b]] != hm[act[x][a]][act[x][b]] {
                    return true;
                }
            }
            for y in 0..ng {
                if act[g[x][y]][a] != act[x][act[y][a]] {
                    return true;
                }
            }
        }
    }
    (0..nh).any(|a| act[0][a] != a)
}

/// Every single-entry change of every table.
pub fn corruptions(f: &CrossedModuleFile) -> Vec<CrossedModuleFile> {
    let mut out = Vec::new();
    let (ng, nh) = (f.order, f.fiber.as_ref().map_or(1, |x| x.order));
    for i in 0..ng {
        for j in 0..ng {
            for v in (0..ng).filter(|&v| v != f.mul[i][j]) {
                let mut c = f.clone();
                c.mul[i][j] = v;
                out.push(c);
            }
        }
    }
    if let Some(fib) = &f.fiber {
        for i in 0..nh {
            for j in 0..nh {
                for v in (0..nh).filter(|&v| v != fib.mul[i][j]) {
                    let mut c = f.clone();
                    c.fiber.as_mut().expect("fiber").mul[i][j] = v;
                    out.push(c);
                }
            }
        }
    }
    for i in 0..nh {
        for v in (0..ng).filter(|&v| v != f.t[i]) {
            let mut c = f.clone();
            c.t[i] = v;
            out.push(c);
        }
    }
    for i in 0..ng {
        for j in 0..nh {
            for v in (0..nh).filter(|&v| v != f.act[i][j]) {
                let mut c = f.clone();
                c.act[i][j] = v;
                out.push(c);
            }
        }
    }
    out
}

fn axioms() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, cm) in group::samples() {
        let clean = cm.validate().is_empty() && cm.check_interchange();
        let f = CrossedModuleFile::from_cm(&cm);
        let mut rejected = 0;
        let mut missed = 0;
        for c in corruptions(&f) {
            let witness = has_witness(&c);
            let flagged = c.to_cm().map_or(true, |x| !x.validate().is_empty());
            if witness {
                if flagged {
                    rejected += 1;
                } else {
                    missed += 1;
                }
            }
        }
        ok &= clean && missed == 0;
        notes.push(format!(
            "{name}: clean={clean} rejected={rejected} missed={missed}"
        ));
    }
    (ok, notes.join("; "))
}

/// Canonical labels of a partition of corner points: each point gets the
/// index of its block in order of first appearance.
fn canonical(labels: &[u8]) -> Vec<u8> {
    let mut map = [u8::MAX; 16];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            if map[l as usize] == u8::MAX {
                map[l as usize] = next;
                next += 1;
            }
            map[l as usize]
        })
        .collect()
}

const MAX_K: usize = 5;

/// Gluing state after some simplices: corner labels, unglued slots, and a
/// gluing set producing them.
#[derive(Clone, Copy)]
struct Partial {
    n: usize,
    labels: [u8; 3 * MAX_K],
    free: u16,
    entries: [GluingEntry; 3 * MAX_K / 2],
    len: usize,
}

const NO_ENTRY: GluingEntry = GluingEntry {
    a: (0, 0),
    b: (0, 0),
    rel: 1,
};

/// Canonical labels plus the sorted endpoint labels of free slots.
type StateKey = ([u8; 3 * MAX_K], [(u8, u8); 3 * MAX_K]);

impl Partial {
    fn ends(&self, t: usize) -> (u8, u8) {
        let (a, b) = SEGMENTS[t % 3];
        let f = 3 * (t / 3);
        (self.labels[f + a], self.labels[f + b])
    }

    /// Smallest relabeling over the simplex orders that sort an
    /// order-independent per-simplex key, so equivalent states get equal keys.
    /// Later simplices see old free slots only through their endpoint labels,
    /// so those are all the key keeps of the free set.
    fn key(&self, with_free: bool) -> (StateKey, [usize; MAX_K]) {
        let n = self.n;
        let mut size = [0u8; 3 * MAX_K];
        for &l in &self.labels[..3 * n] {
            size[l as usize] += 1;
        }
        let mut skey = [0u32; MAX_K];
        for (f, k) in skey.iter_mut().enumerate().take(n) {
            let l = &self.labels[3 * f..3 * f + 3];
            let pat =
                (l[0] == l[1]) as u32 | ((l[0] == l[2]) as u32) << 1 | ((l[1] == l[2]) as u32) << 2;
            *k = (size[l[0] as usize] as u32) << 16
                | (size[l[1] as usize] as u32) << 11
                | (size[l[2] as usize] as u32) << 6
                | pat;
        }
        let mut sorted = [0u32; MAX_K];
        sorted[..n].copy_from_slice(&skey[..n]);
        sorted[..n].sort_unstable();
        let mut search = Search {
            state: self,
            skey,
            sorted,
            with_free,
            order: [0; MAX_K],
            used: 0,
            map: [u8::MAX; 3 * MAX_K],
            labels: [u8::MAX; 3 * MAX_K],
            best: None,
            found: 0,
        };
        search.extend(0, 0, true);
        search.best.expect("a sorted order exists")
    }
}

/// Branch and bound over simplex orders that sort the per-simplex key,
/// pruning any order whose label prefix already exceeds the best one.
struct Search<'a> {
    state: &'a Partial,
    skey: [u32; MAX_K],
    sorted: [u32; MAX_K],
    with_free: bool,
    order: [usize; MAX_K],
    used: u8,
    map: [u8; 3 * MAX_K],
    labels: [u8; 3 * MAX_K],
    best: Option<(StateKey, [usize; MAX_K])>,
    found: usize,
}

impl Search<'_> {
    /// `tight`: the labels placed so far equal the best key's prefix.
    fn extend(&mut self, i: usize, next: u8, mut tight: bool) {
        let n = self.state.n;
        if i == n {
            return self.finish(tight);
        }
        for f in 0..n {
            if self.used & (1 << f) != 0 || self.skey[f] != self.sorted[i] {
                continue;
            }
            let (map, labels, mut fresh) = (self.map, self.labels, next);
            for c in 0..3 {
                let l = self.state.labels[3 * f + c] as usize;
                if self.map[l] == u8::MAX {
                    self.map[l] = fresh;
                    fresh += 1;
                }
                self.labels[3 * i + c] = self.map[l];
            }
            let step = match &self.best {
                Some(b) if tight => self.labels[3 * i..3 * i + 3].cmp(&b.0 .0[3 * i..3 * i + 3]),
                _ => std::cmp::Ordering::Less,
            };
            if step != std::cmp::Ordering::Greater {
                let found = self.found;
                self.used |= 1 << f;
                self.order[i] = f;
                self.extend(i + 1, fresh, step == std::cmp::Ordering::Equal);
                self.used &= !(1 << f);
                // a new best shares this prefix
                tight |= self.found != found;
            }
            self.map = map;
            self.labels = labels;
        }
    }

    fn finish(&mut self, tight: bool) {
        let n = self.state.n;
        let mut free = [(u8::MAX, u8::MAX); 3 * MAX_K];
        if self.with_free {
            let mut m = 0;
            for t in (0..3 * n).filter(|&t| self.state.free & (1 << t) != 0) {
                let (a, b) = self.state.ends(t);
                free[m] = (self.map[a as usize], self.map[b as usize]);
                m += 1;
            }
            free[..m].sort_unstable();
        }
        let cand = (self.labels, free);
        if !tight || self.best.as_ref().map_or(true, |b| cand.1 < b.0 .1) {
            self.best = Some((cand, self.order));
            self.found += 1;
        }
    }
}

/// Corner labels and unglued slots: all that gluing further simplices sees.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Shape {
    labels: [u8; 3 * MAX_K],
    free: u16,
}

impl Shape {
    fn ends(&self, t: usize) -> (u8, u8) {
        let (a, b) = SEGMENTS[t % 3];
        let f = 3 * (t / 3);
        (self.labels[f + a], self.labels[f + b])
    }

    fn merge(&mut self, a: usize, b: usize, n: usize) {
        let (x, y) = (
            self.labels[a].min(self.labels[b]),
            self.labels[a].max(self.labels[b]),
        );
        if x != y {
            for l in &mut self.labels[..3 * n] {
                if *l == y {
                    *l = x;
                }
            }
        }
    }
}

/// Glue the free slots of the newest simplex `j`, from slot `slot` on, and
/// hand each result with its new entries to `visit`.
fn glue_new(
    st: Shape,
    j: usize,
    slot: usize,
    added: &mut Vec<GluingEntry>,
    visit: &mut dyn FnMut(Shape, &[GluingEntry]),
) {
    if slot == 3 {
        visit(st, added);
        return;
    }
    let s = 3 * j + slot;
    if st.free & (1 << s) == 0 {
        return glue_new(st, j, slot + 1, added, visit);
    }
    glue_new(st, j, slot + 1, added, visit);
    let mut tried = [(0u8, 0u8); 3 * MAX_K];
    let mut n_tried = 0;
    for t in 0..3 * j + 3 {
        if t == s || st.free & (1 << t) == 0 || (t / 3 == j && t < s) {
            continue;
        }
        if t < 3 * j {
            // old slots with the same endpoints are interchangeable
            let e = st.ends(t);
            if tried[..n_tried].contains(&e) {
                continue;
            }
            tried[n_tried] = e;
            n_tried += 1;
        }
        for rel in [1i8, -1] {
            let (a, b) = (SEGMENTS[s % 3], SEGMENTS[t % 3]);
            let (tb, hb) = if rel == 1 { (b.0, b.1) } else { (b.1, b.0) };
            let mut next = st;
            let ft = 3 * (t / 3);
            next.merge(3 * j + a.0, ft + tb, j + 1);
            next.merge(3 * j + a.1, ft + hb, j + 1);
            next.free &= !((1 << s) | (1 << t));
            added.push(GluingEntry {
                a: (j, slot),
                b: (t / 3, t % 3),
                rel,
            });
            glue_new(next, j, slot + 1, added, visit);
            added.pop();
        }
    }
}

/// One gluing set for every corner identification reachable from a regular
/// gluing of `k ≤ 5` simplices (every pairing of face-slots, each slot used at
/// most once, either relative direction), up to relabeling the simplices.
/// The source-path search only sees corner identifications, so this covers
/// all regular gluing sets.
///
/// Simplices are added one at a time and each pair is glued when the later
/// of its two simplices arrives, so every gluing set is reachable.
pub fn regular_gluing_classes(k: usize) -> Vec<(GluingSet, Vec<u8>)> {
    assert!(k <= MAX_K, "at most {MAX_K} simplices");
    let mut level = vec![Partial {
        n: 0,
        labels: [0; 3 * MAX_K],
        free: 0,
        entries: [NO_ENTRY; 3 * MAX_K / 2],
        len: 0,
    }];
    for j in 0..k {
        let last = j + 1 == k;
        let mut seen: FxHashMap<StateKey, Partial> = FxHashMap::default();
        let mut raw_seen: FxHashSet<u128> = FxHashSet::default();
        let mut added = Vec::with_capacity(3);
        for st in &level {
            let mut grown = Shape {
                labels: st.labels,
                free: st.free,
            };
            for c in 0..3 {
                grown.labels[3 * j + c] = (3 * j + c) as u8;
            }
            grown.free |= 0b111 << (3 * j);
            glue_new(grown, j, 0, &mut added, &mut |o, new_entries| {
                // each block is labeled by its smallest corner, so this is canonical
                let mut packed = 0u64;
                for &l in o.labels[..3 * (j + 1)].iter().rev() {
                    packed = packed << 4 | l as u64;
                }
                let mut raw = packed as u128;
                if !last {
                    raw |= (o.free as u128) << 64;
                }
                if !raw_seen.insert(raw) {
                    return;
                }
                let o = Partial {
                    n: j + 1,
                    labels: o.labels,
                    free: o.free,
                    entries: st.entries,
                    len: st.len,
                };
                let (key, p) = o.key(!last);
                seen.entry(key).or_insert_with(|| {
                    let mut pos = [0; MAX_K];
                    for (new, &old) in p[..j + 1].iter().enumerate() {
                        pos[old] = new;
                    }
                    let mut labels = [0; 3 * MAX_K];
                    let mut free = 0u16;
                    for (new, &old) in p[..j + 1].iter().enumerate() {
                        labels[3 * new..3 * new + 3]
                            .copy_from_slice(&o.labels[3 * old..3 * old + 3]);
                        free |= ((o.free >> (3 * old)) & 0b111) << (3 * new);
                    }
                    let mut least = [u8::MAX; 3 * MAX_K];
                    for (i, &l) in labels[..3 * (j + 1)].iter().enumerate() {
                        least[l as usize] = least[l as usize].min(i as u8);
                    }
                    for l in &mut labels[..3 * (j + 1)] {
                        *l = least[*l as usize];
                    }
                    let mut entries = st.entries;
                    let mut len = st.len;
                    for e in new_entries {
                        entries[len] = *e;
                        len += 1;
                    }
                    for e in &mut entries[..len] {
                        e.a.0 = pos[e.a.0];
                        e.b.0 = pos[e.b.0];
                    }
                    Partial {
                        n: j + 1,
                        labels,
                        free,
                        entries,
                        len,
                    }
                });
            });
        }
        level = seen.into_values().collect();
    }
    let mut out: Vec<(GluingSet, Vec<u8>)> = level
        .into_iter()
        .map(|p| {
            (
                GluingSet {
                    entries: p.entries[..p.len].to_vec(),
                },
                canonical(&p.labels[..3 * k]),
            )
        })
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

/// Corner labels of an assembled complex, canonicalized.
pub fn corner_labels(c: &TwoComplex) -> Vec<u8> {
    let raw: Vec<u8> = (0..c.faces().len())
        .flat_map(|f| c.corners(f))
        .map(|v| v as u8)
        .collect();
    canonical(&raw)
}

/// Source paths over every regular gluing class of `k` simplices: returns
/// (classes, connected classes checked, longest path), or the first failure.
pub fn check_source_paths(k: usize) -> std::result::Result<(usize, usize, usize), String> {
    let mut checked = 0;
    let mut worst = 0;
    let classes = regular_gluing_classes(k);
    let total = classes.len();
    for (gl, labels) in classes {
        // disconnected gluings have no source path to bound
        let mut comp: Vec<usize> = (0..k).collect();
        for e in &gl.entries {
            let (x, y) = (comp[e.a.0], comp[e.b.0]);
            comp.iter_mut().filter(|c| **c == y).for_each(|c| *c = x);
        }
        if comp.iter().any(|&c| c != comp[0]) {
            continue;
        }
        let c = match assemble_oriented(&vec![1; k], &gl) {
            Ok(c) => c,
            Err(e) if e.kind == ErrorKind::Gluing => continue,
            Err(e) => return Err(format!("k={k}: {e}")),
        };
        if !c.is_regular() || corner_labels(&c) != labels {
            return Err(format!(
                "k={k}: assembly disagrees with the corner model for {gl:?}"
            ));
        }
        match c.make_unbroken() {
            Ok(sp) if sp.path.len() < k => {
                checked += 1;
                worst = worst.max(sp.path.len());
            }
            Ok(sp) => {
                return Err(format!(
                    "k={k}: path of length {} for {gl:?}",
                    sp.path.len()
                ))
            }
            Err(e) if e.kind == ErrorKind::Connectivity => {}
            Err(e) => return Err(format!("k={k}: {e}")),
        }
    }
    Ok((total, checked, worst))
}

fn source_paths() -> (bool, String) {
    let mut notes = Vec::new();
    let mut worst = 0;
    let t = Instant::now();
    for k in 1..=5 {
        match check_source_paths(k) {
            Ok((_, n, w)) => {
                notes.push(format!("k={k}: {n}"));
                worst = worst.max(w);
            }
            Err(e) => return (false, e),
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        secs < 10.0,
        format!(
            "connected corner classes {}, longest path {worst}, {secs:.1}s of a 10s budget",
            notes.join(", ")
        ),
    )
}

fn triangle_count() -> (bool, String) {
    let c = TwoComplex::triangle();
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, cm) in group::samples() {
        let (n, h) = (cm.base().order(), cm.fiber().order());
        let (count, it) = enumerate_fake_flat(&cm, &c, &[None; 3]).expect("triangle enumerates");
        let listed = it.count();
        let closed = BigUint::from(n * n * h);
        ok &= count == closed && listed == n * n * h;
        notes.push(format!("{name}: {count}"));
    }
    (ok, notes.join(", "))
}

fn pachner() -> (bool, String) {
    let mut ok = true;
    let mut cases = 0;
    for cm in [group::cm_02(), group::cm_id2(), group::cm_s3()] {
        for c in [TwoComplex::square(), TwoComplex::fan()] {
            let base =
                evaluate(&cm, &Ribbon::filling(c.clone()).expect("disc"), None).expect("evaluate");
            let flags = c.boundary_flags();
            let e = (0..c.edges().len())
                .find(|&e| !flags[e])
                .expect("interior edge");
            for moved in [
                c.pachner_flip(e).expect("flip"),
                c.pachner_subdivide(0).expect("subdivide"),
            ] {
                let st =
                    evaluate(&cm, &Ribbon::filling(moved).expect("disc"), None).expect("evaluate");
                ok &= st == base;
                cases += 1;
            }
        }
    }
    (ok, format!("{cases} moved tables compared"))
}

fn gauge_invariance() -> (bool, String) {
    let mut ok = true;
    let mut n = 0;
    for cm in [group::cm_02(), group::cm_s3()] {
        for c in [
            TwoComplex::square(),
            polyhedron::gamma_plus().body().clone(),
        ] {
            let sp = c.make_unbroken().expect("unbroken");
            let (_, it) =
                enumerate_fake_flat(&cm, &sp.complex, &vec![None; sp.complex.edges().len()])
                    .expect("enumerate");
            for d in it {
                ok &= check_internal_invariance(&cm, &sp, &d).expect("check");
                n += 1;
            }
        }
    }
    (ok, format!("{n} decorations"))
}

/// Two triangles sharing one edge, as a pair of ribbons meeting along it.
pub fn triangle_halves() -> (Ribbon, Ribbon) {
    let c = TwoComplex::triangle();
    let f = c.face(0);
    let r = Ribbon::from_complex(c.clone(), &[], &[f.slots[1].edge]).expect("lower half");
    let r2 = Ribbon::from_complex(c.clone(), &[f.slots[2].edge], &[]).expect("upper half");
    (r, r2)
}

fn functoriality() -> (bool, String) {
    let cm = group::cm_02();
    let norm = Normalization::for_cm(&cm);
    let mut ok = true;
    let (a, b) = triangle_halves();
    let bx = ribbon::b_times();
    let id = identity_cylinder(bx.target()).expect("identity");
    for (r, r2) in [(a, b), (bx, id)] {
        let whole = evaluate(&cm, &stack_auto(&r, &r2).expect("stack"), None).expect("evaluate");
        let parts = compose_states(
            &norm,
            &cm,
            &evaluate(&cm, &r, None).expect("evaluate"),
            &evaluate(&cm, &r2, None).expect("evaluate"),
        )
        .expect("compose");
        ok &= whole == parts;
    }
    (ok, "triangle ∪ triangle, b_times ∪ identity".into())
}

/// The interchange quadruple: identity cylinders on `c₋` and `c₊`, two of each.
pub fn interchange_holds(cm: &CrossedModule) -> bool {
    let norm = Normalization::for_cm(cm);
    let r1 = identity_cylinder(&BoundaryGraph::c_minus()).expect("cylinder");
    let r3 = identity_cylinder(&BoundaryGraph::c_plus()).expect("cylinder");
    let i = r1
        .markings()
        .iter()
        .position(|m| m.sign == -1)
        .expect("outgoing");
    let j = r3
        .markings()
        .iter()
        .position(|m| m.sign == 1)
        .expect("incoming");
    let a1 = evaluate(cm, &r1, None).expect("evaluate");
    let a3 = evaluate(cm, &r3, None).expect("evaluate");
    let stacked_then_summed = tensor_with_collar(
        cm,
        &compose_states(&norm, cm, &a1, &a1).expect("compose"),
        i,
        &compose_states(&norm, cm, &a3, &a3).expect("compose"),
        j,
    )
    .expect("sum");
    let summed = tensor_with_collar(cm, &a1, i, &a3, j).expect("sum");
    let summed_then_stacked = compose_states(&norm, cm, &summed, &summed).expect("compose");
    let body = connected_sum(
        &stack_auto(&r1, &r1).expect("stack"),
        i,
        &stack_auto(&r3, &r3).expect("stack"),
        j,
    )
    .expect("sum");
    stacked_then_summed == summed_then_stacked
        && evaluate(cm, &body, None).expect("evaluate") == stacked_then_summed
}

fn monoidality() -> (bool, String) {
    let cm = group::cm_02();
    let mut ok = true;
    for (x, y) in [
        (ribbon::cup(), ribbon::cup()),
        (ribbon::cap(), ribbon::cap()),
    ] {
        let a = x.dagger2();
        let s = connected_sum(&a, 0, &y, 0).expect("summable");
        let lhs = evaluate(&cm, &s, None).expect("evaluate");
        let rhs = tensor_with_collar(
            &cm,
            &evaluate(&cm, &a, None).expect("evaluate"),
            0,
            &evaluate(&cm, &y, None).expect("evaluate"),
            0,
        )
        .expect("collar");
        ok &= lhs == rhs;
    }
    let inter = interchange_holds(&cm);
    (
        ok && inter,
        format!("cup/cap sums ok={ok}, interchange={inter}"),
    )
}

/// `coordinate_planes_s3`, after a 0-2 move, and after a further 2-3 move.
pub fn handle_sequence() -> Vec<SimplePolyhedron> {
    let s = polyhedron::coordinate_planes_s3();
    let p1 = handle_move_02(&s, &[0, 0, 2]).expect("lune move");
    let t1 = p1.triangulation().expect("spine").clone();
    let (t, f) = (0..t1.size())
        .flat_map(|t| (0..4).map(move |f| (t, f)))
        .find(|&(t, f)| t1.adj[t][f].map_or(false, |(u, _)| u != t))
        .expect("face between distinct tetrahedra");
    let p2 = handle_move_23(&p1, &[t, f]).expect("2-3 move");
    vec![s, p1, p2]
}

fn handlebody() -> (bool, String) {
    let cm = group::cm_02();
    let zs: Vec<Cyclotomic> = handle_sequence()
        .iter()
        .map(|p| partition_function(&cm, p, None).expect("closed"))
        .collect();
    let ok = zs.windows(2).all(|w| w[0] == w[1]);
    (
        ok,
        format!(
            "Z = {}",
            zs.iter()
                .map(|z| z.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn reversal() -> (bool, String) {
    let mut ok = true;
    for (_, cm) in group::samples() {
        for c in [TwoComplex::triangle(), TwoComplex::square()] {
            let p = SimplePolyhedron::from_complex(c.double()).expect("double");
            ok &= partition_function(&cm, &p, None).expect("closed") == Cyclotomic::one();
        }
    }
    (
        ok,
        "doubled triangle and square, five crossed modules".into(),
    )
}

/// Gallery ribbons with empty target, grouped by source graph.
pub fn closing_families() -> Vec<(Vec<&'static str>, Vec<Ribbon>)> {
    let mut groups: Vec<(BoundaryGraph, Vec<&'static str>, Vec<Ribbon>)> = Vec::new();
    for (name, r) in gallery() {
        if r.target().vertices != 0 {
            continue;
        }
        match groups.iter_mut().find(|g| &g.0 == r.source()) {
            Some(g) => {
                g.1.push(name);
                g.2.push(r);
            }
            None => groups.push((r.source().clone(), vec![name], vec![r])),
        }
    }
    groups.into_iter().map(|g| (g.1, g.2)).collect()
}

fn positivity() -> (bool, String) {
    let mut ok = true;
    let mut n = 0;
    for cm in [group::cm_02(), group::cm_id2(), group::cm_s3()] {
        for (_, rs) in closing_families() {
            ok &= reflection_positivity_check(&cm, &rs).expect("gram").is_psd;
            n += 1;
        }
    }
    (ok, format!("{n} Gram matrices"))
}

/// The torus standard graph obtained from `b_times` by closing and contracting.
pub fn torus_graph() -> BoundaryGraph {
    ribbon::b_times()
        .target()
        .closed()
        .contract_edge(0)
        .expect("middle edge contracts")
}

fn classical() -> (bool, String) {
    let g = FiniteGroup::symmetric3();
    let cm = CrossedModule::trivial_fiber(g.clone());
    let graph_ok = torus_graph().is_isomorphic(&BoundaryGraph::torus_standard());
    let torus = polyhedron::torus_partition();
    let count = count_fake_flat(&cm, torus.body(), &[None; 3]).expect("count");
    let pairs = g.commuting_pairs();
    let burnside: usize = g
        .elements()
        .map(|x| {
            g.elements()
                .flat_map(|a| g.elements().map(move |b| (a, b)))
                .filter(|&(a, b)| {
                    g.mul(a, b) == g.mul(b, a) && g.conj(x, a) == a && g.conj(x, b) == b
                })
                .count()
        })
        .sum::<usize>()
        / g.order();
    let orbits = orbit_count(&cm, torus.body(), false)
        .expect("orbits")
        .orbits;
    let ok = graph_ok && count == BigUint::from(18u32) && pairs == 18 && orbits == burnside;
    (
        ok,
        format!(
            "flat count {count}, commuting pairs {pairs}, orbits {orbits}, Burnside {burnside}"
        ),
    )
}

fn gerbes() -> (bool, String) {
    use num_rational::Rational64;
    let nerve = CechNerve::simplex(5);
    let configs: Vec<Vec<usize>> = vec![vec![0], vec![1]];
    let mut gamma = Cochain1::default();
    for (k, p) in nerve.pairs().into_iter().enumerate() {
        for c in &configs {
            gamma.values.insert(
                (c.clone(), p),
                Rational64::new((k as i64 + 1) * (c[0] as i64 + 1), 6),
            );
        }
    }
    let cob = coboundary1(&gamma, &nerve);
    let accepts = check_pentagon(&cob, &nerve).expect("pentagon");
    let mut bad = GerbeDatum::zero_on(&nerve, &configs);
    bad.set(vec![0], nerve.triples[0], Rational64::new(1, 2));
    let rejects = !check_pentagon(&bad, &nerve).expect("pentagon");
    let a = GerbeDatum::zero_on(&nerve, &[vec![0]]);
    let dot = crate::polyhedron::gerbe::gerbe_dot(&a, &a).expect("dot");
    let mut planted = Cochain1::default();
    for (k, p) in nerve.pairs().into_iter().enumerate() {
        planted
            .values
            .insert((vec![0, 0], p), Rational64::new(k as i64 % 3, 3));
    }
    let mut cup = coboundary1(&planted, &nerve);
    for (key, v) in &dot.phases {
        let e = cup
            .phases
            .entry(key.clone())
            .or_insert_with(|| Rational64::new(0, 1));
        *e = polyhedron::gerbe::norm(*e + v);
    }
    let recovered = crate::polyhedron::gerbe::solve_interchange(&cup, &dot, &nerve).expect("solve");
    let rec_ok = recovered.map_or(false, |g| {
        let d = coboundary1(&g, &nerve);
        cup.phases.iter().all(|(k, v)| {
            polyhedron::gerbe::norm(d.phases.get(k).copied().unwrap_or_default() + dot.phases[k])
                == *v
        })
    });
    let strict = check_gerbe_interchange(&a, &a, &nerve)
        .expect("interchange")
        .is_some();
    let ok = accepts && rejects && rec_ok && strict;
    (ok, format!("coboundary accepted={accepts}, violation rejected={rejects}, planted γ recovered={rec_ok}"))
}
