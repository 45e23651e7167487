//! Normalized state sums over fake-flat decorations of ribbon bodies, their
//! composition, summation collars, pairings and positivity checks.
//!
//! A state is a sparse table indexed by `(source index, target index)`. The
//! source index is the mixed-radix number of the `G`-values on the source
//! graph's edges (edge 0 least significant). The target index lists the
//! target graph's edge values and then the holonomies of the markings.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::TwoComplex;
use crate::error::{Error, ErrorKind, Module, Result};
use crate::group::CrossedModule;
use crate::holonomy::face_target;
use crate::polyhedron::gerbe::{check_pentagon, GerbeDatum};
use crate::polyhedron::SimplePolyhedron;
use crate::ribbon::{
    chain_markings, summation_pairs, summed_layers, BoundaryGraph, Embedding, End, Layer, Ribbon,
};
use crate::scalar::Cyclotomic;

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Wilson, kind, pre, detail)
}

fn ratio(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rpow(r: &BigRational, k: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..k {
        out *= r;
    }
    out
}

/// Per-cell weights applied to cells off the boundary layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub edge: BigRational,
    pub vertex: BigRational,
    pub face: BigRational,
}

impl Normalization {
    /// Edge `1/|im t|`, vertex `1/|G/im t|`, face `1/|ker t|`.
    pub fn for_cm(cm: &CrossedModule) -> Self {
        Normalization {
            edge: ratio(1, cm.image_order()),
            vertex: ratio(1, cm.coker_order()),
            face: ratio(1, cm.kernel_order()),
        }
    }

    /// Same edge and face weights, vertex weight 1.
    pub fn unit_vertex(cm: &CrossedModule) -> Self {
        Normalization {
            vertex: BigRational::one(),
            ..Self::for_cm(cm)
        }
    }

    /// Weight of a boundary graph's cells once it becomes interior.
    pub fn layer_weight(&self, g: &BoundaryGraph) -> BigRational {
        rpow(&self.edge, g.edges.len()) * rpow(&self.vertex, g.vertices)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WilsonState {
    pub source: BoundaryGraph,
    pub target: BoundaryGraph,
    /// Marking endpoints, in marking order.
    pub markings: Vec<(End, End)>,
    pub group_order: usize,
    pub entries: BTreeMap<(usize, usize), Cyclotomic>,
}

fn decode(mut idx: usize, digits: usize, base: usize) -> Vec<usize> {
    (0..digits)
        .map(|_| {
            let d = idx % base;
            idx /= base;
            d
        })
        .collect()
}

fn encode(digits: &[usize], base: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * base + d)
}

impl WilsonState {
    pub fn source_size(&self) -> usize {
        self.group_order.pow(self.source.edges.len() as u32)
    }

    pub fn target_digits(&self) -> usize {
        self.target.edges.len() + self.markings.len()
    }

    pub fn target_size(&self) -> usize {
        self.group_order.pow(self.target_digits() as u32)
    }

    pub fn get(&self, i: usize, j: usize) -> Cyclotomic {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Cyclotomic::zero)
    }

    /// Entry by decoration: source edge values, target edge values, marking holonomies.
    pub fn at(&self, beta0: &[usize], beta1: &[usize], mu: &[usize]) -> Cyclotomic {
        let mut t = beta1.to_vec();
        t.extend_from_slice(mu);
        self.get(
            encode(beta0, self.group_order),
            encode(&t, self.group_order),
        )
    }

    pub fn is_rational(&self) -> bool {
        self.entries.values().all(|v| v.as_rational().is_some())
    }

    /// Sum over marking holonomies: the same state with markings forgotten.
    pub fn forget_markings(&self) -> WilsonState {
        let g = self.group_order;
        let keep = g.pow(self.target.edges.len() as u32);
        let mut entries: BTreeMap<(usize, usize), Cyclotomic> = BTreeMap::new();
        for (&(i, j), v) in &self.entries {
            let slot = entries
                .entry((i, j % keep))
                .or_insert_with(Cyclotomic::zero);
            *slot = &*slot + v;
        }
        entries.retain(|_, v| !v.is_zero());
        WilsonState {
            markings: vec![],
            entries,
            ..self.clone()
        }
    }

    fn same_shape(&self, other: &WilsonState) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.markings == other.markings
            && self.group_order == other.group_order
    }

    /// Pointwise sum.
    pub fn add(&self, other: &WilsonState) -> Result<WilsonState> {
        if !self.same_shape(other) {
            return Err(err(
                ErrorKind::Composition,
                "states share their spaces",
                "shape mismatch",
            ));
        }
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            let slot = entries.entry(*k).or_insert_with(Cyclotomic::zero);
            *slot = &*slot + v;
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(WilsonState {
            entries,
            ..self.clone()
        })
    }

    /// Dense rows for display: one row per nonzero source index.
    pub fn rows(&self) -> Vec<(usize, Vec<(usize, String)>)> {
        let mut out: Vec<(usize, Vec<(usize, String)>)> = Vec::new();
        for (&(i, j), v) in &self.entries {
            match out.last_mut() {
                Some((k, row)) if *k == i => row.push((j, v.to_string())),
                _ => out.push((i, vec![(j, v.to_string())])),
            }
        }
        out
    }
}

pub fn scalar_json(v: &Cyclotomic) -> Value {
    let num = |r: &BigRational| -> Value {
        let part = |x: &BigInt| {
            x.to_i64()
                .map_or_else(|| Value::String(x.to_string()), |n| Value::from(n))
        };
        Value::Array(vec![part(r.numer()), part(r.denom())])
    };
    match v.as_rational() {
        Some(r) => num(r),
        None => serde_json::json!({
            "order": v.order(),
            "coeffs": v.coeffs().iter().map(num).collect::<Vec<_>>(),
        }),
    }
}

fn json_scalar(v: &Value) -> Option<Cyclotomic> {
    let int = |x: &Value| -> Option<BigInt> {
        match x {
            Value::Number(n) => n.as_i64().map(BigInt::from),
            Value::String(s) => s.parse().ok(),
            _ => None,
        }
    };
    let rat = |x: &Value| -> Option<BigRational> {
        let a = x.as_array()?;
        if a.len() != 2 {
            return None;
        }
        let d = int(&a[1])?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(int(&a[0])?, d))
    };
    match v {
        Value::Array(_) => rat(v).map(Cyclotomic::rational),
        Value::Object(m) => {
            let n = m.get("order")?.as_u64()?;
            let coeffs = m
                .get("coeffs")?
                .as_array()?
                .iter()
                .map(rat)
                .collect::<Option<Vec<_>>>()?;
            Some(Cyclotomic::from_parts(n, coeffs))
        }
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct RawState {
    src_edges: usize,
    tgt_edges: usize,
    group_order: usize,
    source: BoundaryGraph,
    target: BoundaryGraph,
    #[serde(default)]
    markings: Vec<(End, End)>,
    entries: Vec<(usize, usize, Value)>,
}

impl Serialize for WilsonState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawState {
            src_edges: self.source.edges.len(),
            tgt_edges: self.target.edges.len(),
            group_order: self.group_order,
            source: self.source.clone(),
            target: self.target.clone(),
            markings: self.markings.clone(),
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), v)| (i, j, scalar_json(v)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WilsonState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawState::deserialize(d)?;
        if raw.src_edges != raw.source.edges.len() || raw.tgt_edges != raw.target.edges.len() {
            return Err(D::Error::custom("edge counts disagree with the graphs"));
        }
        let mut st = WilsonState {
            source: raw.source,
            target: raw.target,
            markings: raw.markings,
            group_order: raw.group_order,
            entries: BTreeMap::new(),
        };
        let (ns, nt) = (st.source_size(), st.target_size());
        for (i, j, v) in raw.entries {
            if i >= ns || j >= nt {
                return Err(D::Error::custom(format!("entry ({i}, {j}) out of range")));
            }
            let x = json_scalar(&v)
                .ok_or_else(|| D::Error::custom(format!("bad scalar at ({i}, {j})")))?;
            if !x.is_zero() {
                st.entries.insert((i, j), x);
            }
        }
        Ok(st)
    }
}

/// Depth-first enumeration of edge values with face pruning.
struct Plan<'a> {
    cm: &'a CrossedModule,
    c: &'a TwoComplex,
    order: Vec<usize>,
    domains: Vec<Vec<usize>>,
    checks: Vec<Vec<usize>>,
    coset: Vec<usize>,
    src_edges: Vec<usize>,
    tgt_edges: Vec<usize>,
    walks: Vec<Vec<(usize, bool)>>,
    triples: Vec<(usize, [usize; 3])>,
    gerbe: Option<&'a GerbeDatum>,
    level: u64,
}

type Acc = HashMap<(usize, usize), Vec<u64>>;

impl Plan<'_> {
    fn leaf(&self, h: &[usize], acc: &mut Acc) {
        let g = self.cm.base();
        let n = g.order();
        let i = self.src_edges.iter().rev().fold(0, |a, &e| a * n + h[e]);
        let mut digits: Vec<usize> = self.tgt_edges.iter().map(|&e| h[e]).collect();
        for w in &self.walks {
            digits.push(w.iter().fold(g.identity(), |x, &(e, fwd)| {
                g.mul(x, if fwd { h[e] } else { g.inv(h[e]) })
            }));
        }
        let j = encode(&digits, n);
        let mut rot = 0u64;
        if let Some(sigma) = self.gerbe {
            for &(e, tri) in &self.triples {
                let r = sigma.phase(&[h[e]], tri)
                    * num_rational::Rational64::from_integer(self.level as i64);
                rot += r.to_integer().rem_euclid(self.level as i64) as u64;
            }
        }
        let counts = acc
            .entry((i, j))
            .or_insert_with(|| vec![0; self.level as usize]);
        counts[(rot % self.level) as usize] += 1;
    }

    fn dfs(&self, k: usize, h: &mut [usize], acc: &mut Acc) {
        if k == self.order.len() {
            self.leaf(h, acc);
            return;
        }
        let e = self.order[k];
        for &x in &self.domains[k] {
            h[e] = x;
            if self.checks[k]
                .iter()
                .all(|&f| self.coset[face_target(self.cm, self.c, h, f)] == self.coset[0])
            {
                self.dfs(k + 1, h, acc);
            }
        }
    }

    fn run(&self, workers: usize) -> Acc {
        let nedges = self.c.edges().len();
        if self.order.is_empty() {
            let mut acc = Acc::new();
            self.leaf(&vec![0; nedges], &mut acc);
            return acc;
        }
        let first = &self.domains[0];
        let workers = workers.max(1).min(first.len());
        let chunks: Vec<Vec<usize>> = (0..workers)
            .map(|w| first.iter().copied().skip(w).step_by(workers).collect())
            .collect();
        let parts: Vec<Acc> = std::thread::scope(|s| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    s.spawn(move || {
                        let mut acc = Acc::new();
                        let mut h = vec![0; nedges];
                        let e = self.order[0];
                        for &x in chunk {
                            h[e] = x;
                            if self.checks[0].iter().all(|&f| {
                                self.coset[face_target(self.cm, self.c, &h, f)] == self.coset[0]
                            }) {
                                self.dfs(1, &mut h, &mut acc);
                            }
                        }
                        acc
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker"))
                .collect()
        });
        let mut acc = Acc::new();
        for part in parts {
            for (k, v) in part {
                let slot = acc.entry(k).or_insert_with(|| vec![0; v.len()]);
                for (a, b) in slot.iter_mut().zip(v) {
                    *a += b;
                }
            }
        }
        acc
    }
}

/// Edges in an order that completes faces early.
fn edge_order(c: &TwoComplex) -> Vec<usize> {
    let nf = c.faces().len();
    let mut placed = vec![false; c.edges().len()];
    let mut done = vec![false; nf];
    let mut order = Vec::new();
    for _ in 0..nf {
        let f = (0..nf)
            .filter(|&f| !done[f])
            .max_by_key(|&f| {
                (
                    c.face(f).edges().iter().filter(|&&e| placed[e]).count(),
                    std::cmp::Reverse(f),
                )
            })
            .expect("face left");
        done[f] = true;
        for e in c.face(f).edges() {
            if !placed[e] {
                placed[e] = true;
                order.push(e);
            }
        }
    }
    order.extend((0..c.edges().len()).filter(|&e| !placed[e]));
    order
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// The normalized state of a ribbon with the standard weights.
pub fn evaluate(cm: &CrossedModule, r: &Ribbon, gerbe: Option<&GerbeDatum>) -> Result<WilsonState> {
    evaluate_with(cm, &Normalization::for_cm(cm), r, gerbe, default_workers())
}

pub fn evaluate_with(
    cm: &CrossedModule,
    norm: &Normalization,
    r: &Ribbon,
    gerbe: Option<&GerbeDatum>,
    workers: usize,
) -> Result<WilsonState> {
    let gerbe = match gerbe {
        Some(s) => {
            if !check_pentagon(s, &r.body().nerve())? {
                return Err(err(
                    ErrorKind::InconsistentGerbe,
                    "gerbe datum passes the pentagon check",
                    "coboundary is nonzero",
                ));
            }
            (!s.is_trivial()).then_some(s)
        }
        None => None,
    };
    let c = r.complex();
    let q = cm.quotient();
    let ef = c.edge_faces();
    let triples: Vec<(usize, [usize; 3])> = match gerbe {
        Some(_) => r
            .body()
            .triple_edges()
            .into_iter()
            .map(|e| {
                let mut t = [ef[e][0].0, ef[e][1].0, ef[e][2].0];
                t.sort_unstable();
                (e, t)
            })
            .collect(),
        None => vec![],
    };
    let walks: Vec<Vec<(usize, bool)>> = r.walks().into_iter().map(|w| w.steps).collect();
    let layer = r.layer_edges();
    let mut key = vec![false; c.edges().len()];
    for &e in &layer {
        key[e] = true;
    }
    for w in &walks {
        for &(e, _) in w {
            key[e] = true;
        }
    }
    for &(e, _) in &triples {
        key[e] = true;
    }
    let order = edge_order(c);
    let pos: Vec<usize> = {
        let mut p = vec![0; c.edges().len()];
        for (k, &e) in order.iter().enumerate() {
            p[e] = k;
        }
        p
    };
    let mut checks = vec![Vec::new(); order.len()];
    for f in 0..c.faces().len() {
        let last = c
            .face(f)
            .edges()
            .iter()
            .map(|&e| pos[e])
            .max()
            .expect("three edges");
        checks[last].push(f);
    }
    let all: Vec<usize> = cm.base().elements().collect();
    let domains: Vec<Vec<usize>> = order
        .iter()
        .map(|&e| if key[e] { all.clone() } else { q.reps.clone() })
        .collect();
    let free = key.iter().filter(|&&k| !k).count();
    let plan = Plan {
        cm,
        c,
        order,
        domains,
        checks,
        coset: q.coset.clone(),
        src_edges: r.source_map().edges.clone(),
        tgt_edges: r.target_map().edges.clone(),
        walks,
        triples,
        gerbe,
        level: gerbe.map_or(1, |s| s.level() as u64),
    };
    let acc = plan.run(workers);
    let layer_v = r.layer_vertices();
    let interior_e = c.edges().len() - layer.len();
    let interior_v = c.n_vertices() - layer_v.len();
    let nf = c.faces().len();
    let factor = rpow(&ratio(cm.image_order(), 1), free)
        * rpow(&ratio(cm.kernel_order(), 1), nf)
        * rpow(&norm.edge, interior_e)
        * rpow(&norm.vertex, interior_v)
        * rpow(&norm.face, nf);
    let mut entries = BTreeMap::new();
    for (k, counts) in acc {
        let counts: Vec<BigInt> = counts.into_iter().map(BigInt::from).collect();
        let v = Cyclotomic::from_rotation_counts(plan.level, &counts).scale(&factor);
        if !v.is_zero() {
            entries.insert(k, v);
        }
    }
    Ok(WilsonState {
        source: r.source().clone(),
        target: r.target().clone(),
        markings: r.walks().into_iter().map(|w| (w.start, w.end)).collect(),
        group_order: cm.base().order(),
        entries,
    })
}

/// Vertex weight making the triangle and its 1-3 subdivision agree, computed
/// from the two tables with unit vertex weight.
pub fn derive_vertex_weight(cm: &CrossedModule) -> Result<BigRational> {
    let norm = Normalization::unit_vertex(cm);
    let tri = evaluate_with(
        cm,
        &norm,
        &Ribbon::filling(TwoComplex::triangle())?,
        None,
        1,
    )?;
    let fan = evaluate_with(cm, &norm, &Ribbon::filling(TwoComplex::fan())?, None, 1)?;
    let mut lambda: Option<BigRational> = None;
    let keys: std::collections::BTreeSet<_> = tri
        .entries
        .keys()
        .chain(fan.entries.keys())
        .copied()
        .collect();
    for k in keys {
        let a = tri.get(k.0, k.1);
        let b = fan.get(k.0, k.1);
        let (a, b) = (a.as_rational().cloned(), b.as_rational().cloned());
        let (Some(a), Some(b)) = (a, b) else {
            return Err(err(
                ErrorKind::Domain,
                "tables are rational",
                "phase present",
            ));
        };
        if b.is_zero() || a.is_zero() {
            return Err(err(
                ErrorKind::Domain,
                "tables share their support",
                format!("entry {k:?}"),
            ));
        }
        let l = a / b;
        match &lambda {
            Some(x) if *x != l => {
                return Err(err(
                    ErrorKind::Domain,
                    "one weight fits every entry",
                    format!("{x} vs {l}"),
                ))
            }
            _ => lambda = Some(l),
        }
    }
    lambda.ok_or_else(|| err(ErrorKind::Domain, "tables are nonzero", "empty tables"))
}

/// `(a ∘ b)`: first `a`, then `b`, summed over the shared layer with its
/// cells weighted as interior cells.
pub fn compose_states(
    norm: &Normalization,
    cm: &CrossedModule,
    a: &WilsonState,
    b: &WilsonState,
) -> Result<WilsonState> {
    if a.target != b.source || a.group_order != b.group_order || a.group_order != cm.base().order()
    {
        return Err(err(
            ErrorKind::Composition,
            "target space of the first state is the source space of the second",
            "layer graphs differ",
        ));
    }
    let g = cm.base();
    let n = g.order();
    let glue: Vec<usize> = (0..a.target.vertices).collect();
    let chains = chain_markings(&a.markings, &b.markings, &glue).map_err(|e| {
        err(
            ErrorKind::Composition,
            "markings chain through the shared layer",
            e.detail,
        )
    })?;
    let ea1 = a.target.edges.len();
    let eb2 = b.target.edges.len();
    let mut by_source: BTreeMap<usize, Vec<(usize, &Cyclotomic)>> = BTreeMap::new();
    for (&(i, j), v) in &b.entries {
        by_source.entry(i).or_default().push((j, v));
    }
    let mut markings = Vec::with_capacity(chains.len());
    for chain in &chains {
        let ends = |p: &crate::ribbon::Piece| {
            let (s, t) = if p.second {
                b.markings[p.index]
            } else {
                a.markings[p.index]
            };
            if p.reversed {
                (t, s)
            } else {
                (s, t)
            }
        };
        let start = ends(&chain[0]).0;
        let end = ends(chain.last().expect("nonempty")).1;
        markings.push((start, end));
    }
    let mut entries: BTreeMap<(usize, usize), Cyclotomic> = BTreeMap::new();
    for (&(i, ja), va) in &a.entries {
        let da = decode(ja, ea1 + a.markings.len(), n);
        let mid = encode(&da[..ea1], n);
        let Some(row) = by_source.get(&mid) else {
            continue;
        };
        for &(jb, vb) in row {
            let db = decode(jb, eb2 + b.markings.len(), n);
            let mut digits: Vec<usize> = db[..eb2].to_vec();
            for chain in &chains {
                let mu = chain.iter().fold(g.identity(), |x, p| {
                    let m = if p.second {
                        db[eb2 + p.index]
                    } else {
                        da[ea1 + p.index]
                    };
                    g.mul(x, if p.reversed { g.inv(m) } else { m })
                });
                digits.push(mu);
            }
            let slot = entries
                .entry((i, encode(&digits, n)))
                .or_insert_with(Cyclotomic::zero);
            *slot = &*slot + &(va * vb);
        }
    }
    let w = norm.layer_weight(&a.target);
    let entries = entries
        .into_iter()
        .map(|(k, v)| (k, v.scale(&w)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(WilsonState {
        source: a.source.clone(),
        target: b.target.clone(),
        markings,
        group_order: n,
        entries,
    })
}

/// State of a connected sum along marking `ia` of `a` (outgoing) and `ib` of
/// `b` (incoming): the outer product of the tables times the collar factor,
/// which is the indicator that the two consumed holonomies agree modulo `im t`.
pub fn tensor_with_collar(
    cm: &CrossedModule,
    a: &WilsonState,
    ia: usize,
    b: &WilsonState,
    ib: usize,
) -> Result<WilsonState> {
    let (Some(&ma), Some(&mb)) = (a.markings.get(ia), b.markings.get(ib)) else {
        return Err(err(
            ErrorKind::Summability,
            "markings exist",
            format!("{ia}, {ib}"),
        ));
    };
    let framing = |s: &WilsonState, e: End| match e.layer {
        Layer::Source => s.source.framing(e.vertex),
        Layer::Target => s.target.framing(e.vertex),
    };
    if framing(a, ma.0) != Some(-1) || framing(b, mb.0) != Some(1) {
        return Err(err(
            ErrorKind::Summability,
            "an outgoing marking meets an incoming one",
            "framing mismatch",
        ));
    }
    let pairs =
        summation_pairs(&ma, &mb).map_err(|e| err(e.kind, "markings are summable", e.detail))?;
    let [(src, sa, sb), (tgt, ta, tb)] =
        summed_layers((&a.source, &a.target), (&b.source, &b.target), &pairs);
    let g = cm.base();
    let n = g.order();
    let q = cm.quotient();
    let map_end = |e: End, second: bool| -> End {
        let m = match (e.layer, second) {
            (Layer::Source, false) => &sa,
            (Layer::Source, true) => &sb,
            (Layer::Target, false) => &ta,
            (Layer::Target, true) => &tb,
        };
        End {
            layer: e.layer,
            vertex: m[e.vertex],
        }
    };
    let mut markings = Vec::new();
    for (_, &(s, t)) in a.markings.iter().enumerate().filter(|&(k, _)| k != ia) {
        markings.push((map_end(s, false), map_end(t, false)));
    }
    for (_, &(s, t)) in b.markings.iter().enumerate().filter(|&(k, _)| k != ib) {
        markings.push((map_end(s, true), map_end(t, true)));
    }
    let (es_a, et_a, et_b) = (
        a.source.edges.len(),
        a.target.edges.len(),
        b.target.edges.len(),
    );
    let shift = n.pow(es_a as u32);
    let mut entries: BTreeMap<(usize, usize), Cyclotomic> = BTreeMap::new();
    for (&(i1, j1), v1) in &a.entries {
        let d1 = decode(j1, et_a + a.markings.len(), n);
        for (&(i2, j2), v2) in &b.entries {
            let d2 = decode(j2, et_b + b.markings.len(), n);
            if q.coset[d1[et_a + ia]] != q.coset[d2[et_b + ib]] {
                continue;
            }
            let mut digits: Vec<usize> = d1[..et_a].to_vec();
            digits.extend_from_slice(&d2[..et_b]);
            digits.extend(
                (0..a.markings.len())
                    .filter(|&k| k != ia)
                    .map(|k| d1[et_a + k]),
            );
            digits.extend(
                (0..b.markings.len())
                    .filter(|&k| k != ib)
                    .map(|k| d2[et_b + k]),
            );
            let key = (i1 + shift * i2, encode(&digits, n));
            let slot = entries.entry(key).or_insert_with(Cyclotomic::zero);
            *slot = &*slot + &(v1 * v2);
        }
    }
    entries.retain(|_, v| !v.is_zero());
    Ok(WilsonState {
        source: src,
        target: tgt,
        markings,
        group_order: n,
        entries,
    })
}

fn pairing(
    norm: &Normalization,
    cm: &CrossedModule,
    a: &WilsonState,
    b: &WilsonState,
    a_index: impl Fn(&[usize], &[usize], &[usize]) -> (usize, usize),
) -> Cyclotomic {
    let n = cm.base().order();
    let (es, et) = (b.source.edges.len(), b.target.edges.len());
    let mut total = Cyclotomic::zero();
    for (&(i, j), vb) in &b.entries {
        let s = decode(i, es, n);
        let d = decode(j, et + b.markings.len(), n);
        let (ai, aj) = a_index(&s, &d[..et], &d[et..]);
        if let Some(va) = a.entries.get(&(ai, aj)) {
            total = &total + &(&va.conj() * vb);
        }
    }
    let w = norm.layer_weight(&b.source) * norm.layer_weight(&b.target);
    total.scale(&w)
}

/// `⟨a, b⟩ = Σ_β w·conj(a(ιβ))·b(β)` where `a` is a state of the orientation
/// reversal of `b`'s ribbon and `ι` inverts every layer edge value.
pub fn orientation_pairing(
    norm: &Normalization,
    cm: &CrossedModule,
    a: &WilsonState,
    b: &WilsonState,
) -> Result<Cyclotomic> {
    if a.source != b.target.reversed()
        || a.target != b.source.reversed()
        || a.markings.len() != b.markings.len()
        || a.group_order != b.group_order
    {
        return Err(err(
            ErrorKind::Pairing,
            "first state lives on the orientation-reversed spaces of the second",
            "space mismatch",
        ));
    }
    let g = cm.base();
    let n = g.order();
    Ok(pairing(norm, cm, a, b, |s, t, mu| {
        let inv = |v: &[usize]| v.iter().map(|&x| g.inv(x)).collect::<Vec<_>>();
        let mut tgt = inv(s);
        tgt.extend_from_slice(mu);
        (encode(&inv(t), n), encode(&tgt, n))
    }))
}

/// Pairing with a state of the framing reversal: same edge values, flipped anchors.
pub fn framing_pairing(
    norm: &Normalization,
    cm: &CrossedModule,
    a: &WilsonState,
    b: &WilsonState,
) -> Result<Cyclotomic> {
    if a.source != b.source.flipped()
        || a.target != b.target.flipped()
        || a.markings.len() != b.markings.len()
        || a.group_order != b.group_order
    {
        return Err(err(
            ErrorKind::Pairing,
            "first state lives on the framing-reversed spaces of the second",
            "space mismatch",
        ));
    }
    let n = cm.base().order();
    Ok(pairing(norm, cm, a, b, |s, t, mu| {
        let mut tgt = t.to_vec();
        tgt.extend_from_slice(mu);
        (encode(s, n), encode(&tgt, n))
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramReport {
    pub gram: Vec<Vec<BigRational>>,
    pub is_psd: bool,
}

/// Exact positive-semidefiniteness by symmetric elimination: a negative pivot
/// fails, a zero pivot needs a zero row.
pub fn is_psd(m: &[Vec<BigRational>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    for i in 0..n {
        for j in 0..n {
            if a[i][j] != a[j][i] {
                return false;
            }
        }
    }
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_negative() {
            return false;
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &p;
            for j in k + 1..n {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
    }
    true
}

/// Gram matrix `G_ij = ⟨evaluate(R_i^†), evaluate(R_j)⟩` over ribbons with a
/// common source and empty target; marking holonomies are summed out.
pub fn reflection_positivity_check(cm: &CrossedModule, ribbons: &[Ribbon]) -> Result<GramReport> {
    let norm = Normalization::for_cm(cm);
    if let Some(r0) = ribbons.first() {
        if ribbons.iter().any(|r| {
            r.source() != r0.source() || !r.target().edges.is_empty() || r.target().vertices != 0
        }) {
            return Err(err(
                ErrorKind::Pairing,
                "ribbons share their source and have empty target",
                "mixed boundaries",
            ));
        }
    }
    let mut fwd = Vec::new();
    let mut rev = Vec::new();
    for r in ribbons {
        fwd.push(evaluate(cm, r, None)?.forget_markings());
        rev.push(evaluate(cm, &r.dagger1(), None)?.forget_markings());
    }
    let mut gram = Vec::new();
    for a in &rev {
        let mut row = Vec::new();
        for b in &fwd {
            let v = orientation_pairing(&norm, cm, a, b)?;
            row.push(v.as_rational().cloned().ok_or_else(|| {
                err(ErrorKind::Pairing, "pairings are rational", "phase present")
            })?);
        }
        gram.push(row);
    }
    let ok = is_psd(&gram);
    Ok(GramReport { gram, is_psd: ok })
}

/// Normalized closed-polyhedron invariant: `|G/im t|` per component times the
/// state-sum value.
pub fn partition_function(
    cm: &CrossedModule,
    p: &SimplePolyhedron,
    gerbe: Option<&GerbeDatum>,
) -> Result<Cyclotomic> {
    partition_function_with(cm, p, gerbe, default_workers())
}

pub fn partition_function_with(
    cm: &CrossedModule,
    p: &SimplePolyhedron,
    gerbe: Option<&GerbeDatum>,
    workers: usize,
) -> Result<Cyclotomic> {
    if !p.body().is_closed() {
        return Err(err(
            ErrorKind::Domain,
            "polyhedron is closed",
            "boundary present; evaluate the ribbon instead",
        ));
    }
    let empty = Embedding {
        vertices: vec![],
        edges: vec![],
    };
    let r = Ribbon::new(
        p.clone(),
        BoundaryGraph::empty(),
        BoundaryGraph::empty(),
        empty.clone(),
        empty,
        vec![],
        0,
    )?;
    let st = evaluate_with(cm, &Normalization::for_cm(cm), &r, gerbe, workers)?;
    let k = rpow(&ratio(cm.coker_order(), 1), p.body().components().len());
    Ok(st.get(0, 0).scale(&k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::holonomy::count_fake_flat;
    use crate::ribbon::{b_times, cap, cup, identity_cylinder, stack_auto};

    fn cm_02() -> CrossedModule {
        CrossedModule::new(
            FiniteGroup::cyclic(2),
            FiniteGroup::cyclic(2),
            vec![0, 0],
            vec![vec![0, 1], vec![0, 1]],
        )
        .unwrap()
    }

    fn cm_s3() -> CrossedModule {
        CrossedModule::trivial_fiber(FiniteGroup::symmetric3())
    }

    #[test]
    fn empty_ribbon_is_one() {
        let st = evaluate(&cm_02(), &Ribbon::empty(), None).unwrap();
        assert_eq!(st.entries.len(), 1);
        assert_eq!(st.get(0, 0), Cyclotomic::one());
    }

    #[test]
    fn triangle_table_is_image_indicator() {
        for cm in [cm_02(), cm_s3()] {
            let c = TwoComplex::triangle();
            let st = evaluate(&cm, &Ribbon::filling(c.clone()).unwrap(), None).unwrap();
            let n = cm.base().order();
            for i in 0..st.source_size() {
                let beta = decode(i, 3, n);
                let mut h = vec![0; 3];
                for (k, &e) in c.boundary_edges().iter().enumerate() {
                    h[e] = beta[k];
                }
                let want = if cm.in_image(face_target(&cm, &c, &h, 0)) {
                    Cyclotomic::one()
                } else {
                    Cyclotomic::zero()
                };
                assert_eq!(st.get(i, 0), want);
            }
        }
    }

    #[test]
    fn vertex_weight_matches_cokernel() {
        for cm in [cm_02(), cm_s3()] {
            assert_eq!(
                derive_vertex_weight(&cm).unwrap(),
                ratio(1, cm.coker_order())
            );
        }
    }

    #[test]
    fn identity_cylinder_is_idempotent() {
        let cm = cm_02();
        let norm = Normalization::for_cm(&cm);
        let tri = Ribbon::filling(TwoComplex::triangle()).unwrap();
        let w = evaluate(&cm, &tri, None).unwrap();
        let id = evaluate(&cm, &identity_cylinder(tri.source()).unwrap(), None).unwrap();
        assert_eq!(compose_states(&norm, &cm, &id, &w).unwrap(), w);
    }

    #[test]
    fn stacking_matches_composition() {
        let cm = cm_02();
        let norm = Normalization::for_cm(&cm);
        let bx = b_times();
        let id = identity_cylinder(bx.target()).unwrap();
        let lhs = evaluate(&cm, &stack_auto(&bx, &id).unwrap(), None).unwrap();
        let rhs = compose_states(
            &norm,
            &cm,
            &evaluate(&cm, &bx, None).unwrap(),
            &evaluate(&cm, &id, None).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn partition_function_counts_flat_connections() {
        let cm = cm_s3();
        let p = SimplePolyhedron::from_complex(TwoComplex::triangle().double()).unwrap();
        assert_eq!(
            partition_function(&cm, &p, None).unwrap(),
            Cyclotomic::one()
        );
        let fixed = vec![None; p.body().edges().len()];
        assert!(count_fake_flat(&cm, p.body(), &fixed).unwrap() > num_bigint::BigUint::zero());
        assert!(partition_function(
            &cm,
            &SimplePolyhedron::from_complex(TwoComplex::triangle()).unwrap(),
            None
        )
        .is_err());
    }

    #[test]
    fn house_state_and_positivity() {
        let cm = cm_02();
        let h = stack_auto(&cup(), &cap()).unwrap();
        let st = evaluate(&cm, &h, None).unwrap();
        assert_eq!(
            st.get(0, 0),
            Cyclotomic::rational(ratio(1, cm.coker_order()))
        );
        let rep = reflection_positivity_check(&cm, &[cap()]).unwrap();
        assert!(rep.is_psd);
        assert!(rep.gram[0][0] > BigRational::zero());
    }

    #[test]
    fn psd_detects_indefinite() {
        let r = |n: i64| BigRational::from_integer(n.into());
        assert!(is_psd(&[vec![r(1), r(1)], vec![r(1), r(1)]]));
        assert!(!is_psd(&[vec![r(1), r(2)], vec![r(2), r(1)]]));
        assert!(!is_psd(&[vec![r(0), r(1)], vec![r(1), r(0)]]));
    }

    #[test]
    fn state_json_round_trip() {
        let cm = cm_02();
        let st = evaluate(&cm, &b_times(), None).unwrap();
        let js = serde_json::to_string(&st).unwrap();
        let back: WilsonState = serde_json::from_str(&js).unwrap();
        assert_eq!(back, st);
    }
}
