//! 2-gauge transformations and their action on decorations.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{SourcePath, TwoComplex};
use crate::error::{Error, ErrorKind, Module, Result};
use crate::group::CrossedModule;
use crate::holonomy::{enumerate_fake_flat, slot_hol, total_surface_holonomy, Decoration};

/// `a_v ∈ G` per vertex and `γ_e ∈ H` per edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaugeParam {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// `m_v ∈ H` per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondaryGauge {
    pub vertices: Vec<usize>,
}

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Gauge, kind, pre, detail)
}

impl GaugeParam {
    pub fn identity(c: &TwoComplex) -> Self {
        GaugeParam {
            vertices: vec![0; c.n_vertices()],
            edges: vec![0; c.edges().len()],
        }
    }

    fn check(&self, cm: &CrossedModule, c: &TwoComplex) -> Result<()> {
        if self.vertices.len() != c.n_vertices() || self.edges.len() != c.edges().len() {
            return Err(err(
                ErrorKind::InvalidParameter,
                "parameter covers every vertex and edge",
                "length mismatch",
            ));
        }
        if self.vertices.iter().any(|&a| a >= cm.base().order())
            || self.edges.iter().any(|&g| g >= cm.fiber().order())
        {
            return Err(err(
                ErrorKind::InvalidParameter,
                "parameter values are group elements",
                "index out of range",
            ));
        }
        Ok(())
    }

    /// Whether `t(γ_e) = a_src⁻¹·a_dst` holds on every edge.
    pub fn is_flat(&self, cm: &CrossedModule, c: &TwoComplex) -> bool {
        let g = cm.base();
        c.edges().iter().enumerate().all(|(e, ed)| {
            cm.t(self.edges[e]) == g.mul(g.inv(self.vertices[ed.src]), self.vertices[ed.dst])
        })
    }
}

/// The product `ζ·ζ'`, acting as `ζ` followed by `ζ'`.
pub fn compose(cm: &CrossedModule, c: &TwoComplex, z: &GaugeParam, z2: &GaugeParam) -> GaugeParam {
    let g = cm.base();
    let h = cm.fiber();
    GaugeParam {
        vertices: z
            .vertices
            .iter()
            .zip(&z2.vertices)
            .map(|(&a, &b)| g.mul(a, b))
            .collect(),
        edges: (0..c.edges().len())
            .map(|e| h.mul(z.edges[e], cm.act(z.vertices[c.edge(e).dst], z2.edges[e])))
            .collect(),
    }
}

pub fn inverse(cm: &CrossedModule, c: &TwoComplex, z: &GaugeParam) -> GaugeParam {
    let g = cm.base();
    let h = cm.fiber();
    GaugeParam {
        vertices: z.vertices.iter().map(|&a| g.inv(a)).collect(),
        edges: (0..c.edges().len())
            .map(|e| cm.act(g.inv(z.vertices[c.edge(e).dst]), h.inv(z.edges[e])))
            .collect(),
    }
}

/// Edge part first (`h_e ↦ h_e·t(γ_e)`), then vertex part
/// (`h_e ↦ a_src⁻¹ h_e a_dst`, `b_f ↦ a_root⁻¹ ▷ b_f`).
pub fn apply_gauge(
    cm: &CrossedModule,
    c: &TwoComplex,
    z: &GaugeParam,
    d: &Decoration,
) -> Result<Decoration> {
    z.check(cm, c)?;
    if d.edges.len() != c.edges().len() || d.faces.len() != c.faces().len() {
        return Err(err(
            ErrorKind::Incomplete,
            "decoration is total",
            "length mismatch",
        ));
    }
    let g = cm.base();
    let h = cm.fiber();
    let mut faces = Vec::with_capacity(d.faces.len());
    for f in 0..c.faces().len() {
        let face = c.face(f);
        // slot factor c_i with hol_i' = hol_i · t(c_i)
        let factor = |i: usize| {
            let s = face.slots[i];
            let gam = z.edges[s.edge];
            if face.aligned(i) {
                gam
            } else {
                cm.act(d.edges[s.edge], h.inv(gam))
            }
        };
        let hol2 = slot_hol(cm, c, &d.edges, f, 1);
        let hol3 = slot_hol(cm, c, &d.edges, f, 2);
        let y = h.mul(
            h.mul(cm.act(g.inv(hol3), factor(0)), factor(2)),
            h.inv(factor(1)),
        );
        let w = cm.act(hol2, y);
        let b = d.faces[f];
        let b1 = if face.eps == 1 {
            h.mul(b, w)
        } else {
            h.mul(h.inv(w), b)
        };
        faces.push(cm.act(g.inv(z.vertices[c.corners(f)[0]]), b1));
    }
    let edges = c
        .edges()
        .iter()
        .enumerate()
        .map(|(e, ed)| {
            let x = g.mul(d.edges[e], cm.t(z.edges[e]));
            g.mul(g.mul(g.inv(z.vertices[ed.src]), x), z.vertices[ed.dst])
        })
        .collect();
    Ok(Decoration { edges, faces })
}

/// Vertical conjugation: `a_v ↦ a_v·t(m_v)`, `γ_e ↦ m_src⁻¹·γ_e·m_dst`.
pub fn apply_secondary(
    cm: &CrossedModule,
    c: &TwoComplex,
    m: &SecondaryGauge,
    z: &GaugeParam,
) -> GaugeParam {
    let g = cm.base();
    let h = cm.fiber();
    GaugeParam {
        vertices: z
            .vertices
            .iter()
            .zip(&m.vertices)
            .map(|(&a, &x)| g.mul(a, cm.t(x)))
            .collect(),
        edges: c
            .edges()
            .iter()
            .enumerate()
            .map(|(e, ed)| {
                h.mul(
                    h.mul(h.inv(m.vertices[ed.src]), z.edges[e]),
                    m.vertices[ed.dst],
                )
            })
            .collect(),
    }
}

/// Which vertices and edges a gauge parameter may move.
#[derive(Debug, Clone)]
pub struct Support {
    pub vertices: Vec<bool>,
    pub edges: Vec<bool>,
}

impl Support {
    pub fn full(c: &TwoComplex) -> Self {
        Support {
            vertices: vec![true; c.n_vertices()],
            edges: vec![true; c.edges().len()],
        }
    }

    /// Everything except boundary vertices and boundary edges.
    pub fn interior(c: &TwoComplex) -> Self {
        let bv = c.boundary_vertices();
        let be = c.boundary_flags();
        Support {
            vertices: (0..c.n_vertices()).map(|v| !bv.contains(&v)).collect(),
            edges: be.iter().map(|&b| !b).collect(),
        }
    }

    /// Number of gauge parameters with this support.
    pub fn group_order(&self, cm: &CrossedModule) -> u128 {
        let nv = self.vertices.iter().filter(|&&x| x).count() as u32;
        let ne = self.edges.iter().filter(|&&x| x).count() as u32;
        (cm.base().order() as u128).pow(nv) * (cm.fiber().order() as u128).pow(ne)
    }

    /// Every parameter with this support, in odometer order.
    pub fn parameters<'a>(
        &'a self,
        cm: &'a CrossedModule,
        c: &'a TwoComplex,
    ) -> impl Iterator<Item = GaugeParam> + 'a {
        let slots: Vec<(bool, usize, usize)> = (0..c.n_vertices())
            .filter(|&v| self.vertices[v])
            .map(|v| (true, v, cm.base().order()))
            .chain(
                (0..c.edges().len())
                    .filter(|&e| self.edges[e])
                    .map(|e| (false, e, cm.fiber().order())),
            )
            .collect();
        let total: u128 = slots.iter().map(|s| s.2 as u128).product();
        (0..total).map(move |mut k| {
            let mut z = GaugeParam::identity(c);
            for &(is_v, i, n) in &slots {
                let x = (k % n as u128) as usize;
                k /= n as u128;
                if is_v {
                    z.vertices[i] = x;
                } else {
                    z.edges[i] = x;
                }
            }
            z
        })
    }

    /// One-step generators: a single vertex or edge moved to a single element.
    fn generators(&self, cm: &CrossedModule, c: &TwoComplex) -> Vec<GaugeParam> {
        let mut out = Vec::new();
        for v in (0..c.n_vertices()).filter(|&v| self.vertices[v]) {
            for a in 1..cm.base().order() {
                let mut z = GaugeParam::identity(c);
                z.vertices[v] = a;
                out.push(z);
            }
        }
        for e in (0..c.edges().len()).filter(|&e| self.edges[e]) {
            for x in 1..cm.fiber().order() {
                let mut z = GaugeParam::identity(c);
                z.edges[e] = x;
                out.push(z);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitCensus {
    pub orbits: usize,
    /// Orbit sizes in order of each orbit's first decoration.
    pub sizes: Vec<usize>,
    pub group_order: u128,
}

/// Orbits of fake-flat decorations under gauge parameters with the given
/// support, by breadth-first closure under single-cell generators.
pub fn orbit_census(cm: &CrossedModule, c: &TwoComplex, support: &Support) -> Result<OrbitCensus> {
    let fixed = vec![None; c.edges().len()];
    let (_, it) = enumerate_fake_flat(cm, c, &fixed)
        .map_err(|e| err(e.kind, "enumeration succeeds", e.detail))?;
    let all: Vec<Decoration> = it.collect();
    let index: HashMap<&Decoration, usize> = all.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let gens = support.generators(cm, c);
    let mut seen = vec![false; all.len()];
    let mut sizes = Vec::new();
    for s in 0..all.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut size = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            size += 1;
            for z in &gens {
                let d2 = apply_gauge(cm, c, z, &all[i])?;
                let j = index[&d2];
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        sizes.push(size);
    }
    Ok(OrbitCensus {
        orbits: sizes.len(),
        sizes,
        group_order: support.group_order(cm),
    })
}

/// Orbit census with boundary cells either fixed or free.
pub fn orbit_count(cm: &CrossedModule, c: &TwoComplex, fix_boundary: bool) -> Result<OrbitCensus> {
    let support = if fix_boundary {
        Support::interior(c)
    } else {
        Support::full(c)
    };
    orbit_census(cm, c, &support)
}

/// Interior edges that are not the source edge of any face: the gluing edges
/// a gauge parameter may move without touching the boundary or the source.
pub fn internal_edges(c: &TwoComplex) -> Vec<usize> {
    let boundary = c.boundary_flags();
    let mut source = vec![false; c.edges().len()];
    for f in c.faces() {
        source[f.slots[0].edge] = true;
    }
    (0..c.edges().len())
        .filter(|&e| !boundary[e] && !source[e])
        .collect()
}

/// Whether every edge gauge supported on [`internal_edges`] leaves the total
/// surface holonomy unchanged.
pub fn check_internal_invariance(
    cm: &CrossedModule,
    sp: &SourcePath,
    d: &Decoration,
) -> Result<bool> {
    let c = &sp.complex;
    let base = total_surface_holonomy(cm, sp, d)?;
    let mut support = Support {
        vertices: vec![false; c.n_vertices()],
        edges: vec![false; c.edges().len()],
    };
    for e in internal_edges(c) {
        support.edges[e] = true;
    }
    for z in support.parameters(cm, c) {
        let d2 = apply_gauge(cm, c, &z, d)?;
        if total_surface_holonomy(cm, sp, &d2)? != base {
            return Ok(false);
        }
    }
    Ok(true)
}
