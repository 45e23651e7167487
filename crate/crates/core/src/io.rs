//! File formats and named-object lookup shared by the command line and the
//! examples.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::TwoComplex;
use crate::error::{Error, ErrorKind, Module, Result};
use crate::group::{self, CrossedModule, FiniteGroup};
use crate::polyhedron::{self, SimplePolyhedron};
use crate::ribbon::{self, Ribbon};

/// Environment variable naming a directory of user geometry files that
/// shadow the builders.
pub const GALLERY_DIR_VAR: &str = "TWOHOL_GALLERY_DIR";

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Cli, kind, pre, detail)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
}

/// `{"order","mul"}` give the base group; the fiber defaults to the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossedModuleFile {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<GroupFile>,
    pub t: Vec<usize>,
    pub act: Vec<Vec<usize>>,
}

impl CrossedModuleFile {
    pub fn from_cm(cm: &CrossedModule) -> Self {
        CrossedModuleFile {
            order: cm.base().order(),
            mul: cm.base().table(),
            fiber: Some(GroupFile {
                order: cm.fiber().order(),
                mul: cm.fiber().table(),
            }),
            t: cm.t_table().to_vec(),
            act: cm.act_table(),
        }
    }

    /// Build without checking the axioms; table shape errors are reported.
    pub fn to_cm(&self) -> Result<CrossedModule> {
        let group = |order: usize, mul: &[Vec<usize>]| {
            if mul.len() != order {
                return Err(err(
                    ErrorKind::Schema,
                    "order matches the table",
                    format!("order {order}, {} rows", mul.len()),
                ));
            }
            FiniteGroup::from_table(mul.to_vec())
        };
        let base = group(self.order, &self.mul)?;
        let fiber = match &self.fiber {
            Some(f) => group(f.order, &f.mul)?,
            None => FiniteGroup::trivial(),
        };
        CrossedModule::new(base, fiber, self.t.clone(), self.act.clone())
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        err(
            ErrorKind::Io,
            "file is readable",
            format!("{}: {e}", path.display()),
        )
    })?;
    serde_json::from_str(&text).map_err(|e| {
        err(
            ErrorKind::Schema,
            "file is JSON",
            format!("{}: {e}", path.display()),
        )
    })
}

fn schema<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| {
        err(
            ErrorKind::Schema,
            "document matches its schema",
            format!("{what}: {e}"),
        )
    })
}

/// A builtin name or a JSON file path.
pub fn load_cm(reference: &str) -> Result<CrossedModule> {
    if let Some(cm) = group::builtin(reference) {
        return Ok(cm);
    }
    let p = Path::new(reference);
    if !p.exists() {
        return Err(err(
            ErrorKind::Reference,
            "crossed module reference resolves",
            format!(
                "{reference} is neither a builtin ({}) nor a file",
                group::BUILTIN_NAMES.join(", ")
            ),
        ));
    }
    schema::<CrossedModuleFile>(read_json(p)?, "crossed module")?.to_cm()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Complex(TwoComplex),
    Polyhedron(SimplePolyhedron),
    Ribbon(Ribbon),
}

impl Geometry {
    pub fn kind(&self) -> &'static str {
        match self {
            Geometry::Complex(_) => "complex",
            Geometry::Polyhedron(_) => "polyhedron",
            Geometry::Ribbon(_) => "ribbon",
        }
    }

    pub fn complex(&self) -> &TwoComplex {
        match self {
            Geometry::Complex(c) => c,
            Geometry::Polyhedron(p) => p.body(),
            Geometry::Ribbon(r) => r.complex(),
        }
    }

    pub fn polyhedron(&self) -> Result<SimplePolyhedron> {
        match self {
            Geometry::Complex(c) => SimplePolyhedron::from_complex(c.clone()),
            Geometry::Polyhedron(p) => Ok(p.clone()),
            Geometry::Ribbon(r) => Ok(r.body().clone()),
        }
    }

    /// Ribbons as they are; anything else as a filling of its boundary.
    pub fn ribbon(&self) -> Result<Ribbon> {
        match self {
            Geometry::Ribbon(r) => Ok(r.clone()),
            Geometry::Polyhedron(p) => {
                let b = p.body().boundary_edges();
                Ribbon::from_polyhedron(p.clone(), &b, &[])
            }
            Geometry::Complex(c) => Ribbon::filling(c.clone()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Geometry::Complex(c) => serde_json::to_value(c),
            Geometry::Polyhedron(p) => serde_json::to_value(p),
            Geometry::Ribbon(r) => serde_json::to_value(r),
        }
        .expect("geometry serializes")
    }

    /// Ribbon if it has layers, polyhedron if it has strata, complex otherwise.
    pub fn from_json(v: Value) -> Result<Geometry> {
        let has = |k: &str| v.get(k).is_some();
        if has("source") || has("target") {
            Ok(Geometry::Ribbon(schema(v, "ribbon")?))
        } else if has("strata") {
            Ok(Geometry::Polyhedron(schema(v, "polyhedron")?))
        } else {
            Ok(Geometry::Complex(schema(v, "complex")?))
        }
    }
}

fn gallery_dir() -> Option<PathBuf> {
    std::env::var_os(GALLERY_DIR_VAR).map(PathBuf::from)
}

/// Resolve a geometry: a user file in the gallery directory, a file path, a
/// ribbon generator, or a polyhedron builder, in that order.
pub fn load_geometry(reference: &str) -> Result<Geometry> {
    if let Some(dir) = gallery_dir() {
        let p = dir.join(format!("{reference}.json"));
        if p.exists() {
            return Geometry::from_json(read_json(&p)?);
        }
    }
    let p = Path::new(reference);
    if p.is_file() {
        return Geometry::from_json(read_json(p)?);
    }
    if let Some(r) = ribbon::gallery_ribbon(reference) {
        return Ok(Geometry::Ribbon(r));
    }
    if let Some(p) = polyhedron::builder(reference) {
        return Ok(Geometry::Polyhedron(p));
    }
    Err(err(
        ErrorKind::Reference,
        "geometry reference resolves",
        format!("unknown geometry {reference}"),
    ))
}

/// Fixed boundary values: either an array with `null` for free edges or an
/// object `{"edge index": value}`.
pub fn load_fixed(path: &Path, n_edges: usize) -> Result<Vec<Option<usize>>> {
    let v = read_json(path)?;
    let v = v.get("edges").cloned().unwrap_or(v);
    let mut out = vec![None; n_edges];
    match v {
        Value::Array(a) => {
            if a.len() != n_edges {
                return Err(err(
                    ErrorKind::Schema,
                    "one entry per edge",
                    format!("{} entries for {n_edges} edges", a.len()),
                ));
            }
            for (e, x) in a.iter().enumerate() {
                out[e] = match x {
                    Value::Null => None,
                    x => Some(x.as_u64().ok_or_else(|| {
                        err(
                            ErrorKind::Schema,
                            "values are element indices",
                            format!("edge {e}"),
                        )
                    })? as usize),
                };
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                let e: usize = k
                    .parse()
                    .map_err(|_| err(ErrorKind::Schema, "keys are edge indices", k.clone()))?;
                if e >= n_edges {
                    return Err(err(ErrorKind::Schema, "keys are edge indices", k));
                }
                out[e] = Some(x.as_u64().ok_or_else(|| {
                    err(ErrorKind::Schema, "values are element indices", k.clone())
                })? as usize);
            }
        }
        _ => {
            return Err(err(
                ErrorKind::Schema,
                "fixed boundary is an array or object",
                "wrong JSON type",
            ))
        }
    }
    Ok(out)
}

pub fn load_gerbe(path: &Path) -> Result<polyhedron::gerbe::GerbeDatum> {
    schema(read_json(path)?, "gerbe datum")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GalleryEntry {
    pub name: String,
    pub kind: &'static str,
    /// Anchor counts on the source and target layers.
    pub signature: (usize, usize),
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

/// Every builder and ribbon generator, sorted by name.
pub fn builtin_gallery() -> Vec<GalleryEntry> {
    let mut out: Vec<GalleryEntry> = Vec::new();
    for name in polyhedron::BUILDER_NAMES {
        let p = polyhedron::builder(name).expect("listed builder");
        let (v, e, f) = p.body().counts();
        out.push(GalleryEntry {
            name: name.to_string(),
            kind: "polyhedron",
            signature: (0, 0),
            vertices: v,
            edges: e,
            faces: f,
        });
    }
    for (name, r) in ribbon::gallery() {
        let (v, e, f) = r.complex().counts();
        out.push(GalleryEntry {
            name: name.to_string(),
            kind: "ribbon",
            signature: r.signature(),
            vertices: v,
            edges: e,
            faces: f,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cm_file_round_trip() {
        for (name, cm) in group::samples() {
            let f = CrossedModuleFile::from_cm(&cm);
            let js = serde_json::to_string(&f).unwrap();
            let back: CrossedModuleFile = serde_json::from_str(&js).unwrap();
            assert_eq!(back.to_cm().unwrap(), cm, "{name}");
        }
    }

    #[test]
    fn listing() {
        let g = builtin_gallery();
        assert!(g.windows(2).all(|w| w[0].name < w[1].name));
        let gp = g.iter().find(|e| e.name == "gamma_plus").unwrap();
        assert_eq!(gp.faces, 4);
        let bt = g.iter().find(|e| e.name == "b_times").unwrap();
        assert_eq!(bt.signature, (2, 2));
    }

    #[test]
    fn geometry_json_kinds() {
        for name in ["triangle", "b_times"] {
            let g = load_geometry(name).unwrap();
            let back = Geometry::from_json(g.to_json()).unwrap();
            assert_eq!(back, g);
        }
        assert!(load_geometry("no_such_thing").is_err());
    }
}
