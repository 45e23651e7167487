use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use twohol::complex::TwoComplex;
use twohol::error::{Error, ErrorKind, Module, Result};
use twohol::gauge::orbit_count;
use twohol::group::CrossedModule;
use twohol::holonomy::{enumerate_fake_flat, total_surface_holonomy};
use twohol::io::{self, Geometry};
use twohol::polyhedron::gerbe::GerbeDatum;
use twohol::polyhedron::{handle_move_02, handle_move_20, handle_move_23, handle_move_32};
use twohol::selftest;
use twohol::wilson::{
    self, compose_states, framing_pairing, orientation_pairing, scalar_json, tensor_with_collar,
    Normalization, WilsonState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Task {
    Validate,
    Enumerate,
    Holonomy,
    Orbits,
    Evaluate,
    Compose,
    Sum,
    Pair,
    Partition,
    Move,
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// Finite crossed-module gauge theory on 2-complexes, polyhedra and ribbons.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Builtin crossed module name or JSON file.
    #[arg(long, default_value = "cm_02")]
    cm: String,
    /// Builtin geometry name or JSON file; repeat for two-argument tasks.
    #[arg(long)]
    geometry: Vec<String>,
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// JSON file of fixed edge values.
    #[arg(long)]
    fix_boundary: Option<PathBuf>,
    /// JSON file with a gerbe datum.
    #[arg(long)]
    gerbe: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    workers: Option<usize>,
    /// Task-specific site: marking pair `i,j` for sum, `orientation` or
    /// `framing` for pair, a move such as `flip:3` or `02:0,0,2`, or a
    /// criterion number for selftest.
    #[arg(long)]
    site: Option<String>,
    /// Cap on the decorations listed by enumerate.
    #[arg(long, default_value_t = 64)]
    limit: usize,
    /// List the builtin crossed modules and geometries.
    #[arg(long)]
    gallery: bool,
}

fn usage(detail: impl Into<String>) -> Error {
    Error::new(
        Module::Cli,
        ErrorKind::Schema,
        "arguments match the task",
        detail,
    )
}

struct Ctx {
    args: Args,
    workers: usize,
}

impl Ctx {
    fn cm(&self) -> Result<CrossedModule> {
        io::load_cm(&self.args.cm)
    }

    fn geometries(&self, n: usize) -> Result<Vec<Geometry>> {
        if self.args.geometry.len() != n {
            return Err(usage(format!(
                "expected {n} --geometry, got {}",
                self.args.geometry.len()
            )));
        }
        self.args
            .geometry
            .iter()
            .map(|g| io::load_geometry(g))
            .collect()
    }

    fn geometry(&self) -> Result<Geometry> {
        Ok(self.geometries(1)?.remove(0))
    }

    fn gerbe(&self) -> Result<Option<GerbeDatum>> {
        self.args.gerbe.as_deref().map(io::load_gerbe).transpose()
    }

    fn fixed(&self, c: &TwoComplex) -> Result<Vec<Option<usize>>> {
        match &self.args.fix_boundary {
            Some(p) => io::load_fixed(p, c.edges().len()),
            None => Ok(vec![None; c.edges().len()]),
        }
    }

    fn state(&self, cm: &CrossedModule, g: &Geometry) -> Result<WilsonState> {
        let norm = Normalization::for_cm(cm);
        wilson::evaluate_with(
            cm,
            &norm,
            &g.ribbon()?,
            self.gerbe()?.as_ref(),
            self.workers,
        )
    }

    fn site_numbers(&self) -> Result<Vec<usize>> {
        let s = self
            .args
            .site
            .as_deref()
            .ok_or_else(|| usage("--site is required"))?;
        let body = s.split_once(':').map_or(s, |(_, b)| b);
        body.split(',')
            .map(|x| x.trim().parse().map_err(|_| usage(format!("bad site {s}"))))
            .collect()
    }
}

fn state_table(s: &WilsonState) -> String {
    let mut out = format!(
        "source {} edges, target {} digits, {} nonzero entries\n",
        s.source.edges.len(),
        s.target_digits(),
        s.entries.len()
    );
    for (i, row) in s.rows() {
        for (j, v) in row {
            out.push_str(&format!("{i:>6} {j:>6}  {v}\n"));
        }
    }
    out
}

fn run(ctx: &Ctx) -> Result<(Value, String)> {
    let a = &ctx.args;
    if a.gallery {
        let entries = io::builtin_gallery();
        let table = entries
            .iter()
            .map(|e| {
                format!(
                    "{:<24} {:<10} {:?} V={} E={} F={}",
                    e.name, e.kind, e.signature, e.vertices, e.edges, e.faces
                )
            })
            .collect::<Vec<_>>()
            .join("\n");
        let cms = twohol::group::BUILTIN_NAMES;
        return Ok((
            json!({"crossed_modules": cms, "geometries": entries}),
            format!("crossed modules: {}\n{table}", cms.join(", ")),
        ));
    }
    let task = a
        .task
        .ok_or_else(|| usage("--task or --gallery is required"))?;
    match task {
        Task::Validate => {
            let v = ctx.cm()?.validate();
            let table = if v.is_empty() {
                "all axioms hold".to_string()
            } else {
                v.iter()
                    .map(|x| format!("{:?} in {} at {:?}", x.axiom, x.table, x.witness))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            Ok((
                serde_json::to_value(&v).expect("violations serialize"),
                table,
            ))
        }
        Task::Enumerate => {
            let cm = ctx.cm()?;
            let g = ctx.geometry()?;
            let c = g.complex();
            let (count, it) = enumerate_fake_flat(&cm, c, &ctx.fixed(c)?)?;
            let listed: Vec<_> = it.take(a.limit).collect();
            let table = format!(
                "{count} fake-flat decorations\n{}",
                listed
                    .iter()
                    .map(|d| format!("edges {:?} faces {:?}", d.edges, d.faces))
                    .collect::<Vec<_>>()
                    .join("\n")
            );
            Ok((
                json!({"count": count.to_string().parse::<u64>().map(Value::from).unwrap_or_else(|_| Value::String(count.to_string())), "decorations": listed}),
                table,
            ))
        }
        Task::Holonomy => {
            let cm = ctx.cm()?;
            let sp = ctx.geometry()?.complex().make_unbroken()?;
            let (_, it) = enumerate_fake_flat(&cm, &sp.complex, &ctx.fixed(&sp.complex)?)?;
            let mut hist: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for d in it {
                let x = total_surface_holonomy(&cm, &sp, &d)?;
                *hist.entry((x.h, x.g)).or_default() += 1;
            }
            let rows: Vec<Value> = hist
                .iter()
                .map(|(&(h, g), &n)| json!({"h": h, "g": g, "count": n}))
                .collect();
            let table = hist
                .iter()
                .map(|((h, g), n)| format!("(h={h}, g={g})  {n}"))
                .collect::<Vec<_>>()
                .join("\n");
            Ok((json!({"path": sp.path, "histogram": rows}), table))
        }
        Task::Orbits => {
            let cm = ctx.cm()?;
            let g = ctx.geometry()?;
            let full = orbit_count(&cm, g.complex(), false)?;
            let rel = orbit_count(&cm, g.complex(), true)?;
            let table = format!(
                "orbits {} (boundary gauge fixed: {})",
                full.orbits, rel.orbits
            );
            Ok((
                json!({"orbits": full.orbits, "sizes": full.sizes, "orbits_rel_boundary": rel.orbits, "sizes_rel_boundary": rel.sizes}),
                table,
            ))
        }
        Task::Evaluate => {
            let cm = ctx.cm()?;
            let s = ctx.state(&cm, &ctx.geometry()?)?;
            let table = state_table(&s);
            Ok((serde_json::to_value(&s).expect("state serializes"), table))
        }
        Task::Compose | Task::Sum => {
            let cm = ctx.cm()?;
            let gs = ctx.geometries(2)?;
            let (x, y) = (ctx.state(&cm, &gs[0])?, ctx.state(&cm, &gs[1])?);
            let s = if task == Task::Compose {
                compose_states(&Normalization::for_cm(&cm), &cm, &x, &y)?
            } else {
                let site = ctx.site_numbers()?;
                let [i, j] = site[..] else {
                    return Err(usage("sum needs --site i,j"));
                };
                tensor_with_collar(&cm, &x, i, &y, j)?
            };
            let table = state_table(&s);
            Ok((serde_json::to_value(&s).expect("state serializes"), table))
        }
        Task::Pair => {
            let cm = ctx.cm()?;
            let norm = Normalization::for_cm(&cm);
            let framing = a.site.as_deref() == Some("framing");
            let gs: Vec<Geometry> = a
                .geometry
                .iter()
                .map(|g| io::load_geometry(g))
                .collect::<Result<_>>()?;
            let (x, y) = match gs.len() {
                1 => {
                    let r = gs[0].ribbon()?;
                    let dual = if framing { r.dagger2() } else { r.dagger1() };
                    (
                        ctx.state(&cm, &Geometry::Ribbon(dual))?,
                        ctx.state(&cm, &gs[0])?,
                    )
                }
                2 => (ctx.state(&cm, &gs[0])?, ctx.state(&cm, &gs[1])?),
                n => return Err(usage(format!("pair takes one or two geometries, got {n}"))),
            };
            let v = if framing {
                framing_pairing(&norm, &cm, &x, &y)?
            } else {
                orientation_pairing(&norm, &cm, &x, &y)?
            };
            Ok((
                json!({"pairing": if framing { "framing" } else { "orientation" }, "value": scalar_json(&v)}),
                v.to_string(),
            ))
        }
        Task::Partition => {
            let cm = ctx.cm()?;
            let p = ctx.geometry()?.polyhedron()?;
            let z = wilson::partition_function_with(&cm, &p, ctx.gerbe()?.as_ref(), ctx.workers)?;
            Ok((json!({"value": scalar_json(&z)}), z.to_string()))
        }
        Task::Move => {
            let g = ctx.geometry()?;
            let site = a
                .site
                .as_deref()
                .ok_or_else(|| usage("move needs --site kind:args"))?;
            let kind = site.split_once(':').map_or(site, |(k, _)| k);
            let nums = ctx.site_numbers()?;
            let one = || {
                nums.first()
                    .copied()
                    .ok_or_else(|| usage("missing site index"))
            };
            let moved = match kind {
                "flip" => Geometry::Complex(g.complex().pachner_flip(one()?)?),
                "sub" => Geometry::Complex(g.complex().pachner_subdivide(one()?)?),
                "merge" => Geometry::Complex(g.complex().pachner_merge(one()?)?),
                "02" => Geometry::Polyhedron(handle_move_02(&g.polyhedron()?, &nums)?),
                "20" => Geometry::Polyhedron(handle_move_20(&g.polyhedron()?, &nums)?),
                "23" => Geometry::Polyhedron(handle_move_23(&g.polyhedron()?, &nums)?),
                "32" => Geometry::Polyhedron(handle_move_32(&g.polyhedron()?, &nums)?),
                k => {
                    return Err(usage(format!(
                        "unknown move {k}; use flip, sub, merge, 02, 20, 23 or 32"
                    )))
                }
            };
            let (v, e, f) = moved.complex().counts();
            Ok((
                moved.to_json(),
                format!("{} with V={v} E={e} F={f}", moved.kind()),
            ))
        }
        Task::Selftest => {
            let only = a
                .site
                .as_deref()
                .map(|s| {
                    s.parse()
                        .map_err(|_| usage("selftest site is a criterion number"))
                })
                .transpose()?;
            let reports = selftest::run(only);
            let table = reports
                .iter()
                .map(|r| {
                    format!(
                        "criterion {:>2}: {} {} ({} ms) {}",
                        r.id,
                        if r.passed { "PASS" } else { "FAIL" },
                        r.title,
                        r.millis,
                        r.detail
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok((
                serde_json::to_value(&reports).expect("reports serialize"),
                table,
            ))
        }
    }
}

fn emit(args: &Args, text: &str) -> std::io::Result<()> {
    match &args.out {
        Some(p) => std::fs::write(p, format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let workers = args.workers.unwrap_or_else(wilson::default_workers).max(1);
    let ctx = Ctx { args, workers };
    match run(&ctx) {
        Ok((value, table)) => {
            let failed = ctx.args.task == Some(Task::Selftest)
                && value
                    .as_array()
                    .map_or(false, |a| a.iter().any(|r| r["passed"] == false));
            let text = match ctx.args.format {
                Format::Json => serde_json::to_string_pretty(&value).expect("json"),
                Format::Table => table,
            };
            if let Err(e) = emit(&ctx.args, &text) {
                eprintln!(
                    "{}",
                    json!({"error": {"module": "cli", "kind": "io", "detail": e.to_string()}})
                );
                return ExitCode::from(2);
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e }));
            ExitCode::from(2)
        }
    }
}
