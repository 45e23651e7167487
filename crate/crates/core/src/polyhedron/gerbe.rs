//! Phase 2-cochains on triple-point configurations, their coboundaries, and
//! the cup/dot interchange solver.
//!
//! Phases are rotation numbers in `[0, 1)`; the phase itself is `e^{2πi r}`, so
//! products of phases are sums of rotation numbers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ErrorKind, Module, Result};

fn err(kind: ErrorKind, pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::Polyhedron, kind, pre, detail)
}

/// Reduce into `[0, 1)`.
pub fn rot(p: i64, q: i64) -> Rational64 {
    norm(Rational64::new(p, q))
}

pub fn norm(r: Rational64) -> Rational64 {
    r - r.floor()
}

/// Simplices of a Čech nerve: vertices `0..n`, sorted triples and quadruples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CechNerve {
    pub n: usize,
    pub triples: Vec<[usize; 3]>,
    pub quadruples: Vec<[usize; 4]>,
}

impl CechNerve {
    /// All simplices of the full simplex on `n` vertices, up to dimension 3.
    pub fn simplex(n: usize) -> Self {
        let mut triples = Vec::new();
        let mut quadruples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    triples.push([i, j, k]);
                    for l in k + 1..n {
                        quadruples.push([i, j, k, l]);
                    }
                }
            }
        }
        CechNerve {
            n,
            triples,
            quadruples,
        }
    }

    /// The boundary of a tetrahedron: four triples, no quadruple.
    pub fn tetrahedron_boundary() -> Self {
        let mut s = Self::simplex(4);
        s.quadruples.clear();
        s
    }

    /// Nerve spanned by the given triples; quadruples are the 4-sets all of
    /// whose 3-subsets are present.
    pub fn from_triples(n: usize, triples: impl IntoIterator<Item = [usize; 3]>) -> Self {
        let set: BTreeSet<[usize; 3]> = triples
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        let mut quadruples = Vec::new();
        let verts: BTreeSet<usize> = set.iter().flatten().copied().collect();
        let vs: Vec<usize> = verts.into_iter().collect();
        for &t in &set {
            for &l in vs.iter().filter(|&&l| l > t[2]) {
                let q = [t[0], t[1], t[2], l];
                if faces_of(q).iter().all(|f| set.contains(f)) {
                    quadruples.push(q);
                }
            }
        }
        CechNerve {
            n,
            triples: set.into_iter().collect(),
            quadruples,
        }
    }

    /// Edges of the nerve: pairs that occur in some triple.
    pub fn pairs(&self) -> Vec<[usize; 2]> {
        let set: BTreeSet<[usize; 2]> = self
            .triples
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]])
            .collect();
        set.into_iter().collect()
    }
}

/// The four faces of a quadruple with their coboundary signs.
fn faces_of(q: [usize; 4]) -> [[usize; 3]; 4] {
    [
        [q[1], q[2], q[3]],
        [q[0], q[2], q[3]],
        [q[0], q[1], q[3]],
        [q[0], q[1], q[2]],
    ]
}

/// A decoration configuration label: one entry per stacked factor.
pub type Config = Vec<usize>;

/// Rotation numbers per (configuration, triple).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GerbeDatum {
    pub phases: BTreeMap<(Config, [usize; 3]), Rational64>,
}

/// Rotation numbers per (configuration, pair).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cochain1 {
    pub values: BTreeMap<(Config, [usize; 2]), Rational64>,
}

fn key_string(c: &Config, s: &[usize]) -> String {
    let cs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    let ss: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{}:{}", cs.join("."), ss.join(","))
}

fn parse_key<const N: usize>(k: &str) -> Option<(Config, [usize; N])> {
    let (c, s) = k.split_once(':')?;
    let config = c
        .split('.')
        .map(|x| x.trim().parse().ok())
        .collect::<Option<Vec<usize>>>()?;
    let v = s
        .split(',')
        .map(|x| x.trim().parse().ok())
        .collect::<Option<Vec<usize>>>()?;
    let mut arr: [usize; N] = v.try_into().ok()?;
    arr.sort_unstable();
    Some((config, arr))
}

impl Serialize for GerbeDatum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, [i64; 2]> = self
            .phases
            .iter()
            .map(|((c, t), r)| (key_string(c, t), [*r.numer(), *r.denom()]))
            .collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GerbeDatum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m: BTreeMap<String, [i64; 2]> = BTreeMap::deserialize(d)?;
        let mut phases = BTreeMap::new();
        for (k, [p, q]) in m {
            let key = parse_key::<3>(&k)
                .ok_or_else(|| D::Error::custom(format!("bad gerbe key {k:?}")))?;
            if q == 0 {
                return Err(D::Error::custom(format!("zero denominator at {k:?}")));
            }
            phases.insert(key, rot(p, q));
        }
        Ok(GerbeDatum { phases })
    }
}

impl Serialize for Cochain1 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, [i64; 2]> = self
            .values
            .iter()
            .map(|((c, t), r)| (key_string(c, t), [*r.numer(), *r.denom()]))
            .collect();
        m.serialize(s)
    }
}

impl GerbeDatum {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Constant zero phase on every triple for each configuration.
    pub fn zero_on(nerve: &CechNerve, configs: &[Config]) -> Self {
        let mut phases = BTreeMap::new();
        for c in configs {
            for &t in &nerve.triples {
                phases.insert((c.clone(), t), Rational64::zero());
            }
        }
        GerbeDatum { phases }
    }

    pub fn set(&mut self, config: Config, mut triple: [usize; 3], r: Rational64) {
        triple.sort_unstable();
        self.phases.insert((config, triple), norm(r));
    }

    /// Phase of a triple; absent entries are trivial.
    pub fn phase(&self, config: &[usize], mut triple: [usize; 3]) -> Rational64 {
        triple.sort_unstable();
        self.phases
            .get(&(config.to_vec(), triple))
            .copied()
            .unwrap_or_else(Rational64::zero)
    }

    pub fn configs(&self) -> BTreeSet<Config> {
        self.phases.keys().map(|(c, _)| c.clone()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.phases.values().all(Zero::is_zero)
    }

    /// Denominator of all phases, for choosing a cyclotomic field.
    pub fn level(&self) -> i64 {
        self.phases
            .values()
            .fold(1, |acc, r| num_integer::lcm(acc, *r.denom()))
    }
}

/// `(δγ)_{ijk} = γ_{jk} − γ_{ik} + γ_{ij}` on every triple of the nerve.
pub fn coboundary1(gamma: &Cochain1, nerve: &CechNerve) -> GerbeDatum {
    let configs: BTreeSet<Config> = gamma.values.keys().map(|(c, _)| c.clone()).collect();
    let get = |c: &Config, p: [usize; 2]| {
        gamma
            .values
            .get(&(c.clone(), p))
            .copied()
            .unwrap_or_else(Rational64::zero)
    };
    let mut out = GerbeDatum::default();
    for c in &configs {
        for &[i, j, k] in &nerve.triples {
            let v = get(c, [j, k]) - get(c, [i, k]) + get(c, [i, j]);
            out.phases.insert((c.clone(), [i, j, k]), norm(v));
        }
    }
    out
}

/// `(δσ)_{ijkl} = σ_{jkl} − σ_{ikl} + σ_{ijl} − σ_{ijk}` per configuration and
/// quadruple.
pub fn coboundary2(
    sigma: &GerbeDatum,
    nerve: &CechNerve,
) -> Result<BTreeMap<(Config, [usize; 4]), Rational64>> {
    let mut out = BTreeMap::new();
    for c in sigma.configs() {
        for &q in &nerve.quadruples {
            let mut v = Rational64::zero();
            for (i, f) in faces_of(q).iter().enumerate() {
                let x = sigma.phases.get(&(c.clone(), *f)).ok_or_else(|| {
                    err(
                        ErrorKind::IncompleteDatum,
                        "σ is defined on every triple of each quadruple",
                        format!("missing {}", key_string(&c, f)),
                    )
                })?;
                if i % 2 == 0 {
                    v += x;
                } else {
                    v -= x;
                }
            }
            out.insert((c.clone(), q), norm(v));
        }
    }
    Ok(out)
}

/// Whether `δσ = 1` on every quadruple.
pub fn check_pentagon(sigma: &GerbeDatum, nerve: &CechNerve) -> Result<bool> {
    Ok(coboundary2(sigma, nerve)?.values().all(Zero::is_zero))
}

fn pair_product(a: &GerbeDatum, b: &GerbeDatum) -> Result<GerbeDatum> {
    let ta: BTreeSet<[usize; 3]> = a.phases.keys().map(|(_, t)| *t).collect();
    let tb: BTreeSet<[usize; 3]> = b.phases.keys().map(|(_, t)| *t).collect();
    if ta != tb {
        return Err(err(
            ErrorKind::IncompatibleConfiguration,
            "both data live on the same triples",
            "triple sets differ",
        ));
    }
    let mut out = GerbeDatum::default();
    for ((c, t), x) in &a.phases {
        for ((c2, t2), y) in &b.phases {
            if t == t2 {
                let mut cc = c.clone();
                cc.extend(c2);
                out.phases.insert((cc, *t), norm(x + y));
            }
        }
    }
    Ok(out)
}

/// Phase of the stacked configuration read through the cup structure.
pub fn gerbe_cup(a: &GerbeDatum, b: &GerbeDatum) -> Result<GerbeDatum> {
    pair_product(a, b)
}

/// Phase of the stacked configuration read through the dot structure; equal to
/// the cup reading on the nose for strict data.
pub fn gerbe_dot(a: &GerbeDatum, b: &GerbeDatum) -> Result<GerbeDatum> {
    pair_product(a, b)
}

/// A 1-cochain `γ` with `cup = δγ · dot`, if one exists.
pub fn solve_interchange(
    cup: &GerbeDatum,
    dot: &GerbeDatum,
    nerve: &CechNerve,
) -> Result<Option<Cochain1>> {
    if cup.configs() != dot.configs() {
        return Err(err(
            ErrorKind::IncompatibleConfiguration,
            "cup and dot share configurations",
            "configuration sets differ",
        ));
    }
    let pairs = nerve.pairs();
    let pidx: BTreeMap<[usize; 2], usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let m = nerve.triples.len();
    let n = pairs.len();
    let mut d = vec![vec![0i128; n]; m];
    for (r, &[i, j, k]) in nerve.triples.iter().enumerate() {
        d[r][pidx[&[j, k]]] += 1;
        d[r][pidx[&[i, k]]] -= 1;
        d[r][pidx[&[i, j]]] += 1;
    }
    let snf = Smith::new(d);
    let mut gamma = Cochain1::default();
    for c in cup.configs() {
        let b: Vec<BigRational> = nerve
            .triples
            .iter()
            .map(|t| {
                let x = cup.phase(&c, *t) - dot.phase(&c, *t);
                BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
            })
            .collect();
        let Some(x) = snf.solve_mod_one(&b) else {
            return Ok(None);
        };
        for (i, p) in pairs.iter().enumerate() {
            let r = mod_one_big(&x[i]);
            let v = Rational64::new(
                r.numer().to_i64().expect("small"),
                r.denom().to_i64().expect("small"),
            );
            gamma.values.insert((c.clone(), *p), v);
        }
    }
    Ok(Some(gamma))
}

/// `check_gerbe_interchange(σ, σ')`: compare the cup and dot readings.
pub fn check_gerbe_interchange(
    a: &GerbeDatum,
    b: &GerbeDatum,
    nerve: &CechNerve,
) -> Result<Option<Cochain1>> {
    solve_interchange(&gerbe_cup(a, b)?, &gerbe_dot(a, b)?, nerve)
}

fn mod_one_big(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// Smith normal form `U·D·V = S` over the integers.
struct Smith {
    u: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    diag: Vec<i128>,
    rows: usize,
    cols: usize,
}

impl Smith {
    fn new(mut a: Vec<Vec<i128>>) -> Self {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut u: Vec<Vec<i128>> = (0..rows)
            .map(|i| (0..rows).map(|j| i128::from(i == j)).collect())
            .collect();
        let mut v: Vec<Vec<i128>> = (0..cols)
            .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
            .collect();
        let mut diag = Vec::new();
        let mut t = 0;
        while t < rows.min(cols) {
            // pivot: smallest nonzero magnitude in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0 && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            loop {
                let mut dirty = false;
                for i in t + 1..rows {
                    let q = a[i][t].div_euclid(a[t][t]);
                    if q != 0 {
                        for j in 0..cols {
                            a[i][j] -= q * a[t][j];
                        }
                        for j in 0..rows {
                            u[i][j] -= q * u[t][j];
                        }
                    }
                    if a[i][t] != 0 {
                        dirty = true;
                    }
                }
                for j in t + 1..cols {
                    let q = a[t][j].div_euclid(a[t][t]);
                    if q != 0 {
                        for i in 0..rows {
                            a[i][j] -= q * a[i][t];
                        }
                        for i in 0..cols {
                            v[i][j] -= q * v[i][t];
                        }
                    }
                    if a[t][j] != 0 {
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
                // move the smallest remainder into the pivot and repeat
                let mut best = (t, t);
                for i in t..rows {
                    if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                    u.swap(t, best.0);
                } else if best.1 != t {
                    for row in a.iter_mut() {
                        row.swap(t, best.1);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
            }
            diag.push(a[t][t]);
            t += 1;
        }
        Smith {
            u,
            v,
            diag,
            rows,
            cols,
        }
    }

    /// Solve `D x ≡ b (mod 1)` with rational `x`.
    fn solve_mod_one(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        let ub: Vec<BigRational> = (0..self.rows)
            .map(|i| {
                (0..self.rows).fold(BigRational::zero(), |acc, j| {
                    acc + BigRational::from_integer(BigInt::from(self.u[i][j])) * &b[j]
                })
            })
            .collect();
        let mut y = vec![BigRational::zero(); self.cols];
        for i in 0..self.rows {
            if i < self.diag.len() {
                y[i] = &ub[i] / BigRational::from_integer(BigInt::from(self.diag[i]));
            } else if !mod_one_big(&ub[i]).is_zero() {
                return None;
            }
        }
        Some(
            (0..self.cols)
                .map(|i| {
                    (0..self.cols).fold(BigRational::zero(), |acc, j| {
                        acc + BigRational::from_integer(BigInt::from(self.v[i][j])) * &y[j]
                    })
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_on(nerve: &CechNerve, vals: &[(i64, i64)]) -> Cochain1 {
        let mut g = Cochain1::default();
        for (p, &(a, b)) in nerve.pairs().iter().zip(vals.iter().cycle()) {
            g.values.insert((vec![0], *p), rot(a, b));
        }
        g
    }

    #[test]
    fn coboundaries_pass_pentagon() {
        let nerve = CechNerve::simplex(5);
        let g = gamma_on(&nerve, &[(1, 3), (1, 2), (0, 1), (5, 6), (1, 4)]);
        let s = coboundary1(&g, &nerve);
        assert!(check_pentagon(&s, &nerve).unwrap());
        let mut bad = s.clone();
        let k = bad.phases.keys().next().unwrap().clone();
        let v = bad.phases[&k];
        bad.phases.insert(k, norm(v + rot(1, 2)));
        assert!(!check_pentagon(&bad, &nerve).unwrap());
    }

    #[test]
    fn missing_entry_is_reported() {
        let nerve = CechNerve::simplex(4);
        let mut s = GerbeDatum::zero_on(&nerve, &[vec![0]]);
        s.phases.remove(&(vec![0], [0, 1, 2]));
        let e = check_pentagon(&s, &nerve).unwrap_err();
        assert_eq!(e.kind, ErrorKind::IncompleteDatum);
    }

    #[test]
    fn interchange_recovers_planted_gamma() {
        let nerve = CechNerve::simplex(4);
        let g = gamma_on(&nerve, &[(1, 3), (1, 4), (1, 6)]);
        let dg = coboundary1(&g, &nerve);
        let dot = GerbeDatum::zero_on(&nerve, &[vec![0]]);
        let found = solve_interchange(&dg, &dot, &nerve)
            .unwrap()
            .expect("solvable");
        assert_eq!(coboundary1(&found, &nerve), dg);
    }

    #[test]
    fn obstruction_on_sphere_nerve() {
        let nerve = CechNerve::tetrahedron_boundary();
        let dot = GerbeDatum::zero_on(&nerve, &[vec![0]]);
        let mut cup = dot.clone();
        cup.set(vec![0], [0, 1, 2], rot(1, 2));
        assert!(solve_interchange(&cup, &dot, &nerve).unwrap().is_none());
    }
}
