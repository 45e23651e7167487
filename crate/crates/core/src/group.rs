//! Finite groups given by Cayley tables, crossed modules, and the strict 2-group
//! operations on arrows `(h, g)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorKind, Module, Result};

/// A finite group on `0..order` with identity `0`.
///
/// Construction only checks that the table is square and index-closed. Group
/// axioms are reported by [`FiniteGroup::violations`], so a corrupted table can
/// still be loaded and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(structural("order >= 1", "empty multiplication table"));
        }
        let mut mul = Vec::with_capacity(order * order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(structural(
                    "table is total",
                    format!("row {i} has {} entries, expected {order}", row.len()),
                ));
            }
            for (j, &x) in row.iter().enumerate() {
                if x >= order {
                    return Err(structural(
                        "indices in range",
                        format!("mul[{i}][{j}] = {x} is out of range"),
                    ));
                }
                mul.push(x);
            }
        }
        // Best effort: elements without a two-sided inverse map to 0 and show up
        // in `violations`.
        let inv = (0..order)
            .map(|x| {
                (0..order)
                    .find(|&y| mul[x * order + y] == 0 && mul[y * order + x] == 0)
                    .unwrap_or(0)
            })
            .collect();
        Ok(FiniteGroup { order, mul, inv })
    }

    pub fn cyclic(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        Self::from_table(rows).expect("cyclic table is well formed")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Permutation group on `points` given by an explicit element list; the first
    /// element must be the identity. Composition is `(p*q)(x) = p(q(x))`.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Self {
        let find = |p: &Vec<usize>| {
            perms
                .iter()
                .position(|q| q == p)
                .expect("permutation list is closed under composition")
        };
        let rows = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| find(&q.iter().map(|&x| p[x]).collect()))
                    .collect()
            })
            .collect();
        Self::from_table(rows).expect("permutation table is well formed")
    }

    /// S3 with elements ordered `e, (012), (021), (01), (02), (12)`.
    pub fn symmetric3() -> Self {
        Self::from_permutations(&s3_perms())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Product of a word of elements, left to right.
    pub fn product<I: IntoIterator<Item = usize>>(&self, word: I) -> usize {
        word.into_iter().fold(0, |acc, x| self.mul(acc, x))
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Group axiom violations; empty for a genuine group with identity 0.
    pub fn violations(&self, which: &'static str) -> Vec<Violation> {
        let mut out = Vec::new();
        for x in self.elements() {
            if self.mul(0, x) != x || self.mul(x, 0) != x {
                out.push(Violation::new(Axiom::Identity, which, vec![x]));
            }
            let y = self.inv(x);
            if self.mul(x, y) != 0 || self.mul(y, x) != 0 {
                out.push(Violation::new(Axiom::Inverse, which, vec![x]));
            }
        }
        for a in self.elements() {
            for b in self.elements() {
                let ab = self.mul(a, b);
                for c in self.elements() {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        out.push(Violation::new(Axiom::Associativity, which, vec![a, b, c]));
                    }
                }
            }
        }
        out
    }

    /// Pairs `(a, b)` with `ab = ba`.
    pub fn commuting_pairs(&self) -> usize {
        self.elements()
            .map(|a| {
                self.elements()
                    .filter(|&b| self.mul(a, b) == self.mul(b, a))
                    .count()
            })
            .sum()
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for x in self.elements() {
            if seen[x] {
                continue;
            }
            let mut class: Vec<usize> = self.elements().map(|g| self.conj(g, x)).collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                seen[y] = true;
            }
            classes.push(class);
        }
        classes
    }
}

fn s3_perms() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![1, 0, 2],
        vec![2, 1, 0],
        vec![0, 2, 1],
    ]
}

fn structural(pre: &'static str, detail: impl Into<String>) -> Error {
    Error::new(Module::GroupCore, ErrorKind::Structural, pre, detail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Identity,
    Inverse,
    Associativity,
    THomomorphism,
    ActionIdentity,
    ActionComposition,
    ActionAutomorphism,
    Equivariance,
    Peiffer,
}

/// A failed axiom together with the tuple of element indices witnessing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub table: String,
    pub witness: Vec<usize>,
}

impl Violation {
    fn new(axiom: Axiom, table: &str, witness: Vec<usize>) -> Self {
        Violation {
            axiom,
            table: table.to_string(),
            witness,
        }
    }
}

/// An arrow `g -> g·t(h)` of the strict 2-group `H ⋊ G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoGroupElement {
    pub h: usize,
    pub g: usize,
}

impl TwoGroupElement {
    pub fn new(h: usize, g: usize) -> Self {
        TwoGroupElement { h, g }
    }

    pub fn unit(g: usize) -> Self {
        TwoGroupElement { h: 0, g }
    }
}

/// A finite crossed module `t: H -> G` with a left action of `G` on `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossedModule {
    base: FiniteGroup,
    fiber: FiniteGroup,
    t: Vec<usize>,
    act: Vec<usize>,
}

impl CrossedModule {
    /// `act[g][h]` is `g ▷ h`.
    pub fn new(
        base: FiniteGroup,
        fiber: FiniteGroup,
        t: Vec<usize>,
        act: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if t.len() != fiber.order() {
            return Err(structural(
                "t is total",
                format!(
                    "t has {} entries, fiber order is {}",
                    t.len(),
                    fiber.order()
                ),
            ));
        }
        if let Some(h) = t.iter().position(|&x| x >= base.order()) {
            return Err(structural(
                "indices in range",
                format!("t[{h}] out of range"),
            ));
        }
        if act.len() != base.order() {
            return Err(structural(
                "act is total",
                format!("act has {} rows, base order is {}", act.len(), base.order()),
            ));
        }
        let mut flat = Vec::with_capacity(base.order() * fiber.order());
        for (g, row) in act.iter().enumerate() {
            if row.len() != fiber.order() {
                return Err(structural(
                    "act is total",
                    format!("act[{g}] has wrong length"),
                ));
            }
            for (h, &x) in row.iter().enumerate() {
                if x >= fiber.order() {
                    return Err(structural(
                        "indices in range",
                        format!("act[{g}][{h}] = {x} out of range"),
                    ));
                }
                flat.push(x);
            }
        }
        Ok(CrossedModule {
            base,
            fiber,
            t,
            act: flat,
        })
    }

    /// `1 -> G`.
    pub fn trivial_fiber(base: FiniteGroup) -> Self {
        let n = base.order();
        Self::new(base, FiniteGroup::trivial(), vec![0], vec![vec![0]; n])
            .expect("trivial fiber is well formed")
    }

    pub fn base(&self) -> &FiniteGroup {
        &self.base
    }

    pub fn fiber(&self) -> &FiniteGroup {
        &self.fiber
    }

    #[inline]
    pub fn t(&self, h: usize) -> usize {
        self.t[h]
    }

    #[inline]
    pub fn act(&self, g: usize, h: usize) -> usize {
        self.act[g * self.fiber.order() + h]
    }

    pub fn t_table(&self) -> &[usize] {
        &self.t
    }

    pub fn act_table(&self) -> Vec<Vec<usize>> {
        self.act
            .chunks(self.fiber.order())
            .map(|r| r.to_vec())
            .collect()
    }

    /// All axiom violations, group axioms of both tables included.
    pub fn validate(&self) -> Vec<Violation> {
        let g = &self.base;
        let h = &self.fiber;
        let mut out = g.violations("base");
        out.extend(h.violations("fiber"));
        for a in h.elements() {
            for b in h.elements() {
                if self.t(h.mul(a, b)) != g.mul(self.t(a), self.t(b)) {
                    out.push(Violation::new(Axiom::THomomorphism, "t", vec![a, b]));
                }
            }
        }
        for x in h.elements() {
            if self.act(0, x) != x {
                out.push(Violation::new(Axiom::ActionIdentity, "act", vec![0, x]));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                let ab = g.mul(a, b);
                for x in h.elements() {
                    if self.act(ab, x) != self.act(a, self.act(b, x)) {
                        out.push(Violation::new(
                            Axiom::ActionComposition,
                            "act",
                            vec![a, b, x],
                        ));
                    }
                }
            }
            for x in h.elements() {
                for y in h.elements() {
                    if self.act(a, h.mul(x, y)) != h.mul(self.act(a, x), self.act(a, y)) {
                        out.push(Violation::new(
                            Axiom::ActionAutomorphism,
                            "act",
                            vec![a, x, y],
                        ));
                    }
                }
            }
        }
        for a in g.elements() {
            for x in h.elements() {
                if self.t(self.act(a, x)) != g.conj(a, self.t(x)) {
                    out.push(Violation::new(Axiom::Equivariance, "act", vec![a, x]));
                }
            }
        }
        for x in h.elements() {
            for y in h.elements() {
                if self.act(self.t(x), y) != h.conj(x, y) {
                    out.push(Violation::new(Axiom::Peiffer, "act", vec![x, y]));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn in_image(&self, g: usize) -> bool {
        self.t.contains(&g)
    }

    pub fn image(&self) -> Vec<usize> {
        let mut im: Vec<usize> = self.t.clone();
        im.sort_unstable();
        im.dedup();
        im
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.fiber.elements().filter(|&x| self.t(x) == 0).collect()
    }

    pub fn image_order(&self) -> usize {
        self.image().len()
    }

    pub fn kernel_order(&self) -> usize {
        self.kernel().len()
    }

    /// `|G / im t|`.
    pub fn coker_order(&self) -> usize {
        self.base.order() / self.image_order()
    }

    pub fn is_image_normal(&self) -> bool {
        let im = self.image();
        self.base
            .elements()
            .all(|a| im.iter().all(|&x| im.contains(&self.base.conj(a, x))))
    }

    /// The quotient `K = G / im t`: the quotient group and the coset index of each element.
    pub fn quotient(&self) -> Quotient {
        let g = &self.base;
        let im = self.image();
        let mut coset = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for x in g.elements() {
            if coset[x] != usize::MAX {
                continue;
            }
            let k = reps.len();
            reps.push(x);
            for &y in &im {
                coset[g.mul(x, y)] = k;
            }
        }
        let rows = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| coset[g.mul(a, b)]).collect())
            .collect();
        let group = FiniteGroup::from_table(rows).expect("quotient table is well formed");
        Quotient { group, coset, reps }
    }

    /// Semidirect product on arrows: `(h,g)·(h',g') = ((g'⁻¹▷h)·h', g g')`.
    ///
    /// Source and target are both multiplicative with this convention.
    pub fn horizontal_mult(&self, x: TwoGroupElement, y: TwoGroupElement) -> TwoGroupElement {
        let h = self.fiber.mul(self.act(self.base.inv(y.g), x.h), y.h);
        TwoGroupElement::new(h, self.base.mul(x.g, y.g))
    }

    /// `(h,g) ∘ (h', g·t(h)) = (h·h', g)`.
    pub fn vertical_compose(
        &self,
        x: TwoGroupElement,
        y: TwoGroupElement,
    ) -> Result<TwoGroupElement> {
        if y.g != self.target(x) {
            return Err(Error::new(
                Module::GroupCore,
                ErrorKind::Composability,
                "source(y) = target(x)",
                format!("target(x) = {}, source(y) = {}", self.target(x), y.g),
            ));
        }
        Ok(TwoGroupElement::new(self.fiber.mul(x.h, y.h), x.g))
    }

    pub fn source(&self, x: TwoGroupElement) -> usize {
        x.g
    }

    pub fn target(&self, x: TwoGroupElement) -> usize {
        self.base.mul(x.g, self.t(x.h))
    }

    pub fn whisker(&self, a: usize, x: TwoGroupElement) -> TwoGroupElement {
        TwoGroupElement::new(self.act(a, x.h), self.base.conj(a, x.g))
    }

    pub fn arrows(&self) -> impl Iterator<Item = TwoGroupElement> + '_ {
        self.base.elements().flat_map(move |g| {
            self.fiber
                .elements()
                .map(move |h| TwoGroupElement::new(h, g))
        })
    }

    /// The interchange law `(x∘y)·(x'∘y') = (x·x')∘(y·y')`, checked on every
    /// composable quadruple.
    pub fn check_interchange(&self) -> bool {
        let arrows: Vec<_> = self.arrows().collect();
        for &x in &arrows {
            for yh in self.fiber.elements() {
                let y = TwoGroupElement::new(yh, self.target(x));
                let xy = self
                    .vertical_compose(x, y)
                    .expect("composable by construction");
                for &x2 in &arrows {
                    for yh2 in self.fiber.elements() {
                        let y2 = TwoGroupElement::new(yh2, self.target(x2));
                        let lhs = self.horizontal_mult(
                            xy,
                            self.vertical_compose(x2, y2).expect("composable"),
                        );
                        let rhs = self.vertical_compose(
                            self.horizontal_mult(x, x2),
                            self.horizontal_mult(y, y2),
                        );
                        match rhs {
                            Ok(r) if r == lhs => {}
                            _ => return false,
                        }
                    }
                }
            }
        }
        true
    }
}

/// `G / im t` with the projection.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// Coset index of each element of `G`.
    pub coset: Vec<usize>,
    /// A representative of each coset.
    pub reps: Vec<usize>,
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "cm_02", "cm_id2", "cm_s3", "cm_triv", "cm_z2_z4", "s3", "z2",
];

/// `1 -> 1`.
pub fn cm_triv() -> CrossedModule {
    CrossedModule::trivial_fiber(FiniteGroup::trivial())
}

/// `Z2 --id--> Z2`, trivial action.
pub fn cm_id2() -> CrossedModule {
    CrossedModule::new(
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(2),
        vec![0, 1],
        vec![vec![0, 1]; 2],
    )
    .expect("well formed")
}

/// `Z2 --0--> Z2`, trivial action.
pub fn cm_02() -> CrossedModule {
    CrossedModule::new(
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(2),
        vec![0, 0],
        vec![vec![0, 1]; 2],
    )
    .expect("well formed")
}

/// `Z2 -> Z4`, `h ↦ 2h`, trivial action.
pub fn cm_z2_z4() -> CrossedModule {
    CrossedModule::new(
        FiniteGroup::cyclic(4),
        FiniteGroup::cyclic(2),
        vec![0, 2],
        vec![vec![0, 1]; 4],
    )
    .expect("well formed")
}

/// `A3 -> S3`, inclusion, conjugation action.
pub fn cm_s3() -> CrossedModule {
    let g = FiniteGroup::symmetric3();
    let h = FiniteGroup::cyclic(3);
    // A3 = {e, (012), (021)} sits at indices 0, 1, 2 of S3.
    let t = vec![0, 1, 2];
    let act = g
        .elements()
        .map(|a| {
            (0..3)
                .map(|x| {
                    let c = g.conj(a, t[x]);
                    t.iter().position(|&y| y == c).expect("A3 is normal")
                })
                .collect()
        })
        .collect();
    CrossedModule::new(g, h, t, act).expect("well formed")
}

pub fn builtin(name: &str) -> Option<CrossedModule> {
    Some(match name {
        "cm_triv" => cm_triv(),
        "cm_id2" => cm_id2(),
        "cm_02" => cm_02(),
        "cm_z2_z4" => cm_z2_z4(),
        "cm_s3" => cm_s3(),
        "s3" => CrossedModule::trivial_fiber(FiniteGroup::symmetric3()),
        "z2" => CrossedModule::trivial_fiber(FiniteGroup::cyclic(2)),
        _ => return None,
    })
}

/// The five sample crossed modules used throughout the tests.
pub fn samples() -> Vec<(&'static str, CrossedModule)> {
    vec![
        ("cm_triv", cm_triv()),
        ("cm_id2", cm_id2()),
        ("cm_02", cm_02()),
        ("cm_z2_z4", cm_z2_z4()),
        ("cm_s3", cm_s3()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_validate() {
        for (name, cm) in samples() {
            assert!(cm.validate().is_empty(), "{name}");
            assert!(cm.is_image_normal(), "{name}");
            assert!(cm.check_interchange(), "{name}");
        }
    }

    #[test]
    fn cm_02_product() {
        let cm = cm_02();
        let p = cm.horizontal_mult(TwoGroupElement::new(1, 0), TwoGroupElement::new(1, 1));
        assert_eq!(p, TwoGroupElement::new(0, 1));
    }

    #[test]
    fn cm_id2_vertical() {
        let cm = cm_id2();
        let r = cm
            .vertical_compose(TwoGroupElement::new(1, 0), TwoGroupElement::new(1, 1))
            .unwrap();
        assert_eq!(r, TwoGroupElement::new(0, 0));
        assert!(cm
            .vertical_compose(TwoGroupElement::new(1, 0), TwoGroupElement::new(0, 0))
            .is_err());
    }

    #[test]
    fn quotient_orders() {
        assert_eq!(cm_s3().quotient().group.order(), 2);
        assert_eq!(cm_02().quotient().group.order(), 2);
        assert_eq!(cm_id2().quotient().group.order(), 1);
        assert_eq!(cm_z2_z4().quotient().group.order(), 2);
    }

    #[test]
    fn s3_classes() {
        let s3 = FiniteGroup::symmetric3();
        assert!(s3.violations("s3").is_empty());
        assert_eq!(s3.conjugacy_classes().len(), 3);
        assert_eq!(s3.commuting_pairs(), 18);
    }
}
