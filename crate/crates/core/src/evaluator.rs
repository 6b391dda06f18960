//! Labeled triangulations of a triangle, reduced to a single cell by
//! `m`-moves (collapse a trivalent star) and `m̄`-moves (flip an edge).
//!
//! A cell is a counterclockwise vertex triple `(v0, v1, v2)`; its sides 1, 2, 3
//! are `v0→v1`, `v1→v2`, `v2→v0`. The labeled cells `(v0,v1,v2; a)` and
//! `(v1,v2,v0; P a)` are identified, so moving the marked corner one step
//! counterclockwise applies `P` to the label.
//!
//! The outer triangle has corners `0, 1, 2` in counterclockwise order.
//!
//! `m`-move: the star of an interior vertex `O` with cells `(A,B,O)`,
//! `(O,B,C)`, `(A,O,C)` labeled `a, b, c` becomes `(A,B,C)` labeled
//! `m(a⊗b⊗c)`. `(A,B,O)` is the star cell with the smallest index, and the
//! result takes its slot.
//!
//! `m̄`-move: cells `(V1,V2,V3)` and `(V3,V2,V4)` labeled `x, y` sharing
//! `V2V3` become `Σ (V1,V2,V4; a₁) (V3,V1,V4; a₂)` where
//! `m̄(x⊗y) = Σ a₁⊗a₂`. The cell with the smaller index plays `x`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{apply_ops, Op, Scalar, Structure};

/// Default number of moves before `evaluate` gives up.
pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("not a disc triangulation: {0}")]
    Invalid(String),
    #[error("no cell {0}")]
    BadCell(usize),
    #[error("vertex {0} is not an interior vertex with three cells")]
    NotTrivalent(usize),
    #[error("edge {0}-{1} cannot be flipped")]
    NotFlippable(usize, usize),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("label {label} out of range for dimension {dim}")]
    LabelRange { label: usize, dim: usize },
    #[error("no reduction within {0} moves")]
    Budget(usize),
    #[error("no applicable move")]
    Stuck,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Invalid(msg.into()))
}

/// Rotations needed to bring the vertex at index `from` to index `to`.
fn rotations(from: usize, to: usize) -> u8 {
    ((from + 3 - to) % 3) as u8
}

fn rotate(cell: [usize; 3], r: u8) -> [usize; 3] {
    let r = r as usize;
    [cell[r % 3], cell[(r + 1) % 3], cell[(r + 2) % 3]]
}

/// The cell complex of a disc triangulation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triangulation {
    vertices: usize,
    cells: Vec<[usize; 3]>,
}

impl Triangulation {
    pub fn trivial() -> Self {
        Self {
            vertices: 3,
            cells: vec![[0, 1, 2]],
        }
    }

    /// Vertex ids are `0..vertices`; ids not used by any cell are allowed.
    pub fn new(vertices: usize, cells: Vec<[usize; 3]>) -> Result<Self, EvalError> {
        let t = Self { vertices, cells };
        t.validate()?;
        Ok(t)
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    fn directed_edges(&self) -> HashMap<(usize, usize), (usize, usize)> {
        let mut out = HashMap::new();
        for (c, cell) in self.cells.iter().enumerate() {
            for s in 0..3 {
                out.insert((cell[s], cell[(s + 1) % 3]), (c, s));
            }
        }
        out
    }

    fn validate(&self) -> Result<(), EvalError> {
        if self.cells.is_empty() {
            return invalid("no cells");
        }
        let mut seen = HashMap::new();
        let mut used = BTreeSet::new();
        for (c, cell) in self.cells.iter().enumerate() {
            if cell.iter().any(|&v| v >= self.vertices) {
                return invalid(format!("cell {c} has a vertex out of range"));
            }
            if cell[0] == cell[1] || cell[1] == cell[2] || cell[0] == cell[2] {
                return invalid(format!("cell {c} repeats a vertex"));
            }
            used.extend(cell.iter().copied());
            for s in 0..3 {
                let e = (cell[s], cell[(s + 1) % 3]);
                if seen.insert(e, c).is_some() {
                    return invalid(format!("directed edge {}-{} used twice", e.0, e.1));
                }
            }
        }
        let mut boundary: Vec<(usize, usize)> = seen
            .keys()
            .filter(|(u, v)| !seen.contains_key(&(*v, *u)))
            .copied()
            .collect();
        boundary.sort_unstable();
        if boundary != [(0, 1), (1, 2), (2, 0)] {
            return invalid(format!("boundary is {boundary:?}, expected the corners 0,1,2 counterclockwise"));
        }
        let edges = seen.len() - (seen.len() - 3) / 2;
        let euler = used.len() as i64 - edges as i64 + self.cells.len() as i64;
        if euler != 1 {
            return invalid(format!("Euler characteristic {euler}"));
        }
        for &v in &used {
            self.check_link(v)?;
        }
        Ok(())
    }

    /// The cells around `v` must form one fan.
    fn check_link(&self, v: usize) -> Result<(), EvalError> {
        let mut next = HashMap::new();
        for cell in &self.cells {
            if let Some(i) = cell.iter().position(|&x| x == v) {
                next.insert(cell[(i + 1) % 3], cell[(i + 2) % 3]);
            }
        }
        let targets: BTreeSet<usize> = next.values().copied().collect();
        let start = next
            .keys()
            .copied()
            .find(|k| !targets.contains(k))
            .unwrap_or_else(|| *next.keys().min().expect("vertex is used"));
        let mut cur = start;
        let mut steps = 0;
        while let Some(&n) = next.get(&cur) {
            steps += 1;
            cur = n;
            if cur == start || steps > next.len() {
                break;
            }
        }
        if steps != next.len() {
            return invalid(format!("vertex {v} is not a manifold point"));
        }
        Ok(())
    }

    fn is_corner(v: usize) -> bool {
        v < 3
    }

    /// Cells containing `v`, in increasing index order.
    pub fn star(&self, v: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&c| self.cells[c].contains(&v)).collect()
    }

    /// Interior vertices in increasing order.
    pub fn interior_vertices(&self) -> Vec<usize> {
        let used: BTreeSet<usize> = self.cells.iter().flatten().copied().collect();
        used.into_iter().filter(|&v| !Self::is_corner(v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.star(v).len()
    }

    /// Pairs of glued sides `((cell, side), (cell, side))`, sides 0-based.
    pub fn gluing(&self) -> Vec<[(usize, usize); 2]> {
        let edges = self.directed_edges();
        let mut out: Vec<_> = edges
            .iter()
            .filter(|((u, v), _)| u < v)
            .filter_map(|((u, v), a)| edges.get(&(*v, *u)).map(|b| [*a.min(b), *a.max(b)]))
            .collect();
        out.sort_unstable();
        out
    }

    /// The sides on `0→1`, `1→2`, `2→0`.
    pub fn boundary(&self) -> [(usize, usize); 3] {
        let edges = self.directed_edges();
        [edges[&(0, 1)], edges[&(1, 2)], edges[&(2, 0)]]
    }

    /// Splits `cell = (A,B,C)` at a new vertex `O` into `(A,B,O)` (in place),
    /// `(O,B,C)` and `(A,O,C)` (appended in that order). Returns `O`.
    pub fn subdivide(&mut self, cell: usize) -> Result<usize, EvalError> {
        let [a, b, c] = *self.cells.get(cell).ok_or(EvalError::BadCell(cell))?;
        let o = self.vertices;
        self.vertices += 1;
        self.cells[cell] = [a, b, o];
        self.cells.push([o, b, c]);
        self.cells.push([a, o, c]);
        Ok(o)
    }

    fn plan_m(&self, o: usize) -> Result<MMove, EvalError> {
        let star = self.star(o);
        if Self::is_corner(o) || star.len() != 3 {
            return Err(EvalError::NotTrivalent(o));
        }
        let pos = |c: usize| self.cells[c].iter().position(|&x| x == o).expect("in star");
        let t1 = star[0];
        let r1 = rotations(pos(t1), 2);
        let [a, b, _] = rotate(self.cells[t1], r1);
        let t2 = *star[1..]
            .iter()
            .find(|&&c| self.cells[c].contains(&b))
            .ok_or(EvalError::NotTrivalent(o))?;
        let t3 = if star[1] == t2 { star[2] } else { star[1] };
        let r2 = rotations(pos(t2), 0);
        let r3 = rotations(pos(t3), 1);
        let c2 = rotate(self.cells[t2], r2);
        let c3 = rotate(self.cells[t3], r3);
        if c2[1] != b || c3[0] != a || c3[2] != c2[2] {
            return Err(EvalError::NotTrivalent(o));
        }
        Ok(MMove {
            cells: [t1, t2, t3],
            rot: [r1, r2, r3],
            result: [a, b, c2[2]],
        })
    }

    fn apply_m_plan(&mut self, plan: &MMove) {
        self.cells[plan.cells[0]] = plan.result;
        let mut gone = [plan.cells[1], plan.cells[2]];
        gone.sort_unstable();
        self.cells.remove(gone[1]);
        self.cells.remove(gone[0]);
    }

    fn plan_flip(&self, u: usize, v: usize) -> Result<Flip, EvalError> {
        let edges = self.directed_edges();
        let (Some(&(c1, s1)), Some(&(c2, s2))) = (edges.get(&(u, v)), edges.get(&(v, u))) else {
            return Err(EvalError::NotFlippable(u, v));
        };
        let ((x, sx), (y, sy)) = if c1 < c2 { ((c1, s1), (c2, s2)) } else { ((c2, s2), (c1, s1)) };
        let rx = rotations(sx, 1);
        let ry = rotations(sy, 0);
        let [v1, v2, v3] = rotate(self.cells[x], rx);
        let [w3, w2, v4] = rotate(self.cells[y], ry);
        debug_assert_eq!((w3, w2), (v3, v2));
        if v1 == v4 || edges.contains_key(&(v1, v4)) || edges.contains_key(&(v4, v1)) {
            return Err(EvalError::NotFlippable(u, v));
        }
        Ok(Flip {
            cells: [x, y],
            rot: [rx, ry],
            result: [[v1, v2, v4], [v3, v1, v4]],
        })
    }

    fn apply_flip_plan(&mut self, plan: &Flip) {
        self.cells[plan.cells[0]] = plan.result[0];
        self.cells[plan.cells[1]] = plan.result[1];
    }

    /// Undirected interior edges `(u, v)` with `u < v`.
    pub fn interior_edges(&self) -> Vec<(usize, usize)> {
        let edges = self.directed_edges();
        let mut out: Vec<_> = edges
            .keys()
            .filter(|(u, v)| u < v && edges.contains_key(&(*v, *u)))
            .copied()
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_flippable(&self, u: usize, v: usize) -> bool {
        self.plan_flip(u, v).is_ok()
    }

    /// Flips an interior edge, combinatorially only.
    pub fn flip(&mut self, u: usize, v: usize) -> Result<(), EvalError> {
        let plan = self.plan_flip(u, v)?;
        self.apply_flip_plan(&plan);
        Ok(())
    }

    /// Starting from the trivial triangulation: `subdivisions` random
    /// subdivisions, then `flips` random flips.
    pub fn random<R: Rng>(subdivisions: usize, flips: usize, rng: &mut R) -> Self {
        let mut t = Self::trivial();
        for _ in 0..subdivisions {
            let c = rng.gen_range(0..t.cells.len());
            t.subdivide(c).expect("cell exists");
        }
        for _ in 0..flips {
            let candidates: Vec<_> = t
                .interior_edges()
                .into_iter()
                .filter(|&(u, v)| t.is_flippable(u, v))
                .collect();
            if let Some(&(u, v)) = candidates.choose(rng) {
                t.flip(u, v).expect("checked");
            }
        }
        t
    }
}

#[derive(Debug, Clone)]
struct MMove {
    cells: [usize; 3],
    rot: [u8; 3],
    result: [usize; 3],
}

#[derive(Debug, Clone)]
struct Flip {
    cells: [usize; 2],
    rot: [u8; 2],
    result: [[usize; 3]; 2],
}

/// A triangulation with one basis label per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTriangulation {
    complex: Triangulation,
    labels: Vec<usize>,
}

impl LabeledTriangulation {
    pub fn new(complex: Triangulation, labels: Vec<usize>) -> Result<Self, EvalError> {
        if labels.len() != complex.cell_count() {
            return Err(EvalError::LabelCount {
                expected: complex.cell_count(),
                got: labels.len(),
            });
        }
        Ok(Self { complex, labels })
    }

    pub fn trivial(label: usize) -> Self {
        Self {
            complex: Triangulation::trivial(),
            labels: vec![label],
        }
    }

    pub fn complex(&self) -> &Triangulation {
        &self.complex
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Splits `cell` as in [`Triangulation::subdivide`], labeling the three
    /// new cells `(A,B,O)`, `(O,B,C)`, `(A,O,C)` with `new_labels`.
    pub fn subdivide(&mut self, cell: usize, new_labels: [usize; 3]) -> Result<usize, EvalError> {
        let o = self.complex.subdivide(cell)?;
        self.labels[cell] = new_labels[0];
        self.labels.push(new_labels[1]);
        self.labels.push(new_labels[2]);
        Ok(o)
    }

    fn check_labels(&self, dim: usize) -> Result<(), EvalError> {
        match self.labels.iter().find(|&&l| l >= dim) {
            Some(&label) => Err(EvalError::LabelRange { label, dim }),
            None => Ok(()),
        }
    }
}

/// A formal sum of labelings of one cell complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationState {
    complex: Triangulation,
    terms: BTreeMap<Vec<usize>, Scalar>,
}

impl EvaluationState {
    pub fn from_labeled(t: &LabeledTriangulation) -> Self {
        Self {
            complex: t.complex.clone(),
            terms: BTreeMap::from([(t.labels.clone(), Scalar::one())]),
        }
    }

    pub fn complex(&self) -> &Triangulation {
        &self.complex
    }

    /// Labelings with nonzero coefficients, in lexicographic order.
    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// For a single-cell state: `(label, coefficient)` pairs.
    pub fn as_vector(&self) -> Option<Vec<(usize, Scalar)>> {
        (self.complex.cell_count() == 1)
            .then(|| self.terms.iter().map(|(l, c)| (l[0], c.clone())).collect())
    }

    fn rewrite(&self, complex: Triangulation, relabel: impl Fn(&[usize]) -> Vec<(Vec<usize>, Scalar)>) -> Self {
        let mut terms: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        for (labels, c) in &self.terms {
            for (l, k) in relabel(labels) {
                *terms.entry(l).or_insert_with(Scalar::zero) += c * k;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { complex, terms }
    }

    /// Collapses the star of the trivalent interior vertex `o`.
    pub fn apply_m_move<S: Structure + ?Sized>(&self, alg: &S, o: usize) -> Result<Self, EvalError> {
        let plan = self.complex.plan_m(o)?;
        let mut complex = self.complex.clone();
        complex.apply_m_plan(&plan);
        let ops = [
            Op::P(0, plan.rot[0]),
            Op::P(1, plan.rot[1]),
            Op::P(2, plan.rot[2]),
            Op::M(0),
        ];
        let [t1, t2, t3] = plan.cells;
        let mut gone = [t2, t3];
        gone.sort_unstable();
        Ok(self.rewrite(complex, |labels| {
            apply_ops(alg, &ops, &[labels[t1], labels[t2], labels[t3]])
                .into_iter()
                .map(|(out, k)| {
                    let mut l = labels.to_vec();
                    l[t1] = out[0];
                    l.remove(gone[1]);
                    l.remove(gone[0]);
                    (l, k)
                })
                .collect()
        }))
    }

    /// Flips the interior edge `u v`.
    pub fn apply_mbar_move<S: Structure + ?Sized>(&self, alg: &S, u: usize, v: usize) -> Result<Self, EvalError> {
        let plan = self.complex.plan_flip(u, v)?;
        let mut complex = self.complex.clone();
        complex.apply_flip_plan(&plan);
        let ops = [Op::P(0, plan.rot[0]), Op::P(1, plan.rot[1]), Op::Mbar(0)];
        let [x, y] = plan.cells;
        Ok(self.rewrite(complex, |labels| {
            apply_ops(alg, &ops, &[labels[x], labels[y]])
                .into_iter()
                .map(|(out, k)| {
                    let mut l = labels.to_vec();
                    l[x] = out[0];
                    l[y] = out[1];
                    (l, k)
                })
                .collect()
        }))
    }

    /// Rotates a single cell so that its first side runs from corner 0 to
    /// corner 1.
    fn normalize<S: Structure + ?Sized>(&self, alg: &S) -> Self {
        let cell = self.complex.cells[0];
        let r = rotations(cell.iter().position(|&v| v == 0).expect("corner 0"), 0);
        let complex = Triangulation {
            vertices: self.complex.vertices,
            cells: vec![rotate(cell, r)],
        };
        self.rewrite(complex, |labels| {
            apply_ops(alg, &[Op::P(0, r)], labels).into_iter().collect()
        })
    }
}

/// Reduces `t` to the trivial triangulation with a seeded greedy-random
/// strategy: collapse a random trivalent vertex when there is one, otherwise
/// flip an edge at a random interior vertex of least degree.
pub fn evaluate<S: Structure + ?Sized>(
    t: &LabeledTriangulation,
    alg: &S,
    seed: u64,
    budget: usize,
) -> Result<EvaluationState, EvalError> {
    t.check_labels(alg.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = EvaluationState::from_labeled(t);
    for _ in 0..budget {
        if state.complex.cell_count() == 1 {
            return Ok(state.normalize(alg));
        }
        let interior = state.complex.interior_vertices();
        let degrees: Vec<usize> = interior.iter().map(|&v| state.complex.degree(v)).collect();
        let trivalent: Vec<usize> = interior
            .iter()
            .zip(&degrees)
            .filter(|(_, &d)| d == 3)
            .map(|(&v, _)| v)
            .collect();
        if let Some(&o) = trivalent.choose(&mut rng) {
            state = state.apply_m_move(alg, o)?;
            continue;
        }
        let least = *degrees.iter().min().ok_or(EvalError::Stuck)?;
        let low: Vec<usize> = interior
            .iter()
            .zip(&degrees)
            .filter(|(_, &d)| d == least)
            .map(|(&v, _)| v)
            .collect();
        let o = *low.choose(&mut rng).expect("nonempty");
        let edges = state.complex.interior_edges();
        let mut near: Vec<_> = edges
            .iter()
            .filter(|&&(u, v)| (u == o || v == o) && state.complex.is_flippable(u, v))
            .copied()
            .collect();
        if near.is_empty() {
            near = edges
                .into_iter()
                .filter(|&(u, v)| state.complex.is_flippable(u, v))
                .collect();
        }
        let &(u, v) = near.choose(&mut rng).ok_or(EvalError::Stuck)?;
        state = state.apply_mbar_move(alg, u, v)?;
    }
    if state.complex.cell_count() == 1 {
        return Ok(state.normalize(alg));
    }
    Err(EvalError::Budget(budget))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceReport {
    pub seeds: Vec<u64>,
    pub results: Vec<Result<EvaluationState, EvalError>>,
}

impl CoherenceReport {
    /// Every seed produced a result and all results are equal.
    pub fn passed(&self) -> bool {
        match self.results.first() {
            Some(Ok(first)) => self.results.iter().all(|r| r.as_ref() == Ok(first)),
            _ => false,
        }
    }

    /// Index of the first seed whose result differs from seed 0's.
    pub fn first_mismatch(&self) -> Option<usize> {
        let first = self.results.first()?;
        self.results.iter().position(|r| r != first || r.is_err())
    }
}

/// Evaluates `t` under seeds `base_seed .. base_seed + trials`, in parallel.
pub fn coherence_check<S: Structure + ?Sized>(
    t: &LabeledTriangulation,
    alg: &S,
    trials: usize,
    base_seed: u64,
) -> CoherenceReport {
    let seeds: Vec<u64> = (0..trials as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let results = seeds
        .par_iter()
        .map(|&s| evaluate(t, alg, s, DEFAULT_BUDGET))
        .collect();
    CoherenceReport { seeds, results }
}
