//! Δ-groups as finite tables, the twisted family `T(G, A, α)`, and the
//! morphisms `f_σ : T(G, A, α) -> T(G, A, β)`.
//!
//! Carrier convention: an element of `T(g, x)` is typed by the pair
//! `(g, x)`. Then
//!
//! * `P : T(g, x) -> T(x, (xg)^-1)`
//! * `Q : T(g, x) -> T(g^-1, xg)`
//! * `m : T(g, x) × T(x^-1, y) × T(xg, yx^-1) -> T(g, y)`

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cochain::{Cochain, CochainError};
use crate::cohomology::{linear_map_matrix, Cohomology, CohomologyError, FiniteAbelianGroupDescriptor};
use crate::group::{FiniteGroup, GModule};
use crate::modular::{solve, Submodule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeltaError {
    #[error("element id {0} out of range")]
    BadId(usize),
    #[error("carrier ({0},{1}) is not a pair of group elements")]
    BadCarrier(usize, usize),
    #[error("table {0} has {1} entries, expected {2}")]
    TableLength(&'static str, usize, usize),
    #[error("the base group must be trivial")]
    NontrivialBase,
    #[error("expected a degree {expected} cochain, got degree {got}")]
    Degree { expected: usize, got: usize },
    #[error("cochains live over different modules")]
    ModuleMismatch,
    #[error("carrier ({0},{1}) is empty")]
    EmptyCarrier(usize, usize),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// A Δ-group based at a finite group, with every operation tabulated.
#[derive(Clone)]
pub struct DeltaGroup {
    base: Arc<FiniteGroup>,
    carrier_of: Vec<(usize, usize)>,
    carriers: Vec<Vec<usize>>,
    m: HashMap<[usize; 3], usize>,
    p: Vec<usize>,
    q: Vec<usize>,
    labels: Vec<String>,
}

impl fmt::Debug for DeltaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeltaGroup")
            .field("base_order", &self.base.order())
            .field("elements", &self.carrier_of.len())
            .field("m_entries", &self.m.len())
            .finish()
    }
}

impl DeltaGroup {
    /// Assembles a Δ-group from raw tables. Only ranges are checked here;
    /// typing and the axioms are checked by [`DeltaGroup::verify`].
    pub fn new(
        base: Arc<FiniteGroup>,
        carrier_of: Vec<(usize, usize)>,
        m: HashMap<[usize; 3], usize>,
        p: Vec<usize>,
        q: Vec<usize>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, DeltaError> {
        let n = base.order();
        let len = carrier_of.len();
        let mut carriers = vec![Vec::new(); n * n];
        for (id, &(g, h)) in carrier_of.iter().enumerate() {
            if g >= n || h >= n {
                return Err(DeltaError::BadCarrier(g, h));
            }
            carriers[g * n + h].push(id);
        }
        if p.len() != len {
            return Err(DeltaError::TableLength("P", p.len(), len));
        }
        if q.len() != len {
            return Err(DeltaError::TableLength("Q", q.len(), len));
        }
        if let Some(&bad) = p.iter().chain(&q).find(|&&x| x >= len) {
            return Err(DeltaError::BadId(bad));
        }
        for (k, &v) in &m {
            if let Some(&bad) = k.iter().chain(std::iter::once(&v)).find(|&&x| x >= len) {
                return Err(DeltaError::BadId(bad));
            }
        }
        let labels = match labels {
            Some(l) if l.len() == len => l,
            Some(l) => return Err(DeltaError::TableLength("labels", l.len(), len)),
            None => (0..len).map(|i| i.to_string()).collect(),
        };
        Ok(Self {
            base,
            carrier_of,
            carriers,
            m,
            p,
            q,
            labels,
        })
    }

    pub fn base(&self) -> &Arc<FiniteGroup> {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.carrier_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier_of.is_empty()
    }

    pub fn carrier(&self, g: usize, h: usize) -> &[usize] {
        &self.carriers[g * self.base.order() + h]
    }

    pub fn carrier_of(&self, id: usize) -> (usize, usize) {
        self.carrier_of[id]
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn m(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        self.m.get(&[a, b, c]).copied()
    }

    #[inline]
    pub fn p(&self, a: usize) -> usize {
        self.p[a]
    }

    #[inline]
    pub fn q(&self, a: usize) -> usize {
        self.q[a]
    }

    pub fn p_table(&self) -> &[usize] {
        &self.p
    }

    pub fn q_table(&self) -> &[usize] {
        &self.q
    }

    /// `m` entries sorted by input triple.
    pub fn m_entries(&self) -> Vec<([usize; 3], usize)> {
        let sorted: BTreeMap<[usize; 3], usize> = self.m.iter().map(|(k, v)| (*k, *v)).collect();
        sorted.into_iter().collect()
    }

    /// Carriers of the three inputs of `m` and of its output, indexed by
    /// `(g, x, y)`.
    fn m_types(&self, g: usize, x: usize, y: usize) -> [(usize, usize); 4] {
        let grp = &self.base;
        let xi = grp.inv(x);
        [
            (g, x),
            (xi, y),
            (grp.mul(x, g), grp.mul(y, xi)),
            (g, y),
        ]
    }

    /// Every typed input triple of `m`.
    pub fn typed_triples(&self) -> Vec<[usize; 3]> {
        let n = self.base.order();
        let mut out = Vec::new();
        for g in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let [ta, tb, tc, _] = self.m_types(g, x, y);
                    for &a in self.carrier(ta.0, ta.1) {
                        for &b in self.carrier(tb.0, tb.1) {
                            for &c in self.carrier(tc.0, tc.1) {
                                out.push([a, b, c]);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn check_typing(&self) -> Option<Vec<usize>> {
        let grp = &self.base;
        for id in 0..self.len() {
            let (g, x) = self.carrier_of[id];
            if self.carrier_of[self.p[id]] != (x, grp.inv(grp.mul(x, g))) {
                return Some(vec![id, self.p[id]]);
            }
            if self.carrier_of[self.q[id]] != (grp.inv(g), grp.mul(x, g)) {
                return Some(vec![id, self.q[id]]);
            }
        }
        let n = grp.order();
        let mut typed = 0usize;
        for g in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let [ta, tb, tc, out] = self.m_types(g, x, y);
                    for &a in self.carrier(ta.0, ta.1) {
                        for &b in self.carrier(tb.0, tb.1) {
                            for &c in self.carrier(tc.0, tc.1) {
                                typed += 1;
                                match self.m(a, b, c) {
                                    Some(r) if self.carrier_of[r] == out => {}
                                    Some(r) => return Some(vec![a, b, c, r]),
                                    None => return Some(vec![a, b, c]),
                                }
                            }
                        }
                    }
                }
            }
        }
        if typed != self.m.len() {
            // entries on untyped triples
            let extra = self
                .m_entries()
                .into_iter()
                .find(|(k, _)| {
                    let (g, x) = self.carrier_of[k[0]];
                    let (_, y) = self.carrier_of[k[1]];
                    let [ta, tb, tc, _] = self.m_types(g, x, y);
                    self.carrier_of[k[0]] != ta
                        || self.carrier_of[k[1]] != tb
                        || self.carrier_of[k[2]] != tc
                })
                .map(|(k, _)| k.to_vec());
            return extra.or_else(|| Some(Vec::new()));
        }
        None
    }

    /// Checks typing and every axiom exhaustively.
    pub fn verify(&self) -> DeltaReport {
        let mut results = Vec::new();
        let typing = self.check_typing();
        results.push(AxiomResult::new(DeltaAxiom::Typing, typing.clone()));
        if typing.is_some() {
            for axiom in DeltaAxiom::ALL.into_iter().skip(1) {
                results.push(AxiomResult {
                    axiom,
                    outcome: Outcome::Skipped,
                });
            }
            return DeltaReport { results };
        }
        results.push(AxiomResult::new(DeltaAxiom::Rotation, self.check_rotation()));
        let triples = self.typed_triples();
        let m = |a, b, c| self.m(a, b, c).expect("typed");
        let (p, q) = (|a| self.p(a), |a| self.q(a));
        let pm = triples
            .par_iter()
            .find_first(|&&[a, b, c]| p(m(a, b, c)) != m(p(b), p(c), p(a)))
            .map(|t| t.to_vec());
        results.push(AxiomResult::new(DeltaAxiom::PCompatible, pm));
        let qm = triples
            .par_iter()
            .find_first(|&&[a, b, c]| q(m(a, b, c)) != m(q(a), q(c), q(b)))
            .map(|t| t.to_vec());
        results.push(AxiomResult::new(DeltaAxiom::QCompatible, qm));
        results.push(AxiomResult::new(DeltaAxiom::Associativity, self.check_associativity()));
        let inv = triples
            .par_iter()
            .find_first(|&&[f, a, b]| m(m(f, a, b), p(p(q(a))), p(q(b))) != f)
            .map(|t| t.to_vec());
        results.push(AxiomResult::new(DeltaAxiom::Inverse, inv));
        DeltaReport { results }
    }

    fn check_rotation(&self) -> Option<Vec<usize>> {
        (0..self.len()).find_map(|a| {
            let (p, q) = (|x| self.p(x), |x| self.q(x));
            let ok = p(p(p(a))) == a && q(q(a)) == a && p(p(q(a))) == q(p(a));
            (!ok).then(|| vec![a])
        })
    }

    /// `m(m(a,b,c),d,e) = m(a, m(b,d,f), m(c,Q(f),e))` for every typed
    /// `(a,b,c,d,e,f)`.
    fn check_associativity(&self) -> Option<Vec<usize>> {
        let grp = &self.base;
        let n = grp.order();
        let inv = |x| grp.inv(x);
        let mul = |x, y| grp.mul(x, y);
        let m = |a, b, c| self.m(a, b, c).expect("typed");
        (0..n * n).into_par_iter().find_map_first(|gh| {
            let (g, h) = (gh / n, gh % n);
            for k in 0..n {
                for l in 0..n {
                    let ta = (g, inv(h));
                    let tb = (h, inv(k));
                    let tc = (mul(inv(h), g), mul(inv(k), h));
                    let td = (k, inv(l));
                    let te = (mul(inv(k), g), mul(inv(l), k));
                    let tf = (mul(inv(k), h), mul(inv(l), k));
                    for &a in self.carrier(ta.0, ta.1) {
                        for &b in self.carrier(tb.0, tb.1) {
                            for &c in self.carrier(tc.0, tc.1) {
                                let abc = m(a, b, c);
                                for &d in self.carrier(td.0, td.1) {
                                    for &e in self.carrier(te.0, te.1) {
                                        let lhs = m(abc, d, e);
                                        for &f in self.carrier(tf.0, tf.1) {
                                            let rhs = m(a, m(b, d, f), m(c, self.q(f), e));
                                            if lhs != rhs {
                                                return Some(vec![a, b, c, d, e, f]);
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            None
        })
    }

    /// Checks that `map` (indexed by source id) commutes with `m`, `P`,
    /// `Q`. Both Δ-groups must share the base group; the base map is the
    /// identity.
    pub fn commutes(&self, target: &DeltaGroup, map: &[usize]) -> Option<Vec<usize>> {
        if map.len() != self.len() {
            return Some(Vec::new());
        }
        for a in 0..self.len() {
            if target.carrier_of(map[a]) != self.carrier_of(a) {
                return Some(vec![a]);
            }
            if map[self.p(a)] != target.p(map[a]) || map[self.q(a)] != target.q(map[a]) {
                return Some(vec![a]);
            }
        }
        self.typed_triples()
            .into_par_iter()
            .find_first(|&[a, b, c]| {
                let lhs = self.m(a, b, c).map(|r| map[r]);
                lhs != target.m(map[a], map[b], map[c])
            })
            .map(|t| t.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaAxiom {
    Typing,
    /// `P^3 = 1`, `Q^2 = 1`, `P^2 Q = Q P`.
    Rotation,
    /// `P m(a,b,c) = m(Pb, Pc, Pa)`.
    PCompatible,
    /// `Q m(a,b,c) = m(Qa, Qc, Qb)`.
    QCompatible,
    Associativity,
    /// `m(m(f,a,b), P^2 Q a, P Q b) = f`.
    Inverse,
}

impl DeltaAxiom {
    pub const ALL: [DeltaAxiom; 6] = [
        DeltaAxiom::Typing,
        DeltaAxiom::Rotation,
        DeltaAxiom::PCompatible,
        DeltaAxiom::QCompatible,
        DeltaAxiom::Associativity,
        DeltaAxiom::Inverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DeltaAxiom::Typing => "typing",
            DeltaAxiom::Rotation => "rotation",
            DeltaAxiom::PCompatible => "p-compatible",
            DeltaAxiom::QCompatible => "q-compatible",
            DeltaAxiom::Associativity => "associativity",
            DeltaAxiom::Inverse => "inverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Element ids of the first counterexample found.
    Fail(Vec<usize>),
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomResult {
    pub axiom: DeltaAxiom,
    pub outcome: Outcome,
}

impl AxiomResult {
    fn new(axiom: DeltaAxiom, witness: Option<Vec<usize>>) -> Self {
        Self {
            axiom,
            outcome: witness.map_or(Outcome::Pass, Outcome::Fail),
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaReport {
    pub results: Vec<AxiomResult>,
}

impl DeltaReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(AxiomResult::passed)
    }

    pub fn get(&self, axiom: DeltaAxiom) -> &AxiomResult {
        self.results
            .iter()
            .find(|r| r.axiom == axiom)
            .expect("every axiom is reported")
    }

    pub fn first_failure(&self) -> Option<&AxiomResult> {
        self.results.iter().find(|r| matches!(r.outcome, Outcome::Fail(_)))
    }
}

fn check_degree(c: &Cochain, expected: usize) -> Result<(), DeltaError> {
    if c.degree() != expected {
        return Err(DeltaError::Degree {
            expected,
            got: c.degree(),
        });
    }
    Ok(())
}

/// Id of `(a, (g, x))` in [`build_t_g_a_alpha`].
pub fn twisted_id(module: &GModule, g: usize, x: usize, a: &[u64]) -> usize {
    let n = module.group().order();
    let size = module.size().expect("small module") as usize;
    (g * n + x) * size + module.element_index(a) as usize
}

/// `T(G, A, α)`: carriers `A × {(g, x)}`, with
///
/// * `m((a,(g,x)), (b,(x^-1,y)), (c,(xg,yx^-1))) = (a + (g^-1 x^-1) b + c + α(g^-1 x^-1, x y^-1, y), (g,y))`
/// * `P((a,(g,x))) = (g a, (x, (xg)^-1))`
/// * `Q((a,(g,x))) = (-(g a), (g^-1, xg))`
pub fn build_t_g_a_alpha(alpha: &Cochain) -> Result<DeltaGroup, DeltaError> {
    check_degree(alpha, 3)?;
    let module = alpha.module().clone();
    let grp = module.group().clone();
    let n = grp.order();
    let size = module.size().expect("small module") as usize;
    let elems: Vec<Vec<u64>> = (0..size as u64)
        .map(|i| module.element_at(i).into_coords())
        .collect();
    let id = |g: usize, x: usize, a: usize| (g * n + x) * size + a;
    let total = n * n * size;
    let mut carrier_of = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut p = vec![0; total];
    let mut q = vec![0; total];
    for g in 0..n {
        for x in 0..n {
            for (ai, a) in elems.iter().enumerate() {
                carrier_of.push((g, x));
                let coords: Vec<String> = a.iter().map(u64::to_string).collect();
                labels.push(format!("({};{},{})", coords.join(" "), g, x));
                let ga = module.act(g, a);
                let xg = grp.mul(x, g);
                p[id(g, x, ai)] = id(x, grp.inv(xg), module.element_index(&ga) as usize);
                q[id(g, x, ai)] =
                    id(grp.inv(g), xg, module.element_index(&module.neg(&ga)) as usize);
            }
        }
    }
    let mut m = HashMap::with_capacity(n * n * n * size * size * size);
    for g in 0..n {
        for x in 0..n {
            let xi = grp.inv(x);
            let w = grp.mul(grp.inv(g), xi);
            for y in 0..n {
                let (tb, tc) = ((xi, y), (grp.mul(x, g), grp.mul(y, xi)));
                let twist = alpha.value(&[w, grp.mul(x, grp.inv(y)), y]);
                for (ai, a) in elems.iter().enumerate() {
                    for (bi, b) in elems.iter().enumerate() {
                        let ab = module.add(a, &module.act(w, b));
                        let abt = module.add(&ab, twist);
                        for (ci, c) in elems.iter().enumerate() {
                            let r = module.add(&abt, c);
                            m.insert(
                                [id(g, x, ai), id(tb.0, tb.1, bi), id(tc.0, tc.1, ci)],
                                id(g, y, module.element_index(&r) as usize),
                            );
                        }
                    }
                }
            }
        }
    }
    DeltaGroup::new(grp, carrier_of, m, p, q, Some(labels))
}

/// `T(1, A)`: a single carrier `A`, `m(a,b,c) = a+b+c`, `P = 1`, `Q = -1`.
pub fn build_trivial_base(module: Arc<GModule>) -> Result<DeltaGroup, DeltaError> {
    if !module.group().is_trivial() {
        return Err(DeltaError::NontrivialBase);
    }
    let size = module.size().expect("small module");
    let elems: Vec<Vec<u64>> = (0..size).map(|i| module.element_at(i).into_coords()).collect();
    let idx = |v: &[u64]| module.element_index(v) as usize;
    let mut m = HashMap::new();
    for a in &elems {
        for b in &elems {
            let ab = module.add(a, b);
            for c in &elems {
                m.insert([idx(a), idx(b), idx(c)], idx(&module.add(&ab, c)));
            }
        }
    }
    let p = (0..elems.len()).collect();
    let q = elems.iter().map(|a| idx(&module.neg(a))).collect();
    let labels = elems
        .iter()
        .map(|a| a.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    let carrier_of = vec![(0, 0); elems.len()];
    DeltaGroup::new(module.group().clone(), carrier_of, m, p, q, Some(labels))
}

/// `T(G, 0)`: singleton carriers `{(g, h, (hg)^-1)}`; id `g |G| + h`.
pub fn build_t_g_0(group: Arc<FiniteGroup>) -> Result<DeltaGroup, DeltaError> {
    let n = group.order();
    let id = |g: usize, h: usize| g * n + h;
    let mut carrier_of = Vec::with_capacity(n * n);
    let mut labels = Vec::with_capacity(n * n);
    let mut p = Vec::with_capacity(n * n);
    let mut q = Vec::with_capacity(n * n);
    for g in 0..n {
        for h in 0..n {
            let hg = group.mul(h, g);
            carrier_of.push((g, h));
            labels.push(format!("({},{},{})", g, h, group.inv(hg)));
            p.push(id(h, group.inv(hg)));
            q.push(id(group.inv(g), hg));
        }
    }
    let mut m = HashMap::with_capacity(n * n * n);
    for g in 0..n {
        for x in 0..n {
            let xi = group.inv(x);
            for y in 0..n {
                m.insert(
                    [id(g, x), id(xi, y), id(group.mul(x, g), group.mul(y, xi))],
                    id(g, y),
                );
            }
        }
    }
    DeltaGroup::new(group, carrier_of, m, p, q, Some(labels))
}

/// The three differences whose vanishing is condition (d1):
/// `α(x,y,z) - xy α(y^-1, yz, (xyz)^-1)`, `α(x,y,z) + α(x, yz, z^-1)` and
/// `α(x,y,z) + α(xy, y^-1, yz)`.
pub fn d1_defects(alpha: &Cochain) -> Result<[Cochain; 3], DeltaError> {
    check_degree(alpha, 3)?;
    let module = alpha.module().clone();
    let g = module.group().clone();
    let build = |f: &dyn Fn(usize, usize, usize) -> Vec<u64>| {
        Cochain::from_fn(module.clone(), 3, |t| {
            let (x, y, z) = (t[0], t[1], t[2]);
            let here = alpha.value(t);
            let other = f(x, y, z);
            module
                .add(here, &other)
                .into_iter()
                .map(|v| v as i64)
                .collect()
        })
    };
    let first = build(&|x, y, z| {
        let xy = g.mul(x, y);
        let xyz = g.mul(xy, z);
        let v = alpha.value(&[g.inv(y), g.mul(y, z), g.inv(xyz)]);
        module.neg(&module.act(xy, v))
    })?;
    let second = build(&|x, y, z| alpha.value(&[x, g.mul(y, z), g.inv(z)]).to_vec())?;
    let third = build(&|x, y, z| alpha.value(&[g.mul(x, y), g.inv(y), g.mul(y, z)]).to_vec())?;
    Ok([first, second, third])
}

pub fn check_d1(alpha: &Cochain) -> Result<bool, DeltaError> {
    Ok(d1_defects(alpha)?.iter().all(Cochain::is_zero))
}

/// Whether the Δ-group axioms for `T(G, A, α)` agree with "α is a cocycle
/// satisfying (d1)". `false` would contradict the classification of
/// twisted Δ-groups.
pub fn prop41_crosscheck(alpha: &Cochain) -> Result<bool, DeltaError> {
    let lhs = build_t_g_a_alpha(alpha)?.verify().all_pass();
    let rhs = alpha.is_cocycle() && check_d1(alpha)?;
    Ok(lhs == rhs)
}

/// The degree-2 cochain defining `f_σ((a,(g,x))) = (a + σ(g^-1 x^-1, x), (g,x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaMorphismData {
    pub sigma: Cochain,
}

impl DeltaMorphismData {
    pub fn new(sigma: Cochain) -> Result<Self, DeltaError> {
        check_degree(&sigma, 2)?;
        Ok(Self { sigma })
    }

    /// The carrier map between the tabulated Δ-groups.
    pub fn carrier_map(&self) -> Vec<usize> {
        let module = self.sigma.module();
        let grp = module.group();
        let n = grp.order();
        let size = module.size().expect("small module") as usize;
        let mut map = vec![0; n * n * size];
        for g in 0..n {
            for x in 0..n {
                let shift = self.sigma.value(&[grp.mul(grp.inv(g), grp.inv(x)), x]);
                for ai in 0..size {
                    let a = module.element_at(ai as u64).into_coords();
                    map[(g * n + x) * size + ai] = twisted_id(module, g, x, &module.add(&a, shift));
                }
            }
        }
        map
    }
}

/// First `(g, h)` where `σ(g,h) = g σ(h,(gh)^-1) = -(gh) σ(h^-1,g^-1)` fails.
pub fn e1_witness(sigma: &Cochain) -> Option<(usize, usize)> {
    let module = sigma.module();
    let grp = module.group();
    for g in grp.elements() {
        for h in grp.elements() {
            let gh = grp.mul(g, h);
            let here = sigma.value(&[g, h]);
            let rot = module.act(g, sigma.value(&[h, grp.inv(gh)]));
            let flip = module.neg(&module.act(gh, sigma.value(&[grp.inv(h), grp.inv(g)])));
            if here != rot.as_slice() || here != flip.as_slice() {
                return Some((g, h));
            }
        }
    }
    None
}

/// `σ(gh,k) + α(g,h,k) - σ(g,hk) - gσ(h,k) - σ(gh,h^-1) - β(g,h,k)`, which
/// vanishes exactly when `f_σ` commutes with `m`.
pub fn e2_defect(sigma: &Cochain, alpha: &Cochain, beta: &Cochain) -> Result<Cochain, DeltaError> {
    check_degree(sigma, 2)?;
    check_degree(alpha, 3)?;
    check_degree(beta, 3)?;
    let module = sigma.module().clone();
    if alpha.module() != &module || beta.module() != &module {
        return Err(DeltaError::ModuleMismatch);
    }
    let grp = module.group().clone();
    Ok(Cochain::from_fn(module.clone(), 3, |t| {
        let (g, h, k) = (t[0], t[1], t[2]);
        let gh = grp.mul(g, h);
        let mut acc = module.add(sigma.value(&[gh, k]), alpha.value(t));
        for v in [
            sigma.value(&[g, grp.mul(h, k)]).to_vec(),
            module.act(g, sigma.value(&[h, k])),
            sigma.value(&[gh, grp.inv(h)]).to_vec(),
            beta.value(t).to_vec(),
        ] {
            acc = module.add(&acc, &module.neg(&v));
        }
        acc.into_iter().map(|v| v as i64).collect()
    })?)
}

/// Outcome of checking `f_σ : T(G,A,α) -> T(G,A,β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismCheck {
    pub holds: bool,
    pub e1_witness: Option<(usize, usize)>,
    pub e2_witness: Option<Vec<usize>>,
}

/// Checks (e1) and (e2) directly and, independently, that the carrier map
/// commutes with `m`, `P`, `Q`; the two verdicts must agree.
pub fn is_delta_morphism(
    data: &DeltaMorphismData,
    alpha: &Cochain,
    beta: &Cochain,
) -> Result<MorphismCheck, DeltaError> {
    let e1 = e1_witness(&data.sigma);
    let e2 = e2_defect(&data.sigma, alpha, beta)?
        .entries()
        .find(|(_, v)| v.iter().any(|&x| x != 0))
        .map(|(t, _)| t);
    let holds = e1.is_none() && e2.is_none();
    let source = build_t_g_a_alpha(alpha)?;
    let target = build_t_g_a_alpha(beta)?;
    let commutes = source.commutes(&target, &data.carrier_map()).is_none();
    if commutes != holds {
        return Err(DeltaError::Inconsistent(format!(
            "carrier map commutes = {commutes}, but (e1)+(e2) hold = {holds}"
        )));
    }
    Ok(MorphismCheck {
        holds,
        e1_witness: e1,
        e2_witness: e2,
    })
}

/// Decision of whether `T(G,A,α) ≅ T(G,A,β)` over the identity of `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsomorphismDecision {
    pub isomorphic: bool,
    /// A σ satisfying (e1) and (e2), when one exists.
    pub sigma: Option<Cochain>,
}

/// Decides isomorphism twice: via a symmetric coboundary witness for
/// `β - α`, and by solving (e1)+(e2) as a linear system in σ.
pub fn are_isomorphic(
    cohomology: &Cohomology,
    alpha: &Cochain,
    beta: &Cochain,
) -> Result<IsomorphismDecision, DeltaError> {
    check_degree(alpha, 3)?;
    check_degree(beta, 3)?;
    let module = cohomology.module().clone();
    if alpha.module() != &module || beta.module() != &module {
        return Err(DeltaError::ModuleMismatch);
    }
    let diff = beta.sub(alpha)?;
    let via_witness = cohomology
        .coboundary_witness(&diff, true)?
        .map(|phi| phi.neg());
    let via_solve = solve_e1_e2(&module, alpha, beta)?;
    if via_witness.is_some() != via_solve.is_some() {
        return Err(DeltaError::Inconsistent(format!(
            "symmetric witness found = {}, direct solve found = {}",
            via_witness.is_some(),
            via_solve.is_some()
        )));
    }
    if let Some(sigma) = &via_witness {
        if e1_witness(sigma).is_some() || !e2_defect(sigma, alpha, beta)?.is_zero() {
            return Err(DeltaError::Inconsistent(
                "symmetric witness violates (e1)/(e2)".into(),
            ));
        }
    }
    Ok(IsomorphismDecision {
        isomorphic: via_solve.is_some(),
        sigma: via_solve,
    })
}

fn solve_e1_e2(
    module: &Arc<GModule>,
    alpha: &Cochain,
    beta: &Cochain,
) -> Result<Option<Cochain>, DeltaError> {
    let grp = module.group().clone();
    let rot = linear_map_matrix(module, 2, 2, |s| {
        Cochain::from_fn(module.clone(), 2, |t| {
            let (g, h) = (t[0], t[1]);
            let gh = grp.mul(g, h);
            let r = module.act(g, s.value(&[h, grp.inv(gh)]));
            module.add(s.value(t), &module.neg(&r)).into_iter().map(|v| v as i64).collect()
        })
        .expect("degree 2")
    })?;
    let flip = linear_map_matrix(module, 2, 2, |s| {
        Cochain::from_fn(module.clone(), 2, |t| {
            let (g, h) = (t[0], t[1]);
            let gh = grp.mul(g, h);
            let r = module.act(gh, s.value(&[grp.inv(h), grp.inv(g)]));
            module.add(s.value(t), &r).into_iter().map(|v| v as i64).collect()
        })
        .expect("degree 2")
    })?;
    let zero3 = Cochain::zero(module.clone(), 3)?;
    // e2 is affine: defect(σ) = L σ + (α - β)
    let lin = linear_map_matrix(module, 2, 3, |s| {
        e2_defect(s, &zero3, &zero3).expect("same module")
    })?;
    let system = rot.vstack(&flip).and_then(|a| a.vstack(&lin)).map_err(CohomologyError::from)?;
    let mut rhs = vec![0; rot.rows() + flip.rows()];
    rhs.extend(beta.sub(alpha)?.values());
    Ok(match solve(&system, &rhs) {
        Some(v) => Some(Cochain::from_values(module.clone(), 2, v)?),
        None => None,
    })
}

/// Valid twisting cochains `V = Z^3 ∩ {d1}` and the isomorphism classes
/// `V / (V ∩ ∂CS^2)`.
#[derive(Debug, Clone)]
pub struct Classification {
    pub valid: FiniteAbelianGroupDescriptor,
    pub classes: FiniteAbelianGroupDescriptor,
    /// Whether the (d1) cochains are exactly the `Σ_4`-invariant ones.
    pub d1_is_symmetry: bool,
}

pub fn classify(cohomology: &Cohomology) -> Result<Classification, DeltaError> {
    let module = cohomology.module().clone();
    let d1 = d1_submodule(&module)?;
    let z3 = cohomology.cocycles(3)?;
    let valid = z3.intersect(&d1).map_err(CohomologyError::from)?;
    let bs = cohomology.symmetric_coboundaries(3)?;
    let meet = valid.intersect(&bs).map_err(CohomologyError::from)?;
    let classes = valid.quotient(&meet).map_err(CohomologyError::from)?;
    let cs3 = cohomology.cs_submodule(3)?;
    let d1_is_symmetry = same_submodule(&d1, &cs3);
    Ok(Classification {
        valid: FiniteAbelianGroupDescriptor::from_cyclic_orders(&valid.cyclic_orders()),
        classes: FiniteAbelianGroupDescriptor::from_cyclic_orders(&classes),
        d1_is_symmetry,
    })
}

fn same_submodule(a: &Submodule, b: &Submodule) -> bool {
    a.basis().iter().all(|(v, _)| b.contains(v)) && b.basis().iter().all(|(v, _)| a.contains(v))
}

/// The cochains satisfying (d1), as a submodule of `C^3`.
pub fn d1_submodule(module: &Arc<GModule>) -> Result<Submodule, DeltaError> {
    let mut stacked: Option<crate::modular::ModMatrix> = None;
    for which in 0..3 {
        let block = linear_map_matrix(module, 3, 3, |a| {
            d1_defects(a).expect("degree 3")[which].clone()
        })?;
        stacked = Some(match stacked {
            None => block,
            Some(s) => s.vstack(&block).map_err(CohomologyError::from)?,
        });
    }
    Ok(Submodule::kernel(&stacked.expect("three blocks")))
}
