//! JSON documents for groups, modules, cochains, Δ-groups, algebras and
//! triangulations. Output always has sorted keys.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{
    format_scalar, parse_scalar, AlgebraError, Scalar, SparseTrilinearSystem, StrongThreeAlgebra,
};
use crate::cochain::{Cochain, CochainError};
use crate::delta::{DeltaError, DeltaGroup};
use crate::evaluator::{EvalError, LabeledTriangulation, Triangulation};
use crate::group::{FiniteGroup, GModule, GroupError, ModuleError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Invalid(String),
}

fn bad<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Invalid(msg.into()))
}

/// Pretty JSON with keys sorted at every level.
pub fn to_canonical_string<T: Serialize>(doc: &T) -> Result<String, FormatError> {
    let v: Value = serde_json::to_value(doc)?;
    Ok(serde_json::to_string_pretty(&v)?)
}

fn parse_key(key: &str) -> Result<Vec<usize>, FormatError> {
    if key.is_empty() {
        return Ok(Vec::new());
    }
    key.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| FormatError::Invalid(format!("bad key {key:?}"))))
        .collect()
}

fn key(t: &[usize]) -> String {
    t.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupDoc {
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl GroupDoc {
    pub fn from_group(g: &FiniteGroup) -> Self {
        Self {
            table: g.table_rows(),
            names: g.names().map(<[String]>::to_vec),
        }
    }

    pub fn to_group(&self) -> Result<FiniteGroup, FormatError> {
        Ok(FiniteGroup::from_table(self.table.clone(), self.names.clone())?)
    }
}

/// `action[g]` is the matrix of `g` as a list of rows; identity if absent.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModuleDoc {
    pub modulus: u64,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Vec<Vec<i64>>>>,
}

impl ModuleDoc {
    pub fn from_module(a: &GModule) -> Self {
        let action = (!a.acts_trivially()).then(|| {
            a.group()
                .elements()
                .map(|g| {
                    a.matrix_rows(g)
                        .into_iter()
                        .map(|r| r.into_iter().map(|x| x as i64).collect())
                        .collect()
                })
                .collect()
        });
        Self {
            modulus: a.modulus(),
            rank: a.rank(),
            action,
        }
    }

    pub fn to_module(&self, group: Arc<FiniteGroup>) -> Result<GModule, FormatError> {
        Ok(match &self.action {
            None => GModule::trivial(group, self.modulus, self.rank)?,
            Some(m) => GModule::new(group, self.modulus, self.rank, m.clone())?,
        })
    }
}

/// Nonzero values keyed by `"g1,...,gn"`; missing tuples are zero.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CochainDoc {
    pub degree: usize,
    pub values: BTreeMap<String, Vec<i64>>,
}

impl CochainDoc {
    pub fn from_cochain(c: &Cochain) -> Self {
        let values = c
            .entries()
            .filter(|(_, v)| v.iter().any(|&x| x != 0))
            .map(|(t, v)| (key(&t), v.iter().map(|&x| x as i64).collect()))
            .collect();
        Self {
            degree: c.degree(),
            values,
        }
    }

    pub fn to_cochain(&self, module: Arc<GModule>) -> Result<Cochain, FormatError> {
        let mut table: HashMap<Vec<usize>, Vec<i64>> = HashMap::new();
        for (k, v) in &self.values {
            let t = parse_key(k)?;
            if t.len() != self.degree {
                return bad(format!("key {k:?} does not have {} entries", self.degree));
            }
            if v.len() != module.rank() {
                return bad(format!("value at {k:?} does not have {} coordinates", module.rank()));
            }
            if t.iter().any(|&g| g >= module.group().order()) {
                return bad(format!("key {k:?} names an element outside the group"));
            }
            table.insert(t, v.clone());
        }
        let rank = module.rank();
        Ok(Cochain::from_fn(module, self.degree, |t| {
            table.get(t).cloned().unwrap_or_else(|| vec![0; rank])
        })?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DeltaDoc {
    pub base: GroupDoc,
    /// `"g,h"` to the ids in `T(g,h)`.
    pub carriers: BTreeMap<String, Vec<usize>>,
    /// `[a, b, c, m(a,b,c)]`.
    pub m: Vec<[usize; 4]>,
    #[serde(rename = "P")]
    pub p: Vec<usize>,
    #[serde(rename = "Q")]
    pub q: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl DeltaDoc {
    pub fn from_delta(t: &DeltaGroup) -> Self {
        let n = t.base().order();
        let mut carriers = BTreeMap::new();
        for g in 0..n {
            for h in 0..n {
                let c = t.carrier(g, h);
                if !c.is_empty() {
                    carriers.insert(key(&[g, h]), c.to_vec());
                }
            }
        }
        Self {
            base: GroupDoc::from_group(t.base()),
            carriers,
            m: t.m_entries().into_iter().map(|([a, b, c], o)| [a, b, c, o]).collect(),
            p: t.p_table().to_vec(),
            q: t.q_table().to_vec(),
            labels: Some(t.labels().to_vec()),
        }
    }

    pub fn to_delta(&self) -> Result<DeltaGroup, FormatError> {
        let base = Arc::new(self.base.to_group()?);
        let len = self.p.len();
        let mut carrier_of = vec![None; len];
        for (k, ids) in &self.carriers {
            let gh = parse_key(k)?;
            let [g, h] = gh[..] else {
                return bad(format!("carrier key {k:?} is not a pair"));
            };
            for &id in ids {
                match carrier_of.get_mut(id) {
                    Some(slot @ None) => *slot = Some((g, h)),
                    Some(Some(_)) => return bad(format!("element {id} listed in two carriers")),
                    None => return bad(format!("element {id} out of range")),
                }
            }
        }
        let carrier_of = carrier_of
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| FormatError::Invalid(format!("element {i} has no carrier"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut m = HashMap::new();
        for &[a, b, c, o] in &self.m {
            if m.insert([a, b, c], o).is_some() {
                return bad(format!("m({a},{b},{c}) given twice"));
            }
        }
        Ok(DeltaGroup::new(
            base,
            carrier_of,
            m,
            self.p.clone(),
            self.q.clone(),
            self.labels.clone(),
        )?)
    }
}

type Entry3 = (usize, usize, usize, usize, String);
type Entry4 = (usize, usize, usize, usize, String);

/// With `u` the document describes a strong 3-algebra; with `mbar` a
/// 3-algebra. Exactly one of the two must be present.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgebraDoc {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    /// `[i, j, k, out, coefficient]`.
    pub m: Vec<Entry3>,
    /// `[i, out, coefficient]`.
    #[serde(rename = "P")]
    pub p: Vec<(usize, usize, String)>,
    /// `[p, q, coefficient]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<(usize, usize, String)>>,
    /// `[i, j, p, q, coefficient]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mbar: Option<Vec<Entry4>>,
}

pub enum AnyAlgebra {
    Strong(StrongThreeAlgebra),
    Plain(SparseTrilinearSystem),
}

impl AlgebraDoc {
    pub fn from_strong(s: &StrongThreeAlgebra) -> Self {
        Self {
            dim: s.dim(),
            names: Some(s.basis_names().to_vec()),
            m: m_rows(s.m_entries()),
            p: p_rows(s.p_entries()),
            u: Some(
                s.u_entries()
                    .iter()
                    .map(|([a, b], c)| (*a, *b, format_scalar(c)))
                    .collect(),
            ),
            mbar: None,
        }
    }

    pub fn from_system(a: &SparseTrilinearSystem) -> Self {
        Self {
            dim: a.dim(),
            names: Some(a.basis_names().to_vec()),
            m: m_rows(a.m_entries()),
            p: p_rows(a.p_entries()),
            u: None,
            mbar: Some(
                a.mbar_entries()
                    .into_iter()
                    .map(|([i, j], [p, q], c)| (i, j, p, q, format_scalar(&c)))
                    .collect(),
            ),
        }
    }

    pub fn to_algebra(&self) -> Result<AnyAlgebra, FormatError> {
        let names = self.names.clone();
        match (&self.u, &self.mbar) {
            (Some(u), None) => {
                let u = u
                    .iter()
                    .map(|(a, b, c)| Ok(([*a, *b], parse_scalar(c)?)))
                    .collect::<Result<Vec<_>, AlgebraError>>()?;
                let mut s = StrongThreeAlgebra::new(self.dim, u)?;
                if let Some(n) = names {
                    s = s.with_names(n)?;
                }
                for (i, j, k, o, c) in &self.m {
                    s.add_m([*i, *j, *k], *o, parse_scalar(c)?)?;
                }
                for (i, o, c) in &self.p {
                    s.add_p(*i, *o, parse_scalar(c)?)?;
                }
                Ok(AnyAlgebra::Strong(s))
            }
            (None, Some(mbar)) => {
                let mut a = SparseTrilinearSystem::new(self.dim)?;
                if let Some(n) = names {
                    a = a.with_names(n)?;
                }
                for (i, j, k, o, c) in &self.m {
                    a.add_m([*i, *j, *k], *o, parse_scalar(c)?)?;
                }
                for (i, o, c) in &self.p {
                    a.add_p(*i, *o, parse_scalar(c)?)?;
                }
                for (i, j, p, q, c) in mbar {
                    a.add_mbar([*i, *j], [*p, *q], parse_scalar(c)?)?;
                }
                Ok(AnyAlgebra::Plain(a))
            }
            _ => bad("an algebra document needs exactly one of \"u\" and \"mbar\""),
        }
    }
}

fn m_rows(entries: Vec<([usize; 3], usize, Scalar)>) -> Vec<Entry3> {
    entries
        .into_iter()
        .map(|([i, j, k], o, c)| (i, j, k, o, format_scalar(&c)))
        .collect()
}

fn p_rows(entries: Vec<(usize, usize, Scalar)>) -> Vec<(usize, usize, String)> {
    entries
        .into_iter()
        .map(|(i, o, c)| (i, o, format_scalar(&c)))
        .collect()
}

/// Sides are numbered 1, 2, 3 as `v0→v1`, `v1→v2`, `v2→v0`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TriangulationDoc {
    pub vertices: usize,
    pub cells: Vec<[usize; 3]>,
    pub labels: Vec<usize>,
    /// `[[cell, side], [cell, side]]` for each interior edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<Vec<[[usize; 2]; 2]>>,
    /// The sides on `0→1`, `1→2`, `2→0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<[usize; 2]>>,
}

impl TriangulationDoc {
    pub fn from_labeled(t: &LabeledTriangulation) -> Self {
        let c = t.complex();
        let side = |(cell, s): (usize, usize)| [cell, s + 1];
        Self {
            vertices: c.vertex_count(),
            cells: c.cells().to_vec(),
            labels: t.labels().to_vec(),
            gluing: Some(c.gluing().into_iter().map(|[a, b]| [side(a), side(b)]).collect()),
            boundary: Some(c.boundary().into_iter().map(side).collect()),
        }
    }

    /// Gluing and boundary, when given, must agree with the cells.
    pub fn to_labeled(&self) -> Result<LabeledTriangulation, FormatError> {
        let t = LabeledTriangulation::new(Triangulation::new(self.vertices, self.cells.clone())?, self.labels.clone())?;
        let derived = Self::from_labeled(&t);
        if let Some(g) = &self.gluing {
            let mut g: Vec<_> = g.iter().map(|[a, b]| if a <= b { [*a, *b] } else { [*b, *a] }).collect();
            g.sort_unstable();
            if Some(g) != derived.gluing {
                return bad("gluing does not match the cells");
            }
        }
        if self.boundary.is_some() && self.boundary != derived.boundary {
            return bad("boundary does not match the cells");
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::dw::{build_dw, MultiplicativeCocycle};
    use crate::algebra::{derive_mtilde, int};
    use crate::delta::build_t_g_0;

    #[test]
    fn delta_round_trip() {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let t = build_t_g_0(g).unwrap();
        let doc = DeltaDoc::from_delta(&t);
        let s = to_canonical_string(&doc).unwrap();
        let back: DeltaDoc = serde_json::from_str(&s).unwrap();
        let t2 = back.to_delta().unwrap();
        assert!(t2.verify().all_pass());
        assert_eq!(t2.m_entries(), t.m_entries());
        assert_eq!(t2.p_table(), t.p_table());
    }

    #[test]
    fn algebra_round_trip() {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let s = build_dw(&MultiplicativeCocycle::constant(g, int(-1)).unwrap());
        let text = to_canonical_string(&AlgebraDoc::from_strong(&s)).unwrap();
        let back: AlgebraDoc = serde_json::from_str(&text).unwrap();
        let AnyAlgebra::Strong(s2) = back.to_algebra().unwrap() else { panic!() };
        assert_eq!(s2, s);
        let a = derive_mtilde(&s);
        let text = to_canonical_string(&AlgebraDoc::from_system(&a)).unwrap();
        let AnyAlgebra::Plain(a2) = serde_json::from_str::<AlgebraDoc>(&text).unwrap().to_algebra().unwrap() else {
            panic!()
        };
        assert_eq!(a2.mbar_entries(), a.mbar_entries());
    }

    #[test]
    fn keys_are_sorted() {
        let doc = GroupDoc {
            table: vec![vec![0]],
            names: Some(vec!["e".into()]),
        };
        let s = to_canonical_string(&doc).unwrap();
        assert!(s.find("names").unwrap() < s.find("table").unwrap());
    }

    #[test]
    fn triangulation_round_trip_and_checks() {
        let mut t = LabeledTriangulation::trivial(0);
        t.subdivide(0, [1, 2, 3]).unwrap();
        let mut doc = TriangulationDoc::from_labeled(&t);
        assert_eq!(doc.to_labeled().unwrap(), t);
        doc.boundary = Some(vec![[0, 2], [1, 2], [2, 3]]);
        assert!(doc.to_labeled().is_err());
    }

    #[test]
    fn cochain_round_trip() {
        let g = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let a = Arc::new(GModule::trivial(g, 3, 1).unwrap());
        let c = Cochain::from_fn(a.clone(), 2, |t| vec![(t[0] * t[1]) as i64]).unwrap();
        let doc = CochainDoc::from_cochain(&c);
        assert_eq!(doc.values.len(), 4);
        assert_eq!(doc.to_cochain(a).unwrap(), c);
    }
}
