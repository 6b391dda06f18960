//! Group cohomology `H^n(G, A)`, the symmetric subcomplex `CS^*`, its
//! cohomology `HS^n`, and the comparison map `HS^n -> H^n`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cochain::{tuple_count, Cochain, CochainError, Transposition};
use crate::group::GModule;
use crate::modular::{invariant_factors, solve, ModMatrix, ModularError, Submodule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("degree {degree} exceeds the cap of {max}")]
    DegreeCap { degree: usize, max: usize },
    #[error("C^{degree} would have {size} coordinates in degree n+1 (cap {max})")]
    SizeCap { degree: usize, size: usize, max: usize },
    #[error("witnesses exist only in degree >= 1")]
    DegreeZero,
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Modular(#[from] ModularError),
}

/// Matrix of a linear map `C^from -> C^to` in the tuple bases, built column
/// by column from its values on basis cochains.
pub fn linear_map_matrix(
    module: &Arc<GModule>,
    from: usize,
    to: usize,
    f: impl Fn(&Cochain) -> Cochain + Sync,
) -> Result<ModMatrix, CochainError> {
    let cols = Cochain::zero(module.clone(), from)?.values().len();
    let rows = Cochain::zero(module.clone(), to)?.values().len();
    let columns: Vec<Vec<u64>> = (0..cols)
        .into_par_iter()
        .map(|j| {
            let mut values = vec![0; cols];
            values[j] = 1;
            let e = Cochain::from_values(module.clone(), from, values).expect("basis vector");
            let image = f(&e);
            assert_eq!(image.degree(), to, "linear map lands in the wrong degree");
            image.values().to_vec()
        })
        .collect();
    Ok(ModMatrix::from_columns(rows, &columns, module.modulus()))
}

/// Size limits for cohomology computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_degree: usize,
    /// Upper bound on `|G|^(n+1) * rank`.
    pub max_entries: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_degree: 4,
            max_entries: 100_000,
        }
    }
}

impl Limits {
    pub fn raised() -> Self {
        Self {
            max_degree: 8,
            max_entries: 10_000_000,
        }
    }
}

/// A finite abelian group `Z/d_1 x ... x Z/d_r` with `d_1 | ... | d_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteAbelianGroupDescriptor {
    invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroupDescriptor {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Normalises arbitrary cyclic orders (1s are dropped).
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let orders: Vec<u64> = orders.iter().copied().filter(|&o| o > 1).collect();
        Self {
            invariant_factors: invariant_factors(&orders),
        }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Group order, if it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        self.invariant_factors
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(u128::from(d)))
    }
}

impl fmt::Display for FiniteAbelianGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Generators of a submodule of `C^n`, with the additive order of each.
/// The relation matrix is `diag(orders)`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    degree: usize,
    generators: Vec<Cochain>,
    orders: Vec<u64>,
}

impl SubspaceBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Cochain] {
        &self.generators
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn relations(&self) -> Vec<Vec<i64>> {
        let r = self.orders.len();
        (0..r)
            .map(|i| {
                let mut row = vec![0; r];
                row[i] = self.orders[i] as i64;
                row
            })
            .collect()
    }

    pub fn as_group(&self) -> FiniteAbelianGroupDescriptor {
        FiniteAbelianGroupDescriptor::from_cyclic_orders(&self.orders)
    }
}

/// All cohomology computations for one coefficient module.
#[derive(Debug, Clone)]
pub struct Cohomology {
    module: Arc<GModule>,
    limits: Limits,
}

impl Cohomology {
    pub fn new(module: Arc<GModule>) -> Self {
        Self {
            module,
            limits: Limits::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn module(&self) -> &Arc<GModule> {
        &self.module
    }

    fn check(&self, degree: usize) -> Result<(), CohomologyError> {
        if degree > self.limits.max_degree {
            return Err(CohomologyError::DegreeCap {
                degree,
                max: self.limits.max_degree,
            });
        }
        let size = tuple_count(self.module.group().order(), degree + 1)
            .and_then(|t| t.checked_mul(self.module.rank()))
            .unwrap_or(usize::MAX);
        if size > self.limits.max_entries {
            return Err(CohomologyError::SizeCap {
                degree,
                size,
                max: self.limits.max_entries,
            });
        }
        Ok(())
    }

    fn dim(&self, degree: usize) -> usize {
        tuple_count(self.module.group().order(), degree).expect("within cap") * self.module.rank()
    }

    fn linear_map(
        &self,
        from: usize,
        to: usize,
        f: impl Fn(&Cochain) -> Cochain + Sync,
    ) -> Result<ModMatrix, CohomologyError> {
        Ok(linear_map_matrix(&self.module, from, to, f)?)
    }

    /// Matrix of `∂_n : C^n -> C^{n+1}` in the tuple basis.
    pub fn differential_matrix(&self, degree: usize) -> Result<ModMatrix, CohomologyError> {
        self.check(degree)?;
        self.linear_map(degree, degree + 1, Cochain::differential)
    }

    /// Stacked matrix of `σ ↦ σ - (i,i+1)σ` over all generators.
    fn symmetry_equations(&self, degree: usize) -> Result<ModMatrix, CohomologyError> {
        let n = self.dim(degree);
        let m = self.module.modulus();
        let mut stacked = ModMatrix::zeros(0, n, m);
        for t in Transposition::generators(degree) {
            let block = self.linear_map(degree, degree, |s| {
                s.sub(&s.transposition_action(t).expect("generator"))
                    .expect("same module")
            })?;
            stacked = stacked.vstack(&block)?;
        }
        Ok(stacked)
    }

    pub fn cs_submodule(&self, degree: usize) -> Result<Submodule, CohomologyError> {
        self.check(degree)?;
        if degree == 0 {
            return Ok(Submodule::whole(self.dim(0), self.module.modulus()));
        }
        Ok(Submodule::kernel(&self.symmetry_equations(degree)?))
    }

    fn to_basis(&self, degree: usize, sub: &Submodule) -> SubspaceBasis {
        let (generators, orders) = sub
            .basis()
            .into_iter()
            .map(|(v, o)| {
                (
                    Cochain::from_values(self.module.clone(), degree, v).expect("right length"),
                    o,
                )
            })
            .unzip();
        SubspaceBasis {
            degree,
            generators,
            orders,
        }
    }

    /// `CS^n`: cochains fixed by every adjacent transposition.
    pub fn symmetric_subspace(&self, degree: usize) -> Result<SubspaceBasis, CohomologyError> {
        let sub = self.cs_submodule(degree)?;
        Ok(self.to_basis(degree, &sub))
    }

    pub fn cocycles(&self, degree: usize) -> Result<Submodule, CohomologyError> {
        Ok(Submodule::kernel(&self.differential_matrix(degree)?))
    }

    pub fn coboundaries(&self, degree: usize) -> Result<Submodule, CohomologyError> {
        if degree == 0 {
            return Ok(Submodule::span(self.dim(0), &[], self.module.modulus()));
        }
        Ok(Submodule::image(&self.differential_matrix(degree - 1)?))
    }

    pub fn symmetric_cocycles(&self, degree: usize) -> Result<Submodule, CohomologyError> {
        let d = self.differential_matrix(degree)?;
        let eq = if degree == 0 {
            d
        } else {
            d.vstack(&self.symmetry_equations(degree)?)?
        };
        Ok(Submodule::kernel(&eq))
    }

    pub fn symmetric_coboundaries(&self, degree: usize) -> Result<Submodule, CohomologyError> {
        let m = self.module.modulus();
        if degree == 0 {
            return Ok(Submodule::span(self.dim(0), &[], m));
        }
        let lower = self.symmetric_subspace(degree - 1)?;
        let images: Vec<Vec<u64>> = lower
            .generators
            .iter()
            .map(|g| g.differential().values().to_vec())
            .collect();
        Ok(Submodule::span(self.dim(degree), &images, m))
    }

    /// `Z^n`, as a basis of cocycles.
    pub fn cocycle_basis(&self, degree: usize) -> Result<SubspaceBasis, CohomologyError> {
        let sub = self.cocycles(degree)?;
        Ok(self.to_basis(degree, &sub))
    }

    /// `ZS^n = Z^n ∩ CS^n`.
    pub fn symmetric_cocycle_basis(&self, degree: usize) -> Result<SubspaceBasis, CohomologyError> {
        let sub = self.symmetric_cocycles(degree)?;
        Ok(self.to_basis(degree, &sub))
    }

    /// `H^n(G, A) = ker ∂_n / im ∂_{n-1}`.
    pub fn cohomology_group(
        &self,
        degree: usize,
    ) -> Result<FiniteAbelianGroupDescriptor, CohomologyError> {
        let z = self.cocycles(degree)?;
        let b = self.coboundaries(degree)?;
        Ok(FiniteAbelianGroupDescriptor::from_cyclic_orders(&z.quotient(&b)?))
    }

    /// `HS^n(G, A) = ZS^n / ∂(CS^{n-1})`.
    pub fn symmetric_cohomology_group(
        &self,
        degree: usize,
    ) -> Result<FiniteAbelianGroupDescriptor, CohomologyError> {
        let z = self.symmetric_cocycles(degree)?;
        let b = self.symmetric_coboundaries(degree)?;
        Ok(FiniteAbelianGroupDescriptor::from_cyclic_orders(&z.quotient(&b)?))
    }

    /// Kernel of `HS^n -> H^n`, i.e. `(ZS^n ∩ B^n) / BS^n`.
    pub fn natural_map_kernel(
        &self,
        degree: usize,
    ) -> Result<FiniteAbelianGroupDescriptor, CohomologyError> {
        if degree == 0 {
            self.check(0)?;
            return Ok(FiniteAbelianGroupDescriptor::trivial());
        }
        let zs = self.symmetric_cocycles(degree)?;
        let b = self.coboundaries(degree)?;
        let bs = self.symmetric_coboundaries(degree)?;
        let meet = zs.intersect(&b)?;
        Ok(FiniteAbelianGroupDescriptor::from_cyclic_orders(&meet.quotient(&bs)?))
    }

    /// Some `φ` with `∂φ = σ` (symmetric when requested), or `None`.
    pub fn coboundary_witness(
        &self,
        sigma: &Cochain,
        restrict_symmetric: bool,
    ) -> Result<Option<Cochain>, CohomologyError> {
        let n = sigma.degree();
        if n == 0 {
            return Err(CohomologyError::DegreeZero);
        }
        let d = self.differential_matrix(n - 1)?;
        let m = self.module.modulus();
        let found = if restrict_symmetric {
            let cs = self.cs_submodule(n - 1)?;
            let basis: Vec<Vec<u64>> = cs.basis().into_iter().map(|(v, _)| v).collect();
            let k = ModMatrix::from_columns(self.dim(n - 1), &basis, m);
            let dk = d.mul(&k)?;
            solve(&dk, sigma.values()).map(|z| k.mul_vec(&z))
        } else {
            solve(&d, sigma.values())
        };
        Ok(match found {
            Some(v) => Some(Cochain::from_values(self.module.clone(), n - 1, v)?),
            None => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    fn module(group: FiniteGroup, m: u64) -> Arc<GModule> {
        Arc::new(GModule::trivial(Arc::new(group), m, 1).unwrap())
    }

    fn z2z2() -> Cohomology {
        Cohomology::new(module(FiniteGroup::cyclic(2).unwrap(), 2))
    }

    /// Cochains of degree `n`, enumerated exhaustively.
    fn all(a: &Arc<GModule>, n: usize) -> Vec<Cochain> {
        let size = Cochain::space_size(a, n).unwrap();
        (0..size)
            .map(|i| Cochain::from_index(a.clone(), n, i).unwrap())
            .collect()
    }

    #[test]
    fn descriptor_normalises() {
        let d = FiniteAbelianGroupDescriptor::from_cyclic_orders(&[1, 2, 3, 4]);
        assert_eq!(d.invariant_factors(), &[2, 12]);
        assert_eq!(d.order(), Some(24));
        assert_eq!(d.to_string(), "Z/2 x Z/12");
        assert_eq!(FiniteAbelianGroupDescriptor::trivial().to_string(), "0");
    }

    #[test]
    fn differential_matrix_examples() {
        let c = z2z2();
        let d0 = c.differential_matrix(0).unwrap();
        assert_eq!((d0.rows(), d0.cols()), (2, 1));
        assert!(d0.is_zero());
        // rank one over Z/2: image is the constants
        let d1 = c.differential_matrix(1).unwrap();
        let img = Submodule::image(&d1);
        assert_eq!(img.cyclic_orders(), vec![2]);
        assert!(img.contains(&[1, 1, 1, 1]));
        for n in 0..3 {
            let a = c.differential_matrix(n).unwrap();
            let b = c.differential_matrix(n + 1).unwrap();
            assert!(b.mul(&a).unwrap().is_zero());
        }
    }

    #[test]
    fn z2_values() {
        let c = z2z2();
        assert_eq!(c.cohomology_group(0).unwrap().invariant_factors(), &[2]);
        assert_eq!(c.cohomology_group(1).unwrap().invariant_factors(), &[2]);
        assert_eq!(c.cohomology_group(2).unwrap().invariant_factors(), &[2]);
        assert_eq!(c.symmetric_cohomology_group(0).unwrap().invariant_factors(), &[2]);
        assert_eq!(c.symmetric_cohomology_group(1).unwrap().invariant_factors(), &[2]);
        assert!(c.symmetric_cohomology_group(2).unwrap().is_trivial());
        for n in 0..=2 {
            assert!(c.natural_map_kernel(n).unwrap().is_trivial());
        }
    }

    #[test]
    fn symmetric_subspace_examples() {
        let c = z2z2();
        let cs0 = c.symmetric_subspace(0).unwrap();
        assert_eq!(cs0.as_group().order(), Some(2));
        let cs1 = c.symmetric_subspace(1).unwrap();
        assert_eq!(cs1.as_group().order(), Some(4));
        let cs2 = c.symmetric_subspace(2).unwrap();
        assert_eq!(cs2.as_group().invariant_factors(), &[2, 2]);
        for g in cs2.generators() {
            assert!(g.is_symmetric());
            let v = |t: &[usize]| g.value(t)[0];
            assert_eq!(v(&[1, 1]), v(&[1, 0]));
            assert_eq!(v(&[1, 0]), v(&[0, 1]));
        }
        assert_eq!(cs2.relations(), vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn witnesses() {
        let c = z2z2();
        let a = c.module().clone();
        let zero = Cochain::zero(a.clone(), 2).unwrap();
        let w = c.coboundary_witness(&zero, false).unwrap().unwrap();
        assert!(w.differential().is_zero());
        let carry = Cochain::indicator(a.clone(), 2, &[1, 1], &[1]).unwrap();
        assert!(c.coboundary_witness(&carry, false).unwrap().is_none());
        let phi = Cochain::from_values(a.clone(), 1, vec![1, 0]).unwrap();
        let target = phi.differential();
        let w = c.coboundary_witness(&target, false).unwrap().unwrap();
        assert_eq!(w.differential(), target);
        let w = c.coboundary_witness(&target, true).unwrap().unwrap();
        assert!(w.is_symmetric());
        assert_eq!(w.differential(), target);
        assert_eq!(
            c.coboundary_witness(&Cochain::zero(a, 0).unwrap(), false).unwrap_err(),
            CohomologyError::DegreeZero
        );
    }

    #[test]
    fn caps() {
        let c = Cohomology::new(module(FiniteGroup::cyclic(6).unwrap(), 2));
        assert!(matches!(c.cohomology_group(5), Err(CohomologyError::DegreeCap { .. })));
        let c = Cohomology::new(module(FiniteGroup::cyclic(12).unwrap(), 2));
        assert!(matches!(c.cohomology_group(4), Err(CohomologyError::SizeCap { .. })));
    }

    /// Exhaustive oracle: counts cocycles and coboundaries directly.
    fn brute_orders(a: &Arc<GModule>, n: usize) -> (usize, usize, usize, usize) {
        use std::collections::HashSet;
        let z = all(a, n).into_iter().filter(Cochain::is_cocycle).count();
        let zs = all(a, n)
            .into_iter()
            .filter(|s| s.is_cocycle() && s.is_symmetric())
            .count();
        let (b, bs) = if n == 0 {
            (1, 1)
        } else {
            let lower = all(a, n - 1);
            let b: HashSet<Vec<u64>> =
                lower.iter().map(|p| p.differential().values().to_vec()).collect();
            let bs: HashSet<Vec<u64>> = lower
                .iter()
                .filter(|p| p.is_symmetric())
                .map(|p| p.differential().values().to_vec())
                .collect();
            (b.len(), bs.len())
        };
        (z, b, zs, bs)
    }

    #[test]
    fn orders_match_enumeration() {
        let mut cases = Vec::new();
        for (g, m) in [(2usize, 2u64), (2, 3), (3, 2), (3, 3), (2, 4)] {
            cases.push(module(FiniteGroup::cyclic(g).unwrap(), m));
        }
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let sign = s3.characters_to_z2().pop().unwrap();
        cases.push(Arc::new(GModule::sign(s3, 3, &sign).unwrap()));
        let z2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
        cases.push(Arc::new(GModule::sign(z2, 3, &[false, true]).unwrap()));
        for a in cases {
            let c = Cohomology::new(a.clone());
            for n in 0..=3 {
                if Cochain::space_size(&a, n).is_none_or(|s| s > 1 << 16) {
                    continue;
                }
                let (z, b, zs, bs) = brute_orders(&a, n);
                let h = c.cohomology_group(n).unwrap().order().unwrap() as usize;
                let hs = c.symmetric_cohomology_group(n).unwrap().order().unwrap() as usize;
                assert_eq!(h * b, z, "H^{n} for {a:?}");
                assert_eq!(hs * bs, zs, "HS^{n} for {a:?}");
            }
        }
    }

    #[test]
    fn kernel_agrees_with_representative_witnesses() {
        // |ker| = #{symmetric cocycles that are coboundaries} / |BS|
        for (g, m) in [(2usize, 2u64), (3, 3), (2, 4), (4, 2)] {
            let a = module(FiniteGroup::cyclic(g).unwrap(), m);
            let c = Cohomology::new(a.clone());
            for n in 1..=2 {
                if Cochain::space_size(&a, n).is_none_or(|s| s > 1 << 16) {
                    continue;
                }
                let zs: Vec<Cochain> = all(&a, n)
                    .into_iter()
                    .filter(|s| s.is_cocycle() && s.is_symmetric())
                    .collect();
                let hit = zs
                    .iter()
                    .filter(|s| c.coboundary_witness(s, false).unwrap().is_some())
                    .count();
                let hit_sym = zs
                    .iter()
                    .filter(|s| c.coboundary_witness(s, true).unwrap().is_some())
                    .count();
                let k = c.natural_map_kernel(n).unwrap().order().unwrap() as usize;
                assert_eq!(k * hit_sym, hit);
            }
        }
    }

    #[test]
    fn h0_is_fixed_points() {
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let sign = s3.characters_to_z2().pop().unwrap();
        for m in [2u64, 3, 4] {
            let a = Arc::new(GModule::sign(s3.clone(), m, &sign).unwrap());
            let c = Cohomology::new(a.clone());
            let h0 = c.cohomology_group(0).unwrap();
            assert_eq!(h0.order().unwrap() as usize, a.fixed_points().len());
            assert_eq!(c.symmetric_cohomology_group(0).unwrap(), h0);
        }
    }

    #[test]
    fn symmetric_subcomplex_is_closed() {
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let sign = s3.characters_to_z2().pop().unwrap();
        let a = Arc::new(GModule::sign(s3, 3, &sign).unwrap());
        let c = Cohomology::new(a);
        for n in 0..=2 {
            for g in c.symmetric_subspace(n).unwrap().generators() {
                assert!(g.is_symmetric());
                assert!(g.differential().is_symmetric(), "degree {n}");
            }
        }
    }
}
