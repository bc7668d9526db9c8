//! Rotational-speed derivative operators on moments.
//!
//! A rotation at unit speed in the plane of axes `(a, b)` moves every point
//! with velocity `ẋ = E x`, where `E` is antisymmetric with `E[b][a] = +1` and
//! `E[a][b] = −1`. With weights carried along with the points, the moment
//! `m_p` then changes at rate
//!
//! ```text
//! ṁ_p = Σ_i Σ_j p_i · E[i][j] · m_{p − e_i + e_j}
//! ```
//!
//! Every term has the order of `p`, so the derivative of a moment vector is an
//! integer matrix acting on the same vector. Products of moments follow the
//! product rule, which lifts the operator onto any monomial basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::multiindex::{BasisDescriptor, MonomialEntry, MultiIndex, Part};
pub use crate::sparse::SparseIntMatrix;

/// An oriented coordinate plane, axes 0-based. Planes produced by
/// [`rotation_planes`] always have `a < b`; the reversed pair denotes the same
/// plane rotated the other way.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationPlane {
    pub a: usize,
    pub b: usize,
}

impl RotationPlane {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidArgument(format!("plane needs two distinct axes, got ({a},{a})")));
        }
        Ok(Self { a, b })
    }

    pub fn reversed(self) -> Self {
        Self { a: self.b, b: self.a }
    }

    fn check(self, dim: usize) -> Result<()> {
        if self.a >= dim || self.b >= dim {
            return Err(Error::InvalidArgument(format!("plane {self} outside dimension {dim}")));
        }
        Ok(())
    }
}

/// Printed with 1-based axes, e.g. `(1,2)`.
impl fmt::Display for RotationPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a + 1, self.b + 1)
    }
}

impl fmt::Debug for RotationPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All `n(n−1)/2` planes `(a, b)`, `a < b`, lexicographically.
pub fn rotation_planes(dim: usize) -> Result<Vec<RotationPlane>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok((0..dim)
        .flat_map(|a| (a + 1..dim).map(move |b| RotationPlane { a, b }))
        .collect())
}

/// The `n−1` planes containing the first axis.
pub fn x_axis_fan(dim: usize) -> Result<Vec<RotationPlane>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok((1..dim).map(|b| RotationPlane { a: 0, b }).collect())
}

/// Which rotation planes a kernel system is built from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PlaneSet {
    #[default]
    Fan,
    All,
}

impl PlaneSet {
    pub fn planes(self, dim: usize) -> Result<Vec<RotationPlane>> {
        match self {
            PlaneSet::Fan => x_axis_fan(dim),
            PlaneSet::All => rotation_planes(dim),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlaneSet::Fan => "fan",
            PlaneSet::All => "all",
        }
    }
}

impl std::str::FromStr for PlaneSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fan" => Ok(PlaneSet::Fan),
            "all" => Ok(PlaneSet::All),
            _ => Err(Error::InvalidArgument(format!("plane set must be fan or all, got {s:?}"))),
        }
    }
}

/// The antisymmetric unit-speed generator `E` of `plane` as a dense `n×n`
/// matrix (`E[b][a] = +1`, `E[a][b] = −1`).
pub fn generator_sign_convention(dim: usize, plane: RotationPlane) -> Result<Vec<Vec<i64>>> {
    plane.check(dim)?;
    let mut e = vec![vec![0i64; dim]; dim];
    e[plane.b][plane.a] = 1;
    e[plane.a][plane.b] = -1;
    Ok(e)
}

/// Integer linear combination of same-order moments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearCombo {
    pub terms: Vec<(MultiIndex, BigInt)>,
}

impl LinearCombo {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> BigInt {
        self.terms
            .iter()
            .find(|(i, _)| i == idx)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }
}

/// Time derivative of a single moment under unit rotation speed in `plane`.
pub fn derivative_single(idx: &MultiIndex, plane: RotationPlane) -> Result<LinearCombo> {
    let e = generator_sign_convention(idx.dim(), plane)?;
    let mut acc: Vec<(MultiIndex, BigInt)> = Vec::new();
    for (i, row) in e.iter().enumerate() {
        let pi = idx.exponents()[i];
        if pi == 0 {
            continue;
        }
        for (j, &lij) in row.iter().enumerate() {
            if lij == 0 {
                continue;
            }
            let target = idx.shifted(i, j).expect("p_i > 0");
            let coef = BigInt::from(pi) * lij;
            match acc.iter_mut().find(|(t, _)| *t == target) {
                Some((_, c)) => *c += coef,
                None => acc.push((target, coef)),
            }
        }
    }
    acc.retain(|(_, c)| !c.is_zero());
    acc.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(LinearCombo { terms: acc })
}

/// Matrix `M` with `v̇ = M·v` for the basis `desc` under unit rotation speed
/// in `plane`. Rows and columns follow the basis order.
pub fn operator_on_basis(desc: &BasisDescriptor, plane: RotationPlane) -> Result<SparseIntMatrix> {
    plane.check(desc.dim())?;
    let mut cache: HashMap<MultiIndex, LinearCombo> = HashMap::new();
    let mut rows = Vec::with_capacity(desc.len());
    for entry in desc.entries() {
        let mut row: Vec<(usize, BigInt)> = Vec::new();
        for (pos, (idx, power)) in entry.factors().iter().enumerate() {
            let combo = match cache.get(idx) {
                Some(c) => c,
                None => cache.entry(idx.clone()).or_insert(derivative_single(idx, plane)?),
            };
            for (target, coef) in &combo.terms {
                let derived = replace_one(entry, pos, target);
                let col = desc.position(&derived).ok_or_else(|| {
                    Error::BasisMismatch(format!(
                        "derivative of {entry:?} produced {derived:?}, which is not in the basis"
                    ))
                })?;
                row.push((col, coef * BigInt::from(*power)));
            }
        }
        rows.push(row);
    }
    SparseIntMatrix::from_rows(desc.len(), rows)
}

/// `entry` with one power of factor `pos` replaced by `target`.
fn replace_one(entry: &MonomialEntry, pos: usize, target: &MultiIndex) -> MonomialEntry {
    let factors = entry
        .factors()
        .iter()
        .enumerate()
        .map(|(i, (idx, k))| (idx.clone(), if i == pos { k - 1 } else { *k }))
        .chain(std::iter::once((target.clone(), 1)));
    MonomialEntry::from_factors(factors)
}

type CacheKey = (usize, Vec<Part>, RotationPlane);

/// Thread-safe cache of lifted operators keyed by `(dimension, parts, plane)`.
#[derive(Default)]
pub struct OperatorCache {
    inner: Mutex<HashMap<CacheKey, Arc<SparseIntMatrix>>>,
}

impl OperatorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, desc: &BasisDescriptor, plane: RotationPlane) -> Result<Arc<SparseIntMatrix>> {
        let key = (desc.dim(), desc.parts().to_vec(), plane);
        if let Some(m) = self.inner.lock().expect("operator cache poisoned").get(&key) {
            return Ok(Arc::clone(m));
        }
        // build outside the lock; a concurrent duplicate build yields the same matrix
        let m = Arc::new(operator_on_basis(desc, plane)?);
        let mut guard = self.inner.lock().expect("operator cache poisoned");
        Ok(Arc::clone(guard.entry(key).or_insert(m)))
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("operator cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::{enumerate_order, product_basis};

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    fn plane(a: usize, b: usize) -> RotationPlane {
        RotationPlane::new(a - 1, b - 1).unwrap()
    }

    #[test]
    fn plane_lists() {
        assert_eq!(rotation_planes(2).unwrap(), vec![plane(1, 2)]);
        assert_eq!(
            rotation_planes(3).unwrap(),
            vec![plane(1, 2), plane(1, 3), plane(2, 3)]
        );
        assert_eq!(rotation_planes(4).unwrap().len(), 6);
        assert_eq!(x_axis_fan(4).unwrap(), vec![plane(1, 2), plane(1, 3), plane(1, 4)]);
        assert!(rotation_planes(1).is_err());
    }

    #[test]
    fn generator_2d() {
        assert_eq!(
            generator_sign_convention(2, plane(1, 2)).unwrap(),
            vec![vec![0, -1], vec![1, 0]]
        );
    }

    #[test]
    fn generator_3d_yz_block() {
        // ω₁ (the yz plane) enters L_3D as −ω₁ at (y,z) and +ω₁ at (z,y)
        let e = generator_sign_convention(3, plane(2, 3)).unwrap();
        assert_eq!(e, vec![vec![0, 0, 0], vec![0, 0, -1], vec![0, 1, 0]]);
    }

    #[test]
    fn generator_antisymmetric() {
        let e = generator_sign_convention(4, plane(1, 3)).unwrap();
        for (i, row) in e.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(v + e[j][i], 0);
            }
        }
        assert_eq!(e.iter().flatten().filter(|v| **v != 0).count(), 2);
    }

    #[test]
    fn single_derivatives_2d() {
        let d = derivative_single(&mi(&[2, 0]), plane(1, 2)).unwrap();
        assert_eq!(d.terms, vec![(mi(&[1, 1]), BigInt::from(-2))]);
        let d = derivative_single(&mi(&[1, 1]), plane(1, 2)).unwrap();
        assert_eq!(d.coefficient(&mi(&[2, 0])), BigInt::from(1));
        assert_eq!(d.coefficient(&mi(&[0, 2])), BigInt::from(-1));
        assert_eq!(d.terms.len(), 2);
        assert!(derivative_single(&MultiIndex::zero(3), plane(1, 3)).unwrap().is_empty());
    }

    #[test]
    fn matches_2d_closed_form() {
        // ṁ_{p1 p2} = −p1 m_{p1−1,p2+1} + p2 m_{p1+1,p2−1}
        for idx in enumerate_order(2, 5).unwrap() {
            let (p1, p2) = (idx.exponents()[0], idx.exponents()[1]);
            let d = derivative_single(&idx, plane(1, 2)).unwrap();
            if p1 > 0 {
                assert_eq!(d.coefficient(&mi(&[p1 - 1, p2 + 1])), BigInt::from(-(p1 as i64)));
            }
            if p2 > 0 {
                assert_eq!(d.coefficient(&mi(&[p1 + 1, p2 - 1])), BigInt::from(p2));
            }
        }
    }

    #[test]
    fn order_preserved() {
        for p in 0..5 {
            for idx in enumerate_order(4, p).unwrap() {
                for pl in rotation_planes(4).unwrap() {
                    for (t, _) in derivative_single(&idx, pl).unwrap().terms {
                        assert_eq!(t.order(), p);
                    }
                }
            }
        }
    }

    #[test]
    fn operator_v12() {
        let d = product_basis(2, &[Part::new(2, 1)]).unwrap();
        let m = operator_on_basis(&d, plane(1, 2)).unwrap();
        let want = SparseIntMatrix::from_dense(&[vec![0, -2, 0], vec![1, 0, -1], vec![0, 2, 0]]).unwrap();
        assert_eq!(m, want);
    }

    #[test]
    fn operator_v22_product_rule_row() {
        let d = product_basis(2, &[Part::new(2, 2)]).unwrap();
        let m = operator_on_basis(&d, plane(1, 2)).unwrap();
        let e = MonomialEntry::from_factors([(mi(&[2, 0]), 1), (mi(&[0, 2]), 1)]);
        let row = d.position(&e).unwrap();
        let dense = m.to_dense();
        let want: Vec<BigInt> = [0, 2, 0, 0, -2, 0].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(dense[row], want);
    }

    #[test]
    fn reversed_plane_negates() {
        let d = product_basis(3, &[Part::new(2, 1), Part::new(3, 1)]).unwrap();
        for pl in rotation_planes(3).unwrap() {
            let m = operator_on_basis(&d, pl).unwrap();
            let r = operator_on_basis(&d, pl.reversed()).unwrap();
            assert_eq!(m.neg(), r);
        }
    }

    #[test]
    fn zeroth_row_vanishes() {
        let d = product_basis(3, &[Part::new(0, 1), Part::new(2, 1)]).unwrap();
        let e = MonomialEntry::from_factors([(MultiIndex::zero(3), 1), (mi(&[2, 0, 0]), 1)]);
        let d0 = product_basis(3, &[Part::new(0, 2)]).unwrap();
        for pl in rotation_planes(3).unwrap() {
            let m = operator_on_basis(&d0, pl).unwrap();
            assert!(m.is_zero());
            // a mixed basis still carries μ₀ as a passive factor
            let m = operator_on_basis(&d, pl).unwrap();
            assert!(d.position(&e).is_some());
            assert_eq!(m.nrows(), d.len());
        }
    }

    #[test]
    fn cache_reuses_matrices() {
        let cache = OperatorCache::new();
        let d = product_basis(3, &[Part::new(2, 2)]).unwrap();
        let a = cache.get(&d, plane(1, 2)).unwrap();
        let b = cache.get(&d, plane(1, 2)).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
        cache.get(&d, plane(1, 3)).unwrap();
        assert_eq!(cache.len(), 2);
    }
}
