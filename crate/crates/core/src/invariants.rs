//! Scale, rotation and affine invariants assembled from derivative operators
//! and exact kernels.
//!
//! * Scale: an entry `Π μ_{pⁱ}^{kᵢ}` whose per-coordinate weights
//!   `Σᵢ (p_jⁱ + 1) kᵢ` all equal `d` picks up `Π σ_j^d` under the diagonal
//!   scaling `x_j → σ_j x_j`, exactly like `μ₀^d`, so the ratio is invariant.
//! * Rotation: `αᵀv` is invariant when `αᵀ M_plane = 0` for the lifted
//!   operator of every plane, i.e. `α ∈ ker [M₁ᵀ; M₂ᵀ; …]`.
//! * Affine: restricting the operator rows to the scale-selected entries and
//!   solving the same kernel gives combinations that are invariant under
//!   rotation and, entry by entry, under anisotropic scaling. Since any proper
//!   linear map factors as `R₂ S R₁`, the combination is affine invariant.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{
    clear_denominators, echelon, kernel_from_echelon, normalize_vector, prune_zero_rows, same_span,
    stack_transposed, KernelBasis,
};
use crate::generators::{rotation_planes, OperatorCache, PlaneSet, SparseIntMatrix};
use crate::multiindex::{normalize_parts, product_basis, BasisDescriptor, MonomialEntry, Part};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvariantClass {
    Scale,
    Rotation,
    Affine,
}

impl InvariantClass {
    pub fn name(self) -> &'static str {
        match self {
            InvariantClass::Scale => "scale",
            InvariantClass::Rotation => "rotation",
            InvariantClass::Affine => "affine",
        }
    }
}

impl fmt::Display for InvariantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InvariantClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scale" => Ok(InvariantClass::Scale),
            "rotation" => Ok(InvariantClass::Rotation),
            "affine" => Ok(InvariantClass::Affine),
            _ => Err(Error::InvalidArgument(format!(
                "class must be scale, rotation or affine, got {s:?}"
            ))),
        }
    }
}

/// `Σ coef · entry / μ₀^d` over one basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPolynomial {
    pub dim: usize,
    pub class: InvariantClass,
    /// Parts of the basis the invariant was generated from.
    pub parts: Vec<Part>,
    pub terms: Vec<(MonomialEntry, BigRational)>,
    pub denominator_power: u32,
}

impl InvariantPolynomial {
    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.max_order()).max().unwrap_or(0)
    }

    pub fn descriptor(&self) -> Result<BasisDescriptor> {
        product_basis(self.dim, &self.parts)
    }

    /// Coefficients laid out over `desc`.
    pub fn coefficient_vector(&self, desc: &BasisDescriptor) -> Result<Vec<BigRational>> {
        let mut v = vec![BigRational::zero(); desc.len()];
        for (entry, c) in &self.terms {
            let pos = desc
                .position(entry)
                .ok_or_else(|| Error::BasisMismatch(format!("{entry:?} is not in the basis")))?;
            v[pos] += c;
        }
        Ok(v)
    }

    /// Same invariant scaled so its coefficients are coprime integers with a
    /// positive leading term.
    pub fn normalized(&self) -> Self {
        let ints = normalize_vector(clear_denominators(
            &self.terms.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>(),
        ));
        let terms = self
            .terms
            .iter()
            .zip(ints)
            .map(|((e, _), c)| (e.clone(), BigRational::from_integer(c)))
            .collect();
        Self { terms, ..self.clone() }
    }

    pub fn to_plain_text(&self) -> String {
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c < &BigRational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                s.push_str(&format!("{mag}*"));
            }
            s.push_str(&e.label());
        }
        if self.denominator_power > 0 {
            format!("({s}) / m{}^{}", "0".repeat(self.dim), self.denominator_power)
        } else {
            s
        }
    }
}

fn polynomial_from_vector(
    desc: &BasisDescriptor,
    columns: &[usize],
    alpha: &[BigInt],
    class: InvariantClass,
    d: u32,
) -> InvariantPolynomial {
    let terms = columns
        .iter()
        .zip(alpha)
        .filter(|(_, a)| !a.is_zero())
        .map(|(&c, a)| (desc.entries()[c].clone(), BigRational::from_integer(a.clone())))
        .collect();
    InvariantPolynomial {
        dim: desc.dim(),
        class,
        parts: desc.parts().to_vec(),
        terms,
        denominator_power: d,
    }
}

/// Entries of a basis that are invariant to anisotropic scaling once divided
/// by `μ₀^d`.
#[derive(Clone, Debug)]
pub struct ScaleSelection<'a> {
    pub descriptor: &'a BasisDescriptor,
    /// Positions in the descriptor, increasing.
    pub selected: Vec<usize>,
    /// Common per-coordinate weight. Every entry of a basis has the same total
    /// weight `Σ kᵢ(pᵢ + n)`, so `d` is that total over `n`; when it is not an
    /// integer nothing is selected and `d` is 0.
    pub d: u32,
}

impl ScaleSelection<'_> {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

pub fn select_scale_invariant(desc: &BasisDescriptor) -> ScaleSelection<'_> {
    let n = desc.dim() as u32;
    let total: u32 = desc.parts().iter().map(|p| p.degree * (p.order + n)).sum();
    if !total.is_multiple_of(n) {
        return ScaleSelection {
            descriptor: desc,
            selected: Vec::new(),
            d: 0,
        };
    }
    let d = total / n;
    let selected = desc
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.scale_weights(desc.dim()).iter().all(|&w| w == d))
        .map(|(i, _)| i)
        .collect();
    ScaleSelection {
        descriptor: desc,
        selected,
        d,
    }
}

/// One single-term invariant `entry / μ₀^d` per selected entry.
pub fn scale_invariants(desc: &BasisDescriptor) -> Vec<InvariantPolynomial> {
    let sel = select_scale_invariant(desc);
    sel.selected
        .iter()
        .map(|&i| InvariantPolynomial {
            dim: desc.dim(),
            class: InvariantClass::Scale,
            parts: desc.parts().to_vec(),
            terms: vec![(desc.entries()[i].clone(), BigRational::one())],
            denominator_power: sel.d,
        })
        .collect()
}

/// Sizes of the linear system behind one generation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationReport {
    pub class: InvariantClass,
    pub planes: PlaneSet,
    pub basis_size: usize,
    /// Scale-selected entries (scale and affine classes).
    pub selected: Option<usize>,
    pub d: u32,
    pub stacked_shape: (usize, usize),
    pub pruned_shape: (usize, usize),
    pub known_rows: usize,
    pub kernel_dim: usize,
}

impl fmt::Display for GenerationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "class={} planes={} basis={} ",
            self.class,
            self.planes.name(),
            self.basis_size
        )?;
        if let Some(s) = self.selected {
            write!(f, "selected={s} ")?;
        }
        write!(
            f,
            "d={} stacked={}x{} pruned={}x{} known={} kernel={}",
            self.d,
            self.stacked_shape.0,
            self.stacked_shape.1,
            self.pruned_shape.0,
            self.pruned_shape.1,
            self.known_rows,
            self.kernel_dim
        )
    }
}

#[derive(Clone, Debug)]
pub struct Generation {
    pub invariants: Vec<InvariantPolynomial>,
    pub report: GenerationReport,
    /// Kernel over the system's columns (full basis for rotation, selected
    /// entries for affine, unused for scale).
    pub kernel: KernelBasis,
    /// Basis positions of the kernel's coordinates.
    pub columns: Vec<usize>,
}

/// Generates invariants, reusing lifted operators across requests.
pub struct InvariantGenerator {
    planes: PlaneSet,
    cache: OperatorCache,
}

impl Default for InvariantGenerator {
    fn default() -> Self {
        Self::new(PlaneSet::Fan)
    }
}

impl InvariantGenerator {
    pub fn new(planes: PlaneSet) -> Self {
        Self {
            planes,
            cache: OperatorCache::new(),
        }
    }

    pub fn planes(&self) -> PlaneSet {
        self.planes
    }

    pub fn cache(&self) -> &OperatorCache {
        &self.cache
    }

    /// The stacked kernel system for `class` before pruning, with the basis
    /// positions of its columns and the selection weight `d`.
    pub fn kernel_system(
        &self,
        desc: &BasisDescriptor,
        class: InvariantClass,
        known: &[Vec<BigRational>],
    ) -> Result<(SparseIntMatrix, Vec<usize>, u32)> {
        for k in known {
            if k.len() != desc.len() {
                return Err(Error::ShapeMismatch(format!(
                    "known vector of length {} against basis of {}",
                    k.len(),
                    desc.len()
                )));
            }
        }
        let planes = self.planes.planes(desc.dim())?;
        let ops = planes
            .iter()
            .map(|&p| self.cache.get(desc, p))
            .collect::<Result<Vec<_>>>()?;
        match class {
            InvariantClass::Scale => Err(Error::InvalidArgument(
                "scale invariants need no kernel system".into(),
            )),
            InvariantClass::Rotation => {
                let refs: Vec<&SparseIntMatrix> = ops.iter().map(|m| m.as_ref()).collect();
                let stacked = stack_transposed(&refs, known)?;
                Ok((stacked, (0..desc.len()).collect(), 0))
            }
            InvariantClass::Affine => {
                let sel = select_scale_invariant(desc);
                let restricted: Vec<SparseIntMatrix> =
                    ops.iter().map(|m| m.select_rows(&sel.selected)).collect();
                let refs: Vec<&SparseIntMatrix> = restricted.iter().collect();
                let projected = known
                    .iter()
                    .map(|k| project_onto(k, &sel.selected))
                    .collect::<Result<Vec<_>>>()?;
                if sel.is_empty() {
                    return Ok((SparseIntMatrix::zeros(0, 0), Vec::new(), sel.d));
                }
                let stacked = stack_transposed(&refs, &projected)?;
                Ok((stacked, sel.selected, sel.d))
            }
        }
    }

    /// Invariants of `class` from `desc` whose coefficient vectors are
    /// orthogonal to every `known` vector (laid out over the full basis).
    pub fn generate(
        &self,
        desc: &BasisDescriptor,
        class: InvariantClass,
        known: &[Vec<BigRational>],
    ) -> Result<Generation> {
        if class == InvariantClass::Scale {
            let sel = select_scale_invariant(desc);
            let invariants = scale_invariants(desc);
            return Ok(Generation {
                report: GenerationReport {
                    class,
                    planes: self.planes,
                    basis_size: desc.len(),
                    selected: Some(sel.len()),
                    d: sel.d,
                    stacked_shape: (0, 0),
                    pruned_shape: (0, 0),
                    known_rows: 0,
                    kernel_dim: invariants.len(),
                },
                invariants,
                kernel: KernelBasis {
                    ambient: 0,
                    vectors: Vec::new(),
                },
                columns: sel.selected,
            });
        }
        let (stacked, columns, d) = self.kernel_system(desc, class, known)?;
        let pruned = prune_zero_rows(&stacked);
        log::debug!(
            "{class} system for basis of {}: stacked {:?}, pruned {:?}, {} known rows",
            desc.len(),
            stacked.shape(),
            pruned.shape(),
            known.len()
        );
        let kernel = if columns.is_empty() {
            KernelBasis {
                ambient: 0,
                vectors: Vec::new(),
            }
        } else {
            kernel_from_echelon(&echelon(&pruned))
        };
        log::debug!("kernel dimension {}", kernel.len());
        let invariants = kernel
            .vectors
            .iter()
            .map(|alpha| polynomial_from_vector(desc, &columns, alpha, class, d))
            .collect();
        Ok(Generation {
            invariants,
            report: GenerationReport {
                class,
                planes: self.planes,
                basis_size: desc.len(),
                selected: (class == InvariantClass::Affine).then_some(columns.len()),
                d,
                stacked_shape: stacked.shape(),
                pruned_shape: pruned.shape(),
                known_rows: known.len(),
                kernel_dim: kernel.len(),
            },
            kernel,
            columns,
        })
    }
}

/// Restricts a full-basis vector to `columns`; anything outside them must be zero.
fn project_onto(v: &[BigRational], columns: &[usize]) -> Result<Vec<BigRational>> {
    let mut inside = vec![false; v.len()];
    for &c in columns {
        inside[c] = true;
    }
    if let Some(i) = (0..v.len()).find(|&i| !inside[i] && !v[i].is_zero()) {
        return Err(Error::BasisMismatch(format!(
            "known vector has a nonzero coefficient at position {i}, outside the scale selection"
        )));
    }
    Ok(columns.iter().map(|&c| v[c].clone()).collect())
}

pub fn rotation_invariants(desc: &BasisDescriptor, planes: PlaneSet) -> Result<Vec<InvariantPolynomial>> {
    Ok(InvariantGenerator::new(planes)
        .generate(desc, InvariantClass::Rotation, &[])?
        .invariants)
}

pub fn affine_invariants(desc: &BasisDescriptor, planes: PlaneSet) -> Result<Vec<InvariantPolynomial>> {
    Ok(InvariantGenerator::new(planes)
        .generate(desc, InvariantClass::Affine, &[])?
        .invariants)
}

/// Rotation or affine invariants independent of the `known` product vectors.
pub fn independent_invariants(
    desc: &BasisDescriptor,
    known: &[Vec<BigRational>],
    class: InvariantClass,
    planes: PlaneSet,
) -> Result<Vec<InvariantPolynomial>> {
    if class == InvariantClass::Scale {
        return Err(Error::InvalidArgument(
            "redundancy elimination applies to rotation and affine invariants".into(),
        ));
    }
    Ok(InvariantGenerator::new(planes).generate(desc, class, known)?.invariants)
}

/// Coefficients of `a·b` over `target`.
pub fn expand_product(
    a: &InvariantPolynomial,
    b: &InvariantPolynomial,
    target: &BasisDescriptor,
) -> Result<Vec<BigRational>> {
    if a.dim != target.dim() || b.dim != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: if a.dim != target.dim() { a.dim } else { b.dim },
        });
    }
    let mut beta = vec![BigRational::zero(); target.len()];
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e = ea.times(eb);
            let pos = target.position(&e).ok_or_else(|| {
                Error::BasisMismatch(format!("product term {e:?} is not in the target basis"))
            })?;
            beta[pos] += ca * cb;
        }
    }
    Ok(beta)
}

fn same_parts(a: &[Part], b: &[Part]) -> bool {
    let mut a = normalize_parts(a);
    let mut b = normalize_parts(b);
    a.sort();
    b.sort();
    a == b
}

/// Expanded pairwise products of invariants of the sub-descriptors whose
/// combined parts make up `target`. Products of an invariant with itself and
/// with siblings from the same sub-descriptor are included when that
/// sub-descriptor doubled equals the target.
pub fn known_products(
    gen: &InvariantGenerator,
    target: &BasisDescriptor,
    subs: &[Vec<Part>],
    class: InvariantClass,
) -> Result<Vec<Vec<BigRational>>> {
    let mut sub_invs = Vec::with_capacity(subs.len());
    for parts in subs {
        let desc = product_basis(target.dim(), parts)?;
        sub_invs.push(gen.generate(&desc, class, &[])?.invariants);
    }
    let mut rows = Vec::new();
    let mut matched = false;
    for i in 0..subs.len() {
        for j in i..subs.len() {
            let combined: Vec<Part> = subs[i].iter().chain(&subs[j]).copied().collect();
            if !same_parts(&combined, target.parts()) {
                continue;
            }
            matched = true;
            for (ai, a) in sub_invs[i].iter().enumerate() {
                let start = if i == j { ai } else { 0 };
                for b in &sub_invs[j][start..] {
                    rows.push(expand_product(a, b, target)?);
                }
            }
        }
    }
    if !matched {
        return Err(Error::BasisMismatch(
            "no pair of sub-descriptors combines to the target basis".into(),
        ));
    }
    Ok(rows)
}

/// Groups selected entries into orbits under all coordinate permutations.
/// Groups are ordered by their first member; members are basis positions.
pub fn orbit_partition(selection: &ScaleSelection<'_>) -> Vec<Vec<usize>> {
    let desc = selection.descriptor;
    let perms = permutations(desc.dim());
    let mut groups: BTreeMap<MonomialEntry, Vec<usize>> = BTreeMap::new();
    let mut order: Vec<MonomialEntry> = Vec::new();
    for &i in &selection.selected {
        let entry = &desc.entries()[i];
        let key = perms
            .iter()
            .map(|p| entry.permuted(p))
            .min()
            .expect("at least the identity permutation");
        let group = groups.entry(key.clone()).or_default();
        if group.is_empty() {
            order.push(key);
        }
        group.push(i);
    }
    order.into_iter().map(|k| groups.remove(&k).unwrap()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Outcome of solving the affine system with one unknown per orbit.
#[derive(Clone, Debug)]
pub struct OrbitReduction {
    pub invariants: Vec<InvariantPolynomial>,
    pub groups: Vec<Vec<usize>>,
    /// Pruned system shape after merging columns per orbit.
    pub reduced_shape: (usize, usize),
    /// Whether the reduced kernel spans the full kernel. When it does not,
    /// `invariants` come from the full system.
    pub agreed: bool,
}

/// Affine generation with coefficients tied across coordinate-permutation
/// orbits, checked against the unreduced kernel.
pub fn affine_invariants_orbit_reduced(desc: &BasisDescriptor, planes: PlaneSet) -> Result<OrbitReduction> {
    let gen = InvariantGenerator::new(planes);
    let full = gen.generate(desc, InvariantClass::Affine, &[])?;
    let sel = select_scale_invariant(desc);
    let groups = orbit_partition(&sel);
    if sel.is_empty() {
        return Ok(OrbitReduction {
            invariants: full.invariants,
            groups,
            reduced_shape: (0, 0),
            agreed: true,
        });
    }
    let (stacked, columns, d) = gen.kernel_system(desc, InvariantClass::Affine, &[])?;
    let pruned = prune_zero_rows(&stacked);
    // column of each selected entry -> its group
    let mut group_of = vec![0usize; columns.len()];
    for (g, members) in groups.iter().enumerate() {
        for m in members {
            let col = columns.binary_search(m).expect("group member is selected");
            group_of[col] = g;
        }
    }
    let merged_rows = pruned
        .row_vecs()
        .iter()
        .map(|row| row.iter().map(|(c, v)| (group_of[*c], v.clone())).collect())
        .collect();
    let reduced = prune_zero_rows(&SparseIntMatrix::from_rows(groups.len(), merged_rows)?);
    let gamma = kernel_from_echelon(&echelon(&reduced));
    let alphas: Vec<Vec<BigInt>> = gamma
        .vectors
        .iter()
        .map(|g| normalize_vector(group_of.iter().map(|&gi| g[gi].clone()).collect()))
        .collect();
    let expanded = KernelBasis {
        ambient: columns.len(),
        vectors: alphas.clone(),
    };
    let agreed = same_span(&expanded, &full.kernel);
    if !agreed {
        log::warn!(
            "orbit reduction found {} of {} affine invariants for {:?}; using the full system",
            expanded.len(),
            full.kernel.len(),
            desc.parts()
        );
        return Ok(OrbitReduction {
            invariants: full.invariants,
            groups,
            reduced_shape: reduced.shape(),
            agreed,
        });
    }
    let invariants = alphas
        .iter()
        .map(|a| polynomial_from_vector(desc, &columns, a, InvariantClass::Affine, d))
        .collect();
    Ok(OrbitReduction {
        invariants,
        groups,
        reduced_shape: reduced.shape(),
        agreed,
    })
}

/// Exact check of `αᵀ M = 0` for the operator `M` of every rotation plane.
pub fn kernel_condition_holds(inv: &InvariantPolynomial) -> Result<bool> {
    if inv.class == InvariantClass::Scale {
        return Ok(true);
    }
    let desc = inv.descriptor()?;
    let alpha = clear_denominators(&inv.coefficient_vector(&desc)?);
    let cache = OperatorCache::new();
    for plane in rotation_planes(desc.dim())? {
        let m = cache.get(&desc, plane)?;
        if !m.vec_mul(&alpha)?.iter().all(Zero::is_zero) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    fn basis(dim: usize, parts: &[(u32, u32)]) -> BasisDescriptor {
        let parts: Vec<Part> = parts.iter().map(|&(p, k)| Part::new(p, k)).collect();
        product_basis(dim, &parts).unwrap()
    }

    fn labels(desc: &BasisDescriptor, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| desc.entries()[i].label()).collect()
    }

    #[test]
    fn selection_v22() {
        let d = basis(2, &[(2, 2)]);
        let s = select_scale_invariant(&d);
        assert_eq!(s.d, 4);
        assert_eq!(labels(&d, &s.selected), ["m20*m02", "m11^2"]);
    }

    #[test]
    fn selection_v12() {
        let d = basis(2, &[(2, 1)]);
        let s = select_scale_invariant(&d);
        assert_eq!(s.d, 2);
        assert_eq!(labels(&d, &s.selected), ["m11"]);
    }

    #[test]
    fn selection_v43_3d() {
        let d = basis(3, &[(3, 4)]);
        let s = select_scale_invariant(&d);
        assert_eq!(s.d, 8);
        assert_eq!(s.len(), 25);
    }

    #[test]
    fn nonintegral_weight_selects_nothing() {
        let d = basis(3, &[(2, 1)]);
        let s = select_scale_invariant(&d);
        assert!(s.is_empty());
        assert!(scale_invariants(&d).is_empty());
    }

    #[test]
    fn scale_invariants_of_small_bases() {
        let d3 = basis(3, &[(2, 3)]);
        let target = MonomialEntry::from_factors([
            (mi(&[2, 0, 0]), 1),
            (mi(&[0, 2, 0]), 1),
            (mi(&[0, 0, 2]), 1),
        ]);
        let inv = scale_invariants(&d3)
            .into_iter()
            .find(|i| i.terms[0].0 == target)
            .unwrap();
        assert_eq!(inv.denominator_power, 5);

        let d4 = basis(4, &[(4, 1)]);
        let inv = scale_invariants(&d4);
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0].terms[0].0, MonomialEntry::from_factors([(mi(&[1, 1, 1, 1]), 1)]));
        assert_eq!(inv[0].denominator_power, 2);
    }

    #[test]
    fn rotation_v12() {
        let inv = rotation_invariants(&basis(2, &[(2, 1)]), PlaneSet::Fan).unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0].to_plain_text(), "m20 + m02");
    }

    #[test]
    fn affine_v22() {
        let inv = affine_invariants(&basis(2, &[(2, 2)]), PlaneSet::Fan).unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0].to_plain_text(), "(m20*m02 - m11^2) / m00^4");
    }

    #[test]
    fn odd_order_has_no_rotation_invariant() {
        assert!(rotation_invariants(&basis(2, &[(3, 1)]), PlaneSet::Fan)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn single_term_product() {
        let d = basis(2, &[(2, 1)]);
        let s = scale_invariants(&d);
        let target = basis(2, &[(2, 2)]);
        let beta = expand_product(&s[0], &s[0], &target).unwrap();
        let nz: Vec<usize> = (0..beta.len()).filter(|&i| !beta[i].is_zero()).collect();
        assert_eq!(labels(&target, &nz), ["m11^2"]);
        assert!(matches!(
            expand_product(&s[0], &s[0], &d),
            Err(Error::BasisMismatch(_))
        ));
    }

    #[test]
    fn orbits_in_2d() {
        let d = basis(2, &[(2, 2)]);
        let s = select_scale_invariant(&d);
        assert_eq!(orbit_partition(&s), vec![vec![2], vec![3]]);
    }

    #[test]
    fn scale_class_has_no_redundancy_path() {
        let d = basis(2, &[(2, 2)]);
        assert!(independent_invariants(&d, &[], InvariantClass::Scale, PlaneSet::Fan).is_err());
    }

    #[test]
    fn known_width_checked() {
        let d = basis(2, &[(2, 2)]);
        let bad = vec![vec![BigRational::one(); 3]];
        assert!(matches!(
            independent_invariants(&d, &bad, InvariantClass::Rotation, PlaneSet::Fan),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
