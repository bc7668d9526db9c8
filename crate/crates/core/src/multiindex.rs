//! Multi-indices addressing moments, and the monomial bases built from them.
//!
//! Ordering conventions (fixed, every matrix and kernel basis in the crate
//! depends on them):
//!
//! * [`MultiIndex`] is ordered by total order first, then graded
//!   reverse-lexicographically with the *larger* monomial first. For two
//!   indices of the same order, the one with the smaller exponent in the last
//!   differing coordinate comes first. In 2D this gives `(2,0), (1,1), (0,2)`;
//!   in 3D order 2 it gives `x², xy, y², xz, yz, z²`.
//! * A degree-`k` monomial basis over a base list lists the multisets of base
//!   positions `i₁ ≤ … ≤ i_k` in lexicographic order of the position tuple.
//! * A product basis is the cartesian product of its parts' monomial bases
//!   with the first part varying slowest.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponent tuple `(p₁,…,pₙ)` of one moment.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.len() < 2 {
            return Err(Error::InvalidDimension(exponents.len()));
        }
        Ok(Self(exponents))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Unit index `e_axis` (0-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Moves one unit of exponent from axis `from` to axis `to`.
    /// Returns `None` when `from` has nothing to give.
    pub fn shifted(&self, from: usize, to: usize) -> Option<Self> {
        if self.0[from] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[from] -= 1;
        e[to] += 1;
        Some(Self(e))
    }

    /// Applies a coordinate permutation: axis `i` of the result takes the
    /// exponent of axis `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&src| self.0[src]).collect())
    }

    /// Compact label such as `m20` or `m(10,2)` when an exponent has two digits.
    pub fn label(&self) -> String {
        if self.0.iter().all(|&e| e < 10) {
            let digits: String = self.0.iter().map(|e| e.to_string()).collect();
            format!("m{digits}")
        } else {
            format!("m{self}")
        }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| {
                for (a, b) in self.0.iter().zip(&other.0).rev() {
                    if a != b {
                        return a.cmp(b);
                    }
                }
                Ordering::Equal
            })
            .then_with(|| self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// All multi-indices of dimension `dim` and total order `order`, in canonical order.
pub fn enumerate_order(dim: usize, order: u32) -> Result<Vec<MultiIndex>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    compositions(&mut current, 0, order, &mut out);
    out.sort();
    Ok(out)
}

fn compositions(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        compositions(current, pos + 1, remaining - e, out);
    }
}

/// A product of moments, stored as `(index, power)` pairs sorted by index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialEntry {
    factors: Vec<(MultiIndex, u32)>,
}

impl MonomialEntry {
    /// Builds an entry from arbitrary factors; equal indices are merged and
    /// zero powers dropped.
    pub fn from_factors(factors: impl IntoIterator<Item = (MultiIndex, u32)>) -> Self {
        let mut v: Vec<(MultiIndex, u32)> = factors.into_iter().filter(|(_, k)| *k > 0).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(MultiIndex, u32)> = Vec::with_capacity(v.len());
        for (idx, k) in v {
            match merged.last_mut() {
                Some((last, pow)) if *last == idx => *pow += k,
                _ => merged.push((idx, k)),
            }
        }
        Self { factors: merged }
    }

    pub fn factors(&self) -> &[(MultiIndex, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, k)| k).sum()
    }

    pub fn max_order(&self) -> u32 {
        self.factors.iter().map(|(i, _)| i.order()).max().unwrap_or(0)
    }

    /// Product of two entries.
    pub fn times(&self, other: &Self) -> Self {
        Self::from_factors(self.factors.iter().chain(&other.factors).cloned())
    }

    /// Per-coordinate sums `Σ_i (p_j^i + 1)·k_i`: the power of `σ_j` this
    /// product picks up under the diagonal scaling `x_j → σ_j x_j`.
    pub fn scale_weights(&self, dim: usize) -> Vec<u32> {
        let mut w = vec![0u32; dim];
        for (idx, k) in &self.factors {
            for (wj, pj) in w.iter_mut().zip(idx.exponents()) {
                *wj += (pj + 1) * k;
            }
        }
        w
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_factors(self.factors.iter().map(|(i, k)| (i.permuted(perm), *k)))
    }

    pub fn label(&self) -> String {
        self.factors
            .iter()
            .map(|(i, k)| {
                if *k == 1 {
                    i.label()
                } else {
                    format!("{}^{k}", i.label())
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Debug for MonomialEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// All multisets of size `degree` over `base`, in canonical order.
pub fn monomial_basis(base: &[MultiIndex], degree: u32) -> Vec<MonomialEntry> {
    let mut out = Vec::new();
    if base.is_empty() {
        return out;
    }
    let mut positions = vec![0usize; degree as usize];
    loop {
        out.push(MonomialEntry::from_factors(positions.iter().map(|&p| (base[p].clone(), 1))));
        // next non-decreasing tuple
        let mut i = positions.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if positions[i] + 1 < base.len() {
                let next = positions[i] + 1;
                for p in &mut positions[i..] {
                    *p = next;
                }
                break;
            }
        }
    }
}

/// One `(order, degree)` component of a moment vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Part {
    pub order: u32,
    pub degree: u32,
}

impl Part {
    pub fn new(order: u32, degree: u32) -> Self {
        Self { order, degree }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.order, self.degree)
    }
}

impl FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected <order>:<degree>, got {s:?}"));
        let (p, k) = s.trim().split_once(':').ok_or_else(bad)?;
        let order = p.trim().parse().map_err(|_| bad())?;
        let degree: u32 = k.trim().parse().map_err(|_| bad())?;
        if degree == 0 {
            return Err(Error::InvalidArgument(format!("degree must be >= 1 in {s:?}")));
        }
        Ok(Part { order, degree })
    }
}

/// Parses `p:k[,p:k…]`.
pub fn parse_parts(s: &str) -> Result<Vec<Part>> {
    s.split(',').map(str::parse).collect()
}

pub fn format_parts(parts: &[Part]) -> String {
    parts.iter().map(Part::to_string).collect::<Vec<_>>().join(",")
}

/// Ordered monomial basis `v^{(k,k',…)}_{(p,p',…)}` of a moment vector.
#[derive(Clone, Debug)]
pub struct BasisDescriptor {
    dim: usize,
    parts: Vec<Part>,
    entries: Vec<MonomialEntry>,
    positions: HashMap<MonomialEntry, usize>,
}

impl BasisDescriptor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Normalized parts: one per distinct order, in first-appearance order.
    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn entries(&self) -> &[MonomialEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, entry: &MonomialEntry) -> Option<usize> {
        self.positions.get(entry).copied()
    }

    pub fn max_order(&self) -> u32 {
        self.parts.iter().map(|p| p.order).max().unwrap_or(0)
    }

    /// Total degree `Σ kᵢ` shared by every entry.
    pub fn degree(&self) -> u32 {
        self.parts.iter().map(|p| p.degree).sum()
    }
}

/// Merges parts sharing an order by adding their degrees; the merged part
/// keeps the position of the first occurrence.
pub fn normalize_parts(parts: &[Part]) -> Vec<Part> {
    let mut out: Vec<Part> = Vec::new();
    for p in parts {
        match out.iter_mut().find(|q| q.order == p.order) {
            Some(q) => q.degree += p.degree,
            None => out.push(*p),
        }
    }
    out
}

/// Builds the product basis of the given parts.
pub fn product_basis(dim: usize, parts: &[Part]) -> Result<BasisDescriptor> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if parts.is_empty() {
        return Err(Error::InvalidArgument("a basis needs at least one part".into()));
    }
    if let Some(p) = parts.iter().find(|p| p.degree == 0) {
        return Err(Error::InvalidArgument(format!("part {p} has degree 0")));
    }
    let parts = normalize_parts(parts);
    let mut entries = vec![MonomialEntry::from_factors(std::iter::empty())];
    for part in &parts {
        let base = enumerate_order(dim, part.order)?;
        let monos = monomial_basis(&base, part.degree);
        entries = entries
            .iter()
            .flat_map(|e| monos.iter().map(move |m| e.times(m)))
            .collect();
    }
    let positions = entries.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    Ok(BasisDescriptor {
        dim,
        parts,
        entries,
        positions,
    })
}

/// Binomial coefficient, for size cross-checks.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
