//! Exact rational kernels of sparse integer matrices.
//!
//! Elimination runs over the integers without fractions: the pivot row `r_p`
//! with pivot `p` clears column `c` of another row `r` by
//! `r ← (p·r − r[c]·r_p) / content`, where `content` is the gcd of the
//! resulting row. Rows that do not touch the pivot column are left alone,
//! so sparse rows stay sparse until they are actually hit. A second pass
//! clears the entries above every pivot, giving an integer reduced echelon
//! form from which the kernel is read off.
//!
//! Kernel bases are canonical: one vector per free column (in increasing
//! column order) with zeros at every other free column, each scaled to a
//! primitive integer vector whose first nonzero entry is positive. The basis
//! depends only on the kernel subspace, not on pivoting details.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::sparse::SparseIntMatrix;

type Row = Vec<(usize, BigInt)>;

/// Integer basis of a kernel, see the module docs for normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub ambient: usize,
    pub vectors: Vec<Vec<BigInt>>,
}

impl KernelBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Whether `v` lies in the span of the basis.
    pub fn contains(&self, v: &[BigRational]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let mut rows: Vec<Row> = self.vectors.iter().map(|b| dense_to_row(b)).collect();
        let before = rank_of_rows(rows.clone(), self.ambient);
        rows.push(dense_to_row(&clear_denominators(v)));
        rank_of_rows(rows, self.ambient) == before
    }
}

/// Vertically stacks the transposes of `ops` and then the `extra_rows`
/// (each scaled by its common denominator to an integer row).
pub fn stack_transposed(ops: &[&SparseIntMatrix], extra_rows: &[Vec<BigRational>]) -> Result<SparseIntMatrix> {
    let width = match (ops.first(), extra_rows.first()) {
        (Some(op), _) => op.nrows(),
        (None, Some(r)) => r.len(),
        (None, None) => return Err(Error::ShapeMismatch("nothing to stack".into())),
    };
    let mut out = SparseIntMatrix::zeros(0, width);
    for op in ops {
        if op.nrows() != width {
            return Err(Error::ShapeMismatch(format!(
                "operator with {} rows cannot stack at width {width}",
                op.nrows()
            )));
        }
        out = out.vstack(&op.transpose())?;
    }
    for row in extra_rows {
        if row.len() != width {
            return Err(Error::ShapeMismatch(format!(
                "extra row of length {} at width {width}",
                row.len()
            )));
        }
        out.push_row(dense_to_row(&clear_denominators(row)))?;
    }
    Ok(out)
}

/// Drops all-zero rows; the kernel is unchanged.
pub fn prune_zero_rows(m: &SparseIntMatrix) -> SparseIntMatrix {
    let keep: Vec<usize> = (0..m.nrows()).filter(|&r| !m.row(r).is_empty()).collect();
    m.select_rows(&keep)
}

/// Scales a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

fn dense_to_row(v: &[BigInt]) -> Row {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// Integer reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub cols: usize,
    /// `(pivot column, row)` in increasing pivot column order.
    pub pivots: Vec<(usize, Row)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for (c, _) in &self.pivots {
            is_pivot[*c] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }
}

/// Fraction-free elimination to integer reduced echelon form. The pivot in
/// each column is the largest-magnitude candidate, ties to the lowest row.
pub fn echelon(m: &SparseIntMatrix) -> Echelon {
    echelon_rows(m.row_vecs().to_vec(), m.ncols())
}

fn echelon_rows(rows: Vec<Row>, cols: usize) -> Echelon {
    let mut active: Vec<CRow> = rows
        .into_iter()
        .filter(|r| !r.is_empty())
        .map(|r| primitive(r.into_iter().map(|(c, v)| (c, Coef::from_big(v))).collect()))
        .collect();
    let mut pivots: Vec<(usize, CRow)> = Vec::new();
    for col in 0..cols {
        if active.is_empty() {
            break;
        }
        // active rows are zero left of `col`, so a hit is always the leading entry
        let mut best: Option<usize> = None;
        for (i, row) in active.iter().enumerate() {
            if row[0].0 != col {
                continue;
            }
            match best {
                Some(b) if active[b][0].1.cmp_abs(&row[0].1).is_ge() => {}
                _ => best = Some(i),
            }
        }
        let Some(bi) = best else { continue };
        let pivot_row = active.remove(bi);
        let p = pivot_row[0].1.clone();
        let mut next = Vec::with_capacity(active.len());
        for row in active.drain(..) {
            if row[0].0 == col {
                let a = row[0].1.clone();
                let reduced = combine(&p, &row, &a, &pivot_row);
                if !reduced.is_empty() {
                    next.push(primitive(reduced));
                }
            } else {
                next.push(row);
            }
        }
        active = next;
        pivots.push((col, pivot_row));
    }
    // clear above pivots, last pivot first
    for j in (0..pivots.len()).rev() {
        let (pc, prow) = pivots[j].clone();
        let p = prow[0].1.clone();
        for (_, row) in pivots.iter_mut().take(j) {
            if let Ok(k) = row.binary_search_by_key(&pc, |(c, _)| *c) {
                let a = row[k].1.clone();
                *row = primitive(combine(&p, row, &a, &prow));
            }
        }
    }
    let pivots = pivots
        .into_iter()
        .map(|(c, row)| {
            let flip = row[0].1.is_negative();
            let row = row
                .into_iter()
                .map(|(k, v)| {
                    let v = v.into_big();
                    (k, if flip { -v } else { v })
                })
                .collect();
            (c, row)
        })
        .collect();
    Echelon { cols, pivots }
}

type CRow = Vec<(usize, Coef)>;

/// `p·row − a·other`, merged over sorted sparse rows.
fn combine(p: &Coef, row: &CRow, a: &Coef, other: &CRow) -> CRow {
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < other.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = other.get(j).map_or(usize::MAX, |e| e.0);
        let (c, x, y) = if ci < cj {
            i += 1;
            (ci, Some(&row[i - 1].1), None)
        } else if cj < ci {
            j += 1;
            (cj, None, Some(&other[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, Some(&row[i - 1].1), Some(&other[j - 1].1))
        };
        let v = Coef::mul_sub(p, x, a, y);
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

fn primitive(mut row: CRow) -> CRow {
    // seeding with the smallest entry keeps every gcd cheap
    let mut g = match row.iter().min_by(|x, y| x.1.cmp_abs(&y.1)) {
        Some((_, v)) => Coef::Small(0).gcd(v),
        None => return row,
    };
    for (_, v) in &row {
        g = g.gcd(v);
        if g == Coef::Small(1) {
            return row;
        }
    }
    if !g.is_zero() {
        for (_, v) in &mut row {
            *v = v.div_exact(&g);
        }
    }
    row
}

/// Integer that stays in an `i64` until it outgrows it. `Big` never holds a
/// value representable as `Small`, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Coef {
    Small(i64),
    Big(BigInt),
}

impl Coef {
    fn from_big(b: BigInt) -> Self {
        match i64::try_from(&b) {
            Ok(s) => Coef::Small(s),
            Err(_) => Coef::Big(b),
        }
    }

    fn from_i128(v: i128) -> Self {
        match i64::try_from(v) {
            Ok(s) => Coef::Small(s),
            Err(_) => Coef::Big(BigInt::from(v)),
        }
    }

    fn to_big(&self) -> BigInt {
        match self {
            Coef::Small(s) => BigInt::from(*s),
            Coef::Big(b) => b.clone(),
        }
    }

    fn into_big(self) -> BigInt {
        match self {
            Coef::Small(s) => BigInt::from(s),
            Coef::Big(b) => b,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Coef::Small(0))
    }

    fn is_negative(&self) -> bool {
        match self {
            Coef::Small(s) => *s < 0,
            Coef::Big(b) => b.is_negative(),
        }
    }

    fn cmp_abs(&self, other: &Coef) -> std::cmp::Ordering {
        match (self, other) {
            (Coef::Small(a), Coef::Small(b)) => a.unsigned_abs().cmp(&b.unsigned_abs()),
            (Coef::Small(a), Coef::Big(b)) => BigUint::from(a.unsigned_abs()).cmp(b.magnitude()),
            (Coef::Big(a), Coef::Small(b)) => a.magnitude().cmp(&BigUint::from(b.unsigned_abs())),
            (Coef::Big(a), Coef::Big(b)) => a.magnitude().cmp(b.magnitude()),
        }
    }

    fn mul_big(a: &Coef, b: &Coef) -> BigInt {
        match (a, b) {
            (Coef::Small(x), Coef::Small(y)) => BigInt::from(*x as i128 * *y as i128),
            (Coef::Small(x), Coef::Big(y)) | (Coef::Big(y), Coef::Small(x)) => y * *x,
            (Coef::Big(x), Coef::Big(y)) => x * y,
        }
    }

    /// `p·x − a·y`, with a missing operand read as zero.
    fn mul_sub(p: &Coef, x: Option<&Coef>, a: &Coef, y: Option<&Coef>) -> Coef {
        let small = |c: Option<&Coef>| match c {
            None => Some(0i128),
            Some(Coef::Small(v)) => Some(*v as i128),
            Some(Coef::Big(_)) => None,
        };
        if let (Some(p), Some(x), Some(a), Some(y)) = (small(Some(p)), small(x), small(Some(a)), small(y)) {
            // |p·x| <= 2^126, so only the difference can overflow
            if let Some(v) = (p * x).checked_sub(a * y) {
                return Coef::from_i128(v);
            }
        }
        let v = match (x, y) {
            (Some(x), Some(y)) => Coef::mul_big(p, x) - Coef::mul_big(a, y),
            (Some(x), None) => Coef::mul_big(p, x),
            (None, Some(y)) => -Coef::mul_big(a, y),
            (None, None) => BigInt::zero(),
        };
        Coef::from_big(v)
    }

    /// Nonnegative gcd. A remainder step first brings the larger operand down
    /// to the size of the smaller one.
    fn gcd(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Small(a), Coef::Small(b)) => Coef::small_gcd(a.unsigned_abs(), b.unsigned_abs()),
            (Coef::Small(a), Coef::Big(b)) | (Coef::Big(b), Coef::Small(a)) => {
                if *a == 0 {
                    return Coef::from_big(b.abs());
                }
                let m = a.unsigned_abs();
                Coef::small_gcd(m, rem_u64(b.magnitude(), m))
            }
            (Coef::Big(a), Coef::Big(b)) => {
                if let (Some(x), Some(y)) = (to_u128(a.magnitude()), to_u128(b.magnitude())) {
                    return Coef::from_big(BigInt::from(x.gcd(&y)));
                }
                let (hi, lo) = if a.magnitude() >= b.magnitude() { (a, b) } else { (b, a) };
                let r = hi % lo;
                Coef::from_big(lo.gcd(&r))
            }
        }
    }

    fn small_gcd(a: u64, b: u64) -> Coef {
        let g = a.gcd(&b);
        match i64::try_from(g) {
            Ok(s) => Coef::Small(s),
            Err(_) => Coef::Big(BigInt::from(g)),
        }
    }

    fn div_exact(&self, g: &Coef) -> Coef {
        match (self, g) {
            (Coef::Small(a), Coef::Small(b)) => Coef::from_i128(*a as i128 / *b as i128),
            (Coef::Big(a), Coef::Small(b)) => {
                let q = BigInt::from_biguint(a.sign(), div_u64(a.magnitude(), b.unsigned_abs()));
                Coef::from_big(if *b < 0 { -q } else { q })
            }
            (Coef::Big(a), Coef::Big(b)) => match (to_u128(a.magnitude()), to_u128(b.magnitude())) {
                (Some(x), Some(y)) => {
                    let q = BigInt::from(x / y);
                    Coef::from_big(if a.is_negative() != b.is_negative() { -q } else { q })
                }
                _ => Coef::from_big(a / b),
            },
            _ => Coef::from_big(self.to_big() / g.to_big()),
        }
    }
}

fn rank_of_rows(rows: Vec<Row>, cols: usize) -> usize {
    echelon_rows(rows, cols).rank()
}

pub fn rank(m: &SparseIntMatrix) -> usize {
    echelon(m).rank()
}

/// Exact kernel `{x : M x = 0}` over the rationals, as a canonical integer basis.
pub fn rational_kernel(m: &SparseIntMatrix) -> KernelBasis {
    kernel_from_echelon(&echelon(m))
}

pub fn kernel_from_echelon(e: &Echelon) -> KernelBasis {
    let mut vectors = Vec::new();
    for f in e.free_columns() {
        // x_f = L, x_{pc} = −a_{r,f}·L / p_r
        let hits: Vec<(usize, &BigInt, &BigInt)> = e
            .pivots
            .iter()
            .filter_map(|(pc, row)| {
                row.binary_search_by_key(&f, |(c, _)| *c)
                    .ok()
                    .map(|k| (*pc, &row[0].1, &row[k].1))
            })
            .collect();
        let l = hits.iter().fold(BigInt::one(), |acc, (_, p, _)| acc.lcm(p));
        let mut v = vec![BigInt::zero(); e.cols];
        v[f] = l.clone();
        for (pc, p, a) in hits {
            v[pc] = -(a * (&l / p));
        }
        vectors.push(normalize_vector(v));
    }
    KernelBasis {
        ambient: e.cols,
        vectors,
    }
}

/// Primitive integer vector with its first nonzero entry positive.
pub fn normalize_vector(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v;
    }
    let negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in &mut v {
        *x /= &g;
        if negative {
            *x = -&*x;
        }
    }
    v
}

/// Exact check that every row of `m` annihilates every basis vector.
pub fn is_kernel_of(m: &SparseIntMatrix, basis: &KernelBasis) -> bool {
    basis.ambient == m.ncols()
        && basis
            .vectors
            .iter()
            .all(|v| m.mul_vec(v).is_ok_and(|r| r.iter().all(Zero::is_zero)))
}

/// Span equality of two bases over the same ambient space.
pub fn same_span(a: &KernelBasis, b: &KernelBasis) -> bool {
    if a.ambient != b.ambient || a.len() != b.len() {
        return false;
    }
    let rows: Vec<Row> = a.vectors.iter().chain(&b.vectors).map(|v| dense_to_row(v)).collect();
    rank_of_rows(rows, a.ambient) == a.len()
}

fn to_u128(b: &BigUint) -> Option<u128> {
    if b.bits() > 128 {
        return None;
    }
    Some(b.iter_u64_digits().rev().fold(0u128, |acc, d| (acc << 64) | d as u128))
}

fn rem_u64(b: &BigUint, m: u64) -> u64 {
    b.iter_u64_digits()
        .rev()
        .fold(0u64, |r, d| ((((r as u128) << 64) | d as u128) % m as u128) as u64)
}

fn div_u64(b: &BigUint, m: u64) -> BigUint {
    let digits: Vec<u64> = b.iter_u64_digits().collect();
    let mut q = vec![0u64; digits.len()];
    let mut r = 0u128;
    for i in (0..digits.len()).rev() {
        let cur = (r << 64) | digits[i] as u128;
        q[i] = (cur / m as u128) as u64;
        r = cur % m as u128;
    }
    let words: Vec<u32> = q.iter().flat_map(|d| [*d as u32, (d >> 32) as u32]).collect();
    BigUint::new(words)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> SparseIntMatrix {
        SparseIntMatrix::from_dense(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_of_transposed_v12_operator() {
        let k = rational_kernel(&m(&[vec![0, 1, 0], vec![-2, 0, 2], vec![0, -1, 0]]));
        assert_eq!(k.vectors, vec![ints(&[1, 0, 1])]);
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let k = rational_kernel(&m(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]));
        assert!(k.is_empty());
        assert_eq!(k.ambient, 3);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let z = SparseIntMatrix::zeros(4, 3);
        let pruned = prune_zero_rows(&z);
        assert_eq!(pruned.shape(), (0, 3));
        let k = rational_kernel(&pruned);
        assert_eq!(k.vectors, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]);
    }

    #[test]
    fn prune_keeps_nonzero_rows() {
        let a = m(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(prune_zero_rows(&a), a);
        let b = m(&[vec![0, 0], vec![3, 4], vec![0, 0]]);
        assert_eq!(prune_zero_rows(&b).shape(), (1, 2));
    }

    #[test]
    fn canonical_form_is_primitive_and_positive() {
        // kernel spanned by (2,-4,6,0) and (0,0,-3,3) up to scaling
        let a = m(&[vec![2, 1, 0, 0], vec![0, 3, 2, 2]]);
        let k = rational_kernel(&a);
        assert_eq!(k.len(), 2);
        assert!(is_kernel_of(&a, &k));
        for v in &k.vectors {
            let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            assert!(g.is_one());
            assert!(v.iter().find(|x| !x.is_zero()).unwrap().is_positive());
        }
    }

    #[test]
    fn row_order_does_not_change_kernel() {
        let a = m(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, -1, 5]]);
        let b = m(&[vec![0, 1, -1, 5], vec![2, 4, 6, 8], vec![1, 2, 3, 4]]);
        assert_eq!(rational_kernel(&a), rational_kernel(&b));
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn stacking_shapes() {
        let op = m(&[vec![0, 2, 0, 0, -2, 0], vec![0, 2, 0, 0, -2, 0]]);
        let s = stack_transposed(&[&op], &[]).unwrap();
        assert_eq!(s.shape(), (6, 2));
        assert_eq!(rational_kernel(&s).vectors, vec![ints(&[1, -1])]);

        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let z = BigRational::zero();
        let extras = vec![
            vec![half.clone(), third.clone(), z.clone()],
            vec![z.clone(), z.clone(), half.clone()],
            vec![third, z.clone(), z],
        ];
        let s = stack_transposed(&[], &extras).unwrap();
        assert_eq!(s.shape(), (3, 3));
        assert_eq!(s.row(0), &[(0, BigInt::from(3)), (1, BigInt::from(2))]);

        let wrong = m(&[vec![1, 0]]);
        assert!(matches!(stack_transposed(&[&op, &wrong], &[]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn span_membership() {
        let k = rational_kernel(&m(&[vec![1, 1, 0, 0]]));
        let r = |v: &[i64]| -> Vec<BigRational> {
            v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
        };
        assert!(k.contains(&r(&[1, -1, 5, 7])));
        assert!(!k.contains(&r(&[1, 1, 0, 0])));
    }
}
