#![allow(dead_code)]

use geoinv::multiindex::{MonomialEntry, MultiIndex};
use geoinv::{BasisDescriptor, InvariantPolynomial, KernelBasis};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

/// Parses a polynomial written as `±c m_{e1e2..}^k m_{..} ...` terms, with
/// single-digit exponents. LaTeX spacing (`\!`, `&`, `\\`) is ignored.
pub fn parse_formula(dim: usize, text: &str) -> Vec<(MonomialEntry, BigRational)> {
    let cleaned: String = text
        .replace("\\!", "")
        .replace("\\\\", "")
        .replace('&', "")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let bytes = cleaned.as_bytes();
    let mut i = 0;
    let mut terms = Vec::new();
    while i < bytes.len() {
        let mut sign = 1i64;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coef: i64 = if start == i { 1 } else { cleaned[start..i].parse().unwrap() };
        let mut factors = Vec::new();
        while i < bytes.len() && bytes[i] == b'm' {
            assert_eq!(&cleaned[i..i + 3], "m_{", "bad factor at {i} in {cleaned}");
            i += 3;
            let close = i + cleaned[i..].find('}').unwrap();
            let exps: Vec<u32> = cleaned[i..close].chars().map(|c| c.to_digit(10).unwrap()).collect();
            assert_eq!(exps.len(), dim, "factor {:?}", &cleaned[i..close]);
            i = close + 1;
            let mut pow = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                pow = (bytes[i + 1] - b'0') as u32;
                i += 2;
            }
            factors.push((MultiIndex::new(exps).unwrap(), pow));
        }
        assert!(!factors.is_empty(), "term without factors near {i} in {cleaned}");
        terms.push((MonomialEntry::from_factors(factors), BigRational::from_integer((sign * coef).into())));
    }
    terms
}

pub fn formula_vector(desc: &BasisDescriptor, terms: &[(MonomialEntry, BigRational)]) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); desc.len()];
    for (e, c) in terms {
        let pos = desc.position(e).unwrap_or_else(|| panic!("{} not in basis", e.label()));
        v[pos] += c;
    }
    v
}

/// `a = λ b` for some nonzero rational `λ`.
pub fn proportional(a: &[BigRational], b: &[BigRational]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(k) = (0..a.len()).find(|&i| !b[i].is_zero()) else {
        return false;
    };
    if a[k].is_zero() {
        return false;
    }
    let ratio = &a[k] / &b[k];
    a.iter().zip(b).all(|(x, y)| *x == &ratio * y)
}

pub fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().cloned().map(BigRational::from_integer).collect()
}

pub fn coefficients(inv: &InvariantPolynomial) -> Vec<BigRational> {
    inv.coefficient_vector(&inv.descriptor().unwrap()).unwrap()
}

pub fn term_count(inv: &InvariantPolynomial) -> usize {
    inv.terms.iter().filter(|(_, c)| !c.is_zero()).count()
}

/// Orthonormal basis (as columns) of the null space from an SVD of `m`.
pub fn svd_null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    // pad to square so V is complete
    let mut a = DMatrix::zeros(r.max(c), c);
    a.view_mut((0, 0), (r, c)).copy_from(m);
    let svd = a.svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.max();
    let cols: Vec<usize> = (0..c)
        .filter(|&i| svd.singular_values[i] <= rel_tol * smax.max(1.0))
        .collect();
    let mut n = DMatrix::zeros(c, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        n.set_column(k, &vt.row(i).transpose());
    }
    n
}

pub fn orthonormalize(kernel: &KernelBasis) -> DMatrix<f64> {
    let cols = kernel.vectors.len();
    if cols == 0 {
        return DMatrix::zeros(kernel.ambient, 0);
    }
    let m = DMatrix::from_fn(kernel.ambient, cols, |i, j| kernel.vectors[j][i].to_f64().unwrap());
    m.qr().q()
}

/// Spectral norm of the difference of orthogonal projectors onto two spans.
pub fn span_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let pa = a * a.transpose();
    let pb = b * b.transpose();
    (pa - pb).svd(false, false).singular_values.max()
}

/// Random integer matrix of the given rank with roughly `density` nonzeros
/// in each factor.
pub fn random_low_rank(rng: &mut impl Rng, rows: usize, cols: usize, rank: usize, density: f64) -> Vec<Vec<i64>> {
    let mut draw = |r: usize, c: usize| -> Vec<Vec<i64>> {
        (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| if rng.random_bool(density) { rng.random_range(-3..=3) } else { 0 })
                    .collect()
            })
            .collect()
    };
    let b = draw(rows, rank);
    let c = draw(rank, cols);
    (0..rows)
        .map(|i| (0..cols).map(|j| (0..rank).map(|k| b[i][k] * c[k][j]).sum()).collect())
        .collect()
}
