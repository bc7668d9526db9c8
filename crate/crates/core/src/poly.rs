//! Evaluation and text serialization of invariant polynomials.
//!
//! File format (`geoinv v1`), line oriented:
//!
//! ```text
//! geoinv v1 dim=<n>
//!
//! class=<scale|rotation|affine> d=<int> desc=<(p,k)(p,k)…>
//! term <num>/<den> <(e1,…,en)[^pow](e1,…,en)[^pow]…>
//! term …
//!
//! class=…
//! ```
//!
//! The header comes first. Each record is a `class=` line followed by one or
//! more `term` lines; records are separated by blank lines. Coefficients are
//! exact reduced rationals with the sign on the numerator and an explicit
//! denominator (`-1/1`). Factors are written in canonical index order and the
//! `^pow` suffix appears only for powers above 1. Lines starting with `#` are
//! ignored by the parser and never written.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::invariants::{InvariantClass, InvariantPolynomial};
use crate::moments::MomentTable;
use crate::multiindex::{BasisDescriptor, MonomialEntry, MultiIndex, Part};

pub const FORMAT_VERSION: &str = "v1";

fn check_table(inv_order: u32, table: &MomentTable) -> Result<f64> {
    if inv_order > table.max_order() {
        return Err(Error::InsufficientOrder {
            required: inv_order,
            available: table.max_order(),
        });
    }
    let mu0 = table.mu0();
    if !(mu0 > 0.0) {
        return Err(Error::DegenerateCloud(mu0));
    }
    Ok(mu0)
}

fn entry_value(entry: &MonomialEntry, table: &MomentTable) -> f64 {
    entry
        .factors()
        .iter()
        .map(|(idx, k)| table.get(idx).expect("order checked").powi(*k as i32))
        .product()
}

/// Sums terms largest magnitude first.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    terms.into_iter().sum()
}

/// `Σ coef · Π μ^pow / μ₀^d` in double precision.
pub fn evaluate(inv: &InvariantPolynomial, table: &MomentTable) -> Result<f64> {
    if inv.dim != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: inv.dim,
            found: table.dim(),
        });
    }
    let mu0 = check_table(inv.max_order(), table)?;
    let terms = inv
        .terms
        .iter()
        .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * entry_value(e, table))
        .collect();
    Ok(ordered_sum(terms) / mu0.powi(inv.denominator_power as i32))
}

/// Values of every basis entry on a table.
pub fn evaluate_basis(desc: &BasisDescriptor, table: &MomentTable) -> Result<Vec<f64>> {
    check_table(desc.max_order(), table)?;
    Ok(desc.entries().iter().map(|e| entry_value(e, table)).collect())
}

/// `βᵀ v` for a coefficient vector over `desc` (no μ₀ normalization).
pub fn evaluate_coefficients(beta: &[BigRational], desc: &BasisDescriptor, table: &MomentTable) -> Result<f64> {
    if beta.len() != desc.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coefficients for a basis of {}",
            beta.len(),
            desc.len()
        )));
    }
    let values = evaluate_basis(desc, table)?;
    let terms = beta
        .iter()
        .zip(values)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, v)| c.to_f64().unwrap_or(f64::NAN) * v)
        .collect();
    Ok(ordered_sum(terms))
}

/// Exact evaluation over rational moment values.
pub fn evaluate_exact(inv: &InvariantPolynomial, moments: &BTreeMap<MultiIndex, BigRational>) -> Result<BigRational> {
    let zero = MultiIndex::zero(inv.dim);
    let mu0 = moments
        .get(&zero)
        .ok_or(Error::InsufficientOrder {
            required: 0,
            available: 0,
        })?;
    if mu0 <= &BigRational::zero() {
        return Err(Error::DegenerateCloud(mu0.to_f64().unwrap_or(0.0)));
    }
    let mut sum = BigRational::zero();
    for (entry, c) in &inv.terms {
        let mut term = c.clone();
        for (idx, k) in entry.factors() {
            let v = moments.get(idx).ok_or_else(|| Error::InsufficientOrder {
                required: idx.order(),
                available: moments.keys().map(MultiIndex::order).max().unwrap_or(0),
            })?;
            term *= num_traits::pow(v.clone(), *k as usize);
        }
        sum += term;
    }
    Ok(sum / num_traits::pow(mu0.clone(), inv.denominator_power as usize))
}

fn write_factors(out: &mut String, entry: &MonomialEntry) {
    for (idx, k) in entry.factors() {
        write!(out, "{idx}").unwrap();
        if *k > 1 {
            write!(out, "^{k}").unwrap();
        }
    }
}

/// Serializes invariants sharing one dimension. Fails only on mixed dimensions.
pub fn serialize(dim: usize, invs: &[InvariantPolynomial]) -> Result<String> {
    let mut out = format!("geoinv {FORMAT_VERSION} dim={dim}\n");
    for inv in invs {
        if inv.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: inv.dim,
            });
        }
        out.push('\n');
        let desc: String = inv
            .parts
            .iter()
            .map(|p| format!("({},{})", p.order, p.degree))
            .collect();
        writeln!(out, "class={} d={} desc={desc}", inv.class, inv.denominator_power).unwrap();
        for (entry, c) in &inv.terms {
            write!(out, "term {}/{} ", c.numer(), c.denom()).unwrap();
            write_factors(&mut out, entry);
            out.push('\n');
        }
    }
    Ok(out)
}

/// Parsed invariant file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFile {
    pub dim: usize,
    pub invariants: Vec<InvariantPolynomial>,
}

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::Malformed {
        line,
        message: message.into(),
    }
}

/// Parses `(a,b,…)` groups with optional `^k` suffixes, e.g. `(2,0)(1,1)^2`.
fn parse_tuples(s: &str, line: usize) -> Result<Vec<(Vec<u32>, u32)>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| malformed(line, format!("expected '(' at {rest:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| malformed(line, "unclosed '('"))?;
        let nums = body[..close]
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| malformed(line, format!("bad integer {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rest = &body[close + 1..];
        let mut power = 1;
        if let Some(p) = rest.strip_prefix('^') {
            let end = p.find(|c: char| !c.is_ascii_digit()).unwrap_or(p.len());
            power = p[..end]
                .parse()
                .map_err(|_| malformed(line, format!("bad power in {p:?}")))?;
            if power == 0 {
                return Err(malformed(line, "power must be positive"));
            }
            rest = &p[end..];
        }
        out.push((nums, power));
        rest = rest.trim_start();
    }
    Ok(out)
}

fn parse_record_header(text: &str, line: usize) -> Result<(InvariantClass, u32, Vec<Part>)> {
    let mut class = None;
    let mut d = None;
    let mut parts = None;
    for field in text.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| malformed(line, format!("expected key=value, got {field:?}")))?;
        match key {
            "class" => {
                class = Some(InvariantClass::from_str(value).map_err(|e| malformed(line, e.to_string()))?)
            }
            "d" => {
                d = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| malformed(line, format!("bad d {value:?}")))?,
                )
            }
            "desc" => {
                let tuples = parse_tuples(value, line)?;
                let mut ps = Vec::new();
                for (t, pow) in tuples {
                    if t.len() != 2 || pow != 1 || t[1] == 0 {
                        return Err(malformed(line, format!("bad descriptor part in {value:?}")));
                    }
                    ps.push(Part::new(t[0], t[1]));
                }
                if ps.is_empty() {
                    return Err(malformed(line, "empty descriptor"));
                }
                parts = Some(ps);
            }
            _ => return Err(malformed(line, format!("unknown field {key:?}"))),
        }
    }
    Ok((
        class.ok_or_else(|| malformed(line, "missing class"))?,
        d.ok_or_else(|| malformed(line, "missing d"))?,
        parts.ok_or_else(|| malformed(line, "missing desc"))?,
    ))
}

fn parse_term(text: &str, line: usize, dim: usize) -> Result<(MonomialEntry, BigRational)> {
    let text = text.trim();
    let (coef, factors) = text
        .split_once(char::is_whitespace)
        .ok_or_else(|| malformed(line, "term needs a coefficient and factors"))?;
    let (num, den) = coef
        .split_once('/')
        .ok_or_else(|| malformed(line, format!("coefficient {coef:?} is not num/den")))?;
    let num = BigInt::from_str(num).map_err(|_| malformed(line, format!("bad numerator {num:?}")))?;
    let den = BigInt::from_str(den).map_err(|_| malformed(line, format!("bad denominator {den:?}")))?;
    if den.is_zero() {
        return Err(malformed(line, "zero denominator"));
    }
    let c = BigRational::new(num, den);
    if c.is_zero() {
        return Err(malformed(line, "zero coefficient"));
    }
    let tuples = parse_tuples(factors, line)?;
    if tuples.is_empty() {
        return Err(malformed(line, "term without factors"));
    }
    let mut fs = Vec::new();
    for (t, pow) in tuples {
        if t.len() != dim {
            return Err(malformed(
                line,
                format!("index of dimension {} in a dim={dim} file", t.len()),
            ));
        }
        fs.push((MultiIndex::new(t).map_err(|e| malformed(line, e.to_string()))?, pow));
    }
    Ok((MonomialEntry::from_factors(fs), c))
}

pub fn parse(text: &str) -> Result<InvariantFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| malformed(1, "empty file"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("geoinv") {
        return Err(malformed(hline, "header must start with 'geoinv'"));
    }
    let version = fields.next().ok_or_else(|| malformed(hline, "missing version"))?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionUnsupported(version.to_string()));
    }
    let dim = fields
        .next()
        .and_then(|f| f.strip_prefix("dim="))
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| malformed(hline, "missing or bad dim="))?;
    if dim < 2 {
        return Err(malformed(hline, format!("dimension {dim} < 2")));
    }
    if let Some(extra) = fields.next() {
        return Err(malformed(hline, format!("unexpected header field {extra:?}")));
    }

    let mut invariants = Vec::new();
    let mut current: Option<(usize, InvariantPolynomial)> = None;
    let finish = |cur: Option<(usize, InvariantPolynomial)>, out: &mut Vec<InvariantPolynomial>| -> Result<()> {
        if let Some((line, inv)) = cur {
            if inv.terms.is_empty() {
                return Err(malformed(line, "record without terms"));
            }
            out.push(inv);
        }
        Ok(())
    };
    for (lineno, line) in lines {
        if line.is_empty() {
            finish(current.take(), &mut invariants)?;
        } else if line.starts_with("class=") {
            if current.is_some() {
                return Err(malformed(lineno, "records must be separated by a blank line"));
            }
            let (class, d, parts) = parse_record_header(line, lineno)?;
            current = Some((
                lineno,
                InvariantPolynomial {
                    dim,
                    class,
                    parts,
                    terms: Vec::new(),
                    denominator_power: d,
                },
            ));
        } else if let Some(rest) = line.strip_prefix("term ") {
            let (_, inv) = current
                .as_mut()
                .ok_or_else(|| malformed(lineno, "term outside a record"))?;
            inv.terms.push(parse_term(rest, lineno, dim)?);
        } else {
            return Err(malformed(lineno, format!("unrecognized line {line:?}")));
        }
    }
    finish(current.take(), &mut invariants)?;
    Ok(InvariantFile { dim, invariants })
}
