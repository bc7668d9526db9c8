//! Raw and central moments of discrete weighted point sets.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_order, MultiIndex};

/// Clouds at least this large are accumulated with compensated summation.
pub const COMPENSATED_THRESHOLD: usize = 100_000;

/// Weighted points in n-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            coords: Vec::new(),
            weights: Vec::new(),
        })
    }

    pub fn from_points(dim: usize, points: impl IntoIterator<Item = (Vec<f64>, f64)>) -> Result<Self> {
        let mut cloud = Self::new(dim)?;
        for (x, w) in points {
            cloud.push(&x, w)?;
        }
        Ok(cloud)
    }

    /// Unit-weight points.
    pub fn from_coords(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        Self::from_points(dim, points.iter().map(|p| (p.clone(), 1.0)))
    }

    pub fn push(&mut self, x: &[f64], weight: f64) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        self.coords.extend_from_slice(x);
        self.weights.push(weight);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn points(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.coords.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same points with every coordinate and weight passed through the maps.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>, weight_factor: f64) -> Self {
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.coords.chunks_exact(self.dim) {
            coords.extend(f(p));
        }
        Self {
            dim: self.dim,
            coords,
            weights: self.weights.iter().map(|w| w * weight_factor).collect(),
        }
    }

    /// Parses the whitespace-separated text format: `n` coordinates per line,
    /// an optional trailing weight, `#` comments. The dimension is the value
    /// count of the first data line unless a `# dim=<n>` line precedes it.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cloud: Option<PointCloud> = None;
        let mut ncols = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(d) = comment.trim().strip_prefix("dim=") {
                    if cloud.is_some() {
                        continue;
                    }
                    ncols = d.trim().parse().map_err(|_| Error::Malformed {
                        line: lineno + 1,
                        message: format!("bad dimension directive {d:?}"),
                    })?;
                    cloud = Some(PointCloud::new(ncols)?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Malformed {
                        line: lineno + 1,
                        message: format!("not a number: {t:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            let c = match cloud.as_mut() {
                Some(c) => c,
                None => {
                    // the first data line fixes the dimension; it carries no weight
                    ncols = values.len();
                    if ncols < 2 {
                        return Err(Error::Malformed {
                            line: lineno + 1,
                            message: format!("need at least 2 coordinates, found {ncols}"),
                        });
                    }
                    cloud.insert(PointCloud::new(ncols)?)
                }
            };
            let (x, w) = if values.len() == ncols {
                (&values[..], 1.0)
            } else if values.len() == ncols + 1 {
                (&values[..ncols], values[ncols])
            } else {
                return Err(Error::Malformed {
                    line: lineno + 1,
                    message: format!("expected {} or {} values, found {}", ncols, ncols + 1, values.len()),
                });
            };
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Malformed {
                    line: lineno + 1,
                    message: format!("weight must be positive, got {w}"),
                });
            }
            c.push(x, w)?;
        }
        cloud.ok_or(Error::Malformed {
            line: 0,
            message: "no points".into(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Writes the text format with explicit weights.
    pub fn to_text(&self) -> String {
        let mut s = format!("# dim={}\n", self.dim);
        for (x, w) in self.points() {
            for v in x {
                s.push_str(&format!("{v:e} "));
            }
            s.push_str(&format!("{w:e}\n"));
        }
        s
    }
}

/// Gravity center `x̄_j = m_{e_j} / m_0`.
pub fn centroid(cloud: &PointCloud) -> Result<Vec<f64>> {
    let (mut m0, mut m0_carry) = (0.0, 0.0);
    let mut c = vec![0.0; cloud.dim()];
    let mut carry = vec![0.0; cloud.dim()];
    for (x, w) in cloud.points() {
        neumaier_add(&mut m0, &mut m0_carry, w);
        for j in 0..x.len() {
            neumaier_add(&mut c[j], &mut carry[j], w * x[j]);
        }
    }
    let m0 = m0 + m0_carry;
    if !(m0 > 0.0) {
        return Err(Error::DegenerateCloud(m0));
    }
    Ok(c.into_iter().zip(carry).map(|(s, r)| (s + r) / m0).collect())
}

/// Central moments of a cloud for every order `0..=max_order`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    dim: usize,
    max_order: u32,
    values: BTreeMap<MultiIndex, f64>,
    centroid: Vec<f64>,
}

impl MomentTable {
    /// Wraps precomputed values, e.g. synthetic tables for tests. Every index
    /// of order `<= max_order` must be present.
    pub fn from_values(dim: usize, max_order: u32, values: BTreeMap<MultiIndex, f64>) -> Result<Self> {
        for p in 0..=max_order {
            for idx in enumerate_order(dim, p)? {
                if !values.contains_key(&idx) {
                    return Err(Error::ShapeMismatch(format!("missing moment {idx}")));
                }
            }
        }
        Ok(Self {
            dim,
            max_order,
            values,
            centroid: vec![0.0; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn centroid(&self) -> &[f64] {
        &self.centroid
    }

    pub fn get(&self, idx: &MultiIndex) -> Option<f64> {
        self.values.get(idx).copied()
    }

    pub fn mu0(&self) -> f64 {
        self.values[&MultiIndex::zero(self.dim)]
    }

    pub fn values(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.values
    }
}

/// Central moments `μ_p = Σ w Π (x_j − x̄_j)^{p_j}` for all `|p| <= max_order`.
pub fn central_moments(cloud: &PointCloud, max_order: u32) -> Result<MomentTable> {
    let dim = cloud.dim();
    let c = centroid(cloud)?;
    let mut indices = Vec::new();
    for p in 0..=max_order {
        indices.extend(enumerate_order(dim, p)?);
    }
    let compensated = cloud.len() >= COMPENSATED_THRESHOLD;
    let mut sums = vec![0.0f64; indices.len()];
    let mut carry = vec![0.0f64; indices.len()];
    // powers[j * (P+1) + e] = (x_j - c_j)^e
    let stride = max_order as usize + 1;
    let mut powers = vec![1.0f64; dim * stride];
    for (x, w) in cloud.points() {
        for j in 0..dim {
            let d = x[j] - c[j];
            for e in 1..stride {
                powers[j * stride + e] = powers[j * stride + e - 1] * d;
            }
        }
        for (k, idx) in indices.iter().enumerate() {
            let mut term = w;
            for (j, &e) in idx.exponents().iter().enumerate() {
                term *= powers[j * stride + e as usize];
            }
            if compensated {
                neumaier_add(&mut sums[k], &mut carry[k], term);
            } else {
                sums[k] += term;
            }
        }
    }
    let values = indices
        .into_iter()
        .zip(sums.into_iter().zip(carry))
        .map(|(idx, (s, r))| (idx, s + r))
        .collect();
    Ok(MomentTable {
        dim,
        max_order,
        values,
        centroid: c,
    })
}

fn neumaier_add(sum: &mut f64, carry: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *carry += (*sum - t) + x;
    } else {
        *carry += (x - t) + *sum;
    }
    *sum = t;
}

/// Divides every order-p moment by `μ₀^{(p+n)/n}`.
pub fn uniform_scale_normalize(table: &MomentTable) -> Result<BTreeMap<MultiIndex, f64>> {
    let mu0 = table.mu0();
    if !(mu0 > 0.0) {
        return Err(Error::DegenerateCloud(mu0));
    }
    let n = table.dim() as f64;
    Ok(table
        .values()
        .iter()
        .map(|(idx, v)| {
            let exponent = (idx.order() as f64 + n) / n;
            (idx.clone(), v / mu0.powf(exponent))
        })
        .collect())
}
