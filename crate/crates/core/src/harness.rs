//! Randomized numerical checks of invariance.
//!
//! Clouds are transformed as `x → A x` (or shifted, for translations) and
//! every weight is multiplied by `|det A|`, so discrete moments follow the
//! same transformation law as moments of a density. All randomness comes from
//! ChaCha8 seeded with a `u64`; reports carry the seed for replay.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{InvariantClass, InvariantPolynomial};
use crate::moments::{central_moments, centroid, PointCloud};
use crate::poly::evaluate;

pub const SCALE_MIN: f64 = 0.25;
pub const SCALE_MAX: f64 = 4.0;
/// Floor for the denominator of the relative error.
pub const REL_ERROR_FLOOR: f64 = 1e-12;

pub type HarnessRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> HarnessRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformClass {
    Rotation,
    Scale,
    Affine,
    Translation,
}

impl TransformClass {
    pub const ALL: [TransformClass; 4] = [
        TransformClass::Rotation,
        TransformClass::Scale,
        TransformClass::Affine,
        TransformClass::Translation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformClass::Rotation => "rotation",
            TransformClass::Scale => "scale",
            TransformClass::Affine => "affine",
            TransformClass::Translation => "translation",
        }
    }

    /// Transform classes an invariant of `class` must survive.
    pub fn compatible_with(class: InvariantClass) -> &'static [TransformClass] {
        match class {
            InvariantClass::Scale => &[TransformClass::Scale, TransformClass::Translation],
            InvariantClass::Rotation => &[TransformClass::Rotation, TransformClass::Translation],
            InvariantClass::Affine => &[
                TransformClass::Rotation,
                TransformClass::Scale,
                TransformClass::Translation,
                TransformClass::Affine,
            ],
        }
    }
}

impl fmt::Display for TransformClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown transform class {s:?}")))
    }
}

/// `A = R₂ S R₁` factors of an affine draw.
#[derive(Clone, Debug)]
pub struct AffineFactors {
    pub r1: DMatrix<f64>,
    pub scales: Vec<f64>,
    pub r2: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct TransformSpec {
    pub class: TransformClass,
    pub matrix: DMatrix<f64>,
    pub det: f64,
    /// Added after the linear map; nonzero only for translations.
    pub offset: Vec<f64>,
    pub factors: Option<AffineFactors>,
}

impl TransformSpec {
    pub fn identity(dim: usize) -> Self {
        Self {
            class: TransformClass::Translation,
            matrix: DMatrix::identity(dim, dim),
            det: 1.0,
            offset: vec![0.0; dim],
            factors: None,
        }
    }

    pub fn linear(class: TransformClass, matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        let det = matrix.determinant();
        Self {
            class,
            matrix,
            det,
            offset: vec![0.0; n],
            factors: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Haar-distributed proper rotation: QR of a Gaussian matrix, with the signs
/// of `R`'s diagonal folded into `Q` and one column flipped if `det Q < 0`.
pub fn random_rotation(dim: usize, rng: &mut HarnessRng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Log-uniform scale factors in `[SCALE_MIN, SCALE_MAX]`.
pub fn random_scales(dim: usize, rng: &mut HarnessRng) -> Vec<f64> {
    let (lo, hi) = (SCALE_MIN.ln(), SCALE_MAX.ln());
    (0..dim).map(|_| rng.random_range(lo..=hi).exp()).collect()
}

pub fn random_transform_with(dim: usize, class: TransformClass, rng: &mut HarnessRng) -> Result<TransformSpec> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(match class {
        TransformClass::Rotation => {
            let q = random_rotation(dim, rng);
            TransformSpec::linear(class, q)
        }
        TransformClass::Scale => {
            let s = random_scales(dim, rng);
            TransformSpec::linear(class, DMatrix::from_diagonal(&s.into()))
        }
        TransformClass::Affine => {
            let r1 = random_rotation(dim, rng);
            let scales = random_scales(dim, rng);
            let r2 = random_rotation(dim, rng);
            let s = DMatrix::from_diagonal(&scales.clone().into());
            let mut t = TransformSpec::linear(class, &r2 * s * &r1);
            t.factors = Some(AffineFactors { r1, scales, r2 });
            t
        }
        TransformClass::Translation => {
            let offset = (0..dim)
                .map(|_| 5.0 * Distribution::<f64>::sample(&StandardNormal, rng))
                .collect::<Vec<f64>>();
            TransformSpec {
                offset,
                ..TransformSpec::identity(dim)
            }
        }
    })
}

/// Deterministic draw for a fixed seed.
pub fn random_transform(dim: usize, class: TransformClass, seed: u64) -> Result<TransformSpec> {
    random_transform_with(dim, class, &mut rng_from_seed(seed))
}

pub fn apply(t: &TransformSpec, cloud: &PointCloud) -> Result<PointCloud> {
    if t.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: cloud.dim(),
        });
    }
    let n = t.dim();
    Ok(cloud.map_points(
        |x| {
            (0..n)
                .map(|i| (0..n).map(|j| t.matrix[(i, j)] * x[j]).sum::<f64>() + t.offset[i])
                .collect()
        },
        t.det.abs(),
    ))
}

/// Centers a cloud and scales it to unit RMS radius (weights unchanged).
pub fn normalize_cloud(cloud: &PointCloud) -> Result<PointCloud> {
    let c = centroid(cloud)?;
    let total = cloud.total_weight();
    let ms: f64 = cloud
        .points()
        .map(|(x, w)| w * x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum::<f64>()
        / total;
    let r = ms.sqrt();
    if !(r > 0.0) {
        return Err(Error::DegenerateCloud(total));
    }
    Ok(cloud.map_points(|x| x.iter().zip(&c).map(|(a, b)| (a - b) / r).collect(), 1.0))
}

/// A generic asymmetric cloud: correlated Gaussian points with skewed
/// exponential offsets and weights in `[0.5, 1.5]`, normalized to unit RMS.
pub fn random_cloud(dim: usize, points: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = rng_from_seed(seed);
    let mix = DMatrix::from_fn(dim, dim, |i, j| {
        let g: f64 = StandardNormal.sample(&mut rng);
        if i == j {
            1.0 + 0.3 * g
        } else {
            0.4 * g
        }
    });
    let mut cloud = PointCloud::new(dim)?;
    for _ in 0..points {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x: Vec<f64> = (0..dim)
            .map(|i| {
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                (0..dim).map(|j| mix[(i, j)] * g[j]).sum::<f64>() - 0.5 * (i as f64 + 1.0) * u.ln()
            })
            .collect();
        let w = rng.random_range(0.5..1.5);
        cloud.push(&x, w)?;
    }
    normalize_cloud(&cloud)
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub id: String,
    pub class: &'static str,
    pub transform: TransformClass,
    pub trials: usize,
    pub max_rel_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<InvariantCheck>,
}

impl InvarianceReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_error(&self) -> f64 {
        self.checks.iter().map(|c| c.max_rel_error).fold(0.0, f64::max)
    }

    pub fn merge(&mut self, other: InvarianceReport) {
        self.checks.extend(other.checks);
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("seed={} tol={:e}\n", self.seed, self.tolerance);
        for c in &self.checks {
            s.push_str(&format!(
                "{:<12} {:<9} {:<12} trials={:<4} max_rel_err={:.3e} {}\n",
                c.id,
                c.class,
                c.transform.name(),
                c.trials,
                c.max_rel_error,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Relative change of every invariant over `trials` random transforms of
/// `class`, without checking that the classes are meant to match.
pub fn measure_invariance(
    invs: &[InvariantPolynomial],
    cloud: &PointCloud,
    class: TransformClass,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    let transforms = {
        let mut rng = rng_from_seed(seed);
        (0..trials)
            .map(|_| random_transform_with(cloud.dim(), class, &mut rng))
            .collect::<Result<Vec<_>>>()?
    };
    measure_with(invs, cloud, class, &transforms, tol, seed)
}

/// Relative change of every invariant under the given transforms.
pub fn measure_with(
    invs: &[InvariantPolynomial],
    cloud: &PointCloud,
    class: TransformClass,
    transforms: &[TransformSpec],
    tol: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    let order = invs.iter().map(InvariantPolynomial::max_order).max().unwrap_or(0);
    let base_table = central_moments(cloud, order)?;
    let base: Vec<f64> = invs.iter().map(|i| evaluate(i, &base_table)).collect::<Result<_>>()?;
    let mut worst = vec![0.0f64; invs.len()];
    for t in transforms {
        let table = central_moments(&apply(t, cloud)?, order)?;
        for (k, inv) in invs.iter().enumerate() {
            let v = evaluate(inv, &table)?;
            let err = (v - base[k]).abs() / base[k].abs().max(REL_ERROR_FLOOR);
            // NaN must count as a failure
            worst[k] = if err.is_nan() { f64::INFINITY } else { worst[k].max(err) };
        }
    }
    let checks = invs
        .iter()
        .zip(worst)
        .enumerate()
        .map(|(k, (inv, e))| InvariantCheck {
            id: format!("inv{k}"),
            class: inv.class.name(),
            transform: class,
            trials: transforms.len(),
            max_rel_error: e,
            pass: e <= tol,
        })
        .collect();
    Ok(InvarianceReport {
        seed,
        tolerance: tol,
        checks,
    })
}

/// Like [`measure_invariance`], but refuses invariant classes that are not
/// expected to survive `class`.
pub fn check_invariance(
    invs: &[InvariantPolynomial],
    cloud: &PointCloud,
    class: TransformClass,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    if let Some(bad) = invs
        .iter()
        .find(|i| !TransformClass::compatible_with(i.class).contains(&class))
    {
        return Err(Error::IncompatibleClass {
            invariant: bad.class.name(),
            transform: class.name(),
        });
    }
    measure_invariance(invs, cloud, class, trials, tol, seed)
}

/// Checks every invariant against each transform class it should survive.
/// Identifiers are `inv<k>` by position in `invs`.
pub fn verify_all(
    invs: &[InvariantPolynomial],
    cloud: &PointCloud,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    let mut report = InvarianceReport {
        seed,
        tolerance: tol,
        checks: Vec::new(),
    };
    for class in TransformClass::ALL {
        let picked: Vec<usize> = (0..invs.len())
            .filter(|&k| TransformClass::compatible_with(invs[k].class).contains(&class))
            .collect();
        if picked.is_empty() {
            continue;
        }
        let subset: Vec<InvariantPolynomial> = picked.iter().map(|&k| invs[k].clone()).collect();
        let mut part = check_invariance(&subset, cloud, class, trials, tol, seed)?;
        for (check, &k) in part.checks.iter_mut().zip(&picked) {
            check.id = format!("inv{k}");
        }
        report.merge(part);
    }
    Ok(report)
}
