//! Sampled checks of the conditions that guarantee an inscribed rhomb:
//! special corners, regularity with respect to the frame, and the
//! arrangement of the silhouettes `D_i^0`.
//!
//! Every check is a sampled falsification or confirmation, never a proof.
//! Axis indices in reports are 0-based.

pub mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Frame, Point};
use crate::median::gaussian_directions;
use crate::par;
use search::{all_gaps, dedupe, gap_through, sphere_directions, subsets, tangency_candidates};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Sampling density per sphere dimension; must be at least 8.
    pub resolution: usize,
    /// Chord gap at or below which a fiber counts as tangent.
    pub tol: f64,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { resolution: 24, tol: 1e-4, seed: 0 }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 8 {
            return Err(Error::InvalidArgument(format!("resolution must be >= 8, got {}", self.resolution)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    fn seeds(&self, d: usize) -> usize {
        (4 * d).max(8)
    }
}

fn vec_of(x: &Point) -> Vec<f64> {
    x.iter().cloned().collect()
}

/// A boundary point whose fibers along every frame axis are tangent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialCornerHit {
    pub point: Vec<f64>,
    pub gaps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityViolation {
    pub point: Vec<f64>,
    pub axes: Vec<usize>,
    /// A second point of the fiber spanned by `axes` through `point`.
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleCheck {
    pub axis: usize,
    pub x_plus: Vec<f64>,
    pub x_minus: Vec<f64>,
    /// Largest transverse chord gap through either pole.
    pub max_gap: f64,
    pub ordered: bool,
    pub passed: bool,
}

/// Evidence that the silhouettes along `axes` share enough points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionCertificate {
    pub axes: Vec<usize>,
    pub required: usize,
    pub found: usize,
    pub points: Vec<Vec<f64>>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub dim: usize,
    pub resolution: usize,
    pub tol: f64,
    pub seed: u64,
    pub special_corners: Vec<SpecialCornerHit>,
    pub regularity_violations: Vec<RegularityViolation>,
    pub pole_checks: Vec<PoleCheck>,
    pub intersection_certificates: Vec<IntersectionCertificate>,
    pub total_intersection_empty: bool,
    /// Smallest max-over-axes chord gap seen on the sampled sphere.
    pub min_max_gap: f64,
    pub passed: bool,
}

/// Boundary points where the chord along every frame axis degenerates.
pub fn special_corner_scan(body: &ConvexBody, frame: &Frame, config: &ScanConfig) -> Result<Vec<SpecialCornerHit>> {
    config.validate()?;
    body.check_dim(frame.dim())?;
    let d = frame.dim();
    let axes: Vec<usize> = (0..d).collect();
    let dirs = sphere_directions(d, config.resolution, config.seed);
    let candidates = tangency_candidates(body, frame, &axes, &dirs, config.seeds(d));
    let hits: Vec<(f64, Point)> = candidates
        .into_iter()
        .filter(|(_, x)| all_gaps(body, frame, x).iter().all(|&g| g <= config.tol))
        .collect();
    Ok(dedupe(hits, 10.0 * config.tol)
        .into_iter()
        .map(|(_, x)| SpecialCornerHit { gaps: all_gaps(body, frame, &x), point: vec_of(&x) })
        .collect())
}

/// Orthonormal directions in the span of the frame axes `axes`.
fn span_directions(frame: &Frame, axes: &[usize], resolution: usize, seed: u64) -> Vec<Point> {
    let k = axes.len();
    let coeffs: Vec<Point> = if k == 2 {
        let m = 4 * resolution;
        (0..m)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / m as f64;
                Point::from_column_slice(&[a.cos(), a.sin()])
            })
            .collect()
    } else {
        gaussian_directions(k, 4 * resolution * resolution, seed)
    };
    coeffs
        .iter()
        .map(|c| axes.iter().zip(c.iter()).fold(Point::zeros(frame.dim()), |acc, (&i, &w)| acc + frame.axis(i) * w))
        .collect()
}

/// Boundary points where the fibers along each `v_i` (`i` in `I`) are
/// tangent while the joint fiber spanned by those axes still meets the body
/// away from the point. The witness must be at least `tol` deep in gauge
/// terms, so flat but smooth patches do not register.
pub fn regularity_probe(body: &ConvexBody, frame: &Frame, config: &ScanConfig) -> Result<Vec<RegularityViolation>> {
    config.validate()?;
    body.check_dim(frame.dim())?;
    let d = frame.dim();
    let dirs = sphere_directions(d, config.resolution, config.seed);
    let (_, radius) = body.bounding_ball();
    let steps = config.resolution;
    let r_min = 20.0 * config.tol;
    let r_max = 2.0 * radius;
    let radii: Vec<f64> = (0..steps).map(|k| r_min * (r_max / r_min).powf(k as f64 / (steps - 1) as f64)).collect();
    let mut out = Vec::new();
    for axes in subsets(d, 2, d - 1) {
        let candidates = tangency_candidates(body, frame, &axes, &dirs, 4 * config.seeds(d));
        let tangent: Vec<(f64, Point)> = candidates
            .into_iter()
            .filter(|(_, x)| axes.iter().all(|&i| gap_through(body, x, &frame.axis(i)) <= config.tol))
            .collect();
        let span = span_directions(frame, &axes, config.resolution, config.seed);
        for (_, x) in dedupe(tangent, 10.0 * config.tol) {
            let found = par::map_slice(&span, |u| {
                radii.iter().map(|&r| &x + u * r).find(|p| body.gauge(p).is_ok_and(|g| g <= 1.0 - config.tol))
            });
            if let Some(w) = found.into_iter().flatten().next() {
                out.push(RegularityViolation { point: vec_of(&x), axes: axes.clone(), witness: vec_of(&w) });
            }
        }
    }
    Ok(out)
}

/// Support points `x^+-` along `+-v_j` and whether every other axis fiber
/// through them is tangent.
pub fn pole_check(body: &ConvexBody, frame: &Frame, j: usize, tol: f64) -> Result<PoleCheck> {
    body.check_dim(frame.dim())?;
    let d = frame.dim();
    if j >= d {
        return Err(Error::InvalidArgument(format!("axis {j} out of range for dimension {d}")));
    }
    let v = frame.axis(j);
    let x_plus = body.support_point(&v)?;
    let x_minus = body.support_point(&(-&v))?;
    let max_gap = (0..d)
        .filter(|&i| i != j)
        .flat_map(|i| {
            let a = frame.axis(i);
            [gap_through(body, &x_plus, &a), gap_through(body, &x_minus, &a)]
        })
        .fold(0.0, f64::max);
    let ordered = x_plus.dot(&v) > x_minus.dot(&v);
    Ok(PoleCheck {
        axis: j,
        x_plus: vec_of(&x_plus),
        x_minus: vec_of(&x_minus),
        max_gap,
        ordered,
        passed: ordered && max_gap <= tol,
    })
}

/// Aggregate of the corner scan, regularity probe, pole checks and sampled
/// non-emptiness certificates for every partial silhouette intersection.
pub fn crosspolytope_condition_report(body: &ConvexBody, frame: &Frame, config: &ScanConfig) -> Result<DiagnosticsReport> {
    config.validate()?;
    body.check_dim(frame.dim())?;
    let d = frame.dim();
    let special_corners = special_corner_scan(body, frame, config)?;
    let regularity_violations = regularity_probe(body, frame, config)?;
    let pole_checks = (0..d).map(|j| pole_check(body, frame, j, config.tol)).collect::<Result<Vec<_>>>()?;

    let dirs = sphere_directions(d, config.resolution, config.seed);
    let mut intersection_certificates = Vec::new();
    for axes in subsets(d, 1, d - 1) {
        let required = 2 * (d - axes.len());
        let seeds = config.seeds(d).max(3 * required);
        let tangent: Vec<(f64, Point)> = tangency_candidates(body, frame, &axes, &dirs, seeds)
            .into_iter()
            .filter(|(_, x)| axes.iter().all(|&i| gap_through(body, x, &frame.axis(i)) <= config.tol))
            .collect();
        let distinct = dedupe(tangent, 100.0 * config.tol);
        intersection_certificates.push(IntersectionCertificate {
            axes,
            required,
            found: distinct.len(),
            points: distinct.iter().map(|(_, x)| vec_of(x)).collect(),
            passed: distinct.len() >= required,
        });
    }

    let sampled = par::map_slice(&dirs, |u| {
        search::boundary_along(body, u.as_slice()).map(|x| all_gaps(body, frame, &x).into_iter().fold(0.0, f64::max))
    });
    let min_max_gap = sampled.into_iter().flatten().fold(f64::INFINITY, f64::min);
    let total_intersection_empty = special_corners.is_empty();
    let passed = total_intersection_empty
        && regularity_violations.is_empty()
        && pole_checks.iter().all(|p| p.passed)
        && intersection_certificates.iter().all(|c| c.passed);
    Ok(DiagnosticsReport {
        dim: d,
        resolution: config.resolution,
        tol: config.tol,
        seed: config.seed,
        special_corners,
        regularity_violations,
        pole_checks,
        intersection_certificates,
        total_intersection_empty,
        min_max_gap,
        passed,
    })
}
