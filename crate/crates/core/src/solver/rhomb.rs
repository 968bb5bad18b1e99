use serde::{Deserialize, Serialize};

use super::{fixed_point_solve, miranda_root, MedianField, Method, SearchBox, SignField, SolverConfig, SolverReport};
use crate::error::{Error, Result};
use crate::geometry::{remove_coord, ChordResult, ConvexBody, Frame, Point, ShadowClass};
use crate::median::MedianEvaluator;

/// Tolerance used to accept a freshly inscribed rhomb.
pub const VERIFY_TOL: f64 = 1e-6;

/// Convex hull of `center +- half_diagonals[i] * v_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhomb {
    pub center: Point,
    pub directions: Frame,
    pub half_diagonals: Vec<f64>,
    /// Ordered `[v_1+, v_1-, v_2+, v_2-, ...]`.
    pub vertices: Vec<Point>,
}

impl Rhomb {
    pub fn new(center: Point, directions: Frame, half_diagonals: Vec<f64>) -> Result<Self> {
        let n = directions.dim();
        if center.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: center.len() });
        }
        if half_diagonals.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: half_diagonals.len() });
        }
        let mut vertices = Vec::with_capacity(2 * n);
        for (i, &l) in half_diagonals.iter().enumerate() {
            let v = directions.axis(i);
            vertices.push(&center + &v * l);
            vertices.push(&center - &v * l);
        }
        Ok(Self { center, directions, half_diagonals, vertices })
    }

    pub fn dim(&self) -> usize {
        self.directions.dim()
    }

    /// Largest minus smallest half-diagonal.
    pub fn spread(&self) -> f64 {
        let max = self.half_diagonals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.half_diagonals.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Max over vertices of `|gauge - 1|`.
    pub inscription: f64,
    /// Max of `|v_i . v_j - delta_ij|`.
    pub orthonormality: f64,
    /// Max distance between a diagonal's midpoint and the center.
    pub midpoint: f64,
    pub min_half_diagonal: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn verify_rhomb(body: &ConvexBody, rhomb: &Rhomb, tol: f64) -> Result<VerificationReport> {
    let n = rhomb.dim();
    body.check_dim(n)?;
    if rhomb.vertices.len() != 2 * n || rhomb.half_diagonals.len() != n {
        return Err(Error::DimensionMismatch { expected: 2 * n, found: rhomb.vertices.len() });
    }
    let mut inscription = 0.0f64;
    for v in &rhomb.vertices {
        inscription = inscription.max((body.gauge(v)? - 1.0).abs());
    }
    let orthonormality = rhomb.directions.gram_residual();
    let midpoint = (0..n)
        .map(|i| ((&rhomb.vertices[2 * i] + &rhomb.vertices[2 * i + 1]) * 0.5 - &rhomb.center).norm())
        .fold(0.0, f64::max);
    let min_half_diagonal = rhomb.half_diagonals.iter().cloned().fold(f64::INFINITY, f64::min);
    let passed = inscription <= tol && orthonormality <= 1e-10 && midpoint <= tol && min_half_diagonal > tol;
    Ok(VerificationReport { inscription, orthonormality, midpoint, min_half_diagonal, tol, passed })
}

/// Frame-coordinate search box around the body's circumscribed ball.
pub fn search_box(body: &ConvexBody, frame: &Frame) -> Result<SearchBox> {
    body.check_dim(frame.dim())?;
    let (c, r) = body.bounding_ball();
    let cc = frame.coords(&c);
    SearchBox::centered(cc.as_slice(), r * 1.01 + 1e-6)
}

/// Inscribed rhomb with direction `frame`.
///
/// The center is a common zero of the median-offset fields: the damped
/// fixed-point iteration runs first and the Miranda bisection takes over if
/// it does not converge. The diagonals are the chords through the zero.
pub fn inscribe_rhomb(body: &ConvexBody, frame: &Frame, config: &SolverConfig) -> Result<(Rhomb, SolverReport)> {
    config.validate()?;
    body.check_dim(frame.dim())?;
    let n = frame.dim();
    let medians = (0..n).map(|i| MedianEvaluator::new(body, frame, i)).collect::<Result<Vec<_>>>()?;

    let (fp_point, fp_report) = fixed_point_solve(body, frame, body.interior_point(), config)?;
    let (center, report) = if fp_report.converged {
        (fp_point, fp_report)
    } else {
        let bx = search_box(body, frame)?;
        let fields: Vec<MedianField> = medians.iter().cloned().map(MedianField::new).collect();
        let refs: Vec<&dyn SignField> = fields.iter().map(|f| f as &dyn SignField).collect();
        let (c, m) = miranda_root(&refs, &bx, config).map_err(|e| match e {
            Error::MirandaPrecondition { axis, face, value } => Error::HypothesisViolation(format!(
                "median field {} fails the sign condition on the {face} face of the search box (value {value:e})",
                axis + 1
            )),
            other => other,
        })?;
        let report = SolverReport {
            method: Method::Hybrid,
            iterations: fp_report.iterations + m.iterations,
            final_residual: m.final_residual,
            boxes_explored: m.boxes_explored,
            converged: m.converged,
        };
        (frame.point(&c), report)
    };

    let c = frame.coords(&center);
    let mut half = Vec::with_capacity(n);
    for (i, m) in medians.iter().enumerate() {
        match m.classify(&remove_coord(&c, i))? {
            (ShadowClass::Interior { .. }, ChordResult::Chord(ch)) => half.push(0.5 * ch.gap()),
            _ => return Err(Error::DegenerateIntersection { axis: i }),
        }
    }
    let rhomb = Rhomb::new(center, frame.clone(), half)?;
    let check = verify_rhomb(body, &rhomb, VERIFY_TOL)?;
    if !check.passed {
        return Err(Error::VerificationFailed(format!(
            "inscription {:e}, midpoint {:e}, orthonormality {:e}, min half-diagonal {:e}",
            check.inscription, check.midpoint, check.orthonormality, check.min_half_diagonal
        )));
    }
    Ok((rhomb, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub inscription: f64,
    pub midpoint: f64,
    pub orthonormality: f64,
}

/// JSON form of a solved rhomb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhombRecord {
    pub center: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    pub half_diagonals: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
    pub residuals: ResidualSummary,
    pub report: SolverReport,
}

impl RhombRecord {
    pub fn new(rhomb: &Rhomb, check: &VerificationReport, report: &SolverReport) -> Self {
        Self {
            center: rhomb.center.iter().cloned().collect(),
            directions: rhomb.directions.rows(),
            half_diagonals: rhomb.half_diagonals.clone(),
            vertices: rhomb.vertices.iter().map(|v| v.iter().cloned().collect()).collect(),
            residuals: ResidualSummary {
                inscription: check.inscription,
                midpoint: check.midpoint,
                orthonormality: check.orthonormality,
            },
            report: report.clone(),
        }
    }

    pub fn to_rhomb(&self) -> Result<Rhomb> {
        let directions = Frame::try_from(self.directions.clone())?;
        let mut r = Rhomb::new(Point::from_column_slice(&self.center), directions, self.half_diagonals.clone())?;
        if self.vertices.len() != r.vertices.len() {
            return Err(Error::DimensionMismatch { expected: r.vertices.len(), found: self.vertices.len() });
        }
        r.vertices = self.vertices.iter().map(|v| Point::from_column_slice(v)).collect();
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::plane_rotation;
    use approx::assert_abs_diff_eq;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    #[test]
    fn ball_gives_unit_crosspolytope() {
        let b = ConvexBody::ball(3, 1.0).unwrap();
        let (r, rep) = inscribe_rhomb(&b, &Frame::identity(3), &SolverConfig::default()).unwrap();
        assert!(rep.converged);
        assert!(r.center.norm() <= 1e-9);
        for l in &r.half_diagonals {
            assert_abs_diff_eq!(*l, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn ellipsoid_half_diagonals_are_semi_axes() {
        let e = ConvexBody::ellipsoid(&[1.0, 2.0, 3.0]).unwrap();
        let (r, _) = inscribe_rhomb(&e, &Frame::identity(3), &SolverConfig::default()).unwrap();
        assert!(r.center.norm() <= 1e-9);
        for (l, a) in r.half_diagonals.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*l, a, epsilon = 1e-8);
        }
    }

    #[test]
    fn superellipsoid_rotated_frame() {
        let s = ConvexBody::superellipsoid(4.0, &[1.0, 1.0, 1.0]).unwrap();
        let f = Frame::identity(3).rotated(&plane_rotation(3, 0, 1, std::f64::consts::PI / 6.0)).unwrap();
        let (r, _) = inscribe_rhomb(&s, &f, &SolverConfig::default()).unwrap();
        assert!(r.center.norm() <= 1e-7);
        // Oracle: the chord through the symmetry center along v has half-length
        // 1 / |v|_4, from |t v|_4 = 1.
        for i in 0..3 {
            let v = f.axis(i);
            let q4: f64 = v.iter().map(|x| x.powi(4)).sum::<f64>().powf(0.25);
            assert_abs_diff_eq!(r.half_diagonals[i], 1.0 / q4, epsilon = 1e-8);
        }
    }

    #[test]
    fn verify_examples() {
        let b = ConvexBody::ball(3, 1.0).unwrap();
        let f = Frame::identity(3);
        let ok = verify_rhomb(&b, &Rhomb::new(p(&[0.0; 3]), f.clone(), vec![1.0; 3]).unwrap(), 1e-6).unwrap();
        assert!(ok.passed);
        assert_eq!(ok.inscription, 0.0);
        assert_eq!(ok.midpoint, 0.0);

        let short = verify_rhomb(&b, &Rhomb::new(p(&[0.0; 3]), f.clone(), vec![1.0, 1.0, 0.5]).unwrap(), 1e-6).unwrap();
        assert!(!short.passed);
        assert_abs_diff_eq!(short.inscription, 0.75, epsilon = 1e-15);

        let off = verify_rhomb(&b, &Rhomb::new(p(&[0.1, 0.0, 0.0]), f, vec![1.0; 3]).unwrap(), 1e-6).unwrap();
        assert!(!off.passed);
        assert_abs_diff_eq!(off.inscription, 0.21, epsilon = 1e-12);
    }

    #[test]
    fn record_round_trips_through_json() {
        let e = ConvexBody::ellipsoid(&[1.0, 1.5]).unwrap();
        let f = Frame::identity(2).givens(&[0.4]).unwrap();
        let (r, rep) = inscribe_rhomb(&e, &f, &SolverConfig::default()).unwrap();
        let check = verify_rhomb(&e, &r, 1e-6).unwrap();
        let rec = RhombRecord::new(&r, &check, &rep);
        let text = serde_json::to_string(&rec).unwrap();
        let back: RhombRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(rec, back);
        assert_eq!(back.to_rhomb().unwrap(), r);
    }
}
