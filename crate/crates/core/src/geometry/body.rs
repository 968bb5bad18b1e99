//! Strictly convex bodies presented as sublevel sets `{F <= 1}` of a gauge
//! function, each with an affine pose `x_world = R * x_local + c`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::PatternSearch;

pub type Point = DVector<f64>;

const STACK_DIM: usize = 16;

/// Numeric tolerances carried by a body. `boundary` bounds `|F - 1|` for a
/// point to count as on the sphere; `gap` is the chord length below which a
/// fiber counts as degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub boundary: f64,
    pub gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            boundary: 1e-8,
            gap: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { radius: f64 },
    Ellipsoid { semi_axes: Vec<f64> },
    Superellipsoid { exponent: f64, semi_axes: Vec<f64> },
    Intersection { members: Vec<ConvexBody> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    rotation: DMatrix<f64>,
    translation: Point,
    interior_point: Point,
    tolerances: Tolerances,
    identity_rotation: bool,
}

fn is_orthogonal(m: &DMatrix<f64>, tol: f64) -> bool {
    let g = m.transpose() * m;
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() <= tol))
}

fn is_identity(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| m[(i, j)] == if i == j { 1.0 } else { 0.0 }))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ConvexBody {
    fn primitive(dim: usize, shape: Shape) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidBody(format!("ambient dimension must be >= 2, got {dim}")));
        }
        match &shape {
            Shape::Ball { radius } => check_positive("radius", *radius)?,
            Shape::Ellipsoid { semi_axes } => {
                if semi_axes.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: semi_axes.len() });
                }
                for a in semi_axes {
                    check_positive("semi-axis", *a)?;
                }
            }
            Shape::Superellipsoid { exponent, semi_axes } => {
                if !(exponent.is_finite() && *exponent > 1.0) {
                    return Err(Error::InvalidBody(format!(
                        "superellipsoid exponent must lie in (1, inf), got {exponent}"
                    )));
                }
                if semi_axes.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: semi_axes.len() });
                }
                for a in semi_axes {
                    check_positive("semi-axis", *a)?;
                }
            }
            Shape::Intersection { .. } => unreachable!("intersections are built by ConvexBody::intersection"),
        }
        Ok(Self {
            dim,
            shape,
            rotation: DMatrix::identity(dim, dim),
            translation: Point::zeros(dim),
            interior_point: Point::zeros(dim),
            tolerances: Tolerances::default(),
            identity_rotation: true,
        })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::primitive(dim, Shape::Ball { radius })
    }

    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        Self::primitive(semi_axes.len(), Shape::Ellipsoid { semi_axes: semi_axes.to_vec() })
    }

    pub fn superellipsoid(exponent: f64, semi_axes: &[f64]) -> Result<Self> {
        Self::primitive(
            semi_axes.len(),
            Shape::Superellipsoid { exponent, semi_axes: semi_axes.to_vec() },
        )
    }

    /// Intersection of strictly convex members sharing one ambient dimension.
    /// The interior point defaults to a minimizer of the gauge (a deep point),
    /// since the shared origin may lie on or outside the intersection.
    pub fn intersection(members: Vec<ConvexBody>) -> Result<Self> {
        let dim = members
            .first()
            .map(|m| m.dim)
            .ok_or_else(|| Error::InvalidBody("intersection needs at least one member".into()))?;
        if let Some(m) = members.iter().find(|m| m.dim != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: m.dim });
        }
        let mut body = Self {
            dim,
            shape: Shape::Intersection { members },
            rotation: DMatrix::identity(dim, dim),
            translation: Point::zeros(dim),
            interior_point: Point::zeros(dim),
            tolerances: Tolerances::default(),
            identity_rotation: true,
        };
        body.interior_point = body.deepest_point()?;
        Ok(body)
    }

    fn deepest_point(&self) -> Result<Point> {
        let Shape::Intersection { members } = &self.shape else {
            return Ok(self.translation.clone());
        };
        // Local coordinates: mean of the members' own interior points.
        let mut start = Point::zeros(self.dim);
        for m in members {
            start += &m.interior_point;
        }
        start /= members.len() as f64;
        let scale = members.iter().map(|m| m.local_bound().1).fold(f64::INFINITY, f64::min);
        let search = PatternSearch {
            initial_step: 0.25 * scale,
            min_step: 1e-10 * scale,
            max_evals: 50_000,
            diagonals: true,
            target: f64::NEG_INFINITY,
        };
        let res = search.minimize(start.as_slice(), |y| self.local_gauge(y));
        if res.value >= 1.0 {
            return Err(Error::InvalidBody("intersection has empty interior".into()));
        }
        let local = Point::from_vec(res.x);
        Ok(&self.rotation * local + &self.translation)
    }

    /// Apply the rigid motion `x -> R x + c` on top of the current pose.
    pub fn transformed(&self, rotation: &DMatrix<f64>, translation: &Point) -> Result<Self> {
        self.check_dim(translation.len())?;
        if rotation.nrows() != self.dim || rotation.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rotation.nrows() });
        }
        if !is_orthogonal(rotation, 1e-10) {
            return Err(Error::InvalidBody("rotation is not orthogonal".into()));
        }
        let mut out = self.clone();
        out.rotation = rotation * &self.rotation;
        out.translation = rotation * &self.translation + translation;
        out.interior_point = rotation * &self.interior_point + translation;
        out.identity_rotation = is_identity(&out.rotation);
        Ok(out)
    }

    /// Replace the pose. The interior point is carried along with the body.
    pub fn with_pose(&self, rotation: DMatrix<f64>, translation: Point) -> Result<Self> {
        self.check_dim(translation.len())?;
        if rotation.nrows() != self.dim || rotation.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rotation.nrows() });
        }
        if !is_orthogonal(&rotation, 1e-10) {
            return Err(Error::InvalidBody("rotation is not orthogonal".into()));
        }
        let local_interior = self.rotation.transpose() * (&self.interior_point - &self.translation);
        let mut out = self.clone();
        out.interior_point = &rotation * local_interior + &translation;
        out.identity_rotation = is_identity(&rotation);
        out.rotation = rotation;
        out.translation = translation;
        Ok(out)
    }

    /// Override the interior point used by radial constructions.
    pub fn with_interior_point(mut self, p: Point) -> Result<Self> {
        self.check_dim(p.len())?;
        let g = self.gauge(&p)?;
        if g >= 1.0 {
            return Err(Error::InvalidBody(format!("interior point has gauge {g} >= 1")));
        }
        self.interior_point = p;
        Ok(self)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    /// Uniform scaling about the world origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        check_positive("scale", s)?;
        let mut out = self.clone();
        out.scale_in_place(s);
        Ok(out)
    }

    fn scale_in_place(&mut self, s: f64) {
        self.translation *= s;
        self.interior_point *= s;
        match &mut self.shape {
            Shape::Ball { radius } => *radius *= s,
            Shape::Ellipsoid { semi_axes } | Shape::Superellipsoid { semi_axes, .. } => {
                semi_axes.iter_mut().for_each(|a| *a *= s)
            }
            Shape::Intersection { members } => members.iter_mut().for_each(|m| m.scale_in_place(s)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn interior_point(&self) -> &Point {
        &self.interior_point
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found })
        }
    }

    /// Gauge value at `x`: below 1 inside, 1 on the sphere, above 1 outside.
    pub fn gauge(&self, x: &Point) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.gauge_slice(x.as_slice()))
    }

    /// Unchecked gauge on a raw coordinate slice of the right length.
    pub(crate) fn gauge_slice(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let n = self.dim;
        let mut stack = [0.0; STACK_DIM];
        let mut heap;
        let local: &mut [f64] = if n <= STACK_DIM {
            &mut stack[..n]
        } else {
            heap = vec![0.0; n];
            &mut heap[..]
        };
        if self.identity_rotation {
            for i in 0..n {
                local[i] = x[i] - self.translation[i];
            }
        } else {
            // local = R^T (x - c)
            for j in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += self.rotation[(i, j)] * (x[i] - self.translation[i]);
                }
                local[j] = acc;
            }
        }
        self.local_gauge(local)
    }

    /// Gauge at `base + t * dir` without allocating for small dimensions.
    pub(crate) fn gauge_along(&self, base: &[f64], t: f64, dir: &[f64]) -> f64 {
        let n = self.dim;
        if n <= STACK_DIM {
            let mut buf = [0.0; STACK_DIM];
            for i in 0..n {
                buf[i] = base[i] + t * dir[i];
            }
            self.gauge_slice(&buf[..n])
        } else {
            let v: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + t * d).collect();
            self.gauge_slice(&v)
        }
    }

    fn local_gauge(&self, y: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => y.iter().map(|v| v * v).sum::<f64>() / (radius * radius),
            Shape::Ellipsoid { semi_axes } => y
                .iter()
                .zip(semi_axes)
                .map(|(v, a)| {
                    let z = v / a;
                    z * z
                })
                .sum(),
            Shape::Superellipsoid { exponent, semi_axes } => {
                let q = *exponent;
                let int_q = q.fract() == 0.0 && q <= 32.0;
                y.iter()
                    .zip(semi_axes)
                    .map(|(v, a)| {
                        let z = (v / a).abs();
                        if int_q {
                            z.powi(q as i32)
                        } else {
                            z.powf(q)
                        }
                    })
                    .sum()
            }
            Shape::Intersection { members } => members
                .iter()
                .map(|m| m.gauge_slice(y))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Bounding ball `(center, radius)` in the parent's coordinates.
    fn local_bound(&self) -> (Point, f64) {
        let n = self.dim as f64;
        match &self.shape {
            Shape::Ball { radius } => (self.translation.clone(), *radius),
            Shape::Ellipsoid { semi_axes } => {
                (self.translation.clone(), semi_axes.iter().cloned().fold(0.0, f64::max))
            }
            Shape::Superellipsoid { exponent, semi_axes } => {
                let amax = semi_axes.iter().cloned().fold(0.0, f64::max);
                // |y|_2 <= n^(1/2 - 1/q) |y|_q for q > 2; the q-ball lies in the 2-ball otherwise.
                let factor = if *exponent > 2.0 { n.powf(0.5 - 1.0 / exponent) } else { 1.0 };
                (self.translation.clone(), amax * factor)
            }
            Shape::Intersection { members } => {
                let (c, r) = members
                    .iter()
                    .map(|m| m.local_bound())
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("intersection has members");
                (&self.rotation * c + &self.translation, r)
            }
        }
    }

    /// Support point from the Lagrange conditions of a single shape, in
    /// world coordinates. `None` for intersections.
    pub(crate) fn closed_form_support(&self, w: &Point) -> Option<Point> {
        let wl = self.rotation.transpose() * w;
        let local = match &self.shape {
            Shape::Ball { radius } => &wl * (*radius / wl.norm()),
            Shape::Ellipsoid { semi_axes } => {
                let z = Point::from_iterator(self.dim, wl.iter().zip(semi_axes).map(|(w, a)| a * a * w));
                let s: f64 = z.iter().zip(semi_axes).map(|(z, a)| (z / a) * (z / a)).sum();
                z / s.sqrt()
            }
            Shape::Superellipsoid { exponent, semi_axes } => {
                let q = *exponent;
                let z = Point::from_iterator(
                    self.dim,
                    wl.iter().zip(semi_axes).map(|(w, a)| w.signum() * (a.powf(q) * w.abs()).powf(1.0 / (q - 1.0))),
                );
                let s: f64 = z.iter().zip(semi_axes).map(|(z, a)| (z / a).abs().powf(q)).sum();
                z / s.powf(1.0 / q)
            }
            Shape::Intersection { .. } => return None,
        };
        Some(&self.rotation * local + &self.translation)
    }

    /// World-space ball containing the body.
    pub fn bounding_ball(&self) -> (Point, f64) {
        self.local_bound()
    }

    /// Radius bound used for brackets: `circumradius + |p - center| + 1`.
    pub(crate) fn bracket_for(&self, p: &[f64]) -> f64 {
        let (c, r) = self.local_bound();
        let d: f64 = p.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        r + d + 1.0
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ShapeFile {
    Ball { radius: f64 },
    Ellipsoid { semi_axes: Vec<f64> },
    Superellipsoid { exponent: f64, semi_axes: Vec<f64> },
    Intersection { members: Vec<BodyFile> },
}

/// On-disk body description. `dim` is required at the top level and may be
/// omitted on intersection members.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub shape: ShapeFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_point: Option<Vec<f64>>,
}

impl BodyFile {
    fn build(&self, dim: usize) -> Result<ConvexBody> {
        if let Some(d) = self.dim {
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
        }
        let body = match &self.shape {
            ShapeFile::Ball { radius } => ConvexBody::ball(dim, *radius)?,
            ShapeFile::Ellipsoid { semi_axes } => {
                if semi_axes.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: semi_axes.len() });
                }
                ConvexBody::ellipsoid(semi_axes)?
            }
            ShapeFile::Superellipsoid { exponent, semi_axes } => {
                if semi_axes.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: semi_axes.len() });
                }
                ConvexBody::superellipsoid(*exponent, semi_axes)?
            }
            ShapeFile::Intersection { members } => ConvexBody::intersection(
                members.iter().map(|m| m.build(dim)).collect::<Result<Vec<_>>>()?,
            )?,
        };
        let rotation = match &self.rotation {
            None => DMatrix::identity(dim, dim),
            Some(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidBody(format!("rotation must be {dim}x{dim}")));
                }
                DMatrix::from_fn(dim, dim, |i, j| rows[i][j])
            }
        };
        let translation = match &self.translation {
            None => Point::zeros(dim),
            Some(t) => {
                if t.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: t.len() });
                }
                Point::from_column_slice(t)
            }
        };
        let posed = if self.rotation.is_none() && self.translation.is_none() {
            body
        } else {
            body.with_pose(rotation, translation)?
        };
        match &self.interior_point {
            None => Ok(posed),
            Some(p) => posed.with_interior_point(Point::from_column_slice(p)),
        }
    }

    pub fn from_body(body: &ConvexBody) -> Self {
        let shape = match &body.shape {
            Shape::Ball { radius } => ShapeFile::Ball { radius: *radius },
            Shape::Ellipsoid { semi_axes } => ShapeFile::Ellipsoid { semi_axes: semi_axes.clone() },
            Shape::Superellipsoid { exponent, semi_axes } => ShapeFile::Superellipsoid {
                exponent: *exponent,
                semi_axes: semi_axes.clone(),
            },
            Shape::Intersection { members } => ShapeFile::Intersection {
                members: members
                    .iter()
                    .map(|m| {
                        let mut f = BodyFile::from_body(m);
                        f.dim = None;
                        f
                    })
                    .collect(),
            },
        };
        let n = body.dim;
        Self {
            dim: Some(n),
            shape,
            rotation: Some((0..n).map(|i| (0..n).map(|j| body.rotation[(i, j)]).collect()).collect()),
            translation: Some(body.translation.iter().cloned().collect()),
            interior_point: Some(body.interior_point.iter().cloned().collect()),
        }
    }
}

impl ConvexBody {
    pub fn from_file_spec(file: &BodyFile) -> Result<Self> {
        let dim = file
            .dim
            .ok_or_else(|| Error::InvalidBody("top-level body needs a `dim` field".into()))?;
        file.build(dim)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: BodyFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidBody(format!("body JSON: {e}")))?;
        Self::from_file_spec(&file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&BodyFile::from_body(self)).expect("body serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    #[test]
    fn ball_gauge_center_and_boundary() {
        let b = ConvexBody::ball(3, 1.0).unwrap();
        assert_eq!(b.gauge(&p(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(b.gauge(&p(&[1.0, 0.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn ellipse_gauge_by_hand() {
        let e = ConvexBody::ellipsoid(&[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(e.gauge(&p(&[0.5, 1.0])).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let b = ConvexBody::ball(3, 1.0).unwrap();
        assert!(matches!(
            b.gauge(&p(&[0.0, 0.0])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ConvexBody::ball(2, 0.0).is_err());
        assert!(ConvexBody::ball(1, 1.0).is_err());
        assert!(ConvexBody::ellipsoid(&[1.0, -2.0]).is_err());
        assert!(ConvexBody::superellipsoid(1.0, &[1.0, 1.0]).is_err());
        assert!(ConvexBody::superellipsoid(f64::INFINITY, &[1.0, 1.0]).is_err());
        let bad_rot = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(ConvexBody::ball(2, 1.0).unwrap().with_pose(bad_rot, p(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn disjoint_intersection_rejected() {
        let a = ConvexBody::ball(2, 1.0).unwrap();
        let b = ConvexBody::ball(2, 1.0)
            .unwrap()
            .transformed(&DMatrix::identity(2, 2), &p(&[3.0, 0.0]))
            .unwrap();
        assert!(ConvexBody::intersection(vec![a, b]).is_err());
    }

    #[test]
    fn lens_interior_point_is_deep() {
        let a = ConvexBody::ball(2, 1.0).unwrap().transformed(&DMatrix::identity(2, 2), &p(&[-0.5, 0.0])).unwrap();
        let b = ConvexBody::ball(2, 1.0).unwrap().transformed(&DMatrix::identity(2, 2), &p(&[0.5, 0.0])).unwrap();
        let lens = ConvexBody::intersection(vec![a, b]).unwrap();
        let ip = lens.interior_point();
        assert!(ip.norm() < 1e-6);
        assert!(lens.gauge(ip).unwrap() < 0.3);
    }

    #[test]
    fn json_round_trip_preserves_body() {
        let text = r#"{"dim": 3, "shape": {"type": "superellipsoid", "exponent": 4.0, "semi_axes": [1.0, 2.0, 3.0]},
                      "translation": [0.5, -1.0, 2.0]}"#;
        let body = ConvexBody::from_json_str(text).unwrap();
        assert_eq!(body.translation()[2], 2.0);
        let again = ConvexBody::from_json_str(&body.to_json_string()).unwrap();
        assert_eq!(body, again);
    }

    #[test]
    fn json_intersection_members() {
        let text = r#"{"dim": 2, "shape": {"type": "intersection", "members": [
            {"shape": {"type": "ball", "radius": 1.0}, "translation": [-0.5, 0.0]},
            {"shape": {"type": "ball", "radius": 1.0}, "translation": [0.5, 0.0]}]}}"#;
        let body = ConvexBody::from_json_str(text).unwrap();
        assert!(body.gauge(&p(&[0.0, 0.0])).unwrap() < 1.0);
        assert!(body.gauge(&p(&[0.0, 0.9])).unwrap() > 1.0);
    }

    #[test]
    fn json_missing_dim_rejected() {
        assert!(ConvexBody::from_json_str(r#"{"shape": {"type": "ball", "radius": 1.0}}"#).is_err());
        assert!(ConvexBody::from_json_str(r#"{"dim": 2, "shape": {"type": "ellipsoid", "semi_axes": [1.0]}}"#).is_err());
    }

    #[test]
    fn bounding_ball_contains_superellipsoid_corner() {
        let s = ConvexBody::superellipsoid(8.0, &[1.0, 1.0, 1.0]).unwrap();
        let (c, r) = s.bounding_ball();
        // near-corner boundary point along the diagonal
        let t = (1.0f64 / 3.0).powf(1.0 / 8.0);
        let corner = p(&[t, t, t]);
        assert!((corner - c).norm() <= r + 1e-12);
    }
}
