use serde::{Deserialize, Serialize};

use super::body::{ConvexBody, Point};
use crate::error::{Error, Result};
use crate::numeric::{bisect_predicate, golden_min};

/// Intersection of the line `base + t * direction` with the body, when it
/// has two distinct endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberChord {
    pub base: Point,
    pub direction: Point,
    pub t_minus: f64,
    pub t_plus: f64,
    pub x_minus: Point,
    pub x_plus: Point,
}

impl FiberChord {
    pub fn gap(&self) -> f64 {
        self.t_plus - self.t_minus
    }

    pub fn midpoint(&self) -> Point {
        (&self.x_plus + &self.x_minus) * 0.5
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChordResult {
    Empty,
    Tangent(Point),
    Chord(FiberChord),
}

impl ChordResult {
    /// Chord length, zero for tangent or empty fibers.
    pub fn gap(&self) -> f64 {
        match self {
            ChordResult::Chord(c) => c.gap(),
            _ => 0.0,
        }
    }
}

impl ConvexBody {
    /// Intersect the line `base + t * direction` with the body.
    ///
    /// The gauge restricted to the line is convex, so its minimizer is found
    /// by golden-section search; the two level-1 crossings on either side are
    /// then isolated by bisection.
    pub fn chord(&self, base: &Point, direction: &Point) -> Result<ChordResult> {
        self.check_dim(base.len())?;
        self.check_dim(direction.len())?;
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "chord direction must be a unit vector (norm {})",
                direction.norm()
            )));
        }
        let (b, d) = (base.as_slice(), direction.as_slice());
        let bracket = self.bracket_for(b);
        if !bracket.is_finite() {
            return Err(Error::InvalidArgument("cannot bracket the fiber: unbounded body".into()));
        }
        let phi = |t: f64| self.gauge_along(b, t, d);
        let (t_min, m) = golden_min(-bracket, bracket, phi)
            .map_err(|t| Error::Numeric(format!("non-finite gauge on fiber at t = {t}")))?;
        let tol = self.tolerances().boundary;
        if m > 1.0 + tol {
            return Ok(ChordResult::Empty);
        }
        if (m - 1.0).abs() <= tol {
            return Ok(ChordResult::Tangent(base + direction * t_min));
        }
        let inside = |t: f64| phi(t) <= 1.0;
        let (lo_in, lo_out) = bisect_predicate(t_min, -bracket, inside);
        let (hi_in, hi_out) = bisect_predicate(t_min, bracket, inside);
        let pick = |a: f64, b: f64| if (phi(a) - 1.0).abs() <= (phi(b) - 1.0).abs() { a } else { b };
        let t_minus = pick(lo_out, lo_in);
        let t_plus = pick(hi_in, hi_out);
        Ok(ChordResult::Chord(FiberChord {
            base: base.clone(),
            direction: direction.clone(),
            t_minus,
            t_plus,
            x_minus: base + direction * t_minus,
            x_plus: base + direction * t_plus,
        }))
    }

    /// `1 - min_t gauge(x + t dir)`: how far the line dips into the body.
    /// Zero exactly when the line is tangent at a boundary point `x`, and,
    /// unlike the chord gap, free of the tangency tolerance band.
    pub fn fiber_depth(&self, x: &[f64], dir: &[f64]) -> f64 {
        let bracket = self.bracket_for(x);
        match golden_min(-bracket, bracket, |t| self.gauge_along(x, t, dir)) {
            Ok((_, m)) => 1.0 - m,
            Err(_) => f64::NAN,
        }
    }

    /// Boundary point on the ray from the interior point `z0` along unit `u`.
    pub fn boundary_scale(&self, z0: &Point, u: &Point) -> Result<Point> {
        self.check_dim(z0.len())?;
        self.check_dim(u.len())?;
        let r = self.boundary_radius(z0.as_slice(), u.as_slice())?;
        Ok(z0 + u * r)
    }

    /// Ray parameter `r` with `gauge(z0 + r u) = 1`; `u` need not be unit.
    pub(crate) fn boundary_radius(&self, z0: &[f64], u: &[f64]) -> Result<f64> {
        let g0 = self.gauge_slice(z0);
        if !(g0 < 1.0) {
            return Err(Error::InvalidArgument(format!("ray origin is not interior (gauge {g0})")));
        }
        let unorm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(unorm > 0.0) || !unorm.is_finite() {
            return Err(Error::InvalidArgument("ray direction must be non-zero".into()));
        }
        let r_hi = self.bracket_for(z0) / unorm;
        let (lo, _) = bisect_predicate(0.0, r_hi, |r| self.gauge_along(z0, r, u) <= 1.0);
        if !self.gauge_along(z0, lo, u).is_finite() {
            return Err(Error::Numeric("non-finite gauge along ray".into()));
        }
        Ok(lo)
    }
}
