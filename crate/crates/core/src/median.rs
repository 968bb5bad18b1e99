//! Upper/lower envelopes of a body along a frame axis and the median
//! surface of chord midpoints, as a height function over reduced
//! coordinates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{insert_coord, reduced_coords, remove_coord, ChordResult, ConvexBody, Frame, Point, ShadowClass};
use crate::numeric::bisect_predicate;
use crate::par;

/// Median evaluator for one axis `i` (0-based) of a frame.
#[derive(Debug, Clone)]
pub struct MedianEvaluator<'a> {
    body: &'a ConvexBody,
    frame: &'a Frame,
    axis: usize,
    y0: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianSample {
    pub y: Vec<f64>,
    pub point: Option<Vec<f64>>,
    pub class: ShadowClass,
}

/// Samples of a median on a regular grid of reduced coordinates. Samples
/// are stored row-major: the first reduced coordinate varies slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianSampleSet {
    pub axis: usize,
    pub resolution: usize,
    pub samples: Vec<MedianSample>,
}

impl<'a> MedianEvaluator<'a> {
    pub fn new(body: &'a ConvexBody, frame: &'a Frame, axis: usize) -> Result<Self> {
        body.check_dim(frame.dim())?;
        if axis >= frame.dim() {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", frame.dim())));
        }
        let y0 = reduced_coords(frame, body.interior_point(), axis)?;
        let class = body.shadow_classify(frame, axis, &y0, body.tolerances().gap)?;
        if !class.is_interior() {
            return Err(Error::InvalidBody(format!(
                "interior point does not project into the shadow interior along axis {axis}"
            )));
        }
        Ok(Self { body, frame, axis, y0 })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn body(&self) -> &ConvexBody {
        self.body
    }

    pub fn frame(&self) -> &Frame {
        self.frame
    }

    /// Reduced coordinates of the body's interior point.
    pub fn interior_reduced(&self) -> &Point {
        &self.y0
    }

    pub fn classify(&self, y: &Point) -> Result<(ShadowClass, ChordResult)> {
        self.body.shadow_classify_with(self.frame, self.axis, y, self.body.tolerances().gap)
    }

    /// Fiber endpoints `(x_plus, x_minus)` with `x_plus . v_i > x_minus . v_i`.
    pub fn envelope_points(&self, y: &Point) -> Result<(Point, Point)> {
        match self.classify(y)? {
            (ShadowClass::Interior { .. }, ChordResult::Chord(c)) => Ok((c.x_plus, c.x_minus)),
            (class, _) => Err(Error::FiberDegenerate { axis: self.axis, class }),
        }
    }

    /// `v_i`-coordinate of the chord midpoint (or tangent point) over `y`.
    pub fn median_height(&self, y: &Point) -> Result<f64> {
        let (_, chord) = self.classify(y)?;
        self.height_of(&chord)
    }

    fn height_of(&self, chord: &ChordResult) -> Result<f64> {
        let v = self.frame.axis(self.axis);
        match chord {
            ChordResult::Chord(c) => Ok(c.midpoint().dot(&v)),
            ChordResult::Tangent(x) => Ok(x.dot(&v)),
            ChordResult::Empty => Err(Error::OutsideShadow { axis: self.axis }),
        }
    }

    /// Median height composed with the radial clamp onto the shadow.
    pub fn median_height_extended(&self, y: &Point) -> Result<f64> {
        let (class, chord) = self.classify(y)?;
        if !class.is_outside() {
            return self.height_of(&chord);
        }
        let clamped = self.body.radial_clamp_shadow(self.frame, self.axis, y)?;
        self.median_height(&clamped)
    }

    /// Signed offset `x . v_i - median_height_extended(p_i(x))`.
    pub fn median_offset(&self, x: &Point) -> Result<f64> {
        self.body.check_dim(x.len())?;
        let c = self.frame.coords(x);
        self.offset_in_frame(&c)
    }

    /// Offset for a point given by its frame coordinates.
    pub fn offset_in_frame(&self, c: &Point) -> Result<f64> {
        let y = remove_coord(c, self.axis);
        Ok(c[self.axis] - self.median_height_extended(&y)?)
    }

    /// World point on the median over `y`.
    pub fn median_point(&self, y: &Point) -> Result<Point> {
        let h = self.median_height(y)?;
        Ok(self.frame.point(&insert_coord(y, self.axis, h)))
    }

    /// Regular grid of `resolution` points per reduced axis over the frame
    /// coordinate bounding box of the body's circumscribed ball.
    pub fn median_mesh(&self, resolution: usize) -> Result<MedianSampleSet> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!("mesh resolution must be >= 2, got {resolution}")));
        }
        let (center, radius) = self.body.bounding_ball();
        let cc = remove_coord(&self.frame.coords(&center), self.axis);
        let m = cc.len();
        let total = resolution
            .checked_pow(m as u32)
            .ok_or_else(|| Error::InvalidArgument("mesh too large".into()))?;
        let step = 2.0 * radius / (resolution - 1) as f64;
        let samples = par::map_range(total, |idx| {
            let mut rem = idx;
            let mut y = vec![0.0; m];
            for k in (0..m).rev() {
                let j = rem % resolution;
                rem /= resolution;
                y[k] = if j == resolution - 1 { cc[k] + radius } else { cc[k] - radius + step * j as f64 };
            }
            let yp = Point::from_column_slice(&y);
            let (class, chord) = self.classify(&yp)?;
            let point = match class {
                ShadowClass::Outside => None,
                _ => {
                    let h = self.height_of(&chord)?;
                    Some(self.frame.point(&insert_coord(&yp, self.axis, h)).iter().cloned().collect())
                }
            };
            Ok(MedianSample { y, point, class })
        });
        Ok(MedianSampleSet {
            axis: self.axis,
            resolution,
            samples: samples.into_iter().collect::<Result<Vec<_>>>()?,
        })
    }

    /// Points of the silhouette `D^0` found by radial bisection in the
    /// reduced plane from the interior point, along `2 n * resolution`
    /// directions (`n` = reduced dimension).
    pub fn boundary_sphere_sample(&self, resolution: usize, seed: u64) -> Result<Vec<Point>> {
        if resolution < 1 {
            return Err(Error::InvalidArgument("boundary sample resolution must be >= 1".into()));
        }
        let dirs = reduced_directions(self.y0.len(), 2 * self.y0.len() * resolution, seed);
        par::map_slice(&dirs, |u| self.silhouette_point(u)).into_iter().collect()
    }

    /// Silhouette point reached from the interior point along reduced direction `u`.
    pub fn silhouette_point(&self, u: &Point) -> Result<Point> {
        let reach = 2.0 * self.body.bracket_for(self.body.interior_point().as_slice());
        let at = |s: f64| &self.y0 + u * s;
        let (lo, _) = bisect_predicate(0.0, reach, |s| {
            matches!(self.classify(&at(s)), Ok((c, _)) if !c.is_outside())
        });
        match self.classify(&at(lo))? {
            (_, ChordResult::Tangent(x)) => Ok(x),
            (_, ChordResult::Chord(c)) => Ok(c.midpoint()),
            (_, ChordResult::Empty) => Err(Error::Numeric("silhouette search left the shadow".into())),
        }
    }
}

/// Unit directions in `R^m`: `{+1, -1}` cycled for `m = 1`, a regular angular
/// grid for `m = 2`, seeded Gaussian directions otherwise.
pub fn reduced_directions(m: usize, count: usize, seed: u64) -> Vec<Point> {
    match m {
        1 => (0..count).map(|k| Point::from_element(1, if k % 2 == 0 { 1.0 } else { -1.0 })).collect(),
        2 => (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                Point::from_column_slice(&[a.cos(), a.sin()])
            })
            .collect(),
        _ => gaussian_directions(m, count, seed),
    }
}

/// `count` seeded directions uniformly distributed on the unit sphere of `R^m`.
pub fn gaussian_directions(m: usize, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = Point::from_fn(m, |_, _| StandardNormal.sample(&mut rng));
        let n = v.norm();
        if n > 1e-12 {
            out.push(v / n);
        }
    }
    out
}
