//! Projections along frame axes and the shadow (projection) of a body.

use serde::{Deserialize, Serialize};

use super::body::{ConvexBody, Point};
use super::chord::ChordResult;
use super::frame::Frame;
use crate::error::{Error, Result};
use crate::numeric::bisect_predicate;

/// Where a reduced point sits relative to the shadow `p_i(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum ShadowClass {
    Interior { gap: f64 },
    Boundary { gap: f64 },
    Outside,
}

impl ShadowClass {
    pub fn gap(&self) -> f64 {
        match self {
            ShadowClass::Interior { gap } | ShadowClass::Boundary { gap } => *gap,
            ShadowClass::Outside => 0.0,
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, ShadowClass::Outside)
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, ShadowClass::Interior { .. })
    }
}

/// Frame coordinates `x . v_j` for the axes `j` not in `drop`, ascending.
pub fn project_coords(frame: &Frame, x: &Point, drop: &[usize]) -> Result<Point> {
    let n = frame.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if let Some(&bad) = drop.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidArgument(format!("axis index {bad} out of range for dimension {n}")));
    }
    let keep: Vec<usize> = (0..n).filter(|j| !drop.contains(j)).collect();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("cannot drop every axis".into()));
    }
    let c = frame.coords(x);
    Ok(Point::from_iterator(keep.len(), keep.iter().map(|&j| c[j])))
}

/// Frame coordinates with axis `i` removed.
pub fn reduced_coords(frame: &Frame, x: &Point, i: usize) -> Result<Point> {
    project_coords(frame, x, &[i])
}

/// Insert `height` at position `i` of the reduced coordinates `y`.
pub fn insert_coord(y: &Point, i: usize, height: f64) -> Point {
    let mut out = Vec::with_capacity(y.len() + 1);
    out.extend_from_slice(&y.as_slice()[..i]);
    out.push(height);
    out.extend_from_slice(&y.as_slice()[i..]);
    Point::from_vec(out)
}

/// Remove coordinate `i`.
pub fn remove_coord(c: &Point, i: usize) -> Point {
    Point::from_iterator(c.len() - 1, c.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v))
}

/// World point on the fiber over `y` with zero coordinate along `v_i`.
pub fn fiber_base(frame: &Frame, i: usize, y: &Point) -> Result<Point> {
    let n = frame.dim();
    if i >= n {
        return Err(Error::InvalidArgument(format!("axis index {i} out of range for dimension {n}")));
    }
    if y.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, found: y.len() });
    }
    Ok(frame.point(&insert_coord(y, i, 0.0)))
}

impl ConvexBody {
    /// Fiber chord over the reduced point `y` along axis `i`.
    pub fn fiber(&self, frame: &Frame, i: usize, y: &Point) -> Result<ChordResult> {
        self.check_dim(frame.dim())?;
        let base = fiber_base(frame, i, y)?;
        self.chord(&base, &frame.axis(i))
    }

    /// Classify `y` against the shadow along `v_i`, using `gap_tol` as the
    /// chord length below which the fiber counts as degenerate.
    pub fn shadow_classify_with(
        &self,
        frame: &Frame,
        i: usize,
        y: &Point,
        gap_tol: f64,
    ) -> Result<(ShadowClass, ChordResult)> {
        let chord = self.fiber(frame, i, y)?;
        let class = match &chord {
            ChordResult::Empty => ShadowClass::Outside,
            ChordResult::Tangent(_) => ShadowClass::Boundary { gap: 0.0 },
            ChordResult::Chord(c) if c.gap() <= gap_tol => ShadowClass::Boundary { gap: c.gap() },
            ChordResult::Chord(c) => ShadowClass::Interior { gap: c.gap() },
        };
        Ok((class, chord))
    }

    pub fn shadow_classify(&self, frame: &Frame, i: usize, y: &Point, tol: f64) -> Result<ShadowClass> {
        Ok(self.shadow_classify_with(frame, i, y, tol)?.0)
    }

    /// Retract `y` onto the shadow along the segment from the interior
    /// point's reduced coordinates. Identity on the shadow.
    pub fn radial_clamp_shadow(&self, frame: &Frame, i: usize, y: &Point) -> Result<Point> {
        let gap_tol = self.tolerances().gap;
        let (class, _) = self.shadow_classify_with(frame, i, y, gap_tol)?;
        if !class.is_outside() {
            return Ok(y.clone());
        }
        let y0 = reduced_coords(frame, self.interior_point(), i)?;
        let (c0, _) = self.shadow_classify_with(frame, i, &y0, gap_tol)?;
        if !c0.is_interior() {
            return Err(Error::InvalidArgument(format!(
                "interior point does not project into the shadow interior along axis {i}"
            )));
        }
        let delta = y - &y0;
        let at = |lambda: f64| &y0 + &delta * lambda;
        // The first Boundary classification met is accepted as is.
        let hit = std::cell::Cell::new(None);
        let (lo, _) = bisect_predicate(0.0, 1.0, |lambda| {
            if let Some(h) = hit.get() {
                return lambda <= h;
            }
            match self.shadow_classify_with(frame, i, &at(lambda), gap_tol) {
                Ok((ShadowClass::Outside, _)) | Err(_) => false,
                Ok((ShadowClass::Interior { .. }, _)) => true,
                Ok((ShadowClass::Boundary { .. }, _)) => {
                    hit.set(Some(lambda));
                    true
                }
            }
        });
        Ok(at(hit.get().unwrap_or(lo)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    #[test]
    fn project_drops_axes() {
        let f = Frame::identity(3);
        let x = p(&[3.0, 4.0, 5.0]);
        assert_eq!(project_coords(&f, &x, &[1]).unwrap(), p(&[3.0, 5.0]));
        assert_eq!(project_coords(&f, &x, &[0, 2]).unwrap(), p(&[4.0]));
        assert!(project_coords(&f, &x, &[3]).is_err());
        assert!(project_coords(&f, &x, &[0, 1, 2]).is_err());
    }

    #[test]
    fn project_in_rotated_frame() {
        // v1 = e2, v2 = -e1
        let f = Frame::new(DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        let y = project_coords(&f, &p(&[3.0, 4.0, 0.0]), &[0]).unwrap();
        assert_eq!(y, p(&[-3.0, 0.0]));
    }

    #[test]
    fn unit_disc_shadow_classes() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let f = Frame::identity(2);
        match b.shadow_classify(&f, 1, &p(&[0.0]), 1e-6).unwrap() {
            ShadowClass::Interior { gap } => assert_abs_diff_eq!(gap, 2.0, epsilon = 1e-14),
            c => panic!("{c:?}"),
        }
        assert!(matches!(b.shadow_classify(&f, 1, &p(&[1.0]), 1e-6).unwrap(), ShadowClass::Boundary { .. }));
        assert_eq!(b.shadow_classify(&f, 1, &p(&[1.5]), 1e-6).unwrap(), ShadowClass::Outside);
    }

    #[test]
    fn clamp_examples() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        let f = Frame::identity(2);
        assert_eq!(b.radial_clamp_shadow(&f, 1, &p(&[0.5])).unwrap(), p(&[0.5]));
        // oracle: lambda = 1/3 on the segment from 0 to 3
        assert_abs_diff_eq!(b.radial_clamp_shadow(&f, 1, &p(&[3.0])).unwrap()[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(b.radial_clamp_shadow(&f, 1, &p(&[-2.0])).unwrap()[0], -1.0, epsilon = 1e-8);
    }

    #[test]
    fn insert_and_remove_are_inverse() {
        let y = p(&[1.0, 2.0, 3.0]);
        for i in 0..4 {
            assert_eq!(remove_coord(&insert_coord(&y, i, 9.0), i), y);
        }
    }
}
