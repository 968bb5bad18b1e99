use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::median::MedianEvaluator;
use crate::geometry::Point;

/// Which face of the box a field is expected to be non-negative on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `<= 0` on the low face, `>= 0` on the high face.
    Increasing,
    /// `>= 0` on the low face, `<= 0` on the high face.
    Decreasing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Increasing => 1.0,
            Orientation::Decreasing => -1.0,
        }
    }
}

/// A continuous real field on a search box, paired with the face sides on
/// which it changes sign.
pub trait SignField: Sync {
    fn eval(&self, x: &[f64]) -> Result<f64>;

    fn orientation(&self) -> Orientation {
        Orientation::Increasing
    }
}

/// A [`SignField`] backed by a closure.
pub struct FnField<F> {
    f: F,
    orientation: Orientation,
}

impl<F> FnField<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f, orientation: Orientation::Increasing }
    }

    pub fn decreasing(f: F) -> Self {
        Self { f, orientation: Orientation::Decreasing }
    }
}

impl<F> SignField for FnField<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }

    fn orientation(&self) -> Orientation {
        self.orientation
    }
}

/// Median offset along one axis, evaluated at frame coordinates.
pub struct MedianField<'a> {
    median: MedianEvaluator<'a>,
}

impl<'a> MedianField<'a> {
    pub fn new(median: MedianEvaluator<'a>) -> Self {
        Self { median }
    }
}

impl SignField for MedianField<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.median.offset_in_frame(&Point::from_column_slice(x))
    }
}
