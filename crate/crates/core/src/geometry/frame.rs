use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::body::Point;
use crate::error::{Error, Result};

const GRAM_TOL: f64 = 1e-12;
const DET_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-10;

/// An orthonormal basis `v_1..v_{n+1}`; row `i` of `axes` is `v_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Frame {
    axes: DMatrix<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for Frame {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Frame::new(rows_to_matrix(&rows)?)
    }
}

impl From<Frame> for Vec<Vec<f64>> {
    fn from(f: Frame) -> Self {
        f.rows()
    }
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DegenerateFrame(format!("expected a square matrix, got {n} rows")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFrame("non-finite entry".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Max deviation of the row Gram matrix from the identity.
pub fn gram_residual(m: &DMatrix<f64>) -> f64 {
    let g = m * m.transpose();
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

impl Frame {
    /// Wrap an already orthonormal matrix (rows are the axes).
    pub fn new(axes: DMatrix<f64>) -> Result<Self> {
        if axes.nrows() != axes.ncols() || axes.nrows() < 2 {
            return Err(Error::DegenerateFrame(format!(
                "frame must be square with dimension >= 2, got {}x{}",
                axes.nrows(),
                axes.ncols()
            )));
        }
        let r = gram_residual(&axes);
        if r > GRAM_TOL {
            return Err(Error::DegenerateFrame(format!("rows are not orthonormal (Gram residual {r:e})")));
        }
        let det = axes.clone().determinant();
        if (det.abs() - 1.0).abs() > DET_TOL {
            return Err(Error::DegenerateFrame(format!("|det| = {} differs from 1", det.abs())));
        }
        Ok(Self { axes })
    }

    pub fn identity(dim: usize) -> Self {
        Self { axes: DMatrix::identity(dim, dim) }
    }

    /// Gram-Schmidt (two passes) on the rows. Returns the input untouched if
    /// it is already orthonormal.
    pub fn orthonormalize(rows: &DMatrix<f64>) -> Result<Self> {
        let n = rows.nrows();
        if n != rows.ncols() || n < 2 {
            return Err(Error::DegenerateFrame(format!("expected a square matrix of size >= 2, got {}x{}", n, rows.ncols())));
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateFrame("non-finite entry".into()));
        }
        if gram_residual(rows) <= GRAM_TOL {
            return Self::new(rows.clone());
        }
        let mut out = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let mut v: Vec<f64> = rows.row(i).iter().cloned().collect();
            let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for _pass in 0..2 {
                for k in 0..i {
                    let dot: f64 = (0..n).map(|j| v[j] * out[(k, j)]).sum();
                    for j in 0..n {
                        v[j] -= dot * out[(k, j)];
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > PIVOT_TOL * scale.max(1.0)) || scale == 0.0 {
                return Err(Error::DegenerateFrame(format!("row {i} is linearly dependent on earlier rows")));
            }
            for j in 0..n {
                out[(i, j)] = v[j] / norm;
            }
        }
        Self::new(out)
    }

    pub fn dim(&self) -> usize {
        self.axes.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.axes
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.axes.row(i).iter().cloned().collect()).collect()
    }

    /// Axis `v_i` as a point.
    pub fn axis(&self, i: usize) -> Point {
        self.axes.row(i).transpose()
    }

    /// Frame coordinates `x . v_j` for every axis.
    pub fn coords(&self, x: &Point) -> Point {
        &self.axes * x
    }

    /// World point with frame coordinates `c`.
    pub fn point(&self, c: &Point) -> Point {
        self.axes.transpose() * c
    }

    /// Rotate every axis: `v_i -> R v_i`.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Result<Self> {
        Self::new(&self.axes * rotation.transpose())
    }

    /// Orthonormality residual `max |v_i . v_j - delta_ij|`.
    pub fn gram_residual(&self) -> f64 {
        gram_residual(&self.axes)
    }

    /// Apply Givens rotations in the coordinate planes `(0,1), (0,2), ...,
    /// (0,n), (1,2), ...` to the rows, one angle per plane in that order.
    /// Missing trailing angles are zero.
    pub fn givens(&self, angles: &[f64]) -> Result<Self> {
        let planes = givens_planes(self.dim());
        if angles.len() > planes.len() {
            return Err(Error::InvalidArgument(format!(
                "{} Givens angles given, at most {} planes exist in dimension {}",
                angles.len(),
                planes.len(),
                self.dim()
            )));
        }
        let mut m = self.axes.clone();
        for (&(p, q), &theta) in planes.iter().zip(angles) {
            apply_givens_rows(&mut m, p, q, theta);
        }
        Self::new(m)
    }
}

/// Coordinate planes in the order used by [`Frame::givens`].
pub fn givens_planes(dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..dim {
        for q in (p + 1)..dim {
            out.push((p, q));
        }
    }
    out
}

/// Rotate rows `p` and `q` of `m` into each other by angle `theta`.
pub(crate) fn apply_givens_rows(m: &mut DMatrix<f64>, p: usize, q: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    for j in 0..m.ncols() {
        let a = m[(p, j)];
        let b = m[(q, j)];
        m[(p, j)] = c * a + s * b;
        m[(q, j)] = -s * a + c * b;
    }
}

/// Rotation matrix of angle `theta` in coordinate plane `(p, q)`.
pub fn plane_rotation(dim: usize, p: usize, q: usize, theta: f64) -> DMatrix<f64> {
    let mut r = DMatrix::identity(dim, dim);
    let (s, c) = theta.sin_cos();
    r[(p, p)] = c;
    r[(q, q)] = c;
    r[(p, q)] = -s;
    r[(q, p)] = s;
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_is_unchanged() {
        let f = Frame::orthonormalize(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(f, Frame::identity(3));
    }

    #[test]
    fn gram_schmidt_by_hand() {
        let rows = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let f = Frame::orthonormalize(&rows).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [h, h, h, -h];
        for (a, b) in f.matrix().transpose().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn dependent_rows_are_degenerate() {
        let rows = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 2.0, 0.0]);
        assert!(matches!(Frame::orthonormalize(&rows), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn new_rejects_non_orthonormal() {
        let rows = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 + 1e-9]);
        assert!(Frame::new(rows).is_err());
    }

    #[test]
    fn givens_matches_plane_rotation() {
        let f = Frame::identity(3).givens(&[0.3]).unwrap();
        assert_abs_diff_eq!(f.matrix()[(0, 0)], 0.3f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.matrix()[(0, 1)], 0.3f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.matrix()[(1, 0)], -0.3f64.sin(), epsilon = 1e-15);
        assert!(Frame::identity(2).givens(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = Frame::identity(3).givens(&[0.2, -0.4, 1.1]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: Frame = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
    }
}
