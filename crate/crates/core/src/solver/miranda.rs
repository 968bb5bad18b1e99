use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Method, SignField, SolverConfig, SolverReport};
use crate::error::{Error, Face, Result};
use crate::geometry::Point;
use crate::par;

/// Fraction of the parent width each half extends past the midpoint.
const OVERLAP: f64 = 0.05;
/// Hard cap on the number of boxes visited.
const MAX_BOXES: usize = 50_000;

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("box bounds must be non-empty and of equal length".into()));
        }
        if let Some(k) = (0..lo.len()).find(|&k| !(lo[k] < hi[k]) || !lo[k].is_finite() || !hi[k].is_finite()) {
            return Err(Error::InvalidArgument(format!("box axis {k}: need lo < hi, got [{}, {}]", lo[k], hi[k])));
        }
        Ok(Self { lo, hi })
    }

    /// Cube of half-width `half` around `center`.
    pub fn centered(center: &[f64], half: f64) -> Result<Self> {
        Self::new(center.iter().map(|c| c - half).collect(), center.iter().map(|c| c + half).collect())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim()).map(|k| self.width(k).powi(2)).sum::<f64>().sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && (0..self.dim()).all(|k| self.lo[k] <= x[k] && x[k] <= self.hi[k])
    }

    fn longest_axis(&self) -> usize {
        (0..self.dim()).fold(0, |best, k| if self.width(k) > self.width(best) { k } else { best })
    }

    /// Grid of `s` samples per free axis on the face `x_axis = lo` or `hi`.
    fn face_grid(&self, axis: usize, face: Face, s: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let fixed = match face {
            Face::Low => self.lo[axis],
            Face::High => self.hi[axis],
        };
        let free: Vec<usize> = (0..d).filter(|&k| k != axis).collect();
        let total = s.pow(free.len() as u32);
        (0..total)
            .map(|mut idx| {
                let mut x = vec![0.0; d];
                x[axis] = fixed;
                for &k in free.iter().rev() {
                    let j = idx % s;
                    idx /= s;
                    x[k] = if j == s - 1 {
                        self.hi[k]
                    } else {
                        self.lo[k] + self.width(k) * j as f64 / (s - 1) as f64
                    };
                }
                x
            })
            .collect()
    }

    fn split(&self, k: usize) -> (SearchBox, SearchBox) {
        let mid = 0.5 * (self.lo[k] + self.hi[k]);
        let pad = OVERLAP * self.width(k);
        let mut a = self.clone();
        let mut b = self.clone();
        a.hi[k] = (mid + pad).min(self.hi[k]);
        b.lo[k] = (mid - pad).max(self.lo[k]);
        (a, b)
    }
}

fn face_index(axis: usize, face: Face) -> usize {
    2 * axis + usize::from(face == Face::High)
}

fn eval_all(fields: &[&dyn SignField], x: &[f64]) -> Result<Vec<f64>> {
    fields.iter().map(|f| f.eval(x)).collect()
}

/// Sampled sign test of one field on one face: the verdict and the most
/// negative oriented value seen (0 when the face passes).
fn raw_face_violation(field: &dyn SignField, bx: &SearchBox, axis: usize, face: Face, s: usize) -> Result<(bool, f64)> {
    let want = field.orientation().sign() * if face == Face::Low { -1.0 } else { 1.0 };
    let pts = bx.face_grid(axis, face, s);
    let vals = par::map_slice(&pts, |x| field.eval(x));
    let mut ok = true;
    let mut worst = 0.0f64;
    for v in vals {
        let v = want * v?;
        if !(v >= 0.0) {
            ok = false;
            worst = if v.is_nan() { v } else { worst.min(v) };
        }
    }
    Ok((ok, worst))
}

/// Sign test after applying the inverse of a central-difference Jacobian at
/// the box centre, which straightens skewed fields on small boxes.
fn preconditioned_test(fields: &[&dyn SignField], bx: &SearchBox, s: usize) -> Result<bool> {
    let d = bx.dim();
    let c = bx.center();
    let mut jac = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let h = 0.25 * bx.width(j);
        let mut xp = c.clone();
        let mut xm = c.clone();
        xp[j] += h;
        xm[j] -= h;
        let fp = eval_all(fields, &xp)?;
        let fm = eval_all(fields, &xm)?;
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let Some(inv) = jac.try_inverse() else {
        return Ok(false);
    };
    if inv.iter().any(|v| !v.is_finite()) {
        return Ok(false);
    }
    for axis in 0..d {
        for face in [Face::Low, Face::High] {
            let want = if face == Face::Low { -1.0 } else { 1.0 };
            let pts = bx.face_grid(axis, face, s);
            let vals = par::map_slice(&pts, |x| eval_all(fields, x));
            for v in vals {
                let g = &inv * DVector::from_vec(v?);
                if !(want * g[axis] >= 0.0) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

struct Node {
    bx: SearchBox,
    depth: Vec<usize>,
    splits: usize,
    /// Raw sign verdict per face, indexed by [`face_index`].
    raw: Vec<bool>,
}

/// Zero of `fields` inside `bx` by generalized bisection under the
/// Poincare-Miranda sign condition.
///
/// The full box must pass the sampled sign test on every face. Sub-boxes are
/// kept when they pass either the raw test (verdicts on faces shared with
/// the parent are inherited) or the Jacobian-preconditioned test. The search
/// is a deterministic depth-first descent, low half first.
pub fn miranda_root(fields: &[&dyn SignField], bx: &SearchBox, config: &SolverConfig) -> Result<(Point, SolverReport)> {
    config.validate()?;
    let d = bx.dim();
    if fields.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: fields.len() });
    }
    let s = config.face_samples;
    for (axis, field) in fields.iter().enumerate() {
        for face in [Face::Low, Face::High] {
            let (ok, value) = raw_face_violation(*field, bx, axis, face, s)?;
            if !ok {
                return Err(Error::MirandaPrecondition { axis, face, value });
            }
        }
    }

    let tol = config.root_tol;
    let mut stack = vec![Node { bx: bx.clone(), depth: vec![0; d], splits: 0, raw: vec![true; 2 * d] }];
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut explored = 0;
    while let Some(node) = stack.pop() {
        explored += 1;
        let c = node.bx.center();
        let residual = eval_all(fields, &c)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual.is_finite() && best.as_ref().is_none_or(|b| residual < b.0) {
            best = Some((residual, c.clone(), node.splits));
        }
        let diameter = node.bx.diameter();
        if diameter <= tol && residual <= tol {
            return Ok((
                Point::from_vec(c),
                SolverReport {
                    method: Method::MirandaBisection,
                    iterations: node.splits,
                    final_residual: residual,
                    boxes_explored: explored,
                    converged: true,
                },
            ));
        }
        if explored >= MAX_BOXES {
            break;
        }
        if node.depth.iter().any(|&k| k >= config.max_depth) || diameter <= 1e-6 * tol {
            continue;
        }
        let k = node.bx.longest_axis();
        let (a, b) = node.bx.split(k);
        let mut children = Vec::with_capacity(2);
        for (child, new_face) in [(a, Face::High), (b, Face::Low)] {
            let mut raw = node.raw.clone();
            raw[face_index(k, new_face)] = raw_face_violation(fields[k], &child, k, new_face, s)?.0;
            for axis in 0..d {
                for face in [Face::Low, Face::High] {
                    let idx = face_index(axis, face);
                    if !raw[idx] && !(axis == k && face == new_face) {
                        raw[idx] = raw_face_violation(fields[axis], &child, axis, face, s)?.0;
                    }
                }
            }
            let keep = raw.iter().all(|&v| v) || preconditioned_test(fields, &child, s)?;
            if keep {
                let mut depth = node.depth.clone();
                depth[k] += 1;
                children.push(Node { bx: child, depth, splits: node.splits + 1, raw });
            }
        }
        // Low half is explored first.
        stack.extend(children.into_iter().rev());
    }

    match best {
        Some((residual, x, splits)) if residual <= tol => Ok((
            Point::from_vec(x),
            SolverReport {
                method: Method::MirandaBisection,
                iterations: splits,
                final_residual: residual,
                boxes_explored: explored,
                converged: true,
            },
        )),
        Some((residual, x, _)) => Err(Error::SearchExhausted { best: x, residual }),
        None => Err(Error::SearchExhausted { best: bx.center(), residual: f64::INFINITY }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::FnField;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn identity_field() {
        let f: Vec<_> = (0..3).map(|i| FnField::new(move |x: &[f64]| x[i])).collect();
        let refs: Vec<&dyn SignField> = f.iter().map(|f| f as &dyn SignField).collect();
        let bx = SearchBox::centered(&[0.0; 3], 1.0).unwrap();
        let (x, r) = miranda_root(&refs, &bx, &cfg()).unwrap();
        assert!(r.converged);
        assert!(x.norm() <= 1e-9);
    }

    #[test]
    fn linear_system_by_hand() {
        // x + y = 1, x = y  =>  (0.5, 0.5)
        let f1 = FnField::new(|x: &[f64]| x[0] + x[1] - 1.0);
        let f2 = FnField::decreasing(|x: &[f64]| x[0] - x[1]);
        let bx = SearchBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let (x, r) = miranda_root(&[&f1, &f2], &bx, &cfg()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(x[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(x[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn cubic_system_univariate_oracle() {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m.powi(9) + m - 1.0 < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        let ys = lo;
        let xs = ys.powi(3);
        let f1 = FnField::new(|x: &[f64]| x[0].powi(3) + x[1] - 1.0);
        let f2 = FnField::new(|x: &[f64]| x[1].powi(3) - x[0]);
        let bx = SearchBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let (x, r) = miranda_root(&[&f1, &f2], &bx, &cfg()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(x[0], xs, epsilon = 1e-9);
        assert_abs_diff_eq!(x[1], ys, epsilon = 1e-9);
    }

    #[test]
    fn sign_violation_names_axis() {
        let f1 = FnField::new(|x: &[f64]| x[0]);
        let f2 = FnField::new(|x: &[f64]| 1.0 + x[1] * x[1]);
        let bx = SearchBox::centered(&[0.0, 0.0], 1.0).unwrap();
        match miranda_root(&[&f1, &f2], &bx, &cfg()) {
            Err(Error::MirandaPrecondition { axis, face, .. }) => {
                assert_eq!(axis, 1);
                assert_eq!(face, Face::Low);
            }
            other => panic!("expected precondition error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_boxes_rejected() {
        assert!(SearchBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(SearchBox::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn face_grid_covers_corners() {
        let bx = SearchBox::new(vec![0.0, -1.0, 2.0], vec![1.0, 1.0, 3.0]).unwrap();
        let g = bx.face_grid(1, Face::High, 3);
        assert_eq!(g.len(), 9);
        assert!(g.iter().all(|x| x[1] == 1.0));
        assert!(g.contains(&vec![0.0, 1.0, 2.0]));
        assert!(g.contains(&vec![1.0, 1.0, 3.0]));
    }
}
