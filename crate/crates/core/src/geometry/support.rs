use super::body::{ConvexBody, Point};
use crate::error::{Error, Result};
use crate::numeric::PatternSearch;

/// Maximum allowed disagreement between the two best refined ascents.
const AGREEMENT_TOL: f64 = 1e-7;

impl ConvexBody {
    /// Boundary point maximizing `x . w`.
    ///
    /// Balls, ellipsoids and superellipsoids use the closed form. For
    /// intersections the sphere is parametrized radially from the interior
    /// point and the ray direction is optimized by pattern search from `w`
    /// and every `+-e_k`. The two best coarse results are refined and must
    /// agree.
    pub fn support_point(&self, w: &Point) -> Result<Point> {
        self.check_dim(w.len())?;
        if (w.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("support direction must be a unit vector (norm {})", w.norm())));
        }
        if let Some(x) = self.closed_form_support(w) {
            return Ok(x);
        }
        let n = self.dim();
        let z0: Vec<f64> = self.interior_point().iter().cloned().collect();
        let wv = w.as_slice();
        let objective = |u: &[f64]| -> f64 {
            match self.boundary_radius(&z0, u) {
                Ok(r) => -(0..n).map(|k| (z0[k] + r * u[k]) * wv[k]).sum::<f64>(),
                Err(_) => f64::INFINITY,
            }
        };

        let mut starts = vec![wv.to_vec()];
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[k] = s;
                starts.push(e);
            }
        }
        let coarse = PatternSearch {
            initial_step: 0.5,
            min_step: 1e-3,
            max_evals: 5_000,
            diagonals: false,
            target: f64::NEG_INFINITY,
        };
        let mut found: Vec<_> = starts.iter().map(|s| coarse.minimize_on_sphere(s, objective)).collect();
        found.sort_by(|a, b| a.value.total_cmp(&b.value));

        let fine = PatternSearch {
            initial_step: 4e-3,
            min_step: 1e-13,
            max_evals: 20_000,
            diagonals: true,
            target: f64::NEG_INFINITY,
        };
        let refined: Vec<_> = found.iter().take(2).map(|r| fine.minimize_on_sphere(&r.x, objective)).collect();
        let best = if refined[0].value <= refined[1].value { &refined[0] } else { &refined[1] };
        if !best.value.is_finite() || (refined[0].value - refined[1].value).abs() > AGREEMENT_TOL {
            return Err(Error::ConvergenceFailure {
                what: "support point ascent",
                best: best.x.clone(),
                residual: (refined[0].value - refined[1].value).abs(),
            });
        }
        let u = Point::from_column_slice(&best.x);
        let r = self.boundary_radius(&z0, &best.x)?;
        Ok(self.interior_point() + u * r)
    }
}
