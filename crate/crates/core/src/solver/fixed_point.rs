use super::{Method, SolverConfig, SolverReport};
use crate::error::Result;
use crate::geometry::{remove_coord, ConvexBody, Frame, Point};
use crate::median::MedianEvaluator;

/// Damped Jacobi iteration `c_i <- (1 - a) c_i + a mu_i(c without i)` in
/// frame coordinates, started at the world point `start`.
///
/// Stops once `max_i |c_i - mu_i| <= root_tol / 10`, so a converged report
/// always carries a residual within tolerance at the returned point and the
/// Euclidean error stays below `root_tol` in low dimensions. Running out of
/// iterations is reported with `converged = false`, not as an error.
pub fn fixed_point_solve(
    body: &ConvexBody,
    frame: &Frame,
    start: &Point,
    config: &SolverConfig,
) -> Result<(Point, SolverReport)> {
    config.validate()?;
    body.check_dim(start.len())?;
    let n = frame.dim();
    let medians = (0..n).map(|i| MedianEvaluator::new(body, frame, i)).collect::<Result<Vec<_>>>()?;
    let alpha = config.damping;
    let target = 0.1 * config.root_tol;
    let mut c = frame.coords(start);
    let mut heights = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < config.max_iters {
        let previous = residual;
        residual = 0.0;
        for (i, m) in medians.iter().enumerate() {
            heights[i] = m.median_height_extended(&remove_coord(&c, i))?;
            residual = f64::max(residual, (c[i] - heights[i]).abs());
        }
        // Also stop inside tolerance once rounding stalls further progress.
        if residual <= target || (residual <= config.root_tol && residual >= previous) {
            break;
        }
        for i in 0..n {
            c[i] = (1.0 - alpha) * c[i] + alpha * heights[i];
        }
        iterations += 1;
    }
    if iterations == config.max_iters {
        residual = 0.0;
        for (i, m) in medians.iter().enumerate() {
            residual = f64::max(residual, (c[i] - m.median_height_extended(&remove_coord(&c, i))?).abs());
        }
    }
    Ok((
        frame.point(&c),
        SolverReport {
            method: Method::FixedPoint,
            iterations,
            final_residual: residual,
            boxes_explored: 0,
            converged: residual <= config.root_tol,
        },
    ))
}
