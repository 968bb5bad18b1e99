//! Sampling of the boundary sphere and local refinement of gap objectives.

use crate::geometry::{ChordResult, ConvexBody, Frame, Point};
use crate::median::gaussian_directions;
use crate::numeric::PatternSearch;
use crate::par;

/// Upper bound on the number of sampled directions per scan.
pub const MAX_SAMPLES: usize = 8192;

/// Unit directions covering the sphere `S^{d-1}`: a regular circle for
/// `d = 2`, a Fibonacci lattice for `d = 3`, seeded Gaussian directions
/// otherwise. Roughly `resolution^(d-1)` points, at least `4 * resolution`.
pub fn sphere_directions(d: usize, resolution: usize, seed: u64) -> Vec<Point> {
    let target = resolution
        .checked_pow((d - 1) as u32)
        .unwrap_or(usize::MAX)
        .max(4 * resolution)
        .min(MAX_SAMPLES);
    match d {
        2 => (0..target)
            .map(|k| {
                let a = std::f64::consts::TAU * (k as f64 + 0.5) / target as f64;
                Point::from_column_slice(&[a.cos(), a.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..target)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / target as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    Point::from_column_slice(&[r * a.cos(), r * a.sin(), z])
                })
                .collect()
        }
        _ => gaussian_directions(d, target, seed),
    }
}

/// Typical angular spacing of `count` roughly uniform points on `S^{d-1}`.
pub fn angular_spacing(d: usize, count: usize) -> f64 {
    (sphere_area(d) / count as f64).powf(1.0 / (d - 1) as f64)
}

fn sphere_area(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d - 2) as f64 * sphere_area(d - 2),
    }
}

/// Chord gap through `x` along `dir`, zero for tangent or empty fibers.
pub fn gap_through(body: &ConvexBody, x: &Point, dir: &Point) -> f64 {
    match body.chord(x, dir) {
        Ok(ChordResult::Chord(c)) => c.gap(),
        _ => 0.0,
    }
}

/// Chord gaps through `x` along every frame axis.
pub fn all_gaps(body: &ConvexBody, frame: &Frame, x: &Point) -> Vec<f64> {
    (0..frame.dim()).map(|i| gap_through(body, x, &frame.axis(i))).collect()
}

/// Boundary point hit from the interior point along `u`.
pub fn boundary_along(body: &ConvexBody, u: &[f64]) -> Option<Point> {
    let z0 = body.interior_point();
    body.boundary_radius(z0.as_slice(), u).ok().map(|r| z0 + Point::from_column_slice(u) * r)
}

/// Max over `axes` of the fiber depth at the boundary point along `u`.
pub fn depth_objective(body: &ConvexBody, frame: &Frame, axes: &[usize], u: &[f64]) -> f64 {
    let Some(x) = boundary_along(body, u) else {
        return f64::INFINITY;
    };
    axes.iter()
        .map(|&i| body.fiber_depth(x.as_slice(), frame.axis(i).as_slice()))
        .fold(0.0, f64::max)
}

/// Candidate boundary points where every fiber along `axes` is nearly
/// tangent: the best sampled directions, thinned so no two seeds are within
/// two sample spacings, are refined by pattern search on the fiber depth.
/// Returns boundary points sorted by the refined objective.
pub fn tangency_candidates(
    body: &ConvexBody,
    frame: &Frame,
    axes: &[usize],
    dirs: &[Point],
    seeds: usize,
) -> Vec<(f64, Point)> {
    let d = frame.dim();
    let values = par::map_slice(dirs, |u| depth_objective(body, frame, axes, u.as_slice()));
    let mut order: Vec<usize> = (0..dirs.len()).filter(|&k| values[k].is_finite()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let spacing = angular_spacing(d, dirs.len());
    let mut chosen: Vec<usize> = Vec::new();
    for k in order {
        if chosen.len() >= seeds {
            break;
        }
        if chosen.iter().all(|&c| (&dirs[c] - &dirs[k]).norm() > 2.0 * spacing) {
            chosen.push(k);
        }
    }
    let search = PatternSearch {
        initial_step: spacing,
        min_step: 1e-12,
        max_evals: 4000,
        diagonals: true,
        target: 0.0,
    };
    let mut refined: Vec<(f64, Point)> = par::map_slice(&chosen, |&k| {
        let r = search.minimize_on_sphere(dirs[k].as_slice(), |u| depth_objective(body, frame, axes, u));
        boundary_along(body, &r.x).map(|x| (r.value, x))
    })
    .into_iter()
    .flatten()
    .collect();
    refined.sort_by(|a, b| a.0.total_cmp(&b.0));
    refined
}

/// Keep points at least `sep` apart, in order.
pub fn dedupe(points: Vec<(f64, Point)>, sep: f64) -> Vec<(f64, Point)> {
    let mut out: Vec<(f64, Point)> = Vec::new();
    for (v, x) in points {
        if out.iter().all(|(_, y)| (y - &x).norm() > sep) {
            out.push((v, x));
        }
    }
    out
}

/// All subsets of `0..d` with sizes in `[min, max]`, by size then
/// lexicographically.
pub fn subsets(d: usize, min: usize, max: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u32..(1 << d))
        .map(|mask| (0..d).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.len() >= min && s.len() <= max)
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for d in 2..=5 {
            let dirs = sphere_directions(d, 8, 3);
            assert!(dirs.len() >= 32);
            assert!(dirs.iter().all(|u| (u.norm() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(3, 2, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(3, 1, 2).len(), 6);
    }

    #[test]
    fn ball_fiber_depth_vanishes_only_when_tangent() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        assert!(b.fiber_depth(&[1.0, 0.0], &[0.0, 1.0]).abs() < 1e-15);
        assert!(b.fiber_depth(&[1.0, 0.0], &[1.0, 0.0]) > 0.99);
    }
}
