#![allow(dead_code)]

use nalgebra::DMatrix;
use rhombs::geometry::plane_rotation;
use rhombs::sweep::random_frame;
use rhombs::{ConvexBody, Frame, Point};

pub fn p(v: &[f64]) -> Point {
    Point::from_column_slice(v)
}

/// Seeded orthogonal matrix.
pub fn rotation(dim: usize, seed: u64) -> DMatrix<f64> {
    random_frame(dim, seed ^ 0x5eed_f00d).unwrap().matrix().clone()
}

/// Ball, ellipsoid and two superellipsoids in dimension `d`, labelled.
pub fn smooth_bodies(d: usize) -> Vec<(String, ConvexBody)> {
    let axes = |base: f64, step: f64| (0..d).map(|k| base + step * k as f64).collect::<Vec<_>>();
    vec![
        (format!("ball{d}"), ConvexBody::ball(d, 1.3).unwrap()),
        (format!("ellipsoid{d}"), ConvexBody::ellipsoid(&axes(1.0, 0.5)).unwrap()),
        (format!("super3_{d}"), ConvexBody::superellipsoid(3.0, &axes(1.0, 0.25)).unwrap()),
        (format!("super4_{d}"), ConvexBody::superellipsoid(4.0, &axes(0.8, 0.3)).unwrap()),
    ]
}

/// Intersection of two unit discs whose boundaries cross at the origin at
/// an angle of 100 degrees; both lens tips are special corners of the
/// standard basis.
pub fn lens2() -> ConvexBody {
    let disc = |deg: f64| {
        let a = f64::to_radians(deg);
        ConvexBody::ball(2, 1.0).unwrap().transformed(&DMatrix::identity(2, 2), &p(&[-a.cos(), -a.sin()])).unwrap()
    };
    ConvexBody::intersection(vec![disc(-5.0), disc(95.0)]).unwrap()
}

pub fn lens2_json() -> String {
    lens2().to_json_string()
}

/// Lens of revolution: unit balls centred at `(0, 0, +-1/2)`. Its rim is a
/// circle of non-smooth points in the plane `z = 0`.
pub fn lens3() -> ConvexBody {
    let ball = |z: f64| ConvexBody::ball(3, 1.0).unwrap().transformed(&DMatrix::identity(3, 3), &p(&[0.0, 0.0, z])).unwrap();
    ConvexBody::intersection(vec![ball(0.5), ball(-0.5)]).unwrap()
}

/// Frame whose first two axes are tilted 45 degrees out of the rim plane of
/// [`lens3`], so fibers along both can graze the rim.
pub fn lens3_tilted_frame() -> Frame {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (c60, s60) = (0.5, 0.75f64.sqrt());
    let v1 = [c60 * s, s60 * s, s];
    let v2 = [-c60 * s, -s60 * s, s];
    let v3 = [v1[1] * v2[2] - v1[2] * v2[1], v1[2] * v2[0] - v1[0] * v2[2], v1[0] * v2[1] - v1[1] * v2[0]];
    Frame::try_from(vec![v1.to_vec(), v2.to_vec(), v3.to_vec()]).unwrap()
}

pub fn rotated_frame(d: usize, p_: usize, q: usize, theta: f64) -> Frame {
    Frame::identity(d).rotated(&plane_rotation(d, p_, q, theta)).unwrap()
}

/// Chord midpoint parameter of the line `base + t v`, found from the gauge
/// alone: dense sampling for an inside point, then bisection outward.
/// `None` when the sampled line misses the body.
pub fn brute_midpoint(body: &ConvexBody, base: &Point, v: &Point, reach: f64) -> Option<f64> {
    let g = |t: f64| body.gauge(&(base + v * t)).unwrap();
    let n = 400;
    let (mut t_in, mut best) = (0.0, f64::INFINITY);
    for k in 0..=n {
        let t = -reach + 2.0 * reach * k as f64 / n as f64;
        let val = g(t);
        if val < best {
            best = val;
            t_in = t;
        }
    }
    if best >= 1.0 {
        return None;
    }
    let edge = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if g(mid) <= 1.0 {
                inside = mid
            } else {
                outside = mid
            }
        }
        0.5 * (inside + outside)
    };
    Some(0.5 * (edge(t_in, reach) + edge(t_in, -reach)))
}

/// `phi_i(c) = c_i - midpoint_i(c)` in frame coordinates.
pub fn brute_offsets(body: &ConvexBody, frame: &Frame, c: &[f64], reach: f64) -> Option<Vec<f64>> {
    let d = c.len();
    (0..d)
        .map(|i| {
            let mut base = c.to_vec();
            base[i] = 0.0;
            brute_midpoint(body, &frame.point(&p(&base)), &frame.axis(i), reach).map(|m| c[i] - m)
        })
        .collect()
}

fn worst(v: &Option<Vec<f64>>) -> f64 {
    v.as_ref().map_or(f64::INFINITY, |v| v.iter().fold(0.0, |a, x| a.max(x.abs())))
}

/// Independent rhomb-center oracle in frame coordinates: a coarse grid over
/// the bounding box, a grid of step `1e-3` around the best coarse point,
/// then coordinate bisection on each `phi_i` (which increases with `c_i`).
pub fn brute_force_center(body: &ConvexBody, frame: &Frame) -> Point {
    let d = frame.dim();
    let (center, radius) = body.bounding_ball();
    let reach = 2.0 * radius + 1.0;
    let cc = frame.coords(&center);
    let grid = |mid: &[f64], half: f64, steps: usize| -> Vec<f64> {
        let total = (steps + 1).pow(d as u32);
        let mut best = (f64::INFINITY, mid.to_vec());
        for idx in 0..total {
            let mut rem = idx;
            let c: Vec<f64> = (0..d)
                .map(|k| {
                    let j = rem % (steps + 1);
                    rem /= steps + 1;
                    mid[k] - half + 2.0 * half * j as f64 / steps as f64
                })
                .collect();
            let w = worst(&brute_offsets(body, frame, &c, reach));
            if w < best.0 {
                best = (w, c);
            }
        }
        best.1
    };
    let coarse_steps = if d == 2 { 60 } else { 16 };
    let coarse = grid(cc.as_slice(), radius, coarse_steps);
    let window = 2.0 * radius / coarse_steps as f64;
    let fine_steps = ((2.0 * window) / 1e-3).round() as usize;
    let fine_steps = if d == 2 { fine_steps } else { fine_steps.min(24) };
    let mut c = grid(&coarse, window, fine_steps);

    for _ in 0..200 {
        let before = c.clone();
        for i in 0..d {
            let phi = |t: f64| {
                let mut x = c.clone();
                x[i] = t;
                let mut base = x.clone();
                base[i] = 0.0;
                brute_midpoint(body, &frame.point(&p(&base)), &frame.axis(i), reach).map(|m| t - m)
            };
            let (mut lo, mut hi) = (c[i] - window, c[i] + window);
            if !matches!((phi(lo), phi(hi)), (Some(a), Some(b)) if a < 0.0 && b > 0.0) {
                continue;
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if phi(mid).is_some_and(|v| v > 0.0) {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            c[i] = 0.5 * (lo + hi);
        }
        let moved = c.iter().zip(&before).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        if moved < 1e-13 {
            break;
        }
    }
    p(&c)
}

fn posed(body: ConvexBody, seed: u64, shift: &[f64]) -> ConvexBody {
    let d = body.dim();
    body.transformed(&rotation(d, seed), &p(shift)).unwrap()
}

/// Planar bodies without central symmetry about the origin, so the rhomb
/// center is not known in closed form.
pub fn oracle_bodies_2d() -> Vec<(String, ConvexBody)> {
    let disc = |x: f64, r: f64| ConvexBody::ball(2, r).unwrap().transformed(&DMatrix::identity(2, 2), &p(&[x, 0.0])).unwrap();
    vec![
        ("posed ellipse".into(), posed(ConvexBody::ellipsoid(&[1.0, 2.0]).unwrap(), 1, &[0.4, -0.3])),
        ("posed superellipse".into(), posed(ConvexBody::superellipsoid(3.0, &[1.5, 1.0]).unwrap(), 2, &[-0.2, 0.5])),
        ("fat lens".into(), ConvexBody::intersection(vec![disc(-0.3, 1.0), disc(0.3, 1.0)]).unwrap()),
        (
            "disc cut by ellipse".into(),
            ConvexBody::intersection(vec![
                disc(0.0, 1.5),
                posed(ConvexBody::ellipsoid(&[2.0, 1.0]).unwrap(), 3, &[0.5, 0.2]),
            ])
            .unwrap(),
        ),
        (
            "unequal discs".into(),
            ConvexBody::intersection(vec![disc(0.0, 1.0), disc(0.8, 1.4)]).unwrap(),
        ),
    ]
}

pub fn oracle_bodies_3d() -> Vec<(String, ConvexBody)> {
    vec![
        ("posed ellipsoid".into(), posed(ConvexBody::ellipsoid(&[1.0, 1.5, 2.0]).unwrap(), 4, &[0.3, -0.2, 0.1])),
        ("posed superellipsoid".into(), posed(ConvexBody::superellipsoid(4.0, &[1.0, 1.2, 0.8]).unwrap(), 5, &[-0.1, 0.2, 0.3])),
        (
            "ball cut by ellipsoid".into(),
            ConvexBody::intersection(vec![
                ConvexBody::ball(3, 1.2).unwrap(),
                posed(ConvexBody::ellipsoid(&[1.6, 1.0, 1.1]).unwrap(), 6, &[0.4, 0.1, -0.2]),
            ])
            .unwrap(),
        ),
    ]
}
