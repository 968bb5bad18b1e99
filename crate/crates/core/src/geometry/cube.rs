use super::body::Point;

/// Radial map from the max-norm unit ball onto the 1-norm unit ball:
/// `x -> (|x|_inf / |x|_1) x`, with `0 -> 0`.
pub fn cube_to_crosspolytope(x: &Point) -> Point {
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    if l1 == 0.0 {
        return Point::zeros(x.len());
    }
    let linf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    x * (linf / l1)
}
