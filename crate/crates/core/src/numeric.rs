//! Small derivative-free univariate and multivariate routines shared by the
//! geometry, diagnostics and sweep code.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizer of a convex function on `[a, b]` by golden-section search.
///
/// Exact ties between the two probes shrink the bracket to the probes
/// themselves, which is valid for convex functions and keeps symmetric
/// problems symmetric. Returns `(t, f(t))`; propagates the first non-finite
/// value as `Err(t)`.
pub fn golden_min<F>(mut a: f64, mut b: f64, f: F) -> Result<(f64, f64), f64>
where
    F: Fn(f64) -> f64,
{
    let eval = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(t)
        }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..400 {
        let scale = 1.0 + a.abs().max(b.abs());
        if b - a <= 4.0 * f64::EPSILON * scale {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else if fc > fd {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        } else {
            a = c;
            b = d;
            c = b - INV_PHI * (b - a);
            d = a + INV_PHI * (b - a);
            fc = eval(c)?;
            fd = eval(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let fm = eval(mid)?;
    let mut best = (mid, fm);
    if fc < best.1 {
        best = (c, fc);
    }
    if fd < best.1 {
        best = (d, fd);
    }
    Ok(best)
}

/// Bisection on a predicate: `inside(lo)` holds and `inside(hi)` does not.
/// Returns the final `(lo, hi)` pair once no representable midpoint remains.
pub fn bisect_predicate<P>(mut lo: f64, mut hi: f64, inside: P) -> (f64, f64)
where
    P: Fn(f64) -> bool,
{
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Polling directions for pattern search in `dim` dimensions: the signed
/// coordinate axes, optionally followed by all signed pairwise diagonals.
pub fn poll_directions(dim: usize, diagonals: bool) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for k in 0..dim {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[k] = s;
            dirs.push(d);
        }
    }
    if diagonals {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for a in 0..dim {
            for b in (a + 1)..dim {
                for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut d = vec![0.0; dim];
                    d[a] = sa * h;
                    d[b] = sb * h;
                    dirs.push(d);
                }
            }
        }
    }
    dirs
}

#[derive(Debug, Clone)]
pub struct PatternSearch {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evals: usize,
    pub diagonals: bool,
    /// Stop as soon as the objective drops to this value.
    pub target: f64,
}

impl Default for PatternSearch {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            min_step: 1e-12,
            max_evals: 20_000,
            diagonals: false,
            target: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PatternResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub final_step: f64,
}

impl PatternSearch {
    /// Opportunistic compass search minimizing `f` from `x0`. Non-finite
    /// objective values are treated as `+inf`.
    pub fn minimize<F>(&self, x0: &[f64], f: F) -> PatternResult
    where
        F: Fn(&[f64]) -> f64,
    {
        let eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let dirs = poll_directions(x0.len(), self.diagonals);
        let mut x = x0.to_vec();
        let mut fx = eval(&x);
        let mut evals = 1;
        let mut step = self.initial_step;
        let mut cand = vec![0.0; x.len()];
        while step >= self.min_step && evals < self.max_evals && fx > self.target {
            let mut improved = false;
            for d in &dirs {
                for (c, (xi, di)) in cand.iter_mut().zip(x.iter().zip(d)) {
                    *c = xi + step * di;
                }
                let fc = eval(&cand);
                evals += 1;
                if fc < fx {
                    x.copy_from_slice(&cand);
                    fx = fc;
                    improved = true;
                    break;
                }
                if evals >= self.max_evals {
                    break;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        PatternResult {
            x,
            value: fx,
            evals,
            final_step: step,
        }
    }
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `u`.
pub fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d.saturating_sub(1));
    let mut order: Vec<usize> = (0..d).collect();
    // Start from the axes least aligned with u for better conditioning.
    order.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()));
    for k in order {
        if basis.len() + 1 == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for _pass in 0..2 {
            for q in std::iter::once(u).chain(basis.iter().map(|b| b.as_slice())) {
                let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}

impl PatternSearch {
    /// Minimize `f` over unit directions near `u0` using the chart
    /// `s -> u0 + sum_k s_k b_k` on the tangent plane at `u0`. The returned
    /// `x` is the normalized direction.
    pub fn minimize_on_sphere<F>(&self, u0: &[f64], f: F) -> PatternResult
    where
        F: Fn(&[f64]) -> f64,
    {
        let n0 = u0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u0: Vec<f64> = u0.iter().map(|x| x / n0).collect();
        let basis = tangent_basis(&u0);
        let lift = |s: &[f64]| {
            let mut u = u0.clone();
            for (sk, b) in s.iter().zip(&basis) {
                u.iter_mut().zip(b).for_each(|(a, bk)| *a += sk * bk);
            }
            let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            u.iter_mut().for_each(|x| *x /= n);
            u
        };
        let r = self.minimize(&vec![0.0; basis.len()], |s| f(&lift(s)));
        PatternResult { x: lift(&r.x), ..r }
    }
}
