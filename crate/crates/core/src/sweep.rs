//! Rhombs over many direction frames.
//!
//! [`direction_sweep`] inscribes a rhomb for a batch of seeded random
//! frames and records the half-diagonal profile of each, successful or not.
//! [`equalize_diagonals`] is an exploratory extension that rotates a frame
//! until all half-diagonals agree, i.e. looks for an inscribed crosspolytope;
//! no existence result backs it and failure to converge is a normal outcome.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{givens_planes, ConvexBody, Frame};
use crate::par;
use crate::solver::{inscribe_rhomb, Rhomb, SolverConfig};

const FRAME_RETRIES: u64 = 8;

/// Seeded random orthonormal frame: Gram-Schmidt on a matrix of standard
/// normal entries, each row signed so its first nonzero entry is positive.
pub fn random_frame(dim: usize, seed: u64) -> Result<Frame> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("frame dimension must be >= 2, got {dim}")));
    }
    let mut last = None;
    for attempt in 0..FRAME_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let m = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
        match Frame::orthonormalize(&m) {
            Ok(f) => {
                let mut axes = f.matrix().clone();
                for i in 0..dim {
                    let first = (0..dim).map(|j| axes[(i, j)]).find(|&x| x != 0.0).unwrap_or(1.0);
                    if first < 0.0 {
                        axes.row_mut(i).neg_mut();
                    }
                }
                return Frame::new(axes);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::DegenerateFrame("random frame draw failed".into())))
}

/// One sampled frame and what the solver made of it. Failed frames carry
/// NaN half-diagonals and center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub seed: u64,
    pub frame: Frame,
    pub half_diagonals: Vec<f64>,
    pub center: Vec<f64>,
    pub residual: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(seed: u64, frame: Frame, residual: f64, error: String) -> Self {
        let n = frame.dim();
        Self {
            seed,
            frame,
            half_diagonals: vec![f64::NAN; n],
            center: vec![f64::NAN; n],
            residual,
            converged: false,
            error: Some(error),
        }
    }

    fn from_rhomb(seed: u64, rhomb: &Rhomb, residual: f64, converged: bool) -> Self {
        Self {
            seed,
            frame: rhomb.directions.clone(),
            half_diagonals: rhomb.half_diagonals.clone(),
            center: rhomb.center.iter().cloned().collect(),
            residual,
            converged,
            error: None,
        }
    }

    /// Largest minus smallest half-diagonal.
    pub fn spread(&self) -> f64 {
        spread(&self.half_diagonals)
    }
}

fn spread(l: &[f64]) -> f64 {
    let max = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// Five-number summary (min, quartiles, max) of the half-diagonal spreads
/// of the converged records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadQuartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub count: usize,
    pub converged: usize,
    pub success_fraction: f64,
    pub spread: Option<SpreadQuartiles>,
}

impl SweepSummary {
    pub fn from_records(records: &[SweepRecord]) -> Self {
        let count = records.len();
        let converged = records.iter().filter(|r| r.converged).count();
        let mut spreads: Vec<f64> = records.iter().filter(|r| r.converged).map(|r| r.spread()).collect();
        spreads.sort_by(f64::total_cmp);
        let spread = (!spreads.is_empty()).then(|| SpreadQuartiles {
            min: spreads[0],
            q1: quantile(&spreads, 0.25),
            median: quantile(&spreads, 0.5),
            q3: quantile(&spreads, 0.75),
            max: spreads[spreads.len() - 1],
        });
        Self {
            count,
            converged,
            success_fraction: if count == 0 { 0.0 } else { converged as f64 / count as f64 },
            spread,
        }
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

fn run_frame(body: &ConvexBody, seed: u64, frame: &Frame, config: &SolverConfig, equalize: bool) -> SweepRecord {
    if equalize {
        return match equalize_diagonals(body, frame, config) {
            Ok(eq) => SweepRecord::from_rhomb(seed, &eq.rhomb, eq.residual, eq.converged),
            Err(e) => SweepRecord::failed(seed, frame.clone(), residual_of(&e), e.to_string()),
        };
    }
    match inscribe_rhomb(body, frame, config) {
        Ok((rhomb, report)) => SweepRecord::from_rhomb(seed, &rhomb, report.final_residual, report.converged),
        Err(e) => SweepRecord::failed(seed, frame.clone(), residual_of(&e), e.to_string()),
    }
}

fn residual_of(e: &Error) -> f64 {
    match e {
        Error::SearchExhausted { residual, .. } | Error::ConvergenceFailure { residual, .. } => *residual,
        _ => f64::NAN,
    }
}

/// Inscribe a rhomb for each `(seed, frame)` pair. Records come back in
/// input order whatever the thread count.
pub fn sweep_frames(body: &ConvexBody, frames: &[(u64, Frame)], config: &SolverConfig, equalize: bool) -> Result<Sweep> {
    config.validate()?;
    if frames.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one frame".into()));
    }
    for (_, f) in frames {
        body.check_dim(f.dim())?;
    }
    let records = par::map_slice(frames, |(seed, f)| run_frame(body, *seed, f, config, equalize));
    let summary = SweepSummary::from_records(&records);
    Ok(Sweep { records, summary })
}

/// Sweep over `count` random frames with seeds `base_seed, base_seed + 1, ...`.
pub fn direction_sweep(body: &ConvexBody, count: usize, base_seed: u64, config: &SolverConfig) -> Result<Sweep> {
    seeded_sweep(body, count, base_seed, config, false)
}

/// [`direction_sweep`] with every frame passed through [`equalize_diagonals`].
pub fn equalized_sweep(body: &ConvexBody, count: usize, base_seed: u64, config: &SolverConfig) -> Result<Sweep> {
    seeded_sweep(body, count, base_seed, config, true)
}

fn seeded_sweep(body: &ConvexBody, count: usize, base_seed: u64, config: &SolverConfig, equalize: bool) -> Result<Sweep> {
    if count == 0 {
        return Err(Error::InvalidArgument("sweep count must be >= 1".into()));
    }
    let frames = (0..count as u64)
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            random_frame(body.dim(), seed).map(|f| (seed, f))
        })
        .collect::<Result<Vec<_>>>()?;
    sweep_frames(body, &frames, config, equalize)
}

/// One CSV row per record: seed, frame entries row-major, half-diagonals,
/// center, residual, converged. Reals use the shortest round-trip form.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let n = records.first().map_or(0, |r| r.frame.dim());
    let mut header = vec!["seed".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("v{}_{}", i + 1, j + 1));
        }
    }
    header.extend((1..=n).map(|i| format!("lambda{i}")));
    header.extend((1..=n).map(|i| format!("center{i}")));
    header.push("residual".into());
    header.push("converged".into());
    w.write_record(&header).map_err(io)?;
    for r in records {
        let mut row = vec![r.seed.to_string()];
        row.extend(r.frame.rows().iter().flatten().map(|x| x.to_string()));
        row.extend(r.half_diagonals.iter().map(|x| x.to_string()));
        row.extend(r.center.iter().map(|x| x.to_string()));
        row.push(r.residual.to_string());
        row.push(r.converged.to_string());
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(format!("writing CSV: {e}")))?;
    Ok(())
}

/// Result of [`equalize_diagonals`], converged or not.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    /// Best frame found: `frame0.givens(&angles)`.
    pub frame: Frame,
    pub rhomb: Rhomb,
    /// Rotation angles applied to the input frame, one per coordinate plane
    /// in the order of [`Frame::givens`].
    pub angles: Vec<f64>,
    /// `max_i |lambda_i - lambda_1|` of `rhomb`.
    pub spread: f64,
    /// Solver residual of the center of `rhomb`.
    pub residual: f64,
    pub iterations: usize,
    /// Trial frames at which the rhomb could not be inscribed.
    pub failures: usize,
    pub converged: bool,
}

const MAX_EQUALIZE_ITERS: usize = 60;
const MAX_ANGLE_STEP: f64 = std::f64::consts::PI / 8.0;
const FD_STEP: f64 = 1e-5;

struct Trial {
    angles: Vec<f64>,
    frame: Frame,
    rhomb: Rhomb,
    residual: f64,
    r: DVector<f64>,
}

fn trial(body: &ConvexBody, frame0: &Frame, angles: &[f64], config: &SolverConfig) -> Result<Trial> {
    let frame = frame0.givens(angles)?;
    let (rhomb, report) = inscribe_rhomb(body, &frame, config)?;
    let l = &rhomb.half_diagonals;
    let r = DVector::from_iterator(l.len() - 1, l[1..].iter().map(|x| x - l[0]));
    Ok(Trial { angles: angles.to_vec(), frame, rhomb, residual: report.final_residual, r })
}

/// Rotate `frame0` until every half-diagonal of the inscribed rhomb agrees
/// with the first to within `sqrt(config.root_tol)`.
///
/// The unknowns are Givens angles in every coordinate plane, applied to the
/// rows of `frame0`; the residuals are `lambda_k - lambda_1`. Each iteration
/// takes a minimum-norm Gauss-Newton step from a finite-difference Jacobian,
/// capped at `pi / 8` with backtracking, and falls back to probing each angle
/// by `+-pi/8, +-pi/16, ...` when the Jacobian gives no descent (as at
/// symmetric frames, where it vanishes). Fails only if `frame0` itself
/// cannot be inscribed.
pub fn equalize_diagonals(body: &ConvexBody, frame0: &Frame, config: &SolverConfig) -> Result<Equalized> {
    config.validate()?;
    body.check_dim(frame0.dim())?;
    let n = frame0.dim() - 1;
    let m = givens_planes(frame0.dim()).len();
    let target = config.root_tol.sqrt();
    let mut best = trial(body, frame0, &vec![0.0; m], config)?;
    let mut failures = 0;
    let mut iterations = 0;
    let try_at = |angles: &[f64], failures: &mut usize| match trial(body, frame0, angles, config) {
        Ok(t) => Some(t),
        Err(_) => {
            *failures += 1;
            None
        }
    };

    while best.r.amax() > target && iterations < MAX_EQUALIZE_ITERS {
        iterations += 1;
        let norm0 = best.r.norm();
        let mut next: Option<Trial> = None;

        let mut jac = DMatrix::zeros(n, m);
        let mut jac_ok = true;
        for k in 0..m {
            let mut a = best.angles.clone();
            a[k] += FD_STEP;
            match try_at(&a, &mut failures) {
                Some(t) => jac.set_column(k, &((&t.r - &best.r) / FD_STEP)),
                None => jac_ok = false,
            }
        }
        if jac_ok {
            if let Ok(mut step) = jac.svd(true, true).solve(&(-&best.r), 1e-12) {
                if step.iter().all(|s| s.is_finite()) && step.norm() > 0.0 {
                    if step.norm() > MAX_ANGLE_STEP {
                        step *= MAX_ANGLE_STEP / step.norm();
                    }
                    for _ in 0..12 {
                        let a: Vec<f64> = best.angles.iter().zip(step.iter()).map(|(x, s)| x + s).collect();
                        if let Some(t) = try_at(&a, &mut failures) {
                            if t.r.norm() < norm0 {
                                next = Some(t);
                                break;
                            }
                        }
                        step *= 0.5;
                    }
                }
            }
        }

        if next.is_none() {
            let mut h = MAX_ANGLE_STEP;
            'probe: while h > 1e-6 {
                for k in 0..m {
                    for s in [h, -h] {
                        let mut a = best.angles.clone();
                        a[k] += s;
                        if let Some(t) = try_at(&a, &mut failures) {
                            if t.r.norm() < norm0 {
                                next = Some(t);
                                break 'probe;
                            }
                        }
                    }
                }
                h *= 0.5;
            }
        }

        match next {
            Some(t) => best = t,
            None => break,
        }
    }

    let spread = best.r.amax();
    Ok(Equalized {
        frame: best.frame,
        spread,
        residual: best.residual,
        rhomb: best.rhomb,
        angles: best.angles,
        iterations,
        failures,
        converged: spread <= target,
    })
}
