//! Coarse grid search followed by Nelder–Mead refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Error, Result};

/// Settings of the basis search shared by every optimised correlation quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerOptions {
    /// Grid points per angle when there are at most `high_dim_threshold` angles.
    pub grid_points: usize,
    /// Grid points per angle above that.
    pub grid_points_high_dim: usize,
    pub high_dim_threshold: usize,
    /// Largest full grid that is enumerated exhaustively. Larger grids are
    /// replaced by `random_samples` seeded uniform points plus the origin.
    pub grid_budget: usize,
    pub random_samples: usize,
    /// Number of best grid points refined by the simplex.
    pub refine_starts: usize,
    /// Simplex diameter at which a refinement counts as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        Self {
            grid_points: 16,
            grid_points_high_dim: 8,
            high_dim_threshold: 4,
            grid_budget: 65_536,
            random_samples: 4_096,
            refine_starts: 5,
            tolerance: 1e-7,
            max_iterations: 20_000,
            max_restarts: 3,
            seed: 0x5eed,
        }
    }
}

impl MinimizerOptions {
    /// Same settings with a different seed for the sampled grid.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Best point found and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

fn start_points(ranges: &[f64], opts: &MinimizerOptions) -> Vec<Vec<f64>> {
    let dim = ranges.len();
    let per_axis = if dim > opts.high_dim_threshold {
        opts.grid_points_high_dim
    } else {
        opts.grid_points
    }
    .max(1);
    let full = (per_axis as f64).powi(dim as i32);
    if full <= opts.grid_budget as f64 {
        let total = per_axis.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; dim];
                for (slot, r) in p.iter_mut().zip(ranges).rev() {
                    *slot = r * (idx % per_axis) as f64 / per_axis as f64;
                    idx /= per_axis;
                }
                p
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut points = vec![vec![0.0; dim]];
        for _ in 0..opts.random_samples {
            points.push(ranges.iter().map(|r| r * rng.gen::<f64>()).collect());
        }
        points
    }
}

/// Minimises `f` over a box of angles `[0, ranges[i])`; the objective is
/// treated as smooth but is never assumed periodic or convex.
pub fn minimize<F>(f: F, ranges: &[f64], opts: &MinimizerOptions) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if ranges.is_empty() {
        return Ok(Minimum {
            point: Vec::new(),
            value: f(&[]),
            evaluations: 1,
        });
    }
    let points = start_points(ranges, opts);
    let values: Vec<f64> = points.par_iter().map(|p| f(p)).collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let per_axis = if ranges.len() > opts.high_dim_threshold {
        opts.grid_points_high_dim
    } else {
        opts.grid_points
    }
    .max(1);
    let steps: Vec<f64> = ranges.iter().map(|r| r / per_axis as f64).collect();
    let starts: Vec<usize> = order.iter().copied().take(opts.refine_starts.max(1)).collect();
    let refined: Vec<Result<(Vec<f64>, f64, usize)>> = starts
        .par_iter()
        .map(|&s| refine(&f, &points[s], values[s], &steps, opts))
        .collect();

    let mut best = Minimum {
        point: points[order[0]].clone(),
        value: values[order[0]],
        evaluations: points.len(),
    };
    for r in refined {
        let (x, v, evals) = r?;
        best.evaluations += evals;
        if v < best.value {
            best.value = v;
            best.point = x;
        }
    }
    Ok(best)
}

fn refine<F>(f: &F, x0: &[f64], f0: f64, steps: &[f64], opts: &MinimizerOptions) -> Result<(Vec<f64>, f64, usize)>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut evaluations = 0;
    let mut scale = 1.0;
    for _ in 0..=opts.max_restarts {
        let run = nelder_mead(f, &x, fx, steps, scale, opts);
        evaluations += run.evaluations;
        x = run.point;
        fx = run.value;
        if run.converged {
            return Ok((x, fx, evaluations));
        }
        scale *= 0.1;
    }
    Err(Error::NonConvergence(format!(
        "simplex did not shrink below {} after {} restarts (best value {fx})",
        opts.tolerance, opts.max_restarts
    )))
}

struct Run {
    point: Vec<f64>,
    value: f64,
    evaluations: usize,
    converged: bool,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..simplex.len() {
        for j in (i + 1)..simplex.len() {
            let d: f64 = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            worst = worst.max(d);
        }
    }
    worst.sqrt()
}

fn nelder_mead<F>(f: &F, x0: &[f64], f0: f64, steps: &[f64], scale: f64, opts: &MinimizerOptions) -> Run
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex = vec![x0.to_vec()];
    let mut fvals = vec![f0];
    let mut evaluations = 0;
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i] * scale;
        fvals.push(f(&v));
        simplex.push(v);
        evaluations += 1;
    }

    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fvals[a].total_cmp(&fvals[b]).then(a.cmp(&b)));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        fvals = idx.iter().map(|&i| fvals[i]).collect();
        if diameter(&simplex) < opts.tolerance {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        evaluations += 1;
        if fr < fvals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evaluations += 1;
            if fe < fr {
                simplex[n] = xe;
                fvals[n] = fe;
            } else {
                simplex[n] = xr;
                fvals[n] = fr;
            }
            continue;
        }
        if fr < fvals[n - 1] {
            simplex[n] = xr;
            fvals[n] = fr;
            continue;
        }
        let outside = fr < fvals[n];
        let xc = along(if outside { -0.5 } else { 0.5 });
        let fc = f(&xc);
        evaluations += 1;
        if (outside && fc <= fr) || (!outside && fc < fvals[n]) {
            simplex[n] = xc;
            fvals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect();
            fvals[i] = f(&shrunk);
            simplex[i] = shrunk;
            evaluations += 1;
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| fvals[a].total_cmp(&fvals[b]).then(a.cmp(&b)))
        .expect("simplex is nonempty");
    Run {
        point: simplex[best].clone(),
        value: fvals[best],
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.234).powi(2) + 3.0 * (x[1] - 4.5).powi(2) + 0.25;
        let m = minimize(f, &[PI, 2.0 * PI], &MinimizerOptions::default()).unwrap();
        assert!((m.value - 0.25).abs() < 1e-12);
        assert!((m.point[0] - 1.234).abs() < 1e-6);
        assert!((m.point[1] - 4.5).abs() < 1e-6);
    }

    #[test]
    fn escapes_local_minima_via_grid() {
        // global minimum near 2.2 with a shallower basin near 0.4
        let f = |x: &[f64]| -(-(x[0] - 0.4).powi(2) * 20.0).exp() - 2.0 * (-(x[0] - 2.2).powi(2) * 20.0).exp();
        let m = minimize(f, &[PI], &MinimizerOptions::default()).unwrap();
        assert!((m.point[0] - 2.2).abs() < 1e-5);
    }

    #[test]
    fn constant_objective_converges() {
        let m = minimize(|_: &[f64]| 1.0, &[PI, 2.0 * PI], &MinimizerOptions::default()).unwrap();
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn large_grids_are_sampled_deterministically() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>();
        let ranges = [PI; 8];
        let opts = MinimizerOptions::default();
        let a = minimize(f, &ranges, &opts).unwrap();
        let b = minimize(f, &ranges, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.value < 1e-12);
        assert_eq!(start_points(&ranges, &opts)[0], vec![0.0; 8]);
        assert_eq!(start_points(&ranges, &opts).len(), opts.random_samples + 1);
        assert_eq!(start_points(&[PI; 4], &opts).len(), 65_536);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = MinimizerOptions {
            max_iterations: 3,
            max_restarts: 1,
            ..MinimizerOptions::default()
        };
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2);
        assert!(matches!(minimize(f, &[PI, PI], &opts), Err(Error::NonConvergence(_))));
    }
}
