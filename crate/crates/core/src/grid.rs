//! Refining one-dimensional grid search.
//!
//! Each round evaluates `resolution` evenly spaced points, then zooms the
//! window ×10 around the incumbent. Evaluation is data-parallel when the
//! `parallel` feature is enabled; the reduction is always sequential so the
//! result does not depend on scheduling. Ties go to the lowest index.
//!
//! An objective may return `f64::NEG_INFINITY` (or NaN) to mark a point as
//! infeasible.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::OracleError;

/// Resolution and refinement schedule of a grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points per round, at least 3.
    pub resolution: usize,
    /// Zoom rounds after the initial sweep.
    pub refinements: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: 2001,
            refinements: 2,
        }
    }
}

impl GridSpec {
    pub fn new(resolution: usize, refinements: usize) -> Self {
        GridSpec {
            resolution,
            refinements,
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.resolution < 3 {
            return Err(OracleError::InvalidGrid("resolution must be at least 3"));
        }
        if self.refinements > 12 {
            return Err(OracleError::InvalidGrid("at most 12 refinement rounds"));
        }
        Ok(())
    }

    /// Spacing of the last round over an interval of width `width`.
    pub fn final_step(&self, width: f64) -> f64 {
        width / (self.resolution - 1) as f64 / 10f64.powi(self.refinements as i32)
    }
}

/// How grid points are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

/// Best point found by [`argmax`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub value: f64,
    /// Spacing of the round that produced `x`.
    pub step: f64,
    pub evaluations: usize,
}

/// Maximizes `f` over `[lower, upper]`. Returns `Ok(None)` when every point
/// of the first sweep is infeasible.
pub fn argmax<F>(f: F, lower: f64, upper: f64, spec: &GridSpec) -> Result<Option<GridPoint>, OracleError>
where
    F: Fn(f64) -> f64 + Sync,
{
    argmax_with(f, lower, upper, spec, Execution::default())
}

pub fn argmax_with<F>(
    f: F,
    lower: f64,
    upper: f64,
    spec: &GridSpec,
    execution: Execution,
) -> Result<Option<GridPoint>, OracleError>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    if !lower.is_finite() || !upper.is_finite() {
        return Err(OracleError::InvalidGrid("bounds must be finite"));
    }
    if upper <= lower {
        return Err(OracleError::InvalidGrid("upper bound must exceed lower bound"));
    }

    let n = spec.resolution;
    let (mut lo, mut hi) = (lower, upper);
    let mut best: Option<GridPoint> = None;
    let mut evaluations = 0;
    for _ in 0..=spec.refinements {
        let step = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n)
            .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
            .collect();
        let values = evaluate(&f, &xs, execution);
        evaluations += n;

        let Some(k) = first_max(&values) else { break };
        let candidate = GridPoint {
            x: xs[k],
            value: values[k],
            step,
            evaluations,
        };
        best = match best {
            Some(prev) if prev.value > candidate.value => Some(GridPoint { evaluations, ..prev }),
            _ => Some(candidate),
        };

        let centre = best.map(|b| b.x).unwrap_or(candidate.x);
        let half = (hi - lo) / 20.0;
        lo = (centre - half).max(lower);
        hi = (centre + half).min(upper);
        if hi <= lo {
            break;
        }
    }
    Ok(best.map(|b| GridPoint { evaluations, ..b }))
}

/// Index of the largest finite value; ties resolve to the lowest index.
fn first_max(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        match best {
            Some(b) if values[b] >= v => {}
            _ => best = Some(k),
        }
    }
    best
}

fn evaluate<F>(f: &F, xs: &[f64], execution: Execution) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    match execution {
        Execution::Sequential => xs.iter().map(|&x| f(x)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => xs.par_iter().map(|&x| f(x)).collect(),
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => xs.iter().map(|&x| f(x)).collect(),
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum_of_parabola() {
        let spec = GridSpec::new(101, 4);
        let p = argmax(|x| -(x - 1.234_567).powi(2), -10.0, 10.0, &spec).unwrap().unwrap();
        assert!((p.x - 1.234_567).abs() < 1e-5, "{p:?}");
        assert_eq!(p.evaluations, 5 * 101);
    }

    #[test]
    fn finds_endpoint_of_monotone_function() {
        let p = argmax(|x| x, 0.0, 3.0, &GridSpec::default()).unwrap().unwrap();
        assert_eq!(p.x, 3.0);
    }

    #[test]
    fn respects_infeasible_region() {
        let f = |x: f64| if x <= 2.5 { x } else { f64::NEG_INFINITY };
        let p = argmax(f, 0.0, 10.0, &GridSpec::new(201, 4)).unwrap().unwrap();
        assert!(p.x <= 2.5 && 2.5 - p.x < 1e-5, "{p:?}");
        assert!(argmax(|_| f64::NEG_INFINITY, 0.0, 1.0, &GridSpec::default()).unwrap().is_none());
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let p = argmax(|_| 1.0, 0.0, 1.0, &GridSpec::new(11, 0)).unwrap().unwrap();
        assert_eq!(p.x, 0.0);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = |x: f64| (3.0 * x).sin() - 0.1 * x * x;
        let spec = GridSpec::new(501, 3);
        let a = argmax_with(f, -5.0, 5.0, &spec, Execution::Sequential).unwrap();
        let b = argmax_with(f, -5.0, 5.0, &spec, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(argmax(|x| x, 0.0, 1.0, &GridSpec::new(2, 0)).is_err());
        assert!(argmax(|x| x, 1.0, 1.0, &GridSpec::default()).is_err());
        assert!(argmax(|x| x, 0.0, f64::INFINITY, &GridSpec::default()).is_err());
    }

    #[test]
    fn map_indexed_keeps_order() {
        assert_eq!(map_indexed(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }
}
