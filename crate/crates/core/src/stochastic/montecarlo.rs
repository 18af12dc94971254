use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl McEstimate {
    /// Summation runs in index order, so the result depends only on the values.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().copied().collect::<NeumaierSum>().value() / n as f64;
        let var = if n > 1 {
            values
                .iter()
                .map(|v| (v - mean).powi(2))
                .collect::<NeumaierSum>()
                .value()
                / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            n,
        }
    }
}

/// Evaluates `f(i)` for `i in 0..n` in parallel and returns the results in
/// index order. On failure the error of the lowest failing index is
/// returned, tagged with that index.
pub fn mc_collect<T, F>(n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = (0..n).into_par_iter().map(&f).collect();
    let mut out = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e @ Error::Sample { .. }) => return Err(e),
            Err(e) => return Err(e.in_sample(i as u64)),
        }
    }
    Ok(out)
}

/// Mean and standard error of `functional(seed, i)` over `i in 0..n_samples`.
pub fn mc_expect<F>(functional: F, n_samples: u64, seed: u64) -> Result<McEstimate>
where
    F: Fn(u64, u64) -> Result<f64> + Sync,
{
    if n_samples < 2 {
        return Err(Error::param("n_samples", "at least two samples are required"));
    }
    let values = mc_collect(n_samples, |i| {
        let v = functional(seed, i)?;
        if !v.is_finite() {
            return Err(Error::numerical(
                "mc_expect",
                format!("non-finite functional value {v}"),
            ));
        }
        Ok(v)
    })?;
    Ok(McEstimate::from_values(&values))
}
