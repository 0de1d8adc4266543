use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;

/// A Monte-Carlo mean with its standard error (sample sd / √samples).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl EstimateWithError {
    /// Aggregates values in slice order, so the result depends only on the
    /// values and never on how they were produced.
    pub fn from_values(values: &[f64], seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("an estimate needs at least one sample"));
        }
        let count = values.len() as f64;
        let mean = values.iter().sum::<f64>() / count;
        let std_error = if values.len() > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1.0)).sqrt() / count.sqrt()
        } else {
            0.0
        };
        Ok(EstimateWithError {
            mean,
            std_error,
            samples: values.len() as u64,
            seed,
        })
    }

    /// |mean − target| in units of standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_error
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) < sigmas
    }
}

/// ln|det| of a row-major square matrix by partially pivoted elimination.
/// Returns −∞ for a singular matrix.
pub(crate) fn ln_abs_det(a: &mut [f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for r in k + 1..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return f64::NEG_INFINITY;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
        }
        let pivot = a[k * n + k];
        acc += pivot.abs().ln();
        for r in k + 1..n {
            let factor = a[r * n + k] / pivot;
            if factor != 0.0 {
                for c in k + 1..n {
                    a[r * n + c] -= factor * a[k * n + c];
                }
            }
        }
    }
    acc
}

fn abs_det_product(a: &mut [f64], n: usize) -> f64 {
    let mut acc = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for r in k + 1..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
        }
        let pivot = a[k * n + k];
        acc *= pivot.abs();
        for r in k + 1..n {
            let factor = a[r * n + k] / pivot;
            for c in k + 1..n {
                a[r * n + c] -= factor * a[k * n + c];
            }
        }
    }
    acc
}

/// Monte-Carlo estimate of E|det(A + tI)| over n×n standard gaussian A.
/// Sample i draws from its own substream, so the estimate is independent of
/// the worker count.
pub fn mc_abs_det(n: u32, t: f64, samples: u64, seed: u64) -> Result<EstimateWithError> {
    if n == 0 {
        return Err(Error::domain("matrix size must be positive"));
    }
    if samples < 100 {
        return Err(Error::domain(format!(
            "mc_abs_det needs at least 100 samples, got {samples}"
        )));
    }
    if !t.is_finite() {
        return Err(Error::domain(format!("non-finite shift t = {t}")));
    }
    let n = n as usize;
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map_init(
            || vec![0.0; n * n],
            |a, i| {
                let mut rng = substream(seed, i);
                for v in a.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                for k in 0..n {
                    a[k * n + k] += t;
                }
                if n > 30 {
                    ln_abs_det(a, n).exp()
                } else {
                    abs_det_product(a, n)
                }
            },
        )
        .collect();
    EstimateWithError::from_values(&values, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_known_matrix() {
        let mut a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let mut b = a.clone();
        // det = 0*(1) - 2*(1 - 0) + 1*(0 - 3) = -5
        assert!((abs_det_product(&mut a, 3) - 5.0).abs() < 1e-14);
        assert!((ln_abs_det(&mut b, 3) - 5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn rejects_too_few_samples() {
        assert!(mc_abs_det(2, 0.0, 99, 1).is_err());
    }

    #[test]
    fn deterministic_under_thread_counts() {
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let a = one.install(|| mc_abs_det(3, 0.5, 5000, 11).unwrap());
        let b = mc_abs_det(3, 0.5, 5000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_by_one_is_half_normal() {
        let e = mc_abs_det(1, 0.0, 200_000, 3).unwrap();
        assert!(e.within((2.0 / std::f64::consts::PI).sqrt(), 4.0));
    }
}
