use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::homotopy::count_classes_homotopy_retrying;
use super::poly::{contract, sample_bw_system_from, GaussianTensor, PolySystem};
use super::sturm::count_classes_n2;
use crate::closedform::{dnd, ProblemShape};
use crate::density::EstimateWithError;
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::specfun::{erfc, regularized_upper};

/// Where the random systems come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSource {
    /// Contract a gaussian tensor.
    Tensor,
    /// Draw iid gaussian Bombieri–Weyl coefficients directly.
    BombieriWeyl,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: SystemSource,
    /// Homotopy runs per sample before it is discarded.
    pub homotopy_attempts: u32,
    /// Abort when more than this fraction of samples fails.
    pub max_failure_rate: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            source: SystemSource::Tensor,
            homotopy_attempts: 3,
            max_failure_rate: 0.05,
        }
    }
}

/// Frequencies of per-sample class counts plus run metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountHistogram {
    pub shape: ProblemShape,
    pub counts: BTreeMap<u64, u64>,
    pub samples: u64,
    pub seed: u64,
    pub failures: u64,
}

#[derive(Serialize)]
struct Sidecar {
    n: u32,
    d: u32,
    samples: u64,
    seed: u64,
    failures: u64,
    mean: f64,
    std_error: f64,
}

impl CountHistogram {
    pub fn successes(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Mean and standard error of the count over the successful samples.
    pub fn estimate(&self) -> Result<EstimateWithError> {
        let n = self.successes();
        if n == 0 {
            return Err(Error::domain("histogram has no successful samples"));
        }
        let nf = n as f64;
        let mean = self
            .counts
            .iter()
            .map(|(&c, &k)| c as f64 * k as f64)
            .sum::<f64>()
            / nf;
        let ss: f64 = self
            .counts
            .iter()
            .map(|(&c, &k)| k as f64 * (c as f64 - mean).powi(2))
            .sum();
        let std_error = if n > 1 {
            (ss / (nf - 1.0)).sqrt() / nf.sqrt()
        } else {
            0.0
        };
        Ok(EstimateWithError {
            mean,
            std_error,
            samples: n,
            seed: self.seed,
        })
    }

    /// Frequencies plus failures add up to the samples; every count is at
    /// most D(n, d) and has the parity of D(n, d).
    pub fn check_invariants(&self) -> Result<()> {
        if self.successes() + self.failures != self.samples {
            return Err(Error::Invariant(format!(
                "{} successes + {} failures != {} samples",
                self.successes(),
                self.failures,
                self.samples
            )));
        }
        let total = dnd(self.shape)?;
        for &c in self.counts.keys() {
            if c > total {
                return Err(Error::Invariant(format!("count {c} exceeds D = {total}")));
            }
            if c % 2 != total % 2 {
                return Err(Error::Invariant(format!(
                    "count {c} has the wrong parity (D = {total})"
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("count,frequency\n");
        for (c, k) in &self.counts {
            let _ = writeln!(out, "{c},{k}");
        }
        out
    }

    pub fn sidecar_json(&self) -> Result<String> {
        let est = self.estimate()?;
        let sidecar = Sidecar {
            n: self.shape.n(),
            d: self.shape.d(),
            samples: self.samples,
            seed: self.seed,
            failures: self.failures,
            mean: est.mean,
            std_error: est.std_error,
        };
        let mut s = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Path of the JSON sidecar for a CSV at `csv`.
    pub fn sidecar_path(csv: &Path) -> PathBuf {
        let p = csv.with_extension("json");
        if p == csv {
            csv.with_extension("summary.json")
        } else {
            p
        }
    }

    /// Writes the CSV to `path` and the sidecar next to it; returns both
    /// paths.
    pub fn export(&self, path: &Path) -> Result<(PathBuf, PathBuf)> {
        let sidecar = Self::sidecar_path(path);
        std::fs::write(path, self.to_csv())?;
        std::fs::write(&sidecar, self.sidecar_json()?)?;
        Ok((path.to_path_buf(), sidecar))
    }
}

/// How many samples needed how many homotopy attempts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HomotopySummary {
    /// attempts → number of samples completing on that attempt
    pub completed_on_attempt: BTreeMap<u32, u64>,
    pub discarded: u64,
    pub zero_eigenvalues: u64,
    pub conjugate_failures: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub histogram: CountHistogram,
    pub estimate: EstimateWithError,
    pub homotopy: Option<HomotopySummary>,
}

enum SampleOutcome {
    Counted {
        count: u64,
        attempts: u32,
        zero: bool,
    },
    Failed,
}

fn draw_system(
    shape: ProblemShape,
    source: SystemSource,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<PolySystem> {
    Ok(match source {
        SystemSource::Tensor => contract(&GaussianTensor::sample(shape, rng)?),
        SystemSource::BombieriWeyl => sample_bw_system_from(shape, rng),
    })
}

fn run_sample(
    shape: ProblemShape,
    seed: u64,
    index: u64,
    cfg: &ExperimentConfig,
) -> Result<SampleOutcome> {
    if shape.n() == 1 {
        return Ok(SampleOutcome::Counted {
            count: 1,
            attempts: 0,
            zero: false,
        });
    }
    let mut rng = substream(seed, index);
    let f = draw_system(shape, cfg.source, &mut rng)?;
    if shape.n() == 2 {
        return Ok(match count_classes_n2(&f) {
            Ok(count) => SampleOutcome::Counted {
                count,
                attempts: 0,
                zero: false,
            },
            Err(Error::Degenerate(_)) => SampleOutcome::Failed,
            Err(e) => return Err(e),
        });
    }
    Ok(
        match count_classes_homotopy_retrying(&f, &mut rng, cfg.homotopy_attempts) {
            Ok(out) => SampleOutcome::Counted {
                count: out.real_count,
                attempts: out.diagnostics.attempts,
                zero: out.zero_eigenvalue,
            },
            Err(Error::Convergence(msg)) => {
                log::debug!("sample {index} discarded: {msg}");
                SampleOutcome::Failed
            }
            Err(e) => return Err(e),
        },
    )
}

/// The sampling experiment with the default configuration.
pub fn run_experiment(shape: ProblemShape, samples: u64, seed: u64) -> Result<ExperimentResult> {
    run_experiment_with(shape, samples, seed, &ExperimentConfig::default())
}

/// Counts real eigenpair classes of `samples` random systems: exactly 1
/// for n = 1, Sturm sequences for n = 2, homotopy continuation for n ≥ 3.
/// Sample i uses substream (seed, i); the aggregation runs in sample order,
/// so results do not depend on the number of workers.
pub fn run_experiment_with(
    shape: ProblemShape,
    samples: u64,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<ExperimentResult> {
    if samples == 0 {
        return Err(Error::domain("an experiment needs at least one sample"));
    }
    let outcomes: Vec<SampleOutcome> = (0..samples)
        .into_par_iter()
        .map(|i| run_sample(shape, seed, i, cfg))
        .collect::<Result<_>>()?;
    let mut histogram = CountHistogram {
        shape,
        counts: BTreeMap::new(),
        samples,
        seed,
        failures: 0,
    };
    let mut summary = HomotopySummary::default();
    for o in &outcomes {
        match *o {
            SampleOutcome::Counted {
                count,
                attempts,
                zero,
            } => {
                *histogram.counts.entry(count).or_insert(0) += 1;
                if attempts > 0 {
                    *summary.completed_on_attempt.entry(attempts).or_insert(0) += 1;
                }
                summary.zero_eigenvalues += u64::from(zero);
            }
            SampleOutcome::Failed => {
                histogram.failures += 1;
                summary.discarded += 1;
            }
        }
    }
    let rate = histogram.failures as f64 / samples as f64;
    if rate > cfg.max_failure_rate {
        return Err(Error::FailureRate {
            failures: histogram.failures as usize,
            samples: samples as usize,
            limit: cfg.max_failure_rate,
        });
    }
    let estimate = histogram.estimate()?;
    Ok(ExperimentResult {
        histogram,
        estimate,
        homotopy: (shape.n() >= 3).then_some(summary),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
}

/// Two-sample chi-square test of equal count distributions. Adjacent bins
/// are pooled until each holds at least ten observations.
pub fn chi_square_two_sample(a: &CountHistogram, b: &CountHistogram) -> Result<ChiSquare> {
    let na = a.successes() as f64;
    let nb = b.successes() as f64;
    if na == 0.0 || nb == 0.0 {
        return Err(Error::domain(
            "chi-square test needs two non-empty histograms",
        ));
    }
    let keys: std::collections::BTreeSet<u64> =
        a.counts.keys().chain(b.counts.keys()).copied().collect();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pending = (0.0, 0.0);
    for k in keys {
        pending.0 += *a.counts.get(&k).unwrap_or(&0) as f64;
        pending.1 += *b.counts.get(&k).unwrap_or(&0) as f64;
        if pending.0 + pending.1 >= 10.0 {
            bins.push(pending);
            pending = (0.0, 0.0);
        }
    }
    if pending.0 + pending.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += pending.0;
                last.1 += pending.1;
            }
            None => bins.push(pending),
        }
    }
    let ra = (nb / na).sqrt();
    let rb = (na / nb).sqrt();
    let statistic: f64 = bins
        .iter()
        .map(|&(x, y)| (ra * x - rb * y).powi(2) / (x + y))
        .sum();
    let dof = bins.len() as u32 - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        regularized_upper(dof as f64 / 2.0, statistic / 2.0)?.value
    };
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

/// Per-coefficient check that contracted gaussian tensors have unit-variance
/// Bombieri–Weyl coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BwVarianceReport {
    pub shape: ProblemShape,
    pub samples: u64,
    pub seed: u64,
    /// (polynomial, exponent vector, sample variance, z-score)
    pub coefficients: Vec<(usize, Vec<u32>, f64, f64)>,
    pub max_abs_z: f64,
    /// Two-sided p-value of the largest |z| times the number of coefficients.
    pub bonferroni_p: f64,
}

impl BwVarianceReport {
    pub fn passed(&self) -> bool {
        self.max_abs_z < 4.0
    }
}

/// z = (s² − 1)/√(2/(N − 1)) for the sample variance s² of every
/// Bombieri–Weyl coefficient of contracted gaussian tensors.
pub fn bw_variance_test(shape: ProblemShape, samples: u64, seed: u64) -> Result<BwVarianceReport> {
    if samples < 10_000 {
        return Err(Error::domain(format!(
            "variance test needs at least 10^4 samples, got {samples}"
        )));
    }
    let draws: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let f = contract(&GaussianTensor::sample(shape, &mut rng)?);
            Ok((0..shape.n() as usize)
                .flat_map(|j| f.bw_coefficients(j))
                .collect())
        })
        .collect::<Result<_>>()?;
    let template = PolySystem::zeros(shape);
    let m = template.monomials().len();
    let k = draws[0].len();
    let nf = samples as f64;
    let mut coefficients = Vec::with_capacity(k);
    let mut max_abs_z: f64 = 0.0;
    for c in 0..k {
        let mean = draws.iter().map(|r| r[c]).sum::<f64>() / nf;
        let var = draws.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        let z = (var - 1.0) / (2.0 / (nf - 1.0)).sqrt();
        max_abs_z = max_abs_z.max(z.abs());
        coefficients.push((c / m, template.monomials()[c % m].clone(), var, z));
    }
    let two_sided = erfc(max_abs_z / std::f64::consts::SQRT_2);
    Ok(BwVarianceReport {
        shape,
        samples,
        seed,
        coefficients,
        max_abs_z,
        bonferroni_p: (two_sided * k as f64).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(n: u32, d: u32) -> ProblemShape {
        ProblemShape::new(n, d).unwrap()
    }

    #[test]
    fn one_dimensional_counts_are_one() {
        let r = run_experiment(shape(1, 4), 100, 3).unwrap();
        assert_eq!(r.histogram.counts.len(), 1);
        assert_eq!(r.histogram.counts[&1], 100);
        assert_eq!(r.estimate.std_error, 0.0);
    }

    #[test]
    fn histogram_invariants_and_export() {
        let r = run_experiment(shape(2, 2), 2000, 5).unwrap();
        r.histogram.check_invariants().unwrap();
        let csv = r.histogram.to_csv();
        assert!(csv.starts_with("count,frequency\n"));
        let dir = tempfile::tempdir().unwrap();
        let (c, j) = r.histogram.export(&dir.path().join("h.csv")).unwrap();
        assert_eq!(std::fs::read_to_string(c).unwrap(), csv);
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(j).unwrap()).unwrap();
        assert_eq!(v["samples"], 2000);
        assert_eq!(v["n"], 2);
    }

    #[test]
    fn deterministic_under_thread_counts() {
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let a = one.install(|| run_experiment(shape(3, 2), 40, 9).unwrap());
        let b = run_experiment(shape(3, 2), 40, 9).unwrap();
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn chi_square_identical_histograms() {
        let r = run_experiment(shape(2, 3), 1000, 1).unwrap();
        let t = chi_square_two_sample(&r.histogram, &r.histogram).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_detects_shift() {
        let mut a = CountHistogram {
            shape: shape(2, 2),
            counts: BTreeMap::from([(1, 500), (3, 500)]),
            samples: 1000,
            seed: 0,
            failures: 0,
        };
        let b = a.clone();
        a.counts = BTreeMap::from([(1, 300), (3, 700)]);
        assert!(chi_square_two_sample(&a, &b).unwrap().p_value < 1e-10);
    }

    #[test]
    fn variance_test_needs_samples() {
        assert!(bw_variance_test(shape(2, 2), 100, 1).is_err());
    }

    #[test]
    fn invariant_violations_are_reported() {
        let h = CountHistogram {
            shape: shape(3, 3),
            counts: BTreeMap::from([(2, 1)]),
            samples: 1,
            seed: 0,
            failures: 0,
        };
        assert!(matches!(h.check_invariants(), Err(Error::Invariant(_))));
    }
}
