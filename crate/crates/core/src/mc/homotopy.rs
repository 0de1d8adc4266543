//! Complex eigenpair classes by total-degree homotopy continuation.
//!
//! Unknowns are x = (v, λ) ∈ ℂ^{n+1}. The target system is
//! F(v, λ) = (f(v) − λv, ⟨a, v⟩ − 1) on a random real affine chart; the start
//! system G = (v_i^e − c_i, λ − c_λ) with e = max(d, 2) has eⁿ known roots.
//! Paths of H = (1 − t)γG + tF are followed from t = 0 to t = 1.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitCircle};
use serde::{Deserialize, Serialize};

use super::poly::PolySystem;
use crate::closedform::dnd;
use crate::error::{Error, Result};

type C = Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub corrector_tolerance: f64,
    pub newton_iterations: u32,
    /// Largest |Im| (relative to max(1, ‖x‖)) of a solution classified real.
    pub realness_threshold: f64,
    /// Endpoints closer than this (relative to max(1, ‖x‖)) are one class.
    pub dedup_distance: f64,
    /// Endpoints must satisfy ‖F(x)‖ ≤ this · max(1, ‖x‖^e) after refinement.
    pub endpoint_residual: f64,
    /// Paths whose norm exceeds this are declared divergent.
    pub divergence_bound: f64,
    pub max_steps: u32,
    pub gamma: C,
    /// Unit vector a of the chart ⟨a, v⟩ = 1.
    pub chart: Vec<f64>,
    /// Start constants c_1..c_n for v_i^e − c_i followed by c_λ.
    pub start_constants: Vec<C>,
}

impl HomotopyConfig {
    /// Default tolerances with freshly drawn gamma, chart and start constants.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let unit = |rng: &mut R| {
            let [re, im]: [f64; 2] = UnitCircle.sample(rng);
            C::new(re, im)
        };
        let gamma = unit(rng);
        let mut chart: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = chart.iter().map(|a| a * a).sum::<f64>().sqrt();
        chart.iter_mut().for_each(|a| *a /= norm);
        let start_constants = (0..=n).map(|_| unit(rng)).collect();
        HomotopyConfig {
            initial_step: 0.01,
            min_step: 1e-13,
            max_step: 0.05,
            corrector_tolerance: 1e-9,
            newton_iterations: 3,
            realness_threshold: 1e-8,
            dedup_distance: 1e-6,
            endpoint_residual: 1e-12,
            divergence_bound: 1e10,
            max_steps: 50_000,
            gamma,
            chart,
            start_constants,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = 0.0 < self.min_step
            && self.min_step < self.initial_step
            && self.initial_step <= self.max_step
            && self.max_step < 1.0
            && self.realness_threshold > 0.0
            && self.dedup_distance > 0.0
            && self.corrector_tolerance > 0.0
            && self.newton_iterations >= 1
            && (self.gamma.norm() - 1.0).abs() < 1e-12
            && self.chart.len() == n
            && self.start_constants.len() == n + 1
            && self.start_constants.iter().all(|c| c.norm() > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::domain("inconsistent homotopy configuration"))
        }
    }
}

/// A real eigenpair class, represented by its unit vector with the first
/// nonzero coordinate positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenclass {
    pub v: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
}

impl Eigenclass {
    /// Canonical representative of the class of (v, λ) for degree d.
    pub fn canonical(f: &PolySystem, v: &[f64], lambda: f64) -> Result<Self> {
        let d = f.shape().d() as i32;
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Degenerate("eigenvector must be nonzero".into()));
        }
        let mut u: Vec<f64> = v.iter().map(|x| x / r).collect();
        let mut l = lambda / r.powi(d - 1);
        if u.iter().find(|x| **x != 0.0).is_some_and(|x| *x < 0.0) {
            u.iter_mut().for_each(|x| *x = -*x);
            if (d - 1) % 2 == 1 {
                l = -l;
            }
        }
        let fu = f.eval(&u);
        let residual = fu
            .iter()
            .zip(&u)
            .map(|(a, b)| (a - l * b) * (a - l * b))
            .sum::<f64>()
            .sqrt();
        Ok(Eigenclass {
            v: u,
            lambda: l,
            residual,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HomotopyDiagnostics {
    pub paths: usize,
    pub reached_end: usize,
    pub diverged: usize,
    pub step_underflow: usize,
    pub step_limit: usize,
    /// Unfinished paths whose last point still refined onto a solution.
    pub rescued: usize,
    /// Finite endpoints that merged with an earlier one.
    pub collisions: usize,
    /// Endpoints whose refinement failed or that are singular.
    pub rejected_endpoints: usize,
    pub conjugates_paired: bool,
    pub max_residual: f64,
    pub attempts: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyOutcome {
    pub real_count: u64,
    pub complex_count: u64,
    pub classes: Vec<Eigenclass>,
    pub zero_eigenvalue: bool,
    pub diagnostics: HomotopyDiagnostics,
}

impl HomotopyOutcome {
    /// A run is complete when it found exactly D(n, d) classes and the
    /// non-real ones close under conjugation.
    pub fn is_complete(&self, expected: u64) -> bool {
        self.complex_count == expected && self.diagnostics.conjugates_paired
    }
}

fn norm(x: &[C]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves a x = b in place (a row-major m×m) by partial pivoting; returns
/// the pivot-magnitude ratio or None when singular.
fn solve(a: &mut [C], b: &mut [C], m: usize) -> Option<f64> {
    let mut max_pivot: f64 = 0.0;
    let mut min_pivot = f64::INFINITY;
    for k in 0..m {
        let p = (k..m).max_by(|&i, &j| a[i * m + k].norm().total_cmp(&a[j * m + k].norm()))?;
        let pv = a[p * m + k].norm();
        if !(pv > 0.0) || !pv.is_finite() {
            return None;
        }
        max_pivot = max_pivot.max(pv);
        min_pivot = min_pivot.min(pv);
        if p != k {
            for c in 0..m {
                a.swap(k * m + c, p * m + c);
            }
            b.swap(k, p);
        }
        let inv = a[k * m + k].inv();
        for r in k + 1..m {
            let factor = a[r * m + k] * inv;
            if factor == C::new(0.0, 0.0) {
                continue;
            }
            for c in k..m {
                let t = a[k * m + c];
                a[r * m + c] -= factor * t;
            }
            let t = b[k];
            b[r] -= factor * t;
        }
    }
    for k in (0..m).rev() {
        let mut s = b[k];
        for c in k + 1..m {
            s -= a[k * m + c] * b[c];
        }
        b[k] = s / a[k * m + k];
    }
    Some(min_pivot / max_pivot)
}

struct System<'a> {
    f: &'a PolySystem,
    cfg: &'a HomotopyConfig,
    n: usize,
    e: u32,
}

impl System<'_> {
    /// Target value and Jacobian ((n+1)×(n+1), row-major).
    fn target(&self, x: &[C]) -> (Vec<C>, Vec<C>) {
        let n = self.n;
        let m = n + 1;
        let (v, lambda) = (&x[..n], x[n]);
        let (fv, jf) = self.f.eval_complex(v);
        let mut val = vec![C::new(0.0, 0.0); m];
        let mut jac = vec![C::new(0.0, 0.0); m * m];
        for i in 0..n {
            val[i] = fv[i] - lambda * v[i];
            for k in 0..n {
                jac[i * m + k] = jf[i * n + k];
            }
            jac[i * m + i] -= lambda;
            jac[i * m + n] = -v[i];
        }
        val[n] = C::new(-1.0, 0.0);
        for k in 0..n {
            val[n] += v[k] * self.cfg.chart[k];
            jac[n * m + k] = C::new(self.cfg.chart[k], 0.0);
        }
        (val, jac)
    }

    fn start(&self, x: &[C]) -> (Vec<C>, Vec<C>) {
        let n = self.n;
        let m = n + 1;
        let c = &self.cfg.start_constants;
        let mut val = vec![C::new(0.0, 0.0); m];
        let mut jac = vec![C::new(0.0, 0.0); m * m];
        let e = self.e as i32;
        for i in 0..n {
            let p = x[i].powi(e - 1);
            val[i] = p * x[i] - c[i];
            jac[i * m + i] = p * e as f64;
        }
        val[n] = x[n] - c[n];
        jac[n * m + n] = C::new(1.0, 0.0);
        (val, jac)
    }

    /// H(x, t), ∂H/∂x and ∂H/∂t.
    fn homotopy(&self, x: &[C], t: f64) -> (Vec<C>, Vec<C>, Vec<C>) {
        let (fv, fj) = self.target(x);
        let (gv, gj) = self.start(x);
        let g = self.cfg.gamma;
        let s = 1.0 - t;
        let h = fv.iter().zip(&gv).map(|(f, q)| g * q * s + f * t).collect();
        let hx = fj.iter().zip(&gj).map(|(f, q)| g * q * s + f * t).collect();
        let ht = fv.iter().zip(&gv).map(|(f, q)| f - g * q).collect();
        (h, hx, ht)
    }

    fn start_points(&self) -> Vec<Vec<C>> {
        let n = self.n;
        let e = self.e as usize;
        let roots: Vec<Vec<C>> = (0..n)
            .map(|i| {
                let c = self.cfg.start_constants[i];
                let r = c.norm().powf(1.0 / e as f64);
                let theta = c.arg();
                (0..e)
                    .map(|k| {
                        C::from_polar(
                            r,
                            (theta + 2.0 * std::f64::consts::PI * k as f64) / e as f64,
                        )
                    })
                    .collect()
            })
            .collect();
        let total = e.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let mut x = Vec::with_capacity(n + 1);
                for r in &roots {
                    x.push(r[idx % e]);
                    idx /= e;
                }
                x.push(self.cfg.start_constants[n]);
                x
            })
            .collect()
    }
}

enum PathEnd {
    Finished(Vec<C>),
    Diverged,
    Underflow(Vec<C>),
    StepLimit(Vec<C>),
}

fn track(sys: &System<'_>, mut x: Vec<C>) -> PathEnd {
    let cfg = sys.cfg;
    let m = sys.n + 1;
    let mut t = 0.0;
    let mut h = cfg.initial_step;
    let mut streak = 0;
    for _ in 0..cfg.max_steps {
        if t >= 1.0 {
            return PathEnd::Finished(x);
        }
        let step = h.min(1.0 - t);
        let t1 = if step >= 1.0 - t { 1.0 } else { t + step };
        // Euler predictor: H_x dx = −H_t
        let (_, mut hx, ht) = sys.homotopy(&x, t);
        let mut dx: Vec<C> = ht.iter().map(|v| -v).collect();
        let predicted = solve(&mut hx, &mut dx, m).map(|_| {
            x.iter()
                .zip(&dx)
                .map(|(a, b)| a + b * step)
                .collect::<Vec<C>>()
        });
        // Newton corrector at t1
        let mut accepted = None;
        if let Some(mut y) = predicted {
            for _ in 0..cfg.newton_iterations {
                let (hv, mut hxy, _) = sys.homotopy(&y, t1);
                let mut delta: Vec<C> = hv.iter().map(|v| -v).collect();
                if solve(&mut hxy, &mut delta, m).is_none() {
                    break;
                }
                y.iter_mut().zip(&delta).for_each(|(a, b)| *a += b);
                if norm(&delta) <= cfg.corrector_tolerance * (1.0 + norm(&y)) {
                    accepted = Some(y);
                    break;
                }
            }
        }
        match accepted {
            Some(y) => {
                x = y;
                t = t1;
                streak += 1;
                if streak >= 2 {
                    h = (2.0 * h).min(cfg.max_step);
                    streak = 0;
                }
                if norm(&x) > cfg.divergence_bound {
                    return PathEnd::Diverged;
                }
            }
            None => {
                streak = 0;
                h *= 0.5;
                if h < cfg.min_step {
                    return PathEnd::Underflow(x);
                }
            }
        }
    }
    if t >= 1.0 {
        PathEnd::Finished(x)
    } else {
        PathEnd::StepLimit(x)
    }
}

/// Newton on the target. Returns the refined point and its residual when it
/// converges to a finite nonsingular solution.
fn refine(sys: &System<'_>, mut x: Vec<C>) -> Option<(Vec<C>, f64)> {
    let cfg = sys.cfg;
    let m = sys.n + 1;
    let mut last_delta = f64::INFINITY;
    for _ in 0..30 {
        let (val, mut jac) = sys.target(&x);
        let scale = norm(&x).max(1.0).powi(sys.e as i32);
        let residual = norm(&val);
        if residual <= cfg.endpoint_residual * scale && last_delta <= 1e-10 * norm(&x).max(1.0) {
            let (_, mut jac_check) = sys.target(&x);
            let mut rhs = vec![C::new(0.0, 0.0); m];
            let ratio = solve(&mut jac_check, &mut rhs, m)?;
            return (ratio > 1e-13).then_some((x, residual / scale));
        }
        let mut delta: Vec<C> = val.iter().map(|v| -v).collect();
        solve(&mut jac, &mut delta, m)?;
        x.iter_mut().zip(&delta).for_each(|(a, b)| *a += b);
        last_delta = norm(&delta);
        if !last_delta.is_finite() || norm(&x) > cfg.divergence_bound {
            return None;
        }
    }
    None
}

fn distance(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

/// One homotopy run with a fixed configuration.
pub fn count_classes_homotopy(f: &PolySystem, cfg: &HomotopyConfig) -> Result<HomotopyOutcome> {
    let shape = f.shape();
    let n = shape.n() as usize;
    if n < 2 {
        return Err(Error::domain("homotopy counting needs n >= 2"));
    }
    cfg.validate(n)?;
    let sys = System {
        f,
        cfg,
        n,
        e: shape.d().max(2),
    };
    let mut diag = HomotopyDiagnostics::default();
    let mut found: Vec<Vec<C>> = Vec::new();
    for start in sys.start_points() {
        diag.paths += 1;
        let (x, unfinished) = match track(&sys, start) {
            PathEnd::Finished(x) => {
                diag.reached_end += 1;
                (x, false)
            }
            PathEnd::Diverged => {
                diag.diverged += 1;
                continue;
            }
            PathEnd::Underflow(x) => {
                diag.step_underflow += 1;
                (x, true)
            }
            PathEnd::StepLimit(x) => {
                diag.step_limit += 1;
                (x, true)
            }
        };
        match refine(&sys, x) {
            Some((y, residual)) => {
                if unfinished {
                    diag.rescued += 1;
                }
                let scale = norm(&y).max(1.0);
                if found
                    .iter()
                    .any(|z| distance(z, &y) < cfg.dedup_distance * scale)
                {
                    diag.collisions += 1;
                    continue;
                }
                diag.max_residual = diag.max_residual.max(residual);
                found.push(y);
            }
            None => diag.rejected_endpoints += 1,
        }
    }
    let is_real = |x: &[C]| {
        let scale = norm(x).max(1.0);
        x.iter()
            .all(|c| c.im.abs() < cfg.realness_threshold * scale)
    };
    diag.conjugates_paired = found.iter().filter(|x| !is_real(x)).all(|x| {
        let conj: Vec<C> = x.iter().map(|c| c.conj()).collect();
        let scale = norm(x).max(1.0);
        found
            .iter()
            .any(|y| distance(y, &conj) < cfg.dedup_distance * scale)
    });
    let mut classes = Vec::new();
    let mut zero_eigenvalue = false;
    for x in found.iter().filter(|x| is_real(x)) {
        let v: Vec<f64> = x[..n].iter().map(|c| c.re).collect();
        let class = Eigenclass::canonical(f, &v, x[n].re)?;
        zero_eigenvalue |= class.lambda.abs() < cfg.realness_threshold;
        classes.push(class);
    }
    classes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    diag.attempts = 1;
    Ok(HomotopyOutcome {
        real_count: classes.len() as u64,
        complex_count: found.len() as u64,
        classes,
        zero_eigenvalue,
        diagnostics: diag,
    })
}

/// Runs the homotopy with fresh random gamma, chart and start constants
/// until the run is complete, at most `attempts` times.
pub fn count_classes_homotopy_retrying<R: Rng + ?Sized>(
    f: &PolySystem,
    rng: &mut R,
    attempts: u32,
) -> Result<HomotopyOutcome> {
    let expected = dnd(f.shape())?;
    let n = f.shape().n() as usize;
    let mut last = None;
    for attempt in 1..=attempts.max(1) {
        let cfg = HomotopyConfig::random(n, rng);
        let mut out = count_classes_homotopy(f, &cfg)?;
        out.diagnostics.attempts = attempt;
        if out.is_complete(expected) {
            return Ok(out);
        }
        last = Some(out);
    }
    let out = last.expect("at least one attempt");
    Err(Error::Convergence(format!(
        "homotopy found {} of {expected} classes (conjugates paired: {}) after {} attempts",
        out.complex_count, out.diagnostics.conjugates_paired, out.diagnostics.attempts
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::ProblemShape;
    use crate::mc::poly::{contract, sample_bw_system};
    use crate::mc::sturm::count_classes_n2;
    use crate::rng::substream;

    #[test]
    fn config_validation() {
        let mut rng = substream(1, 0);
        let mut cfg = HomotopyConfig::random(3, &mut rng);
        assert!(cfg.validate(3).is_ok());
        assert!(cfg.validate(2).is_err());
        cfg.min_step = 0.5;
        assert!(cfg.validate(3).is_err());
    }

    #[test]
    fn diagonal_quadratic_system() {
        let s = ProblemShape::new(3, 2).unwrap();
        let f = PolySystem::from_terms(
            s,
            &[
                (0, vec![2, 0, 0], 1.0),
                (1, vec![0, 2, 0], 1.0),
                (2, vec![0, 0, 2], 1.0),
            ],
        )
        .unwrap();
        let out = count_classes_homotopy_retrying(&f, &mut substream(3, 0), 3).unwrap();
        assert_eq!(out.complex_count, 7);
        assert_eq!(out.real_count, 7);
        for c in &out.classes {
            assert!(c.residual < 1e-10);
            assert!((c.v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_cubic_finds_all_classes() {
        let s = ProblemShape::new(3, 3).unwrap();
        for seed in 0..5 {
            let mut rng = substream(seed, 0);
            let t = crate::mc::poly::GaussianTensor::sample(s, &mut rng).unwrap();
            let out = count_classes_homotopy_retrying(&contract(&t), &mut rng, 3).unwrap();
            assert_eq!(out.complex_count, 13);
            assert_eq!(out.real_count % 2, 1);
        }
    }

    #[test]
    fn agrees_with_sturm_in_two_variables() {
        for d in 1..=3 {
            let s = ProblemShape::new(2, d).unwrap();
            for seed in 0..20 {
                let f = sample_bw_system(s, seed);
                let out = count_classes_homotopy_retrying(&f, &mut substream(seed, 1), 3).unwrap();
                assert_eq!(
                    out.real_count,
                    count_classes_n2(&f).unwrap(),
                    "d={d} seed={seed}"
                );
            }
        }
    }
}
