use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kernel::f_density;
use crate::closedform::{ExpectationValue, ProblemShape, Route};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussHermite,
    AdaptiveSimpson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    node_count: u32,
    pub scheme: Scheme,
}

impl QuadratureConfig {
    pub fn new(node_count: u32, scheme: Scheme) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::domain(format!(
                "quadrature needs at least 2 nodes, got {node_count}"
            )));
        }
        Ok(QuadratureConfig { node_count, scheme })
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            node_count: 200,
            scheme: Scheme::GaussHermite,
        }
    }
}

/// Physicists' Hermite recurrence in orthonormal form at `x`, rescaled to
/// stay in range. Returns (p_m, p_{m-1}, ln scale) with the true values
/// equal to the returned ones times e^{scale}.
fn hermite_orthonormal(m: usize, x: f64) -> (f64, f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    let mut scale = 0.0;
    for j in 1..=m {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = x * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
        if p1.abs() > 1e150 {
            p1 *= 1e-150;
            p2 *= 1e-150;
            scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (p1, p2, scale)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (off[i] couples i and i+1) by implicit QL.
fn tridiagonal_eigenvalues(mut diag: Vec<f64>, off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Convergence("tridiagonal QL did not converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Gauss–Hermite nodes and weights for the weight e^{-x²}, ascending.
/// Nodes start as eigenvalues of the Jacobi matrix and are polished by
/// Newton on the orthonormal recurrence; weights are computed in log form
/// so the extreme ones underflow gracefully to zero.
pub fn gauss_hermite(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m < 2 {
        return Err(Error::domain("Gauss–Hermite needs at least 2 nodes"));
    }
    let mf = m as f64;
    let off: Vec<f64> = (1..m).map(|k| (0.5 * k as f64).sqrt()).collect();
    let mut x = tridiagonal_eigenvalues(vec![0.0; m], &off)?;
    let mut w = vec![0.0; m];
    for i in m / 2..m {
        let mut z = x[i];
        let mut deriv = 0.0;
        let mut scale = 0.0;
        for _ in 0..8 {
            let (p1, p2, s) = hermite_orthonormal(m, z);
            deriv = (2.0 * mf).sqrt() * p2;
            scale = s;
            let step = p1 / deriv;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        if m % 2 == 1 && i == m / 2 {
            z = 0.0;
        }
        x[i] = z;
        x[m - 1 - i] = -z;
        w[i] = (std::f64::consts::LN_2 - 2.0 * (deriv.abs().ln() + scale)).exp();
        w[m - 1 - i] = w[i];
    }
    Ok((x, w))
}

/// E g(λ) for λ ~ N(0,1) by m-node Gauss–Hermite with weight
/// renormalization.
pub fn normal_expectation<G>(g: G, m: usize) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let (x, w) = gauss_hermite(m)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        if *wi == 0.0 {
            continue;
        }
        num += wi * g(std::f64::consts::SQRT_2 * xi)?;
        den += wi;
    }
    Ok(num / den)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm);
    let frm = g(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // integrands evaluated through exp(ln ·) carry noise of several ulps;
    // refining below it only recurses to the depth limit
    let floor = 1e-13 * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
        return left + right + delta / 15.0;
    }
    simpson_step(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// ∫_a^b g by adaptive Simpson over `panels` equal starting panels with
/// absolute tolerance `tol` per panel, never tighter than 1e-13 relative.
pub fn adaptive_simpson<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, panels: u32, tol: f64) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == panels { b } else { lo + h };
        let fa = g(lo);
        let fb = g(hi);
        let fm = g(0.5 * (lo + hi));
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_step(&g, lo, hi, fa, fm, fb, whole, tol, 24);
    }
    total
}

fn quadrature_value(shape: ProblemShape, scheme: Scheme, nodes: u32) -> Result<f64> {
    let m = shape.n() - 1;
    let d = shape.d();
    match scheme {
        Scheme::GaussHermite => normal_expectation(|l| f_density(m, d, l), nodes as usize),
        Scheme::AdaptiveSimpson => {
            // the integrand is even and decays at least like |λ|^{2n} e^{-λ²/2}
            let upper = 12.0 + 2.0 * (shape.n() as f64).sqrt();
            let failed = std::cell::Cell::new(None);
            let g = |l: f64| match f_density(m, d, l) {
                Ok(v) => v * (-0.5 * l * l).exp() / (2.0 * PI).sqrt(),
                Err(e) => {
                    failed.set(Some(e.to_string()));
                    0.0
                }
            };
            let v = 2.0 * adaptive_simpson(g, 0.0, upper, nodes, 1e-14);
            match failed.into_inner() {
                Some(msg) => Err(Error::Convergence(msg)),
                None => Ok(v),
            }
        }
    }
}

/// E_{n,d} as E_{λ~N(0,1)} F_{n-1,d}(λ). Logs a warning when doubling the
/// node count moves the result by more than 1e-10 relative.
pub fn expected_count_quadrature(
    shape: ProblemShape,
    cfg: QuadratureConfig,
) -> Result<ExpectationValue> {
    if shape.n() == 1 {
        return ExpectationValue::new(1.0, Route::Quadrature, shape);
    }
    let value = quadrature_value(shape, cfg.scheme, cfg.node_count)?;
    let refined = quadrature_value(shape, cfg.scheme, cfg.node_count.saturating_mul(2))?;
    let change = ((refined - value) / refined).abs();
    if change > 1e-10 {
        log::warn!(
            "quadrature for E{shape} not converged: doubling {} nodes changed the result by {change:.3e}",
            cfg.node_count
        );
    }
    ExpectationValue::new(value, Route::Quadrature, shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_count_validated() {
        assert!(QuadratureConfig::new(1, Scheme::GaussHermite).is_err());
        assert_eq!(QuadratureConfig::default().node_count(), 200);
    }

    #[test]
    fn hermite_rule_moments() {
        for m in [2usize, 3, 10, 51, 200, 400, 800] {
            let (x, w) = gauss_hermite(m).unwrap();
            let sum: f64 = w.iter().sum();
            assert!((sum - PI.sqrt()).abs() < 1e-12, "m={m} sum={sum}");
            let second: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            assert!((second - 0.5 * PI.sqrt()).abs() < 1e-12, "m={m}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn normal_moments() {
        let v = normal_expectation(|l| Ok(l.powi(4)), 20).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
    }

    #[test]
    fn simpson_integrates_gaussian() {
        let v = adaptive_simpson(|x| (-x * x).exp(), -10.0, 10.0, 8, 1e-14);
        assert!((v - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_known_values() {
        let cfg = QuadratureConfig::default();
        let s = ProblemShape::new(2, 2).unwrap();
        assert!((expected_count_quadrature(s, cfg).unwrap().value - 3f64.sqrt()).abs() < 1e-12);
        let s = ProblemShape::new(1, 4).unwrap();
        assert_eq!(expected_count_quadrature(s, cfg).unwrap().value, 1.0);
        let simpson = QuadratureConfig::new(16, Scheme::AdaptiveSimpson).unwrap();
        let s = ProblemShape::new(3, 3).unwrap();
        let v = expected_count_quadrature(s, simpson).unwrap().value;
        assert!((v - 3.598_076_211_353_316).abs() < 1e-10);
    }
}
