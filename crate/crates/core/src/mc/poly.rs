use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::closedform::ProblemShape;
use crate::error::{Error, Result};
use crate::rng::substream;

/// Exponent vectors α ∈ ℕⁿ with |α| = d in lexicographically descending
/// order (X₁^d first).
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn fill(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            fill(prefix, n, left - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        fill(&mut Vec::with_capacity(n), n, d, &mut out);
    }
    out
}

/// The multinomial coefficient d!/(α₁!⋯αₙ!).
pub fn multinomial(alpha: &[u32]) -> f64 {
    let mut total = 0u32;
    let mut acc = 1.0;
    for &a in alpha {
        for k in 1..=a {
            total += 1;
            acc = acc * total as f64 / k as f64;
        }
    }
    acc
}

/// n homogeneous degree-d forms in n variables with dense monomial
/// coefficients. Row j holds the coefficients of f_j in the order of
/// [`monomials`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    shape: ProblemShape,
    monomials: Vec<Vec<u32>>,
    coeffs: Vec<f64>,
}

impl PolySystem {
    /// All-zero system of the given shape.
    pub fn zeros(shape: ProblemShape) -> Self {
        let monomials = monomials(shape.n() as usize, shape.d());
        let coeffs = vec![0.0; shape.n() as usize * monomials.len()];
        PolySystem {
            shape,
            monomials,
            coeffs,
        }
    }

    /// Builds a system from (polynomial, exponent vector, coefficient)
    /// triples; repeated entries add up.
    pub fn from_terms(shape: ProblemShape, terms: &[(usize, Vec<u32>, f64)]) -> Result<Self> {
        let mut sys = Self::zeros(shape);
        for (j, alpha, c) in terms {
            let k = sys.monomial_index(alpha).ok_or_else(|| {
                Error::domain(format!(
                    "exponent {alpha:?} is not a degree-{} monomial",
                    shape.d()
                ))
            })?;
            if *j >= shape.n() as usize {
                return Err(Error::domain(format!("polynomial index {j} out of range")));
            }
            sys.coeffs[*j * sys.monomials.len() + k] += c;
        }
        Ok(sys)
    }

    pub fn shape(&self) -> ProblemShape {
        self.shape
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn monomial_index(&self, alpha: &[u32]) -> Option<usize> {
        self.monomials.iter().position(|m| m == alpha)
    }

    /// Monomial coefficients of f_j.
    pub fn coefficients(&self, j: usize) -> &[f64] {
        let m = self.monomials.len();
        &self.coeffs[j * m..(j + 1) * m]
    }

    pub fn coefficient(&self, j: usize, alpha: &[u32]) -> Option<f64> {
        self.monomial_index(alpha)
            .map(|k| self.coeffs[j * self.monomials.len() + k])
    }

    /// Coefficients of f_j in the Bombieri–Weyl basis √binom(d,α)·X^α.
    pub fn bw_coefficients(&self, j: usize) -> Vec<f64> {
        self.coefficients(j)
            .iter()
            .zip(&self.monomials)
            .map(|(c, a)| c / multinomial(a).sqrt())
            .collect()
    }

    fn powers<T: Copy + std::ops::Mul<Output = T>>(&self, v: &[T], one: T) -> Vec<Vec<T>> {
        let d = self.shape.d() as usize;
        v.iter()
            .map(|&x| {
                let mut p = Vec::with_capacity(d + 1);
                p.push(one);
                for k in 0..d {
                    p.push(p[k] * x);
                }
                p
            })
            .collect()
    }

    /// f(v) over the reals.
    pub fn eval(&self, v: &[f64]) -> Vec<f64> {
        let pw = self.powers(v, 1.0);
        let mono: Vec<f64> = self
            .monomials
            .iter()
            .map(|a| {
                a.iter()
                    .enumerate()
                    .map(|(i, &e)| pw[i][e as usize])
                    .product()
            })
            .collect();
        (0..self.shape.n() as usize)
            .map(|j| {
                self.coefficients(j)
                    .iter()
                    .zip(&mono)
                    .map(|(c, m)| c * m)
                    .sum()
            })
            .collect()
    }

    /// f(v) and its Jacobian (row-major n×n) over ℂ.
    pub fn eval_complex(&self, v: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.shape.n() as usize;
        let one = Complex64::new(1.0, 0.0);
        let pw = self.powers(v, one);
        let mut value = vec![Complex64::new(0.0, 0.0); n];
        let mut jac = vec![Complex64::new(0.0, 0.0); n * n];
        for (k, alpha) in self.monomials.iter().enumerate() {
            let mono: Complex64 = alpha
                .iter()
                .enumerate()
                .map(|(i, &e)| pw[i][e as usize])
                .product();
            // ∂/∂v_i of v^α
            let grads: Vec<Complex64> = (0..n)
                .map(|i| {
                    if alpha[i] == 0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let mut g = Complex64::new(alpha[i] as f64, 0.0);
                    for (l, &e) in alpha.iter().enumerate() {
                        let e = if l == i { e - 1 } else { e };
                        g *= pw[l][e as usize];
                    }
                    g
                })
                .collect();
            for j in 0..n {
                let c = self.coeffs[j * self.monomials.len() + k];
                if c == 0.0 {
                    continue;
                }
                value[j] += mono * c;
                for i in 0..n {
                    jac[j * n + i] += grads[i] * c;
                }
            }
        }
        (value, jac)
    }
}

/// An order-(d+1) tensor with iid N(0,1) entries, stored row-major in the
/// index order (i₀, …, i_d).
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTensor {
    shape: ProblemShape,
    entries: Vec<f64>,
}

/// Refuse tensors beyond this many entries; the counting backends are
/// desk-scale anyway.
const MAX_TENSOR_ENTRIES: u64 = 1 << 28;

fn tensor_len(shape: ProblemShape) -> Result<usize> {
    (shape.n() as u64)
        .checked_pow(shape.d() + 1)
        .filter(|&l| l <= MAX_TENSOR_ENTRIES)
        .map(|l| l as usize)
        .ok_or_else(|| Error::Overflow(format!("tensor of shape {shape} is too large")))
}

impl GaussianTensor {
    pub fn from_entries(shape: ProblemShape, entries: Vec<f64>) -> Result<Self> {
        let len = tensor_len(shape)?;
        if entries.len() != len {
            return Err(Error::domain(format!(
                "tensor of shape {shape} needs {len} entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::domain("tensor entries must be finite"));
        }
        Ok(GaussianTensor { shape, entries })
    }

    pub fn sample<R: Rng + ?Sized>(shape: ProblemShape, rng: &mut R) -> Result<Self> {
        let len = tensor_len(shape)?;
        let entries = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        Ok(GaussianTensor { shape, entries })
    }

    pub fn shape(&self) -> ProblemShape {
        self.shape
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// A gaussian tensor drawn from substream 0 of `seed`.
pub fn sample_gaussian_tensor(shape: ProblemShape, seed: u64) -> Result<GaussianTensor> {
    GaussianTensor::sample(shape, &mut substream(seed, 0))
}

/// The contraction f_A(X) = A X^d: the coefficient of X^α in f_j is the sum
/// of A_{j,i₁…i_d} over index tuples whose counts equal α.
pub fn contract(t: &GaussianTensor) -> PolySystem {
    let shape = t.shape;
    let n = shape.n() as usize;
    let d = shape.d() as usize;
    let mut sys = PolySystem::zeros(shape);
    let index: HashMap<&[u32], usize> = sys
        .monomials
        .iter()
        .enumerate()
        .map(|(k, a)| (a.as_slice(), k))
        .collect();
    let block = n.pow(d as u32);
    let mut tuple = vec![0usize; d];
    let mut alpha = vec![0u32; n];
    let mut slot = vec![0usize; block];
    for (pos, s) in slot.iter_mut().enumerate() {
        let mut rest = pos;
        for k in (0..d).rev() {
            tuple[k] = rest % n;
            rest /= n;
        }
        alpha.iter_mut().for_each(|a| *a = 0);
        for &i in &tuple {
            alpha[i] += 1;
        }
        *s = index[alpha.as_slice()];
    }
    let m = sys.monomials.len();
    for j in 0..n {
        for (pos, &k) in slot.iter().enumerate() {
            sys.coeffs[j * m + k] += t.entries[j * block + pos];
        }
    }
    sys
}

/// A system whose Bombieri–Weyl coefficients are iid N(0,1), drawn from
/// `rng`.
pub fn sample_bw_system_from<R: Rng + ?Sized>(shape: ProblemShape, rng: &mut R) -> PolySystem {
    let mut sys = PolySystem::zeros(shape);
    let scales: Vec<f64> = sys
        .monomials
        .iter()
        .map(|a| multinomial(a).sqrt())
        .collect();
    let m = scales.len();
    for (i, c) in sys.coeffs.iter_mut().enumerate() {
        let z: f64 = rng.sample(StandardNormal);
        *c = z * scales[i % m];
    }
    sys
}

/// A Bombieri–Weyl gaussian system drawn from substream 0 of `seed`.
pub fn sample_bw_system(shape: ProblemShape, seed: u64) -> PolySystem {
    sample_bw_system_from(shape, &mut substream(seed, 0))
}
