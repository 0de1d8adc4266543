use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::poly::PolySystem;
use crate::error::{Error, Result};

/// Remainders smaller than this, relative to their dividend, mark the chain
/// as ill-conditioned and trigger exact recomputation.
const ILL_CONDITIONED: f64 = 1e-10;

fn trim(p: &mut Vec<f64>) {
    while p.last() == Some(&0.0) {
        p.pop();
    }
}

fn norm(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |m, c| m.max(c.abs()))
}

fn derivative<T: Clone>(p: &[T], mul: impl Fn(&T, usize) -> T) -> Vec<T> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| mul(c, k))
        .collect()
}

/// Remainder of a / b (ascending coefficients, b with nonzero leading
/// term), leading terms dropped exactly.
fn remainder_f64(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let top = r.len() - 1;
        let q = r[top] / lead;
        let shift = top - db;
        for (k, &c) in b.iter().enumerate().take(db) {
            r[shift + k] -= q * c;
        }
        r.pop();
    }
    r
}

fn remainder_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let top = r.len() - 1;
        let q = &r[top] / lead;
        let shift = top - db;
        for (k, c) in b.iter().enumerate().take(db) {
            r[shift + k] = &r[shift + k] - &q * c;
        }
        r.pop();
    }
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    r
}

/// Sign variations at +∞ and −∞ from the leading terms of a chain.
fn variations(chain: &[(i8, usize)]) -> usize {
    let count = |signs: Vec<i8>| signs.windows(2).filter(|w| w[0] != w[1]).count();
    let plus = chain.iter().map(|&(s, _)| s).collect();
    let minus = chain
        .iter()
        .map(|&(s, deg)| if deg % 2 == 1 { -s } else { s })
        .collect();
    count(minus) - count(plus)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Floating chain; None when ill-conditioned.
fn sturm_f64(p: &[f64]) -> Option<usize> {
    let mut prev: Vec<f64> = p.to_vec();
    let mut cur = derivative(p, |c, k| c * k as f64);
    trim(&mut cur);
    let mut chain = vec![(sign(prev[prev.len() - 1]), prev.len() - 1)];
    while !cur.is_empty() {
        let scale = norm(&cur);
        cur.iter_mut().for_each(|c| *c /= scale);
        chain.push((sign(cur[cur.len() - 1]), cur.len() - 1));
        if cur.len() == 1 {
            break;
        }
        let mut r = remainder_f64(&prev, &cur);
        r.iter_mut().for_each(|c| *c = -*c);
        trim(&mut r);
        if norm(&r) < ILL_CONDITIONED * norm(&prev) {
            return None;
        }
        prev = cur;
        cur = r;
    }
    Some(variations(&chain))
}

fn sturm_exact(p: &[f64]) -> usize {
    let to_exact = |c: &f64| {
        BigRational::from_float(*c).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    };
    let mut prev: Vec<BigRational> = p.iter().map(to_exact).collect();
    let mut cur = derivative(&prev, |c, k| c * BigRational::from_integer(BigInt::from(k)));
    while cur.last().is_some_and(|c| c.is_zero()) {
        cur.pop();
    }
    let sgn = |c: &BigRational| if c.is_positive() { 1 } else { -1 };
    let mut chain = vec![(sgn(&prev[prev.len() - 1]), prev.len() - 1)];
    while !cur.is_empty() {
        chain.push((sgn(&cur[cur.len() - 1]), cur.len() - 1));
        if cur.len() == 1 {
            break;
        }
        let r: Vec<BigRational> = remainder_exact(&prev, &cur)
            .into_iter()
            .map(|c| -c)
            .collect();
        prev = cur;
        cur = r;
    }
    variations(&chain)
}

/// Number of distinct real roots of Σ pₖ zᵏ (ascending coefficients) by the
/// sign variations of its Sturm chain at ∓∞. Runs in floating point and
/// falls back to exact rational arithmetic when a remainder nearly vanishes.
pub fn sturm_count(poly: &[f64]) -> Result<usize> {
    let mut p = poly.to_vec();
    if p.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("polynomial coefficients must be finite"));
    }
    trim(&mut p);
    if p.is_empty() {
        return Err(Error::Degenerate(
            "the zero polynomial has no finite root count".into(),
        ));
    }
    if p.len() == 1 {
        return Ok(0);
    }
    let scale = norm(&p);
    let scaled: Vec<f64> = p.iter().map(|c| c / scale).collect();
    // the exact path works on the caller's coefficients, not the rescaled
    // ones, whose rounding could split or merge close roots
    Ok(match sturm_f64(&scaled) {
        Some(c) => c,
        None => sturm_exact(&p),
    })
}

/// The binary form g(X) = f₁(X)X₂ − f₂(X)X₁ dehomogenized at X₁ = 1,
/// ascending in y = X₂/X₁; its degree-(d+1) coefficient is the X₂^d
/// coefficient of f₁.
pub fn binary_form(f: &PolySystem) -> Result<Vec<f64>> {
    let shape = f.shape();
    if shape.n() != 2 {
        return Err(Error::domain(format!(
            "binary form needs n = 2, got {shape}"
        )));
    }
    let d = shape.d();
    let mut g = vec![0.0; d as usize + 2];
    for (k, alpha) in f.monomials().iter().enumerate() {
        let b = alpha[1] as usize;
        g[b + 1] += f.coefficients(0)[k];
        g[b] -= f.coefficients(1)[k];
    }
    Ok(g)
}

/// Real eigenpair classes of a system in two variables: the real projective
/// roots of f₁(X)X₂ − f₂(X)X₁. Every real root is one class for either
/// parity of d, since t = −1 maps a pair into its own class.
pub fn count_classes_n2(f: &PolySystem) -> Result<u64> {
    let mut g = binary_form(f)?;
    if g.iter().all(|&c| c == 0.0) {
        return Err(Error::Degenerate(
            "binary form vanishes identically; every direction is an eigenvector".into(),
        ));
    }
    let at_infinity = g[g.len() - 1] == 0.0;
    trim(&mut g);
    Ok(sturm_count(&g)? as u64 + u64::from(at_infinity))
}
