//! Reference values computed once at 40 significant digits with an
//! independent arbitrary-precision implementation (mpmath `hyp2f1`,
//! `gammainc`, `betainc`, and quadrature of the determinant form as a
//! cross-check), frozen here as f64.
#![allow(dead_code, clippy::excessive_precision)]

use nalgebra::DMatrix;
use realeig::density::adaptive_simpson;

/// (n, d, E_{n,d})
pub const EXPECTED_COUNTS: &[(u32, u32, f64)] = &[
    (2, 1, std::f64::consts::SQRT_2),
    (2, 2, 1.732_050_807_568_877_3),
    (2, 3, 2.0),
    (3, 2, 2.632_993_161_855_452_1),
    (3, 3, 3.598_076_211_353_315_9),
    (4, 5, 12.485_593_550_019_811),
    (5, 4, 18.459_218_768_318_358),
    (7, 3, 33.048_437_171_591_221),
    (8, 2, 15.930_590_760_973_007),
    (12, 8, 99_081.118_783_586_929),
    (20, 2, 1_023.985_531_030_828_9),
    (30, 7, 1_938_183_870_306.265_9),
    (40, 1, 5.498_884_497_323_619_7),
    (50, 50, 4.257_474_626_813_616_1e41),
];

/// (n, d, E_{n,d}/√D(n,d))
pub const RATIOS: &[(u32, u32, f64)] = &[
    (10, 1, 0.925_912_840_561_024_37),
    (20, 1, 0.894_683_573_368_816_35),
    (40, 1, 0.869_449_980_086_635_55),
    (200, 1, 0.831_743_401_437_491_33),
    (10, 2, 0.998_900_045_147_536_43),
    (20, 2, 0.999_986_346_978_055_51),
    (40, 2, 0.999_999_998_019_281_96),
    (10, 3, 0.999_957_111_771_960_95),
    (20, 3, 0.999_999_977_363_185_92),
    (10, 5, 0.999_999_487_366_595_44),
    (3, 10, 0.999_902_439_808_584_50),
    (3, 100, 0.999_999_878_083_939_64),
    (4, 10, 0.999_971_258_921_774_21),
    (5, 10, 0.999_993_977_340_255_79),
];

/// (n, t, E|det(A + tI)|)
pub const ABS_DET: &[(u32, f64, f64)] = &[
    (1, 0.0, 0.797_884_560_802_865_36),
    (2, 0.0, 1.0),
    (3, 0.5, 1.808_192_249_140_000_7),
    (4, 2.0, 19.112_711_514_442_092),
    (10, 1.5, 2_910.796_960_292_896_3),
    (25, 3.0, 140_916_565_517_606.32),
];

pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Real roots of an ascending-coefficient polynomial from the eigenvalues of
/// its companion matrix.
pub fn companion_real_roots(p: &[f64]) -> usize {
    let deg = p.len() - 1;
    let lead = p[deg];
    let mut c = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        c[(i, deg - 1)] = -p[i] / lead;
    }
    c.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * z.re.abs().max(1.0))
        .count()
}

/// ∫_0^∞ x^{μ-1} e^{-βx} g(x) dx with x = u² to remove the endpoint
/// singularity.
pub fn mellin_integral(mu: f64, beta: f64, g: impl Fn(f64) -> f64) -> f64 {
    let upper = ((80.0 + 20.0 * mu) / beta).sqrt();
    adaptive_simpson(
        |u: f64| {
            if u == 0.0 {
                return if mu == 0.5 { 2.0 * g(0.0) } else { 0.0 };
            }
            let x = u * u;
            2.0 * u.powf(2.0 * mu - 1.0) * (-beta * x).exp() * g(x)
        },
        0.0,
        upper,
        64,
        1e-15,
    )
}
