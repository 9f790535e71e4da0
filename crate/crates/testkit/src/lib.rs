//! Reference computations for tests. Nothing here calls into the library
//! under test; every routine takes a different route to the same quantity.

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

/// `Γ((ν+1)/2) / Γ(ν/2)` for integer `ν`, from the exact values at 1 and 2
/// and the recurrence `R(ν+2) = R(ν)·(ν+1)/ν`.
fn gamma_half_ratio(df: u32) -> f64 {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let (mut nu, mut ratio) = if df % 2 == 1 {
        (1u32, 1.0 / sqrt_pi)
    } else {
        (2u32, sqrt_pi / 2.0)
    };
    while nu < df {
        ratio *= (nu as f64 + 1.0) / nu as f64;
        nu += 2;
    }
    ratio
}

/// Student-t density with `df` degrees of freedom.
pub fn t_density(x: f64, df: u32) -> f64 {
    let nu = df as f64;
    let norm = gamma_half_ratio(df) / (nu * std::f64::consts::PI).sqrt();
    norm * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
        + adaptive(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    adaptive(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// Student-t CDF by integrating the density from 0.
pub fn t_cdf_quadrature(t: f64, df: u32) -> f64 {
    let half = integrate(&|x| t_density(x, df), 0.0, t.abs(), 1e-15);
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Two-sided p-value for a correlation of `r` over `n` pairs, by quadrature.
pub fn p_value_quadrature(r: f64, n: usize) -> f64 {
    let df = (n - 2) as u32;
    let t = r * ((n - 2) as f64 / (1.0 - r * r)).sqrt();
    2.0 * (0.5 - integrate(&|x| t_density(x, df), 0.0, t.abs(), 1e-15))
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite input")
}

/// Pearson r with every sum formed exactly over the rationals (the inputs'
/// exact binary values); only the final square root is rounded.
pub fn pearson_exact(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = BigRational::from_integer(BigInt::from(xs.len()));
    let xr: Vec<BigRational> = xs.iter().map(|&v| exact(v)).collect();
    let yr: Vec<BigRational> = ys.iter().map(|&v| exact(v)).collect();
    let mx = xr.iter().fold(BigRational::zero(), |acc, v| acc + v) / &n;
    let my = yr.iter().fold(BigRational::zero(), |acc, v| acc + v) / &n;
    let mut sxy = BigRational::zero();
    let mut sxx = BigRational::zero();
    let mut syy = BigRational::zero();
    for (x, y) in xr.iter().zip(&yr) {
        let dx = x - &mx;
        let dy = y - &my;
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    let r2 = (&sxy * &sxy) / (sxx * syy);
    let magnitude = r2.to_f64().expect("representable").sqrt();
    if sxy.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Largest `b_i·b_j / (c_ij + ε)` over all ordered pairs `i != j`.
/// `components` holds `(base value, manufacturer index)`.
pub fn brute_force_machine_entropy(
    components: &[(f64, usize)],
    scores: &[Vec<f64>],
    epsilon: f64,
) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (i, &(bi, mi)) in components.iter().enumerate() {
        for (j, &(bj, mj)) in components.iter().enumerate() {
            if i != j {
                best = best.max(bi * bj / (scores[mi][mj] + epsilon));
            }
        }
    }
    best
}
