//! Pearson correlation and its two-sided Student-t significance test.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Coefficients for the Lanczos approximation (g = 7, n = 9).
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    incomplete_beta_xy(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` with `y = 1 - x` supplied separately so callers can avoid
/// cancellation when `x` is close to 1.
fn incomplete_beta_xy(a: f64, b: f64, x: f64, y: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        (ln_front.exp() * beta_continued_fraction(a, b, x) / a).clamp(0.0, 1.0)
    } else {
        (1.0 - ln_front.exp() * beta_continued_fraction(b, a, y) / b).clamp(0.0, 1.0)
    }
}

/// Continued fraction for the incomplete beta function, evaluated with the
/// modified Lentz method.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// CDF of Student's t distribution with `df` degrees of freedom.
///
/// Uses `P(T <= -|t|) = I_{df/(df+t²)}(df/2, 1/2) / 2`.
pub fn student_t_cdf(t: f64, df: u32) -> f64 {
    assert!(df >= 1, "degrees of freedom must be at least 1");
    if t.is_nan() {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 1.0;
    }
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    let nu = df as f64;
    let t2 = t * t;
    let lower_tail = if t2.is_infinite() {
        0.0
    } else {
        let denom = nu + t2;
        0.5 * incomplete_beta_xy(0.5 * nu, 0.5, nu / denom, t2 / denom)
    };
    if t > 0.0 {
        1.0 - lower_tail
    } else {
        lower_tail
    }
}

/// A labelled column of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleSeries {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        SampleSeries {
            label: label.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sample Pearson correlation coefficient (two-pass).
pub fn pearson_r(x: &SampleSeries, y: &SampleSeries) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(x.len()));
    }
    for s in [x, y] {
        if s.values.iter().all(|&v| v == s.values[0]) {
            return Err(Error::DegenerateSeries(s.label.clone()));
        }
    }

    let n = x.len() as f64;
    let mean_x = x.values.iter().sum::<f64>() / n;
    let mean_y = y.values.iter().sum::<f64>() / n;

    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.values.iter().zip(&y.values) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateSeries(x.label.clone()));
    }
    if syy == 0.0 {
        return Err(Error::DegenerateSeries(y.label.clone()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// `r·sqrt((n-2)/(1-r²))`, or `None` when `|r| = 1`.
pub fn t_statistic(r: f64, n: usize) -> Result<Option<f64>> {
    check_r_n(r, n)?;
    if r.abs() == 1.0 {
        return Ok(None);
    }
    Ok(Some(r * ((n - 2) as f64 / (1.0 - r * r)).sqrt()))
}

fn check_r_n(r: f64, n: usize) -> Result<()> {
    if r.is_nan() || r.abs() > 1.0 {
        return Err(Error::InvalidR(r));
    }
    if n < 3 {
        return Err(Error::InsufficientData(n));
    }
    Ok(())
}

/// Two-sided p-value of the t-test for zero correlation, `n - 2` degrees of
/// freedom.
pub fn p_value_two_sided(r: f64, n: usize) -> Result<f64> {
    match t_statistic(r, n)? {
        None => Ok(0.0),
        Some(t) => Ok((2.0 * student_t_cdf(-t.abs(), (n - 2) as u32)).clamp(0.0, 1.0)),
    }
}

/// Qualitative label for a correlation: strength by `|r|` (strong ≥ 0.7,
/// moderate ≥ 0.4, else weak), direction by sign, and a `not significant`
/// suffix when `p >= alpha`.
pub fn interpret(r: f64, p: f64, alpha: f64) -> String {
    let significant = p < alpha;
    if r == 0.0 {
        return if significant {
            "No correlation".into()
        } else {
            "No correlation, not significant".into()
        };
    }
    let strength = match r.abs() {
        a if a >= 0.7 => "Strong",
        a if a >= 0.4 => "Moderate",
        _ => "Weak",
    };
    let direction = if r > 0.0 { "positive" } else { "negative" };
    if significant {
        format!("{strength} {direction} correlation")
    } else {
        format!("{strength} {direction}, not significant")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub benchmark: String,
    pub r: f64,
    /// `None` when `|r| = 1`.
    pub t_statistic: Option<f64>,
    pub p_value: f64,
    pub n: usize,
    pub label: String,
}

/// Pearson r, t statistic, p-value and label for one pair of series.
pub fn correlate(x: &SampleSeries, y: &SampleSeries, alpha: f64) -> Result<CorrelationResult> {
    let r = pearson_r(x, y)?;
    let n = x.len();
    let p_value = p_value_two_sided(r, n)?;
    Ok(CorrelationResult {
        benchmark: y.label.clone(),
        r,
        t_statistic: t_statistic(r, n)?,
        p_value,
        n,
        label: interpret(r, p_value, alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(v: &[f64]) -> SampleSeries {
        SampleSeries::new("s", v.to_vec())
    }

    #[test]
    fn perfect_lines() {
        assert_eq!(
            pearson_r(&s(&[1.0, 2.0, 3.0]), &s(&[2.0, 4.0, 6.0])).unwrap(),
            1.0
        );
        assert_eq!(
            pearson_r(&s(&[1.0, 2.0, 3.0]), &s(&[3.0, 2.0, 1.0])).unwrap(),
            -1.0
        );
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson_r(&s(&[1.0, 2.0, 3.0]), &s(&[1.0, 2.0])),
            Err(Error::LengthMismatch(3, 2))
        ));
        assert!(matches!(
            pearson_r(&s(&[0.1, 0.1, 0.1]), &s(&[1.0, 2.0, 3.0])),
            Err(Error::DegenerateSeries(_))
        ));
        assert!(matches!(
            pearson_r(&s(&[1.0, 2.0]), &s(&[1.0, 2.0])),
            Err(Error::InsufficientData(2))
        ));
    }

    #[test]
    fn cdf_fixed_points() {
        for df in 1..40 {
            assert_eq!(student_t_cdf(0.0, df), 0.5);
            assert_eq!(student_t_cdf(f64::INFINITY, df), 1.0);
            assert_eq!(student_t_cdf(f64::NEG_INFINITY, df), 0.0);
        }
        assert_abs_diff_eq!(student_t_cdf(1.0, 1), 0.75, epsilon = 1e-14);
        // classical 97.5% quantile for df = 8
        assert_abs_diff_eq!(student_t_cdf(2.306, 8), 0.975, epsilon = 1e-5);
    }

    #[test]
    fn p_values() {
        assert_eq!(p_value_two_sided(0.0, 10).unwrap(), 1.0);
        assert_eq!(p_value_two_sided(1.0, 10).unwrap(), 0.0);
        assert_eq!(p_value_two_sided(-1.0, 5).unwrap(), 0.0);
        let p = p_value_two_sided(-0.7832, 10).unwrap();
        assert!((p - 0.0077).abs() <= 0.001, "p = {p}");
        assert!(matches!(
            p_value_two_sided(1.5, 10),
            Err(Error::InvalidR(_))
        ));
        assert!(matches!(
            p_value_two_sided(0.5, 2),
            Err(Error::InsufficientData(2))
        ));
    }

    #[test]
    fn t_statistic_sentinel() {
        assert_eq!(t_statistic(1.0, 10).unwrap(), None);
        let t = t_statistic(0.6, 10).unwrap().unwrap();
        assert_abs_diff_eq!(t, 0.6 * (8.0f64 / 0.64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn labels() {
        assert_eq!(
            interpret(-0.7832, 0.0077, 0.05),
            "Strong negative correlation"
        );
        assert_eq!(
            interpret(0.2145, 0.5520, 0.05),
            "Weak positive, not significant"
        );
        assert_eq!(interpret(0.0, 1.0, 0.05), "No correlation, not significant");
        assert_eq!(
            interpret(-0.6234, 0.054, 0.05),
            "Moderate negative, not significant"
        );
        assert_eq!(
            interpret(-0.6234, 0.054, 0.10),
            "Moderate negative correlation"
        );
        // boundaries
        assert_eq!(interpret(0.7, 0.01, 0.05), "Strong positive correlation");
        assert_eq!(interpret(0.4, 0.01, 0.05), "Moderate positive correlation");
        assert_eq!(
            interpret(0.399, 0.05, 0.05),
            "Weak positive, not significant"
        );
    }

    #[test]
    fn incomplete_beta_limits() {
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
        // I_x(1, 1) = x
        assert_abs_diff_eq!(
            regularized_incomplete_beta(1.0, 1.0, 0.3),
            0.3,
            epsilon = 1e-14
        );
        // I_x(a, 1) = x^a
        assert_abs_diff_eq!(
            regularized_incomplete_beta(2.5, 1.0, 0.6),
            0.6f64.powf(2.5),
            epsilon = 1e-14
        );
        // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
        let lhs = regularized_incomplete_beta(3.5, 0.5, 0.8);
        let rhs = 1.0 - regularized_incomplete_beta(0.5, 3.5, 0.2);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(5.0), 24f64.ln(), epsilon = 1e-13);
        assert_abs_diff_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-14
        );
    }
}
