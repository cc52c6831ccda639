//! Paired Student's t-test with an in-crate t distribution.
//!
//! The CDF goes through the regularized incomplete beta function,
//! `P(|T| >= t) = I_{ν/(ν+t²)}(ν/2, 1/2)`, evaluated by its continued
//! fraction with the modified Lentz method.

use serde::{Deserialize, Serialize};

use crate::error::{CbppError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
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
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
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

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

/// CDF of Student's t distribution with `dof` degrees of freedom.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let x = dof / (dof + t * t);
    let tail = 0.5 * regularized_incomplete_beta(x, dof / 2.0, 0.5);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TTestVariant {
    PairedTwoTailed,
    /// Half the two-tailed p-value: the test in the direction of the
    /// observed mean difference.
    PairedOneTailed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t_stat: f64,
    pub dof: usize,
    pub p_value: f64,
    pub variant: TTestVariant,
    /// All paired differences were equal; `t` is 0 or infinite.
    pub zero_variance: bool,
}

/// Paired t-test on `sample_a - sample_b`.
pub fn paired_t_test(sample_a: &[f64], sample_b: &[f64], variant: TTestVariant) -> Result<TTestResult> {
    if sample_a.len() != sample_b.len() {
        return Err(CbppError::InvalidSample(format!(
            "paired samples differ in length: {} vs {}",
            sample_a.len(),
            sample_b.len()
        )));
    }
    let n = sample_a.len();
    if n < 2 {
        return Err(CbppError::InvalidSample(format!(
            "paired t-test needs at least 2 pairs, got {n}"
        )));
    }
    let diffs: Vec<f64> = sample_a.iter().zip(sample_b).map(|(a, b)| a - b).collect();
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let dof = n - 1;

    let scale = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1.0);
    if var.sqrt() <= 1e-14 * scale {
        let (t_stat, p_two) = if mean.abs() <= 1e-14 * scale {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        };
        let p_value = match variant {
            TTestVariant::PairedTwoTailed => p_two,
            TTestVariant::PairedOneTailed => p_two / 2.0,
        };
        return Ok(TTestResult {
            t_stat,
            dof,
            p_value,
            variant,
            zero_variance: true,
        });
    }

    let t_stat = mean / (var / nf).sqrt();
    let d = dof as f64;
    let p_two = regularized_incomplete_beta(d / (d + t_stat * t_stat), d / 2.0, 0.5);
    let p_value = match variant {
        TTestVariant::PairedTwoTailed => p_two,
        TTestVariant::PairedOneTailed => p_two / 2.0,
    };
    Ok(TTestResult {
        t_stat,
        dof,
        p_value: p_value.clamp(0.0, 1.0),
        variant,
        zero_variance: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.5) - 1_133_278.388_948_785_4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x, I_x(a, 1) = x^a, I_x(1, b) = 1 - (1-x)^b
        for &x in &[0.01, 0.2, 0.5, 0.77, 0.99] {
            assert!((regularized_incomplete_beta(x, 1.0, 1.0) - x).abs() < 1e-14);
            assert!((regularized_incomplete_beta(x, 3.0, 1.0) - x.powi(3)).abs() < 1e-14);
            assert!(
                (regularized_incomplete_beta(x, 1.0, 4.0) - (1.0 - (1.0 - x).powi(4))).abs() < 1e-14
            );
        }
        assert_eq!(regularized_incomplete_beta(0.0, 2.0, 3.0), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0, 2.0, 3.0), 1.0);
    }

    #[test]
    fn cauchy_is_t_with_one_dof() {
        for &t in &[-10.0, -1.0, 0.0, 0.3, 2.0, 7.5] {
            let exact = 0.5 + f64::atan(t) / std::f64::consts::PI;
            assert!((student_t_cdf(t, 1.0) - exact).abs() < 1e-14, "t = {t}");
        }
    }

    #[test]
    fn t_test_edge_cases() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let same = paired_t_test(&a, &a, TTestVariant::PairedTwoTailed).unwrap();
        assert_eq!(same.t_stat, 0.0);
        assert_eq!(same.p_value, 1.0);
        assert!(same.zero_variance);

        let shifted: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let r = paired_t_test(&shifted, &a, TTestVariant::PairedTwoTailed).unwrap();
        assert!(r.t_stat.is_infinite() && r.t_stat > 0.0);
        assert_eq!(r.p_value, 0.0);
        assert!(r.zero_variance);

        assert!(paired_t_test(&[1.0], &[2.0], TTestVariant::PairedTwoTailed).is_err());
        assert!(paired_t_test(&[1.0, 2.0], &[2.0], TTestVariant::PairedTwoTailed).is_err());
    }

    #[test]
    fn swapping_samples_flips_t_and_keeps_p() {
        let a = [0.3, 1.2, -0.4, 2.2, 0.9, 1.7];
        let b = [0.1, 0.4, 0.2, 1.0, 1.1, 0.5];
        let ab = paired_t_test(&a, &b, TTestVariant::PairedTwoTailed).unwrap();
        let ba = paired_t_test(&b, &a, TTestVariant::PairedTwoTailed).unwrap();
        assert!((ab.t_stat + ba.t_stat).abs() < 1e-14);
        assert!((ab.p_value - ba.p_value).abs() < 1e-15);
        let one = paired_t_test(&a, &b, TTestVariant::PairedOneTailed).unwrap();
        assert!((one.p_value * 2.0 - ab.p_value).abs() < 1e-15);
    }

    #[test]
    fn p_value_is_monotone_in_t() {
        let mut last = 1.0;
        for i in 0..60 {
            let t = i as f64 * 0.25;
            let p = regularized_incomplete_beta(12.0 / (12.0 + t * t), 6.0, 0.5);
            assert!(p <= last);
            last = p;
        }
    }
}
