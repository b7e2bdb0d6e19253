//! Small descriptive and paired-test statistics for sweep comparisons.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator); zero for fewer than two
/// samples.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Which way the paired difference `b − a` is expected to go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Greater,
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedTest {
    pub n: usize,
    pub mean_diff: f64,
    pub t: f64,
    pub p_value: f64,
}

/// One-sided paired t-test of `b − a` against zero.
///
/// A zero-variance difference yields p = 0 when the mean lies in the
/// claimed direction and p = 1 otherwise.
pub fn paired_t_test(a: &[f64], b: &[f64], tail: Tail) -> Result<PairedTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::EmptyAccumulation);
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let n = d.len();
    let m = mean(&d);
    let se = std_dev(&d) / (n as f64).sqrt();
    let signed = match tail {
        Tail::Greater => m,
        Tail::Less => -m,
    };
    if se == 0.0 {
        let p = if signed > 0.0 { 0.0 } else { 1.0 };
        return Ok(PairedTest {
            n,
            mean_diff: m,
            t: signed.signum() * f64::INFINITY,
            p_value: p,
        });
    }
    let t = m / se;
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("degrees of freedom >= 1");
    let p_value = match tail {
        Tail::Greater => 1.0 - dist.cdf(t),
        Tail::Less => dist.cdf(t),
    };
    Ok(PairedTest {
        n,
        mean_diff: m,
        t,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn descriptive() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert_eq!(mean(&xs), 5.0);
        assert_relative_eq!(std_dev(&xs), (32.0f64 / 7.0).sqrt(), max_relative = 1e-15);
        assert_eq!(std_dev(&[1.0]), 0.0);
    }

    #[test]
    fn t_test_matches_reference() {
        // Differences 1, 2, 3, 4, 5 -> mean 3, sd sqrt(2.5), t = 3 / (sqrt(2.5)/sqrt(5)) = 4.2426.
        let a = [0.0; 5];
        let b = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = paired_t_test(&a, &b, Tail::Greater).unwrap();
        assert_relative_eq!(r.t, 18.0f64.sqrt(), max_relative = 1e-12);
        // Upper tail of t(4) at 4.2426 is 0.0066178 (scipy.stats.t.sf).
        assert_relative_eq!(r.p_value, 0.006_617_799_781_841_3, max_relative = 1e-9);
        let l = paired_t_test(&a, &b, Tail::Less).unwrap();
        assert_relative_eq!(l.p_value, 1.0 - r.p_value, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let r = paired_t_test(&[1.0, 1.0], &[2.0, 2.0], Tail::Greater).unwrap();
        assert_eq!(r.p_value, 0.0);
        let r = paired_t_test(&[1.0, 1.0], &[1.0, 1.0], Tail::Greater).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(paired_t_test(&[1.0], &[1.0, 2.0], Tail::Less).is_err());
        assert!(paired_t_test(&[1.0], &[1.0], Tail::Less).is_err());
    }
}
