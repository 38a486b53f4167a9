//! F-distribution upper-tail probabilities, built from first principles.
//!
//! The only consumer is the causality F-test, which needs
//! `P(F_{d1,d2} > stat)`. That reduces to the regularized incomplete beta
//! function, evaluated here with a Lentz-style continued fraction and a
//! Lanczos log-gamma prefactor. No stats crate is involved, so results are
//! identical across platforms.

use crate::error::{Error, Result};

/// Degrees of freedom of an F distribution.
///
/// For the lag-`p` causality test, `d1 = p` and `d2 = n_eff - 2p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FParams {
    pub d1: u32,
    pub d2: u32,
}

impl FParams {
    pub fn new(d1: u32, d2: u32) -> Self {
        debug_assert!(d1 >= 1 && d2 >= 1);
        FParams { d1, d2 }
    }
}

/// Natural log of the gamma function, Lanczos approximation (g = 7, n = 9).
///
/// Relative accuracy is better than 1e-13 on (0.5, 200), the full range the
/// F-test can produce. Arguments below 0.5 go through the reflection formula.
#[allow(clippy::excessive_precision)]
pub fn ln_gamma(z: f64) -> f64 {
    // Lanczos coefficients for g = 7.
    const COEFFS: [f64; 9] = [
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
    const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

    if z < 0.5 {
        // ln Γ(z) = ln(π / sin(πz)) − ln Γ(1 − z)
        let s = (std::f64::consts::PI * z).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        return std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - z);
    }

    let z = z - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    (z + 0.5) * t.ln() - t + (SQRT_TWO_PI * acc).ln()
}

/// Regularized incomplete beta function I_x(a, b).
///
/// Continued fraction (modified Lentz), with the usual symmetry switch at
/// `x > (a + 1) / (a + b + 2)` so the fraction always converges quickly.
/// Errors with `NonConvergence` if 300 iterations are not enough.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::InvalidProbability(x));
    }
    debug_assert!(a > 0.0 && b > 0.0);
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }

    if x > (a + 1.0) / (a + b + 2.0) {
        return Ok(1.0 - regularized_incomplete_beta(1.0 - x, b, a)?);
    }

    // Front factor x^a (1-x)^b / (a B(a, b)), assembled in log space.
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta).exp();

    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-30;

    let mut c = 1.0;
    let mut d = 0.0;
    let mut f = 1.0;

    let mut converged = false;
    for m in 0..MAX_ITER {
        let m_f = m as f64;

        // Odd-step coefficient d_{2m+1}.
        let num = -(a + m_f) * (a + b + m_f) * x / ((a + 2.0 * m_f) * (a + 2.0 * m_f + 1.0));
        let delta = lentz_step(num, &mut c, &mut d, TINY);
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            converged = true;
            break;
        }

        // Even-step coefficient d_{2m+2}.
        let num =
            (m_f + 1.0) * (b - m_f - 1.0) * x / ((a + 2.0 * m_f + 1.0) * (a + 2.0 * m_f + 2.0));
        let delta = lentz_step(num, &mut c, &mut d, TINY);
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { x, a, b });
    }

    Ok((front / (f * a)).clamp(0.0, 1.0))
}

fn lentz_step(num: f64, c: &mut f64, d: &mut f64, tiny: f64) -> f64 {
    *d = 1.0 + num * *d;
    if d.abs() < tiny {
        *d = tiny;
    }
    *d = 1.0 / *d;
    *c = 1.0 + num / *c;
    if c.abs() < tiny {
        *c = tiny;
    }
    *c * *d
}

/// Upper-tail probability P(F_{d1,d2} > stat).
///
/// Computed as I_{d2/(d2 + d1·stat)}(d2/2, d1/2). Results are clamped to
/// [0, 1]; anything below 1e-300 reports 0.0.
pub fn f_sf(stat: f64, params: FParams) -> Result<f64> {
    if !stat.is_finite() || stat < 0.0 {
        return Err(Error::InvalidStatistic(stat));
    }
    if stat == 0.0 {
        return Ok(1.0);
    }
    let d1 = f64::from(params.d1);
    let d2 = f64::from(params.d2);
    let x = d2 / (d2 + d1 * stat);
    let p = regularized_incomplete_beta(x, d2 / 2.0, d1 / 2.0)?;
    if p < 1e-300 {
        return Ok(0.0);
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 50 decimal digits.

    #[test]
    fn ln_gamma_reference_values() {
        let cases = [
            (0.5, 0.572364942924700087),
            (1.0, 0.0),
            (1.5, -0.120782237635245222),
            (5.0, 3.17805383034794562),
            (38.5, 101.146116155864569),
            (77.0, 256.221135550009525),
            (200.0, 857.933669825857437),
        ];
        for (z, want) in cases {
            let got = ln_gamma(z);
            let rel = if want == 0.0 {
                got.abs()
            } else {
                ((got - want) / want).abs()
            };
            assert!(rel < 1e-13, "ln_gamma({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn beta_endpoints() {
        assert_eq!(regularized_incomplete_beta(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0, 2.0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn beta_uniform_case_is_identity() {
        for x in [0.25, 0.5, 0.9] {
            let got = regularized_incomplete_beta(x, 1.0, 1.0).unwrap();
            assert!((got - x).abs() < 1e-14, "I_{x}(1,1) = {got}");
        }
    }

    #[test]
    fn beta_symmetric_median() {
        let got = regularized_incomplete_beta(0.5, 3.0, 3.0).unwrap();
        assert!((got - 0.5).abs() < 1e-13);
    }

    #[test]
    fn beta_reference_values() {
        let cases = [
            (0.3, 2.5, 3.5, 0.296752989295666378),
            (0.7, 0.5, 0.5, 0.630989880434454586),
            (0.05, 10.0, 2.0, 1.02539062500000057e-12),
            (0.99, 3.0, 7.0, 0.999999999999646272),
            (0.5, 38.5, 1.0, 2.57243948430749706e-12),
        ];
        for (x, a, b, want) in cases {
            let got = regularized_incomplete_beta(x, a, b).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-13, "I_{x}({a},{b}) = {got}, want {want}");
        }
    }

    #[test]
    fn beta_rejects_bad_x() {
        assert!(matches!(
            regularized_incomplete_beta(-0.1, 1.0, 1.0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            regularized_incomplete_beta(1.5, 1.0, 1.0),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn f_sf_at_zero_is_one() {
        assert_eq!(f_sf(0.0, FParams::new(3, 17)).unwrap(), 1.0);
    }

    #[test]
    fn f_sf_equal_df_median() {
        // F(d, d) has median exactly 1.
        let p = f_sf(1.0, FParams::new(10, 10)).unwrap();
        assert!((p - 0.5).abs() < 1e-13, "got {p}");
    }

    #[test]
    fn f_sf_reference_values() {
        let cases = [
            // The (16.7, 2, 77) pairing comes up in the causality golden data;
            // the true tail mass there is 9.45e-7 (not 3e-7, which belongs to
            // the (2, 154) system-Wald parameterization).
            (16.7, 2, 77, 9.45330333203673592e-7),
            (1.23, 2, 77, 0.297970542357664034),
            (16.7, 2, 154, 2.7279558664832047e-7),
            (3.0, 5, 10, 0.0655575620938441133),
            (0.5, 1, 1, 0.60817344796939273),
            (2.5, 3, 40, 0.0732543520179499038),
            (100.0, 4, 60, 7.84445492234895168e-26),
            (0.001, 7, 3, 0.999999998584191029),
        ];
        for (stat, d1, d2, want) in cases {
            let got = f_sf(stat, FParams::new(d1, d2)).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(
                rel < 1e-12,
                "f_sf({stat}, {d1}, {d2}) = {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn f_sf_extreme_statistic_underflows_to_zero() {
        // mpmath gives 4.378e-73 here; well inside the clamp but must not panic.
        let p = f_sf(1e6, FParams::new(2, 30)).unwrap();
        assert!((p / 4.37795376077653823e-73 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn f_sf_rejects_negative_and_nonfinite() {
        assert!(matches!(
            f_sf(-1.0, FParams::new(2, 10)),
            Err(Error::InvalidStatistic(_))
        ));
        assert!(matches!(
            f_sf(f64::NAN, FParams::new(2, 10)),
            Err(Error::InvalidStatistic(_))
        ));
        assert!(matches!(
            f_sf(f64::INFINITY, FParams::new(2, 10)),
            Err(Error::InvalidStatistic(_))
        ));
    }

    #[test]
    fn f_sf_monotone_decreasing_in_stat() {
        for (d1, d2) in [(1, 5), (2, 77), (4, 30), (8, 200)] {
            let params = FParams::new(d1, d2);
            let mut prev = f_sf(0.0, params).unwrap();
            for i in 1..=100 {
                let stat = i as f64 * 0.25;
                let p = f_sf(stat, params).unwrap();
                assert!(p < prev, "not decreasing at stat={stat} df=({d1},{d2})");
                prev = p;
            }
        }
    }

    #[test]
    fn beta_symmetry_identity() {
        // I_x(a,b) + I_{1-x}(b,a) = 1.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let x = next();
            let a = 0.5 + 40.0 * next();
            let b = 0.5 + 40.0 * next();
            let lhs = regularized_incomplete_beta(x, a, b).unwrap();
            let rhs = regularized_incomplete_beta(1.0 - x, b, a).unwrap();
            assert!(
                (lhs + rhs - 1.0).abs() < 1e-12,
                "symmetry broken at x={x}, a={a}, b={b}: {lhs} + {rhs}"
            );
        }
    }
}
