//! Support code for the test suites: an extended-precision least-squares
//! oracle that deliberately shares nothing with the QR path it checks.
//!
//! Numbers are double-doubles (an unevaluated sum of two f64s, roughly 31
//! significant digits); the solve goes through the normal equations and a
//! Cholesky factorization, i.e. the route the production code avoids.

#![doc(hidden)]

use std::ops::{Add, Div, Mul, Sub};

pub use crate::sim::SplitMix64;

use crate::ols::LagDesign;

/// Double-double value: `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        // FMA gives the exact low part.
        let err = a.mul_add(b, -p);
        Dd { hi: p, lo: err }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // One Newton step on the f64 estimate doubles its precision.
        let x = Dd::from_f64(self.hi.sqrt());
        x + (self / x - x) * Dd::from_f64(0.5)
    }
}

impl Add for Dd {
    type Output = Dd;

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let lo = s.lo + self.lo + o.lo;
        Dd::two_sum(s.hi, lo)
    }
}

impl Sub for Dd {
    type Output = Dd;

    fn sub(self, o: Dd) -> Dd {
        self + Dd {
            hi: -o.hi,
            lo: -o.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::two_prod(self.hi, o.hi);
        let lo = p.lo + self.hi * o.lo + self.lo * o.hi;
        Dd::two_sum(p.hi, lo)
    }
}

impl Div for Dd {
    type Output = Dd;

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r2 = r - o * Dd::from_f64(q2);
        let q3 = r2.hi / o.hi;
        Dd::two_sum(q1, q2) + Dd::from_f64(q3)
    }
}

/// Accumulate a dot product of f64 streams exactly, then round once.
fn dd_dot(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> Dd {
    let mut acc = Dd::ZERO;
    for (x, y) in a.zip(b) {
        acc = acc + Dd::two_prod(x, y);
    }
    acc
}

/// Residual sum of squares for a lag design, solved through double-double
/// normal equations (X'X, X'y, Cholesky, two substitutions) with residuals
/// also evaluated in double-double.
pub fn dd_ols_rss(design: &LagDesign) -> f64 {
    let n = design.n_eff();
    let m = design.n_predictors();
    let col = |j: usize| (0..n).map(move |i| design.predictor(i, j));

    // Gram matrix and right-hand side.
    let mut gram = vec![Dd::ZERO; m * m];
    let mut rhs = vec![Dd::ZERO; m];
    for j in 0..m {
        for l in j..m {
            let v = dd_dot(col(j), col(l));
            gram[j * m + l] = v;
            gram[l * m + j] = v;
        }
        rhs[j] = dd_dot(col(j), design.response().iter().copied());
    }

    // Cholesky: gram = L L'.
    let mut chol = vec![Dd::ZERO; m * m];
    for j in 0..m {
        let mut diag = gram[j * m + j];
        for k in 0..j {
            diag = diag - chol[j * m + k] * chol[j * m + k];
        }
        let diag = diag.sqrt();
        chol[j * m + j] = diag;
        for i in (j + 1)..m {
            let mut v = gram[i * m + j];
            for k in 0..j {
                v = v - chol[i * m + k] * chol[j * m + k];
            }
            chol[i * m + j] = v / diag;
        }
    }

    // Forward then backward substitution.
    let mut z = vec![Dd::ZERO; m];
    for i in 0..m {
        let mut v = rhs[i];
        for k in 0..i {
            v = v - chol[i * m + k] * z[k];
        }
        z[i] = v / chol[i * m + i];
    }
    let mut coef = vec![Dd::ZERO; m];
    for i in (0..m).rev() {
        let mut v = z[i];
        for k in (i + 1)..m {
            v = v - chol[k * m + i] * coef[k];
        }
        coef[i] = v / chol[i * m + i];
    }

    // Residuals and their sum of squares, all in double-double.
    let mut rss = Dd::ZERO;
    for i in 0..n {
        let mut fitted = Dd::ZERO;
        for (j, c) in coef.iter().enumerate() {
            fitted = fitted + *c * Dd::from_f64(design.predictor(i, j));
        }
        let r = Dd::from_f64(design.response()[i]) - fitted;
        rss = rss + r * r;
    }
    rss.to_f64()
}
