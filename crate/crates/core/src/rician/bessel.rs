//! Modified Bessel functions of the first kind, orders 0 and 1, in the forms
//! the Rician likelihood needs: `log I0(t)` and `I1(t)/I0(t)`.
//!
//! | range          | `I1/I0`             | `log I0`                    |
//! |----------------|---------------------|-----------------------------|
//! | `t < 15`       | power series        | power series                |
//! | `15 ≤ t ≤ 700` | continued fraction  | `t + log` of scaled expansion |
//! | `t > 700`      | asymptotic series   | `t + log` of scaled expansion |

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 15.0;
const CF_LIMIT: f64 = 700.0;
const CF_MAX_TERMS: usize = 10_000;
const TINY: f64 = 1e-300;

/// `I0(t)` and `I1(t)` by their power series. Accurate for moderate `t`.
fn series(t: f64) -> (f64, f64) {
    let q = 0.25 * t * t;
    let (mut i0, mut i1) = (1.0, 1.0);
    let (mut a0, mut a1) = (1.0, 1.0);
    for k in 1..500 {
        let k = k as f64;
        a0 *= q / (k * k);
        a1 *= q / (k * (k + 1.0));
        i0 += a0;
        i1 += a1;
        if a0 < 1e-17 * i0 && a1 < 1e-17 * i1 {
            break;
        }
    }
    (i0, 0.5 * t * i1)
}

/// `√(2πt) e^{−t} I_ν(t)` by the large-argument expansion, summed until the
/// terms stop shrinking or drop below working precision.
fn scaled_asymptotic(t: f64, nu: u32) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let (mut sum, mut term) = (1.0, 1.0_f64);
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * t);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `I1(t)/I0(t) = 1/(2/t + 1/(4/t + 1/(6/t + …)))`, modified Lentz.
fn ratio_cf(t: f64) -> f64 {
    let mut f = TINY;
    let (mut c, mut d) = (f, 0.0_f64);
    for j in 1..=CF_MAX_TERMS {
        let b = 2.0 * j as f64 / t;
        d += b;
        d = if d == 0.0 { TINY } else { d.recip() };
        c = b + c.recip();
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// `I1(t)/I0(t)` for `t ≥ 0`. Lies in `[0, 1)` and increases with `t`.
pub fn bessel_ratio(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("bessel ratio needs t >= 0, got {t}")));
    }
    Ok(ratio_unchecked(t))
}

/// Odd extension of [`bessel_ratio`] to all finite `t`.
pub fn bessel_ratio_signed(t: f64) -> f64 {
    t.signum() * ratio_unchecked(t.abs())
}

fn ratio_unchecked(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if t < SERIES_LIMIT {
        let (i0, i1) = series(t);
        i1 / i0
    } else if t <= CF_LIMIT {
        ratio_cf(t)
    } else if t.is_finite() {
        scaled_asymptotic(t, 1) / scaled_asymptotic(t, 0)
    } else {
        1.0
    }
}

/// `log I0(t)`, overflow-free. Even in `t`.
pub fn log_i0(t: f64) -> f64 {
    let t = t.abs();
    if t < SERIES_LIMIT {
        series(t).0.ln()
    } else {
        t - 0.5 * (2.0 * PI * t).ln() + scaled_asymptotic(t, 0).ln()
    }
}
