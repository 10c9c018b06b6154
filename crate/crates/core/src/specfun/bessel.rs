use super::laguerre::ln_factorial;
use crate::error::{Error, Result};

pub const MAX_BESSEL_ORDER: u32 = 10_000;

/// Rescaling threshold for the backward recurrence.
const BIG: f64 = 1e250;

/// Bessel function of the first kind `J_k(x)` for integer `k >= 0` and
/// real `x >= 0`.
///
/// Small arguments (`x^2 < 4(k+1)`) use the power series, where the
/// alternating terms cancel by at most a factor of about `e^2`. Everything
/// else uses Miller's backward recurrence normalized with
/// `J_0 + 2 sum J_2m = 1`.
pub fn bessel_j(k: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_j", format!("argument must be finite and >= 0, got {x}")));
    }
    if k > MAX_BESSEL_ORDER {
        return Err(Error::OutOfRange { what: "Bessel order", value: k as f64, range: "[0, 10000]" });
    }
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if x * x < 4.0 * (k as f64 + 1.0) {
        Ok(series(k, x))
    } else {
        Ok(miller(k, x))
    }
}

fn series(k: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let ratio = -half * half;
    let kf = k as f64;
    let ln_first = kf * half.ln() - ln_factorial(k as u64);

    // Sum of t_m / t_0. In the series region every ratio is below one and
    // the sum stays positive (x is below the first zero of J_k).
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut m = 0.0_f64;
    loop {
        term *= ratio / ((m + 1.0) * (m + 1.0 + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        m += 1.0;
    }
    (ln_first + sum.ln()).exp()
}

fn miller(k: u32, x: f64) -> f64 {
    let kmax = (k as f64).max(x);
    let mut start = (kmax + 20.0 + (40.0 * kmax).sqrt()) as usize;
    start += start % 2;

    // f_{m+1}, f_m with f_{start+1} = 0, f_start = 1.
    let mut next = 0.0_f64;
    let mut cur = 1.0_f64;
    let mut norm = 2.0_f64;
    let mut fk = 0.0_f64;
    let k = k as usize;

    for m in (1..=start).rev() {
        let prev = (2.0 * m as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        let idx = m - 1;
        if idx == k {
            fk = cur;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > BIG {
            let s = 1.0 / BIG;
            cur *= s;
            next *= s;
            norm *= s;
            fk *= s;
        }
    }
    norm += cur;
    fk / norm
}
