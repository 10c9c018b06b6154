use crate::error::{Error, Result};

/// Largest `n + k` accepted by the displaced-Fock overlap.
pub const MAX_FOCK_INDEX: u64 = 1_000_000;

const SCALE_EXP: i32 = 500;
const LN_2: f64 = std::f64::consts::LN_2;

/// A value stored as `mantissa * exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum() * (self.mantissa.abs().ln() + self.ln_scale).exp()
        }
    }
}

/// A signed number stored as `sign * exp(ln_abs)`; `sign` is -1, 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// `ln n!`, exact up to rounding for `n <= 20`, Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        return ((1..=n).product::<u64>() as f64).ln();
    }
    let x = (n + 1) as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let corr = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * 691.0 / 360_360.0)))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + corr
}

/// `(1/2) [ln n! - ln (n+k)!]`, i.e. the log of `sqrt(n!/(n+k)!)`.
pub fn log_factorial_ratio(n: u64, k: u64) -> f64 {
    if k <= 512 {
        let nf = n as f64;
        -0.5 * (1..=k).map(|j| (nf + j as f64).ln()).sum::<f64>()
    } else {
        0.5 * (ln_factorial(n) - ln_factorial(n + k))
    }
}

/// Associated Laguerre polynomial `L_n^k(x)` by forward three-term
/// recurrence with running power-of-two rescaling.
pub fn assoc_laguerre_scaled(n: u64, k: u64, x: f64) -> Result<Scaled> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("assoc_laguerre", format!("argument must be finite and >= 0, got {x}")));
    }
    let kf = k as f64;
    let mut prev = 1.0_f64;
    if n == 0 {
        return Ok(Scaled { mantissa: 1.0, ln_scale: 0.0 });
    }
    let mut cur = 1.0 + kf - x;
    let mut ln_scale = 0.0_f64;
    let up = 2f64.powi(SCALE_EXP);
    let down = 2f64.powi(-SCALE_EXP);
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + kf + 1.0 - x) * cur - (mf + kf) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > up {
            cur *= down;
            prev *= down;
            ln_scale += SCALE_EXP as f64 * LN_2;
        } else if cur.abs() < down && prev.abs() < down && (cur != 0.0 || prev != 0.0) {
            cur *= up;
            prev *= up;
            ln_scale -= SCALE_EXP as f64 * LN_2;
        }
    }
    Ok(Scaled { mantissa: cur, ln_scale })
}

/// `L_n^k(x)` as a plain float; overflows to infinity for huge values, use
/// [`assoc_laguerre_scaled`] there.
pub fn assoc_laguerre(n: u64, k: u64, x: f64) -> Result<f64> {
    assoc_laguerre_scaled(n, k, x).map(Scaled::value)
}

/// `e^{-d^2/2} d^k sqrt(n!/(n+k)!) L_n^k(d^2)` as sign and log-magnitude.
///
/// This is the matrix element `<n| exp(d (a - a^dag)) |n+k>`.
pub fn displaced_fock_overlap_log(n: u64, k: u64, d: f64) -> Result<SignedLog> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain("displaced_fock_overlap", format!("displacement must be finite and >= 0, got {d}")));
    }
    if n.checked_add(k).is_none_or(|s| s > MAX_FOCK_INDEX) {
        return Err(Error::OutOfRange { what: "n + k", value: n as f64 + k as f64, range: "[0, 1e6]" });
    }
    if d == 0.0 {
        return Ok(if k == 0 { SignedLog { sign: 1.0, ln_abs: 0.0 } } else { SignedLog::ZERO });
    }
    let lag = assoc_laguerre_scaled(n, k, d * d)?;
    if lag.mantissa == 0.0 {
        return Ok(SignedLog::ZERO);
    }
    let ln_abs = -0.5 * d * d + k as f64 * d.ln() + log_factorial_ratio(n, k) + lag.ln_scale + lag.mantissa.abs().ln();
    Ok(SignedLog { sign: lag.mantissa.signum(), ln_abs })
}

pub fn displaced_fock_overlap(n: u64, k: u64, d: f64) -> Result<f64> {
    displaced_fock_overlap_log(n, k, d).map(SignedLog::value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_laguerre_values() {
        assert_eq!(assoc_laguerre(0, 5, 3.7).unwrap(), 1.0);
        assert_eq!(assoc_laguerre(1, 0, 0.25).unwrap(), 0.75);
        let v = assoc_laguerre(2, 1, 0.04).unwrap();
        assert!((v - 2.8808).abs() < 1e-14);
    }

    #[test]
    fn laguerre_at_zero_is_binomial() {
        // L_n^k(0) = C(n+k, n)
        let v = assoc_laguerre(10, 4, 0.0).unwrap();
        assert!((v - 1001.0).abs() < 1e-10);
    }

    #[test]
    fn huge_laguerre_values_stay_finite_in_log_space() {
        let s = assoc_laguerre_scaled(1_000_000, 10_000, 0.0).unwrap();
        assert!(s.mantissa.is_finite() && s.ln_scale > 0.0);
        // ln C(n+k, n)
        let expected = ln_factorial(1_010_000) - ln_factorial(1_000_000) - ln_factorial(10_000);
        let got = s.mantissa.ln() + s.ln_scale;
        assert!((got - expected).abs() < 1e-6 * expected, "{got} vs {expected}");
    }

    #[test]
    fn factorial_ratios() {
        assert_eq!(log_factorial_ratio(0, 0), 0.0);
        assert!((log_factorial_ratio(3, 2) - 0.5 * (6.0f64 / 120.0).ln()).abs() < 1e-15);
        let v = log_factorial_ratio(1000, 5);
        assert!(v.is_finite() && v.abs() < 40.0);
        // both branches of the implementation agree
        let a = log_factorial_ratio(5000, 512);
        let b = 0.5 * (ln_factorial(5000) - ln_factorial(5512));
        assert!((a - b).abs() < 1e-9 * a.abs());
    }

    #[test]
    fn stirling_matches_exact_factorials() {
        let mut exact = 0.0_f64;
        for n in 1..=60u64 {
            exact += (n as f64).ln();
            assert!((ln_factorial(n) - exact).abs() < 1e-12 * exact.max(1.0), "n={n}");
        }
    }

    #[test]
    fn overlap_edge_cases() {
        assert_eq!(displaced_fock_overlap(0, 0, 0.0).unwrap(), 1.0);
        assert_eq!(displaced_fock_overlap(3, 2, 0.0).unwrap(), 0.0);
        assert!((displaced_fock_overlap(0, 0, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!(displaced_fock_overlap(999_999, 2, 0.1).is_err());
        assert!(displaced_fock_overlap(0, 0, -0.1).is_err());
    }
}
