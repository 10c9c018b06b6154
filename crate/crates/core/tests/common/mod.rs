//! Exact rational oracles shared by the integration tests.
#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// `J_k(x)` from the power series in exact rational arithmetic, summed until
/// the terms are decreasing and below `1e-40` of the running size.
pub fn bessel_series(k: u32, x: f64) -> f64 {
    let h = rat(x) / BigInt::from(2);
    let h2 = &h * &h;
    let mut term = BigRational::one();
    for j in 1..=k {
        term = term * &h / BigInt::from(j);
    }
    let mut sum = term.clone();
    let tiny = BigRational::new(BigInt::one(), BigInt::from(10).pow(40));
    let mut m: u64 = 0;
    loop {
        term = -term * &h2 / BigInt::from((m + 1) * (m + 1 + k as u64));
        sum += &term;
        m += 1;
        if (m as f64) > x && term.abs() < &tiny * (sum.abs() + BigRational::new(BigInt::one(), BigInt::from(10).pow(300))) {
            break;
        }
    }
    sum.to_f64().unwrap()
}

fn binom(n: u64, r: u64) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..r {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// `L_n^k(x) = sum_j (-1)^j C(n+k, n-j) x^j / j!` exactly.
pub fn laguerre_poly(n: u64, k: u64, x: f64) -> f64 {
    let xr = rat(x);
    let mut sum = BigRational::zero();
    let mut pow = BigRational::one();
    let mut fact = BigInt::one();
    for j in 0..=n {
        if j > 0 {
            pow *= &xr;
            fact *= BigInt::from(j);
        }
        let t = BigRational::from(binom(n + k, n - j)) * &pow / BigRational::from(fact.clone());
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    sum.to_f64().unwrap()
}

/// `exp(d (a - a^dag))` on Fock levels `0..dim` by a Taylor series.
pub fn displacement_matrix(d: f64, dim: usize) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; dim]; dim];
    for m in 0..dim - 1 {
        let s = ((m + 1) as f64).sqrt() * d;
        g[m][m + 1] = s;
        g[m + 1][m] = -s;
    }
    let mut out: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut term = out.clone();
    for p in 1..80 {
        let mut next = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for l in 0..dim {
                if term[i][l] != 0.0 {
                    for j in 0..dim {
                        next[i][j] += term[i][l] * g[l][j];
                    }
                }
            }
        }
        for row in next.iter_mut() {
            for v in row.iter_mut() {
                *v /= p as f64;
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                out[i][j] += next[i][j];
            }
        }
        term = next;
    }
    out
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
