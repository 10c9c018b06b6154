use std::f64::consts::TAU;

use rustfft::{num_complex::Complex64 as C64, FftPlanner};
use serde::Serialize;

use super::PopulationTrace;
use crate::error::{Error, Result};

/// Envelope decay of an oscillating trace. `tau` is `f64::INFINITY` when the
/// envelope does not shrink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayEstimate {
    pub tau: f64,
    /// Coefficient of determination of the log-envelope fit.
    pub quality: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPeak {
    /// Angular frequency in units of the drive frequency.
    pub frequency: f64,
    pub magnitude: f64,
}

const PAD_FACTOR: usize = 8;
const PEAK_TO_MEDIAN: f64 = 3.0;

/// Hann-windowed, zero-padded magnitude spectrum of the mean-removed trace,
/// restricted to angular frequencies below the drive frequency. Returns
/// `(bin angular spacing, magnitudes from bin 0)`.
fn spectrum(trace: &PopulationTrace) -> Result<(f64, Vec<f64>)> {
    let n = trace.len();
    if n < 8 {
        return Err(Error::invalid("trace", format!("need at least 8 samples, got {n}")));
    }
    let dt = trace.spacing();
    let mean = trace.p_down.iter().sum::<f64>() / n as f64;
    let len = (PAD_FACTOR * n).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); len];
    for (i, p) in trace.p_down.iter().enumerate() {
        let w = 0.5 * (1.0 - (TAU * i as f64 / (n - 1) as f64).cos());
        buf[i] = C64::new(w * (p - mean), 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let dw = TAU / (len as f64 * dt);
    let bins = ((1.0 / dw).ceil() as usize).min(len / 2);
    if bins < 4 {
        return Err(Error::invalid("trace", "too short to resolve frequencies below the drive"));
    }
    Ok((dw, buf[..bins].iter().map(|c| c.norm()).collect()))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 0 {
        0.5 * (s[m - 1] + s[m])
    } else {
        s[m]
    }
}

/// Vertex offset of the parabola through three neighbouring bins.
fn vertex(a: f64, b: f64, c: f64) -> f64 {
    let den = a - 2.0 * b + c;
    if den == 0.0 {
        0.0
    } else {
        (0.5 * (a - c) / den).clamp(-0.5, 0.5)
    }
}

/// Angular frequency of the strongest spectral line below the drive frequency.
pub fn dominant_frequency(trace: &PopulationTrace) -> Result<f64> {
    let (dw, mag) = spectrum(trace)?;
    // bin 0 only carries window leakage of the removed mean
    let (p, &peak) = mag.iter().enumerate().skip(1).max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let med = median(&mag[1..]);
    let scale = trace.p_down.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0) * trace.len() as f64;
    if !(peak > 1e-12 * scale) || peak < PEAK_TO_MEDIAN * med {
        return Err(Error::NoPeak { peak, median: med });
    }
    let off = if p + 1 < mag.len() { vertex(mag[p - 1], peak, mag[p + 1]) } else { 0.0 };
    Ok((p as f64 + off) * dw)
}

/// Local maxima of the sub-drive spectrum that exceed both `rel_threshold`
/// times the highest peak and three times the median; strongest first.
pub fn spectral_peaks(trace: &PopulationTrace, rel_threshold: f64) -> Result<Vec<SpectralPeak>> {
    let (dw, mag) = spectrum(trace)?;
    let med = median(&mag[1..]);
    let top = mag[1..].iter().cloned().fold(0.0, f64::max);
    let mut peaks: Vec<SpectralPeak> = (2..mag.len() - 1)
        .filter(|&i| mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])
        .filter(|&i| mag[i] >= rel_threshold * top && mag[i] >= PEAK_TO_MEDIAN * med && mag[i] > 0.0)
        .map(|i| SpectralPeak { frequency: (i as f64 + vertex(mag[i - 1], mag[i], mag[i + 1])) * dw, magnitude: mag[i] })
        .collect();
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    Ok(peaks)
}

/// Half the peak-to-peak range in consecutive windows of `window` length,
/// stamped at the window centre: the largest deviation from the local mean,
/// insensitive to a slow drift of the mean itself.
fn envelope(trace: &PopulationTrace, window: f64) -> Vec<(f64, f64)> {
    let n = trace.len();
    let per = ((window / trace.spacing()).round() as usize).max(2);
    let mut out = Vec::new();
    let mut start = 0;
    while start + per <= n {
        let w = &trace.p_down[start..start + per];
        let hi = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
        out.push((0.5 * (trace.times[start] + trace.times[start + per - 1]), 0.5 * (hi - lo)));
        start += per;
    }
    out
}

/// Envelope points below this fraction of the largest one are treated as
/// noise floor and left out of the decay fit.
const ENVELOPE_FLOOR: f64 = 0.02;

/// 1/e time of the oscillation envelope, one envelope point per Rabi period
/// (taken from [`dominant_frequency`]); `ln(envelope)` is fitted linearly in
/// time.
pub fn estimate_decay_time(trace: &PopulationTrace) -> Result<DecayEstimate> {
    let omega = dominant_frequency(trace)?;
    let env = envelope(trace, TAU / omega);
    let top = env.iter().map(|p| p.1).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = env.into_iter().filter(|p| p.1 > 0.0 && p.1 >= ENVELOPE_FLOOR * top).collect();
    if pts.len() < 3 {
        return Err(Error::invalid("trace", format!("only {} envelope points; need at least 3 Rabi periods", pts.len())));
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1.ln() - ym)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1.ln() - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let quality = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    let tau = if slope < 0.0 { -1.0 / slope } else { f64::INFINITY };
    Ok(DecayEstimate { tau, quality })
}

/// `1 - env_last / env_first` with the envelope taken per oscillation period
/// `2 pi / omega`. Negative when the envelope grows.
pub fn envelope_drop(trace: &PopulationTrace, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid("omega", format!("must be finite and > 0, got {omega}")));
    }
    let env = envelope(trace, TAU / omega);
    if env.len() < 2 {
        return Err(Error::invalid("trace", "shorter than two oscillation periods"));
    }
    let first = env[0].1;
    if first == 0.0 {
        return Err(Error::invalid("trace", "no oscillation in the first period"));
    }
    Ok(1.0 - env[env.len() - 1].1 / first)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn synth(t1: f64, n: usize, f: impl Fn(f64) -> f64) -> PopulationTrace {
        let times: Vec<f64> = (0..n).map(|i| t1 * i as f64 / (n - 1) as f64).collect();
        let p = times.iter().map(|&t| f(t)).collect();
        PopulationTrace::new(times, p).unwrap()
    }

    #[test]
    fn synthetic_frequency() {
        let tr = synth(600.0, 2000, |t| 0.5 + 0.5 * (0.1 * t).cos());
        let w = dominant_frequency(&tr).unwrap();
        assert!((w - 0.1).abs() < 5e-4, "{w}");
    }

    #[test]
    fn constant_has_no_peak() {
        let tr = synth(100.0, 500, |_| 0.7);
        assert!(matches!(dominant_frequency(&tr), Err(Error::NoPeak { .. })));
    }

    #[test]
    fn drive_frequency_lines_are_ignored() {
        let tr = synth(800.0, 8000, |t| 0.5 + 0.3 * (0.2 * t).cos() + 0.2 * (1.5 * t).cos());
        assert!((dominant_frequency(&tr).unwrap() - 0.2).abs() < 1e-3);
    }

    #[test]
    fn synthetic_decay() {
        let tr = synth(600.0, 6000, |t| 0.5 + 0.4 * (-t / 50.0).exp() * (0.1 * t).cos());
        let d = estimate_decay_time(&tr).unwrap();
        assert!((d.tau - 50.0).abs() < 5.0, "{d:?}");
        assert!(d.quality > 0.9);

        let tr = synth(600.0, 6000, |t| 0.5 + 0.4 * (0.1 * t).cos());
        let d = estimate_decay_time(&tr).unwrap();
        assert!(d.tau > 1e4, "{d:?}");
        assert!(envelope_drop(&tr, 0.1).unwrap().abs() < 0.01);
    }

    #[test]
    fn two_peaks() {
        let tr = synth(2000.0, 8000, |t| 0.5 + 0.2 * (0.1 * t).cos() + 0.15 * (0.23 * t).cos());
        let p = spectral_peaks(&tr, 0.2).unwrap();
        assert_eq!(p.len(), 2, "{p:?}");
        assert!((p[0].frequency - 0.1).abs() < 1e-3 && (p[1].frequency - 0.23).abs() < 1e-3);
    }
}
