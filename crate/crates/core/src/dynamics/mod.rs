//! Time evolution in both pictures and analysis of the resulting traces.

mod analysis;
mod quantum;
mod semiclassical;

use serde::Serialize;

pub use analysis::{dominant_frequency, envelope_drop, estimate_decay_time, spectral_peaks, DecayEstimate, SpectralPeak};
pub use quantum::{cavity_quadrature_trace, propagate_quantum, propagate_quantum_probe, SpectralPropagator, LEAK_TOLERANCE};
pub use semiclassical::{evolve_semiclassical, propagate_semiclassical, propagate_semiclassical_with_steps, STEPS_PER_PERIOD};

use crate::error::{Error, Result};

/// Tolerance on `| |psi| - 1 |` at every sample.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Default trace sampling.
pub const SAMPLES_PER_DRIVE_PERIOD: usize = 64;

/// Uniform sampling of `[t0, t1]` with `samples` points, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, samples: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || !(t1 > t0) {
            return Err(Error::invalid("time grid", format!("need finite t1 > t0, got [{t0}, {t1}]")));
        }
        if samples < 2 {
            return Err(Error::invalid("time grid", format!("need at least 2 samples, got {samples}")));
        }
        Ok(TimeGrid { t0, t1, samples })
    }

    /// `periods` Rabi periods `2 pi / |rabi_freq|` starting at zero, sampled
    /// `per_drive_period` times per drive period.
    pub fn rabi_periods(periods: f64, rabi_freq: f64, per_drive_period: usize) -> Result<Self> {
        if !(rabi_freq.abs() > 0.0) || !rabi_freq.is_finite() {
            return Err(Error::invalid("rabi_freq", format!("must be finite and non-zero, got {rabi_freq}")));
        }
        if !(periods > 0.0) || per_drive_period == 0 {
            return Err(Error::invalid("time grid", "periods and sampling must be positive"));
        }
        let t1 = periods * std::f64::consts::TAU / rabi_freq.abs();
        let x = t1 / std::f64::consts::TAU * per_drive_period as f64;
        let intervals = if (x - x.round()).abs() < 1e-9 { x.round() } else { x.ceil() } as usize;
        TimeGrid::new(0.0, t1, intervals.max(1) + 1)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn spacing(&self) -> f64 {
        (self.t1 - self.t0) / (self.samples - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.samples {
            self.t1
        } else {
            self.t0 + i as f64 * self.spacing()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.time(i)).collect()
    }
}

/// Qubit population sampled in time. Normally the occupation of `|down>`;
/// [`propagate_quantum_probe`] stores the occupation of its probe state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub p_down: Vec<f64>,
}

impl PopulationTrace {
    pub fn new(times: Vec<f64>, p_down: Vec<f64>) -> Result<Self> {
        if times.len() != p_down.len() {
            return Err(Error::invalid("trace", format!("{} times but {} values", times.len(), p_down.len())));
        }
        if times.len() < 2 {
            return Err(Error::invalid("trace", "need at least 2 samples"));
        }
        if let Some(p) = p_down.iter().find(|p| !(-1e-9..=1.0 + 1e-9).contains(*p)) {
            return Err(Error::invalid("trace", format!("population {p} outside [0, 1]")));
        }
        Ok(PopulationTrace { times, p_down })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn spacing(&self) -> f64 {
        (self.times[self.len() - 1] - self.times[0]) / (self.len() - 1) as f64
    }
}

/// `<(a + a^dag)/2>` sampled in time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureTrace {
    pub times: Vec<f64>,
    pub x_mean: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation_and_spacing() {
        assert!(TimeGrid::new(1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(0.0, f64::INFINITY, 3).is_err());
        let g = TimeGrid::new(0.0, 2.0, 5).unwrap();
        assert_eq!(g.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let g = TimeGrid::rabi_periods(2.0, 0.1, 64).unwrap();
        assert!((g.t1() - 40.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(g.samples(), 20 * 64 + 1);
    }

    #[test]
    fn trace_validation() {
        assert!(PopulationTrace::new(vec![0.0, 1.0], vec![0.5]).is_err());
        assert!(PopulationTrace::new(vec![0.0, 1.0], vec![0.5, 1.1]).is_err());
        assert!(PopulationTrace::new(vec![0.0, 1.0], vec![0.5, 1.0 + 1e-10]).is_ok());
    }
}
