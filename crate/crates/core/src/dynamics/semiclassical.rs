use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use super::{PopulationTrace, TimeGrid, NORM_TOLERANCE};
use crate::error::{Error, Result};
use crate::models::{QubitSpec, QubitState, SemiclassicalDrive};

/// Default integrator resolution: step `h = 2 pi / 4096`.
pub const STEPS_PER_PERIOD: usize = 4096;

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6

/// Fourth-order Magnus step from `t` to `t + h` for
/// `H(t) = x sigma_x + z(t) sigma_z`, exponentiated exactly. Every step is an
/// exact SU(2) rotation, so the norm only drifts by rounding.
struct Stepper {
    x: f64,
    bias: f64,
    amplitude: f64,
    phase: f64,
}

impl Stepper {
    fn z(&self, t: f64) -> f64 {
        -0.5 * (self.bias + self.amplitude * (t + self.phase).cos())
    }

    #[inline]
    fn step(&self, psi: &mut [C64; 2], t: f64, h: f64) {
        let z1 = self.z(t + h * (0.5 - GAUSS_OFFSET));
        let z2 = self.z(t + h * (0.5 + GAUSS_OFFSET));
        // U = exp(-i m.sigma)
        let mx = h * self.x;
        let my = -GAUSS_OFFSET * h * h * self.x * (z1 - z2);
        let mz = 0.5 * h * (z1 + z2);
        let theta = (mx * mx + my * my + mz * mz).sqrt();
        let (s, c) = theta.sin_cos();
        let f = if theta > 0.0 { s / theta } else { 1.0 };
        // -i sin|m| (m.sigma)/|m| with m.sigma = [[mz, mx - i my], [mx + i my, -mz]]
        let u00 = C64::new(c, -f * mz);
        let u11 = C64::new(c, f * mz);
        let u01 = C64::new(-f * my, -f * mx);
        let u10 = C64::new(f * my, -f * mx);
        let [a, b] = *psi;
        psi[0] = u00 * a + u01 * b;
        psi[1] = u10 * a + u11 * b;
    }
}

fn norm(psi: &[C64; 2]) -> f64 {
    (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt()
}

fn substeps(dt: f64, steps_per_period: usize) -> (usize, f64) {
    let h_max = TAU / steps_per_period as f64;
    let n = ((dt / h_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (n, dt / n as f64)
}

/// State at `t1` starting from `psi0` at `t0` (either direction), amplitudes
/// `(up, down)`.
pub fn evolve_semiclassical(
    q: &QubitSpec,
    d: &SemiclassicalDrive,
    psi0: &QubitState,
    t0: f64,
    t1: f64,
    steps_per_period: usize,
) -> Result<[C64; 2]> {
    if steps_per_period == 0 || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::invalid("evolve_semiclassical", "need finite times and a positive step count"));
    }
    let stepper = Stepper { x: -0.5 * q.gap(), bias: q.bias(), amplitude: d.amplitude(), phase: d.phase() };
    let mut psi = psi0.amplitudes();
    let (n, h) = substeps((t1 - t0).abs(), steps_per_period);
    let h = h * (t1 - t0).signum();
    for i in 0..n {
        stepper.step(&mut psi, t0 + i as f64 * h, h);
    }
    let drift = (norm(&psi) - 1.0).abs();
    if drift > NORM_TOLERANCE {
        return Err(Error::NormDrift { time: t1, drift });
    }
    Ok(psi)
}

/// `P_down` on `grid` for the driven qubit, with `psi0` given at `grid.t0()`.
pub fn propagate_semiclassical(
    q: &QubitSpec,
    d: &SemiclassicalDrive,
    psi0: &QubitState,
    grid: &TimeGrid,
) -> Result<PopulationTrace> {
    propagate_semiclassical_with_steps(q, d, psi0, grid, STEPS_PER_PERIOD)
}

/// As [`propagate_semiclassical`] with the step `2 pi / steps_per_period`
/// (sample intervals are split into equal substeps no longer than that).
pub fn propagate_semiclassical_with_steps(
    q: &QubitSpec,
    d: &SemiclassicalDrive,
    psi0: &QubitState,
    grid: &TimeGrid,
    steps_per_period: usize,
) -> Result<PopulationTrace> {
    if steps_per_period == 0 {
        return Err(Error::invalid("steps_per_period", "must be positive"));
    }
    let stepper = Stepper { x: -0.5 * q.gap(), bias: q.bias(), amplitude: d.amplitude(), phase: d.phase() };
    let times = grid.times();
    let (n, h) = substeps(grid.spacing(), steps_per_period);
    let mut psi = psi0.amplitudes();
    let mut p_down = Vec::with_capacity(times.len());
    p_down.push(psi[1].norm_sqr());
    for w in times.windows(2) {
        // restart each interval from its sample time so rounding in t does
        // not accumulate
        for i in 0..n {
            stepper.step(&mut psi, w[0] + i as f64 * h, h);
        }
        let drift = (norm(&psi) - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::NormDrift { time: w[1], drift });
        }
        p_down.push(psi[1].norm_sqr());
    }
    PopulationTrace::new(times, p_down)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::semiclassical_hamiltonian;

    #[test]
    fn step_matches_exact_exponential_for_constant_h() {
        // with a = 0 the Hamiltonian is constant and one Magnus step is exact
        let q = QubitSpec::new(0.7, 0.3).unwrap();
        let d = SemiclassicalDrive::new(0.0, 0.0).unwrap();
        let st = Stepper { x: -0.35, bias: 0.3, amplitude: 0.0, phase: 0.0 };
        let mut psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let t = 2.3;
        st.step(&mut psi, 0.0, t);
        let e = semiclassical_hamiltonian(&q, &d, 0.0).eigh().unwrap();
        let v = &e.vectors;
        let psi0 = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        for i in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..2 {
                let cj = v[(0, j)] * psi0[0] + v[(1, j)] * psi0[1];
                acc += v[(i, j)] * cj * C64::from_polar(1.0, -e.values[j] * t);
            }
            assert!((acc - psi[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn bare_rabi_flopping() {
        let q = QubitSpec::new(1.0, 0.0).unwrap();
        let d = SemiclassicalDrive::new(0.0, 0.0).unwrap();
        let g = TimeGrid::new(0.0, 20.0, 201).unwrap();
        let tr = propagate_semiclassical(&q, &d, &QubitState::down(), &g).unwrap();
        for (t, p) in tr.times.iter().zip(&tr.p_down) {
            assert!((p - (t / 2.0).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_z_eigenstate_is_stationary() {
        let q = QubitSpec::new(0.0, 1.3).unwrap();
        let d = SemiclassicalDrive::new(4.0, 0.2).unwrap();
        let g = TimeGrid::new(0.0, 30.0, 101).unwrap();
        let tr = propagate_semiclassical(&q, &d, &QubitState::down(), &g).unwrap();
        assert!(tr.p_down.iter().all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn forward_and_back() {
        let q = QubitSpec::new(0.4, 2.0).unwrap();
        let d = SemiclassicalDrive::new(10.0, 0.0).unwrap();
        let psi0 = QubitState::normalized(C64::new(0.3, 0.1), C64::new(-0.2, 0.9)).unwrap();
        let mid = evolve_semiclassical(&q, &d, &psi0, 0.5, 40.0, 4096).unwrap();
        let mid = QubitState::normalized(mid[0], mid[1]).unwrap();
        let back = evolve_semiclassical(&q, &d, &mid, 40.0, 0.5, 4096).unwrap();
        let a = psi0.amplitudes();
        assert!((back[0] - a[0]).norm() < 1e-9 && (back[1] - a[1]).norm() < 1e-9);
    }
}
