use faer::Mat;
use num_complex::Complex64 as C64;

use super::{PopulationTrace, QuadratureTrace, TimeGrid, NORM_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::Eigen;
use crate::models::{rabi_hamiltonian, Branch, CavityCoupling, JointState, QubitSpec, QubitState};

/// Largest weight allowed in the top 5% of the Fock range.
pub const LEAK_TOLERANCE: f64 = 1e-8;

/// Weight ignored when pruning eigencomponents and basis rows.
const PRUNE_WEIGHT: f64 = 1e-15;

const CHUNK: usize = 256;

/// Rabi-model evolution by phase rotation in the eigenbasis of the
/// (time-independent) Hamiltonian, diagonalized once.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    n_max: usize,
    eigen: Eigen,
}

impl SpectralPropagator {
    pub fn new(q: &QubitSpec, c: &CavityCoupling) -> Result<Self> {
        let eigen = rabi_hamiltonian(q, c).eigh()?;
        Ok(SpectralPropagator { n_max: c.n_max(), eigen })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn energies(&self) -> &[f64] {
        &self.eigen.values
    }

    fn check_dim(&self, state: &JointState) -> Result<()> {
        if state.n_max() != self.n_max {
            return Err(Error::invalid("initial state", format!("n_max {} does not match the Hamiltonian's {}", state.n_max(), self.n_max)));
        }
        Ok(())
    }

    /// Eigenbasis coefficients `<v_j|psi>`.
    fn coefficients(&self, state: &JointState) -> Vec<C64> {
        let re: Vec<f64> = state.amplitudes().iter().map(|a| a.re).collect();
        let im: Vec<f64> = state.amplitudes().iter().map(|a| a.im).collect();
        let (pr, pi) = (self.eigen.project(&re), self.eigen.project(&im));
        pr.into_iter().zip(pi).map(|(r, i)| C64::new(r, i)).collect()
    }

    /// `exp(-i H t) |state>`; negative `t` evolves backwards.
    pub fn evolve(&self, state: &JointState, t: f64) -> Result<JointState> {
        self.check_dim(state)?;
        let coef = self.coefficients(state);
        let v = self.eigen.vectors();
        let dim = state.dim();
        let rot: Vec<C64> = coef.iter().zip(&self.eigen.values).map(|(c, e)| c * C64::from_polar(1.0, -e * t)).collect();
        let amps = (0..dim).map(|i| (0..dim).map(|j| v[(i, j)] * rot[j]).sum()).collect();
        Ok(JointState::from_raw(self.n_max, amps))
    }

    /// Calls `observe(t, psi(t))` for every grid time. Eigencomponents and
    /// basis rows that together carry less than `PRUNE_WEIGHT` are dropped,
    /// and energies are measured from the state's mean energy; observables
    /// do not see that global phase.
    fn sample<T>(&self, state: &JointState, grid: &TimeGrid, mut observe: impl FnMut(&[C64]) -> T) -> Result<Vec<T>> {
        self.check_dim(state)?;
        let coef = self.coefficients(state);
        let v = self.eigen.vectors();
        let dim = state.dim();

        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| coef[a].norm_sqr().total_cmp(&coef[b].norm_sqr()));
        let mut dropped = 0.0;
        let mut first_kept = 0;
        for (pos, &j) in order.iter().enumerate() {
            dropped += coef[j].norm_sqr();
            if dropped > PRUNE_WEIGHT {
                first_kept = pos;
                break;
            }
        }
        let mut cols: Vec<usize> = order[first_kept..].to_vec();
        cols.sort_unstable();

        // `bound_i >= |psi_i(t)|` for all t
        let bound: Vec<f64> = (0..dim).map(|i| cols.iter().map(|&j| v[(i, j)].abs() * coef[j].norm()).sum()).collect();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| bound[a].total_cmp(&bound[b]));
        let mut dropped = 0.0;
        let mut first_kept = 0;
        for (pos, &i) in order.iter().enumerate() {
            dropped += bound[i] * bound[i];
            if dropped > PRUNE_WEIGHT {
                first_kept = pos;
                break;
            }
        }
        let mut rows: Vec<usize> = order[first_kept..].to_vec();
        rows.sort_unstable();

        let e_ref: f64 = cols.iter().map(|&j| coef[j].norm_sqr() * self.eigen.values[j]).sum();
        let sub = Mat::from_fn(rows.len(), cols.len(), |a, b| v[(rows[a], cols[b])]);
        let times = grid.times();
        let mut out = Vec::with_capacity(times.len());
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        for chunk in times.chunks(CHUNK) {
            let zr = Mat::from_fn(cols.len(), chunk.len(), |b, s| {
                let j = cols[b];
                (coef[j] * C64::from_polar(1.0, -(self.eigen.values[j] - e_ref) * chunk[s])).re
            });
            let zi = Mat::from_fn(cols.len(), chunk.len(), |b, s| {
                let j = cols[b];
                (coef[j] * C64::from_polar(1.0, -(self.eigen.values[j] - e_ref) * chunk[s])).im
            });
            let ar = &sub * &zr;
            let ai = &sub * &zi;
            for (s, &t) in chunk.iter().enumerate() {
                for (a, &i) in rows.iter().enumerate() {
                    psi[i] = C64::new(ar[(a, s)], ai[(a, s)]);
                }
                let n: f64 = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                let drift = (n - 1.0).abs();
                if drift > NORM_TOLERANCE {
                    return Err(Error::NormDrift { time: t, drift });
                }
                out.push(observe(&psi));
            }
        }
        Ok(out)
    }

    pub fn population_trace(&self, initial: &JointState, grid: &TimeGrid) -> Result<PopulationTrace> {
        check_leak(initial)?;
        let n_max = self.n_max;
        let p = self.sample(initial, grid, |psi| branch_population(psi, n_max, Branch::Down))?;
        PopulationTrace::new(grid.times(), p)
    }

    pub fn probe_trace(&self, initial: &JointState, grid: &TimeGrid, probe: &QubitState) -> Result<PopulationTrace> {
        check_leak(initial)?;
        let n_max = self.n_max;
        let [pu, pd] = probe.amplitudes().map(|a| a.conj());
        let p = self.sample(initial, grid, |psi| {
            (0..=n_max)
                .map(|m| (pu * psi[JointState::index(n_max, Branch::Up, m)] + pd * psi[JointState::index(n_max, Branch::Down, m)]).norm_sqr())
                .sum()
        })?;
        PopulationTrace::new(grid.times(), p)
    }

    pub fn quadrature_trace(&self, initial: &JointState, grid: &TimeGrid) -> Result<QuadratureTrace> {
        check_leak(initial)?;
        let n_max = self.n_max;
        let x = self.sample(initial, grid, |psi| quadrature(psi, n_max))?;
        Ok(QuadratureTrace { times: grid.times(), x_mean: x })
    }
}

fn branch_population(psi: &[C64], n_max: usize, b: Branch) -> f64 {
    let start = JointState::index(n_max, b, 0);
    psi[start..start + n_max + 1].iter().map(|a| a.norm_sqr()).sum()
}

/// `<(a + a^dag)/2> = Re <a>`.
fn quadrature(psi: &[C64], n_max: usize) -> f64 {
    let mut acc = 0.0;
    for b in [Branch::Up, Branch::Down] {
        let s = JointState::index(n_max, b, 0);
        for m in 0..n_max {
            acc += ((m + 1) as f64).sqrt() * (psi[s + m].conj() * psi[s + m + 1]).re;
        }
    }
    acc
}

fn check_leak(state: &JointState) -> Result<()> {
    let levels = state.n_max() + 1;
    let top = (0.05 * levels as f64).ceil() as usize;
    let weight = state.weight_above(levels - top.max(1));
    if weight >= LEAK_TOLERANCE {
        return Err(Error::TruncationLeak { n_max: state.n_max(), weight });
    }
    Ok(())
}

fn checked(c: &CavityCoupling, initial: &JointState) -> Result<()> {
    if initial.n_max() != c.n_max() {
        return Err(Error::invalid("initial state", format!("n_max {} does not match the coupling's {}", initial.n_max(), c.n_max())));
    }
    check_leak(initial)
}

/// `P_down(t)` for the Rabi model started in `initial`.
pub fn propagate_quantum(q: &QubitSpec, c: &CavityCoupling, initial: &JointState, grid: &TimeGrid) -> Result<PopulationTrace> {
    checked(c, initial)?;
    SpectralPropagator::new(q, c)?.population_trace(initial, grid)
}

/// Occupation of `probe (x) anything` in time.
pub fn propagate_quantum_probe(
    q: &QubitSpec,
    c: &CavityCoupling,
    initial: &JointState,
    grid: &TimeGrid,
    probe: &QubitState,
) -> Result<PopulationTrace> {
    checked(c, initial)?;
    SpectralPropagator::new(q, c)?.probe_trace(initial, grid, probe)
}

pub fn cavity_quadrature_trace(q: &QubitSpec, c: &CavityCoupling, initial: &JointState, grid: &TimeGrid) -> Result<QuadratureTrace> {
    checked(c, initial)?;
    SpectralPropagator::new(q, c)?.quadrature_trace(initial, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{coherent_state, fock_state};

    #[test]
    fn decoupled_eigenstate_is_stationary() {
        let q = QubitSpec::new(0.0, 1.0).unwrap();
        let c = CavityCoupling::new(0.0, 30).unwrap();
        let psi = JointState::product(&QubitState::down(), &fock_state(5, 30).unwrap()).unwrap();
        let tr = propagate_quantum(&q, &c, &psi, &TimeGrid::new(0.0, 50.0, 101).unwrap()).unwrap();
        assert!(tr.p_down.iter().all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn free_coherent_quadrature() {
        let q = QubitSpec::new(0.5, 0.0).unwrap();
        let c = CavityCoupling::new(0.0, 60).unwrap();
        let psi = JointState::product(&QubitState::down(), &coherent_state(2.0, 60).unwrap()).unwrap();
        let tr = cavity_quadrature_trace(&q, &c, &psi, &TimeGrid::new(0.0, 20.0, 81).unwrap()).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.x_mean) {
            assert!((x - 2.0 * t.cos()).abs() < 1e-10, "{t}: {x}");
        }
    }

    #[test]
    fn displaced_equilibrium() {
        let q = QubitSpec::new(0.0, 0.0).unwrap();
        let c = CavityCoupling::new(1.0, 60).unwrap();
        let psi = JointState::product(&QubitState::up(), &fock_state(0, 60).unwrap()).unwrap();
        let tr = cavity_quadrature_trace(&q, &c, &psi, &TimeGrid::new(0.0, 10.0, 201).unwrap()).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.x_mean) {
            assert!((x - (1.0 - t.cos())).abs() < 1e-10);
        }
    }

    #[test]
    fn leak_detection() {
        let q = QubitSpec::new(1.0, 0.0).unwrap();
        let c = CavityCoupling::new(0.1, 20).unwrap();
        let psi = JointState::product(&QubitState::down(), &fock_state(20, 20).unwrap()).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 3).unwrap();
        assert!(matches!(propagate_quantum(&q, &c, &psi, &g), Err(Error::TruncationLeak { .. })));
        let c2 = CavityCoupling::new(0.1, 19).unwrap();
        let psi = JointState::product(&QubitState::down(), &fock_state(3, 20).unwrap()).unwrap();
        assert!(propagate_quantum(&q, &c2, &psi, &g).is_err());
    }

    #[test]
    fn evolve_round_trip() {
        let q = QubitSpec::new(0.4, 2.0).unwrap();
        let c = CavityCoupling::new(0.3, 25).unwrap();
        let amps: Vec<C64> = (0..52).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 1.1).cos() * 0.5)).collect();
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi = JointState::from_amplitudes(25, amps.into_iter().map(|a| a / n).collect()).unwrap();
        let p = SpectralPropagator::new(&q, &c).unwrap();
        let back = p.evolve(&p.evolve(&psi, 37.5).unwrap(), -37.5).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
