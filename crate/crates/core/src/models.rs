//! Qubit, drive and cavity descriptions; the two Hamiltonians; the
//! displaced-oscillator (GRWA) basis and initial states.
//!
//! Conventions: `sigma_z |up> = +|up>`. Joint states are stored branch-major,
//! `index = branch * (n_max + 1) + m` with `up = 0`, `down = 1`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::specfun::{displaced_fock_overlap, ln_factorial};

/// Two-level system with gap `delta` and bias `bias` (both in units of the
/// drive quantum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    gap: f64,
    bias: f64,
}

impl QubitSpec {
    /// A zero gap is allowed: it decouples the two branches and is the
    /// reference case for several identities.
    pub fn new(gap: f64, bias: f64) -> Result<Self> {
        if !(gap >= 0.0) || !gap.is_finite() {
            return Err(Error::invalid("gap", format!("must be finite and >= 0, got {gap}")));
        }
        if !(bias >= 0.0) || !bias.is_finite() {
            return Err(Error::invalid("bias", format!("must be finite and >= 0, got {bias}")));
        }
        Ok(QubitSpec { gap, bias })
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn with_gap(self, gap: f64) -> Result<Self> {
        QubitSpec::new(gap, self.bias)
    }
}

/// Classical drive `a cos(t + phase)` on the bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalDrive {
    amplitude: f64,
    phase: f64,
}

impl SemiclassicalDrive {
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::invalid("amplitude", format!("must be finite and >= 0, got {amplitude}")));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("phase", "must be finite"));
        }
        Ok(SemiclassicalDrive { amplitude, phase })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Qubit-cavity coupling and the Fock cutoff (states `0..=n_max`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityCoupling {
    coupling: f64,
    n_max: usize,
}

impl CavityCoupling {
    pub fn new(coupling: f64, n_max: usize) -> Result<Self> {
        if !(coupling >= 0.0) || !coupling.is_finite() {
            return Err(Error::invalid("coupling", format!("must be finite and >= 0, got {coupling}")));
        }
        if n_max < 1 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        Ok(CavityCoupling { coupling, n_max })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of the joint qubit-cavity space.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }
}

/// Smallest Fock cutoff considered adequate for a state with the given mean
/// photon number in a cavity with the given coupling:
/// `<m> + 10 sqrt(<m>) + 20 + ceil(4 lambda^2 + 8 lambda)`.
pub fn required_truncation(mean_photons: f64, coupling: f64) -> usize {
    let m = mean_photons.max(0.0);
    (m + 10.0 * m.sqrt() + 20.0 + (4.0 * coupling * coupling + 8.0 * coupling).ceil()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Up,
    Down,
}

impl Branch {
    pub fn index(self) -> usize {
        match self {
            Branch::Up => 0,
            Branch::Down => 1,
        }
    }

    /// Eigenvalue of `sigma_z`.
    pub fn sz(self) -> f64 {
        match self {
            Branch::Up => 1.0,
            Branch::Down => -1.0,
        }
    }
}

/// Normalized qubit state in the `sigma_z` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    amps: [C64; 2],
}

impl QubitState {
    pub fn new(up: C64, down: C64) -> Result<Self> {
        let norm = up.norm_sqr() + down.norm_sqr();
        if (norm.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("qubit state", format!("norm {} != 1", norm.sqrt())));
        }
        Ok(QubitState { amps: [up, down] })
    }

    pub fn up() -> Self {
        QubitState { amps: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)] }
    }

    pub fn down() -> Self {
        QubitState { amps: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)] }
    }

    /// Normalizes `(up, down)`; fails for the zero vector.
    pub fn normalized(up: C64, down: C64) -> Result<Self> {
        let n = (up.norm_sqr() + down.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("qubit state", "cannot normalize a zero vector"));
        }
        Ok(QubitState { amps: [up / n, down / n] })
    }

    pub fn amplitude(&self, b: Branch) -> C64 {
        self.amps[b.index()]
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amps
    }
}

/// Amplitudes over `qubit (x) Fock(0..=n_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    n_max: usize,
    amps: Vec<C64>,
}

impl JointState {
    pub fn from_amplitudes(n_max: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 2 * (n_max + 1) {
            return Err(Error::invalid("joint state", format!("expected {} amplitudes, got {}", 2 * (n_max + 1), amps.len())));
        }
        let s = JointState { n_max, amps };
        if (s.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("joint state", format!("norm {} != 1", s.norm())));
        }
        Ok(s)
    }

    /// `qubit (x) oscillator`; the oscillator vector must have `n_max + 1`
    /// unit-norm entries.
    pub fn product(qubit: &QubitState, oscillator: &[f64]) -> Result<Self> {
        if oscillator.is_empty() {
            return Err(Error::invalid("oscillator state", "empty"));
        }
        let n_max = oscillator.len() - 1;
        let mut amps = Vec::with_capacity(2 * oscillator.len());
        for b in [Branch::Up, Branch::Down] {
            let q = qubit.amplitude(b);
            amps.extend(oscillator.iter().map(|&c| q * c));
        }
        JointState::from_amplitudes(n_max, amps)
    }

    pub(crate) fn from_raw(n_max: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 2 * (n_max + 1));
        JointState { n_max, amps }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn index(n_max: usize, b: Branch, m: usize) -> usize {
        b.index() * (n_max + 1) + m
    }

    pub fn amplitude(&self, b: Branch, m: usize) -> C64 {
        self.amps[Self::index(self.n_max, b, m)]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &JointState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Probability of finding the qubit in `b`.
    pub fn branch_population(&self, b: Branch) -> f64 {
        let start = b.index() * (self.n_max + 1);
        self.amps[start..start + self.n_max + 1].iter().map(|a| a.norm_sqr()).sum()
    }

    /// Weight in Fock levels `m >= m_min` summed over both branches.
    pub fn weight_above(&self, m_min: usize) -> f64 {
        [Branch::Up, Branch::Down]
            .iter()
            .flat_map(|&b| (m_min..=self.n_max).map(move |m| (b, m)))
            .map(|(b, m)| self.amplitude(b, m).norm_sqr())
            .sum()
    }
}

/// `theta = atan2(bias, gap)`.
pub fn mixing_angle(q: &QubitSpec) -> f64 {
    q.bias.atan2(q.gap)
}

/// `sqrt(bias^2 + gap^2)`.
pub fn qubit_energy(q: &QubitSpec) -> f64 {
    q.bias.hypot(q.gap)
}

/// `-(gap/2) sigma_x - [(bias + a cos(t + phase))/2] sigma_z`, basis `(up, down)`.
pub fn semiclassical_hamiltonian(q: &QubitSpec, d: &SemiclassicalDrive, t: f64) -> SymmetricMatrix {
    let z = -0.5 * (q.bias + d.amplitude * (t + d.phase).cos());
    let mut h = SymmetricMatrix::zeros(2);
    h.set(0, 0, z);
    h.set(1, 1, -z);
    h.set(0, 1, -0.5 * q.gap);
    h
}

/// Rabi-model Hamiltonian
/// `-(gap/2) sigma_x - (bias/2) sigma_z + a^dag a - lambda sigma_z (a + a^dag)`
/// in the truncated joint basis.
pub fn rabi_hamiltonian(q: &QubitSpec, c: &CavityCoupling) -> SymmetricMatrix {
    let n_max = c.n_max;
    let mut h = SymmetricMatrix::zeros(c.dim());
    for b in [Branch::Up, Branch::Down] {
        let sz = b.sz();
        for m in 0..=n_max {
            let i = JointState::index(n_max, b, m);
            h.set(i, i, -0.5 * q.bias * sz + m as f64);
            if m < n_max {
                let j = JointState::index(n_max, b, m + 1);
                h.set(i, j, -c.coupling * sz * ((m + 1) as f64).sqrt());
            }
        }
    }
    for m in 0..=n_max {
        h.set(JointState::index(n_max, Branch::Up, m), JointState::index(n_max, Branch::Down, m), -0.5 * q.gap);
    }
    h
}

/// `<j| exp(alpha (a^dag - a)) |m>` for real `alpha`.
fn displacement_element(j: usize, m: usize, alpha: f64) -> Result<f64> {
    let s = if alpha < 0.0 { -1.0 } else { 1.0 };
    let d = alpha.abs();
    let (lo, hi) = if j >= m { (m, j) } else { (j, m) };
    let k = hi - lo;
    let v = displaced_fock_overlap(lo as u64, k as u64, d)?;
    // <n+k|D(alpha)|n> = alpha^k (...); <n|D(alpha)|n+k> = (-alpha)^k (...)
    let sign = if j >= m { s } else { -s };
    Ok(if k % 2 == 1 { sign * v } else { v })
}

/// GRWA basis state `|b> (x) D(+-lambda)|m>`, the eigenstate of the
/// gap-free Hamiltonian centred on the `b`-dependent equilibrium
/// `+lambda` (up) or `-lambda` (down).
///
/// Fails when the displaced state leaks more than `1e-8` of its weight
/// past `n_max`.
pub fn grwa_state(b: Branch, m: usize, c: &CavityCoupling) -> Result<JointState> {
    let n_max = c.n_max;
    if m > n_max {
        return Err(Error::invalid("m", format!("Fock index {m} exceeds n_max = {n_max}")));
    }
    let alpha = b.sz() * c.coupling;
    let osc: Vec<f64> = (0..=n_max).map(|j| displacement_element(j, m, alpha)).collect::<Result<_>>()?;
    let weight: f64 = osc.iter().map(|v| v * v).sum();
    let deficit = 1.0 - weight;
    if deficit >= 1e-8 {
        return Err(Error::TruncationInadequate {
            n_max,
            detail: format!("displaced Fock state {m} loses {deficit:e} of its norm"),
        });
    }
    let scale = weight.sqrt().recip();
    let mut amps = vec![C64::new(0.0, 0.0); c.dim()];
    for (j, v) in osc.iter().enumerate() {
        amps[JointState::index(n_max, b, j)] = C64::new(v * scale, 0.0);
    }
    Ok(JointState::from_raw(n_max, amps))
}

/// `-+bias/2 + m - lambda^2` (minus for up).
pub fn grwa_energy(b: Branch, m: usize, q: &QubitSpec, c: &CavityCoupling) -> f64 {
    -0.5 * b.sz() * q.bias + m as f64 - c.coupling * c.coupling
}

fn coherent_raw(alpha: f64, n_max: usize) -> Vec<f64> {
    if alpha == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return v;
    }
    let ln_a = alpha.ln();
    (0..=n_max)
        .map(|m| (-0.5 * alpha * alpha + m as f64 * ln_a - 0.5 * ln_factorial(m as u64)).exp())
        .collect()
}

/// `1 - sum_{m <= n_max} |<m|alpha>|^2`.
pub fn coherent_norm_deficit(alpha: f64, n_max: usize) -> f64 {
    1.0 - coherent_raw(alpha.max(0.0), n_max).iter().map(|c| c * c).sum::<f64>()
}

/// Coherent state with real `alpha >= 0` (mean photon number `alpha^2`),
/// renormalized on `0..=n_max`. Requires `n_max >= alpha^2 + 10 alpha + 20`.
pub fn coherent_state(alpha: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    let need = alpha * alpha + 10.0 * alpha + 20.0;
    if (n_max as f64) < need {
        return Err(Error::TruncationInadequate {
            n_max,
            detail: format!("coherent state with alpha = {alpha} needs n_max >= {}", need.ceil()),
        });
    }
    let mut v = coherent_raw(alpha, n_max);
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter_mut().for_each(|c| *c /= norm);
    Ok(v)
}

pub fn fock_state(m: usize, n_max: usize) -> Result<Vec<f64>> {
    if m > n_max {
        return Err(Error::invalid("m", format!("Fock index {m} exceeds n_max = {n_max}")));
    }
    let mut v = vec![0.0; n_max + 1];
    v[m] = 1.0;
    Ok(v)
}
