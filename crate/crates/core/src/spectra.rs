//! Rabi frequencies in the semiclassical and quantum pictures, the
//! exact-diagonalization splitting they are checked against, and the
//! semiclassical/quantum amplitude correspondence.
//!
//! Frequencies are signed throughout: neither the Bessel nor the Laguerre
//! expression is passed through an absolute value, so accidental agreement
//! with opposite signs stays visible.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{grwa_state, mixing_angle, rabi_hamiltonian, Branch, CavityCoupling, QubitSpec};
use crate::specfun::{bessel_j, displaced_fock_overlap};

/// Minimum fraction of the GRWA pair subspace the chosen eigenvectors must
/// capture in [`exact_splitting`].
pub const PAIR_OVERLAP_THRESHOLD: f64 = 0.8;

/// Denominator floor for relative errors, in units of the gap.
pub const RELATIVE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: u64,
    pub omega_s: f64,
    pub omega_q: f64,
    pub a_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftFitResult {
    pub offset: f64,
    /// RMS of the signed frequency differences at the fitted offset.
    pub residual: f64,
}

/// `(a/2) cos(theta)`, weak resonant driving.
pub fn rabi_freq_weak_semiclassical(q: &QubitSpec, a: f64) -> f64 {
    0.5 * a * mixing_angle(q).cos()
}

/// Jaynes-Cummings vacuum-Rabi splitting `2 lambda cos(theta) sqrt(n)`.
pub fn jc_splitting(n: u64, q: &QubitSpec, coupling: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "the JC splitting needs n >= 1"));
    }
    Ok(2.0 * coupling * mixing_angle(q).cos() * (n as f64).sqrt())
}

/// `gap * J_k(a)`.
pub fn rabi_freq_semiclassical(q: &QubitSpec, a: f64, k: u32) -> Result<f64> {
    Ok(q.gap() * bessel_j(k, a)?)
}

/// `gap * e^{-2 lambda^2} (2 lambda)^k sqrt(n!/(n+k)!) L_n^k(4 lambda^2)`.
pub fn rabi_freq_quantum(q: &QubitSpec, coupling: f64, n: u64, k: u32) -> Result<f64> {
    Ok(q.gap() * displaced_fock_overlap(n, k as u64, 2.0 * coupling)?)
}

fn check_resonance(q: &QubitSpec, k: u32) -> Result<()> {
    if (q.bias() - k as f64).abs() > 1e-12 {
        return Err(Error::OffResonance { bias: q.bias(), k });
    }
    Ok(())
}

/// Splitting of the resonant GRWA pair `{(up, n+k), (down, n)}` from exact
/// diagonalization of the truncated Rabi Hamiltonian.
pub fn exact_splitting(q: &QubitSpec, c: &CavityCoupling, n: u64, k: u32) -> Result<f64> {
    check_resonance(q, k)?;
    let up = grwa_state(Branch::Up, (n + k as u64) as usize, c)?;
    let down = grwa_state(Branch::Down, n as usize, c)?;
    let eig = rabi_hamiltonian(q, c).eigh()?;
    let re = |s: &crate::models::JointState| s.amplitudes().iter().map(|a| a.re).collect::<Vec<f64>>();
    let pu = eig.project(&re(&up));
    let pd = eig.project(&re(&down));
    let weight: Vec<f64> = pu.iter().zip(&pd).map(|(a, b)| a * a + b * b).collect();

    let mut order: Vec<usize> = (0..weight.len()).collect();
    order.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]));
    let (i, j) = (order[0], order[1]);
    let captured = 0.5 * (weight[i] + weight[j]);
    if captured < PAIR_OVERLAP_THRESHOLD {
        return Err(Error::PairIdentification { weight: captured, threshold: PAIR_OVERLAP_THRESHOLD });
    }
    Ok((eig.values[i] - eig.values[j]).abs())
}

/// `4 lambda sqrt(n + s)`; `s = 0` is the equal-intensity correspondence.
pub fn equivalent_amplitude(coupling: f64, n: u64, shift: f64) -> Result<f64> {
    let arg = n as f64 + shift;
    if !(arg >= 0.0) {
        return Err(Error::invalid("shift", format!("n + s = {arg} < 0")));
    }
    Ok(4.0 * coupling * arg.sqrt())
}

/// Empirical shift `k/2 + 1/2 - lambda^2/3` that best aligns the two
/// pictures.
pub fn predicted_shift(coupling: f64, k: u32) -> f64 {
    0.5 * k as f64 + 0.5 - coupling * coupling / 3.0
}

/// One `ComparisonRow` per photon number (sorted, deduplicated). Rows are
/// evaluated in parallel.
pub fn comparison_grid(q: &QubitSpec, coupling: f64, k: u32, n_list: &[u64], shift: f64) -> Result<Vec<ComparisonRow>> {
    check_resonance(q, k)?;
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns.par_iter()
        .map(|&n| {
            let a_eff = equivalent_amplitude(coupling, n, shift)?;
            Ok(ComparisonRow {
                n,
                omega_s: rabi_freq_semiclassical(q, a_eff, k)?,
                omega_q: rabi_freq_quantum(q, coupling, n, k)?,
                a_eff,
            })
        })
        .collect()
}

/// Photon-number axis of the frequency comparisons:
/// `0..=10`, `10..=100` step 5, `100..=1000` step 25.
pub fn photon_number_grid() -> Vec<u64> {
    let mut ns: Vec<u64> = (0..=10).collect();
    ns.extend((10..=100).step_by(5));
    ns.extend((100..=1000).step_by(25));
    ns.sort_unstable();
    ns.dedup();
    ns
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgreementMode {
    /// Compare the signed frequencies.
    Signed,
    /// Compare magnitudes; opposite-sign equal-magnitude points agree.
    Magnitude,
}

/// Local oscillation amplitude of `J_k` around argument `a`, capped at 1.
pub fn bessel_envelope(a: f64) -> f64 {
    if a <= 2.0 / std::f64::consts::PI {
        1.0
    } else {
        (2.0 / (std::f64::consts::PI * a)).sqrt()
    }
}

/// Difference between the two pictures relative to the local size of the
/// Bessel oscillation, `|omega_s - omega_q| / (gap * envelope(a_eff))`.
pub fn relative_difference(row: &ComparisonRow, gap: f64, mode: AgreementMode) -> f64 {
    let diff = match mode {
        AgreementMode::Signed => row.omega_s - row.omega_q,
        AgreementMode::Magnitude => row.omega_s.abs() - row.omega_q.abs(),
    };
    diff.abs() / (gap * bessel_envelope(row.a_eff))
}

/// Smallest `n` in the grid from which every row (that one and all larger
/// ones) agrees within `tol`; `None` if even the last row disagrees.
pub fn agreement_onset(rows: &[ComparisonRow], gap: f64, tol: f64, mode: AgreementMode) -> Option<u64> {
    let mut onset = None;
    for row in rows.iter().rev() {
        if relative_difference(row, gap, mode) <= tol {
            onset = Some(row.n);
        } else {
            break;
        }
    }
    onset
}

/// Sum of squared signed differences between the shifted semiclassical and
/// the quantum frequencies.
fn shift_objective(q: &QubitSpec, coupling: f64, k: u32, n_list: &[u64], quantum: &[f64], s: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (&n, &wq) in n_list.iter().zip(quantum) {
        let ws = rabi_freq_semiclassical(q, equivalent_amplitude(coupling, n, s)?, k)?;
        acc += (ws - wq).powi(2);
    }
    Ok(acc)
}

/// Golden-section minimization of `f` on `[lo, hi]`.
pub fn golden_section_minimize<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Fits the offset `s` in `a = 4 lambda sqrt(n + s)` that best matches the
/// semiclassical frequencies to the quantum ones over `n_list`.
///
/// The bracket is `[-2, k/2 + 2]`, raised where needed so that `n + s >= 0`
/// for every `n` in the list.
pub fn fit_amplitude_shift(q: &QubitSpec, coupling: f64, k: u32, n_list: &[u64]) -> Result<ShiftFitResult> {
    if n_list.is_empty() {
        return Err(Error::invalid("n_list", "must not be empty"));
    }
    let n_min = *n_list.iter().min().unwrap() as f64;
    let lo = (-2.0f64).max(-n_min);
    let hi = 0.5 * k as f64 + 2.0;
    let quantum: Vec<f64> = n_list.iter().map(|&n| rabi_freq_quantum(q, coupling, n, k)).collect::<Result<_>>()?;

    // flatness check on a coarse scan of the bracket
    let probes: Vec<f64> = (0..=16)
        .map(|i| shift_objective(q, coupling, k, n_list, &quantum, lo + (hi - lo) * i as f64 / 16.0))
        .collect::<Result<_>>()?;
    let pmax = probes.iter().cloned().fold(f64::MIN, f64::max);
    let pmin = probes.iter().cloned().fold(f64::MAX, f64::min);
    if pmax - pmin <= 1e-15 * pmax.max(f64::MIN_POSITIVE) {
        return Err(Error::FitDegenerate { lo, hi });
    }

    let (offset, best) = golden_section_minimize(|s| shift_objective(q, coupling, k, n_list, &quantum, s), lo, hi, 1e-9)?;
    Ok(ShiftFitResult { offset, residual: (best / n_list.len() as f64).sqrt() })
}

/// How well `J_k(4x sqrt(n))` is approximated by its Laguerre counterpart
/// `e^{-2x^2} (2x)^k sqrt(n!/(n+k)!) L_n^k(4x^2)`; the absolute difference
/// over `max(|J_k|, 1e-3)`.
pub fn bessel_laguerre_identity_error(x: f64, n: u64, k: u32) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_laguerre_identity_error", format!("requires x > 0, got {x}")));
    }
    let j = bessel_j(k, 4.0 * x * (n as f64).sqrt())?;
    let l = displaced_fock_overlap(n, k as u64, 2.0 * x)?;
    Ok((j - l).abs() / j.abs().max(RELATIVE_FLOOR))
}
