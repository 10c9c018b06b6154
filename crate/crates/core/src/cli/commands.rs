use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::{Command, ConfigErrors, Reader, RunConfig};
use super::output::OutputTable;
use super::CliError;
use crate::dynamics::{self, TimeGrid, SAMPLES_PER_DRIVE_PERIOD};
use crate::error::Error;
use crate::models::{coherent_state, fock_state, required_truncation, CavityCoupling, JointState, QubitSpec, QubitState, SemiclassicalDrive};
use crate::specfun::{
    bessel_j, bessel_j_adiabatic_impulse, bessel_j_adiabatic_impulse_expanded, bessel_j_asymptotic, displaced_fock_overlap,
    MAX_BESSEL_ORDER,
};
use crate::spectra::{self, bessel_laguerre_identity_error, comparison_grid, fit_amplitude_shift, predicted_shift};

/// Vertical plotting offsets for stacked traces, keyed by mean photon number.
const PLOT_OFFSETS: [(f64, f64); 3] = [(1000.0, 0.25), (100.0, 0.5), (10.0, 0.75)];

pub(crate) struct Output {
    pub table: OutputTable,
    pub resolved: BTreeMap<String, String>,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn sorted_unique_u(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v.dedup();
    v
}

fn order(r: &mut Reader, key: &str, default: Option<&str>) -> Option<Vec<u32>> {
    let ks = r.uints(key, default)?;
    if let Some(k) = ks.iter().find(|&&k| k > MAX_BESSEL_ORDER as u64) {
        r.error(format!("`{key}` entries must be <= {MAX_BESSEL_ORDER}, got {k}"));
        return None;
    }
    Some(sorted_unique_u(ks).into_iter().map(|k| k as u32).collect())
}

/// Core errors raised while computing: invalid physics parameters are
/// configuration problems, the rest are numerical failures.
fn classify(context: &str, e: Error) -> CliError {
    if e.is_numerical() {
        CliError::Numerical { context: context.to_string(), source: e }
    } else {
        CliError::Config(ConfigErrors(vec![format!("{context}: {e}")]))
    }
}

pub(crate) fn run(cfg: &RunConfig, offsets: bool) -> Result<Output, CliError> {
    match cfg.command {
        Command::RabiFreq => rabi_freq(cfg),
        Command::Evolve => evolve(cfg, offsets),
        Command::FitShift => fit_shift(cfg),
        Command::BesselApprox => bessel_approx(cfg),
        Command::IdentitySweep => identity_sweep(cfg),
    }
}

fn rabi_freq(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut r = Reader::new(cfg);
    let gap = r.nonneg("gap", None);
    let coupling = r.nonneg("coupling", None);
    let ks = r.uints("k", None);
    let n = r.uints("n", None);
    let shift = r.real("shift", Some("0"));
    let view = r.choice("view", Some("signed"), &["signed", "magnitude"]);
    let k = match ks.as_deref() {
        Some([k]) if *k <= MAX_BESSEL_ORDER as u64 => Some(*k as u32),
        Some(_) => {
            r.error("`k` must be a single photon number <= 10000");
            None
        }
        None => None,
    };
    let bias = k.and_then(|k| r.nonneg("bias", Some(&k.to_string())));
    if let (Some(k), Some(b)) = (k, bias) {
        if b != k as f64 {
            r.error(format!("`bias` must equal `k` (resonance), got bias = {b}, k = {k}"));
        }
    }
    let resolved = r.finish()?;
    let (gap, coupling, k, n, shift, bias) = (gap.unwrap(), coupling.unwrap(), k.unwrap(), n.unwrap(), shift.unwrap(), bias.unwrap());
    let q = QubitSpec::new(gap, bias).map_err(|e| classify("qubit", e))?;
    let rows = comparison_grid(&q, coupling, k, &n, shift).map_err(|e| classify("comparison grid", e))?;
    let mag = view.as_deref() == Some("magnitude");
    let mut t = OutputTable::new(&["n", "omega_s", "omega_q", "a_eff"]);
    for row in rows {
        let (s, qv) = if mag { (row.omega_s.abs(), row.omega_q.abs()) } else { (row.omega_s, row.omega_q) };
        t.push(vec![row.n as f64, s, qv, row.a_eff]);
    }
    Ok(Output { table: t, resolved })
}

enum Picture {
    Semiclassical { drive: SemiclassicalDrive },
    Quantum { coupling: CavityCoupling, psi: JointState, mean: f64, quadrature: bool },
}

fn evolve(cfg: &RunConfig, offsets: bool) -> Result<Output, CliError> {
    let mut r = Reader::new(cfg);
    let picture = r.choice("picture", None, &["semiclassical", "quantum"]);
    let gap = r.nonneg("gap", None);
    let bias = r.nonneg("bias", None);
    let qubit = r.choice("qubit", Some("down"), &["down", "up"]);
    let qubit = qubit.map(|s| if s == "down" { QubitState::down() } else { QubitState::up() });

    // quantum: mean photon number and the amplitude it stands for
    let mut mean = None;
    let mut cavity = None;
    let mut fock_m = None;
    let mut amplitude = None;
    let mut coupling = None;
    match picture.as_deref() {
        Some("semiclassical") => {
            amplitude = r.nonneg("amplitude", None);
        }
        Some("quantum") => {
            cavity = r.choice("cavity", None, &["coherent", "fock"]);
            match cavity.as_deref() {
                Some("coherent") => mean = r.nonneg("mean_photons", None),
                Some("fock") => {
                    fock_m = r.uint("fock", None);
                    mean = fock_m.map(|m| m as f64);
                }
                _ => {}
            }
            if r.has("coupling") || !r.has("amplitude") {
                coupling = r.nonneg("coupling", None);
                if let (Some(l), Some(m)) = (coupling, mean) {
                    amplitude = Some(4.0 * l * m.sqrt());
                }
            } else {
                amplitude = r.nonneg("amplitude", None);
                if let (Some(a), Some(m)) = (amplitude, mean) {
                    if m > 0.0 {
                        coupling = Some(a / (4.0 * m.sqrt()));
                    } else {
                        r.error("`amplitude` cannot fix the coupling when the photon number is 0; give `coupling`");
                    }
                }
            }
        }
        _ => {}
    }
    let phase = if picture.as_deref() == Some("semiclassical") { r.real("phase", Some("0")) } else { Some(0.0) };

    // time grid: either explicit or in Rabi periods of the semiclassical formula
    let per_period = r.uint("samples_per_period", Some(&SAMPLES_PER_DRIVE_PERIOD.to_string()));
    let t0 = r.real("t0", Some("0"));
    let mut grid = None;
    if r.has("rabi_periods") || !r.has("t1") {
        let periods = r.nonneg("rabi_periods", None);
        let k = bias.filter(|b| b.fract() == 0.0).map(|b| b as u64);
        if bias.is_some() && k.is_none() {
            r.error("`rabi_periods` needs an integer `bias` (k-photon resonance)");
        }
        let k = r.uint("k", k.map(|k| k.to_string()).as_deref());
        if let (Some(p), Some(g), Some(b), Some(a), Some(k), Some(spp)) = (periods, gap, bias, amplitude, k, per_period) {
            let omega = QubitSpec::new(g, b).and_then(|q| spectra::rabi_freq_semiclassical(&q, a, k as u32));
            match omega.and_then(|w| TimeGrid::rabi_periods(p, w, spp as usize)) {
                Ok(gr) => grid = Some(gr),
                Err(e) => r.error(format!("`rabi_periods`: {e}")),
            }
        }
    } else {
        let t1 = r.real("t1", None);
        let samples = match (t0, t1, per_period) {
            (Some(t0), Some(t1), Some(spp)) => {
                let d = ((t1 - t0).max(0.0) / std::f64::consts::TAU * spp as f64).ceil() as u64 + 1;
                r.uint("samples", Some(&d.max(2).to_string()))
            }
            _ => r.uint("samples", None),
        };
        if let (Some(t0), Some(t1), Some(n)) = (t0, t1, samples) {
            match TimeGrid::new(t0, t1, n as usize) {
                Ok(gr) => grid = Some(gr),
                Err(e) => r.error(format!("time grid: {e}")),
            }
        }
    }

    let quadrature = if picture.as_deref() == Some("quantum") { r.flag("quadrature", false) } else { Some(false) };
    let mut built = None;
    if let (Some(p), Some(qs)) = (picture.as_deref(), qubit.as_ref()) {
        match p {
            "semiclassical" => {
                if let (Some(a), Some(ph)) = (amplitude, phase) {
                    match SemiclassicalDrive::new(a, ph) {
                        Ok(drive) => built = Some(Picture::Semiclassical { drive }),
                        Err(e) => r.error(format!("drive: {e}")),
                    }
                }
            }
            _ => {
                if let (Some(l), Some(m)) = (coupling, mean) {
                    let default = required_truncation(m, l).to_string();
                    if let Some(n_max) = r.uint("n_max", Some(&default)) {
                        let n_max = n_max as usize;
                        let osc = match (cavity.as_deref(), fock_m) {
                            (Some("fock"), Some(fm)) => fock_state(fm as usize, n_max),
                            _ => coherent_state(m.sqrt(), n_max),
                        };
                        let state = osc.and_then(|o| JointState::product(qs, &o));
                        match (CavityCoupling::new(l, n_max), state) {
                            (Ok(c), Ok(psi)) => {
                                built = Some(Picture::Quantum { coupling: c, psi, mean: m, quadrature: quadrature.unwrap_or(false) })
                            }
                            (Err(e), _) | (_, Err(e)) => r.error(format!("`n_max` = {n_max}: {e}")),
                        }
                    }
                }
            }
        }
    }

    let offset = if offsets {
        match (&built, r.has("offset")) {
            (_, true) => r.real("offset", None),
            (Some(Picture::Semiclassical { .. }), false) => r.real("offset", Some("0")),
            (Some(Picture::Quantum { mean, .. }), false) => match PLOT_OFFSETS.iter().find(|(n, _)| (n - mean).abs() < 1e-9) {
                Some((_, o)) => r.real("offset", Some(&o.to_string())),
                None => {
                    r.error("`--offsets` needs `offset` unless mean_photons is one of 1000, 100, 10");
                    None
                }
            },
            (None, false) => None,
        }
    } else {
        None
    };

    let resolved = r.finish()?;
    let (gap, bias, grid, qubit) = (gap.unwrap(), bias.unwrap(), grid.unwrap(), qubit.unwrap());
    let q = QubitSpec::new(gap, bias).map_err(|e| classify("qubit", e))?;

    let (trace, x) = match built.unwrap() {
        Picture::Semiclassical { drive } => {
            (dynamics::propagate_semiclassical(&q, &drive, &qubit, &grid).map_err(|e| classify("semiclassical propagation", e))?, None)
        }
        Picture::Quantum { coupling, psi, quadrature, .. } => {
            let ctx = format!("quantum propagation (n_max = {})", coupling.n_max());
            let p = dynamics::SpectralPropagator::new(&q, &coupling).map_err(|e| classify(&ctx, e))?;
            let tr = p.population_trace(&psi, &grid).map_err(|e| classify(&ctx, e))?;
            let x = if quadrature { Some(p.quadrature_trace(&psi, &grid).map_err(|e| classify(&ctx, e))?) } else { None };
            (tr, x)
        }
    };

    let mut header = vec!["t", "p_down"];
    if x.is_some() {
        header.push("x_mean");
    }
    if offset.is_some() {
        header.push("p_down_shifted");
    }
    let mut t = OutputTable::new(&header);
    for i in 0..trace.len() {
        let mut row = vec![trace.times[i], trace.p_down[i]];
        if let Some(x) = &x {
            row.push(x.x_mean[i]);
        }
        if let Some(o) = offset {
            row.push(trace.p_down[i] - o);
        }
        t.push(row);
    }
    Ok(Output { table: t, resolved })
}

fn fit_shift(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut r = Reader::new(cfg);
    let gap = r.nonneg("gap", Some("1"));
    let couplings = r.reals("coupling", None);
    if let Some(c) = couplings.as_ref().and_then(|c| c.iter().find(|x| **x < 0.0)) {
        r.error(format!("`coupling` entries must be >= 0, got {c}"));
    }
    let ks = order(&mut r, "k", None);
    let n = r.uints("n", None);
    let resolved = r.finish()?;
    let (gap, couplings, ks, n) = (gap.unwrap(), sorted_unique(couplings.unwrap()), ks.unwrap(), n.unwrap());

    let cells: Vec<(f64, u32)> = couplings.iter().flat_map(|&l| ks.iter().map(move |&k| (l, k))).collect();
    let results: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(l, k)| {
            let pred = predicted_shift(l, k);
            match QubitSpec::new(gap, k as f64).and_then(|q| fit_amplitude_shift(&q, l, k, &n)) {
                Ok(f) => vec![l, k as f64, f.offset, f.residual, pred, 1.0],
                Err(_) => vec![l, k as f64, f64::NAN, f64::NAN, pred, 0.0],
            }
        })
        .collect();
    let mut t = OutputTable::new(&["coupling", "k", "offset", "residual", "predicted", "ok"]);
    let failed = results.iter().filter(|r| r[5] == 0.0).count();
    for row in results {
        t.push(row);
    }
    t.metadata.insert("failed_cells".into(), failed.into());
    Ok(Output { table: t, resolved })
}

fn or_nan(v: crate::error::Result<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn bessel_approx(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut r = Reader::new(cfg);
    let ks = order(&mut r, "k", None);
    let xs = r.reals("x", None);
    if let Some(x) = xs.as_ref().and_then(|x| x.iter().find(|x| **x < 0.0)) {
        r.error(format!("`x` entries must be >= 0, got {x}"));
    }
    let resolved = r.finish()?;
    let (ks, xs) = (ks.unwrap(), sorted_unique(xs.unwrap()));
    let cells: Vec<(u32, f64)> = ks.iter().flat_map(|&k| xs.iter().map(move |&x| (k, x))).collect();
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(k, x)| {
            let exact = bessel_j(k, x).unwrap_or(f64::NAN);
            let a = or_nan(bessel_j_asymptotic(k, x));
            let b = or_nan(bessel_j_adiabatic_impulse(k, x));
            let c = or_nan(bessel_j_adiabatic_impulse_expanded(k, x));
            vec![k as f64, x, exact, a, b, c, (a - exact).abs(), (b - exact).abs(), (c - exact).abs()]
        })
        .collect();
    let mut t = OutputTable::new(&[
        "k",
        "x",
        "exact",
        "asymptotic",
        "adiabatic_impulse",
        "expanded",
        "err_asymptotic",
        "err_adiabatic_impulse",
        "err_expanded",
    ]);
    for row in rows {
        t.push(row);
    }
    Ok(Output { table: t, resolved })
}

fn identity_sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut r = Reader::new(cfg);
    let xs = r.reals("x", None);
    if let Some(x) = xs.as_ref().and_then(|x| x.iter().find(|x| !(**x > 0.0))) {
        r.error(format!("`x` entries must be > 0, got {x}"));
    }
    let n = r.uints("n", None);
    if let Some(m) = n.as_ref().and_then(|n| n.iter().find(|&&m| m > 900_000)) {
        r.error(format!("`n` entries must be <= 900000, got {m}"));
    }
    let ks = order(&mut r, "k", None);
    let resolved = r.finish()?;
    let (xs, n, ks) = (sorted_unique(xs.unwrap()), sorted_unique_u(n.unwrap()), ks.unwrap());
    let mut cells = Vec::with_capacity(xs.len() * n.len() * ks.len());
    for &x in &xs {
        for &m in &n {
            cells.extend(ks.iter().map(|&k| (x, m, k)));
        }
    }
    let rows: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(x, m, k)| {
            let lhs = or_nan(bessel_j(k, 4.0 * x * (m as f64).sqrt()));
            let rhs = or_nan(displaced_fock_overlap(m, k as u64, 2.0 * x));
            let err = or_nan(bessel_laguerre_identity_error(x, m, k));
            vec![x, m as f64, k as f64, lhs, rhs, err]
        })
        .collect();
    let mut t = OutputTable::new(&["x", "n", "k", "bessel", "laguerre", "rel_error"]);
    for row in rows {
        t.push(row);
    }
    Ok(Output { table: t, resolved })
}
