//! Membrane-in-the-middle: a mobile membrane between two identical end
//! mirrors, scanned over membrane position x and cavity-length change ΔL_c,
//! and compared against the coupled-cavities model.
//!
//! Geometry: `[mirror, L/2 + ΔL_c/2 − x, membrane, L/2 + ΔL_c/2 + x, mirror]`.
//! ΔL_c is split symmetrically between the two gaps and x moves the membrane
//! only. The base length L is the configured cavity length trimmed by less
//! than half a wavelength so that the bare cavity (transparent membrane) is
//! exactly resonant at ΔL_c = 0, with a node of the resonant mode at x = 0.

use crate::consts::C_LIGHT;
use crate::elements::{Chain, Element, Polarisability, PumpSpec};
use crate::error::{Error, Result};
use crate::observables::{evaluate_point, PointReport};
use crate::statics::{
    resonance_phases, resonance_track, solve_static, static_force, IntensityMeasure,
};
use crate::units::Length;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MimConfig {
    /// Pump wavelength, m.
    pub wavelength: Length,
    /// Nominal cavity length L_c, m.
    pub cavity_length: Length,
    /// Membrane polarisability (real, ≤ 0).
    pub membrane_zeta: f64,
    /// End-mirror polarisability (real).
    pub mirror_zeta: f64,
    /// Input power from the left, W.
    pub input_power: f64,
    /// Intensity reported by scans.
    pub intensity: IntensityMeasure,
}

impl Default for MimConfig {
    fn default() -> Self {
        MimConfig {
            wavelength: Length(1064e-9),
            cavity_length: Length(0.067),
            membrane_zeta: -1.0,
            mirror_zeta: -30.0,
            input_power: 1.0,
            intensity: IntensityMeasure::Coherent,
        }
    }
}

impl MimConfig {
    pub fn with_membrane(&self, zeta: f64) -> Self {
        MimConfig {
            membrane_zeta: zeta,
            ..self.clone()
        }
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI / self.wavelength.0
    }

    pub fn lambda(&self) -> f64 {
        self.wavelength.0
    }

    pub fn l_c(&self) -> f64 {
        self.cavity_length.0
    }

    /// All invariant violations, empty when valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let lambda = self.wavelength.0;
        if !(lambda.is_finite() && lambda > 0.0) {
            out.push(format!("mim.wavelength must be positive, got {lambda} m"));
        }
        let l = self.cavity_length.0;
        if !(l.is_finite() && l > 0.0) {
            out.push(format!("mim.cavity_length must be positive, got {l} m"));
        } else if lambda.is_finite() && l < 10.0 * lambda {
            out.push(format!(
                "mim.cavity_length {l} m must exceed ten wavelengths for |x| << L_c to hold"
            ));
        }
        if !(self.membrane_zeta.is_finite() && self.membrane_zeta <= 0.0) {
            out.push(format!(
                "mim.membrane_zeta must be real and <= 0, got {}",
                self.membrane_zeta
            ));
        }
        if !(self.mirror_zeta.is_finite() && self.mirror_zeta != 0.0) {
            out.push(format!(
                "mim.mirror_zeta must be finite and non-zero, got {}",
                self.mirror_zeta
            ));
        }
        if !(self.input_power.is_finite() && self.input_power >= 0.0) {
            out.push(format!(
                "mim.input_power must be >= 0, got {} W",
                self.input_power
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p.join("; ")))
        }
    }

    fn mirror(&self) -> Polarisability {
        Polarisability::real(self.mirror_zeta).expect("validated")
    }

    /// Cavity length actually used at ΔL_c = 0: the resonant length closest
    /// to L_c, accounting for the reflection phase of the end mirrors.
    pub fn base_length(&self) -> f64 {
        let k0 = self.k0();
        let offset = self.mirror().reflection().arg() - PI;
        let m = ((k0 * self.l_c() + offset) / (2.0 * PI)).round();
        (2.0 * PI * m - offset) / k0
    }

    pub fn pump(&self) -> Result<PumpSpec> {
        PumpSpec::left(self.input_power, self.lambda())
    }

    /// ΔL_c positions of the two resonance branches at `x`, principal values
    /// in (−λ/2, λ/2]; each branch repeats with period λ in ΔL_c.
    pub fn resonance_dlc(&self, x: f64) -> (f64, f64) {
        let p = resonance_phases(self.membrane_zeta, x, self.k0());
        (p.plus / self.k0(), p.minus / self.k0())
    }
}

/// The five-element chain at membrane position `x` and length change `dlc`.
pub fn build_mim(config: &MimConfig, x: f64, dlc: f64) -> Result<Chain> {
    config.validate()?;
    let lambda = config.lambda();
    if x.is_nan() || x.abs() > lambda {
        return Err(Error::DisplacementTooLarge { x: x.abs(), lambda });
    }
    let half = config.base_length() / 2.0 + dlc / 2.0;
    let mirror = Element::Scatterer(config.mirror());
    let membrane = Element::Scatterer(Polarisability::real(config.membrane_zeta)?);
    Chain::new(
        vec![
            mirror,
            Element::segment(half - x)?,
            membrane,
            Element::segment(half + x)?,
            mirror,
        ],
        2,
        config.k0(),
    )
}

/// Evenly spaced samples `start..=stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: Length,
    pub stop: Length,
    pub count: usize,
}

/// Largest accepted number of grid points.
pub const MAX_GRID_POINTS: usize = 50_000_000;

impl Axis {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Axis {
            start: Length(start),
            stop: Length(stop),
            count,
        }
    }

    pub fn step(&self) -> f64 {
        if self.count > 1 {
            (self.stop.0 - self.start.0) / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count && self.count > 1 {
            self.stop.0
        } else {
            self.start.0 + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    fn problems(&self, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.start.0.is_finite() && self.stop.0.is_finite()) {
            out.push(format!("{name} range must be finite"));
        }
        if self.count == 0 {
            out.push(format!("{name} needs at least one sample"));
        }
        if self.count > 1
            && self.stop.0.partial_cmp(&self.start.0) != Some(std::cmp::Ordering::Greater)
        {
            out.push(format!("{name} range must be increasing (positive step)"));
        }
        out
    }
}

/// Rectangular grid over membrane position x and cavity-length change ΔL_c.
/// ΔL_c = λ spans two free spectral ranges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanGrid {
    pub x: Axis,
    pub dlc: Axis,
}

impl ScanGrid {
    pub fn len(&self) -> usize {
        self.x.count.saturating_mul(self.dlc.count)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major order: x is the slow index, ΔL_c the fast one.
    pub fn point(&self, index: usize) -> (f64, f64) {
        (
            self.x.value(index / self.dlc.count),
            self.dlc.value(index % self.dlc.count),
        )
    }

    pub fn problems(&self, config: &MimConfig) -> Vec<String> {
        let mut out = self.x.problems("grid.x");
        out.extend(self.dlc.problems("grid.dlc"));
        let lambda = config.lambda();
        for v in [self.x.start.0, self.x.stop.0] {
            if v.abs() > lambda {
                out.push(format!(
                    "grid.x endpoint {v} m exceeds one wavelength; the model assumes |x| << L_c"
                ));
            }
        }
        if self.len() > MAX_GRID_POINTS {
            out.push(format!(
                "grid has {} points, more than the limit of {MAX_GRID_POINTS}",
                self.len()
            ));
        }
        out
    }
}

/// One scan sample. `None` marks a value that could not be computed
/// (singular solve) or is undefined (temperature outside the cooling region).
#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub x: f64,
    pub dlc: f64,
    pub intensity: Option<f64>,
    pub f0: Option<f64>,
    pub friction: Option<f64>,
    pub diffusion: Option<f64>,
    pub kbt: Option<f64>,
    pub error: Option<String>,
}

impl ScanPoint {
    fn from_report(x: f64, dlc: f64, measure: IntensityMeasure, r: Result<PointReport>) -> Self {
        match r {
            Ok(r) => ScanPoint {
                x,
                dlc,
                intensity: Some(r.intensity(measure)),
                f0: Some(r.force.f0),
                friction: Some(r.force.friction),
                diffusion: Some(r.diffusion),
                kbt: r.temperature.map(|t| t.kbt),
                error: None,
            },
            Err(e) => ScanPoint {
                x,
                dlc,
                intensity: None,
                f0: None,
                friction: None,
                diffusion: None,
                kbt: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// Predicted resonance position of one branch at one x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlayPoint {
    pub x: f64,
    /// +1 or −1.
    pub branch: i8,
    /// Resonance shift Δω, rad/s, unwrapped along x.
    pub delta_omega: f64,
    /// ΔL_c = (L_c/ω)Δω folded into the grid window, m.
    pub dlc: f64,
}

#[derive(Clone, Debug)]
pub struct ScanTable {
    pub config: MimConfig,
    pub grid: ScanGrid,
    pub points: Vec<ScanPoint>,
    pub overlay: Vec<OverlayPoint>,
}

pub const SCAN_HEADER: [&str; 7] = ["x", "dLc", "intensity", "F0", "dFdv", "D", "kBT"];
pub const OVERLAY_HEADER: [&str; 4] = ["x", "branch", "delta_omega", "dLc"];

/// Formats a float with 17 significant digits (round-trips exactly).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Runs `f` on a dedicated pool of `workers` threads (0 = one per core).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Intensity, force, friction, diffusion and temperature over the grid.
pub fn scan(config: &MimConfig, grid: &ScanGrid, workers: usize) -> Result<ScanTable> {
    let mut problems = config.problems();
    problems.extend(grid.problems(config));
    if !problems.is_empty() {
        return Err(Error::Config(problems.join("; ")));
    }
    let pump = config.pump()?;
    let points = with_workers(workers, || {
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (x, dlc) = grid.point(i);
                let r = build_mim(config, x, dlc).and_then(|chain| evaluate_point(&chain, &pump));
                ScanPoint::from_report(x, dlc, config.intensity, r)
            })
            .collect()
    })?;
    Ok(ScanTable {
        config: config.clone(),
        grid: *grid,
        points,
        overlay: overlay(config, grid),
    })
}

/// Predicted resonance lines over the grid window.
pub fn overlay(config: &MimConfig, grid: &ScanGrid) -> Vec<OverlayPoint> {
    let xs = grid.x.values();
    let track = resonance_track(config.membrane_zeta, &xs, config.l_c(), config.k0());
    let (lo, hi) = (grid.dlc.start.0, grid.dlc.stop.0);
    let lambda = config.lambda();
    let to_dlc = config.l_c() / (config.k0() * C_LIGHT);
    let mut out = Vec::new();
    for (x, b) in xs.iter().zip(&track) {
        for (branch, dw) in [(1i8, b.plus), (-1i8, b.minus)] {
            let base = dw * to_dlc;
            let first = ((lo - base) / lambda).ceil() as i64;
            let last = ((hi - base) / lambda).floor() as i64;
            for n in first..=last {
                out.push(OverlayPoint {
                    x: *x,
                    branch,
                    delta_omega: dw,
                    dlc: base + n as f64 * lambda,
                });
            }
        }
    }
    out
}

impl ScanTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(SCAN_HEADER).map_err(io)?;
        for p in &self.points {
            out.write_record([
                fmt_f64(p.x),
                fmt_f64(p.dlc),
                fmt_opt(p.intensity),
                fmt_opt(p.f0),
                fmt_opt(p.friction),
                fmt_opt(p.diffusion),
                fmt_opt(p.kbt),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_overlay_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(OVERLAY_HEADER).map_err(io)?;
        for o in &self.overlay {
            out.write_record([
                fmt_f64(o.x),
                o.branch.to_string(),
                fmt_f64(o.delta_omega),
                fmt_f64(o.dlc),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Metadata accompanying the CSV: configuration, grid, version and units.
    pub fn metadata(&self) -> serde_json::Value {
        let failures: Vec<_> = self
            .points
            .iter()
            .filter_map(|p| {
                p.error
                    .as_ref()
                    .map(|e| serde_json::json!({ "x": p.x, "dLc": p.dlc, "error": e }))
            })
            .collect();
        serde_json::json!({
            "schema_version": crate::chain_file::SCHEMA_VERSION,
            "code_version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "base_length": self.config.base_length(),
            "grid": self.grid,
            "order": "row-major: x slow, dLc fast",
            "columns": SCAN_HEADER,
            "units": {
                "x": "m", "dLc": "m", "intensity": "W", "F0": "N",
                "dFdv": "N s/m", "D": "N^2 s", "kBT": "J",
            },
            "missing_values": "empty field; kBT is empty wherever dFdv >= 0",
            "failures": failures,
        })
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub fn refine_peak(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Full width at half maximum of the peak of `f` at `peak`, found by
/// expanding outwards from `guess` and bisecting each half-maximum crossing.
pub fn full_width_half_max(f: impl Fn(f64) -> f64, peak: f64, guess: f64) -> f64 {
    let half = f(peak) / 2.0;
    let crossing = |dir: f64| {
        let mut inner = 0.0;
        let mut outer = guess;
        while f(peak + dir * outer) > half {
            inner = outer;
            outer *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (inner + outer);
            if f(peak + dir * mid) > half {
                inner = mid;
            } else {
                outer = mid;
            }
            if outer - inner <= 1e-12 * outer {
                break;
            }
        }
        0.5 * (inner + outer)
    };
    crossing(1.0) + crossing(-1.0)
}

/// Bare-cavity resonance measured on the TMM chain (transparent membrane).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Linewidth {
    /// Position of the resonance in ΔL_c, m.
    pub peak_dlc: f64,
    /// Full width at half maximum in ΔL_c, m.
    pub fwhm_dlc: f64,
    /// Half-width at half maximum in angular frequency, rad/s.
    pub kappa: f64,
}

pub fn bare_linewidth(config: &MimConfig) -> Result<Linewidth> {
    let bare = config.with_membrane(0.0);
    bare.validate()?;
    let pump = bare.pump()?;
    let k0 = bare.k0();
    let f = |dlc: f64| {
        build_mim(&bare, 0.0, dlc)
            .and_then(|c| solve_static(&c, &pump))
            .map(|s| s.intensity(IntensityMeasure::Incoherent, k0))
            .unwrap_or(f64::NAN)
    };
    // Analytic estimate of the width sets the search scale.
    let r2 = Polarisability::real(bare.mirror_zeta)?
        .reflection()
        .norm_sqr();
    let estimate = bare.lambda() / (2.0 * PI) * (1.0 - r2) / r2.sqrt();
    let span = 5.0 * estimate;
    let peak = refine_peak(f, -span, span, estimate * 1e-9);
    let fwhm = full_width_half_max(f, peak, estimate / 4.0);
    Ok(Linewidth {
        peak_dlc: peak,
        fwhm_dlc: fwhm,
        kappa: k0 * C_LIGHT / bare.l_c() * fwhm / 2.0,
    })
}

/// Parameters of the coupled-cavities model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoupledCavityParams {
    /// Tunnelling rate g = c|t|/L_c, rad/s.
    pub g: f64,
    /// Cavity half-linewidth, rad/s.
    pub kappa: f64,
    /// Detuning from the centre of the resonance pair at x = 0, rad/s.
    pub delta: f64,
    /// Linear coupling, fixed at −2k₀c/L_c, rad/(s·m).
    pub omega_prime: f64,
    /// Input power, W.
    pub power: f64,
}

impl CoupledCavityParams {
    /// Model parameters matching the MiM chain at length change `dlc`.
    ///
    /// Δ is measured from the midpoint of the two resonances at x = 0,
    /// ΔL_c = atan(1/ζ)/k₀, and wrapped into one period λ of ΔL_c.
    pub fn for_mim(config: &MimConfig, kappa: f64, dlc: f64) -> Self {
        let k0 = config.k0();
        let lambda = config.lambda();
        let l_c = config.l_c();
        let zeta = config.membrane_zeta;
        let t = 1.0 / (1.0 + zeta * zeta).sqrt();
        let reference = if zeta == 0.0 {
            -lambda / 4.0
        } else {
            (1.0 / zeta).atan() / k0
        };
        let wrapped = (dlc - reference + lambda / 2.0).rem_euclid(lambda) - lambda / 2.0;
        CoupledCavityParams {
            g: C_LIGHT * t / l_c,
            kappa,
            delta: k0 * C_LIGHT / l_c * wrapped,
            omega_prime: -2.0 * k0 * C_LIGHT / l_c,
            power: config.input_power,
        }
    }
}

/// Static force of the coupled-cavities model, N. Its displacement `x` is
/// measured opposite to the chain's: pass `−x` for a chain displaced by `x`.
pub fn coupled_cavity_force(p: &CoupledCavityParams, x: f64, k0: f64) -> f64 {
    let (k, g, d, w) = (p.kappa, p.g, p.delta, p.omega_prime);
    let num = k * k + (d + w * x).powi(2) - g * g;
    let den = (2.0 * k * d).powi(2) + (k * k + w * w * x * x + g * g - d * d).powi(2);
    -(2.0 * w * k / (k0 * C_LIGHT)) * num / den * p.power
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonPoint {
    pub x: f64,
    pub dlc: f64,
    /// TMM static force, N (`NaN` where the solve failed).
    pub tmm: f64,
    /// Coupled-cavities force, N.
    pub coupled: f64,
    /// (coupled − tmm) / max |tmm| over the grid.
    pub discrepancy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub zeta: f64,
    /// sqrt(Σ(coupled − tmm)² / Σ tmm²) over the grid.
    pub l2: f64,
    /// Fraction of near-resonance points (|tmm| above 10% of the maximum in
    /// their x column) where both models give the same sign.
    pub sign_agreement: f64,
    pub near_points: usize,
    pub linewidth: Linewidth,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub points: Vec<ComparisonPoint>,
    pub summary: ComparisonSummary,
}

/// TMM versus coupled-cavities static force over the grid.
pub fn compare_models(config: &MimConfig, grid: &ScanGrid, workers: usize) -> Result<Comparison> {
    let mut problems = config.problems();
    problems.extend(grid.problems(config));
    if !problems.is_empty() {
        return Err(Error::Config(problems.join("; ")));
    }
    let lw = bare_linewidth(config)?;
    let pump = config.pump()?;
    let k0 = config.k0();
    let zeta = Polarisability::real(config.membrane_zeta)?;
    let pairs: Vec<(f64, f64)> = with_workers(workers, || {
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let (x, dlc) = grid.point(i);
                let tmm = build_mim(config, x, dlc)
                    .and_then(|c| solve_static(&c, &pump))
                    .map(|s| static_force(&s, zeta, k0))
                    .unwrap_or(f64::NAN);
                let params = CoupledCavityParams::for_mim(config, lw.kappa, dlc);
                (tmm, coupled_cavity_force(&params, -x, k0))
            })
            .collect()
    })?;
    let max_tmm = pairs
        .iter()
        .map(|p| p.0.abs())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    let (mut agree, mut near) = (0usize, 0usize);
    for column in pairs.chunks(grid.dlc.count) {
        let col_max = column
            .iter()
            .map(|p| p.0.abs())
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        for &(a, b) in column.iter().filter(|p| p.0.is_finite()) {
            num += (a - b).powi(2);
            den += a * a;
            if a.abs() > 0.1 * col_max {
                near += 1;
                if a.signum() == b.signum() {
                    agree += 1;
                }
            }
        }
    }
    let points = pairs
        .iter()
        .enumerate()
        .map(|(i, &(tmm, coupled))| {
            let (x, dlc) = grid.point(i);
            ComparisonPoint {
                x,
                dlc,
                tmm,
                coupled,
                discrepancy: (coupled - tmm) / max_tmm,
            }
        })
        .collect();
    Ok(Comparison {
        points,
        summary: ComparisonSummary {
            zeta: config.membrane_zeta,
            l2: (num / den).sqrt(),
            sign_agreement: if near > 0 {
                agree as f64 / near as f64
            } else {
                f64::NAN
            },
            near_points: near,
            linewidth: lw,
        },
    })
}
