//! One function per subcommand.

use crate::config::Resolved;
use crate::output::{json_bytes, Cell, Format, Sink, Table};
use optomech::chain_file::SCHEMA_VERSION;
use optomech::mim::{compare_models, scan, ScanTable, SCAN_HEADER};
use optomech::{couplings, evaluate_point, Element};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or command line; nothing was computed.
    Config(String),
    /// Failure while computing or writing.
    Run(String),
    /// Output was written but some grid points could not be computed.
    Partial(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run(_) => 1,
            CliError::Config(_) => 2,
            CliError::Partial(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration:\n{m}"),
            CliError::Run(m) => f.write_str(m),
            CliError::Partial(m) => f.write_str(m),
        }
    }
}

impl From<optomech::Error> for CliError {
    fn from(e: optomech::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn run_err(e: String) -> CliError {
    CliError::Run(e)
}

/// Rejects the run before any compute if the configuration is invalid.
pub fn check(cfg: &Resolved) -> Result<()> {
    let problems = cfg.problems();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(
            problems
                .iter()
                .map(|p| format!("  - {p}"))
                .collect::<Vec<_>>()
                .join("\n"),
        ))
    }
}

pub fn validate(cfg: &Resolved, sink: &Sink) -> Result<()> {
    check(cfg)?;
    let text = format!(
        "# configuration valid; resolved values (lengths in metres)\n{}",
        cfg.to_toml()
    );
    sink.primary(text.as_bytes()).map_err(run_err)
}

fn emit_table(sink: &Sink, table: &Table, header: Value) -> Result<()> {
    let bytes = match sink.format {
        Format::Csv => table.to_csv().map_err(run_err)?,
        Format::Json => {
            let mut doc = header;
            doc["rows"] = table.to_json();
            json_bytes(&doc)
        }
    };
    sink.primary(&bytes).map_err(run_err)
}

fn chain_of(cfg: &Resolved, command: &str) -> Result<(optomech::Chain, optomech::PumpSpec)> {
    let spec = cfg
        .chain
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("  - `{command}` needs a [chain] section")))?;
    Ok(spec.build()?)
}

pub fn elements(cfg: &Resolved, sink: &Sink) -> Result<()> {
    check(cfg)?;
    let (chain, _) = chain_of(cfg, "elements")?;
    let mut table = Table::new(&[
        "index",
        "kind",
        "mobile",
        "zeta_re",
        "zeta_im",
        "length",
        "r_re",
        "r_im",
        "t_re",
        "t_im",
        "R",
        "T",
        "absorption",
    ]);
    for (i, e) in chain.elements().iter().enumerate() {
        let mobile = Cell::Int((i == chain.mobile_index()) as i64);
        let row = match *e {
            Element::Scatterer(z) => {
                let (r, t) = (z.reflection(), z.transmission());
                vec![
                    Cell::Int(i as i64),
                    Cell::Text("scatterer".into()),
                    mobile,
                    z.value().re.into(),
                    z.value().im.into(),
                    Cell::Missing,
                    r.re.into(),
                    r.im.into(),
                    t.re.into(),
                    t.im.into(),
                    r.norm_sqr().into(),
                    t.norm_sqr().into(),
                    z.absorption().into(),
                ]
            }
            Element::Segment(d) => {
                let mut row = vec![
                    Cell::Int(i as i64),
                    Cell::Text("segment".into()),
                    mobile,
                    Cell::Missing,
                    Cell::Missing,
                    d.into(),
                ];
                row.extend(std::iter::repeat_n(Cell::Missing, 7));
                row
            }
        };
        table.push(row);
    }
    let header = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "elements",
        "wavelength": chain.wavelength(),
        "units": { "length": "m", "absorption": "fraction of incident power" },
    });
    emit_table(sink, &table, header)
}

pub fn point(cfg: &Resolved, sink: &Sink) -> Result<()> {
    check(cfg)?;
    let (chain, pump) = chain_of(cfg, "point")?;
    let r = evaluate_point(&chain, &pump)?;
    let f = &r.fields;
    let mut columns: Vec<&'static str> = vec![
        "A0_re", "A0_im", "B0_re", "B0_im", "C0_re", "C0_im", "D0_re", "D0_im", "A1_re", "A1_im",
        "B1_re", "B1_im", "C1_re", "C1_im", "D1_re", "D1_im",
    ];
    columns.extend([
        "F0",
        "F1",
        "dFdv",
        "D",
        "kBT",
        "T",
        "intensity_coherent",
        "intensity_incoherent",
    ]);
    let mut row: Vec<Cell> = [f.a0, f.b0, f.c0, f.d0, f.a1, f.b1, f.c1, f.d1]
        .iter()
        .flat_map(|z| [Cell::Num(z.re), Cell::Num(z.im)])
        .collect();
    row.extend([
        r.force.f0.into(),
        r.force.f1.into(),
        r.force.friction.into(),
        r.diffusion.into(),
        r.temperature.map(|t| t.kbt).into(),
        r.temperature.map(|t| t.kelvin).into(),
        r.intensity_coherent.into(),
        r.intensity_incoherent.into(),
    ]);
    let mut table = Table::new(&columns);
    table.push(row);
    let header = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "point",
        "units": {
            "amplitudes": "sqrt(photons/s)", "F0": "N", "F1": "N (coefficient of v/c)",
            "dFdv": "N s/m", "D": "N^2 s", "kBT": "J", "T": "K", "intensity": "W",
        },
        "missing_values": "kBT and T are empty wherever dFdv >= 0",
    });
    emit_table(sink, &table, header)
}

fn scan_rows(t: &ScanTable) -> Table {
    let mut table = Table::new(&SCAN_HEADER);
    for p in &t.points {
        table.push(vec![
            p.x.into(),
            p.dlc.into(),
            p.intensity.into(),
            p.f0.into(),
            p.friction.into(),
            p.diffusion.into(),
            p.kbt.into(),
        ]);
    }
    table
}

fn overlay_rows(t: &ScanTable) -> Table {
    let mut table = Table::new(&optomech::mim::OVERLAY_HEADER);
    for o in &t.overlay {
        table.push(vec![
            o.x.into(),
            Cell::Int(o.branch as i64),
            o.delta_omega.into(),
            o.dlc.into(),
        ]);
    }
    table
}

pub fn scan_cmd(cfg: &Resolved, sink: &Sink, workers: usize) -> Result<()> {
    check(cfg)?;
    let table = scan(&cfg.mim, &cfg.grid, workers)?;
    let meta = table.metadata();
    match sink.format {
        Format::Csv => {
            let mut bytes = Vec::new();
            table.write_csv(&mut bytes)?;
            let mut overlay = Vec::new();
            table.write_overlay_csv(&mut overlay)?;
            sink.primary(&bytes).map_err(run_err)?;
            sink.side("overlay.csv", &overlay).map_err(run_err)?;
            sink.side("meta.json", &json_bytes(&meta))
                .map_err(run_err)?;
        }
        Format::Json => {
            let doc = json!({
                "metadata": meta,
                "rows": scan_rows(&table).to_json(),
                "overlay": overlay_rows(&table).to_json(),
            });
            sink.primary(&json_bytes(&doc)).map_err(run_err)?;
        }
    }
    let failures: Vec<_> = table.points.iter().filter(|p| p.error.is_some()).collect();
    match failures.first() {
        None => Ok(()),
        Some(p) => Err(CliError::Partial(format!(
            "{} of {} grid points failed; first at x = {} m, dLc = {} m: {}",
            failures.len(),
            table.points.len(),
            p.x,
            p.dlc,
            p.error.as_deref().unwrap_or_default()
        ))),
    }
}

pub fn compare(cfg: &Resolved, sink: &Sink, workers: usize) -> Result<()> {
    check(cfg)?;
    let cmp = compare_models(&cfg.mim, &cfg.grid, workers)?;
    let mut table = Table::new(&["x", "dLc", "F_tmm", "F_cc", "discrepancy"]);
    for p in &cmp.points {
        table.push(vec![
            p.x.into(),
            p.dlc.into(),
            p.tmm.into(),
            p.coupled.into(),
            p.discrepancy.into(),
        ]);
    }
    let cc =
        optomech::mim::CoupledCavityParams::for_mim(&cfg.mim, cmp.summary.linewidth.kappa, 0.0);
    let meta = json!({
        "schema_version": SCHEMA_VERSION,
        "code_version": env!("CARGO_PKG_VERSION"),
        "command": "compare",
        "config": cfg.mim,
        "grid": cfg.grid,
        "order": "row-major: x slow, dLc fast",
        "columns": table.columns,
        "units": {
            "x": "m", "dLc": "m", "F_tmm": "N", "F_cc": "N",
            "discrepancy": "(F_cc - F_tmm) / max |F_tmm| over the grid",
        },
        "coupled_cavity": { "g": cc.g, "kappa": cc.kappa, "omega_prime": cc.omega_prime },
        "summary": cmp.summary,
        "missing_values": "empty F_tmm where the transfer-matrix solve failed",
    });
    eprintln!(
        "zeta = {}: relative L2 discrepancy {:.4}, sign agreement {:.4} over {} near-resonance points",
        cmp.summary.zeta, cmp.summary.l2, cmp.summary.sign_agreement, cmp.summary.near_points
    );
    match sink.format {
        Format::Csv => {
            sink.primary(&table.to_csv().map_err(run_err)?)
                .map_err(run_err)?;
            sink.side("meta.json", &json_bytes(&meta))
                .map_err(run_err)?;
        }
        Format::Json => emit_table(sink, &table, json!({ "metadata": meta }))?,
    }
    match cmp.points.iter().find(|p| !p.tmm.is_finite()) {
        None => Ok(()),
        Some(p) => Err(CliError::Partial(format!(
            "transfer-matrix solve failed at x = {} m, dLc = {} m",
            p.x, p.dlc
        ))),
    }
}

/// Angular frequency per metre → MHz/nm of ordinary frequency.
fn mhz_per_nm(w: f64) -> f64 {
    w / (2.0 * PI) * 1e-6 * 1e-9
}

pub fn couplings_cmd(cfg: &Resolved, sink: &Sink) -> Result<()> {
    check(cfg)?;
    let m = &cfg.mim;
    let (k0, l_c, zeta) = (m.k0(), m.l_c(), m.membrane_zeta);
    let mut table = Table::new(&[
        "x",
        "delta_omega_plus",
        "delta_omega_minus",
        "omega_prime_plus",
        "omega_prime_minus",
        "omega_double_prime_plus",
        "omega_double_prime_minus",
    ]);
    let mut max_prime: f64 = 0.0;
    for x in cfg.grid.x.values() {
        let c = couplings(zeta, x, l_c, k0);
        max_prime = max_prime
            .max(c.omega_prime.plus.abs())
            .max(c.omega_prime.minus.abs());
        table.push(vec![
            x.into(),
            c.delta_omega.plus.into(),
            c.delta_omega.minus.into(),
            c.omega_prime.plus.into(),
            c.omega_prime.minus.into(),
            c.omega_double_prime.plus.into(),
            c.omega_double_prime.minus.into(),
        ]);
    }
    let bound = 2.0 * k0 * optomech::consts::C_LIGHT / l_c;
    let at_centre = couplings(zeta, 0.0, l_c, k0).omega_double_prime.plus.abs();
    let summary = json!({
        "max_abs_omega_prime": max_prime,
        "max_abs_omega_prime_over_2pi_MHz_per_nm": mhz_per_nm(max_prime),
        "omega_prime_bound": bound,
        "omega_prime_bound_over_2pi_MHz_per_nm": mhz_per_nm(bound),
        "abs_omega_double_prime_at_x0": at_centre,
        "abs_omega_double_prime_at_x0_over_2pi_MHz_per_nm2": mhz_per_nm(at_centre) * 1e-9,
    });
    eprintln!(
        "max |omega'|/2pi = {:.6} MHz/nm (bound 2k0c/L_c = {:.6} MHz/nm); |omega''(0)|/2pi = {:.6} MHz/nm^2",
        mhz_per_nm(max_prime),
        mhz_per_nm(bound),
        mhz_per_nm(at_centre) * 1e-9
    );
    let meta = json!({
        "schema_version": SCHEMA_VERSION,
        "code_version": env!("CARGO_PKG_VERSION"),
        "command": "couplings",
        "config": m,
        "x": cfg.grid.x,
        "columns": table.columns,
        "units": {
            "x": "m", "delta_omega": "rad/s", "omega_prime": "rad/(s m)",
            "omega_double_prime": "rad/(s m^2)",
        },
        "summary": summary,
    });
    match sink.format {
        Format::Csv => {
            sink.primary(&table.to_csv().map_err(run_err)?)
                .map_err(run_err)?;
            sink.side("meta.json", &json_bytes(&meta)).map_err(run_err)
        }
        Format::Json => emit_table(sink, &table, json!({ "metadata": meta })),
    }
}
