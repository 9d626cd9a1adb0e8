//! The run configuration file and its validation.

use optomech::chain_file::{ChainSpec, SCHEMA_VERSION};
use optomech::mim::{Axis, MimConfig, ScanGrid};
use optomech::units::parse_length;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Shown after `--help`.
pub const CONFIG_KEYS: &str = "\
CONFIG FILE (TOML, unknown keys are an error)
  Lengths are metres as bare numbers, or strings with a unit suffix:
  \"1064 nm\", \"6.7 cm\" (m, cm, mm, um, nm, pm).

  schema_version            integer, must be 1

  [chain]                   arbitrary chain (commands: elements, point)
    wavelength              length        pump wavelength
  [chain.pump]
    power                   W             total input power   (default 1.0)
    left                    [re, im]      left input weight   (default [1, 0])
    right                   [re, im]      right input weight  (default [0, 0])
  [[chain.element]]         one table per element, left to right
    scatterer               [re, im]      polarisability zeta (dimensionless, Im >= 0)
    segment                 length        free-space gap
    mobile                  bool          marks the single mobile scatterer

  [mim]                     membrane in the middle (scan, compare, couplings)
    wavelength              length        default \"1064 nm\"
    cavity_length           length        nominal L_c, default \"6.7 cm\"
    membrane_zeta           dimensionless real, <= 0, default -1
    mirror_zeta             dimensionless real, default -30
    input_power             W             default 1.0
    intensity               \"coherent\" | \"incoherent\", default \"coherent\"

  [grid]                    scan window (x slow, dLc fast)
  [grid.x]                  membrane displacement, |x| <= wavelength
    start, stop             length        default -wavelength/4, wavelength/4
    count                   integer       default 101
  [grid.dlc]                cavity-length change
    start, stop             length        default -wavelength/2, wavelength/2
    count                   integer       default 101

OUTPUT
  Numbers are printed with 17 significant digits; empty CSV fields are
  missing values. With --out, `scan`, `compare` and `couplings` also write
  <out stem>.meta.json (config, grid, units, code version); `scan` also
  writes <out stem>.overlay.csv. Files are written atomically.";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
    #[serde(default)]
    pub mim: MimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<ScanGrid>,
}

/// Fully resolved configuration: every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSpec>,
    pub mim: MimConfig,
    pub grid: ScanGrid,
}

pub fn default_grid(mim: &MimConfig) -> ScanGrid {
    let lambda = mim.lambda();
    ScanGrid {
        x: Axis::new(-lambda / 4.0, lambda / 4.0, 101),
        dlc: Axis::new(-lambda / 2.0, lambda / 2.0, 101),
    }
}

/// Parses `x0,x1,nx,dlc0,dlc1,ndlc`.
pub fn parse_grid(text: &str) -> Result<ScanGrid, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(format!(
            "--grid expects x0,x1,nx,dlc0,dlc1,ndlc (6 values), got {}",
            parts.len()
        ));
    }
    let count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| format!("--grid: invalid sample count {s:?}"))
    };
    Ok(ScanGrid {
        x: Axis::new(
            parse_length(parts[0])?,
            parse_length(parts[1])?,
            count(parts[2])?,
        ),
        dlc: Axis::new(
            parse_length(parts[3])?,
            parse_length(parts[4])?,
            count(parts[5])?,
        ),
    })
}

pub fn load(path: &Path, grid: Option<ScanGrid>) -> Result<Resolved, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: RunFile = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let grid = grid
        .or(file.grid)
        .unwrap_or_else(|| default_grid(&file.mim));
    Ok(Resolved {
        schema_version: file.schema_version,
        chain: file.chain,
        mim: file.mim,
        grid,
    })
}

impl Resolved {
    /// Every invariant violation in the file, all at once.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            out.push(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if let Some(chain) = &self.chain {
            out.extend(chain.problems());
        }
        let mim = self.mim.problems();
        let mim_ok = mim.is_empty();
        out.extend(mim);
        if mim_ok {
            out.extend(self.grid.problems(&self.mim));
        }
        out
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serialises")
    }
}
