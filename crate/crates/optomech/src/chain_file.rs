//! Chain description files (TOML).
//!
//! ```toml
//! schema_version = 1
//!
//! [chain]
//! wavelength = "1064 nm"          # metres, or a string with unit suffix
//!
//! [chain.pump]
//! power = 1.0                     # watts (total input)
//! left = [1.0, 0.0]               # complex weight of the left input (re, im)
//! right = [0.0, 0.0]              # complex weight of the right input
//!
//! [[chain.element]]
//! scatterer = [-30.0, 0.0]        # polarisability ζ as (re, im)
//!
//! [[chain.element]]
//! segment = "3.35 cm"
//!
//! [[chain.element]]
//! scatterer = [-1.0, 0.0]
//! mobile = true                   # exactly one element
//! ```
//!
//! Unknown keys are rejected. The same `[chain]` table is accepted inside the
//! command-line configuration file.

use crate::elements::{Chain, Element, PumpSpec};
use crate::error::{Error, Result};
use crate::units::Length;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub schema_version: u32,
    pub chain: ChainSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub wavelength: Length,
    #[serde(default)]
    pub pump: PumpSection,
    #[serde(rename = "element", default)]
    pub elements: Vec<ElementSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub power: f64,
    pub left: [f64; 2],
    pub right: [f64; 2],
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            power: 1.0,
            left: [1.0, 0.0],
            right: [0.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scatterer: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<Length>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mobile: bool,
}

impl ChainSpec {
    /// Checks every invariant, collecting all violations.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.wavelength.0.is_finite() && self.wavelength.0 > 0.0) {
            out.push(format!(
                "chain.wavelength must be positive, got {} m",
                self.wavelength.0
            ));
        }
        if self.elements.is_empty() {
            out.push("chain is empty: at least one [[chain.element]] is required".into());
        }
        let mobiles = self.elements.iter().filter(|e| e.mobile).count();
        if !self.elements.is_empty() && mobiles != 1 {
            out.push(format!(
                "exactly one element must be mobile, found {mobiles}"
            ));
        }
        for (i, e) in self.elements.iter().enumerate() {
            if let Err(err) = e.build() {
                out.push(format!("element {i}: {err}"));
            } else if e.mobile && e.scatterer.is_none() {
                out.push(format!(
                    "element {i}: the mobile element must be a scatterer"
                ));
            }
        }
        let p = &self.pump;
        if let Err(err) = PumpSpec::split(
            p.power,
            self.wavelength.0.max(f64::MIN_POSITIVE),
            c(p.left),
            c(p.right),
        ) {
            out.push(format!("pump: {err}"));
        }
        out
    }

    pub fn build(&self) -> Result<(Chain, PumpSpec)> {
        let problems = self.problems();
        if !problems.is_empty() {
            return Err(Error::Parse(problems.join("; ")));
        }
        let elements = self
            .elements
            .iter()
            .map(ElementSpec::build)
            .collect::<Result<Vec<_>>>()?;
        let mobile = self
            .elements
            .iter()
            .position(|e| e.mobile)
            .expect("checked above");
        let lambda = self.wavelength.0;
        let chain = Chain::new(elements, mobile, 2.0 * PI / lambda)?;
        let pump = PumpSpec::split(
            self.pump.power,
            lambda,
            c(self.pump.left),
            c(self.pump.right),
        )?;
        Ok((chain, pump))
    }
}

impl ElementSpec {
    fn build(&self) -> Result<Element> {
        match (self.scatterer, self.segment) {
            (Some([re, im]), None) => Element::scatterer(re, im),
            (None, Some(len)) => Element::segment(len.0),
            _ => Err(Error::Parse(
                "element needs exactly one of `scatterer` or `segment`".into(),
            )),
        }
    }
}

fn c(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

pub fn parse_chain_file(text: &str) -> Result<(Chain, PumpSpec)> {
    let file: ChainFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    file.chain.build()
}
