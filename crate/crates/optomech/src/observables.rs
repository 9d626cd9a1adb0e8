//! Every observable at a single configuration.

use crate::dynamics::{force_with_velocity, solve_dynamic, FieldSet, ForceReport};
use crate::elements::{Chain, PumpSpec};
use crate::error::{Error, Result};
use crate::noise::{
    attach_loss_modes, diffusion, equilibrium_temperature, operator_fields, Temperature,
};
use crate::statics::IntensityMeasure;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointReport {
    pub fields: FieldSet,
    pub force: ForceReport,
    /// Momentum diffusion, N²·s.
    pub diffusion: f64,
    /// `None` outside the cooling region (friction ≥ 0).
    pub temperature: Option<Temperature>,
    /// Coherent intensity at the scatterer, W.
    pub intensity_coherent: f64,
    /// Incoherent intensity at the scatterer, W.
    pub intensity_incoherent: f64,
}

impl PointReport {
    pub fn intensity(&self, measure: IntensityMeasure) -> f64 {
        match measure {
            IntensityMeasure::Coherent => self.intensity_coherent,
            IntensityMeasure::Incoherent => self.intensity_incoherent,
        }
    }
}

pub fn evaluate_point(chain: &Chain, pump: &PumpSpec) -> Result<PointReport> {
    let k0 = chain.k0();
    let fields = solve_dynamic(chain, pump)?;
    let force = force_with_velocity(&fields, chain.mobile_zeta(), k0);
    let ops = operator_fields(&attach_loss_modes(chain)?)?;
    let statics = fields.zeroth();
    let d = diffusion(&statics, &ops, k0);
    let temperature = match equilibrium_temperature(d, force.friction) {
        Ok(t) => Some(t),
        Err(Error::NonCooling(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(PointReport {
        fields,
        force,
        diffusion: d,
        temperature,
        intensity_coherent: statics.intensity(IntensityMeasure::Coherent, k0),
        intensity_incoherent: statics.intensity(IntensityMeasure::Incoherent, k0),
    })
}
