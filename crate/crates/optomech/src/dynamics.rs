//! First-order-in-velocity fields, the velocity-dependent force and the
//! friction coefficient.
//!
//! Every amplitude is written 𝒳 = 𝒳₀ + (v/c)𝒳₁. The first-order parts come
//! from the closed-form solution of M̂ = M₁·M̂_S·M₂ with all k-derivatives
//! taken analytically at k₀.

use crate::consts::{C_LIGHT, HBAR};
use crate::elements::{Chain, Polarisability, PumpSpec};
use crate::error::Result;
use crate::statics::{evaluate, static_force, Evaluated, StaticFields};
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSet {
    pub a0: C64,
    pub a1: C64,
    pub b0: C64,
    pub b1: C64,
    pub c0: C64,
    pub c1: C64,
    pub d0: C64,
    pub d1: C64,
}

impl FieldSet {
    /// The v = 0 slice.
    pub fn zeroth(&self) -> StaticFields {
        StaticFields {
            a: self.a0,
            b: self.b0,
            c: self.c0,
            d: self.d0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceReport {
    /// Static force, N.
    pub f0: f64,
    /// Coefficient of v/c in the force, N.
    pub f1: f64,
    /// dF/dv = F₁/c, N·s/m. Negative values damp the motion.
    pub friction: f64,
}

/// First-order part of the amplitude on row `r` of M₁⁻¹ (r = 0 → 𝒜₁, r = 1 → ℬ₁).
fn first_order(ev: &Evaluated, r: usize, b_in: C64, c_in: C64) -> C64 {
    let e = &ev.jet;
    let (ga, al, de, be) = (e.entry(0, 0), e.entry(0, 1), e.entry(1, 0), e.entry(1, 1));
    let (al0, dal0, be0, dbe0, de0) = (al.a, al.da, be.a, be.da, de.a);
    let mu = ev.mu.get(r, 0);
    let dmu = ev.dmu.get(r, 0);

    // ∂/∂k of μ/β₀ · X for a bracket X with derivative dX.
    let d_mu_over_beta = dmu / be0 - mu * dbe0 / (be0 * be0);
    let d_term = |x: C64, dx: C64| d_mu_over_beta * x + mu / be0 * dx;

    let xa = al.c * be0 - al0 * be.c;
    let dxa = al.dc * be0 + al.c * dbe0 - dal0 * be.c - al0 * be.dc;
    let xg = be0 * ga.c - al0 * de.c;
    let dxg = dbe0 * ga.c + be0 * ga.dc - dal0 * de.c - al0 * de.dc;
    let da = d_term(xa, dxa);
    let dg = d_term(xg, dxg);

    let scalar = al.b * be0 - al0 * be.b;
    let on_b = mu / (be0 * be0) * scalar - da / be0;
    let on_c = mu / (be0 * be0) * (be0 * be0 * ga.b - al0 * be0 * de.b - scalar * de0) - dg
        + de0 / be0 * da;
    on_b * b_in + on_c * c_in
}

pub fn solve_dynamic(chain: &Chain, pump: &PumpSpec) -> Result<FieldSet> {
    let f0 = crate::statics::solve_static(chain, pump)?;
    let ev = evaluate(chain)?;
    let a1 = first_order(&ev, 0, pump.b0(), pump.c0());
    let b1 = first_order(&ev, 1, pump.b0(), pump.c0());
    let iz = C64::i() * ev.zeta;
    // Reflection off the moving scatterer adds the 2iζ Doppler terms.
    let c1 = (1.0 - iz) * a1 + 2.0 * iz * f0.b - iz * b1;
    let d1 = 2.0 * iz * f0.a + iz * a1 + (1.0 + iz) * b1;
    Ok(FieldSet {
        a0: f0.a,
        a1,
        b0: f0.b,
        b1,
        c0: f0.c,
        c1,
        d0: f0.d,
        d1,
    })
}

pub fn force_with_velocity(fields: &FieldSet, zeta: Polarisability, k0: f64) -> ForceReport {
    let z = zeta.value();
    let z2 = z.norm_sqr();
    let (a0, a1, b0, b1) = (fields.a0, fields.a1, fields.b0, fields.b1);
    let re = |w: C64| w.re;
    let bracket = z2 * (a0.norm_sqr() - b0.norm_sqr()) + (z2 + z.im) * re(a0 * a1.conj())
        - 2.0 * z.im * re(a0 * b0.conj())
        + (z2 - z.im) * re(b0 * b1.conj())
        + re(C64::new(z2, z.re) * (a0 * b1.conj() + a1 * b0.conj()));
    let f1 = -4.0 * HBAR * k0 * bracket;
    ForceReport {
        f0: static_force(&fields.zeroth(), zeta, k0),
        f1,
        friction: f1 / C_LIGHT,
    }
}
