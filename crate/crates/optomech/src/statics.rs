//! Static (v = 0) fields around the mobile scatterer, the static force, and
//! the analytic resonance and coupling formulas for a membrane in a cavity.

use crate::algebra::MatrixJet;
use crate::consts::{C_LIGHT, HBAR};
use crate::elements::{factorize, scatterer_matrix, Chain, Polarisability, PumpSpec};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Velocity-independent amplitudes at the mobile scatterer, √(photon flux).
///
/// `a`/`b`: left-going/right-going on its left face; `c`/`d`: left-going/
/// right-going on its right face. Incoming to the scatterer are `b` and `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticFields {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl StaticFields {
    /// Flux leaving the scatterer minus flux arriving at it, 1/s.
    pub fn net_outflow(&self) -> f64 {
        self.a.norm_sqr() + self.d.norm_sqr() - self.b.norm_sqr() - self.c.norm_sqr()
    }

    pub fn intensity(&self, measure: IntensityMeasure, k0: f64) -> f64 {
        let flux = match measure {
            IntensityMeasure::Coherent => (self.a + self.b).norm_sqr(),
            IntensityMeasure::Incoherent => self.a.norm_sqr() + self.b.norm_sqr(),
        };
        HBAR * C_LIGHT * k0 * flux
    }
}

/// How "intensity at the scatterer" is reported, in watts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntensityMeasure {
    /// ħω|𝒜₀ + ℬ₀|²: the standing-wave field on the left face; shows nodes.
    #[default]
    Coherent,
    /// ħω(|𝒜₀|² + |ℬ₀|²): total counter-propagating power; blind to nodes.
    Incoherent,
}

/// Everything the closed-form solutions need, evaluated once at k₀.
pub(crate) struct Evaluated {
    pub jet: MatrixJet,
    pub mu: Mat2,
    pub dmu: Mat2,
    pub zeta: C64,
}

pub(crate) fn evaluate(chain: &Chain) -> Result<Evaluated> {
    let f = factorize(chain);
    let k0 = chain.k0();
    let jet = f.full().at(k0);
    check_beta(&jet.zeroth())?;
    let (mu, dmu) = f.mu(k0)?;
    Ok(Evaluated {
        jet,
        mu,
        dmu,
        zeta: chain.mobile_zeta().value(),
    })
}

/// Zeroth-order amplitudes for inputs `b_in` (left) and `c_in` (right),
/// given the full transfer matrix `m` and μ = M₁⁻¹.
fn zeroth_order(m: &Mat2, mu: &Mat2, zeta: C64, b_in: C64, c_in: C64) -> StaticFields {
    let (gamma, alpha) = (m.get(0, 0), m.get(0, 1));
    let (delta, beta) = (m.get(1, 0), m.get(1, 1));
    let row = |m11: C64, m12: C64| {
        (m11 * alpha / beta + m12) * b_in + m11 * (gamma * beta - alpha * delta) / beta * c_in
    };
    let a = row(mu.get(0, 0), mu.get(0, 1));
    let b = row(mu.get(1, 0), mu.get(1, 1));
    let iz = C64::i() * zeta;
    StaticFields {
        a,
        b,
        c: (1.0 - iz) * a - iz * b,
        d: iz * a + (1.0 + iz) * b,
    }
}

/// Plain-matrix route to the static solution: no k-derivatives needed.
fn static_system(chain: &Chain) -> Result<(Mat2, Mat2)> {
    let (mi, n, k0) = (chain.mobile_index(), chain.elements().len(), chain.k0());
    let m1 = chain.static_matrix(0..mi, k0);
    let m = m1 * scatterer_matrix(chain.mobile_zeta()) * chain.static_matrix(mi + 1..n, k0);
    check_beta(&m)?;
    let mu = m1.inverse().ok_or(Error::Singular(m1.det().norm()))?;
    Ok((m, mu))
}

fn check_beta(m: &Mat2) -> Result<()> {
    let beta0 = m.get(1, 1);
    if !beta0.is_finite() || beta0.norm() <= f64::EPSILON * m.max_abs() {
        return Err(Error::Singular(beta0.norm()));
    }
    Ok(())
}

pub fn solve_static(chain: &Chain, pump: &PumpSpec) -> Result<StaticFields> {
    pump.check_against(chain)?;
    let (m, mu) = static_system(chain)?;
    let zeta = chain.mobile_zeta().value();
    let fields = zeroth_order(&m, &mu, zeta, pump.b0(), pump.c0());
    debug_assert!(
        !chain.is_lossless()
            || fields.net_outflow().abs()
                <= 1e-9
                    * (1.0 + zeta.norm())
                    * (fields.b.norm_sqr() + fields.c.norm_sqr()).max(f64::MIN_POSITIVE),
        "flux not conserved at the scatterer: {fields:?}"
    );
    Ok(fields)
}

/// Static radiation force on the mobile scatterer, newtons (positive = +x).
pub fn static_force(fields: &StaticFields, zeta: Polarisability, k0: f64) -> f64 {
    let z = zeta.value();
    let z2 = z.norm_sqr();
    let (a, b) = (fields.a, fields.b);
    let bracket = (z2 + z.im) * a.norm_sqr()
        + (z2 - z.im) * b.norm_sqr()
        + 2.0 * (C64::new(z2, z.re) * a * b.conj()).re;
    -2.0 * HBAR * k0 * bracket
}

/// A pair of values on the two resonance branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Branches {
    pub plus: f64,
    pub minus: f64,
}

/// Resonance phases ψ± ∈ (−π, π] of a membrane with real polarisability
/// `zeta` displaced by `x` from the centre of a good cavity; the shifts are
/// Δω = (c/L_c)ψ. They solve sin ψ + ζ cos ψ = ζ cos 2k₀x.
pub fn resonance_phases(zeta: f64, x: f64, k0: f64) -> Branches {
    let z = zeta + 0.0; // normalise −0.0
    let u = 2.0 * k0 * x;
    let (s, c) = u.sin_cos();
    let q = (1.0 + z * z * s * s).sqrt();
    let psi = |sigma: f64| (z * (c - sigma * q)).atan2(z * z * c + sigma * q);
    Branches {
        plus: psi(1.0),
        minus: psi(-1.0),
    }
}

/// Principal-value resonance shifts (Δω₊, Δω₋), rad/s.
pub fn resonance_shifts(zeta: f64, x: f64, l_c: f64, k0: f64) -> (f64, f64) {
    let p = resonance_phases(zeta, x, k0);
    let scale = C_LIGHT / l_c;
    (scale * p.plus, scale * p.minus)
}

/// Resonance shifts along a scan in x, unwrapped continuously (no jumps of a
/// full 2πc/L_c) and anchored to the principal values at the sample closest
/// to x = 0. `xs` must be sorted ascending.
pub fn resonance_track(zeta: f64, xs: &[f64], l_c: f64, k0: f64) -> Vec<Branches> {
    let raw: Vec<Branches> = xs
        .iter()
        .map(|&x| {
            let (p, m) = resonance_shifts(zeta, x, l_c, k0);
            Branches { plus: p, minus: m }
        })
        .collect();
    let Some(anchor) = xs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
    else {
        return raw;
    };
    let period = 2.0 * PI * C_LIGHT / l_c;
    let follow = |prev: f64, v: f64| v + period * ((prev - v) / period).round();
    let mut out = raw.clone();
    for i in (0..anchor).rev() {
        out[i].plus = follow(out[i + 1].plus, raw[i].plus);
        out[i].minus = follow(out[i + 1].minus, raw[i].minus);
    }
    for i in anchor + 1..raw.len() {
        out[i].plus = follow(out[i - 1].plus, raw[i].plus);
        out[i].minus = follow(out[i - 1].minus, raw[i].minus);
    }
    out
}

/// Resonance shifts and their first two derivatives in membrane position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingReport {
    /// rad/s
    pub delta_omega: Branches,
    /// ω′ = dΔω/dx, rad/(s·m)
    pub omega_prime: Branches,
    /// ω″ = d²Δω/dx², rad/(s·m²)
    pub omega_double_prime: Branches,
}

pub fn couplings(zeta: f64, x: f64, l_c: f64, k0: f64) -> CouplingReport {
    let (dp, dm) = resonance_shifts(zeta, x, l_c, k0);
    let u = 2.0 * k0 * x;
    let (s, c) = u.sin_cos();
    let q = (1.0 + zeta * zeta * s * s).sqrt();
    let w1 = 2.0 * k0 * C_LIGHT / l_c * zeta * s / q;
    let w2 = 4.0 * k0 * k0 * C_LIGHT / l_c * zeta * c / (q * q * q);
    CouplingReport {
        delta_omega: Branches {
            plus: dp,
            minus: dm,
        },
        omega_prime: Branches {
            plus: -w1,
            minus: w1,
        },
        omega_double_prime: Branches {
            plus: -w2,
            minus: w2,
        },
    }
}
