//! Quantum-noise bookkeeping: field operators as vectors over the input
//! modes, loss modes for absorptive scatterers, momentum diffusion and the
//! equilibrium temperature.

use crate::consts::{HBAR, K_B};
use crate::elements::{Chain, Element};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::statics::StaticFields;
use num_complex::Complex64 as C64;
use std::fmt;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeLabel {
    LeftPump,
    RightPump,
    /// Vacuum loss channel of the absorptive scatterer at `element`.
    Loss {
        element: usize,
    },
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::LeftPump => f.write_str("B_l"),
            ModeLabel::RightPump => f.write_str("C_r"),
            ModeLabel::Loss { element } => write!(f, "loss[{element}]"),
        }
    }
}

/// Ordered input modes: left pump, right pump, then loss modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBasis(pub Vec<ModeLabel>);

impl ModeBasis {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Unit vector of basis mode `i`.
    pub fn unit(&self, i: usize) -> ModeVector {
        let mut v = vec![ZERO; self.len()];
        v[i] = ONE;
        ModeVector(v)
    }
}

/// Coefficients of a field operator over a [`ModeBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct ModeVector(pub Vec<C64>);

impl ModeVector {
    /// [X̂, Ŷ†] = Σᵢ xᵢ·conj(yᵢ).
    pub fn commutator(&self, other: &ModeVector) -> C64 {
        self.0.iter().zip(&other.0).map(|(x, y)| x * y.conj()).sum()
    }

    /// [X̂, X̂†], real and non-negative.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x.norm_sqr()).sum()
    }
}

/// Injection of a loss mode at one scatterer: unit amplitude in the loss
/// mode adds `coupling[0]` to the left-going output and `coupling[1]` to the
/// right-going output of that scatterer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossPort {
    pub element: usize,
    pub coupling: [C64; 2],
}

/// A chain together with the loss modes that keep its quantised scattering
/// network unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct LossyChain {
    pub chain: Chain,
    pub ports: Vec<LossPort>,
}

impl LossyChain {
    /// The bare chain with no loss modes attached.
    pub fn without_loss_modes(chain: &Chain) -> Self {
        LossyChain {
            chain: chain.clone(),
            ports: Vec::new(),
        }
    }

    pub fn basis(&self) -> ModeBasis {
        let mut labels = vec![ModeLabel::LeftPump, ModeLabel::RightPump];
        labels.extend(
            self.ports
                .iter()
                .map(|p| ModeLabel::Loss { element: p.element }),
        );
        ModeBasis(labels)
    }
}

/// Pivot below which a defect direction is treated as empty. The defect
/// I − SS† of a passive scatterer has entries of order one at most, so the
/// tolerance is absolute.
const PIVOT_TOL: f64 = 1e-12;

/// Attaches one vacuum loss mode per absorptive scatterer. The couplings are
/// a Cholesky factor of the unitarity defect I − SS† of the scatterer's 2×2
/// scattering matrix, so every output keeps unit self-commutator.
pub fn attach_loss_modes(chain: &Chain) -> Result<LossyChain> {
    let mut ports = Vec::new();
    for (element, e) in chain.elements().iter().enumerate() {
        let Element::Scatterer(z) = e else { continue };
        if !z.is_absorptive() {
            continue;
        }
        let (r, t) = (z.reflection(), z.transmission());
        // Outputs (A, D) = S·(B, C) with S = [[r, t], [t, r]].
        let s = Mat2::new(r, t, t, r);
        let s_dag = Mat2::new(r.conj(), t.conj(), t.conj(), r.conj());
        let g = Mat2::IDENTITY - s * s_dag;
        let p1 = g.get(0, 0).re;
        if p1 < -PIVOT_TOL {
            return Err(Error::UnphysicalDefect { element, pivot: p1 });
        }
        if p1 <= PIVOT_TOL {
            continue;
        }
        let l11 = p1.sqrt();
        let l21 = g.get(1, 0) / l11;
        ports.push(LossPort {
            element,
            coupling: [C64::new(l11, 0.0), l21],
        });
        let p2 = g.get(1, 1).re - l21.norm_sqr();
        if p2 < -PIVOT_TOL {
            return Err(Error::UnphysicalDefect { element, pivot: p2 });
        }
        if p2 > PIVOT_TOL {
            // A thin scatterer's defect has rank one; a second channel only
            // appears for a general two-port.
            ports.push(LossPort {
                element,
                coupling: [ZERO, C64::new(p2.sqrt(), 0.0)],
            });
        }
    }
    Ok(LossyChain {
        chain: chain.clone(),
        ports,
    })
}

/// The four fields at the mobile scatterer and the two outgoing fields, each
/// as a vector over the input modes.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorFields {
    pub basis: ModeBasis,
    pub a: ModeVector,
    pub b: ModeVector,
    pub c: ModeVector,
    pub d: ModeVector,
    /// Left-going output on the far left.
    pub out_left: ModeVector,
    /// Right-going output on the far right.
    pub out_right: ModeVector,
}

struct Response {
    mobile_left: [C64; 2],
    mobile_right: [C64; 2],
    out_left: C64,
    out_right: C64,
}

/// Zeroth-order solve with inputs `b_l`, `c_r` and one internal source per
/// loss port. With sources, each element obeys v_left = M·v_right + s.
fn solve_affine(chain: &Chain, b_l: C64, c_r: C64, source: Option<&LossPort>) -> Result<Response> {
    let k = chain.k0();
    let n = chain.elements().len();
    let mut p = vec![Mat2::IDENTITY; n + 1];
    let mut q = vec![[ZERO; 2]; n + 1];
    for i in (0..n).rev() {
        let e = &chain.elements()[i];
        let m = e.matrix(k);
        p[i] = m * p[i + 1];
        let mq = m.apply(q[i + 1]);
        let s = match (source, e) {
            (Some(port), Element::Scatterer(z)) if port.element == i => {
                let iz = C64::i() * z.value();
                let [la, ld] = port.coupling;
                [la - iz * ld, -(1.0 - iz) * ld]
            }
            _ => [ZERO; 2],
        };
        q[i] = [mq[0] + s[0], mq[1] + s[1]];
    }
    let beta0 = p[0].get(1, 1);
    if !beta0.is_finite() || beta0.norm() <= f64::EPSILON * p[0].max_abs() {
        return Err(Error::Singular(beta0.norm()));
    }
    let d_r = (b_l - p[0].get(1, 0) * c_r - q[0][1]) / beta0;
    let far_right = [c_r, d_r];
    let state = |i: usize| {
        let v = p[i].apply(far_right);
        [v[0] + q[i][0], v[1] + q[i][1]]
    };
    let m = chain.mobile_index();
    Ok(Response {
        mobile_left: state(m),
        mobile_right: state(m + 1),
        out_left: state(0)[0],
        out_right: d_r,
    })
}

/// Expresses Â, B̂, Ĉ, D̂ at the mobile scatterer (and the two outputs) over
/// the input modes, one unit-amplitude solve per basis mode.
pub fn operator_fields(lossy: &LossyChain) -> Result<OperatorFields> {
    let basis = lossy.basis();
    let chain = &lossy.chain;
    let mut cols = Vec::with_capacity(basis.len());
    cols.push(solve_affine(chain, ONE, ZERO, None)?);
    cols.push(solve_affine(chain, ZERO, ONE, None)?);
    for port in &lossy.ports {
        cols.push(solve_affine(chain, ZERO, ZERO, Some(port))?);
    }
    let gather = |f: &dyn Fn(&Response) -> C64| ModeVector(cols.iter().map(f).collect());
    Ok(OperatorFields {
        a: gather(&|r| r.mobile_left[0]),
        b: gather(&|r| r.mobile_left[1]),
        c: gather(&|r| r.mobile_right[0]),
        d: gather(&|r| r.mobile_right[1]),
        out_left: gather(&|r| r.out_left),
        out_right: gather(&|r| r.out_right),
        basis,
    })
}

/// Momentum diffusion coefficient, N²·s:
///
/// D = (ħk₀)²( Σ_X |𝒳₀|²[X̂,X̂†] + 2Re{ 𝒜₀*ℬ₀[Â,B̂†] − 𝒜₀*𝒞₀[Â,Ĉ†] − 𝒜₀*𝒟₀[Â,D̂†]
///                                   − ℬ₀*𝒞₀[B̂,Ĉ†] − ℬ₀*𝒟₀[B̂,D̂†] + 𝒞₀*𝒟₀[Ĉ,D̂†] } )
pub fn diffusion(fields: &StaticFields, ops: &OperatorFields, k0: f64) -> f64 {
    let amp = [fields.a, fields.b, fields.c, fields.d];
    let op = [&ops.a, &ops.b, &ops.c, &ops.d];
    // Momentum carried to the right by each field: +, +, −, −.
    let sign = [1.0, 1.0, -1.0, -1.0];
    let mut total = 0.0;
    for x in 0..4 {
        total += amp[x].norm_sqr() * op[x].norm_sqr();
        for y in x + 1..4 {
            let cross = amp[x].conj() * amp[y] * op[x].commutator(op[y]);
            total += 2.0 * sign[x] * sign[y] * cross.re;
        }
    }
    (HBAR * k0).powi(2) * total
}

/// Equilibrium temperature k_B·T = −D/(dF/dv), reported in joules and kelvin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Temperature {
    pub kbt: f64,
    pub kelvin: f64,
}

pub fn equilibrium_temperature(diffusion: f64, friction: f64) -> Result<Temperature> {
    if friction.is_nan() || friction >= 0.0 {
        return Err(Error::NonCooling(friction));
    }
    let kbt = -diffusion / friction;
    Ok(Temperature {
        kbt,
        kelvin: kbt / K_B,
    })
}
