//! Scatterers, free-space segments and chains.
//!
//! Amplitude pairs are ordered (left-going, right-going). A transfer matrix
//! maps the pair on the right of an element to the pair on its left, so a
//! chain composes left to right by plain matrix product.

use crate::algebra::{moving_scatterer_matrix, KFunction, MatrixJet, VOMatrix};
use crate::consts::{C_LIGHT, HBAR};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Polarisability ζ of a thin scatterer. Passive only: Im ζ ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polarisability(C64);

impl Polarisability {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(C64::new(re, im))
    }

    pub fn real(zeta: f64) -> Result<Self> {
        Self::new(zeta, 0.0)
    }

    pub fn from_complex(zeta: C64) -> Result<Self> {
        if !zeta.is_finite() {
            return Err(Error::NonFinitePolarisability(zeta.to_string()));
        }
        if zeta.im < 0.0 {
            return Err(Error::Gain(zeta.im));
        }
        Ok(Polarisability(zeta))
    }

    #[inline]
    pub fn value(&self) -> C64 {
        self.0
    }

    /// r = iζ/(1−iζ)
    pub fn reflection(&self) -> C64 {
        let i = C64::i();
        i * self.0 / (1.0 - i * self.0)
    }

    /// t = 1/(1−iζ)
    pub fn transmission(&self) -> C64 {
        1.0 / (1.0 - C64::i() * self.0)
    }

    /// Fraction of incident flux absorbed, 1 − |r|² − |t|².
    pub fn absorption(&self) -> f64 {
        1.0 - self.reflection().norm_sqr() - self.transmission().norm_sqr()
    }

    pub fn is_absorptive(&self) -> bool {
        self.0.im > 0.0
    }
}

/// Transfer matrix of a thin scatterer: [[1+iζ, iζ], [−iζ, 1−iζ]].
pub fn scatterer_matrix(zeta: Polarisability) -> Mat2 {
    let iz = C64::i() * zeta.value();
    Mat2::new(1.0 + iz, iz, -iz, 1.0 - iz)
}

/// Free-space propagation over `d` metres: diag(e^{ikd}, e^{−ikd}).
pub fn propagation_matrix(k: f64, d: f64) -> Result<Mat2> {
    check_length(d)?;
    Ok(propagation_jet(k, d).0)
}

/// Propagation matrix with its first and second k-derivatives. `d` is not checked.
pub fn propagation_jet(k: f64, d: f64) -> (Mat2, Mat2, Mat2) {
    let i = C64::i();
    let e = (i * k * d).exp();
    let f = e.conj();
    (
        Mat2::diag(e, f),
        Mat2::diag(i * d * e, -i * d * f),
        Mat2::diag(-d * d * e, -d * d * f),
    )
}

fn check_length(d: f64) -> Result<()> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadLength(d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    Scatterer(Polarisability),
    /// Free-space segment, metres.
    Segment(f64),
}

impl Element {
    pub fn scatterer(re: f64, im: f64) -> Result<Self> {
        Ok(Element::Scatterer(Polarisability::new(re, im)?))
    }

    pub fn segment(d: f64) -> Result<Self> {
        check_length(d)?;
        Ok(Element::Segment(d))
    }

    /// Static transfer matrix and its first two k-derivatives.
    pub fn jet(&self, k: f64) -> (Mat2, Mat2, Mat2) {
        match *self {
            Element::Scatterer(z) => (scatterer_matrix(z), Mat2::ZERO, Mat2::ZERO),
            Element::Segment(d) => propagation_jet(k, d),
        }
    }

    pub fn matrix(&self, k: f64) -> Mat2 {
        match *self {
            Element::Scatterer(z) => scatterer_matrix(z),
            Element::Segment(d) => propagation_jet(k, d).0,
        }
    }
}

/// An ordered chain of elements with exactly one mobile scatterer.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    elements: Vec<Element>,
    mobile: usize,
    k0: f64,
}

impl Chain {
    pub fn new(elements: Vec<Element>, mobile: usize, k0: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyChain);
        }
        if mobile >= elements.len() {
            return Err(Error::MobileOutOfRange {
                index: mobile,
                len: elements.len(),
            });
        }
        if !matches!(elements[mobile], Element::Scatterer(_)) {
            return Err(Error::MobileNotScatterer(mobile));
        }
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::BadWavenumber(k0));
        }
        for e in &elements {
            match *e {
                Element::Segment(d) => check_length(d)?,
                Element::Scatterer(z) => {
                    Polarisability::from_complex(z.value())?;
                }
            }
        }
        Ok(Chain {
            elements,
            mobile,
            k0,
        })
    }

    /// A lone mobile scatterer in free space.
    pub fn free_standing(zeta: Polarisability, k0: f64) -> Result<Self> {
        Chain::new(vec![Element::Scatterer(zeta)], 0, k0)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn mobile_index(&self) -> usize {
        self.mobile
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k0
    }

    pub fn mobile_zeta(&self) -> Polarisability {
        match self.elements[self.mobile] {
            Element::Scatterer(z) => z,
            Element::Segment(_) => unreachable!("validated at construction"),
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.elements.iter().all(|e| match e {
            Element::Scatterer(z) => !z.is_absorptive(),
            Element::Segment(_) => true,
        })
    }

    /// Plain product of the static matrices of `range`.
    pub fn static_matrix(&self, range: std::ops::Range<usize>, k: f64) -> Mat2 {
        self.elements[range]
            .iter()
            .fold(Mat2::IDENTITY, |acc, e| acc * e.matrix(k))
    }
}

fn static_composition(elements: Vec<Element>) -> VOMatrix {
    if elements.is_empty() {
        return VOMatrix::identity();
    }
    VOMatrix::from_fn(move |k| {
        elements.iter().fold(MatrixJet::identity(), |acc, e| {
            let (m, dm, d2m) = e.jet(k);
            acc.mul(&MatrixJet::from_static(m, dm, d2m))
        })
    })
}

/// The chain split around its mobile scatterer: M̂ = M₁ · M̂_S · M₂.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub m1: VOMatrix,
    pub ms: VOMatrix,
    pub m2: VOMatrix,
}

impl Factorization {
    pub fn full(&self) -> VOMatrix {
        crate::algebra::vo_mul(&self.m1, &crate::algebra::vo_mul(&self.ms, &self.m2))
    }

    /// μ = M₁⁻¹ at k and its k-derivative −μ·M₁′·μ.
    pub fn mu(&self, k: f64) -> Result<(Mat2, Mat2)> {
        let jet = self.m1.at(k);
        let m = jet.zeroth();
        let mu = m.inverse().ok_or(Error::Singular(m.det().norm()))?;
        let dmu = -(mu * jet.zeroth_derivative() * mu);
        Ok((mu, dmu))
    }

    /// Entry μᵢⱼ of M₁⁻¹ as a function of k. Panics on evaluation if M₁ is singular,
    /// which cannot happen for a validated passive chain.
    pub fn mu_entry(&self, i: usize, j: usize) -> KFunction {
        let f = self.clone();
        KFunction::new(move |k| {
            let (mu, dmu) = f.mu(k).expect("M1 of a passive chain is invertible");
            (mu.get(i, j), dmu.get(i, j))
        })
    }
}

pub fn factorize(chain: &Chain) -> Factorization {
    let m = chain.mobile;
    Factorization {
        m1: static_composition(chain.elements[..m].to_vec()),
        ms: moving_scatterer_matrix(chain.mobile_zeta()),
        m2: static_composition(chain.elements[m + 1..].to_vec()),
    }
}

/// Monochromatic pump, amplitudes in √(photon flux).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PumpSpec {
    b0: C64,
    c0: C64,
    power: f64,
    wavelength: f64,
}

/// Photon energy ħω at `wavelength`.
pub fn photon_energy(wavelength: f64) -> f64 {
    HBAR * 2.0 * PI * C_LIGHT / wavelength
}

impl PumpSpec {
    /// Pump entering from the left only.
    pub fn left(power: f64, wavelength: f64) -> Result<Self> {
        Self::split(power, wavelength, C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Total `power` shared between the two inputs in proportion to the
    /// complex weights (relative phase preserved).
    pub fn split(power: f64, wavelength: f64, left: C64, right: C64) -> Result<Self> {
        if !(power.is_finite() && power >= 0.0) {
            return Err(Error::BadPower(power));
        }
        check_wavelength(wavelength)?;
        let norm = (left.norm_sqr() + right.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Config("pump weights must not both vanish".into()));
        }
        let s = (power / photon_energy(wavelength)).sqrt() / norm;
        Ok(PumpSpec {
            b0: left * s,
            c0: right * s,
            power,
            wavelength,
        })
    }

    /// Pump from explicit amplitudes; power follows from the photon flux.
    pub fn from_amplitudes(b0: C64, c0: C64, wavelength: f64) -> Result<Self> {
        check_wavelength(wavelength)?;
        let power = (b0.norm_sqr() + c0.norm_sqr()) * photon_energy(wavelength);
        if !power.is_finite() {
            return Err(Error::BadPower(power));
        }
        Ok(PumpSpec {
            b0,
            c0,
            power,
            wavelength,
        })
    }

    pub fn b0(&self) -> C64 {
        self.b0
    }

    pub fn c0(&self) -> C64 {
        self.c0
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Total input photon flux, 1/s.
    pub fn photon_flux(&self) -> f64 {
        self.b0.norm_sqr() + self.c0.norm_sqr()
    }

    pub(crate) fn check_against(&self, chain: &Chain) -> Result<()> {
        let lc = chain.wavelength();
        if (self.wavelength - lc).abs() > 1e-12 * lc {
            return Err(Error::WavelengthMismatch {
                pump: self.wavelength,
                chain: lc,
            });
        }
        Ok(())
    }
}

fn check_wavelength(wavelength: f64) -> Result<()> {
    if wavelength.is_finite() && wavelength > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "wavelength must be finite and positive, got {wavelength} m"
        )))
    }
}
