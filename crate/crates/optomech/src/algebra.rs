//! First-order velocity operator algebra.
//!
//! An operator entry has the form `a(k) + (v/c)·(b(k) + c(k)·∂/∂k)`. A 2×2
//! matrix of such entries is stored as a function of wavenumber returning an
//! [`EntryJet`] per entry: the values of `a`, `b`, `c` together with the
//! k-derivatives needed to keep composing. Products drop every `(v/c)²` term,
//! so truncation at first order is structural.

use crate::elements::Polarisability;
use crate::mat2::Mat2;
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A complex coefficient of wavenumber together with its analytic k-derivative.
#[derive(Clone)]
pub struct KFunction(Arc<dyn Fn(f64) -> (C64, C64) + Send + Sync>);

impl KFunction {
    /// `f(k)` returns `(value, d value / dk)`.
    pub fn new(f: impl Fn(f64) -> (C64, C64) + Send + Sync + 'static) -> Self {
        KFunction(Arc::new(f))
    }

    pub fn constant(c: C64) -> Self {
        KFunction::new(move |_| (c, ZERO))
    }

    pub fn value(&self, k: f64) -> C64 {
        (self.0)(k).0
    }

    /// Units: value × metres.
    pub fn derivative(&self, k: f64) -> C64 {
        (self.0)(k).1
    }

    pub fn eval(&self, k: f64) -> (C64, C64) {
        (self.0)(k)
    }
}

impl fmt::Debug for KFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("KFunction(..)")
    }
}

/// One operator entry evaluated at a single wavenumber.
///
/// `d2a` and `db` are carried so that the first-order parts of a product
/// remain differentiable in k.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EntryJet {
    pub a: C64,
    pub da: C64,
    pub d2a: C64,
    pub b: C64,
    pub db: C64,
    pub c: C64,
    pub dc: C64,
}

impl EntryJet {
    pub fn static_entry(a: C64, da: C64, d2a: C64) -> Self {
        EntryJet {
            a,
            da,
            d2a,
            ..Default::default()
        }
    }

    /// Operator product `p·q`, truncated at first order in v/c.
    fn product(p: &EntryJet, q: &EntryJet) -> EntryJet {
        EntryJet {
            a: p.a * q.a,
            da: p.da * q.a + p.a * q.da,
            d2a: p.d2a * q.a + 2.0 * p.da * q.da + p.a * q.d2a,
            b: p.b * q.a + p.c * q.da + p.a * q.b,
            db: p.db * q.a + p.b * q.da + p.dc * q.da + p.c * q.d2a + p.da * q.b + p.a * q.db,
            c: p.c * q.a + p.a * q.c,
            dc: p.dc * q.a + p.c * q.da + p.da * q.c + p.a * q.dc,
        }
    }

    fn add(self, o: EntryJet) -> EntryJet {
        EntryJet {
            a: self.a + o.a,
            da: self.da + o.da,
            d2a: self.d2a + o.d2a,
            b: self.b + o.b,
            db: self.db + o.db,
            c: self.c + o.c,
            dc: self.dc + o.dc,
        }
    }
}

/// A [`VOMatrix`] evaluated at one wavenumber.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MatrixJet(pub [[EntryJet; 2]; 2]);

impl MatrixJet {
    pub fn identity() -> Self {
        let one = EntryJet::static_entry(C64::new(1.0, 0.0), ZERO, ZERO);
        let mut m = MatrixJet::default();
        m.0[0][0] = one;
        m.0[1][1] = one;
        m
    }

    /// Static matrix from its value and first two k-derivatives.
    pub fn from_static(m: Mat2, dm: Mat2, d2m: Mat2) -> Self {
        let mut out = MatrixJet::default();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = EntryJet::static_entry(m.get(i, j), dm.get(i, j), d2m.get(i, j));
            }
        }
        out
    }

    pub fn entry(&self, i: usize, j: usize) -> &EntryJet {
        &self.0[i][j]
    }

    fn select(&self, f: impl Fn(&EntryJet) -> C64) -> Mat2 {
        let e = &self.0;
        Mat2::new(f(&e[0][0]), f(&e[0][1]), f(&e[1][0]), f(&e[1][1]))
    }

    /// Zeroth-order (static) part.
    pub fn zeroth(&self) -> Mat2 {
        self.select(|e| e.a)
    }

    /// k-derivative of the zeroth-order part.
    pub fn zeroth_derivative(&self) -> Mat2 {
        self.select(|e| e.da)
    }

    pub fn scalar_part(&self) -> Mat2 {
        self.select(|e| e.b)
    }

    pub fn derivative_part(&self) -> Mat2 {
        self.select(|e| e.c)
    }

    pub fn mul(&self, rhs: &MatrixJet) -> MatrixJet {
        let mut out = MatrixJet::default();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = EntryJet::product(&self.0[i][0], &rhs.0[0][j])
                    .add(EntryJet::product(&self.0[i][1], &rhs.0[1][j]));
            }
        }
        out
    }
}

/// Entry view of a [`VOMatrix`]: `a + (v/c)(b + c ∂/∂k)`.
#[derive(Clone, Debug)]
pub struct VOEntry {
    pub a: KFunction,
    pub b: KFunction,
    pub c: KFunction,
}

/// 2×2 matrix of first-order velocity operators, stored as a function of k.
#[derive(Clone)]
pub struct VOMatrix(Arc<dyn Fn(f64) -> MatrixJet + Send + Sync>);

impl VOMatrix {
    pub fn from_fn(f: impl Fn(f64) -> MatrixJet + Send + Sync + 'static) -> Self {
        VOMatrix(Arc::new(f))
    }

    pub fn identity() -> Self {
        VOMatrix::from_fn(|_| MatrixJet::identity())
    }

    /// Static (velocity-independent) matrix; `f(k)` returns the matrix and its
    /// first and second k-derivatives.
    pub fn from_static(f: impl Fn(f64) -> (Mat2, Mat2, Mat2) + Send + Sync + 'static) -> Self {
        VOMatrix::from_fn(move |k| {
            let (m, dm, d2m) = f(k);
            MatrixJet::from_static(m, dm, d2m)
        })
    }

    pub fn at(&self, k: f64) -> MatrixJet {
        (self.0)(k)
    }

    pub fn entry(&self, i: usize, j: usize) -> VOEntry {
        let part = |pick: fn(&EntryJet) -> (C64, C64)| {
            let m = self.clone();
            KFunction::new(move |k| pick(m.at(k).entry(i, j)))
        };
        VOEntry {
            a: part(|e| (e.a, e.da)),
            b: part(|e| (e.b, e.db)),
            c: part(|e| (e.c, e.dc)),
        }
    }
}

impl fmt::Debug for VOMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("VOMatrix(..)")
    }
}

/// Operator product `left · right`, truncated at first order in v/c.
pub fn vo_mul(left: &VOMatrix, right: &VOMatrix) -> VOMatrix {
    let (l, r) = (left.clone(), right.clone());
    VOMatrix::from_fn(move |k| l.at(k).mul(&r.at(k)))
}

/// Transfer operator of a scatterer moving at velocity v.
///
/// The static part is the usual scatterer matrix. Reflection into the
/// opposite direction carries the Doppler factor of a moving mirror, which
/// appears as derivative parts `2k·iζ` on the two off-diagonal entries.
pub fn moving_scatterer_matrix(zeta: Polarisability) -> VOMatrix {
    let z = zeta.value();
    let i = C64::i();
    let m = crate::elements::scatterer_matrix(zeta);
    VOMatrix::from_fn(move |k| {
        let mut jet = MatrixJet::from_static(m, Mat2::ZERO, Mat2::ZERO);
        for (row, col) in [(0, 1), (1, 0)] {
            jet.0[row][col].c = 2.0 * k * i * z;
            jet.0[row][col].dc = 2.0 * i * z;
        }
        jet
    })
}
