//! Test-only oracles that share no code with the closed-form solver.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use optomech::consts::{C_LIGHT, HBAR};
use optomech::{Chain, Element, PumpSpec};

const EDGE: f64 = 1e-24;

type M2 = [[C64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Plain transfer matrix of a run of elements at wavenumber k + δk. The
/// offset's phase is computed separately so that small offsets stay exact.
fn transfer(elements: &[Element], k: f64, dk: f64) -> M2 {
    let i = C64::i();
    let mut m = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ];
    for e in elements {
        let f = match e {
            Element::Scatterer(z) => {
                let iz = i * z.value();
                [[1.0 + iz, iz], [-iz, 1.0 - iz]]
            }
            Element::Segment(d) => {
                let p = C64::from_polar(1.0, k * d) * C64::from_polar(1.0, dk * d);
                [[p, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), p.conj()]]
            }
        };
        m = mul(&m, &f);
    }
    m
}

/// Solves a banded system by Gaussian elimination with partial pivoting.
/// Each row keeps a window of 7 coefficients starting at column `start`;
/// initially row `i` covers columns `i−2 ..= i+4`.
fn band_solve(mut rows: Vec<[C64; 7]>, mut rhs: Vec<C64>) -> Vec<C64> {
    const KL: usize = 2;
    let zero = C64::new(0.0, 0.0);
    let n = rows.len();
    let mut start: Vec<isize> = (0..n).map(|i| i as isize - KL as isize).collect();
    let get = |row: &[C64; 7], s: isize, col: usize| -> C64 {
        let o = col as isize - s;
        if (0..7).contains(&o) {
            row[o as usize]
        } else {
            zero
        }
    };
    let rebase = |row: &[C64; 7], s: isize, new_s: isize| -> [C64; 7] {
        let mut out = [zero; 7];
        for (o, v) in out.iter_mut().enumerate() {
            let col = new_s + o as isize;
            if col >= 0 {
                *v = get(row, s, col as usize);
            }
        }
        // Nothing may fall outside the new window.
        for (o, v) in row.iter().enumerate() {
            let col = s + o as isize;
            debug_assert!(
                *v == zero || (new_s..new_s + 7).contains(&col),
                "band overflow"
            );
        }
        out
    };
    for j in 0..n {
        let last = (j + KL).min(n - 1);
        let p = (j..=last)
            .max_by(|&a, &b| {
                get(&rows[a], start[a], j)
                    .norm()
                    .total_cmp(&get(&rows[b], start[b], j).norm())
            })
            .unwrap();
        rows.swap(j, p);
        start.swap(j, p);
        rhs.swap(j, p);
        // Columns left of j are eliminated, so the pivot row fits a window at j.
        rows[j] = rebase(&rows[j], start[j], j as isize);
        start[j] = j as isize;
        let pivot = rows[j][0];
        assert!(pivot.norm() > 0.0, "singular ladder system");
        for i in j + 1..=last {
            let f = get(&rows[i], start[i], j) / pivot;
            if f == zero {
                continue;
            }
            if start[i] > j as isize {
                unreachable!("row below the pivot starts past the pivot column");
            }
            rows[i] = rebase(&rows[i], start[i], j as isize);
            start[i] = j as isize;
            let pivot_row = rows[j];
            for (v, p) in rows[i].iter_mut().zip(pivot_row) {
                *v -= f * p;
            }
            // Eliminated exactly; drop the round-off residue.
            rows[i][0] = zero;
            rhs[i] = rhs[i] - f * rhs[j];
        }
    }
    let mut x = vec![zero; n];
    for j in (0..n).rev() {
        let mut acc = rhs[j];
        for o in 1..7 {
            if j + o < n {
                acc -= rows[j][o] * x[j + o];
            }
        }
        x[j] = acc / rows[j][0];
    }
    x
}

/// Reflections of the two sub-stacks seen from the mobile scatterer, and
/// the pump amplitudes they pass on to it, at wavenumber k₀ + δk.
struct Substacks {
    r1: C64,
    r2: C64,
    sb: C64,
    sc: C64,
}

fn substacks(chain: &Chain, pump: &PumpSpec, dk: f64) -> Substacks {
    let (mi, k) = (chain.mobile_index(), chain.k0());
    let m = transfer(&chain.elements()[..mi], k, dk);
    let q = transfer(&chain.elements()[mi + 1..], k, dk);
    Substacks {
        r1: -m[1][0] / m[1][1],
        r2: q[0][1] / q[1][1],
        sb: pump.b0() / m[1][1],
        sc: (q[0][0] * q[1][1] - q[0][1] * q[1][0]) / q[1][1] * pump.c0(),
    }
}

/// d R(k₀ρⁿ)/dβ = n·g at β = 0 for both sub-stack reflections: central
/// differences at v/c and 2v/c, Richardson-extrapolated.
fn reflection_slopes(chain: &Chain, pump: &PumpSpec, v_over_c: f64) -> (C64, C64) {
    let k0 = chain.k0();
    let central = |h: f64| {
        let up = substacks(chain, pump, 2.0 * h * k0);
        let down = substacks(chain, pump, -2.0 * h * k0);
        ((up.r1 - down.r1) / (2.0 * h), (up.r2 - down.r2) / (2.0 * h))
    };
    let (fine, coarse) = (central(v_over_c), central(2.0 * v_over_c));
    (
        (4.0 * fine.0 - coarse.0) / 3.0,
        (4.0 * fine.1 - coarse.1) / 3.0,
    )
}

/// Amplitudes around the mobile scatterer summed over a ladder of Doppler
/// sidebands, with their first-order velocity parts.
///
/// A scatterer moving at v = βc returns a wave reflected off its left face
/// one rung down the ladder k → k/ρ with amplitude r/ρ, and off its right
/// face one rung up with amplitude rρ, ρ = (1+β)/(1−β). Sideband n sees the
/// sub-stacks at k₀ρⁿ. The ladder equations are differentiated in β at
/// β = 0; the only numerical derivative is that of the sub-stack
/// reflections, taken by central differences at k₀(1 ± 2v/c) and k₀(1 ± 4v/c).
#[derive(Clone, Copy, Debug)]
pub struct SidebandResponse {
    pub a0: C64,
    pub b0: C64,
    pub c0: C64,
    pub d0: C64,
    /// d/dβ of the summed amplitudes.
    pub a1: C64,
    pub b1: C64,
    pub c1: C64,
    pub d1: C64,
    /// Sidebands kept on each side of the carrier (`usize::MAX`: unbounded).
    pub n_side: usize,
}

impl SidebandResponse {
    /// ħk₀(|ΣA|² + |ΣB|² − |ΣC|² − |ΣD|²), N.
    pub fn force(&self, k0: f64) -> f64 {
        HBAR * k0
            * (self.a0.norm_sqr() + self.b0.norm_sqr() - self.c0.norm_sqr() - self.d0.norm_sqr())
    }

    /// dF/dv, N·s/m.
    pub fn friction(&self, k0: f64) -> f64 {
        let re = |x: C64, y: C64| (x * y.conj()).re;
        2.0 * HBAR
            * k0
            * (re(self.a0, self.a1) + re(self.b0, self.b1)
                - re(self.c0, self.c1)
                - re(self.d0, self.d1))
            / C_LIGHT
    }
}

/// Ladder at β = 0 plus its β-derivative, for `n_side` sidebands a side.
/// Also returns the relative weight of the outermost rungs.
pub fn ladder_response(
    chain: &Chain,
    pump: &PumpSpec,
    v_over_c: f64,
    n_side: usize,
) -> (SidebandResponse, f64) {
    let z = chain.mobile_zeta().value();
    let i = C64::i();
    let r = i * z / (1.0 - i * z);
    let t = 1.0 / (1.0 - i * z);
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let s = substacks(chain, pump, 0.0);
    let (g1, g2) = reflection_slopes(chain, pump, v_over_c);

    let len = 2 * n_side + 1;
    let carrier = n_side;
    let rung = |idx: usize| idx as f64 - n_side as f64;
    let sb = |idx: usize| if idx == carrier { s.sb } else { zero };
    let sc = |idx: usize| if idx == carrier { s.sc } else { zero };

    // Unknowns interleaved as A_idx → 2·idx, D_idx → 2·idx + 1.
    //   A_n = (r/ρ)(R₁A_{n+1} + s_B,{n+1}) + t(R₂D_n + s_C,n)
    //   D_n = t(R₁A_n + s_B,n) + rρ(R₂D_{n−1} + s_C,{n−1})
    // The β-derivative of each coefficient goes into `dl`, of each source into `ds`.
    let n = 2 * len;
    let mut rows = vec![[zero; 7]; n];
    let mut dl: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
    let mut rhs = vec![zero; n];
    let mut ds = vec![zero; n];
    let put = |rows: &mut Vec<[C64; 7]>, row: usize, col: usize, v: C64| {
        rows[row][(col as isize - row as isize + 2) as usize] += v;
    };
    for idx in 0..len {
        let row = 2 * idx;
        put(&mut rows, row, row, one);
        if idx + 1 < len {
            put(&mut rows, row, 2 * (idx + 1), -r * s.r1);
            dl[row].push((2 * (idx + 1), -(-2.0 * r * s.r1 + r * rung(idx + 1) * g1)));
            rhs[row] += r * sb(idx + 1);
            ds[row] += -2.0 * r * sb(idx + 1);
        }
        put(&mut rows, row, row + 1, -t * s.r2);
        dl[row].push((row + 1, -t * rung(idx) * g2));
        rhs[row] += t * sc(idx);

        let row = 2 * idx + 1;
        put(&mut rows, row, row, one);
        put(&mut rows, row, row - 1, -t * s.r1);
        dl[row].push((row - 1, -t * rung(idx) * g1));
        rhs[row] += t * sb(idx);
        if idx > 0 {
            put(&mut rows, row, row - 2, -r * s.r2);
            dl[row].push((row - 2, -(2.0 * r * s.r2 + r * rung(idx - 1) * g2)));
            rhs[row] += r * sc(idx - 1);
            ds[row] += 2.0 * r * sc(idx - 1);
        }
    }
    let x = band_solve(rows.clone(), rhs);
    let drive: Vec<C64> = (0..n)
        .map(|row| ds[row] - dl[row].iter().map(|&(col, v)| v * x[col]).sum::<C64>())
        .collect();
    let dx = band_solve(rows, drive);

    let mut out = SidebandResponse {
        a0: zero,
        b0: zero,
        c0: zero,
        d0: zero,
        a1: zero,
        b1: zero,
        c1: zero,
        d1: zero,
        n_side,
    };
    let mut biggest = 0.0f64;
    for idx in 0..len {
        let (a, d, da, dd) = (x[2 * idx], x[2 * idx + 1], dx[2 * idx], dx[2 * idx + 1]);
        out.a0 += a;
        out.d0 += d;
        out.b0 += s.r1 * a + sb(idx);
        out.c0 += s.r2 * d + sc(idx);
        out.a1 += da;
        out.d1 += dd;
        out.b1 += rung(idx) * g1 * a + s.r1 * da;
        out.c1 += rung(idx) * g2 * d + s.r2 * dd;
        biggest = biggest.max(a.norm()).max(d.norm());
    }
    let edge = [x[0], x[1], x[n - 2], x[n - 1]]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        / biggest;
    (out, edge)
}

/// Sideband response of the infinite ladder.
///
/// At β = 0 the ladder is translation invariant, so summing its equations
/// over n, and summing them again weighted by n, closes it: the summed
/// amplitudes S and first moments P = Σ n·X_n obey 2×2 systems with the
/// single-rung matrix [[1 − rR₁, −tR₂], [−tR₁, 1 − rR₂]].
pub fn moment_response(chain: &Chain, pump: &PumpSpec, v_over_c: f64) -> SidebandResponse {
    let z = chain.mobile_zeta().value();
    let i = C64::i();
    let r = i * z / (1.0 - i * z);
    let t = 1.0 / (1.0 - i * z);
    let s = substacks(chain, pump, 0.0);
    let (g1, g2) = reflection_slopes(chain, pump, v_over_c);
    let (m11, m12, m21, m22) = (1.0 - r * s.r1, -t * s.r2, -t * s.r1, 1.0 - r * s.r2);
    let det = m11 * m22 - m12 * m21;
    let solve = |u: C64, w: C64| ((m22 * u - m12 * w) / det, (m11 * w - m21 * u) / det);

    let (a0, d0) = solve(r * s.sb + t * s.sc, t * s.sb + r * s.sc);
    let b0 = s.r1 * a0 + s.sb;
    let c0 = s.r2 * d0 + s.sc;
    let (pa, pd) = solve(-r * b0, r * c0);
    let (a1, d1) = solve(
        -2.0 * r * b0 + r * g1 * pa + t * g2 * pd,
        2.0 * r * c0 + t * g1 * pa + r * g2 * pd,
    );
    let b1 = s.r1 * a1 + g1 * pa;
    let c1 = s.r2 * d1 + g2 * pd;
    SidebandResponse {
        a0,
        b0,
        c0,
        d0,
        a1,
        b1,
        c1,
        d1,
        n_side: usize::MAX,
    }
}

/// Sideband response with the ladder lengthened until its ends carry no
/// weight (relative amplitude below 1e−24).
pub fn sideband_response(chain: &Chain, pump: &PumpSpec, v_over_c: f64) -> SidebandResponse {
    let mut n_side = 256;
    loop {
        let (resp, edge) = ladder_response(chain, pump, v_over_c, n_side);
        if edge < EDGE {
            return resp;
        }
        assert!(n_side < 1 << 22, "sideband ladder does not converge");
        n_side *= 2;
    }
}
