//! Extended-precision region spectra.
//!
//! Deep in the entanglement spectrum of a massless chain the mode ratios fall
//! to `ξ ~ 1e-20` and below, far under the `1e-16` relative resolution of the
//! double-precision `η̄` reduction. This module repeats the chain pipeline
//! (Toeplitz moments → `Θ[Ξ]` → `η̄`) in double-double arithmetic with a
//! cyclic Jacobi eigensolver, then rounds the final `ξᵢ` to `f64`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

use crate::chain::{ChainConfig, Region};
use crate::error::{Error, Result};
use crate::spectrum::{ModeSpectrum, ETA_ONE_TOL, NEG_ETA_TOL};
use crate::state::Tolerances;

/// Minimal real-number interface shared by `f64` and double-double.
pub(crate) trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Unit roundoff.
    const EPS: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn pi() -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON / 2.0;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

/// Double-double number. Wraps [`TwoFloat`] for its error-free sums,
/// products and square root, but divides by long division: the crate's own
/// `TwoFloat / TwoFloat` forms its residual without a fused multiply-add and
/// is only accurate to double precision.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub(crate) struct Dd(TwoFloat);

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0 + rhs.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0 - rhs.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let b = rhs.0;
        let q1 = self.0.hi() / b.hi();
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        Dd(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Real for Dd {
    // 2^-104
    const EPS: f64 = 4.930_380_657_631_324e-32;
    fn from_f64(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }
    fn to_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }
    fn sqrt(self) -> Self {
        Dd(self.0.sqrt())
    }
    fn pi() -> Self {
        Dd(twofloat::consts::PI)
    }
}

/// `sin θ` and `cos θ` by Taylor series, for `0 ≤ θ ≤ π/4`.
fn taylor_sin_cos<T: Real>(theta: T) -> (T, T) {
    let one = T::from_f64(1.0);
    let t2 = theta * theta;
    let (mut sin, mut cos) = (theta, one);
    let (mut s_term, mut c_term) = (theta, one);
    let mut k = 1.0;
    loop {
        s_term = -(s_term * t2) / T::from_f64((2.0 * k) * (2.0 * k + 1.0));
        c_term = -(c_term * t2) / T::from_f64((2.0 * k - 1.0) * (2.0 * k));
        sin = sin + s_term;
        cos = cos + c_term;
        if c_term.abs().to_f64() < T::EPS * 1e-3 && s_term.abs().to_f64() < T::EPS * 1e-3 {
            return (sin, cos);
        }
        k += 1.0;
    }
}

/// `cos(π num / den)`, with the argument reduced exactly in integers.
pub(crate) fn cos_pi_ratio<T: Real>(num: i64, den: i64) -> T {
    assert!(den > 0);
    // x = num/den ∈ [0, 2)
    let mut num = num.rem_euclid(2 * den);
    let mut den = den;
    if num > den {
        num = 2 * den - num;
    }
    // x ∈ [0, 1]
    let mut sign = T::from_f64(1.0);
    if 2 * num > den {
        num = den - num;
        sign = -sign;
    }
    // x ∈ [0, 1/2]
    if 4 * num > den {
        // cos(πx) = sin(π(1/2 - x))
        let (n2, d2) = (den - 2 * num, 2 * den);
        num = n2;
        den = d2;
        let theta = T::pi() * T::from_f64(num as f64) / T::from_f64(den as f64);
        return sign * taylor_sin_cos(theta).0;
    }
    let theta = T::pi() * T::from_f64(num as f64) / T::from_f64(den as f64);
    sign * taylor_sin_cos(theta).1
}

/// `sin(π num / den)`.
pub(crate) fn sin_pi_ratio<T: Real>(num: i64, den: i64) -> T {
    cos_pi_ratio(den - 2 * num, 2 * den)
}

/// Dense row-major square matrix.
#[derive(Debug, Clone)]
pub(crate) struct Square<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> Square<T> {
    fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Square { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    fn frobenius2(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }
}

/// Eigenpairs of a symmetric matrix by the cyclic Jacobi method.
/// Returns eigenvalues (unsorted) and eigenvectors as columns.
pub(crate) fn jacobi_eigen<T: Real>(m: &Square<T>) -> (Vec<T>, Square<T>) {
    let n = m.n;
    let mut a = m.clone();
    let mut v = Square::from_fn(n, |i, j| T::from_f64(if i == j { 1.0 } else { 0.0 }));
    let scale = a.frobenius2();
    let tiny = scale * T::from_f64(T::EPS * T::EPS);
    let one = T::from_f64(1.0);
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + a.at(i, j) * a.at(i, j);
            }
        }
        if !(off > tiny) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (a.at(q, q) - a.at(p, p)) / (T::from_f64(2.0) * apq);
                let t = {
                    let mag = one / (theta.abs() + (theta * theta + one).sqrt());
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = one / (t * t + one).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.at(k, p);
                    let akq = a.at(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.at(p, k);
                    let aqk = a.at(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.at(k, p);
                    let vkq = v.at(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    ((0..n).map(|i| a.at(i, i)).collect(), v)
}

/// `V f(D) Vᵀ`.
fn spectral_map<T: Real>(values: &[T], vectors: &Square<T>, f: impl Fn(T) -> T) -> Square<T> {
    let n = vectors.n;
    let fd: Vec<T> = values.iter().map(|&x| f(x)).collect();
    Square::from_fn(n, |i, j| {
        (0..n).fold(T::zero(), |acc, k| acc + vectors.at(i, k) * fd[k] * vectors.at(j, k))
    })
}

/// `ηᵢ` of a real `S = 0` moment pair `(Q, P)`, via `A' = P + ¼Q⁻¹`,
/// `C' = P - ¼Q⁻¹` and the `η̄` reduction.
pub(crate) fn eta_from_qp<T: Real>(q: &Square<T>, p: &Square<T>, max_condition: f64) -> Result<Vec<T>> {
    let n = q.n;
    let (qv, qvec) = jacobi_eigen(q);
    let lo = qv.iter().copied().fold(qv[0], |a, b| if b < a { b } else { a });
    let hi = qv.iter().copied().fold(qv[0], |a, b| if b > a { b } else { a });
    if !(lo > T::zero()) {
        return Err(Error::NotPositiveDefinite {
            what: "position covariance Q",
            eigenvalue: lo.to_f64(),
        });
    }
    let cond = (hi / lo).to_f64();
    if cond > max_condition {
        return Err(Error::IllConditioned {
            what: "position covariance Q",
            condition: cond,
            bound: max_condition,
        });
    }
    let quarter = T::from_f64(0.25);
    let g = spectral_map(&qv, &qvec, |x| quarter / x);
    let a_real = Square::from_fn(n, |i, j| p.at(i, j) + g.at(i, j));
    let c_real = Square::from_fn(n, |i, j| p.at(i, j) - g.at(i, j));

    let (av, avec) = jacobi_eigen(&a_real);
    if let Some(bad) = av.iter().find(|&&x| !(x > T::zero())) {
        return Err(Error::NotPositiveDefinite {
            what: "a_real",
            eigenvalue: bad.to_f64(),
        });
    }
    // Oᵀ C' O
    let co = Square::from_fn(n, |i, j| {
        (0..n).fold(T::zero(), |acc, k| acc + c_real.at(i, k) * avec.at(k, j))
    });
    let inv_root: Vec<T> = av.iter().map(|&x| T::from_f64(1.0) / x.sqrt()).collect();
    let scaled = Square::from_fn(n, |i, j| {
        let r = (0..n).fold(T::zero(), |acc, k| acc + avec.at(k, i) * co.at(k, j));
        inv_root[i] * r * inv_root[j]
    });
    Ok(jacobi_eigen(&scaled).0)
}

/// Applies the `η` clamping rules of the double-precision path and maps to `ξ`.
pub(crate) fn xi_from_eta_precise<T: Real>(raw: &[T]) -> Result<(Vec<f64>, usize)> {
    let one = T::from_f64(1.0);
    let mut clamped = 0;
    let mut xi = Vec::with_capacity(raw.len());
    for &eta in raw {
        let eta = if eta < T::zero() {
            if eta.to_f64() < -NEG_ETA_TOL {
                return Err(Error::NegativeEta { eta: eta.to_f64() });
            }
            T::zero()
        } else if !(eta < one) {
            let e = eta.to_f64();
            if !(e <= 1.0 + ETA_ONE_TOL) {
                return Err(Error::NonNormalizable { eta: e });
            }
            clamped += 1;
            one - T::from_f64(f64::EPSILON / 2.0)
        } else {
            eta
        };
        let x = eta / (one + ((one - eta) * (one + eta)).sqrt());
        xi.push(x.to_f64());
    }
    Ok((xi, clamped))
}

/// Toeplitz generators `q_r`, `p_r` of the chain ground state, `r = 0..N-1`.
fn chain_generators<T: Real>(config: &ChainConfig) -> Result<(Vec<T>, Vec<T>)> {
    if config.boundary == crate::chain::Boundary::Periodic && config.mass == 0.0 {
        return Err(Error::ZeroModeDivergence);
    }
    let n = config.n_sites as i64;
    let alpha = i64::from(config.alpha());
    let modes: Vec<i64> = (0..n)
        .map(|m| {
            let j = (2 * m + alpha) % (2 * n);
            if j > n {
                j - 2 * n
            } else {
                j
            }
        })
        .collect();
    let two_over_a = T::from_f64(2.0) / T::from_f64(config.lattice_const);
    let kappa = T::from_f64(config.mass);
    let omega: Vec<T> = modes
        .iter()
        .map(|&j| {
            let s = two_over_a * sin_pi_ratio::<T>(j, 2 * n);
            (s * s + kappa * kappa).sqrt()
        })
        .collect();
    let half = T::from_f64(0.5);
    let nn = T::from_f64(n as f64);
    let mut q = Vec::with_capacity(n as usize);
    let mut p = Vec::with_capacity(n as usize);
    for r in 0..n {
        let (mut qs, mut ps) = (T::zero(), T::zero());
        for (&j, &w) in modes.iter().zip(&omega) {
            let c = cos_pi_ratio::<T>(j * r, n);
            qs = qs + c * half / w;
            ps = ps + c * half * w;
        }
        q.push(qs / nn);
        p.push(ps / nn);
    }
    Ok((q, p))
}

/// Region spectrum of the chain ground state computed in double-double
/// arithmetic. Agrees with [`crate::chain::region_spectrum`] to double
/// precision where both are accurate, and resolves `ξᵢ` many orders of
/// magnitude smaller.
pub fn region_spectrum_extended(config: &ChainConfig, region: Region) -> Result<ModeSpectrum> {
    let n = config.n_sites;
    if region.len == 0 || region.len > n || region.start >= n {
        return Err(Error::domain(format!(
            "region (start {}, length {}) does not fit a chain of {} sites",
            region.start, region.len, n
        )));
    }
    let (q, p) = chain_generators::<Dd>(config)?;
    let idx: Vec<usize> = region.indices(n).collect();
    let l = idx.len();
    let qm = Square::from_fn(l, |i, j| q[idx[i].abs_diff(idx[j])]);
    let pm = Square::from_fn(l, |i, j| p[idx[i].abs_diff(idx[j])]);
    let eta = eta_from_qp(&qm, &pm, Tolerances::default().max_condition)?;
    let (xi, clamped) = xi_from_eta_precise(&eta)?;
    Ok(ModeSpectrum::assemble(xi, clamped))
}
