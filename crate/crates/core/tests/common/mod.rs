#![allow(dead_code)]

use gaussent::{KernelParams, MomentSet};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

pub fn scalar(x: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, x)
}

fn square(n: usize, entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, &entries[..n * n])
}

/// `B Bᵀ / n + floor · I`.
pub fn spd(n: usize, entries: &[f64], floor: f64) -> DMatrix<f64> {
    let b = square(n, entries);
    &b * b.transpose() / n as f64 + DMatrix::identity(n, n) * floor
}

pub fn sym(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let b = square(n, entries);
    (&b + b.transpose()) * 0.5
}

pub fn antisym(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let b = square(n, entries);
    (&b - b.transpose()) * 0.5
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n)
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

/// Valid kernels: `A'` SPD, `A' - C'` SPD, arbitrary `A''`, `C''`, `d`.
pub fn kernel(max_n: usize) -> impl Strategy<Value = KernelParams> {
    (1..=max_n).prop_flat_map(|n| {
        (entries(n), entries(n), entries(n), entries(n), vector(n), vector(n)).prop_map(
            move |(a, gap, ai, ci, dr, di)| {
                let a_real = spd(n, &a, 0.5);
                let c_real = &a_real - spd(n, &gap, 0.3);
                KernelParams::from_parts(
                    a_real,
                    sym(n, &ai),
                    c_real,
                    antisym(n, &ci),
                    DVector::from_vec(dr),
                    DVector::from_vec(di),
                )
                .unwrap()
            },
        )
    })
}

/// Valid moment sets with general `S` and means.
pub fn moments(max_n: usize) -> impl Strategy<Value = MomentSet> {
    (1..=max_n).prop_flat_map(|n| {
        (entries(n), entries(n), entries(n), vector(n), vector(n)).prop_map(move |(q, p, s, mq, mp)| {
            MomentSet::from_parts(
                spd(n, &q, 0.3),
                spd(n, &p, 0.3),
                square(n, &s) * 0.5,
                DVector::from_vec(mq),
                DVector::from_vec(mp),
            )
            .unwrap()
        })
    })
}

/// Physical `S = 0` states with prescribed symplectic values:
/// `Q = ½ M diag(μ) Mᵀ`, `P = ½ M⁻ᵀ diag(μ) M⁻¹`.
pub fn physical_moments(max_n: usize) -> impl Strategy<Value = (MomentSet, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        (entries(n), prop::collection::vec(1.0f64..5.0, n)).prop_map(move |(m, mu)| {
            let m = DMatrix::identity(n, n) + square(n, &m) * 0.3;
            let minv = m.clone().try_inverse().unwrap();
            let d = DMatrix::from_diagonal(&DVector::from_vec(mu.clone())) * 0.5;
            let q = &m * &d * m.transpose();
            let p = minv.transpose() * &d * &minv;
            let q = (&q + q.transpose()) * 0.5;
            let p = (&p + p.transpose()) * 0.5;
            let mut mu = mu;
            mu.sort_by(|a, b| b.total_cmp(a));
            (MomentSet::uncorrelated(q, p).unwrap(), mu)
        })
    })
}

/// Largest entry difference, relative to the larger operand's scale (≥ 1).
pub fn rel_diff_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.amax().max(b.amax()).max(1.0);
    (a - b).amax() / scale
}

pub fn rel_diff_vec(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let scale = a.amax().max(b.amax()).max(1.0);
    (a - b).amax() / scale
}
