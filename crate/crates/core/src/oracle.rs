//! Brute-force dense-matrix references.
//!
//! Everything here is built from the tripartite pure state
//! `(|0>_A |0>_U + |1>_A |1>_U) / sqrt 2` written out in the Dave ⊗ AntiDave
//! Fock basis, using only `tanh r` and `cosh r`; none of the block formulas
//! of [`crate::states`] are reused.

use crate::modes::SqueezingParameter;
use crate::states::FockTruncation;
use nalgebra::{DMatrix, SymmetricEigen};

/// Dense `rho_AD = Tr_{AntiDave} |Psi><Psi|` in the Alice-major layout with
/// Dave levels `0..=n_max+1`.
pub fn rho_ad_dense(sq: &SqueezingParameter, trunc: &FockTruncation) -> DMatrix<f64> {
    let n_max = trunc.n_max;
    let dave_dim = n_max + 2;
    let anti_dim = n_max + 1;
    let r = sq.r();
    let (t, c) = (r.tanh(), r.cosh());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // psi[(a, d), dbar]
    let mut psi = DMatrix::<f64>::zeros(2 * dave_dim, anti_dim);
    for n in 0..=n_max {
        let tn = t.powi(n as i32);
        // vacuum: tanh^n r / cosh r |n, n>
        psi[(n, n)] += s * tn / c;
        // one particle: tanh^n r sqrt(n+1) / cosh^2 r |n+1, n>
        psi[(dave_dim + n + 1, n)] += s * tn * ((n + 1) as f64).sqrt() / (c * c);
    }
    &psi * psi.transpose()
}

/// Partial transpose on Alice by index swap:
/// `rho^T[(a, d), (a', d')] = rho[(a', d), (a, d')]`.
pub fn partial_transpose_dense(rho: &DMatrix<f64>, dave_dim: usize) -> DMatrix<f64> {
    let dim = rho.nrows();
    assert_eq!(dim, 2 * dave_dim);
    DMatrix::from_fn(dim, dim, |i, j| {
        let (a, d) = (i / dave_dim, i % dave_dim);
        let (a2, d2) = (j / dave_dim, j % dave_dim);
        rho[(a2 * dave_dim + d, a * dave_dim + d2)]
    })
}

/// Basis states of the partial transpose whose rows are complete in a state
/// truncated at `n_max`: `|0,m>` for `m <= n_max` and `|1,m>` for
/// `m < n_max`.
pub fn pt_complete_indices(n_max: usize) -> Vec<usize> {
    let dave_dim = n_max + 2;
    (0..=n_max).chain((0..n_max).map(|m| dave_dim + m)).collect()
}

pub fn restrict(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Entries smaller than `sqrt(MIN_POSITIVE)` times the largest one are
/// flushed to zero first: their squares underflow inside the Householder
/// reduction, which then divides by a zero norm. The eigenvalues move by at
/// most that size, ~1e-154 relative.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let floor = f64::MIN_POSITIVE.sqrt() * m.amax();
    let m = m.map(|x| if x.abs() < floor { 0.0 } else { x });
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Partial trace over Alice: Dave's reduced matrix.
pub fn trace_out_alice(rho: &DMatrix<f64>, dave_dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dave_dim, dave_dim, |d, d2| rho[(d, d2)] + rho[(dave_dim + d, dave_dim + d2)])
}

/// Partial trace over Dave: Alice's 2x2 reduced matrix.
pub fn trace_out_dave(rho: &DMatrix<f64>, dave_dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |a, a2| (0..dave_dim).map(|d| rho[(a * dave_dim + d, a2 * dave_dim + d)]).sum())
}

pub fn entropy_bits_of_spectrum(ev: &[f64]) -> f64 {
    ev.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

pub fn trace_norm(ev: &[f64]) -> f64 {
    ev.iter().map(|x| x.abs()).sum()
}
