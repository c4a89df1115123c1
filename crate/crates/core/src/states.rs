//! Truncated Fock-space states of one Alice mode and one Dave mode.
//!
//! Alice holds a Minkowski qubit `(|0> + |1>)/sqrt 2`; Dave sees the diamond
//! interior half of the two-mode squeezed Unruh vacuum. Tracing out the
//! exterior partner leaves
//!
//! ```text
//! rho_AD = sum_n tanh^{2n} r / (2 cosh^2 r) * rho^(n)
//! ```
//!
//! where each `rho^(n)` is a rank-one 2x2 block on `{|0,n>, |1,n+1>}`.
//!
//! Basis ordering of every dense matrix here is Alice-major:
//! index `(a, d) -> a * dave_dim + d`.

use crate::modes::SqueezingParameter;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Hard upper limit on the retained Dave occupation.
pub const N_MAX_CAP: usize = 10_000;
/// Default weight allowed in the discarded tail.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatesError {
    #[error("truncation too small: tail weight {tail:e} exceeds {tol:e} even at n_max = {n_max}")]
    TruncationTooSmall { n_max: usize, tail: f64, tol: f64 },
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("expected a {expected:?} state, got {found:?}")]
    WrongRepresentation {
        expected: Representation,
        found: Representation,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NmaxPolicy {
    /// Smallest `n_max` whose discarded weight is below `tol`.
    Auto { tol: f64 },
    Fixed(usize),
}

impl Default for NmaxPolicy {
    fn default() -> Self {
        NmaxPolicy::Auto { tol: DEFAULT_TAIL_TOL }
    }
}

/// Fock cutoff: blocks `n = 0..=n_max` of `rho_AD` are kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockTruncation {
    pub n_max: usize,
    /// Trace lost to the cutoff, the larger of the losses of `rho_AD` and of
    /// its regrouped partial transpose (see [`truncation_tail`]).
    pub tail_bound: f64,
}

/// Exact weight of the `rho_AD` blocks beyond `n_max`:
/// `q^{N+1} (N + 3 - (N+1) q) / 2` with `q = tanh^2 r`.
pub fn rho_ad_tail(sq: &SqueezingParameter, n_max: usize) -> f64 {
    let q = sq.tanh2();
    if q == 0.0 {
        return 0.0;
    }
    let n = n_max as f64;
    let qn = q.powi(n_max as i32 + 1);
    // N + 3 - (N+1) q = 2 + (N+1)(1-q)
    0.5 * qn * (2.0 + (n + 1.0) * sq.sech2())
}

/// Trace missing from the partial transpose regrouped into complete blocks
/// `R^(n)`, `n < n_max`:
/// `q^{N+1}/2 + q^{N-1} (1 + (N-1)(1-q)) / 2`.
pub fn partial_transpose_tail(sq: &SqueezingParameter, n_max: usize) -> f64 {
    let q = sq.tanh2();
    let n = n_max as f64;
    let lead = if n_max == 0 { 0.0 } else { q.powi(n_max as i32 - 1) * (1.0 + (n - 1.0) * sq.sech2()) };
    0.5 * (q.powi(n_max as i32 + 1) + lead)
}

/// Larger of [`rho_ad_tail`] and [`partial_transpose_tail`]; the latter
/// always dominates, but both are evaluated so the bound never depends on
/// that algebra.
pub fn truncation_tail(sq: &SqueezingParameter, n_max: usize) -> f64 {
    rho_ad_tail(sq, n_max).max(partial_transpose_tail(sq, n_max))
}

impl FockTruncation {
    pub fn new(sq: &SqueezingParameter, policy: NmaxPolicy) -> Result<Self, StatesError> {
        match policy {
            NmaxPolicy::Fixed(n) => Self::fixed(sq, n),
            NmaxPolicy::Auto { tol } => Self::auto(sq, tol),
        }
    }

    pub fn fixed(sq: &SqueezingParameter, n_max: usize) -> Result<Self, StatesError> {
        if n_max == 0 || n_max > N_MAX_CAP {
            return Err(StatesError::InvalidTruncation(format!(
                "n_max = {n_max} must lie in 1..={N_MAX_CAP}"
            )));
        }
        Ok(Self { n_max, tail_bound: truncation_tail(sq, n_max) })
    }

    pub fn auto(sq: &SqueezingParameter, tol: f64) -> Result<Self, StatesError> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(StatesError::InvalidTruncation(format!("tolerance {tol} not in (0, 1)")));
        }
        let q = sq.tanh2();
        // first guess from the geometric factor alone, then walk to the exact answer
        let mut n = if q == 0.0 {
            1
        } else {
            ((tol.ln() / q.ln()).ceil().max(1.0) as usize).min(N_MAX_CAP)
        };
        while n > 1 && truncation_tail(sq, n - 1) <= tol {
            n -= 1;
        }
        while truncation_tail(sq, n) > tol {
            if n >= N_MAX_CAP {
                return Err(StatesError::TruncationTooSmall {
                    n_max: N_MAX_CAP,
                    tail: truncation_tail(sq, N_MAX_CAP),
                    tol,
                });
            }
            n += 1;
        }
        Ok(Self { n_max: n, tail_bound: truncation_tail(sq, n) })
    }
}

/// Coefficients `tanh^n r / cosh r` of `|n, n>` in the Unruh vacuum.
pub fn unruh_vacuum_coefficients(sq: &SqueezingParameter, trunc: &FockTruncation) -> Vec<f64> {
    let t = sq.tanh_r();
    let sech = sq.sech2().sqrt();
    (0..=trunc.n_max).map(|n| t.powi(n as i32) * sech).collect()
}

/// Coefficients `tanh^n r sqrt(n+1) / cosh^2 r` of `|n+1, n>` in the Unruh
/// one-particle state.
pub fn unruh_one_particle_coefficients(sq: &SqueezingParameter, trunc: &FockTruncation) -> Vec<f64> {
    let t = sq.tanh_r();
    let sech2 = sq.sech2();
    (0..=trunc.n_max)
        .map(|n| t.powi(n as i32) * ((n + 1) as f64).sqrt() * sech2)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    RhoAd,
    PartialTranspose,
}

/// One 2x2 block acting on `basis[0], basis[1]`, each an
/// `(alice, dave)` occupation pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub n: usize,
    pub basis: [(u8, usize); 2],
    pub entries: [[f64; 2]; 2],
}

impl Block {
    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteState {
    pub r: SqueezingParameter,
    pub trunc: FockTruncation,
    pub representation: Representation,
    /// Standalone `|0,0><0,0|` entry of the partial transpose.
    pub ground: Option<f64>,
    pub blocks: Vec<Block>,
}

/// `q^n / (2 cosh^2 r)`, the weight of block `n`.
fn block_weight(sq: &SqueezingParameter, n: usize) -> f64 {
    0.5 * sq.tanh2().powi(n as i32) * sq.sech2()
}

pub fn build_rho_ad(sq: &SqueezingParameter, trunc: &FockTruncation) -> BipartiteState {
    let sech2 = sq.sech2();
    let blocks = (0..=trunc.n_max)
        .map(|n| {
            let w = block_weight(sq, n);
            let gamma2 = (n + 1) as f64 * sech2;
            let coherence = w * gamma2.sqrt();
            Block {
                n,
                basis: [(0, n), (1, n + 1)],
                entries: [[w, coherence], [coherence, w * gamma2]],
            }
        })
        .collect();
    BipartiteState {
        r: *sq,
        trunc: *trunc,
        representation: Representation::RhoAd,
        ground: None,
        blocks,
    }
}

/// Partial transpose on Alice, regrouped into the standalone `|0,0>` entry and
/// blocks `R^(n)` on `{|1,n>, |0,n+1>}` for `n < n_max` (the blocks whose
/// entries are all present in the truncated state).
pub fn partial_transpose(state: &BipartiteState) -> Result<BipartiteState, StatesError> {
    if state.representation != Representation::RhoAd {
        return Err(StatesError::WrongRepresentation {
            expected: Representation::RhoAd,
            found: state.representation,
        });
    }
    let sq = &state.r;
    let q = sq.tanh2();
    let sech2 = sq.sech2();
    let n_max = state.trunc.n_max;
    let blocks = (0..n_max)
        .map(|n| {
            // n q^{n-1} / (2 cosh^4 r), finite at r = 0
            let first = if n == 0 { 0.0 } else { 0.5 * n as f64 * q.powi(n as i32 - 1) * sech2 * sech2 };
            let off = state.blocks[n].entries[0][1];
            let second = block_weight(sq, n + 1);
            Block {
                n,
                basis: [(1, n), (0, n + 1)],
                entries: [[first, off], [off, second]],
            }
        })
        .collect();
    Ok(BipartiteState {
        r: *sq,
        trunc: state.trunc,
        representation: Representation::PartialTranspose,
        ground: Some(0.5 * sech2),
        blocks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    Alice,
    Dave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSystemState {
    pub kind: Subsystem,
    pub weights: Vec<f64>,
}

impl SingleSystemState {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Von Neumann entropy in bits, `0 log 0 = 0`.
    pub fn entropy_bits(&self) -> f64 {
        self.weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| -w * w.log2())
            .sum()
    }
}

fn expect_rho(state: &BipartiteState) -> Result<(), StatesError> {
    if state.representation == Representation::RhoAd {
        Ok(())
    } else {
        Err(StatesError::WrongRepresentation {
            expected: Representation::RhoAd,
            found: state.representation,
        })
    }
}

/// Dave's thermal state, `q^n/(2c^2) + n q^{n-1}/(2c^4)` on `n = 0..=n_max+1`.
pub fn reduce_to_dave(state: &BipartiteState) -> Result<SingleSystemState, StatesError> {
    expect_rho(state)?;
    let mut weights = vec![0.0; state.trunc.n_max + 2];
    for b in &state.blocks {
        weights[b.basis[0].1] += b.entries[0][0];
        weights[b.basis[1].1] += b.entries[1][1];
    }
    Ok(SingleSystemState { kind: Subsystem::Dave, weights })
}

pub fn reduce_to_alice(state: &BipartiteState) -> Result<SingleSystemState, StatesError> {
    expect_rho(state)?;
    let mut weights = vec![0.0; 2];
    for b in &state.blocks {
        weights[b.basis[0].0 as usize] += b.entries[0][0];
        weights[b.basis[1].0 as usize] += b.entries[1][1];
    }
    Ok(SingleSystemState { kind: Subsystem::Alice, weights })
}

impl BipartiteState {
    /// Dave levels `0..=n_max+1` span every basis state touched by a block.
    pub fn dave_dim(&self) -> usize {
        self.trunc.n_max + 2
    }

    pub fn index(&self, alice: u8, dave: usize) -> usize {
        alice as usize * self.dave_dim() + dave
    }

    pub fn trace(&self) -> f64 {
        self.ground.unwrap_or(0.0) + self.blocks.iter().map(Block::trace).sum::<f64>()
    }

    /// Dense matrix in the Alice-major layout.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = 2 * self.dave_dim();
        let mut m = DMatrix::zeros(dim, dim);
        if let Some(g) = self.ground {
            m[(0, 0)] += g;
        }
        for b in &self.blocks {
            let idx = [self.index(b.basis[0].0, b.basis[0].1), self.index(b.basis[1].0, b.basis[1].1)];
            for i in 0..2 {
                for j in 0..2 {
                    m[(idx[i], idx[j])] += b.entries[i][j];
                }
            }
        }
        m
    }

    /// Closed-form eigenvalues of `rho_AD`: each rank-one block contributes its
    /// trace and a zero.
    pub fn rho_spectrum(&self) -> Result<Vec<f64>, StatesError> {
        expect_rho(self)?;
        Ok(self.blocks.iter().map(Block::trace).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(r: f64) -> SqueezingParameter {
        SqueezingParameter::from_r(r).unwrap()
    }

    #[test]
    fn auto_truncation_meets_tolerance() {
        for &r in &[0.0, 0.1, 0.5, 1.0, 2.0, 3.0] {
            let s = sq(r);
            let t = FockTruncation::auto(&s, 1e-12).unwrap();
            assert!(t.tail_bound <= 1e-12);
            assert!(t.n_max >= 1);
            if t.n_max > 1 {
                assert!(truncation_tail(&s, t.n_max - 1) > 1e-12, "not minimal at r = {r}");
            }
        }
        // the partial transpose needs block n = 1 even at r = 0
        assert_eq!(FockTruncation::auto(&sq(0.0), 1e-12).unwrap().n_max, 2);
        let err = FockTruncation::auto(&sq(6.0), 1e-12).unwrap_err();
        assert!(matches!(err, StatesError::TruncationTooSmall { .. }));
        assert!(FockTruncation::fixed(&sq(1.0), 0).is_err());
    }

    #[test]
    fn tail_matches_direct_sum() {
        let s = sq(0.9);
        let n_max = 15;
        let direct: f64 = (n_max + 1..3000)
            .map(|n| block_weight(&s, n) * (1.0 + (n + 1) as f64 * s.sech2()))
            .sum();
        assert!((rho_ad_tail(&s, n_max) - direct).abs() < 1e-15);
    }

    #[test]
    fn partial_transpose_tail_matches_blocks() {
        for &(r, n_max) in &[(0.0, 1), (0.0, 3), (0.4, 5), (1.3, 30)] {
            let s = sq(r);
            let t = FockTruncation::fixed(&s, n_max).unwrap();
            let pt = partial_transpose(&build_rho_ad(&s, &t)).unwrap();
            assert!((1.0 - pt.trace() - partial_transpose_tail(&s, n_max)).abs() < 1e-14);
            assert!(partial_transpose_tail(&s, n_max) >= rho_ad_tail(&s, n_max));
        }
    }

    #[test]
    fn vacuum_coefficients() {
        let t = FockTruncation::fixed(&sq(0.0), 5).unwrap();
        assert_eq!(unruh_vacuum_coefficients(&sq(0.0), &t), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let s = sq(0.5);
        let t = FockTruncation::fixed(&s, 40).unwrap();
        let norm: f64 = unruh_vacuum_coefficients(&s, &t).iter().map(|c| c * c).sum();
        assert!((1.0 - norm).abs() < 1e-12);
    }

    #[test]
    fn one_particle_coefficients() {
        let t = FockTruncation::fixed(&sq(0.0), 3).unwrap();
        assert_eq!(unruh_one_particle_coefficients(&sq(0.0), &t), vec![1.0, 0.0, 0.0, 0.0]);
        let s = sq(0.5);
        let t = FockTruncation::auto(&s, 1e-14).unwrap();
        let c = unruh_one_particle_coefficients(&s, &t);
        let norm: f64 = c.iter().map(|x| x * x).sum();
        assert!((1.0 - norm).abs() < 1e-13);
        assert!(c.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bell_state_at_r_zero() {
        let s = sq(0.0);
        let t = FockTruncation::fixed(&s, 1).unwrap();
        let state = build_rho_ad(&s, &t);
        let rho = state.to_dense();
        let (i00, i11) = (state.index(0, 0), state.index(1, 1));
        for (i, j) in [(i00, i00), (i00, i11), (i11, i00), (i11, i11)] {
            assert_eq!(rho[(i, j)], 0.5);
        }
        assert_eq!(rho.sum(), 2.0);
    }

    #[test]
    fn trace_and_reductions() {
        let s = sq(0.7);
        let t = FockTruncation::fixed(&s, 120).unwrap();
        let rho = build_rho_ad(&s, &t);
        assert!((1.0 - rho.trace()).abs() < 1e-10);
        let a = reduce_to_alice(&rho).unwrap();
        assert!((a.weights[0] - 0.5).abs() < 1e-10 && (a.weights[1] - 0.5).abs() < 1e-10);
        let d = reduce_to_dave(&rho).unwrap();
        for n in 0..50 {
            let q = s.tanh2();
            let sinh2 = s.sinh2();
            let want = q.powi(n) / (2.0 * s.cosh2()) * (1.0 + n as f64 / sinh2);
            assert!((d.weights[n as usize] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn dave_limit_small_r() {
        let s = sq(1e-4);
        let t = FockTruncation::fixed(&s, 4).unwrap();
        let d = reduce_to_dave(&build_rho_ad(&s, &t)).unwrap();
        assert!((d.weights[0] - 0.5).abs() < 1e-7 && (d.weights[1] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn partial_transpose_structure() {
        let s = sq(0.6);
        let t = FockTruncation::fixed(&s, 60).unwrap();
        let rho = build_rho_ad(&s, &t);
        let pt = partial_transpose(&rho).unwrap();
        assert_eq!(pt.blocks.len(), 60);
        assert_eq!(pt.ground, Some(0.5 * s.sech2()));
        assert!(matches!(partial_transpose(&pt), Err(StatesError::WrongRepresentation { .. })));
        for (n, b) in pt.blocks.iter().enumerate() {
            assert_eq!(b.basis, [(1, n), (0, n + 1)]);
        }
    }
}
