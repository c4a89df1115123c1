//! Entanglement and correlation measures of the Alice–Dave state: the
//! partial-transpose spectrum, (logarithmic) negativity, von Neumann
//! entropies and mutual information.
//!
//! Every measure is a series in `q = tanh^2 r`. Below the Fock cap the series
//! are summed over the same blocks a truncated state would keep; when the
//! cap is too small (`r ≳ 4`) they are summed directly up to the cap and the
//! remainder is taken from the Euler–Maclaurin formula, treating the term
//! index as continuous.

use crate::modes::{ModesError, SqueezingParameter};
use crate::oracle;
use crate::specfun::{self, SpecfunError};
use crate::states::{
    self, BipartiteState, FockTruncation, NmaxPolicy, Representation, StatesError, N_MAX_CAP,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "DIAMOND_NUM_THREADS";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EntanglementError {
    #[error(transparent)]
    States(#[from] StatesError),
    #[error(transparent)]
    Modes(#[from] ModesError),
    #[error("series tail failed: {0}")]
    Series(#[from] SpecfunError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// How a series is summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeriesPlan {
    /// Terms of a state truncated at `trunc.n_max`.
    Finite(FockTruncation),
    /// Terms `n < n_direct` summed, the rest by Euler–Maclaurin.
    Asymptotic { n_direct: usize },
}

impl SeriesPlan {
    pub fn new(sq: &SqueezingParameter, policy: NmaxPolicy) -> Result<Self, EntanglementError> {
        match FockTruncation::new(sq, policy) {
            Ok(t) => Ok(SeriesPlan::Finite(t)),
            Err(StatesError::TruncationTooSmall { .. }) => Ok(SeriesPlan::Asymptotic { n_direct: N_MAX_CAP }),
            Err(e) => Err(e.into()),
        }
    }

    pub fn n_max_used(&self) -> usize {
        match self {
            SeriesPlan::Finite(t) => t.n_max,
            SeriesPlan::Asymptotic { n_direct } => *n_direct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptSpectrum {
    /// Standalone eigenvalue `1 / (2 cosh^2 r)`.
    pub lambda0: f64,
    /// `(lambda_+, lambda_-)` of block `n`.
    pub pairs: Vec<(f64, f64)>,
    pub r: SqueezingParameter,
}

impl PptSpectrum {
    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = std::iter::once(self.lambda0)
            .chain(self.pairs.iter().flat_map(|&(p, m)| [p, m]))
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn negativity(&self) -> f64 {
        self.pairs.iter().map(|&(_, m)| -m.min(0.0)).sum()
    }

    pub fn trace_norm(&self) -> f64 {
        self.lambda0 + self.pairs.iter().map(|&(p, m)| p.abs() + m.abs()).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub r: f64,
    pub neg_log: f64,
    pub negativity: f64,
    pub s_a: f64,
    pub s_d: f64,
    pub s_ad: f64,
    pub mutual_info: f64,
    pub n_max_used: usize,
    pub tail_bound: f64,
}

/// Per-term quantities as functions of a continuous index `n`.
struct Terms {
    ln_q: f64,
    sech2: f64,
}

impl Terms {
    fn new(sq: &SqueezingParameter) -> Self {
        Self { ln_q: sq.ln_tanh2(), sech2: sq.sech2() }
    }

    fn q_pow(&self, n: f64) -> f64 {
        if n == 0.0 {
            1.0
        } else {
            (n * self.ln_q).exp()
        }
    }

    /// `n q^{n-1} sech^2 r`, zero at `n = 0` for every `q`.
    fn n_q_nm1(&self, n: f64) -> f64 {
        if n == 0.0 {
            0.0
        } else {
            n * self.q_pow(n - 1.0) * self.sech2
        }
    }

    /// `(lambda_+, lambda_-)` of block `n`. With `b = n sech^2 r + q^2` the
    /// pair is `sech^2 r q^{n-1} s / 4` and `-sech^4 r q^{n+1} / s`,
    /// `s = b + sqrt(b^2 + 4 q^2 sech^2 r)`: the common factor `q^{n-1}` is
    /// pulled out of the square root, so nothing of order `q^{2n}` is formed
    /// and `lambda_-` keeps its sign until `q^{n+1}` itself underflows.
    fn lambda_pair(&self, n: f64) -> (f64, f64) {
        let q = self.ln_q.exp();
        let b = n * self.sech2 + q * q;
        let s = b + (b * b + 4.0 * q * q * self.sech2).sqrt();
        let plus = 0.25 * self.sech2 * ((n - 1.0) * self.ln_q).exp() * s;
        let minus = -self.sech2 * self.sech2 * self.q_pow(n + 1.0) / s;
        (plus, minus)
    }

    fn abs_lambda_minus(&self, n: f64) -> f64 {
        -self.lambda_pair(n).1
    }

    /// Eigenvalue `q^n (1 + (n+1) sech^2 r) / (2 cosh^2 r)` of `rho_AD`.
    fn rho_weight(&self, n: f64) -> f64 {
        0.5 * self.sech2 * self.q_pow(n) * (1.0 + (n + 1.0) * self.sech2)
    }

    /// Dave's occupation probability `(q^n + n q^{n-1} sech^2 r) / (2 cosh^2 r)`.
    fn dave_weight(&self, n: f64) -> f64 {
        0.5 * self.sech2 * (self.q_pow(n) + self.n_q_nm1(n))
    }

    /// `q^n I^(n)` of the mutual-information series.
    fn mutual_term(&self, n: f64) -> f64 {
        // (1+d) ln(1+d) - (1+e) ln(1+e) with d = n / sinh^2 r, e = (n+1) sech^2 r,
        // regrouped around delta = d - e so the large-n cancellation is exact
        let csch2 = self.sech2 * (-self.ln_q).exp();
        let d = n * csch2;
        let e = (n + 1.0) * self.sech2;
        let delta = self.sech2 * (n * csch2 - 1.0);
        let bracket = delta * d.ln_1p() + (1.0 + e) * (delta / (1.0 + e)).ln_1p();
        self.q_pow(n) * bracket / LN_2
    }
}

fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Neumaier-compensated sum of `f(n)` for `n` in `range`.
fn direct_sum<F: Fn(f64) -> f64>(f: &F, range: std::ops::Range<usize>) -> f64 {
    let (mut s, mut c) = (0.0_f64, 0.0_f64);
    for n in range {
        let x = f(n as f64);
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// `sum_{n >= start} f(n)` by Euler–Maclaurin, for `f` varying on the scale
/// `min(start, 1/|ln q|)`. Returns the value and an error estimate.
fn euler_maclaurin_tail<F: Fn(f64) -> f64 + Sync>(f: &F, start: usize, ln_q: f64) -> Result<(f64, f64), SpecfunError> {
    let n0 = start as f64;
    let scale = 1.0 / ln_q.abs();
    let integral = specfun::integrate_adaptive(
        |y: f64| Complex64::new(f(n0 + y * scale), 0.0),
        0.0,
        200.0,
        1e-12,
        0.0,
        10_000,
        50,
    )?;
    let h = 0.05 * n0.min(scale);
    let (fm2, fm1, f0, fp1, fp2) = (f(n0 - 2.0 * h), f(n0 - h), f(n0), f(n0 + h), f(n0 + 2.0 * h));
    let d1 = (fp1 - fm1) / (2.0 * h);
    let d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
    let value = integral.value.re * scale + 0.5 * f0 - d1 / 12.0 + d3 / 720.0;
    let error = integral.error * scale + (d3 / 720.0).abs() + 1e-15 * value.abs();
    Ok((value, error))
}

/// `sum_n f(n)` over the index set of `plan`, where the finite plan keeps
/// `n = 0..=last(n_max)`.
fn series<F: Fn(f64) -> f64 + Sync>(
    f: F,
    plan: &SeriesPlan,
    ln_q: f64,
    last: impl Fn(usize) -> usize,
) -> Result<(f64, f64), EntanglementError> {
    match plan {
        SeriesPlan::Finite(t) => Ok((direct_sum(&f, 0..last(t.n_max) + 1), 0.0)),
        SeriesPlan::Asymptotic { n_direct } => {
            let head = direct_sum(&f, 0..*n_direct);
            let (tail, err) = euler_maclaurin_tail(&f, *n_direct, ln_q)?;
            Ok((head + tail, err))
        }
    }
}

/// Closed-form spectrum of the partial transpose truncated at
/// `trunc.n_max`: `lambda0` and the pairs of blocks `n < n_max`.
pub fn ppt_spectrum_closed_form(sq: &SqueezingParameter, trunc: &FockTruncation) -> PptSpectrum {
    let terms = Terms::new(sq);
    let pairs = if sq.r() == 0.0 {
        // q = 0: only blocks 0 and 1 survive
        (0..trunc.n_max)
            .map(|n| match n {
                0 => (0.5, -0.5),
                1 => (0.5, 0.0),
                _ => (0.0, 0.0),
            })
            .collect()
    } else {
        (0..trunc.n_max).map(|n| terms.lambda_pair(n as f64)).collect()
    };
    PptSpectrum { lambda0: 0.5 * sq.sech2(), pairs, r: *sq }
}

/// Dense-diagonalisation spectrum of an assembled partial transpose,
/// restricted to the basis states its blocks cover.
pub fn ppt_spectrum_oracle(state: &BipartiteState) -> Result<Vec<f64>, EntanglementError> {
    if state.representation != Representation::PartialTranspose {
        return Err(StatesError::WrongRepresentation {
            expected: Representation::PartialTranspose,
            found: state.representation,
        }
        .into());
    }
    let dense = oracle::restrict(&state.to_dense(), &oracle::pt_complete_indices(state.trunc.n_max));
    Ok(oracle::symmetric_eigenvalues(&dense))
}

/// Ordinary negativity `sum |lambda_-|` and its error estimate.
pub fn negativity(sq: &SqueezingParameter, plan: &SeriesPlan) -> Result<(f64, f64), EntanglementError> {
    if sq.r() == 0.0 {
        return Ok((0.5, 0.0));
    }
    let t = Terms::new(sq);
    series(|n| t.abs_lambda_minus(n), plan, t.ln_q, |n_max| n_max - 1)
}

/// Logarithmic negativity `log2 ||rho^T||_1 = log2(1 / (2 cosh^2 r) + Sigma)`.
///
/// Evaluated as `log2(T + 2 N)` with `T` the retained trace of the partial
/// transpose and `N` the negativity, which avoids summing many `O(1)` terms
/// only to subtract 1 at large `r`.
pub fn log_negativity(sq: &SqueezingParameter, plan: &SeriesPlan) -> Result<f64, EntanglementError> {
    if sq.r() == 0.0 {
        return Ok(1.0);
    }
    let (neg, _) = negativity(sq, plan)?;
    let deficit = match plan {
        SeriesPlan::Finite(t) => states::partial_transpose_tail(sq, t.n_max),
        SeriesPlan::Asymptotic { .. } => 0.0,
    };
    Ok((2.0 * neg - deficit).ln_1p() / LN_2)
}

/// `(S_A, S_D, S_AD)` in bits.
pub fn entropies(sq: &SqueezingParameter, plan: &SeriesPlan) -> Result<(f64, f64, f64), EntanglementError> {
    if sq.r() == 0.0 {
        return Ok((1.0, 1.0, 0.0));
    }
    let t = Terms::new(sq);
    let (s_ad, _) = series(|n| entropy_term(t.rho_weight(n)), plan, t.ln_q, |n| n)?;
    let (s_d, _) = series(|n| entropy_term(t.dave_weight(n)), plan, t.ln_q, |n| n)?;
    Ok((1.0, s_d, s_ad))
}

/// `I_AD = 1 - log2(tanh^2 r) / 2 - sum q^n I^(n) / (2 cosh^2 r)`.
pub fn mutual_information(sq: &SqueezingParameter, plan: &SeriesPlan) -> Result<f64, EntanglementError> {
    if sq.r() == 0.0 {
        return Ok(2.0);
    }
    let t = Terms::new(sq);
    let (sum, _) = series(|n| t.mutual_term(n), plan, t.ln_q, |n| n)?;
    Ok(1.0 - 0.5 * t.ln_q / LN_2 - 0.5 * t.sech2 * sum)
}

pub fn report(sq: &SqueezingParameter, policy: NmaxPolicy) -> Result<EntanglementReport, EntanglementError> {
    let plan = SeriesPlan::new(sq, policy)?;
    let (negativity, neg_err) = negativity(sq, &plan)?;
    let (s_a, s_d, s_ad) = entropies(sq, &plan)?;
    let tail_bound = match plan {
        SeriesPlan::Finite(t) => t.tail_bound,
        SeriesPlan::Asymptotic { .. } => neg_err,
    };
    Ok(EntanglementReport {
        r: sq.r(),
        neg_log: log_negativity(sq, &plan)?,
        negativity,
        s_a,
        s_d,
        s_ad,
        mutual_info: mutual_information(sq, &plan)?,
        n_max_used: plan.n_max_used(),
        tail_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SweepGrid {
    R(Vec<f64>),
    /// Diamond lifetimes at fixed Dave frequency `omega`:
    /// `omega_hat = omega * lifetime / 2`.
    Lifetimes { lifetimes: Vec<f64>, omega: f64 },
}

impl SweepGrid {
    fn squeezings(&self) -> Result<Vec<Result<SqueezingParameter, ModesError>>, EntanglementError> {
        let (values, what) = match self {
            SweepGrid::R(v) => (v, "r"),
            SweepGrid::Lifetimes { lifetimes, .. } => (lifetimes, "lifetime"),
        };
        if values.is_empty() {
            return Err(EntanglementError::InvalidGrid("empty grid".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(EntanglementError::InvalidGrid(format!("{what} = {bad} is negative or NaN")));
        }
        Ok(match self {
            SweepGrid::R(v) => v.iter().map(|&r| SqueezingParameter::from_r(r)).collect(),
            SweepGrid::Lifetimes { lifetimes, omega } => lifetimes
                .iter()
                .map(|&life| SqueezingParameter::from_omega_hat(omega * life / 2.0))
                .collect(),
        })
    }
}

/// Thread count for sweeps: `DIAMOND_NUM_THREADS` if set and positive,
/// otherwise rayon's default.
pub fn sweep_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// One report per grid point, in grid order; failures are per point.
pub fn sweep(
    grid: &SweepGrid,
    policy: NmaxPolicy,
) -> Result<Vec<Result<EntanglementReport, EntanglementError>>, EntanglementError> {
    let points = grid.squeezings()?;
    let run = || {
        points
            .par_iter()
            .map(|p| match p {
                Ok(sq) => report(sq, policy),
                Err(e) => Err(e.clone().into()),
            })
            .collect()
    };
    match sweep_threads() {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| EntanglementError::InvalidGrid(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Entropies `(S_D, S_AD)` by dense diagonalisation of the tripartite-state
/// reduction.
pub fn entropies_oracle(sq: &SqueezingParameter, trunc: &FockTruncation) -> (f64, f64) {
    let rho = oracle::rho_ad_dense(sq, trunc);
    let s_ad = oracle::entropy_bits_of_spectrum(&oracle::symmetric_eigenvalues(&rho));
    let dave = oracle::trace_out_alice(&rho, trunc.n_max + 2);
    let s_d = oracle::entropy_bits_of_spectrum(&oracle::symmetric_eigenvalues(&dave));
    (s_d, s_ad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(r: f64) -> SqueezingParameter {
        SqueezingParameter::from_r(r).unwrap()
    }

    fn auto(s: &SqueezingParameter) -> SeriesPlan {
        SeriesPlan::new(s, NmaxPolicy::default()).unwrap()
    }

    // 30-digit references
    #[test]
    fn reference_values() {
        let cases = [
            (0.5, 0.726929195046, 1.57470697024),
            (1.0, 0.368641683932, 1.22953304476),
            (2.0, 0.0610083148684, 1.03150711788),
        ];
        for (r, neg_log, mi) in cases {
            let s = sq(r);
            let plan = auto(&s);
            assert!((log_negativity(&s, &plan).unwrap() - neg_log).abs() < 1e-11, "r = {r}");
            assert!((mutual_information(&s, &plan).unwrap() - mi).abs() < 1e-11, "r = {r}");
        }
        let s = sq(0.5);
        let (_, s_d, s_ad) = entropies(&s, &auto(&s)).unwrap();
        assert!((s_ad - 1.22062643054).abs() < 1e-10 && (s_d - 1.79533340078).abs() < 1e-10);
        let s = sq(1.0);
        let (_, s_d, s_ad) = entropies(&s, &auto(&s)).unwrap();
        assert!((s_ad - 2.79036866).abs() < 1e-8 && (s_d - 3.01990171).abs() < 1e-8);
    }

    #[test]
    fn asymptotic_plan_past_the_cap() {
        let s = sq(5.0);
        let plan = auto(&s);
        assert!(matches!(plan, SeriesPlan::Asymptotic { .. }));
        let mi = mutual_information(&s, &plan).unwrap();
        assert!((mi - 1.0000781194213232539).abs() < 1e-12, "{mi}");
        let nl = log_negativity(&s, &plan).unwrap();
        assert!((nl - 1.5622623371780358601e-4).abs() < 1e-13, "{nl}");
        let (_, s_d, s_ad) = entropies(&s, &plan).unwrap();
        assert!((s_ad - 14.439432699750800772).abs() < 1e-9, "{s_ad}");
        assert!((s_d - 14.439510819172124026).abs() < 1e-9, "{s_d}");
        let s = sq(10.0);
        let plan = auto(&s);
        let mi = mutual_information(&s, &plan).unwrap();
        assert!((mi - 1.000000003546616247).abs() < 1e-11, "{mi}");
        let nl = log_negativity(&s, &plan).unwrap();
        assert!((nl - 7.0932324681023454955e-9).abs() < 1e-15, "{nl}");
        let (_, s_d, s_ad) = entropies(&s, &plan).unwrap();
        assert!((s_ad - 28.866422165759480457).abs() < 1e-8, "{s_ad}");
        assert!((s_d - 28.866422169306096704).abs() < 1e-8, "{s_d}");
    }

    #[test]
    fn asymptotic_tail_agrees_with_direct_sum_below_cap() {
        // r = 3 needs ~6000 terms; summing 2000 directly plus the tail must agree
        let s = sq(3.0);
        let finite = auto(&s);
        let asym = SeriesPlan::Asymptotic { n_direct: 2000 };
        let a = mutual_information(&s, &finite).unwrap();
        let b = mutual_information(&s, &asym).unwrap();
        assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        let (_, d1, ad1) = entropies(&s, &finite).unwrap();
        let (_, d2, ad2) = entropies(&s, &asym).unwrap();
        assert!((d1 - d2).abs() < 1e-9 && (ad1 - ad2).abs() < 1e-9);
    }

    #[test]
    fn endpoint_branch() {
        let s = sq(0.0);
        let plan = auto(&s);
        assert_eq!(log_negativity(&s, &plan).unwrap(), 1.0);
        assert_eq!(mutual_information(&s, &plan).unwrap(), 2.0);
        assert_eq!(entropies(&s, &plan).unwrap(), (1.0, 1.0, 0.0));
        let spec = ppt_spectrum_closed_form(&s, &FockTruncation::auto(&s, 1e-12).unwrap());
        let ev = spec.eigenvalues();
        assert_eq!(ev, vec![-0.5, 0.0, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn small_r_is_continuous_with_endpoint() {
        let s = sq(1e-5);
        let plan = auto(&s);
        assert!((log_negativity(&s, &plan).unwrap() - 1.0).abs() < 1e-8);
        assert!((mutual_information(&s, &plan).unwrap() - 2.0).abs() < 1e-7);
        let spec = ppt_spectrum_closed_form(&s, &FockTruncation::auto(&s, 1e-12).unwrap());
        let ev = spec.eigenvalues();
        assert!((ev[0] + 0.5).abs() < 1e-9);
        assert!((ev[ev.len() - 1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn pair_sum_is_block_trace() {
        let s = sq(0.8);
        let t = FockTruncation::fixed(&s, 30).unwrap();
        let spec = ppt_spectrum_closed_form(&s, &t);
        let pt = states::partial_transpose(&states::build_rho_ad(&s, &t)).unwrap();
        for (pair, block) in spec.pairs.iter().zip(&pt.blocks) {
            assert!((pair.0 + pair.1 - block.trace()).abs() < 1e-16);
            assert!(pair.1 < 0.0);
        }
    }

    #[test]
    fn sweep_keeps_order_and_collects_errors() {
        let grid = SweepGrid::R(vec![2.0, 0.0, 1.0]);
        let out = sweep(&grid, NmaxPolicy::default()).unwrap();
        let rs: Vec<f64> = out.iter().map(|r| r.as_ref().unwrap().r).collect();
        assert_eq!(rs, vec![2.0, 0.0, 1.0]);
        assert!(sweep(&SweepGrid::R(vec![]), NmaxPolicy::default()).is_err());
        assert!(sweep(&SweepGrid::R(vec![-1.0]), NmaxPolicy::default()).is_err());
        let lifetimes = SweepGrid::Lifetimes { lifetimes: vec![0.0, 1.0], omega: 2.0 };
        let out = sweep(&lifetimes, NmaxPolicy::default()).unwrap();
        assert!(out[0].is_err() && out[1].is_ok());
    }
}
