//! Embedded invariant suite behind `diamond selftest`.
//!
//! Each check is a self-contained function returning a one-line detail on
//! success and the offending numbers on failure. Output is deterministic for
//! a fixed seed; timings are measured but only printed on request.

use super::figure_grid;
use crate::entanglement::{self, SweepGrid};
use crate::geometry::{self, DiamondChart, EventCoords, Region, Wedge};
use crate::modes::{self, CoefficientKind, ModeRegion, SqueezingParameter};
use crate::oracle;
use crate::states::{self, FockTruncation, NmaxPolicy};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::{Duration, Instant};

/// Deliberate corruption of one closed form, so that the suite can be shown
/// to catch it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
pub enum Perturbation {
    #[default]
    None,
    /// Scale every closed-form `lambda_-` by `1 + 1e-6`.
    Ppt,
    /// Scale the closed-form Bogoliubov coefficients by `1 + 1e-5`.
    Bogoliubov,
    /// Scale `tanh^2 r` by `1 + 1e-13`.
    Thermality,
    /// Scale the conformal metric prefactor by `1 + 1e-5`.
    Metric,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestConfig {
    pub seed: u64,
    pub perturb: Perturbation,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

type CheckFn = fn(&SelftestConfig) -> Result<String, String>;

/// The suite in run order: `(id, name, check)`.
pub const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("fig3", "log-negativity over r in [0, 5]", fig3),
    ("fig4", "mutual information over r in [0, 5]", fig4),
    ("ppt-oracle", "closed-form PPT spectrum vs dense diagonalisation", ppt_oracle),
    ("negative-eigenvalue", "lambda_- < 0 in every block", negative_eigenvalue),
    ("bogoliubov", "closed-form vs quadrature Bogoliubov coefficients", bogoliubov),
    ("thermality", "tanh^2 r and occupation vs Boltzmann factor", thermality),
    ("geometry", "round trips, lambda independence, regions, metric", geometry_suite),
    ("state", "trace, positivity and reductions of rho_AD", state_integrity),
    ("entropy-r0", "entropies at r = 0 and mutual-information recombination", entropy_r0),
    ("entropy-large-r", "(S_A, S_D, S_AD) -> (1, 1, 1) at r = 10", entropy_large_r),
];

pub fn run_check(id: &str, cfg: &SelftestConfig) -> Option<CheckResult> {
    let &(id, name, f) = CHECKS.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = f(cfg);
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CheckResult { id, name, passed, detail, elapsed })
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CheckResult> {
    CHECKS.iter().filter_map(|c| run_check(c.0, cfg)).collect()
}

impl CheckResult {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {:<20} {} -- {}", self.id, self.name, self.detail)
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn figure_sweep() -> Result<Vec<entanglement::EntanglementReport>, String> {
    entanglement::sweep(&SweepGrid::R(figure_grid()), NmaxPolicy::default())
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())
}

fn first_increase(values: &[f64]) -> Option<usize> {
    values.windows(2).position(|w| w[1] > w[0])
}

fn fig3(_: &SelftestConfig) -> Result<String, String> {
    let start = Instant::now();
    let reports = figure_sweep()?;
    let elapsed = start.elapsed();
    let neg: Vec<f64> = reports.iter().map(|r| r.neg_log).collect();
    ensure(neg[0] == 1.0, || format!("N(0) = {}", neg[0]))?;
    if let Some(i) = first_increase(&neg) {
        return Err(format!("N increases between r = {} and {}", reports[i].r, reports[i + 1].r));
    }
    ensure(neg.iter().all(|&n| (0.0..=1.0).contains(&n)), || "N outside [0, 1]".into())?;
    let last = neg[neg.len() - 1];
    ensure(last < 0.01, || format!("N(5) = {last:e}"))?;
    ensure(elapsed.as_secs_f64() < 10.0, || format!("took {elapsed:?}"))?;
    Ok(format!("N(0) = 1, nonincreasing, N(5) = {last:.6e}"))
}

fn fig4(_: &SelftestConfig) -> Result<String, String> {
    let start = Instant::now();
    let reports = figure_sweep()?;
    let elapsed = start.elapsed();
    let mi: Vec<f64> = reports.iter().map(|r| r.mutual_info).collect();
    ensure(mi[0] == 2.0, || format!("I(0) = {}", mi[0]))?;
    if let Some(i) = first_increase(&mi) {
        return Err(format!("I increases between r = {} and {}", reports[i].r, reports[i + 1].r));
    }
    let last = mi[mi.len() - 1];
    ensure(last > 1.0 && last < 1.05, || format!("I(5) = {last}"))?;
    ensure(elapsed.as_secs_f64() < 10.0, || format!("took {elapsed:?}"))?;
    Ok(format!("I(0) = 2, nonincreasing, I(5) = {last:.12}"))
}

const ORACLE_RS: [f64; 6] = [0.1, 0.3, 0.6, 1.0, 2.0, 4.0];

fn closed_spectrum(sq: &SqueezingParameter, trunc: &FockTruncation, cfg: &SelftestConfig) -> entanglement::PptSpectrum {
    let mut spec = entanglement::ppt_spectrum_closed_form(sq, trunc);
    if cfg.perturb == Perturbation::Ppt {
        for p in &mut spec.pairs {
            p.1 *= 1.0 + 1e-6;
        }
    }
    spec
}

fn ppt_oracle(cfg: &SelftestConfig) -> Result<String, String> {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for &r in &ORACLE_RS {
        let sq = SqueezingParameter::from_r(r).map_err(|e| e.to_string())?;
        let trunc = FockTruncation::fixed(&sq, 80).map_err(|e| e.to_string())?;
        let closed = closed_spectrum(&sq, &trunc, cfg).eigenvalues();
        let pt = states::partial_transpose(&states::build_rho_ad(&sq, &trunc)).map_err(|e| e.to_string())?;
        let dense = entanglement::ppt_spectrum_oracle(&pt).map_err(|e| e.to_string())?;
        ensure(closed.len() == dense.len(), || format!("r = {r}: {} vs {} eigenvalues", closed.len(), dense.len()))?;
        let err = closed.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(err < 1e-8, || format!("r = {r}: max |closed - dense| = {err:e}"))?;
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 30.0, || format!("took {elapsed:?}"))?;
    Ok(format!("n_max = 80, max deviation {worst:.1e}"))
}

fn negative_eigenvalue(cfg: &SelftestConfig) -> Result<String, String> {
    let rs = ORACLE_RS.iter().copied().chain(figure_grid().into_iter().skip(1));
    let mut count = 0;
    for r in rs {
        let sq = SqueezingParameter::from_r(r).map_err(|e| e.to_string())?;
        let trunc = FockTruncation::fixed(&sq, 80).map_err(|e| e.to_string())?;
        let spec = closed_spectrum(&sq, &trunc, cfg);
        if let Some((n, p)) = spec.pairs.iter().enumerate().find(|(_, p)| !(p.1 < 0.0)) {
            return Err(format!("r = {r}, n = {n}: lambda_- = {:e}", p.1));
        }
        count += spec.pairs.len();
    }
    Ok(format!("{count} blocks checked"))
}

const BOGOLIUBOV_GRID: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];

fn bogoliubov(cfg: &SelftestConfig) -> Result<String, String> {
    let start = Instant::now();
    let chart = DiamondChart::new(1.0, 1.0).map_err(|e| e.to_string())?;
    let scale = if cfg.perturb == Perturbation::Bogoliubov { 1.0 + 1e-5 } else { 1.0 };
    let mut worst = 0.0_f64;
    for &w in &BOGOLIUBOV_GRID {
        for &k in &BOGOLIUBOV_GRID {
            for kind in [CoefficientKind::Alpha, CoefficientKind::Beta] {
                let closed = scale
                    * modes::bogoliubov_closed_form(&chart, w, k, kind, ModeRegion::Int).map_err(|e| e.to_string())?;
                let quad = modes::bogoliubov_quadrature(&chart, w, k, kind, ModeRegion::Int).map_err(|e| e.to_string())?;
                let dev = (closed - quad).norm() / closed.norm();
                ensure(dev < 1e-6, || format!("{kind:?} at (w, k) = ({w}, {k}): deviation {dev:e}"))?;
                worst = worst.max(dev);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 30.0, || format!("took {elapsed:?}"))?;
    Ok(format!("5x5 grid, max relative deviation {worst:.1e}"))
}

fn thermality(cfg: &SelftestConfig) -> Result<String, String> {
    let chart = DiamondChart::new(0.7, 1.0).map_err(|e| e.to_string())?;
    let scale = if cfg.perturb == Perturbation::Thermality { 1.0 + 1e-13 } else { 1.0 };
    let (mut worst_t, mut worst_n) = (0.0_f64, 0.0_f64);
    for i in 0..=199 {
        let w_hat = 0.1 + 19.9 * i as f64 / 199.0;
        let boltzmann = (-std::f64::consts::PI * w_hat).exp();
        let sq = SqueezingParameter::from_omega_hat(w_hat).map_err(|e| e.to_string())?;
        let t2 = scale * sq.tanh2();
        let dev_t = (t2 - boltzmann).abs() / boltzmann;
        ensure(dev_t <= 1e-15, || format!("w_hat = {w_hat}: tanh^2 r off by {dev_t:e} (relative)"))?;
        // occupation at the dimensionful frequency, Boltzmann factor from T_D
        let omega = w_hat / chart.alpha();
        let n = modes::thermal_occupation(&chart, omega).map_err(|e| e.to_string())?;
        let from_temp = (-omega / chart.temperature()).exp();
        let dev_n = (n / (1.0 + n) - from_temp).abs() / from_temp;
        // exp(-x) inherits a relative error of about x * eps from its argument
        let allowed = 4.0 * f64::EPSILON * (1.0 + std::f64::consts::PI * w_hat);
        ensure(dev_n <= allowed, || format!("w_hat = {w_hat}: n/(1+n) off by {dev_n:e} (relative)"))?;
        worst_t = worst_t.max(dev_t);
        worst_n = worst_n.max(dev_n);
    }
    Ok(format!("200 frequencies, tanh^2 r rel. dev {worst_t:.1e}, n/(1+n) rel. dev {worst_n:.1e}"))
}

/// Random Rindler-spacetime point in `wedge`, kept a relative distance
/// `band` away from the conformal singular set.
fn rindler_point(rng: &mut ChaCha8Rng, chart: &DiamondChart, wedge: Wedge, band: f64) -> EventCoords {
    let at = chart.alpha_tilde();
    loop {
        let mv = (rng.random_range(-3.0..3.0_f64)).exp();
        let mu = (rng.random_range(-3.0..3.0_f64)).exp();
        let (sv, su) = match wedge {
            Wedge::R => (1.0, -1.0),
            Wedge::L => (-1.0, 1.0),
            Wedge::F => (1.0, 1.0),
            Wedge::P => (-1.0, -1.0),
        };
        let (vt, ut) = (sv * mv, su * mu);
        // F_+ = (1 + V~/a~)(1 - U~/a~) vanishes at V~ = -a~ and U~ = a~
        if (vt + 1.0).abs() < band || (ut - 1.0).abs() < band {
            continue;
        }
        return EventCoords::rindler(0.5 * at * (vt + ut), 0.5 * at * (vt - ut));
    }
}

fn rel_dist(a: &EventCoords, b: &EventCoords) -> f64 {
    let d = (a.c1 - b.c1).hypot(a.c2 - b.c2);
    d / a.c1.hypot(a.c2)
}

const WEDGES: [Wedge; 4] = [Wedge::R, Wedge::L, Wedge::F, Wedge::P];
const LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn geometry_suite(cfg: &SelftestConfig) -> Result<String, String> {
    let e = |x: geometry::GeometryError| x.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_trip = 0.0_f64;
    let mut worst_eta = 0.0_f64;
    for (li, &lambda) in LAMBDAS.iter().enumerate() {
        let chart = DiamondChart::new(1.3, lambda).map_err(e)?;
        for wedge in WEDGES {
            for _ in 0..10_000 / LAMBDAS.len() {
                let p = rindler_point(&mut rng, &chart, wedge, 0.05);
                let d = geometry::rindler_to_diamond(&chart, &p).map_err(e)?;
                let back = geometry::diamond_to_rindler(&chart, &d).map_err(e)?;
                let err = rel_dist(&p, &back);
                ensure(err < 1e-12, || format!("{wedge:?}, lambda = {lambda}: round trip error {err:e}"))?;
                worst_trip = worst_trip.max(err);
                // (eta, xi) round trip through the patch of the same wedge
                let ex = geometry::diamond_coords(&chart, &d).map_err(e)?;
                let d2 = geometry::diamond_coords_inverse(&chart, &ex).map_err(e)?;
                let err = rel_dist(&d, &d2);
                ensure(err < 1e-12, || format!("{wedge:?}: (eta, xi) round trip error {err:e}"))?;
                worst_trip = worst_trip.max(err);
                // lambda independence, once per point on the first chart
                if li == 0 {
                    for &l2 in &LAMBDAS[1..] {
                        let c2 = DiamondChart::new(chart.alpha(), l2).map_err(e)?;
                        let ex2 = geometry::diamond_coords(&c2, &d).map_err(e)?;
                        let dev = ((ex.c1 - ex2.c1).abs()).max((ex.c2 - ex2.c2).abs()) / chart.alpha();
                        ensure(dev < 1e-12 && ex.region == ex2.region, || {
                            format!("lambda {lambda} vs {l2}: (eta, xi) differ by {dev:e}")
                        })?;
                        worst_eta = worst_eta.max(dev);
                    }
                }
            }
        }
    }
    let cells = region_battery()?;
    let metric = metric_pullback(cfg, &mut rng)?;
    Ok(format!(
        "round trip {worst_trip:.1e}, lambda spread {worst_eta:.1e}, {cells} region cells, metric {metric:.1e}"
    ))
}

/// Every cell of the `(|V| vs alpha, |U| vs alpha)` partition maps to its
/// wedge: D -> R, the four D-bar corners -> L, the two future images -> F and
/// the two past images -> P.
fn region_battery() -> Result<usize, String> {
    let chart = DiamondChart::new(1.0, 2.0).map_err(|e| e.to_string())?;
    let bands = [-2.5, 0.3, 1.7]; // V or U below -alpha, inside, above alpha
    let mut cells = 0;
    for &v in &bands {
        for &u in &bands {
            let p = EventCoords::diamond(0.5 * (v + u), 0.5 * (v - u));
            let inside = |x: f64| x.abs() < 1.0;
            let want = match (inside(v), inside(u)) {
                (true, true) => (Region::D, Wedge::R),
                (false, false) => (Region::DBar, Wedge::L),
                (true, false) => (Region::FutureImage, Wedge::F),
                (false, true) => (Region::PastImage, Wedge::P),
            };
            let (region, wedge) = geometry::classify_region(&chart, &p);
            let (vt, ut) = geometry::lightcone_map(&chart, v, u).map_err(|e| e.to_string())?;
            let from_signs = Wedge::from_null_signs(vt, ut);
            ensure(region == want.0 && wedge == Some(want.1) && from_signs == Some(want.1), || {
                format!("(V, U) = ({v}, {u}): got {region:?}/{wedge:?}, signs give {from_signs:?}, want {want:?}")
            })?;
            cells += 1;
        }
    }
    Ok(cells)
}

/// Largest relative deviation between the numerical pullback of
/// `-dt^2 + dx^2` to `(eta, xi)` and `(4 / Omega)^2 e^{2 a xi} (-d eta^2 + d xi^2)`.
fn metric_pullback(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let e = |x: geometry::GeometryError| x.to_string();
    let chart = DiamondChart::new(1.0, 1.0).map_err(e)?;
    let a = chart.accel();
    let h = 1e-5;
    let fudge = if cfg.perturb == Perturbation::Metric { 1.0 + 1e-5 } else { 1.0 };
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let eta = rng.random_range(-1.0..1.0);
        let xi = rng.random_range(-1.0..0.5);
        let at = |de: f64, dx: f64| -> Result<(f64, f64), String> {
            let p = geometry::diamond_coords_inverse(&chart, &EventCoords::eta_xi(eta + de, xi + dx, Region::D)).map_err(e)?;
            Ok((p.c1, p.c2))
        };
        let (tp, xp) = at(h, 0.0)?;
        let (tm, xm) = at(-h, 0.0)?;
        let (t_eta, x_eta) = ((tp - tm) / (2.0 * h), (xp - xm) / (2.0 * h));
        let (tp, xp) = at(0.0, h)?;
        let (tm, xm) = at(0.0, -h)?;
        let (t_xi, x_xi) = ((tp - tm) / (2.0 * h), (xp - xm) / (2.0 * h));
        let g_ee = -t_eta * t_eta + x_eta * x_eta;
        let g_xx = -t_xi * t_xi + x_xi * x_xi;
        let g_ex = -t_eta * t_xi + x_eta * x_xi;
        let rind = geometry::rindler_chart(&chart, &EventCoords::eta_xi(eta, xi, Region::D)).map_err(e)?;
        let omega = geometry::conformal_factor(&chart, &rind).map_err(e)?;
        let pref = fudge * (4.0 / omega).powi(2) * (2.0 * a * xi).exp();
        let dev = ((g_ee + pref).abs().max((g_xx - pref).abs()).max(g_ex.abs())) / pref;
        ensure(dev < 1e-6, || format!("metric at (eta, xi) = ({eta}, {xi}): relative deviation {dev:e}"))?;
        worst = worst.max(dev);
    }
    Ok(worst)
}

const STATE_RS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn state_integrity(_: &SelftestConfig) -> Result<String, String> {
    let e = |x: states::StatesError| x.to_string();
    let mut worst = 0.0_f64;
    for &r in &STATE_RS {
        let sq = SqueezingParameter::from_r(r).map_err(|x| x.to_string())?;
        let trunc = FockTruncation::auto(&sq, states::DEFAULT_TAIL_TOL).map_err(e)?;
        let state = states::build_rho_ad(&sq, &trunc);
        let tr = state.trace();
        ensure((tr - 1.0).abs() <= trunc.tail_bound + 1e-14, || {
            format!("r = {r}: trace {tr} with tail bound {:e}", trunc.tail_bound)
        })?;
        let dense = state.to_dense();
        let min_ev = oracle::symmetric_eigenvalues(&dense)[0];
        ensure(min_ev >= -1e-12, || format!("r = {r}: eigenvalue {min_ev:e}"))?;
        let alice = states::reduce_to_alice(&state).map_err(e)?;
        let rho_a = oracle::trace_out_dave(&dense, state.dave_dim());
        for a in 0..2 {
            let dev = (alice.weights[a] - 0.5).abs();
            ensure(dev <= trunc.tail_bound + 1e-14, || format!("r = {r}: rho_A[{a}] = {}", alice.weights[a]))?;
        }
        ensure(rho_a[(0, 1)].abs() < 1e-15, || format!("r = {r}: rho_A off-diagonal {:e}", rho_a[(0, 1)]))?;
        let dave = states::reduce_to_dave(&state).map_err(e)?;
        let rho_d = oracle::trace_out_alice(&oracle::rho_ad_dense(&sq, &trunc), state.dave_dim());
        let (q, s2, c2) = (sq.tanh2(), sq.sech2(), sq.cosh2());
        for (n, &w) in dave.weights.iter().enumerate() {
            let dev = (w - rho_d[(n, n)]).abs();
            ensure(dev < 1e-12, || format!("r = {r}: rho_D[{n}] = {w} vs oracle {}", rho_d[(n, n)]))?;
            // closed form, kept where the block sum is complete
            if n <= trunc.n_max {
                let nq = if n == 0 { 0.0 } else { n as f64 * q.powi(n as i32 - 1) * s2 };
                let want = (q.powi(n as i32) + nq) / (2.0 * c2);
                let dev_f = (w - want).abs();
                ensure(dev_f < 1e-12, || format!("r = {r}: rho_D[{n}] = {w} vs formula {want}"))?;
            }
            worst = worst.max(dev);
        }
        let off = (0..rho_d.nrows())
            .flat_map(|i| (0..rho_d.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|ij| rho_d[ij].abs())
            .fold(0.0, f64::max);
        ensure(off < 1e-15, || format!("r = {r}: rho_D off-diagonal {off:e}"))?;
    }
    Ok(format!("r in {STATE_RS:?}, rho_D vs oracle {worst:.1e}"))
}

const RECOMBINATION_RS: [f64; 3] = [0.2, 0.9, 2.5];

fn entropy_r0(_: &SelftestConfig) -> Result<String, String> {
    let e = |x: entanglement::EntanglementError| x.to_string();
    let sq = SqueezingParameter::from_r(0.0).map_err(|x| x.to_string())?;
    let plan = entanglement::SeriesPlan::new(&sq, NmaxPolicy::default()).map_err(e)?;
    let s = entanglement::entropies(&sq, &plan).map_err(e)?;
    ensure(s == (1.0, 1.0, 0.0), || format!("r = 0: {s:?}"))?;
    let mut worst = 0.0_f64;
    for &r in &RECOMBINATION_RS {
        let sq = SqueezingParameter::from_r(r).map_err(|x| x.to_string())?;
        let plan = entanglement::SeriesPlan::new(&sq, NmaxPolicy::default()).map_err(e)?;
        let (sa, sd, sad) = entanglement::entropies(&sq, &plan).map_err(e)?;
        let mi = entanglement::mutual_information(&sq, &plan).map_err(e)?;
        let dev = (sa + sd - sad - mi).abs();
        ensure(dev < 1e-9, || format!("r = {r}: S_A + S_D - S_AD - I = {dev:e}"))?;
        worst = worst.max(dev);
    }
    Ok(format!("(1, 1, 0) at r = 0, recombination {worst:.1e}"))
}

fn entropy_large_r(_: &SelftestConfig) -> Result<String, String> {
    let e = |x: entanglement::EntanglementError| x.to_string();
    let sq = SqueezingParameter::from_r(10.0).map_err(|x| x.to_string())?;
    let plan = entanglement::SeriesPlan::new(&sq, NmaxPolicy::default()).map_err(e)?;
    let (sa, sd, sad) = entanglement::entropies(&sq, &plan).map_err(e)?;
    let mi = entanglement::mutual_information(&sq, &plan).map_err(e)?;
    let dev = (sa - 1.0).abs().max((sd - 1.0).abs()).max((sad - 1.0).abs());
    let msg = format!("(S_A, S_D, S_AD) = ({sa}, {sd:.6}, {sad:.6}), I = {mi:.12}");
    ensure(dev < 1e-3, || msg.clone())?;
    Ok(msg)
}
