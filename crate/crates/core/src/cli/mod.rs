//! Command-line front end: argument parsing, dispatch and output formatting.

pub mod selftest;

use crate::entanglement::{self, EntanglementError, EntanglementReport, SweepGrid};
use crate::geometry::{self, DiamondChart, EventCoords, Frame, GeometryError, Region};
use crate::modes::{self, CoefficientKind, ModeFamily, ModeRegion, ModeSpec, ModesError, Sigma, SqueezingParameter};
use crate::states::{self, FockTruncation, NmaxPolicy, StatesError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default tail tolerance of the automatic Fock cutoff.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Modes(#[from] ModesError),
    #[error(transparent)]
    States(#[from] StatesError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error("{failed} of {total} checks failed")]
    Selftest { failed: usize, total: usize },
    #[error("{0} grid point(s) failed")]
    Sweep(usize),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Geometry(_) => "geometry",
            CliError::Modes(_) => "modes",
            CliError::States(_) => "states",
            CliError::Entanglement(_) => "entanglement",
            CliError::Selftest { .. } => "selftest",
            CliError::Sweep(_) => "sweep",
            CliError::Io { .. } => "io",
        }
    }

    /// Machine-readable error record.
    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Parser)]
#[command(name = "diamond", version, about = "Causal-diamond conformal maps, Unruh-diamond modes and Alice-Dave entanglement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map a point between diamond, Rindler and (eta, xi) coordinates.
    #[command(allow_negative_numbers = true)]
    Map(MapArgs),
    /// Squeezing, occupation and mode values at one frequency.
    #[command(allow_negative_numbers = true)]
    Modes(ModesArgs),
    /// Bogoliubov coefficient between a diamond mode and a Minkowski mode.
    #[command(allow_negative_numbers = true)]
    Bogoliubov(BogoliubovArgs),
    /// Truncated Alice-Dave density matrix.
    #[command(allow_negative_numbers = true)]
    State(StateArgs),
    /// Entanglement measures over a grid of r or of lifetimes.
    #[command(allow_negative_numbers = true)]
    Entanglement(EntanglementArgs),
    /// Data behind the log-negativity and mutual-information figures.
    #[command(allow_negative_numbers = true)]
    Figures(FiguresArgs),
    /// Run the embedded invariant suite.
    Selftest(SelftestArgs),
}

/// A `t,x`-style pair of reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
        let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Pair(p(a)?, p(b)?))
    }
}

/// `lo:hi:step` grid, endpoints inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("expected lo:hi:step, got {s:?}"));
        };
        let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let g = Grid { lo: p(lo)?, hi: p(hi)?, step: p(step)? };
        if !(g.step > 0.0 && g.lo.is_finite() && g.hi.is_finite() && g.hi >= g.lo) {
            return Err(format!("grid {s:?} needs finite lo <= hi and step > 0"));
        }
        Ok(g)
    }
}

impl Grid {
    /// `lo + i * step` for `i = 0..=round((hi - lo) / step)`.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

/// `auto` or a fixed cutoff `N >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nmax {
    Auto,
    Fixed(usize),
}

impl FromStr for Nmax {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Nmax::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Nmax::Fixed(n)),
            _ => Err(format!("expected \"auto\" or an integer >= 1, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TruncationArgs {
    /// Fock cutoff: `auto` or a fixed n_max.
    #[arg(long, default_value = "auto")]
    pub nmax: Nmax,
    /// Discarded-weight tolerance of the automatic cutoff.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

impl TruncationArgs {
    pub fn policy(&self) -> Result<NmaxPolicy, CliError> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {}", self.tol)));
        }
        Ok(match self.nmax {
            Nmax::Auto => NmaxPolicy::Auto { tol: self.tol },
            Nmax::Fixed(n) => NmaxPolicy::Fixed(n),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Diamond,
    Rindler,
    EtaXi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    D,
    Dbar,
    Future,
    Past,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Region {
        match r {
            RegionArg::D => Region::D,
            RegionArg::Dbar => Region::DBar,
            RegionArg::Future => Region::FutureImage,
            RegionArg::Past => Region::PastImage,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChartArgs {
    /// Diamond half-lifetime alpha.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Dilatation parameter lambda of the Rindler chart.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

impl ChartArgs {
    fn chart(&self) -> Result<DiamondChart, CliError> {
        DiamondChart::new(self.alpha, self.lambda).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[arg(long, value_enum, default_value = "diamond")]
    pub from: FrameArg,
    #[arg(long, value_enum, default_value = "eta-xi")]
    pub to: FrameArg,
    /// Point as `c1,c2` in the `--from` frame.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Pair,
    /// Patch of an `eta-xi` input point.
    #[arg(long, value_enum, default_value = "d")]
    pub region: RegionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    F,
    GInt,
    GExt,
    HInt,
    HExt,
}

impl From<FamilyArg> for ModeFamily {
    fn from(f: FamilyArg) -> ModeFamily {
        match f {
            FamilyArg::F => ModeFamily::MinkowskiF,
            FamilyArg::GInt => ModeFamily::DiamondGInt,
            FamilyArg::GExt => ModeFamily::DiamondGExt,
            FamilyArg::HInt => ModeFamily::UnruhHInt,
            FamilyArg::HExt => ModeFamily::UnruhHExt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Args)]
pub struct ModesArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    /// Dimensionless frequency omega * alpha.
    #[arg(long, conflicts_with = "omega")]
    pub omega_hat: Option<f64>,
    /// Frequency omega in units of 1/length.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Evaluate a mode at this diamond-spacetime point `t,x`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<Pair>,
    #[arg(long, value_enum, default_value = "g-int")]
    pub family: FamilyArg,
    #[arg(long, value_enum, default_value = "plus")]
    pub sigma: SigmaArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Quadrature,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionKindArg {
    Int,
    Ext,
}

#[derive(Debug, Clone, Args)]
pub struct BogoliubovArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[arg(long)]
    pub omega_hat: f64,
    #[arg(long)]
    pub k_hat: f64,
    #[arg(long, value_enum, default_value = "alpha")]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodArg,
    /// Interior (diamond) or exterior diamond mode.
    #[arg(long, value_enum, default_value = "int")]
    pub region: RegionKindArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpArg {
    Blocks,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepresentationArg {
    Rho,
    Pt,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Squeezing parameter r.
    #[arg(long, conflicts_with_all = ["omega_hat", "omega"])]
    pub r: Option<f64>,
    #[arg(long, conflicts_with = "omega")]
    pub omega_hat: Option<f64>,
    /// Frequency omega; needs --alpha.
    #[arg(long, requires = "alpha")]
    pub omega: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub trunc: TruncationArgs,
    #[arg(long, value_enum, default_value = "blocks")]
    pub dump: DumpArg,
    /// Density matrix or its partial transpose on Alice.
    #[arg(long, value_enum, default_value = "rho")]
    pub representation: RepresentationArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct EntanglementArgs {
    /// Grid of squeezing parameters `lo:hi:step`.
    #[arg(long, conflicts_with = "lifetime_grid", required_unless_present = "lifetime_grid")]
    pub r_grid: Option<Grid>,
    /// Grid of diamond lifetimes `lo:hi:step` at fixed --omega.
    #[arg(long, requires = "omega")]
    pub lifetime_grid: Option<Grid>,
    /// Dave's mode frequency for --lifetime-grid.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Read --lifetime-grid values as half-lifetimes alpha.
    #[arg(long, requires = "lifetime_grid")]
    pub alpha_mode: bool,
    #[command(flatten)]
    pub trunc: TruncationArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    /// Directory receiving fig3.csv and fig4.csv.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub trunc: TruncationArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Seed of the random geometry points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Corrupt one closed form (negative control).
    #[arg(long, value_enum, default_value = "none")]
    pub perturb: selftest::Perturbation,
    /// Append each check's wall time (makes output nondeterministic).
    #[arg(long)]
    pub timings: bool,
}

/// Column order of entanglement CSV output.
pub const ENTANGLEMENT_COLUMNS: [&str; 9] =
    ["r", "neg_log", "negativity", "s_a", "s_d", "s_ad", "mutual_info", "n_max_used", "tail_bound"];

/// 17 significant digits, round-trip safe for binary64.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn write_output(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(io_err(p)),
        None => stdout.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing to a Vec cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("ascii csv")
}

fn json_text(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable output");
    s.push('\n');
    s
}

/// Run one parsed command, writing its artifact to `stdout` (or the file
/// named by `--out`).
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Map(a) => run_map(a, stdout),
        Command::Modes(a) => run_modes(a, stdout),
        Command::Bogoliubov(a) => run_bogoliubov(a, stdout),
        Command::State(a) => run_state(a, stdout),
        Command::Entanglement(a) => run_entanglement(a, stdout),
        Command::Figures(a) => run_figures(a, stdout),
        Command::Selftest(a) => run_selftest(a, stdout),
    }
}

fn coords_json(p: &EventCoords) -> Value {
    let frame = match p.frame {
        Frame::MinkowskiDiamond => "diamond",
        Frame::MinkowskiRindler => "rindler",
        Frame::DiamondCoords => "eta-xi",
    };
    json!({ "frame": frame, "c1": p.c1, "c2": p.c2 })
}

fn run_map(a: &MapArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let chart = a.chart.chart()?;
    let Pair(c1, c2) = a.point;
    let input = match a.from {
        FrameArg::Diamond => EventCoords::diamond(c1, c2),
        FrameArg::Rindler => EventCoords::rindler(c1, c2),
        FrameArg::EtaXi => EventCoords::eta_xi(c1, c2, a.region.into()),
    };
    let diamond = match a.from {
        FrameArg::Diamond => input,
        FrameArg::Rindler => geometry::rindler_to_diamond(&chart, &input)?,
        FrameArg::EtaXi => geometry::diamond_coords_inverse(&chart, &input)?,
    };
    let (region, wedge) = geometry::classify_region(&chart, &diamond);
    let rindler = match a.from {
        FrameArg::Rindler => Ok(input),
        _ => geometry::diamond_to_rindler(&chart, &diamond),
    };
    let output = match a.to {
        FrameArg::Diamond => diamond,
        FrameArg::Rindler => rindler.clone()?,
        FrameArg::EtaXi => geometry::diamond_coords(&chart, &diamond)?,
    };
    let omega = rindler.ok().and_then(|p| geometry::conformal_factor(&chart, &p).ok());
    let v = json!({
        "input": coords_json(&input),
        "output": coords_json(&output),
        "region": region,
        "wedge": wedge,
        "conformal_factor": omega,
    });
    write_output(None, &json_text(&v), stdout)
}

fn run_modes(a: &ModesArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let chart = a.chart.chart()?;
    let omega_hat = match (a.omega_hat, a.omega) {
        (Some(w), None) => w,
        (None, Some(w)) => w * chart.alpha(),
        _ => return Err(CliError::Usage("give exactly one of --omega-hat, --omega".into())),
    };
    let sq = SqueezingParameter::from_omega_hat(omega_hat)?;
    let omega = omega_hat / chart.alpha();
    let mut v = json!({
        "alpha": chart.alpha(),
        "omega_hat": omega_hat,
        "omega": omega,
        "r": sq.r(),
        "tanh2_r": sq.tanh2(),
        "boltzmann_factor": (-std::f64::consts::PI * omega_hat).exp(),
        "occupation": modes::thermal_occupation(&chart, omega)?,
        "temperature": chart.temperature(),
    });
    if let Some(Pair(t, x)) = a.point {
        let sigma = match a.sigma {
            SigmaArg::Plus => Sigma::Plus,
            SigmaArg::Minus => Sigma::Minus,
        };
        let m = ModeSpec::from_hatted(sigma, omega_hat, a.family.into(), chart)?;
        let val = modes::eval_mode(&m, &EventCoords::diamond(t, x))?;
        v["mode"] = json!({ "family": m.family, "sigma": m.sigma, "t": t, "x": x, "value": complex_json(val) });
    }
    write_output(None, &json_text(&v), stdout)
}

fn run_bogoliubov(a: &BogoliubovArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let chart = a.chart.chart()?;
    let kind = match a.kind {
        KindArg::Alpha => CoefficientKind::Alpha,
        KindArg::Beta => CoefficientKind::Beta,
    };
    let region = match a.region {
        RegionKindArg::Int => ModeRegion::Int,
        RegionKindArg::Ext => ModeRegion::Ext,
    };
    let closed = || modes::bogoliubov_closed_form(&chart, a.omega_hat, a.k_hat, kind, region);
    let quad = || modes::bogoliubov_quadrature(&chart, a.omega_hat, a.k_hat, kind, region);
    let mut v = json!({
        "alpha": chart.alpha(),
        "omega_hat": a.omega_hat,
        "k_hat": a.k_hat,
        "kind": kind,
        "region": region,
    });
    match a.method {
        MethodArg::Closed => v["closed"] = complex_json(closed()?),
        MethodArg::Quadrature => v["quadrature"] = complex_json(quad()?),
        MethodArg::Both => {
            let (c, q) = (closed()?, quad()?);
            v["closed"] = complex_json(c);
            v["quadrature"] = complex_json(q);
            v["deviation"] = json!((c - q).norm() / c.norm());
        }
    }
    write_output(None, &json_text(&v), stdout)
}

fn state_squeezing(a: &StateArgs) -> Result<SqueezingParameter, CliError> {
    Ok(match (a.r, a.omega_hat, a.omega, a.alpha) {
        (Some(r), None, None, _) => SqueezingParameter::from_r(r)?,
        (None, Some(w), None, _) => SqueezingParameter::from_omega_hat(w)?,
        (None, None, Some(w), Some(alpha)) => {
            let chart = DiamondChart::new(alpha, 1.0).map_err(|e| CliError::Usage(e.to_string()))?;
            modes::squeezing_from_frequency(&chart, w)?
        }
        _ => return Err(CliError::Usage("give --r, --omega-hat, or --omega with --alpha".into())),
    })
}

fn run_state(a: &StateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let sq = state_squeezing(a)?;
    let trunc = FockTruncation::new(&sq, a.trunc.policy()?)?;
    let mut state = states::build_rho_ad(&sq, &trunc);
    if a.representation == RepresentationArg::Pt {
        state = states::partial_transpose(&state)?;
    }
    let text = match a.dump {
        DumpArg::Blocks => json_text(&state),
        DumpArg::Dense => {
            let m = state.to_dense();
            let mut s = String::new();
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| fmt_real(m[(i, j)])).collect();
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
    };
    write_output(a.out.as_deref(), &text, stdout)
}

fn report_row(r: &EntanglementReport) -> Vec<String> {
    vec![
        fmt_real(r.r),
        fmt_real(r.neg_log),
        fmt_real(r.negativity),
        fmt_real(r.s_a),
        fmt_real(r.s_d),
        fmt_real(r.s_ad),
        fmt_real(r.mutual_info),
        r.n_max_used.to_string(),
        fmt_real(r.tail_bound),
    ]
}

/// Reports in grid order; failed points are returned separately as
/// `(grid value, error)`.
fn sweep_split(
    grid: &SweepGrid,
    values: &[f64],
    policy: NmaxPolicy,
) -> Result<(Vec<EntanglementReport>, Vec<(f64, EntanglementError)>), CliError> {
    let out = entanglement::sweep(grid, policy)?;
    let (mut ok, mut bad) = (Vec::new(), Vec::new());
    for (x, res) in values.iter().zip(out) {
        match res {
            Ok(r) => ok.push(r),
            Err(e) => bad.push((*x, e)),
        }
    }
    Ok((ok, bad))
}

fn run_entanglement(a: &EntanglementArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let policy = a.trunc.policy()?;
    let (grid, values) = match (&a.r_grid, &a.lifetime_grid, a.omega) {
        (Some(g), None, _) => (SweepGrid::R(g.values()), g.values()),
        (None, Some(g), Some(omega)) => {
            let values = g.values();
            let lifetimes = if a.alpha_mode { values.iter().map(|x| 2.0 * x).collect() } else { values.clone() };
            (SweepGrid::Lifetimes { lifetimes, omega }, values)
        }
        _ => return Err(CliError::Usage("give --r-grid, or --lifetime-grid with --omega".into())),
    };
    if let SweepGrid::Lifetimes { lifetimes, omega } = &grid {
        if !(omega.is_finite() && *omega > 0.0) || lifetimes.iter().any(|&l| l <= 0.0) {
            return Err(CliError::Usage("--omega and every lifetime must be positive".into()));
        }
    }
    let (reports, failures) = sweep_split(&grid, &values, policy)?;
    let text = match a.format {
        FormatArg::Csv => csv_text(&ENTANGLEMENT_COLUMNS, reports.iter().map(report_row)),
        FormatArg::Json => json_text(&reports),
    };
    write_output(a.out.as_deref(), &text, stdout)?;
    if failures.is_empty() {
        Ok(())
    } else {
        for (x, e) in &failures {
            eprintln!("{}", json!({ "error": { "kind": "entanglement", "point": x, "message": e.to_string() } }));
        }
        Err(CliError::Sweep(failures.len()))
    }
}

/// `r = i / 20` for `i = 0..=100`.
pub fn figure_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 20.0).collect()
}

fn run_figures(a: &FiguresArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let policy = a.trunc.policy()?;
    let values = figure_grid();
    let (reports, failures) = sweep_split(&SweepGrid::R(values.clone()), &values, policy)?;
    if let Some((x, e)) = failures.into_iter().next() {
        eprintln!("{}", json!({ "error": { "kind": "entanglement", "point": x, "message": e.to_string() } }));
        return Err(e.into());
    }
    std::fs::create_dir_all(&a.out_dir).map_err(io_err(&a.out_dir))?;
    let fig3 = csv_text(&["r", "neg_log"], reports.iter().map(|r| vec![fmt_real(r.r), fmt_real(r.neg_log)]));
    let fig4 = csv_text(&["r", "mutual_info"], reports.iter().map(|r| vec![fmt_real(r.r), fmt_real(r.mutual_info)]));
    let (p3, p4) = (a.out_dir.join("fig3.csv"), a.out_dir.join("fig4.csv"));
    std::fs::write(&p3, fig3).map_err(io_err(&p3))?;
    std::fs::write(&p4, fig4).map_err(io_err(&p4))?;
    let v = json!({ "fig3": p3.display().to_string(), "fig4": p4.display().to_string(), "points": reports.len() });
    write_output(None, &json_text(&v), stdout)
}

fn run_selftest(a: &SelftestArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = selftest::SelftestConfig { seed: a.seed, perturb: a.perturb };
    let mut failed = 0;
    let io = |e| CliError::Io { path: "<stdout>".into(), source: e };
    for &(id, _, _) in selftest::CHECKS {
        let res = selftest::run_check(id, &cfg).expect("listed check");
        failed += usize::from(!res.passed);
        let mut line = res.line();
        if a.timings {
            line.push_str(&format!(" [{:.2} s]", res.elapsed.as_secs_f64()));
        }
        writeln!(stdout, "{line}").map_err(io)?;
    }
    let total = selftest::CHECKS.len();
    writeln!(stdout, "{} of {total} checks passed", total - failed).map_err(io)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Selftest { failed, total })
    }
}
