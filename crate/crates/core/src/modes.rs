//! Minkowski, diamond and Unruh-diamond field modes and the Bogoliubov
//! coefficients between them.
//!
//! Frequencies are kept hatted (`omega_hat = omega * alpha`,
//! `k_hat = k * alpha`); the chart supplies `alpha` wherever a dimensionful
//! quantity is needed.

use crate::geometry::{self, DiamondChart, EventCoords, Frame, GeometryError};
use crate::specfun::{self, KummerParams, QuadratureSpec, SpecfunError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModesError {
    #[error("frequency must be finite and positive, got {0}")]
    InvalidFrequency(f64),
    #[error("squeezing parameter must be finite and nonnegative, got {0}")]
    InvalidSqueezing(f64),
    #[error("null coordinate {x_hat} (in units of alpha) is outside the support of {family:?}")]
    OutOfSupport { family: ModeFamily, x_hat: f64 },
    #[error("no closed form is implemented for exterior coefficients; use quadrature")]
    NoClosedForm,
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Propagation direction: `Plus` modes depend on `V = t + x`, `Minus` modes
/// on `U = t - x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sigma {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeFamily {
    MinkowskiF,
    DiamondGInt,
    DiamondGExt,
    UnruhHInt,
    UnruhHExt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeRegion {
    Int,
    Ext,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientKind {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub sigma: Sigma,
    /// Hatted frequency (`k alpha` for Minkowski modes, `omega alpha` otherwise).
    freq_hat: f64,
    pub family: ModeFamily,
    pub chart: DiamondChart,
}

impl ModeSpec {
    /// Mode of (unhatted) frequency `freq`.
    pub fn new(sigma: Sigma, freq: f64, family: ModeFamily, chart: DiamondChart) -> Result<Self, ModesError> {
        Self::from_hatted(sigma, freq * chart.alpha(), family, chart)
    }

    pub fn from_hatted(sigma: Sigma, freq_hat: f64, family: ModeFamily, chart: DiamondChart) -> Result<Self, ModesError> {
        if !(freq_hat.is_finite() && freq_hat > 0.0) {
            return Err(ModesError::InvalidFrequency(freq_hat));
        }
        Ok(Self { sigma, freq_hat, family, chart })
    }

    pub fn freq_hat(&self) -> f64 {
        self.freq_hat
    }

    pub fn freq(&self) -> f64 {
        self.freq_hat / self.chart.alpha()
    }
}

/// Squeezing parameter `r` with `tanh r = exp(-pi omega_hat / 2)`.
///
/// `tanh r` is stored alongside `r` so that Boltzmann factors do not pay for
/// an `atanh`/`tanh` round trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingParameter {
    r: f64,
    tanh_r: f64,
    omega_hat: Option<f64>,
}

impl SqueezingParameter {
    pub fn from_r(r: f64) -> Result<Self, ModesError> {
        if !(r >= 0.0) || r.is_nan() {
            return Err(ModesError::InvalidSqueezing(r));
        }
        Ok(Self { r, tanh_r: r.tanh(), omega_hat: None })
    }

    pub fn from_omega_hat(omega_hat: f64) -> Result<Self, ModesError> {
        if !(omega_hat.is_finite() && omega_hat > 0.0) {
            return Err(ModesError::InvalidFrequency(omega_hat));
        }
        let x = PI * omega_hat / 2.0;
        let q = (-x).exp();
        // atanh q = (ln(1+q) - ln(1-q)) / 2 with 1 - q = -expm1(-x)
        let r = if q < 0.5 {
            0.5 * (q.ln_1p() - (-q).ln_1p())
        } else {
            0.5 * (q.ln_1p() - (-(-x).exp_m1()).ln())
        };
        Ok(Self { r, tanh_r: q, omega_hat: Some(omega_hat) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn omega_hat(&self) -> Option<f64> {
        self.omega_hat
    }

    pub fn tanh_r(&self) -> f64 {
        self.tanh_r
    }

    /// `tanh^2 r`, the Boltzmann factor `exp(-pi omega_hat)`.
    pub fn tanh2(&self) -> f64 {
        self.tanh_r * self.tanh_r
    }

    pub fn cosh_r(&self) -> f64 {
        self.r.cosh()
    }

    pub fn sinh_r(&self) -> f64 {
        self.r.sinh()
    }

    /// `cosh^2 r = 1 / (1 - tanh^2 r)`.
    pub fn cosh2(&self) -> f64 {
        match self.omega_hat {
            Some(w) => -1.0 / (-PI * w).exp_m1(),
            None => {
                let c = self.r.cosh();
                c * c
            }
        }
    }

    /// `ln tanh^2 r`, accurate at both ends (`-pi omega_hat` when derived
    /// from a frequency).
    pub fn ln_tanh2(&self) -> f64 {
        match self.omega_hat {
            Some(w) => -PI * w,
            None if self.r == 0.0 => f64::NEG_INFINITY,
            None if self.r > 1.0 => (-self.sech2()).ln_1p(),
            None => 2.0 * self.tanh_r.ln(),
        }
    }

    /// `sech^2 r = 1 - tanh^2 r`, evaluated without cancellation.
    pub fn sech2(&self) -> f64 {
        match self.omega_hat {
            Some(w) => -(-PI * w).exp_m1(),
            None => {
                let s = 1.0 / self.r.cosh();
                s * s
            }
        }
    }

    /// `sinh^2 r`, equal to the thermal occupation.
    pub fn sinh2(&self) -> f64 {
        match self.omega_hat {
            Some(w) => 1.0 / (PI * w).exp_m1(),
            None => {
                let s = self.r.sinh();
                s * s
            }
        }
    }
}

pub fn squeezing_from_frequency(chart: &DiamondChart, omega: f64) -> Result<SqueezingParameter, ModesError> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(ModesError::InvalidFrequency(omega));
    }
    SqueezingParameter::from_omega_hat(omega * chart.alpha())
}

/// Bose–Einstein occupation `1 / (exp(pi alpha omega) - 1) = sinh^2 r`.
pub fn thermal_occupation(chart: &DiamondChart, omega: f64) -> Result<f64, ModesError> {
    Ok(squeezing_from_frequency(chart, omega)?.sinh2())
}

/// `atanh x` for `|x| < 1` and `acoth x` for `|x| > 1`, both as
/// `ln |(1 + x) / (1 - x)| / 2`.
fn half_log_ratio(x: f64) -> f64 {
    if x.abs() < 1.0 {
        x.atanh()
    } else {
        (1.0 / x).atanh()
    }
}

fn g_int_hat(omega_hat: f64, x_hat: f64) -> Complex64 {
    Complex64::from_polar(1.0, -omega_hat * half_log_ratio(x_hat))
}

fn g_ext_hat(omega_hat: f64, x_hat: f64) -> Complex64 {
    Complex64::from_polar(1.0, omega_hat * half_log_ratio(x_hat))
}

/// Value of mode `m` at a spacetime event (any frame; non-diamond frames are
/// mapped into diamond spacetime first). Diamond families vanish outside their
/// support.
pub fn eval_mode(m: &ModeSpec, p: &EventCoords) -> Result<Complex64, ModesError> {
    eval_impl(m, p, false)
}

/// As [`eval_mode`], but points outside the support of a diamond family are an
/// error rather than zero.
pub fn eval_mode_strict(m: &ModeSpec, p: &EventCoords) -> Result<Complex64, ModesError> {
    eval_impl(m, p, true)
}

fn eval_impl(m: &ModeSpec, p: &EventCoords, strict: bool) -> Result<Complex64, ModesError> {
    let chart = &m.chart;
    let p = match p.frame {
        Frame::MinkowskiDiamond => *p,
        Frame::MinkowskiRindler => geometry::rindler_to_diamond(chart, p)?,
        Frame::DiamondCoords => geometry::diamond_coords_inverse(chart, p)?,
    };
    let (v, u) = p.lightcone();
    let x = match m.sigma {
        Sigma::Plus => v,
        Sigma::Minus => u,
    };
    let x_hat = x / chart.alpha();
    let w = m.freq_hat;
    let norm = 1.0 / (4.0 * PI * m.freq()).sqrt();
    let inside = x_hat.abs() < 1.0;
    let on_horizon = (x_hat.abs() - 1.0).abs() < geometry::SINGULAR_TOLERANCE;
    let zero = Complex64::new(0.0, 0.0);
    let out_of_support = || {
        if strict {
            Err(ModesError::OutOfSupport { family: m.family, x_hat })
        } else {
            Ok(zero)
        }
    };
    if on_horizon && m.family != ModeFamily::MinkowskiF {
        return out_of_support();
    }
    match m.family {
        ModeFamily::MinkowskiF => Ok(Complex64::from_polar(norm, -w * x_hat)),
        ModeFamily::DiamondGInt if inside => Ok(g_int_hat(w, x_hat) * norm),
        ModeFamily::DiamondGExt if !inside => Ok(g_ext_hat(w, x_hat) * norm),
        ModeFamily::DiamondGInt | ModeFamily::DiamondGExt => out_of_support(),
        ModeFamily::UnruhHInt | ModeFamily::UnruhHExt => {
            let sq = SqueezingParameter::from_omega_hat(w)?;
            let (c, s) = (sq.cosh_r(), sq.sinh_r());
            let interior_family = m.family == ModeFamily::UnruhHInt;
            // h_int = cosh r g_int + sinh r g_ext*, h_ext = cosh r g_ext + sinh r g_int*
            let value = match (interior_family, inside) {
                (true, true) => g_int_hat(w, x_hat) * c,
                (true, false) => g_ext_hat(w, x_hat).conj() * s,
                (false, false) => g_ext_hat(w, x_hat) * c,
                (false, true) => g_int_hat(w, x_hat).conj() * s,
            };
            Ok(value * norm)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovPair {
    pub alpha_coef: Complex64,
    pub beta_coef: Complex64,
    pub omega_hat: f64,
    pub k_hat: f64,
    pub region: ModeRegion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BogoliubovMethod {
    Closed,
    Quadrature,
}

fn check_freqs(omega_hat: f64, k_hat: f64) -> Result<(), ModesError> {
    for f in [omega_hat, k_hat] {
        if !(f.is_finite() && f > 0.0) {
            return Err(ModesError::InvalidFrequency(f));
        }
    }
    Ok(())
}

/// Kummer-function closed form of the interior coefficients,
/// `(alpha/2) sqrt(w k) / sinh(pi w/2) e^{∓ik} M(1 - iw/2, 2, ±2ik)` with the
/// upper sign for `Alpha`.
pub fn bogoliubov_closed_form(
    chart: &DiamondChart,
    omega_hat: f64,
    k_hat: f64,
    kind: CoefficientKind,
    region: ModeRegion,
) -> Result<Complex64, ModesError> {
    check_freqs(omega_hat, k_hat)?;
    if region == ModeRegion::Ext {
        return Err(ModesError::NoClosedForm);
    }
    let sign = match kind {
        CoefficientKind::Alpha => 1.0,
        CoefficientKind::Beta => -1.0,
    };
    closed_form_signed(chart.alpha(), omega_hat, k_hat, sign * k_hat)
}

/// Closed form with the `k` inside the phase and `M` decoupled from the
/// `sqrt(k)` prefactor; `alpha` is `beta` at `k_signed = -k_hat`.
pub fn closed_form_signed(alpha: f64, omega_hat: f64, k_hat: f64, k_signed: f64) -> Result<Complex64, ModesError> {
    let m = specfun::kummer_m(&KummerParams::new(
        Complex64::new(1.0, -omega_hat / 2.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(0.0, 2.0 * k_signed),
    ))?;
    let prefactor = 0.5 * alpha * (omega_hat * k_hat).sqrt() / (PI * omega_hat / 2.0).sinh();
    Ok(Complex64::from_polar(prefactor, -k_signed) * m)
}

const QUAD_REL_TOL: f64 = 1e-12;

/// Coefficient by direct quadrature of
/// `sqrt(4 pi k) / (2 pi) ∫ g(U) e^{±ikU} dU` over the support of `g`.
///
/// Interior: `u = tanh s` turns the integrand into
/// `e^{-iws} e^{±ik tanh s} sech^2 s`. Exterior: each half-line `|u| > 1` is
/// split at `|u| = L`; the near part uses `u = coth s`, the far part is an
/// Abel-regularised Fourier tail.
pub fn bogoliubov_quadrature(
    chart: &DiamondChart,
    omega_hat: f64,
    k_hat: f64,
    kind: CoefficientKind,
    region: ModeRegion,
) -> Result<Complex64, ModesError> {
    check_freqs(omega_hat, k_hat)?;
    let kappa = match kind {
        CoefficientKind::Alpha => k_hat,
        CoefficientKind::Beta => -k_hat,
    };
    let integral = match region {
        ModeRegion::Int => interior_integral(omega_hat, kappa)?,
        ModeRegion::Ext => exterior_half_line(omega_hat, kappa)? + exterior_half_line(-omega_hat, -kappa)?,
    };
    Ok(integral * (chart.alpha() / (2.0 * PI) * (k_hat / omega_hat).sqrt()))
}

fn interior_integral(w: f64, kappa: f64) -> Result<Complex64, ModesError> {
    let s_max = 0.5 * (40.0 / (QUAD_REL_TOL * 1e-4)).ln();
    let f = |s: f64| {
        let sech = 1.0 / s.cosh();
        Complex64::from_polar(sech * sech, -w * s + kappa * s.tanh())
    };
    let panels = (2.0 * s_max * (1.0 + w + kappa.abs()) / PI).ceil() as usize;
    let r = specfun::integrate_adaptive(f, -s_max, s_max, QUAD_REL_TOL, 1e-16, 20_000, panels)?;
    Ok(r.value)
}

/// `∫_1^∞ e^{i w acoth u} e^{i kappa u} du` (Abel-regularised).
fn exterior_half_line(w: f64, kappa: f64) -> Result<Complex64, ModesError> {
    let split = 2.0_f64;
    let s_lo = (1.0 / split).atanh();
    let s_max = 0.5 * (40.0 / (QUAD_REL_TOL * 1e-4)).ln();
    let near = |s: f64| {
        let csch = 1.0 / s.sinh();
        Complex64::from_polar(csch * csch, w * s + kappa / s.tanh())
    };
    let panels = ((s_max - s_lo) * (1.0 + w.abs() + 4.0 * kappa.abs()) / PI).ceil() as usize;
    let near = specfun::integrate_adaptive(near, s_lo, s_max, QUAD_REL_TOL, 1e-16, 20_000, panels)?;
    // e^{iθ} - 1 = 2i sin(θ/2) e^{iθ/2}, exact for small θ
    let g = |v: f64| {
        let theta = w * (1.0 / v).atanh();
        Complex64::new(0.0, 2.0 * (0.5 * theta).sin()) * Complex64::from_polar(1.0, 0.5 * theta)
    };
    let tail = specfun::fourier_tail(g, split, kappa, QUAD_REL_TOL, 20_000)?;
    let constant = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, kappa * split) / kappa;
    Ok(near.value + tail.value + constant)
}

/// Coefficient computed from [`eval_mode`] along the null line of `m.sigma`;
/// used to check direction independence.
pub fn bogoliubov_from_mode(m: &ModeSpec, k_hat: f64, kind: CoefficientKind) -> Result<Complex64, ModesError> {
    check_freqs(m.freq_hat(), k_hat)?;
    if m.family != ModeFamily::DiamondGInt {
        return Err(ModesError::NoClosedForm);
    }
    let alpha = m.chart.alpha();
    let k = k_hat / alpha;
    let sign = match kind {
        CoefficientKind::Alpha => 1.0,
        CoefficientKind::Beta => -1.0,
    };
    let point = |x: f64| match m.sigma {
        Sigma::Plus => EventCoords::diamond(x / 2.0, x / 2.0),
        Sigma::Minus => EventCoords::diamond(x / 2.0, -x / 2.0),
    };
    let f = |x: f64| {
        let g = eval_mode(m, &point(x)).unwrap_or(Complex64::new(0.0, 0.0));
        g * Complex64::from_polar(1.0, sign * k * x)
    };
    let spec = QuadratureSpec::new(-alpha, alpha)
        .rel_tol(1e-11)
        .oscillation_hint(k + m.freq());
    let r = specfun::oscillatory_integral(f, &spec)?;
    Ok(r.value * ((4.0 * PI * k).sqrt() / (2.0 * PI)))
}

/// Both coefficients for one `(omega_hat, k_hat)` pair.
pub fn bogoliubov_pair(
    chart: &DiamondChart,
    omega_hat: f64,
    k_hat: f64,
    region: ModeRegion,
    method: BogoliubovMethod,
) -> Result<BogoliubovPair, ModesError> {
    let eval = |kind| match method {
        BogoliubovMethod::Closed => bogoliubov_closed_form(chart, omega_hat, k_hat, kind, region),
        BogoliubovMethod::Quadrature => bogoliubov_quadrature(chart, omega_hat, k_hat, kind, region),
    };
    Ok(BogoliubovPair {
        alpha_coef: eval(CoefficientKind::Alpha)?,
        beta_coef: eval(CoefficientKind::Beta)?,
        omega_hat,
        k_hat,
        region,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> DiamondChart {
        DiamondChart::new(1.0, 2.0).unwrap()
    }

    fn rel(x: Complex64, y: Complex64) -> f64 {
        (x - y).norm() / y.norm()
    }

    #[test]
    fn g_int_at_origin_is_normalisation() {
        let c = DiamondChart::new(2.0, 1.0).unwrap();
        let m = ModeSpec::new(Sigma::Plus, 0.7, ModeFamily::DiamondGInt, c).unwrap();
        let v = eval_mode(&m, &EventCoords::diamond(0.0, 0.0)).unwrap();
        assert!((v - Complex64::new(1.0 / (4.0 * PI * 0.7).sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn g_int_phase_matches_diamond_time() {
        let c = DiamondChart::new(1.5, 1.0).unwrap();
        let omega = 0.9;
        let m = ModeSpec::new(Sigma::Plus, omega, ModeFamily::DiamondGInt, c).unwrap();
        let v_big = c.alpha() * 1f64.tanh();
        let val = eval_mode(&m, &EventCoords::diamond(v_big / 2.0, v_big / 2.0)).unwrap();
        let norm = 1.0 / (4.0 * PI * omega).sqrt();
        let want = Complex64::from_polar(norm, -omega * c.alpha());
        assert!((val - want).norm() < 1e-14);
    }

    #[test]
    fn support_rules() {
        let m = ModeSpec::new(Sigma::Minus, 1.0, ModeFamily::DiamondGInt, chart()).unwrap();
        let outside = EventCoords::diamond(0.0, -2.0); // U = 2
        assert_eq!(eval_mode(&m, &outside).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(eval_mode_strict(&m, &outside), Err(ModesError::OutOfSupport { .. })));
        let ext = ModeSpec::new(Sigma::Minus, 1.0, ModeFamily::DiamondGExt, chart()).unwrap();
        assert!(eval_mode(&ext, &outside).unwrap().norm() > 0.0);
        assert_eq!(eval_mode(&ext, &EventCoords::diamond(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn squeezing_examples() {
        let sq = SqueezingParameter::from_omega_hat(2.0 * 2f64.ln() / PI).unwrap();
        assert!((sq.r() - 0.5f64.atanh()).abs() < 1e-15);
        assert!(SqueezingParameter::from_omega_hat(1e3).unwrap().r() < 1e-300);
        assert!(SqueezingParameter::from_omega_hat(0.0).is_err());
        assert!(SqueezingParameter::from_r(-1.0).is_err());
        // large-r end keeps relative accuracy
        let sq = SqueezingParameter::from_omega_hat(1e-8).unwrap();
        // atanh(e^{-x}) = ln coth(x/2) / 2
        let want = -0.5 * (PI * 1e-8 / 4.0).tanh().ln();
        assert!((sq.r() - want).abs() < 1e-14 * want);
    }

    #[test]
    fn occupation_is_sinh_squared() {
        let c = DiamondChart::new(0.8, 1.0).unwrap();
        for &w in &[0.05, 0.5, 3.0, 10.0] {
            let n = thermal_occupation(&c, w).unwrap();
            let s = squeezing_from_frequency(&c, w).unwrap().r().sinh();
            assert!((n - s * s).abs() <= 1e-13 * n.max(1.0));
        }
    }

    #[test]
    fn closed_form_reference_values() {
        // alpha = 1, 50-digit quadrature over the support
        let c = DiamondChart::new(1.0, 1.0).unwrap();
        let cases = [
            (1.0, 1.0, 0.29797052232120139, 0.10110888805041756),
            (0.5, 2.0, 0.47677256814722410, 0.11461154276448465),
            (4.0, 8.0, 0.066504773950203123, 0.00029655849407149),
        ];
        for (w, k, a, b) in cases {
            let ca = bogoliubov_closed_form(&c, w, k, CoefficientKind::Alpha, ModeRegion::Int).unwrap();
            let cb = bogoliubov_closed_form(&c, w, k, CoefficientKind::Beta, ModeRegion::Int).unwrap();
            assert!(rel(ca, Complex64::new(a, 0.0)) < 1e-12, "{ca}");
            assert!(rel(cb, Complex64::new(b, 0.0)) < 1e-11, "{cb}");
        }
    }

    #[test]
    fn exterior_reference_values() {
        let c = DiamondChart::new(1.0, 1.0).unwrap();
        let a = bogoliubov_quadrature(&c, 1.0, 1.3, CoefficientKind::Alpha, ModeRegion::Ext).unwrap();
        let b = bogoliubov_quadrature(&c, 1.0, 1.3, CoefficientKind::Beta, ModeRegion::Ext).unwrap();
        assert!(rel(a, Complex64::new(-0.3752189228621802, 0.0)) < 1e-9, "{a}");
        assert!(rel(b, Complex64::new(-0.07278372017284128, 0.0)) < 1e-9, "{b}");
    }

    #[test]
    fn alpha_is_beta_with_reversed_k() {
        for &(w, k) in &[(1.0, 1.0), (0.3, 2.5)] {
            let a = bogoliubov_closed_form(&chart(), w, k, CoefficientKind::Alpha, ModeRegion::Int).unwrap();
            let b_rev = closed_form_signed(chart().alpha(), w, k, k).unwrap();
            assert_eq!(a, b_rev);
            let b = bogoliubov_closed_form(&chart(), w, k, CoefficientKind::Beta, ModeRegion::Int).unwrap();
            assert_eq!(b, closed_form_signed(chart().alpha(), w, k, -k).unwrap());
        }
    }

    #[test]
    fn no_exterior_closed_form() {
        let e = bogoliubov_closed_form(&chart(), 1.0, 1.0, CoefficientKind::Alpha, ModeRegion::Ext);
        assert_eq!(e, Err(ModesError::NoClosedForm));
    }
}
