//! Conformal geometry of the causal diamond.
//!
//! A diamond of half-lifetime `alpha` centred at the origin of Minkowski space
//! is the conformal image of the right Rindler wedge under the composite map
//! `T(-alpha) ∘ K(1/2alpha) ∘ Λ(lambda)` (translation, special conformal
//! transformation, dilatation). Covering the Rindler wedge with a Rindler
//! chart `(eta, xi)` then labels the diamond with diamond coordinates.
//!
//! Three coordinate systems appear here:
//!
//! * `(t, x)`: Minkowski coordinates of diamond spacetime,
//! * `(t~, x~)`: Minkowski coordinates of Rindler spacetime (these depend on
//!   the dilatation `lambda` through `alpha~ = 2 alpha / lambda`),
//! * `(eta, xi)`: diamond coordinates, which do not depend on `lambda`.
//!
//! All formulas are evaluated on lengths measured in units of `alpha` (or
//! `alpha~` on the Rindler side); the public API takes and returns raw lengths.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Distance (in units of `alpha`) from a singular set below which a map
/// refuses to evaluate.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid chart parameters: alpha = {alpha}, lambda = {lambda} (both must be finite and positive)")]
    InvalidChart { alpha: f64, lambda: f64 },
    #[error("point ({c1}, {c2}) is on the conformal singular set; its image is at infinity")]
    SingularPoint { c1: f64, c2: f64 },
    #[error("point ({c1}, {c2}) lies on a horizon line where diamond coordinates diverge")]
    OnHorizon { c1: f64, c2: f64 },
    #[error("expected a point in the {expected} frame, got {found}")]
    WrongFrame { expected: Frame, found: Frame },
    #[error("diamond coordinates need a region label (D, DBar, FutureImage or PastImage)")]
    MissingRegion,
}

/// Parameter bundle of a diamond chart.
///
/// Only the constrained chart is exposed: the Rindler prefactor and the
/// acceleration are fixed by `kappa * lambda = 4` and `accel * alpha = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondChart {
    alpha: f64,
    lambda: f64,
    alpha_tilde: f64,
    kappa: f64,
    accel: f64,
    temperature: f64,
}

impl DiamondChart {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self, GeometryError> {
        if !(alpha.is_finite() && alpha > 0.0 && lambda.is_finite() && lambda > 0.0) {
            return Err(GeometryError::InvalidChart { alpha, lambda });
        }
        Ok(Self {
            alpha,
            lambda,
            alpha_tilde: 2.0 * alpha / lambda,
            kappa: 4.0 / lambda,
            accel: 2.0 / alpha,
            temperature: 2.0 / (PI * 2.0 * alpha),
        })
    }

    /// Chart for a diamond of total lifetime `lifetime = 2 alpha`.
    pub fn from_lifetime(lifetime: f64, lambda: f64) -> Result<Self, GeometryError> {
        Self::new(lifetime / 2.0, lambda)
    }

    /// Diamond half-lifetime.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Rindler-side length unit `2 alpha / lambda`.
    pub fn alpha_tilde(&self) -> f64 {
        self.alpha_tilde
    }

    /// Rindler chart prefactor, `4 / lambda`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Acceleration of the `xi = 0` worldline, `2 / alpha`.
    pub fn accel(&self) -> f64 {
        self.accel
    }

    /// Diamond temperature `2 / (pi * lifetime)`.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn lifetime(&self) -> f64 {
        2.0 * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    /// `(t, x)` in diamond spacetime.
    MinkowskiDiamond,
    /// `(t~, x~)` in Rindler spacetime.
    MinkowskiRindler,
    /// `(eta, xi)`.
    DiamondCoords,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Frame::MinkowskiDiamond => "Minkowski-diamond",
            Frame::MinkowskiRindler => "Minkowski-Rindler",
            Frame::DiamondCoords => "diamond (eta, xi)",
        };
        f.write_str(name)
    }
}

/// Causal region of diamond spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Diamond interior, image of the right wedge.
    D,
    /// The four vertex wedges outside the diamond, image of the left wedge.
    DBar,
    /// Rectangles with `|V| < alpha`, `|U| > alpha`, image of the future wedge.
    FutureImage,
    /// Rectangles with `|V| > alpha`, `|U| < alpha`, image of the past wedge.
    PastImage,
    /// One of the four lines `|V| = alpha` or `|U| = alpha`.
    Boundary,
}

impl Region {
    /// The Rindler wedge whose image this region is.
    pub fn wedge(self) -> Option<Wedge> {
        match self {
            Region::D => Some(Wedge::R),
            Region::DBar => Some(Wedge::L),
            Region::FutureImage => Some(Wedge::F),
            Region::PastImage => Some(Wedge::P),
            Region::Boundary => None,
        }
    }
}

/// Rindler wedge, identified by the signs of the Rindler null coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wedge {
    R,
    L,
    F,
    P,
}

impl Wedge {
    pub fn from_null_signs(v_tilde: f64, u_tilde: f64) -> Option<Self> {
        match (v_tilde > 0.0, u_tilde > 0.0, v_tilde < 0.0, u_tilde < 0.0) {
            (true, _, _, true) => Some(Wedge::R),
            (_, true, true, _) => Some(Wedge::L),
            (true, true, _, _) => Some(Wedge::F),
            (_, _, true, true) => Some(Wedge::P),
            _ => None,
        }
    }

    /// Patch label carried by the diamond coordinates of this wedge.
    pub fn patch(self) -> Patch {
        match self {
            Wedge::R | Wedge::F => Patch::Plus,
            Wedge::L | Wedge::P => Patch::Minus,
        }
    }

    fn region(self) -> Region {
        match self {
            Wedge::R => Region::D,
            Wedge::L => Region::DBar,
            Wedge::F => Region::FutureImage,
            Wedge::P => Region::PastImage,
        }
    }
}

/// Patch label `epsilon`: `+1` on the interior chart, `-1` on the exterior one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Patch {
    Plus,
    Minus,
}

impl Patch {
    pub fn sign(self) -> f64 {
        match self {
            Patch::Plus => 1.0,
            Patch::Minus => -1.0,
        }
    }
}

/// A spacetime event in one of the three coordinate systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventCoords {
    pub frame: Frame,
    pub c1: f64,
    pub c2: f64,
    pub region: Option<Region>,
    pub epsilon: Patch,
}

impl EventCoords {
    pub fn diamond(t: f64, x: f64) -> Self {
        Self {
            frame: Frame::MinkowskiDiamond,
            c1: t,
            c2: x,
            region: None,
            epsilon: Patch::Plus,
        }
    }

    pub fn rindler(t_tilde: f64, x_tilde: f64) -> Self {
        Self {
            frame: Frame::MinkowskiRindler,
            c1: t_tilde,
            c2: x_tilde,
            region: None,
            epsilon: Patch::Plus,
        }
    }

    /// Diamond coordinates on the patch covering `region`.
    pub fn eta_xi(eta: f64, xi: f64, region: Region) -> Self {
        let epsilon = region.wedge().map(Wedge::patch).unwrap_or(Patch::Plus);
        Self {
            frame: Frame::DiamondCoords,
            c1: eta,
            c2: xi,
            region: Some(region),
            epsilon,
        }
    }

    /// Null coordinates: `(t + x, t - x)` for the Minkowski frames,
    /// `(eps (eta + xi), eps (eta - xi))` for diamond coordinates.
    pub fn lightcone(&self) -> (f64, f64) {
        match self.frame {
            Frame::DiamondCoords => {
                let eps = self.epsilon.sign();
                (eps * (self.c1 + self.c2), eps * (self.c1 - self.c2))
            }
            _ => (self.c1 + self.c2, self.c1 - self.c2),
        }
    }

    fn expect(&self, frame: Frame) -> Result<(), GeometryError> {
        if self.frame == frame {
            Ok(())
        } else {
            Err(GeometryError::WrongFrame {
                expected: frame,
                found: self.frame,
            })
        }
    }
}

/// `F_±(t, x) = (x ± 1)^2 - t^2` on dimensionless coordinates.
pub fn f_plus(t: f64, x: f64) -> f64 {
    (x + 1.0 + t) * (x + 1.0 - t)
}

pub fn f_minus(t: f64, x: f64) -> f64 {
    (x - 1.0 + t) * (x - 1.0 - t)
}

/// `N(t, x) = 1 - x^2 + t^2` on dimensionless coordinates.
pub fn n_function(t: f64, x: f64) -> f64 {
    1.0 + (t - x) * (t + x)
}

/// Image of a Rindler-spacetime event in diamond spacetime.
pub fn rindler_to_diamond(
    chart: &DiamondChart,
    p: &EventCoords,
) -> Result<EventCoords, GeometryError> {
    p.expect(Frame::MinkowskiRindler)?;
    let t = p.c1 / chart.alpha_tilde;
    let x = p.c2 / chart.alpha_tilde;
    let denom = f_plus(t, x);
    if denom.abs() < SINGULAR_TOLERANCE {
        return Err(GeometryError::SingularPoint { c1: p.c1, c2: p.c2 });
    }
    let out_t = chart.alpha * 2.0 * t / denom;
    let out_x = -chart.alpha * n_function(t, x) / denom;
    let mut out = EventCoords::diamond(out_t, out_x);
    out.region = Some(classify_region(chart, &out).0);
    Ok(out)
}

/// Inverse of [`rindler_to_diamond`].
pub fn diamond_to_rindler(
    chart: &DiamondChart,
    p: &EventCoords,
) -> Result<EventCoords, GeometryError> {
    p.expect(Frame::MinkowskiDiamond)?;
    let t = p.c1 / chart.alpha;
    let x = p.c2 / chart.alpha;
    let denom = f_minus(t, x);
    if denom.abs() < SINGULAR_TOLERANCE {
        return Err(GeometryError::SingularPoint { c1: p.c1, c2: p.c2 });
    }
    Ok(EventCoords::rindler(
        chart.alpha_tilde * 2.0 * t / denom,
        chart.alpha_tilde * n_function(t, x) / denom,
    ))
}

/// Null-coordinate form of the conformal map, `(V, U) -> (V~, U~)`.
pub fn lightcone_map(chart: &DiamondChart, v: f64, u: f64) -> Result<(f64, f64), GeometryError> {
    let vh = v / chart.alpha;
    let uh = u / chart.alpha;
    if (1.0 - vh).abs() < SINGULAR_TOLERANCE || (1.0 + uh).abs() < SINGULAR_TOLERANCE {
        return Err(GeometryError::SingularPoint {
            c1: (v + u) / 2.0,
            c2: (v - u) / 2.0,
        });
    }
    Ok((
        chart.alpha_tilde * (1.0 + vh) / (1.0 - vh),
        -chart.alpha_tilde * (1.0 - uh) / (1.0 + uh),
    ))
}

/// Inverse of [`lightcone_map`].
pub fn lightcone_map_inverse(
    chart: &DiamondChart,
    v_tilde: f64,
    u_tilde: f64,
) -> Result<(f64, f64), GeometryError> {
    let vt = v_tilde / chart.alpha_tilde;
    let ut = u_tilde / chart.alpha_tilde;
    if (1.0 + vt).abs() < SINGULAR_TOLERANCE || (1.0 - ut).abs() < SINGULAR_TOLERANCE {
        return Err(GeometryError::SingularPoint {
            c1: (v_tilde + u_tilde) / 2.0,
            c2: (v_tilde - u_tilde) / 2.0,
        });
    }
    Ok((
        chart.alpha * (vt - 1.0) / (vt + 1.0),
        chart.alpha * (1.0 + ut) / (1.0 - ut),
    ))
}

/// Causal region and Rindler wedge of a diamond-spacetime event.
///
/// The region comes from `|V|`, `|U|` against `alpha` and the wedge from the
/// signs of the mapped null coordinates; the two always agree off the
/// boundary lines.
pub fn classify_region(chart: &DiamondChart, p: &EventCoords) -> (Region, Option<Wedge>) {
    let (v, u) = match p.frame {
        Frame::MinkowskiDiamond => p.lightcone(),
        _ => return (p.region.unwrap_or(Region::Boundary), p.region.and_then(Region::wedge)),
    };
    let vh = v / chart.alpha;
    let uh = u / chart.alpha;
    if (vh.abs() - 1.0).abs() < SINGULAR_TOLERANCE || (uh.abs() - 1.0).abs() < SINGULAR_TOLERANCE {
        return (Region::Boundary, None);
    }
    let region = match (vh.abs() < 1.0, uh.abs() < 1.0) {
        (true, true) => Region::D,
        (false, false) => Region::DBar,
        (true, false) => Region::FutureImage,
        (false, true) => Region::PastImage,
    };
    let wedge = lightcone_map(chart, v, u)
        .ok()
        .and_then(|(vt, ut)| Wedge::from_null_signs(vt, ut));
    (region, wedge)
}

/// Diamond coordinates `(eta, xi)` of a diamond-spacetime event.
///
/// The event is pushed through the lambda-dependent Rindler null coordinates
/// and then through the inverse Rindler chart of its wedge; the result does
/// not depend on lambda. On the future and past images the Rindler chart has
/// its time and space roles exchanged.
pub fn diamond_coords(chart: &DiamondChart, p: &EventCoords) -> Result<EventCoords, GeometryError> {
    p.expect(Frame::MinkowskiDiamond)?;
    let (region, _) = classify_region(chart, p);
    if region == Region::Boundary {
        return Err(GeometryError::OnHorizon { c1: p.c1, c2: p.c2 });
    }
    let (v, u) = p.lightcone();
    let (vt, ut) = lightcone_map(chart, v, u).map_err(|_| GeometryError::OnHorizon { c1: p.c1, c2: p.c2 })?;
    let wedge = Wedge::from_null_signs(vt, ut).ok_or(GeometryError::OnHorizon { c1: p.c1, c2: p.c2 })?;
    // |V~| / alpha~ = exp(2 (eta + xi) / alpha), |U~| / alpha~ = exp(2 (xi - eta) / alpha)
    let sum = 0.5 * chart.alpha * (vt.abs() / chart.alpha_tilde).ln();
    let diff = 0.5 * chart.alpha * (ut.abs() / chart.alpha_tilde).ln();
    let eta = 0.5 * (sum - diff);
    let xi = 0.5 * (sum + diff);
    Ok(EventCoords::eta_xi(eta, xi, wedge.region()))
}

/// Inverse of [`diamond_coords`] on the patch named by `p.region`.
pub fn diamond_coords_inverse(
    chart: &DiamondChart,
    p: &EventCoords,
) -> Result<EventCoords, GeometryError> {
    p.expect(Frame::DiamondCoords)?;
    let wedge = p
        .region
        .and_then(Region::wedge)
        .ok_or(GeometryError::MissingRegion)?;
    let (eta, xi) = (p.c1, p.c2);
    let a = chart.accel;
    match wedge {
        // interior: V / alpha = tanh(v / alpha), the stable form
        Wedge::R => {
            let v = chart.alpha * ((eta + xi) / chart.alpha).tanh();
            let u = chart.alpha * ((eta - xi) / chart.alpha).tanh();
            let mut out = EventCoords::diamond(0.5 * (v + u), 0.5 * (v - u));
            out.region = Some(Region::D);
            Ok(out)
        }
        _ => {
            let plus = (a * (eta + xi)).exp();
            let minus = (a * (xi - eta)).exp();
            let (vt, ut) = match wedge {
                Wedge::L => (-plus, minus),
                Wedge::F => (plus, minus),
                Wedge::P => (-plus, -minus),
                Wedge::R => unreachable!(),
            };
            let (v, u) = lightcone_map_inverse(chart, vt * chart.alpha_tilde, ut * chart.alpha_tilde)?;
            let mut out = EventCoords::diamond(0.5 * (v + u), 0.5 * (v - u));
            out.region = Some(wedge.region());
            Ok(out)
        }
    }
}

/// Rindler-spacetime event with the given diamond coordinates, using the
/// general chart `t~ = kappa eps e^{a xi} sinh(a eta) / a` (roles of `t~`
/// and `x~` exchanged on the future and past wedges).
pub fn rindler_chart(chart: &DiamondChart, p: &EventCoords) -> Result<EventCoords, GeometryError> {
    p.expect(Frame::DiamondCoords)?;
    let wedge = p
        .region
        .and_then(Region::wedge)
        .ok_or(GeometryError::MissingRegion)?;
    let a = chart.accel;
    let scale = wedge.patch().sign() * chart.kappa / a * (a * p.c2).exp();
    let (s, c) = ((a * p.c1).sinh(), (a * p.c1).cosh());
    Ok(match wedge {
        Wedge::R | Wedge::L => EventCoords::rindler(scale * s, scale * c),
        Wedge::F | Wedge::P => EventCoords::rindler(scale * c, scale * s),
    })
}

/// Conformal factor `Omega = F_+(t~ / alpha~, x~ / alpha~)` at a
/// Rindler-spacetime event; the diamond metric is
/// `(lambda kappa / Omega)^2 e^{2 a xi} (-d eta^2 + d xi^2)`.
pub fn conformal_factor(chart: &DiamondChart, p: &EventCoords) -> Result<f64, GeometryError> {
    p.expect(Frame::MinkowskiRindler)?;
    let (vt, ut) = p.lightcone();
    let omega = (1.0 - ut / chart.alpha_tilde) * (1.0 + vt / chart.alpha_tilde);
    if omega.abs() < SINGULAR_TOLERANCE {
        return Err(GeometryError::SingularPoint { c1: p.c1, c2: p.c2 });
    }
    Ok(omega)
}
