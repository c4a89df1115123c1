//! Adaptive Gauss–Kronrod quadrature for complex integrands, plus the two
//! oscillatory front ends built on it.

use super::SpecfunError;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub lo: f64,
    pub hi: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Dominant angular frequency of the integrand; sets the initial panel
    /// count.
    pub oscillation_hint: f64,
}

impl QuadratureSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            rel_tol: 1e-10,
            max_subdivisions: 5000,
            oscillation_hint: 1.0,
        }
    }

    pub fn rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn oscillation_hint(mut self, k: f64) -> Self {
        self.oscillation_hint = k;
        self
    }

    fn validate(&self) -> Result<(), SpecfunError> {
        if !(self.lo < self.hi && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(SpecfunError::InvalidParameter(format!(
                "interval ({}, {}) is not a finite, nonempty interval",
                self.lo, self.hi
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(SpecfunError::InvalidParameter(format!("rel_tol = {}", self.rel_tol)));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Segment {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        kron += (f1 + f2) * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Segment {
        lo,
        hi,
        value: kron * h,
        error: ((kron - gauss) * h).norm(),
        abs: abs * h.abs(),
    }
}

/// Globally adaptive G7–K15 quadrature of `f` over `[lo, hi]`.
///
/// Stops when the summed error estimate falls below
/// `max(rel_tol * |I|, abs_tol)`; the interval is first split into
/// `initial_panels` equal pieces.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
    initial_panels: usize,
) -> Result<QuadResult, SpecfunError> {
    let panels = initial_panels.max(1);
    let width = (hi - lo) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(panels * 2);
    for i in 0..panels {
        let a = lo + width * i as f64;
        let b = if i + 1 == panels { hi } else { a + width };
        heap.push(gk15(&f, a, b));
    }
    let mut evaluations = 15 * panels;
    let mut subdivisions = panels;
    loop {
        let (value, error, abs) = totals(&heap);
        let tol = (rel_tol * value.norm()).max(abs_tol).max(50.0 * f64::EPSILON * abs);
        if error <= tol || !error.is_finite() {
            if !value.is_finite() {
                return Err(SpecfunError::NonConvergence { estimate: value, error, evaluations });
            }
            return Ok(QuadResult { value, error, evaluations });
        }
        if subdivisions >= max_subdivisions.max(panels) {
            return Err(SpecfunError::NonConvergence { estimate: value, error, evaluations });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // cannot bisect further in f64
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        heap.push(gk15(&f, worst.lo, mid));
        heap.push(gk15(&f, mid, worst.hi));
        evaluations += 30;
        subdivisions += 1;
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (Complex64, f64, f64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut abs = 0.0;
    for s in heap.iter() {
        // Kahan summation keeps many small panels from drifting
        let y = s.value - comp;
        let t = value + y;
        comp = (t - value) - y;
        value = t;
        error += s.error;
        abs += s.abs;
    }
    (value, error, abs)
}

/// Integral of `f` over a finite interval with possibly oscillatory,
/// unit-modulus endpoint behaviour.
///
/// Substitutes `u = c + h tanh(s)`, which turns `(1 ± u)^{iw}` factors into
/// plane waves in `s` damped by `sech^2 s`, and truncates the `s` range where
/// that envelope drops below `rel_tol / 10`.
pub fn oscillatory_integral<F: Fn(f64) -> Complex64>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<QuadResult, SpecfunError> {
    spec.validate()?;
    let c = 0.5 * (spec.lo + spec.hi);
    let h = 0.5 * (spec.hi - spec.lo);
    let s_max = 0.5 * (40.0 / spec.rel_tol).ln();
    let g = |s: f64| {
        let sech = 1.0 / s.cosh();
        f(c + h * s.tanh()) * (h * sech * sech)
    };
    let hint = spec.oscillation_hint.abs() * h;
    let panels = ((2.0 * s_max * (1.0 + hint) / std::f64::consts::PI).ceil() as usize).clamp(4, 4000);
    let mut res = integrate_adaptive(g, -s_max, s_max, spec.rel_tol, 0.0, spec.max_subdivisions, panels)?;
    // the cut tails: sech^2 decays like e^{-2s}, so each is about |g(edge)| / 2
    res.error += 0.5 * (g(s_max).norm() + g(-s_max).norm());
    res.evaluations += 2;
    Ok(res)
}

/// Abel-regularised Fourier tail `∫_lo^∞ g(v) e^{i kappa v} dv` for `g`
/// decaying to zero (possibly only like `1/v`).
///
/// Integrates half-period cycles and accelerates the partial sums with the
/// Wynn epsilon algorithm.
pub fn fourier_tail<G: Fn(f64) -> Complex64>(
    g: G,
    lo: f64,
    kappa: f64,
    rel_tol: f64,
    max_cycles: usize,
) -> Result<QuadResult, SpecfunError> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(SpecfunError::InvalidParameter(format!("kappa = {kappa}")));
    }
    let width = std::f64::consts::PI / kappa.abs();
    let integrand = |v: f64| g(v) * Complex64::new(0.0, kappa * v).exp();
    let mut partial = Vec::with_capacity(64);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut evaluations = 0;
    let mut last_est: Option<Complex64> = None;
    let mut settled = 0;
    for j in 0..max_cycles {
        let a = lo + width * j as f64;
        let piece = integrate_adaptive(integrand, a, a + width, 1e-13, 1e-16, 200, 1)?;
        evaluations += piece.evaluations;
        sum += piece.value;
        partial.push(sum);
        if partial.len() < 8 {
            continue;
        }
        let window = &partial[partial.len().saturating_sub(40)..];
        let (est, err) = wynn_epsilon(window);
        if let Some(prev) = last_est {
            let delta = (est - prev).norm().max(err);
            if delta <= rel_tol * est.norm().max(1e-300) {
                settled += 1;
                if settled >= 2 {
                    return Ok(QuadResult { value: est, error: delta, evaluations });
                }
            } else {
                settled = 0;
            }
        }
        last_est = Some(est);
    }
    Err(SpecfunError::NonConvergence {
        estimate: last_est.unwrap_or(sum),
        error: f64::INFINITY,
        evaluations,
    })
}

/// Wynn epsilon extrapolation of a sequence of partial sums; returns the
/// estimate from the highest even column and the gap to its neighbour.
pub fn wynn_epsilon(seq: &[Complex64]) -> (Complex64, f64) {
    let n = seq.len();
    match n {
        0 => return (Complex64::new(0.0, 0.0), f64::INFINITY),
        1 => return (seq[0], f64::INFINITY),
        _ => {}
    }
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = seq.to_vec();
    let mut best = (seq[n - 1], (seq[n - 1] - seq[n - 2]).norm());
    let mut k = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 {
                // exact convergence in this column
                return if k % 2 == 0 { (cur[i + 1], 0.0) } else { best };
            }
            next.push(prev[i + 1] + d.inv());
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 && cur.len() >= 2 {
            let last = cur[cur.len() - 1];
            best = (last, (last - cur[cur.len() - 2]).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plane_wave_on_unit_interval() {
        let k = 3.0;
        let exact = (c(0.0, k).exp() - 1.0) / c(0.0, k);
        let spec = QuadratureSpec::new(0.0, 1.0).oscillation_hint(k);
        let r = oscillatory_integral(|u| c(0.0, k * u).exp(), &spec).unwrap();
        assert!((r.value - exact).norm() < 1e-10 * exact.norm());
        let r = integrate_adaptive(|u| c(0.0, k * u).exp(), 0.0, 1.0, 1e-12, 0.0, 100, 1).unwrap();
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn zero_integrand() {
        let r = oscillatory_integral(|_| c(0.0, 0.0), &QuadratureSpec::new(-1.0, 1.0)).unwrap();
        assert_eq!(r.value, c(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(oscillatory_integral(|_| c(1.0, 0.0), &QuadratureSpec::new(1.0, 0.0)).is_err());
        assert!(oscillatory_integral(|_| c(1.0, 0.0), &QuadratureSpec::new(0.0, 1.0).rel_tol(0.0)).is_err());
    }

    #[test]
    fn log_oscillatory_endpoints() {
        // ∫_{-1}^{1} ((1+u)/(1-u))^{iw} du = 2 pi w / sinh(pi w)
        let w = 0.7;
        let f = |u: f64| c(0.0, w * ((1.0 + u) / (1.0 - u)).ln()).exp();
        let r = oscillatory_integral(f, &QuadratureSpec::new(-1.0, 1.0).rel_tol(1e-11)).unwrap();
        let exact = 2.0 * std::f64::consts::PI * w / (std::f64::consts::PI * w).sinh();
        assert!((r.value - exact).norm() < 1e-9, "{} vs {exact}", r.value);
    }

    #[test]
    fn reports_nonconvergence() {
        let f = |u: f64| c(1.0 / u.abs().sqrt().max(1e-300), 0.0);
        let err = integrate_adaptive(f, -1.0, 1.0, 1e-14, 0.0, 10, 1).unwrap_err();
        assert!(matches!(err, SpecfunError::NonConvergence { .. }));
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = c(0.0, 0.0);
        let seq: Vec<Complex64> = (1..=20)
            .map(|k| {
                s += c(if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64, 0.0);
                s
            })
            .collect();
        let (est, _) = wynn_epsilon(&seq);
        assert!((est.re - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fourier_tail_of_reciprocal() {
        // ∫_1^∞ e^{iv}/v dv = -Ci(1) + i (pi/2 - Si(1))
        let ci1 = 0.33740392290096813466;
        let si1 = 0.94608307036718301494;
        let r = fourier_tail(|v| c(1.0 / v, 0.0), 1.0, 1.0, 1e-12, 500).unwrap();
        let exact = c(-ci1, std::f64::consts::FRAC_PI_2 - si1);
        assert!((r.value - exact).norm() < 1e-10, "{}", r.value);
    }
}
