//! Kummer's confluent hypergeometric function `M(a, b, z)`.
//!
//! Evaluated by its Maclaurin series. For imaginary `z` the terms grow to
//! roughly `e^{|z|}` before decaying while the sum stays O(1), so the f64
//! pass measures its own cancellation and hands over to a multiprecision
//! pass whenever too many bits were lost.

use super::SpecfunError;
use astro_float::{BigFloat, RoundingMode};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerParams {
    pub a: Complex64,
    pub b: Complex64,
    pub z: Complex64,
}

impl KummerParams {
    pub fn new(a: Complex64, b: Complex64, z: Complex64) -> Self {
        Self { a, b, z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerConfig {
    /// Largest `|z|` accepted.
    pub z_cap: f64,
    pub max_terms: usize,
    /// Bits of cancellation tolerated in the f64 pass before switching to
    /// extended precision.
    pub max_lost_bits: f64,
}

impl Default for KummerConfig {
    fn default() -> Self {
        Self {
            z_cap: 200.0,
            max_terms: 100_000,
            max_lost_bits: 10.0,
        }
    }
}

pub fn kummer_m(p: &KummerParams) -> Result<Complex64, SpecfunError> {
    kummer_m_with(p, &KummerConfig::default())
}

pub fn kummer_m_with(p: &KummerParams, cfg: &KummerConfig) -> Result<Complex64, SpecfunError> {
    let KummerParams { a, b, z } = *p;
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(SpecfunError::InvalidParameter("non-finite argument".into()));
    }
    if b.im == 0.0 && b.re <= 0.0 && b.re.fract() == 0.0 {
        return Err(SpecfunError::InvalidParameter(format!(
            "b = {b} is a nonpositive integer"
        )));
    }
    let z_abs = z.norm();
    if z_abs > cfg.z_cap {
        return Err(SpecfunError::DomainCap { z_abs, cap: cfg.z_cap });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let pass = series_f64(a, b, z, cfg.max_terms)?;
    let lost = if pass.sum.norm() > 0.0 {
        (pass.max_term / pass.sum.norm()).log2()
    } else {
        f64::INFINITY
    };
    if lost <= cfg.max_lost_bits {
        return Ok(pass.sum);
    }
    series_extended(a, b, z, pass.max_term, cfg.max_terms)
}

struct F64Pass {
    sum: Complex64,
    max_term: f64,
}

fn series_f64(a: Complex64, b: Complex64, z: Complex64, max_terms: usize) -> Result<F64Pass, SpecfunError> {
    let mut terms = Vec::with_capacity(64);
    let mut t = Complex64::new(1.0, 0.0);
    let mut running = t;
    let mut max_term = 1.0_f64;
    terms.push(t);
    for k in 0..max_terms {
        let kf = k as f64;
        t = t * (a + kf) * z / ((b + kf) * (kf + 1.0));
        if t.norm() == 0.0 {
            // a is a nonpositive integer: polynomial
            return Ok(F64Pass { sum: pairwise_sum(&terms), max_term });
        }
        terms.push(t);
        running += t;
        max_term = max_term.max(t.norm());
        let ratio = (a + kf + 1.0).norm() * z.norm() / ((b + kf + 1.0).norm() * (kf + 2.0));
        if ratio < 0.5 && t.norm() <= 1e-18 * running.norm().max(f64::MIN_POSITIVE) {
            return Ok(F64Pass { sum: pairwise_sum(&terms), max_term });
        }
        if !t.is_finite() {
            break;
        }
    }
    Err(SpecfunError::NonConvergence {
        estimate: running,
        error: t.norm(),
        evaluations: terms.len(),
    })
}

/// Recursive pairwise summation.
pub(crate) fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let (l, r) = xs.split_at(xs.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone)]
struct BigComplex {
    re: BigFloat,
    im: BigFloat,
}

impl BigComplex {
    fn from_c64(z: Complex64, p: usize) -> Self {
        Self {
            re: BigFloat::from_f64(z.re, p),
            im: BigFloat::from_f64(z.im, p),
        }
    }

    fn add(&self, o: &Self, p: usize) -> Self {
        Self {
            re: self.re.add(&o.re, p, RM),
            im: self.im.add(&o.im, p, RM),
        }
    }

    fn mul(&self, o: &Self, p: usize) -> Self {
        Self {
            re: self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM),
            im: self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM),
        }
    }

    fn div(&self, o: &Self, p: usize) -> Self {
        let den = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
        let conj = Self {
            re: o.re.clone(),
            im: o.im.neg(),
        };
        let num = self.mul(&conj, p);
        Self {
            re: num.re.div(&den, p, RM),
            im: num.im.div(&den, p, RM),
        }
    }

    /// Binary exponent of the larger component, `None` for zero.
    fn exponent(&self) -> Option<i64> {
        let e = |x: &BigFloat| if x.is_zero() { None } else { x.exponent().map(|e| e as i64) };
        match (e(&self.re), e(&self.im)) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        }
    }

    fn to_c64(&self) -> Complex64 {
        let f = |x: &BigFloat| format!("{x}").parse::<f64>().unwrap_or(f64::NAN);
        Complex64::new(f(&self.re), f(&self.im))
    }
}

fn series_extended(
    a: Complex64,
    b: Complex64,
    z: Complex64,
    max_term: f64,
    max_terms: usize,
) -> Result<Complex64, SpecfunError> {
    // Working precision: enough to absorb the largest term plus 96 guard bits;
    // raised once more if the result turns out smaller than expected.
    let mut guard_bits = max_term.log2().max(0.0).ceil() as usize;
    for _ in 0..4 {
        let p = (guard_bits + 96).div_ceil(64) * 64;
        let (sum, n_terms, last) = extended_pass(a, b, z, p, max_terms);
        let Some(sum) = sum else {
            return Err(SpecfunError::NonConvergence {
                estimate: Complex64::new(f64::NAN, f64::NAN),
                error: last,
                evaluations: n_terms,
            });
        };
        let value = sum.to_c64();
        let lost = (max_term / value.norm()).log2();
        if lost.is_finite() && (p as f64 - lost) >= 80.0 {
            return Ok(value);
        }
        guard_bits = if lost.is_finite() { lost.ceil() as usize + 32 } else { 2 * guard_bits + 64 };
    }
    Err(SpecfunError::NonConvergence {
        estimate: Complex64::new(f64::NAN, f64::NAN),
        error: f64::INFINITY,
        evaluations: 0,
    })
}

fn extended_pass(
    a: Complex64,
    b: Complex64,
    z: Complex64,
    p: usize,
    max_terms: usize,
) -> (Option<BigComplex>, usize, f64) {
    let one = BigComplex::from_c64(Complex64::new(1.0, 0.0), p);
    let ab = BigComplex::from_c64(a, p);
    let bb = BigComplex::from_c64(b, p);
    let zb = BigComplex::from_c64(z, p);
    let mut t = one.clone();
    let mut sum = one;
    for k in 0..max_terms {
        let kb = BigComplex::from_c64(Complex64::new(k as f64, 0.0), p);
        let k1 = BigComplex::from_c64(Complex64::new(k as f64 + 1.0, 0.0), p);
        let num = ab.add(&kb, p).mul(&zb, p);
        let den = bb.add(&kb, p).mul(&k1, p);
        t = t.mul(&num, p).div(&den, p);
        let Some(te) = t.exponent() else {
            return (Some(sum), k + 1, 0.0);
        };
        sum = sum.add(&t, p);
        let kf = k as f64 + 1.0;
        let ratio = (a + kf).norm() * z.norm() / ((b + kf).norm() * (kf + 1.0));
        if ratio < 0.5 {
            if let Some(se) = sum.exponent() {
                if te < se - p as i64 - 8 {
                    return (Some(sum), k + 1, 0.0);
                }
            }
        }
    }
    (None, max_terms, t.to_c64().norm())
}
