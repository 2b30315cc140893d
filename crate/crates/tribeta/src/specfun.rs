//! Special functions: Γ, ln Γ, Pochhammer symbols, K₀, hypergeometric series
//! and the parabolic cylinder function D_ν for non-positive orders.
//!
//! All series use Neumaier-compensated summation with a term budget of
//! [`TERM_BUDGET`] and carry an explicit error estimate. Series whose terms
//! exceed the floating-point range are evaluated in scaled form
//! ([`ScaledSum`]), which is what the large-β densities need.

use crate::quad;
use crate::{Error, Result};

/// Maximum number of series terms before an accuracy error is raised.
pub const TERM_BUDGET: usize = 10_000;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A scalar result with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunResult {
    pub value: f64,
    pub est_error: f64,
    pub terms_used: usize,
}

/// A series sum represented as `mantissa · exp(ln_scale)`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSum {
    pub mantissa: f64,
    pub ln_scale: f64,
    /// Relative error estimate of the sum.
    pub rel_error: f64,
    pub terms_used: usize,
}

impl ScaledSum {
    /// Natural log of the (positive) sum.
    pub fn ln(&self) -> Result<f64> {
        if self.mantissa <= 0.0 {
            return Err(Error::Domain("logarithm of a non-positive series sum".into()));
        }
        Ok(self.mantissa.ln() + self.ln_scale)
    }

    /// The sum as a plain float; errors if it overflows.
    pub fn value(&self) -> Result<SpecFunResult> {
        let v = self.mantissa * self.ln_scale.exp();
        if !v.is_finite() {
            return Err(Error::Accuracy("series value outside the floating-point range".into()));
        }
        Ok(SpecFunResult { value: v, est_error: v.abs() * self.rel_error, terms_used: self.terms_used })
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// ln Γ(x) for x > 0.
pub fn gamma_ln(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_ln requires x > 0, got {x}")));
    }
    if x == x.round() && x <= 30.0 {
        let mut f = 1.0f64;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return Ok(f.ln());
    }
    let mut y = x;
    let mut prod = 1.0f64;
    while y < 15.0 {
        prod *= y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    let half_ln_2pi = 0.918_938_533_204_672_8;
    Ok((y - 0.5) * y.ln() - y + half_ln_2pi + corr - prod.ln())
}

/// Γ(x) for 0 < x ≤ 171.
pub fn gamma(x: f64) -> Result<f64> {
    if x > 171.6 {
        return Err(Error::Domain(format!("gamma overflows for x = {x}")));
    }
    Ok(gamma_ln(x)?.exp())
}

/// Pochhammer symbol (a)_k = a(a+1)…(a+k−1).
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}

/// Modified Bessel function K₀(x), x > 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if x <= 2.0 {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("bessel_k0 requires x > 0, got {x}")));
        }
        Ok(k0_series(x))
    } else {
        Ok(bessel_k0_scaled(x)? * (-x).exp())
    }
}

/// e^x·K₀(x), x > 0; finite for arbitrarily large x.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k0_scaled requires x > 0, got {x}")));
    }
    if x <= 2.0 {
        return Ok(k0_series(x) * x.exp());
    }
    // e^x K₀(x) = ∫₀^∞ exp(−x(cosh t − 1)) dt; the trapezoid rule converges
    // geometrically for this entire, doubly-exponentially decaying integrand.
    let h = 0.05;
    let mut sum = KahanSum::default();
    sum.add(0.5);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let v = (-x * (t.cosh() - 1.0)).exp();
        sum.add(v);
        if v < 1e-18 {
            break;
        }
        k += 1;
    }
    Ok(sum.total() * h)
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = KahanSum::default();
    let mut tail = KahanSum::default();
    i0.add(1.0);
    let mut harmonic = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0.add(term);
        tail.add(term * harmonic);
        if term < 1e-18 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0.total() + tail.total()
}

/// Generalised hypergeometric series pFq(a; b; x) with a term budget.
///
/// Terminates exactly when some `a_i` is a non-positive integer.
pub fn pfq_with_budget(a: &[f64], b: &[f64], x: f64, budget: usize) -> Result<ScaledSum> {
    if let Some(bad) = b.iter().find(|&&bj| is_nonpositive_integer(bj)) {
        return Err(Error::Domain(format!("lower parameter {bad} is a non-positive integer")));
    }
    let mut sum = KahanSum::default();
    let mut abs_sum = 1.0f64;
    sum.add(1.0);
    let mut term = 1.0f64;
    let mut ln_scale = 0.0;
    const RESCALE: f64 = 1e200;
    let ln_rescale = RESCALE.ln();
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let mut ratio = x / (kf + 1.0);
        for &ai in a {
            ratio *= ai + kf;
        }
        for &bj in b {
            ratio /= bj + kf;
        }
        term *= ratio;
        k += 1;
        if term == 0.0 {
            return Ok(ScaledSum {
                mantissa: sum.total(),
                ln_scale,
                rel_error: 4.0 * f64::EPSILON * abs_sum / sum.total().abs().max(f64::MIN_POSITIVE),
                terms_used: k,
            });
        }
        sum.add(term);
        abs_sum += term.abs();
        if sum.total().abs() > RESCALE {
            sum.scale(1.0 / RESCALE);
            term /= RESCALE;
            abs_sum /= RESCALE;
            ln_scale += ln_rescale;
        }
        // Ratio of the next term; once it is below one and non-increasing,
        // the remaining tail is bounded by a geometric series.
        let kf = k as f64;
        let mut next = (x / (kf + 1.0)).abs();
        for &ai in a {
            next *= (ai + kf).abs();
        }
        for &bj in b {
            next /= (bj + kf).abs();
        }
        let total = sum.total().abs();
        if next < 1.0 && kf > x.abs() {
            let tail = term.abs() * next / (1.0 - next);
            if tail <= f64::EPSILON * total {
                let rel = tail / total + 4.0 * f64::EPSILON * abs_sum / total;
                return Ok(ScaledSum { mantissa: sum.total(), ln_scale, rel_error: rel, terms_used: k + 1 });
            }
        }
        if k >= budget {
            return Err(Error::Accuracy(format!("hypergeometric series exceeded {budget} terms at x = {x}")));
        }
    }
}

/// Generalised hypergeometric series with the default budget.
pub fn pfq(a: &[f64], b: &[f64], x: f64) -> Result<ScaledSum> {
    pfq_with_budget(a, b, x, TERM_BUDGET)
}

/// Kummer's function M(a, b, x) = ₁F₁(a; b; x).
pub fn hyp1f1(a: f64, b: f64, x: f64) -> Result<SpecFunResult> {
    pfq(&[a], &[b], x)?.value()
}

/// ₂F₁(a, b; c; x) for |x| < 1 by direct series.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<SpecFunResult> {
    if x.abs() >= 1.0 {
        return Err(Error::Domain(format!("hyp2f1 series requires |x| < 1, got {x}")));
    }
    pfq(&[a, b], &[c], x)?.value()
}

/// The terminating ₂F₁(−n, b; c; x): an exact (n+1)-term sum.
pub fn hyp2f1_terminating(n: u32, b: f64, c: f64, x: f64) -> Result<SpecFunResult> {
    if is_nonpositive_integer(c) && c > -(n as f64) {
        return Err(Error::Domain(format!("lower parameter {c} vanishes inside the sum")));
    }
    let mut sum = KahanSum::default();
    let mut abs_sum = 0.0;
    let mut term = 1.0;
    for k in 0..=n {
        if k > 0 {
            let kf = (k - 1) as f64;
            term *= (kf - n as f64) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        }
        sum.add(term);
        abs_sum += term.abs();
    }
    Ok(SpecFunResult { value: sum.total(), est_error: 4.0 * f64::EPSILON * abs_sum, terms_used: n as usize + 1 })
}

/// ₂F₂(a₁, a₂; b₁, b₂; x).
pub fn hyp2f2(a1: f64, a2: f64, b1: f64, b2: f64, x: f64) -> Result<SpecFunResult> {
    pfq(&[a1, a2], &[b1, b2], x)?.value()
}

/// Parabolic cylinder function D_ν(x) for ν ≤ 0.
pub fn pcf_d(nu: f64, x: f64) -> Result<SpecFunResult> {
    let (ln_abs, err_rel) = ln_pcf_d_impl(nu, x)?;
    let v = ln_abs.exp();
    Ok(SpecFunResult { value: v, est_error: v * err_rel, terms_used: 1 })
}

/// ln D_ν(x) for ν ≤ 0 (where D_ν(x) > 0 for the supported x ≥ 0 range).
pub fn ln_pcf_d(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_pcf_d_impl(nu, x)?.0)
}

fn ln_pcf_d_impl(nu: f64, x: f64) -> Result<(f64, f64)> {
    if nu > 0.0 {
        return Err(Error::Domain(format!("pcf_d supports only non-positive orders, got ν = {nu}")));
    }
    if nu == 0.0 {
        return Ok((-0.25 * x * x, f64::EPSILON));
    }
    if x == 0.0 {
        // D_ν(0) = 2^{ν/2} √π / Γ((1−ν)/2)
        let v = 0.5 * nu * std::f64::consts::LN_2 + 0.5 * std::f64::consts::PI.ln() - gamma_ln(0.5 * (1.0 - nu))?;
        return Ok((v, 1e-14));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("pcf_d supports x ≥ 0 only, got {x}")));
    }
    // D_ν(x) = e^{−x²/4}/Γ(−ν) ∫₀^∞ t^{−ν−1} e^{−t²/2 − x t} dt, evaluated
    // relative to the peak of the integrand to stay in range for large |ν|.
    let mu = -nu - 1.0;
    let (t_star, peak) = if mu > 0.0 {
        let t = 0.5 * (-x + (x * x + 4.0 * mu).sqrt());
        (t, mu * t.ln() - 0.5 * t * t - x * t)
    } else {
        (0.0, 0.0)
    };
    let f = |t: f64| {
        if t <= 0.0 {
            return if mu == 0.0 { (-peak).exp() } else { 0.0 };
        }
        (mu * t.ln() - 0.5 * t * t - x * t - peak).exp()
    };
    let q = if mu >= 0.0 {
        quad::integrate(f, 0.0, t_star + 14.0, 0.0, 1e-13)?
    } else {
        quad::exp_sinh(f, 1e-12)?
    };
    let ln_v = -0.25 * x * x - gamma_ln(-nu)? + peak + q.value.ln();
    Ok((ln_v, q.est_error / q.value + 1e-13))
}
