//! Closed forms for 2×2 matrices in the large-β approximation: eigenvalue
//! jpdfs and one-point densities of `T`, `S` and `T̃`, with Monte Carlo
//! validation against the samplers.
//!
//! With `s = (λ₁+λ₂)/2` and `Δ = λ₁ − λ₂` the jpdfs factorise:
//!
//! * `T`: `|Δ|^β e^{−|s|²} K₀(|Δ|²/4)`
//! * `S`: `|Δ|^β e^{−|s|² − |Δ|²/4}`
//! * `T̃`: `|Δ|^β e^{−|s|² − |Δ|⁴/32}`
//!
//! and are normalised here by one-dimensional quadrature in log space.

use crate::density::{ks_distance, EmpiricalCdf, Weighting};
use crate::ensembles::{EnsembleKind, TridiagMatrix};
use crate::quad::integrate;
use crate::randsrc::par_realizations;
use crate::specfun::{bessel_k0_scaled, gamma_ln, ln_pcf_d, pfq};
use crate::{Error, Result, C64};
use serde::Serialize;
use std::f64::consts::{LN_2, PI};
use std::sync::RwLock;

/// Below this β the large-β approximation is flagged.
pub const LOW_BETA: f64 = 10.0;

fn check_kind(kind: EnsembleKind) -> Result<()> {
    match kind {
        EnsembleKind::GeneralT | EnsembleKind::SymmetricS | EnsembleKind::NonsymmetricTtilde => Ok(()),
        other => Err(Error::Domain(format!("no n = 2 formulas for kind {}", other.tag()))),
    }
}

/// ln of the `|Δ|`-dependent factor of the jpdf (without `|Δ|^β`).
fn ln_delta_factor(kind: EnsembleKind, d: f64) -> f64 {
    match kind {
        EnsembleKind::GeneralT => {
            let x = 0.25 * d * d;
            if x == 0.0 {
                f64::INFINITY
            } else {
                bessel_k0_scaled(x).map(|v| v.ln() - x).unwrap_or(f64::NEG_INFINITY)
            }
        }
        EnsembleKind::SymmetricS => -0.25 * d * d,
        _ => -d.powi(4) / 32.0,
    }
}

/// Integrate `exp(g(x))` over `(0, ∞)` for a unimodal log-integrand, returning the log.
fn ln_integral_unimodal(g: impl Fn(f64) -> f64) -> Result<f64> {
    // Golden-section search for the peak on a log grid.
    let (mut a, mut b) = (-12.0f64, 8.0f64);
    let h = |u: f64| g(u.exp());
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if h(c) > h(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let peak_x = (0.5 * (a + b)).exp();
    let peak = g(peak_x);
    let mut hi = peak_x;
    while g(hi) - peak > -60.0 {
        hi = hi * 1.2 + 1e-3;
    }
    let mut lo = peak_x;
    while lo > 1e-300 && g(lo) - peak > -60.0 {
        lo *= 0.8;
    }
    let lo = if g(lo) - peak > -60.0 { 0.0 } else { lo };
    let q = integrate(|x| (g(x) - peak).exp(), lo, hi, 0.0, 1e-13)?;
    Ok(peak + q.value.ln())
}

/// ln of the jpdf normalisation constant: `−ln(π · 2π∫ρ^{β+1} f(ρ) dρ)`.
pub fn ln_jpdf_norm(kind: EnsembleKind, beta: f64) -> Result<f64> {
    check_kind(kind)?;
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    let ln_i = ln_integral_unimodal(|x| (beta + 1.0) * x.ln() + ln_delta_factor(kind, x))?;
    Ok(-(PI.ln() + (2.0 * PI).ln() + ln_i))
}

/// Normalised large-β eigenvalue jpdf of a 2×2 matrix of the given kind.
pub fn jpdf_n2(kind: EnsembleKind, l1: C64, l2: C64, beta: f64) -> Result<f64> {
    let c = ln_jpdf_norm(kind, beta)?;
    Ok(jpdf_n2_with_norm(kind, l1, l2, beta, c))
}

/// [`jpdf_n2`] with a precomputed log normalisation.
pub fn jpdf_n2_with_norm(kind: EnsembleKind, l1: C64, l2: C64, beta: f64, ln_norm: f64) -> f64 {
    let d = (l1 - l2).norm();
    if d == 0.0 {
        return 0.0;
    }
    let s = 0.5 * (l1 + l2);
    (ln_norm + beta * d.ln() - s.norm_sqr() + ln_delta_factor(kind, d)).exp()
}

/// One-point density of 2×2 matrices of one kind at one β.
#[derive(Debug)]
pub struct N2Density {
    pub kind: EnsembleKind,
    pub beta: f64,
    /// Log of the closed-form normalisation denominator (without π).
    pub ln_norm: f64,
    /// β below the range where the approximation is meaningful.
    pub low_beta_warning: bool,
    /// `T̃`: ln of `Γ(A+k) D_{−A−k}(1) / k!²`, extended on demand.
    coeffs: RwLock<Vec<f64>>,
}

impl N2Density {
    pub fn new(kind: EnsembleKind, beta: f64) -> Result<Self> {
        check_kind(kind)?;
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("β must be positive, got {beta}")));
        }
        let a = 1.0 + 0.5 * beta;
        let ln_norm = match kind {
            EnsembleKind::GeneralT => pfq(&[a, a], &[a + 0.5], 0.5)?.ln()?,
            EnsembleKind::SymmetricS => a * LN_2,
            _ => gamma_ln(a)? + ln_pcf_d(-a, 0.0)?,
        };
        Ok(Self { kind, beta, ln_norm, low_beta_warning: beta < LOW_BETA, coeffs: RwLock::new(Vec::new()) })
    }

    fn coeff(&self, k: usize) -> Result<f64> {
        if let Some(c) = self.coeffs.read().expect("cache lock").get(k) {
            return Ok(*c);
        }
        let mut w = self.coeffs.write().expect("cache lock");
        let a = 1.0 + 0.5 * self.beta;
        while w.len() <= k {
            let j = w.len() as f64;
            w.push(gamma_ln(a + j)? - 2.0 * gamma_ln(j + 1.0)? + ln_pcf_d(-a - j, 1.0)?);
        }
        Ok(w[k])
    }

    /// ln ρ at radius `r = |λ|`.
    pub fn ln_density(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
        }
        let a = 1.0 + 0.5 * self.beta;
        let x = 0.5 * r * r;
        let body = match self.kind {
            EnsembleKind::GeneralT => pfq(&[a, a], &[1.0, a + 0.5], x)?.ln()? - r * r,
            EnsembleKind::SymmetricS => pfq(&[a], &[1.0], x)?.ln()? - r * r,
            _ => self.ln_ttilde_series(r)? - r * r + 0.25,
        };
        Ok(body - PI.ln() - self.ln_norm)
    }

    /// `Σ_k Γ(A+k)/k!² r^{2k} D_{−A−k}(1)` in log form, truncated once the
    /// geometric tail bound drops below 1e−16 of the running sum.
    fn ln_ttilde_series(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return self.coeff(0);
        }
        let lr2 = 2.0 * r.ln();
        let mut terms = Vec::new();
        let mut max = f64::NEG_INFINITY;
        for k in 0..crate::specfun::TERM_BUDGET {
            let t = self.coeff(k)? + k as f64 * lr2;
            max = max.max(t);
            terms.push(t);
            if k >= 2 {
                let ratio = (t - terms[k - 1]).exp();
                let prev_ratio = (terms[k - 1] - terms[k - 2]).exp();
                if ratio < 0.5 && ratio <= prev_ratio {
                    let tail = (t - max).exp() * ratio / (1.0 - ratio);
                    let sum: f64 = terms.iter().map(|u| (u - max).exp()).sum();
                    if tail < 1e-16 * sum {
                        return Ok(max + sum.ln());
                    }
                }
            }
        }
        Err(Error::Accuracy(format!("parabolic-cylinder series exceeded its budget at r = {r}")))
    }

    /// ρ at radius `r`.
    pub fn density(&self, r: f64) -> Result<f64> {
        Ok(self.ln_density(r)?.exp())
    }

    /// Radius beyond which `2πrρ(r)` is negligible (< e^{−50} of its peak).
    pub fn effective_radius(&self) -> Result<f64> {
        let f = |r: f64| -> Result<f64> { Ok(r.ln() + self.ln_density(r)?) };
        let mut r = 0.25;
        let mut best = f(r)?;
        loop {
            r += 0.25;
            let v = f(r)?;
            best = best.max(v);
            if v < best - 50.0 {
                return Ok(r);
            }
            if r > 1e4 {
                return Err(Error::Accuracy("density does not decay".into()));
            }
        }
    }

    /// Total mass `∫2πrρ(r)dr` by quadrature.
    pub fn total_mass(&self) -> Result<f64> {
        let hi = self.effective_radius()?;
        let mut acc = 0.0;
        let panels = 64;
        for i in 0..panels {
            let (a, b) = (hi * i as f64 / panels as f64, hi * (i + 1) as f64 / panels as f64);
            acc += integrate(|r| 2.0 * PI * r * self.density(r).unwrap_or(f64::NAN), a, b, 0.0, 1e-12)?.value;
        }
        Ok(acc)
    }

    /// Radial CDF `P(|λ| ≤ r)` on a table of panels, for many evaluations.
    pub fn radial_cdf_table(&self, panels: usize) -> Result<RadialCdfTable> {
        let hi = self.effective_radius()?;
        let h = hi / panels as f64;
        let mut cum = vec![0.0];
        for i in 0..panels {
            let a = h * i as f64;
            let v = integrate(|r| 2.0 * PI * r * self.density(r).unwrap_or(f64::NAN), a, a + h, 0.0, 1e-12)?.value;
            cum.push(cum[i] + v);
        }
        Ok(RadialCdfTable { h, cum })
    }
}

/// Piecewise-exact radial CDF: tabulated panel masses plus an in-panel quadrature.
#[derive(Debug, Clone)]
pub struct RadialCdfTable {
    h: f64,
    cum: Vec<f64>,
}

impl RadialCdfTable {
    pub fn eval(&self, d: &N2Density, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let i = (r / self.h) as usize;
        if i + 1 >= self.cum.len() {
            return *self.cum.last().expect("nonempty");
        }
        let a = self.h * i as f64;
        let part = integrate(|s| 2.0 * PI * s * d.density(s).unwrap_or(f64::NAN), a, r, 0.0, 1e-10).map(|q| q.value).unwrap_or(f64::NAN);
        self.cum[i] + part
    }
}

/// Density of one kind at `λ` (depends on `|λ|` only).
pub fn density_n2(kind: EnsembleKind, lambda: C64, beta: f64) -> Result<f64> {
    N2Density::new(kind, beta)?.density(lambda.norm())
}

/// Eigenvalues of a 2×2 matrix.
pub fn eigenvalues_2x2(m: &TridiagMatrix) -> [C64; 2] {
    let half_tr = 0.5 * (m.diag[0] + m.diag[1]);
    let half_diff = 0.5 * (m.diag[0] - m.diag[1]);
    let root = (half_diff * half_diff + m.sub[0] * m.sup[0]).sqrt();
    [half_tr + root, half_tr - root]
}

/// Monte Carlo check of the radial law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct N2McReport {
    pub kind: String,
    pub beta: f64,
    pub m: usize,
    pub seed: u64,
    pub ks: f64,
    pub low_beta_warning: bool,
}

/// Sample `m` unscaled 2×2 matrices and compare the eigenvalue moduli with the
/// radial CDF of the closed-form density.
pub fn mc_validate_n2(kind: EnsembleKind, beta: f64, m: usize, seed: u64) -> Result<N2McReport> {
    let dens = N2Density::new(kind, beta)?;
    let r = sample_moduli_n2(kind, beta, m, seed)?;
    let table = dens.radial_cdf_table(400)?;
    let e = EmpiricalCdf::new(&r, Weighting::Unit)?;
    let ks = ks_distance(&e, |x| table.eval(&dens, x));
    Ok(N2McReport { kind: kind.tag().into(), beta, m, seed, ks, low_beta_warning: dens.low_beta_warning })
}

/// Eigenvalue moduli of `m` unscaled 2×2 samples (both eigenvalues of each).
pub fn sample_moduli_n2(kind: EnsembleKind, beta: f64, m: usize, seed: u64) -> Result<Vec<f64>> {
    let per: Vec<Result<[C64; 2]>> = par_realizations(seed, m, |mut s| Ok(eigenvalues_2x2(&kind.sample(2, beta, &mut s)?)));
    let mut r = Vec::with_capacity(2 * m);
    for p in per {
        let [a, b] = p?;
        r.push(a.norm());
        r.push(b.norm());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [EnsembleKind; 3] = [EnsembleKind::GeneralT, EnsembleKind::SymmetricS, EnsembleKind::NonsymmetricTtilde];

    #[test]
    fn jpdf_basics() {
        for kind in KINDS {
            let z = C64::new(0.3, -1.0);
            assert_eq!(jpdf_n2(kind, z, z, 20.0).unwrap(), 0.0);
            let (a, b) = (C64::new(1.0, 2.0), C64::new(-3.0, 0.5));
            let p = jpdf_n2(kind, a, b, 20.0).unwrap();
            assert!(p > 0.0 && p == jpdf_n2(kind, b, a, 20.0).unwrap());
        }
        // Near coincidence the |Δ|^β factor beats the K₀ logarithm.
        let p1 = jpdf_n2(EnsembleKind::GeneralT, C64::new(1e-3, 0.0), C64::new(0.0, 0.0), 20.0).unwrap();
        let p2 = jpdf_n2(EnsembleKind::GeneralT, C64::new(1e-6, 0.0), C64::new(0.0, 0.0), 20.0).unwrap();
        assert!(p2 < p1 && p1 < 1e-40);
        assert!(jpdf_n2(EnsembleKind::LowTempD, C64::new(1.0, 0.0), C64::new(0.0, 0.0), 20.0).is_err());
    }

    /// 4-D normalisation of the jpdf: ∫d²s e^{−|s|²} = π and a 2-D radial-angular
    /// quadrature for Δ.
    #[test]
    fn jpdf_normalised() {
        for kind in KINDS {
            let beta = 12.0;
            let c = ln_jpdf_norm(kind, beta).unwrap();
            let radial = integrate(|d| if d == 0.0 { 0.0 } else { (c + beta * d.ln() + ln_delta_factor(kind, d)).exp() * d }, 0.0, 40.0, 0.0, 1e-12).unwrap().value;
            assert!((PI * 2.0 * PI * radial - 1.0).abs() < 1e-9, "{kind:?}");
        }
    }

    #[test]
    fn s_density_at_origin() {
        for &beta in &[10.0, 100.0] {
            let d = N2Density::new(EnsembleKind::SymmetricS, beta).unwrap();
            let expect = 1.0 / (PI * 2f64.powf(beta / 2.0 + 1.0));
            assert!((d.density(0.0).unwrap() / expect - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn densities_are_normalised_and_rotation_invariant() {
        for kind in KINDS {
            for &beta in &[10.0, 100.0, 200.0] {
                let d = N2Density::new(kind, beta).unwrap();
                let mass = d.total_mass().unwrap();
                assert!((mass - 1.0).abs() < 1e-6, "{kind:?} β = {beta}: {mass}");
            }
            let z = C64::new(1.3, 0.4);
            let rot = z * C64::from_polar(1.0, 0.77);
            assert_eq!(density_n2(kind, z, 20.0).unwrap(), density_n2(kind, C64::new(z.norm(), 0.0), 20.0).unwrap());
            assert!((density_n2(kind, z, 20.0).unwrap() - density_n2(kind, rot, 20.0).unwrap()).abs() <= 1e-15 * density_n2(kind, z, 20.0).unwrap());
        }
        assert!(N2Density::new(EnsembleKind::SymmetricS, 2.0).unwrap().low_beta_warning);
    }

    /// The closed-form densities equal the one-point marginals of the jpdfs:
    /// ρ(λ) = ∫ P(λ, λ−Δ) d²Δ, by radial quadrature and a periodic trapezoid in arg Δ.
    #[test]
    fn densities_are_jpdf_marginals() {
        let beta = 12.0;
        for kind in KINDS {
            let c = ln_jpdf_norm(kind, beta).unwrap();
            let d = N2Density::new(kind, beta).unwrap();
            for &r in &[0.0, 1.0, 2.5] {
                let lam = C64::new(r, 0.0);
                let nphi = 96;
                let inner = |rho: f64| {
                    if rho == 0.0 {
                        return 0.0;
                    }
                    let mut acc = 0.0;
                    for k in 0..nphi {
                        let delta = C64::from_polar(rho, 2.0 * PI * k as f64 / nphi as f64);
                        acc += jpdf_n2_with_norm(kind, lam, lam - delta, beta, c);
                    }
                    acc * 2.0 * PI / nphi as f64 * rho
                };
                let marg = integrate(inner, 0.0, 30.0, 0.0, 1e-11).unwrap().value;
                let closed = d.density(r).unwrap();
                assert!((marg / closed - 1.0).abs() < 1e-6, "{kind:?} r = {r}: {marg} vs {closed}");
            }
        }
    }

    #[test]
    fn ttilde_peak_moves_out() {
        let d = N2Density::new(EnsembleKind::NonsymmetricTtilde, 1000.0).unwrap();
        let rs: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let v: Vec<f64> = rs.iter().map(|r| r * d.density(*r).unwrap()).collect();
        let imax = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        assert!(rs[imax] > 1.0);
        // Single peak: increasing before, decreasing after.
        assert!(v[..imax].windows(2).all(|w| w[1] >= w[0]));
        assert!(v[imax..].windows(2).all(|w| w[1] <= w[0]));
    }
}
