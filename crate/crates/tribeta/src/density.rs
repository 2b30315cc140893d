//! Limiting eigenvalue density of the scaled ensembles, radial statistics and
//! Kolmogorov–Smirnov distances.
//!
//! The limiting density is rotation invariant and supported on the disc of
//! radius `r₀ = √(2/e)`:
//! `ρ(z) = (e/2π)(ln 2 − 1 − ln|z|²)`.
//!
//! Radial CDFs come in two normalisations: the *area* CDF `∫₀^r 2πsρ(s)ds`
//! (the distribution of `|λ|`) and the *flat* CDF `∫₀^r ρ(s)ds / ∫₀^{r₀} ρ`,
//! where the radial profile is integrated against `dr`. The KS statistics of
//! this crate use the flat convention; the matching empirical CDF weights each
//! modulus by `1/r`.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, LN_2, PI};

/// Radius `√(2/e)` of the support.
pub fn support_radius() -> f64 {
    (2.0 / E).sqrt()
}

/// The limiting density at `z`.
pub fn limiting_density(z: C64) -> f64 {
    radial_density(z.norm())
}

/// The limiting density as a function of `r = |z|`.
pub fn radial_density(r: f64) -> f64 {
    if r >= support_radius() {
        return 0.0;
    }
    E / (2.0 * PI) * (LN_2 - 1.0 - 2.0 * r.ln())
}

/// Radial moment `m_k = (2/e)^k / (2π(k+1)²)`, i.e. `∫₀^{r₀} r^{2k+1}ρ(r)dr`.
pub fn radial_moment(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("radial moments are defined for k ≥ 1".into()));
    }
    let kf = k as f64;
    Ok((2.0 / E).powf(kf) / (2.0 * PI * (kf + 1.0) * (kf + 1.0)))
}

/// Flat-measure radial CDF `r(ln2 + 1 − 2 ln r)/(2r₀)`, clipped to `[0, 1]`.
pub fn limiting_flat_cdf(r: f64) -> f64 {
    let r0 = support_radius();
    if r <= 0.0 {
        0.0
    } else if r >= r0 {
        1.0
    } else {
        r * (LN_2 + 1.0 - 2.0 * r.ln()) / (2.0 * r0)
    }
}

/// Area-measure radial CDF `P(|λ| ≤ r) = (e r²/2)(ln 2 − 2 ln r)`.
pub fn limiting_area_cdf(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else if r >= support_radius() {
        1.0
    } else {
        0.5 * E * r * r * (LN_2 - 2.0 * r.ln())
    }
}

/// Inverse of a continuous nondecreasing CDF on `[0, hi]` by bisection.
pub fn invert_cdf(cdf: impl Fn(f64) -> f64, u: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi.max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Flat CDF of the circular law (uniform on the unit disc): `F(r) = r`.
pub fn ginibre_flat_cdf(r: f64) -> f64 {
    r.clamp(0.0, 1.0)
}

/// Area CDF of the circular law: `F(r) = r²`.
pub fn ginibre_area_cdf(r: f64) -> f64 {
    (r * r).clamp(0.0, 1.0)
}

/// Point weighting of an empirical radial CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Every modulus counts once (distribution of `|λ|`).
    Unit,
    /// Modulus `r` counts `1/r` (flat radial measure).
    Flat,
}

/// Weighted empirical CDF of radial values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    /// Ascending sample values.
    pub values: Vec<f64>,
    /// `cum[i]` = CDF value just after `values[i]`.
    pub cum: Vec<f64>,
    pub weighting: Weighting,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64], weighting: Weighting) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("empirical CDF of an empty sample".into()));
        }
        if samples.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Domain("radial samples must be finite and nonnegative".into()));
        }
        let mut values = samples.to_vec();
        values.sort_by(f64::total_cmp);
        let w: Vec<f64> = match weighting {
            Weighting::Unit => vec![1.0; values.len()],
            Weighting::Flat => {
                if values[0] == 0.0 {
                    return Err(Error::Domain("flat weighting needs strictly positive moduli".into()));
                }
                values.iter().map(|r| 1.0 / r).collect()
            }
        };
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let cum = w
            .iter()
            .map(|x| {
                acc += x;
                acc / total
            })
            .collect();
        Ok(Self { values, cum, weighting })
    }

    /// Unit-weighted CDF of the moduli of `z`.
    pub fn from_moduli(z: &[C64], weighting: Weighting) -> Result<Self> {
        let r: Vec<f64> = z.iter().map(|x| x.norm()).collect();
        Self::new(&r, weighting)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `G(x)`: mass at or below `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|v| *v <= x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }
}

/// `sup_x |F(x) − G(x)|`, evaluated on both sides of every step of `G`.
pub fn ks_distance(e: &EmpiricalCdf, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut d: f64 = 0.0;
    let mut prev = 0.0;
    for (x, c) in e.values.iter().zip(&e.cum) {
        let f = cdf(*x);
        d = d.max((f - prev).abs()).max((f - c).abs());
        prev = *c;
    }
    d
}

/// Two-sample distance `sup_x |G_a(x) − G_b(x)|`.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let mut d: f64 = 0.0;
    for x in a.values.iter().chain(&b.values) {
        d = d.max((a.eval(*x) - b.eval(*x)).abs());
    }
    d
}

/// Fraction of points with `|z| < r`.
pub fn fraction_below(z: &[C64], r: f64) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    z.iter().filter(|x| x.norm() < r).count() as f64 / z.len() as f64
}

/// Histogram normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistMode {
    /// `counts/(N·width)`: a density in `r` integrating to one.
    Flat,
    /// Additionally divided by `2πr`: comparable with `ρ(z)` itself.
    Area,
}

/// Histogram of radial values on equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Samples beyond the last edge.
    pub overflow: u64,
    pub total: u64,
    pub mode: HistMode,
}

impl RadialHistogram {
    /// `bins` equal bins on `[0, r_max]`.
    pub fn new(moduli: &[f64], bins: usize, r_max: f64, mode: HistMode) -> Result<Self> {
        if bins == 0 || !(r_max > 0.0) {
            return Err(Error::Domain(format!("histogram needs bins ≥ 1 and r_max > 0, got {bins}, {r_max}")));
        }
        let w = r_max / bins as f64;
        let edges = (0..=bins).map(|i| i as f64 * w).collect();
        let mut counts = vec![0u64; bins];
        let mut overflow = 0;
        for &r in moduli {
            let k = (r / w) as usize;
            if r > r_max || k > bins {
                overflow += 1;
            } else {
                counts[k.min(bins - 1)] += 1;
            }
        }
        Ok(Self { edges, counts, overflow, total: moduli.len() as u64, mode })
    }

    /// The default layout: 100 bins on `[0, 1.05·r₀]`.
    pub fn standard(moduli: &[f64], mode: HistMode) -> Result<Self> {
        Self::new(moduli, 100, 1.05 * support_radius(), mode)
    }

    pub fn centres(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Normalised bin heights.
    pub fn heights(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(e, c)| {
                let flat = *c as f64 / (n * (e[1] - e[0]));
                match self.mode {
                    HistMode::Flat => flat,
                    HistMode::Area => flat / (PI * (e[0] + e[1])),
                }
            })
            .collect()
    }

    /// Analytic comparison curve at the bin centres for the same mode.
    pub fn limiting_curve(&self) -> Vec<f64> {
        self.centres()
            .iter()
            .map(|r| match self.mode {
                HistMode::Flat => 2.0 * PI * r * radial_density(*r),
                HistMode::Area => radial_density(*r),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use crate::randsrc::RngStream;
    use proptest::prelude::*;

    #[test]
    fn support_and_values() {
        let r0 = support_radius();
        assert!((r0 - 0.857_763_885_0).abs() < 1e-10);
        assert_eq!(radial_density(r0), 0.0);
        assert!(radial_density(0.999 * r0) > 0.0);
        assert!((limiting_density(C64::new(0.5, 0.0)) - 0.466_996_624_193).abs() < 1e-11);
        assert!((limiting_density(C64::new(0.5, 0.0)) / 0.4671 - 1.0).abs() < 5e-4);
        // ≈ −0.133 − 0.433 ln|z|²
        let z = C64::new(0.3, 0.2);
        let approx = -0.133 - 0.433 * z.norm_sqr().ln();
        assert!((limiting_density(z) - approx).abs() < 2e-3);
        assert_eq!(limiting_density(C64::new(1.0, 0.0)), 0.0);
    }

    #[test]
    fn normalisation_and_moments() {
        let r0 = support_radius();
        let mass = integrate(|r| 2.0 * PI * r * radial_density(r), 0.0, r0, 1e-14, 1e-13).unwrap().value;
        assert!((mass - 1.0).abs() < 1e-10);
        assert!((radial_moment(1).unwrap() - 0.029_274_915_762).abs() < 1e-12);
        assert!((radial_moment(2).unwrap() - 0.009_573_013_023).abs() < 1e-12);
        assert!((radial_moment(1).unwrap() / 0.029_277 - 1.0).abs() < 1e-4);
        for k in 1..=10 {
            let q = integrate(|r| r.powi(2 * k as i32 + 1) * radial_density(r), 0.0, r0, 1e-15, 1e-13).unwrap().value;
            assert!((q - radial_moment(k).unwrap()).abs() < 1e-10 * q, "k = {k}");
        }
        assert!(radial_moment(0).is_err());
    }

    #[test]
    fn cdfs() {
        let r0 = support_radius();
        assert_eq!(limiting_flat_cdf(0.0), 0.0);
        assert!((limiting_flat_cdf(r0 * (1.0 - 1e-15)) - 1.0).abs() < 1e-12);
        let norm = integrate(radial_density, 0.0, r0, 1e-15, 1e-13).unwrap().value;
        for &r in &[r0 / 2.0, 0.1, 0.7] {
            let q = integrate(radial_density, 0.0, r, 1e-15, 1e-13).unwrap().value / norm;
            assert!((limiting_flat_cdf(r) - q).abs() < 1e-10);
            let a = integrate(|s| 2.0 * PI * s * radial_density(s), 0.0, r, 1e-15, 1e-13).unwrap().value;
            assert!((limiting_area_cdf(r) - a).abs() < 1e-10);
        }
    }

    #[test]
    fn ks_basics() {
        let e = EmpiricalCdf::new(&[0.5], Weighting::Unit).unwrap();
        assert_eq!(ks_distance(&e, |x| x.clamp(0.0, 1.0)), 0.5);
        let mut s = RngStream::new(7, 0);
        let n = 100_000;
        let sample: Vec<f64> = (0..n).map(|_| invert_cdf(limiting_flat_cdf, s.uniform01(), support_radius())).collect();
        let e = EmpiricalCdf::new(&sample, Weighting::Unit).unwrap();
        assert!(ks_distance(&e, limiting_flat_cdf) < 0.007);
        // Moduli drawn from the area law, reweighted by 1/r, follow the flat law.
        let moduli: Vec<f64> = (0..n).map(|_| invert_cdf(limiting_area_cdf, s.uniform01(), support_radius())).collect();
        let flat = EmpiricalCdf::new(&moduli, Weighting::Flat).unwrap();
        assert!(ks_distance(&flat, limiting_flat_cdf) < 0.02);
        assert!(EmpiricalCdf::new(&[], Weighting::Unit).is_err());
        assert!(EmpiricalCdf::new(&[0.0, 1.0], Weighting::Flat).is_err());
        let a = EmpiricalCdf::new(&[0.1, 0.2], Weighting::Unit).unwrap();
        let b = EmpiricalCdf::new(&[0.3, 0.4], Weighting::Unit).unwrap();
        assert_eq!(ks_two_sample(&a, &b), 1.0);
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }

    #[test]
    fn histogram() {
        let mut s = RngStream::new(8, 0);
        let u: Vec<f64> = (0..200_000).map(|_| s.uniform01()).collect();
        let h = RadialHistogram::new(&u, 10, 1.0, HistMode::Flat).unwrap();
        assert!(h.heights().iter().all(|v| (v - 1.0).abs() < 0.03));
        let mass: f64 = h.heights().iter().zip(h.edges.windows(2)).map(|(v, e)| v * (e[1] - e[0])).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        let z = [C64::new(0.05, 0.0), C64::new(0.5, 0.0)];
        assert_eq!(fraction_below(&z, 0.1), 0.5);
        assert!(RadialHistogram::new(&u, 0, 1.0, HistMode::Flat).is_err());
    }

    proptest! {
        #[test]
        fn ks_reparameterisation_invariance(seed in 0u64..1000) {
            let mut s = RngStream::new(seed, 0);
            let x: Vec<f64> = (0..200).map(|_| s.uniform01()).collect();
            let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
            let a = ks_distance(&EmpiricalCdf::new(&x, Weighting::Unit).unwrap(), |r| r.clamp(0.0, 1.0));
            let b = ks_distance(&EmpiricalCdf::new(&x2, Weighting::Unit).unwrap(), |r| r.clamp(0.0, 1.0).sqrt());
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn flat_cdf_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(limiting_flat_cdf(lo) <= limiting_flat_cdf(hi) + 1e-15);
            prop_assert!((0.0..=1.0).contains(&limiting_flat_cdf(a)));
            prop_assert!(radial_density(a) >= 0.0);
        }
    }
}
