//! Dense complex Ginibre reference ensemble, normalised to the unit disc.

use crate::density::{ginibre_flat_cdf, ks_distance, EmpiricalCdf, Weighting};
use crate::eigensolve::condition_number_dense;
use crate::linalg::{hessenberg, hessenberg_eigenvalues, DenseMatrix};
use crate::pseudospectrum::median;
use crate::randsrc::{par_realizations, RngStream};
use crate::{Error, Result, C64};
use serde::Serialize;

/// `n×n` matrix of iid complex normals with `E|x|² = 1/n`.
pub fn sample_ginibre(n: usize, s: &mut RngStream) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::Domain("Ginibre matrices need n ≥ 1".into()));
    }
    let scale = 1.0 / (2.0 * n as f64).sqrt();
    let mut a = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = s.complex_normal() * scale;
        }
    }
    Ok(a)
}

/// Eigenvalues by Hessenberg reduction and shifted QR.
pub fn dense_eigenvalues(a: &DenseMatrix) -> Result<Vec<C64>> {
    let mut h = a.clone();
    hessenberg(&mut h);
    hessenberg_eigenvalues(&mut h)
}

/// Eigenvalue moduli drawn directly: the set `{|λ_k|²}` of a normalised
/// Ginibre matrix has the law of independent `Gamma(k, 1)/n`, `k = 1..n`.
pub fn kostlan_moduli(n: usize, s: &mut RngStream) -> Result<Vec<f64>> {
    (1..=n).map(|k| Ok((s.gamma(k as f64)? / n as f64).sqrt())).collect()
}

/// How eigenvalue moduli are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GinibreMethod {
    Dense,
    Kostlan,
}

/// Moduli from `m` realizations, each on stream `(seed, j)`.
pub fn ginibre_moduli(n: usize, m: usize, seed: u64, method: GinibreMethod) -> Result<Vec<f64>> {
    let per: Vec<Result<Vec<f64>>> = par_realizations(seed, m, |mut s| match method {
        GinibreMethod::Kostlan => kostlan_moduli(n, &mut s),
        GinibreMethod::Dense => Ok(dense_eigenvalues(&sample_ginibre(n, &mut s)?)?.iter().map(|z| z.norm()).collect()),
    });
    let mut out = Vec::with_capacity(n * m);
    for p in per {
        out.extend(p?);
    }
    Ok(out)
}

/// Flat-weighted KS distance of the pooled moduli against the circular law.
pub fn ginibre_ks(n: usize, m: usize, seed: u64, method: GinibreMethod) -> Result<f64> {
    let r = ginibre_moduli(n, m, seed, method)?;
    let e = EmpiricalCdf::new(&r, Weighting::Flat)?;
    Ok(ks_distance(&e, ginibre_flat_cdf))
}

/// Right eigenvectors by two steps of inverse iteration with a dense LU.
pub fn dense_eigenvectors(a: &DenseMatrix, lambdas: &[C64]) -> Result<Vec<Vec<C64>>> {
    let n = a.n();
    let floor = f64::EPSILON * a.frobenius().max(f64::MIN_POSITIVE);
    let mut s = RngStream::new(0x91b, n as u64);
    lambdas
        .iter()
        .map(|&l| {
            let mut shifted = a.clone();
            for i in 0..n {
                shifted[(i, i)] -= l + floor;
            }
            let lu = shifted.lu()?;
            let mut v: Vec<C64> = (0..n).map(|_| s.complex_normal()).collect();
            for _ in 0..2 {
                v = lu.solve(&v);
                let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if !(nv > 0.0) || !nv.is_finite() {
                    return Err(Error::Accuracy("inverse iteration broke down".into()));
                }
                v.iter_mut().for_each(|x| *x /= nv);
            }
            Ok(v)
        })
        .collect()
}

/// `κ(R)` of one Ginibre matrix with unit eigenvector columns.
pub fn ginibre_condition_number(a: &DenseMatrix) -> Result<f64> {
    let lambdas = dense_eigenvalues(a)?;
    let cols = dense_eigenvectors(a, &lambdas)?;
    Ok(condition_number_dense(&DenseMatrix::from_columns(&cols)))
}

/// Median `κ(R)` over `m` Ginibre draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GinibreCond {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub median_kappa: f64,
}

pub fn ginibre_condition_table(n: usize, m: usize, seed: u64) -> Result<GinibreCond> {
    let ks: Vec<Result<f64>> = par_realizations(seed, m, |mut s| ginibre_condition_number(&sample_ginibre(n, &mut s)?));
    let ks: Vec<f64> = ks.into_iter().collect::<Result<_>>()?;
    Ok(GinibreCond { n, m, seed, median_kappa: median(&ks) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_have_unit_row_energy() {
        let mut s = RngStream::new(3, 0);
        let a = sample_ginibre(200, &mut s).unwrap();
        let f2 = a.frobenius().powi(2) / 200.0;
        assert!((f2 - 1.0).abs() < 0.02, "{f2}");
    }

    #[test]
    fn dense_spectrum_matches_trace_and_circular_law() {
        let mut s = RngStream::new(5, 1);
        let a = sample_ginibre(120, &mut s).unwrap();
        let l = dense_eigenvalues(&a).unwrap();
        let tr: C64 = (0..120).map(|i| a[(i, i)]).sum();
        assert!((l.iter().sum::<C64>() - tr).norm() < 1e-10);
        assert!(l.iter().all(|z| z.norm() < 1.3));
    }

    /// Kostlan moduli and dense QR moduli follow the same law.
    #[test]
    fn kostlan_agrees_with_dense() {
        let a = ginibre_moduli(40, 60, 11, GinibreMethod::Dense).unwrap();
        let b = ginibre_moduli(40, 60, 12, GinibreMethod::Kostlan).unwrap();
        let d = crate::density::ks_two_sample(&EmpiricalCdf::new(&a, Weighting::Unit).unwrap(), &EmpiricalCdf::new(&b, Weighting::Unit).unwrap());
        // Two-sample critical value at α = 0.001 for 2400 vs 2400 points.
        assert!(d < 1.95 * (2.0f64 / 2400.0).sqrt(), "{d}");
    }

    #[test]
    fn eigenvectors_and_condition() {
        let mut s = RngStream::new(9, 0);
        let a = sample_ginibre(30, &mut s).unwrap();
        let l = dense_eigenvalues(&a).unwrap();
        let v = dense_eigenvectors(&a, &l).unwrap();
        for (lam, x) in l.iter().zip(&v) {
            let ax = a.matvec(x);
            let r: f64 = ax.iter().zip(x).map(|(p, q)| (p - lam * q).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-10, "{r}");
        }
        let k = ginibre_condition_number(&a).unwrap();
        assert!(k > 1.0 && k < 1e4, "{k}");
    }
}
