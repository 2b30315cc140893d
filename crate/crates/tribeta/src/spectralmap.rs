//! The bijection between tridiagonal entries and spectral data
//! `(Λ, 𝐫, 𝐑₁)`: eigenvalues, the first row of the eigenvector matrix `R`
//! and its first column, in the gauge where the first column of `R⁻¹` is all
//! ones. Includes the identities that tie the two sides together.

use crate::eigensolve::{dot, eigen_pairs, eigenvalues_qr, Spectrum};
use crate::ensembles::TridiagMatrix;
use crate::specfun::gamma_ln;
use crate::{Error, Result, C64};
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Spectral coordinates of a tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralData {
    pub lambdas: Vec<C64>,
    /// First row of `R` (sums to one).
    pub r: Vec<C64>,
    /// First column of `R` (the first right eigenvector; `R1[0] = r[0]`).
    #[serde(rename = "R1")]
    pub r1: Vec<C64>,
    /// Smallest eigenvalue gap relative to the spectral radius.
    pub min_gap_rel: f64,
}

impl SpectralData {
    /// `|Σr − 1|`.
    pub fn sum_defect(&self) -> f64 {
        (self.r.iter().sum::<C64>() - 1.0).norm()
    }

    /// True when the draw sits close to the measure-zero exceptional set.
    pub fn near_degenerate(&self) -> bool {
        let rmax = self.r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        self.min_gap_rel < 1e-10 || self.r.iter().any(|x| x.norm() < 1e-10 * rmax)
    }
}

/// Spectral decomposition in the all-ones gauge.
pub fn decompose(m: &TridiagMatrix) -> Result<SpectralData> {
    let spec = eigenvalues_qr(m)?;
    decompose_with(m, &spec)
}

/// As [`decompose`] with a precomputed spectrum.
pub fn decompose_with(m: &TridiagMatrix, spec: &Spectrum) -> Result<SpectralData> {
    let n = m.n();
    let ep = eigen_pairs(m, spec)?;
    let mut r = Vec::with_capacity(n);
    let mut cols = Vec::with_capacity(n);
    for p in &ep.pairs {
        let w0 = p.left[0];
        let pairing = p.pairing();
        if w0 == ZERO || pairing == ZERO {
            return Err(Error::Exceptional("left eigenvector with vanishing first component".into()));
        }
        let f = w0 / pairing;
        let v: Vec<C64> = p.right.iter().map(|x| x * f).collect();
        r.push(v[0]);
        cols.push(v);
    }
    let r1 = (0..n).map(|i| cols[0][i]).collect();
    let radius = spec.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    Ok(SpectralData { lambdas: spec.eigenvalues.clone(), r, r1, min_gap_rel: ep.min_gap / radius })
}

fn lin(a: &[C64], fa: C64, b: &[C64], fb: C64, c: &[C64], fc: C64) -> Vec<C64> {
    (0..a.len()).map(|i| fa * a[i] + fb * b[i] + fc * c[i]).collect()
}

fn weighted(lam: &[C64], x: &[C64]) -> Vec<C64> {
    lam.iter().zip(x).map(|(l, v)| l * v).collect()
}

/// Rebuild the unique tridiagonal matrix with the given spectral data.
///
/// Rows `𝐫_k` of `R` and columns `𝐥_k` of `R⁻¹` are generated together from
/// `TR = RΛ` and `R⁻¹T = ΛR⁻¹`, starting from `𝐫₀ = 𝐫`, `𝐥₀ = (1,…,1)`.
pub fn reconstruct_general(d: &SpectralData) -> Result<TridiagMatrix> {
    let n = d.lambdas.len();
    if d.r.len() != n || d.r1.len() != n || n == 0 {
        return Err(Error::Domain("inconsistent spectral data lengths".into()));
    }
    let lam = &d.lambdas;
    let mut diag = vec![ZERO; n];
    let mut sub = vec![ZERO; n - 1];
    let mut sup = vec![ZERO; n - 1];
    let mut rows: Vec<Vec<C64>> = vec![d.r.clone()];
    let mut cols: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0); n]];
    let zeros = vec![ZERO; n];
    for k in 0..n {
        let rl = weighted(lam, &rows[k]);
        let ll = weighted(lam, &cols[k]);
        let a = dot(&rl, &cols[k]);
        diag[k] = a;
        if k + 1 == n {
            break;
        }
        let (sb, sp) = if k > 0 { (sub[k - 1], sup[k - 1]) } else { (ZERO, ZERO) };
        let (r_prev, l_prev) = if k > 0 { (&rows[k - 1], &cols[k - 1]) } else { (&zeros, &zeros) };
        // sup[k]·𝐫_{k+1} = 𝐫_kΛ − sub[k−1]𝐫_{k−1} − a𝐫_k
        let mut w = lin(&rl, C64::new(1.0, 0.0), r_prev, -sb, &rows[k], -a);
        // sub[k]·𝐥_{k+1} = Λ𝐥_k − sup[k−1]𝐥_{k−1} − a𝐥_k
        let mut u = lin(&ll, C64::new(1.0, 0.0), l_prev, -sp, &cols[k], -a);
        rebiorthogonalize(&mut w, &mut u, &rows, &cols);
        if d.r1[k + 1] == ZERO {
            return Err(Error::Exceptional(format!("vanishing eigenvector component at step {k}")));
        }
        let c = w[0] / d.r1[k + 1];
        if c == ZERO || !c.re.is_finite() {
            return Err(Error::Exceptional(format!("vanishing super-diagonal entry at step {k}")));
        }
        sup[k] = c;
        let r_next: Vec<C64> = w.iter().map(|x| x / c).collect();
        let b = dot(&r_next, &u);
        if b == ZERO {
            return Err(Error::Exceptional(format!("vanishing sub-diagonal entry at step {k}")));
        }
        sub[k] = b;
        cols.push(u.iter().map(|x| x / b).collect());
        rows.push(r_next);
    }
    TridiagMatrix::new(diag, sub, sup)
}

/// Enforce `𝐰·𝐥_i = 0` and `𝐫_i·𝐮 = 0` for all earlier rows/columns, which
/// holds exactly in `RR⁻¹ = 1` but drifts in floating point (two passes).
fn rebiorthogonalize(w: &mut [C64], u: &mut [C64], rows: &[Vec<C64>], cols: &[Vec<C64>]) {
    for _ in 0..2 {
        for (ri, li) in rows.iter().zip(cols) {
            let pw = dot(w, li);
            let pu = dot(ri, u);
            for j in 0..w.len() {
                w[j] -= pw * ri[j];
                u[j] -= pu * li[j];
            }
        }
    }
}

/// Rebuild a complex-symmetric tridiagonal matrix from `(Λ, 𝐫)`.
/// Square roots take the principal branch, so off-diagonals are determined
/// up to sign.
pub fn reconstruct_symmetric(lambdas: &[C64], r: &[C64]) -> Result<TridiagMatrix> {
    let n = lambdas.len();
    if r.len() != n || n == 0 {
        return Err(Error::Domain("inconsistent spectral data lengths".into()));
    }
    let mut diag = vec![ZERO; n];
    let mut off = vec![ZERO; n - 1];
    let mut rows: Vec<Vec<C64>> = vec![r.to_vec()];
    let mut cols: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0); n]];
    let zeros = vec![ZERO; n];
    for k in 0..n {
        let rl = weighted(lambdas, &rows[k]);
        let ll = weighted(lambdas, &cols[k]);
        let a = dot(&rl, &cols[k]);
        diag[k] = a;
        if k + 1 == n {
            break;
        }
        let cp = if k > 0 { off[k - 1] } else { ZERO };
        let (r_prev, l_prev) = if k > 0 { (&rows[k - 1], &cols[k - 1]) } else { (&zeros, &zeros) };
        let mut w = lin(&rl, C64::new(1.0, 0.0), &rows[k], -a, r_prev, -cp);
        let mut u = lin(&ll, C64::new(1.0, 0.0), &cols[k], -a, l_prev, -cp);
        rebiorthogonalize(&mut w, &mut u, &rows, &cols);
        // c̃² = 𝐰Λ𝐥_k = 𝐰·𝐮
        let c = dot(&w, &u).sqrt();
        if c == ZERO || !c.re.is_finite() {
            return Err(Error::Exceptional(format!("off-diagonal vanishes at step {k}: matrix splits into blocks")));
        }
        off[k] = c;
        rows.push(w.iter().map(|x| x / c).collect());
        cols.push(u.iter().map(|x| x / c).collect());
    }
    TridiagMatrix::new(diag, off.clone(), off)
}

/// Relative Frobenius distance between two symmetric tridiagonals, ignoring
/// the sign of each off-diagonal entry.
pub fn symmetric_distance(a: &TridiagMatrix, b: &TridiagMatrix) -> f64 {
    let mut s: f64 = a.diag.iter().zip(&b.diag).map(|(x, y)| (x - y).norm_sqr()).sum();
    for (x, y) in a.sub.iter().zip(&b.sub) {
        s += 2.0 * (x - y).norm_sqr().min((x + y).norm_sqr());
    }
    s.sqrt() / a.frobenius().max(f64::MIN_POSITIVE)
}

/// Relative Frobenius distance `‖A − B‖_F/‖A‖_F`.
pub fn relative_distance(a: &TridiagMatrix, b: &TridiagMatrix) -> f64 {
    let d = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>();
    (d(&a.diag, &b.diag) + d(&a.sub, &b.sub) + d(&a.sup, &b.sup)).sqrt() / a.frobenius().max(f64::MIN_POSITIVE)
}

/// Relative residual of `Δ(λ)² = ∏_j b̃_j^j / ∏_j r_j`, evaluated with
/// complex logarithms so large n cannot overflow.
pub fn vandermonde_residual(m: &TridiagMatrix, d: &SpectralData) -> f64 {
    let lam = &d.lambdas;
    let mut lhs = ZERO;
    for i in 0..lam.len() {
        for j in i + 1..lam.len() {
            lhs += 2.0 * (lam[i] - lam[j]).ln();
        }
    }
    let mut rhs = ZERO;
    for (j, bt) in m.btilde().iter().enumerate() {
        rhs += (j + 1) as f64 * bt.ln();
    }
    for r in &d.r {
        rhs -= r.ln();
    }
    ((lhs - rhs).exp() - 1.0).norm()
}

/// The Schur defect `½‖M‖_F² − ½Σ|λ|²` (zero exactly for normal matrices).
pub fn g_function(m: &TridiagMatrix, lambdas: &[C64]) -> Result<f64> {
    let f2 = m.frobenius_sq();
    let g = 0.5 * f2 - 0.5 * lambdas.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if g < -1e-9 * f2 {
        return Err(Error::Accuracy(format!("negative Schur defect {g} (‖M‖_F² = {f2})")));
    }
    Ok(g)
}

/// 2×2 matrix entries `(a₂, a₁, c₁, b₁)` from `(λ₁, λ₂, r₁, R₂)`.
pub fn entries_n2(l1: C64, l2: C64, r1: C64, big_r2: C64) -> [C64; 4] {
    let d = l1 - l2;
    [r1 * d + l2, -r1 * d + l1, r1 * (1.0 - r1) * d / big_r2, big_r2 * d]
}

/// Finite-difference check of the n = 2 Jacobian: returns
/// `| |det J| / |r₁r₂Δ⁴/(c₁b₁R₂)|² − 1 |`.
pub fn jacobian_residual_n2(d: &SpectralData) -> Result<f64> {
    if d.lambdas.len() != 2 {
        return Err(Error::Domain("jacobian_residual_n2 needs n = 2".into()));
    }
    let p = [d.lambdas[0], d.lambdas[1], d.r[0], d.r1[1]];
    let [_, _, c1, b1] = entries_n2(p[0], p[1], p[2], p[3]);
    let delta = p[0] - p[1];
    let expected = (p[2] * (1.0 - p[2]) * delta.powu(4) / (c1 * b1 * p[3])).norm_sqr();
    let mut h_rel = 1e-5;
    for _ in 0..4 {
        let det = fd_jacobian_det(&p, h_rel);
        if det.is_finite() && det > 0.0 {
            return Ok((det / expected - 1.0).abs());
        }
        h_rel *= 10.0;
    }
    Err(Error::Accuracy("finite-difference Jacobian degenerate".into()))
}

fn fd_jacobian_det(p: &[C64; 4], h_rel: f64) -> f64 {
    let f = |q: &[C64; 4]| entries_n2(q[0], q[1], q[2], q[3]);
    let mut jac = [[0.0f64; 8]; 8];
    for col in 0..8 {
        let k = col / 2;
        let h = h_rel * p[k].norm().max(1e-3);
        let dir = if col % 2 == 0 { C64::new(h, 0.0) } else { C64::new(0.0, h) };
        let mut plus = *p;
        let mut minus = *p;
        plus[k] += dir;
        minus[k] -= dir;
        let (fp, fm) = (f(&plus), f(&minus));
        for out in 0..4 {
            let dv = (fp[out] - fm[out]) / (2.0 * h);
            jac[2 * out][col] = dv.re;
            jac[2 * out + 1][col] = dv.im;
        }
    }
    det_real(jac).abs()
}

fn det_real<const N: usize>(mut a: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for k in 0..N {
        let p = (k..N).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).expect("non-empty");
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..N {
            let f = a[i][k] / a[k][k];
            for j in k..N {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// `ln Z` of the general ensemble's entry density.
pub fn log_partition_t(n: usize, beta: f64) -> Result<f64> {
    if n == 0 || !(beta > 0.0) {
        return Err(Error::Domain(format!("log_partition_t needs n ≥ 1 and β > 0, got n = {n}, β = {beta}")));
    }
    let nf = n as f64;
    let mut v = (3.0 * nf - 2.0) * PI.ln() + nf * (beta * nf - beta + 4.0) / 4.0 * LN_2;
    for k in 1..n {
        v += 2.0 * gamma_ln(beta * k as f64 / 4.0)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::eigenvalues_qr;
    use crate::ensembles::{sample_s, sample_t};
    use crate::linalg::max_matched_distance;
    use crate::randsrc::RngStream;
    use proptest::prelude::*;

    #[test]
    fn gauge_and_round_trip() {
        let mut fails = 0;
        let mut total = 0;
        for seed in 0..200u64 {
            let n = 2 + (seed as usize % 15);
            let m = sample_t(n, 2.0, &mut RngStream::new(seed, 3)).unwrap();
            let d = decompose(&m).unwrap();
            assert!(d.sum_defect() < 1e-12, "Σr defect {}", d.sum_defect());
            assert_eq!(d.r[0], d.r1[0]);
            if d.near_degenerate() {
                continue;
            }
            total += 1;
            let back = reconstruct_general(&d).unwrap();
            if relative_distance(&m, &back) >= 1e-8 {
                fails += 1;
            }
        }
        assert!(fails == 0, "{fails} of {total} round trips failed");
    }

    #[test]
    fn r_components_nonzero() {
        for seed in 0..1000u64 {
            let m = sample_t(8, 1.0, &mut RngStream::new(seed, 5)).unwrap();
            let d = decompose(&m).unwrap();
            assert!(d.r.iter().all(|x| x.norm() > 0.0));
        }
    }

    #[test]
    fn n2_closed_form() {
        let m = sample_t(2, 2.0, &mut RngStream::new(9, 0)).unwrap();
        let d = decompose(&m).unwrap();
        let [a2, a1, c1, b1] = entries_n2(d.lambdas[0], d.lambdas[1], d.r[0], d.r1[1]);
        let rec = reconstruct_general(&d).unwrap();
        let s = m.frobenius();
        assert!((rec.diag[0] - a2).norm() < 1e-12 * s);
        assert!((rec.diag[1] - a1).norm() < 1e-12 * s);
        assert!((rec.sup[0] - c1).norm() < 1e-12 * s);
        assert!((rec.sub[0] - b1).norm() < 1e-12 * s);
        assert!((m.diag[0] - a2).norm() < 1e-10 * s && (m.sub[0] - b1).norm() < 1e-10 * s);
        // r₁ = ½ centres both diagonal entries.
        let (l1, l2) = (C64::new(1.0, 2.0), C64::new(-0.5, 0.3));
        let [a2, a1, ..] = entries_n2(l1, l2, C64::new(0.5, 0.0), C64::new(0.7, 0.1));
        assert!((a2 - (l1 + l2) / 2.0).norm() < 1e-15 && (a1 - a2).norm() < 1e-15);
    }

    #[test]
    fn symmetric_round_trip() {
        for seed in 0..40u64 {
            let n = 2 + (seed as usize % 11);
            let m = sample_s(n, 2.0, &mut RngStream::new(seed, 1)).unwrap();
            let d = decompose(&m).unwrap();
            if d.near_degenerate() {
                continue;
            }
            let back = reconstruct_symmetric(&d.lambdas, &d.r).unwrap();
            assert!(symmetric_distance(&m, &back) < 1e-8, "seed {seed}: {}", symmetric_distance(&m, &back));
            let e = eigenvalues_qr(&back).unwrap().eigenvalues;
            assert!(max_matched_distance(&e, &d.lambdas) < 1e-8 * m.frobenius());
        }
        let (l1, l2) = (C64::new(1.0, 0.5), C64::new(-2.0, 0.25));
        let s = reconstruct_symmetric(&[l1, l2], &[C64::new(0.5, 0.0); 2]).unwrap();
        assert!((s.sub[0] * s.sub[0] - (l1 - l2).powu(2) / 4.0).norm() < 1e-14);
    }

    #[test]
    fn vandermonde_identity() {
        for seed in 0..30u64 {
            let n = 2 + (seed as usize % 9);
            let m = sample_t(n, 2.0, &mut RngStream::new(seed, 8)).unwrap();
            let d = decompose(&m).unwrap();
            if d.near_degenerate() {
                continue;
            }
            assert!(vandermonde_residual(&m, &d) < 1e-8, "n = {n}: {}", vandermonde_residual(&m, &d));
            let g = 2.5;
            let ms = m.scale(g);
            let ds = decompose(&ms).unwrap();
            assert!(vandermonde_residual(&ms, &ds) < 1e-8);
        }
    }

    #[test]
    fn schur_defect() {
        let diag = TridiagMatrix::new(vec![C64::new(1.0, 1.0), C64::new(-2.0, 0.0), C64::new(0.0, 3.0)], vec![ZERO; 2], vec![ZERO; 2]).unwrap();
        assert_eq!(g_function(&diag, &diag.diag).unwrap(), 0.0);
        let m = sample_t(6, 2.0, &mut RngStream::new(1, 1)).unwrap();
        let e = eigenvalues_qr(&m).unwrap().eigenvalues;
        assert!(g_function(&m, &e).unwrap() >= -1e-10);
        let d = decompose(&m).unwrap();
        let g0 = g_function(&m, &e).unwrap();
        for phi in [PI / 7.0, 1.0] {
            let rot = C64::from_polar(1.0, phi);
            let dr = SpectralData { lambdas: d.lambdas.iter().map(|z| z * rot).collect(), ..d.clone() };
            let mr = reconstruct_general(&dr).unwrap();
            let g = g_function(&mr, &dr.lambdas).unwrap();
            assert!((g - g0).abs() < 1e-8, "{g} vs {g0}");
        }
    }

    #[test]
    fn jacobian_n2() {
        for seed in 0..10u64 {
            let m = sample_t(2, 2.0, &mut RngStream::new(seed, 2)).unwrap();
            let d = decompose(&m).unwrap();
            assert!(jacobian_residual_n2(&d).unwrap() < 1e-4);
            let scaled = SpectralData { lambdas: d.lambdas.iter().map(|z| z * 3.0).collect(), ..d.clone() };
            assert!(jacobian_residual_n2(&scaled).unwrap() < 1e-4);
        }
        // Both sides vanish as Δ → 0.
        let mut prev = f64::INFINITY;
        for k in 1..5 {
            let eps = 10f64.powi(-k);
            let p = [C64::new(eps, 0.0), ZERO, C64::new(0.3, 0.1), C64::new(1.0, 0.0)];
            let det = fd_jacobian_det(&p, 1e-5);
            assert!(det < prev);
            prev = det;
        }
    }

    #[test]
    fn partition_function() {
        assert!((log_partition_t(1, 2.0).unwrap() - (2.0 * PI).ln()).abs() < 1e-14);
        // Independent oracle: product of one-dimensional radial integrals
        // ∫ e^{−|a|²/2}d²a and ∫ |b|^{βj/2−2} e^{−|b|²/2}d²b.
        for &(n, beta) in &[(2usize, 4.0), (3, 1.0), (4, 2.5)] {
            let mut ln_z = n as f64 * (2.0 * PI).ln();
            for j in 1..n {
                let s = beta * j as f64 / 2.0;
                let radial = crate::quad::integrate_to_inf(|r| r.powf(s - 1.0) * (-r * r / 2.0).exp(), 0.0, 1e-14, 1e-12).unwrap().value;
                ln_z += 2.0 * (2.0 * PI * radial).ln();
            }
            assert!((log_partition_t(n, beta).unwrap() - ln_z).abs() < 1e-8, "n = {n}");
        }
        for &beta in &[0.5, 2.0, 10.0] {
            let v: Vec<f64> = (1..12).map(|n| log_partition_t(n, beta).unwrap()).collect();
            assert!(v.windows(2).all(|w| w[1] > w[0]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn decompose_invariants(seed in 0u64..100_000, n in 2usize..12) {
            let m = sample_t(n, 2.0, &mut RngStream::new(seed, 0)).unwrap();
            let d = decompose(&m).unwrap();
            prop_assert!(d.sum_defect() < 1e-12);
            prop_assert_eq!(d.r[0], d.r1[0]);
            let e = eigenvalues_qr(&m).unwrap().eigenvalues;
            prop_assert!(g_function(&m, &e).unwrap() >= -1e-10 * m.frobenius_sq());
        }
    }
}
