//! Eigenvalues and eigenvectors of complex non-Hermitian tridiagonal matrices.
//!
//! Two independent eigenvalue solvers cross-check each other: a dense
//! Hessenberg QR (O(n³), the reference) and Aberth–Ehrlich iteration on the
//! characteristic-polynomial recurrence (O(n²) per sweep, the fast path).

use crate::charpoly::{eval_charpoly, newton_correction};
use crate::ensembles::TridiagMatrix;
use crate::linalg::{hessenberg_eigenvalues, DenseMatrix, TridiagLu};
use crate::randsrc::RngStream;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Eigenvalue algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Qr,
    Aberth,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qr" => Ok(Method::Qr),
            "aberth" => Ok(Method::Aberth),
            other => Err(Error::Format(format!("unknown solver '{other}'"))),
        }
    }
}

/// A computed spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// `‖Mv − λv‖₂ / ‖M‖_F` per eigenvalue; empty until eigenvectors are computed.
    pub residuals: Vec<f64>,
    pub method: Method,
}

impl Spectrum {
    /// Attach residuals from eigenpairs of `m`.
    pub fn with_residuals(mut self, m: &TridiagMatrix, pairs: &[EigenPair]) -> Self {
        self.residuals = pairs.iter().map(|p| p.residual(m)).collect();
        self
    }
}

/// Solve with the requested method.
pub fn eigenvalues(m: &TridiagMatrix, method: Method) -> Result<Spectrum> {
    match method {
        Method::Qr => eigenvalues_qr(m),
        Method::Aberth => eigenvalues_aberth(m),
    }
}

/// Reference solver: split at vanishing `b̃`, bring each block to the
/// diagonally similar complex-symmetric form, then Hessenberg QR.
pub fn eigenvalues_qr(m: &TridiagMatrix) -> Result<Spectrum> {
    let n = m.n();
    let bt = m.btilde_storage();
    let mut eig = Vec::with_capacity(n);
    let mut start = 0;
    for end in 1..=n {
        if end < n && bt[end - 1] != ZERO {
            continue;
        }
        let block = TridiagMatrix {
            diag: m.diag[start..end].to_vec(),
            sub: bt[start..end - 1].to_vec(),
            sup: vec![C64::new(1.0, 0.0); end - 1 - start],
        }
        .symmetrize();
        if block.n() == 1 {
            eig.push(block.diag[0]);
        } else {
            let mut h = block.to_dense();
            match hessenberg_eigenvalues(&mut h) {
                Ok(v) => eig.extend(v),
                Err(Error::NoConvergence { msg, partial }) => {
                    eig.extend(partial);
                    return Err(Error::NoConvergence { msg, partial: eig });
                }
                Err(e) => return Err(e),
            }
        }
        start = end;
    }
    Ok(Spectrum { eigenvalues: eig, residuals: Vec::new(), method: Method::Qr })
}

/// Maximum number of Aberth sweeps.
pub const ABERTH_MAX_SWEEPS: usize = 500;

/// Fast solver: Aberth–Ehrlich iteration (Gauss–Seidel style) on
/// `det(z·1 − M)` using the scaled recurrence for the Newton ratio.
///
/// Starting points come from the Newton polygon of the characteristic
/// polynomial about `trace/n`: each upper-hull edge of `(k, ln|coef_k|)`
/// contributes as many points as its width on a circle of the matching
/// radius. A root stops moving once its update falls below `1e−12·radius`
/// (radius = largest start radius), or once both the Aberth and the plain
/// Newton updates are small and stagnate at the rounding level of the
/// polynomial evaluation.
pub fn eigenvalues_aberth(m: &TridiagMatrix) -> Result<Spectrum> {
    let n = m.n();
    if n == 1 {
        return Ok(Spectrum { eigenvalues: vec![m.diag[0]], residuals: Vec::new(), method: Method::Aberth });
    }
    let bt = m.btilde_storage();
    let centre = m.trace() / n as f64;
    let mut z = newton_polygon_start(m, centre);
    let radius = z.iter().map(|w| (w - centre).norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = 1e-12 * radius;
    let mut done = vec![false; n];
    let mut last = vec![f64::INFINITY; n];
    for _sweep in 0..ABERTH_MAX_SWEEPS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let ratio = newton_correction(&m.diag, &bt, zi);
            let mut s = ZERO;
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = zi - zj;
                    s += d.conj() / d.norm_sqr();
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                // Landed exactly on a root (P = 0) or degenerate ratio.
                if ratio == ZERO {
                    done[i] = true;
                    continue;
                }
                return Err(Error::NoConvergence { msg: "non-finite Aberth update".into(), partial: z });
            }
            let step = w.norm();
            z[i] -= w;
            // In a cluster the Aberth step can stall while the root is still
            // far off, so stagnation alone is not enough: the Newton step
            // must be small too.
            let stagnant = step >= 0.5 * last[i] && step < 1e-6 * radius && ratio.norm() < 1e-6 * radius;
            if step < tol || stagnant {
                done[i] = true;
            }
            last[i] = step;
        }
        if done.iter().all(|d| *d) {
            return Ok(Spectrum { eigenvalues: z, residuals: Vec::new(), method: Method::Aberth });
        }
    }
    Err(Error::NoConvergence { msg: format!("Aberth iteration exceeded {ABERTH_MAX_SWEEPS} sweeps"), partial: z })
}

/// Coefficient moduli (ascending powers, natural log) of `det((z + c)·1 − M)`,
/// from the three-term recurrence in the rescaled variable `z = ρw` with joint
/// rescaling of consecutive polynomials. `ρ` should be a typical root modulus
/// so that the coefficient range stays inside floating point.
fn ln_coefficient_moduli(m: &TridiagMatrix, c: C64, rho: f64) -> Vec<f64> {
    let n = m.n();
    let bt = m.btilde_storage();
    let one = C64::new(1.0, 0.0);
    let mut prev = vec![one];
    let mut cur = vec![(c - m.diag[0]) / rho, one];
    let mut ln_scale = 0.0f64;
    for k in 1..n {
        let a = (c - m.diag[k]) / rho;
        let b = bt[k - 1] / (rho * rho);
        let mut next = vec![ZERO; k + 2];
        for (j, x) in cur.iter().enumerate() {
            next[j + 1] += x;
            next[j] += a * x;
        }
        for (j, x) in prev.iter().enumerate() {
            next[j] -= b * x;
        }
        let big = next.iter().chain(&cur).map(|x| x.norm()).fold(0.0, f64::max);
        if big > 1e100 || (big < 1e-100 && big > 0.0) {
            let f = 1.0 / big;
            ln_scale += big.ln();
            next.iter_mut().for_each(|x| *x *= f);
            cur.iter_mut().for_each(|x| *x *= f);
        }
        prev = cur;
        cur = next;
    }
    let lr = rho.ln();
    cur.iter().enumerate().map(|(k, x)| x.norm().ln() + ln_scale + (n - k) as f64 * lr).collect()
}

fn newton_polygon_start(m: &TridiagMatrix, centre: C64) -> Vec<C64> {
    let n = m.n();
    // Geometric mean of the root distances from the centre.
    let ln_p = eval_charpoly(m, centre).ln_abs();
    let rho = if ln_p.is_finite() { (ln_p / n as f64).exp() } else { m.frobenius() / (n as f64).sqrt() };
    let rho = if rho > 0.0 && rho.is_finite() { rho } else { 1.0 };
    let lc = ln_coefficient_moduli(m, centre, rho);
    // Upper convex hull of the finite points (k, ln|c_k|).
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for (k, &y) in lc.iter().enumerate() {
        if !y.is_finite() {
            continue;
        }
        let p = (k as f64, y);
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut jitter = RngStream::new(0x5eed, n as u64);
    let mut z = Vec::with_capacity(n);
    if hull.len() < 2 || hull[0].0 != 0.0 {
        // P(centre) = 0 to working precision or a degenerate polygon: put the
        // missing roots at the centre neighbourhood.
        let lead = hull.first().map(|p| p.0 as usize).unwrap_or(n);
        let tiny = 1e-8 * (1.0 + centre.norm());
        for k in 0..lead {
            z.push(centre + C64::from_polar(tiny * (1.0 + k as f64), std::f64::consts::TAU * k as f64 / lead.max(1) as f64));
        }
    }
    for e in hull.windows(2) {
        let width = (e[1].0 - e[0].0) as usize;
        let r = ((e[0].1 - e[1].1) / width as f64).exp();
        let offset = std::f64::consts::TAU * jitter.uniform01();
        for t in 0..width {
            let angle = offset + std::f64::consts::TAU * (t as f64 + 0.3 * jitter.uniform01()) / width as f64;
            z.push(centre + C64::from_polar(r * (1.0 + 0.02 * jitter.uniform01()), angle));
        }
    }
    z
}

/// An eigenvalue with right (`Mv = λv`) and left (`wᵗM = λwᵗ`) eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: C64,
    pub right: Vec<C64>,
    pub left: Vec<C64>,
}

impl EigenPair {
    /// `‖Mv − λv‖₂ / (‖M‖_F ‖v‖₂)`.
    pub fn residual(&self, m: &TridiagMatrix) -> f64 {
        let mv = m.matvec(&self.right);
        let r: f64 = mv.iter().zip(&self.right).map(|(a, v)| (a - self.lambda * v).norm_sqr()).sum::<f64>().sqrt();
        r / (m.frobenius().max(f64::MIN_POSITIVE) * norm(&self.right))
    }

    /// `wᵗv` (bilinear, no conjugation).
    pub fn pairing(&self) -> C64 {
        dot(&self.left, &self.right)
    }
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let s = norm(v);
    if s > 0.0 && s.is_finite() {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// Result of [`eigen_pairs`].
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub pairs: Vec<EigenPair>,
    /// Smallest pairwise eigenvalue distance.
    pub min_gap: f64,
    /// Set when `min_gap < 1e−10·‖M‖_F`.
    pub near_degenerate: bool,
}

/// Right and left eigenvectors by inverse iteration with a pivoted
/// tridiagonal LU of `M − λ·1`, two steps from a fixed random start.
/// Vectors are returned with unit 2-norm.
pub fn eigen_pairs(m: &TridiagMatrix, spectrum: &Spectrum) -> Result<EigenPairs> {
    let n = m.n();
    let lam = &spectrum.eigenvalues;
    if lam.len() != n {
        return Err(Error::Domain(format!("spectrum has {} values for n = {n}", lam.len())));
    }
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min_gap = min_gap.min((lam[i] - lam[j]).norm());
        }
    }
    let floor = f64::EPSILON * scale;
    let mut start = RngStream::new(0xe16e, n as u64);
    let x0: Vec<C64> = (0..n).map(|_| start.complex_normal()).collect();
    let mut pairs = Vec::with_capacity(n);
    for &l in lam {
        let mut lu = TridiagLu::factor_shifted(m, l, floor);
        if lu.min_pivot() < floor {
            // Nudge off an exactly singular shift.
            lu = TridiagLu::factor_shifted(m, l + C64::new(floor, floor), floor);
        }
        let mut v = x0.clone();
        let mut w = x0.clone();
        for _ in 0..2 {
            lu.solve(&mut v);
            normalize(&mut v);
            lu.solve_transposed(&mut w, false);
            normalize(&mut w);
        }
        if v.iter().chain(&w).any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Exceptional(format!("inverse iteration broke down at λ = {l}")));
        }
        pairs.push(EigenPair { lambda: l, right: v, left: w });
    }
    Ok(EigenPairs { pairs, min_gap, near_degenerate: min_gap < 1e-10 * scale })
}

/// Column normalisation of the eigenvector matrix `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    /// First column of `R⁻¹` all ones (left vectors start with 1), `wᵢᵗvᵢ = 1`.
    SpectralOnes,
    /// Unit 2-norm columns.
    UnitColumns,
}

/// Assemble `R` (columns = right eigenvectors) in the requested gauge.
pub fn eigenvector_matrix(pairs: &[EigenPair], gauge: Gauge) -> Result<DenseMatrix> {
    let cols: Vec<Vec<C64>> = pairs
        .iter()
        .map(|p| {
            let mut v = p.right.clone();
            match gauge {
                Gauge::UnitColumns => normalize(&mut v),
                Gauge::SpectralOnes => {
                    let w0 = p.left[0];
                    let pair = p.pairing();
                    if w0 == ZERO || pair == ZERO {
                        return Err(Error::Exceptional("left eigenvector with vanishing first component".into()));
                    }
                    // w ← w/w₀, then v ← v/(wᵗv).
                    let f = w0 / pair;
                    v.iter_mut().for_each(|x| *x *= f);
                }
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(DenseMatrix::from_columns(&cols))
}

/// `κ(R) = s_max/s_min`: power iteration on `RᴴR` and inverse power iteration
/// with a dense LU of `R`. A singular `R` gives `+∞`.
pub fn condition_number_r(pairs: &[EigenPair], gauge: Gauge) -> Result<f64> {
    let r = eigenvector_matrix(pairs, gauge)?;
    Ok(condition_number_dense(&r))
}

/// Power-iteration estimate of the 2-norm condition number of a dense matrix.
pub fn condition_number_dense(r: &DenseMatrix) -> f64 {
    let n = r.n();
    let lu = match r.lu() {
        Ok(lu) => lu,
        Err(_) => return f64::INFINITY,
    };
    let mut s = RngStream::new(0xc0d, n as u64);
    let x0: Vec<C64> = (0..n).map(|_| s.complex_normal()).collect();
    let smax2 = power(&x0, |x| r.matvec_adjoint(&r.matvec(x)));
    let inv2 = power(&x0, |x| lu.solve(&lu.solve_adjoint(x)));
    if !(inv2 > 0.0) || !inv2.is_finite() {
        return f64::INFINITY;
    }
    (smax2 * inv2).sqrt()
}

fn power(x0: &[C64], op: impl Fn(&[C64]) -> Vec<C64>) -> f64 {
    let mut x = x0.to_vec();
    normalize(&mut x);
    let mut est = 0.0;
    for _ in 0..5000 {
        let y = op(&x);
        let new = dot_conj(&x, &y).re;
        x = y;
        normalize(&mut x);
        if (new - est).abs() <= 1e-13 * new.abs() {
            return new;
        }
        est = new;
    }
    est
}

fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::eval_charpoly;
    use crate::ensembles::{sample_d, EnsembleKind};
    use crate::linalg::{jacobi_singular_values, max_matched_distance};
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_tridiag(n: usize, seed: u64) -> TridiagMatrix {
        let mut s = RngStream::new(seed, 77);
        let mut g = |k| (0..k).map(|_| s.complex_normal()).collect::<Vec<_>>();
        TridiagMatrix::new(g(n), g(n - 1), g(n - 1)).unwrap()
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn swap_matrix() {
        let m = TridiagMatrix::new(vec![c(0.0); 2], vec![c(1.0)], vec![c(1.0)]).unwrap();
        for method in [Method::Qr, Method::Aberth] {
            let e = sorted(eigenvalues(&m, method).unwrap().eigenvalues);
            assert!((e[0] - c(-1.0)).norm() < 1e-14 && (e[1] - c(1.0)).norm() < 1e-14, "{method:?}: {e:?}");
        }
    }

    #[test]
    fn diagonal_matrix_splits() {
        let d = vec![c(3.0), C64::new(1.0, 2.0), c(-1.0)];
        let m = TridiagMatrix::new(d.clone(), vec![c(0.0), c(5.0)], vec![c(7.0), c(0.0)]).unwrap();
        let e = eigenvalues_qr(&m).unwrap().eigenvalues;
        assert_eq!(sorted(e), sorted(d));
    }

    #[test]
    fn trace_and_determinant() {
        let m = random_tridiag(6, 1);
        let e = eigenvalues_qr(&m).unwrap().eigenvalues;
        let sum: C64 = e.iter().sum();
        assert!((sum - m.trace()).norm() < 1e-10);
        let prod: C64 = e.iter().product();
        let det = eval_charpoly(&m, ZERO).to_c64(); // det(−M) = (−1)^6 det M
        assert!((prod - det).norm() < 1e-8 * det.norm());
    }

    #[test]
    fn solvers_agree_n50() {
        for seed in 0..5 {
            let m = random_tridiag(50, seed);
            let q = eigenvalues_qr(&m).unwrap().eigenvalues;
            let a = eigenvalues_aberth(&m).unwrap().eigenvalues;
            assert!(max_matched_distance(&q, &a) < 1e-7 * m.frobenius(), "seed {seed}");
        }
    }

    #[test]
    fn centred_spectrum_is_symmetric() {
        let m = sample_d(31, &mut RngStream::new(4, 0)).unwrap();
        let e = eigenvalues_aberth(&m).unwrap().eigenvalues;
        let neg: Vec<C64> = e.iter().map(|z| -z).collect();
        assert!(max_matched_distance(&e, &neg) < 1e-8 * m.frobenius());
    }

    #[test]
    fn eigenvectors_follow_charpoly_recurrence() {
        let n = 12;
        let m = sample_d(n, &mut RngStream::new(5, 0)).unwrap();
        let spec = eigenvalues_qr(&m).unwrap();
        let pairs = eigen_pairs(&m, &spec).unwrap();
        let bt = m.btilde_storage();
        for p in &pairs.pairs {
            // u[n−1−k] = P_k(λ)/∏_{m≤k} b_m with P_k built from the bottom block.
            let mut u = vec![ZERO; n];
            let (mut pm, mut pk) = (ZERO, C64::new(1.0, 0.0));
            let mut bprod = C64::new(1.0, 0.0);
            for k in 0..n {
                u[n - 1 - k] = pk / bprod;
                let row = n - 1 - k;
                let next = (p.lambda - m.diag[row]) * pk - if k > 0 { bt[row] * pm } else { ZERO };
                pm = pk;
                pk = next;
                if row > 0 {
                    bprod *= m.sub[row - 1];
                }
            }
            let cos = dot_conj(&u, &p.right).norm() / (norm(&u) * norm(&p.right));
            assert!(cos > 1.0 - 1e-8, "cos = {cos}");
        }
    }

    #[test]
    fn residuals_and_biorthogonality() {
        let m = random_tridiag(50, 9);
        let spec = eigenvalues_qr(&m).unwrap();
        let pairs = eigen_pairs(&m, &spec).unwrap();
        assert!(!pairs.near_degenerate);
        let spec = spec.with_residuals(&m, &pairs.pairs);
        assert!(spec.residuals.iter().all(|r| *r < 1e-9));
        for (i, a) in pairs.pairs.iter().enumerate() {
            for (j, b) in pairs.pairs.iter().enumerate() {
                if i != j {
                    let v = dot(&a.left, &b.right).norm() / a.pairing().norm();
                    assert!(v < 1e-7, "({i},{j}): {v}");
                }
            }
        }
        let big = EnsembleKind::GeneralT.sample_scaled(200, 2.0, &mut RngStream::new(3, 0)).unwrap();
        let spec = eigenvalues_qr(&big).unwrap();
        let pairs = eigen_pairs(&big, &spec).unwrap();
        assert!(pairs.pairs.iter().all(|p| p.residual(&big) < 1e-9));
    }

    #[test]
    fn condition_numbers() {
        let id = DenseMatrix::identity(5);
        assert!((condition_number_dense(&id) - 1.0).abs() < 1e-12);
        let d = TridiagMatrix::new(vec![c(1.0), c(2.0), c(-3.0), C64::new(0.0, 1.0)], vec![c(0.0); 3], vec![c(0.0); 3]).unwrap();
        let spec = eigenvalues_qr(&d).unwrap();
        let pairs = eigen_pairs(&d, &spec).unwrap();
        let k = condition_number_r(&pairs.pairs, Gauge::UnitColumns).unwrap();
        assert!((k - 1.0).abs() < 1e-6);
        for seed in 0..4 {
            let m = random_tridiag(8, seed);
            let spec = eigenvalues_qr(&m).unwrap();
            let pairs = eigen_pairs(&m, &spec).unwrap();
            for gauge in [Gauge::UnitColumns, Gauge::SpectralOnes] {
                let r = eigenvector_matrix(&pairs.pairs, gauge).unwrap();
                let sv = jacobi_singular_values(&r);
                let exact = sv[0] / sv[sv.len() - 1];
                let est = condition_number_dense(&r);
                assert!((est / exact - 1.0).abs() < 1e-6, "{gauge:?}: {est} vs {exact}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn invariants(seed in 0u64..10_000, n in 2usize..40) {
            let m = random_tridiag(n, seed);
            let q = eigenvalues_qr(&m).unwrap().eigenvalues;
            let a = eigenvalues_aberth(&m).unwrap().eigenvalues;
            let tr = m.trace();
            let suma: f64 = m.diag.iter().map(|x| x.norm()).sum();
            for e in [&q, &a] {
                prop_assert!((e.iter().sum::<C64>() - tr).norm() <= 1e-9 * (n as f64 + suma));
            }
            prop_assert!(max_matched_distance(&q, &a) < 1e-7 * m.frobenius());
            let prod: C64 = q.iter().product();
            let p0 = eval_charpoly(&m, ZERO).to_c64() * if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((prod - p0).norm() < 1e-6 * p0.norm());
            let g = 0.37;
            let qs = eigenvalues_qr(&m.scale(g)).unwrap().eigenvalues;
            let scaled: Vec<C64> = q.iter().map(|z| z * g).collect();
            prop_assert!(max_matched_distance(&qs, &scaled) < 1e-9 * g * m.frobenius());
            let qb = eigenvalues_qr(&m.balance_to_btilde().unwrap()).unwrap().eigenvalues;
            prop_assert!(max_matched_distance(&qb, &q) < 1e-8 * m.frobenius());
        }
    }
}
