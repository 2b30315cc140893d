//! Low-temperature (β → ∞) behaviour.
//!
//! Off-diagonal χ variates concentrate: `χ_k − √k → N(0, ½)`. Building the
//! ensembles at several β from one set of phases and Gaussian offsets makes
//! the convergence pathwise:
//!
//! * scaled `T_β` → `D/(2√n)` (with `D` from [`sample_d`](crate::ensembles::sample_d)),
//! * scaled `T̃_β` → `G_β/√(2n)` (with `G_β` from [`sample_g`](crate::ensembles::sample_g)),
//!
//! at rate `1/√β`, and the leading correction is first-order perturbation
//! theory in the fluctuation matrix.

use crate::eigensolve::{dot, eigen_pairs, eigenvalues_qr, EigenPair};
use crate::ensembles::TridiagMatrix;
use crate::linalg::{match_spectra, max_matched_distance};
use crate::randsrc::RngStream;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Which limit a coupled family approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    /// Scaled `T_β` → `D/(2√n)`.
    D,
    /// Scaled `T̃_β` → `G_β/√(2n)`.
    G,
}

/// χ_k as a monotone function of a standard normal `ξ` (Wilson–Hilferty).
/// Reusing `ξ` across `k` couples χ variates of different degrees.
pub fn chi_from_normal(k: f64, xi: f64) -> f64 {
    let h = 2.0 / (9.0 * k);
    let c = 1.0 - h + xi * h.sqrt();
    (k * c.max(0.0).powi(3)).sqrt()
}

/// Ensemble matrices at several β built from shared randomness, with their limits.
#[derive(Debug, Clone)]
pub struct CoupledDraw {
    pub kind: LimitKind,
    pub n: usize,
    pub betas: Vec<f64>,
    pub diag: Vec<C64>,
    pub phase_sub: Vec<C64>,
    pub phase_sup: Vec<C64>,
    pub xi_sub: Vec<f64>,
    pub xi_sup: Vec<f64>,
    /// Scaled matrices, one per β.
    pub matrices: Vec<TridiagMatrix>,
    /// Scaled limit matrix per β (identical across β for `D`).
    pub limits: Vec<TridiagMatrix>,
}

/// Build a coupled family for ascending `betas` (each ≥ 10).
pub fn coupled_family(kind: LimitKind, n: usize, betas: &[f64], s: &mut RngStream) -> Result<CoupledDraw> {
    if n < 2 {
        return Err(Error::Domain(format!("coupled draws need n ≥ 2, got {n}")));
    }
    if betas.is_empty() || betas.iter().any(|b| *b < 10.0) || betas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("betas must be ascending and ≥ 10".into()));
    }
    let diag: Vec<C64> = (0..n).map(|_| s.complex_normal()).collect();
    let phase_sub: Vec<C64> = (0..n - 1).map(|_| s.unit_phase()).collect();
    let phase_sup: Vec<C64> = (0..n - 1).map(|_| s.unit_phase()).collect();
    let xi_sub: Vec<f64> = (0..n - 1).map(|_| s.normal01()).collect();
    let xi_sup: Vec<f64> = (0..n - 1).map(|_| s.normal01()).collect();
    let nf = n as f64;
    let j = |i: usize| (n - 1 - i) as f64;
    let mut matrices = Vec::new();
    let mut limits = Vec::new();
    for &beta in betas {
        let scale = 1.0 / (2.0 * nf * beta).sqrt();
        let (sub, sup, lsub, lsup): (Vec<C64>, Vec<C64>, Vec<C64>, Vec<C64>) = match kind {
            LimitKind::D => (
                (0..n - 1).map(|i| chi_from_normal(0.5 * beta * j(i), xi_sub[i]) * phase_sub[i]).collect(),
                (0..n - 1).map(|i| chi_from_normal(0.5 * beta * j(i), xi_sup[i]) * phase_sup[i]).collect(),
                (0..n - 1).map(|i| j(i).sqrt() / (2.0 * nf.sqrt()) * phase_sub[i]).collect(),
                (0..n - 1).map(|i| j(i).sqrt() / (2.0 * nf.sqrt()) * phase_sup[i]).collect(),
            ),
            LimitKind::G => (
                (0..n - 1).map(|i| chi_from_normal(beta * j(i), xi_sub[i]) * phase_sub[i]).collect(),
                vec![C64::new(1.0, 0.0); n - 1],
                (0..n - 1).map(|i| j(i).sqrt() / (2.0 * nf).sqrt() * phase_sub[i]).collect(),
                vec![C64::new(1.0 / (beta.sqrt() * (2.0 * nf).sqrt()), 0.0); n - 1],
            ),
        };
        matrices.push(TridiagMatrix::new(diag.clone(), sub, sup)?.scale(scale));
        limits.push(TridiagMatrix::new(vec![ZERO; n], lsub, lsup)?);
    }
    Ok(CoupledDraw { kind, n, betas: betas.to_vec(), diag, phase_sub, phase_sup, xi_sub, xi_sup, matrices, limits })
}

impl CoupledDraw {
    /// Fluctuation matrix `√β·(scaled T_β − limit)·√(2n)` for entry `k` of `betas`.
    pub fn fluctuation(&self, k: usize) -> TridiagMatrix {
        let f = (self.betas[k] * 2.0 * self.n as f64).sqrt();
        let (m, l) = (&self.matrices[k], &self.limits[k]);
        let d = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y) * f).collect::<Vec<_>>();
        TridiagMatrix { diag: d(&m.diag, &l.diag), sub: d(&m.sub, &l.sub), sup: d(&m.sup, &l.sup) }
    }
}

/// First-order eigenvalues of `A + εB`: `λ_i + ε (wᵢᵗBvᵢ)/(wᵢᵗvᵢ)`.
pub fn perturbation_prediction(b: &TridiagMatrix, eps: f64, pairs: &[EigenPair]) -> Vec<C64> {
    pairs.iter().map(|p| p.lambda + eps * dot(&p.left, &b.matvec(&p.right)) / p.pairing()).collect()
}

/// Distances of the coupled spectra from their limits and the fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub betas: Vec<f64>,
    pub distances: Vec<f64>,
    pub slope: f64,
}

/// Least-squares slope of `ln(max matched distance)` against `ln β`.
pub fn convergence_rate(draw: &CoupledDraw) -> Result<RateReport> {
    if draw.betas.len() < 3 {
        return Err(Error::Domain("need at least three β values".into()));
    }
    let mut distances = Vec::new();
    for (m, l) in draw.matrices.iter().zip(&draw.limits) {
        let a = eigenvalues_qr(m)?.eigenvalues;
        let b = eigenvalues_qr(l)?.eigenvalues;
        distances.push(max_matched_distance(&a, &b));
    }
    let x: Vec<f64> = draw.betas.iter().map(|b| b.ln()).collect();
    let y: Vec<f64> = distances.iter().map(|d| d.ln()).collect();
    Ok(RateReport { betas: draw.betas.clone(), distances, slope: ls_slope(&x, &y) })
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Right eigenvector of `M` at eigenvalue `λ` from the characteristic
/// polynomials of the trailing blocks: `u[n−1−k] = P_k(λ)/∏_{m≤k} b_m`.
pub fn charpoly_right_vector(m: &TridiagMatrix, lambda: C64) -> Vec<C64> {
    charpoly_vector(&m.diag, &m.btilde_storage(), &m.sub, lambda)
}

/// Left eigenvector (`wᵗM = λwᵗ`): the same construction with the super-diagonal.
pub fn charpoly_left_vector(m: &TridiagMatrix, lambda: C64) -> Vec<C64> {
    charpoly_vector(&m.diag, &m.btilde_storage(), &m.sup, lambda)
}

/// `(P_{n−1}(λ), …, P_0(λ))`: an exact right eigenvector of the similar
/// matrix with unit sub-diagonal and `b̃` on the super-diagonal.
pub fn charpoly_vector_unit_form(m: &TridiagMatrix, lambda: C64) -> Vec<C64> {
    let ones = vec![C64::new(1.0, 0.0); m.n() - 1];
    charpoly_vector(&m.diag, &m.btilde_storage(), &ones, lambda)
}

fn charpoly_vector(diag: &[C64], bt: &[C64], off: &[C64], lambda: C64) -> Vec<C64> {
    let n = diag.len();
    let mut u = vec![ZERO; n];
    let (mut pm, mut pk) = (ZERO, C64::new(1.0, 0.0));
    let mut prod = C64::new(1.0, 0.0);
    for k in 0..n {
        let row = n - 1 - k;
        u[row] = pk / prod;
        let next = (lambda - diag[row]) * pk - if k > 0 { bt[row] * pm } else { ZERO };
        pm = pk;
        pk = next;
        if row > 0 {
            prod *= off[row - 1];
        }
    }
    u
}

/// `‖Mu − λu‖/(‖M‖_F‖u‖)`.
pub fn eigen_residual(m: &TridiagMatrix, lambda: C64, u: &[C64]) -> f64 {
    let mu = m.matvec(u);
    let r: f64 = mu.iter().zip(u).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
    let nu: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    r / (m.frobenius() * nu)
}

/// Observed `√β(λ − λ_limit)` against the first-order prediction
/// `(wᵗZv)/(wᵗv)/√(2n)` over `draws` coupled samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationReport {
    pub n: usize,
    pub beta: f64,
    pub draws: usize,
    /// Modulus of the complex correlation coefficient.
    pub correlation: f64,
    pub max_abs_error: f64,
}

pub fn fluctuation_check(kind: LimitKind, n: usize, beta: f64, draws: usize, seed: u64) -> Result<FluctuationReport> {
    let mut obs = Vec::new();
    let mut pred = Vec::new();
    for d in 0..draws {
        let draw = coupled_family(kind, n, &[beta], &mut RngStream::new(seed, d as u64))?;
        let limit = &draw.limits[0];
        // Unscaled limit (no √2 factor) and fluctuation matrix Z.
        let lim_unscaled = limit.scale((2.0 * n as f64).sqrt());
        let spec = eigenvalues_qr(&lim_unscaled)?;
        let pairs = eigen_pairs(&lim_unscaled, &spec)?;
        let z = draw.fluctuation(0);
        let first = perturbation_prediction(&z, 1.0, &pairs.pairs);
        let exact = eigenvalues_qr(&draw.matrices[0])?.eigenvalues;
        let lim_eigs: Vec<C64> = spec.eigenvalues.iter().map(|l| l / (2.0 * n as f64).sqrt()).collect();
        let perm = match_spectra(&lim_eigs, &exact);
        for i in 0..n {
            obs.push(beta.sqrt() * (exact[perm[i]] - lim_eigs[i]));
            pred.push((first[i] - pairs.pairs[i].lambda) / (2.0 * n as f64).sqrt());
        }
    }
    let max_abs_error = obs.iter().zip(&pred).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(FluctuationReport { n, beta, draws, correlation: complex_correlation(&obs, &pred), max_abs_error })
}

/// `|Σ conj(a−ā)(b−b̄)| / √(Σ|a−ā|² Σ|b−b̄|²)`.
pub fn complex_correlation(a: &[C64], b: &[C64]) -> f64 {
    let n = a.len() as f64;
    let ma: C64 = a.iter().sum::<C64>() / n;
    let mb: C64 = b.iter().sum::<C64>() / n;
    let mut sab = ZERO;
    let (mut saa, mut sbb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma).conj() * (y - mb);
        saa += (x - ma).norm_sqr();
        sbb += (y - mb).norm_sqr();
    }
    sab.norm() / (saa * sbb).sqrt()
}

/// Sample mean and variance of `χ_r − √r` over `draws` exact χ variates.
pub fn chi_limit_stats(r: f64, draws: usize, s: &mut RngStream) -> Result<(f64, f64)> {
    let v: Vec<f64> = (0..draws).map(|_| s.chi(r).map(|x| x - r.sqrt())).collect::<Result<_>>()?;
    let mean = v.iter().sum::<f64>() / draws as f64;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (draws as f64 - 1.0);
    Ok((mean, var))
}
