//! ε-pseudospectra of tridiagonal matrices: smallest singular values of
//! `z·1 − M` on a grid, the analytic disc obtained from the last basis
//! vector, and eigenvector condition-number tables.

use crate::eigensolve::{condition_number_r, eigen_pairs, eigenvalues_qr, Gauge};
use crate::ensembles::{EnsembleKind, TridiagMatrix};
use crate::linalg::TridiagLu;
use crate::randsrc::{par_realizations, RngStream};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::Serialize;

/// `s_min(z·1 − M)` by inverse power iteration on `(A^H A)^{-1}` with a
/// pivoted tridiagonal LU of `A = M − z·1`.
pub fn smin_at(m: &TridiagMatrix, z: C64) -> f64 {
    let n = m.n();
    let scale = m.frobenius().max(z.norm()).max(1.0);
    let floor = f64::EPSILON * scale;
    for attempt in 0..3 {
        let zz = z + C64::new(1e-13 * scale * attempt as f64, 0.0);
        let lu = TridiagLu::factor_shifted(m, zz, floor);
        if lu.replaced_pivots > 0 {
            return 0.0;
        }
        let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0, 0.1 * (i % 7) as f64)).collect();
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let mut rq_prev = 0.0;
        let mut ok = true;
        for _ in 0..300 {
            let mut y = x.clone();
            lu.solve_transposed(&mut y, true); // y = A^{-H} x
            let rq = norm_sqr(&y);
            lu.solve(&mut y); // y = A^{-1}A^{-H} x
            let ny = norm(&y);
            if !(ny.is_finite() && rq.is_finite()) {
                ok = false;
                break;
            }
            if ny == 0.0 {
                break;
            }
            x = y.iter().map(|v| v / ny).collect();
            if (rq - rq_prev).abs() <= 1e-8 * rq {
                return 1.0 / rq.sqrt();
            }
            rq_prev = rq;
        }
        if ok {
            return 1.0 / rq_prev.sqrt();
        }
    }
    0.0
}

fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

fn norm(x: &[C64]) -> f64 {
    norm_sqr(x).sqrt()
}

/// Axis-aligned box in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl GridBox {
    /// Square `[−h, h]²`.
    pub fn square(h: f64) -> Self {
        Self { x_min: -h, x_max: h, y_min: -h, y_max: h }
    }
}

/// Grid of values over a box; `values[iy·nx + ix]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudospectrumGrid {
    pub bbox: GridBox,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl PseudospectrumGrid {
    pub fn point(&self, ix: usize, iy: usize) -> C64 {
        let b = &self.bbox;
        C64::new(
            b.x_min + (b.x_max - b.x_min) * ix as f64 / (self.nx - 1) as f64,
            b.y_min + (b.y_max - b.y_min) * iy as f64 / (self.ny - 1) as f64,
        )
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    /// Grid spacing (larger of the two axes).
    pub fn cell(&self) -> f64 {
        let b = &self.bbox;
        ((b.x_max - b.x_min) / (self.nx - 1) as f64).max((b.y_max - b.y_min) / (self.ny - 1) as f64)
    }

    /// Sublevel mask `value < ε`.
    pub fn sublevel(&self, eps: f64) -> Vec<bool> {
        self.values.iter().map(|v| *v < eps).collect()
    }

    /// Evaluate `f` on every grid point, in parallel.
    pub fn evaluate(bbox: GridBox, nx: usize, ny: usize, f: impl Fn(C64) -> f64 + Sync) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Domain(format!("grid resolution must be at least 2×2, got {nx}×{ny}")));
        }
        let mut g = Self { bbox, nx, ny, values: Vec::new() };
        let pts: Vec<C64> = (0..nx * ny).map(|k| g.point(k % nx, k / nx)).collect();
        g.values = pts.par_iter().map(|z| f(*z)).collect();
        Ok(g)
    }
}

/// `s_min(z·1 − M)` over a grid.
pub fn smin_grid(m: &TridiagMatrix, bbox: GridBox, nx: usize, ny: usize) -> Result<PseudospectrumGrid> {
    PseudospectrumGrid::evaluate(bbox, nx, ny, |z| smin_at(m, z))
}

/// `‖(z·1 − M)e‖₂` for the last basis vector `e` (the column holding `a₁`, `c₁`),
/// computed from the matrix product.
pub fn en_functional(m: &TridiagMatrix, z: C64) -> f64 {
    let n = m.n();
    let mut e = vec![C64::new(0.0, 0.0); n];
    e[n - 1] = C64::new(1.0, 0.0);
    let me = m.matvec(&e);
    me.iter().zip(&e).map(|(a, b)| (z * b - a).norm_sqr()).sum::<f64>().sqrt()
}

/// Disc `{z : |z − centre|² < radius²}`; empty when `radius² ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disc {
    pub centre: C64,
    pub radius_sq: f64,
}

impl Disc {
    pub fn is_empty(&self) -> bool {
        self.radius_sq <= 0.0
    }

    pub fn radius(&self) -> f64 {
        self.radius_sq.max(0.0).sqrt()
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.centre).norm_sqr() < self.radius_sq
    }
}

/// `centre = a₁/√(2nβ)`, `radius² = ε² − |c₁|²/(2nβ)` for unscaled corner entries.
pub fn pseudospectrum_disc(a1: C64, c1: C64, n: usize, beta: f64, eps: f64) -> Result<Disc> {
    if !(eps > 0.0) || !(beta > 0.0) || n == 0 {
        return Err(Error::Domain(format!("disc needs ε > 0, β > 0, n ≥ 1 (got ε = {eps}, β = {beta}, n = {n})")));
    }
    let s = 2.0 * n as f64 * beta;
    Ok(Disc { centre: a1 / s.sqrt(), radius_sq: eps * eps - c1.norm_sqr() / s })
}

/// The same disc read off an already-scaled matrix.
pub fn disc_of_scaled(m: &TridiagMatrix, eps: f64) -> Disc {
    let n = m.n();
    let c1 = if n > 1 { m.sup[n - 2] } else { C64::new(0.0, 0.0) };
    Disc { centre: m.diag[n - 1], radius_sq: eps * eps - c1.norm_sqr() }
}

/// Comparison of grid sublevel sets with the analytic disc.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscCheck {
    pub disc: Disc,
    pub eps: f64,
    pub cell: f64,
    /// Largest distance (in cells) from the disc boundary of a grid point whose
    /// `e_n`-functional classification disagrees with the disc.
    pub max_mismatch_cells: f64,
    pub en_inside: usize,
    /// Grid points with full `s_min < ε` (a superset, since `s_min ≤ e_n`).
    pub smin_inside: usize,
    /// Points where `s_min ≥ ε` although the disc contains them (should be 0).
    pub smin_violations: usize,
}

/// Evaluate the `e_n` functional and `s_min` on a grid and compare both
/// sublevel sets with the disc of the scaled matrix `m`.
pub fn disc_vs_grid_check(m: &TridiagMatrix, eps: f64, bbox: GridBox, res: usize) -> Result<DiscCheck> {
    let disc = disc_of_scaled(m, eps);
    let en = PseudospectrumGrid::evaluate(bbox, res, res, |z| en_functional(m, z))?;
    let sm = smin_grid(m, bbox, res, res)?;
    let cell = en.cell();
    let r = disc.radius();
    let mut worst: f64 = 0.0;
    let (mut en_inside, mut smin_inside, mut viol) = (0, 0, 0);
    for iy in 0..res {
        for ix in 0..res {
            let z = en.point(ix, iy);
            let inside = en.value(ix, iy) < eps;
            en_inside += inside as usize;
            if inside != disc.contains(z) {
                let d = if disc.is_empty() { (z - disc.centre).norm() } else { ((z - disc.centre).norm() - r).abs() };
                worst = worst.max(d / cell);
            }
            let s_in = sm.value(ix, iy) < eps;
            smin_inside += s_in as usize;
            if disc.contains(z) && !s_in {
                viol += 1;
            }
        }
    }
    Ok(DiscCheck { disc, eps, cell, max_mismatch_cells: worst, en_inside, smin_inside, smin_violations: viol })
}

/// Summary row of the eigenvector condition-number table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondRow {
    pub kind: String,
    pub n: usize,
    pub beta: f64,
    pub m: usize,
    pub seed: u64,
    pub gauge: Gauge,
    pub mean: f64,
    pub median: f64,
    pub failures: usize,
}

/// Median of a nonempty sample.
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}

/// `κ(R)` statistics over `m` realizations (stream `j` for realization `j`).
pub fn condition_table(kind: EnsembleKind, n: usize, m: usize, beta: f64, seed: u64, gauge: Gauge) -> Result<CondRow> {
    let ks: Vec<Option<f64>> = par_realizations(seed, m, |mut s: RngStream| {
        let t = kind.sample_scaled(n, beta, &mut s).ok()?;
        let spec = eigenvalues_qr(&t).ok()?;
        let pairs = eigen_pairs(&t, &spec).ok()?;
        condition_number_r(&pairs.pairs, gauge).ok()
    });
    let ok: Vec<f64> = ks.iter().flatten().copied().collect();
    if ok.is_empty() {
        return Err(Error::Exceptional("every realization failed".into()));
    }
    Ok(CondRow {
        kind: kind.tag().into(),
        n,
        beta,
        m,
        seed,
        gauge,
        mean: ok.iter().sum::<f64>() / ok.len() as f64,
        median: median(&ok),
        failures: m - ok.len(),
    })
}
