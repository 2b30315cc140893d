//! Dense and tridiagonal complex linear algebra kernels: LU factorizations,
//! Hessenberg reduction, a single-shift complex QR eigenvalue iteration,
//! one-sided Jacobi singular values and optimal eigenvalue matching.

use crate::{Error, Result, C64};
use std::ops::{Index, IndexMut};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.n + c]
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from columns.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `y = Aᴴ x`.
    pub fn matvec_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for i in 0..self.n {
            let xi = x[i];
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += self[(i, j)].conj() * xi;
            }
        }
        y
    }

    /// `y = Aᵗ x`.
    pub fn matvec_transpose(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        for i in 0..self.n {
            let xi = x[i];
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += self[(i, j)] * xi;
            }
        }
        y
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<DenseLu> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, max) = (k..n).map(|i| (i, a[i * n + k].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if max == 0.0 {
                return Err(Error::Exceptional("singular matrix in dense LU".into()));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let inv = ONE / a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] * inv;
                a[i * n + k] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(DenseLu { n, lu: a, piv })
    }
}

/// Dense LU factors `P A = L U`.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
}

impl DenseLu {
    /// Solve `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solve `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        // Aᴴ = Uᴴ Lᴴ P
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = s / self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.piv.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// LU factorization with partial pivoting of a tridiagonal matrix
/// (the `?gttrf` scheme: U gains a second super-diagonal).
#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swapped: Vec<bool>,
    /// Number of exactly-zero pivots that were replaced by the floor value.
    pub replaced_pivots: usize,
}

impl TridiagLu {
    /// Factor the matrix with sub-diagonal `dl`, diagonal `d`, super-diagonal `du`.
    /// Zero pivots are replaced by `pivot_floor` (useful for inverse iteration).
    pub fn factor(dl: &[C64], d: &[C64], du: &[C64], pivot_floor: f64) -> Self {
        let n = d.len();
        let mut dl = dl.to_vec();
        let mut d = d.to_vec();
        let mut du = du.to_vec();
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i] != ZERO {
                    let f = dl[i] / d[i];
                    dl[i] = f;
                    d[i + 1] -= f * du[i];
                } else {
                    dl[i] = ZERO;
                }
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        let mut replaced = 0;
        for x in d.iter_mut() {
            if *x == ZERO {
                *x = C64::new(pivot_floor, 0.0);
                replaced += 1;
            }
        }
        Self { dl, d, du, du2, swapped, replaced_pivots: replaced }
    }

    /// Factor `M − z·1`.
    pub fn factor_shifted(m: &crate::ensembles::TridiagMatrix, z: C64, pivot_floor: f64) -> Self {
        let d: Vec<C64> = m.diag.iter().map(|x| x - z).collect();
        Self::factor(&m.sub, &d, &m.sup, pivot_floor)
    }

    /// Smallest pivot modulus of U (a cheap singularity indicator).
    pub fn min_pivot(&self) -> f64 {
        self.d.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [C64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if !self.swapped[i] {
                let t = self.dl[i] * b[i];
                b[i + 1] -= t;
            } else {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            }
        }
        self.back_substitute(b);
    }

    fn back_substitute(&self, b: &mut [C64]) {
        let n = self.d.len();
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    /// Solve `Aᵗ x = b` (`conj = false`) or `Aᴴ x = b` (`conj = true`) in place.
    pub fn solve_transposed(&self, b: &mut [C64], conj: bool) {
        let n = self.d.len();
        let c = |x: C64| if conj { x.conj() } else { x };
        b[0] /= c(self.d[0]);
        if n > 1 {
            b[1] = (b[1] - c(self.du[0]) * b[0]) / c(self.d[1]);
        }
        for i in 2..n {
            b[i] = (b[i] - c(self.du[i - 1]) * b[i - 1] - c(self.du2[i - 2]) * b[i - 2]) / c(self.d[i]);
        }
        for i in (0..n.saturating_sub(1)).rev() {
            if !self.swapped[i] {
                let t = c(self.dl[i]) * b[i + 1];
                b[i] -= t;
            } else {
                let t = b[i + 1];
                b[i + 1] = b[i] - c(self.dl[i]) * t;
                b[i] = t;
            }
        }
    }
}

/// Reduce to upper Hessenberg form by Householder similarity transforms.
pub fn hessenberg(a: &mut DenseMatrix) {
    let n = a.n;
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vn;
        }
        // A ← (1 − 2vvᴴ) A
        for j in k..n {
            let s: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * a[(k + 1 + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= 2.0 * vt * s;
            }
        }
        // A ← A (1 − 2vvᴴ)
        for i in 0..n {
            let s: C64 = v.iter().enumerate().map(|(t, vt)| a[(i, k + 1 + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= 2.0 * s * vt.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Complex Givens rotation `[c s; −s̄ c]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let norm = ax.hypot(ay);
    let c = ax / norm;
    let s = (x / ax) * y.conj() / norm;
    (c, s)
}

/// All eigenvalues of an upper Hessenberg matrix by single-shift implicit QR
/// with Wilkinson shifts and exceptional shifts every ten stagnant sweeps.
///
/// The matrix is destroyed. On failure the eigenvalues found so far are
/// attached to the error.
pub fn hessenberg_eigenvalues(h: &mut DenseMatrix) -> Result<Vec<C64>> {
    let n = h.n;
    let mut eig = vec![ZERO; n];
    let mut found = vec![false; n];
    if n == 0 {
        return Ok(eig);
    }
    let max_iter = 100 * n.max(10);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        // Locate the active unreduced block [lo, hi].
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo, lo - 1)].norm();
            let scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let tol = if scale == 0.0 { f64::MIN_POSITIVE } else { f64::EPSILON * scale };
            if s <= tol {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            found[hi] = true;
            its = 0;
            if hi == 0 {
                return Ok(eig);
            }
            hi -= 1;
            continue;
        }
        total += 1;
        its += 1;
        if total > max_iter {
            let partial = eig.iter().zip(&found).filter(|(_, f)| **f).map(|(e, _)| *e).collect();
            return Err(Error::NoConvergence { msg: format!("Hessenberg QR exceeded {max_iter} iterations"), partial });
        }
        let mu = if its % 10 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let tr = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
            let e1 = tr + disc;
            let e2 = tr - disc;
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        // Implicit single-shift QR sweep on rows/cols lo..=hi.
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let col0 = if k > lo { k - 1 } else { lo };
            for j in col0..=hi {
                let h1 = h[(k, j)];
                let h2 = h[(k + 1, j)];
                h[(k, j)] = c * h1 + s * h2;
                h[(k + 1, j)] = -s.conj() * h1 + c * h2;
            }
            let row1 = (k + 2).min(hi);
            for i in lo..=row1 {
                let h1 = h[(i, k)];
                let h2 = h[(i, k + 1)];
                h[(i, k)] = c * h1 + s.conj() * h2;
                h[(i, k + 1)] = -s * h1 + c * h2;
            }
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
}

/// Singular values of a square matrix by one-sided (Hestenes) Jacobi
/// rotations, sorted descending. Accurate reference for small n.
pub fn jacobi_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let n = a.n;
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let ap = cols[p][i];
                    let bq = cols[q][i] * phase;
                    cols[p][i] = c * ap - s * bq;
                    cols[q][i] = s * ap + c * bq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Minimum-cost perfect assignment (Hungarian algorithm, O(n³)).
/// Returns `assign[i] = j`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Match two spectra: returns `perm` with `b[perm[i]]` paired to `a[i]`.
/// Optimal (Hungarian, minimising the summed squared distance) for n ≤ 200,
/// greedy nearest neighbour beyond.
pub fn match_spectra(a: &[C64], b: &[C64]) -> Vec<usize> {
    let n = a.len();
    assert_eq!(n, b.len(), "spectra must have equal length");
    if n <= 200 {
        let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm_sqr()).collect()).collect();
        return hungarian(&cost);
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * 8);
    // Candidate pairs from a coarse sort by real part keep this near O(n log n).
    let mut idx_b: Vec<usize> = (0..n).collect();
    idx_b.sort_by(|&i, &j| b[i].re.total_cmp(&b[j].re));
    let keys: Vec<f64> = idx_b.iter().map(|&j| b[j].re).collect();
    for (i, x) in a.iter().enumerate() {
        let pos = keys.partition_point(|&k| k < x.re);
        let lo = pos.saturating_sub(16);
        let hi = (pos + 16).min(n);
        for &j in &idx_b[lo..hi] {
            pairs.push(((x - b[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (_, i, j) in pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
        }
    }
    // Any leftovers: exhaustive nearest unused.
    for i in 0..n {
        if perm[i] == usize::MAX {
            let j = (0..n).filter(|&j| !used[j]).min_by(|&p, &q| (a[i] - b[p]).norm().total_cmp(&(a[i] - b[q]).norm())).expect("unused partner");
            perm[i] = j;
            used[j] = true;
        }
    }
    perm
}

/// Largest distance between matched eigenvalues.
pub fn max_matched_distance(a: &[C64], b: &[C64]) -> f64 {
    let perm = match_spectra(a, b);
    a.iter().enumerate().map(|(i, x)| (x - b[perm[i]]).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randsrc::RngStream;

    fn random_dense(n: usize, seed: u64) -> DenseMatrix {
        let mut s = RngStream::new(seed, 0);
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = s.complex_normal();
            }
        }
        m
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn dense_lu_solves() {
        let a = random_dense(9, 1);
        let x: Vec<C64> = (0..9).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let b = a.matvec(&x);
        let lu = a.lu().unwrap();
        assert!(close(&lu.solve(&b), &x, 1e-10));
        let bh = a.matvec_adjoint(&x);
        assert!(close(&lu.solve_adjoint(&bh), &x, 1e-10));
    }

    #[test]
    fn tridiag_lu_solves() {
        let mut s = RngStream::new(2, 0);
        let n = 12;
        let dl: Vec<C64> = (0..n - 1).map(|_| 3.0 * s.complex_normal()).collect();
        let d: Vec<C64> = (0..n).map(|_| 0.1 * s.complex_normal()).collect();
        let du: Vec<C64> = (0..n - 1).map(|_| s.complex_normal()).collect();
        let m = crate::ensembles::TridiagMatrix::new(d.clone(), dl.clone(), du.clone()).unwrap();
        let lu = TridiagLu::factor(&dl, &d, &du, 1e-300);
        let x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64, -0.5 * i as f64)).collect();
        let mut b = m.matvec(&x);
        lu.solve(&mut b);
        assert!(close(&b, &x, 1e-9));
        let mut bt = m.matvec_transpose(&x);
        lu.solve_transposed(&mut bt, false);
        assert!(close(&bt, &x, 1e-9));
        let dense = m.to_dense();
        let mut bh = dense.matvec_adjoint(&x);
        lu.solve_transposed(&mut bh, true);
        assert!(close(&bh, &x, 1e-9));
    }

    #[test]
    fn qr_on_known_spectra() {
        let mut h = DenseMatrix::zeros(2);
        h[(0, 1)] = ONE;
        h[(1, 0)] = ONE;
        let mut e = hessenberg_eigenvalues(&mut h).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((e[0] + 1.0).norm() < 1e-14 && (e[1] - 1.0).norm() < 1e-14);
        // Upper triangular: eigenvalues are the diagonal.
        let mut t = random_dense(5, 3);
        for i in 0..5 {
            for j in 0..i {
                t[(i, j)] = ZERO;
            }
        }
        let diag: Vec<C64> = (0..5).map(|i| t[(i, i)]).collect();
        let e = hessenberg_eigenvalues(&mut t.clone()).unwrap();
        assert!(max_matched_distance(&e, &diag) < 1e-12);
    }

    #[test]
    fn qr_trace_and_similarity() {
        for seed in 0..5 {
            let a = random_dense(30, 10 + seed);
            let tr: C64 = (0..30).map(|i| a[(i, i)]).sum();
            let mut h = a.clone();
            hessenberg(&mut h);
            for i in 0..30usize {
                for j in 0..i.saturating_sub(1) {
                    assert!(h[(i, j)].norm() < 1e-12);
                }
            }
            let e = hessenberg_eigenvalues(&mut h).unwrap();
            let s: C64 = e.iter().sum();
            assert!((s - tr).norm() < 1e-9);
            // Each eigenvalue makes A − λ singular.
            for lam in e.iter().take(5) {
                let mut b = a.clone();
                for i in 0..30 {
                    b[(i, i)] -= lam;
                }
                let sv = jacobi_singular_values(&b);
                assert!(sv[29] < 1e-9 * sv[0]);
            }
        }
    }

    #[test]
    fn jacobi_svd_known() {
        let mut d = DenseMatrix::zeros(3);
        d[(0, 0)] = C64::new(0.0, 3.0);
        d[(1, 1)] = C64::new(-1.0, 0.0);
        d[(2, 2)] = C64::new(2.0, 0.0);
        assert_eq!(jacobi_singular_values(&d), vec![3.0, 2.0, 1.0]);
        assert!((jacobi_singular_values(&DenseMatrix::identity(4))[3] - 1.0).abs() < 1e-15);
        // Frobenius norm identity on a random matrix
        let a = random_dense(8, 4);
        let sv = jacobi_singular_values(&a);
        let f2: f64 = sv.iter().map(|x| x * x).sum();
        assert!((f2.sqrt() - a.frobenius()).abs() < 1e-10 * a.frobenius());
    }

    #[test]
    fn matching() {
        let a = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let b = vec![C64::new(0.0, 1.1), C64::new(0.05, 0.0), C64::new(0.9, 0.0)];
        assert_eq!(match_spectra(&a, &b), vec![1, 2, 0]);
        let mut s = RngStream::new(5, 0);
        let big: Vec<C64> = (0..500).map(|_| s.complex_normal()).collect();
        let mut shuffled: Vec<C64> = big.iter().rev().map(|z| z + C64::new(1e-9, 0.0)).collect();
        shuffled.swap(3, 77);
        assert!(max_matched_distance(&big, &shuffled) < 2e-9);
    }
}
