//! Tridiagonal matrices and the ensemble samplers.
//!
//! Storage follows the reversed indexing of the ensemble definition: the
//! diagonal holds `a_n, …, a_1` from top to bottom, and position `i` of the
//! sub/super-diagonal holds `b_j`, `c_j` with `j = n − 1 − i`. So the
//! bottom-right corner carries `a_1` and `c_1`, and the product
//! `b̃_j = b_j c_j` at storage position `i` is `sub[i]·sup[i]`.

use crate::randsrc::RngStream;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Complex tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagMatrix {
    /// Main diagonal (`n` entries, `a_n` first).
    pub diag: Vec<C64>,
    /// Sub-diagonal: `sub[i] = M[i+1][i]`.
    pub sub: Vec<C64>,
    /// Super-diagonal: `sup[i] = M[i][i+1]`.
    pub sup: Vec<C64>,
}

/// The ensembles the toolkit knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// General ensemble: independent χ_{βj/2} moduli above and below the diagonal.
    #[serde(rename = "T")]
    GeneralT,
    /// Complex-symmetric ensemble (`b_j = c_j`).
    #[serde(rename = "S")]
    SymmetricS,
    /// Normal form with unit super-diagonal and `|b̃_j| ∼ χ_{jβ}`.
    #[serde(rename = "Ttilde")]
    NonsymmetricTtilde,
    /// Low-temperature limit of `T` and `S` (√2-normalised).
    #[serde(rename = "D")]
    LowTempD,
    /// Low-temperature limit of `T̃` (√2-normalised).
    #[serde(rename = "G")]
    LowTempG,
}

impl EnsembleKind {
    pub fn tag(&self) -> &'static str {
        match self {
            EnsembleKind::GeneralT => "T",
            EnsembleKind::SymmetricS => "S",
            EnsembleKind::NonsymmetricTtilde => "Ttilde",
            EnsembleKind::LowTempD => "D",
            EnsembleKind::LowTempG => "G",
        }
    }

    /// Draw an unscaled matrix of this kind.
    pub fn sample(&self, n: usize, beta: f64, s: &mut RngStream) -> Result<TridiagMatrix> {
        match self {
            EnsembleKind::GeneralT => sample_t(n, beta, s),
            EnsembleKind::SymmetricS => sample_s(n, beta, s),
            EnsembleKind::NonsymmetricTtilde => sample_ttilde(n, beta, s),
            EnsembleKind::LowTempD => sample_d(n, s),
            EnsembleKind::LowTempG => sample_g(n, beta, s),
        }
    }

    /// Draw a matrix scaled by 1/√(2nβ) (D and G are scaled by 1/√(2n)).
    pub fn sample_scaled(&self, n: usize, beta: f64, s: &mut RngStream) -> Result<TridiagMatrix> {
        let m = self.sample(n, beta, s)?;
        let gamma = match self {
            EnsembleKind::LowTempD | EnsembleKind::LowTempG => 1.0 / (2.0 * n as f64).sqrt(),
            _ => standard_scale(n, beta),
        };
        Ok(m.scale(gamma))
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(EnsembleKind::GeneralT),
            "S" => Ok(EnsembleKind::SymmetricS),
            "Ttilde" => Ok(EnsembleKind::NonsymmetricTtilde),
            "D" => Ok(EnsembleKind::LowTempD),
            "G" => Ok(EnsembleKind::LowTempG),
            other => Err(Error::Format(format!("unknown ensemble kind '{other}'"))),
        }
    }
}

/// The global scale 1/√(2nβ) under which the spectra have an n-independent limit.
pub fn standard_scale(n: usize, beta: f64) -> f64 {
    1.0 / (2.0 * n as f64 * beta).sqrt()
}

fn check(n: usize, beta: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("ensembles need n ≥ 2, got {n}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    Ok(())
}

fn diag_normals(n: usize, s: &mut RngStream) -> Vec<C64> {
    (0..n).map(|_| s.complex_normal()).collect()
}

/// Ensemble index `j` of storage position `i` on the off-diagonals.
#[inline]
pub fn offdiag_index(n: usize, i: usize) -> usize {
    n - 1 - i
}

/// General ensemble `T`: `a ∼ N + iN`, `|b_j|, |c_j| ∼ χ_{βj/2}`, uniform phases.
pub fn sample_t(n: usize, beta: f64, s: &mut RngStream) -> Result<TridiagMatrix> {
    check(n, beta)?;
    let diag = diag_normals(n, s);
    let mut sub = Vec::with_capacity(n - 1);
    let mut sup = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let k = 0.5 * beta * offdiag_index(n, i) as f64;
        let b = s.chi(k)? * s.unit_phase();
        let c = s.chi(k)? * s.unit_phase();
        sub.push(b);
        sup.push(c);
    }
    Ok(TridiagMatrix { diag, sub, sup })
}

/// Symmetric ensemble `S`: `b_j = c_j` with `|c_j| ∼ χ_{βj}/√2`.
pub fn sample_s(n: usize, beta: f64, s: &mut RngStream) -> Result<TridiagMatrix> {
    check(n, beta)?;
    let diag = diag_normals(n, s);
    let mut off = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let k = beta * offdiag_index(n, i) as f64;
        off.push(s.chi(k)? * std::f64::consts::FRAC_1_SQRT_2 * s.unit_phase());
    }
    Ok(TridiagMatrix { diag, sub: off.clone(), sup: off })
}

/// Normal form `T̃`: unit super-diagonal, `|b̃_j| ∼ χ_{jβ}` with uniform phase.
pub fn sample_ttilde(n: usize, beta: f64, s: &mut RngStream) -> Result<TridiagMatrix> {
    check(n, beta)?;
    let diag = diag_normals(n, s);
    let mut sub = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let k = beta * offdiag_index(n, i) as f64;
        sub.push(s.chi(k)? * s.unit_phase());
    }
    Ok(TridiagMatrix { diag, sub, sup: vec![C64::new(1.0, 0.0); n - 1] })
}

/// Low-temperature limit `D` (√2 convention): zero diagonal, off-diagonals √j·e^{iθ}.
pub fn sample_d(n: usize, s: &mut RngStream) -> Result<TridiagMatrix> {
    check(n, 1.0)?;
    let mut sub = Vec::with_capacity(n - 1);
    let mut sup = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let r = (offdiag_index(n, i) as f64).sqrt();
        sub.push(r * s.unit_phase());
        sup.push(r * s.unit_phase());
    }
    Ok(TridiagMatrix { diag: vec![C64::new(0.0, 0.0); n], sub, sup })
}

/// Low-temperature limit `G` (√2 convention): sub-diagonal √j·e^{iθ}, super-diagonal 1/√β.
pub fn sample_g(n: usize, beta: f64, s: &mut RngStream) -> Result<TridiagMatrix> {
    check(n, beta)?;
    let mut sub = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        sub.push((offdiag_index(n, i) as f64).sqrt() * s.unit_phase());
    }
    Ok(TridiagMatrix { diag: vec![C64::new(0.0, 0.0); n], sub, sup: vec![C64::new(1.0 / beta.sqrt(), 0.0); n - 1] })
}

impl TridiagMatrix {
    pub fn new(diag: Vec<C64>, sub: Vec<C64>, sup: Vec<C64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(Error::Domain(format!(
                "inconsistent tridiagonal lengths: diag {}, sub {}, sup {}",
                n,
                sub.len(),
                sup.len()
            )));
        }
        Ok(Self { diag, sub, sup })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Multiply every entry by `gamma`.
    pub fn scale(&self, gamma: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|x| x * gamma).collect(),
            sub: self.sub.iter().map(|x| x * gamma).collect(),
            sup: self.sup.iter().map(|x| x * gamma).collect(),
        }
    }

    /// Products `sub[i]·sup[i]` in storage order.
    pub fn btilde_storage(&self) -> Vec<C64> {
        self.sub.iter().zip(&self.sup).map(|(b, c)| b * c).collect()
    }

    /// `b̃_1, …, b̃_{n−1}` in ensemble index order.
    pub fn btilde(&self) -> Vec<C64> {
        let mut v = self.btilde_storage();
        v.reverse();
        v
    }

    /// Entry `(row, col)`, zero off the three diagonals.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        if row == col {
            self.diag[row]
        } else if row == col + 1 {
            self.sub[col]
        } else if col == row + 1 {
            self.sup[row]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn trace(&self) -> C64 {
        self.diag.iter().sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.diag.iter().chain(&self.sub).chain(&self.sup).map(|x| x.norm_sqr()).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self { diag: self.diag.clone(), sub: self.sup.clone(), sup: self.sub.clone() }
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut y: Vec<C64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.sup[i] * x[i + 1];
            y[i + 1] += self.sub[i] * x[i];
        }
        y
    }

    /// `y = Mᵗ x`.
    pub fn matvec_transpose(&self, x: &[C64]) -> Vec<C64> {
        self.transpose().matvec(x)
    }

    /// `M − z·1`.
    pub fn shifted(&self, z: C64) -> Self {
        Self { diag: self.diag.iter().map(|d| d - z).collect(), sub: self.sub.clone(), sup: self.sup.clone() }
    }

    /// The similar matrix with unit super-diagonal and `sub[i] = b̃` (the `T̃` layout).
    pub fn balance_to_btilde(&self) -> Result<Self> {
        if self.sup.iter().any(|c| *c == C64::new(0.0, 0.0)) {
            return Err(Error::Exceptional("zero super-diagonal entry: no diagonal similarity to unit form".into()));
        }
        Ok(Self { diag: self.diag.clone(), sub: self.btilde_storage(), sup: vec![C64::new(1.0, 0.0); self.n() - 1] })
    }

    /// The diagonally similar complex-symmetric matrix with
    /// `sub[i] = sup[i] = √b̃` (principal branch).
    ///
    /// Unlike the `T̃` layout this form keeps both off-diagonals of equal
    /// modulus, so it is far better conditioned for dense eigensolvers.
    pub fn symmetrize(&self) -> Self {
        let off: Vec<C64> = self.btilde_storage().iter().map(|b| b.sqrt()).collect();
        Self { diag: self.diag.clone(), sub: off.clone(), sup: off }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> crate::linalg::DenseMatrix {
        let n = self.n();
        let mut d = crate::linalg::DenseMatrix::zeros(n);
        for i in 0..n {
            d[(i, i)] = self.diag[i];
        }
        for i in 0..n - 1 {
            d[(i + 1, i)] = self.sub[i];
            d[(i, i + 1)] = self.sup[i];
        }
        d
    }
}

/// Metadata stored as the first line of a matrix CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixHeader {
    pub n: usize,
    pub kind: EnsembleKind,
    pub beta: f64,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRow {
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

/// Write `# {json header}` followed by a `row,col,re,im` table of the
/// tridiagonal entries (0-based indices).
pub fn write_matrix_csv<W: Write>(mut w: W, header: &MatrixHeader, m: &TridiagMatrix) -> Result<()> {
    writeln!(w, "# {}", serde_json::to_string(header)?)?;
    let mut cw = csv::Writer::from_writer(w);
    let n = m.n();
    for row in 0..n {
        for col in row.saturating_sub(1)..(row + 2).min(n) {
            let v = m.get(row, col);
            cw.serialize(EntryRow { row, col, re: v.re, im: v.im })?;
        }
    }
    cw.flush()?;
    Ok(())
}

/// Read a matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv<R: BufRead>(mut r: R) -> Result<(MatrixHeader, TridiagMatrix)> {
    let mut first = String::new();
    r.read_line(&mut first)?;
    let json = first
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("matrix CSV must start with a '# {json}' header line".into()))?;
    let header: MatrixHeader = serde_json::from_str(json.trim())?;
    let n = header.n;
    if n == 0 {
        return Err(Error::Format("header declares n = 0".into()));
    }
    let zero = C64::new(0.0, 0.0);
    let mut m = TridiagMatrix { diag: vec![zero; n], sub: vec![zero; n - 1], sup: vec![zero; n - 1] };
    let mut cr = csv::Reader::from_reader(r);
    for rec in cr.deserialize() {
        let e: EntryRow = rec?;
        let v = C64::new(e.re, e.im);
        if e.row >= n || e.col >= n {
            return Err(Error::Format(format!("entry ({}, {}) outside an {n}×{n} matrix", e.row, e.col)));
        }
        if e.row == e.col {
            m.diag[e.row] = v;
        } else if e.row == e.col + 1 {
            m.sub[e.col] = v;
        } else if e.col == e.row + 1 {
            m.sup[e.row] = v;
        } else if v != zero {
            return Err(Error::Format(format!("non-tridiagonal entry ({}, {})", e.row, e.col)));
        }
    }
    Ok((header, m))
}
