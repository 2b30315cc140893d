//! Characteristic polynomials of tridiagonal matrices.
//!
//! For a centred matrix (zero diagonal) the characteristic polynomial only
//! depends on the products `b̃_j = b_j c_j`:
//!
//! `𝒫_n(z) = zⁿ + Σ_{ℓ≥1} κ_ℓ z^{n−2ℓ}`, with `𝒫_{k+1} = z𝒫_k − b̃_k 𝒫_{k−1}`.
//!
//! The coefficient `κ_ℓ` is `(−1)^ℓ` times the sum of products of `ℓ`
//! pairwise non-adjacent `b̃`'s. Three independent evaluations of this
//! (recurrence, nested sums, subset enumeration) cross-check each other.
//! The module also provides the coefficient variances of the `D` and `G`
//! limit ensembles and their generating Q-polynomials.

use crate::ensembles::TridiagMatrix;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Coefficients `κ_1 … κ_{⌊n/2⌋}` of a monic centred characteristic polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPolyCoeffs {
    pub n: usize,
    /// `kappa[ℓ−1] = κ_ℓ`, the coefficient of `z^{n−2ℓ}`.
    pub kappa: Vec<C64>,
}

impl CharPolyCoeffs {
    /// Evaluate `𝒫_n(z)`.
    pub fn eval(&self, z: C64) -> C64 {
        let z2 = z * z;
        // Horner in z² over zⁿ, z^{n−2}, …
        let mut acc = ONE;
        for k in &self.kappa {
            acc = acc * z2 + k;
        }
        acc * z.powu((self.n - 2 * self.kappa.len()) as u32)
    }

    /// Largest relative difference between two coefficient sets.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.kappa.len(), other.kappa.len());
        self.kappa
            .iter()
            .zip(&other.kappa)
            .map(|(a, b)| (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// Coefficients by the three-term recurrence; `btilde` holds `b̃_1 … b̃_{n−1}`.
pub fn coeffs_recurrence(btilde: &[C64]) -> CharPolyCoeffs {
    let n = btilde.len() + 1;
    // prev = coefficients of 𝒫_{k−1}, cur = of 𝒫_k, as κ_0 = 1, κ_1, …
    let mut prev = vec![ONE];
    let mut cur = vec![ONE];
    for (k, bt) in btilde.iter().enumerate() {
        let k = k + 1; // building 𝒫_{k+1}
        let len = (k + 1) / 2 + 1;
        let mut next = vec![ZERO; len];
        for (l, slot) in next.iter_mut().enumerate() {
            let mut v = cur.get(l).copied().unwrap_or(ZERO);
            if l >= 1 {
                v -= bt * prev.get(l - 1).copied().unwrap_or(ZERO);
            }
            *slot = v;
        }
        prev = cur;
        cur = next;
    }
    CharPolyCoeffs { n, kappa: cur[1..].to_vec() }
}

/// Coefficients by the nested sums
/// `κ_ℓ = (−1)^ℓ Σ_{γ₁=2ℓ−1}^{n−1} b̃_{γ₁} Σ_{γ₂=2ℓ−3}^{γ₁−2} b̃_{γ₂} ⋯`,
/// evaluated innermost-first with prefix sums.
pub fn coeffs_nested_sum(btilde: &[C64]) -> CharPolyCoeffs {
    let n = btilde.len() + 1;
    let kappa = nested_sums(btilde, ZERO, |a, b| a + b, |a, b| a * b);
    let kappa = kappa.into_iter().enumerate().map(|(l, k)| if l % 2 == 0 { -k } else { k }).collect();
    CharPolyCoeffs { n, kappa }
}

/// `N_ℓ(n−1)` for ℓ = 1..⌊n/2⌋ where
/// `N_1(g) = Σ_{γ=1}^{g} w_γ`, `N_m(g) = Σ_{γ=2m−1}^{g} w_γ N_{m−1}(γ−2)`.
fn nested_sums<T: Copy>(w: &[T], zero: T, add: impl Fn(T, T) -> T, mul: impl Fn(T, T) -> T) -> Vec<T> {
    let top = w.len(); // = n − 1
    let lmax = (top + 1) / 2;
    // level[g] = N_m(g) for g = 0..=top
    let mut level: Vec<T> = Vec::with_capacity(top + 1);
    let mut acc = zero;
    level.push(zero);
    for g in 1..=top {
        acc = add(acc, w[g - 1]);
        level.push(acc);
    }
    let mut out = vec![level[top]];
    for m in 2..=lmax {
        let mut next = vec![zero; top + 1];
        let mut acc = zero;
        for g in (2 * m - 1)..=top {
            acc = add(acc, mul(w[g - 1], level[g - 2]));
            next[g] = acc;
        }
        out.push(next[top]);
        level = next;
    }
    out
}

/// Brute-force oracle: sum over all non-adjacent index subsets (n ≤ 24).
pub fn coeffs_subset_oracle(btilde: &[C64]) -> Result<CharPolyCoeffs> {
    let n = btilde.len() + 1;
    if n > 24 {
        return Err(Error::Budget(format!("subset enumeration limited to n ≤ 24, got {n}")));
    }
    let m = btilde.len();
    let mut kappa = vec![ZERO; n / 2];
    for mask in 1u32..(1u32 << m) {
        if mask & (mask >> 1) != 0 {
            continue;
        }
        let l = mask.count_ones() as usize;
        let mut prod = ONE;
        for (j, bt) in btilde.iter().enumerate() {
            if mask >> j & 1 == 1 {
                prod *= bt;
            }
        }
        kappa[l - 1] += if l % 2 == 1 { -prod } else { prod };
    }
    Ok(CharPolyCoeffs { n, kappa })
}

/// Complex number with a separate power-of-two exponent: `mant · 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledC64 {
    pub mant: C64,
    pub exp2: i64,
}

impl ScaledC64 {
    /// Convert to a plain complex number (may overflow to ∞ or underflow to 0).
    pub fn to_c64(self) -> C64 {
        self.mant * pow2(self.exp2)
    }

    /// ln |value|.
    pub fn ln_abs(self) -> f64 {
        self.mant.norm().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }
}

fn pow2(e: i64) -> f64 {
    let mut f = 1.0f64;
    let mut e = e;
    while e > 1000 {
        f *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        f *= 2f64.powi(-1000);
        e += 1000;
    }
    f * 2f64.powi(e as i32)
}

const BIG: f64 = 1.0e150;
const BIG_EXP: i64 = 498; // 2^498 ≈ 1.6e150

/// `det(z·1 − M)` via `p_{k+1} = (z − d_k) p_k − b̃ p_{k−1}`, kept in scaled form
/// so that it neither overflows nor underflows for n in the thousands.
pub fn eval_charpoly(m: &TridiagMatrix, z: C64) -> ScaledC64 {
    let bt = m.btilde_storage();
    eval_scaled(&m.diag, &bt, z)
}

/// Scaled determinant recurrence on raw diagonal / `b̃` (storage order) slices.
pub fn eval_scaled(diag: &[C64], bt: &[C64], z: C64) -> ScaledC64 {
    let mut pm = ONE; // p_{k−1}
    let mut p = z - diag[0]; // p_k
    let mut exp2 = 0i64;
    let down = pow2(-BIG_EXP);
    let up = pow2(BIG_EXP);
    for k in 1..diag.len() {
        let next = (z - diag[k]) * p - bt[k - 1] * pm;
        pm = p;
        p = next;
        let mag = p.norm_sqr().max(pm.norm_sqr());
        if mag > BIG * BIG {
            p *= down;
            pm *= down;
            exp2 += BIG_EXP;
        } else if mag < 1.0 / (BIG * BIG) && mag > 0.0 {
            p *= up;
            pm *= up;
            exp2 -= BIG_EXP;
        }
    }
    ScaledC64 { mant: p, exp2 }
}

/// Newton correction `𝒫(z)/𝒫′(z)` from the joint recurrence for `p` and `p′`.
/// Only the ratio is needed, so both sequences are rescaled together.
pub fn newton_correction(diag: &[C64], bt: &[C64], z: C64) -> C64 {
    let mut pm = ONE;
    let mut p = z - diag[0];
    let mut dpm = ZERO;
    let mut dp = ONE;
    let down = pow2(-BIG_EXP);
    let up = pow2(BIG_EXP);
    for k in 1..diag.len() {
        let zk = z - diag[k];
        let next = zk * p - bt[k - 1] * pm;
        let dnext = p + zk * dp - bt[k - 1] * dpm;
        pm = p;
        p = next;
        dpm = dp;
        dp = dnext;
        let mag = p.norm_sqr().max(pm.norm_sqr()).max(dp.norm_sqr()).max(dpm.norm_sqr());
        if mag > BIG * BIG {
            p *= down;
            pm *= down;
            dp *= down;
            dpm *= down;
        } else if mag < 1.0 / (BIG * BIG) && mag > 0.0 {
            p *= up;
            pm *= up;
            dp *= up;
            dpm *= up;
        }
    }
    p / dp
}

/// Coefficient variances of the `D` ensemble: `Var κ_ℓ = Σ γ₁² Σ γ₂² ⋯` over
/// non-adjacent index sets, exactly in integers.
pub fn var_kappa_d(n: usize) -> Result<Vec<u128>> {
    if n < 2 {
        return Err(Error::Domain(format!("var_kappa_d needs n ≥ 2, got {n}")));
    }
    let w: Vec<Option<u128>> = (1..n as u128).map(|g| Some(g * g)).collect();
    collect_exact(nested_sums(&w, Some(0), checked_add, checked_mul), n)
}

fn checked_add(a: Option<u128>, b: Option<u128>) -> Option<u128> {
    a?.checked_add(b?)
}

fn checked_mul(a: Option<u128>, b: Option<u128>) -> Option<u128> {
    a?.checked_mul(b?)
}

fn collect_exact(v: Vec<Option<u128>>, n: usize) -> Result<Vec<u128>> {
    v.into_iter().map(|x| x.ok_or_else(|| Error::Budget(format!("integer overflow in exact variances at n = {n}")))).collect()
}

/// Coefficient variances of the `G` ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceG {
    pub n: usize,
    pub beta: f64,
    /// Integer nested sums `Σγ₁Σγ₂⋯` (the variance times β^ℓ).
    pub nested: Vec<u128>,
    /// The factorial closed form `n!/(2^ℓ ℓ!(n−2ℓ)!)`.
    pub closed: Vec<u128>,
}

impl VarianceG {
    /// `Var κ_ℓ` as floats.
    pub fn values(&self) -> Vec<f64> {
        self.nested.iter().enumerate().map(|(l, v)| *v as f64 / self.beta.powi(l as i32 + 1)).collect()
    }
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Both evaluations of the `G`-ensemble coefficient variances.
pub fn var_kappa_g(n: usize, beta: f64) -> Result<VarianceG> {
    if n < 2 || !(beta > 0.0) {
        return Err(Error::Domain(format!("var_kappa_g needs n ≥ 2 and β > 0, got n = {n}, β = {beta}")));
    }
    let w: Vec<Option<u128>> = (1..n as u128).map(Some).collect();
    let nested = collect_exact(nested_sums(&w, Some(0), checked_add, checked_mul), n)?;
    let closed = (1..=n / 2)
        .map(|l| {
            let num = factorial(n)?;
            let den = factorial(l)?.checked_mul(factorial(n - 2 * l)?)?.checked_mul(1u128 << l)?;
            Some(num / den)
        })
        .collect::<Vec<_>>();
    let closed = collect_exact(closed, n)?;
    Ok(VarianceG { n, beta, nested, closed })
}

/// Polynomial with real coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    pub coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().expect("non-empty") == 0.0 {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `x·p + c·q`.
    fn shift_add(p: &Self, c: f64, q: &Self) -> Self {
        let mut out = vec![0.0; (p.coeffs.len() + 1).max(q.coeffs.len())];
        for (i, a) in p.coeffs.iter().enumerate() {
            out[i + 1] += a;
        }
        for (i, b) in q.coeffs.iter().enumerate() {
            out[i] += c * b;
        }
        Self::new(out)
    }
}

fn q_recurrence(n: usize, weight: impl Fn(usize) -> f64) -> RealPolynomial {
    let mut prev = RealPolynomial::new(vec![1.0]);
    if n == 0 {
        return prev;
    }
    let mut cur = RealPolynomial::new(vec![0.0, 1.0]);
    for k in 1..n {
        let next = RealPolynomial::shift_add(&cur, weight(k), &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `Q_n^D` from `Q_{k+1} = xQ_k + k²Q_{k−1}`, `Q_0 = 1`, `Q_1 = x`.
pub fn q_poly_d(n: usize) -> RealPolynomial {
    q_recurrence(n, |k| (k * k) as f64)
}

/// `Q_n^G` from `Q_{k+1} = xQ_k + (k/β)Q_{k−1}`.
pub fn q_poly_g(n: usize, beta: f64) -> RealPolynomial {
    q_recurrence(n, |k| k as f64 / beta)
}

/// `Q_n^G` from the closed form `Σ_j n!/(j!(n−2j)!(2β)^j) x^{n−2j}`.
pub fn q_poly_g_closed(n: usize, beta: f64) -> RealPolynomial {
    let mut c = vec![0.0; n + 1];
    let ln_fact = |k: usize| crate::specfun::gamma_ln(k as f64 + 1.0).expect("positive argument");
    for j in 0..=n / 2 {
        let ln = ln_fact(n) - ln_fact(j) - ln_fact(n - 2 * j) - j as f64 * (2.0 * beta).ln();
        c[n - 2 * j] = ln.exp();
    }
    RealPolynomial::new(c)
}

/// Double-double number for the cancellation-prone closed form.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from_f64(x: f64) -> Self {
        Dd(x, 0.0)
    }

    fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        // Exact residual: |x − hi| < 2^75, representable after conversion.
        let lo = if (hi as u128) >= x { -(((hi as u128) - x) as f64) } else { (x - hi as u128) as f64 };
        Dd::two_sum(hi, lo)
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Dd(s, e)
    }

    fn add(self, o: Self) -> Self {
        let s = Dd::two_sum(self.0, o.0);
        let t = Dd::two_sum(self.1, o.1);
        let r = Dd::two_sum(s.0, s.1 + t.0);
        Dd::two_sum(r.0, r.1 + t.1)
    }

    fn mul(self, o: Self) -> Self {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        Dd::two_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }

    fn neg(self) -> Self {
        Dd(-self.0, -self.1)
    }

    fn to_f64(self) -> f64 {
        self.0 + self.1
    }
}

/// `Q_n^D(x) = Σ_{k=0}^n (−1)^{n−k} (n!)² 2^k / ((k!)²(n−k)!) · ((1+x)/2)_k`.
///
/// The alternating sum cancels heavily (by ~10⁷ at n = 20), so integer
/// coefficients are formed exactly and the sum is carried in double-double.
pub fn q_poly_d_closed(n: usize, x: f64) -> Result<f64> {
    let nf = factorial(n).ok_or_else(|| Error::Budget(format!("n = {n} too large for the exact closed form")))?;
    let half = Dd::from_f64(0.5).mul(Dd::two_sum(1.0, x));
    let mut poch = Dd::from_f64(1.0);
    let mut sum = Dd::from_f64(0.0);
    let mut binom: u128 = 1; // C(n, k)
    let mut falling: u128 = 1; // n!/k! … built as n!/k! = nf / k!
    for k in 0..=n {
        if k > 0 {
            binom = binom * (n - k + 1) as u128 / k as u128;
            poch = poch.mul(half.add(Dd::from_f64((k - 1) as f64)));
        }
        falling = if k == 0 { nf } else { falling / k as u128 };
        let coeff = binom
            .checked_mul(falling)
            .and_then(|c| c.checked_mul(1u128 << k))
            .ok_or_else(|| Error::Budget(format!("coefficient overflow at n = {n}")))?;
        let term = Dd::from_u128(coeff).mul(poch);
        sum = sum.add(if (n - k) % 2 == 1 { term.neg() } else { term });
    }
    Ok(sum.to_f64())
}
