//! Walsh functions in base `b`, Walsh coefficients of Bernoulli polynomials and
//! of the Sobolev kernel, and the sparsity/decay oracles built on them.
//!
//! Single coefficients are computed exactly: `wal_k` is constant on the cells of
//! `[0,1)` of length `b^{-A}`, the polynomial integrals over cells are exact
//! rationals, and grouping the cells by the exponent of `ω_b` leaves a value
//! `Σ_g q_g ω_b^g` with rational `q_g`. Only the final conversion to binary64 rounds.

mod cyclo;
mod table;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::bernoulli::{self, factorial, scaled_integer_poly, TABLE_DEGREE};
use crate::digits::{DigitVector, MultiIndex};
use crate::error::{Error, Result};
use crate::ff::PrimeBase;
use crate::nets::NetPoint;

pub(crate) use cyclo::Cyclo;
pub use table::KernelWalshTable;

/// Largest `b^A` for which single coefficients are computed exactly (cost `b^{2A}`).
pub const MAX_EXACT_CELLS: u64 = 1 << 13;

/// A Walsh coefficient with a certified bound on its numerical error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalshCoefficient {
    pub value: Complex64,
    pub abs_error: f64,
}

impl Serialize for WalshCoefficient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("re", &self.value.re)?;
        m.serialize_entry("im", &self.value.im)?;
        m.serialize_entry("abs_error", &self.abs_error)?;
        m.end()
    }
}

impl WalshCoefficient {
    pub const ZERO: WalshCoefficient = WalshCoefficient {
        value: Complex64 { re: 0.0, im: 0.0 },
        abs_error: 0.0,
    };

    /// JSON shape `{re, im, abs_error}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"re": self.value.re, "im": self.value.im, "abs_error": self.abs_error})
    }

    /// True when `|value|` is certainly below `tol`.
    pub fn certainly_below(&self, tol: f64) -> bool {
        self.value.norm() + self.abs_error < tol
    }
}

/// A Walsh index `k` with its nonzero digits `κ_1, …, κ_v` at positions `a_1 > … > a_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshIndex {
    k: DigitVector,
    positions: Vec<(usize, u32)>,
}

impl WalshIndex {
    pub fn new(k: DigitVector) -> Self {
        let positions = k.positions();
        WalshIndex { k, positions }
    }

    pub fn from_u128(base: PrimeBase, k: u128) -> Self {
        Self::new(DigitVector::from_u128(base, k))
    }

    pub fn k(&self) -> &DigitVector {
        &self.k
    }

    pub fn base(&self) -> PrimeBase {
        self.k.base()
    }

    /// `(a_i, κ_i)` pairs, most significant first.
    pub fn positions(&self) -> &[(usize, u32)] {
        &self.positions
    }

    /// `a_1`, the position of the leading digit (0 for `k = 0`).
    pub fn a1(&self) -> usize {
        self.k.len()
    }
}

/// Exponent `Σ_i κ_i ξ_{i+1} mod b` of `wal_k(x)`; `x_digits[i]` is `ξ_{i+1}`.
pub fn wal_exponent(k: &DigitVector, x_digits: &[u32]) -> u32 {
    let b = k.base();
    k.digits()
        .iter()
        .zip(x_digits)
        .fold(0u32, |acc, (&kap, &xi)| b.add(acc, b.mul(kap, xi)))
}

/// `ω_b^g` for `g = 0..b`; conjugate pairs are exact mirrors and `b = 2` is exact.
pub(crate) fn omega_powers(b: PrimeBase) -> Arc<Vec<Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap();
    guard
        .entry(b.get())
        .or_insert_with(|| {
            let p = b.get() as usize;
            let mut w = vec![Complex64::new(1.0, 0.0); p];
            for g in 1..p {
                if 2 * g == p {
                    w[g] = Complex64::new(-1.0, 0.0);
                } else if 2 * g < p {
                    let t = 2.0 * std::f64::consts::PI * g as f64 / p as f64;
                    w[g] = Complex64::new(t.cos(), t.sin());
                } else {
                    w[g] = w[p - g].conj();
                }
            }
            Arc::new(w)
        })
        .clone()
}

/// `wal_k(x)` for `x = Σ ξ_i b^{-i}` given by its digits.
pub fn wal(k: &WalshIndex, x_digits: &[u32]) -> Complex64 {
    omega_powers(k.base())[wal_exponent(&k.k, x_digits) as usize]
}

/// `Π_j wal_{k_j}(x_j)`.
pub fn wal_multi(k: &MultiIndex, x: &NetPoint) -> Result<Complex64> {
    if k.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: x.dim(),
        });
    }
    if k.base() != x.base() {
        return Err(Error::BaseMismatch {
            left: k.base().get(),
            right: x.base().get(),
        });
    }
    let b = k.base();
    let e = k
        .components()
        .iter()
        .enumerate()
        .fold(0u32, |acc, (j, kj)| b.add(acc, wal_exponent(kj, x.coord_digits(j))));
    Ok(omega_powers(b)[e as usize])
}

/// Residue `e_k(c)` of every cell `c < b^A` at level `A`: `wal_k` equals `ω^{e_k(c)}`
/// on `[c b^{-A}, (c+1) b^{-A})`.
pub(crate) fn cell_exponents(k: &DigitVector, level: usize) -> Vec<u32> {
    let b = k.base();
    let mut e = vec![0u32];
    e.reserve(b.get().pow(level as u32) as usize);
    // digit j of c is ξ_{A-j}, paired with κ_{A-1-j}
    for j in 0..level {
        let kap = k.digit(level - 1 - j);
        let len = e.len();
        for t in 1..b.get() {
            let shift = b.mul(t, kap);
            for c in 0..len {
                let v = b.add(e[c], shift);
                e.push(v);
            }
        }
    }
    e
}

pub(crate) fn cells(base: PrimeBase, level: usize) -> Result<usize> {
    match base.checked_pow(level as u32) {
        Some(m) if m <= MAX_EXACT_CELLS as u128 => Ok(m as usize),
        _ => Err(Error::guard(
            "exact Walsh coefficient",
            format!("{}^{} cells", base.get(), level),
            MAX_EXACT_CELLS,
        )),
    }
}

/// Integer cell integrals of `B_r / r!` at level `A`: `(P(c+1) - P(c))_c` and the
/// common denominator.
pub(crate) struct CellIntegrals {
    pub(crate) num: Vec<BigInt>,
    pub(crate) den: BigInt,
}

type CacheKey = (u32, usize, usize);

pub(crate) fn cell_integrals(base: PrimeBase, level: usize, r: usize) -> Arc<CellIntegrals> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<CellIntegrals>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(base.get(), level, r)) {
        return v.clone();
    }
    let m = BigInt::from(base.get()).pow(level as u32);
    let mu = m.to_usize().unwrap();
    // ∫_{c/M}^{(c+1)/M} B_r/r! = [B_{r+1}((c+1)/M) - B_{r+1}(c/M)] / (r+1)!
    let (poly, den) = scaled_integer_poly(r + 1, &m);
    let vals: Vec<BigInt> = (0..=mu).map(|x| bernoulli::eval_int(&poly, &BigInt::from(x))).collect();
    let num = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
    let den = den * m.pow(r as u32 + 1) * factorial(r + 1);
    let v = Arc::new(CellIntegrals { num, den });
    cache.lock().unwrap().insert((base.get(), level, r), v.clone());
    v
}

/// Second differences `G_δ` of `B̃_{r+2}/(r+2)!` at level `A`:
/// `∫∫` over the cell pair `(c, d)` of `B̃_r(x-y)/r!` equals `G_{(c-d) mod M}`.
pub(crate) fn periodic_cell_integrals(base: PrimeBase, level: usize, r: usize) -> Arc<CellIntegrals> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<CellIntegrals>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(base.get(), level, r)) {
        return v.clone();
    }
    let m = BigInt::from(base.get()).pow(level as u32);
    let mu = m.to_usize().unwrap();
    let (poly, den) = scaled_integer_poly(r + 2, &m);
    let q: Vec<BigInt> = (0..mu).map(|x| bernoulli::eval_int(&poly, &BigInt::from(x))).collect();
    let num = (0..mu)
        .map(|d| {
            let up = &q[(d + 1) % mu];
            let down = &q[(d + mu - 1) % mu];
            up - BigInt::from(2) * &q[d] + down
        })
        .collect();
    let den = den * m.pow(r as u32 + 2) * factorial(r + 2);
    let v = Arc::new(CellIntegrals { num, den });
    cache.lock().unwrap().insert((base.get(), level, r), v.clone());
    v
}

/// Exact `b̂_r(k) = ∫ B_r(x)/r! · conj(wal_k(x)) dx` as a cyclotomic value.
pub(crate) fn bernoulli_coeff_exact(r: usize, k: &DigitVector) -> Result<Cyclo> {
    let base = k.base();
    let level = k.len();
    cells(base, level)?;
    let ci = cell_integrals(base, level, r);
    let e = cell_exponents(k, level);
    let p = base.get() as usize;
    let mut res = vec![BigInt::zero(); p];
    for (c, v) in ci.num.iter().enumerate() {
        // conj(ω^e) = ω^{-e}
        let g = (p - e[c] as usize) % p;
        res[g] += v;
    }
    Ok(Cyclo::from_integers(base, res, &ci.den))
}

/// Exact `b̂_{r,per}(k,l) = ∫∫ B̃_r(x-y)/r! · conj(wal_k(x)) wal_l(y) dx dy`.
pub(crate) fn periodic_coeff_exact(r: usize, k: &DigitVector, l: &DigitVector) -> Result<Cyclo> {
    let base = k.base();
    if l.base() != base {
        return Err(Error::BaseMismatch {
            left: base.get(),
            right: l.base().get(),
        });
    }
    let level = k.len().max(l.len());
    let m = cells(base, level)?;
    let gi = periodic_cell_integrals(base, level, r);
    let ek = cell_exponents(k, level);
    let el = cell_exponents(l, level);
    let p = base.get() as usize;
    // count[δ·p + g] = #{(c, d) : c - d ≡ δ (mod M), e_l(d) - e_k(c) ≡ g (mod b)}
    let mut count = vec![0u64; m * p];
    for c in 0..m {
        let neg = (p - ek[c] as usize) % p;
        for d in 0..m {
            let delta = if c >= d { c - d } else { c + m - d };
            let g = (el[d] as usize + neg) % p;
            count[delta * p + g] += 1;
        }
    }
    let mut res = vec![BigInt::zero(); p];
    for (delta, gv) in gi.num.iter().enumerate() {
        if gv.is_zero() {
            continue;
        }
        for (g, slot) in res.iter_mut().enumerate() {
            let n = count[delta * p + g];
            if n != 0 {
                *slot += gv * BigInt::from(n);
            }
        }
    }
    Ok(Cyclo::from_integers(base, res, &gi.den))
}

/// Exact `K̂_α(k,l)` as a cyclotomic value.
pub(crate) fn kernel_coeff_exact(alpha: usize, k: &DigitVector, l: &DigitVector) -> Result<Cyclo> {
    check_alpha(alpha)?;
    let base = k.base();
    let mut acc = Cyclo::zero(base);
    for tau in 0..=alpha {
        let bk = bernoulli_coeff_exact(tau, k)?;
        if bk.is_zero() {
            continue;
        }
        let bl = bernoulli_coeff_exact(tau, l)?;
        acc.add_assign(&bk.mul(&bl.conj()));
    }
    let per = periodic_coeff_exact(2 * alpha, k, l)?;
    if alpha % 2 == 1 {
        acc.add_assign(&per);
    } else {
        acc.sub_assign(&per);
    }
    Ok(acc)
}

pub(crate) fn check_alpha(alpha: usize) -> Result<()> {
    if alpha < 2 {
        return Err(Error::invalid(format!("alpha must be at least 2, got {alpha}")));
    }
    if 2 * alpha > bernoulli::MAX_DEGREE {
        return Err(Error::invalid(format!("alpha = {alpha} exceeds the supported maximum 8")));
    }
    Ok(())
}

/// `b̂_r(k)`: the `k`-th Walsh coefficient of `B_r / r!`.
pub fn walsh_coeff_bernoulli(r: usize, k: &WalshIndex) -> Result<WalshCoefficient> {
    if r >= TABLE_DEGREE {
        return Err(Error::invalid(format!("degree {r} too large")));
    }
    Ok(bernoulli_coeff_exact(r, &k.k)?.finalize())
}

/// `b̂_{r,per}(k,l)`, the Walsh coefficient of `B̃_r(x-y)/r!` with `B̃_r` the
/// 1-periodic extension; `r >= 2`.
pub fn walsh_coeff_bernoulli_periodic(r: usize, k: &WalshIndex, l: &WalshIndex) -> Result<WalshCoefficient> {
    if r < 2 {
        return Err(Error::invalid("the periodic coefficient needs r >= 2"));
    }
    if r + 2 > TABLE_DEGREE {
        return Err(Error::invalid(format!("degree {r} too large")));
    }
    Ok(periodic_coeff_exact(r, &k.k, &l.k)?.finalize())
}

/// `K̂_α(k,l) = Σ_{τ=0}^{α} b̂_τ(k) conj(b̂_τ(l)) + (-1)^{α+1} b̂_{2α,per}(k,l)`.
pub fn kernel_walsh_coeff_1d(alpha: usize, k: &WalshIndex, l: &WalshIndex) -> Result<WalshCoefficient> {
    Ok(kernel_coeff_exact(alpha, &k.k, &l.k)?.finalize())
}

/// `K̂_{α,s}(k,l) = Π_j K̂_α(k_j, l_j)`, multiplied exactly before rounding.
pub fn kernel_walsh_coeff_sd(alpha: usize, k: &MultiIndex, l: &MultiIndex) -> Result<WalshCoefficient> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: l.dim(),
        });
    }
    let mut acc = Cyclo::one(k.base());
    for (kj, lj) in k.components().iter().zip(l.components()) {
        let f = kernel_coeff_exact(alpha, kj, lj)?;
        if f.is_zero() {
            return Ok(WalshCoefficient::ZERO);
        }
        acc = acc.mul(&f);
    }
    Ok(acc.finalize())
}

/// `b̂_{r,per}(k,l)` for `r > 2`, `k, l >= 1`, through the recursion in `r`:
///
/// `b̂_{r,per}(k,l) = -b^{-a_1} [ b̂_{r-1,per}(k',l)/(1-ω^{-κ_1})
///   + (1/2 + 1/(ω^{-κ_1}-1)) b̂_{r-1,per}(k,l)
///   + Σ_{c≥1} Σ_{θ=1}^{b-1} b̂_{r-1,per}(θ b^{c+a_1-1} + k, l) / (b^c (ω^θ-1)) ]`
///
/// with `k' = k - κ_1 b^{a_1-1}`. The `c`-sum is cut at the first `C` whose tail
/// bound is below `tol` (or where the level would exceed `max_level`); the tail
/// bound is included in `abs_error`. The inner coefficients use the exact route.
pub fn walsh_coeff_periodic_recursive(
    r: usize,
    k: &WalshIndex,
    l: &WalshIndex,
    tol: f64,
    max_level: usize,
) -> Result<WalshCoefficient> {
    if r <= 2 {
        return Err(Error::invalid("the recursion needs r > 2"));
    }
    if k.k.is_zero() || l.k.is_zero() {
        return Err(Error::invalid("the recursion needs k, l >= 1"));
    }
    let base = k.base();
    let p = base.get() as usize;
    let bf = base.get() as f64;
    let w = omega_powers(base);
    let (a1, kappa1) = k.positions[0];
    let one = Complex64::new(1.0, 0.0);
    let kp = {
        let mut d = k.k.digits().to_vec();
        d[a1 - 1] = 0;
        DigitVector::from_digits_unchecked(base, d)
    };

    // variation of the y-integrated B̃_{r-1}/(r-1)!, times Σ_θ 1/|ω^θ - 1|
    let tv = bernoulli::max_abs(r - 2) / factorial(r - 2).to_f64().unwrap();
    let theta_sum: f64 = (1..p).map(|t| 1.0 / (w[t] - one).norm()).sum();
    let tail = |cut: usize| {
        tv * bf.powi(1 - a1 as i32) * theta_sum * bf.powi(-2 * (cut as i32 + 1)) / (1.0 - bf.powi(-2))
    };

    let mut cut = 0;
    while tail(cut) > tol && a1 + cut < max_level {
        cut += 1;
    }

    let u = f64::EPSILON / 2.0;
    let mut sum = Complex64::zero();
    let mut err = 0.0;
    let mut add = |coef: Complex64, x: WalshCoefficient| {
        let t = coef * x.value;
        sum += t;
        err += coef.norm() * x.abs_error + 8.0 * u * (t.norm() + coef.norm() * x.value.norm());
    };

    let wk = w[(p - kappa1 as usize) % p];
    add(one / (one - wk), periodic_coeff_exact(r - 1, &kp, &l.k)?.finalize());
    add(
        Complex64::new(0.5, 0.0) + one / (wk - one),
        periodic_coeff_exact(r - 1, &k.k, &l.k)?.finalize(),
    );
    for c in 1..=cut {
        for theta in 1..p {
            let mut d = k.k.digits().to_vec();
            d.resize(c + a1, 0);
            d[c + a1 - 1] = theta as u32;
            let kt = DigitVector::from_digits_unchecked(base, d);
            let coef = one / ((w[theta] - one) * bf.powi(c as i32));
            add(coef, periodic_coeff_exact(r - 1, &kt, &l.k)?.finalize());
        }
    }
    let scale = -bf.powi(-(a1 as i32));
    let value = sum * scale;
    let abs_error = (err + tail(cut)) * bf.powi(-(a1 as i32)) + 4.0 * u * value.norm();
    Ok(WalshCoefficient { value, abs_error })
}

/// Empirical decay of the diagonal kernel coefficients, grouped by the leading
/// digit position `a_1`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayProfile {
    pub base: u32,
    pub alpha: usize,
    /// `(a_1, max over k with that a_1 of |K̂_α(k,k)| b^{2μ_α(k)})`.
    pub blocks: Vec<(usize, f64)>,
    /// The maximum over all blocks: the empirical decay constant.
    pub constant: f64,
}

/// `max |K̂_α(k,k)| · b^{2μ_α(k)}` over `0 < k < b^{max_a1}`, per block of equal `a_1`.
/// Each value is an upper bound (value plus certified error).
pub fn decay_profile(base: PrimeBase, alpha: usize, max_a1: usize) -> Result<DecayProfile> {
    use rayon::prelude::*;
    check_alpha(alpha)?;
    cells(base, max_a1)?;
    let total = base.get().pow(max_a1 as u32);
    let per_k: Vec<(usize, f64)> = (1..total)
        .into_par_iter()
        .map(|k| {
            let k = DigitVector::from_u128(base, k as u128);
            let c = kernel_coeff_exact(alpha, &k, &k)?.finalize();
            let scale = (base.get() as f64).powi(2 * k.mu_alpha(alpha) as i32);
            Ok((k.len(), (c.value.norm() + c.abs_error) * scale))
        })
        .collect::<Result<_>>()?;
    let mut blocks: Vec<(usize, f64)> = (1..=max_a1).map(|a| (a, 0.0)).collect();
    for (a, v) in per_k {
        blocks[a - 1].1 = blocks[a - 1].1.max(v);
    }
    let constant = blocks.iter().map(|b| b.1).fold(0.0, f64::max);
    Ok(DecayProfile {
        base: base.get(),
        alpha,
        blocks,
        constant,
    })
}

/// Least-squares slope of `log_b(block max)` against `a_1` over `a_1 ∈ [from, to]`.
pub fn decay_trend(profile: &DecayProfile, from: usize, to: usize) -> f64 {
    let pts: Vec<(f64, f64)> = profile
        .blocks
        .iter()
        .filter(|(a, v)| (from..=to).contains(a) && *v > 0.0)
        .map(|&(a, v)| (a as f64, v.ln() / (profile.base as f64).ln()))
        .collect();
    crate::sweep::least_squares_slope(&pts)
}

#[cfg(test)]
mod tests;
