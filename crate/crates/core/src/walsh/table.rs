use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{cell_integrals, check_alpha, omega_powers, periodic_cell_integrals};
use crate::error::{Error, Result};
use crate::ff::PrimeBase;

/// Largest `b^A` accepted by [`KernelWalshTable`]; the table holds `b^{2A}` complex values.
pub const MAX_TABLE_CELLS: usize = 2048;

/// All kernel Walsh coefficients `K̂_α(k,l)` with `k, l < b^A`, computed in
/// binary64 by base-`b` fast Walsh transforms of the exact cell integrals.
///
/// `abs_error` bounds the error of every entry.
#[derive(Clone, Debug)]
pub struct KernelWalshTable {
    base: PrimeBase,
    alpha: usize,
    level: usize,
    m: usize,
    // per[k*m + l] = b̂_{2α,per}(k,l)
    per: Vec<Complex64>,
    // bt[τ][k] = b̂_τ(k)
    bt: Vec<Vec<Complex64>>,
    abs_error: f64,
    max_abs: f64,
}

fn to_f64(n: &num_bigint::BigInt, d: &num_bigint::BigInt) -> f64 {
    BigRational::new(n.clone(), d.clone()).to_f64().unwrap()
}

fn digit_reversal(b: usize, level: usize) -> Vec<usize> {
    let m = b.pow(level as u32);
    (0..m)
        .map(|k| {
            let (mut k, mut r) = (k, 0);
            for _ in 0..level {
                r = r * b + k % b;
                k /= b;
            }
            r
        })
        .collect()
}

/// `X[k] = Σ_c x[c] ω^{±e_k(c)}` in place, with `rev` the digit reversal.
fn walsh_transform(x: &mut [Complex64], b: usize, level: usize, w: &[Complex64], conj: bool, rev: &[usize]) {
    let m = x.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); b];
    let mut stride = 1;
    for _ in 0..level {
        let span = stride * b;
        for block in (0..m).step_by(span) {
            for off in 0..stride {
                let i = block + off;
                for (kap, out) in buf.iter_mut().enumerate() {
                    let mut acc = x[i];
                    for t in 1..b {
                        let g = kap * t % b;
                        let tw = if conj { w[g].conj() } else { w[g] };
                        acc += x[i + t * stride] * tw;
                    }
                    *out = acc;
                }
                for (kap, v) in buf.iter().enumerate() {
                    x[i + kap * stride] = *v;
                }
            }
        }
        stride = span;
    }
    let tmp = x.to_vec();
    for (k, slot) in x.iter_mut().enumerate() {
        *slot = tmp[rev[k]];
    }
}

fn transpose(a: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            a.swap(i * m + j, j * m + i);
        }
    }
}

impl KernelWalshTable {
    pub fn new(base: PrimeBase, alpha: usize, level: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let b = base.get() as usize;
        let m = match base.checked_pow(level as u32) {
            Some(m) if m <= MAX_TABLE_CELLS as u128 => m as usize,
            _ => {
                return Err(Error::guard(
                    "kernel Walsh table",
                    format!("{}^{} cells", b, level),
                    MAX_TABLE_CELLS,
                ))
            }
        };
        let w = omega_powers(base);
        let rev = digit_reversal(b, level);
        let u = f64::EPSILON / 2.0;
        let eta = (b as f64 + 6.0) * u;

        let mut bt = Vec::with_capacity(alpha + 1);
        let mut bt_err = Vec::with_capacity(alpha + 1);
        let mut bt_max = Vec::with_capacity(alpha + 1);
        for tau in 0..=alpha {
            let ci = cell_integrals(base, level, tau);
            let mut v: Vec<Complex64> = ci.num.iter().map(|n| Complex64::new(to_f64(n, &ci.den), 0.0)).collect();
            let l1: f64 = v.iter().map(|z| z.re.abs()).sum();
            walsh_transform(&mut v, b, level, &w, true, &rev);
            let err = (u + level as f64 * eta) * 1.02 * l1;
            bt_max.push(v.iter().map(|z| z.norm()).fold(0.0, f64::max) + err);
            bt_err.push(err);
            bt.push(v);
        }

        let gi = periodic_cell_integrals(base, level, 2 * alpha);
        let g: Vec<f64> = gi.num.iter().map(|n| to_f64(n, &gi.den)).collect();
        let g_l1: f64 = g.iter().map(|x| x.abs()).sum();
        let mut per = vec![Complex64::new(0.0, 0.0); m * m];
        per.par_chunks_mut(m).enumerate().for_each(|(c, row)| {
            for (d, slot) in row.iter_mut().enumerate() {
                *slot = Complex64::new(g[(c + m - d) % m], 0.0);
            }
            walsh_transform(row, b, level, &w, false, &rev);
        });
        transpose(&mut per, m);
        per.par_chunks_mut(m).for_each(|col| walsh_transform(col, b, level, &w, true, &rev));
        transpose(&mut per, m);
        let per_err = (u + 2.0 * level as f64 * eta) * 1.02 * m as f64 * g_l1;
        let per_max = per.iter().map(|z| z.norm()).fold(0.0, f64::max) + per_err;

        let sq: f64 = bt_max.iter().map(|x| x * x).sum();
        let abs_error = per_err
            + bt_err.iter().zip(&bt_max).map(|(e, mx)| 2.0 * mx * e).sum::<f64>()
            + (2.0 * alpha as f64 + 6.0) * u * (sq + per_max);
        Ok(KernelWalshTable {
            base,
            alpha,
            level,
            m,
            per,
            bt,
            abs_error,
            max_abs: sq + per_max,
        })
    }

    pub fn base(&self) -> PrimeBase {
        self.base
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of indices per axis, `b^A`.
    pub fn size(&self) -> usize {
        self.m
    }

    /// Uniform bound on the error of every entry.
    pub fn abs_error(&self) -> f64 {
        self.abs_error
    }

    /// Bound on `|K̂_α(k,l)|` over the table.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// `K̂_α(k,l)` for `k, l < b^A`.
    #[inline]
    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        let mut acc = self.per[k * self.m + l];
        if self.alpha % 2 == 0 {
            acc = -acc;
        }
        for row in &self.bt {
            acc += row[k] * row[l].conj();
        }
        acc
    }

    /// `b̂_{2α,per}(k,l)` as stored.
    pub fn periodic(&self, k: usize, l: usize) -> Complex64 {
        self.per[k * self.m + l]
    }

    /// `b̂_τ(k)` as stored.
    pub fn bernoulli(&self, tau: usize, k: usize) -> Complex64 {
        self.bt[tau][k]
    }
}
