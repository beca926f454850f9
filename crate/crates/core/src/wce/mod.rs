//! The Sobolev kernel `K_{α,s}`, worst-case errors of equal-weight rules in
//! `H_{α,s}`, and the explicit bound chains for the composite construction.
//!
//! `e² = N^{-2} Σ_{h,h'} K_{α,s}(x_h, x_{h'}) − 1`, since `K` integrates to one in
//! each variable. [`wce_exact`] evaluates this double sum; [`wce_dual_truncated`]
//! evaluates the same quantity as a sum of kernel Walsh coefficients over pairs
//! of dual-net elements.

mod bounds;
mod dual_sum;
mod exact;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bernoulli::{self, coefficients_internal, factorial};
use crate::error::{Error, Result};
use crate::walsh::check_alpha;

pub use bounds::{
    b_alpha_b, bound_breakdown, discretization_bound, dual_weight_sum, main_part_bound, s1, s2_partial_sums,
    s2_tail_bound, BoundBreakdown, DiscretizationPart, MainPart,
};
pub use dual_sum::{wce_dual_truncated, wce_dual_truncated_with, DEFAULT_PAIR_LIMIT};
pub use exact::{
    max_points_from_env, wce_cell_averaged, wce_exact, wce_exact_f64, wce_exact_with, wce_net, ExactOptions, DEFAULT_MAX_POINTS,
    OPT_IN_POINTS,
};

/// Smoothness and dimension of `H_{α,s}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub alpha: usize,
    pub s: usize,
}

impl KernelSpec {
    pub fn new(alpha: usize, s: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if s == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(KernelSpec { alpha, s })
    }

    /// `K_{α,s}(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.s {
            return Err(Error::DimensionMismatch {
                expected: self.s,
                found: x.len(),
            });
        }
        kernel_sd(self.alpha, x, y)
    }
}

/// `K_α(x,y) = Σ_{r=0}^{α} B_r(x)B_r(y)/(r!)² + (−1)^{α+1} B_{2α}(|x−y|)/(2α)!`.
pub fn kernel_1d(alpha: usize, x: f64, y: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let k = KernelEval::new(alpha);
    Ok(1.0 + k.d(x, &k.features(x), y, &k.features(y)))
}

/// `K_{α,s}(x,y) = Π_j K_α(x_j, y_j)`.
pub fn kernel_sd(alpha: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_alpha(alpha)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let k = KernelEval::new(alpha);
    Ok(x.iter()
        .zip(y)
        .map(|(&a, &b)| 1.0 + k.d(a, &k.features(a), b, &k.features(b)))
        .product())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WceMethod {
    ExactKernelSum,
    TruncatedDualSum,
}

/// A worst-case error with a bound on its numerical and truncation error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WceReport {
    #[serde(rename = "N")]
    pub n_points: u64,
    pub e: f64,
    pub e2: f64,
    pub method: WceMethod,
    /// Bound on `|e − e_true|`.
    pub error_budget: f64,
    /// Bound on `|e2 − e²_true|`.
    pub e2_error_budget: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncation_radius: Option<usize>,
    /// Part of `e2_error_budget` due to truncation (dual-sum method only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncation_budget: Option<f64>,
    pub rational: bool,
    pub workers: usize,
}

impl WceReport {
    pub(crate) fn new(
        n_points: u64,
        e2: f64,
        e2_error_budget: f64,
        method: WceMethod,
        truncation_radius: Option<usize>,
        rational: bool,
    ) -> Self {
        let e = e2.max(0.0).sqrt();
        let u = f64::EPSILON / 2.0;
        // |√a − √t| ≤ min(√δ, δ/√a) when |a − t| ≤ δ
        let mut budget = e2_error_budget.sqrt();
        if e > 0.0 {
            budget = budget.min(e2_error_budget / e);
        }
        WceReport {
            n_points,
            e,
            e2,
            method,
            error_budget: budget * 1.01 + u * e,
            e2_error_budget,
            truncation_radius,
            truncation_budget: None,
            rational,
            workers: rayon::current_num_threads(),
        }
    }
}

pub(crate) fn gamma(k: usize) -> f64 {
    let ku = k as f64 * f64::EPSILON / 2.0;
    ku / (1.0 - ku)
}

/// `max |B_r / r!|` on `[0,1]`.
pub(crate) fn scaled_max(r: usize) -> f64 {
    bernoulli::max_abs(r) / factorial(r).to_f64().unwrap()
}

/// Constants of the one-dimensional kernel used by every error budget.
#[derive(Clone, Copy, Debug)]
pub(crate) struct KernelConstants {
    /// Bound on `|K_α − 1|`.
    pub d_max: f64,
    /// Bound on `|∂K_α/∂x|` (and, by symmetry, `∂/∂y`).
    pub lipschitz: f64,
}

impl KernelConstants {
    pub(crate) fn new(alpha: usize) -> Self {
        let m = |r: usize| scaled_max(r);
        let d_max = (1..=alpha).map(|t| m(t) * m(t)).sum::<f64>() + m(2 * alpha);
        let lipschitz = (1..=alpha).map(|t| m(t - 1) * m(t)).sum::<f64>() + m(2 * alpha - 1);
        KernelConstants {
            d_max: d_max * 1.001,
            lipschitz: lipschitz * 1.001,
        }
    }

    /// Bound on `|K_α|`.
    pub(crate) fn k_max(&self) -> f64 {
        1.0 + self.d_max
    }
}

/// Binary64 evaluation of `d(x,y) = K_α(x,y) − 1` with a uniform error bound.
#[derive(Clone, Debug)]
pub(crate) struct KernelEval {
    // coefficients of B_τ/τ!, τ = 1..=α
    feat: Vec<Vec<f64>>,
    // coefficients of (−1)^{α+1} B_{2α}/(2α)!
    per: Vec<f64>,
    /// Bound on the rounding error of [`KernelEval::d`] for inputs in `[0,1)`.
    pub d_err: f64,
    pub consts: KernelConstants,
}

fn scaled_coeffs(r: usize, sign: i32) -> Vec<f64> {
    let f = BigRational::from(factorial(r));
    coefficients_internal(r)
        .iter()
        .map(|c| (c / &f).to_f64().unwrap() * sign as f64)
        .collect()
}

fn scaled_abs_sum(r: usize) -> f64 {
    bernoulli::coefficient_abs_sum(r) / factorial(r).to_f64().unwrap()
}

impl KernelEval {
    pub(crate) fn new(alpha: usize) -> Self {
        let sign = if alpha % 2 == 1 { 1 } else { -1 };
        let feat = (1..=alpha).map(|t| scaled_coeffs(t, 1)).collect();
        let per = scaled_coeffs(2 * alpha, sign);
        let u = f64::EPSILON / 2.0;
        let m = |r: usize| scaled_max(r);
        // Horner on [0,1] with rounded coefficients
        let eps = |r: usize| gamma(2 * r + 1) * scaled_abs_sum(r) * 1.01;
        let mut d_err = 0.0;
        let mut mag = 0.0;
        for t in 1..=alpha {
            let (mt, et) = (m(t), eps(t));
            d_err += 2.0 * mt * et + et * et + u * (mt + et) * (mt + et);
            mag += (mt + et) * (mt + et);
        }
        // |x − y| is rounded relative to itself
        d_err += eps(2 * alpha) + m(2 * alpha - 1) * u;
        mag += m(2 * alpha) + eps(2 * alpha);
        d_err += gamma(alpha + 1) * mag;
        KernelEval {
            feat,
            per,
            d_err: d_err * 1.01,
            consts: KernelConstants::new(alpha),
        }
    }

    /// `(B_τ(x)/τ!)_{τ=1..α}`.
    #[inline]
    pub(crate) fn features(&self, x: f64) -> Vec<f64> {
        self.feat.iter().map(|c| bernoulli::horner(c, x)).collect()
    }

    #[inline]
    pub(crate) fn d(&self, x: f64, fx: &[f64], y: f64, fy: &[f64]) -> f64 {
        let mut acc = bernoulli::horner(&self.per, (x - y).abs());
        for (a, b) in fx.iter().zip(fy) {
            acc += a * b;
        }
        acc
    }
}

/// Exact check that `K_α` has unit integral in each variable: `∫B_τ = 0` for
/// `1 ≤ τ ≤ α` and `∫∫B_{2α}(|x−y|) dx dy = 2∫_0^1 (1−u) B_{2α}(u) du = 0`.
pub(crate) fn unit_integral_check(alpha: usize) -> Result<()> {
    let int = |r: usize, weight: &dyn Fn(usize) -> BigRational| -> BigRational {
        coefficients_internal(r)
            .iter()
            .enumerate()
            .map(|(p, c)| c * weight(p))
            .fold(BigRational::zero(), |a, b| a + b)
    };
    let q = |n: usize| BigRational::new(BigInt::from(1), BigInt::from(n));
    for t in 1..=alpha {
        if !int(t, &|p| q(p + 1)).is_zero() {
            return Err(Error::SelfCheck(format!("the integral of B_{t} does not vanish")));
        }
    }
    if !int(2 * alpha, &|p| q(p + 1) - q(p + 2)).is_zero() {
        return Err(Error::SelfCheck(format!(
            "the double integral of B_{}(|x-y|) does not vanish",
            2 * alpha
        )));
    }
    Ok(())
}
