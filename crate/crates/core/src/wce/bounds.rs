use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::digits::mu_alpha_digits;
use crate::dual::DualNet;
use crate::error::{Error, Result};
use crate::ff::PrimeBase;
use crate::nets::{ConstructionParams, DigitalNet};
use crate::walsh::check_alpha;

use super::exact::Neumaier;

/// Number of exact terms behind [`s1`].
pub const S1_TERMS: usize = 256;

/// The explicit bound chains for the composite construction.
///
/// Fields listed in `empirical` are measured or existence-only quantities and
/// carry no guarantee.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub s: usize,
    pub alpha: usize,
    pub beta: usize,
    pub g: usize,
    pub w: usize,
    pub b: u32,
    pub hypotheses_hold: bool,
    /// Present when some hypothesis fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub main: Option<MainPart>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<DiscretizationPart>,
    pub empirical: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MainPart {
    /// `A_{αβ} = (α−1)/(β−1)` as `"p/q"`.
    #[serde(rename = "A_interp")]
    pub a_interp: String,
    /// `B_{αβ} = (β−α)/(β−1)` as `"p/q"`.
    #[serde(rename = "B_interp")]
    pub b_interp: String,
    /// `G = b (1 − b^{−(2B−1)})^{−s}`; infinite when `B ≤ 1/2`.
    #[serde(rename = "G")]
    pub g_const: f64,
    pub t: usize,
    pub t_prime: usize,
    /// `G b^{2At + 2Bt′} (gw+2)^{s−1} / b^{2αgw}`, as `log10`.
    pub main_part_explicit_log10: f64,
    pub main_part_explicit: f64,
    /// Measured kernel decay constant `D`, when supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_constant: Option<f64>,
    /// The explicit bound times `max{1, D^s}`.
    pub main_part_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretizationPart {
    /// Precision `n = βgw` of the interlaced net.
    pub n: usize,
    /// `S_1 = Σ_{k≥0} b^{−μ_α(k)}`, rounded up.
    #[serde(rename = "S1")]
    pub s1: f64,
    /// Bound on the part of `S_1` beyond the exact partial sum.
    pub s1_tail: f64,
    /// `S_{2,n} = Σ_{k<b^n} b^{−μ_α(k)}`.
    #[serde(rename = "S2n")]
    pub s2n: f64,
    /// `S_1 − S_{2,n}`.
    pub s1_minus_s2n: f64,
    /// `B_{α,b}` for `α ≥ 3`; for `α = 2` the surrogate `2n` (so that the tail is `2n/b^n`).
    #[serde(rename = "B_alpha_b")]
    pub b_alpha_b: f64,
    /// Closed-form bound on `S_1 − S_{2,n}`.
    pub tail_bound: f64,
    /// `tail_bound · s · S_1^{s−1}`.
    pub discretization_bound: f64,
    /// `n^{sα} / b^{nα/β}`, the shape of the dual-sum factor (its constant is not explicit).
    pub dual_factor_shape: f64,
}

fn ratio(p: usize, q: usize) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// The main-part chain. `decay` is the measured constant `D` of
/// `|K̂_α(k,k)| ≤ D b^{−2μ_α(k)}`; without it the explicit part is the bound.
pub fn main_part_bound(p: &ConstructionParams, decay: Option<f64>) -> Result<BoundBreakdown> {
    let mut out = header(p)?;
    out.main = Some(main_part(p, decay));
    if decay.is_some() {
        out.empirical.push("decay_constant".into());
    }
    Ok(out)
}

pub fn discretization_bound(p: &ConstructionParams) -> Result<BoundBreakdown> {
    let mut out = header(p)?;
    out.discretization = Some(discretization(p)?);
    out.empirical.push("dual_factor_shape".into());
    Ok(out)
}

/// Both chains.
pub fn bound_breakdown(p: &ConstructionParams, decay: Option<f64>) -> Result<BoundBreakdown> {
    let mut out = main_part_bound(p, decay)?;
    out.discretization = Some(discretization(p)?);
    out.empirical.push("dual_factor_shape".into());
    Ok(out)
}

fn header(p: &ConstructionParams) -> Result<BoundBreakdown> {
    check_alpha(p.alpha)?;
    if p.beta < 2 {
        return Err(Error::invalid("beta must be at least 2"));
    }
    let mut strict = p.clone();
    strict.strict = true;
    let flag = strict.validate().err().map(|e| format!("outside theorem hypotheses: {e}"));
    Ok(BoundBreakdown {
        s: p.s,
        alpha: p.alpha,
        beta: p.beta,
        g: p.g,
        w: p.w,
        b: p.b.get(),
        hypotheses_hold: flag.is_none(),
        flag,
        main: None,
        discretization: None,
        empirical: Vec::new(),
    })
}

fn main_part(p: &ConstructionParams, decay: Option<f64>) -> MainPart {
    let (s, alpha, beta) = (p.s, p.alpha, p.beta);
    let gw = p.g * p.w;
    let a = ratio(alpha - 1, beta - 1);
    let bq = BigRational::new(BigInt::from(beta as i64 - alpha as i64), BigInt::from(beta - 1));
    let t_prime = gw.min(s * (beta - 1) / 2);
    let t = beta * t_prime;
    let lb = (p.b.get() as f64).ln();
    let bf = bq.to_f64().unwrap();
    let af = a.to_f64().unwrap();
    let ln_g = if 2.0 * bf - 1.0 > 0.0 {
        lb - s as f64 * (1.0 - (-(2.0 * bf - 1.0) * lb).exp()).ln()
    } else {
        f64::INFINITY
    };
    let ln_explicit = ln_g + (2.0 * af * t as f64 + 2.0 * bf * t_prime as f64) * lb
        + (s as f64 - 1.0) * ((gw + 2) as f64).ln()
        - 2.0 * (alpha * gw) as f64 * lb;
    let ln_factor = decay.map_or(0.0, |d| (s as f64 * d.ln()).max(0.0));
    MainPart {
        a_interp: a.to_string(),
        b_interp: bq.to_string(),
        g_const: ln_g.exp(),
        t,
        t_prime,
        main_part_explicit_log10: ln_explicit / std::f64::consts::LN_10,
        main_part_explicit: ln_explicit.exp(),
        decay_constant: decay,
        main_part_bound: (ln_explicit + ln_factor).exp(),
    }
}

fn discretization(p: &ConstructionParams) -> Result<DiscretizationPart> {
    let (s, alpha) = (p.s, p.alpha);
    let n = p.beta * p.g * p.w;
    let sums = s2_partial_sums(p.b, alpha, S1_TERMS.max(n))?;
    let s2n = sums[n].to_f64().unwrap();
    let (s1v, tail) = s1(p.b, alpha)?;
    let diff = (&sums[sums.len() - 1] - &sums[n]).to_f64().unwrap() + tail;
    let bab = if alpha == 2 {
        2.0 * n as f64
    } else {
        b_alpha_b(p.b, alpha)?.to_f64().unwrap()
    };
    let bf = p.b.get() as f64;
    let tail_bound = bab * bf.powi(-(n as i32));
    Ok(DiscretizationPart {
        n,
        s1: s1v,
        s1_tail: tail,
        s2n,
        s1_minus_s2n: diff,
        b_alpha_b: bab,
        tail_bound,
        discretization_bound: tail_bound * s as f64 * s1v.powi(s as i32 - 1),
        dual_factor_shape: ((s * alpha) as f64 * (n as f64).ln() - (n * alpha) as f64 / p.beta as f64 * bf.ln())
            .exp(),
    })
}

/// `S_{2,n} = Σ_{0≤k<b^n} b^{−μ_α(k)}` exactly, for `n = 0..=kmax`.
///
/// Grouped by the leading position `a` of `k`:
/// `S_{2,n} = 1 + Σ_{a=1}^{n} (b−1) b^{−a} f_{α−1}(a)`, where `f_j(a)` sums
/// `b^{−(top j positions)}` over the digit patterns below position `a`:
/// `f_0(a) = b^{a−1}`, `f_j(a) = 1 + Σ_{p<a} (b−1) b^{−p} f_{j−1}(p)`.
pub fn s2_partial_sums(b: PrimeBase, alpha: usize, kmax: usize) -> Result<Vec<BigRational>> {
    if alpha == 0 {
        return Err(Error::invalid("alpha must be positive"));
    }
    let bi = BigInt::from(b.get());
    let bm1 = BigRational::from(BigInt::from(b.get() - 1));
    let inv = |a: usize| BigRational::new(BigInt::one(), bi.pow(a as u32));
    // f[j][a] for a = 1..=kmax, built incrementally in a
    let mut f: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); kmax + 1]; alpha];
    for a in 1..=kmax {
        f[0][a] = BigRational::from(bi.pow(a as u32 - 1));
    }
    for j in 1..alpha {
        let mut acc = BigRational::one();
        for a in 1..=kmax {
            f[j][a] = acc.clone();
            acc += &bm1 * inv(a) * &f[j - 1][a];
        }
    }
    let mut out = Vec::with_capacity(kmax + 1);
    let mut acc = BigRational::one();
    out.push(acc.clone());
    for a in 1..=kmax {
        acc += &bm1 * inv(a) * &f[alpha - 1][a];
        out.push(acc.clone());
    }
    Ok(out)
}

/// Exact upper bound `(b−1) Σ_{a>K} a b^{−a}` on `S_1 − S_{2,K}` (uses `f_{α−1}(a) ≤ a`, `α ≥ 2`).
pub fn s2_tail_bound(b: PrimeBase, k: usize) -> BigRational {
    let x = BigRational::new(BigInt::one(), BigInt::from(b.get()));
    let one = BigRational::one();
    let kk = BigRational::from(BigInt::from(k));
    // Σ_{a>K} a x^a = x^{K+1} ((K+1) − K x) / (1 − x)²
    let mut xp = one.clone();
    for _ in 0..=k {
        xp *= &x;
    }
    let num = xp * ((&kk + &one) - &kk * &x);
    let den = (&one - &x) * (&one - &x);
    BigRational::from(BigInt::from(b.get() - 1)) * num / den
}

/// `S_1 = Σ_{k≥0} b^{−μ_α(k)}` rounded up, and the tail bound included in it.
pub fn s1(b: PrimeBase, alpha: usize) -> Result<(f64, f64)> {
    if alpha < 2 {
        return Err(Error::invalid("S_1 is finite only for alpha >= 2"));
    }
    let sums = s2_partial_sums(b, alpha, S1_TERMS)?;
    let tail = s2_tail_bound(b, S1_TERMS);
    let v = (&sums[S1_TERMS] + &tail).to_f64().unwrap();
    // round up by a couple of ulps
    Ok((v * (1.0 + 2.0 * f64::EPSILON), tail.to_f64().unwrap()))
}

/// `B_{α,b} = Σ_{v=1}^{α−1} Π_{i=1}^{v−1} (b−1)/(b^i−1)
///   + (b^{α−1}−1)/(b^{α−1}−b) · Π_{i=1}^{α−1} (b−1)/(b^i−1)`, for `α ≥ 3`.
pub fn b_alpha_b(b: PrimeBase, alpha: usize) -> Result<BigRational> {
    if alpha < 3 {
        return Err(Error::invalid("B_(alpha,b) is defined for alpha >= 3"));
    }
    let bi = BigInt::from(b.get());
    let factor = |i: usize| BigRational::new(&bi - 1, bi.pow(i as u32) - 1);
    let prod = |v: usize| (1..v).fold(BigRational::one(), |acc, i| acc * factor(i));
    let mut total = (1..alpha).fold(BigRational::zero(), |acc, v| acc + prod(v));
    let top = bi.pow(alpha as u32 - 1);
    total += BigRational::new(&top - 1, &top - &bi) * prod(alpha);
    Ok(total)
}

/// `Σ_{k ∈ P^⊥∖{0}} b^{−2μ_α(k)}` with `μ_α(k) = Σ_j μ_α(k_j)`, by enumeration.
pub fn dual_weight_sum(net: &DigitalNet, alpha: usize, limit: u128) -> Result<f64> {
    let dual = DualNet::new(net, limit)?;
    let n = net.n();
    let lb = (net.base().get() as f64).ln();
    let acc = dual.fold(
        Neumaier::default,
        |acc: &mut Neumaier, v| {
            if v.iter().any(|&d| d != 0) {
                let mu: usize = v.chunks(n).map(|c| mu_alpha_digits(c, alpha)).sum();
                acc.add((-2.0 * mu as f64 * lb).exp());
            }
        },
        Neumaier::merge,
    );
    Ok(acc.value())
}
