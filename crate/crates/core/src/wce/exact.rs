use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{unit_integral_check, KernelEval, WceMethod, WceReport};
use crate::bernoulli::{binom, eval_int, factorial, scaled_integer_poly};
use crate::error::{Error, Result};
use crate::nets::{DigitalNet, NetPoint};
use crate::walsh::{cell_integrals, cells, check_alpha, periodic_cell_integrals};

/// Default cap on the number of points for the kernel double sum.
pub const DEFAULT_MAX_POINTS: u64 = 1 << 17;

/// Above this many points the `O(N²)` paths need `allow_large`.
pub const OPT_IN_POINTS: u64 = 1 << 14;

/// Largest point count for the pairwise rational path.
pub const MAX_RATIONAL_PAIRWISE: u64 = 1 << 10;

// rows per block of the float double sum; fixed so results do not depend on the pool
const BLOCK_ROWS: usize = 32;

/// The point cap, honouring `HOQMC_MAX_N` when set.
pub fn max_points_from_env() -> u64 {
    std::env::var("HOQMC_MAX_N")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_POINTS)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    /// Exact rational evaluation (one rounding at the end).
    pub rational: bool,
    pub max_points: u64,
    /// Permit the `O(N²)` paths above [`OPT_IN_POINTS`].
    pub allow_large: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            rational: false,
            max_points: max_points_from_env(),
            allow_large: false,
        }
    }
}

fn check_size(n: u64, quadratic: bool, opts: &ExactOptions) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("the point set is empty"));
    }
    if n > opts.max_points {
        return Err(Error::guard("kernel double sum", format!("{n} points"), opts.max_points));
    }
    if quadratic && n > OPT_IN_POINTS && !opts.allow_large {
        return Err(Error::guard(
            "kernel double sum without opt-in",
            format!("{n} points"),
            OPT_IN_POINTS,
        ));
    }
    Ok(())
}

/// `e` by the float kernel double sum.
pub fn wce_exact(points: &[NetPoint], alpha: usize) -> Result<WceReport> {
    wce_exact_with(points, alpha, &ExactOptions::default())
}

pub fn wce_exact_with(points: &[NetPoint], alpha: usize, opts: &ExactOptions) -> Result<WceReport> {
    check_alpha(alpha)?;
    let Some(first) = points.first() else {
        return Err(Error::invalid("the point set is empty"));
    };
    let s = first.dim();
    for p in points {
        if p.dim() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: p.dim(),
            });
        }
        if p.base() != first.base() {
            return Err(Error::BaseMismatch {
                left: first.base().get(),
                right: p.base().get(),
            });
        }
    }
    if opts.rational {
        let n = points.iter().flat_map(|p| p.coords().iter().map(|c| c.len())).max().unwrap_or(0);
        let nums: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| {
                (0..s)
                    .map(|j| {
                        let pad = n - p.coord_digits(j).len();
                        BigInt::from(p.numerator(j) * BigUint::from(p.base().get()).pow(pad as u32))
                    })
                    .collect()
            })
            .collect();
        let d = BigInt::from(first.base().get()).pow(n as u32);
        return wce_rational(&nums, &d, alpha, opts);
    }
    check_size(points.len() as u64, true, opts)?;
    let exact_coords = points.iter().all(|p| {
        p.coords()
            .iter()
            .all(|c| p.base().checked_pow(c.len() as u32).is_some_and(|d| d <= 1 << 53))
    });
    let xs: Vec<Vec<f64>> = points.iter().map(|p| p.to_f64_lossy()).collect();
    let input_err = if exact_coords { 0.0 } else { f64::EPSILON / 2.0 };
    wce_float(&xs, alpha, input_err)
}

/// Float double sum for arbitrary coordinates in `[0,1)`, taken as exact inputs.
pub fn wce_exact_f64(points: &[Vec<f64>], alpha: usize, opts: &ExactOptions) -> Result<WceReport> {
    check_alpha(alpha)?;
    let Some(first) = points.first() else {
        return Err(Error::invalid("the point set is empty"));
    };
    for p in points {
        if p.len() != first.len() {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: p.len(),
            });
        }
        if p.iter().any(|x| !(0.0..1.0).contains(x)) {
            return Err(Error::invalid("coordinates must lie in [0,1)"));
        }
    }
    check_size(points.len() as u64, true, opts)?;
    wce_float(points, alpha, 0.0)
}

/// `e` for all points of a net; the rational path is used when `opts.rational`.
pub fn wce_net(net: &DigitalNet, alpha: usize, opts: &ExactOptions) -> Result<WceReport> {
    check_alpha(alpha)?;
    let n = net
        .n_points()
        .filter(|&n| n <= opts.max_points as u128)
        .ok_or_else(|| Error::guard("kernel double sum", format!("{}^{} points", net.base().get(), net.m()), opts.max_points))?;
    let quadratic = !(opts.rational && net.s() == 1);
    check_size(n as u64, quadratic, opts)?;
    if opts.rational {
        // integer numerators when b^n fits in 64 bits, digit vectors otherwise
        if let Ok(nums) = net.numerators(n) {
            let nums: Vec<Vec<BigInt>> = nums.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
            let d = BigInt::from(net.base().get()).pow(net.n() as u32);
            return wce_rational(&nums, &d, alpha, opts);
        }
    }
    wce_exact_with(&net.points(n)?, alpha, opts)
}

#[derive(Clone, Copy, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Neumaier {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub(crate) fn merge(mut self, other: Neumaier) -> Neumaier {
        self.add(other.sum);
        self.add(other.comp);
        self.abs += other.abs - other.sum.abs() - other.comp.abs();
        self
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn neumaier_sum(parts: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut acc = Neumaier::default();
    for x in parts {
        acc.add(x);
    }
    (acc.value(), acc.abs)
}

fn wce_float(xs: &[Vec<f64>], alpha: usize, input_err: f64) -> Result<WceReport> {
    unit_integral_check(alpha)?;
    let n = xs.len();
    let s = xs[0].len();
    let k = KernelEval::new(alpha);
    let feats: Vec<Vec<Vec<f64>>> = xs.iter().map(|p| p.iter().map(|&x| k.features(x)).collect()).collect();

    // q_j = Π_{i≤j}(1 + d_i) − 1, accumulated as q_j = q_{j−1} + d_j (1 + q_{j−1})
    let pair = |h: usize, g: usize| -> f64 {
        let mut q = 0.0;
        for j in 0..s {
            let d = k.d(xs[h][j], &feats[h][j], xs[g][j], &feats[g][j]);
            q += d * (1.0 + q);
        }
        q
    };
    let blocks: Vec<Neumaier> = (0..n.div_ceil(BLOCK_ROWS))
        .into_par_iter()
        .map(|blk| {
            let mut acc = Neumaier::default();
            for h in blk * BLOCK_ROWS..((blk + 1) * BLOCK_ROWS).min(n) {
                acc.add(pair(h, h));
                for g in h + 1..n {
                    acc.add(2.0 * pair(h, g));
                }
            }
            acc
        })
        .collect();
    let total = blocks.into_iter().fold(Neumaier::default(), Neumaier::merge);

    let u = f64::EPSILON / 2.0;
    let kmax = k.consts.k_max();
    let d_err = k.d_err + 2.0 * k.consts.lipschitz * input_err;
    let per_pair = s as f64 * kmax.powi(s as i32) * (d_err + 4.0 * u) * 1.05;
    let nn = (n as f64) * (n as f64);
    let sum_err = nn * per_pair + 3.0 * u * total.abs * 1.01;
    let e2 = total.value() / nn;
    let budget = sum_err / nn + u * e2.abs();
    Ok(WceReport::new(n as u64, e2, budget, WceMethod::ExactKernelSum, None, false))
}

/// Exact `e²` for points `a_{h,j} / d`.
fn wce_rational(nums: &[Vec<BigInt>], d: &BigInt, alpha: usize, opts: &ExactOptions) -> Result<WceReport> {
    unit_integral_check(alpha)?;
    let n = nums.len();
    let s = nums[0].len();
    let e2 = if s == 1 {
        check_size(n as u64, false, opts)?;
        let a: Vec<BigInt> = nums.iter().map(|r| r[0].clone()).collect();
        e2_rational_1d(&a, d, alpha)
    } else {
        check_size(n as u64, true, opts)?;
        if n as u64 > MAX_RATIONAL_PAIRWISE {
            return Err(Error::guard(
                "rational kernel double sum",
                format!("{n} points"),
                MAX_RATIONAL_PAIRWISE,
            ));
        }
        e2_rational_pairwise(nums, d, alpha)
    };
    let v = e2.to_f64().unwrap_or(f64::NAN);
    // one correctly rounded conversion
    let budget = v.abs() * f64::EPSILON / 2.0 + f64::MIN_POSITIVE;
    Ok(WceReport::new(n as u64, v, budget, WceMethod::ExactKernelSum, None, true))
}

fn sign(alpha: usize) -> BigInt {
    if alpha % 2 == 1 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `O(N log N)` exact `e²` in one dimension: power sums for the separable part,
/// prefix power sums over the sorted points for `B_{2α}(|x−y|)`.
pub(crate) fn e2_rational_1d(a: &[BigInt], d: &BigInt, alpha: usize) -> BigRational {
    let n = a.len();
    let deg = 2 * alpha;
    // power sums Σ_h a_h^p
    let mut ps = vec![BigInt::zero(); deg + 1];
    for x in a {
        let mut pw = BigInt::one();
        for slot in ps.iter_mut() {
            *slot += &pw;
            pw *= x;
        }
    }
    let mut total = BigRational::zero();
    for t in 1..=alpha {
        let (poly, den) = scaled_integer_poly(t, d);
        let sum: BigInt = poly.iter().zip(&ps).map(|(c, p)| c * p).sum();
        let scale = &den * d.pow(t as u32) * factorial(t);
        total += BigRational::new(&sum * &sum, &scale * &scale);
    }

    let mut sorted = a.to_vec();
    sorted.sort();
    // u[q][r] = Σ_j a_j^q Σ_{i<j} a_i^r
    let mut u = vec![vec![BigInt::zero(); deg + 1]; deg + 1];
    let mut prefix = vec![BigInt::zero(); deg + 1];
    let mut pw = vec![BigInt::one(); deg + 1];
    for x in &sorted {
        for q in 1..=deg {
            pw[q] = &pw[q - 1] * x;
        }
        for q in 0..=deg {
            for r in 0..=deg - q {
                if !prefix[r].is_zero() {
                    u[q][r] += &pw[q] * &prefix[r];
                }
            }
        }
        for r in 0..=deg {
            prefix[r] += &pw[r];
        }
    }
    let (poly, den) = scaled_integer_poly(deg, d);
    // Σ_{h,h'} P(|a_h − a_h'|) = N P(0) + 2 Σ_p c_p Σ_{i<j} (a_j − a_i)^p
    let mut pairs = BigInt::from(n) * &poly[0];
    for (p, c) in poly.iter().enumerate() {
        let mut tp = BigInt::zero();
        for q in 0..=p {
            let term = binom(p, q) * &u[q][p - q];
            if (p - q) % 2 == 0 {
                tp += term;
            } else {
                tp -= term;
            }
        }
        pairs += BigInt::from(2) * c * tp;
    }
    let scale = den * d.pow(deg as u32) * factorial(deg);
    total += BigRational::new(sign(alpha) * pairs, scale);
    let nn = BigInt::from(n) * BigInt::from(n);
    total / BigRational::from(nn)
}

/// Exact `e²` by the pairwise double sum over a common denominator.
pub(crate) fn e2_rational_pairwise(nums: &[Vec<BigInt>], d: &BigInt, alpha: usize) -> BigRational {
    let n = nums.len();
    let s = nums[0].len();
    let deg = 2 * alpha;
    // K_α(a/d, a'/d) = Kint(a, a') / q
    let polys: Vec<(Vec<BigInt>, BigInt)> = (0..=deg).map(|r| scaled_integer_poly(r, d)).collect();
    let denoms: Vec<BigInt> = (1..=alpha)
        .map(|t| {
            let x = &polys[t].1 * d.pow(t as u32) * factorial(t);
            &x * &x
        })
        .collect();
    let per_den = &polys[deg].1 * d.pow(deg as u32) * factorial(deg);
    let q = denoms.iter().fold(per_den.clone(), |acc, x| acc.lcm(x));
    let mult: Vec<BigInt> = denoms.iter().map(|x| &q / x).collect();
    let per_mult = sign(alpha) * (&q / &per_den);

    let feats: Vec<Vec<Vec<BigInt>>> = nums
        .par_iter()
        .map(|row| {
            row.iter()
                .map(|x| (1..=alpha).map(|t| eval_int(&polys[t].0, x)).collect())
                .collect()
        })
        .collect();
    let kint = |h: usize, g: usize, j: usize| -> BigInt {
        let mut acc = q.clone();
        for (t, m) in mult.iter().enumerate() {
            acc += m * &feats[h][j][t] * &feats[g][j][t];
        }
        let diff = (&nums[h][j] - &nums[g][j]).abs();
        acc + &per_mult * eval_int(&polys[deg].0, &diff)
    };
    let total: BigInt = (0..n)
        .into_par_iter()
        .map(|h| {
            let mut row = BigInt::zero();
            for g in h..n {
                let mut prod = kint(h, g, 0);
                for j in 1..s {
                    prod *= kint(h, g, j);
                }
                if g == h {
                    row += prod;
                } else {
                    row += prod * 2;
                }
            }
            row
        })
        .reduce(BigInt::zero, |a, b| a + b);
    let nn = BigInt::from(n) * BigInt::from(n);
    BigRational::new(total, q.pow(s as u32) * nn) - BigRational::one()
}

/// Exact `N^{-2} Σ_{h,h'} K̄(x_h, x_{h'}) − 1`, where `K̄` is `K_{α,s}` averaged over
/// the pair of level-`radius` cells containing its arguments. This is the
/// quantity the truncated dual sum evaluates, without truncation error.
pub fn wce_cell_averaged(net: &DigitalNet, alpha: usize, radius: usize) -> Result<WceReport> {
    check_alpha(alpha)?;
    if radius == 0 {
        return Err(Error::invalid("radius must be positive"));
    }
    let base = net.base();
    let m = cells(base, radius)?;
    let n = net
        .n_points()
        .filter(|&n| n <= MAX_RATIONAL_PAIRWISE as u128)
        .ok_or_else(|| Error::guard("cell-averaged kernel sum", format!("{}^{} points", base.get(), net.m()), MAX_RATIONAL_PAIRWISE))?;
    let idx = net.with_precision(radius)?.numerators(n)?;
    let s = net.s();
    // K̄(a, c) = 1 + M² (Σ_τ I_τ(a) I_τ(c) + (−1)^{α+1} G((a − c) mod M))
    let parts: Vec<_> = (1..=alpha).map(|t| cell_integrals(base, radius, t)).collect();
    let g = periodic_cell_integrals(base, radius, 2 * alpha);
    let dens: Vec<BigInt> = parts.iter().map(|c| &c.den * &c.den).collect();
    let q = dens.iter().fold(g.den.clone(), |acc, x| acc.lcm(x));
    let m2 = BigInt::from(m) * BigInt::from(m);
    let mult: Vec<BigInt> = dens.iter().map(|d| &m2 * (&q / d)).collect();
    let g_mult = sign(alpha) * &m2 * (&q / &g.den);
    let kint = |a: usize, c: usize| -> BigInt {
        let mut acc = q.clone();
        for (pt, mt) in parts.iter().zip(&mult) {
            acc += mt * &pt.num[a] * &pt.num[c];
        }
        acc + &g_mult * &g.num[(a + m - c) % m]
    };
    let n = n as usize;
    let total: BigInt = (0..n)
        .into_par_iter()
        .map(|h| {
            let mut row = BigInt::zero();
            for h2 in h..n {
                let mut prod = BigInt::one();
                for j in 0..s {
                    prod *= kint(idx[h][j] as usize, idx[h2][j] as usize);
                }
                row += if h2 == h { prod } else { prod * 2 };
            }
            row
        })
        .reduce(BigInt::zero, |a, b| a + b);
    let nn = BigInt::from(n) * BigInt::from(n);
    let e2 = BigRational::new(total, q.pow(s as u32) * nn) - BigRational::one();
    let v = e2.to_f64().unwrap_or(f64::NAN);
    let budget = v.abs() * f64::EPSILON / 2.0 + f64::MIN_POSITIVE;
    Ok(WceReport::new(n as u64, v, budget, WceMethod::ExactKernelSum, Some(radius), true))
}
