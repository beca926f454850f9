//! Bernoulli polynomials with exact rational coefficients.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Highest degree accepted by the public evaluators.
pub const MAX_DEGREE: usize = 16;

// Internal tables go further: the periodic Walsh coefficients integrate B_{2α} twice.
pub(crate) const TABLE_DEGREE: usize = 20;

struct Tables {
    // coeffs[r][p] = coefficient of x^p in B_r
    coeffs: Vec<Vec<BigRational>>,
    // same, rounded to nearest binary64
    coeffs_f64: Vec<Vec<f64>>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        // Bernoulli numbers from Σ_{k=0}^{n} C(n+1, k) B_k = 0, B_0 = 1
        let mut numbers: Vec<BigRational> = vec![BigRational::one()];
        for n in 1..=TABLE_DEGREE {
            let mut acc = BigRational::zero();
            for (k, bk) in numbers.iter().enumerate() {
                acc += bk * BigRational::from(binom(n + 1, k));
            }
            numbers.push(-acc / BigRational::from(BigInt::from(n + 1)));
        }
        // B_r(x) = Σ_k C(r, k) B_k x^{r-k}
        let coeffs: Vec<Vec<BigRational>> = (0..=TABLE_DEGREE)
            .map(|r| {
                (0..=r)
                    .map(|p| &numbers[r - p] * BigRational::from(binom(r, p)))
                    .collect()
            })
            .collect();
        let coeffs_f64 = coeffs
            .iter()
            .map(|c| c.iter().map(|q| q.to_f64().unwrap()).collect())
            .collect();
        Tables { coeffs, coeffs_f64 }
    })
}

pub(crate) fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact coefficients of `B_r`, constant term first.
pub fn coefficients(r: usize) -> Result<&'static [BigRational]> {
    if r > MAX_DEGREE {
        return Err(Error::invalid(format!("Bernoulli degree {r} exceeds {MAX_DEGREE}")));
    }
    Ok(&tables().coeffs[r])
}

pub(crate) fn coefficients_internal(r: usize) -> &'static [BigRational] {
    &tables().coeffs[r]
}

pub(crate) fn coefficients_f64(r: usize) -> &'static [f64] {
    &tables().coeffs_f64[r]
}

/// `B_r(x)` in binary64 (Horner), `r <= 16`.
pub fn bernoulli(r: usize, x: f64) -> Result<f64> {
    if r > MAX_DEGREE {
        return Err(Error::invalid(format!("Bernoulli degree {r} exceeds {MAX_DEGREE}")));
    }
    Ok(horner(coefficients_f64(r), x))
}

#[inline]
pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// `B_r(x)` exactly, `r <= 16`.
pub fn bernoulli_exact(r: usize, x: &BigRational) -> Result<BigRational> {
    Ok(eval_exact(coefficients(r)?, x))
}

pub(crate) fn eval_exact(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a)
}

/// Integer form of `B_r` on the grid `X / d`: returns `(P, den)` with
/// `den · d^r · B_r(X/d) = P(X)` for every integer `X`, `P` having integer coefficients.
pub(crate) fn scaled_integer_poly(r: usize, d: &BigInt) -> (Vec<BigInt>, BigInt) {
    let c = coefficients_internal(r);
    let den = c.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let poly = c
        .iter()
        .enumerate()
        .map(|(p, q)| q.numer() * (&den / q.denom()) * d.pow((r - p) as u32))
        .collect();
    (poly, den)
}

pub(crate) fn eval_int(poly: &[BigInt], x: &BigInt) -> BigInt {
    poly.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
}

/// Σ_p |c_p| for `B_r`, a bound on `|B_r|` over `[-1, 1]` and a Horner error scale.
pub(crate) fn coefficient_abs_sum(r: usize) -> f64 {
    coefficients_internal(r)
        .iter()
        .map(|q| q.abs().to_f64().unwrap())
        .sum()
}

/// A rigorous upper bound on `max_{x∈[0,1]} |B_r(x)|`.
///
/// Exact for `r <= 1`; otherwise a grid maximum plus the mean-value slack
/// `r · M_{r-1} · h/2`, with a margin for rounding in the grid evaluation.
pub fn max_abs(r: usize) -> f64 {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut m = vec![1.0, 0.5];
        const GRID: usize = 1 << 12;
        let h = 1.0 / GRID as f64;
        for r in 2..=TABLE_DEGREE {
            let c = coefficients_f64(r);
            let grid_max = (0..=GRID)
                .map(|i| horner(c, i as f64 * h).abs())
                .fold(0.0, f64::max);
            let eval_err = 4.0 * (r as f64 + 1.0) * f64::EPSILON * coefficient_abs_sum(r);
            let slack = r as f64 * m[r - 1] * h / 2.0;
            m.push((grid_max + eval_err + slack) * (1.0 + 1e-12));
        }
        m
    })[r]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn examples() {
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(bernoulli(0, x).unwrap(), 1.0);
        }
        assert_eq!(bernoulli_exact(1, &q(0, 1)).unwrap(), q(-1, 2));
        assert_eq!(bernoulli_exact(4, &q(0, 1)).unwrap(), q(-1, 30));
        assert_eq!(bernoulli_exact(2, &q(0, 1)).unwrap(), q(1, 6));
        assert!(bernoulli(17, 0.5).is_err());
        assert!(bernoulli_exact(17, &q(1, 2)).is_err());
    }

    #[test]
    fn zero_mean_and_derivative() {
        for r in 1..=TABLE_DEGREE {
            let c = coefficients_internal(r);
            let integral: BigRational = c
                .iter()
                .enumerate()
                .map(|(p, a)| a / BigRational::from(BigInt::from(p + 1)))
                .sum();
            assert!(integral.is_zero(), "r={r}");
            let prev = coefficients_internal(r - 1);
            for p in 1..=r {
                assert_eq!(&c[p] * BigRational::from(BigInt::from(p)), &prev[p - 1] * BigRational::from(BigInt::from(r)));
            }
        }
    }

    #[test]
    fn symmetry_and_known_values() {
        // B_r(1 - x) = (-1)^r B_r(x)
        for r in 0..=MAX_DEGREE {
            let x = q(2, 7);
            let lhs = bernoulli_exact(r, &(BigRational::one() - &x)).unwrap();
            let rhs = bernoulli_exact(r, &x).unwrap();
            assert_eq!(lhs, if r % 2 == 0 { rhs } else { -rhs });
        }
        assert_eq!(bernoulli_exact(16, &q(0, 1)).unwrap(), q(-3617, 510));
        assert_eq!(bernoulli_exact(3, &q(1, 2)).unwrap(), q(0, 1));
    }

    #[test]
    fn scaled_polynomial_matches_rational_evaluation() {
        let d = BigInt::from(27);
        for r in 0..=8 {
            let (poly, den) = scaled_integer_poly(r, &d);
            for x in [0i64, 1, 13, 26, 27] {
                let exact = bernoulli_exact(r, &q(x, 27)).unwrap();
                let lhs = BigRational::from(eval_int(&poly, &BigInt::from(x)));
                assert_eq!(lhs, exact * BigRational::from(&den * d.pow(r as u32)));
            }
        }
    }

    #[test]
    fn max_abs_bounds() {
        assert_eq!(max_abs(1), 0.5);
        for r in 2..=12 {
            let m = max_abs(r);
            let sampled = (0..=1000)
                .map(|i| bernoulli(r, i as f64 / 1000.0).unwrap().abs())
                .fold(0.0, f64::max);
            assert!(m >= sampled);
            assert!(m <= sampled * 1.01 + 1e-3, "r={r} m={m}");
        }
    }
}
