use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{omega_powers, WalshCoefficient};
use crate::ff::PrimeBase;

/// Exact element `Σ_g q_g ω_b^g` of the cyclotomic field, `q_g` rational.
///
/// For prime `b` the only rational relation among `1, ω, …, ω^{b-1}` is
/// `Σ_g ω^g = 0`, so the value is zero iff all `q_g` agree.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Cyclo {
    base: PrimeBase,
    q: Vec<BigRational>,
}

impl Cyclo {
    pub(crate) fn zero(base: PrimeBase) -> Self {
        Cyclo {
            base,
            q: vec![BigRational::zero(); base.get() as usize],
        }
    }

    pub(crate) fn one(base: PrimeBase) -> Self {
        let mut c = Self::zero(base);
        c.q[0] = BigRational::one();
        c
    }

    pub(crate) fn from_integers(base: PrimeBase, ints: Vec<BigInt>, den: &BigInt) -> Self {
        Cyclo {
            base,
            q: ints
                .into_iter()
                .map(|n| BigRational::new(n, den.clone()))
                .collect(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.q.iter().all(|x| *x == self.q[0])
    }

    pub(crate) fn add_assign(&mut self, other: &Cyclo) {
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            *a += b;
        }
    }

    pub(crate) fn sub_assign(&mut self, other: &Cyclo) {
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            *a -= b;
        }
    }

    pub(crate) fn mul(&self, other: &Cyclo) -> Cyclo {
        let p = self.q.len();
        let mut out = Cyclo::zero(self.base);
        for (i, a) in self.q.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.q.iter().enumerate() {
                if !b.is_zero() {
                    out.q[(i + j) % p] += a * b;
                }
            }
        }
        out
    }

    pub(crate) fn conj(&self) -> Cyclo {
        let p = self.q.len();
        Cyclo {
            base: self.base,
            q: (0..p).map(|g| self.q[(p - g) % p].clone()).collect(),
        }
    }

    /// Real part exactly when the value is real (e.g. `b = 2`).
    #[cfg(test)]
    pub(crate) fn real_if_b2(&self) -> Option<BigRational> {
        (self.q.len() == 2).then(|| &self.q[0] - &self.q[1])
    }

    /// Rounds to binary64: `Σ_g (q_g − c) ω^g` with `c` a median of the `q_g`
    /// (any shift gives the same value), each rational correctly rounded, then a
    /// short complex sum.
    pub(crate) fn finalize(&self) -> WalshCoefficient {
        if self.is_zero() {
            return WalshCoefficient::ZERO;
        }
        let w = omega_powers(self.base);
        let p = self.q.len();
        let mut sorted: Vec<&BigRational> = self.q.iter().collect();
        sorted.sort();
        let c = sorted[p / 2].clone();
        let mut value = Complex64::zero();
        let mut mag = 0.0;
        for g in 0..p {
            let d = (&self.q[g] - &c).to_f64().unwrap_or(f64::NAN);
            value += w[g] * d;
            mag += d.abs();
        }
        let u = f64::EPSILON / 2.0;
        let abs_error = if p == 2 {
            u * mag
        } else {
            (p as f64 + 6.0) * u * mag * 1.01
        };
        // subnormal results lose relative accuracy
        let abs_error = abs_error + f64::MIN_POSITIVE * p as f64;
        WalshCoefficient { value, abs_error }
    }
}
