//! Exact base-`b` digit vectors, digitwise group operations, the Hamming and
//! Dick metrics, and the digit interlacing map `E_β`.
//!
//! Positions are 1-based throughout the public API: the digit multiplying
//! `b^(a-1)` sits at position `a`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ff::PrimeBase;

/// Non-negative integer stored as its base-`b` digits, least significant first,
/// without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DigitVector {
    base: PrimeBase,
    digits: Vec<u32>,
}

impl DigitVector {
    pub fn zero(base: PrimeBase) -> Self {
        DigitVector {
            base,
            digits: Vec::new(),
        }
    }

    /// Digits least significant first; trailing zeros are trimmed.
    pub fn from_digits(base: PrimeBase, mut digits: Vec<u32>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= base.get()) {
            return Err(Error::invalid(format!("digit {d} not below base {}", base.get())));
        }
        trim(&mut digits);
        Ok(DigitVector { base, digits })
    }

    pub(crate) fn from_digits_unchecked(base: PrimeBase, mut digits: Vec<u32>) -> Self {
        trim(&mut digits);
        DigitVector { base, digits }
    }

    pub fn from_u128(base: PrimeBase, mut k: u128) -> Self {
        let b = base.get() as u128;
        let mut digits = Vec::new();
        while k > 0 {
            digits.push((k % b) as u32);
            k /= b;
        }
        DigitVector { base, digits }
    }

    pub fn from_biguint(base: PrimeBase, k: &BigUint) -> Self {
        // to_radix_le only supports radix <= 256
        if base.get() <= 256 {
            let digits = k.to_radix_le(base.get()).into_iter().map(u32::from).collect();
            return Self::from_digits_unchecked(base, digits);
        }
        let mut digits = Vec::new();
        let mut k = k.clone();
        let b = BigUint::from(base.get());
        while !k.is_zero() {
            digits.push((&k % &b).to_u32().unwrap());
            k /= &b;
        }
        DigitVector { base, digits }
    }

    /// Parses a decimal integer string.
    pub fn parse(base: PrimeBase, s: &str) -> Result<Self> {
        let v = s
            .trim()
            .parse::<BigUint>()
            .map_err(|e| Error::invalid(format!("not a non-negative integer: {s:?} ({e})")))?;
        Ok(Self::from_biguint(base, &v))
    }

    #[inline]
    pub fn base(&self) -> PrimeBase {
        self.base
    }

    #[inline]
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at 0-based index `i` (coefficient of `b^i`), zero beyond the end.
    #[inline]
    pub fn digit(&self, i: usize) -> u32 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Number of stored digits; the integer is below `b^len`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn to_u128(&self) -> Option<u128> {
        let b = self.base.get() as u128;
        self.digits
            .iter()
            .rev()
            .try_fold(0u128, |acc, &d| acc.checked_mul(b)?.checked_add(d as u128))
    }

    pub fn to_biguint(&self) -> BigUint {
        let b = BigUint::from(self.base.get());
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &b + BigUint::from(d))
    }

    /// The truncated digit vector `tr_n(k)` of length `n`.
    pub fn truncated(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.digit(i)).collect()
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch {
                left: self.base.get(),
                right: other.base.get(),
            });
        }
        Ok(())
    }

    /// Digitwise sum modulo `b` without carries (`k ⊕ l`).
    pub fn digit_add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let b = self.base;
        let len = self.len().max(other.len());
        let digits = (0..len).map(|i| b.add(self.digit(i), other.digit(i))).collect();
        Ok(Self::from_digits_unchecked(b, digits))
    }

    /// Digitwise difference modulo `b` without borrows (`k ⊖ l`).
    pub fn digit_sub(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let b = self.base;
        let len = self.len().max(other.len());
        let digits = (0..len).map(|i| b.sub(self.digit(i), other.digit(i))).collect();
        Ok(Self::from_digits_unchecked(b, digits))
    }

    /// Number of nonzero digits, `κ(k)`.
    pub fn hamming_weight(&self) -> usize {
        hamming_weight_digits(&self.digits)
    }

    /// Sum of the `alpha` largest nonzero-digit positions, `μ_α(k)`.
    pub fn mu_alpha(&self, alpha: usize) -> usize {
        mu_alpha_digits(&self.digits, alpha)
    }

    /// Nonzero-digit positions `a_1 > a_2 > … > a_v` with their digits `κ_1, …, κ_v`.
    pub fn positions(&self) -> Vec<(usize, u32)> {
        self.digits
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| (i + 1, d))
            .collect()
    }
}

fn trim(digits: &mut Vec<u32>) {
    while digits.last() == Some(&0) {
        digits.pop();
    }
}

/// `κ` of a raw digit slice.
pub fn hamming_weight_digits(digits: &[u32]) -> usize {
    digits.iter().filter(|&&d| d != 0).count()
}

/// `μ_α` of a raw digit slice (least significant first).
pub fn mu_alpha_digits(digits: &[u32], alpha: usize) -> usize {
    digits
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &d)| d != 0)
        .take(alpha)
        .map(|(i, _)| i + 1)
        .sum()
}

impl fmt::Display for DigitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_u128() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}", self.to_biguint()),
        }
    }
}

impl fmt::Debug for DigitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_b{}", self, self.base.get())
    }
}

#[derive(Serialize, Deserialize)]
struct DigitVectorJson {
    value: String,
    base: u64,
}

impl Serialize for DigitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DigitVectorJson {
            value: self.to_string(),
            base: self.base.get() as u64,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DigitVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DigitVectorJson::deserialize(d)?;
        let base = PrimeBase::new(j.base).map_err(D::Error::custom)?;
        DigitVector::parse(base, &j.value).map_err(D::Error::custom)
    }
}

/// Applies `E_β`: digit `a` of `ks[j]` becomes digit `aβ + j` of the result.
pub fn interlace(ks: &[DigitVector]) -> Result<DigitVector> {
    let Some(first) = ks.first() else {
        return Err(Error::invalid("interlace needs at least one component"));
    };
    let base = first.base;
    for k in ks {
        first.check_base(k)?;
    }
    let beta = ks.len();
    let len = ks.iter().map(|k| k.len()).max().unwrap_or(0);
    let mut digits = vec![0u32; len * beta];
    for (j, k) in ks.iter().enumerate() {
        for (a, &d) in k.digits.iter().enumerate() {
            digits[a * beta + j] = d;
        }
    }
    Ok(DigitVector::from_digits_unchecked(base, digits))
}

/// Inverse of [`interlace`]: splits `k` into `beta` components.
pub fn deinterlace(k: &DigitVector, beta: usize) -> Result<Vec<DigitVector>> {
    if beta == 0 {
        return Err(Error::invalid("beta must be positive"));
    }
    let mut parts = vec![Vec::new(); beta];
    for (i, &d) in k.digits.iter().enumerate() {
        let part = &mut parts[i % beta];
        let a = i / beta;
        if part.len() <= a {
            part.resize(a + 1, 0);
        }
        part[a] = d;
    }
    Ok(parts
        .into_iter()
        .map(|p| DigitVector::from_digits_unchecked(k.base, p))
        .collect())
}

/// Element of `N_0^s`, all components in one base.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex {
    components: Vec<DigitVector>,
}

impl MultiIndex {
    pub fn new(components: Vec<DigitVector>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::invalid("a multi-index needs at least one component"));
        };
        for c in &components {
            first.check_base(c)?;
        }
        Ok(MultiIndex { components })
    }

    pub fn from_u128s(base: PrimeBase, ks: &[u128]) -> Result<Self> {
        Self::new(ks.iter().map(|&k| DigitVector::from_u128(base, k)).collect())
    }

    pub fn zero(base: PrimeBase, s: usize) -> Self {
        assert!(s >= 1, "dimension must be positive");
        MultiIndex {
            components: vec![DigitVector::zero(base); s],
        }
    }

    pub fn base(&self) -> PrimeBase {
        self.components[0].base
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[DigitVector] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(DigitVector::is_zero)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&DigitVector, &DigitVector) -> Result<DigitVector>,
    ) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiIndex { components })
    }

    pub fn digit_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, DigitVector::digit_add)
    }

    pub fn digit_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, DigitVector::digit_sub)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

/// A metric on `N_0`, extended additively to multi-indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `κ`: number of nonzero digits.
    Hamming,
    /// `μ_α`: sum of the `α` largest nonzero-digit positions (`Dick(1)` is the NRT metric).
    Dick(usize),
}

impl Metric {
    pub fn of_digits(self, digits: &[u32]) -> usize {
        match self {
            Metric::Hamming => hamming_weight_digits(digits),
            Metric::Dick(alpha) => mu_alpha_digits(digits, alpha),
        }
    }
}

pub fn metric_of_multiindex(k: &MultiIndex, metric: Metric) -> usize {
    k.components.iter().map(|c| metric.of_digits(&c.digits)).sum()
}

/// Applies `E_β` to each consecutive block of `beta` components.
pub fn interlace_multiindex(k: &MultiIndex, beta: usize) -> Result<MultiIndex> {
    if beta == 0 || k.dim() % beta != 0 {
        return Err(Error::invalid(format!(
            "{} components cannot be split into blocks of {beta}",
            k.dim()
        )));
    }
    let components = k
        .components
        .chunks(beta)
        .map(interlace)
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiIndex { components })
}

/// Inverse of [`interlace_multiindex`].
pub fn deinterlace_multiindex(k: &MultiIndex, beta: usize) -> Result<MultiIndex> {
    let mut components = Vec::with_capacity(k.dim() * beta);
    for c in &k.components {
        components.extend(deinterlace(c, beta)?);
    }
    Ok(MultiIndex { components })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(p: u64) -> PrimeBase {
        PrimeBase::new(p).unwrap()
    }

    fn dv(p: u64, k: u128) -> DigitVector {
        DigitVector::from_u128(b(p), k)
    }

    #[test]
    fn add_sub_examples() {
        assert_eq!(dv(2, 5).digit_add(&dv(2, 3)).unwrap(), dv(2, 6));
        assert!(dv(7, 123).digit_sub(&dv(7, 123)).unwrap().is_zero());
        assert_eq!(dv(3, 1).digit_add(&dv(3, 2)).unwrap(), dv(3, 0));
        assert!(matches!(
            dv(2, 1).digit_add(&dv(3, 1)),
            Err(Error::BaseMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(dv(2, 0).hamming_weight(), 0);
        assert_eq!(dv(2, 7).hamming_weight(), 3);
        assert_eq!(dv(5, 25).hamming_weight(), 1);
    }

    #[test]
    fn mu_examples() {
        assert_eq!(dv(2, 0).mu_alpha(3), 0);
        assert_eq!(dv(2, 5).mu_alpha(1), 3);
        assert_eq!(dv(2, 5).mu_alpha(2), 4);
        assert_eq!(dv(2, 5).mu_alpha(3), 4);
        assert_eq!(dv(3, 1).mu_alpha(2), 1);
        assert_eq!(dv(2, 5).positions(), vec![(3, 1), (1, 1)]);
    }

    #[test]
    fn multiindex_metric_examples() {
        let z = MultiIndex::zero(b(2), 3);
        assert_eq!(metric_of_multiindex(&z, Metric::Hamming), 0);
        let k = MultiIndex::from_u128s(b(2), &[5, 1]).unwrap();
        assert_eq!(metric_of_multiindex(&k, Metric::Dick(2)), 5);
        let k = MultiIndex::from_u128s(b(2), &[3, 3]).unwrap();
        assert_eq!(metric_of_multiindex(&k, Metric::Hamming), 4);
    }

    #[test]
    fn interlace_examples() {
        assert!(interlace(&[dv(2, 0), dv(2, 0)]).unwrap().is_zero());
        assert_eq!(interlace(&[dv(2, 1), dv(2, 1)]).unwrap(), dv(2, 3));
        assert_eq!(interlace(&[dv(2, 2), dv(2, 0)]).unwrap(), dv(2, 4));
        let k = MultiIndex::from_u128s(b(2), &[1, 1]).unwrap();
        assert_eq!(
            interlace_multiindex(&k, 2).unwrap(),
            MultiIndex::from_u128s(b(2), &[3]).unwrap()
        );
        let k = MultiIndex::from_u128s(b(2), &[1, 0, 0, 1]).unwrap();
        assert_eq!(
            interlace_multiindex(&k, 2).unwrap(),
            MultiIndex::from_u128s(b(2), &[1, 2]).unwrap()
        );
        assert!(interlace_multiindex(&MultiIndex::zero(b(2), 3), 2).is_err());
        assert!(interlace_multiindex(&MultiIndex::zero(b(2), 4), 2).unwrap().is_zero());
    }

    #[test]
    fn group_laws_exhaustive() {
        for p in [2u64, 3, 5] {
            let top = (p as u128).pow(4);
            let step = if p == 5 { 7 } else { 1 };
            for k in (0..top).step_by(step) {
                let kv = dv(p, k);
                assert!(kv.digit_add(&dv(p, 0)).unwrap() == kv);
                for l in (0..top).step_by(step) {
                    let lv = dv(p, l);
                    let s = kv.digit_add(&lv).unwrap();
                    assert_eq!(s, lv.digit_add(&kv).unwrap());
                    assert_eq!(s.digit_sub(&lv).unwrap(), kv);
                    let d = kv.digit_sub(&lv).unwrap();
                    assert!(d.hamming_weight() <= kv.hamming_weight() + lv.hamming_weight());
                }
            }
            for (x, y, z) in [(3u128, 7, 11), (1, 2, 3), (top - 1, top / 2, 5)] {
                let (x, y, z) = (dv(p, x), dv(p, y), dv(p, z));
                let l = x.digit_add(&y).unwrap().digit_add(&z).unwrap();
                let r = x.digit_add(&y.digit_add(&z).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }

    #[test]
    fn interlace_bijection_exhaustive() {
        for (p, m, beta) in [(2u64, 3u32, 2usize), (3, 2, 2), (2, 2, 3), (5, 1, 3)] {
            let q = (p as u128).pow(m);
            let total = q.pow(beta as u32);
            let mut seen = vec![false; total as usize];
            for idx in 0..total {
                let ks: Vec<DigitVector> = (0..beta)
                    .map(|j| dv(p, idx / q.pow(j as u32) % q))
                    .collect();
                let e = interlace(&ks).unwrap();
                let v = e.to_u128().unwrap();
                assert!(v < total);
                assert!(!seen[v as usize]);
                seen[v as usize] = true;
                let kappa: usize = ks.iter().map(|k| k.hamming_weight()).sum();
                assert_eq!(e.hamming_weight(), kappa);
                assert_eq!(deinterlace(&e, beta).unwrap(), ks);
            }
        }
    }

    #[test]
    fn interpolation_inequality() {
        for (alpha, beta) in [(2usize, 4usize), (2, 3), (3, 6), (3, 4), (2, 8)] {
            let a = (alpha - 1) as f64 / (beta - 1) as f64;
            let bb = (beta - alpha) as f64 / (beta - 1) as f64;
            for k in 0..(1u128 << 8) {
                let k = dv(2, k);
                let lhs = k.mu_alpha(alpha) as f64;
                let rhs = a * k.mu_alpha(beta) as f64 + bb * k.mu_alpha(1) as f64;
                assert!(lhs >= rhs - 1e-12, "k={k} α={alpha} β={beta}");
            }
        }
    }

    #[test]
    fn serde_shape() {
        let k = dv(3, 42);
        let j = serde_json::to_value(&k).unwrap();
        assert_eq!(j, serde_json::json!({"value": "42", "base": 3}));
        assert_eq!(serde_json::from_value::<DigitVector>(j).unwrap(), k);
        let m = MultiIndex::from_u128s(b(2), &[1, 20]).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"["1","20"]"#);
    }

    #[test]
    fn big_values_roundtrip() {
        let base = b(65521);
        let v: BigUint = BigUint::from(65521u32).pow(70) - 1u32;
        let k = DigitVector::from_biguint(base, &v);
        assert_eq!(k.len(), 70);
        assert_eq!(k.to_biguint(), v);
        assert_eq!(k.to_u128(), None);
        let k = DigitVector::parse(b(2), "340282366920938463463374607431768211456").unwrap();
        assert_eq!(k.len(), 129);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mu_alpha_ordering(k in 0u128..(1 << 40), p in prop::sample::select(vec![2u64, 3, 5, 7]), alpha in 1usize..6) {
                let k = dv(p, k);
                let mu1 = k.mu_alpha(1);
                prop_assert_eq!(mu1, k.len());
                prop_assert!(k.mu_alpha(alpha) <= k.mu_alpha(alpha + 1));
                prop_assert!(k.mu_alpha(alpha) <= alpha * mu1);
            }

            #[test]
            fn u128_roundtrip(k in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 11, 65521])) {
                let v = dv(p, k as u128);
                prop_assert_eq!(v.to_u128(), Some(k as u128));
                prop_assert_eq!(DigitVector::from_biguint(b(p), &v.to_biguint()), v);
            }
        }
    }
}
