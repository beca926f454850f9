use super::*;
use num_rational::BigRational;

use crate::bernoulli::bernoulli;

fn b(p: u64) -> PrimeBase {
    PrimeBase::new(p).unwrap()
}

fn wi(p: u64, k: u128) -> WalshIndex {
    WalshIndex::from_u128(b(p), k)
}

fn close(z: Complex64, re: f64, im: f64, tol: f64) -> bool {
    (z.re - re).abs() <= tol && (z.im - im).abs() <= tol
}

#[test]
fn wal_examples() {
    assert_eq!(wal(&wi(5, 0), &[3, 4, 1]), Complex64::new(1.0, 0.0));
    assert_eq!(wal(&wi(2, 1), &[1]), Complex64::new(-1.0, 0.0));
    let z = wal(&wi(3, 1), &[1]);
    let t = 2.0 * std::f64::consts::PI / 3.0;
    assert!(close(z, t.cos(), t.sin(), 1e-15));
    for p in [2u64, 3, 5, 7] {
        for k in 0..50u128 {
            let x: Vec<u32> = (0..6).map(|i| (i * 7 + k as u32) % p as u32).collect();
            assert!((wal(&wi(p, k), &x).norm() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn wal_multi_examples() {
    let base = b(2);
    let x = NetPoint::new(base, vec![vec![1, 0], vec![1, 0]]).unwrap();
    let zero = MultiIndex::zero(base, 2);
    assert_eq!(wal_multi(&zero, &x).unwrap(), Complex64::new(1.0, 0.0));
    let k = MultiIndex::from_u128s(base, &[1, 1]).unwrap();
    assert_eq!(wal_multi(&k, &x).unwrap(), Complex64::new(1.0, 0.0));
    let k = MultiIndex::from_u128s(base, &[1, 3]).unwrap();
    assert_eq!(wal_multi(&k, &NetPoint::origin(base, 2, 4)).unwrap(), Complex64::new(1.0, 0.0));
    assert!(wal_multi(&MultiIndex::zero(base, 3), &x).is_err());
}

#[test]
fn cell_exponents_match_wal() {
    for (p, level) in [(2u64, 5usize), (3, 3), (5, 2)] {
        let m = (p as u128).pow(level as u32);
        for k in [1u128, 2, m / 2, m - 1] {
            let kd = DigitVector::from_u128(b(p), k);
            let e = cell_exponents(&kd, level);
            for c in 0..m {
                let x = DigitVector::from_u128(b(p), c).truncated(level);
                let xi: Vec<u32> = x.iter().rev().copied().collect();
                assert_eq!(e[c as usize], wal_exponent(&kd, &xi));
            }
        }
    }
}

#[test]
fn orthonormal_on_full_grid() {
    for (p, level) in [(2u64, 4usize), (3, 2), (5, 2)] {
        let m = (p as u128).pow(level as u32);
        let pts: Vec<Vec<u32>> = (0..m)
            .map(|c| DigitVector::from_u128(b(p), c).truncated(level).into_iter().rev().collect())
            .collect();
        for k in 0..m {
            for l in 0..m {
                let s: Complex64 = pts
                    .iter()
                    .map(|x| wal(&wi(p, k), x) * wal(&wi(p, l), x).conj())
                    .sum::<Complex64>()
                    / m as f64;
                let want = if k == l { 1.0 } else { 0.0 };
                assert!(close(s, want, 0.0, 1e-12), "k={k} l={l}");
            }
        }
    }
}

#[test]
fn bernoulli_coefficient_examples() {
    assert_eq!(walsh_coeff_bernoulli(0, &wi(3, 0)).unwrap().value, Complex64::new(1.0, 0.0));
    for r in 1..8 {
        assert_eq!(walsh_coeff_bernoulli(r, &wi(5, 0)).unwrap().value, Complex64::new(0.0, 0.0));
    }
    let c = walsh_coeff_bernoulli(1, &wi(2, 1)).unwrap();
    assert_eq!(c.value, Complex64::new(-0.25, 0.0));
    assert!(c.abs_error < 1e-16);
}

// Midpoint rule for ∫ B_r(x)/r! conj(wal_k(x)) dx, on a grid aligned with the cells.
fn quad_bernoulli(p: u64, r: usize, k: u128, level: usize, sub: usize) -> Complex64 {
    let m = (p as usize).pow(level as u32);
    let kd = wi(p, k);
    let fact: f64 = (1..=r).map(|i| i as f64).product();
    let mut acc = Complex64::new(0.0, 0.0);
    for c in 0..m {
        let xi: Vec<u32> = DigitVector::from_u128(b(p), c as u128)
            .truncated(level)
            .into_iter()
            .rev()
            .collect();
        let wv = wal(&kd, &xi).conj();
        for j in 0..sub {
            let x = (c as f64 + (j as f64 + 0.5) / sub as f64) / m as f64;
            acc += wv * bernoulli(r, x).unwrap() / fact;
        }
    }
    acc / (m * sub) as f64
}

#[test]
fn bernoulli_coefficients_match_quadrature() {
    for (p, r, k) in [(2u64, 2usize, 3u128), (3, 3, 5), (5, 1, 7), (3, 4, 8)] {
        let level = DigitVector::from_u128(b(p), k).len();
        let q = quad_bernoulli(p, r, k, level, 2000);
        let c = walsh_coeff_bernoulli(r, &wi(p, k)).unwrap();
        assert!((c.value - q).norm() < 1e-7, "p={p} r={r} k={k}: {} vs {}", c.value, q);
    }
}

#[test]
fn lemma_many_digits_vanish() {
    // κ(k) > α forces b̂_τ(k) = 0 for τ <= α
    for (p, top) in [(2u64, 128u128), (3, 243)] {
        for alpha in 2..=3 {
            for k in 1..top {
                let kd = DigitVector::from_u128(b(p), k);
                if kd.hamming_weight() <= alpha {
                    continue;
                }
                for tau in 0..=alpha {
                    assert!(bernoulli_coeff_exact(tau, &kd).unwrap().is_zero(), "k={k} τ={tau}");
                }
            }
        }
    }
}

#[test]
fn periodic_examples() {
    assert!(walsh_coeff_bernoulli_periodic(1, &wi(2, 1), &wi(2, 1)).is_err());
    for r in 2..6 {
        assert_eq!(
            walsh_coeff_bernoulli_periodic(r, &wi(3, 0), &wi(3, 0)).unwrap(),
            WalshCoefficient::ZERO
        );
    }
    // κ(k ⊖ l) > r gives an exact zero
    let base = b(3);
    for r in 2..=3 {
        for k in 0..81u128 {
            for l in (0..81u128).step_by(4) {
                let kd = DigitVector::from_u128(base, k);
                let ld = DigitVector::from_u128(base, l);
                if kd.digit_sub(&ld).unwrap().hamming_weight() > r {
                    assert!(periodic_coeff_exact(r, &kd, &ld).unwrap().is_zero());
                }
            }
        }
    }
}

#[test]
fn periodic_b2_r2_matches_riemann_sum() {
    let c = walsh_coeff_bernoulli_periodic(2, &wi(2, 1), &wi(2, 1)).unwrap();
    let n = 1usize << 12;
    let h = 1.0 / n as f64;
    let sign = |x: usize| if x < n / 2 { 1.0 } else { -1.0 };
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = (i as f64 - j as f64) * h;
            let frac = d - d.floor();
            acc += (frac * frac - frac + 1.0 / 6.0) / 2.0 * sign(i) * sign(j);
        }
    }
    acc *= h * h;
    assert!((c.value.re - acc).abs() < 1e-6, "{} vs {acc}", c.value.re);
    assert!(c.value.im.abs() < 1e-15);
    assert!((c.value.re - 0.0208333333333).abs() < 1e-10);
}

#[test]
fn kernel_examples() {
    for p in [2u64, 3, 5] {
        let c = kernel_walsh_coeff_1d(2, &wi(p, 0), &wi(p, 0)).unwrap();
        assert_eq!(c.value, Complex64::new(1.0, 0.0));
    }
    assert!(kernel_walsh_coeff_1d(1, &wi(2, 0), &wi(2, 0)).is_err());
    // κ(k ⊖ l) > 2α: exact zero
    let c = kernel_walsh_coeff_1d(2, &wi(2, 0b11111), &wi(2, 0)).unwrap();
    assert_eq!(c, WalshCoefficient::ZERO);
    let k = MultiIndex::from_u128s(b(2), &[0, 0]).unwrap();
    assert_eq!(kernel_walsh_coeff_sd(2, &k, &k).unwrap().value, Complex64::new(1.0, 0.0));
    let k = MultiIndex::from_u128s(b(2), &[0b11111, 1]).unwrap();
    let l = MultiIndex::from_u128s(b(2), &[0, 1]).unwrap();
    assert_eq!(kernel_walsh_coeff_sd(2, &k, &l).unwrap(), WalshCoefficient::ZERO);
    assert!(kernel_walsh_coeff_sd(2, &k, &MultiIndex::zero(b(2), 3)).is_err());
}

#[test]
fn kernel_conjugate_symmetry_and_product() {
    let base = b(3);
    for (k, l) in [(1u128, 2u128), (5, 7), (10, 19), (4, 4)] {
        let a = kernel_walsh_coeff_1d(2, &wi(3, k), &wi(3, l)).unwrap();
        let c = kernel_walsh_coeff_1d(2, &wi(3, l), &wi(3, k)).unwrap();
        assert!((a.value - c.value.conj()).norm() <= a.abs_error + c.abs_error);
    }
    let k = MultiIndex::from_u128s(base, &[5, 2]).unwrap();
    let l = MultiIndex::from_u128s(base, &[7, 1]).unwrap();
    let sd = kernel_walsh_coeff_sd(2, &k, &l).unwrap();
    let p = kernel_walsh_coeff_1d(2, &wi(3, 5), &wi(3, 7)).unwrap().value
        * kernel_walsh_coeff_1d(2, &wi(3, 2), &wi(3, 1)).unwrap().value;
    assert!((sd.value - p).norm() < 1e-15);
}

#[test]
fn diagonal_kernel_is_real_and_positive() {
    for p in [2u64, 3] {
        for k in 1..60u128 {
            let c = kernel_walsh_coeff_1d(2, &wi(p, k), &wi(p, k)).unwrap();
            assert!(c.value.im.abs() <= c.abs_error);
            assert!(c.value.re > 0.0);
        }
    }
}

#[test]
fn table_matches_exact() {
    for (p, level, alpha) in [(2u64, 5usize, 2usize), (3, 3, 2), (5, 2, 3), (2, 4, 3)] {
        let t = KernelWalshTable::new(b(p), alpha, level).unwrap();
        assert!(t.abs_error() < 1e-13, "{}", t.abs_error());
        let m = t.size() as u128;
        for k in (0..m).step_by(3) {
            for l in (0..m).step_by(5) {
                let e = kernel_walsh_coeff_1d(alpha, &wi(p, k), &wi(p, l)).unwrap();
                let diff = (t.get(k as usize, l as usize) - e.value).norm();
                assert!(diff <= t.abs_error() + e.abs_error, "p={p} k={k} l={l} diff={diff}");
            }
        }
    }
    assert!(KernelWalshTable::new(b(2), 2, 12).unwrap_err().is_guard());
}

#[test]
fn recursion_agrees_with_exact_route() {
    for (p, r, k, l, top) in [
        (2u64, 3usize, 1u128, 1u128, 10usize),
        (2, 4, 3, 2, 10),
        (3, 3, 2, 5, 6),
        (2, 5, 6, 6, 10),
        (3, 4, 1, 1, 6),
    ] {
        let direct = walsh_coeff_bernoulli_periodic(r, &wi(p, k), &wi(p, l)).unwrap();
        let rec = walsh_coeff_periodic_recursive(r, &wi(p, k), &wi(p, l), 1e-9, top).unwrap();
        let diff = (direct.value - rec.value).norm();
        assert!(diff <= direct.abs_error + rec.abs_error, "p={p} r={r} k={k} l={l}: {diff} > {}", rec.abs_error);
        assert!(rec.abs_error < 1e-5, "p={p} r={r} k={k} l={l}: {}", rec.abs_error);
    }
    assert!(walsh_coeff_periodic_recursive(2, &wi(2, 1), &wi(2, 1), 1e-9, 8).is_err());
    assert!(walsh_coeff_periodic_recursive(3, &wi(2, 0), &wi(2, 1), 1e-9, 8).is_err());
}

#[test]
fn decay_profile_small() {
    let prof = decay_profile(b(2), 2, 6).unwrap();
    assert_eq!(prof.blocks.len(), 6);
    assert!(prof.constant.is_finite() && prof.constant > 0.0);
}

#[test]
fn coefficient_json() {
    let c = walsh_coeff_bernoulli(1, &wi(2, 1)).unwrap();
    let j = c.to_json();
    assert_eq!(j["re"], -0.25);
    assert_eq!(j["im"], 0.0);
    assert!(j["abs_error"].as_f64().unwrap() >= 0.0);
    assert_eq!(serde_json::to_value(c).unwrap(), j);
}

#[test]
fn exact_values_in_base_two() {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let one = DigitVector::from_u128(b(2), 1);
    assert_eq!(bernoulli_coeff_exact(1, &one).unwrap().real_if_b2(), Some(q(-1, 4)));
    assert_eq!(periodic_coeff_exact(2, &one, &one).unwrap().real_if_b2(), Some(q(1, 48)));
}
