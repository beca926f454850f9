//! Dual nets: enumeration, minimum metrics, order-`α` t-value verification and
//! the guaranteed metric bounds of the composite construction.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::digits::{hamming_weight_digits, mu_alpha_digits, DigitVector, Metric, MultiIndex};
use crate::error::{Error, Result};
use crate::ff::{EchelonBasis, FieldMatrix, PrimeBase};
use crate::nets::{ConstructionParams, DigitalNet};

/// Default cap on the number of dual elements an enumeration may visit.
pub const DEFAULT_DUAL_LIMIT: u128 = 1 << 24;

/// Default cap on the number of row selections `verify_order_t` may test.
pub const DEFAULT_SELECTION_LIMIT: u64 = 1 << 22;

/// The dual enumeration cap, honouring `HOQMC_MAX_DUAL` when set.
pub fn dual_limit_from_env() -> u128 {
    std::env::var("HOQMC_MAX_DUAL")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DUAL_LIMIT)
}

/// The dual net `P^⊥ ⊆ {0, …, b^n − 1}^s` of a digital net, represented by a
/// basis of the kernel of `(k_1, …, k_s) ↦ Σ_j C_j^T tr_n(k_j)`.
///
/// Elements are flat vectors of length `s·n`: component `j` occupies
/// `[j·n, (j+1)·n)`, least significant digit first.
#[derive(Clone, Debug)]
pub struct DualNet<'a> {
    net: &'a DigitalNet,
    basis: Vec<Vec<u32>>,
}

impl<'a> DualNet<'a> {
    /// Computes the kernel basis; refuses when the dual has more than `limit` elements.
    pub fn new(net: &'a DigitalNet, limit: u128) -> Result<Self> {
        let dual = Self::new_unguarded(net);
        match dual.size() {
            Some(sz) if sz <= limit => Ok(dual),
            _ => Err(Error::guard(
                "dual enumeration",
                format!("{}^{}", net.base().get(), dual.dim()),
                limit,
            )),
        }
    }

    /// Kernel basis without a size guard (no enumeration happens here).
    pub fn new_unguarded(net: &'a DigitalNet) -> Self {
        let (s, n, m) = (net.s(), net.n(), net.m());
        let mut a = FieldMatrix::zeros(net.base(), m, s * n);
        for (j, c) in net.matrices().iter().enumerate() {
            for i in 0..n {
                for r in 0..m {
                    a.set(r, j * n + i, c.get(i, r));
                }
            }
        }
        DualNet {
            net,
            basis: a.kernel_basis(),
        }
    }

    pub fn net(&self) -> &DigitalNet {
        self.net
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Dimension of the dual as an `F_b`-vector space.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `|P^⊥| = b^{dim}` when it fits in a `u128`.
    pub fn size(&self) -> Option<u128> {
        self.net.base().checked_pow(self.dim() as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Splits a flat element into its multi-index.
    pub fn to_multiindex(&self, flat: &[u32]) -> MultiIndex {
        let b = self.net.base();
        MultiIndex::new(
            flat.chunks(self.net.n())
                .map(|c| DigitVector::from_digits_unchecked(b, c.to_vec()))
                .collect(),
        )
        .expect("dual elements have at least one component")
    }

    /// True when `flat` satisfies `Σ_j C_j^T tr_n(k_j) = 0`.
    pub fn contains(&self, flat: &[u32]) -> bool {
        let net = self.net;
        let b = net.base();
        let n = net.n();
        (0..net.m()).all(|r| {
            let mut acc = 0u32;
            for (j, c) in net.matrices().iter().enumerate() {
                for i in 0..n {
                    acc = b.add(acc, b.mul(c.get(i, r), flat[j * n + i]));
                }
            }
            acc == 0
        })
    }

    /// Visits elements with coefficient indices in `[start, end)` in odometer order.
    fn visit_range(&self, start: u128, end: u128, f: &mut impl FnMut(&[u32])) {
        let b = self.net.base();
        let len = self.net.s() * self.net.n();
        let dim = self.dim();
        let mut coeff = DigitVector::from_u128(b, start).truncated(dim);
        let mut v = vec![0u32; len];
        for (c, basis) in coeff.iter().zip(&self.basis) {
            for (x, &e) in v.iter_mut().zip(basis) {
                *x = b.add(*x, b.mul(*c, e));
            }
        }
        let mut idx = start;
        while idx < end {
            f(&v);
            idx += 1;
            // each digit that changes (including wrap-arounds) adds its basis vector once
            for (i, c) in coeff.iter_mut().enumerate() {
                for (x, &e) in v.iter_mut().zip(&self.basis[i]) {
                    *x = b.add(*x, e);
                }
                *c += 1;
                if *c < b.get() {
                    break;
                }
                *c = 0;
            }
        }
    }

    /// Visits every element once, sequentially, in a deterministic order; `0` first.
    pub fn for_each(&self, mut f: impl FnMut(&[u32])) {
        let total = self.size().expect("guarded dual size fits in u128");
        self.visit_range(0, total, &mut f);
    }

    /// Parallel fold over the elements: contiguous index ranges are folded
    /// independently and merged in range order, so the result is deterministic.
    pub fn fold<A: Send>(
        &self,
        init: impl Fn() -> A + Sync,
        fold: impl Fn(&mut A, &[u32]) + Sync,
        merge: impl Fn(A, A) -> A,
    ) -> A {
        let total = self.size().expect("guarded dual size fits in u128");
        let chunks = (rayon::current_num_threads() as u128 * 8).clamp(1, total.max(1));
        let step = total.div_ceil(chunks).max(1);
        let parts: Vec<A> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                let lo = (c * step).min(total);
                let hi = ((c + 1) * step).min(total);
                self.visit_range(lo, hi, &mut |v| fold(&mut acc, v));
                acc
            })
            .collect();
        parts.into_iter().reduce(merge).unwrap_or_else(init)
    }

    /// Every element as a multi-index.
    pub fn enumerate(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        let total = self.size().expect("guarded dual size fits in u128");
        let b = self.net.base();
        let dim = self.dim();
        let len = self.net.s() * self.net.n();
        (0..total).map(move |idx| {
            let coeff = DigitVector::from_u128(b, idx).truncated(dim);
            let mut v = vec![0u32; len];
            for (c, basis) in coeff.iter().zip(&self.basis) {
                for (x, &e) in v.iter_mut().zip(basis) {
                    *x = b.add(*x, b.mul(*c, e));
                }
            }
            self.to_multiindex(&v)
        })
    }

    fn metric_of_flat(&self, flat: &[u32], metric: Metric) -> usize {
        flat.chunks(self.net.n()).map(|c| metric.of_digits(c)).sum()
    }
}

/// Every element of `P^⊥` (including `0`), guarded by `limit`.
pub fn dual_enumerate(net: &DigitalNet, limit: u128) -> Result<Vec<MultiIndex>> {
    let dual = DualNet::new(net, limit)?;
    Ok(dual.enumerate().collect())
}

/// Minimum of a metric over `P^⊥ ∖ {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MinMetric {
    Finite(usize),
    /// The dual is `{0}`.
    Infinite,
}

impl MinMetric {
    pub fn value(self) -> Option<usize> {
        match self {
            MinMetric::Finite(v) => Some(v),
            MinMetric::Infinite => None,
        }
    }

    /// True when the minimum is at least `bound` (always true for a trivial dual).
    pub fn at_least(self, bound: usize) -> bool {
        self.value().map_or(true, |v| v >= bound)
    }
}

impl Serialize for MinMetric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

pub fn min_metric(net: &DigitalNet, metric: Metric, limit: u128) -> Result<MinMetric> {
    let dual = DualNet::new(net, limit)?;
    let m = dual.fold(
        || usize::MAX,
        |acc, v| {
            if v.iter().any(|&d| d != 0) {
                *acc = (*acc).min(dual.metric_of_flat(v, metric));
            }
        },
        usize::min,
    );
    Ok(if m == usize::MAX {
        MinMetric::Infinite
    } else {
        MinMetric::Finite(m)
    })
}

/// Metrics of one pass over a dual net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualSummary {
    pub size: u128,
    pub hamming_min: MinMetric,
    pub nrt_min: MinMetric,
    /// `α ↦ min μ_α`.
    pub mu_alpha_min: BTreeMap<usize, MinMetric>,
    /// Nonzero elements grouped by `(μ_1(k_1), …, μ_1(k_s))`, when requested.
    #[serde(skip)]
    pub fibers: Option<BTreeMap<Vec<usize>, u64>>,
}

#[derive(Clone)]
struct Acc {
    hamming: usize,
    nrt: usize,
    mus: Vec<usize>,
    fibers: Option<BTreeMap<Vec<usize>, u64>>,
}

/// Minimum Hamming, NRT and `μ_α` metrics (for each requested `α`) in one pass,
/// optionally with the NRT fiber counts.
pub fn dual_summary(net: &DigitalNet, alphas: &[usize], fibers: bool, limit: u128) -> Result<DualSummary> {
    let dual = DualNet::new(net, limit)?;
    let n = net.n();
    let acc = dual.fold(
        || Acc {
            hamming: usize::MAX,
            nrt: usize::MAX,
            mus: vec![usize::MAX; alphas.len()],
            fibers: fibers.then(BTreeMap::new),
        },
        |acc, v| {
            if v.iter().all(|&d| d == 0) {
                return;
            }
            acc.hamming = acc.hamming.min(hamming_weight_digits(v));
            let key: Vec<usize> = v.chunks(n).map(|c| mu_alpha_digits(c, 1)).collect();
            acc.nrt = acc.nrt.min(key.iter().sum());
            for (slot, &a) in acc.mus.iter_mut().zip(alphas) {
                let mu: usize = v.chunks(n).map(|c| mu_alpha_digits(c, a)).sum();
                *slot = (*slot).min(mu);
            }
            if let Some(f) = acc.fibers.as_mut() {
                *f.entry(key).or_insert(0) += 1;
            }
        },
        |mut a, b| {
            a.hamming = a.hamming.min(b.hamming);
            a.nrt = a.nrt.min(b.nrt);
            for (x, y) in a.mus.iter_mut().zip(b.mus) {
                *x = (*x).min(y);
            }
            if let (Some(fa), Some(fb)) = (a.fibers.as_mut(), b.fibers) {
                for (k, c) in fb {
                    *fa.entry(k).or_insert(0) += c;
                }
            }
            a
        },
    );
    let wrap = |v: usize| {
        if v == usize::MAX {
            MinMetric::Infinite
        } else {
            MinMetric::Finite(v)
        }
    };
    Ok(DualSummary {
        size: dual.size().unwrap_or(u128::MAX),
        hamming_min: wrap(acc.hamming),
        nrt_min: wrap(acc.nrt),
        mu_alpha_min: alphas.iter().zip(acc.mus).map(|(&a, v)| (a, wrap(v))).collect(),
        fibers: acc.fibers,
    })
}

/// Checks the counting bound `#{k ∈ P^⊥∖{0} : μ_1(k_j) = l_j ∀j} ≤ b^{|l|_1 − μ_1(P) + 1}`
/// on every fiber. Returns the violating fibers (empty when the bound holds).
pub fn counting_bound_violations(summary: &DualSummary, base: PrimeBase) -> Vec<(Vec<usize>, u64)> {
    let (Some(fibers), MinMetric::Finite(mu1)) = (&summary.fibers, summary.nrt_min) else {
        return Vec::new();
    };
    fibers
        .iter()
        .filter(|(l, &count)| {
            let z: usize = l.iter().sum();
            // z >= μ_1(P) for every nonempty fiber
            let exp = (z + 1).saturating_sub(mu1) as u32;
            match (base.get() as u128).checked_pow(exp) {
                Some(cap) => count as u128 > cap,
                None => false,
            }
        })
        .map(|(l, &c)| (l.clone(), c))
        .collect()
}

/// Checks the order-`α` net property with quality parameter `t`: every selection
/// of rows `c_{i,j}` whose `α`-truncated index weight is at most `αm − t` must be
/// linearly independent.
///
/// Per coordinate, only the `α` largest chosen indices carry weight, so a
/// selection with `α` indices may be extended by all smaller rows for free; only
/// these maximal selections are tested. Refuses when more than `limit`
/// selections would be tested.
pub fn verify_order_t(net: &DigitalNet, alpha: usize, t: usize, limit: u64) -> Result<bool> {
    if alpha == 0 {
        return Err(Error::invalid("alpha must be positive"));
    }
    let m = net.m();
    if t > alpha * m {
        return Err(Error::invalid(format!("t = {t} exceeds alpha*m = {}", alpha * m)));
    }
    let budget = alpha * m - t;
    if budget == 0 {
        return Ok(true);
    }
    let needed = count_selections(net.s(), net.n(), alpha, budget, limit);
    if needed > limit {
        return Err(Error::guard("order-t verification", format!(">{limit} selections"), limit));
    }
    let mut search = OrderSearch {
        net,
        alpha,
        chosen: Vec::new(),
    };
    Ok(search.coordinate(0, budget, EchelonBasis::new(net.base())))
}

// Number of per-coordinate decreasing tuples (size <= α) within the budget, capped.
fn count_selections(s: usize, n: usize, alpha: usize, budget: usize, cap: u64) -> u64 {
    // ways[w] = number of single-coordinate tuples of weight exactly w
    let mut per = vec![vec![0u64; budget + 1]; alpha + 1];
    // per[u][w]: decreasing tuples of length u with top index <= current, weight w
    per[0][0] = 1;
    for i in 1..=n.min(budget) {
        for u in (1..=alpha).rev() {
            for w in (i..=budget).rev() {
                per[u][w] = per[u][w].saturating_add(per[u - 1][w - i]);
            }
        }
    }
    let mut single = vec![0u64; budget + 1];
    for row in &per {
        for (w, &c) in row.iter().enumerate() {
            single[w] = single[w].saturating_add(c);
        }
    }
    let mut total = vec![0u64; budget + 1];
    total[0] = 1;
    for _ in 0..s {
        let mut next = vec![0u64; budget + 1];
        for (w0, &a) in total.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (w1, &c) in single.iter().enumerate().take(budget + 1 - w0) {
                next[w0 + w1] = next[w0 + w1].saturating_add(a.saturating_mul(c));
            }
        }
        total = next;
    }
    total.iter().fold(0u64, |a, &c| a.saturating_add(c)).min(cap.saturating_add(1))
}

struct OrderSearch<'a> {
    net: &'a DigitalNet,
    alpha: usize,
    chosen: Vec<usize>,
}

impl OrderSearch<'_> {
    // Selects rows for coordinate j onwards; false as soon as a dependent selection appears.
    fn coordinate(&mut self, j: usize, budget: usize, basis: EchelonBasis) -> bool {
        if j == self.net.s() {
            return true;
        }
        self.chosen.clear();
        self.extend(j, budget, self.net.n(), basis)
    }

    // Chooses the next (smaller) index for coordinate j, below `top` (1-based, exclusive upper bound + 1).
    fn extend(&mut self, j: usize, budget: usize, top: usize, basis: EchelonBasis) -> bool {
        let c = &self.net.matrices()[j];
        // stop choosing for this coordinate
        let saved = std::mem::take(&mut self.chosen);
        let ok = self.coordinate(j + 1, budget, basis.clone());
        self.chosen = saved;
        if !ok {
            return false;
        }
        if self.chosen.len() == self.alpha {
            return true;
        }
        for i in 1..=top.min(budget) {
            let mut next = basis.clone();
            if !next.insert(c.row(i - 1)) {
                return false;
            }
            self.chosen.push(i);
            let ok = if self.chosen.len() == self.alpha {
                // the remaining rows 1..i-1 come for free
                let mut full = next.clone();
                let indep = (1..i).all(|r| full.insert(c.row(r - 1)));
                if !indep {
                    false
                } else {
                    let saved = std::mem::take(&mut self.chosen);
                    let ok = self.coordinate(j + 1, budget - i, full);
                    self.chosen = saved;
                    ok
                }
            } else {
                self.extend(j, budget - i, i - 1, next)
            };
            self.chosen.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

/// `t = α·min{m, t′ + ⌊s(α−1)/2⌋}` for a `β = α` interlacing of an order-1 `(t′, m, αs)`-net.
pub fn predicted_t_interlaced(t_prime: usize, alpha: usize, s: usize, m: usize) -> usize {
    alpha * m.min(t_prime + s * (alpha - 1) / 2)
}

/// `t′ = ⌈t·α′/α⌉`: an order-`α` net with parameter `t` is an order-`α′` net with `t′`.
pub fn propagate_t(t: usize, alpha: usize, alpha_prime: usize) -> usize {
    (t * alpha_prime).div_ceil(alpha)
}

/// Guaranteed lower bounds on the minimum metrics of the composite construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MetricBounds {
    /// `κ(P) ≥ g + 1`.
    pub hamming: usize,
    /// `μ_β(P) ≥ max{0, β(gw − ⌊s(β−1)/2⌋)} + 1`.
    pub mu_beta: usize,
    /// `μ_1(P) ≥ gw − t′ + 1` with `t′ = min{gw, ⌊s(β−1)/2⌋}`.
    pub mu_1: usize,
}

pub fn metric_lower_bounds(p: &ConstructionParams) -> MetricBounds {
    let gw = p.g * p.w;
    let half = p.s * (p.beta - 1) / 2;
    let t_prime = gw.min(half);
    MetricBounds {
        hamming: p.g + 1,
        mu_beta: p.beta * gw.saturating_sub(half) + 1,
        mu_1: gw - t_prime + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::{chen_skriganov, construct_optimal_net, Provenance};

    fn b(p: u64) -> PrimeBase {
        PrimeBase::new(p).unwrap()
    }

    fn custom(p: u64, rows: &[&[u64]]) -> DigitalNet {
        DigitalNet::new(vec![FieldMatrix::from_rows(b(p), rows).unwrap()], Provenance::Custom).unwrap()
    }

    fn brute_dual(net: &DigitalNet) -> Vec<Vec<u32>> {
        let (s, n) = (net.s(), net.n());
        let total = (net.base().get() as u128).pow((s * n) as u32);
        let dual = DualNet::new_unguarded(net);
        (0..total)
            .map(|i| DigitVector::from_u128(net.base(), i).truncated(s * n))
            .filter(|v| dual.contains(v))
            .collect()
    }

    #[test]
    fn enumerate_examples() {
        let net = DigitalNet::new(vec![FieldMatrix::identity(b(3), 3)], Provenance::Custom).unwrap();
        let d = dual_enumerate(&net, 100).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].is_zero());
        assert_eq!(min_metric(&net, Metric::Hamming, 100).unwrap(), MinMetric::Infinite);

        let net = custom(2, &[&[1], &[0]]);
        let mut vals: Vec<u128> = dual_enumerate(&net, 100)
            .unwrap()
            .iter()
            .map(|k| k.components()[0].to_u128().unwrap())
            .collect();
        vals.sort();
        assert_eq!(vals, vec![0, 2]);

        let net = chen_skriganov(b(5), 2, 1, 2, None, false).unwrap();
        assert!(matches!(dual_enumerate(&net, 10), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for net in [
            chen_skriganov(b(3), 2, 1, 2, None, false).unwrap(),
            chen_skriganov(b(5), 2, 1, 1, None, false).unwrap(),
            chen_skriganov(b(2), 2, 1, 2, None, false).unwrap().with_precision(3).unwrap(),
            custom(3, &[&[1, 2], &[0, 1], &[2, 2]]),
        ] {
            let dual = DualNet::new(&net, 1 << 20).unwrap();
            let mut got = Vec::new();
            dual.for_each(|v| got.push(v.to_vec()));
            let mut folded = dual.fold(Vec::new, |acc, v| acc.push(v.to_vec()), |mut a, b| {
                a.extend(b);
                a
            });
            assert!(got[0].iter().all(|&d| d == 0));
            let mut want = brute_dual(&net);
            got.sort();
            folded.sort();
            want.sort();
            assert_eq!(got, want);
            assert_eq!(folded, want);
            assert_eq!(want.len() as u128, dual.size().unwrap());
        }
    }

    #[test]
    fn full_rank_dual_size() {
        let net = chen_skriganov(b(5), 3, 1, 2, None, false).unwrap();
        let dual = DualNet::new(&net, 1 << 20).unwrap();
        assert_eq!(dual.size(), Some(5u128.pow(3 * 2 - 2)));
    }

    #[test]
    fn chen_skriganov_minimum_metrics() {
        for (p, s, g, w) in [(5u64, 2usize, 1usize, 1usize), (5, 2, 2, 1), (5, 2, 1, 3), (7, 3, 2, 1)] {
            let net = chen_skriganov(b(p), s, g, w, None, true).unwrap();
            let sum = dual_summary(&net, &[2], true, 1 << 24).unwrap();
            assert!(sum.hamming_min.at_least(g + 1), "{sum:?}");
            assert!(sum.nrt_min.at_least(g * w + 1), "{sum:?}");
            assert_eq!(min_metric(&net, Metric::Hamming, 1 << 24).unwrap(), sum.hamming_min);
            assert_eq!(min_metric(&net, Metric::Dick(1), 1 << 24).unwrap(), sum.nrt_min);
            assert!(counting_bound_violations(&sum, net.base()).is_empty());
        }
    }

    #[test]
    fn subgroup_closure() {
        let net = chen_skriganov(b(3), 2, 1, 2, None, false).unwrap();
        let elems: Vec<MultiIndex> = dual_enumerate(&net, 1 << 10).unwrap();
        let dual = DualNet::new(&net, 1 << 10).unwrap();
        for k in &elems {
            for l in &elems {
                let d = k.digit_sub(l).unwrap();
                let flat: Vec<u32> = d.components().iter().flat_map(|c| c.truncated(net.n())).collect();
                assert!(dual.contains(&flat));
            }
        }
    }

    #[test]
    fn t_formulas() {
        assert_eq!(predicted_t_interlaced(0, 2, 1, 4), 0);
        assert_eq!(predicted_t_interlaced(0, 4, 1, 4), 4);
        assert_eq!(predicted_t_interlaced(5, 3, 2, 5), 15);
        assert_eq!(propagate_t(0, 4, 1), 0);
        for (s, beta) in [(1usize, 4usize), (2, 5), (3, 6)] {
            let half = s * (beta - 1) / 2;
            assert_eq!(propagate_t(beta * half, beta, 1), half);
            for alpha in 1..beta {
                assert_eq!(propagate_t(beta * half, beta, alpha), alpha * half);
            }
        }
    }

    #[test]
    fn metric_bound_examples() {
        let p = ConstructionParams::new(1, 2, 4, 2, 1, b(11), None, false).unwrap();
        assert_eq!(metric_lower_bounds(&p), MetricBounds { hamming: 3, mu_beta: 5, mu_1: 2 });
        let p = ConstructionParams::new(1, 2, 2, 1, 3, b(5), None, false).unwrap();
        assert_eq!(metric_lower_bounds(&p).mu_beta, 7);
        let p = ConstructionParams::new(2, 2, 5, 1, 1, b(11), None, false).unwrap();
        assert_eq!(metric_lower_bounds(&p).mu_beta, 1);
    }

    #[test]
    fn order_t_examples() {
        let net = chen_skriganov(b(5), 2, 1, 3, None, false).unwrap();
        assert!(verify_order_t(&net, 2, 6, 1 << 20).unwrap());
        assert!(verify_order_t(&net, 1, 0, 1 << 20).unwrap());
        // two equal matrices cannot be a (0, m, 2)-net
        let c = FieldMatrix::identity(b(3), 2);
        let bad = DigitalNet::new(vec![c.clone(), c], Provenance::Custom).unwrap();
        assert!(!verify_order_t(&bad, 1, 0, 1 << 20).unwrap());
        assert!(verify_order_t(&bad, 1, 1, 1 << 20).unwrap());
        assert!(matches!(
            verify_order_t(&net, 1, 0, 2),
            Err(Error::GuardExceeded { .. })
        ));
    }

    // Brute-force reference: every subset of rows with the α-truncated weight in budget.
    fn order_t_brute(net: &DigitalNet, alpha: usize, t: usize) -> bool {
        let (s, n, m) = (net.s(), net.n(), net.m());
        let budget = alpha * m - t;
        let total = 1u64 << (s * n);
        (0..total).all(|mask| {
            let mut weight = 0;
            let mut rows = Vec::new();
            for j in 0..s {
                let idx: Vec<usize> = (1..=n).rev().filter(|i| mask >> (j * n + i - 1) & 1 == 1).collect();
                weight += idx.iter().take(alpha).sum::<usize>();
                rows.extend(idx.iter().map(|&i| net.matrices()[j].row(i - 1).to_vec()));
            }
            weight > budget || crate::ff::rows_independent(&rows, net.base())
        })
    }

    #[test]
    fn order_t_matches_brute_force() {
        let p = ConstructionParams::new(1, 2, 2, 1, 2, b(3), None, false).unwrap();
        let nets = vec![
            construct_optimal_net(&p).unwrap(),
            chen_skriganov(b(3), 2, 1, 3, None, false).unwrap(),
            chen_skriganov(b(2), 2, 1, 3, None, false).unwrap(),
            DigitalNet::new(
                vec![
                    FieldMatrix::from_rows(b(2), &[[1u64, 0, 1], [1, 1, 0], [0, 1, 1], [1, 0, 0]]).unwrap(),
                    FieldMatrix::from_rows(b(2), &[[0u64, 1, 1], [1, 0, 1], [1, 1, 1], [0, 0, 1]]).unwrap(),
                ],
                Provenance::Custom,
            )
            .unwrap(),
        ];
        for net in &nets {
            for alpha in 1..=3 {
                for t in 0..=alpha * net.m() {
                    assert_eq!(
                        verify_order_t(net, alpha, t, 1 << 24).unwrap(),
                        order_t_brute(net, alpha, t),
                        "alpha={alpha} t={t}"
                    );
                }
            }
        }
    }
}
