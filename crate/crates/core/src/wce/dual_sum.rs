use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::exact::neumaier_sum;
use super::{KernelConstants, WceMethod, WceReport};
use crate::dual::{dual_limit_from_env, DualNet};
use crate::error::{Error, Result};
use crate::nets::DigitalNet;
use crate::walsh::{check_alpha, KernelWalshTable};

/// Default cap on the number of dual-element pairs visited.
pub const DEFAULT_PAIR_LIMIT: u128 = 1 << 31;

/// `e²` as `Σ_{k,l ∈ P^⊥∖{0}} K̂_{α,s}(k,l)` over dual elements with every
/// component below `b^radius`.
///
/// With `P^⊥` taken at precision `radius`, this sum equals the double sum of
/// the kernel averaged over the level-`radius` cells containing each pair of
/// points; `error_budget` covers that cell-averaging (through the Lipschitz
/// constant of `K_α`) and all rounding.
pub fn wce_dual_truncated(net: &DigitalNet, alpha: usize, radius: usize) -> Result<WceReport> {
    wce_dual_truncated_with(net, alpha, radius, dual_limit_from_env(), DEFAULT_PAIR_LIMIT)
}

pub fn wce_dual_truncated_with(
    net: &DigitalNet,
    alpha: usize,
    radius: usize,
    dual_limit: u128,
    pair_limit: u128,
) -> Result<WceReport> {
    check_alpha(alpha)?;
    if radius == 0 {
        return Err(Error::invalid("radius must be positive"));
    }
    let base = net.base();
    let b = base.get() as usize;
    let s = net.s();
    let n_points = net
        .n_points()
        .filter(|&n| n <= u64::MAX as u128)
        .ok_or_else(|| Error::guard("dual sum", format!("{}^{} points", b, net.m()), u64::MAX))? as u64;
    let table = KernelWalshTable::new(base, alpha, radius)?;
    let tnet = net.with_precision(radius)?;
    let dual = DualNet::new(&tnet, dual_limit)?;
    let size = dual.size().unwrap_or(u128::MAX);
    if size.saturating_mul(size) / 2 > pair_limit {
        return Err(Error::guard("dual pair sum", format!("{size}^2/2 pairs"), pair_limit));
    }

    // nonzero elements as component values, components mapped to a compact index
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut values: Vec<usize> = Vec::new();
    let mut elems: Vec<Vec<usize>> = Vec::new();
    dual.for_each(|flat| {
        if flat.iter().all(|&d| d == 0) {
            return;
        }
        let comps = flat
            .chunks(radius)
            .map(|c| {
                let v = c.iter().rev().fold(0usize, |acc, &d| acc * b + d as usize);
                *index.entry(v).or_insert_with(|| {
                    values.push(v);
                    values.len() - 1
                })
            })
            .collect();
        elems.push(comps);
    });

    // K̂_α over the used values; structural zeros where κ(k ⊖ l) > 2α
    let digits = |mut v: usize| {
        let mut d = vec![0usize; radius];
        for x in d.iter_mut() {
            *x = v % b;
            v /= b;
        }
        d
    };
    let vd: Vec<Vec<usize>> = values.iter().map(|&v| digits(v)).collect();
    let u = values.len();
    let mut k1 = vec![Complex64::new(0.0, 0.0); u * u];
    k1.par_chunks_mut(u.max(1)).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate() {
            let kappa = vd[i].iter().zip(&vd[j]).filter(|(x, y)| x != y).count();
            if kappa <= 2 * alpha {
                *slot = table.get(values[i], values[j]);
            }
        }
    });

    let eps = table.abs_error();
    let uu = f64::EPSILON / 2.0;
    // Σ_i Re T(i,i) + 2 Σ_{i<i'} Re T(i,i'), T the product over coordinates
    let rows: Vec<(f64, f64, f64)> = (0..elems.len())
        .into_par_iter()
        .map(|i| {
            let mut terms = Vec::with_capacity(elems.len() - i);
            let mut err = 0.0;
            'pairs: for i2 in i..elems.len() {
                let mut prod = Complex64::new(1.0, 0.0);
                let mut mag = 1.0;
                let mut exact_mag = 1.0;
                for j in 0..s {
                    let z = k1[elems[i][j] * u + elems[i2][j]];
                    if z.re == 0.0 && z.im == 0.0 {
                        continue 'pairs;
                    }
                    prod *= z;
                    exact_mag *= z.norm();
                    mag *= z.norm() + eps;
                }
                let w = if i2 == i { 1.0 } else { 2.0 };
                // entry errors, then complex products
                err += w * ((mag - exact_mag) + 4.0 * (s as f64 - 1.0) * uu * mag) * 1.01;
                terms.push(w * prod.re);
            }
            let (sum, abs) = neumaier_sum(terms);
            (sum, abs, err)
        })
        .collect();
    let (sum, abs_rows) = neumaier_sum(rows.iter().map(|r| r.0));
    let abs: f64 = rows.iter().map(|r| r.1).sum::<f64>() + abs_rows;
    let err: f64 = rows.iter().map(|r| r.2).sum();

    let kc = KernelConstants::new(alpha);
    let cell = (b as f64).powi(-(radius as i32));
    let truncation = s as f64 * kc.k_max().powi(s as i32 - 1) * 2.0 * kc.lipschitz * cell;
    let budget = truncation + err + 3.0 * uu * abs * 1.01 + uu * sum.abs();
    let mut report = WceReport::new(n_points, sum, budget, WceMethod::TruncatedDualSum, Some(radius), false);
    report.truncation_budget = Some(truncation);
    Ok(report)
}
