//! Convergence sweeps over the construction family and a Monte Carlo control.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::PrimeBase;
use crate::nets::{construct_optimal_net, ConstructionParams};
use crate::wce::{wce_dual_truncated, wce_exact_f64, wce_net, ExactOptions, WceMethod};

/// Ordinary least-squares slope of `y` against `x`; `NaN` with fewer than two points
/// or constant `x`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return f64::NAN;
    }
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub s: usize,
    pub alpha: usize,
    pub beta: usize,
    pub g: usize,
    pub b: PrimeBase,
    /// Inclusive range of `w`.
    pub w_range: (usize, usize),
    pub method: WceMethod,
    /// Exact rational kernel sums (exact-kernel method only).
    pub rational: bool,
    /// Dual-sum truncation radius; defaults to the net precision.
    pub radius: Option<usize>,
    pub strict: bool,
    pub betas: Option<Vec<u32>>,
    /// CSV destination.
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.check_range()?;
        self.params(self.w_range.0).map(|_| ())
    }

    fn check_range(&self) -> Result<()> {
        let (lo, hi) = self.w_range;
        if lo == 0 || lo > hi {
            return Err(Error::invalid(format!("empty or invalid w range {lo}..={hi}")));
        }
        Ok(())
    }

    pub fn params(&self, w: usize) -> Result<ConstructionParams> {
        ConstructionParams::new(
            self.s,
            self.alpha,
            self.beta,
            self.g,
            w,
            self.b,
            self.betas.clone(),
            self.strict,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub w: usize,
    #[serde(rename = "N")]
    pub n_points: u64,
    pub e: f64,
    pub log10_n: f64,
    pub log10_e: f64,
    /// Slope fitted over the rows so far.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Slope of `log e` against `log N` over the last `max(3, half)` rows.
    pub slope: Option<f64>,
    /// Rows refused by a size guard, with the reason.
    pub skipped: Vec<(usize, String)>,
}

impl SweepResult {
    fn push(&mut self, w: usize, n: u64, e: f64) {
        self.rows.push(SweepRow {
            w,
            n_points: n,
            e,
            log10_n: (n as f64).log10(),
            log10_e: e.log10(),
            slope: None,
        });
        let slope = fit_tail(&self.rows);
        self.rows.last_mut().unwrap().slope = slope;
        self.slope = slope;
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,N,e,log10N,log10e,slope\n");
        for r in &self.rows {
            let slope = r.slope.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{:e},{},{},{}", r.w, r.n_points, r.e, r.log10_n, r.log10_e, slope);
        }
        out
    }
}

fn fit_tail(rows: &[SweepRow]) -> Option<f64> {
    let take = 3.max(rows.len() / 2).min(rows.len());
    let pts: Vec<(f64, f64)> = rows[rows.len() - take..]
        .iter()
        .filter(|r| r.e > 0.0)
        .map(|r| (r.log10_n, r.log10_e))
        .collect();
    let v = least_squares_slope(&pts);
    v.is_finite().then_some(v)
}

/// Builds the net for every `w` in range, computes `e`, and fits the slope.
/// Guard refusals skip the row; other errors abort.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut res = SweepResult {
        rows: Vec::new(),
        slope: None,
        skipped: Vec::new(),
    };
    for w in cfg.w_range.0..=cfg.w_range.1 {
        let p = cfg.params(w)?;
        let net = construct_optimal_net(&p)?;
        let report = match cfg.method {
            WceMethod::ExactKernelSum => wce_net(
                &net,
                cfg.alpha,
                &ExactOptions {
                    rational: cfg.rational,
                    ..ExactOptions::default()
                },
            ),
            WceMethod::TruncatedDualSum => wce_dual_truncated(&net, cfg.alpha, cfg.radius.unwrap_or(net.n())),
        };
        match report {
            Ok(r) => res.push(w, r.n_points, r.e),
            Err(e) if e.is_guard() => res.skipped.push((w, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    if let Some(path) = &cfg.output {
        std::fs::write(path, res.to_csv()).map_err(|e| Error::invalid(format!("writing {}: {e}", path.display())))?;
    }
    Ok(res)
}

/// The same point counts with independent uniform points from ChaCha8 seeded by `seed`.
/// Only `s`, `alpha`, `b`, `g` and the range are used.
pub fn mc_baseline(cfg: &SweepConfig, seed: u64) -> Result<SweepResult> {
    cfg.check_range()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = SweepResult {
        rows: Vec::new(),
        slope: None,
        skipped: Vec::new(),
    };
    let opts = ExactOptions::default();
    for w in cfg.w_range.0..=cfg.w_range.1 {
        let n = cfg
            .b
            .checked_pow((cfg.g * w) as u32)
            .filter(|&n| n <= opts.max_points as u128)
            .ok_or_else(|| Error::guard("Monte Carlo points", format!("{}^{}", cfg.b.get(), cfg.g * w), opts.max_points));
        let n = match n {
            Ok(n) => n as usize,
            Err(e) => {
                res.skipped.push((w, e.to_string()));
                continue;
            }
        };
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..cfg.s).map(|_| rng.gen::<f64>()).collect()).collect();
        match wce_exact_f64(&pts, cfg.alpha, &opts) {
            Ok(r) => res.push(w, r.n_points, r.e),
            Err(e) if e.is_guard() => res.skipped.push((w, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lo: usize, hi: usize) -> SweepConfig {
        SweepConfig {
            s: 1,
            alpha: 2,
            beta: 2,
            g: 1,
            b: PrimeBase::new(2).unwrap(),
            w_range: (lo, hi),
            method: WceMethod::ExactKernelSum,
            rational: true,
            radius: None,
            strict: false,
            betas: None,
            output: None,
        }
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((least_squares_slope(&pts) + 2.0).abs() < 1e-12);
        assert!(least_squares_slope(&pts[..1]).is_nan());
        assert!(least_squares_slope(&[(1.0, 2.0), (1.0, 3.0)]).is_nan());
    }

    #[test]
    fn empty_range_rejected() {
        assert!(run_sweep(&cfg(5, 4)).is_err());
        assert!(run_sweep(&cfg(0, 3)).is_err());
    }

    #[test]
    fn small_sweep_and_csv() {
        let r = run_sweep(&cfg(1, 6)).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert_eq!(r.rows[2].n_points, 8);
        assert!(r.rows[0].slope.is_none());
        assert!(r.slope.unwrap() < 0.0);
        let csv = r.to_csv();
        assert!(csv.starts_with("w,N,e,log10N,log10e,slope\n"));
        assert_eq!(csv.lines().count(), 7);
        let again = run_sweep(&cfg(1, 6)).unwrap();
        assert_eq!(again.to_csv(), csv);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = mc_baseline(&cfg(2, 5), 7).unwrap();
        let b = mc_baseline(&cfg(2, 5), 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, mc_baseline(&cfg(2, 5), 8).unwrap());
    }
}
