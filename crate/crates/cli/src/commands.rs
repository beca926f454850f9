use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use hoqmc::dual::{counting_bound_violations, dual_limit_from_env, dual_summary, metric_lower_bounds, MinMetric};
use hoqmc::nets::{chen_skriganov, construct_optimal_net};
use hoqmc::sweep::{mc_baseline, run_sweep, SweepConfig};
use hoqmc::walsh::{
    decay_profile, kernel_walsh_coeff_1d, kernel_walsh_coeff_sd, walsh_coeff_bernoulli, walsh_coeff_bernoulli_periodic,
    WalshIndex,
};
use hoqmc::wce::{
    bound_breakdown, max_points_from_env, wce_dual_truncated_with, wce_exact_f64, wce_exact_with, wce_net, ExactOptions,
    DEFAULT_PAIR_LIMIT,
};
use hoqmc::{ConstructionParams, DigitVector, DigitalNet, MultiIndex, NetPoint, PrimeBase, Provenance, WceMethod};

use crate::args::*;
use crate::Fail;

type Res<T> = Result<T, Fail>;

fn input(msg: impl Into<String>) -> Fail {
    Fail::Input(msg.into())
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Res<T> {
    v.ok_or_else(|| input(format!("missing --{flag} (flag or config key)")))
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn max_dual(&self) -> u128 {
        self.cli.max_dual.unwrap_or_else(dual_limit_from_env)
    }

    fn max_n(&self) -> u64 {
        self.cli.max_n.unwrap_or_else(max_points_from_env)
    }

    fn emit(&self, text: &str) -> Res<()> {
        match &self.cli.output {
            Some(p) => std::fs::write(p, text).map_err(|e| input(format!("writing {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, v: &T) -> Res<()> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| input(e.to_string()))?;
        s.push('\n');
        self.emit(&s)
    }
}

pub fn run(cli: &Cli) -> Res<()> {
    let ctx = Ctx { cli };
    match &cli.cmd {
        Command::Construct(a) => construct(&ctx, a),
        Command::Points(a) => points(&ctx, a),
        Command::Metrics(a) => metrics(&ctx, a),
        Command::Walsh(a) => walsh(&ctx, a),
        Command::Wce(a) => wce(&ctx, a),
        Command::Bounds(a) => bounds(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
    }
}

fn base(b: Option<u64>) -> Res<PrimeBase> {
    Ok(PrimeBase::new(need(b, "b")?)?)
}

fn params(n: &NetArgs, alpha: usize, w: usize) -> Res<ConstructionParams> {
    Ok(ConstructionParams::new(
        need(n.s, "s")?,
        alpha,
        need(n.beta, "beta")?,
        need(n.g, "g")?,
        w,
        base(n.b)?,
        n.betas.clone(),
        !n.relaxed,
    )?)
}

fn build_net(n: &NetArgs, alpha: usize) -> Res<DigitalNet> {
    if n.chen_skriganov {
        let net = chen_skriganov(
            base(n.b)?,
            need(n.s, "s")?,
            need(n.g, "g")?,
            need(n.w, "w")?,
            n.betas.as_deref(),
            !n.relaxed,
        )?;
        return Ok(net);
    }
    let p = params(n, alpha, need(n.w, "w")?)?;
    Ok(construct_optimal_net(&p)?)
}

fn parse_net(text: &str, origin: &str) -> Res<DigitalNet> {
    serde_json::from_str(text).map_err(|e| input(format!("net JSON from {origin}: {e}")))
}

fn load_net(src: &NetSource, alpha: usize) -> Res<DigitalNet> {
    match (&src.net_file, src.build.b) {
        (Some(_), Some(_)) => Err(input("give either --net-file or construction flags, not both")),
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).map_err(|e| input(format!("reading {}: {e}", p.display())))?;
            parse_net(&text, &p.display().to_string())
        }
        (None, Some(_)) => build_net(&src.build, alpha),
        (None, None) => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            parse_net(&text, "stdin")
        }
    }
}

fn construct(ctx: &Ctx, a: &ConstructArgs) -> Res<()> {
    let net = build_net(&a.net, a.alpha.unwrap_or(2))?;
    ctx.emit_json(&net)
}

fn points(ctx: &Ctx, a: &PointsArgs) -> Res<()> {
    let net = load_net(&a.src, 2)?;
    let pts = net.points(ctx.max_n() as u128)?;
    let mut out = String::new();
    for p in &pts {
        let row: Vec<String> = match a.format.unwrap_or(PointFormat::Rational) {
            PointFormat::Rational => p.to_rational_strings(),
            PointFormat::Float => p.to_f64_lossy().iter().map(|x| x.to_string()).collect(),
        };
        out.push_str(&row.join(","));
        out.push('\n');
    }
    ctx.emit(&out)
}

/// Guaranteed lower bounds implied by the net's provenance.
fn provenance_bounds(net: &DigitalNet) -> Option<(usize, usize, Option<(usize, usize)>)> {
    match *net.provenance() {
        Provenance::ChenSkriganov { g, w } => Some((g + 1, g * w + 1, None)),
        Provenance::Interlaced {
            beta,
            g: Some(g),
            w: Some(w),
        } => {
            // the metric bounds do not involve α; 2 only satisfies the constructor
            let p = ConstructionParams::new(net.s(), 2, beta, g, w, net.base(), None, false).ok()?;
            let mb = metric_lower_bounds(&p);
            Some((mb.hamming, mb.mu_1, Some((beta, mb.mu_beta))))
        }
        _ => None,
    }
}

fn metrics(ctx: &Ctx, a: &MetricsArgs) -> Res<()> {
    let net = load_net(&a.src, 2)?;
    let bounds = provenance_bounds(&net);
    let mut alphas = a.alpha.clone().unwrap_or_default();
    if let Some((_, _, Some((beta, _)))) = bounds {
        alphas.push(beta);
    }
    alphas.sort_unstable();
    alphas.dedup();
    if alphas.contains(&0) {
        return Err(input("--alpha values must be positive"));
    }
    let sum = dual_summary(&net, &alphas, a.fibers, ctx.max_dual())?;

    let mut out = json!({
        "hamming_min": sum.hamming_min,
        "nrt_min": sum.nrt_min,
        "mu_alpha_min": sum.mu_alpha_min,
        "dual_size": sum.size,
    });
    match bounds {
        Some((hamming, nrt, mu)) => {
            let mut ok = sum.hamming_min.at_least(hamming) && sum.nrt_min.at_least(nrt);
            let mut b = json!({ "hamming_min": hamming, "nrt_min": nrt });
            if let Some((beta, mu_beta)) = mu {
                ok &= sum.mu_alpha_min.get(&beta).is_some_and(|m: &MinMetric| m.at_least(mu_beta));
                b["mu_alpha_min"] = json!({ beta.to_string(): mu_beta });
            }
            out["bounds"] = b;
            out["bounds_satisfied"] = json!(ok);
        }
        None => {
            out["bounds"] = json!({});
            out["bounds_satisfied"] = Value::Null;
        }
    }
    if a.fibers {
        let bad = counting_bound_violations(&sum, net.base());
        let fibers = sum.fibers.as_ref().map_or(0, |f| f.len());
        out["fibers"] = json!(fibers);
        out["counting_bound_violations"] = json!(bad
            .iter()
            .map(|(key, count)| json!({ "fiber": key, "count": count }))
            .collect::<Vec<_>>());
    }
    ctx.emit_json(&out)
}

fn parse_index(base: PrimeBase, parts: &[String], flag: &str) -> Res<Vec<DigitVector>> {
    if parts.is_empty() {
        return Err(input(format!("--{flag} is empty")));
    }
    parts
        .iter()
        .map(|p| DigitVector::parse(base, p.trim()).map_err(|e| input(format!("--{flag}: {e}"))))
        .collect()
}

fn walsh(ctx: &Ctx, a: &WalshArgs) -> Res<()> {
    let base = base(a.b)?;
    let alpha = a.alpha.unwrap_or(2);
    if let Some(levels) = a.decay {
        return ctx.emit_json(&decay_profile(base, alpha, levels)?);
    }
    let k = parse_index(base, a.k.as_deref().ok_or_else(|| input("missing --k"))?, "k")?;
    let l = match &a.l {
        Some(l) => Some(parse_index(base, l, "l")?),
        None => None,
    };
    let one = |v: &[DigitVector], flag: &str| -> Res<WalshIndex> {
        match v {
            [x] => Ok(WalshIndex::new(x.clone())),
            _ => Err(input(format!("--{flag} takes a single index for this kind"))),
        }
    };
    let coeff = match a.kind.unwrap_or(WalshKind::Kernel) {
        WalshKind::Kernel => {
            let l = l.ok_or_else(|| input("missing --l"))?;
            if k.len() != l.len() {
                return Err(input("--k and --l need the same number of components"));
            }
            if k.len() == 1 {
                kernel_walsh_coeff_1d(alpha, &one(&k, "k")?, &one(&l, "l")?)?
            } else {
                kernel_walsh_coeff_sd(alpha, &MultiIndex::new(k)?, &MultiIndex::new(l)?)?
            }
        }
        WalshKind::Bernoulli => walsh_coeff_bernoulli(need(a.r, "r")?, &one(&k, "k")?)?,
        WalshKind::Periodic => {
            let l = l.ok_or_else(|| input("missing --l"))?;
            walsh_coeff_bernoulli_periodic(need(a.r, "r")?, &one(&k, "k")?, &one(&l, "l")?)?
        }
    };
    ctx.emit_json(&coeff)
}

/// Points from CSV. Either every entry is `p/b^n` (one base throughout), giving
/// exact points, or the file is read as decimals.
enum PointSet {
    Exact(Vec<NetPoint>),
    Float(Vec<Vec<f64>>),
}

fn parse_rational(field: &str) -> Option<(u128, u64, u32)> {
    let (num, den) = field.split_once('/')?;
    let (b, n) = den.split_once('^')?;
    Some((num.trim().parse().ok()?, b.trim().parse().ok()?, n.trim().parse().ok()?))
}

fn exact_point(base: PrimeBase, coords: &[(u128, u64, u32)]) -> Res<NetPoint> {
    let b = base.get() as u128;
    let mut digits = Vec::with_capacity(coords.len());
    for &(num, _, n) in coords {
        let mut d = vec![0u32; n as usize];
        let mut v = num;
        for slot in d.iter_mut().rev() {
            *slot = (v % b) as u32;
            v /= b;
        }
        if v != 0 {
            return Err(input(format!("{num}/{b}^{n} is not in [0,1)")));
        }
        digits.push(d);
    }
    Ok(NetPoint::new(base, digits)?)
}

fn read_points(path: &Path) -> Res<PointSet> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("reading {}: {e}", path.display())))?;
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::trim).collect())
        .collect();
    if rows.is_empty() {
        return Err(input(format!("{}: no points", path.display())));
    }
    let rational: Option<Vec<Vec<(u128, u64, u32)>>> =
        rows.iter().map(|r| r.iter().map(|f| parse_rational(f)).collect()).collect();
    if let Some(rows) = rational {
        let b = rows[0][0].1;
        if rows.iter().flatten().any(|c| c.1 != b) {
            return Err(input("rational points must share one base"));
        }
        let base = PrimeBase::new(b)?;
        return Ok(PointSet::Exact(
            rows.iter().map(|r| exact_point(base, r)).collect::<Res<_>>()?,
        ));
    }
    let floats = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .map(|f| f.parse::<f64>().map_err(|_| input(format!("line {}: `{f}` is not a number", i + 1))))
                .collect::<Res<Vec<f64>>>()
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(PointSet::Float(floats))
}

fn wce(ctx: &Ctx, a: &WceArgs) -> Res<()> {
    let alpha = a.alpha.unwrap_or(2);
    let method = a.method.unwrap_or(Method::Exact);
    let opts = ExactOptions {
        rational: a.rational,
        max_points: ctx.max_n(),
        allow_large: a.allow_large,
    };
    if let Some(path) = &a.points_file {
        if a.src.net_file.is_some() || a.src.build.b.is_some() {
            return Err(input("give either --points-file or a net, not both"));
        }
        if method == Method::Dual {
            return Err(input("the dual method needs a net, not a point set"));
        }
        let report = match read_points(path)? {
            PointSet::Exact(p) => wce_exact_with(&p, alpha, &opts)?,
            PointSet::Float(p) => {
                if a.rational {
                    return Err(input("--rational needs points written as p/b^n"));
                }
                wce_exact_f64(&p, alpha, &opts)?
            }
        };
        return ctx.emit_json(&report);
    }
    let net = load_net(&a.src, alpha)?;
    let report = match method {
        Method::Exact => {
            if a.radius.is_some() {
                return Err(input("--radius applies to --method dual only"));
            }
            wce_net(&net, alpha, &opts)?
        }
        Method::Dual => {
            if a.rational {
                return Err(input("--rational applies to --method exact only"));
            }
            let radius = a.radius.unwrap_or(net.n());
            wce_dual_truncated_with(&net, alpha, radius, ctx.max_dual(), DEFAULT_PAIR_LIMIT)?
        }
    };
    ctx.emit_json(&report)
}

fn bounds(ctx: &Ctx, a: &BoundsArgs) -> Res<()> {
    if a.net.chen_skriganov {
        return Err(input("the bound chains concern the interlaced construction"));
    }
    let alpha = a.alpha.unwrap_or(2);
    let p = params(&a.net, alpha, need(a.net.w, "w")?)?;
    let decay = match a.measure_decay {
        Some(levels) => Some(decay_profile(p.b, alpha, levels)?.constant),
        None => a.decay,
    };
    ctx.emit_json(&bound_breakdown(&p, decay)?)
}

fn sweep(ctx: &Ctx, a: &SweepArgs) -> Res<()> {
    if a.net.w.is_some() {
        return Err(input("sweep takes --w-min and --w-max, not --w"));
    }
    if a.net.chen_skriganov {
        return Err(input("sweep runs the interlaced construction"));
    }
    let cfg = SweepConfig {
        s: need(a.net.s, "s")?,
        alpha: a.alpha.unwrap_or(2),
        beta: need(a.net.beta, "beta")?,
        g: need(a.net.g, "g")?,
        b: base(a.net.b)?,
        w_range: (need(a.w_min, "w-min")?, need(a.w_max, "w-max")?),
        method: match a.method.unwrap_or(Method::Exact) {
            Method::Exact => WceMethod::ExactKernelSum,
            Method::Dual => WceMethod::TruncatedDualSum,
        },
        rational: a.rational,
        radius: a.radius,
        strict: !a.net.relaxed,
        betas: a.net.betas.clone(),
        output: None,
    };
    let res = match a.mc_seed {
        Some(seed) => mc_baseline(&cfg, seed)?,
        None => run_sweep(&cfg)?,
    };
    for (w, why) in &res.skipped {
        eprintln!("w={w} skipped: {why}");
    }
    ctx.emit(&res.to_csv())?;
    if ctx.cli.output.is_some() {
        let summary: BTreeMap<&str, Value> = [
            ("rows", json!(res.rows.len())),
            ("slope", json!(res.slope)),
            ("skipped", json!(res.skipped.iter().map(|s| s.0).collect::<Vec<_>>())),
        ]
        .into_iter()
        .collect();
        println!("{}", serde_json::to_string(&summary).map_err(|e| input(e.to_string()))?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_fields() {
        assert_eq!(parse_rational("5/3^2"), Some((5, 3, 2)));
        assert_eq!(parse_rational(" 0 / 2 ^ 1"), Some((0, 2, 1)));
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational("1/4"), None);
    }

    #[test]
    fn exact_point_digits() {
        let b = PrimeBase::new(3).unwrap();
        let p = exact_point(b, &[(5, 3, 2), (0, 3, 1)]).unwrap();
        assert_eq!(p.coord_digits(0), &[1, 2]);
        assert_eq!(p.coord_digits(1), &[0]);
        assert!(exact_point(b, &[(9, 3, 2)]).is_err());
    }
}
