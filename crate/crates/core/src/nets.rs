//! Digital nets: generic nets from generating matrices, Chen–Skriganov matrices,
//! digit interlacing of matrices, the composite construction, and point generation.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::digits::DigitVector;
use crate::error::{Error, Result};
use crate::ff::{binom_mod_p, FieldMatrix, PrimeBase};

/// How a net's matrices were obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    ChenSkriganov {
        g: usize,
        w: usize,
    },
    Interlaced {
        beta: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w: Option<usize>,
    },
    Custom,
}

/// Digital net over `F_b` with `b^m` points in `[0,1)^s`, each coordinate
/// carrying `n` digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitalNet {
    base: PrimeBase,
    s: usize,
    m: usize,
    n: usize,
    matrices: Vec<FieldMatrix>,
    provenance: Provenance,
}

impl DigitalNet {
    pub fn new(matrices: Vec<FieldMatrix>, provenance: Provenance) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::invalid("a digital net needs at least one matrix"));
        };
        let (base, n, m) = (first.base(), first.n_rows(), first.n_cols());
        if n == 0 || m == 0 {
            return Err(Error::invalid("generating matrices must be non-empty"));
        }
        for c in &matrices {
            if c.base() != base {
                return Err(Error::BaseMismatch {
                    left: base.get(),
                    right: c.base().get(),
                });
            }
            if c.n_rows() != n || c.n_cols() != m {
                return Err(Error::invalid(format!(
                    "all generating matrices must be {n}x{m}, found {}x{}",
                    c.n_rows(),
                    c.n_cols()
                )));
            }
        }
        Ok(DigitalNet {
            base,
            s: matrices.len(),
            m,
            n,
            matrices,
            provenance,
        })
    }

    pub fn base(&self) -> PrimeBase {
        self.base
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn matrices(&self) -> &[FieldMatrix] {
        &self.matrices
    }
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `b^m` when it fits in a `u128`.
    pub fn n_points(&self) -> Option<u128> {
        self.base.checked_pow(self.m as u32)
    }

    /// The same net with precision `r`: rows beyond `r` are dropped, missing
    /// rows are zero. Points are truncated (or exactly extended) accordingly.
    pub fn with_precision(&self, r: usize) -> Result<DigitalNet> {
        if r == 0 {
            return Err(Error::invalid("precision must be positive"));
        }
        let matrices = self
            .matrices
            .iter()
            .map(|c| {
                let mut d = FieldMatrix::zeros(self.base, r, self.m);
                for i in 0..r.min(self.n) {
                    for v in 0..self.m {
                        d.set(i, v, c.get(i, v));
                    }
                }
                d
            })
            .collect();
        DigitalNet::new(matrices, self.provenance.clone())
    }

    /// The point with index digits `eta` (least significant first, length `m`).
    pub fn point_from_digits(&self, eta: &[u32]) -> Result<NetPoint> {
        if eta.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: eta.len(),
            });
        }
        if eta.iter().any(|&d| d >= self.base.get()) {
            return Err(Error::invalid("index digit not below base"));
        }
        let coords = self
            .matrices
            .iter()
            .map(|c| {
                let mut xi = vec![0u32; self.n];
                c.mat_vec_into(eta, &mut xi);
                xi
            })
            .collect();
        Ok(NetPoint {
            base: self.base,
            coords,
        })
    }

    /// The `h`-th point, `0 <= h < b^m`.
    pub fn generate_point(&self, h: u128) -> Result<NetPoint> {
        if let Some(total) = self.n_points() {
            if h >= total {
                return Err(Error::OutOfRange {
                    index: h.to_string(),
                    bound: total.to_string(),
                });
            }
        }
        let eta = DigitVector::from_u128(self.base, h).truncated(self.m);
        self.point_from_digits(&eta)
    }

    /// Every point, in index order. Sharded across the rayon pool.
    pub fn points(&self, max_points: u128) -> Result<Vec<NetPoint>> {
        let total = self
            .n_points()
            .filter(|&t| t <= max_points)
            .ok_or_else(|| {
                Error::guard(
                    "point enumeration",
                    format!("{}^{}", self.base.get(), self.m),
                    max_points,
                )
            })?;
        (0..total as u64)
            .into_par_iter()
            .map(|h| self.generate_point(h as u128))
            .collect()
    }

    /// Integer numerators `b^n x_{h,j}` of every point, row `h`, column `j`.
    /// Requires `b^n < 2^64`.
    pub fn numerators(&self, max_points: u128) -> Result<Vec<Vec<u64>>> {
        if self.base.checked_pow(self.n as u32).map_or(true, |v| v > u64::MAX as u128) {
            return Err(Error::invalid(format!(
                "b^n = {}^{} does not fit in 64 bits",
                self.base.get(),
                self.n
            )));
        }
        let pts = self.points(max_points)?;
        Ok(pts
            .iter()
            .map(|p| p.coords.iter().map(|xi| digits_to_numerator(self.base, xi)).collect())
            .collect())
    }
}

fn digits_to_numerator(base: PrimeBase, xi: &[u32]) -> u64 {
    let b = base.get() as u64;
    xi.iter().fold(0u64, |acc, &d| acc * b + d as u64)
}

#[derive(Serialize, Deserialize)]
struct NetJson {
    b: u64,
    s: usize,
    m: usize,
    n: usize,
    provenance: Provenance,
    matrices: Vec<FieldMatrix>,
}

impl Serialize for DigitalNet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NetJson {
            b: self.base.get() as u64,
            s: self.s,
            m: self.m,
            n: self.n,
            provenance: self.provenance.clone(),
            matrices: self.matrices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DigitalNet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = NetJson::deserialize(d)?;
        let net = DigitalNet::new(j.matrices, j.provenance).map_err(D::Error::custom)?;
        if net.base.get() as u64 != j.b || net.s != j.s || net.m != j.m || net.n != j.n {
            return Err(D::Error::custom(format!(
                "header (b={}, s={}, m={}, n={}) disagrees with matrices (b={}, s={}, m={}, n={})",
                j.b,
                j.s,
                j.m,
                j.n,
                net.base.get(),
                net.s,
                net.m,
                net.n
            )));
        }
        Ok(net)
    }
}

/// A point of a digital net: per coordinate, the digits `ξ_1, …, ξ_n` of
/// `x = Σ ξ_i b^{-i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetPoint {
    base: PrimeBase,
    coords: Vec<Vec<u32>>,
}

impl NetPoint {
    pub fn new(base: PrimeBase, coords: Vec<Vec<u32>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a point needs at least one coordinate"));
        }
        if coords.iter().flatten().any(|&d| d >= base.get()) {
            return Err(Error::invalid("coordinate digit not below base"));
        }
        Ok(NetPoint { base, coords })
    }

    /// The origin with `n` digits per coordinate.
    pub fn origin(base: PrimeBase, s: usize, n: usize) -> Self {
        NetPoint {
            base,
            coords: vec![vec![0; n]; s],
        }
    }

    pub fn base(&self) -> PrimeBase {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Digits of coordinate `j`, most significant (`b^{-1}`) first.
    pub fn coord_digits(&self, j: usize) -> &[u32] {
        &self.coords[j]
    }

    pub fn coords(&self) -> &[Vec<u32>] {
        &self.coords
    }

    /// Numerator of coordinate `j` over `b^{n_j}`, `n_j` the digit count.
    pub fn numerator(&self, j: usize) -> BigUint {
        let b = BigUint::from(self.base.get());
        self.coords[j]
            .iter()
            .fold(BigUint::zero(), |acc, &d| acc * &b + BigUint::from(d))
    }

    /// Exact value of coordinate `j`.
    pub fn coord_exact(&self, j: usize) -> BigRational {
        let den = BigUint::from(self.base.get()).pow(self.coords[j].len() as u32);
        BigRational::new(self.numerator(j).into(), den.into())
    }

    /// Coordinate `j` rounded to the nearest binary64 value (lossy).
    pub fn coord_f64(&self, j: usize) -> f64 {
        let n = self.coords[j].len() as u32;
        if let Some(den) = self.base.checked_pow(n).filter(|&d| d <= 1 << 53) {
            // both operands exact, a single correctly rounded division
            let num = digits_to_numerator(self.base, &self.coords[j]);
            return num as f64 / den as f64;
        }
        self.coord_exact(j).to_f64().unwrap_or(f64::NAN)
    }

    /// All coordinates rounded to nearest (lossy).
    pub fn to_f64_lossy(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.coord_f64(j)).collect()
    }

    /// Coordinates as exact strings `numerator/b^n`.
    pub fn to_rational_strings(&self) -> Vec<String> {
        (0..self.dim())
            .map(|j| {
                format!(
                    "{}/{}^{}",
                    self.numerator(j),
                    self.base.get(),
                    self.coords[j].len()
                )
            })
            .collect()
    }
}

/// Parameters of the composite construction: `β·s`-dimensional Chen–Skriganov
/// nets interlaced with factor `β`, giving `b^{gw}` points of order `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub s: usize,
    pub alpha: usize,
    pub beta: usize,
    pub g: usize,
    pub w: usize,
    pub b: PrimeBase,
    /// The `β·g·s` distinct field elements `β_{j,l}`, ordered lexicographically in `(j, l)`.
    pub betas: Vec<u32>,
    pub strict: bool,
}

impl ConstructionParams {
    /// Validates and builds parameters. `betas = None` selects `0, 1, 2, …`.
    pub fn new(
        s: usize,
        alpha: usize,
        beta: usize,
        g: usize,
        w: usize,
        b: PrimeBase,
        betas: Option<Vec<u32>>,
        strict: bool,
    ) -> Result<Self> {
        let betas = match betas {
            Some(v) => v,
            None => default_betas(b, beta * g * s)?,
        };
        let p = ConstructionParams {
            s,
            alpha,
            beta,
            g,
            w,
            b,
            betas,
            strict,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (s, alpha, beta, g, w) = (self.s, self.alpha, self.beta, self.g, self.w);
        for (name, v) in [("s", s), ("alpha", alpha), ("beta", beta), ("g", g), ("w", w)] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.strict {
            let b = self.b.get() as usize;
            let checks = [
                (alpha >= 2, format!("alpha >= 2 (alpha = {alpha})")),
                (beta >= 2 * alpha, format!("beta >= 2*alpha ({beta} < {})", 2 * alpha)),
                (g >= 2 * alpha * s, format!("g >= 2*alpha*s ({g} < {})", 2 * alpha * s)),
                (
                    g >= s * (beta - 1) / 2,
                    format!("g >= floor(s(beta-1)/2) ({g} < {})", s * (beta - 1) / 2),
                ),
                (b >= beta * g * s, format!("b >= beta*g*s ({b} < {})", beta * g * s)),
            ];
            if let Some((_, msg)) = checks.into_iter().find(|(ok, _)| !ok) {
                return Err(Error::ConstraintViolated(msg));
            }
        }
        check_betas(self.b, &self.betas, beta * g * s)
    }

    /// Number of points `b^{gw}` when it fits in a `u128`.
    pub fn n_points(&self) -> Option<u128> {
        self.b.checked_pow((self.g * self.w) as u32)
    }

    /// True when every hypothesis of the construction theorem holds.
    pub fn hypotheses_hold(&self) -> bool {
        let mut p = self.clone();
        p.strict = true;
        p.validate().is_ok()
    }
}

fn default_betas(b: PrimeBase, count: usize) -> Result<Vec<u32>> {
    if count > b.get() as usize {
        return Err(Error::ConstraintViolated(format!(
            "{count} distinct elements beta_(j,l) are required but F_{} has only {}",
            b.get(),
            b.get()
        )));
    }
    Ok((0..count as u32).collect())
}

fn check_betas(b: PrimeBase, betas: &[u32], count: usize) -> Result<()> {
    if betas.len() != count {
        return Err(Error::invalid(format!(
            "expected {count} elements beta_(j,l), found {}",
            betas.len()
        )));
    }
    if let Some(&x) = betas.iter().find(|&&x| x >= b.get()) {
        return Err(Error::invalid(format!("beta_(j,l) = {x} is not below b = {}", b.get())));
    }
    let mut sorted = betas.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::ConstraintViolated(format!(
            "the elements beta_(j,l) must be distinct ({} repeats)",
            w[0]
        )));
    }
    Ok(())
}

/// Chen–Skriganov generating matrices: `dims` square `gw x gw` matrices with
/// `c^{(j)}_{(l-1)w+i, v} = C(v-1, i-1) β_{j,l}^{v-i}`.
///
/// `betas[j*g + l]` is `β_{j+1,l+1}`. In strict mode `b >= g·dims` is enforced;
/// distinctness is always enforced.
pub fn chen_skriganov(
    b: PrimeBase,
    dims: usize,
    g: usize,
    w: usize,
    betas: Option<&[u32]>,
    strict: bool,
) -> Result<DigitalNet> {
    if dims == 0 || g == 0 || w == 0 {
        return Err(Error::invalid("dims, g and w must be positive"));
    }
    if strict && (b.get() as usize) < g * dims {
        return Err(Error::ConstraintViolated(format!(
            "b >= g*s ({} < {})",
            b.get(),
            g * dims
        )));
    }
    let betas = match betas {
        Some(v) => v.to_vec(),
        None => default_betas(b, g * dims)?,
    };
    check_betas(b, &betas, g * dims)?;
    let size = g * w;
    let matrices = (0..dims)
        .map(|j| {
            let mut c = FieldMatrix::zeros(b, size, size);
            for l in 0..g {
                let beta = betas[j * g + l];
                for i in 1..=w {
                    for v in i..=size {
                        let binom = binom_mod_p(v as u64 - 1, i as u64 - 1, b);
                        let e = b.mul(binom, b.pow(beta, (v - i) as u64));
                        c.set(l * w + i - 1, v - 1, e);
                    }
                }
            }
            c
        })
        .collect();
    DigitalNet::new(matrices, Provenance::ChenSkriganov { g, w })
}

/// Digit interlacing of generating matrices with factor `beta`: row
/// `β(h-1)+i` of `D_j` is row `h` of `C_{β(j-1)+i}`.
pub fn interlace_net(q: &DigitalNet, beta: usize) -> Result<DigitalNet> {
    if beta == 0 || q.s % beta != 0 {
        return Err(Error::invalid(format!(
            "dimension {} is not divisible by beta = {beta}",
            q.s
        )));
    }
    if beta == 1 {
        return Ok(q.clone());
    }
    let (g, w) = match q.provenance {
        Provenance::ChenSkriganov { g, w } => (Some(g), Some(w)),
        _ => (None, None),
    };
    let matrices = (0..q.s / beta)
        .map(|j| {
            let mut d = FieldMatrix::zeros(q.base, beta * q.n, q.m);
            for h in 0..q.n {
                for i in 0..beta {
                    let src = &q.matrices[beta * j + i];
                    for v in 0..q.m {
                        d.set(beta * h + i, v, src.get(h, v));
                    }
                }
            }
            d
        })
        .collect();
    DigitalNet::new(matrices, Provenance::Interlaced { beta, g, w })
}

/// The composite construction: interlace `chen_skriganov(b, βs, g, w)` with factor `β`.
pub fn construct_optimal_net(p: &ConstructionParams) -> Result<DigitalNet> {
    p.validate()?;
    let q = chen_skriganov(p.b, p.beta * p.s, p.g, p.w, Some(&p.betas), p.strict)?;
    interlace_net(&q, p.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn b(p: u64) -> PrimeBase {
        PrimeBase::new(p).unwrap()
    }

    fn custom(p: u64, rows: &[&[u64]]) -> DigitalNet {
        DigitalNet::new(vec![FieldMatrix::from_rows(b(p), rows).unwrap()], Provenance::Custom).unwrap()
    }

    #[test]
    fn point_examples() {
        let net = chen_skriganov(b(5), 2, 1, 2, None, false).unwrap();
        assert_eq!(net.generate_point(0).unwrap(), NetPoint::origin(b(5), 2, 2));
        let net = custom(2, &[&[1]]);
        assert_eq!(net.generate_point(1).unwrap().to_f64_lossy(), vec![0.5]);
        assert!(matches!(net.generate_point(2), Err(Error::OutOfRange { .. })));
        let net = DigitalNet::new(vec![FieldMatrix::identity(b(2), 2)], Provenance::Custom).unwrap();
        let x = net.generate_point(2).unwrap();
        assert_eq!(x.to_f64_lossy(), vec![0.25]);
        assert_eq!(x.to_rational_strings(), vec!["1/2^2".to_string()]);
    }

    #[test]
    fn chen_skriganov_examples() {
        for p in [2u64, 3, 7] {
            let net = chen_skriganov(b(p), 1, 1, 2, Some(&[0]), false).unwrap();
            assert_eq!(net.matrices()[0], FieldMatrix::identity(b(p), 2));
        }
        let net = chen_skriganov(b(3), 1, 1, 2, Some(&[1]), false).unwrap();
        assert_eq!(
            net.matrices()[0],
            FieldMatrix::from_rows(b(3), &[[1u64, 1], [0, 1]]).unwrap()
        );
        let net = chen_skriganov(b(7), 3, 2, 3, None, true).unwrap();
        assert!(net.matrices().iter().all(|c| c.n_rows() == 6 && c.n_cols() == 6));
        assert!(chen_skriganov(b(5), 2, 1, 1, Some(&[1, 1]), false).is_err());
        assert!(matches!(
            chen_skriganov(b(5), 3, 2, 1, None, true),
            Err(Error::ConstraintViolated(_))
        ));
    }

    #[test]
    fn interlace_examples() {
        let q = DigitalNet::new(
            vec![
                FieldMatrix::from_rows(b(2), &[[1u64]]).unwrap(),
                FieldMatrix::from_rows(b(2), &[[0u64]]).unwrap(),
            ],
            Provenance::Custom,
        )
        .unwrap();
        let p = interlace_net(&q, 2).unwrap();
        assert_eq!(p.matrices()[0], FieldMatrix::from_rows(b(2), &[[1u64], [0]]).unwrap());
        assert_eq!(interlace_net(&q, 1).unwrap(), q);
        assert!(interlace_net(&q, 3).is_err());

        let c1 = FieldMatrix::from_rows(b(5), &[[1u64, 2], [3, 4]]).unwrap();
        let c2 = FieldMatrix::from_rows(b(5), &[[0u64, 1], [1, 0]]).unwrap();
        let q = DigitalNet::new(vec![c1.clone(), c2.clone()], Provenance::Custom).unwrap();
        let p = interlace_net(&q, 2).unwrap();
        let d = &p.matrices()[0];
        assert_eq!(d.row(0), c1.row(0));
        assert_eq!(d.row(1), c2.row(0));
        assert_eq!(d.row(2), c1.row(1));
        assert_eq!(d.row(3), c2.row(1));
    }

    #[test]
    fn construction_examples() {
        let p = ConstructionParams::new(1, 2, 4, 8, 1, b(37), None, true).unwrap();
        let net = construct_optimal_net(&p).unwrap();
        assert_eq!((net.m(), net.n(), net.s()), (8, 32, 1));
        assert_eq!(net.n_points(), Some(37u128.pow(8)));

        let p = ConstructionParams::new(1, 2, 4, 2, 1, b(11), None, false).unwrap();
        let net = construct_optimal_net(&p).unwrap();
        assert_eq!((net.m(), net.n()), (2, 8));
        assert!(!p.hypotheses_hold());

        let err = ConstructionParams::new(2, 2, 4, 2, 1, b(17), None, true).unwrap_err();
        match err {
            Error::ConstraintViolated(msg) => assert!(msg.starts_with("g >= 2*alpha*s"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
        assert!(ConstructionParams::new(1, 2, 4, 1, 1, b(2), None, false).is_err());
        assert!(ConstructionParams::new(1, 2, 2, 1, 1, b(2), Some(vec![0, 0]), false).is_err());
    }

    #[test]
    fn net_json_roundtrip() {
        let p = ConstructionParams::new(1, 2, 2, 1, 2, b(3), None, false).unwrap();
        let net = construct_optimal_net(&p).unwrap();
        let j = serde_json::to_value(&net).unwrap();
        for key in ["b", "s", "m", "n", "provenance", "matrices"] {
            assert!(j.get(key).is_some(), "{key}");
        }
        assert_eq!(j["provenance"]["kind"], "interlaced");
        let back: DigitalNet = serde_json::from_value(j.clone()).unwrap();
        assert_eq!(back, net);
        let mut bad = j;
        bad["n"] = serde_json::json!(3);
        assert!(serde_json::from_value::<DigitalNet>(bad).is_err());
    }

    #[test]
    fn points_form_a_group() {
        let nets = [
            chen_skriganov(b(3), 2, 1, 3, None, false).unwrap(),
            chen_skriganov(b(5), 2, 2, 2, None, false).unwrap(),
            construct_optimal_net(&ConstructionParams::new(1, 2, 2, 2, 2, b(5), None, false).unwrap()).unwrap(),
            construct_optimal_net(&ConstructionParams::new(1, 2, 4, 1, 5, b(5), None, false).unwrap()).unwrap(),
        ];
        for net in &nets {
            assert!(net.n_points().unwrap() <= 4096);
            let pts = net.points(1 << 20).unwrap();
            let set: HashSet<&NetPoint> = pts.iter().collect();
            let bb = net.base();
            for x in pts.iter().step_by(7) {
                for y in &pts {
                    let coords = x
                        .coords()
                        .iter()
                        .zip(y.coords())
                        .map(|(a, c)| a.iter().zip(c).map(|(&u, &v)| bb.add(u, v)).collect())
                        .collect();
                    assert!(set.contains(&NetPoint::new(bb, coords).unwrap()));
                }
            }
        }
    }

    #[test]
    fn chen_skriganov_projections_equidistributed() {
        for (p, dims, g, w) in [(5u64, 2usize, 1usize, 3usize), (7, 3, 2, 1), (5, 2, 2, 2), (3, 1, 3, 2)] {
            let net = chen_skriganov(b(p), dims, g, w, None, false).unwrap();
            let total = net.n_points().unwrap() as usize;
            let nums = net.numerators(1 << 20).unwrap();
            for j in 0..dims {
                let mut seen = vec![false; total];
                for row in &nums {
                    assert!(!seen[row[j] as usize]);
                    seen[row[j] as usize] = true;
                }
            }
        }
    }

    #[test]
    fn interlacing_commutes_with_points() {
        for (p, s, beta, g, w) in [(5u64, 1usize, 2usize, 2usize, 1usize), (5, 2, 2, 1, 2), (7, 1, 3, 2, 1)] {
            let params = ConstructionParams::new(s, 2, beta, g, w, b(p), None, false).unwrap();
            let q = chen_skriganov(params.b, beta * s, g, w, Some(&params.betas), false).unwrap();
            let net = construct_optimal_net(&params).unwrap();
            for h in 0..q.n_points().unwrap() {
                let xq = q.generate_point(h).unwrap();
                let xp = net.generate_point(h).unwrap();
                for j in 0..s {
                    let mut inter = vec![0u32; beta * q.n()];
                    for i in 0..beta {
                        for (a, &d) in xq.coord_digits(beta * j + i).iter().enumerate() {
                            inter[a * beta + i] = d;
                        }
                    }
                    assert_eq!(xp.coord_digits(j), &inter[..]);
                }
            }
        }
    }

    #[test]
    fn precision_change() {
        let net = chen_skriganov(b(3), 1, 1, 3, Some(&[1]), false).unwrap();
        let short = net.with_precision(2).unwrap();
        let long = net.with_precision(5).unwrap();
        for h in 0..27 {
            let x = net.generate_point(h).unwrap();
            assert_eq!(short.generate_point(h).unwrap().coord_digits(0), &x.coord_digits(0)[..2]);
            let y = long.generate_point(h).unwrap();
            assert_eq!(y.coord_exact(0), x.coord_exact(0));
        }
    }

    #[test]
    fn lossy_conversion_rounds_to_nearest() {
        // 1/3 written with 40 ternary digits is not representable exactly
        let pt = NetPoint::new(b(3), vec![vec![1; 40]]).unwrap();
        let exact = pt.coord_exact(0);
        assert_eq!(pt.coord_f64(0), exact.to_f64().unwrap());
        assert!((pt.coord_f64(0) - 0.5).abs() < 1e-15);
    }
}
