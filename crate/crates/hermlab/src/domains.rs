//! Compact-surface models with single-chart fundamental domains, quadrature
//! rules for them, and deterministic global integration.
//!
//! Two models are supported: the flat complex 2-torus (fundamental cell in
//! the real coordinates `(x1, y1, x2, y2)`) and the standard Hopf annulus
//! `1 <= |z| <= 2` with deck map `z -> 2z`.  All reductions run over a fixed
//! pairwise tree so results are bit-identical regardless of worker count.

use crate::expr::{MetricError, MetricField};
use crate::jets::C;
use rayon::prelude::*;
use thiserror::Error;

/// Hard cap on quadrature nodes per rule.
pub const NODE_CAP: usize = 1 << 26;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("resolution {0} too small (need R >= 2)")]
    ResolutionTooSmall(u32),
    #[error("rule would need {0} nodes (cap {NODE_CAP})")]
    TooManyNodes(usize),
    #[error("point {0:?} outside the chart: {1}")]
    OutOfChart([C; 2], &'static str),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("non-finite integrand value {value} at node {node:?}")]
    NonFinite { node: [C; 4], value: C },
}

/// Fundamental-domain model of a compact surface.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainModel {
    /// Flat torus cell `[0,p1) x [0,p2) x [0,p3) x [0,p4)` in (x1,y1,x2,y2).
    Torus { periods: [f64; 4] },
    /// Annulus `1 <= |z| <= 2` with deck map `z -> 2z`, parameterized by
    /// `(r, u, phi1, phi2)` with `u = sin^2 theta`.
    Hopf,
}

impl DomainModel {
    pub fn kind(&self) -> &'static str {
        match self {
            DomainModel::Torus { .. } => "torus",
            DomainModel::Hopf => "hopf",
        }
    }

    /// Lebesgue volume of the fundamental cell in R^4.
    pub fn lebesgue_volume(&self) -> f64 {
        match self {
            DomainModel::Torus { periods } => periods.iter().product(),
            // vol(S^3) * int_1^2 r^3 dr = 2 pi^2 * 15/4
            DomainModel::Hopf => 15.0 * std::f64::consts::PI.powi(2) / 2.0,
        }
    }

    /// Map chart coordinates to an honest point (zb = conj z).
    pub fn chart_point(&self, t: [f64; 4]) -> [C; 4] {
        match self {
            DomainModel::Torus { .. } => {
                let z1 = C::new(t[0], t[1]);
                let z2 = C::new(t[2], t[3]);
                [z1, z2, z1.conj(), z2.conj()]
            }
            DomainModel::Hopf => {
                let (r, u, p1, p2) = (t[0], t[1], t[2], t[3]);
                let (c, s) = ((1.0 - u).max(0.0).sqrt(), u.max(0.0).sqrt());
                let z1 = C::from_polar(r * c, p1);
                let z2 = C::from_polar(r * s, p2);
                [z1, z2, z1.conj(), z2.conj()]
            }
        }
    }

    /// Whether `(z1, z2)` lies in the fundamental chart.
    pub fn check_in_chart(&self, z1: C, z2: C) -> Result<(), DomainError> {
        match self {
            DomainModel::Torus { .. } => Ok(()),
            DomainModel::Hopf => {
                let r = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
                if !(1.0 - 1e-12..=2.0 + 1e-12).contains(&r) {
                    Err(DomainError::OutOfChart([z1, z2], "need 1 <= |z| <= 2"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Deterministic low-discrepancy sample of honest chart points.
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<[C; 4]> {
        let start = seed as usize + 1;
        (0..n)
            .map(|k| {
                let i = start + k;
                let t = [halton(i, 2), halton(i, 3), halton(i, 5), halton(i, 7)];
                match self {
                    DomainModel::Torus { periods } => self.chart_point([
                        t[0] * periods[0],
                        t[1] * periods[1],
                        t[2] * periods[2],
                        t[3] * periods[3],
                    ]),
                    DomainModel::Hopf => self.chart_point([
                        1.0 + t[0],
                        t[1],
                        2.0 * std::f64::consts::PI * t[2],
                        2.0 * std::f64::consts::PI * t[3],
                    ]),
                }
            })
            .collect()
    }
}

/// Van der Corput radical inverse in the given base.
pub fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Nodes and Lebesgue weights over a fundamental domain.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<[C; 4]>,
    pub weights: Vec<f64>,
    pub resolution: u32,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for k in 0..n {
        // Newton iteration from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        xs[n - 1 - k] = x;
        ws[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    for k in 0..n {
        xs[k] = mid + half * xs[k];
        ws[k] *= half;
    }
    (xs, ws)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Build the quadrature rule for a domain at resolution `R`.
///
/// Torus: an `R^4` uniform grid per cell (periodic trapezoid, spectrally
/// accurate for smooth periodic integrands).  Hopf: Gauss-Legendre with `R`
/// nodes in `r` and in `u = sin^2 theta` (so the angular Jacobian is
/// integrated exactly), uniform `2R` nodes in each circle angle; the
/// parameterization Jacobian `r^3/2` is folded into the weights.
pub fn build_rule(d: &DomainModel, resolution: u32) -> Result<QuadratureRule, DomainError> {
    build_rule_with_origin(d, resolution, [0.0; 4])
}

/// Same as [`build_rule`] with a shifted torus cell origin (used to test
/// translation invariance; ignored on the Hopf model).
pub fn build_rule_with_origin(
    d: &DomainModel,
    resolution: u32,
    origin: [f64; 4],
) -> Result<QuadratureRule, DomainError> {
    if resolution < 2 {
        return Err(DomainError::ResolutionTooSmall(resolution));
    }
    let r = resolution as usize;
    match d {
        DomainModel::Torus { periods } => {
            let n = r.checked_pow(4).filter(|n| *n <= NODE_CAP);
            let n = n.ok_or(DomainError::TooManyNodes(usize::MAX))?;
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            let w = periods.iter().product::<f64>() / n as f64;
            for k0 in 0..r {
                for k1 in 0..r {
                    for k2 in 0..r {
                        for k3 in 0..r {
                            let t = [
                                origin[0] + periods[0] * k0 as f64 / r as f64,
                                origin[1] + periods[1] * k1 as f64 / r as f64,
                                origin[2] + periods[2] * k2 as f64 / r as f64,
                                origin[3] + periods[3] * k3 as f64 / r as f64,
                            ];
                            nodes.push(d.chart_point(t));
                            weights.push(w);
                        }
                    }
                }
            }
            Ok(QuadratureRule { nodes, weights, resolution })
        }
        DomainModel::Hopf => {
            let n = 4usize
                .checked_mul(r * r)
                .and_then(|m| m.checked_mul(r * r))
                .filter(|n| *n <= NODE_CAP)
                .ok_or(DomainError::TooManyNodes(usize::MAX))?;
            let (rs, wr) = gauss_legendre(r, 1.0, 2.0);
            let (us, wu) = gauss_legendre(r, 0.0, 1.0);
            let nphi = 2 * r;
            let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for (ir, rad) in rs.iter().enumerate() {
                for (iu, u) in us.iter().enumerate() {
                    let base_w = wr[ir] * wu[iu] * dphi * dphi * rad.powi(3) / 2.0;
                    for k1 in 0..nphi {
                        for k2 in 0..nphi {
                            let t = [*rad, *u, dphi * k1 as f64, dphi * k2 as f64];
                            nodes.push(d.chart_point(t));
                            weights.push(base_w);
                        }
                    }
                }
            }
            Ok(QuadratureRule { nodes, weights, resolution })
        }
    }
}

// ---------------------------------------------------------------------------
// Deterministic reductions
// ---------------------------------------------------------------------------

const CHUNK: usize = 1024;

/// Pairwise (fixed-tree) sum of real values.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise (fixed-tree) sum of complex values.
pub fn pairwise_sum_c(xs: &[C]) -> C {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

fn pairwise_tree<T, A>(xs: &[T], add: &A) -> T
where
    T: Clone,
    A: Fn(&T, &T) -> T,
{
    match xs.len() {
        1 => xs[0].clone(),
        2 => add(&xs[0], &xs[1]),
        n => {
            let mid = n / 2;
            add(&pairwise_tree(&xs[..mid], add), &pairwise_tree(&xs[mid..], add))
        }
    }
}

/// Evaluate `eval(i)` for `i in 0..n` in parallel and combine with `add`
/// over a fixed pairwise tree (chunked at a fixed width), so the result does
/// not depend on the number of worker threads.
pub fn deterministic_reduce<T, F, A>(n: usize, zero: T, eval: F, add: A) -> Result<T, DomainError>
where
    T: Clone + Send + Sync,
    F: Fn(usize) -> Result<T, DomainError> + Sync,
    A: Fn(&T, &T) -> T + Sync + Send,
{
    if n == 0 {
        return Ok(zero);
    }
    let n_chunks = n.div_ceil(CHUNK);
    let chunks: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let vals = (lo..hi).map(&eval).collect::<Result<Vec<T>, _>>()?;
            Ok(pairwise_tree(&vals, &add))
        })
        .collect::<Result<Vec<T>, DomainError>>()?;
    Ok(pairwise_tree(&chunks, &add))
}

/// Integrate a scalar field against the volume form: sum of
/// `w_i * 4 det h(p_i) * f(p_i)` over the rule's nodes.
pub fn integrate<F>(m: &MetricField, rule: &QuadratureRule, f: F) -> Result<C, DomainError>
where
    F: Fn([C; 4]) -> Result<C, DomainError> + Sync,
{
    deterministic_reduce(
        rule.len(),
        C::new(0.0, 0.0),
        |i| {
            let p = rule.nodes[i];
            let h = m.h_values(p)?;
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let v = f(p)?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(DomainError::NonFinite { node: p, value: v });
            }
            Ok(rule.weights[i] * 4.0 * det * v)
        },
        |a, b| a + b,
    )
}

// ---------------------------------------------------------------------------
// Deck invariance
// ---------------------------------------------------------------------------

/// Outcome of checking that a metric descends to the compact quotient.
#[derive(Debug, Clone)]
pub struct DeckReport {
    pub max_residual: f64,
    pub worst_point: [C; 4],
    pub pass: bool,
}

pub const DECK_TOL: f64 = 1e-9;

/// Torus: `h(z + period) = h(z)` along each lattice direction.  Hopf:
/// `4 h(2z) = h(z)` (pullback invariance of the fundamental form under the
/// deck map).  Residuals are relative to the local component scale.
pub fn deck_invariance_check(m: &MetricField, samples: usize, seed: u64) -> Result<DeckReport, MetricError> {
    let mut worst = (0.0_f64, [C::new(0.0, 0.0); 4]);
    for p in m.domain.sample_points(samples, seed) {
        let h0 = m.h_values(p)?;
        let scale = h0.iter().flatten().map(|c| c.norm()).fold(1.0_f64, f64::max);
        let mut record = |hs: [[C; 2]; 2], factor: f64, p: [C; 4]| {
            let mut res = 0.0_f64;
            for i in 0..2 {
                for j in 0..2 {
                    res = res.max((factor * hs[i][j] - h0[i][j]).norm());
                }
            }
            let res = res / scale;
            if res > worst.0 {
                worst = (res, p);
            }
        };
        match &m.domain {
            DomainModel::Torus { periods } => {
                for d in 0..4 {
                    let mut q = p;
                    let shift = match d {
                        0 => C::new(periods[0], 0.0),
                        1 => C::new(0.0, periods[1]),
                        2 => C::new(periods[2], 0.0),
                        _ => C::new(0.0, periods[3]),
                    };
                    if d < 2 {
                        q[0] += shift;
                        q[2] += shift.conj();
                    } else {
                        q[1] += shift;
                        q[3] += shift.conj();
                    }
                    record(m.h_values(q)?, 1.0, p);
                }
            }
            DomainModel::Hopf => {
                let q = [2.0 * p[0], 2.0 * p[1], 2.0 * p[2], 2.0 * p[3]];
                record(m.h_values(q)?, 4.0, p);
            }
        }
    }
    Ok(DeckReport { max_residual: worst.0, worst_point: worst.1, pass: worst.0 < DECK_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn torus_rule_counts_and_weight_sum() {
        let d = DomainModel::Torus { periods: [1.0; 4] };
        let rule = build_rule(&d, 8).unwrap();
        assert_eq!(rule.len(), 4096);
        assert!((rule.weight_sum() - 1.0).abs() < 1e-12);
        assert!(matches!(build_rule(&d, 1), Err(DomainError::ResolutionTooSmall(1))));
    }

    #[test]
    fn hopf_rule_counts_and_weight_sum() {
        let d = DomainModel::Hopf;
        let rule = build_rule(&d, 8).unwrap();
        assert_eq!(rule.len(), 8 * 8 * 16 * 16);
        let expect = d.lebesgue_volume();
        assert!((rule.weight_sum() - expect).abs() < 1e-10 * expect);
        // The Jacobian is integrated exactly even at the minimum resolution.
        let rule = build_rule(&d, 2).unwrap();
        assert!((rule.weight_sum() - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn volumes_of_gallery_metrics() {
        let flat = gallery::load("torus_flat", None).unwrap();
        let rule = build_rule(&flat.domain, 8).unwrap();
        let one = |_p: [C; 4]| Ok(C::new(1.0, 0.0));
        let vol = integrate(&flat, &rule, one).unwrap();
        assert!((vol.re - 4.0).abs() < 1e-10, "torus volume {vol}");
        assert!(vol.im.abs() < 1e-12);

        let hopf = gallery::load("hopf_standard", None).unwrap();
        let rule = build_rule(&hopf.domain, 12).unwrap();
        let vol = integrate(&hopf, &rule, one).unwrap();
        let expect = 8.0 * std::f64::consts::PI.powi(2) * 2.0_f64.ln();
        assert!(
            (vol.re - expect).abs() < 1e-6 * expect,
            "hopf volume {} vs {expect}",
            vol.re
        );
    }

    #[test]
    fn deck_invariance_examples() {
        let hopf = gallery::load("hopf_standard", None).unwrap();
        let rep = deck_invariance_check(&hopf, 64, 1).unwrap();
        assert!(rep.pass, "hopf deck residual {}", rep.max_residual);

        let conf = gallery::load("torus_conformal", Some(0.1)).unwrap();
        let rep = deck_invariance_check(&conf, 64, 1).unwrap();
        assert!(rep.pass, "torus deck residual {}", rep.max_residual);

        // Euclidean metric on the Hopf chart is not deck invariant.
        let bad = crate::expr::MetricField {
            name: "hopf_euclid".into(),
            domain: DomainModel::Hopf,
            h: [
                [crate::expr::parse("1").unwrap(), crate::expr::parse("0").unwrap()],
                [crate::expr::parse("0").unwrap(), crate::expr::parse("1").unwrap()],
            ],
        };
        let rep = deck_invariance_check(&bad, 64, 1).unwrap();
        assert!(!rep.pass);
        assert!((rep.max_residual - 3.0).abs() < 1e-12, "4*1 vs 1 relative to scale 1");
    }

    #[test]
    fn reduction_is_thread_count_independent() {
        let vals: Vec<f64> = (0..10000).map(|i| ((i * 2654435761_usize) % 1000) as f64 * 1e-3).collect();
        let serial = {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            pool.install(|| {
                deterministic_reduce(vals.len(), 0.0, |i| Ok(vals[i]), |a, b| a + b).unwrap()
            })
        };
        let wide = {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(7).build().unwrap();
            pool.install(|| {
                deterministic_reduce(vals.len(), 0.0, |i| Ok(vals[i]), |a, b| a + b).unwrap()
            })
        };
        assert_eq!(serial.to_bits(), wide.to_bits());
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let (xs, ws) = gauss_legendre(5, 0.0, 2.0);
        let integral: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(7)).sum();
        assert!((integral - 2.0_f64.powi(8) / 8.0).abs() < 1e-12);
    }
}
