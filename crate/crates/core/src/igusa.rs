//! Numerical evaluation of `∫ η_{α,ε}` over the affine chart, the Igusa zeta
//! function in its convergence half-plane and its Laurent coefficients.

use std::f64::consts::PI;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::graph::FeynmanGraph;
use crate::quadric::{
    deform_with_own_tree, no_real_points, DeformationSchedule, QuadricError, QuadricNet,
};
use crate::rational::{format_rational, ratio, to_f64, Rational};

/// Samples drawn from one RNG stream.
pub const BLOCK_SIZE: u64 = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IgusaError {
    #[error("exponent {alpha} does not exceed LD/(2n) = {threshold}: the integral diverges")]
    DivergentExponent { alpha: String, threshold: String },
    #[error("s = {s} lies outside the half-plane Re(s) > {threshold}")]
    OutOfHalfPlane { s: f64, threshold: String },
    #[error("form {edge} is not positive definite")]
    NotPositiveDefinite { edge: String },
    #[error("net has no forms")]
    EmptyNet,
    #[error("sample count must be positive")]
    NoSamples,
    #[error("point has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown integration scheme {0:?}")]
    UnknownScheme(String),
    #[error(transparent)]
    Quadric(#[from] QuadricError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Rational(Rational),
    Real(f64),
}

impl Exponent {
    pub fn value(&self) -> f64 {
        match self {
            Exponent::Rational(r) => to_f64(r),
            Exponent::Real(x) => *x,
        }
    }

    fn exceeds(&self, threshold: &Rational) -> bool {
        match self {
            Exponent::Rational(r) => r > threshold,
            Exponent::Real(x) => *x > to_f64(threshold),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Rational(r) => write!(f, "{}", format_rational(r)),
            Exponent::Real(x) => write!(f, "{x}"),
        }
    }
}

/// `η = prefactor · ω / ∏ qᵢ^α` on the chart `u_chart = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrandSpec {
    net: QuadricNet,
    exponent: Exponent,
    prefactor: Rational,
    chart: usize,
    matrices: Vec<Vec<Vec<f64>>>,
    diagonal: bool,
}

impl IntegrandSpec {
    pub fn new(net: QuadricNet, exponent: Exponent) -> Result<Self, IgusaError> {
        if net.forms.is_empty() {
            return Err(IgusaError::EmptyNet);
        }
        if let Some(f) = net.forms.iter().find(|f| !no_real_points(&f.form)) {
            return Err(IgusaError::NotPositiveDefinite {
                edge: f.edge.clone(),
            });
        }
        let matrices = net
            .forms
            .iter()
            .map(|f| {
                let m = f.form.matrix();
                (0..m.rows())
                    .map(|r| m.row(r).iter().map(to_f64).collect())
                    .collect()
            })
            .collect();
        let diagonal = net.forms.iter().all(|f| f.form.matrix().is_diagonal());
        Ok(Self {
            net,
            exponent,
            prefactor: Rational::from_integer(1.into()),
            chart: 0,
            matrices,
            diagonal,
        })
    }

    /// Deformed net of `graph` on its first spanning tree.
    pub fn for_graph(
        graph: &FeynmanGraph,
        epsilon: &Rational,
        schedule: DeformationSchedule,
        exponent: Exponent,
    ) -> Result<Self, IgusaError> {
        let net = QuadricNet::from_graph(graph, &graph.first_tree())?;
        let deformed = deform_with_own_tree(&net, epsilon, schedule)?;
        Self::new(deformed, exponent)
    }

    pub fn with_prefactor(mut self, prefactor: Rational) -> Self {
        self.prefactor = prefactor;
        self
    }

    /// Affine chart `u_chart = 1`; `0` is the default.
    pub fn with_chart(mut self, chart: usize) -> Self {
        self.chart = chart.min(self.net.ambient_dimension());
        self
    }

    pub fn with_exponent(&self, exponent: Exponent) -> Self {
        Self {
            exponent,
            ..self.clone()
        }
    }

    pub fn net(&self) -> &QuadricNet {
        &self.net
    }

    pub fn exponent(&self) -> &Exponent {
        &self.exponent
    }

    /// `LD`, the number of integration variables.
    pub fn dimension(&self) -> usize {
        self.net.ambient_dimension()
    }

    /// `LD / (2n)`.
    pub fn threshold(&self) -> Rational {
        ratio(self.dimension() as i64, 2 * self.net.forms.len() as i64)
    }

    /// `LD − 2nα`, the power governing the decay of the tail beyond radius `R`.
    pub fn tail_exponent(&self) -> f64 {
        self.dimension() as f64 - 2.0 * self.net.forms.len() as f64 * self.exponent.value()
    }

    /// Geometric mean of the masses, the width of the Cauchy proposal.
    pub fn proposal_width(&self) -> f64 {
        let logs: f64 = self
            .net
            .forms
            .iter()
            .map(|f| 0.5 * to_f64(f.form.mass_term()).ln())
            .sum();
        (logs / self.net.forms.len() as f64).exp()
    }

    fn check_convergent(&self) -> Result<(), IgusaError> {
        let threshold = self.threshold();
        if self.exponent.exceeds(&threshold) {
            Ok(())
        } else {
            Err(IgusaError::DivergentExponent {
                alpha: self.exponent.to_string(),
                threshold: format_rational(&threshold),
            })
        }
    }

    /// `log ∏ qᵢ(x)` at the homogeneous point `x` with `x_chart = 1`.
    #[allow(clippy::needless_range_loop)]
    fn log_product(&self, u: &[f64]) -> f64 {
        let chart = self.chart;
        let coord = |i: usize| -> f64 {
            match i.cmp(&chart) {
                std::cmp::Ordering::Less => u[i],
                std::cmp::Ordering::Equal => 1.0,
                std::cmp::Ordering::Greater => u[i - 1],
            }
        };
        let size = u.len() + 1;
        let mut total = 0.0;
        for a in &self.matrices {
            let q = if self.diagonal {
                (0..size)
                    .map(|i| a[i][i] * coord(i) * coord(i))
                    .sum::<f64>()
            } else {
                let mut s = 0.0;
                for i in 0..size {
                    let xi = coord(i);
                    for j in 0..size {
                        s += a[i][j] * xi * coord(j);
                    }
                }
                s
            };
            total += q.ln();
        }
        total
    }
}

/// `prefactor / ∏ qᵢ(x)^α`.
pub fn eta_value(spec: &IntegrandSpec, u: &[f64]) -> Result<f64, IgusaError> {
    if u.len() != spec.dimension() {
        return Err(IgusaError::DimensionMismatch {
            expected: spec.dimension(),
            found: u.len(),
        });
    }
    Ok(to_f64(&spec.prefactor) * (-spec.exponent.value() * spec.log_product(u)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Importance sampling with a product-Cauchy proposal.
    McCauchy,
    /// Tensor midpoint rule after `u = w tan(π(t − ½))`.
    Grid,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::McCauchy => "mc-cauchy",
            Scheme::Grid => "grid",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = IgusaError;

    fn from_str(s: &str) -> Result<Self, IgusaError> {
        match s {
            "mc-cauchy" => Ok(Scheme::McCauchy),
            "grid" => Ok(Scheme::Grid),
            other => Err(IgusaError::UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegrationOptions {
    pub scheme: Scheme,
    pub samples: u64,
    pub seed: u64,
    /// Number of parallel work groups; does not affect the result.
    pub chunks: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::McCauchy,
            samples: 1 << 18,
            seed: 0,
            chunks: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationResult {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }
}

/// What each sample contributes, given its weight and `log ∏ q`.
trait Observable: Sync {
    fn width(&self) -> usize;
    fn eval(&self, weight: f64, log_q: f64, u: &[f64], out: &mut [f64]);
}

/// `w · L^k` for `k = 0..=kmax`.
struct LogMoments(usize);

impl Observable for LogMoments {
    fn width(&self) -> usize {
        self.0 + 1
    }

    fn eval(&self, weight: f64, log_q: f64, _u: &[f64], out: &mut [f64]) {
        let mut p = weight;
        for o in out.iter_mut() {
            *o = p;
            p *= log_q;
        }
    }
}

/// `w · 1{|u| > R}` for each radius.
struct Tails(Vec<f64>);

impl Observable for Tails {
    fn width(&self) -> usize {
        self.0.len()
    }

    fn eval(&self, weight: f64, _log_q: f64, u: &[f64], out: &mut [f64]) {
        let r2: f64 = u.iter().map(|x| x * x).sum();
        for (o, r) in out.iter_mut().zip(&self.0) {
            *o = if r2 > r * r { weight } else { 0.0 };
        }
    }
}

/// Per-observable sums of `x` and `x²`.
#[derive(Clone)]
struct BlockSums {
    first: Vec<f64>,
    second: Vec<f64>,
}

fn weight_at(
    spec: &IntegrandSpec,
    u: &[f64],
    inv_density: f64,
    alpha: f64,
    prefactor: f64,
) -> (f64, f64) {
    let log_q = spec.log_product(u);
    (prefactor * (-alpha * log_q).exp() * inv_density, log_q)
}

#[allow(clippy::needless_range_loop)]
fn mc_block(
    spec: &IntegrandSpec,
    obs: &dyn Observable,
    seed: u64,
    block: u64,
    count: u64,
) -> BlockSums {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let dim = spec.dimension();
    let width = spec.proposal_width();
    let alpha = spec.exponent.value();
    let prefactor = to_f64(&spec.prefactor);
    let k = obs.width();
    let mut sums = BlockSums {
        first: vec![0.0; k],
        second: vec![0.0; k],
    };
    let mut u = vec![0.0; dim];
    let mut out = vec![0.0; k];
    for _ in 0..count {
        let mut inv_density = 1.0;
        for x in u.iter_mut() {
            let t: f64 = rng.random::<f64>();
            let z = (PI * (t - 0.5)).tan();
            *x = width * z;
            inv_density *= PI * width * (1.0 + z * z);
        }
        let (w, log_q) = weight_at(spec, &u, inv_density, alpha, prefactor);
        obs.eval(w, log_q, &u, &mut out);
        for i in 0..k {
            sums.first[i] += out[i];
            sums.second[i] += out[i] * out[i];
        }
    }
    sums
}

fn reduce_in_order(blocks: Vec<BlockSums>, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut first = vec![Kahan::default(); k];
    let mut second = vec![Kahan::default(); k];
    for b in blocks {
        for i in 0..k {
            first[i].add(b.first[i]);
            second[i].add(b.second[i]);
        }
    }
    (
        first.iter().map(|s| s.sum).collect(),
        second.iter().map(|s| s.sum).collect(),
    )
}

fn run_mc(
    spec: &IntegrandSpec,
    obs: &dyn Observable,
    opts: &IntegrationOptions,
) -> Vec<(f64, f64)> {
    let n = opts.samples;
    let blocks = n.div_ceil(BLOCK_SIZE);
    let count = |b: u64| BLOCK_SIZE.min(n - b * BLOCK_SIZE);
    let groups = if opts.chunks == 0 {
        rayon::current_num_threads().max(1)
    } else {
        opts.chunks
    } as u64;
    let per_group = blocks.div_ceil(groups).max(1);
    let grouped: Vec<Vec<BlockSums>> = (0..blocks.div_ceil(per_group))
        .into_par_iter()
        .map(|g| {
            let start = g * per_group;
            let end = (start + per_group).min(blocks);
            (start..end)
                .map(|b| mc_block(spec, obs, opts.seed, b, count(b)))
                .collect()
        })
        .collect();
    let (first, second) = reduce_in_order(grouped.into_iter().flatten().collect(), obs.width());
    let nf = n as f64;
    first
        .iter()
        .zip(&second)
        .map(|(s1, s2)| {
            let mean = s1 / nf;
            let var = (s2 / nf - mean * mean).max(0.0);
            (mean, (var / nf).sqrt())
        })
        .collect()
}

fn grid_sums(spec: &IntegrandSpec, obs: &dyn Observable, per_dim: u64) -> Vec<f64> {
    let dim = spec.dimension();
    let width = spec.proposal_width();
    let alpha = spec.exponent.value();
    let prefactor = to_f64(&spec.prefactor);
    let total = per_dim.pow(dim as u32);
    let k = obs.width();
    let chunk = BLOCK_SIZE;
    let partial: Vec<Vec<f64>> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; k];
            let mut out = vec![0.0; k];
            let mut u = vec![0.0; dim];
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let mut rest = idx;
                let mut inv_density = 1.0;
                for x in u.iter_mut() {
                    let i = rest % per_dim;
                    rest /= per_dim;
                    let t = (i as f64 + 0.5) / per_dim as f64;
                    let z = (PI * (t - 0.5)).tan();
                    *x = width * z;
                    inv_density *= PI * width * (1.0 + z * z);
                }
                let (w, log_q) = weight_at(spec, &u, inv_density, alpha, prefactor);
                obs.eval(w, log_q, &u, &mut out);
                for i in 0..k {
                    acc[i] += out[i];
                }
            }
            acc
        })
        .collect();
    let mut sums = vec![Kahan::default(); k];
    for p in partial {
        for i in 0..k {
            sums[i].add(p[i]);
        }
    }
    sums.iter().map(|s| s.sum / total as f64).collect()
}

fn run_grid(
    spec: &IntegrandSpec,
    obs: &dyn Observable,
    opts: &IntegrationOptions,
) -> (Vec<(f64, f64)>, u64) {
    let dim = spec.dimension().max(1);
    let mut per_dim = (opts.samples as f64).powf(1.0 / dim as f64).floor() as u64;
    while (per_dim + 1)
        .checked_pow(dim as u32)
        .is_some_and(|n| n <= opts.samples)
    {
        per_dim += 1;
    }
    let per_dim = per_dim.max(2);
    let fine = grid_sums(spec, obs, per_dim);
    let coarse = grid_sums(spec, obs, (per_dim / 2).max(1));
    let pairs = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (*f, (f - c).abs()))
        .collect();
    (pairs, per_dim.pow(dim as u32))
}

fn run(
    spec: &IntegrandSpec,
    obs: &dyn Observable,
    opts: &IntegrationOptions,
) -> Result<(Vec<(f64, f64)>, u64), IgusaError> {
    if opts.samples == 0 {
        return Err(IgusaError::NoSamples);
    }
    Ok(match opts.scheme {
        Scheme::McCauchy => (run_mc(spec, obs, opts), opts.samples),
        Scheme::Grid => run_grid(spec, obs, opts),
    })
}

/// `∫_{ℝ^{LD}} η_{α,ε}` on the chart.
pub fn integrate_eta(
    spec: &IntegrandSpec,
    opts: &IntegrationOptions,
) -> Result<IntegrationResult, IgusaError> {
    spec.check_convergent()?;
    let (values, samples) = run(spec, &LogMoments(0), opts)?;
    Ok(IntegrationResult {
        value: values[0].0,
        std_error: values[0].1,
        samples,
        seed: opts.seed,
        scheme: opts.scheme,
    })
}

/// `ℐ(s) = ∫ ω / ∏ qᵢ^s` for real `s` in the convergence half-plane.
pub fn igusa_zeta(
    spec: &IntegrandSpec,
    s: f64,
    opts: &IntegrationOptions,
) -> Result<IntegrationResult, IgusaError> {
    let threshold = spec.threshold();
    if !s.is_finite() || s <= to_f64(&threshold) {
        return Err(IgusaError::OutOfHalfPlane {
            s,
            threshold: format_rational(&threshold),
        });
    }
    integrate_eta(&spec.with_exponent(Exponent::Real(s)), opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentCoefficients {
    pub center: f64,
    /// `(k, γ_k, error)`.
    pub coefficients: Vec<(usize, f64, f64)>,
    pub samples: u64,
    pub seed: u64,
}

/// `γ_k = ((−1)^k / k!) ∫ η_α log^k ∏ qᵢ` for `k = 0..=kmax`, all from the same samples.
pub fn laurent_coefficients(
    spec: &IntegrandSpec,
    kmax: usize,
    opts: &IntegrationOptions,
) -> Result<LaurentCoefficients, IgusaError> {
    let threshold = spec.threshold();
    if !spec.exponent.exceeds(&threshold) {
        return Err(IgusaError::OutOfHalfPlane {
            s: spec.exponent.value(),
            threshold: format_rational(&threshold),
        });
    }
    let (values, samples) = run(spec, &LogMoments(kmax), opts)?;
    let mut factorial = 1.0;
    let coefficients = values
        .into_iter()
        .enumerate()
        .map(|(k, (mean, err))| {
            if k > 0 {
                factorial *= k as f64;
            }
            let c = if k % 2 == 0 { 1.0 } else { -1.0 } / factorial;
            (k, c * mean, err / factorial)
        })
        .collect();
    Ok(LaurentCoefficients {
        center: spec.exponent.value(),
        coefficients,
        samples,
        seed: opts.seed,
    })
}

/// Single coefficient `γ_k` with its error.
pub fn laurent_coefficient(
    spec: &IntegrandSpec,
    k: usize,
    opts: &IntegrationOptions,
) -> Result<(f64, f64), IgusaError> {
    let all = laurent_coefficients(spec, k, opts)?;
    let (_, g, e) = all.coefficients[k];
    Ok((g, e))
}

/// `π^{D/2} Γ(α − D/2) / (Γ(α) m^{2α − D})`.
pub fn closed_form_single_propagator(
    dimension: usize,
    mass: f64,
    alpha: f64,
) -> Result<f64, IgusaError> {
    let half = dimension as f64 / 2.0;
    if alpha <= half {
        return Err(IgusaError::DivergentExponent {
            alpha: alpha.to_string(),
            threshold: half.to_string(),
        });
    }
    Ok(PI.powf(half) * gamma(alpha - half)
        / (gamma(alpha) * mass.powf(2.0 * alpha - dimension as f64)))
}

/// `∫_{|u| > R} η` for each radius, from one shared sample set.
pub fn tail_integrals(
    spec: &IntegrandSpec,
    radii: &[f64],
    opts: &IntegrationOptions,
) -> Result<Vec<(f64, f64)>, IgusaError> {
    spec.check_convergent()?;
    Ok(run(spec, &Tails(radii.to_vec()), opts)?.0)
}

/// Least-squares slope of `log tail(R)` against `log R`.
pub fn fit_tail_exponent(
    spec: &IntegrandSpec,
    radii: &[f64],
    opts: &IntegrationOptions,
) -> Result<f64, IgusaError> {
    let tails = tail_integrals(spec, radii, opts)?;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = tails.iter().map(|(v, _)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Whether every `qᵢ ≥ 1` on the chart, so `ℐ(s)` is pointwise decreasing in `s`.
pub fn forms_bounded_below_by_one(spec: &IntegrandSpec) -> bool {
    spec.net.forms.iter().all(|f| {
        let m = f.form.matrix();
        m.is_diagonal()
            && m[(spec.chart, spec.chart)]
                .to_f64()
                .is_some_and(|x| x >= 1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadric::deform_net;
    use crate::rational::rat;
    use crate::transversality::sunset_net;

    fn propagator(d: usize, m: i64, alpha: i64) -> IntegrandSpec {
        IntegrandSpec::new(
            QuadricNet::single_propagator(d, &rat(m)),
            Exponent::Rational(rat(alpha)),
        )
        .unwrap()
    }

    fn sunset(alpha: Exponent) -> IntegrandSpec {
        let (g, t, net) = sunset_net(&[rat(1), rat(2), rat(3)], 2).unwrap();
        let deformed = deform_net(&net, &t, &g, &ratio(1, 2), DeformationSchedule::Paper).unwrap();
        IntegrandSpec::new(deformed, alpha).unwrap()
    }

    fn opts(samples: u64, seed: u64) -> IntegrationOptions {
        IntegrationOptions {
            samples,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn eta_examples() {
        let p = propagator(1, 1, 1);
        assert_eq!(eta_value(&p, &[1.0]).unwrap(), 0.5);
        let s = sunset(Exponent::Rational(rat(2)));
        let at_zero = eta_value(&s, &[0.0; 4]).unwrap();
        assert!((at_zero - 1.0 / (1.0f64 * 16.0 * 81.0)).abs() < 1e-15);
        assert!(eta_value(&s, &[0.0; 3]).is_err());
    }

    #[test]
    fn closed_forms() {
        assert!((closed_form_single_propagator(1, 1.0, 1.0).unwrap() - PI).abs() < 1e-12);
        assert!((closed_form_single_propagator(2, 1.0, 2.0).unwrap() - PI).abs() < 1e-12);
        assert!((closed_form_single_propagator(2, 2.0, 2.0).unwrap() - PI / 4.0).abs() < 1e-12);
        assert!(closed_form_single_propagator(2, 1.0, 1.0).is_err());
    }

    #[test]
    fn thresholds() {
        let s = sunset(Exponent::Rational(ratio(2, 3)));
        assert_eq!(s.threshold(), ratio(2, 3));
        match integrate_eta(&s, &opts(10, 0)) {
            Err(IgusaError::DivergentExponent { threshold, .. }) => assert_eq!(threshold, "2/3"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            igusa_zeta(&s, 2.0 / 3.0, &opts(10, 0)),
            Err(IgusaError::OutOfHalfPlane { .. })
        ));
    }

    #[test]
    fn rejects_indefinite_forms() {
        let (_, _, net) = sunset_net(&[rat(1), rat(2), rat(3)], 2).unwrap();
        assert!(matches!(
            IntegrandSpec::new(net, Exponent::Rational(rat(2))),
            Err(IgusaError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn chunking_does_not_change_result() {
        let s = sunset(Exponent::Rational(rat(2)));
        let a = integrate_eta(
            &s,
            &IntegrationOptions {
                chunks: 1,
                ..opts(50_000, 7)
            },
        )
        .unwrap();
        let b = integrate_eta(
            &s,
            &IntegrationOptions {
                chunks: 5,
                ..opts(50_000, 7)
            },
        )
        .unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn propagator_grid_matches_closed_form() {
        let p = propagator(2, 1, 2);
        let r = integrate_eta(
            &p,
            &IntegrationOptions {
                scheme: Scheme::Grid,
                ..opts(250_000, 0)
            },
        )
        .unwrap();
        assert!((r.value - PI).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn gamma_zero_equals_integral() {
        let s = sunset(Exponent::Rational(rat(2)));
        let o = opts(20_000, 3);
        let i = integrate_eta(&s, &o).unwrap();
        let (g0, e0) = laurent_coefficient(&s, 0, &o).unwrap();
        assert_eq!(g0.to_bits(), i.value.to_bits());
        assert_eq!(e0.to_bits(), i.std_error.to_bits());
    }
}
