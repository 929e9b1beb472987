//! Site distributions `p_l(t)` and their summary statistics.
//!
//! `p_l(t)` is the probability of finding the walker on site `l` at time `t`
//! after starting on site 0 with a maximally mixed coin, i.e. the average
//! over the `M` coin basis states `|0, β>`.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

use crate::coin::UnitaryMatrix;
use crate::error::{Error, Result};
use crate::walk::{DenseWalkOperator, MomentumBlockSet, WalkConfig};

/// Tolerance on `Σ p_l = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Probabilities below this are dropped from the entropy sum.
const ENTROPY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteDistribution {
    probs: Vec<f64>,
    time: usize,
}

impl SiteDistribution {
    pub fn new(probs: Vec<f64>, time: usize) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::NotNormalized(0.0));
        }
        if let Some(&bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidArgument(format!("probability {bad} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if total.is_nan() || (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(SiteDistribution { probs, time })
    }

    /// All weight on site 0.
    pub fn delta(sites: usize) -> Self {
        let mut probs = vec![0.0; sites];
        probs[0] = 1.0;
        SiteDistribution { probs, time: 0 }
    }

    pub fn uniform(sites: usize) -> Self {
        SiteDistribution { probs: vec![1.0 / sites as f64; sites], time: 0 }
    }

    pub fn sites(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mirror image `l → −l mod L`.
    pub fn reflected(&self) -> Self {
        let l = self.sites();
        let probs = (0..l).map(|i| self.probs[(l - i) % l]).collect();
        SiteDistribution { probs, time: self.time }
    }

    /// Cyclic shift by `offset` sites towards higher indices.
    pub fn shifted(&self, offset: usize) -> Self {
        let l = self.sites();
        let probs = (0..l).map(|i| self.probs[(i + l - offset % l) % l]).collect();
        SiteDistribution { probs, time: self.time }
    }
}

/// Minimal cyclic distance of site `l` from site 0.
#[inline]
pub fn cyclic_distance(l: usize, sites: usize) -> usize {
    l.min(sites - l)
}

/// Mean squared displacement `Σ p_l d_l²` with `d_l = min(l, L − l)`.
pub fn msd(dist: &SiteDistribution) -> f64 {
    let sites = dist.sites();
    dist.probs
        .iter()
        .enumerate()
        .map(|(l, p)| {
            let d = cyclic_distance(l, sites) as f64;
            p * d * d
        })
        .sum()
}

/// Site entropy `−Σ p_l log_L p_l`, in `[0, 1]`.
pub fn site_entropy(dist: &SiteDistribution) -> f64 {
    let base = (dist.sites() as f64).ln();
    let s: f64 = dist.probs.iter().filter(|&&p| p > ENTROPY_FLOOR).map(|&p| -p * p.ln()).sum();
    s / base
}

/// Participation ratio `1 / (L Σ p_l²)`: the fraction of occupied sites.
pub fn participation_ratio(dist: &SiteDistribution) -> f64 {
    let sum_sq: f64 = dist.probs.iter().map(|p| p * p).sum();
    1.0 / (dist.sites() as f64 * sum_sq)
}

/// The `M` walks started from `|0, β>` evolved together.
///
/// Per momentum `k` this holds `W_k = E_k^t V`, whose column `β` is the
/// evolved coin state of the walk started from `|0> ⊗ V|β>` (`V = I` unless
/// another averaging basis is given). Blocks advance independently.
pub struct CoinAveragedWalk<'a> {
    blocks: &'a MomentumBlockSet,
    evolved: Vec<Array2<Complex64>>,
    time: usize,
    ifft: Arc<dyn Fft<f64>>,
}

impl<'a> CoinAveragedWalk<'a> {
    pub fn new(blocks: &'a MomentumBlockSet) -> Self {
        let m = blocks.coin_dim();
        Self::start(blocks, Array2::eye(m))
    }

    /// Average over the orthonormal coin basis given by the columns of `basis`.
    pub fn with_coin_basis(blocks: &'a MomentumBlockSet, basis: &UnitaryMatrix) -> Result<Self> {
        if basis.dim() != blocks.coin_dim() {
            return Err(Error::DimensionMismatch { expected: blocks.coin_dim(), found: basis.dim() });
        }
        Ok(Self::start(blocks, basis.entries().clone()))
    }

    fn start(blocks: &'a MomentumBlockSet, initial: Array2<Complex64>) -> Self {
        let ifft = FftPlanner::new().plan_fft_inverse(blocks.sites());
        CoinAveragedWalk { blocks, evolved: vec![initial; blocks.sites()], time: 0, ifft }
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn advance(&mut self) {
        self.evolved.par_iter_mut().zip(self.blocks.blocks().par_iter()).for_each(|(w, block)| *w = block.dot(w));
        self.time += 1;
    }

    /// `p_l` at the current time.
    ///
    /// Amplitudes are `ψ_β(n, α) = (1/L) Σ_k exp(2πi nk/L) W_k[α, β]`. Partial
    /// sums are formed per `α` in parallel and reduced in a fixed order, so
    /// the result does not depend on scheduling.
    pub fn distribution(&self) -> SiteDistribution {
        let l = self.blocks.sites();
        let m = self.blocks.coin_dim();
        let scale = 1.0 / (l as f64 * l as f64);
        let partials: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|alpha| {
                let mut acc = vec![0.0; l];
                let mut buf = vec![Complex64::new(0.0, 0.0); l];
                for beta in 0..m {
                    for (k, w) in self.evolved.iter().enumerate() {
                        buf[k] = w[[alpha, beta]];
                    }
                    self.ifft.process(&mut buf);
                    for (a, z) in acc.iter_mut().zip(&buf) {
                        *a += z.norm_sqr();
                    }
                }
                acc
            })
            .collect();
        let mut probs = vec![0.0; l];
        for part in &partials {
            for (p, x) in probs.iter_mut().zip(part) {
                *p += x;
            }
        }
        let norm = scale / m as f64;
        probs.iter_mut().for_each(|p| *p *= norm);
        SiteDistribution { probs, time: self.time }
    }
}

/// `p_l(t)` from `t` steps of block evolution.
pub fn site_probabilities(blocks: &MomentumBlockSet, t: usize) -> SiteDistribution {
    let mut walk = CoinAveragedWalk::new(blocks);
    for _ in 0..t {
        walk.advance();
    }
    walk.distribution()
}

/// `(1/M) tr(P_l E^{−t} P_0 E^t)` evaluated with dense matrices.
///
/// As written this weighs paths that start on site `l` and end on site 0,
/// so by translation invariance it equals the mirror image
/// [`SiteDistribution::reflected`] of [`site_probabilities`].
pub fn trace_formula_distribution(op: &DenseWalkOperator, t: usize) -> SiteDistribution {
    let (l, m) = (op.sites(), op.coin_dim());
    let dim = l * m;
    let mut forward = Array2::<Complex64>::eye(dim);
    for _ in 0..t {
        forward = op.matrix().dot(&forward);
    }
    let backward = crate::coin::adjoint(&forward);
    let projector = |site: usize| {
        let mut p = Array2::<Complex64>::zeros((dim, dim));
        for a in 0..m {
            p[[site * m + a, site * m + a]] = Complex64::new(1.0, 0.0);
        }
        p
    };
    let tail = projector(0).dot(&forward);
    let probs = (0..l)
        .map(|site| {
            let product = projector(site).dot(&backward).dot(&tail);
            product.diag().sum().re / m as f64
        })
        .collect();
    SiteDistribution { probs, time: t }
}

/// m.s.d., entropy and participation ratio at each integer time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkTimeSeries {
    pub times: Vec<usize>,
    pub msd: Vec<f64>,
    pub entropy: Vec<f64>,
    pub pr: Vec<f64>,
    pub distributions: Option<Vec<SiteDistribution>>,
}

impl WalkTimeSeries {
    pub fn from_distributions(dists: Vec<SiteDistribution>, retain: bool) -> Self {
        let times = dists.iter().map(SiteDistribution::time).collect();
        let msd = dists.iter().map(msd).collect();
        let entropy = dists.iter().map(site_entropy).collect();
        let pr = dists.iter().map(participation_ratio).collect();
        WalkTimeSeries { times, msd, entropy, pr, distributions: retain.then_some(dists) }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evolve the `M` coin-basis walks once and record every time `0..=t_max`.
pub fn run_time_series(config: &WalkConfig, t_max: usize) -> Result<WalkTimeSeries> {
    if t_max == 0 {
        return Err(Error::InvalidArgument("t_max must be at least 1".into()));
    }
    let blocks = config.momentum_blocks()?;
    let mut walk = CoinAveragedWalk::new(&blocks);
    let mut dists = Vec::with_capacity(t_max + 1);
    dists.push(walk.distribution());
    for _ in 0..t_max {
        walk.advance();
        dists.push(walk.distribution());
    }
    Ok(WalkTimeSeries::from_distributions(dists, true))
}
