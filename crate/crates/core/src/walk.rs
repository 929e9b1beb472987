//! The walk operator `E = (S ⊗ P_R + S⁻¹ ⊗ P_L)(I ⊗ U)` on a periodic
//! lattice of `L` sites, with `S|n> = |n+1>` and `S^L = I`.
//!
//! Composite index convention for dense vectors: `n·M + α` for site `n` and
//! coin state `α`. The lattice-momentum basis is `<n|k> = exp(2πi nk/L)/√L`;
//! in it `E` splits into `L` blocks `E_k = D_k U` with `D_k` diagonal.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::coin::{CoinSpec, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::turns::cis_turns;

/// Which half of the coin index range is shifted towards lower sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftAssignment {
    /// `P_L` projects on `α = 0..M/2`, `P_R` on `α = M/2..M`.
    #[default]
    LowerHalfLeft,
    LowerHalfRight,
}

/// How the cell is split into its left- and right-moving halves.
///
/// The split always runs along the coin index; the cut picks the basis the
/// coin matrix is written in. `Horizontal` splits on momentum, `Vertical` on
/// position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellCut {
    #[default]
    Horizontal,
    Vertical,
}

impl std::str::FromStr for CellCut {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "horizontal" => Ok(CellCut::Horizontal),
            "vertical" => Ok(CellCut::Vertical),
            other => Err(Error::InvalidArgument(format!("unknown partition `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    #[serde(rename = "L")]
    pub sites: usize,
    pub coin: CoinSpec,
    pub partition: ShiftAssignment,
    pub cut: CellCut,
}

impl WalkConfig {
    pub fn new(sites: usize, coin: CoinSpec) -> Self {
        WalkConfig { sites, coin, partition: ShiftAssignment::default(), cut: CellCut::default() }
    }

    pub fn with_cut(mut self, cut: CellCut) -> Self {
        self.cut = cut;
        self
    }

    pub fn with_partition(mut self, partition: ShiftAssignment) -> Self {
        self.partition = partition;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::TooFewSites(self.sites));
        }
        self.coin.validate()
    }

    /// The coin unitary expressed in the basis selected by `cut`.
    pub fn coin_matrix(&self) -> Result<UnitaryMatrix> {
        self.validate()?;
        let native = self.coin.build()?;
        let phi = self.coin.phi;
        Ok(match (self.cut, self.coin.native_basis_is_momentum()) {
            (CellCut::Horizontal, true) | (CellCut::Vertical, false) => native,
            (CellCut::Horizontal, false) => native.position_to_momentum(phi),
            (CellCut::Vertical, true) => native.momentum_to_position(phi),
        })
    }

    pub fn dense_operator(&self) -> Result<DenseWalkOperator> {
        build_dense(self, &self.coin_matrix()?)
    }

    pub fn momentum_blocks(&self) -> Result<MomentumBlockSet> {
        build_momentum_blocks(self, &self.coin_matrix()?)
    }

    fn moves_left(&self, alpha: usize) -> bool {
        let lower = alpha < self.coin.dim / 2;
        match self.partition {
            ShiftAssignment::LowerHalfLeft => lower,
            ShiftAssignment::LowerHalfRight => !lower,
        }
    }
}

fn check_dims(config: &WalkConfig, coin: &UnitaryMatrix) -> Result<()> {
    config.validate()?;
    if coin.dim() != config.coin.dim {
        return Err(Error::DimensionMismatch { expected: config.coin.dim, found: coin.dim() });
    }
    Ok(())
}

/// `E` as a dense `(L·M) × (L·M)` matrix. Only sensible for small lattices.
#[derive(Debug, Clone)]
pub struct DenseWalkOperator {
    sites: usize,
    coin_dim: usize,
    matrix: Array2<Complex64>,
}

impl DenseWalkOperator {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        crate::coin::unitarity_defect(&self.matrix)
    }
}

pub fn build_dense(config: &WalkConfig, coin: &UnitaryMatrix) -> Result<DenseWalkOperator> {
    check_dims(config, coin)?;
    let (l, m) = (config.sites, config.coin.dim);
    let mut matrix = Array2::<Complex64>::zeros((l * m, l * m));
    for n in 0..l {
        for alpha in 0..m {
            let target = if config.moves_left(alpha) { (n + l - 1) % l } else { (n + 1) % l };
            for beta in 0..m {
                matrix[[target * m + alpha, n * m + beta]] = coin.get(alpha, beta);
            }
        }
    }
    Ok(DenseWalkOperator { sites: l, coin_dim: m, matrix })
}

/// `E` in the lattice-momentum basis: one `M × M` block per momentum `k`.
#[derive(Debug, Clone)]
pub struct MomentumBlockSet {
    sites: usize,
    blocks: Vec<Array2<Complex64>>,
}

impl MomentumBlockSet {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn coin_dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn blocks(&self) -> &[Array2<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &Array2<Complex64> {
        &self.blocks[k]
    }
}

/// Row `α` of `E_k` is row `α` of `U` times `exp(+2πik/L)` when `α` moves
/// left and `exp(−2πik/L)` when it moves right.
///
/// The sign follows from `S|k> = exp(−2πik/L)|k>` under the Fourier
/// convention above; agreement with [`build_dense`] is what pins it.
pub fn build_momentum_blocks(config: &WalkConfig, coin: &UnitaryMatrix) -> Result<MomentumBlockSet> {
    check_dims(config, coin)?;
    let (l, m) = (config.sites, config.coin.dim);
    let blocks = (0..l)
        .map(|k| {
            let left = cis_turns(k as f64 / l as f64);
            let right = left.conj();
            Array2::from_shape_fn((m, m), |(alpha, beta)| {
                let phase = if config.moves_left(alpha) { left } else { right };
                phase * coin.get(alpha, beta)
            })
        })
        .collect();
    Ok(MomentumBlockSet { sites: l, blocks })
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    /// Length `L·M`, composite index `n·M + α`.
    Dense(Array1<Complex64>),
    /// One length-`M` coin vector per lattice momentum `k`.
    Momentum(Vec<Array1<Complex64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    sites: usize,
    coin_dim: usize,
    repr: StateRepr,
    time: usize,
}

impl WalkState {
    /// `|site> ⊗ |coin>` in the dense representation at `t = 0`.
    pub fn basis(sites: usize, coin_dim: usize, site: usize, coin: usize) -> Result<Self> {
        check_index("site", site, sites)?;
        check_index("coin index", coin, coin_dim)?;
        let mut v = Array1::zeros(sites * coin_dim);
        v[site * coin_dim + coin] = Complex64::new(1.0, 0.0);
        Ok(WalkState { sites, coin_dim, repr: StateRepr::Dense(v), time: 0 })
    }

    /// `|site> ⊗ |coin>` in the momentum representation at `t = 0`.
    pub fn basis_momentum(sites: usize, coin_dim: usize, site: usize, coin: usize) -> Result<Self> {
        Ok(Self::basis(sites, coin_dim, site, coin)?.into_momentum())
    }

    /// `|site> ⊗ |χ>` for an arbitrary coin vector `χ`, dense representation.
    pub fn localized(sites: usize, site: usize, coin_state: &Array1<Complex64>) -> Result<Self> {
        check_index("site", site, sites)?;
        let coin_dim = coin_state.len();
        let mut v = Array1::zeros(sites * coin_dim);
        v.slice_mut(ndarray::s![site * coin_dim..(site + 1) * coin_dim]).assign(coin_state);
        Ok(WalkState { sites, coin_dim, repr: StateRepr::Dense(v), time: 0 })
    }

    pub fn from_momentum(components: Vec<Array1<Complex64>>) -> Result<Self> {
        let sites = components.len();
        if sites < 2 {
            return Err(Error::TooFewSites(sites));
        }
        let coin_dim = components[0].len();
        if let Some(bad) = components.iter().find(|c| c.len() != coin_dim) {
            return Err(Error::DimensionMismatch { expected: coin_dim, found: bad.len() });
        }
        Ok(WalkState { sites, coin_dim, repr: StateRepr::Momentum(components), time: 0 })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.repr {
            StateRepr::Dense(v) => v.iter().map(|z| z.norm_sqr()).sum(),
            StateRepr::Momentum(ks) => ks.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum(),
        }
    }

    pub fn into_momentum(self) -> Self {
        let (l, m) = (self.sites, self.coin_dim);
        let repr = match self.repr {
            StateRepr::Momentum(ks) => StateRepr::Momentum(ks),
            StateRepr::Dense(v) => {
                // φ_k(α) = (1/√L) Σ_n exp(−2πi nk/L) ψ(n, α)
                let fft = FftPlanner::new().plan_fft_forward(l);
                let scale = 1.0 / (l as f64).sqrt();
                let mut ks = vec![Array1::zeros(m); l];
                let mut buf = vec![Complex64::new(0.0, 0.0); l];
                for alpha in 0..m {
                    for n in 0..l {
                        buf[n] = v[n * m + alpha];
                    }
                    fft.process(&mut buf);
                    for (k, z) in buf.iter().enumerate() {
                        ks[k][alpha] = z * scale;
                    }
                }
                StateRepr::Momentum(ks)
            }
        };
        WalkState { repr, ..self }
    }

    pub fn into_dense(self) -> Self {
        let (l, m) = (self.sites, self.coin_dim);
        let repr = match self.repr {
            StateRepr::Dense(v) => StateRepr::Dense(v),
            StateRepr::Momentum(ks) => {
                // ψ(n, α) = (1/√L) Σ_k exp(2πi nk/L) φ_k(α)
                let ifft = FftPlanner::new().plan_fft_inverse(l);
                let scale = 1.0 / (l as f64).sqrt();
                let mut v = Array1::zeros(l * m);
                let mut buf = vec![Complex64::new(0.0, 0.0); l];
                for alpha in 0..m {
                    for k in 0..l {
                        buf[k] = ks[k][alpha];
                    }
                    ifft.process(&mut buf);
                    for (n, z) in buf.iter().enumerate() {
                        v[n * m + alpha] = z * scale;
                    }
                }
                StateRepr::Dense(v)
            }
        };
        WalkState { repr, ..self }
    }

    /// `<site, coin|ψ>`, converting from momentum form when needed.
    pub fn amplitude(&self, site: usize, coin: usize) -> Result<Complex64> {
        check_index("site", site, self.sites)?;
        check_index("coin index", coin, self.coin_dim)?;
        Ok(match &self.repr {
            StateRepr::Dense(v) => v[site * self.coin_dim + coin],
            StateRepr::Momentum(ks) => {
                let l = self.sites;
                let sum: Complex64 =
                    ks.iter().enumerate().map(|(k, c)| cis_turns(((site * k) % l) as f64 / l as f64) * c[coin]).sum();
                sum / (l as f64).sqrt()
            }
        })
    }

    /// Probability of finding the walker on each site.
    pub fn site_probabilities(&self) -> Vec<f64> {
        let dense = match &self.repr {
            StateRepr::Dense(v) => std::borrow::Cow::Borrowed(v),
            StateRepr::Momentum(_) => match self.clone().into_dense().repr {
                StateRepr::Dense(v) => std::borrow::Cow::Owned(v),
                StateRepr::Momentum(_) => unreachable!(),
            },
        };
        dense
            .as_slice()
            .expect("dense state is contiguous")
            .chunks(self.coin_dim)
            .map(|cell| cell.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }
}

fn check_index(what: &'static str, index: usize, limit: usize) -> Result<()> {
    if index >= limit {
        return Err(Error::IndexOutOfRange { what, index, limit });
    }
    Ok(())
}

/// Something that advances a [`WalkState`] by one step.
pub trait Propagator {
    fn step(&self, state: &mut WalkState) -> Result<()>;
}

impl Propagator for DenseWalkOperator {
    fn step(&self, state: &mut WalkState) -> Result<()> {
        if state.sites != self.sites || state.coin_dim != self.coin_dim {
            return Err(Error::DimensionMismatch {
                expected: self.sites * self.coin_dim,
                found: state.sites * state.coin_dim,
            });
        }
        match &mut state.repr {
            StateRepr::Dense(v) => *v = self.matrix.dot(v),
            StateRepr::Momentum(_) => return Err(Error::RepresentationMismatch("momentum state with dense operator")),
        }
        state.time += 1;
        Ok(())
    }
}

impl Propagator for MomentumBlockSet {
    fn step(&self, state: &mut WalkState) -> Result<()> {
        if state.sites != self.sites || state.coin_dim != self.coin_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sites * self.coin_dim(),
                found: state.sites * state.coin_dim,
            });
        }
        match &mut state.repr {
            StateRepr::Momentum(ks) => {
                ks.par_iter_mut().zip(self.blocks.par_iter()).for_each(|(c, block)| *c = block.dot(c));
            }
            StateRepr::Dense(_) => return Err(Error::RepresentationMismatch("dense state with momentum blocks")),
        }
        state.time += 1;
        Ok(())
    }
}

/// Apply `op` to `state` `steps` times.
pub fn evolve<P: Propagator + ?Sized>(mut state: WalkState, op: &P, steps: usize) -> Result<WalkState> {
    for _ in 0..steps {
        op.step(&mut state)?;
    }
    Ok(state)
}
