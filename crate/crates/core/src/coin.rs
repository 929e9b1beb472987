//! Coin unitaries and the classical cell maps they quantize.
//!
//! Every quantum coin acts on an `M`-dimensional cell Hilbert space with
//! effective Planck constant `h = 1/M`. Position and momentum bases on the
//! cell are linked by the boundary-twisted transform
//! `<γ|α> = exp(2πi (γ+φ)(α+φ)/M) / √M`, with the same phase `φ` on both.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::turns::{cis_turns, cos_turns, sin_turns, wrap_unit};

/// Tolerance used for every unitarity check in the crate.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoinKind {
    Dft,
    Harper,
    Baker,
}

impl CoinKind {
    pub fn name(self) -> &'static str {
        match self {
            CoinKind::Dft => "dft",
            CoinKind::Harper => "harper",
            CoinKind::Baker => "baker",
        }
    }
}

impl std::str::FromStr for CoinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dft" | "fourier" | "hadamard" => Ok(CoinKind::Dft),
            "harper" => Ok(CoinKind::Harper),
            "baker" => Ok(CoinKind::Baker),
            other => Err(Error::InvalidArgument(format!("unknown coin kind `{other}`"))),
        }
    }
}

/// Parameters selecting and configuring a coin.
///
/// `g` and `tau` only matter for the Harper coin. `phi` is the boundary phase
/// shared by the position and momentum bases of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinSpec {
    pub kind: CoinKind,
    #[serde(rename = "M")]
    pub dim: usize,
    pub g: f64,
    pub tau: f64,
    pub phi: f64,
}

impl CoinSpec {
    pub fn dft(dim: usize) -> Self {
        CoinSpec { kind: CoinKind::Dft, dim, g: 0.0, tau: 1.0, phi: 0.0 }
    }

    pub fn harper(dim: usize, g: f64) -> Self {
        CoinSpec { kind: CoinKind::Harper, dim, g, tau: 1.0, phi: 0.0 }
    }

    /// Baker coin with the antiperiodic boundary phase `φ = 1/2`.
    pub fn baker(dim: usize) -> Self {
        CoinSpec { kind: CoinKind::Baker, dim, g: 0.0, tau: 1.0, phi: 0.5 }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || !self.dim.is_multiple_of(2) {
            return Err(Error::OddCoinDimension(self.dim));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidTau(self.tau));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidChaosParameter(self.g));
        }
        if !(self.phi.is_finite() && (0.0..1.0).contains(&self.phi)) {
            return Err(Error::InvalidPhase(self.phi));
        }
        Ok(())
    }

    /// The coin unitary in the basis its closed form is written in: the index
    /// basis for the Fourier coin, momentum states for Harper, position
    /// states for the baker.
    pub fn build(&self) -> Result<UnitaryMatrix> {
        self.validate()?;
        match self.kind {
            CoinKind::Dft => dft_coin(self.dim),
            CoinKind::Harper => harper_coin(self),
            CoinKind::Baker => baker_coin(self.dim, self.phi),
        }
    }

    /// Whether [`CoinSpec::build`] returns the matrix in the momentum basis
    /// of the cell (`true`) or in the position basis (`false`).
    pub fn native_basis_is_momentum(&self) -> bool {
        matches!(self.kind, CoinKind::Harper)
    }

    /// The classical cell map this coin quantizes.
    pub fn classical_map(&self) -> CellMap {
        match self.kind {
            CoinKind::Dft => CellMap::Rotation,
            CoinKind::Harper => CellMap::Harper { g: self.g, tau: self.tau },
            CoinKind::Baker => CellMap::Baker,
        }
    }
}

/// Dense complex square matrix that is unitary to [`UNITARITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: Array2<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let defect = unitarity_defect(&entries);
        if defect.is_nan() || defect >= UNITARITY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(UnitaryMatrix { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: Array2<Complex64>) -> Self {
        debug_assert!(entries.is_square());
        UnitaryMatrix { entries }
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix { entries: Array2::eye(dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<Complex64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[[row, col]]
    }

    /// Max-entry norm of `U†U − I`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.entries)
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix { entries: adjoint(&self.entries) }
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &UnitaryMatrix) -> Self {
        UnitaryMatrix { entries: self.entries.dot(&rhs.entries) }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..n {
            out = out.compose(self);
        }
        out
    }

    /// Re-express a matrix given in the cell position basis in the momentum
    /// basis, `G U G†`.
    pub fn position_to_momentum(&self, phi: f64) -> Self {
        let g = twisted_fourier(self.dim(), phi);
        UnitaryMatrix { entries: g.dot(&self.entries).dot(&adjoint(&g)) }
    }

    /// Inverse of [`UnitaryMatrix::position_to_momentum`], `G† U G`.
    pub fn momentum_to_position(&self, phi: f64) -> Self {
        let g = twisted_fourier(self.dim(), phi);
        UnitaryMatrix { entries: adjoint(&g).dot(&self.entries).dot(&g) }
    }
}

pub(crate) fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

pub(crate) fn unitarity_defect(m: &Array2<Complex64>) -> f64 {
    let product = adjoint(m).dot(m);
    product
        .indexed_iter()
        .map(|((i, j), z)| {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            (z - target).norm()
        })
        .fold(0.0, f64::max)
}

/// Position-to-momentum transform on an `n`-state cell with boundary phase
/// `phi`: `G[α][γ] = exp(−2πi (γ+φ)(α+φ)/n) / √n`.
pub fn twisted_fourier(n: usize, phi: f64) -> Array2<Complex64> {
    let norm = 1.0 / (n as f64).sqrt();
    let nf = n as f64;
    Array2::from_shape_fn((n, n), |(a, c)| cis_turns(-(c as f64 + phi) * (a as f64 + phi) / nf) * norm)
}

/// Discrete Fourier coin `U[α][β] = exp(2πi αβ/M) / √M`.
///
/// Reduces to the Hadamard coin at `M = 2`; its classical limit is the
/// quarter-turn `F(q, p) = (1 − p, q)`, so `U⁴ = I`.
pub fn dft_coin(dim: usize) -> Result<UnitaryMatrix> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::OddCoinDimension(dim));
    }
    let norm = 1.0 / (dim as f64).sqrt();
    let entries = Array2::from_shape_fn((dim, dim), |(a, b)| {
        // αβ mod M keeps the reduced argument exact.
        cis_turns(((a * b) % dim) as f64 / dim as f64) * norm
    });
    Ok(UnitaryMatrix::from_entries_unchecked(entries))
}

/// Quantum Harper coin in the momentum basis, from the coin's [`CoinSpec`].
pub fn harper_coin(spec: &CoinSpec) -> Result<UnitaryMatrix> {
    if spec.dim == 0 || !spec.dim.is_multiple_of(2) {
        return Err(Error::OddCoinDimension(spec.dim));
    }
    harper_matrix(spec.dim, spec.g, spec.tau, spec.phi)
}

fn check_harper_args(dim: usize, g: f64, tau: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::OddCoinDimension(dim));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidTau(tau));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::InvalidChaosParameter(g));
    }
    Ok(())
}

fn kinetic_phase(dim: usize, tau: f64, phi: f64, beta: usize) -> Complex64 {
    let m = dim as f64;
    Complex64::from_polar(1.0, -tau * m * cos_turns((beta as f64 + phi) / m))
}

fn potential_phases(dim: usize, g: f64, tau: f64, phi: f64) -> Vec<Complex64> {
    let m = dim as f64;
    (0..dim).map(|c| Complex64::from_polar(1.0, -tau * g * m * cos_turns((c as f64 + phi) / m))).collect()
}

/// Floquet operator `exp(−iτg cos 2πq̂ / h) exp(−iτ cos 2πp̂ / h)` with
/// `h = 1/M`, in the momentum basis:
///
/// `<α|U|β> = K_β · (1/M) Σ_γ V_γ exp(2πi (γ+φ)(β−α)/M)`
///
/// where `K_β = exp(−iτM cos(2π(β+φ)/M))` and
/// `V_γ = exp(−iτgM cos(2π(γ+φ)/M))`.
///
/// Any `dim ≥ 1` is accepted; the walk additionally needs `dim` even, which
/// [`harper_coin`] enforces. The sum over `γ` is evaluated as one length-`M`
/// inverse FFT whose output is re-twisted by `exp(2πiφd/M)`.
pub fn harper_matrix(dim: usize, g: f64, tau: f64, phi: f64) -> Result<UnitaryMatrix> {
    check_harper_args(dim, g, tau)?;
    let m = dim as f64;

    let mut kernel = potential_phases(dim, g, tau, phi);
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(dim);
    ifft.process(&mut kernel);
    // kernel[d] = Σ_γ V_γ exp(2πi γ d / M); periodic in d.

    let entries = Array2::from_shape_fn((dim, dim), |(a, b)| {
        let d = b as i64 - a as i64;
        let wrapped = d.rem_euclid(dim as i64) as usize;
        let twist = cis_turns(phi * d as f64 / m);
        kinetic_phase(dim, tau, phi, b) * kernel[wrapped] * twist / m
    });
    Ok(UnitaryMatrix::from_entries_unchecked(entries))
}

/// Direct `O(M³)` evaluation of the same closed form as [`harper_matrix`].
pub fn harper_matrix_direct(dim: usize, g: f64, tau: f64, phi: f64) -> Result<UnitaryMatrix> {
    check_harper_args(dim, g, tau)?;
    let m = dim as f64;
    let potential = potential_phases(dim, g, tau, phi);
    let entries = Array2::from_shape_fn((dim, dim), |(a, b)| {
        let sum: Complex64 = potential
            .iter()
            .enumerate()
            .map(|(c, v)| v * cis_turns((c as f64 + phi) * (b as f64 - a as f64) / m))
            .sum();
        kinetic_phase(dim, tau, phi, b) * sum / m
    });
    Ok(UnitaryMatrix::from_entries_unchecked(entries))
}

/// Quantum baker coin in the cell position basis,
/// `B = G_M† · diag(G_{M/2}, G_{M/2})`, with `G_N` from [`twisted_fourier`].
pub fn baker_coin(dim: usize, phi: f64) -> Result<UnitaryMatrix> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::OddCoinDimension(dim));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidPhase(phi));
    }
    let half = dim / 2;
    let small = twisted_fourier(half, phi);
    let mut blocks = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..half {
        for j in 0..half {
            blocks[[i, j]] = small[[i, j]];
            blocks[[i + half, j + half]] = small[[i, j]];
        }
    }
    let big = twisted_fourier(dim, phi);
    Ok(UnitaryMatrix::from_entries_unchecked(adjoint(&big).dot(&blocks)))
}

/// A point of the unit torus `[0,1) × [0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    q: f64,
    p: f64,
}

impl PhasePoint {
    /// Builds a point, reducing both coordinates modulo 1.
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q: wrap_unit(q), p: wrap_unit(p) }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// One kick of the Harper map:
/// `q' = q − τ sin 2πp`, `p' = p + τg sin 2πq'`, both mod 1.
pub fn classical_harper_step(pt: PhasePoint, g: f64, tau: f64) -> PhasePoint {
    let q = wrap_unit(pt.q - tau * sin_turns(pt.p));
    let p = wrap_unit(pt.p + tau * g * sin_turns(q));
    PhasePoint { q, p }
}

pub fn classical_harper_inverse_step(pt: PhasePoint, g: f64, tau: f64) -> PhasePoint {
    let p = wrap_unit(pt.p - tau * g * sin_turns(pt.q));
    let q = wrap_unit(pt.q + tau * sin_turns(p));
    PhasePoint { q, p }
}

/// Baker transformation; the branch at `q = 1/2` is half-open on the right.
pub fn classical_baker_step(pt: PhasePoint) -> PhasePoint {
    if pt.q < 0.5 {
        PhasePoint { q: 2.0 * pt.q, p: 0.5 * pt.p }
    } else {
        PhasePoint { q: 2.0 * pt.q - 1.0, p: 0.5 * (pt.p + 1.0) }
    }
}

/// Quarter turn `F(q, p) = (1 − p, q)`.
///
/// Exact in floating point for coordinates on the `2⁻⁵³` grid, which is
/// where seeded uniform samples live, so four applications return the input
/// bit for bit.
pub fn classical_rotation_step(pt: PhasePoint) -> PhasePoint {
    PhasePoint { q: wrap_unit(1.0 - pt.p), p: pt.q }
}

/// A classical intra-cell map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "lowercase")]
pub enum CellMap {
    Rotation,
    Baker,
    Harper { g: f64, tau: f64 },
}

impl CellMap {
    #[inline]
    pub fn apply(&self, pt: PhasePoint) -> PhasePoint {
        match *self {
            CellMap::Rotation => classical_rotation_step(pt),
            CellMap::Baker => classical_baker_step(pt),
            CellMap::Harper { g, tau } => classical_harper_step(pt, g, tau),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CellMap::Rotation => "rotation",
            CellMap::Baker => "baker",
            CellMap::Harper { .. } => "harper",
        }
    }
}
