//! Classical multi-map walks: a chain of `L` identical cells, each step an
//! intra-cell map followed by moving the top half of every cell one cell to
//! the left and the bottom half one cell to the right.
//!
//! The walk never sees the quantum boundary phase, so these functions take
//! no `phi` argument.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::{CellMap, PhasePoint};
use crate::error::{Error, Result};
use crate::observables::{SiteDistribution, WalkTimeSeries};

/// Points per independently seeded chunk. Fixed so that sampling does not
/// depend on how many worker threads run.
const SAMPLE_CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellPoint {
    pub cell: usize,
    pub pt: PhasePoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEnsemble {
    sites: usize,
    points: Vec<CellPoint>,
    seed: Option<u64>,
}

impl PhaseEnsemble {
    pub fn new(sites: usize, points: Vec<CellPoint>) -> Result<Self> {
        if sites < 2 {
            return Err(Error::TooFewSites(sites));
        }
        if let Some(bad) = points.iter().find(|p| p.cell >= sites) {
            return Err(Error::IndexOutOfRange { what: "cell", index: bad.cell, limit: sites });
        }
        Ok(PhaseEnsemble { sites, points, seed: None })
    }

    /// `n_points` seeded uniform samples of cell `cell`.
    pub fn uniform_fill(sites: usize, cell: usize, n_points: usize, seed: u64) -> Result<Self> {
        let mut ens = Self::new(sites, Vec::new())?;
        if cell >= sites {
            return Err(Error::IndexOutOfRange { what: "cell", index: cell, limit: sites });
        }
        ens.points = (0..n_points.div_ceil(SAMPLE_CHUNK))
            .into_par_iter()
            .flat_map_iter(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64);
                let len = SAMPLE_CHUNK.min(n_points - chunk * SAMPLE_CHUNK);
                (0..len)
                    .map(|_| CellPoint { cell, pt: PhasePoint::new(rng.random(), rng.random()) })
                    .collect::<Vec<_>>()
            })
            .collect();
        ens.seed = Some(seed);
        Ok(ens)
    }

    /// `side × side` cell-centred grid `((i+½)/side, (j+½)/side)` in cell `cell`.
    pub fn grid_fill(sites: usize, cell: usize, side: usize) -> Result<Self> {
        let h = 1.0 / side as f64;
        let points = (0..side)
            .flat_map(|i| (0..side).map(move |j| (i, j)))
            .map(|(i, j)| CellPoint { cell, pt: PhasePoint::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h) })
            .collect();
        Self::new(sites, points)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn points(&self) -> &[CellPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionOrientation {
    /// Split on `p`: the top half moves left.
    #[default]
    Horizontal,
    /// Split on `q`: the right half moves left.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellPartition {
    pub orientation: PartitionOrientation,
    pub threshold: f64,
}

impl Default for CellPartition {
    fn default() -> Self {
        CellPartition { orientation: PartitionOrientation::Horizontal, threshold: 0.5 }
    }
}

impl CellPartition {
    pub fn new(orientation: PartitionOrientation, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidThreshold(threshold));
        }
        Ok(CellPartition { orientation, threshold })
    }

    pub fn vertical() -> Self {
        CellPartition { orientation: PartitionOrientation::Vertical, ..Default::default() }
    }

    /// `true` when the point belongs to the left-moving part. The left part
    /// is `[threshold, 1)`, closed at the threshold like the baker's branch
    /// at `q = 1/2`.
    #[inline]
    pub fn moves_left(&self, pt: &PhasePoint) -> bool {
        let coord = match self.orientation {
            PartitionOrientation::Horizontal => pt.p(),
            PartitionOrientation::Vertical => pt.q(),
        };
        coord >= self.threshold
    }
}

/// One step of the multi-map walk: apply `map` inside each cell, then shift.
pub fn multi_map_step(mut ens: PhaseEnsemble, map: &CellMap, partition: &CellPartition) -> PhaseEnsemble {
    let sites = ens.sites;
    ens.points.par_iter_mut().for_each(|point| {
        let pt = map.apply(point.pt);
        point.cell =
            if partition.moves_left(&pt) { (point.cell + sites - 1) % sites } else { (point.cell + 1) % sites };
        point.pt = pt;
    });
    ens
}

/// Fraction of ensemble points in each cell.
pub fn classical_site_distribution(ens: &PhaseEnsemble) -> Result<SiteDistribution> {
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut counts = vec![0usize; ens.sites];
    for p in &ens.points {
        counts[p.cell] += 1;
    }
    let n = ens.len() as f64;
    SiteDistribution::new(counts.into_iter().map(|c| c as f64 / n).collect(), 0)
}

/// Iterate `initial` points for `n_steps` each, emitting every visited point
/// (the starting point included) trajectory by trajectory.
pub fn phase_portrait_from(map: &CellMap, initial: &[PhasePoint], n_steps: usize) -> Vec<PhasePoint> {
    initial
        .par_iter()
        .flat_map_iter(|&start| std::iter::successors(Some(start), move |&pt| Some(map.apply(pt))).take(n_steps))
        .collect()
}

/// [`phase_portrait_from`] with `n_trajectories` seeded uniform starts.
pub fn phase_portrait(map: &CellMap, n_trajectories: usize, n_steps: usize, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<PhasePoint> = (0..n_trajectories).map(|_| PhasePoint::new(rng.random(), rng.random())).collect();
    phase_portrait_from(map, &starts, n_steps)
}

/// Evolve `ens` for `t_max` steps and record the site observables at every
/// time `0..=t_max`.
pub fn classical_series_from(
    mut ens: PhaseEnsemble,
    map: &CellMap,
    partition: &CellPartition,
    t_max: usize,
) -> Result<WalkTimeSeries> {
    let mut dists = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            ens = multi_map_step(ens, map, partition);
        }
        let d = classical_site_distribution(&ens)?;
        dists.push(SiteDistribution::new(d.probs().to_vec(), t)?);
    }
    Ok(WalkTimeSeries::from_distributions(dists, true))
}

/// Classical baseline: a seeded uniform fill of cell 0 evolved for `t_max` steps.
pub fn classical_msd_series(
    map: &CellMap,
    partition: &CellPartition,
    sites: usize,
    t_max: usize,
    n_points: usize,
    seed: u64,
) -> Result<WalkTimeSeries> {
    let ens = PhaseEnsemble::uniform_fill(sites, 0, n_points, seed)?;
    classical_series_from(ens, map, partition, t_max)
}
