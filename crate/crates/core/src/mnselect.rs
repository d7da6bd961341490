//! Master-node selection: trade channel gain against mean distance to the
//! rest of the cluster.
//!
//! Two scoring modes are shipped. `RawDifference` evaluates
//! `argmax_m |g_m - dbar_m|` exactly as stated, mixing a channel gain with
//! a distance in meters; it exists so that formula stays testable.
//! `Normalized` (the default) min-max scales the gain in dB and the mean
//! ISL distance in km to [0, 1] first and maximizes their difference, which
//! in practice selects one of the satellites nearest the user.

use crate::error::{Error, Result};
use crate::linkbudget::linear_to_db;
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// `argmax |gain - mean distance|` on raw (mixed) units.
    RawDifference,
    /// Min-max scaled dB gain minus min-max scaled km distance.
    #[default]
    Normalized,
}

/// Per-candidate scoring record.
#[derive(Debug, Clone, PartialEq)]
pub struct MnScore {
    /// Index into the supplied (range-ordered) candidate list.
    pub index: usize,
    pub channel_gain_db: f64,
    /// Mean distance to the other cluster members, m.
    pub mean_isl_distance: f64,
    pub score: f64,
}

/// Mean distance from satellite `m` to every other satellite; 0 for a
/// single-satellite cluster.
pub fn mean_isl_distance(distances: &DMatrix<f64>, m: usize) -> f64 {
    let n = distances.nrows();
    if n <= 1 {
        return 0.0;
    }
    let row_sum: f64 = (0..n).filter(|&j| j != m).map(|j| distances[(m, j)]).sum();
    row_sum / (n - 1) as f64
}

fn min_max_scale(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-300 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Score every candidate under the chosen mode. `gains` are linear channel
/// magnitudes (or any gain proxy); candidates must come ordered by user
/// distance so index ties resolve toward the nearest satellite.
pub fn score_candidates(
    gains: &[f64],
    distances: &DMatrix<f64>,
    mode: SelectionMode,
) -> Result<Vec<MnScore>> {
    if gains.is_empty() {
        return Err(Error::Domain("no candidates to select from".into()));
    }
    if distances.nrows() != gains.len() || distances.ncols() != gains.len() {
        return Err(Error::Domain(format!(
            "distance matrix is {}x{} but there are {} gains",
            distances.nrows(),
            distances.ncols(),
            gains.len()
        )));
    }
    let mean_d: Vec<f64> = (0..gains.len()).map(|m| mean_isl_distance(distances, m)).collect();
    let gains_db: Vec<f64> = gains.iter().map(|&g| linear_to_db(g)).collect();
    let scores: Vec<f64> = match mode {
        SelectionMode::RawDifference => {
            gains.iter().zip(&mean_d).map(|(&g, &d)| (g - d).abs()).collect()
        }
        SelectionMode::Normalized => {
            let g = min_max_scale(&gains_db);
            let d_km: Vec<f64> = mean_d.iter().map(|d| d / 1.0e3).collect();
            let d = min_max_scale(&d_km);
            g.iter().zip(&d).map(|(a, b)| a - b).collect()
        }
    };
    Ok((0..gains.len())
        .map(|m| MnScore {
            index: m,
            channel_gain_db: gains_db[m],
            mean_isl_distance: mean_d[m],
            score: scores[m],
        })
        .collect())
}

/// Index of the selected master node. Ties go to the earliest candidate
/// (the nearest to the user, given range-ordered input).
pub fn select_mn(gains: &[f64], distances: &DMatrix<f64>, mode: SelectionMode) -> Result<usize> {
    let scores = score_candidates(gains, distances, mode)?;
    let mut best = 0;
    for s in &scores {
        if s.score > scores[best].score {
            best = s.index;
        }
    }
    Ok(best)
}

/// Cluster ordering after selection: the master node first, then the rest
/// ascending by distance to it (ties by index).
pub fn reindex_by_mn(distances: &DMatrix<f64>, mn: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..distances.nrows()).filter(|&i| i != mn).collect();
    others.sort_by(|&a, &b| {
        distances[(mn, a)].partial_cmp(&distances[(mn, b)]).unwrap().then(a.cmp(&b))
    });
    let mut order = Vec::with_capacity(distances.nrows());
    order.push(mn);
    order.extend(others);
    order
}
