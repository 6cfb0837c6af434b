use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EARTH_RADIUS_KM: f64 = 6371.0;

/// Grid values closer than this to the target are returned unchanged.
pub const COINCIDENCE_KM: f64 = 1.0;

/// Great-circle (haversine) distance in km between two (lat, lon) points in degrees.
pub fn great_circle_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((lat2 - lat1) / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Inverse-distance-weighted value at `target` from every point of `grid`,
/// given as (lat, lon, value).
pub fn idw_interpolate(grid: &[(f64, f64, f64)], target: (f64, f64), power: f64) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Structure(
            "inverse-distance interpolation needs at least one grid point".into(),
        ));
    }
    if power.is_nan() || power <= 0.0 {
        return Err(Error::domain("idw power", power, "> 0"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(lat, lon, value) in grid {
        let d = great_circle_km((lat, lon), target);
        if d < COINCIDENCE_KM {
            return Ok(value);
        }
        let w = d.powf(-power);
        num += w * value;
        den += w;
    }
    Ok(num / den)
}

/// Interpolation settings: exponent and how many nearest points to use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Idw {
    pub power: f64,
    pub neighbors: usize,
}

impl Default for Idw {
    fn default() -> Self {
        Self {
            power: 2.0,
            neighbors: 4,
        }
    }
}

impl Idw {
    /// Indices of the `neighbors` grid points nearest `target`, nearest first.
    /// Ties keep grid order.
    pub fn nearest(&self, points: &[(f64, f64)], target: (f64, f64)) -> Vec<usize> {
        let mut idx: Vec<(usize, f64)> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, great_circle_km(p, target)))
            .collect();
        idx.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        idx.truncate(self.neighbors.max(1));
        idx.into_iter().map(|(i, _)| i).collect()
    }

    pub fn interpolate(&self, grid: &[(f64, f64, f64)], target: (f64, f64)) -> Result<f64> {
        let points: Vec<(f64, f64)> = grid.iter().map(|g| (g.0, g.1)).collect();
        let chosen: Vec<_> = self.nearest(&points, target).into_iter().map(|i| grid[i]).collect();
        idw_interpolate(&chosen, target, self.power)
    }
}
