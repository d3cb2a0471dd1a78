//! Boundary-clustered polar grids on the clamped disk.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Distance from the unit circle below which no radius is ever evaluated.
pub const CLAMP_GAP: f64 = 1e-12;
/// Largest radius ever evaluated, `1 - 1e-12`.
pub const RADIUS_CLAMP: f64 = 1.0 - CLAMP_GAP;

/// Clamps a radius into `[0, RADIUS_CLAMP]`.
pub fn clamp_radius(r: f64) -> f64 {
    r.abs().min(RADIUS_CLAMP)
}

/// `count` radii from 0 to the clamp; gaps `1 - r` shrink geometrically so
/// node density grows toward the boundary.
pub fn clustered_radii(count: usize) -> Vec<f64> {
    assert!(count >= 2, "need at least two radial nodes");
    let span = (1.0 / CLAMP_GAP).log2();
    let last = (count - 1) as f64;
    (0..count)
        .map(|k| {
            if k == 0 {
                0.0
            } else if k == count - 1 {
                RADIUS_CLAMP
            } else {
                1.0 - (-(k as f64) * span / last).exp2()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub radial: usize,
    pub angular: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radial: 512,
            angular: 256,
        }
    }
}

impl GridSpec {
    pub fn new(radial: usize, angular: usize) -> Result<GridSpec, Error> {
        if radial < 16 || angular < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be at least 16, got {radial}x{angular}"
            )));
        }
        Ok(GridSpec { radial, angular })
    }

    pub fn doubled(self) -> GridSpec {
        GridSpec {
            radial: 2 * self.radial,
            angular: 2 * self.angular,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        clustered_radii(self.radial)
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.angular)
            .map(|j| TAU * j as f64 / self.angular as f64)
            .collect()
    }

    pub fn angle_step(&self) -> f64 {
        TAU / self.angular as f64
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.radial, self.angular)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidArgument(format!("grid must look like 512x256, got `{s}`"));
        let (r, a) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let r: usize = r.trim().parse().map_err(|_| bad())?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        GridSpec::new(r, a)
    }
}
