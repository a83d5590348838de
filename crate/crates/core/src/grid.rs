//! Deterministic polar sample grids inside the unit disk.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sample points, ordered by radius and then by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<Complex64>,
}

impl Grid {
    /// Rings of `angles` equally spaced points at each radius, plus any
    /// explicit extra points. Everything must lie strictly inside the disk.
    pub fn polar(radii: &[f64], angles: usize, extra: &[Complex64]) -> Result<Self> {
        let mut points = Vec::with_capacity(radii.len() * angles + extra.len());
        for &r in radii {
            for k in 0..angles {
                points.push(Complex64::from_polar(r, TAU * k as f64 / angles as f64));
            }
        }
        points.extend_from_slice(extra);
        Self::from_points(points)
    }

    pub fn from_points(mut points: Vec<Complex64>) -> Result<Self> {
        if let Some(&z) = points.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(Error::PointOutsideDisk { z });
        }
        points.sort_by(|a, b| {
            let key = |z: &Complex64| (z.norm(), z.arg().rem_euclid(TAU));
            key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
        });
        points.dedup();
        Ok(Self { points })
    }

    /// Radii 0.1, 0.2, …, 0.8 with 16 angles each.
    pub fn standard() -> Self {
        Self::polar(&radii_up_to(0.1, 0.8), 16, &[]).expect("standard grid lies in the disk")
    }

    /// Radii 0.05, 0.10, …, 0.80 with 32 angles each.
    pub fn fine() -> Self {
        Self::polar(&radii_up_to(0.05, 0.8), 32, &[]).expect("fine grid lies in the disk")
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.points.iter().copied()
    }

    /// Keeps only points with `|z| <= max_radius`.
    pub fn truncated(&self, max_radius: f64) -> Self {
        Self { points: self.iter().filter(|z| z.norm() <= max_radius + 1e-12).collect() }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::standard()
    }
}

/// `step, 2·step, …` up to and including `max` (within rounding).
pub fn radii_up_to(step: f64, max: f64) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    (1..=n).map(|k| k as f64 * step).collect()
}

/// Largest value of `f` over the grid, with the point where it occurs.
pub(crate) fn max_over<F>(grid: &Grid, mut f: F) -> Result<(f64, Complex64)>
where
    F: FnMut(Complex64) -> Result<f64>,
{
    let mut worst = (0.0, grid.points.first().copied().unwrap_or_default());
    for z in grid.iter() {
        let value = f(z)?;
        if value > worst.0 || value.is_nan() {
            worst = (value, z);
        }
    }
    Ok(worst)
}
