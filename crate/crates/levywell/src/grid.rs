//! Uniform one-dimensional sample lattices and complex-valued states on them.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform 1-D lattice.
///
/// Bounded grids include both endpoints, so `h = (x_max - x_min)/(n - 1)`
/// and a well eigenfunction can vanish exactly at the walls. Periodic grids
/// sample `[x_min, x_max)` with `h = (x_max - x_min)/n`; `x_max` is
/// identified with `x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    periodic: bool,
}

impl Grid {
    pub fn bounded(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::checked(x_min, x_max, n_points, false)
    }

    pub fn periodic(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::checked(x_min, x_max, n_points, true)
    }

    fn checked(x_min: f64, x_max: f64, n_points: usize, periodic: bool) -> Result<Self> {
        if !(x_min < x_max) {
            return Err(Error::Domain(format!(
                "grid needs x_min < x_max (got [{x_min}, {x_max}])"
            )));
        }
        if n_points < 8 {
            return Err(Error::Domain(format!(
                "grid needs at least 8 points (got {n_points})"
            )));
        }
        Ok(Self { x_min, x_max, n_points, periodic })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn spacing(&self) -> f64 {
        let w = self.x_max - self.x_min;
        if self.periodic {
            w / self.n_points as f64
        } else {
            w / (self.n_points - 1) as f64
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + self.spacing() * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Quadrature weight of node `i`: trapezoid on bounded grids,
    /// rectangle on periodic ones.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if !self.periodic && (i == 0 || i == self.n_points - 1) {
            0.5 * h
        } else {
            h
        }
    }

    pub(crate) fn require_power_of_two(&self) -> Result<()> {
        if !self.n_points.is_power_of_two() {
            return Err(Error::Usage(format!(
                "spectral operators need a power-of-two point count (got {})",
                self.n_points
            )));
        }
        Ok(())
    }

    pub(crate) fn require_periodic(&self) -> Result<()> {
        if !self.periodic {
            return Err(Error::Usage("operation requires a periodic grid".into()));
        }
        Ok(())
    }
}

/// Complex samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = grid.points().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn grid(&self) -> &Grid {
        self.grid_ref()
    }

    fn grid_ref(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Quadrature norm `sqrt(<psi, psi>)`.
    pub fn norm(&self) -> f64 {
        inner_product(self, self)
            .expect("same grid")
            .re
            .max(0.0)
            .sqrt()
    }
}

/// Quadrature approximation of `integral conj(a) * b dx`.
///
/// Trapezoid rule on bounded grids, rectangle rule on periodic grids.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::Shape("inner_product operands on different grids".into()));
    }
    let g = &a.grid;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..g.len() {
        acc += a.values[i].conj() * b.values[i] * g.weight(i);
    }
    Ok(acc)
}
