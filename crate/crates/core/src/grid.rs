//! Uniform cell-centred grids on the square `[-L, L]²` and the fields that live on them.
//!
//! Storage is row-major with the x index running fastest: the value of cell
//! `(i, j)` sits at `j * n + i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    half_width: f64,
    n: usize,
    dx: f64,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 cells per axis, got {n}")));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("cells per axis must be even, got {n}")));
        }
        Ok(Self { half_width, n, dx: 2.0 * half_width / n as f64 })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dx
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Cell-centre coordinate along one axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        // (2i + 1 - n) * dx / 2 is exactly antisymmetric under i -> n - 1 - i
        (2.0 * i as f64 + 1.0 - self.n as f64) * 0.5 * self.dx
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(i), self.coord(j)]
    }

    /// Cell containing the point, if it lies inside the box.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let fi = (p[0] + self.half_width) / self.dx;
        let fj = (p[1] + self.half_width) / self.dx;
        if fi < 0.0 || fj < 0.0 || fi >= self.n as f64 || fj >= self.n as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }
}

/// `make_grid(L, n)`.
pub fn make_grid(half_width: f64, n: usize) -> Result<GridSpec> {
    GridSpec::new(half_width, n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn from_vec(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.n() {
            for i in 0..grid.n() {
                values.push(f(grid.center(i, j)));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { what, index }),
            None => Ok(()),
        }
    }

    /// Midpoint-rule integral `Σ v dx²`.
    pub fn integral(&self) -> f64 {
        sum(self.values.iter().copied()) * self.grid.cell_area()
    }

    /// Midpoint-rule integral of `v(x) w(x)`.
    pub fn integral_with(&self, mut w: impl FnMut([f64; 2]) -> f64) -> f64 {
        let g = self.grid;
        let mut acc = Sum::default();
        for j in 0..g.n() {
            for i in 0..g.n() {
                acc.add(self.values[g.index(i, j)] * w(g.center(i, j)));
            }
        }
        acc.value() * g.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: GridSpec,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, x: vec![0.0; grid.len()], y: vec![0.0; grid.len()] }
    }

    pub fn from_components(grid: GridSpec, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != grid.len() || y.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values per component, got {} and {}",
                grid.len(),
                x.len(),
                y.len()
            )));
        }
        Ok(Self { grid, x, y })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn components_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.x, &mut self.y)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let k = self.grid.index(i, j);
        [self.x[k], self.y[k]]
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        match self.x.iter().chain(self.y.iter()).position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { what, index: index % self.grid.len() }),
            None => Ok(()),
        }
    }
}

/// Neumaier-compensated accumulator. Fixed summation order keeps reductions reproducible.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Sum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}
