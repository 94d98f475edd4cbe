use crate::{Error, Result};

/// Uniform tensor partition of the unit square into `N x N` cells.
///
/// Cells are addressed by zero-based `(i, j)`: `i` runs along `x`, `j` along
/// the velocity `v`, so cell `(i, j)` is `(x_i, x_{i+1}) x (v_j, v_{j+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh2D {
    n: usize,
    h: f64,
}

impl Mesh2D {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidResolution(n));
        }
        Ok(Self { n, h: 1.0 / n as f64 })
    }

    /// Cells per direction.
    pub fn cells_per_dir(&self) -> usize {
        self.n
    }

    pub fn cell_count(&self) -> usize {
        self.n * self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Grid line `i` (same in `x` and `v`), `0 <= i <= N`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        i as f64 / self.n as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(|i| self.node(i))
    }

    /// Bounds `((x_lo, x_hi), (v_lo, v_hi))` of cell `(i, j)`.
    pub fn cell_bounds(&self, i: usize, j: usize) -> ((f64, f64), (f64, f64)) {
        ((self.node(i), self.node(i + 1)), (self.node(j), self.node(j + 1)))
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.h, (j as f64 + 0.5) * self.h)
    }

    /// Flat cell index; `v` varies fastest.
    #[inline]
    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Whether `c` coincides with a grid line to within roundoff.
    pub fn is_grid_line(&self, c: f64) -> bool {
        let scaled = c * self.n as f64;
        libm::fabs(scaled - libm::round(scaled)) <= 1e-10 * (1.0 + libm::fabs(scaled))
    }

    /// Cell containing coordinate `c` in one direction (upper face belongs to the last cell).
    pub fn locate(&self, c: f64) -> usize {
        let idx = libm::floor(c * self.n as f64);
        if idx < 0.0 {
            0
        } else {
            (idx as usize).min(self.n - 1)
        }
    }
}

/// Same as [`Mesh2D::new`].
pub fn build_mesh(n: usize) -> Result<Mesh2D> {
    Mesh2D::new(n)
}
