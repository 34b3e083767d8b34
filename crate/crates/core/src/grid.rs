use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::window::{Geometry, QuantizationParams};

/// Uniform grid on `[x_min, x_max]` with `n` points.
/// Upper bound on the number of grid nodes.
pub const MAX_POINTS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Domain(format!(
                "invalid grid range [{x_min}, {x_max}]"
            )));
        }
        if n < 3 {
            return Err(Error::Domain(format!(
                "grid needs at least 3 points, got {n}"
            )));
        }
        if n > MAX_POINTS {
            return Err(Error::Domain(format!(
                "grid of {n} points exceeds {MAX_POINTS}"
            )));
        }
        Ok(Self {
            x_min,
            n,
            h: (x_max - x_min) / (n - 1) as f64,
        })
    }

    /// Grid starting at `x_min` with spacing exactly `h`, extended just past
    /// `x_max` if needed. Grids built from the same `x_min` nest under halving
    /// of `h`.
    pub fn with_spacing(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Domain(format!(
                "invalid grid range [{x_min}, {x_max}]"
            )));
        }
        let steps = ((x_max - x_min) / h - 1e-9).ceil().max(2.0);
        if steps >= MAX_POINTS as f64 {
            return Err(Error::Domain(format!(
                "grid of {steps} intervals exceeds {MAX_POINTS} points"
            )));
        }
        let steps = steps as usize;
        Ok(Self {
            x_min,
            n: steps + 1,
            h,
        })
    }

    /// Grid over `[a − 8ℓ − pad, b + 8ℓ + pad]`, widened further to contain
    /// `[lo, hi]`. On the half-line `b` is replaced by `hi`.
    pub fn covering(
        geom: Geometry,
        params: &QuantizationParams,
        lo: f64,
        hi: f64,
        pad: f64,
        h: f64,
    ) -> Result<Self> {
        let margin = 8.0 * params.ell + pad;
        let left = (geom.a() - margin).min(lo - pad);
        let right_edge = if geom.is_bounded() {
            geom.b()
        } else {
            hi.max(geom.a())
        };
        let right = (right_edge + margin).max(hi + pad);
        Self::with_spacing(left, right, h)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Index range `[lo, hi]` of nodes inside `[x_lo, x_hi]`, clipped to the grid.
    pub fn index_span(&self, x_lo: f64, x_hi: f64) -> Option<(usize, usize)> {
        let lo = ((x_lo - self.x_min) / self.h).ceil().max(0.0);
        let hi = ((x_hi - self.x_min) / self.h)
            .floor()
            .min((self.n - 1) as f64);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.x_min <= lo && self.x_max() >= hi
    }

    pub(crate) fn require_cover(&self, lo: f64, hi: f64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::Coverage {
                x_min: self.x_min,
                x_max: self.x_max(),
                need_min: lo,
                need_max: hi,
            })
        }
    }

    pub(crate) fn require_spacing(&self, limit: f64) -> Result<()> {
        // small slack so that h = ℓ/10 built from floating arithmetic passes
        if self.h <= limit * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::Resolution { h: self.h, limit })
        }
    }

    /// Trapezoid rule for samples on this grid.
    pub fn trapezoid<I: IntoIterator<Item = f64>>(&self, values: I) -> f64 {
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum()
    }
}

/// Complex samples of a wave function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Domain("wave function samples must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `⟨self|other⟩` by the trapezoid rule.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (u, v))| u.conj() * v * self.grid.weight(i))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.grid
            .trapezoid(self.values.iter().map(|v| v.norm_sqr()))
            .sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Domain("cannot normalize the zero state".into()));
        }
        self.values.iter_mut().for_each(|v| *v /= n);
        Ok(self)
    }

    /// `x` weighted by `|ψ|²`, divided by the norm squared.
    pub fn centroid(&self) -> f64 {
        let mass = self
            .grid
            .trapezoid(self.values.iter().map(|v| v.norm_sqr()));
        let first = self.grid.trapezoid(
            self.values
                .iter()
                .enumerate()
                .map(|(i, v)| self.grid.x(i) * v.norm_sqr()),
        );
        first / mass
    }

    /// Eighth-order centred first derivative, with zero extension past the
    /// grid ends.
    pub fn derivative(&self) -> Vec<Complex64> {
        const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        let n = self.values.len();
        let at = |j: isize| -> Complex64 {
            if j < 0 || j as usize >= n {
                Complex64::new(0.0, 0.0)
            } else {
                self.values[j as usize]
            }
        };
        (0..n as isize)
            .map(|i| {
                C.iter()
                    .enumerate()
                    .map(|(k, c)| (at(i + k as isize + 1) - at(i - k as isize - 1)) * *c)
                    .sum::<Complex64>()
                    / self.grid.h
            })
            .collect()
    }
}
