//! Gaussian probe states, expectation values and the modified uncertainty
//! relation.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::banded::{fmt_f64, BandedOperator};
use crate::error::{ensure_finite, Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::operators::{commutator_c, commutator_matrix, momentum_matrix, position_symbol};
use crate::window::{Geometry, QuantizationParams};

/// `(π w²)^{−1/4} e^{−(x−c)²/(2w²)} e^{ikx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProbe {
    pub center: f64,
    pub width: f64,
    pub boost: f64,
}

impl GaussianProbe {
    pub fn new(center: f64, width: f64, boost: f64) -> Result<Self> {
        ensure_finite("center", center)?;
        ensure_finite("boost", boost)?;
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Domain(format!(
                "probe width must be positive, got {width}"
            )));
        }
        Ok(Self {
            center,
            width,
            boost,
        })
    }

    /// Unit width, no boost.
    pub fn centred(center: f64) -> Result<Self> {
        Self::new(center, 1.0, 0.0)
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        let w = self.width;
        let norm = (PI * w * w).powf(-0.25);
        let u = (x - self.center) / w;
        Complex64::from_polar(norm * (-0.5 * u * u).exp(), self.boost * x)
    }

    /// Samples the probe; the grid must cover `center ± 6·width`.
    pub fn sample(&self, grid: &Grid) -> Result<WaveFunction> {
        grid.require_cover(
            self.center - 6.0 * self.width,
            self.center + 6.0 * self.width,
        )?;
        WaveFunction::from_fn(*grid, |x| self.amplitude(x))
    }
}

/// `⟨ψ|Ô|ψ⟩` with the trapezoid inner product.
pub fn expectation(op: &BandedOperator, state: &WaveFunction) -> Result<Complex64> {
    let image = op.apply_to(state)?;
    state.inner(&image)
}

/// Standard deviations of the modified position and momentum in a state,
/// with the commutator expectation that bounds their product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncertainty {
    pub delta_q: f64,
    pub delta_p: f64,
    /// `(ℏ/2)|⟨[Q̂,P̂]⟩|/ℏ` from the assembled matrices.
    pub bound: f64,
    /// `⟨C_om⟩` from the closed-form multiplication operator.
    pub com: f64,
}

impl Uncertainty {
    pub fn product(&self) -> f64 {
        self.delta_q * self.delta_p
    }

    /// `ΔQ ΔP − bound`.
    pub fn slack(&self) -> f64 {
        self.product() - self.bound
    }
}

pub fn uncertainty_product(
    state: &WaveFunction,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<Uncertainty> {
    let grid = *state.grid();
    let psi = state.values();

    let weighted = |f: &dyn Fn(usize) -> f64| -> f64 {
        grid.trapezoid((0..grid.len()).map(|i| f(i) * psi[i].norm_sqr()))
    };
    let qs: Vec<f64> = grid
        .points()
        .map(|x| position_symbol(x, geom, params))
        .collect();
    let mean_q = weighted(&|i| qs[i]);
    let var_q = weighted(&|i| (qs[i] - mean_q).powi(2));

    let p = momentum_matrix(&grid, geom, params)?;
    let p_psi = p.apply_to(state)?;
    let mean_p = state.inner(&p_psi)?.re;
    // ⟨P²⟩ = ‖Pψ‖² keeps the variance non-negative
    let var_p = (p_psi.inner(&p_psi)?.re - mean_p * mean_p).max(0.0);

    let c = commutator_matrix(&grid, geom, params)?;
    let com_matrix = expectation(&c, state)?;
    let com = weighted(&|i| commutator_c(grid.x(i), geom, params));

    Ok(Uncertainty {
        delta_q: var_q.max(0.0).sqrt(),
        delta_p: var_p.sqrt(),
        bound: 0.5 * params.hbar * com_matrix.norm(),
        com,
    })
}

/// One point of a `⟨C_om⟩` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub center: f64,
    pub value: f64,
}

/// `⟨C_om⟩` for unit-boost-free probes of the given width centred at each
/// of `centers`, in input order.
pub fn com_scan(
    centers: &[f64],
    width: f64,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<Vec<ScanPoint>> {
    if centers.is_empty() {
        return Ok(Vec::new());
    }
    for &c in centers {
        ensure_finite("probe center", c)?;
    }
    GaussianProbe::new(centers[0], width, 0.0)?;
    let lo = centers.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = centers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grid = Grid::covering(
        geom,
        params,
        lo,
        hi,
        8.0 * width,
        params.ell.min(width) / 20.0,
    )?;
    let c_om: Vec<f64> = grid
        .points()
        .map(|x| commutator_c(x, geom, params))
        .collect();

    centers
        .par_iter()
        .map(|&center| {
            let probe = GaussianProbe::new(center, width, 0.0)?;
            let value = grid.trapezoid(
                grid.points()
                    .zip(&c_om)
                    .map(|(x, c)| c * probe.amplitude(x).norm_sqr()),
            );
            Ok(ScanPoint { center, value })
        })
        .collect()
}

/// Writes a scan as `c_cen [q0],value [1]` rows.
pub fn write_scan_csv<W: Write>(scan: &[ScanPoint], out: &mut W) -> io::Result<()> {
    writeln!(out, "c_cen [q0],value [1]")?;
    for pt in scan {
        writeln!(out, "{},{}", fmt_f64(pt.center), fmt_f64(pt.value))?;
    }
    Ok(())
}
