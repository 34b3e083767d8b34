use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Banded matrix on a grid: entry `(i, i + k)` for `|k| ≤ bandwidth`.
/// Entries that would fall outside the grid are kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    grid: Grid,
    bandwidth: usize,
    // bands[bandwidth + k][i] holds entry (i, i + k)
    bands: Vec<Vec<Complex64>>,
    hermitian: bool,
}

impl BandedOperator {
    pub fn zeros(grid: Grid, bandwidth: usize) -> Self {
        Self {
            grid,
            bandwidth,
            bands: vec![vec![ZERO; grid.len()]; 2 * bandwidth + 1],
            hermitian: false,
        }
    }

    pub fn identity(grid: Grid) -> Self {
        Self::multiplication(grid, |_| 1.0)
    }

    /// Multiplication by a real function of `x`.
    pub fn multiplication(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let mut op = Self::zeros(grid, 0);
        op.bands[0] = grid.points().map(|x| Complex64::new(f(x), 0.0)).collect();
        op.hermitian = true;
        op
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub(crate) fn mark_hermitian(mut self) -> Self {
        self.hermitian = true;
        self
    }

    fn in_range(&self, i: usize, k: isize) -> bool {
        let j = i as isize + k;
        j >= 0 && (j as usize) < self.grid.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = j as isize - i as isize;
        if k.unsigned_abs() > self.bandwidth {
            return ZERO;
        }
        self.bands[(self.bandwidth as isize + k) as usize][i]
    }

    /// Sets entry `(i, j)`; panics when it lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = j as isize - i as isize;
        assert!(
            k.unsigned_abs() <= self.bandwidth,
            "entry ({i}, {j}) outside band"
        );
        self.bands[(self.bandwidth as isize + k) as usize][i] = v;
        self.hermitian = false;
    }

    /// Main diagonal.
    pub fn diagonal(&self) -> &[Complex64] {
        &self.bands[self.bandwidth]
    }

    /// Diagonal at offset `k`, entry `i` being `(i, i + k)`.
    pub fn band(&self, k: isize) -> Option<&[Complex64]> {
        (k.unsigned_abs() <= self.bandwidth)
            .then(|| &self.bands[(self.bandwidth as isize + k) as usize][..])
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.grid.len();
        if v.len() != n {
            return Err(Error::GridMismatch);
        }
        let bw = self.bandwidth as isize;
        Ok((0..n)
            .map(|i| {
                let mut acc = ZERO;
                for k in -bw..=bw {
                    if self.in_range(i, k) {
                        acc += self.bands[(bw + k) as usize][i] * v[(i as isize + k) as usize];
                    }
                }
                acc
            })
            .collect())
    }

    pub fn apply_to(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        if *psi.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        WaveFunction::new(self.grid, self.apply(psi.values())?)
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let bw = self.bandwidth + other.bandwidth;
        let mut out = Self::zeros(self.grid, bw);
        let (b1, b2) = (self.bandwidth as isize, other.bandwidth as isize);
        for i in 0..self.grid.len() {
            for k1 in -b1..=b1 {
                if !self.in_range(i, k1) {
                    continue;
                }
                let mid = (i as isize + k1) as usize;
                let left = self.bands[(b1 + k1) as usize][i];
                for k2 in -b2..=b2 {
                    if !other.in_range(mid, k2) {
                        continue;
                    }
                    let right = other.bands[(b2 + k2) as usize][mid];
                    out.bands[(bw as isize + k1 + k2) as usize][i] += left * right;
                }
            }
        }
        Ok(out)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.same_grid(other)?;
        let bw = self.bandwidth.max(other.bandwidth);
        let mut out = Self::zeros(self.grid, bw);
        for (src, s) in [(self, 1.0), (other, sign)] {
            let off = bw - src.bandwidth;
            for (d, band) in src.bands.iter().enumerate() {
                for (o, v) in out.bands[d + off].iter_mut().zip(band) {
                    *o += v * s;
                }
            }
        }
        out.hermitian = self.hermitian && other.hermitian;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.bands.iter_mut().flatten().for_each(|v| *v *= s);
        out.hermitian = self.hermitian && s.im == 0.0;
        out
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Largest `|A_ij − conj(A_ji)|`, relative to the largest entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.grid.len();
        let bw = self.bandwidth as isize;
        let mut scale: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for k in -bw..=bw {
                if !self.in_range(i, k) {
                    continue;
                }
                let j = (i as isize + k) as usize;
                let a = self.get(i, j);
                scale = scale.max(a.norm());
                defect = defect.max((a - self.get(j, i).conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Writes one row per grid node: `x` followed by the real and imaginary
    /// parts of every band, lowest offset first.
    pub fn write_csv<W: Write>(&self, out: &mut W, unit: &str) -> io::Result<()> {
        let bw = self.bandwidth as isize;
        let mut header = vec!["x [q0]".to_string()];
        for k in -bw..=bw {
            header.push(format!("re(d{k:+}) [{unit}]"));
            header.push(format!("im(d{k:+}) [{unit}]"));
        }
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.grid.len() {
            let mut row = vec![fmt_f64(self.grid.x(i))];
            for k in -bw..=bw {
                let v = self.bands[(bw + k) as usize][i];
                row.push(fmt_f64(v.re));
                row.push(fmt_f64(v.im));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Fixed 17-significant-digit rendering used by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
