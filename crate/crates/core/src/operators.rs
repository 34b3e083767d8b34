//! Discretized E-modified operators and the closed-form functions that
//! describe them: position symbol, spectral density, induced mass and
//! potentials, and the commutator function.
//!
//! Matrices live on a uniform grid with second-order centred differences and
//! zero extension past the ends. Every operator flagged Hermitian is exactly
//! Hermitian in floating point, not just to truncation order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::banded::BandedOperator;
use crate::error::{ensure_finite, Error, Result};
use crate::grid::Grid;
use crate::quadrature::{integrate, Tolerance};
use crate::window::{Geometry, QuantizationParams, Window};

/// Symmetric ordering of the kinetic term in the modified Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingChoice {
    /// `−(ℏ²/4){1/M, ∂²} + V⁺`
    AnticommutatorHalf,
    /// `−(ℏ²/2) ∂ (1/M) ∂ + V⁻`
    PSandwich,
}

impl OrderingChoice {
    pub const ALL: [OrderingChoice; 2] = [
        OrderingChoice::AnticommutatorHalf,
        OrderingChoice::PSandwich,
    ];

    /// The potential that completes this ordering.
    pub fn potential_sign(&self) -> PotentialSign {
        match self {
            OrderingChoice::AnticommutatorHalf => PotentialSign::Plus,
            OrderingChoice::PSandwich => PotentialSign::Minus,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OrderingChoice::AnticommutatorHalf => "anticommutator",
            OrderingChoice::PSandwich => "sandwich",
        }
    }
}

impl fmt::Display for OrderingChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anticommutator" | "anticommutator-half" => Ok(OrderingChoice::AnticommutatorHalf),
            "sandwich" | "p-sandwich" => Ok(OrderingChoice::PSandwich),
            other => Err(Error::Domain(format!("unknown ordering '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialSign {
    Plus,
    Minus,
}

impl PotentialSign {
    fn factor(self) -> f64 {
        match self {
            PotentialSign::Plus => 1.0,
            PotentialSign::Minus => -1.0,
        }
    }
}

/// `Q(x) = x B_ℓ + (ℓ²/2) B_ℓ'`, the multiplier of the modified position operator.
pub fn position_symbol(x: f64, geom: Geometry, params: &QuantizationParams) -> f64 {
    let w = Window::operator(geom, params);
    x * w.value(x) + 0.5 * params.ell * params.ell * w.d1(x)
}

/// `dQ/dx = B_ℓ + x B_ℓ' + (ℓ²/2) B_ℓ''`.
pub fn spectral_density(x: f64, geom: Geometry, params: &QuantizationParams) -> f64 {
    let w = Window::operator(geom, params);
    w.value(x) + x * w.d1(x) + 0.5 * params.ell * params.ell * w.d2(x)
}

/// Spectral weight `∫_c^d dQ` of the modified position operator.
pub fn spectral_weight(c: f64, d: f64, geom: Geometry, params: &QuantizationParams) -> Result<f64> {
    ensure_finite("c", c)?;
    ensure_finite("d", d)?;
    if c > d {
        return Err(Error::Domain(format!(
            "spectral interval needs c ≤ d, got [{c}, {d}]"
        )));
    }
    let ell = params.ell;
    let mut cuts = Vec::new();
    for e in geom.endpoints() {
        cuts.extend([e - 4.0 * ell, e, e + 4.0 * ell]);
    }
    let est = integrate(
        |x| spectral_density(x, geom, params),
        c,
        d,
        &cuts,
        Tolerance {
            abs: 1e-9,
            rel: 0.0,
            max_intervals: 4000,
        },
    )?;
    Ok(est.value)
}

/// Inverse of the induced mass, `B_ℓ(x)/m`.
pub fn mass_inverse(x: f64, geom: Geometry, params: &QuantizationParams) -> f64 {
    Window::operator(geom, params).value(x) / params.mass
}

/// Induced mass `M_ℓ(x) = m/B_ℓ(x)`; `+∞` where `B_ℓ` underflows.
pub fn mass(x: f64, geom: Geometry, params: &QuantizationParams) -> f64 {
    let inv = mass_inverse(x, geom, params);
    if inv > 0.0 {
        1.0 / inv
    } else {
        f64::INFINITY
    }
}

/// `V^±(x) = (ℏ²/(4ℓ²m)) (B_ℓ ∓ G(x))` with
/// `G = (1/√π)(u_a e^{−u_a²} − u_b e^{−u_b²})`, `u = (x − endpoint)/ℓ`.
///
/// Equivalent to `(ℏ²/(4ℓ²M))(1 ± ℓ²B''/(2B))`, but finite everywhere.
pub fn potential(sign: PotentialSign, x: f64, geom: Geometry, params: &QuantizationParams) -> f64 {
    let w = Window::operator(geom, params);
    let (ell, hbar, m) = (params.ell, params.hbar, params.mass);
    hbar * hbar / (4.0 * ell * ell * m) * (w.value(x) - sign.factor() * w.edge_moment(x))
}

/// `C_om(x) = B_ℓ (B_ℓ + x B_ℓ' + (ℓ²/2) B_ℓ'')`, where
/// `[Â_q, Â_p] = iℏ C_om(q̂)`.
pub fn commutator_c(x: f64, geom: Geometry, params: &QuantizationParams) -> f64 {
    let w = Window::operator(geom, params);
    let b = w.value(x);
    b * b + x * b * w.d1(x) + 0.5 * params.ell * params.ell * b * w.d2(x)
}

/// Poisson bracket `{q̌_χ, p̌_χ}` of the position and momentum portraits.
pub fn poisson_bracket_symbols(q: f64, geom: Geometry, params: &QuantizationParams) -> f64 {
    let w = Window::portrait(geom, params);
    let b = w.value(q);
    b * (b + q * w.d1(q) + params.ell * params.ell * w.d2(q))
}

fn resolved(grid: &Grid, params: &QuantizationParams) -> Result<()> {
    grid.require_spacing(params.ell / 10.0)
}

/// Multiplication by `B_ℓ`.
pub fn window_matrix(
    grid: &Grid,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<BandedOperator> {
    resolved(grid, params)?;
    let w = Window::operator(geom, params);
    Ok(BandedOperator::multiplication(*grid, |x| w.value(x)))
}

/// Multiplication by `Q(x)`.
pub fn position_matrix(
    grid: &Grid,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<BandedOperator> {
    resolved(grid, params)?;
    Ok(BandedOperator::multiplication(*grid, |x| {
        position_symbol(x, geom, params)
    }))
}

/// `−iℏ · ½(B D + D B)` with `D` the centred difference.
pub fn momentum_matrix(
    grid: &Grid,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<BandedOperator> {
    resolved(grid, params)?;
    let w = Window::operator(geom, params);
    let b: Vec<f64> = grid.points().map(|x| w.value(x)).collect();
    let n = grid.len();
    let scale = params.hbar / (4.0 * grid.spacing());
    let mut op = BandedOperator::zeros(*grid, 1);
    for i in 0..n - 1 {
        // ½(BD + DB)_{i,i+1} = (B_i + B_{i+1})/(4h), antisymmetric
        let v = (b[i] + b[i + 1]) * scale;
        op.set(i, i + 1, Complex64::new(0.0, -v));
        op.set(i + 1, i, Complex64::new(0.0, v));
    }
    Ok(op.mark_hermitian())
}

/// The modified free Hamiltonian in either ordering.
pub fn hamiltonian_matrix(
    ordering: OrderingChoice,
    grid: &Grid,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<BandedOperator> {
    resolved(grid, params)?;
    let w = Window::operator(geom, params);
    let (hbar, m) = (params.hbar, params.mass);
    let h = grid.spacing();
    let n = grid.len();
    let sign = ordering.potential_sign();
    let mut op = BandedOperator::zeros(*grid, 1);

    match ordering {
        OrderingChoice::AnticommutatorHalf => {
            // −(ℏ²/4)(K L + L K), L = tridiag(1, −2, 1)/h², K = diag(B/m)
            let k: Vec<f64> = grid.points().map(|x| w.value(x) / m).collect();
            let c = -hbar * hbar / (4.0 * h * h);
            for i in 0..n {
                let diag = c * (-4.0 * k[i]) + potential(sign, grid.x(i), geom, params);
                op.set(i, i, Complex64::new(diag, 0.0));
                if i + 1 < n {
                    let off = c * (k[i] + k[i + 1]);
                    op.set(i, i + 1, Complex64::new(off, 0.0));
                    op.set(i + 1, i, Complex64::new(off, 0.0));
                }
            }
        }
        OrderingChoice::PSandwich => {
            // −(ℏ²/2h²)[κ₊(φ_{i+1} − φ_i) − κ₋(φ_i − φ_{i−1})], κ at midpoints
            let c = hbar * hbar / (2.0 * h * h);
            let kappa = |x: f64| w.value(x) / m;
            for i in 0..n {
                let x = grid.x(i);
                let (left, right) = (kappa(x - 0.5 * h), kappa(x + 0.5 * h));
                let diag = c * (left + right) + potential(sign, x, geom, params);
                op.set(i, i, Complex64::new(diag, 0.0));
                if i + 1 < n {
                    let off = -c * right;
                    op.set(i, i + 1, Complex64::new(off, 0.0));
                    op.set(i + 1, i, Complex64::new(off, 0.0));
                }
            }
        }
    }
    Ok(op.mark_hermitian())
}

/// `[Â_q, Â_p]/(iℏ)` assembled from the position and momentum matrices.
pub fn commutator_matrix(
    grid: &Grid,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<BandedOperator> {
    let q = position_matrix(grid, geom, params)?;
    let p = momentum_matrix(grid, geom, params)?;
    let comm = q.commutator(&p)?;
    Ok(comm.scale(Complex64::new(0.0, -1.0 / params.hbar)))
}

/// The functional that `∫ C_om φ dx` approaches as `ℓ → 0`:
/// `∫_a^b φ + ½(a φ(a) − b φ(b))`.
pub fn weak_limit_target(test_fn: &dyn Fn(f64) -> f64, geom: Geometry) -> Result<f64> {
    let Geometry::Bounded { a, b } = geom else {
        return Err(Error::Domain(
            "the weak limit is defined for a bounded interval".into(),
        ));
    };
    let bulk = integrate(test_fn, a, b, &[], Tolerance::absolute(1e-12))?.value;
    Ok(bulk + 0.5 * (a * test_fn(a) - b * test_fn(b)))
}

/// Errors `|∫ C_om(x; ℓₙ) φ(x) dx − target|` along a sequence of `ℓ`.
pub fn weak_limit_c(
    test_fn: &dyn Fn(f64) -> f64,
    ells: &[f64],
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<Vec<f64>> {
    let target = weak_limit_target(test_fn, geom)?;
    let (a, b) = (geom.a(), geom.b());
    ells.iter()
        .map(|&ell| {
            let p = QuantizationParams { ell, ..*params };
            let reach = 12.0 * ell;
            let cuts = [
                a - 3.0 * ell,
                a,
                a + 3.0 * ell,
                b - 3.0 * ell,
                b,
                b + 3.0 * ell,
            ];
            let est = integrate(
                |x| commutator_c(x, geom, &p) * test_fn(x),
                a - reach,
                b + reach,
                &cuts,
                Tolerance {
                    abs: 1e-11,
                    rel: 0.0,
                    max_intervals: 4000,
                },
            )?;
            Ok((est.value - target).abs())
        })
        .collect()
}
