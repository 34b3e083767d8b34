//! Coherent states, the integral-quantization oracle and semi-classical
//! portraits.
//!
//! The oracle evaluates `⟨φ|Â_f|ψ⟩ = ∬ dq dp/(2πℏ) χ(q) f(q,p) ⟨φ|q,p⟩⟨q,p|ψ⟩`
//! directly. For `f = u(q) pᵏ` the `p`-integral is a moment of a plane wave
//! and yields `∫dq u(q) ⟨φ| g_q P̂ᵏ g_q |ψ⟩`, where `g_q` is the real Gaussian
//! envelope of the coherent state centred at `q`. What is left is a 1-D
//! adaptive quadrature in `q` of grid integrals in `x`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::quadrature::{integrate, Tolerance};
use crate::window::{Geometry, QuantizationParams, Window};

/// A phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q: f64,
    pub p: f64,
}

impl PhaseState {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }
}

/// The closed catalogue of classical observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableKind {
    Unit,
    Position,
    Momentum,
    /// `p²/(2m)`
    Kinetic,
}

impl ObservableKind {
    pub const ALL: [ObservableKind; 4] = [
        ObservableKind::Unit,
        ObservableKind::Position,
        ObservableKind::Momentum,
        ObservableKind::Kinetic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ObservableKind::Unit => "unit",
            ObservableKind::Position => "position",
            ObservableKind::Momentum => "momentum",
            ObservableKind::Kinetic => "kinetic",
        }
    }

    fn classical(&self, q: f64, p: f64, mass: f64) -> f64 {
        match self {
            ObservableKind::Unit => 1.0,
            ObservableKind::Position => q,
            ObservableKind::Momentum => p,
            ObservableKind::Kinetic => p * p / (2.0 * mass),
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" | "window" => Ok(ObservableKind::Unit),
            "position" | "q" => Ok(ObservableKind::Position),
            "momentum" | "p" => Ok(ObservableKind::Momentum),
            "kinetic" | "hamiltonian" => Ok(ObservableKind::Kinetic),
            other => Err(Error::Domain(format!("unsupported observable '{other}'"))),
        }
    }
}

/// An observable `f(q,p)`, optionally truncated by the geometry indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    pub restricted: bool,
}

impl ObservableSpec {
    pub fn restricted(kind: ObservableKind) -> Self {
        Self {
            kind,
            restricted: true,
        }
    }

    pub fn unrestricted(kind: ObservableKind) -> Self {
        Self {
            kind,
            restricted: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortraitMethod {
    ClosedForm,
    Quadrature,
}

fn check_sampling(grid: &Grid, params: &QuantizationParams, p_max: f64) -> Result<()> {
    grid.require_spacing(params.ell / 10.0)?;
    if p_max > 0.0 {
        grid.require_spacing(params.hbar / p_max * (2.0 * PI / 20.0))?;
    }
    Ok(())
}

/// `⟨x|q,p⟩` sampled on `grid`.
pub fn cs_sample(
    state: PhaseState,
    grid: &Grid,
    params: &QuantizationParams,
) -> Result<WaveFunction> {
    if !state.is_finite() {
        return Err(Error::Domain("phase-space point must be finite".into()));
    }
    let ell = params.ell;
    grid.require_cover(state.q - 6.0 * ell, state.q + 6.0 * ell)?;
    check_sampling(grid, params, state.p.abs())?;
    let norm = (PI * ell * ell).powf(-0.25);
    let (q, p, hbar) = (state.q, state.p, params.hbar);
    WaveFunction::from_fn(*grid, |x| {
        let phase = p * (x - 0.5 * q) / hbar;
        Complex64::from_polar(norm * (-(x - q).powi(2) / (2.0 * ell * ell)).exp(), phase)
    })
}

/// `⟨bra|ket⟩` between two coherent states.
pub fn cs_overlap(bra: PhaseState, ket: PhaseState, params: &QuantizationParams) -> Complex64 {
    let (ell, hbar) = (params.ell, params.hbar);
    let dq = ket.q - bra.q;
    let dp = ket.p - bra.p;
    let modulus = (-dq * dq / (4.0 * ell * ell) - ell * ell * dp * dp / (4.0 * hbar * hbar)).exp();
    Complex64::from_polar(modulus, (ket.p * bra.q - ket.q * bra.p) / (2.0 * hbar))
}

/// `|⟨q′,p′|q,p⟩|²`, the phase-space smoothing weight.
pub fn overlap_weight(bra: PhaseState, ket: PhaseState, params: &QuantizationParams) -> f64 {
    let (ell, hbar) = (params.ell, params.hbar);
    let dq = ket.q - bra.q;
    let dp = ket.p - bra.p;
    (-dq * dq / (2.0 * ell * ell) - ell * ell * dp * dp / (2.0 * hbar * hbar)).exp()
}

// support of a sampled state: nodes whose amplitude exceeds 1e-13 of the peak
fn support(psi: &WaveFunction) -> Option<(f64, f64)> {
    let peak = psi.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let cut = 1e-13 * peak;
    let first = psi.values().iter().position(|v| v.norm() > cut)?;
    let last = psi.values().iter().rposition(|v| v.norm() > cut)?;
    Some((psi.grid().x(first), psi.grid().x(last)))
}

/// Matrix element `⟨bra|Â_f|ket⟩` of the integral quantization of `f`.
pub fn quantize_element(
    f: ObservableSpec,
    bra: &WaveFunction,
    ket: &WaveFunction,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<Complex64> {
    let grid = *bra.grid();
    if grid != *ket.grid() {
        return Err(Error::GridMismatch);
    }
    grid.require_spacing(params.ell / 10.0)?;

    let ell = params.ell;
    let reach = 10.0 * ell;
    let (Some((b_lo, b_hi)), Some((k_lo, k_hi))) = (support(bra), support(ket)) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    // g_q(x) g_q(y) needs |x − q| and |y − q| within reach
    let mut lo = b_lo.max(k_lo) - reach;
    let mut hi = b_hi.min(k_hi) + reach;
    if f.restricted {
        lo = lo.max(geom.a());
        hi = hi.min(geom.b());
    }
    if lo >= hi {
        return Ok(Complex64::new(0.0, 0.0));
    }

    let bra_c: Vec<Complex64> = bra.values().iter().map(|v| v.conj()).collect();
    let needs_derivative = matches!(f.kind, ObservableKind::Momentum | ObservableKind::Kinetic);
    let (dbra_c, dket) = if needs_derivative {
        (
            bra.derivative().into_iter().map(|v| v.conj()).collect(),
            ket.derivative(),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let ketv = ket.values();

    let norm = 1.0 / (PI.sqrt() * ell);
    let (hbar, mass) = (params.hbar, params.mass);
    let kind = f.kind;

    let integrand = |q: f64| -> Complex64 {
        let Some((i0, i1)) = grid.index_span(q - reach, q + reach) else {
            return Complex64::new(0.0, 0.0);
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for i in i0..=i1 {
            let x = grid.x(i);
            let w = grid.weight(i);
            // g² = e^{−(x−q)²/ℓ²}/(√π ℓ); g'/g = −(x−q)/ℓ²
            let g2 = norm * (-(x - q).powi(2) / (ell * ell)).exp();
            let slope = -(x - q) / (ell * ell);
            let term = match kind {
                ObservableKind::Unit | ObservableKind::Position => bra_c[i] * ketv[i] * g2,
                ObservableKind::Momentum => {
                    // ⟨φ|g P g|ψ⟩ = −iℏ ∫ φ* g (g ψ)'
                    let dgk = ketv[i] * slope + dket[i];
                    bra_c[i] * dgk * g2 * Complex64::new(0.0, -hbar)
                }
                ObservableKind::Kinetic => {
                    // ⟨φ|g P² g|ψ⟩ = ℏ² ∫ (g φ)'* (g ψ)'
                    let dgb = bra_c[i] * slope + dbra_c[i];
                    let dgk = ketv[i] * slope + dket[i];
                    dgb * dgk * g2 * (hbar * hbar / (2.0 * mass))
                }
            };
            acc += term * w;
        }
        if kind == ObservableKind::Position {
            acc * q
        } else {
            acc
        }
    };

    let mut cuts: Vec<f64> = geom.endpoints();
    cuts.push(bra.centroid());
    cuts.push(ket.centroid());
    let chunk = 2.0 * ell;
    let mut x = lo + chunk;
    while x < hi {
        cuts.push(x);
        x += chunk;
    }
    let est = integrate(integrand, lo, hi, &cuts, Tolerance::absolute(1e-9))?;
    Ok(est.value)
}

/// Semi-classical portrait `⟨q,p|Â_f|q,p⟩`.
pub fn portrait(
    f: ObservableSpec,
    at: PhaseState,
    geom: Geometry,
    params: &QuantizationParams,
    method: PortraitMethod,
) -> Result<f64> {
    if !at.is_finite() {
        return Err(Error::Domain("phase-space point must be finite".into()));
    }
    match method {
        PortraitMethod::ClosedForm => Ok(portrait_closed_form(f, at, geom, params)),
        PortraitMethod::Quadrature => portrait_quadrature(f, at, geom, params),
    }
}

fn portrait_closed_form(
    f: ObservableSpec,
    at: PhaseState,
    geom: Geometry,
    params: &QuantizationParams,
) -> f64 {
    let (q, p) = (at.q, at.p);
    let (ell, hbar, m) = (params.ell, params.hbar, params.mass);
    let kinetic = p * p / (2.0 * m) + hbar * hbar / (2.0 * m * ell * ell);
    if !f.restricted {
        return match f.kind {
            ObservableKind::Unit => 1.0,
            ObservableKind::Position => q,
            ObservableKind::Momentum => p,
            ObservableKind::Kinetic => kinetic,
        };
    }
    let w = Window::portrait(geom, params);
    match f.kind {
        ObservableKind::Unit => w.value(q),
        ObservableKind::Position => q * w.value(q) + ell * ell * w.d1(q),
        ObservableKind::Momentum => p * w.value(q),
        ObservableKind::Kinetic => w.value(q) * kinetic,
    }
}

fn portrait_quadrature(
    f: ObservableSpec,
    at: PhaseState,
    geom: Geometry,
    params: &QuantizationParams,
) -> Result<f64> {
    let (ell, hbar, m) = (params.ell, params.hbar, params.mass);
    let mut lo = at.q - 12.0 * ell;
    let mut hi = at.q + 12.0 * ell;
    if f.restricted {
        lo = lo.max(geom.a());
        hi = hi.min(geom.b());
    }
    if lo >= hi {
        return Ok(0.0);
    }
    let p_reach = 12.0 * hbar / ell;
    let inner_tol = Tolerance {
        abs: 1e-13,
        rel: 1e-13,
        max_intervals: 2000,
    };
    let mut failure = None;
    let outer = |qp: f64| -> f64 {
        let inner = integrate(
            |pp: f64| {
                f.kind.classical(qp, pp, m) * overlap_weight(PhaseState::new(qp, pp), at, params)
                    / (2.0 * PI * hbar)
            },
            at.p - p_reach,
            at.p + p_reach,
            &[at.p],
            inner_tol,
        );
        match inner {
            Ok(e) => e.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let est = integrate(outer, lo, hi, &[at.q], Tolerance::absolute(1e-7));
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}
