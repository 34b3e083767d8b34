//! The smooth window profile `B_w(x) = ½[erfc((a−x)/w) − erfc((b−x)/w)]`
//! and its first two derivatives.
//!
//! The operators use width `w = ℓ`; the phase-space portraits use `w = √2·ℓ`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{ensure_finite, Error, Result};
use crate::special::erfc_unchecked as erfc;

/// Configuration-space constraint set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Open interval `(a, b)`.
    Bounded { a: f64, b: f64 },
    /// Open half-line `(a, ∞)`.
    HalfLine { a: f64 },
}

impl Geometry {
    pub fn bounded(a: f64, b: f64) -> Result<Self> {
        ensure_finite("a", a)?;
        ensure_finite("b", b)?;
        if a >= b {
            return Err(Error::Domain(format!(
                "bounded geometry needs a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(Geometry::Bounded { a, b })
    }

    pub fn half_line(a: f64) -> Result<Self> {
        ensure_finite("a", a)?;
        Ok(Geometry::HalfLine { a })
    }

    pub fn a(&self) -> f64 {
        match *self {
            Geometry::Bounded { a, .. } | Geometry::HalfLine { a } => a,
        }
    }

    /// Right endpoint; `+∞` on the half-line.
    pub fn b(&self) -> f64 {
        match *self {
            Geometry::Bounded { b, .. } => b,
            Geometry::HalfLine { .. } => f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Geometry::Bounded { .. })
    }

    pub fn midpoint(&self) -> Option<f64> {
        match *self {
            Geometry::Bounded { a, b } => Some(0.5 * (a + b)),
            Geometry::HalfLine { .. } => None,
        }
    }

    /// Sharp indicator of the open set.
    pub fn indicator(&self, x: f64) -> f64 {
        if x > self.a() && x < self.b() {
            1.0
        } else {
            0.0
        }
    }

    /// Distance from `x` to the nearest endpoint.
    pub fn boundary_distance(&self, x: f64) -> f64 {
        match *self {
            Geometry::Bounded { a, b } => (x - a).abs().min((x - b).abs()),
            Geometry::HalfLine { a } => (x - a).abs(),
        }
    }

    /// Finite endpoints, left to right.
    pub fn endpoints(&self) -> Vec<f64> {
        match *self {
            Geometry::Bounded { a, b } => vec![a, b],
            Geometry::HalfLine { a } => vec![a],
        }
    }
}

/// The four scales of the model. Lengths are in units of `q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationParams {
    pub ell: f64,
    pub hbar: f64,
    pub mass: f64,
    pub q0: f64,
}

impl QuantizationParams {
    pub fn new(ell: f64, hbar: f64, mass: f64) -> Result<Self> {
        Self::with_unit(ell, hbar, mass, 1.0)
    }

    pub fn with_unit(ell: f64, hbar: f64, mass: f64, q0: f64) -> Result<Self> {
        for (name, v) in [("ell", ell), ("hbar", hbar), ("mass", mass), ("q0", q0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self {
            ell,
            hbar,
            mass,
            q0,
        })
    }

    /// Dimensionless units with the given `ℓ`.
    pub fn dimensionless(ell: f64) -> Result<Self> {
        Self::new(ell, 1.0, 1.0)
    }

    /// Energy unit `α = ℏ²/(m q0²)`.
    pub fn alpha(&self) -> f64 {
        self.hbar * self.hbar / (self.mass * self.q0 * self.q0)
    }

    /// Force unit `F0 = ℏ²/(2 m q0²)`.
    pub fn force_unit(&self) -> f64 {
        0.5 * self.alpha()
    }

    /// Momentum magnitude `ℏ/ℓ` at which the semi-classical wall force vanishes.
    pub fn critical_momentum(&self) -> f64 {
        self.hbar / self.ell
    }
}

impl Default for QuantizationParams {
    fn default() -> Self {
        Self {
            ell: 0.1,
            hbar: 1.0,
            mass: 1.0,
            q0: 1.0,
        }
    }
}

/// `B_w(·, a, b)` for a fixed geometry and width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub geom: Geometry,
    pub width: f64,
}

impl Window {
    pub fn new(geom: Geometry, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Domain(format!(
                "window width must be positive, got {width}"
            )));
        }
        Ok(Self { geom, width })
    }

    /// Width `ℓ`: the profile of the window operator.
    pub fn operator(geom: Geometry, params: &QuantizationParams) -> Self {
        Self {
            geom,
            width: params.ell,
        }
    }

    /// Width `√2·ℓ`: the profile of the semi-classical portraits.
    pub fn portrait(geom: Geometry, params: &QuantizationParams) -> Self {
        Self {
            geom,
            width: SQRT_2 * params.ell,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let w = self.width;
        match self.geom {
            Geometry::HalfLine { a } => 0.5 * erfc((a - x) / w),
            Geometry::Bounded { a, b } => {
                let ua = (x - a) / w;
                let ub = (b - x) / w;
                // each branch avoids subtracting two numbers close to 2
                if ua < 0.0 {
                    0.5 * (erfc(-ua) - erfc(ub))
                } else if ub < 0.0 {
                    0.5 * (erfc(-ub) - erfc(ua))
                } else {
                    1.0 - 0.5 * erfc(ua) - 0.5 * erfc(ub)
                }
            }
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        let w = self.width;
        let ua = (x - self.geom.a()) / w;
        let left = (-ua * ua).exp();
        let right = match self.geom {
            Geometry::Bounded { b, .. } => {
                let ub = (x - b) / w;
                (-ub * ub).exp()
            }
            Geometry::HalfLine { .. } => 0.0,
        };
        (left - right) / (PI.sqrt() * w)
    }

    pub fn d2(&self, x: f64) -> f64 {
        -2.0 * self.edge_moment(x) / (self.width * self.width)
    }

    /// `(1/√π)(u_a e^{−u_a²} − u_b e^{−u_b²})` with `u = (x − endpoint)/w`,
    /// which equals `−w² B''/2`.
    pub fn edge_moment(&self, x: f64) -> f64 {
        let w = self.width;
        let ua = (x - self.geom.a()) / w;
        let left = ua * (-ua * ua).exp();
        let right = match self.geom {
            Geometry::Bounded { b, .. } => {
                let ub = (x - b) / w;
                ub * (-ub * ub).exp()
            }
            Geometry::HalfLine { .. } => 0.0,
        };
        (left - right) / PI.sqrt()
    }

    /// Derivative of order 0, 1 or 2.
    pub fn derivative(&self, order: u32, x: f64) -> Result<f64> {
        ensure_finite("x", x)?;
        match order {
            0 => Ok(self.value(x)),
            1 => Ok(self.d1(x)),
            2 => Ok(self.d2(x)),
            _ => Err(Error::Domain(format!(
                "window derivative of order {order} is not provided"
            ))),
        }
    }
}

/// `B_ℓ(x, a, b)`.
pub fn window_b(x: f64, geom: Geometry, params: &QuantizationParams) -> Result<f64> {
    ensure_finite("x", x)?;
    Ok(Window::operator(geom, params).value(x))
}

/// `B_ℓ^{(order)}(x, a, b)` for `order ∈ {1, 2}`.
pub fn window_db(order: u32, x: f64, geom: Geometry, params: &QuantizationParams) -> Result<f64> {
    if !(order == 1 || order == 2) {
        return Err(Error::Domain(format!("order must be 1 or 2, got {order}")));
    }
    Window::operator(geom, params).derivative(order, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};

    fn box10(ell: f64) -> (Geometry, QuantizationParams) {
        (
            Geometry::bounded(0.0, 10.0).unwrap(),
            QuantizationParams::dimensionless(ell).unwrap(),
        )
    }

    #[test]
    fn interior_and_endpoint_values() {
        let (g, p) = box10(0.1);
        assert!((window_b(5.0, g, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!((window_b(0.0, g, &p).unwrap() - 0.5).abs() < 1e-12);
        assert!((window_b(10.0, g, &p).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_about_midpoint() {
        for ell in [0.1, 0.5, 3.0] {
            let (g, p) = box10(ell);
            let w = Window::operator(g, &p);
            assert_eq!(w.value(3.0), w.value(7.0));
            for i in 0..=4000 {
                let x = -5.0 + i as f64 * 0.005;
                assert!(
                    (w.value(x) - w.value(10.0 - x)).abs() < 1e-13,
                    "ell {ell}, x {x}"
                );
            }
        }
    }

    #[test]
    fn first_derivative_examples() {
        let (g, p) = box10(0.1);
        assert!(window_db(1, 5.0, g, &p).unwrap().abs() < 1e-12);
        let peak = window_db(1, 0.0, g, &p).unwrap();
        assert!((peak - 5.641895835477563).abs() < 1e-9);
        assert!(window_db(3, 1.0, g, &p).is_err());
        assert!(window_db(0, 1.0, g, &p).is_err());
        assert!(window_b(f64::NAN, g, &p).is_err());
    }

    #[test]
    fn derivative_integrates_to_zero() {
        let (g, p) = box10(0.1);
        let w = Window::operator(g, &p);
        let est = integrate(
            |x| w.d1(x),
            -5.0,
            15.0,
            &[0.0, 10.0],
            Tolerance::absolute(1e-12),
        )
        .unwrap();
        assert!(est.value.abs() < 1e-11);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for (geom, ell) in [
            (Geometry::bounded(0.0, 10.0).unwrap(), 0.5),
            (Geometry::bounded(2.0, 2.5).unwrap(), 0.3),
            (Geometry::half_line(0.0).unwrap(), 0.2),
        ] {
            let w = Window::new(geom, ell).unwrap();
            for i in 0..200 {
                let x = -2.0 + i as f64 * 0.071;
                let fd1 = (w.value(x + h) - w.value(x - h)) / (2.0 * h);
                let fd2 = (w.value(x + h) - 2.0 * w.value(x) + w.value(x - h)) / (h * h);
                assert!((fd1 - w.d1(x)).abs() < 1e-6, "d1 at {x}");
                assert!(
                    (fd2 - w.d2(x)).abs() < 1e-6 * w.d2(x).abs().max(1.0) + 2e-6,
                    "d2 at {x}"
                );
            }
        }
    }

    #[test]
    fn gaussian_rate_decay_outside() {
        let (g, p) = box10(0.1);
        let w = Window::operator(g, &p);
        for k in 5..=20 {
            let d = k as f64;
            let v = w.value(10.0 + d * 0.1);
            assert!(v > 0.0);
            // asymptotic bounds on ½ erfc(k)
            let upper = (-d * d).exp() / (2.0 * PI.sqrt() * d);
            let lower = upper * (1.0 - 0.5 / (d * d));
            assert!(v <= upper * (1.0 + 1e-12) && v >= lower, "k = {k}: {v:e}");
            let mirrored = w.value(-d * 0.1);
            assert!((mirrored / v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn half_line_limits() {
        let g = Geometry::half_line(0.0).unwrap();
        let p = QuantizationParams::dimensionless(0.2).unwrap();
        let w = Window::operator(g, &p);
        assert!((w.value(0.0) - 0.5).abs() < 1e-15);
        assert!((w.value(50.0) - 1.0).abs() < 1e-15);
        assert!(w.value(-5.0) < 1e-200);
        assert_eq!(g.b(), f64::INFINITY);
        assert!((w.d1(0.0) - 1.0 / (PI.sqrt() * 0.2)).abs() < 1e-12);
    }

    #[test]
    fn portrait_width_identity() {
        // B_ℓ(q/√2, a/√2, b/√2) = B_{√2ℓ}(q, a, b)
        let ell = 0.3;
        let g = Geometry::bounded(1.0, 4.0).unwrap();
        let scaled = Geometry::bounded(1.0 / SQRT_2, 4.0 / SQRT_2).unwrap();
        let p = QuantizationParams::dimensionless(ell).unwrap();
        let lhs = Window::operator(scaled, &p);
        let rhs = Window::portrait(g, &p);
        for i in 0..100 {
            let q = -1.0 + 0.07 * i as f64;
            assert!((lhs.value(q / SQRT_2) - rhs.value(q)).abs() < 1e-14);
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(Geometry::bounded(1.0, 1.0).is_err());
        assert!(Geometry::bounded(2.0, 1.0).is_err());
        assert!(QuantizationParams::new(0.0, 1.0, 1.0).is_err());
        assert!(QuantizationParams::new(0.1, -1.0, 1.0).is_err());
        assert!((QuantizationParams::default().alpha() - 1.0).abs() < 1e-15);
    }
}
