//! Classical mechanics with a position-dependent mass, the semi-classical
//! system generated by the portrait Hamiltonian, and its classical limit.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::banded::fmt_f64;
use crate::error::{ensure_finite, Error, Result};
use crate::quantizer::PhaseState;
use crate::window::{Geometry, QuantizationParams, Window};

/// `H(q, p) = p²/(2m(q)) + V(q)`, described through `1/m` so that an
/// unbounded mass is representable.
pub trait MechanicalSystem: Sync {
    fn inverse_mass(&self, q: f64) -> f64;
    fn inverse_mass_derivative(&self, q: f64) -> f64;
    fn potential(&self, q: f64) -> f64;
    fn potential_derivative(&self, q: f64) -> f64;

    /// `m′ = −(1/m)′ m²`.
    fn mass_derivative(&self, q: f64) -> f64 {
        let inv = self.inverse_mass(q);
        -self.inverse_mass_derivative(q) / (inv * inv)
    }

    fn energy(&self, s: PhaseState) -> f64 {
        0.5 * s.p * s.p * self.inverse_mass(s.q) + self.potential(s.q)
    }
}

/// Constant mass in the potential `½ k q²`; `k = 0` is the free particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMass {
    pub mass: f64,
    pub stiffness: f64,
}

impl ConstantMass {
    pub fn free(mass: f64) -> Result<Self> {
        Self::harmonic(mass, 0.0)
    }

    pub fn harmonic(mass: f64, stiffness: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        ensure_finite("stiffness", stiffness)?;
        Ok(Self { mass, stiffness })
    }
}

impl MechanicalSystem for ConstantMass {
    fn inverse_mass(&self, _q: f64) -> f64 {
        1.0 / self.mass
    }
    fn inverse_mass_derivative(&self, _q: f64) -> f64 {
        0.0
    }
    fn potential(&self, q: f64) -> f64 {
        0.5 * self.stiffness * q * q
    }
    fn potential_derivative(&self, q: f64) -> f64 {
        self.stiffness * q
    }
}

/// `Ȟ(q, p) = B_{√2ℓ}(q) (p²/(2m) + ℏ²/(2mℓ²))`: mass `m/B_{√2ℓ}` and
/// potential `ℏ²B_{√2ℓ}/(2mℓ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiClassical {
    window: Window,
    params: QuantizationParams,
}

impl SemiClassical {
    pub fn new(geom: Geometry, params: &QuantizationParams) -> Self {
        Self {
            window: Window::portrait(geom, params),
            params: *params,
        }
    }

    pub fn params(&self) -> &QuantizationParams {
        &self.params
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    fn zero_point(&self) -> f64 {
        let p = &self.params;
        p.hbar * p.hbar / (2.0 * p.mass * p.ell * p.ell)
    }

    /// `B′_{√2ℓ}(q) (p²/(2m) − ℏ²/(2mℓ²))`.
    pub fn force_closed_form(&self, s: PhaseState) -> f64 {
        self.window.d1(s.q) * (0.5 * s.p * s.p / self.params.mass - self.zero_point())
    }
}

impl MechanicalSystem for SemiClassical {
    fn inverse_mass(&self, q: f64) -> f64 {
        self.window.value(q) / self.params.mass
    }
    fn inverse_mass_derivative(&self, q: f64) -> f64 {
        self.window.d1(q) / self.params.mass
    }
    fn potential(&self, q: f64) -> f64 {
        self.zero_point() * self.window.value(q)
    }
    fn potential_derivative(&self, q: f64) -> f64 {
        self.zero_point() * self.window.d1(q)
    }
}

/// `(q̇, ṗ) = (p/m, −V′ + p² m′/(2m²))`.
pub fn canonical_rhs(sys: &dyn MechanicalSystem, s: PhaseState) -> (f64, f64) {
    let inv = sys.inverse_mass(s.q);
    let dq = s.p * inv;
    let dp = -sys.potential_derivative(s.q) - 0.5 * s.p * s.p * sys.inverse_mass_derivative(s.q);
    (dq, dp)
}

/// `F = −V′ − p² m′/(2m²)`, the time derivative of `m q̇` minus `m′ q̇²`.
pub fn force(sys: &dyn MechanicalSystem, s: PhaseState) -> f64 {
    -sys.potential_derivative(s.q) + 0.5 * s.p * s.p * sys.inverse_mass_derivative(s.q)
}

/// `q̈ = −(V′ + ½ m′ q̇²)/m`.
pub fn lagrangian_accel(sys: &dyn MechanicalSystem, q: f64, qdot: f64) -> Result<f64> {
    let inv = sys.inverse_mass(q);
    if !(inv > f64::MIN_POSITIVE) {
        return Err(Error::Singularity { q });
    }
    // m′/m = −(1/m)′/(1/m)
    Ok(-inv * sys.potential_derivative(q)
        + 0.5 * sys.inverse_mass_derivative(q) / inv * qdot * qdot)
}

/// A sampled trajectory with its energy and force history.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub energies: Vec<f64>,
    pub forces: Vec<f64>,
    pub dt: f64,
    /// Integration stopped early because the inverse mass underflowed.
    pub truncated: bool,
}

impl Trajectory {
    fn with_capacity(n: usize, dt: f64) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            energies: Vec::with_capacity(n),
            forces: Vec::with_capacity(n),
            dt,
            truncated: false,
        }
    }

    fn push(&mut self, t: f64, s: PhaseState, e: f64, f: f64) {
        self.times.push(t);
        self.states.push(s);
        self.energies.push(e);
        self.forces.push(f);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<PhaseState> {
        self.states.last().copied()
    }

    /// `max_t |E(t) − E(0)| / max(|E(0)|, ε)`.
    pub fn max_relative_drift(&self) -> f64 {
        let Some(&e0) = self.energies.first() else {
            return 0.0;
        };
        let scale = e0.abs().max(f64::EPSILON);
        self.energies
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "t [t0],q [q0],p [p0],E [E0],F [F0]")?;
        for i in 0..self.len() {
            let s = self.states[i];
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(self.times[i]),
                fmt_f64(s.q),
                fmt_f64(s.p),
                fmt_f64(self.energies[i]),
                fmt_f64(self.forces[i])
            )?;
        }
        Ok(())
    }
}

/// Upper bound on the number of steps of one trajectory.
pub const MAX_STEPS: usize = 10_000_000;

fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Domain(format!(
            "duration must be positive, got {t_end}"
        )));
    }
    let n = (t_end / dt).round().max(1.0);
    if n > MAX_STEPS as f64 {
        return Err(Error::Domain(format!(
            "{n} steps requested, limit is {MAX_STEPS}"
        )));
    }
    Ok(n as usize)
}

fn rk4_step(sys: &dyn MechanicalSystem, s: PhaseState, dt: f64) -> PhaseState {
    let shift = |k: (f64, f64), c: f64| PhaseState::new(s.q + c * k.0, s.p + c * k.1);
    let k1 = canonical_rhs(sys, s);
    let k2 = canonical_rhs(sys, shift(k1, 0.5 * dt));
    let k3 = canonical_rhs(sys, shift(k2, 0.5 * dt));
    let k4 = canonical_rhs(sys, shift(k3, dt));
    PhaseState::new(
        s.q + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        s.p + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

/// Classic fixed-step RK4 on the canonical equations over `[0, t_end]`.
///
/// The step is adjusted to `t_end/round(t_end/dt)` so the last sample falls
/// on `t_end`.
pub fn integrate(
    sys: &dyn MechanicalSystem,
    s0: PhaseState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !s0.is_finite() {
        return Err(Error::Domain("initial state must be finite".into()));
    }
    let n = step_count(t_end, dt)?;
    let dt = t_end / n as f64;
    let mut traj = Trajectory::with_capacity(n + 1, dt);
    let mut s = s0;
    traj.push(0.0, s, sys.energy(s), force(sys, s));
    for k in 1..=n {
        let t = k as f64 * dt;
        let next = rk4_step(sys, s, dt);
        if !next.is_finite() {
            return Err(Error::Divergence { t, last: s });
        }
        if !(sys.inverse_mass(next.q) > f64::MIN_POSITIVE) {
            traj.truncated = true;
            break;
        }
        s = next;
        traj.push(t, s, sys.energy(s), force(sys, s));
    }
    Ok(traj)
}

/// RK4 on `(q, q̇)` with the Euler–Lagrange acceleration; momenta in the
/// result are `m(q) q̇`.
pub fn integrate_lagrangian(
    sys: &dyn MechanicalSystem,
    q0: f64,
    qdot0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    ensure_finite("q0", q0)?;
    ensure_finite("qdot0", qdot0)?;
    let n = step_count(t_end, dt)?;
    let dt = t_end / n as f64;
    let rhs = |q: f64, v: f64| -> Result<(f64, f64)> { Ok((v, lagrangian_accel(sys, q, v)?)) };
    let phase = |q: f64, v: f64| PhaseState::new(q, v / sys.inverse_mass(q));

    let mut traj = Trajectory::with_capacity(n + 1, dt);
    let (mut q, mut v) = (q0, qdot0);
    let s = phase(q, v);
    rhs(q, v)?;
    traj.push(0.0, s, sys.energy(s), force(sys, s));
    for k in 1..=n {
        let t = k as f64 * dt;
        let k1 = rhs(q, v)?;
        let k2 = rhs(q + 0.5 * dt * k1.0, v + 0.5 * dt * k1.1)?;
        let k3 = rhs(q + 0.5 * dt * k2.0, v + 0.5 * dt * k2.1)?;
        let k4 = rhs(q + dt * k3.0, v + dt * k3.1)?;
        let nq = q + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        let nv = v + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !(nq.is_finite() && nv.is_finite()) {
            return Err(Error::Divergence {
                t,
                last: phase(q, v),
            });
        }
        q = nq;
        v = nv;
        let s = phase(q, v);
        traj.push(t, s, sys.energy(s), force(sys, s));
    }
    Ok(traj)
}

/// Free flight of mass `mass` between perfectly reflecting walls, sampled
/// at multiples of `dt`.
pub fn hard_wall_reference(
    s0: PhaseState,
    geom: Geometry,
    mass: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !s0.is_finite() {
        return Err(Error::Domain("initial state must be finite".into()));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    let (a, b) = (geom.a(), geom.b());
    if !(s0.q > a && s0.q < b) {
        return Err(Error::Domain(format!(
            "start q = {} lies outside ({a}, {b})",
            s0.q
        )));
    }
    if s0.p == 0.0 {
        return Err(Error::Domain(
            "hard-wall reference needs a nonzero momentum".into(),
        ));
    }
    let n = step_count(t_end, dt)?;
    let dt = t_end / n as f64;
    let v = s0.p / mass;
    let energy = 0.5 * s0.p * s0.p / mass;

    // unfold the walls: reflect the free coordinate back into the interval
    let fold = |t: f64| -> PhaseState {
        let x = s0.q - a + v * t;
        if geom.is_bounded() {
            let len = b - a;
            let y = x.rem_euclid(2.0 * len);
            if y <= len {
                PhaseState::new(a + y, s0.p)
            } else {
                PhaseState::new(a + 2.0 * len - y, -s0.p)
            }
        } else if x >= 0.0 {
            PhaseState::new(a + x, s0.p)
        } else {
            PhaseState::new(a - x, -s0.p)
        }
    };
    let mut traj = Trajectory::with_capacity(n + 1, dt);
    for k in 0..=n {
        let t = k as f64 * dt;
        traj.push(t, fold(t), energy, 0.0);
    }
    Ok(traj)
}

/// The default sequence `ℓₙ = 0.4/2ⁿ`, `ℏₙ = ℓₙ²`, `n = 0..count`.
pub fn default_limit_sequence(count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|n| {
            let ell = 0.4 / f64::powi(2.0, n as i32);
            (ell, ell * ell)
        })
        .collect()
}

/// One member of the classical-limit sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub n: usize,
    pub ell: f64,
    pub hbar: f64,
    /// `max |q − q_wall|` before the reference first comes within `6√2ℓ` of a wall.
    pub interior_deviation: f64,
    /// `sup_t q(t) − b` for a right-moving start.
    pub penetration: f64,
    pub max_abs_force: f64,
    pub energy_drift: f64,
}

/// Integrates the semi-classical system for each `(ℓₙ, ℏₙ)` and compares it
/// with the hard-wall flight. The step for member `n` is
/// `min(dt, steps_per_ell⁻¹ · √2ℓₙ m/|p₀|)`.
pub fn classical_limit_study(
    s0: PhaseState,
    geom: Geometry,
    mass: f64,
    sequence: &[(f64, f64)],
    t_end: f64,
    dt: f64,
) -> Result<Vec<LimitRow>> {
    let Geometry::Bounded { b, .. } = geom else {
        return Err(Error::Domain(
            "the classical-limit study needs a bounded interval".into(),
        ));
    };
    if !(s0.p > 0.0) {
        return Err(Error::Domain(
            "the classical-limit study needs a right-moving start".into(),
        ));
    }
    for &(ell, hbar) in sequence {
        if s0.p <= hbar / ell {
            return Err(Error::Domain(format!(
                "|p0| = {} must exceed the critical momentum ℏ/ℓ = {}",
                s0.p,
                hbar / ell
            )));
        }
    }
    sequence
        .par_iter()
        .enumerate()
        .map(|(n, &(ell, hbar))| {
            let params = QuantizationParams::new(ell, hbar, mass)?;
            let sys = SemiClassical::new(geom, &params);
            let step = dt.min(std::f64::consts::SQRT_2 * ell * mass / s0.p / 400.0);
            let traj = integrate(&sys, s0, t_end, step)?;
            let reference = hard_wall_reference(s0, geom, mass, t_end, step)?;
            let margin = 6.0 * std::f64::consts::SQRT_2 * ell;
            let mut interior_deviation: f64 = 0.0;
            for (s, r) in traj.states.iter().zip(&reference.states) {
                if geom.boundary_distance(r.q) < margin {
                    break;
                }
                interior_deviation = interior_deviation.max((s.q - r.q).abs());
            }
            let penetration = traj
                .states
                .iter()
                .map(|s| s.q - b)
                .fold(f64::NEG_INFINITY, f64::max);
            let max_abs_force = traj.forces.iter().map(|f| f.abs()).fold(0.0, f64::max);
            Ok(LimitRow {
                n,
                ell,
                hbar,
                interior_deviation,
                penetration,
                max_abs_force,
                energy_drift: traj.max_relative_drift(),
            })
        })
        .collect()
}

/// Writes limit-study rows as CSV.
pub fn write_limit_csv<W: Write>(rows: &[LimitRow], out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "n [1],ell [q0],hbar [hbar0],interior_deviation [q0],penetration [q0],max_abs_force [F0],energy_drift [1]"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.ell),
            fmt_f64(r.hbar),
            fmt_f64(r.interior_deviation),
            fmt_f64(r.penetration),
            fmt_f64(r.max_abs_force),
            fmt_f64(r.energy_drift)
        )?;
    }
    Ok(())
}
