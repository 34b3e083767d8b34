//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, followed by
//! the measured quantities.

use std::fmt::Write as _;
use std::fs;
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fuzzybox_core::dynamics::{
    classical_limit_study, default_limit_sequence, force, integrate, integrate_lagrangian,
    MechanicalSystem, SemiClassical,
};
use fuzzybox_core::operators::{
    commutator_c, commutator_matrix, hamiltonian_matrix, momentum_matrix, poisson_bracket_symbols,
    position_matrix, potential, spectral_density, weak_limit_c, window_matrix,
};
use fuzzybox_core::quadrature::{integrate as quad, Tolerance};
use fuzzybox_core::quantizer::{portrait, quantize_element};
use fuzzybox_core::states::{com_scan, uncertainty_product, GaussianProbe};
use fuzzybox_core::{
    BandedOperator, Geometry, Grid, ObservableKind, ObservableSpec, OrderingChoice, PhaseState,
    PortraitMethod, PotentialSign, QuantizationParams, Window,
};

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

/// Clause-level bookkeeping for one criterion.
struct Clauses {
    all: bool,
    text: String,
}

impl Clauses {
    fn new() -> Self {
        Self {
            all: true,
            text: String::new(),
        }
    }

    fn check(&mut self, name: &str, ok: bool, measured: String) {
        self.all &= ok;
        let _ = write!(
            self.text,
            "\n    [{}] {name}: {measured}",
            if ok { "ok" } else { "FAILED" }
        );
    }

    fn finish(self, id: u32, title: &'static str) -> Outcome {
        Outcome {
            id,
            title,
            pass: self.all,
            detail: self.text,
        }
    }
}

fn list(values: &[f64], digits: usize) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:.digits$e}")).collect();
    format!("[{}]", items.join(", "))
}

fn box_geometry() -> Geometry {
    Geometry::bounded(0.0, 10.0).unwrap()
}

fn params(ell: f64) -> QuantizationParams {
    QuantizationParams::dimensionless(ell).unwrap()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn criterion_1() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let p = params(0.1);
    let w = Window::operator(g, &p);
    let xs = linspace(-2.0, 12.0, 10_000);

    let worst = xs
        .iter()
        .map(|&x| (commutator_c(x, g, &p) - w.value(x) * spectral_density(x, g, &p)).abs())
        .fold(0.0, f64::max);
    c.check(
        "C_om = B·dQ/dx on 10^4 points",
        worst < 1e-13,
        format!("max |Δ| = {worst:.2e} (tol 1e-13)"),
    );

    let worst = xs
        .iter()
        .map(|&x| {
            let dv = potential(PotentialSign::Plus, x, g, &p)
                - potential(PotentialSign::Minus, x, g, &p);
            (dv - w.d2(x) / 4.0).abs()
        })
        .fold(0.0, f64::max);
    c.check(
        "V+ − V− = ℏ²B''/(4m)",
        worst < 1e-12,
        format!("max |Δ| = {worst:.2e} (tol 1e-12)"),
    );

    let sys = SemiClassical::new(g, &p);
    let pc = p.critical_momentum();
    let worst = linspace(-2.0, 12.0, 1000)
        .iter()
        .map(|&q| force(&sys, PhaseState::new(q, pc)).abs())
        .fold(0.0, f64::max);
    c.check(
        "F(q, ℏ/ℓ) = 0 at 10^3 points",
        worst < 1e-12,
        format!("max |F| = {worst:.2e} (tol 1e-12)"),
    );
    c.finish(1, "closed-form identities")
}

fn criterion_2() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let mut worst: f64 = 0.0;
    for ell in [0.5, 0.2, 0.1, 0.05] {
        let w = Window::operator(g, &params(ell));
        for x in linspace(-20.0, 30.0, 20_001) {
            if g.boundary_distance(x) >= 5.0 * ell {
                worst = worst.max((w.value(x) - g.indicator(x)).abs());
            }
        }
    }
    c.check(
        "sup |B − χ| at distance ≥ 5ℓ",
        worst <= 1e-10,
        format!("{worst:.2e} (tol 1e-10)"),
    );

    let phi = |x: f64| (0.7 * x).cos() + 0.05 * x * x;
    let target = phi(0.0) - phi(10.0);
    let errors: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&ell| {
            let w = Window::operator(g, &params(ell));
            let cuts = [
                -3.0 * ell,
                0.0,
                3.0 * ell,
                10.0 - 3.0 * ell,
                10.0,
                10.0 + 3.0 * ell,
            ];
            let v = quad(
                |x| w.d1(x) * phi(x),
                -12.0 * ell,
                10.0 + 12.0 * ell,
                &cuts,
                Tolerance::absolute(1e-13),
            )
            .unwrap()
            .value;
            (v - target).abs()
        })
        .collect();
    let monotone = errors.windows(2).all(|e| e[1] < e[0]);
    c.check(
        "∫B'φ → φ(a) − φ(b), monotone in ℓ",
        monotone,
        format!("errors {}", list(&errors, 2)),
    );
    c.finish(2, "step and Dirac regularization")
}

fn random_probe(rng: &mut ChaCha8Rng) -> GaussianProbe {
    GaussianProbe::new(
        rng.gen_range(-2.0..12.0),
        rng.gen_range(0.3..1.5),
        rng.gen_range(-5.0..5.0),
    )
    .unwrap()
}

fn oracle_vs_matrices(pair: (GaussianProbe, GaussianProbe), div: f64) -> [f64; 5] {
    let g = box_geometry();
    let p = params(0.1);
    let (bra, ket) = pair;
    let lo = (bra.center - 8.0 * bra.width).min(ket.center - 8.0 * ket.width);
    let hi = (bra.center + 8.0 * bra.width).max(ket.center + 8.0 * ket.width);
    let grid = Grid::covering(g, &p, lo, hi, 0.0, p.ell / div).unwrap();
    let phi = bra.sample(&grid).unwrap();
    let psi = ket.sample(&grid).unwrap();
    let element = |op: BandedOperator| phi.inner(&op.apply_to(&psi).unwrap()).unwrap();
    let oracle =
        |kind| quantize_element(ObservableSpec::restricted(kind), &phi, &psi, g, &p).unwrap();
    let diff = |a: Complex64, b: Complex64| (a - b).norm();
    [
        diff(
            oracle(ObservableKind::Unit),
            element(window_matrix(&grid, g, &p).unwrap()),
        ),
        diff(
            oracle(ObservableKind::Position),
            element(position_matrix(&grid, g, &p).unwrap()),
        ),
        diff(
            oracle(ObservableKind::Momentum),
            element(momentum_matrix(&grid, g, &p).unwrap()),
        ),
        diff(
            oracle(ObservableKind::Kinetic),
            element(hamiltonian_matrix(OrderingChoice::AnticommutatorHalf, &grid, g, &p).unwrap()),
        ),
        diff(
            oracle(ObservableKind::Kinetic),
            element(hamiltonian_matrix(OrderingChoice::PSandwich, &grid, g, &p).unwrap()),
        ),
    ]
}

fn criterion_3() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let p = params(0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (a, b) = (random_probe(&mut rng), random_probe(&mut rng));
        let lo = (a.center - 8.0 * a.width).min(b.center - 8.0 * b.width);
        let hi = (a.center + 8.0 * a.width).max(b.center + 8.0 * b.width);
        let grid = Grid::covering(g, &p, lo, hi, 0.0, p.ell / 20.0).unwrap();
        let (phi, psi) = (a.sample(&grid).unwrap(), b.sample(&grid).unwrap());
        let q = quantize_element(
            ObservableSpec::unrestricted(ObservableKind::Unit),
            &phi,
            &psi,
            g,
            &p,
        )
        .unwrap();
        worst = worst.max((q - phi.inner(&psi).unwrap()).norm());
    }
    c.check(
        "resolution of identity, 10 random pairs",
        worst < 1e-8,
        format!("max |Δ| = {worst:.2e} (tol 1e-8)"),
    );

    let pairs = [
        (
            GaussianProbe::new(1.0, 0.3, 3.0).unwrap(),
            GaussianProbe::new(1.3, 0.3, -2.0).unwrap(),
        ),
        (
            GaussianProbe::new(9.5, 0.5, 1.0).unwrap(),
            GaussianProbe::new(9.2, 0.4, 0.0).unwrap(),
        ),
        (
            GaussianProbe::new(0.0, 1.0, 2.0).unwrap(),
            GaussianProbe::new(0.5, 1.0, -2.0).unwrap(),
        ),
    ];
    let names = [
        "window",
        "position",
        "momentum",
        "kinetic (anticommutator)",
        "kinetic (sandwich)",
    ];
    let mut coarse = [0.0f64; 5];
    let mut fine = [0.0f64; 5];
    for pair in pairs {
        let d20 = oracle_vs_matrices(pair, 20.0);
        let d40 = oracle_vs_matrices(pair, 40.0);
        for k in 0..5 {
            coarse[k] = coarse[k].max(d20[k]);
            fine[k] = fine[k].max(d40[k]);
        }
    }
    for k in 0..5 {
        c.check(
            &format!("oracle vs {} matrix at h = ℓ/20", names[k]),
            coarse[k] < 1e-4,
            format!("{:.2e} (tol 1e-4)", coarse[k]),
        );
    }
    // window and position are exact multiplications: nothing left to converge
    for k in 2..5 {
        let ratio = coarse[k] / fine[k];
        c.check(
            &format!("{} improvement under h-halving", names[k]),
            (3.0..5.0).contains(&ratio),
            format!("ratio {ratio:.2} (≈4 expected)"),
        );
    }
    c.check(
        "window/position at rounding level",
        coarse[0] < 1e-12 && coarse[1] < 1e-12,
        format!("{:.2e}, {:.2e}", coarse[0], coarse[1]),
    );
    c.finish(3, "resolution of identity and oracle equivalence")
}

fn criterion_4() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let p = params(0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let at = PhaseState::new(rng.gen_range(-1.0..11.0), rng.gen_range(-20.0..20.0));
        for kind in ObservableKind::ALL {
            let spec = ObservableSpec::restricted(kind);
            let closed = portrait(spec, at, g, &p, PortraitMethod::ClosedForm).unwrap();
            let numeric = portrait(spec, at, g, &p, PortraitMethod::Quadrature).unwrap();
            worst = worst.max((closed - numeric).abs());
        }
    }
    c.check(
        "closed form vs quadrature, 20 points",
        worst < 1e-5,
        format!("max |Δ| = {worst:.2e} (tol 1e-5)"),
    );

    let spec = ObservableSpec::restricted(ObservableKind::Unit);
    let mut spread: f64 = 0.0;
    for q in [-0.1, 0.05, 3.0, 9.9] {
        let values: Vec<f64> = [-15.0, 0.0, 7.0, 25.0]
            .iter()
            .map(|&pp| {
                portrait(
                    spec,
                    PhaseState::new(q, pp),
                    g,
                    &p,
                    PortraitMethod::Quadrature,
                )
                .unwrap()
            })
            .collect();
        let (mn, mx) = values
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        spread = spread.max(mx - mn);
    }
    c.check(
        "window portrait independent of p",
        spread < 1e-9,
        format!("max spread {spread:.2e} (tol 1e-9)"),
    );
    c.finish(4, "portrait equivalence")
}

fn criterion_5() -> Outcome {
    let mut c = Clauses::new();
    let p = params(0.1);
    let mut worst: f64 = 0.0;
    for a in [0.0, 2.0, 4.0] {
        let g = Geometry::bounded(a, a + 10.0).unwrap();
        for x in linspace(a + 1.0, a + 9.0, 4001) {
            worst = worst.max((commutator_c(x, g, &p) - 1.0).abs());
        }
    }
    c.check(
        "interior plateau C_om = 1",
        worst < 1e-10,
        format!("max |C − 1| = {worst:.2e} (tol 1e-10)"),
    );

    // a probe straddling the right wall, where C_om is far from 1
    let g = box_geometry();
    let probe = GaussianProbe::new(9.9, 0.4, 2.0).unwrap();
    let mut sups = Vec::new();
    for div in [10.0, 20.0, 40.0, 80.0] {
        let grid = Grid::with_spacing(-4.0, 14.0, p.ell / div).unwrap();
        let psi = probe.sample(&grid).unwrap();
        let applied = commutator_matrix(&grid, g, &p)
            .unwrap()
            .apply_to(&psi)
            .unwrap();
        let sup = grid
            .points()
            .enumerate()
            .map(|(i, x)| (applied.values()[i] - psi.values()[i] * commutator_c(x, g, &p)).norm())
            .fold(0.0, f64::max);
        sups.push(sup);
    }
    let orders: Vec<f64> = sups.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().copied().fold(f64::MAX, f64::min);
    c.check(
        "matrix commutator → iℏC_om, order in h",
        min_order >= 1.8,
        format!(
            "sup errors {}, orders {:.2?} (min ≥ 1.8)",
            list(&sups, 2),
            orders
        ),
    );

    let phi = |x: f64| 1.0 + 0.1 * x - 0.02 * x * x;
    let errs = weak_limit_c(&phi, &[0.4, 0.2, 0.1, 0.05, 0.025], g, &p).unwrap();
    let monotone = errs.windows(2).all(|e| e[1] < e[0]);
    c.check(
        "weak limit χ + ½(aδ_a − bδ_b)",
        monotone,
        format!("errors {}", list(&errs, 2)),
    );
    c.finish(5, "commutator")
}

fn criterion_6() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let p = params(0.1);
    let qc = |q: f64, pp: f64| {
        portrait(
            ObservableSpec::restricted(ObservableKind::Position),
            PhaseState::new(q, pp),
            g,
            &p,
            PortraitMethod::ClosedForm,
        )
        .unwrap()
    };
    let pc = |q: f64, pp: f64| {
        portrait(
            ObservableSpec::restricted(ObservableKind::Momentum),
            PhaseState::new(q, pp),
            g,
            &p,
            PortraitMethod::ClosedForm,
        )
        .unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (q, pp) = (rng.gen_range(-1.0..11.0), rng.gen_range(-10.0..10.0));
        let d = |f: &dyn Fn(f64, f64) -> f64, dq: f64, dp: f64| {
            (f(q + dq, pp + dp) - f(q - dq, pp - dp)) / (2.0 * h)
        };
        let jac = d(&qc, h, 0.0) * d(&pc, 0.0, h) - d(&qc, 0.0, h) * d(&pc, h, 0.0);
        worst = worst.max((jac - poisson_bracket_symbols(q, g, &p)).abs());
    }
    c.check(
        "closed form vs finite-difference Jacobian",
        worst < 1e-6,
        format!("max |Δ| = {worst:.2e} (tol 1e-6)"),
    );
    let interior = linspace(1.0, 9.0, 801)
        .iter()
        .map(|&q| (poisson_bracket_symbols(q, g, &p) - 1.0).abs())
        .fold(0.0, f64::max);
    c.check(
        "interior value 1",
        interior < 1e-10,
        format!("max |Δ| = {interior:.2e} (tol 1e-10)"),
    );
    c.finish(6, "Poisson-bracket consistency")
}

fn criterion_7() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let p = params(0.1);
    let inner = linspace(3.0, 7.0, 81);
    let scan = com_scan(&inner, 1.0, g, &p).unwrap();
    let worst = scan
        .iter()
        .map(|s| (s.value - 1.0).abs())
        .fold(0.0, f64::max);
    c.check(
        "⟨C_om⟩ = 1 for c_cen ∈ [3, 7]",
        worst < 1e-3,
        format!("max |Δ| = {worst:.2e} (tol 1e-3)"),
    );

    let outer = linspace(-12.0, -5.0, 71);
    let scan = com_scan(&outer, 1.0, g, &p).unwrap();
    let worst = scan.iter().map(|s| s.value.abs()).fold(0.0, f64::max);
    c.check(
        "|⟨C_om⟩| small for c_cen ≤ −5",
        worst < 1e-3,
        format!("max = {worst:.2e} (tol 1e-3)"),
    );

    let centers = linspace(-5.0, 15.0, 401);
    let scan = com_scan(&centers, 1.0, g, &p).unwrap();
    let asym = (0..scan.len())
        .map(|i| (scan[i].value - scan[scan.len() - 1 - i].value).abs())
        .fold(0.0, f64::max);
    c.check(
        "reflection symmetry about c_cen = 5",
        asym < 1e-6,
        format!(
            "max |S(c) − S(10 − c)| = {asym:.3} (tol 1e-6); S(0) = {:.4}, S(10) = {:.4}",
            scan[100].value, scan[300].value
        ),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min_slack = f64::MAX;
    for _ in 0..50 {
        let probe = GaussianProbe::new(
            rng.gen_range(-3.0..13.0),
            rng.gen_range(0.3..2.0),
            rng.gen_range(0.0..10.0),
        )
        .unwrap();
        let h = (p.ell / 10.0).min(2.0 * std::f64::consts::PI / (20.0 * probe.boost.max(1.0)));
        let grid = Grid::covering(
            g,
            &p,
            probe.center - 8.0 * probe.width,
            probe.center + 8.0 * probe.width,
            0.0,
            h,
        )
        .unwrap();
        let u = uncertainty_product(&probe.sample(&grid).unwrap(), g, &p).unwrap();
        min_slack = min_slack.min(u.slack());
    }
    c.check(
        "uncertainty inequality, 50 random probes",
        min_slack >= -1e-8,
        format!("min slack {min_slack:.3e} (≥ −1e-8)"),
    );
    c.finish(7, "⟨C_om⟩ scan and uncertainty relation")
}

fn criterion_8() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let p = params(0.1);
    let interior = linspace(1.0, 9.0, 801)
        .iter()
        .map(|&x| (fuzzybox_core::operators::mass(x, g, &p) - 1.0).abs())
        .fold(0.0, f64::max);
    c.check(
        "interior M = m",
        interior < 1e-10,
        format!("max |Δ| = {interior:.2e} (tol 1e-10)"),
    );
    let at_a = fuzzybox_core::operators::mass(0.0, g, &p);
    c.check(
        "M(a) = 2m",
        (at_a - 2.0).abs() < 1e-6,
        format!("M(a) = {at_a:.12}"),
    );

    let plateau = 1.0 / (4.0 * 0.01);
    let mut worst: f64 = 0.0;
    for sign in [PotentialSign::Plus, PotentialSign::Minus] {
        worst = worst.max(((potential(sign, 5.0, g, &p) - plateau) / plateau).abs());
    }
    c.check(
        "V± plateau = ℏ²/(4mℓ²) = 25α",
        worst < 1e-6,
        format!("relative |Δ| = {worst:.2e} (tol 1e-6)"),
    );

    let sups: Vec<f64> = default_limit_sequence(6)
        .iter()
        .map(|&(ell, hbar)| {
            let pn = QuantizationParams::new(ell, hbar, 1.0).unwrap();
            linspace(-2.0, 12.0, 14_001)
                .iter()
                .flat_map(|&x| {
                    [
                        potential(PotentialSign::Plus, x, g, &pn),
                        potential(PotentialSign::Minus, x, g, &pn),
                    ]
                })
                .fold(0.0, |m: f64, v| m.max(v.abs()))
        })
        .collect();
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    c.check(
        "sup |V±| → 0 along the limit sequence",
        decreasing,
        list(&sups, 2),
    );
    c.finish(8, "induced mass and potentials")
}

fn criterion_9() -> Outcome {
    let mut c = Clauses::new();
    let g = box_geometry();
    let p = params(0.1);
    let sys = SemiClassical::new(g, &p);
    let s0 = PhaseState::new(5.0, 20.0);
    let coarse = integrate(&sys, s0, 10.0, 5e-4).unwrap();
    let fine = integrate(&sys, s0, 10.0, 2.5e-4).unwrap();
    let drift = fine.max_relative_drift();
    c.check(
        "energy drift over T = 10 at dt = 2.5e-4",
        drift < 1e-8,
        format!("{drift:.2e} (tol 1e-8)"),
    );
    let ratio = coarse.max_relative_drift() / drift;
    c.check(
        "dt-halving drift ratio",
        (12.0..=20.0).contains(&ratio),
        format!("{ratio:.2} (in [12, 20])"),
    );

    // interior start, through the first wall encounter and into the creep
    let t_end = 1.0;
    let ham = integrate(&sys, s0, t_end, 1e-4).unwrap();
    let lag = integrate_lagrangian(&sys, s0.q, s0.p * sys.inverse_mass(s0.q), t_end, 1e-4).unwrap();
    let dev = ham
        .states
        .iter()
        .zip(&lag.states)
        .map(|(a, b)| (a.q - b.q).abs())
        .fold(0.0, f64::max);
    c.check(
        "Lagrangian vs Hamiltonian trajectory",
        dev < 1e-6,
        format!("max |Δq| = {dev:.2e} (tol 1e-6)"),
    );

    let mut worst: f64 = 0.0;
    for s in &fine.states {
        let (_, dp) = fuzzybox_core::dynamics::canonical_rhs(&sys, *s);
        let inv = sys.inverse_mass(s.q);
        let defect = -s.p * s.p * sys.mass_derivative(s.q) * inv * inv;
        let scale = 1.0 + (s.p * s.p * sys.inverse_mass_derivative(s.q)).abs();
        worst = worst.max((force(&sys, *s) - dp - defect).abs() / scale);
    }
    c.check(
        "F − ṗ = −p²m'/m² along the trajectory",
        worst < 1e-10,
        format!("max scaled |Δ| = {worst:.2e} (tol 1e-10)"),
    );
    c.finish(9, "dynamics")
}

fn criterion_10() -> Outcome {
    let mut c = Clauses::new();
    let rows = classical_limit_study(
        PhaseState::new(5.0, 1.0),
        box_geometry(),
        1.0,
        &default_limit_sequence(6),
        10.0,
        1e-2,
    )
    .unwrap();
    let dev = rows
        .iter()
        .map(|r| r.interior_deviation)
        .fold(0.0, f64::max);
    c.check(
        "interior segments match the hard wall",
        dev < 1e-6,
        format!("max |Δq| = {dev:.2e} (tol 1e-6)"),
    );
    let depths: Vec<f64> = rows.iter().map(|r| r.penetration).collect();
    let ratios: Vec<f64> = depths.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = depths.iter().all(|&d| d > 0.0) && ratios.iter().all(|&r| r >= 1.5);
    c.check(
        "penetration strictly decreasing, ratio ≥ 1.5",
        ok,
        format!("depths {}, ratios {:.2?}", list(&depths, 3), ratios),
    );
    c.finish(10, "classical limit")
}

fn criterion_11() -> Outcome {
    let mut c = Clauses::new();
    let bin = env!("CARGO_BIN_EXE_fuzzybox");
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(bin)
            .args(["figures", "--all", "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        let mut files: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files
    };
    let first = run("one");
    let second = run("two");
    let same = first.len() == second.len()
        && first.iter().zip(&second).all(|(a, b)| {
            a.file_name() == b.file_name() && fs::read(a).unwrap() == fs::read(b).unwrap()
        });
    c.check(
        "figures --all twice",
        same,
        format!("{} files compared", first.len()),
    );

    let stdout = |args: &[&str]| Command::new(bin).args(args).output().unwrap().stdout;
    for args in [
        &["limit-study"][..],
        &["quantize-check"][..],
        &["simulate", "--t-end", "2"][..],
    ] {
        let same = stdout(args) == stdout(args);
        c.check(
            &format!("{} twice", args.join(" ")),
            same,
            "byte-identical".to_string(),
        );
    }
    c.finish(11, "determinism")
}

/// Criteria whose failure is analysed and recorded; any other failure, or
/// an unexpected pass of these, fails the test.
const RECORDED_FAILURES: [u32; 1] = [7];

fn main() {
    let outcomes = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    let mut report = String::new();
    for o in &outcomes {
        let _ = writeln!(
            report,
            "criterion {:>2} {} {}{}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.title,
            o.detail
        );
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let _ = writeln!(report, "{passed}/{} criteria pass", outcomes.len());
    println!("{report}");

    let changed: Vec<u32> = outcomes
        .iter()
        .filter(|o| o.pass == RECORDED_FAILURES.contains(&o.id))
        .map(|o| o.id)
        .collect();
    if !changed.is_empty() {
        eprintln!("criteria with unexpected status: {changed:?}");
        std::process::exit(1);
    }
}
