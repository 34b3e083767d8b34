//! One function per subcommand; each returns the tables it produced.

use num_complex::Complex64;
use rayon::prelude::*;

use fuzzybox_core::dynamics::{
    self, classical_limit_study, default_limit_sequence, hard_wall_reference, SemiClassical,
};
use fuzzybox_core::operators::{
    commutator_c, hamiltonian_matrix, mass, mass_inverse, momentum_matrix, position_matrix,
    position_symbol, potential, spectral_density, window_matrix,
};
use fuzzybox_core::quantizer::{portrait, quantize_element};
use fuzzybox_core::states::{com_scan, GaussianProbe};
use fuzzybox_core::{
    Error, Geometry, Grid, ObservableKind, ObservableSpec, OrderingChoice, PhaseState,
    PortraitMethod, PotentialSign, QuantizationParams, Window,
};

use crate::config::Settings;
use crate::table::Table;
use crate::CliError;

/// Domain errors stem from the inputs; everything else is a numerical failure.
fn numerical(e: Error) -> CliError {
    match e {
        Error::Domain(msg) => CliError::Config(msg),
        other => CliError::Numerical(other.to_string()),
    }
}

/// `lo, lo + h, …` up to and including `hi` (to within rounding of the count).
fn samples(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + i as f64 * h).collect()
}

/// Default plotting range `[a − 2q0, b + 2q0]`, or `[a − 2q0, a + 12q0]` on the half-line.
fn x_range(s: &Settings, geom: Geometry, right_pad: f64) -> (f64, f64) {
    let a = geom.a();
    let right = if geom.is_bounded() {
        geom.b()
    } else {
        a + s.len(10.0)
    };
    (
        s.x_min.unwrap_or(a - s.len(2.0)),
        s.x_max.unwrap_or(right + s.len(right_pad)),
    )
}

fn step(s: &Settings) -> f64 {
    s.grid_h.unwrap_or(s.len(0.01))
}

/// Sweeps `(ell, a)` pairs in parallel; rows come back in sweep order.
fn sweep<F>(
    s: &Settings,
    ells: &[f64],
    lefts: &[f64],
    right_pad: f64,
    row: F,
) -> Result<Vec<Vec<f64>>, CliError>
where
    F: Fn(f64, Geometry, &QuantizationParams) -> Vec<f64> + Sync,
{
    let mut cases = Vec::new();
    for &ell in ells {
        for &a in lefts {
            let geom = s.geometry(a)?;
            let params = s.params(ell)?;
            cases.push((geom, params));
        }
    }
    let h = step(s);
    let q0 = s.q0();
    let blocks: Vec<Vec<Vec<f64>>> = cases
        .par_iter()
        .map(|(geom, params)| {
            let (lo, hi) = x_range(s, *geom, right_pad);
            samples(lo, hi, h)
                .into_iter()
                .map(|x| {
                    let b = if geom.is_bounded() {
                        geom.b() / q0
                    } else {
                        f64::INFINITY
                    };
                    let mut r = vec![params.ell / q0, geom.a() / q0, b, x / q0];
                    r.extend(row(x, *geom, params));
                    r
                })
                .collect()
        })
        .collect();
    Ok(blocks.into_iter().flatten().collect())
}

fn table_from(name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> Table {
    let mut t = Table::new(name, header);
    for r in rows {
        t.push(&r);
    }
    t
}

pub fn window(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let rows = sweep(
        s,
        &s.ells(&[0.5, 0.1]),
        &s.lefts(&[0.0, 2.0, 4.0]),
        2.0,
        |x, geom, params| {
            let w = Window::operator(geom, params);
            let q0 = params.q0;
            vec![w.value(x), w.d1(x) * q0, w.d2(x) * q0 * q0]
        },
    )?;
    Ok(vec![table_from(
        name,
        &[
            "ell [q0]",
            "a [q0]",
            "b [q0]",
            "x [q0]",
            "B [1]",
            "dB [1/q0]",
            "d2B [1/q0^2]",
        ],
        rows,
    )])
}

pub fn operator(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let rows = sweep(
        s,
        &s.ells(&[0.1]),
        &s.lefts(&[0.0, 2.0, 4.0]),
        2.0,
        |x, geom, params| {
            vec![
                position_symbol(x, geom, params) / params.q0,
                spectral_density(x, geom, params),
            ]
        },
    )?;
    Ok(vec![table_from(
        name,
        &[
            "ell [q0]",
            "a [q0]",
            "b [q0]",
            "x [q0]",
            "Q [q0]",
            "dQ/dx [1]",
        ],
        rows,
    )])
}

pub fn commutator(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let rows = sweep(
        s,
        &s.ells(&[0.1]),
        &s.lefts(&[0.0, 2.0, 4.0]),
        5.0,
        |x, geom, params| {
            let c = commutator_c(x, geom, params);
            vec![c, (c.abs() - 1.0).abs()]
        },
    )?;
    Ok(vec![table_from(
        name,
        &[
            "ell [q0]",
            "a [q0]",
            "b [q0]",
            "x [q0]",
            "C_om [1]",
            "departure [1]",
        ],
        rows,
    )])
}

pub fn mass_profile(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let rows = sweep(
        s,
        &s.ells(&[0.1]),
        &s.lefts(&[0.0, 2.0, 4.0]),
        2.0,
        |x, geom, params| {
            vec![
                mass(x, geom, params) / params.mass,
                mass_inverse(x, geom, params) * params.mass,
            ]
        },
    )?;
    Ok(vec![table_from(
        name,
        &[
            "ell [q0]",
            "a [q0]",
            "b [q0]",
            "x [q0]",
            "M [m]",
            "inverse_mass [1/m]",
        ],
        rows,
    )])
}

pub fn potentials(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let rows = sweep(
        s,
        &s.ells(&[0.1, 0.3, 0.5]),
        &s.lefts(&[0.0]),
        2.0,
        |x, geom, params| {
            let alpha = params.alpha();
            vec![
                potential(PotentialSign::Minus, x, geom, params) / alpha,
                potential(PotentialSign::Plus, x, geom, params) / alpha,
            ]
        },
    )?;
    Ok(vec![table_from(
        name,
        &[
            "ell [q0]",
            "a [q0]",
            "b [q0]",
            "x [q0]",
            "V- [alpha]",
            "V+ [alpha]",
        ],
        rows,
    )])
}

pub fn force(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let momenta = match s.p {
        Some(p) => vec![p],
        None => vec![0.0, 20.0],
    };
    let mut header = vec!["p [hbar/q0]"];
    header.extend(["ell [q0]", "a [q0]", "b [q0]", "x [q0]", "F [F0]"]);
    let mut t = Table::new(name, &header);
    for p in momenta {
        let rows = sweep(
            s,
            &s.ells(&[0.1, 0.3, 0.5]),
            &s.lefts(&[0.0]),
            2.0,
            |x, geom, params| {
                let sys = SemiClassical::new(geom, params);
                let state = PhaseState::new(x, p * params.hbar / params.q0);
                vec![dynamics::force(&sys, state) / params.force_unit()]
            },
        )?;
        for r in rows {
            let mut full = vec![p];
            full.extend(r);
            t.push(&full);
        }
    }
    Ok(vec![t])
}

pub fn portraits(s: &Settings, name: &str, quadrature: bool) -> Result<Vec<Table>, CliError> {
    let p_rel = s.p.unwrap_or(20.0);
    let method = if quadrature {
        PortraitMethod::Quadrature
    } else {
        PortraitMethod::ClosedForm
    };
    let mut cases = Vec::new();
    for ell in s.ells(&[0.1]) {
        for a in s.lefts(&[0.0]) {
            cases.push((s.geometry(a)?, s.params(ell)?));
        }
    }
    let h = s
        .grid_h
        .unwrap_or(s.len(if quadrature { 0.1 } else { 0.01 }));
    let q0 = s.q0();
    let blocks: Vec<Result<Vec<Vec<f64>>, Error>> = cases
        .par_iter()
        .map(|(geom, params)| {
            let (lo, hi) = x_range(s, *geom, 2.0);
            let p = p_rel * params.hbar / q0;
            samples(lo, hi, h)
                .into_iter()
                .map(|q| {
                    let at = PhaseState::new(q, p);
                    let mut row = vec![params.ell / q0, geom.a() / q0, q / q0];
                    let units = [1.0, q0, params.hbar / q0, params.alpha()];
                    for (kind, unit) in ObservableKind::ALL.into_iter().zip(units) {
                        row.push(
                            portrait(ObservableSpec::restricted(kind), at, *geom, params, method)?
                                / unit,
                        );
                    }
                    Ok(row)
                })
                .collect()
        })
        .collect();
    let mut t = Table::new(
        name,
        &[
            "ell [q0]",
            "a [q0]",
            "q [q0]",
            "unit [1]",
            "position [q0]",
            "momentum [hbar/q0]",
            "kinetic [alpha]",
        ],
    );
    t.note(format!(
        "p = {p_rel} hbar/q0, method = {}",
        if quadrature {
            "quadrature"
        } else {
            "closed-form"
        }
    ));
    for block in blocks {
        for r in block.map_err(numerical)? {
            t.push(&r);
        }
    }
    Ok(vec![t])
}

pub fn uncertainty(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let geom = s.geometry(s.a.unwrap_or(0.0))?;
    let params = s.params(s.ell.unwrap_or(s.len(0.1)))?;
    let width = s.width.unwrap_or(s.len(1.0));
    let lo = s.c_min.unwrap_or(s.len(-5.0));
    let hi = s.c_max.unwrap_or(s.len(15.0));
    let centers = samples(lo, hi, s.c_step.unwrap_or(s.len(0.05)));
    let scan = com_scan(&centers, width, geom, &params).map_err(numerical)?;
    let mut t = Table::new(name, &["c_cen [q0]", "value [1]"]);
    t.note(format!("probe width = {} q0", width / s.q0()));
    for pt in scan {
        t.push(&[pt.center / s.q0(), pt.value]);
    }
    Ok(vec![t])
}

struct Check {
    pair: usize,
    h: f64,
    label: &'static str,
    oracle: Complex64,
    reference: Complex64,
    tolerance: f64,
}

const PROBE_PAIRS: [[(f64, f64, f64); 2]; 4] = [
    [(1.0, 0.3, 3.0), (1.3, 0.3, -2.0)],
    [(9.5, 0.5, 1.0), (9.2, 0.4, 0.0)],
    [(0.0, 1.0, 2.0), (0.5, 1.0, -2.0)],
    [(5.0, 1.0, 0.0), (5.5, 0.7, 4.0)],
];

fn pair_checks(
    index: usize,
    pair: &[(f64, f64, f64); 2],
    div: f64,
    geom: Geometry,
    params: &QuantizationParams,
    q0: f64,
) -> Result<Vec<Check>, Error> {
    let probe = |(c, w, k): (f64, f64, f64)| GaussianProbe::new(c * q0, w * q0, k / q0);
    let (bra, ket) = (probe(pair[0])?, probe(pair[1])?);
    let lo = (bra.center - 8.0 * bra.width).min(ket.center - 8.0 * ket.width);
    let hi = (bra.center + 8.0 * bra.width).max(ket.center + 8.0 * ket.width);
    let h = params.ell / div;
    let grid = Grid::covering(geom, params, lo, hi, 0.0, h)?;
    let phi = bra.sample(&grid)?;
    let psi = ket.sample(&grid)?;

    let matrix = |op: fuzzybox_core::BandedOperator| -> Result<Complex64, Error> {
        phi.inner(&op.apply_to(&psi)?)
    };
    let oracle = |kind, restricted| {
        let spec = if restricted {
            ObservableSpec::restricted(kind)
        } else {
            ObservableSpec::unrestricted(kind)
        };
        quantize_element(spec, &phi, &psi, geom, params)
    };
    let check = |label, oracle, reference, tolerance| Check {
        pair: index,
        h,
        label,
        oracle,
        reference,
        tolerance,
    };
    Ok(vec![
        check(
            "identity",
            oracle(ObservableKind::Unit, false)?,
            phi.inner(&psi)?,
            1e-8,
        ),
        check(
            "window",
            oracle(ObservableKind::Unit, true)?,
            matrix(window_matrix(&grid, geom, params)?)?,
            1e-4,
        ),
        check(
            "position",
            oracle(ObservableKind::Position, true)?,
            matrix(position_matrix(&grid, geom, params)?)?,
            1e-4,
        ),
        check(
            "momentum",
            oracle(ObservableKind::Momentum, true)?,
            matrix(momentum_matrix(&grid, geom, params)?)?,
            1e-4,
        ),
        check(
            "kinetic-anticommutator",
            oracle(ObservableKind::Kinetic, true)?,
            matrix(hamiltonian_matrix(
                OrderingChoice::AnticommutatorHalf,
                &grid,
                geom,
                params,
            )?)?,
            1e-4,
        ),
        check(
            "kinetic-sandwich",
            oracle(ObservableKind::Kinetic, true)?,
            matrix(hamiltonian_matrix(
                OrderingChoice::PSandwich,
                &grid,
                geom,
                params,
            )?)?,
            1e-4,
        ),
    ])
}

/// Returns the table and the number of checks above tolerance.
pub fn quantize_check(s: &Settings, name: &str) -> Result<(Vec<Table>, usize), CliError> {
    let geom = s.geometry(s.a.unwrap_or(0.0))?;
    let params = s.params(s.ell.unwrap_or(s.len(0.1)))?;
    let q0 = s.q0();
    let jobs: Vec<(usize, f64)> = (0..PROBE_PAIRS.len())
        .flat_map(|i| [(i, 20.0), (i, 40.0)])
        .collect();
    let results: Vec<Result<Vec<Check>, Error>> = jobs
        .par_iter()
        .map(|&(i, div)| pair_checks(i, &PROBE_PAIRS[i], div, geom, &params, q0))
        .collect();

    let mut t = Table::new(
        name,
        &[
            "pair [1]",
            "h [q0]",
            "check",
            "oracle_re [1]",
            "oracle_im [1]",
            "matrix_re [1]",
            "matrix_im [1]",
            "discrepancy [1]",
            "tolerance [1]",
            "status",
        ],
    );
    t.note("values in units of hbar/q0 for momentum and alpha for kinetic rows");
    let fmt = fuzzybox_core::banded::fmt_f64;
    let mut failures = 0;
    for block in results {
        for c in block.map_err(numerical)? {
            let unit = match c.label {
                "position" => q0,
                "momentum" => params.hbar / q0,
                "kinetic-anticommutator" | "kinetic-sandwich" => params.alpha(),
                _ => 1.0,
            };
            let diff = (c.oracle - c.reference).norm() / unit;
            let ok = diff < c.tolerance;
            failures += usize::from(!ok);
            t.push_cells(vec![
                c.pair.to_string(),
                fmt(c.h / q0),
                c.label.to_string(),
                fmt(c.oracle.re / unit),
                fmt(c.oracle.im / unit),
                fmt(c.reference.re / unit),
                fmt(c.reference.im / unit),
                fmt(diff),
                fmt(c.tolerance),
                if ok { "pass" } else { "fail" }.to_string(),
            ]);
        }
    }
    Ok((vec![t], failures))
}

pub fn simulate(s: &Settings, name: &str, hard_wall: bool) -> Result<Vec<Table>, CliError> {
    let geom = s.geometry(s.a.unwrap_or(0.0))?;
    let params = s.params(s.ell.unwrap_or(s.len(0.1)))?;
    let q0 = s.q0();
    let (hbar, m) = (params.hbar, params.mass);
    let t_unit = m * q0 * q0 / hbar;
    let p_unit = hbar / q0;
    let start = PhaseState::new(
        s.q.unwrap_or(geom.a() + s.len(5.0)),
        s.p.unwrap_or(20.0) * p_unit,
    );
    let t_end = s.t_end.unwrap_or(10.0) * t_unit;
    let dt = s.dt.unwrap_or(2.5e-4) * t_unit;
    let stride = s.stride.unwrap_or(40);

    let traj = if hard_wall {
        hard_wall_reference(start, geom, m, t_end, dt)
    } else {
        dynamics::integrate(&SemiClassical::new(geom, &params), start, t_end, dt)
    }
    .map_err(numerical)?;

    let mut t = Table::new(
        name,
        &[
            "t [m q0^2/hbar]",
            "q [q0]",
            "p [hbar/q0]",
            "E [alpha]",
            "F [F0]",
        ],
    );
    t.note(format!(
        "system = {}",
        if hard_wall {
            "hard-wall"
        } else {
            "semi-classical"
        }
    ));
    t.note(format!(
        "max_relative_drift = {}",
        fuzzybox_core::banded::fmt_f64(traj.max_relative_drift())
    ));
    t.note(format!("truncated = {}", traj.truncated));
    let last = traj.len() - 1;
    for i in (0..traj.len()).filter(|&i| i % stride == 0 || i == last) {
        let st = traj.states[i];
        t.push(&[
            traj.times[i] / t_unit,
            st.q / q0,
            st.p / p_unit,
            traj.energies[i] / params.alpha(),
            traj.forces[i] / params.force_unit(),
        ]);
    }
    Ok(vec![t])
}

pub fn limit_study(s: &Settings, name: &str) -> Result<Vec<Table>, CliError> {
    let geom = s.geometry(s.a.unwrap_or(0.0))?;
    if s.ell.is_some() || s.hbar.is_some() {
        return Err(CliError::Config(
            "limit-study sets ell and hbar itself; use levels".into(),
        ));
    }
    let start = PhaseState::new(s.q.unwrap_or(geom.a() + s.len(5.0)), s.p.unwrap_or(1.0));
    let seq = default_limit_sequence(s.levels.unwrap_or(6));
    let rows = classical_limit_study(
        start,
        geom,
        s.mass(),
        &seq,
        s.t_end.unwrap_or(10.0),
        s.dt.unwrap_or(1e-2),
    )
    .map_err(numerical)?;
    let mut t = Table::new(
        name,
        &[
            "n [1]",
            "ell [q0]",
            "hbar [1]",
            "interior_deviation [q0]",
            "penetration [q0]",
            "max_abs_force [1]",
            "energy_drift [1]",
        ],
    );
    t.note("sequence ell_n = 0.4/2^n, hbar_n = ell_n^2 in model units");
    let fmt = fuzzybox_core::banded::fmt_f64;
    for r in rows {
        let mut cells = vec![r.n.to_string()];
        cells.extend(
            [
                r.ell,
                r.hbar,
                r.interior_deviation,
                r.penetration,
                r.max_abs_force,
                r.energy_drift,
            ]
            .into_iter()
            .map(fmt),
        );
        t.push_cells(cells);
    }
    Ok(vec![t])
}

pub fn figures(s: &Settings) -> Result<Vec<Table>, CliError> {
    let mut out = Vec::new();
    out.extend(window(s, "fig1_window")?);
    out.extend(operator(s, "fig2_position")?);
    out.extend(commutator(s, "fig3_commutator")?);
    out.extend(uncertainty(s, "fig4_com_scan")?);
    out.extend(mass_profile(s, "fig5_mass")?);
    out.extend(potentials(s, "fig6_potentials")?);
    out.extend(force(s, "fig7_force")?);
    Ok(out)
}
