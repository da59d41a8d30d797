//! Executes a validated configuration and assembles the result table.

use rayon::prelude::*;

use escatter_core::density_matrix::{build_meridian_matrix, von_neumann_entropy};
use escatter_core::entropy::{entropy_point, ring_entropy};
use escatter_core::spin::{compare_channels, equator_entropies, equator_for_width, PostSelection};
use escatter_core::{Context, Geometry, SpinChannel};
use thiserror::Error;

use crate::config::{Command, GeometryArg, RunConfig};
use crate::output::{Row, Table, Value};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Runs on a dedicated pool of `cfg.threads` workers (0 = automatic).
pub fn run(cfg: &RunConfig) -> Result<Table, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()?;
    Ok(pool.install(|| execute(cfg)))
}

pub fn execute(cfg: &RunConfig) -> Table {
    match cfg.command {
        Command::SpinlessSweep | Command::SphereSweep => entropy_sweep(cfg),
        Command::VnCompare => vn_compare(cfg),
        Command::SpinSweep => spin_sweep(cfg),
        Command::PostselectRange => postselect(cfg),
        Command::Equator => equator(cfg),
    }
}

const SWEEP_COLUMNS: [&str; 11] = [
    "energy_ev",
    "packet_nm",
    "k_scale",
    "channel",
    "geometry",
    "epsilon",
    "delta_theta",
    "cells",
    "entropy",
    "modified_entropy",
    "jaynes_entropy",
];

fn entropy_sweep(cfg: &RunConfig) -> Table {
    let geometry = match (cfg.geometry, cfg.command) {
        (Some(GeometryArg::Sphere), _) | (None, Command::SphereSweep) => Geometry::Sphere,
        _ => Geometry::Rings,
    };
    let geometry_name = match geometry {
        Geometry::Rings => "rings",
        Geometry::Sphere => "sphere",
    };
    let mut t = Table::new(cfg.command.name(), &SWEEP_COLUMNS);
    let rows: Vec<Row> = cfg
        .energies_ev
        .par_iter()
        .map(|&e| {
            let lead = vec![
                Value::Num(e),
                Value::Num(cfg.packet_nm),
                Value::Num(cfg.k_scale),
                Value::Text(cfg.channel.name().into()),
                Value::Text(geometry_name.into()),
            ];
            match entropy_point(e, cfg.packet_nm, cfg.k_scale, cfg.channel, geometry) {
                Ok(p) => {
                    let mut v = lead;
                    v.extend([
                        Value::Num(p.epsilon),
                        Value::Num(p.delta_theta),
                        Value::Int(p.cells),
                        Value::Num(p.discrete),
                        Value::Num(p.modified),
                        Value::Num(p.jaynes),
                    ]);
                    Row::ok(v)
                }
                Err(err) => Row::failed(lead, SWEEP_COLUMNS.len(), err),
            }
        })
        .collect();
    t.rows = rows;
    t
}

const VN_COLUMNS: [&str; 10] = [
    "energy_ev",
    "packet_nm",
    "k_scale",
    "n_grid",
    "s_ring",
    "s_vn",
    "s_diagonal",
    "abs_diff",
    "trace",
    "max_eigenvalue",
];

fn vn_compare(cfg: &RunConfig) -> Table {
    let mut t = Table::new(cfg.command.name(), &VN_COLUMNS);
    // each matrix is built in parallel internally; energies run in order
    for &e in &cfg.energies_ev {
        let lead = vec![
            Value::Num(e),
            Value::Num(cfg.packet_nm),
            Value::Num(cfg.k_scale),
        ];
        let result = (|| {
            let ctx = Context::new(e, cfg.packet_nm, cfg.k_scale)?;
            let ring = ring_entropy(&ctx, SpinChannel::Spinless)?;
            let dm = build_meridian_matrix(&ctx, cfg.n_grid, cfg.grid_cap)?;
            let vn = von_neumann_entropy(&dm.matrix)?;
            Ok::<_, escatter_core::Error>((dm.thetas.len(), ring.bits, vn))
        })();
        t.rows.push(match result {
            Ok((n, ring, vn)) => {
                let mut v = lead;
                v.extend([
                    Value::Int(n as u64),
                    Value::Num(ring),
                    Value::Num(vn.entropy),
                    Value::Num(vn.diagonal_entropy),
                    Value::Num((vn.entropy - ring).abs()),
                    Value::Num(vn.trace),
                    Value::Num(vn.spectrum.first().copied().unwrap_or(0.0)),
                ]);
                Row::ok(v)
            }
            Err(err) => Row::failed(lead, VN_COLUMNS.len(), err),
        });
    }
    t
}

const SPIN_COLUMNS: [&str; 10] = [
    "energy_ev",
    "packet_nm",
    "k_scale",
    "s_spinless",
    "s_par",
    "s_par_modified",
    "s_ap",
    "s_ap_modified",
    "par_minus_spinless",
    "ap_minus_par",
];

fn spin_sweep(cfg: &RunConfig) -> Table {
    let mut t = Table::new(cfg.command.name(), &SPIN_COLUMNS);
    t.rows = cfg
        .energies_ev
        .par_iter()
        .map(|&e| {
            let lead = vec![
                Value::Num(e),
                Value::Num(cfg.packet_nm),
                Value::Num(cfg.k_scale),
            ];
            let result =
                Context::new(e, cfg.packet_nm, cfg.k_scale).and_then(|c| compare_channels(&c));
            match result {
                Ok(c) => {
                    let mut v = lead;
                    v.extend([
                        Value::Num(c.spinless),
                        Value::Num(c.parallel.bits),
                        Value::Num(c.parallel.modified),
                        Value::Num(c.antiparallel.bits),
                        Value::Num(c.antiparallel.modified),
                        Value::Num(c.parallel.modified - c.spinless),
                        Value::Num(c.antiparallel.modified - c.parallel.modified),
                    ]);
                    Row::ok(v)
                }
                Err(err) => Row::failed(lead, SPIN_COLUMNS.len(), err),
            }
        })
        .collect();
    t
}

const POSTSELECT_COLUMNS: [&str; 8] = [
    "energy_ev",
    "theta_r",
    "cells",
    "s_spinless",
    "s_par",
    "s_ap",
    "delta_s",
    "par_zero_weight",
];

/// Default ranges: every 0.05 rad up to the whole half shell.
pub fn default_theta_r(span: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (1..)
        .map(|k| 0.05 * k as f64)
        .take_while(|&x| x < span)
        .collect();
    v.push(span);
    v
}

fn postselect(cfg: &RunConfig) -> Table {
    let mut t = Table::new(cfg.command.name(), &POSTSELECT_COLUMNS);
    for &e in &cfg.energies_ev {
        let sel = match Context::new(e, cfg.packet_nm, cfg.k_scale)
            .and_then(|c| PostSelection::new(&c))
        {
            Ok(s) => s,
            Err(err) => {
                t.rows.push(Row::failed(
                    vec![Value::Num(e)],
                    POSTSELECT_COLUMNS.len(),
                    err,
                ));
                continue;
            }
        };
        enum Pick {
            Cells(usize),
            Range(f64),
        }
        let picks: Vec<Pick> = match (&cfg.cells, &cfg.theta_r) {
            (Some(c), _) => c.iter().map(|&n| Pick::Cells(n)).collect(),
            (None, Some(r)) => r.iter().map(|&x| Pick::Range(x)).collect(),
            (None, None) => default_theta_r(sel.grid.span())
                .into_iter()
                .map(Pick::Range)
                .collect(),
        };
        let rows: Vec<Row> = picks
            .par_iter()
            .map(|p| {
                let (lead, result) = match *p {
                    Pick::Cells(n) => (
                        vec![Value::Num(e), Value::Num(sel.grid.delta_theta * n as f64)],
                        sel.select_cells(n),
                    ),
                    Pick::Range(x) => (vec![Value::Num(e), Value::Num(x)], sel.select_range(x)),
                };
                match result {
                    Ok(r) => {
                        let mut v = lead;
                        v.extend([
                            Value::Int(r.cells as u64),
                            Value::Num(r.spinless),
                            Value::Num(r.parallel),
                            Value::Num(r.antiparallel),
                            Value::Num(r.delta),
                            Value::Flag(r.parallel_zero_weight),
                        ]);
                        Row::ok(v)
                    }
                    Err(err) => Row::failed(lead, POSTSELECT_COLUMNS.len(), err),
                }
            })
            .collect();
        t.rows.extend(rows);
    }
    t
}

const EQUATOR_COLUMNS: [&str; 7] = [
    "energy_ev",
    "delta_theta",
    "cells",
    "s_par",
    "s_par_modified",
    "s_ap",
    "s_ap_modified",
];

fn equator(cfg: &RunConfig) -> Table {
    let mut t = Table::new(cfg.command.name(), &EQUATOR_COLUMNS);
    let cases: Vec<(Value, Result<f64, escatter_core::Error>)> = match &cfg.delta_theta_mrad {
        Some(ws) => ws.iter().map(|&w| (Value::Missing, Ok(w * 1e-3))).collect(),
        None => cfg
            .energies_ev
            .iter()
            .map(|&e| {
                (
                    Value::Num(e),
                    Context::new(e, cfg.packet_nm, cfg.k_scale).map(|c| c.delta_theta),
                )
            })
            .collect(),
    };
    for (energy, width) in cases {
        let result = width.and_then(|w| Ok((w, equator_for_width(w)?)));
        t.rows.push(match result {
            Ok((w, eq)) => Row::ok(vec![
                energy,
                Value::Num(w),
                Value::Int(eq.cells as u64),
                Value::Num(eq.parallel),
                Value::Num(eq.parallel_modified),
                Value::Num(eq.antiparallel),
                Value::Num(eq.antiparallel_modified),
            ]),
            Err(err) => Row::failed(vec![energy], EQUATOR_COLUMNS.len(), err),
        });
    }
    t
}

/// Entropies of `n` equator cells, exposed for quick checks.
pub fn equator_cells(n: usize) -> Result<(f64, f64), escatter_core::Error> {
    let e = equator_entropies::<f64>(n)?;
    Ok((e.parallel_modified, e.antiparallel_modified))
}

/// One line per row for the terminal.
pub fn summary_line(table: &Table, index: usize) -> String {
    let row = &table.rows[index];
    let fields: Vec<String> = table
        .columns
        .iter()
        .zip(&row.values)
        .filter(|(_, v)| !matches!(v, Value::Missing | Value::Text(_)))
        .map(|(c, v)| match v {
            Value::Num(x) => format!("{c}={x:.6}"),
            Value::Int(n) => format!("{c}={n}"),
            Value::Flag(b) => format!("{c}={b}"),
            _ => unreachable!(),
        })
        .collect();
    format!(
        "{} [{}] {} {}",
        table.command,
        index,
        fields.join(" "),
        row.status
    )
}
