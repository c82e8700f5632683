//! Parameter-plane sweeps producing phase diagrams of entanglement classes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::covariance::CovarianceMatrix;
use crate::entanglement::{classify, ClassifyOptions, EntanglementClass, EntanglementReport};
use crate::error::{Error, Result};
use crate::model::{Model, RatioParams};
use crate::quad_engine::{self, QuadratureSettings};
use crate::residue;

/// Environment variable capping the number of sweep workers.
pub const WORKERS_ENV: &str = "TRIPARTITE_WORKERS";

/// Exact CSV header of a sweep.
pub const CSV_HEADER: &str = "axis1,axis2,class,nu_L,nu_C,nu_R,EN_L,EN_C,EN_R,phys_margin,boundary";

/// Class column value of a cell whose evaluation failed.
pub const FAILED_LABEL: &str = "FAILED";

/// Entrywise cross-engine tolerance `max(abs, rel * |x|)`.
pub const ENGINE_ABS_TOL: f64 = 1e-8;
pub const ENGINE_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Quadrature,
    #[default]
    Residue,
    Both,
}

impl Engine {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quadrature" => Some(Engine::Quadrature),
            "residue" => Some(Engine::Residue),
            "both" => Some(Engine::Both),
            _ => None,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Quadrature => "quadrature",
            Engine::Residue => "residue",
            Engine::Both => "both",
        })
    }
}

/// Sweepable dimensionless parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    /// `k / m Omega^2`
    #[serde(rename = "k")]
    Coupling,
    /// `2 k_B T / hbar Omega`
    #[serde(rename = "T")]
    Temperature,
    /// `2 k_B dT / hbar Omega`
    #[serde(rename = "dT")]
    DeltaTemperature,
    /// `(omega_C - Omega) / Omega`
    #[serde(rename = "delta")]
    Detuning,
    /// `gamma / Omega`
    #[serde(rename = "gamma")]
    Gamma,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Coupling => "k",
            Axis::Temperature => "T",
            Axis::DeltaTemperature => "dT",
            Axis::Detuning => "delta",
            Axis::Gamma => "gamma",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Axis::Coupling, Axis::Temperature, Axis::DeltaTemperature, Axis::Detuning, Axis::Gamma]
            .into_iter()
            .find(|a| a.name() == s)
    }

    pub fn apply(self, p: &mut RatioParams, v: f64) {
        match self {
            Axis::Coupling => p.coupling = v,
            Axis::Temperature => p.temperature = v,
            Axis::DeltaTemperature => p.delta_temperature = v,
            Axis::Detuning => p.frequencies[1] = p.frequencies[0] + v,
            Axis::Gamma => p.gamma = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub param: Axis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl AxisSpec {
    pub fn linear(param: Axis, min: f64, max: f64, points: usize) -> Self {
        Self { param, min, max, points, log: false }
    }

    pub fn logarithmic(param: Axis, min: f64, max: f64, points: usize) -> Self {
        Self { param, min, max, points, log: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Config(format!(
                "axis {}: need finite min < max, got [{}, {}]",
                self.param.name(),
                self.min,
                self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("axis {}: at least 2 points", self.param.name())));
        }
        if self.log && !(self.min > 0.0) {
            return Err(Error::Config(format!("axis {}: log axis needs min > 0", self.param.name())));
        }
        Ok(())
    }

    /// Grid values. Linear axes are built symmetrically about the midpoint, so
    /// an axis with `min = -max` holds exact negatives of its own values.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let d = (n - 1) as f64;
        if self.log {
            let (a, b) = (self.min.ln(), self.max.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / d).exp()).collect()
        } else {
            let mid = 0.5 * (self.min + self.max);
            let half = 0.5 * (self.max - self.min);
            (0..n)
                .map(|i| mid + half * ((2 * i) as f64 - d) / d)
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub engine: Engine,
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    /// Values of every parameter not on an axis.
    #[serde(default)]
    pub fixed: RatioParams,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    #[serde(default)]
    pub classify: ClassifyOptions,
    /// Fraction of cells re-evaluated by quadrature when the engine is `residue`.
    #[serde(default = "default_spot_fraction")]
    pub spot_check_fraction: f64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Directory for the CSV, JSON sidecar and plot script.
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn default_spot_fraction() -> f64 {
    0.01
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()?;
        if self.axis1.param == self.axis2.param {
            return Err(Error::Config("axes must reference distinct parameters".into()));
        }
        if !(0.0..=1.0).contains(&self.spot_check_fraction) {
            return Err(Error::Config("spot_check_fraction must lie in [0, 1]".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        self.quadrature.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axis1.points * self.axis2.points
    }

    /// Parameters of cell `(i, j)`, `i` along axis 1.
    pub fn params_at(&self, v1: f64, v2: f64) -> RatioParams {
        let mut p = self.fixed;
        self.axis1.param.apply(&mut p, v1);
        self.axis2.param.apply(&mut p, v2);
        p
    }
}

/// A solved point: covariance used for classification plus cross-engine data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSolution {
    pub covariance: CovarianceMatrix,
    pub residue: Option<CovarianceMatrix>,
    pub quadrature: Option<CovarianceMatrix>,
    /// Worst entrywise deviation in units of the cross-engine tolerance; `<= 1` agrees.
    pub engine_deviation: Option<f64>,
    /// Residue engine refused the point and quadrature was used instead.
    pub fallback: bool,
}

/// Evaluates the stationary covariance with the selected engine(s). The
/// residue engine falls back to quadrature on degenerate roots or zero temperature.
pub fn solve_point(params: &RatioParams, engine: Engine, settings: &QuadratureSettings) -> Result<PointSolution> {
    let model = Model::from_ratios(params)?;
    let quad = || quad_engine::solve(&model, settings).map(|q| q.covariance);
    let res = || residue::steady_covariance_residue(&model.chain, &model.bath);
    let refusable = |e: &Error| matches!(e, Error::RootMultiplicity { .. } | Error::ZeroTemperature);
    match engine {
        Engine::Quadrature => {
            let q = quad()?;
            Ok(PointSolution { covariance: q.clone(), residue: None, quadrature: Some(q), engine_deviation: None, fallback: false })
        }
        Engine::Residue => match res() {
            Ok(r) => Ok(PointSolution { covariance: r.clone(), residue: Some(r), quadrature: None, engine_deviation: None, fallback: false }),
            Err(e) if refusable(&e) => {
                let q = quad()?;
                Ok(PointSolution { covariance: q.clone(), residue: None, quadrature: Some(q), engine_deviation: None, fallback: true })
            }
            Err(e) => Err(e),
        },
        Engine::Both => {
            let q = quad()?;
            let (r, dev, fallback) = match res() {
                Ok(r) => {
                    let d = r.deviation(&q, ENGINE_ABS_TOL, ENGINE_REL_TOL);
                    (Some(r), Some(d), false)
                }
                Err(e) if refusable(&e) => (None, None, true),
                Err(e) => return Err(e),
            };
            Ok(PointSolution { covariance: q.clone(), residue: r, quadrature: Some(q), engine_deviation: dev, fallback })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub axis1: f64,
    pub axis2: f64,
    /// `None` when the cell failed.
    pub class: Option<EntanglementClass>,
    pub nu_min: [f64; 3],
    pub log_negativity: [f64; 3],
    pub phys_margin: f64,
    pub boundary: bool,
    /// Cross-engine deviation (tolerance units) where both engines ran.
    pub engine_deviation: Option<f64>,
    pub fallback: bool,
    pub error: Option<String>,
}

impl CellRecord {
    fn failed(axis1: f64, axis2: f64, e: &Error) -> Self {
        Self {
            axis1,
            axis2,
            class: None,
            nu_min: [f64::NAN; 3],
            log_negativity: [f64::NAN; 3],
            phys_margin: f64::NAN,
            boundary: false,
            engine_deviation: None,
            fallback: false,
            error: Some(e.to_string()),
        }
    }

    fn from_report(axis1: f64, axis2: f64, sol: &PointSolution, rep: &EntanglementReport) -> Self {
        Self {
            axis1,
            axis2,
            class: Some(rep.class),
            nu_min: rep.bipartitions.map(|b| b.nu_min),
            log_negativity: rep.bipartitions.map(|b| b.log_negativity),
            phys_margin: rep.physicality_margin,
            boundary: rep.boundary,
            engine_deviation: sol.engine_deviation,
            fallback: sol.fallback,
            error: None,
        }
    }

    pub fn label(&self) -> &'static str {
        self.class.map_or(FAILED_LABEL, |c| c.label())
    }
}

/// Solves and classifies one parameter point.
pub fn evaluate_cell(
    params: &RatioParams,
    engine: Engine,
    settings: &QuadratureSettings,
    options: &ClassifyOptions,
) -> Result<(PointSolution, EntanglementReport)> {
    let sol = solve_point(params, engine, settings)?;
    let rep = classify(&sol.covariance, options)?;
    Ok((sol, rep))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramGrid {
    pub config: SweepConfig,
    pub axis1_values: Vec<f64>,
    pub axis2_values: Vec<f64>,
    /// Row-major with axis 1 fastest: cell `(i, j)` at `j * n1 + i`.
    pub cells: Vec<CellRecord>,
    /// Indices of cells re-checked by quadrature.
    pub spot_checks: Vec<usize>,
}

impl PhaseDiagramGrid {
    pub fn cell(&self, i: usize, j: usize) -> &CellRecord {
        &self.cells[j * self.axis1_values.len() + i]
    }

    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.class.is_none()).count()
    }

    pub fn failure_fraction(&self) -> f64 {
        self.failed() as f64 / self.cells.len().max(1) as f64
    }

    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.label().to_string()).or_insert(0) += 1;
        }
        m
    }

    pub fn classes(&self) -> BTreeSet<EntanglementClass> {
        self.cells.iter().filter_map(|c| c.class).collect()
    }

    /// Classes along axis 2 at axis-1 index `i`.
    pub fn column(&self, i: usize) -> Vec<Option<EntanglementClass>> {
        (0..self.axis2_values.len()).map(|j| self.cell(i, j).class).collect()
    }

    /// Classes along axis 1 at axis-2 index `j`.
    pub fn row(&self, j: usize) -> Vec<Option<EntanglementClass>> {
        (0..self.axis1_values.len()).map(|i| self.cell(i, j).class).collect()
    }

    /// Largest cross-engine deviation among checked cells.
    pub fn worst_engine_deviation(&self) -> Option<f64> {
        self.cells.iter().filter_map(|c| c.engine_deviation).reduce(f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(CSV_HEADER.split(',')).map_err(io)?;
        for c in &self.cells {
            let mut rec = vec![c.axis1.to_string(), c.axis2.to_string(), c.label().to_string()];
            rec.extend(c.nu_min.iter().map(|v| v.to_string()));
            rec.extend(c.log_negativity.iter().map(|v| v.to_string()));
            rec.push(c.phys_margin.to_string());
            rec.push(c.boundary.to_string());
            out.write_record(&rec).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Configuration and run summary for provenance.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "generator": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
            "config": self.config,
            "csv_header": CSV_HEADER,
            "ordering": "row-major, axis1 fastest",
            "axis1": { "name": self.config.axis1.param.name(), "values": self.axis1_values },
            "axis2": { "name": self.config.axis2.param.name(), "values": self.axis2_values },
            "cells": self.cells.len(),
            "failed": self.failed(),
            "class_counts": self.class_counts(),
            "boundary_cells": self.cells.iter().filter(|c| c.boundary).count(),
            "fallback_cells": self.cells.iter().filter(|c| c.fallback).count(),
            "spot_checks": self.spot_checks,
            "worst_engine_deviation": self.worst_engine_deviation(),
            "failures": self.cells.iter().enumerate().filter_map(|(n, c)| c.error.as_ref().map(|e| serde_json::json!({"cell": n, "error": e}))).collect::<Vec<_>>(),
        })
    }

    /// Matplotlib script rendering the class map from the CSV next to it.
    pub fn plot_script(&self, csv_name: &str) -> String {
        PLOT_TEMPLATE
            .replace("@CSV@", csv_name)
            .replace("@TITLE@", &self.config.name)
            .replace("@X@", self.config.axis1.param.name())
            .replace("@Y@", self.config.axis2.param.name())
            .replace("@N1@", &self.axis1_values.len().to_string())
            .replace("@N2@", &self.axis2_values.len().to_string())
            .replace("@XLOG@", if self.config.axis1.log { "True" } else { "False" })
            .replace("@YLOG@", if self.config.axis2.log { "True" } else { "False" })
    }

    /// Writes `<stem>.csv`, `<stem>.json` and `<stem>_plot.py` into `dir`.
    pub fn write_outputs(&self, dir: &Path, stem: &str) -> Result<[std::path::PathBuf; 3]> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        let plot_path = dir.join(format!("{stem}_plot.py"));
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(&csv_path)?))?;
        let json = serde_json::to_string_pretty(&self.sidecar()).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&json_path, json + "\n")?;
        std::fs::write(&plot_path, self.plot_script(&format!("{stem}.csv")))?;
        Ok([csv_path, json_path, plot_path])
    }
}

const PLOT_TEMPLATE: &str = r##"#!/usr/bin/env python3
import csv
import os
import sys

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import BoundaryNorm, ListedColormap

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "@CSV@")
codes = {"C1": 1, "C2": 2, "C3": 3, "C4": 4, "C5": 5, "FAILED": 0}
n1, n2 = @N1@, @N2@
with open(path) as f:
    rows = list(csv.DictReader(f))
x = np.array([float(r["axis1"]) for r in rows]).reshape(n2, n1)
y = np.array([float(r["axis2"]) for r in rows]).reshape(n2, n1)
c = np.array([codes[r["class"]] for r in rows]).reshape(n2, n1)

cmap = ListedColormap(["black", "#d62728", "#ff7f0e", "#2ca02c", "#9467bd", "#1f77b4"])
norm = BoundaryNorm(np.arange(-0.5, 6.5), cmap.N)
fig, ax = plt.subplots(figsize=(6, 5))
mesh = ax.pcolormesh(x, y, c, cmap=cmap, norm=norm, shading="nearest")
if @XLOG@:
    ax.set_xscale("log")
if @YLOG@:
    ax.set_yscale("log")
bar = fig.colorbar(mesh, ticks=range(6))
bar.ax.set_yticklabels(["failed", "C1", "C2", "C3", "C4", "C5"])
ax.set_xlabel("@X@")
ax.set_ylabel("@Y@")
ax.set_title("@TITLE@")
fig.tight_layout()
out = os.path.splitext(path)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
"##;

fn worker_count(config: &SweepConfig) -> usize {
    let env = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0);
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut n = config.workers.unwrap_or(avail);
    if let Some(cap) = env {
        n = n.min(cap);
    }
    n.max(1)
}

fn spot_check_indices(config: &SweepConfig) -> Vec<usize> {
    if config.engine != Engine::Residue || config.spot_check_fraction == 0.0 {
        return Vec::new();
    }
    let n = config.cell_count();
    let k = ((n as f64 * config.spot_check_fraction).ceil() as usize).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

/// Evaluates every cell on a bounded worker pool. Output order and content do
/// not depend on scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<PhaseDiagramGrid> {
    config.validate()?;
    let v1 = config.axis1.values();
    let v2 = config.axis2.values();
    let n1 = v1.len();
    let spot = spot_check_indices(config);
    let spot_set: BTreeSet<usize> = spot.iter().copied().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(config))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let cells: Vec<CellRecord> = pool.install(|| {
        (0..config.cell_count())
            .into_par_iter()
            .map(|n| {
                let (a, b) = (v1[n % n1], v2[n / n1]);
                let p = config.params_at(a, b);
                let engine = if spot_set.contains(&n) { Engine::Both } else { config.engine };
                match evaluate_cell(&p, engine, &config.quadrature, &config.classify) {
                    Ok((sol, rep)) => {
                        let mut cell = CellRecord::from_report(a, b, &sol, &rep);
                        if engine == Engine::Both && config.engine == Engine::Residue {
                            // classify with the engine the sweep asked for
                            if let Some(r) = &sol.residue {
                                match classify(r, &config.classify) {
                                    Ok(rr) => {
                                        let dev = cell.engine_deviation;
                                        cell = CellRecord::from_report(a, b, &sol, &rr);
                                        cell.engine_deviation = dev;
                                    }
                                    Err(e) => return CellRecord::failed(a, b, &e),
                                }
                            }
                        }
                        cell
                    }
                    Err(e) => CellRecord::failed(a, b, &e),
                }
            })
            .collect()
    });
    Ok(PhaseDiagramGrid {
        config: config.clone(),
        axis1_values: v1,
        axis2_values: v2,
        cells,
        spot_checks: spot,
    })
}

/// Figure presets on a 60 x 60 grid.
pub fn preset(name: &str) -> Option<SweepConfig> {
    const N: usize = 60;
    let base = |name: &str, description: &str, axis1: AxisSpec, axis2: AxisSpec, fixed: RatioParams| SweepConfig {
        name: name.to_string(),
        description: description.to_string(),
        engine: Engine::Residue,
        axis1,
        axis2,
        fixed,
        quadrature: QuadratureSettings::default(),
        classify: ClassifyOptions::default(),
        spot_check_fraction: default_spot_fraction(),
        workers: None,
        seed: 0,
        output_dir: None,
    };
    let fig = RatioParams {
        frequencies: [1.0; 3],
        coupling: 0.05,
        temperature: 0.35,
        delta_temperature: 0.0,
        gamma: 0.01,
        cutoff: 50.0,
    };
    // |dT| < 2T: the symmetric dT axis stops just inside the bound
    let dt = AxisSpec::linear(Axis::DeltaTemperature, -0.69, 0.69, N);
    let k_axis = AxisSpec::linear(Axis::Coupling, 0.1 / N as f64, 0.1, N);
    Some(match name {
        "fig2" => base(
            "fig2",
            "classes over coupling and temperature; resonant, equal baths, gamma = 0.01, omega_c = 50; open ranges (0, 0.1] x (0, 1] start one step in",
            k_axis,
            AxisSpec::linear(Axis::Temperature, 1.0 / N as f64, 1.0, N),
            RatioParams { temperature: 0.05, ..fig },
        ),
        "fig2-inset" => base(
            "fig2-inset",
            "classes over coupling and dissipation at T = 0.05; resonant, equal baths, omega_c = 50; gamma on a log axis",
            AxisSpec::linear(Axis::Coupling, 0.01 / N as f64, 0.01, N),
            AxisSpec::logarithmic(Axis::Gamma, 1e-3, 0.3, N),
            RatioParams { temperature: 0.05, ..fig },
        ),
        "fig3a" => base(
            "fig3a",
            "classes over central detuning and temperature gradient; k = 0.05, T = 0.35",
            AxisSpec::linear(Axis::Detuning, 0.0, 3.0, N),
            dt,
            fig,
        ),
        "fig3b" => base(
            "fig3b",
            "classes over coupling and temperature gradient; resonant, T = 0.35",
            k_axis,
            dt,
            fig,
        ),
        "fig3c" => base(
            "fig3c",
            "classes over coupling and temperature gradient; frequencies (1, 2, 3), T = 0.35",
            k_axis,
            dt,
            RatioParams { frequencies: [1.0, 2.0, 3.0], ..fig },
        ),
        _ => return None,
    })
}

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig2-inset", "fig3a", "fig3b", "fig3c"];
