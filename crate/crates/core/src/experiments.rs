//! Figure and table sweeps, and the CSV reports they produce.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::doppler_shift;
use crate::closed_form::ClosedForm;
use crate::error::{Error, Result};
use crate::monte_carlo;
use crate::numerics::bessel_j0;
use crate::ris::RisModel;
use crate::scenario::{Architecture, PhaseErrorKind, Scenario, SystemConfig, Velocities};
use crate::system::SystemModel;

/// Bumped whenever a column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

/// Last instant of the Fig. 1-style curves.
pub const FIG1_HORIZON: usize = 400;

/// Per-instant sum SE at or below this counts as zero (bit/s/Hz).
pub const ZERO_SE: f64 = 0.01;

pub const FIG2_APS: [usize; 4] = [5, 10, 20, 30];
pub const FIG3_ELEMENTS: [usize; 4] = [16, 64, 144, 196];
pub const FIG3_AMPLIFICATIONS: [f64; 4] = [1.0, 2.0, 4.0, 6.0];
pub const FIG3_KAPPAS: [f64; 2] = [PI / 8.0, PI / 2.0];
pub const TABLE1_VELOCITIES: [f64; 5] = [60.0, 90.0, 120.0, 150.0, 180.0];

/// Relative closed-form vs Monte Carlo tolerance used by `validate`.
pub const VALIDATE_TOLERANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Table1,
    Validate,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Table1 => "table1",
            Experiment::Validate => "validate",
        }
    }
}

/// One CSV field.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }

    fn text(s: &str) -> Self {
        Cell::Text(s.to_string())
    }

    fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Empty => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: Option<&'static str>,
}

impl Column {
    const fn new(name: &'static str, unit: Option<&'static str>) -> Self {
        Self { name, unit }
    }

    /// Header label, `name [unit]` when the column has a unit.
    pub fn label(&self) -> String {
        match self.unit {
            Some(u) => format!("{} [{u}]", self.name),
            None => self.name.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    /// Hash of the exact config that produced this row.
    pub config_hash: String,
    pub cells: Vec<Cell>,
}

/// Which columns a line plot of the report should use.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotHints {
    pub x_column: &'static str,
    pub y_columns: Vec<&'static str>,
    pub error_column: Option<&'static str>,
    pub series_columns: Vec<&'static str>,
    pub x_label: &'static str,
    pub y_label: &'static str,
}

/// Output of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeReport {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub seed: u64,
    pub seeds_per_point: usize,
    pub trials: usize,
    pub config: SystemConfig,
    pub config_hash: String,
    pub columns: Vec<Column>,
    #[serde(skip)]
    pub records: Vec<Record>,
    pub plot: PlotHints,
}

impl SeReport {
    fn new(experiment: Experiment, cfg: &SystemConfig, opts: &RunOptions, columns: Vec<Column>, plot: PlotHints) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment,
            seed: opts.seed,
            seeds_per_point: opts.seeds_per_point,
            trials: opts.trials,
            config: cfg.clone(),
            config_hash: cfg.hash_hex(),
            columns,
            records: Vec::new(),
            plot,
        }
    }

    fn push(&mut self, cfg: &SystemConfig, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.records.push(Record {
            config_hash: cfg.hash_hex(),
            cells,
        });
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// All values of one column, in row order.
    pub fn column_values(&self, name: &str) -> Vec<&Cell> {
        match self.column_index(name) {
            Some(i) => self.records.iter().map(|r| &r.cells[i]).collect(),
            None => Vec::new(),
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["schema_version", "experiment", "seed", "config_hash"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend(self.columns.iter().map(Column::label));
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header()).map_err(std::io::Error::from)?;
        let (version, exp, seed) = (SCHEMA_VERSION.to_string(), self.experiment.id(), self.seed.to_string());
        for r in &self.records {
            let mut row = vec![version.clone(), exp.to_string(), seed.clone(), r.config_hash.clone()];
            row.extend(r.cells.iter().map(Cell::to_string));
            w.write_record(&row).map_err(std::io::Error::from)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Metadata sidecar: config echo, column units and plot hints.
    pub fn metadata_json(&self, csv_path: Option<&str>) -> String {
        #[derive(Serialize)]
        struct Meta<'a> {
            csv: Option<&'a str>,
            #[serde(flatten)]
            report: &'a SeReport,
        }
        let meta = Meta { csv: csv_path, report: self };
        serde_json::to_string_pretty(&meta).expect("report serializes")
    }
}

/// Knobs shared by every experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Scenario seed of the first placement; further placements use `seed + 1, ...`.
    pub seed: u64,
    /// Monte Carlo trials per point, 0 disables the Monte Carlo columns.
    pub trials: usize,
    pub seeds_per_point: usize,
}

impl RunOptions {
    fn check(&self) -> Result<()> {
        if self.seeds_per_point == 0 {
            return Err(Error::config("seeds_per_point", "must be at least 1"));
        }
        Ok(())
    }
}

fn with_seed(cfg: &SystemConfig, seed: u64) -> SystemConfig {
    SystemConfig { seed, ..cfg.clone() }
}

fn seeds(opts: &RunOptions) -> impl Iterator<Item = u64> + '_ {
    (0..opts.seeds_per_point as u64).map(|s| opts.seed.wrapping_add(s))
}

fn square_side(elements: usize) -> Result<usize> {
    let side = (elements as f64).sqrt().round() as usize;
    if side * side != elements {
        return Err(Error::config("ris_elements", format!("{elements} is not a perfect square")));
    }
    Ok(side)
}

/// Builds the system for one placement seed, reusing a prebuilt RIS model.
fn build(cfg: &SystemConfig, ris: &RisModel, seed: u64) -> Result<SystemModel> {
    let scen = Scenario::from_seed(&with_seed(cfg, seed))?;
    SystemModel::with_ris(scen, ris.clone())
}

/// Closed-form sum SE at every instant `from..=to`.
pub fn sum_se_curve(model: &SystemModel, from: usize, to: usize) -> Result<Vec<(usize, f64)>> {
    let cf = ClosedForm::new(model);
    (from..=to).map(|n| Ok((n, cf.sum_se_at(n)?))).collect()
}

/// First instant at which a decaying SE curve touches zero: the first local
/// minimum whose value is at most `tol`.
pub fn first_zero_instant(curve: &[(usize, f64)], tol: f64) -> Option<usize> {
    for i in 0..curve.len() {
        let (n, v) = curve[i];
        if v > tol {
            continue;
        }
        let next_higher = curve.get(i + 1).is_none_or(|&(_, w)| w >= v);
        if next_higher {
            return Some(n);
        }
    }
    None
}

/// Sweeps that share one scenario: velocity, pilots, amplification, error law.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Series {
    pub velocity_kmh: f64,
    pub pilot_length: usize,
    pub amplification: f64,
    pub phase_error: PhaseErrorKind,
    pub kappa: f64,
}

impl Fig1Series {
    fn apply(&self, cfg: &SystemConfig) -> SystemConfig {
        SystemConfig {
            velocities_kmh: Velocities::All(self.velocity_kmh),
            pilot_length: self.pilot_length,
            amplification: self.amplification,
            phase_error: self.phase_error,
            kappa: self.kappa,
            ..cfg.clone()
        }
    }
}

pub fn fig1_series(base: &SystemConfig) -> Vec<Fig1Series> {
    let s = |v: f64, tau: usize, a: f64, kind: PhaseErrorKind, kappa: f64| Fig1Series {
        velocity_kmh: v,
        pilot_length: tau,
        amplification: a,
        phase_error: kind,
        kappa,
    };
    let (tau, a, u) = (base.pilot_length, base.amplification, PhaseErrorKind::Uniform);
    vec![
        s(0.0, tau, a, u, PI / 8.0),
        s(10.0, tau, a, u, PI / 8.0),
        s(60.0, tau, a, u, PI / 8.0),
        s(120.0, tau, a, u, PI / 8.0),
        s(10.0, 3, a, u, PI / 8.0),
        s(10.0, tau, 6.0, u, PI / 8.0),
        s(10.0, tau, a, u, PI / 2.0),
        s(10.0, tau, a, PhaseErrorKind::VonMises, 1.0),
        s(10.0, tau, a, PhaseErrorKind::VonMises, 6.0),
    ]
}

fn phase_error_label(kind: PhaseErrorKind) -> &'static str {
    match kind {
        PhaseErrorKind::None => "none",
        PhaseErrorKind::Uniform => "uniform",
        PhaseErrorKind::VonMises => "von_mises",
    }
}

fn architecture_label(arch: Architecture) -> &'static str {
    match arch {
        Architecture::Star => "star",
        Architecture::Conventional => "conventional",
        Architecture::None => "none",
    }
}

/// Per-instant sum SE curves, closed form only, one placement.
pub fn run_fig1(cfg: &SystemConfig, opts: &RunOptions) -> Result<SeReport> {
    run_fig1_series(cfg, opts, &fig1_series(cfg))
}

pub fn run_fig1_series(cfg: &SystemConfig, opts: &RunOptions, series: &[Fig1Series]) -> Result<SeReport> {
    cfg.validate()?;
    let columns = vec![
        Column::new("velocity", Some("km/h")),
        Column::new("pilot_length", None),
        Column::new("amplification", None),
        Column::new("phase_error", None),
        Column::new("kappa", Some("rad")),
        Column::new("n", Some("instant")),
        Column::new("sum_se", Some("bit/s/Hz")),
    ];
    let plot = PlotHints {
        x_column: "n",
        y_columns: vec!["sum_se"],
        error_column: None,
        series_columns: vec!["velocity", "pilot_length", "amplification", "phase_error", "kappa"],
        x_label: "time instant index n",
        y_label: "sum SE [bit/s/Hz]",
    };
    let mut report = SeReport::new(Experiment::Fig1, &with_seed(cfg, opts.seed), opts, columns, plot);
    let curves: Vec<(SystemConfig, Vec<(usize, f64)>)> = series
        .par_iter()
        .map(|s| {
            let point = with_seed(&s.apply(cfg), opts.seed);
            point.validate()?;
            let model = SystemModel::new(Scenario::from_seed(&point)?)?;
            let curve = sum_se_curve(&model, point.estimation_instant(), FIG1_HORIZON.max(point.block_length))?;
            Ok((point, curve))
        })
        .collect::<Result<_>>()?;
    for (s, (point, curve)) in series.iter().zip(&curves) {
        for &(n, se) in curve {
            report.push(
                point,
                vec![
                    Cell::Float(s.velocity_kmh),
                    Cell::Int(s.pilot_length as i64),
                    Cell::Float(s.amplification),
                    Cell::text(phase_error_label(s.phase_error)),
                    Cell::Float(s.kappa),
                    Cell::Int(n as i64),
                    Cell::Float(se),
                ],
            );
        }
    }
    Ok(report)
}

/// One Fig. 2 curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Series {
    pub amplification: f64,
    pub kappa: f64,
    pub velocity_kmh: f64,
}

pub fn fig2_series(base: &SystemConfig) -> Vec<Fig2Series> {
    let v = match base.velocities_kmh {
        Velocities::All(v) => v,
        Velocities::PerUser(_) => 10.0,
    };
    let s = |a: f64, kappa: f64, v: f64| Fig2Series {
        amplification: a,
        kappa,
        velocity_kmh: v,
    };
    vec![
        s(1.0, PI / 8.0, v),
        s(2.0, PI / 8.0, v),
        s(6.0, PI / 8.0, v),
        s(1.0, PI / 2.0, v),
        s(2.0, PI / 2.0, v),
        s(6.0, PI / 2.0, v),
        s(1.0, PI / 8.0, 60.0),
        s(6.0, PI / 8.0, 60.0),
        s(1.0, PI / 8.0, 0.0),
    ]
}

/// Seed-averaged average per-user SE at one sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AveragedSe {
    pub closed_form: f64,
    /// Monte Carlo mean and standard error, when trials were run.
    pub monte_carlo: Option<(f64, f64)>,
}

/// Average per-user SE over `opts.seeds_per_point` placements.
pub fn averaged_se(cfg: &SystemConfig, opts: &RunOptions) -> Result<AveragedSe> {
    opts.check()?;
    cfg.validate()?;
    let ris = RisModel::from_config(cfg)?;
    let k = cfg.num_users() as f64;
    let per_seed: Vec<(f64, Option<(f64, f64)>)> = seeds(opts)
        .map(|seed| {
            let model = build(cfg, &ris, seed)?;
            let cf = ClosedForm::new(&model).se_all()?.iter().sum::<f64>() / k;
            let mc = if opts.trials > 0 {
                Some(monte_carlo::run(&model, seed, opts.trials)?.average_se())
            } else {
                None
            };
            Ok((cf, mc))
        })
        .collect::<Result<_>>()?;
    let s = per_seed.len() as f64;
    let closed_form = per_seed.iter().map(|p| p.0).sum::<f64>() / s;
    let monte_carlo = per_seed.iter().map(|p| p.1).collect::<Option<Vec<_>>>().map(|mc| {
        let mean = mc.iter().map(|p| p.0).sum::<f64>() / s;
        let se = mc.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt() / s;
        (mean, se)
    });
    Ok(AveragedSe { closed_form, monte_carlo })
}

/// Average per-user SE versus the number of APs.
pub fn run_fig2(cfg: &SystemConfig, opts: &RunOptions) -> Result<SeReport> {
    run_fig2_sweep(cfg, opts, &fig2_series(cfg), &FIG2_APS)
}

pub fn run_fig2_sweep(cfg: &SystemConfig, opts: &RunOptions, series: &[Fig2Series], aps: &[usize]) -> Result<SeReport> {
    opts.check()?;
    cfg.validate()?;
    let columns = vec![
        Column::new("amplification", None),
        Column::new("kappa", Some("rad")),
        Column::new("velocity", Some("km/h")),
        Column::new("num_aps", None),
        Column::new("se_avg_cf", Some("bit/s/Hz")),
        Column::new("se_avg_mc", Some("bit/s/Hz")),
        Column::new("se_avg_mc_stderr", Some("bit/s/Hz")),
        Column::new("mc_rel_error", None),
        Column::new("mc_within_tolerance", None),
        Column::new("seeds", None),
        Column::new("trials", None),
    ];
    let plot = PlotHints {
        x_column: "num_aps",
        y_columns: vec!["se_avg_cf", "se_avg_mc"],
        error_column: Some("se_avg_mc_stderr"),
        series_columns: vec!["amplification", "kappa", "velocity"],
        x_label: "number of APs M",
        y_label: "average SE per user [bit/s/Hz]",
    };
    let mut report = SeReport::new(Experiment::Fig2, &with_seed(cfg, opts.seed), opts, columns, plot);
    let points: Vec<(&Fig2Series, usize)> = series.iter().flat_map(|s| aps.iter().map(move |&m| (s, m))).collect();
    let results: Vec<(SystemConfig, AveragedSe)> = points
        .par_iter()
        .map(|&(s, m)| {
            let point = SystemConfig {
                num_aps: m,
                amplification: s.amplification,
                kappa: s.kappa,
                velocities_kmh: Velocities::All(s.velocity_kmh),
                seed: opts.seed,
                ..cfg.clone()
            };
            let avg = averaged_se(&point, opts)?;
            Ok((point, avg))
        })
        .collect::<Result<_>>()?;
    for (&(s, m), (point, avg)) in points.iter().zip(&results) {
        let rel = avg.monte_carlo.map(|(mc, _)| (mc - avg.closed_form) / avg.closed_form);
        report.push(
            point,
            vec![
                Cell::Float(s.amplification),
                Cell::Float(s.kappa),
                Cell::Float(s.velocity_kmh),
                Cell::Int(m as i64),
                Cell::Float(avg.closed_form),
                Cell::opt(avg.monte_carlo.map(|p| p.0)),
                Cell::opt(avg.monte_carlo.map(|p| p.1)),
                Cell::opt(rel),
                rel.map_or(Cell::Empty, |r| Cell::Bool(r.abs() <= VALIDATE_TOLERANCE)),
                Cell::Int(opts.seeds_per_point as i64),
                Cell::Int(opts.trials as i64),
            ],
        );
    }
    Ok(report)
}

/// One Fig. 3 point before seed averaging.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig3Point {
    pub architecture: Architecture,
    pub elements: usize,
    pub amplification: f64,
    pub kappa: f64,
}

impl Fig3Point {
    pub fn config(&self, base: &SystemConfig) -> Result<SystemConfig> {
        let side = if self.architecture == Architecture::None {
            base.ris_cols
        } else {
            square_side(self.elements)?
        };
        let cfg = SystemConfig {
            architecture: self.architecture,
            ris_cols: side,
            ris_rows: side,
            ris_elements: None,
            amplification: self.amplification,
            kappa: self.kappa,
            ..base.clone()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn fig3_points(elements: &[usize], amplifications: &[f64], kappas: &[f64]) -> Vec<Fig3Point> {
    let mut pts = vec![Fig3Point {
        architecture: Architecture::None,
        elements: 0,
        amplification: 1.0,
        kappa: 0.0,
    }];
    for arch in [Architecture::Star, Architecture::Conventional] {
        for &a in amplifications {
            for &kappa in kappas {
                for &l in elements {
                    pts.push(Fig3Point {
                        architecture: arch,
                        elements: l,
                        amplification: a,
                        kappa,
                    });
                }
            }
        }
    }
    pts
}

/// Seed-averaged closed-form sum SE (sum over users of the block SE).
pub fn averaged_sum_se(cfg: &SystemConfig, opts: &RunOptions) -> Result<f64> {
    opts.check()?;
    let ris = RisModel::from_config(cfg)?;
    let mut acc = 0.0;
    for seed in seeds(opts) {
        let model = build(cfg, &ris, seed)?;
        acc += ClosedForm::new(&model).se_all()?.iter().sum::<f64>();
    }
    Ok(acc / opts.seeds_per_point as f64)
}

/// Sum SE versus the number of RIS elements, with cell-free and
/// conventional-RIS baselines. Users move at 60 km/h.
pub fn run_fig3(cfg: &SystemConfig, opts: &RunOptions) -> Result<SeReport> {
    let base = SystemConfig {
        velocities_kmh: Velocities::All(60.0),
        ..cfg.clone()
    };
    run_fig3_points(&base, opts, &fig3_points(&FIG3_ELEMENTS, &FIG3_AMPLIFICATIONS, &FIG3_KAPPAS))
}

pub fn run_fig3_points(cfg: &SystemConfig, opts: &RunOptions, points: &[Fig3Point]) -> Result<SeReport> {
    opts.check()?;
    cfg.validate()?;
    let columns = vec![
        Column::new("architecture", None),
        Column::new("ris_elements", None),
        Column::new("amplification", None),
        Column::new("kappa", Some("rad")),
        Column::new("sum_se", Some("bit/s/Hz")),
        Column::new("seeds", None),
    ];
    let plot = PlotHints {
        x_column: "ris_elements",
        y_columns: vec!["sum_se"],
        error_column: None,
        series_columns: vec!["architecture", "amplification", "kappa"],
        x_label: "number of RIS elements L",
        y_label: "sum SE [bit/s/Hz]",
    };
    let mut report = SeReport::new(Experiment::Fig3, &with_seed(cfg, opts.seed), opts, columns, plot);
    let results: Vec<(SystemConfig, f64)> = points
        .par_iter()
        .map(|p| {
            let point = with_seed(&p.config(cfg)?, opts.seed);
            let se = averaged_sum_se(&point, opts)?;
            Ok((point, se))
        })
        .collect::<Result<_>>()?;
    for (p, (point, se)) in points.iter().zip(&results) {
        let ris_params = p.architecture != Architecture::None;
        report.push(
            point,
            vec![
                Cell::text(architecture_label(p.architecture)),
                Cell::Int(p.elements as i64),
                if ris_params { Cell::Float(p.amplification) } else { Cell::Empty },
                if ris_params { Cell::Float(p.kappa) } else { Cell::Empty },
                Cell::Float(*se),
                Cell::Int(opts.seeds_per_point as i64),
            ],
        );
    }
    Ok(report)
}

/// Resource-block length suggested for one velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockPlan {
    pub velocity_kmh: f64,
    pub doppler_hz: f64,
    /// Smallest `n` with `J0(2 pi f_D T_s n) <= 0`; `None` when the channel never decorrelates.
    pub first_zero: Option<usize>,
}

/// First positive zero of `J0`.
const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

pub fn plan_block_length(velocities_kmh: &[f64], carrier_hz: f64, instant_s: f64) -> Result<Vec<BlockPlan>> {
    if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
        return Err(Error::config("carrier_hz", "must be finite and positive"));
    }
    if !(instant_s.is_finite() && instant_s > 0.0) {
        return Err(Error::config("instant_s", "must be finite and positive"));
    }
    velocities_kmh
        .iter()
        .map(|&v| {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config("velocities_kmh", "must be finite and >= 0"));
            }
            let fd = doppler_shift(v, carrier_hz);
            let step = 2.0 * PI * fd * instant_s;
            let first_zero = if step > 0.0 && (J0_FIRST_ZERO / step) < 1e15 {
                let mut n = ((J0_FIRST_ZERO / step).ceil() as usize).max(1);
                while n > 1 && bessel_j0(step * (n - 1) as f64) <= 0.0 {
                    n -= 1;
                }
                while bessel_j0(step * n as f64) > 0.0 {
                    n += 1;
                }
                Some(n)
            } else {
                None
            };
            Ok(BlockPlan {
                velocity_kmh: v,
                doppler_hz: fd,
                first_zero,
            })
        })
        .collect()
}

pub fn run_table1(cfg: &SystemConfig, opts: &RunOptions) -> Result<SeReport> {
    run_table1_velocities(cfg, opts, &TABLE1_VELOCITIES)
}

pub fn run_table1_velocities(cfg: &SystemConfig, opts: &RunOptions, velocities: &[f64]) -> Result<SeReport> {
    cfg.validate()?;
    let columns = vec![
        Column::new("velocity", Some("km/h")),
        Column::new("doppler", Some("Hz")),
        Column::new("block_length", Some("instant")),
    ];
    let plot = PlotHints {
        x_column: "velocity",
        y_columns: vec!["block_length"],
        error_column: None,
        series_columns: vec![],
        x_label: "velocity [km/h]",
        y_label: "first zero position [instant]",
    };
    let cfg = with_seed(cfg, opts.seed);
    let mut report = SeReport::new(Experiment::Table1, &cfg, opts, columns, plot);
    for plan in plan_block_length(velocities, cfg.carrier_hz, cfg.instant_s)? {
        report.push(
            &cfg,
            vec![
                Cell::Float(plan.velocity_kmh),
                Cell::Float(plan.doppler_hz),
                plan.first_zero.map_or(Cell::text("unbounded"), |n| Cell::Int(n as i64)),
            ],
        );
    }
    Ok(report)
}

/// Per-user closed form vs Monte Carlo comparison at the configured point.
pub fn run_validate(cfg: &SystemConfig, opts: &RunOptions) -> Result<SeReport> {
    if opts.trials == 0 {
        return Err(Error::config("trials", "validate needs at least 1 trial"));
    }
    let cfg = with_seed(cfg, opts.seed);
    cfg.validate()?;
    let columns = vec![
        Column::new("user", None),
        Column::new("mode", None),
        Column::new("se_cf", Some("bit/s/Hz")),
        Column::new("se_mc", Some("bit/s/Hz")),
        Column::new("se_mc_stderr", Some("bit/s/Hz")),
        Column::new("rel_error", None),
        Column::new("sinr_cf", None),
        Column::new("sinr_mc", None),
        Column::new("sinr_mc_stderr", None),
        Column::new("within_tolerance", None),
    ];
    let plot = PlotHints {
        x_column: "user",
        y_columns: vec!["se_cf", "se_mc"],
        error_column: Some("se_mc_stderr"),
        series_columns: vec![],
        x_label: "user index",
        y_label: "SE [bit/s/Hz]",
    };
    let mut report = SeReport::new(Experiment::Validate, &cfg, opts, columns, plot);
    let model = SystemModel::new(Scenario::from_seed(&cfg)?)?;
    let cf = ClosedForm::new(&model);
    let run = monte_carlo::run(&model, opts.seed, opts.trials)?;
    let lambda = model.estimation_instant();
    for k in 0..model.num_users() {
        let se_cf = cf.se_per_user(k)?;
        let (se_mc, se_err) = run.se_per_user(k);
        let (sinr_mc, sinr_err) = run.sinr(k, lambda)?;
        let rel = (se_mc - se_cf) / se_cf;
        report.push(
            &cfg,
            vec![
                Cell::Int(k as i64),
                Cell::text(model.scenario.modes[k].label()),
                Cell::Float(se_cf),
                Cell::Float(se_mc),
                Cell::Float(se_err),
                Cell::Float(rel),
                Cell::Float(cf.sinr(k, lambda)?.sinr),
                Cell::Float(sinr_mc),
                Cell::Float(sinr_err),
                Cell::Bool(rel.abs() <= VALIDATE_TOLERANCE),
            ],
        );
    }
    Ok(report)
}

/// Users whose validation row is outside the tolerance.
pub fn validation_failures(report: &SeReport) -> Vec<usize> {
    report
        .column_values("within_tolerance")
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Cell::Bool(false)))
        .map(|(i, _)| i)
        .collect()
}
