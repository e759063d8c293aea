//! Subcommand execution: config in, CSV (and optional SVG) text out.

use rayon::prelude::*;

use dimer_core::imperfections::AsymmetryParams;
use dimer_core::signal::{linspace, local_maxima, mean_spacing};
use dimer_core::{
    asymmetric_bragg_dynamics, deviation_dynamics, evolve, fano_scan, g2_reflected, peak_analysis,
    spectrum, Error, FanoAsymmetry, ScatterPoint, SpectrumGrid, TimeSeries,
};

use crate::config::{ConfigError, Initial, PlotColumn, RunConfig, Task};
use crate::csv::{self, Table};
use crate::svg::{self, Plot, Series};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Numeric(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) => 3,
        }
    }

    /// One-line diagnostic, `error[config]: ...` or `error[numeric]: ...`.
    pub fn diagnostic(&self) -> String {
        match self {
            RunError::Config(e) => format!("error[config]: {e}"),
            RunError::Numeric(e) => format!("error[numeric]: {e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            RunError::Numeric(e)
        } else {
            let key = match &e {
                Error::InvalidParameter { name, .. } => Some(name.to_string()),
                _ => None,
            };
            RunError::Config(ConfigError {
                line: None,
                key,
                message: e.to_string(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub csv: String,
    pub svg: Option<String>,
}

pub fn run(config: &RunConfig) -> Result<Output, RunError> {
    config.validate()?;
    let task = config
        .task
        .ok_or_else(|| ConfigError::general("no task given (subcommand or `task` key)"))?;
    let (table, plot) = match task {
        Task::Spectrum => run_spectrum(config)?,
        Task::Sweep2d => run_sweep2d(config)?,
        Task::Dynamics => run_dynamics(config)?,
        Task::G2 => run_g2(config)?,
        Task::Fano => run_fano(config)?,
        Task::Asym => run_asym(config)?,
    };
    Ok(Output {
        csv: csv::render(config, &table),
        svg: config.svg.as_ref().map(|_| svg::render(&plot)),
    })
}

fn fmt(x: f64) -> String {
    csv::format_number(x)
}

fn series_columns<'a>(lead: Option<&'a str>, rest: &[&'a str]) -> Vec<&'a str> {
    lead.into_iter().chain(rest.iter().copied()).collect()
}

fn with_lead(lead: Option<f64>, mut row: Vec<f64>) -> Vec<f64> {
    if let Some(v) = lead {
        row.insert(0, v);
    }
    row
}

fn j_lead(config: &RunConfig, j: f64) -> Option<f64> {
    (!config.j_values.is_empty()).then_some(j)
}

fn spectrum_row(p: &ScatterPoint, unwrapped: f64) -> Vec<f64> {
    vec![p.delta, p.transmission, p.reflection, p.phase, unwrapped, p.loss]
}

const SPECTRUM_COLUMNS: [&str; 6] = ["delta", "T", "R", "theta", "theta_unwrapped", "loss"];

fn push_spectrum(table: &mut Table, grid: &SpectrumGrid, lead: Option<f64>) {
    for (p, u) in grid.points.iter().zip(&grid.phase_unwrapped) {
        table.push(with_lead(lead, spectrum_row(p, *u)));
    }
}

fn run_spectrum(config: &RunConfig) -> Result<(Table, Plot), RunError> {
    let lead = (!config.j_values.is_empty()).then_some("j");
    let mut table = Table::new(&series_columns(lead, &SPECTRUM_COLUMNS));
    let mut plot = Plot {
        title: "Reflection".into(),
        x_label: "delta / gamma_1d".into(),
        y_label: "R".into(),
        series: Vec::new(),
    };
    for j in config.js() {
        let grid = spectrum(&config.params(j), config.delta_min, config.delta_max, config.delta_points)?;
        for pk in peak_analysis(&grid)? {
            table.notes.push(format!(
                "peak: j={}, position={}, height={}, fwhm={}",
                fmt(j),
                fmt(pk.position),
                fmt(pk.height),
                fmt(pk.fwhm)
            ));
        }
        push_spectrum(&mut table, &grid, j_lead(config, j));
        plot.series.push(Series {
            label: format!("J = {j}"),
            x: grid.deltas.clone(),
            y: grid.reflection(),
        });
    }
    Ok((table, plot))
}

fn run_sweep2d(config: &RunConfig) -> Result<(Table, Plot), RunError> {
    let kads = linspace(config.kad_min, config.kad_max, config.kad_points);
    let j = config.j;
    let grids = kads
        .par_iter()
        .map(|&kad| spectrum(&config.params_at(j, kad), config.delta_min, config.delta_max, config.delta_points))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["kad", "delta", "T", "theta"]);
    for (kad, grid) in kads.iter().zip(&grids) {
        for p in &grid.points {
            table.push(vec![*kad, p.delta, p.transmission, p.phase]);
        }
    }
    let (name, pick): (&str, fn(&ScatterPoint) -> f64) = match config.plot_column {
        PlotColumn::T => ("T", |p| p.transmission),
        PlotColumn::Theta => ("theta", |p| p.phase),
    };
    let slices = 5.min(kads.len());
    let mut plot = Plot {
        title: format!("{name} at selected spacings"),
        x_label: "delta / gamma_1d".into(),
        y_label: name.into(),
        series: Vec::new(),
    };
    for s in 0..slices {
        let k = s * (kads.len() - 1) / (slices - 1).max(1);
        plot.series.push(Series {
            label: format!("kad = {:.3}", kads[k]),
            x: grids[k].deltas.clone(),
            y: grids[k].points.iter().map(pick).collect(),
        });
    }
    Ok((table, plot))
}

const DYNAMICS_COLUMNS: [&str; 6] = ["t", "p_left", "p_right", "p_a", "p_b", "norm"];

fn push_series(table: &mut Table, s: &TimeSeries, lead: Option<f64>) {
    for i in 0..s.len() {
        table.push(with_lead(
            lead,
            vec![s.times[i], s.p_left[i], s.p_right[i], s.p_a[i], s.p_b[i], s.norm[i]],
        ));
    }
}

fn population_series(plot: &mut Plot, s: &TimeSeries, tag: &str) {
    for (name, y) in [("p_left", &s.p_left), ("p_right", &s.p_right), ("p_a", &s.p_a), ("p_b", &s.p_b)] {
        plot.series.push(Series {
            label: format!("{name} {tag}"),
            x: s.times.clone(),
            y: y.clone(),
        });
    }
}

fn run_dynamics(config: &RunConfig) -> Result<(Table, Plot), RunError> {
    let lead = (!config.j_values.is_empty()).then_some("j");
    let mut table = Table::new(&series_columns(lead, &DYNAMICS_COLUMNS));
    let mut plot = Plot {
        title: "Populations".into(),
        x_label: "t gamma_1d".into(),
        y_label: "population".into(),
        series: Vec::new(),
    };
    for j in config.js() {
        let p = config.params(j);
        let series = match config.deviation() {
            Some(dev) if config.initial == Initial::Left => {
                let d = deviation_dynamics(&p, dev, config.t_max, config.t_points)?;
                table.notes.push(format!(
                    "pb_decay: j={}, fitted_rate={}, gamma_b={}",
                    fmt(j),
                    fmt(d.pb_decay_rate),
                    fmt(d.gamma_b)
                ));
                d.series
            }
            _ => evolve(&p, config.initial.state(), config.t_max, config.t_points)?,
        };
        push_series(&mut table, &series, j_lead(config, j));
        population_series(&mut plot, &series, &format!("J={j}"));
    }
    Ok((table, plot))
}

fn run_g2(config: &RunConfig) -> Result<(Table, Plot), RunError> {
    let lead = (!config.j_values.is_empty()).then_some("j");
    let mut table = Table::new(&series_columns(lead, &["tau", "g2"]));
    let mut plot = Plot {
        title: "Reflected-field g2".into(),
        x_label: "tau gamma_1d".into(),
        y_label: "g2".into(),
        series: Vec::new(),
    };
    for j in config.js() {
        let tr = g2_reflected(&config.params(j), config.tau_max, config.tau_points)?;
        let maxima = local_maxima(&tr.g2);
        let first = maxima.first().map_or(f64::NAN, |&i| tr.taus[i]);
        table.notes.push(format!(
            "g2: j={}, g2_0={}, flux_ss={}, first_max_tau={}",
            fmt(j),
            fmt(tr.g2[0]),
            fmt(tr.flux_ss),
            fmt(first)
        ));
        for (tau, g) in tr.taus.iter().zip(&tr.g2) {
            table.push(with_lead(j_lead(config, j), vec![*tau, *g]));
        }
        plot.series.push(Series {
            label: format!("J = {j}"),
            x: tr.taus.clone(),
            y: tr.g2.clone(),
        });
    }
    Ok((table, plot))
}

fn run_fano(config: &RunConfig) -> Result<(Table, Plot), RunError> {
    let dev = config
        .deviation()
        .ok_or_else(|| ConfigError::general("`fano` needs `eta`"))?;
    let p = config.params(config.j);
    let scan = fano_scan(&p, dev, config.delta_min, config.delta_max, config.delta_points)?;
    let f = scan.feature;
    let mut table = Table::new(&SPECTRUM_COLUMNS);
    table.notes.push(format!(
        "fano: position={}, predicted={}, asymmetry={}, width={}, gamma_b={}",
        fmt(f.position),
        fmt(f.predicted),
        match f.asymmetry {
            FanoAsymmetry::DipThenPeak => "dip-then-peak",
            FanoAsymmetry::PeakThenDip => "peak-then-dip",
        },
        fmt(f.width),
        fmt(f.gamma_b)
    ));
    push_spectrum(&mut table, &scan.grid, None);
    let plot = Plot {
        title: format!("Reflection, eta = {}", dev.eta),
        x_label: "delta / gamma_1d".into(),
        y_label: "R".into(),
        series: vec![Series {
            label: format!("J = {}", config.j),
            x: scan.grid.deltas.clone(),
            y: scan.grid.reflection(),
        }],
    };
    Ok((table, plot))
}

fn run_asym(config: &RunConfig) -> Result<(Table, Plot), RunError> {
    let total = config.gamma_1d_1 + config.gamma_1d_2;
    let mut table = Table::new(&series_columns(Some("xi"), &DYNAMICS_COLUMNS));
    let mut plot = Plot {
        title: "Redefined dressed populations".into(),
        x_label: "t gamma_1d".into(),
        y_label: "population".into(),
        series: Vec::new(),
    };
    let p = config.params(config.j);
    for &xi in &config.xi {
        let asym = AsymmetryParams::from_xi(xi, total)?;
        let d = asymmetric_bragg_dynamics(&asym, &p, config.t_max, config.t_points)?;
        let s = &d.series;
        let maxima: Vec<f64> = local_maxima(&s.p_a).into_iter().map(|i| s.times[i]).collect();
        let omega = mean_spacing(&maxima).map_or(f64::NAN, |sp| std::f64::consts::TAU / sp);
        table.notes.push(format!(
            "asym: xi={}, coupling_ab={}, matrix_residual={}, route_deviation={}, p_a_angular_frequency={}",
            fmt(xi),
            fmt(d.coupling_ab),
            fmt(d.matrix_residual),
            fmt(d.route_deviation),
            fmt(omega)
        ));
        push_series(&mut table, s, Some(xi));
        for (name, y) in [("p_a", &s.p_a), ("p_b", &s.p_b)] {
            plot.series.push(Series {
                label: format!("{name} xi={xi}"),
                x: s.times.clone(),
                y: y.clone(),
            });
        }
    }
    Ok((table, plot))
}
