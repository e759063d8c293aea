use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dimer_cli::config::{ConfigError, RunConfig, Task};
use dimer_cli::presets;
use dimer_cli::run::{run, RunError};

#[derive(Debug, Parser)]
#[command(
    name = "dimer",
    version,
    about = "Two-atom band-edge waveguide simulations",
    after_help = "Any config key can also be given as `--key value`, e.g. `--j 3 --kad 1.5707963267948966`."
)]
struct Cli {
    /// spectrum | sweep2d | dynamics | g2 | fano | asym (defaults to the `task` key)
    task: Option<String>,
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in figure preset, applied before `--config`.
    #[arg(long)]
    preset: Option<String>,
    /// Override a single key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Print the preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

const OWN_FLAGS: &[&str] = &["config", "preset", "set", "out", "svg", "list-presets", "help", "version"];

/// Turn `--key value` and `--key=value` for config keys into `--set key=value`.
fn rewrite_args(args: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    if let Some(bin) = it.next() {
        out.push(bin);
    }
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            out.push(arg);
            continue;
        };
        let (name, inline) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), Some(v.to_string())),
            None => (flag.to_string(), None),
        };
        if name.is_empty() || OWN_FLAGS.contains(&name.as_str()) {
            out.push(arg);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().unwrap_or_default(),
        };
        out.push("--set".into());
        out.push(format!("{name}={value}"));
    }
    out
}

fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(name) = &cli.preset {
        let text = presets::preset(name).ok_or_else(|| {
            ConfigError::general(format!(
                "unknown preset `{name}` (available: {})",
                presets::names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        cfg.merge_text(text)?;
    }
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::general(format!("cannot read {}: {e}", path.display())))?;
        cfg.merge_text(&text)?;
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::general(format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v, None)?;
    }
    if let Some(task) = &cli.task {
        cfg.task = Some(Task::parse(task).ok_or_else(|| ConfigError::general(format!("unknown subcommand `{task}`")))?);
    }
    if let Some(p) = &cli.out {
        cfg.out = Some(p.display().to_string());
    }
    if let Some(p) = &cli.svg {
        cfg.svg = Some(p.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &str, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text)
        .map_err(|e| RunError::Config(ConfigError::general(format!("cannot write {path}: {e}"))))
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(rewrite_args(std::env::args().collect()));
    if cli.list_presets {
        for name in presets::names() {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let result = resolve(&cli).map_err(RunError::from).and_then(|cfg| {
        let output = run(&cfg)?;
        match &cfg.out {
            Some(path) => write(path, &output.csv)?,
            None => print!("{}", output.csv),
        }
        if let (Some(path), Some(svg)) = (&cfg.svg, &output.svg) {
            write(path, svg)?;
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
