use std::path::Path;
use std::process::{Command, Output};

use dimer_cli::config::RunConfig;
use dimer_cli::csv::parse_body;
use dimer_core::signal::local_maxima;

fn dimer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimer")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (cols, rows) = parse_body(text);
    let k = cols.iter().position(|c| c == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

#[test]
fn default_spectrum_peaks_on_bright_line() {
    let o = dimer(&["spectrum"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let (cols, _) = parse_body(&text);
    assert_eq!(cols, vec!["delta", "T", "R", "theta", "theta_unwrapped", "loss"]);
    let d = column(&text, "delta");
    let r = column(&text, "R");
    let k = (0..r.len()).max_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap();
    assert!((d[k] - 1.9048).abs() < 0.01);
    assert!((r[k] - 1.0).abs() < 1e-3);
}

#[test]
fn anti_bragg_g2_first_maximum() {
    let o = dimer(&[
        "g2", "--kad", "1.5707963267948966", "--ka_l", "31.41592653589793", "--j", "3",
        "--delta_rule", "j", "--omega_p", "1e-4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let tau = column(&text, "tau");
    let g = column(&text, "g2");
    let first = tau[local_maxima(&g)[0]];
    assert!((first - 1.33).abs() < 0.05, "{first}");
}

#[test]
fn zero_flux_exits_three() {
    let j = format!("{}", 0.5 * 0.05f64.exp());
    let o = dimer(&[
        "g2", "--kad", "1.5707963267948966", "--d_over_l", "0.05", "--j", &j, "--delta_rule", "j",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[numeric]:") && err.contains("zero reflected flux"), "{err}");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "j = 1\nkad = -1\n").unwrap();
    let o = dimer(&["spectrum", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error[config]:") && err.contains("kad"), "{err}");

    std::fs::write(&bad, "# x\nl_over_d = 0.1\n").unwrap();
    let o = dimer(&["spectrum", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("l_over_d"), "{err}");

    assert_eq!(dimer(&["spectrum", "--j", "abc"]).status.code(), Some(2));
    assert_eq!(dimer(&["nonsense"]).status.code(), Some(2));
    assert_eq!(dimer(&["--preset", "fig99"]).status.code(), Some(2));
    assert_eq!(dimer(&[]).status.code(), Some(2));
}

#[test]
fn header_echo_round_trips() {
    let o = dimer(&["--preset", "fig7b", "--gamma_prime", "0.125"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let cfg = RunConfig::from_header(&text).unwrap();
    assert_eq!(cfg.gamma_prime, 0.125);
    assert_eq!(cfg.eta, Some(0.05));
    let again = dimer_cli::run(&cfg).unwrap();
    assert_eq!(again.csv, text);
}

fn run_to(dir: &Path, preset: &str, tag: &str, threads: &str) -> Vec<u8> {
    let out = dir.join(format!("{preset}-{tag}.csv"));
    let o = Command::new(env!("CARGO_BIN_EXE_dimer"))
        .args(["--preset", preset, "--out", out.to_str().unwrap()])
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .unwrap();
    assert!(o.status.success());
    std::fs::read(out).unwrap()
}

#[test]
fn output_is_parallelism_invariant() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["fig3b", "fig4b", "fig6b"] {
        let a = run_to(dir.path(), preset, "a", "1");
        let b = run_to(dir.path(), preset, "b", "4");
        assert_eq!(a, b, "{preset}");
    }
}

#[test]
fn svg_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let csv = dir.path().join("p.csv");
    let o = dimer(&["--preset", "fig4a", "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<polyline") && text.contains("J = 1"));
}

#[test]
fn fano_summary_line() {
    let o = dimer(&["--preset", "fig7a"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("# fano:")).unwrap();
    assert!(line.contains("asymmetry=dip-then-peak"));
}

#[test]
fn set_flag_equals_form() {
    let o = dimer(&["dynamics", "--t_points=3", "--t_max=1"]);
    assert!(o.status.success());
    assert_eq!(parse_body(&stdout(&o)).1.len(), 3);
}
