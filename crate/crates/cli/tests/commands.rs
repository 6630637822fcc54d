use crg_cli::{config_from_args, run, CliError};
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;

const SIN: &str = "expsum:[(0,-0.5)]exp((0,1));[(0,0.5)]exp((0,-1))";

fn run_args(args: &[&str]) -> Result<Vec<crg_cli::Artifact>, CliError> {
    let config = config_from_args(std::iter::once("crglab").chain(args.iter().copied()))?;
    run(&config)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crg-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn crglab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_crglab")).args(args).output().unwrap()
}

#[test]
fn indicator_of_exp_is_cosine() {
    let out = run_args(&[
        "indicator",
        "--fn",
        "expsum:[1]exp(1)",
        "--thetas",
        "360",
        "--radii",
        "1e2,1e3",
    ])
    .unwrap();
    let text = String::from_utf8(out[0].bytes.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,h_exact,h_empirical"));
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - v[0].cos()).abs() < 1e-15);
        assert!((v[2] - v[0].cos()).abs() < 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 360);
    assert!(!text.contains('\r') && text.ends_with('\n'));
}

#[test]
fn sine_measure_is_positive() {
    let out = run_args(&[
        "measure",
        "--fn",
        SIN,
        "--window",
        "0,6.2832,-3,3",
        "--mc",
        "20000",
        "--seed",
        "42",
    ])
    .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out[0].bytes).unwrap();
    assert_eq!(v["format_version"], 1);
    assert!(v["density"]["density"].as_f64().unwrap() > 0.0);
    assert_eq!(v["density"]["total"], 20000);
}

#[test]
fn besicovitch_certificate() {
    let dir = scratch("bes");
    let pts: String = (0..200)
        .map(|i| format!("{} {}\n", (i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
        .collect();
    std::fs::write(dir.join("pts.txt"), pts).unwrap();
    let radii: String = (0..200).map(|i| format!("{}\n", 0.05 + 0.001 * i as f64)).collect();
    std::fs::write(dir.join("r.txt"), radii).unwrap();
    let p = dir.join("pts.txt").display().to_string();
    let r = dir.join("r.txt").display().to_string();
    let out = run_args(&["covering", "besicovitch", "--points", &p, "--radii", &r]).unwrap();
    assert_eq!(out[0].name, "disks.txt");
    let disks = crg_core::DiskSet::from_text(std::str::from_utf8(&out[0].bytes).unwrap()).unwrap();
    let cert: serde_json::Value = serde_json::from_slice(&out[1].bytes).unwrap();
    assert!(cert["max_multiplicity"].as_u64().unwrap() <= 256);
    assert_eq!(cert["uncovered"], 0);
    assert_eq!(disks.len(), cert["selected"].as_array().unwrap().len());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn crg_and_sector_csvs() {
    let out = run_args(&[
        "verify-crg",
        "--fn",
        "product:zeros=pow(2),genus=0,cut=1e-6",
        "--radii",
        "1e4",
        "--thetas",
        &PI.to_string(),
    ])
    .unwrap();
    let text = String::from_utf8(out[0].bytes.clone()).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((row[3] - PI * 100.0).abs() < 1e-9);
    assert!(row[4].abs() < 0.1);

    let out = run_args(&[
        "check-8l",
        "--fn",
        SIN,
        "--radii",
        "1e3",
        "--thetas",
        &(PI / 2.0).to_string(),
    ])
    .unwrap();
    let text = String::from_utf8(out[0].bytes.clone()).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((row[2] - 1e3).abs() < 1e-9, "{text}");
}

#[test]
fn error_classes() {
    let usage = |args: &[&str]| matches!(run_args(args), Err(CliError::Usage(_)));
    assert!(usage(&["indicator", "--fn", "expsum:[1]exp(1", "--radii", "1"]));
    assert!(usage(&["indicator", "--fn", "expsum:[1]exp(1)", "--radii", "2,1"]));
    assert!(usage(&["measure", "--fn", SIN, "--window", "1,0,0,1", "--mc", "10"]));
    assert!(usage(&["measure", "--fn", SIN, "--window", "0,1,0,1"]));
    assert!(usage(&[
        "density",
        "--fn",
        SIN,
        "--annulus",
        "5",
        "--grid",
        "3",
        "--beta",
        "linear:2"
    ]));
    assert!(usage(&[
        "density",
        "--fn",
        SIN,
        "--annulus",
        "5",
        "--mc",
        "10",
        "--beta",
        "linear:0.5"
    ]));
    assert!(usage(&["verify-crg", "--fn", SIN, "--radii", "1e3", "--thetas", "1"]));
    assert!(usage(&[
        "check-8l",
        "--fn",
        SIN,
        "--radii",
        "20",
        "--thetas",
        "1.5707963267948966"
    ]));
    assert!(usage(&[
        "schwarz-check",
        "--fn",
        SIN,
        "--at",
        "1,2",
        "--radius",
        "0.5",
        "--nodes",
        "100"
    ]));
    // a radius of 1.5 around 1 + 0.2i reaches the zero at 0
    assert!(matches!(
        run_args(&["schwarz-check", "--fn", SIN, "--at", "1,0.2", "--radius", "1.5"]),
        Err(CliError::Numeric(_))
    ));
}

#[test]
fn binary_exit_codes_and_output_directory() {
    assert_eq!(
        crglab(&["indicator", "--fn", "expsum:[1]exp(", "--radii", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(crglab(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(crglab(&["--help"]).status.code(), Some(0));
    assert_eq!(
        crglab(&["schwarz-check", "--fn", SIN, "--at", "1,0.2", "--radius", "1.5"])
            .status
            .code(),
        Some(2)
    );
    let dir = scratch("fuchs");
    std::fs::write(dir.join("p.txt"), "0 0\n0.5 0.5\n# comment\n1 1\n").unwrap();
    // an impossible tolerance makes the Schwarz audit fail while keeping its CSV
    let out_dir = dir.join("out");
    let out = crglab(&[
        "--out",
        out_dir.to_str().unwrap(),
        "schwarz-check",
        "--fn",
        "expsum:[1]exp(1)",
        "--at",
        "1,1",
        "--radius",
        "0.5",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("schwarz.csv").exists());
    let out = crglab(&[
        "--out",
        out_dir.to_str().unwrap(),
        "covering",
        "fuchs",
        "--points",
        dir.join("p.txt").to_str().unwrap(),
        "--h",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cert: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("certificate.json")).unwrap()).unwrap();
    assert!(cert["sum_sq_radii"].as_f64().unwrap() <= 1.0);
    let bad = Command::new(env!("CARGO_BIN_EXE_crglab"))
        .env("CRG_THREADS", "many")
        .args(["indicator", "--fn", "expsum:[1]exp(1)", "--radii", "1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn pgm_layout() {
    let out = run_args(&[
        "escape-map",
        "--fn",
        SIN,
        "--window",
        "-1,1,-2,2",
        "--width",
        "5",
        "--height",
        "3",
    ])
    .unwrap();
    assert!(out[0].bytes.starts_with(b"P5\n5 3\n255\n"));
    assert_eq!(out[0].bytes.len(), "P5\n5 3\n255\n".len() + 15);
}
