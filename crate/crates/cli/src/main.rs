//! `gallery`: file-based front end to the laboratory pipelines.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand, ValueEnum};
use gallery_core::dynamics::{dispersive_decay_fit, log_spaced};
use gallery_core::experiments::{gallery_strichartz_ladder, run_ladder, write_config_header, ExperimentConfig, SCHEMA_VERSION};
use gallery_core::measure::{h_norm, lr_norm};
use gallery_core::rays::{collision_period, hamiltonian, hop, reflect_and_continue, PhaseState, RayPath};
use gallery_core::spectral::{closed_form_profile, mode_ode_residual, ModeSpec};
use gallery_core::synthesis::{wave_packet, LpCutoff, PacketSpec, C64};
use gallery_core::{LabError, Result};
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gallery", version, about = "Gallery-wave numerical laboratory")]
struct Cli {
    /// Directory receiving output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Json
    }
    fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Subcommand)]
enum Command {
    /// Bicharacteristic through several boundary collisions.
    TraceRay(TraceRay),
    /// Closed-form normal mode profile.
    Mode(Mode),
    /// Dyadic wave packet at one level.
    Packet(Packet),
    /// Decay fit of the dispersive integral.
    Dispersive(Dispersive),
    /// Growth ladder from an experiment config.
    Ladder(ConfigArg),
    /// Gallery-mode Strichartz ladder from an experiment config.
    GalleryStrichartz(ConfigArg),
}

#[derive(Args)]
struct TraceRay {
    #[arg(long)]
    kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    xd0: f64,
    /// Tangential frequency, comma separated (length d−1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    xip: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    xid0: f64,
    /// Tangential position, comma separated; zeros by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xp0: Vec<f64>,
    /// Time frequency; must lie on the characteristic set. Defaults to the forward root.
    #[arg(long, allow_hyphen_values = true)]
    tau0: Option<f64>,
    #[arg(long, default_value_t = 1)]
    reflections: usize,
    #[arg(long, default_value_t = 64)]
    samples_per_segment: usize,
}

#[derive(Args)]
struct Mode {
    #[arg(long)]
    kappa: f64,
    /// Quantized index, `μ = 2κn + 1`.
    #[arg(long, conflicts_with = "mu")]
    n: Option<u32>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    smax: f64,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
}

#[derive(Args)]
struct Packet {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    kappa: f64,
    #[arg(long)]
    j: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
}

#[derive(Args)]
struct Dispersive {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    j: i32,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 100.0)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1e4)]
    lambda_max: f64,
    #[arg(long, default_value_t = 8)]
    points: usize,
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
}

#[derive(Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| LabError::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn pairs(items: &[(&str, String)]) -> Vec<(String, String)> {
    items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn config_json(p: &[(String, String)]) -> serde_json::Value {
    serde_json::Value::Object(p.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn trace_ray(a: &TraceRay, out: &Path, fmt: Format) -> Result<()> {
    if !(a.kappa > 0.0) {
        return Err(LabError::Validation(format!("kappa must be positive, got {}", a.kappa)));
    }
    if !(a.xd0 >= 0.0) {
        return Err(LabError::Validation(format!("xd must be ≥ 0, got {}", a.xd0)));
    }
    let xp = if a.xp0.is_empty() { vec![0.0; a.xip.len()] } else { a.xp0.clone() };
    let mut st = PhaseState::on_characteristic(a.kappa, a.xd0, xp, a.xid0, a.xip.clone(), true);
    if let Some(tau) = a.tau0 {
        let scale = st.tau * st.tau;
        st.tau = tau;
        if hamiltonian(&st, a.kappa).abs() > 1e-9 * scale.max(tau * tau).max(f64::MIN_POSITIVE) {
            return Err(LabError::Validation(format!(
                "state is off the characteristic set: tau0^2 = {} but kappa*xd*|xi|^2 = {scale}",
                tau * tau
            )));
        }
    }
    let path = reflect_and_continue(RayPath::new(st.clone(), a.kappa)?, a.reflections);
    let cfg = pairs(&[
        ("kappa", format!("{}", a.kappa)),
        ("xd0", format!("{}", a.xd0)),
        ("xp0", list(&st.xp)),
        ("xid0", format!("{}", a.xid0)),
        ("xip", list(&a.xip)),
        ("tau0", format!("{}", st.tau)),
        ("reflections", a.reflections.to_string()),
        ("samples_per_segment", a.samples_per_segment.to_string()),
    ]);
    if fmt.csv() {
        let mut w = create(out, "ray.csv")?;
        write_config_header(&mut w, &cfg)?;
        path.write_csv(&mut w, a.samples_per_segment)?;
        w.flush()?;
        let mut w = create(out, "collisions.csv")?;
        write_config_header(&mut w, &cfg)?;
        path.write_collisions_csv(&mut w)?;
        w.flush()?;
    }
    if fmt.json() {
        write_json(
            out,
            "ray.json",
            &json!({
                "schema_version": SCHEMA_VERSION,
                "config": config_json(&cfg),
                "segments": path.segments.len(),
                "collisions": path.collisions.iter().map(|c| json!({"k": c.k, "s": c.s, "t": c.t, "xp": c.xp})).collect::<Vec<_>>(),
                "collision_period": collision_period(&st, a.kappa),
                "hop": hop(&st),
            }),
        )?;
    }
    println!("{} segments, {} collisions", path.segments.len(), path.collisions.len());
    Ok(())
}

fn mode(a: &Mode, out: &Path, fmt: Format) -> Result<()> {
    let spec = match (a.n, a.mu) {
        (Some(n), _) => ModeSpec::quantized(a.kappa, n)?,
        (None, Some(mu)) => ModeSpec::with_mu(a.kappa, mu)?,
        (None, None) => return Err(LabError::Validation("one of --n or --mu is required".into())),
    };
    if !(a.smax > 0.0) || !(a.xi > 0.0) {
        return Err(LabError::Validation("smax and xi must be positive".into()));
    }
    let profile = closed_form_profile(spec, a.xi, a.smax)?;
    let residual = mode_ode_residual(&profile);
    let cfg = pairs(&[
        ("kappa", format!("{}", a.kappa)),
        ("mu", format!("{}", spec.mu)),
        ("smax", format!("{}", a.smax)),
        ("xi", format!("{}", a.xi)),
    ]);
    if fmt.csv() {
        let mut w = create(out, "mode.csv")?;
        write_config_header(&mut w, &cfg)?;
        writeln!(w, "# ode_residual={residual:e}")?;
        profile.write_csv(&mut w)?;
        w.flush()?;
    }
    if fmt.json() {
        write_json(
            out,
            "mode.json",
            &json!({
                "schema_version": SCHEMA_VERSION,
                "config": config_json(&cfg),
                "n": spec.n,
                "ode_residual": residual,
                "contamination_bound": profile.contamination_bound,
                "points": profile.s_grid.len(),
            }),
        )?;
    }
    println!("mu = {}, ode residual = {residual:.3e}", spec.mu);
    Ok(())
}

fn packet(a: &Packet, out: &Path, fmt: Format) -> Result<()> {
    let spec = PacketSpec::new(a.j, a.d, a.kappa)?;
    let u = wave_packet(&spec, a.t)?;
    let ut = u.scaled(C64::new(0.0, 2f64.powi(a.j as i32)));
    let norms = json!({
        "l2": lr_norm(&u, 2.0)?,
        "l4": lr_norm(&u, 4.0)?,
        "linf": lr_norm(&u, f64::INFINITY)?,
        "h": h_norm(&ut, &u, a.kappa)?,
    });
    let cfg = pairs(&[
        ("d", a.d.to_string()),
        ("kappa", format!("{}", a.kappa)),
        ("j", a.j.to_string()),
        ("t", format!("{}", a.t)),
        ("box_length_0", format!("{}", spec.box_length_0)),
        ("points_per_dim", spec.points_per_dim.to_string()),
        ("sigma_max", format!("{}", spec.sigma_max)),
        ("sigma_step", format!("{}", spec.sigma_step)),
        ("epsilon", format!("{}", spec.window.epsilon)),
    ]);
    if fmt.csv() {
        let mut w = create(out, "packet.csv")?;
        write_config_header(&mut w, &cfg)?;
        u.write_summary_csv(&mut w)?;
        w.flush()?;
    }
    if fmt.json() {
        write_json(out, "packet.json", &json!({"schema_version": SCHEMA_VERSION, "config": config_json(&cfg), "norms": norms}))?;
    }
    println!("{norms}");
    Ok(())
}

fn dispersive(a: &Dispersive, out: &Path, fmt: Format) -> Result<()> {
    if a.points < 2 || !(a.lambda_max > a.lambda_min) {
        return Err(LabError::Validation("need --points >= 2 and lambda-max > lambda-min".into()));
    }
    let lambdas = log_spaced(a.lambda_min, a.lambda_max, a.points);
    let (fit, samples) = dispersive_decay_fit(a.d, a.j, &lambdas, a.mu, &LpCutoff::default(), a.tolerance)?;
    let cfg = pairs(&[
        ("d", a.d.to_string()),
        ("j", a.j.to_string()),
        ("mu", format!("{}", a.mu)),
        ("lambda_min", format!("{}", a.lambda_min)),
        ("lambda_max", format!("{}", a.lambda_max)),
        ("points", a.points.to_string()),
        ("tolerance", format!("{}", a.tolerance)),
    ]);
    if fmt.csv() {
        let mut w = create(out, "dispersive.csv")?;
        write_config_header(&mut w, &cfg)?;
        writeln!(w, "# slope={:.17e}", fit.slope)?;
        writeln!(w, "# predicted_slope={}", fit.predicted_slope)?;
        writeln!(w, "# verdict={}", fit.verdict())?;
        writeln!(w, "lambda,z_norm,re,im,abs")?;
        for s in &samples {
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", s.lambda, s.z_norm, s.re, s.im, s.value().norm())?;
        }
        w.flush()?;
    }
    if fmt.json() {
        write_json(
            out,
            "dispersive.json",
            &json!({"schema_version": SCHEMA_VERSION, "config": config_json(&cfg), "fit": fit, "samples": samples}),
        )?;
    }
    println!("slope {:.4} (predicted {}): {}", fit.slope, fit.predicted_slope, fit.verdict());
    Ok(())
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    ExperimentConfig::parse(&text)
}

fn ladder(a: &ConfigArg, out: &Path, fmt: Format) -> Result<()> {
    let cfg = read_config(&a.config)?;
    let rep = run_ladder(&cfg)?;
    if fmt.csv() {
        let mut w = create(out, "ladder.csv")?;
        rep.write_csv(&mut w)?;
        w.flush()?;
    }
    if fmt.json() {
        let mut w = create(out, "ladder.json")?;
        writeln!(w, "{}", rep.to_json()?)?;
        w.flush()?;
    }
    for f in &rep.fits {
        println!("{:<9} slope {:>8.4}  predicted {:>8.4}  {}", f.name, f.fit.slope, f.fit.predicted_slope, f.fit.verdict());
    }
    for flag in &rep.flags {
        println!("note: {flag}");
    }
    Ok(())
}

fn gallery(a: &ConfigArg, out: &Path, fmt: Format) -> Result<()> {
    let mut cfg = read_config(&a.config)?;
    cfg.experiment = "gallery".into();
    let rep = gallery_strichartz_ladder(&cfg)?;
    if fmt.csv() {
        let mut w = create(out, "gallery.csv")?;
        rep.write_csv(&mut w)?;
        w.flush()?;
    }
    if fmt.json() {
        let mut w = create(out, "gallery.json")?;
        writeln!(w, "{}", rep.to_json()?)?;
        w.flush()?;
    }
    println!(
        "ratio spread {:.4} ({}), slope {:.4} vs bound {:.4}",
        rep.ratio_spread,
        if rep.bounded { "bounded" } else { "unbounded" },
        rep.fit.slope,
        rep.fit.predicted_slope
    );
    Ok(())
}

fn exit_code(e: &LabError) -> u8 {
    match e {
        LabError::Io(_) => 4,
        e if e.is_validation() => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let (out, fmt) = (cli.out_dir.as_path(), cli.format);
    let result = match &cli.command {
        Command::TraceRay(a) => trace_ray(a, out, fmt),
        Command::Mode(a) => mode(a, out, fmt),
        Command::Packet(a) => packet(a, out, fmt),
        Command::Dispersive(a) => dispersive(a, out, fmt),
        Command::Ladder(a) => ladder(a, out, fmt),
        Command::GalleryStrichartz(a) => gallery(a, out, fmt),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
