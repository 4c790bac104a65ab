//! `chevron` command-line driver.
//!
//! Exit codes: 0 success, 1 runtime or model error (including a failed
//! check), 2 usage or configuration error.

mod csvio;

pub use csvio::{read_energy_csv, EnergyCsvWriter};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{make_initial, RunConfig, PRNG_NAME};
use crate::energy::{check_dissipativity, EnergyRecord, EnergyRecorder, LyapunovFunctional};
use crate::error::ChevronError;
use crate::pde::{convergence_study, run, Observer};
use crate::reduced::{
    bifurcation_scan, critical_chi, fixed_points, portrait, Basin, ReducedParams, ReducedSystem,
};
use crate::snapshot;
use crate::state::SimState;

#[derive(Debug, Parser)]
#[command(name = "chevron", version, about = "Chevron-pattern amplitude equations: simulation and reduced dynamics")]
pub struct Cli {
    /// Run configuration file (key = value lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for the random initial condition; overrides `seed`.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Suppress the human-readable summary on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the PDE system, logging energies, snapshots and a final checkpoint.
    Simulate(Overrides),
    /// Re-evaluate the dissipativity bound on an energy.csv log.
    EnergyCheck {
        /// Energy log written by `simulate`.
        csv: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Equilibria of a reduced system with their classification.
    FixedPoints(ReducedArgs),
    /// Orbits from a grid of seeds and their terminal basins.
    Portrait {
        #[command(flatten)]
        reduced: ReducedArgs,
        /// Seed values of rho, as start:step:end, a list a,b,c, or a single value.
        #[arg(long, default_value = "0.1:0.2:1.5", allow_hyphen_values = true)]
        rho: String,
        /// Seed values of phi, same syntax as --rho.
        #[arg(long, default_value = "-1.5:0.3:1.5", allow_hyphen_values = true)]
        phi: String,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Count of equilibria with rho > 0 of the phase-gradient system over a (c1, chi) grid.
    Bifurcation {
        /// c1 values (start:step:end, list, or single value).
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        /// chi values (start:step:end, list, or single value).
        #[arg(long, allow_hyphen_values = true)]
        chi: String,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 0.5)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// Temporal self-convergence study of the configured scheme.
    Convergence(Overrides),
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Override a config key, e.g. --set c1=0.7 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ReducedArgs {
    /// uniform | phase_grad
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.5)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    /// Phase gradient; ignored by the uniform system.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub chi: f64,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<ChevronError> for CliError {
    fn from(e: ChevronError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Runtime(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Simulate(o) => cmd_simulate(&load_config(cli, o)?, cli.quiet),
        Command::EnergyCheck { csv, overrides } => cmd_energy_check(csv, &load_config(cli, overrides)?, cli.quiet),
        Command::FixedPoints(r) => cmd_fixed_points(r, &reduced_out_dir(cli), cli.quiet),
        Command::Portrait { reduced, rho, phi, t_end, dt } => {
            let seeds = seed_grid(&parse_values(rho).map_err(usage)?, &parse_values(phi).map_err(usage)?);
            cmd_portrait(reduced, &seeds, *t_end, *dt, &reduced_out_dir(cli), cli.quiet)
        }
        Command::Bifurcation { c1, chi, c2, h, tau } => {
            let c1 = parse_values(c1).map_err(usage)?;
            let chi = parse_values(chi).map_err(usage)?;
            cmd_bifurcation(&c1, &chi, *c2, *h, *tau, &reduced_out_dir(cli), cli.quiet)
        }
        Command::Convergence(o) => cmd_convergence(&load_config(cli, o)?, cli.quiet),
    }
}

fn load_config(cli: &Cli, o: &Overrides) -> CliResult<RunConfig> {
    let mut overrides = o.set.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(out) = &cli.out {
        overrides.push(format!("output_dir={}", out.display()));
    }
    match &cli.config {
        Some(path) => RunConfig::load(path, &overrides),
        None => RunConfig::parse_with_overrides("", "<defaults>", &overrides),
    }
    .map_err(usage)
}

fn reduced_out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn create_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

/// Parses `start:step:end` (inclusive), `a,b,c`, or a single number.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number in '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [start, step, end] => {
            let (a, s, b) = (num(start)?, num(step)?, num(end)?);
            if !(s > 0.0 && s.is_finite() && a.is_finite() && b.is_finite() && b >= a) {
                return Err(format!("range '{spec}' needs step > 0 and end >= start"));
            }
            let n = ((b - a) / s + 1e-9).floor() as usize + 1;
            if n > 10_000_000 {
                return Err(format!("range '{spec}' has too many points"));
            }
            // Round to the step's decimal grid so 0:0.05:2 yields 1.2, not 1.2000000000000002.
            (0..n).map(|k| tidy(a + k as f64 * s)).collect()
        }
        [_] => spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("cannot parse '{spec}' (use start:step:end, a,b,c or a value)")),
    };
    if values.is_empty() {
        return Err(format!("'{spec}' is empty"));
    }
    Ok(values)
}

fn tidy(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if (r - v).abs() <= 1e-12 * v.abs().max(1.0) {
        r
    } else {
        v
    }
}

fn seed_grid(rho: &[f64], phi: &[f64]) -> Vec<(f64, f64)> {
    rho.iter().flat_map(|&r| phi.iter().map(move |&q| (r, q))).collect()
}

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------- simulate

struct CsvObserver<'a> {
    recorder: EnergyRecorder,
    writer: &'a mut EnergyCsvWriter,
}

impl Observer for CsvObserver<'_> {
    fn observe(&mut self, state: &SimState) -> crate::Result<()> {
        self.recorder.observe(state)?;
        let r = self.recorder.records.last().expect("just recorded");
        self.writer.write(r)
    }
}

struct SnapshotObserver {
    dir: PathBuf,
    every: f64,
    next: f64,
}

impl Observer for SnapshotObserver {
    fn observe(&mut self, state: &SimState) -> crate::Result<()> {
        if self.every <= 0.0 || state.t + 1e-9 * self.every < self.next {
            return Ok(());
        }
        snapshot::write_file(&self.dir.join(snapshot_name(state.t)), state)?;
        while self.next <= state.t + 1e-9 * self.every {
            self.next += self.every;
        }
        Ok(())
    }
}

pub fn snapshot_name(t: f64) -> String {
    format!("snapshot_{t:.6}.chev")
}

fn run_meta(cfg: &RunConfig, dt: f64) -> String {
    let f = LyapunovFunctional::new(&cfg.params, &cfg.grid);
    let mut s = String::new();
    let _ = writeln!(s, "# chevron {} run metadata; this file is a valid --config", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# prng: {PRNG_NAME}");
    let _ = writeln!(s, "# resolved dt: {dt:?}");
    let _ = writeln!(s, "# regime: {}", f.regime.name());
    let _ = writeln!(s, "# lyapunov weights: tau_A = {:?}, phi = {:?}", f.weight_a, f.weight_phi);
    let _ = writeln!(s, "# absorbing level: {:?}", f.absorbing_level());
    s.push_str(&cfg.to_text());
    s
}

pub fn cmd_simulate(cfg: &RunConfig, quiet: bool) -> CliResult {
    let initial = make_initial(&cfg.ic, &cfg.grid).map_err(usage)?;
    if cfg.t_end < initial.t {
        return Err(usage(format!("t_end = {} precedes the initial time {}", cfg.t_end, initial.t)));
    }
    let stepper_cfg = cfg.stepper_config(&initial).map_err(usage)?;
    let dir = &cfg.output_dir;
    create_dir(dir)?;
    let meta = dir.join("run_meta.txt");
    std::fs::write(&meta, run_meta(cfg, stepper_cfg.dt)).map_err(|e| io_err(&meta, e))?;

    let mut writer = EnergyCsvWriter::create(&dir.join("energy.csv"))?;
    let mut energy = CsvObserver { recorder: EnergyRecorder::new(&cfg.params, &cfg.grid), writer: &mut writer };
    let mut snaps = SnapshotObserver { dir: dir.clone(), every: cfg.snapshot_every, next: initial.t };
    let result = run(initial, &cfg.params, &stepper_cfg, cfg.t_end, cfg.observe_every, &mut [&mut energy, &mut snaps]);
    let report = energy.recorder.report();
    let last = energy.recorder.records.last().copied();
    writer.finish()?;
    let final_state = result?;
    snapshot::write_file(&dir.join("checkpoint.chev"), &final_state)?;

    if !quiet {
        println!("simulated t = {} with {} (dt = {:e}) on {}x{}", final_state.t, cfg.scheme.name(), stepper_cfg.dt, cfg.grid.nx(), cfg.grid.ny());
        if let Some(r) = last {
            println!("final lyapunov = {:.6e}, bound = {:.6e}", r.lyapunov, r.bound);
        }
        print!("{report}");
        println!("outputs in {}", dir.display());
    }
    Ok(())
}

// ---------------------------------------------------------------- energy-check

/// Recomputes the bound column from the parameters, anchored at the first row.
pub fn rebound(records: &[EnergyRecord], f: &LyapunovFunctional) -> Vec<EnergyRecord> {
    let Some(first) = records.first() else { return Vec::new() };
    let (t0, l0) = (first.t, first.lyapunov);
    records.iter().map(|r| EnergyRecord { bound: f.bound(l0, r.t - t0), ..*r }).collect()
}

pub fn cmd_energy_check(csv: &Path, cfg: &RunConfig, quiet: bool) -> CliResult {
    let records = read_energy_csv(csv)?;
    let f = LyapunovFunctional::new(&cfg.params, &cfg.grid);
    let report = check_dissipativity(&rebound(&records, &f), f.regime);
    if !quiet {
        println!("{}: {} records", csv.display(), records.len());
        print!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("{} dissipativity violation(s)", report.violations.len())))
    }
}

// ---------------------------------------------------------------- reduced systems

fn reduced_params(r: &ReducedArgs) -> CliResult<(ReducedSystem, ReducedParams)> {
    let system: ReducedSystem = r.system.parse().map_err(usage)?;
    let p = ReducedParams { tau: r.tau, c1: r.c1, c2: r.c2, h: r.h, chi: r.chi };
    p.validate().map_err(usage)?;
    Ok((system, p))
}

pub fn cmd_fixed_points(r: &ReducedArgs, out: &Path, quiet: bool) -> CliResult {
    let (system, p) = reduced_params(r)?;
    let points = fixed_points(system, &p)?;
    create_dir(out)?;
    let path = out.join("fixed_points.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
    let mut rows = vec![["rho", "phi", "re_l1", "im_l1", "re_l2", "im_l2", "kind"].map(String::from)];
    for fp in &points {
        let [l1, l2] = fp.eigenvalues;
        rows.push([f(fp.rho), f(fp.phi), f(l1.re), f(l1.im), f(l2.re), f(l2.im), fp.kind.name().to_string()]);
    }
    for row in &rows {
        w.write_record(row).map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    if !quiet {
        println!("{} system, tau = {}, c1 = {}, c2 = {}, h = {}, chi = {}", system.name(), p.tau, p.c1, p.c2, p.h, p.chi);
        if system == ReducedSystem::PhaseGrad {
            match critical_chi(p.c1) {
                Some(c) => println!("critical chi = {c:.6}"),
                None => println!("critical chi: none (c1 >= 1)"),
            }
        }
        println!("{:>14} {:>14}  {:>26}  {:>26}  kind", "rho", "phi", "lambda1", "lambda2");
        for fp in &points {
            let [l1, l2] = fp.eigenvalues;
            println!(
                "{:>14.10} {:>14.10}  {:>12.6} {:>+12.6}i  {:>12.6} {:>+12.6}i  {}",
                fp.rho, fp.phi, l1.re, l1.im, l2.re, l2.im, fp.kind
            );
        }
        println!("{} point(s); table in {}", points.len(), path.display());
    }
    Ok(())
}

pub fn cmd_portrait(r: &ReducedArgs, seeds: &[(f64, f64)], t_end: f64, dt: f64, out: &Path, quiet: bool) -> CliResult {
    let (system, p) = reduced_params(r)?;
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(usage(format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}")));
    }
    let orbits = portrait(system, &p, seeds, t_end, dt)?;
    create_dir(out)?;
    let path = out.join("portrait.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
    w.write_record(["orbit_id", "t", "rho", "phi", "basin"]).map_err(|e| io_err(&path, e))?;
    for (id, o) in orbits.iter().enumerate() {
        let basin = o.basin.to_string();
        for &(t, rho, phi) in &o.orbit.samples {
            w.write_record([id.to_string(), f(t), f(rho), f(phi), basin.clone()]).map_err(|e| io_err(&path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    if !quiet {
        let mut tally: Vec<(String, usize)> = Vec::new();
        for o in &orbits {
            let key = o.basin.to_string();
            match tally.iter_mut().find(|(k, _)| *k == key) {
                Some((_, n)) => *n += 1,
                None => tally.push((key, 1)),
            }
        }
        println!("{} orbits of the {} system to t = {t_end}", orbits.len(), system.name());
        for (basin, n) in &tally {
            println!("  {basin:>24}: {n}");
        }
        let unresolved = orbits.iter().filter(|o| o.basin == Basin::Unresolved).count();
        if unresolved > 0 {
            println!("  ({unresolved} orbit(s) did not settle within 1e-2 of an equilibrium)");
        }
        println!("orbits in {}", path.display());
    }
    Ok(())
}

pub fn cmd_bifurcation(c1: &[f64], chi: &[f64], c2: f64, h: f64, tau: f64, out: &Path, quiet: bool) -> CliResult {
    let table = bifurcation_scan(c1, chi, c2, h, tau)?;
    create_dir(out)?;
    let path = out.join("bifurcation.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
    w.write_record(["c1", "chi", "count"]).map_err(|e| io_err(&path, e))?;
    for c in &table {
        w.write_record([f(c.c1), f(c.chi), c.count.to_string()]).map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    if !quiet {
        println!("equilibria with rho > 0 (c2 = {c2}, h = {h}, tau = {tau})");
        for &a in c1 {
            let row: Vec<_> = table.iter().filter(|c| c.c1 == a).collect();
            let counts: String = row.iter().map(|c| c.count.to_string()).collect::<Vec<_>>().join(" ");
            let last_nonzero = row.iter().rev().find(|c| c.count > 0).map(|c| c.chi);
            let first_zero_after = last_nonzero.and_then(|x| row.iter().find(|c| c.chi > x).map(|c| c.chi));
            let crit = critical_chi(a).map_or("none".to_string(), |c| format!("{c:.4}"));
            let edge = match (last_nonzero, first_zero_after) {
                (Some(a), Some(b)) => format!("count drops to 0 between chi = {a} and {b}"),
                (Some(_), None) => "nonzero through the last chi".to_string(),
                (None, _) => "zero everywhere".to_string(),
            };
            println!("c1 = {a}: [{counts}]  {edge}; critical chi = {crit}");
        }
        println!("table in {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------- convergence

pub fn cmd_convergence(cfg: &RunConfig, quiet: bool) -> CliResult {
    let initial = make_initial(&cfg.ic, &cfg.grid).map_err(usage)?;
    let dt = cfg.resolve_dt(&initial);
    let duration = cfg.t_end - initial.t;
    let report = match convergence_study(&cfg.params, &initial, cfg.scheme, dt, duration) {
        Ok(r) => r,
        Err(ChevronError::BlowUp { t, max_abs_a, max_abs_phi }) => {
            return Err(CliError::Runtime(format!(
                "{} blew up at t = {t:.6} (max |A| = {max_abs_a:.3e}, max |phi| = {max_abs_phi:.3e}) with dt = {dt:e}; \
                 the step is likely above the stability limit, try dt = auto or a smaller safety factor",
                cfg.scheme.name()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let threshold = cfg.scheme.order_threshold();
    if !quiet {
        println!("scheme {} on {}x{}, t in [0, {duration}]", cfg.scheme.name(), cfg.grid.nx(), cfg.grid.ny());
        for k in 0..3 {
            println!("  dt = {:.6e}  error = {:.6e}", report.dts[k], report.errors[k]);
        }
        println!("observed order {:.4} (threshold {threshold}); next ratio {:.4}", report.orders[0], report.orders[1]);
    }
    if report.order() >= threshold {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("observed order {:.4} below {threshold}", report.order())))
    }
}
