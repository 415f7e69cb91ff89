use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use miscible::config::{parse_config, SimConfig};
use miscible::output::{self, FieldSnapshot};
use miscible::verify::{self, MmsCase, SweepReport};
use miscible::{par, presets, sim};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Finite-volume simulator for miscible displacement with point wells.
#[derive(Parser)]
#[command(name = "miscible", version)]
struct Cli {
    /// Worker threads for kernels and sweep members.
    #[arg(long, global = true, default_value_t = default_jobs())]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration, write snapshots and the invariant report.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manufactured-solution convergence studies.
    Verify {
        /// pressure, transport, temporal or all.
        #[arg(long, default_value = "all")]
        case: String,
        #[arg(long, default_value = "out/verify")]
        out: PathBuf,
    },
    /// Well-regularization sweep over descending epsilon values.
    SweepEps {
        #[command(flatten)]
        source: Source,
        /// Radii; default 8h, 4h, 2h, 0.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, default_value = "out/sweep-eps")]
        out: PathBuf,
    },
    /// Dispersion-truncation sweep over ascending caps.
    SweepK {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "0.1,1,10,1000000")]
        k: Vec<f64>,
        #[arg(long, default_value = "out/sweep-k")]
        out: PathBuf,
    },
    /// List embedded presets, or print one.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct Source {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Embedded preset name.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<SimConfig> {
        match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_config(&text).with_context(|| format!("in {}", path.display()))?)
            }
            (None, Some(name)) => Ok(presets::preset(name)?),
            (None, None) => bail!("one of --config or --preset is required"),
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_run(cfg: &SimConfig, out: Option<PathBuf>) -> Result<bool> {
    let dir = out.or_else(|| cfg.output.dir.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out/run"));
    let (problem, c0) = cfg.build()?;
    let n_steps = sim::time_steps(cfg.time.final_time, cfg.time.dt)?.len();
    let wanted = output::snapshot_steps(n_steps, cfg.output.cadence);
    let grid = problem.grid.clone();
    let mut write_err = None;
    let result = sim::run(&problem, c0, cfg.time.final_time, cfg.time.dt, &mut |state, rec| {
        log::debug!("step {} t = {:.6} c in [{:.3e}, {:.6}]", rec.step, rec.time, rec.min_c, rec.max_c);
        if write_err.is_none() && wanted.binary_search(&state.step).is_ok() {
            let stem = format!("fields_{:06}", state.step);
            if let Err(e) = output::write_fields(&grid, &FieldSnapshot::of(state), &dir, &stem) {
                write_err = Some(e);
            }
        }
    });
    if let Some(e) = write_err {
        return Err(e).context("writing snapshots");
    }
    let run = result?;
    let report = verify::audit_run(&problem, &run.history);
    output::write_text(&dir.join("report.csv"), &output::report_csv_string(&run.history, &report))?;
    output::write_text(&dir.join("invariants.csv"), &output::checks_csv_string(&report))?;
    println!("{} steps to t = {}; output in {}", n_steps, run.final_state.time, dir.display());
    for c in &report.checks {
        println!("  {:<20} {}  worst {:.3e}  tolerance {:.1e}", c.name, status(c.passed), c.worst, c.tolerance);
    }
    Ok(report.passed())
}

fn print_sweep(r: &SweepReport) {
    println!("{}: {}", r.parameter, status(r.passed));
    println!("  {}", r.summary);
}

fn cmd_verify(case: &str, out: &Path, jobs: usize) -> Result<bool> {
    let cases: Vec<MmsCase> = if case == "all" { MmsCase::ALL.to_vec() } else { vec![case.parse()?] };
    let mut ok = true;
    for c in cases {
        let r = verify::manufactured_convergence(c, &c.default_levels(), jobs)?;
        output::write_text(&out.join(format!("mms_{}.csv", c.name())), &output::sweep_csv_string(&r))?;
        print_sweep(&r);
        ok &= r.passed;
    }
    Ok(ok)
}

fn cmd_sweep_eps(cfg: &SimConfig, eps: Vec<f64>, out: &Path, jobs: usize) -> Result<bool> {
    let eps = if eps.is_empty() {
        let h = cfg.grid()?.h();
        vec![8.0 * h, 4.0 * h, 2.0 * h, 0.0]
    } else {
        eps
    };
    let r = verify::regularization_sweep(cfg, &eps, jobs)?;
    output::write_text(&out.join("sweep_eps.csv"), &output::sweep_csv_string(&r))?;
    print_sweep(&r);
    Ok(r.passed)
}

fn cmd_sweep_k(cfg: &SimConfig, k: Vec<f64>, out: &Path, jobs: usize) -> Result<bool> {
    let r = verify::truncation_sweep(cfg, &k, jobs)?;
    output::write_text(&out.join("sweep_k.csv"), &output::sweep_csv_string(&r))?;
    print_sweep(&r);
    Ok(r.passed)
}

fn cmd_presets(name: Option<String>) -> Result<bool> {
    match name {
        None => presets::names().for_each(|n| println!("{n}")),
        Some(n) => match presets::text(&n) {
            Some(t) => print!("{t}"),
            None => bail!("unknown preset '{n}'"),
        },
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    par::set_threads(cli.jobs);
    let jobs = cli.jobs;
    let result = match cli.command {
        Command::Run { source, out } => source.load().and_then(|cfg| cmd_run(&cfg, out)),
        Command::Verify { case, out } => cmd_verify(&case, &out, jobs),
        Command::SweepEps { source, eps, out } => source.load().and_then(|cfg| cmd_sweep_eps(&cfg, eps, &out, jobs)),
        Command::SweepK { source, k, out } => source.load().and_then(|cfg| cmd_sweep_k(&cfg, k, &out, jobs)),
        Command::Presets { name } => cmd_presets(name),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: invariant check failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
