use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use softhard::acceptance::{run_all, run_criterion};
use softhard::equilibrium::{equilibrium_vc, Potential};
use softhard::experiment::{
    convergence_artifacts, critical_constants, density_artifacts, diagonal_artifacts, emit_report, run_converge,
    Artifact, ExperimentConfig,
};
use softhard::fredholm::{airy_det, smallest_eig_cdf, GapComparison};
use softhard::limitkernel::solve_fg;
use softhard::orthopoly::{stieltjes_table, write_recurrence_csv, CDKernelContext, PrecisionMode, WeightSpec};
use softhard::painleve::{hm_diagnostics, shared_cache, tw_cdf};

#[derive(Parser)]
#[command(name = "softhard", version, about = "Kernels where the soft edge meets the hard edge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long = "L", allow_hyphen_values = true)]
    l: Option<String>,
    /// Comma-separated increasing degrees
    #[arg(long)]
    nlist: Option<String>,
    /// x_lo,x_hi
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium densities (all three model cases unless --c is given)
    Eqdensity {
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Recurrence coefficients of x^alpha e^{-N V_c(x)} with N = n
    Recurrence {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Rescaled finite-n kernel diagonal on the window, for each n in nlist
    Kernel {
        #[command(flatten)]
        common: Common,
    },
    /// Hastings-McLeod solution with diagnostics
    Hm {
        /// Defaults to alpha + 1/2
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Limiting kernel table and diagonal
    Limitkernel {
        /// Defaults to c2 L
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Gap probabilities against the Tracy-Widom ratio (alpha = 0)
    Fredholm {
        /// Comma-separated right ends of (0, x)
        #[arg(long, default_value = "0.25,0.5,1,1.5,2,3")]
        x: String,
        #[command(flatten)]
        common: Common,
    },
    /// Convergence of rescaled kernels to the limit
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Acceptance criteria
    Selftest {
        /// Run a single criterion (1 to 8)
        #[arg(long)]
        criterion: Option<u8>,
    },
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl Failure {
    fn config(e: impl ToString) -> Self {
        Failure::Config(e.to_string())
    }
    fn numeric(e: impl ToString) -> Self {
        Failure::Numeric(e.to_string())
    }
}

fn resolve(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse_str(&text).map_err(Failure::config)?
        }
        None => ExperimentConfig::default(),
    };
    let flags = [
        ("alpha", &common.alpha),
        ("c", &common.c),
        ("L", &common.l),
        ("nlist", &common.nlist),
        ("window", &common.window),
        ("out", &common.out),
        ("tol", &common.tol),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v).map_err(Failure::config)?;
        }
    }
    cfg.validate().map_err(Failure::config)?;
    Ok(cfg)
}

fn echo(cfg: &ExperimentConfig) -> String {
    match critical_constants(cfg.c) {
        Ok((c1, c2)) => cfg.echo(Some(c1), Some(c2)),
        Err(_) => cfg.echo(None, None),
    }
}

fn write(cfg: &ExperimentConfig, artifacts: &[Artifact]) -> Result<(), Failure> {
    let files = emit_report(&cfg.out, &echo(cfg), artifacts).map_err(Failure::numeric)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Eqdensity { points, common } => {
            let cfg = resolve(&common)?;
            let cs: Vec<f64> = if common.c.is_some() { vec![cfg.c] } else { vec![0.7, 1.0, 1.2] };
            for &c in &cs {
                let m = equilibrium_vc(c).map_err(Failure::config)?;
                let mass = m.total_mass().map_err(Failure::numeric)?;
                println!("c = {c}: support {:?}, edge {:?}, mass - 1 = {:.2e}", m.support, m.edge_type_at_zero, mass - 1.0);
            }
            write(&cfg, &density_artifacts(&cs, points).map_err(Failure::numeric)?)
        }
        Command::Recurrence { n, common } => {
            let cfg = resolve(&common)?;
            let v = Potential::model_vc(cfg.c).map_err(Failure::config)?;
            let weight = WeightSpec::hard_edge(cfg.alpha, v, n as f64).map_err(Failure::config)?;
            let table = stieltjes_table(&weight, n, PrecisionMode::Auto).map_err(Failure::numeric)?;
            println!("n = {n}: {:?} precision, {} panels", table.precision_mode, table.panels);
            let mut body = Vec::new();
            write_recurrence_csv(&table, &mut body).map_err(Failure::numeric)?;
            let body = String::from_utf8(body).map_err(Failure::numeric)?;
            write(&cfg, &[Artifact::Raw { file_name: "recurrence.csv".into(), body }])
        }
        Command::Kernel { common } => {
            let cfg = resolve(&common)?;
            let (c1, _) = critical_constants(cfg.c).map_err(Failure::config)?;
            let v = Potential::model_vc(cfg.c).map_err(Failure::config)?;
            let xs = cfg.window_grid();
            let mut artifacts = Vec::new();
            for &n in &cfg.n_list {
                let d = cfg.derived(n, c1);
                let weight = WeightSpec::hard_edge(cfg.alpha, v.clone(), d.big_n).map_err(Failure::config)?;
                let table = stieltjes_table(&weight, n, PrecisionMode::Auto).map_err(Failure::numeric)?;
                let ctx = CDKernelContext::new(weight, table.into(), n).map_err(Failure::numeric)?;
                let mut rows = Vec::new();
                for &x in &xs {
                    let k = ctx.diagonal(x / d.scale).map_err(Failure::numeric)? / d.scale;
                    rows.push(vec![fmt17(x), fmt17(k)]);
                }
                artifacts.push(Artifact::Table {
                    name: format!("finite_kernel_diagonal_n{n}"),
                    header: vec!["x".into(), "Kxx".into()],
                    rows,
                });
            }
            write(&cfg, &artifacts)
        }
        Command::Hm { nu, common } => {
            let cfg = resolve(&common)?;
            let nu = nu.unwrap_or(cfg.alpha + 0.5);
            let hm = shared_cache().get(nu).map_err(Failure::numeric)?;
            let d = hm_diagnostics(&hm).map_err(Failure::numeric)?;
            println!("nu = {nu} on [{}, {}], {} points", hm.s_min, hm.s_max, hm.points());
            println!("ode residual {:.3e}", d.ode_residual);
            println!("pxxxiv residuals {:.3e} {:.3e}", d.pxxxiv_p1, d.pxxxiv_p2);
            println!("domain-doubling drift {:.3e}", d.drift);
            let grid: Vec<f64> = (0..=440).map(|k| -12.0 + 0.05 * k as f64).collect();
            let mut body = Vec::new();
            hm.write_csv(&grid, &mut body).map_err(Failure::numeric)?;
            let mut artifacts = vec![Artifact::Raw {
                file_name: format!("hm_nu{nu}.csv"),
                body: String::from_utf8(body).map_err(Failure::numeric)?,
            }];
            if nu == 0.0 {
                let xs: Vec<f64> = (0..=120).map(|k| -8.0 + 0.1 * k as f64).collect();
                let t = softhard::painleve::tw_table(&hm, &xs).map_err(Failure::numeric)?;
                let rows = (0..xs.len()).map(|i| vec![fmt17(t.x[i]), fmt17(t.cdf[i]), fmt17(t.density[i])]).collect();
                artifacts.push(Artifact::Table {
                    name: "tracy_widom".into(),
                    header: vec!["x".into(), "F".into(), "density".into()],
                    rows,
                });
            }
            write(&cfg, &artifacts)
        }
        Command::Limitkernel { s, common } => {
            let cfg = resolve(&common)?;
            let s = match s {
                Some(s) => s,
                None => critical_constants(cfg.c).map_err(Failure::config)?.1 * cfg.l,
            };
            let ctx = solve_fg(cfg.alpha, s, cfg.x_max, 1e-12).map_err(Failure::numeric)?;
            let xs = cfg.window_grid();
            let mut table = Vec::new();
            ctx.write_kernel_csv(&xs, &xs, &mut table).map_err(Failure::numeric)?;
            let diag_x: Vec<f64> = (0..=300).map(|k| cfg.window.0 + (cfg.x_max / 2.0 - cfg.window.0) * k as f64 / 300.0).collect();
            let mut artifacts = vec![Artifact::Raw {
                file_name: format!("limit_kernel_alpha{}_s{s}.csv", cfg.alpha),
                body: String::from_utf8(table).map_err(Failure::numeric)?,
            }];
            artifacts.extend(diagonal_artifacts(&ctx, &diag_x).map_err(Failure::numeric)?);
            println!("alpha = {}, s = {s}: K(1,1) = {:.12}", cfg.alpha, ctx.eval_soft_hard(1.0, 1.0).map_err(Failure::numeric)?);
            write(&cfg, &artifacts)
        }
        Command::Fredholm { x, common } => {
            let cfg = resolve(&common)?;
            if cfg.alpha != 0.0 {
                return Err(Failure::Config(format!("gap comparison needs alpha = 0, got {}", cfg.alpha)));
            }
            let xs: Vec<f64> = x
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Config(format!("bad --x list `{x}`")))?;
            let hm = shared_cache().get(0.0).map_err(Failure::numeric)?;
            let det = airy_det(0.0).map_err(Failure::numeric)?;
            let f0 = tw_cdf(&hm, 0.0).map_err(Failure::numeric)?;
            println!("det(I - K_Airy) on (0, inf) = {:.12}, F(0) = {f0:.12}", det.det);
            let ctx = solve_fg(0.0, 0.0, cfg.x_max, 1e-12).map_err(Failure::numeric)?;
            let rows: Vec<GapComparison> =
                xs.iter().map(|&x| smallest_eig_cdf(x, &ctx)).collect::<Result<_, _>>().map_err(Failure::numeric)?;
            for r in &rows {
                println!("x = {}: gap {:.10}, F(-x)/F(0) {:.10}", r.x, r.gap, r.tw_ratio);
            }
            let mut body = Vec::new();
            softhard::fredholm::write_gap_csv(&rows, &mut body).map_err(Failure::numeric)?;
            write(&cfg, &[Artifact::Raw { file_name: "gap.csv".into(), body: String::from_utf8(body).map_err(Failure::numeric)? }])
        }
        Command::Converge { common } => {
            let cfg = resolve(&common)?;
            let t = run_converge(&cfg).map_err(|e| match e {
                softhard::experiment::ExperimentError::Config(c) => Failure::config(c),
                other => Failure::numeric(other),
            })?;
            println!("s = {}, c1 = {}, c2 = {}", t.s, t.c1, t.c2);
            for r in &t.rows {
                match r.error {
                    Some(e) => println!("n = {}: E = {e:.6e}", r.derived.n),
                    None => println!("n = {}: unavailable ({})", r.derived.n, r.note),
                }
            }
            if let Some(rate) = t.empirical_rate() {
                println!("empirical rate n^{rate:.3}");
            }
            write(&cfg, &convergence_artifacts(&t))?;
            if t.rows.iter().all(|r| r.error.is_none()) {
                return Err(Failure::Numeric("no row could be computed".into()));
            }
            Ok(())
        }
        Command::Selftest { criterion } => {
            let outcomes = match criterion {
                Some(id) if (1..=8).contains(&id) => vec![run_criterion(id)],
                Some(id) => return Err(Failure::Config(format!("criteria are numbered 1 to 8, got {id}"))),
                None => run_all(),
            };
            for o in &outcomes {
                println!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed}/{} criteria pass", outcomes.len());
            if passed < outcomes.len() {
                return Err(Failure::Numeric("some criteria fail".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(1)
        }
    }
}
