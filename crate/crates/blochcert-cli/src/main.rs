//! Command-line front end: runs the bound optimizers, certifies schlicht
//! disks and balls for polynomial inputs, verifies certificates, and emits
//! structured JSON reports.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use blochcert::bounds::{
    bloch_bound_v1, bloch_bound_v2, eh_bound, eh_penalty, optimize_2d, DEFAULT_GAMMA_RANGE,
    DEFAULT_SIGMA_RANGE, EH_GRID, OPT_GRID,
};
use blochcert::contraction::{
    certify_schlicht_opts, search_center, verify_schlicht_disk, SOLVE_MAX_ITER, SOLVE_TOL,
    VERIFY_RESIDUAL_TOL,
};
use blochcert::multivariate::{
    certify_schlicht_mv_grid, estimate_wu_k, jacobian_stats, theorem_bound_mv,
    theorem_bound_mv_ball, verify_schlicht_ball, TORUS_ANGLES,
};
use blochcert::series::CIRCLE_SAMPLES;
use blochcert::{C64, Error, Poly64, PolyMap64};

#[derive(Parser)]
#[command(
    name = "blochcert",
    version,
    about = "Certified lower bounds for Bloch-type constants",
    propagate_version = true
)]
struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Omit the timestamp so identical inputs give byte-identical reports.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate or optimize the closed-form bound formulas.
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
    /// Certify a schlicht disk for a univariate polynomial.
    Certify(CertifyArgs),
    /// Operations on polynomial maps of several complex variables.
    Wu(WuArgs),
}

#[derive(Args)]
struct OptBox {
    /// Lower end of the gamma range.
    #[arg(long, default_value_t = DEFAULT_GAMMA_RANGE.0)]
    gamma_min: f64,
    /// Upper end of the gamma range.
    #[arg(long, default_value_t = DEFAULT_GAMMA_RANGE.1)]
    gamma_max: f64,
    /// Lower end of the sigma range.
    #[arg(long, default_value_t = DEFAULT_SIGMA_RANGE.0)]
    sigma_min: f64,
    /// Upper end of the sigma range.
    #[arg(long, default_value_t = DEFAULT_SIGMA_RANGE.1)]
    sigma_max: f64,
    /// Also dump the coarse objective grid as CSV for plotting.
    #[arg(long)]
    grid_csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Optimize the first one-variable bound (with the 1/gamma factor).
    V1(OptBox),
    /// Optimize the second one-variable bound (the sharper branch).
    V2(OptBox),
    /// The Landau bound at fixed evaluation and coefficient radii.
    Eh {
        /// Evaluation radius.
        #[arg(long)]
        rho: f64,
        /// Coefficient-bound radius, in (rho, 1).
        #[arg(long)]
        r: f64,
        /// Also dump the feasible penalty grid as CSV for plotting.
        #[arg(long)]
        grid_csv: Option<PathBuf>,
    },
    /// The K-mapping theorem bound, optimized over its free parameters.
    Wu {
        /// Dimension of the map.
        #[arg(long)]
        m: u32,
        /// K-mapping constant.
        #[arg(long = "K")]
        k: f64,
        /// Use the ball-domain variant (scales by 1/sqrt(m)).
        #[arg(long)]
        ball: bool,
    },
}

#[derive(Args)]
struct CertifyArgs {
    /// Polynomial file (JSON: {"center": [re, im], "coeffs": [[re, im], ...]}).
    file: PathBuf,

    /// Real expansion center b (requires --rho; excluded by --search).
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,

    /// Domain disk radius rho about b.
    #[arg(long)]
    rho: Option<f64>,

    /// Grid-search the center and radius instead of fixing them.
    #[arg(long)]
    search: bool,

    /// Search range for b (used with --search).
    #[arg(long, default_value_t = -0.3, allow_negative_numbers = true)]
    b_min: f64,
    /// See --b-min.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    b_max: f64,
    /// Search range for rho (used with --search).
    #[arg(long, default_value_t = 0.3)]
    rho_min: f64,
    /// See --rho-min.
    #[arg(long, default_value_t = 0.9)]
    rho_max: f64,
    /// Coarse grid points along b.
    #[arg(long, default_value_t = 61)]
    grid_b: usize,
    /// Coarse grid points along rho.
    #[arg(long, default_value_t = 61)]
    grid_rho: usize,

    /// Verify the certificate on this many image samples.
    #[arg(long)]
    verify: Option<usize>,

    /// Report the Banach kind when the derivative bound permits it.
    #[arg(long)]
    banach: bool,
}

#[derive(Args)]
struct WuArgs {
    /// Polynomial map file (JSON: {"m": ..., "components": [...]}).
    file: PathBuf,

    #[command(subcommand)]
    cmd: WuCmd,
}

#[derive(Subcommand)]
enum WuCmd {
    /// Jacobian singular-value statistics at a point.
    Stats {
        /// Evaluation point as flat coordinates re1,im1,...,rem,imm
        /// (default: the origin).
        #[arg(long, allow_negative_numbers = true, value_delimiter = ',', num_args = 1..)]
        at: Option<Vec<f64>>,
    },
    /// Estimate the K-mapping constant on a polydisk.
    EstimateK {
        /// Polydisk radius.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        /// Angular grid points per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Certify a schlicht ball about F(beta).
    Certify {
        /// Domain polyradius eta.
        #[arg(long)]
        eta: f64,
        /// Shrinkage parameter sigma in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        /// Center beta as flat coordinates (default: the origin).
        #[arg(long, allow_negative_numbers = true, value_delimiter = ',', num_args = 1..)]
        beta: Option<Vec<f64>>,
        /// Torus sample density per angular dimension.
        #[arg(long, default_value_t = TORUS_ANGLES)]
        angles: usize,
        /// Verify the certificate on this many image samples.
        #[arg(long)]
        verify: Option<usize>,
    },
}

/// The envelope every command emits.
#[derive(Serialize, Deserialize)]
struct RunReport {
    command: String,
    inputs: Value,
    results: Value,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Provenance {
    version: String,
    defaults: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

fn provenance(with_timestamp: bool) -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        defaults: json!({
            "circle_samples": CIRCLE_SAMPLES,
            "opt_grid": OPT_GRID,
            "eh_grid": EH_GRID,
            "torus_angles": TORUS_ANGLES,
            "solve_tol": SOLVE_TOL,
            "solve_max_iter": SOLVE_MAX_ITER,
            "residual_tol": VERIFY_RESIDUAL_TOL,
        }),
        timestamp: with_timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Parse(_) | Error::NotNormalized { .. } | Error::SearchFailure(_) => 2,
        Error::DegenerateCenter { .. }
        | Error::NonFinite(_)
        | Error::NonConvergence { .. }
        | Error::DomainEscape { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let stamp = !cli.no_timestamp;
    match run(cli.command) {
        Ok((command, inputs, results, code)) => {
            let report = RunReport {
                command,
                inputs,
                results,
                provenance: provenance(stamp),
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            match out {
                None => print!("{text}"),
                Some(path) => {
                    if let Err(e) = fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

type Outcome = blochcert::Result<(String, Value, Value, u8)>;

fn run(command: Command) -> Outcome {
    match command {
        Command::Bounds { which } => run_bounds(which),
        Command::Certify(args) => run_certify(args),
        Command::Wu(args) => run_wu(args),
    }
}

fn run_bounds(which: BoundsCmd) -> Outcome {
    match which {
        BoundsCmd::V1(opt) => run_opt("bounds v1", &opt, bloch_bound_v1),
        BoundsCmd::V2(opt) => run_opt("bounds v2", &opt, bloch_bound_v2),
        BoundsCmd::Eh { rho, r, grid_csv } => {
            let best = eh_bound(rho, r)?;
            if let Some(path) = grid_csv {
                write_eh_csv(&path, rho, r)?;
            }
            Ok((
                "bounds eh".into(),
                json!({ "rho": rho, "r": r }),
                json!({ "params": best }),
                0,
            ))
        }
        BoundsCmd::Wu { m, k, ball } => {
            let params = if ball {
                theorem_bound_mv_ball(m, k)?
            } else {
                theorem_bound_mv(m, k)?
            };
            Ok((
                "bounds wu".into(),
                json!({ "m": m, "K": k, "ball": ball }),
                json!({ "params": params }),
                0,
            ))
        }
    }
}

fn run_opt(
    name: &str,
    opt: &OptBox,
    f: fn(f64, f64) -> blochcert::Result<f64>,
) -> Outcome {
    let gamma = (opt.gamma_min, opt.gamma_max);
    let sigma = (opt.sigma_min, opt.sigma_max);
    let best = optimize_2d(|g, s| f(g, s).unwrap_or(f64::NAN), gamma, sigma)?;
    if let Some(path) = &opt.grid_csv {
        write_opt_csv(path, f, gamma, sigma)?;
    }
    Ok((
        name.into(),
        json!({
            "gamma_range": [gamma.0, gamma.1],
            "sigma_range": [sigma.0, sigma.1],
        }),
        json!({ "params": best }),
        0,
    ))
}

fn write_opt_csv(
    path: &PathBuf,
    f: fn(f64, f64) -> blochcert::Result<f64>,
    gamma: (f64, f64),
    sigma: (f64, f64),
) -> blochcert::Result<()> {
    let mut csv = String::from("gamma,sigma,value\n");
    for i in 0..OPT_GRID {
        let g = lerp(gamma.0, gamma.1, i, OPT_GRID);
        for j in 0..OPT_GRID {
            let s = lerp(sigma.0, sigma.1, j, OPT_GRID);
            if let Ok(v) = f(g, s) {
                csv.push_str(&format!("{g},{s},{v}\n"));
            }
        }
    }
    fs::write(path, csv).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn write_eh_csv(path: &PathBuf, rho: f64, r: f64) -> blochcert::Result<()> {
    let a3_hi = blochcert::bounds::a3_cap(r, 0.0)?;
    let mut csv = String::from("a2,a3,penalty\n");
    for i in 0..EH_GRID {
        let a2 = lerp(0.0, 1.0, i, EH_GRID);
        for j in 0..EH_GRID {
            let a3 = lerp(0.0, a3_hi, j, EH_GRID);
            if let Ok(p) = eh_penalty(rho, r, a2, a3) {
                csv.push_str(&format!("{a2},{a3},{p}\n"));
            }
        }
    }
    fs::write(path, csv).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn read_file(path: &PathBuf) -> blochcert::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn run_certify(args: CertifyArgs) -> Outcome {
    let poly = Poly64::from_json(&read_file(&args.file)?)?;
    let (cert, inputs) = if args.search {
        if args.b.is_some() || args.rho.is_some() {
            return Err(Error::Domain(
                "--search and --b/--rho are mutually exclusive".into(),
            ));
        }
        let cert = search_center(
            &poly,
            (args.b_min, args.b_max),
            (args.rho_min, args.rho_max),
            (args.grid_b, args.grid_rho),
        )?;
        let inputs = json!({
            "file": args.file.display().to_string(),
            "search": {
                "b_range": [args.b_min, args.b_max],
                "rho_range": [args.rho_min, args.rho_max],
                "grid": [args.grid_b, args.grid_rho],
            },
            "banach": args.banach,
        });
        (cert, inputs)
    } else {
        let b = args
            .b
            .ok_or_else(|| Error::Domain("--b is required without --search".into()))?;
        let rho = args
            .rho
            .ok_or_else(|| Error::Domain("--rho is required without --search".into()))?;
        let cert = certify_schlicht_opts(&poly, C64::new(b, 0.0), rho, args.banach)?;
        let inputs = json!({
            "file": args.file.display().to_string(),
            "b": b,
            "rho": rho,
            "banach": args.banach,
        });
        (cert, inputs)
    };

    let mut results = json!({ "certificate": cert });
    let mut code = 0u8;
    if let Some(n) = args.verify {
        let report = verify_schlicht_disk(&poly, &cert, n)?;
        if !report.is_clean() {
            code = 4;
        }
        results["verify"] = json!(report);
    }
    Ok(("certify".into(), inputs, results, code))
}

fn parse_point(coords: Option<Vec<f64>>, m: usize) -> blochcert::Result<Vec<C64>> {
    match coords {
        None => Ok(vec![C64::new(0.0, 0.0); m]),
        Some(flat) => {
            if flat.len() != 2 * m {
                return Err(Error::Domain(format!(
                    "expected {} flat coordinates (re,im per variable), got {}",
                    2 * m,
                    flat.len()
                )));
            }
            Ok(flat.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
        }
    }
}

fn point_json(z: &[C64]) -> Value {
    json!(z.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
}

fn run_wu(args: WuArgs) -> Outcome {
    let map = PolyMap64::from_json(&read_file(&args.file)?)?;
    let file = args.file.display().to_string();
    match args.cmd {
        WuCmd::Stats { at } => {
            let z = parse_point(at, map.dim())?;
            let stats = jacobian_stats(&map, &z)?;
            let code = if stats.degenerate { 3 } else { 0 };
            Ok((
                "wu stats".into(),
                json!({ "file": file, "at": point_json(&z) }),
                json!({ "stats": stats }),
                code,
            ))
        }
        WuCmd::EstimateK { radius, grid } => {
            let est = estimate_wu_k(&map, radius, grid)?;
            let code = if est.degenerate { 3 } else { 0 };
            Ok((
                "wu estimate-k".into(),
                json!({ "file": file, "radius": radius, "grid": grid }),
                json!({ "estimate": est }),
                code,
            ))
        }
        WuCmd::Certify {
            eta,
            sigma,
            beta,
            angles,
            verify,
        } => {
            let beta = parse_point(beta, map.dim())?;
            let cert = certify_schlicht_mv_grid(&map, &beta, eta, sigma, angles)?;
            let mut results = json!({ "certificate": cert });
            let mut code = 0u8;
            if let Some(n) = verify {
                let report = verify_schlicht_ball(&map, &cert, n)?;
                if !report.is_clean() {
                    code = 4;
                }
                results["verify"] = json!(report);
            }
            Ok((
                "wu certify".into(),
                json!({
                    "file": file,
                    "beta": point_json(&beta),
                    "eta": eta,
                    "sigma": sigma,
                    "angles": angles,
                }),
                results,
                code,
            ))
        }
    }
}
